//! JSON and table rendering of results.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::continuation::ObstructionReport;
use crate::estimate::{CrossCheck, EstimateReport, RadiusEstimate};
use crate::exactpoly::rational_to_string;
use crate::radius::{RadiusResult, RadiusValue, UndecidedReport};
use crate::realalg::RealAlgebraic;
use crate::reinhardt::{ConvexityCheck, DirectionalProfile};
use crate::singularities::{CandidateSet, ComplexBox};

/// JSON number when it fits in 64 bits, decimal string otherwise.
fn int_json(c: &BigInt) -> Value {
    c.to_i64()
        .map_or_else(|| Value::String(c.to_string()), Value::from)
}

pub fn algebraic_json(r: &RealAlgebraic, digits: usize) -> Value {
    let (lo, hi) = r.interval();
    json!({
        "defining": r.defining().primitive_integer_coeffs().iter().map(int_json).collect::<Vec<_>>(),
        "interval": [rational_to_string(lo), rational_to_string(hi)],
        "approx": r.to_decimal(digits),
    })
}

pub fn value_json(v: &RadiusValue, digits: usize) -> Value {
    match v {
        RadiusValue::Finite(r) => algebraic_json(r, digits),
        RadiusValue::Infinite => json!({ "infinite": true }),
    }
}

pub fn box_json(b: &ComplexBox) -> Value {
    serde_json::to_value(b).expect("box serializes")
}

pub fn candidates_json(c: &CandidateSet, digits: usize) -> Value {
    let boxes: Vec<Value> = c
        .boxes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut v = box_json(b);
            v["leading_vanishes"] = c.kinds[i].leading_vanishes.into();
            v["discriminant_vanishes"] = c.kinds[i].discriminant_vanishes.into();
            v["modulus_index"] = c.modulus_of_box(i).into();
            v
        })
        .collect();
    let moduli: Vec<Value> = c
        .moduli
        .iter()
        .map(|m| json!({ "value": algebraic_json(&m.value, digits), "boxes": m.boxes }))
        .collect();
    json!({
        "polynomial": c.d.display_in("X"),
        "origin_candidate": c.origin_candidate,
        "boxes": boxes,
        "moduli": moduli,
    })
}

fn estimate_json(e: &RadiusEstimate) -> Value {
    match e {
        RadiusEstimate::Finite(v) => json!({ "value": v }),
        RadiusEstimate::Infinite => json!({ "infinite": true }),
    }
}

pub fn cross_check_json(c: &CrossCheck) -> Value {
    json!({
        "passed": c.passed,
        "rtol": c.rtol,
        "order": c.order,
        "hadamard": estimate_json(&c.hadamard),
        "deviation": c.deviation,
    })
}

pub fn verdict_json(v: &ObstructionReport) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn radius_json(r: &RadiusResult, digits: usize) -> Value {
    let mut out = json!({
        "radius": value_json(&r.value, digits),
        "decimal": r.decimal,
        "puiseux": r.power,
        "obstructing_box": r.obstructing_box.as_ref().map(box_json),
        "candidates": candidates_json(&r.candidates, digits),
        "verdicts": r.verdicts.iter().map(verdict_json).collect::<Vec<_>>(),
        "cross_check": r.cross_check.as_ref().map(cross_check_json),
    });
    if r.power > 1 {
        out["base_radius"] = value_json(&r.base, digits);
    }
    out
}

pub fn undecided_json(u: &UndecidedReport, digits: usize) -> Value {
    json!({
        "modulus": algebraic_json(&u.modulus, digits),
        "hadamard": u.hadamard.as_ref().map(estimate_json),
        "reason": u.reason,
    })
}

pub fn estimate_report_json(r: &EstimateReport) -> Value {
    json!({
        "order": r.order,
        "window": [r.window.0, r.window.1],
        "hadamard": estimate_json(&r.hadamard),
        "ratio": r.ratio,
        "ratio_convention": r.ratio_convention,
    })
}

pub fn profile_json(p: &DirectionalProfile, digits: usize) -> Value {
    json!({
        "direction": p.direction.iter().map(rational_to_string).collect::<Vec<_>>(),
        "rho_estimate": estimate_json(&p.rho_estimate),
        "rho_upper": value_json(&p.rho_upper, digits),
        "gap": p.gap,
        "gap_flagged": p.gap_flagged,
    })
}

pub fn convexity_json(c: &ConvexityCheck) -> Value {
    json!({
        "passed": c.passed,
        "triples_checked": c.triples_checked,
        "worst_violation": c.worst_violation,
    })
}

/// Left-aligned text table.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.push(
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    );
    for row in rows {
        out.push(line(row.iter().map(String::as_str).collect()));
    }
    out.join("\n") + "\n"
}

pub fn value_text(v: &RadiusValue, digits: usize) -> String {
    match v {
        RadiusValue::Infinite => "infinite".into(),
        RadiusValue::Finite(r) => match r.as_rational() {
            Some(q) => rational_to_string(q),
            None => format!(
                "root of {} ~ {}",
                r.defining().display_in("s"),
                r.to_decimal(digits)
            ),
        },
    }
}

pub fn estimate_text(e: &RadiusEstimate) -> String {
    match e {
        RadiusEstimate::Finite(v) => format!("{v:.6}"),
        RadiusEstimate::Infinite => "infinite".into(),
    }
}

pub fn candidates_text(c: &CandidateSet, verdicts: &[ObstructionReport], digits: usize) -> String {
    let rows: Vec<Vec<String>> = c
        .boxes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let z = b.center_f64();
            let modulus = c.modulus_of_box(i).map_or_else(String::new, |m| {
                value_text(&RadiusValue::Finite(c.moduli[m].value.clone()), digits)
            });
            let kind = match (
                c.kinds[i].leading_vanishes,
                c.kinds[i].discriminant_vanishes,
            ) {
                (true, true) => "lc, disc",
                (true, false) => "lc",
                (false, true) => "disc",
                (false, false) => "",
            };
            let verdict = verdicts.iter().find(|v| v.box_index == i).map_or("-", |v| {
                if v.obstructing {
                    "obstructs"
                } else {
                    "regular"
                }
            });
            vec![
                i.to_string(),
                format!("{:.9}", z.re),
                format!("{:.9}", z.im),
                modulus,
                kind.to_string(),
                verdict.to_string(),
            ]
        })
        .collect();
    table(&["#", "re", "im", "modulus", "vanishes", "verdict"], &rows)
}
