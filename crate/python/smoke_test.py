"""Smoke test for the pyalgradius extension module.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pyalgradius-*.whl
"""

from fractions import Fraction

import pyalgradius as ar


def main():
    r = ar.radius("(2/3-X)*T-1", "3/2")
    assert r.value.as_fraction() == Fraction(2, 3), r
    print("rational pole:", r.decimal, r.value)

    p = ar.radius("(2/3-X)*T-1", Fraction(3, 2), puiseux=2)
    assert p.value.as_fraction() == Fraction(4, 9)
    print("puiseux, p=2:", p.decimal)

    g = ar.radius("(1-X-X^2)*T-1", 1)
    assert g.value.defining in ([-1, 1, 1], [1, -1, -1])
    print("golden ratio:", g.decimal, g.value)

    c = ar.radius("X*T^2 - T + 1", 1)
    passed, hadamard, deviation = c.cross_check
    assert c.value.as_fraction() == Fraction(1, 4) and passed
    print(f"catalan: {c.decimal} (hadamard {hadamard:.4f})")

    assert ar.radius("T - (X^2 + 1)", 1).is_infinite
    print("polynomial branch: inf")

    coeffs = ar.expand("X*T^2 - T + 1", 1, 8)
    assert coeffs[:6] == [1, 1, 2, 5, 14, 42]
    print("expansion:", coeffs)

    est = ar.estimate("X*T^2 - T + 1", 1, 256)
    print("estimates:", est)

    moduli = ar.candidates("(X^2 - 3/2*X + 1/2)*T^2 - (3/2 - 2*X)*T + 1")
    print("candidate moduli:", [m.to_decimal(6) for m in moduli])

    roots = ar.real_roots([-2, 0, 1])
    assert roots[0] < roots[1] and abs(float(roots[1]) ** 2 - 2) < 1e-12
    print("sqrt 2:", roots[1].refine(Fraction(1, 10**12)))

    rho, upper = ar.directional("(1 - X1 - X2)*T - 1", 1, [1, 1], 64)
    assert upper.as_fraction() == Fraction(1, 2)
    print(f"direction (1,1): estimate {rho:.4f}, bound {upper.to_decimal()}")

    try:
        ar.radius("T^2 - 1 + X", 0)
    except ar.AlgRadiusError as e:
        print("rejected:", e)
    else:
        raise AssertionError("expected an error")

    print("ok")


if __name__ == "__main__":
    main()
