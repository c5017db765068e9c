"""Smoke test for the torsion_bt extension module.

Build first:  maturin develop -m crates/python/Cargo.toml --release
"""

import math

import torsion_bt as tb


def main():
    k, e = tb.complete_integrals(0.5)
    assert abs(k - 1.685750354812596) < 1e-12 and abs(e - 1.467462209339427) < 1e-12

    sn, cn, dn = tb.jacobi(complex(0.4, 0.3), 0.7)
    assert abs(sn * sn + cn * cn - 1) < 1e-12
    assert abs(tb.p_max() - 0.9089085) < 1e-6

    rod = tb.Rod(1, 3)
    assert abs(rod.p - 0.63093) < 5e-4
    curve = rod.curve(200)
    assert curve.closed and len(curve) == 601
    assert abs(2 * curve.self_linking() - round(2 * curve.self_linking())) < 0.04

    bt = rod.single_bt(0.02)
    lk = curve.linking(bt)
    assert abs(lk - (curve.self_linking() - 1.5)) < 0.05, lk

    roots = rod.floquet_roots(4)
    target = complex(1.2283, 0.9688)
    best = min(roots, key=lambda z: abs(z - target))
    assert abs(best - target) < 3e-3

    knot = rod.double_bt(4, best)
    assert knot.closed and math.isfinite(knot.min_self_distance())

    try:
        tb.Rod(1, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("(1,2) must be rejected")
    print("smoke test ok:", rod, curve, knot)


if __name__ == "__main__":
    main()
