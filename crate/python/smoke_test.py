"""Smoke test for the conebounds extension module.

Build and install it first, e.g. `pip install --no-build-isolation ./crates/py`.
"""

import json
import math

import conebounds as cb


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    disc = cb.Section.disc((0.0, 0.0), 1.0)
    square = cb.Section.polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    axial = cb.Field(0.0, 0.0, 1.0)

    m = square.moments()
    assert close(m.area, 4.0, 1e-14) and close(m.m0, 1 / 3, 1e-14) and abs(m.m1) < 1e-14

    e = cb.e_constant(axial, disc)
    assert close(e, 1 / (2 * math.sqrt(2)), 1e-12), e
    bounds = cb.upper_bounds(axial, disc, 3)
    assert [n for n, _ in bounds] == [1, 2, 3]
    assert all(close(b, (4 * n - 1) * e, 1e-12) for n, b in bounds)
    assert close(cb.e_constant(axial, disc.scaled(0.1)), 0.1 * e, 1e-14)

    a, b, c, d = cb.optimal_gauge(disc)
    assert close(c - b, 1.0, 1e-14) and abs(a) < 1e-14 and abs(d) < 1e-14

    levels = cb.reduced_spectrum(1.0, 3)
    assert all(abs(x - y) < 1e-3 for x, y in zip(levels, [3.0, 7.0, 11.0])), levels

    theta0 = cb.theta0()
    assert 0.5900 < theta0 < 0.5903, theta0

    assert close(cb.robin_wedge(math.pi / 2), -2.0, 1e-14)
    assert cb.robin_cone_bound(square) <= -1.0

    eps_star = cb.concentration_threshold(axial, disc, 1.0)
    assert close(eps_star, math.sqrt(2) / 3, 1e-12)

    report = json.loads(cb.run(json.dumps({"command": {"name": "moments"}, "section": {"inline": json.loads(square.to_json())}})))
    assert close(report["result"]["area"], 4.0, 1e-14), report["result"]

    try:
        cb.Section.polygon([(0, 0), (1, 0), (2, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate polygon accepted")

    print(f"conebounds {cb.__version__}: smoke test passed (e = {e:.6f}, Theta0 = {theta0:.6f})")


if __name__ == "__main__":
    main()
