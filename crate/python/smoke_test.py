"""Smoke test for the Python bindings.

    cd crates/python && maturin develop --release
    python python/smoke_test.py
"""

import math

import nhwind


def close(a, b, tol=1e-6):
    return abs(a - b) <= tol


def main():
    lee = nhwind.BlochModel.lee()
    demo = nhwind.BlochModel.demo()
    print(lee, demo)

    traj = nhwind.loop_period(lee)
    assert traj.zones == 2 and len(traj) == 2 * nhwind.DEFAULT_GRID
    assert close(traj.winding_number(), 1.0)
    assert close(traj.winding_lee(2.0), 0.5)
    assert close(traj.loop_integral(), 1j * math.pi)

    wp, wm = nhwind.band_windings(lee, "transpose")
    assert close(wp + wm, 1.0) and abs(wp.real - 0.5) > 0.01
    first, _ = nhwind.band_windings(lee, "first")
    second, _ = nhwind.band_windings(lee, "second")
    assert abs(first - second) > 1e-3
    print(f"w+ = {wp.real:.9f}, w- = {wm.real:.9f} (transpose gauge)")

    d = nhwind.loop_period(demo, gauge="first")
    assert d.zones == 1
    assert close(d.winding_number(), 1.0) and close(d.winding_lee(0.5), 2.0)

    rep = nhwind.winding_report(lee, with_bands=True)
    assert close(rep.w, 1.0) and rep.w_plus is not None
    print(rep)

    try:
        nhwind.loop_period(demo, gauge="transpose")
    except nhwind.GaugeError as e:
        assert isinstance(e, nhwind.NhwindError)
    else:
        raise AssertionError("transpose gauge accepted for the demo model")
    try:
        nhwind.split_check(demo, "first")
    except nhwind.TrackingError:
        pass
    else:
        raise AssertionError("split_check accepted a 2pi loop")

    h = nhwind.build_chain(lee, 3, "periodic")
    assert len(h) == 6 and all(len(row) == 6 for row in h)

    o = nhwind.ChainSpectrum.solve(lee, 30, "open", left=True)
    p = nhwind.ChainSpectrum.solve(lee, 30, "periodic", left=True)
    assert o.max_abs_imag < 1e-6 and o.gap > 0 and len(o.edge_modes) == 2
    assert o.median_ipr() / p.median_ipr() > 5
    assert o.median_left_ipr() / p.median_left_ipr() > 5
    print(o, f"ipr ratio {o.median_ipr() / p.median_ipr():.2f}")

    right, left = o.localization()
    assert len(right) == len(o) and left is not None
    density, ipr, cls = right[0]
    assert close(sum(density), 1.0, 1e-12) and cls in ("extended", "intermediate", "localized")

    v = p.right_vectors[0]
    lam = p.eigenvalues[0]
    hp = nhwind.build_chain(lee, 30, "periodic")
    res = max(abs(sum(hp[i][j] * v[j] for j in range(60)) - lam * v[i]) for i in range(60))
    assert res < 1e-9, res

    rows = nhwind.spectrum_scan(lee, [10, 20], "periodic")
    assert [r[0] for r in rows] == [10, 20]
    for n, max_imag, _, _, median in rows:
        s = nhwind.ChainSpectrum.solve(lee, n, "periodic")
        assert max_imag == s.max_abs_imag and median == s.median_ipr()

    try:
        nhwind.ChainSpectrum.solve(lee, 4, "twisted")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown boundary condition accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
