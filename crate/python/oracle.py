"""Independent reference values for the acceptance and golden tests.

Uses numpy/scipy only (LAPACK eigensolvers, finite-difference derivatives,
continuity tracking by nearest energy). Shares no code with the Rust crates.

    python3 python/oracle.py > crates/core/tests/golden/oracle.json
"""

import json
import sys

import numpy as np
import scipy.linalg as sl

SX = np.array([[0, 1], [1, 0]], complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.array([[1, 0], [0, -1]], complex)

LEE = dict(v=0.52, r=0.5, gamma=1.0)


def lee_blocks(v, r, gamma):
    zero = v * SX + 0.5j * gamma * SZ
    plus = r / 2 * SX - 0.5j * r * SZ
    minus = r / 2 * SX + 0.5j * r * SZ
    return minus, zero, plus


def demo_blocks():
    plus = (SX - 1j * SY) / 2
    minus = (SX + 1j * SY) / 2
    return minus, np.zeros((2, 2), complex), plus


def hk(blocks, k):
    minus, zero, plus = blocks
    return minus * np.exp(-1j * k) + zero + plus * np.exp(1j * k)


def tracked_states(blocks, start, periods, m, gauge):
    """Right/left vectors following one eigenvalue continuously.

    Samples k_i = (i - 2) h for i = 0 .. periods*m + 4, i.e. two extra points
    beyond each end for the difference stencil. gauge 0 pins the first
    component to 1, gauge 1 the second.
    """
    h = 2 * np.pi / m
    ks = (np.arange(periods * m + 5) - 2) * h
    us, ls = [], []
    prev = None
    for k in ks:
        w, v = np.linalg.eig(hk(blocks, k))
        if prev is None:
            j = int(np.argmax(w.real) if start == "plus" else np.argmin(w.real))
        else:
            j = int(np.argmin(np.abs(w - prev)))
        prev = w[j]
        vinv = np.linalg.inv(v)
        us.append(v[:, j] / v[gauge, j])
        ls.append(vinv[j, :] * v[gauge, j])
    return np.array(us), np.array(ls)


def band_integral(blocks, start, periods, gauge, m=1 << 15):
    """Raw integral of <<l|du>/<<l|u> over [0, 2*pi*periods], trapezoid rule."""
    h = 2 * np.pi / m
    us, ls = tracked_states(blocks, start, periods, m, gauge)
    du = (-us[4:] + 8 * us[3:-1] - 8 * us[1:-3] + us[:-4]) / (12 * h)
    u, l = us[2:-2], ls[2:-2]
    f = np.sum(l * du, axis=1) / np.sum(l * u, axis=1)
    return (f[1:-1].sum() + 0.5 * (f[0] + f[-1])) * h


def chain(blocks, n, periodic):
    minus, zero, plus = blocks
    h = np.zeros((2 * n, 2 * n), complex)
    for c in range(n):
        h[2 * c:2 * c + 2, 2 * c:2 * c + 2] = zero
        if c + 1 < n:
            h[2 * c:2 * c + 2, 2 * c + 2:2 * c + 4] = plus
            h[2 * c + 2:2 * c + 4, 2 * c:2 * c + 2] = minus
    if periodic:
        h[2 * (n - 1):2 * n, 0:2] += plus
        h[0:2, 2 * (n - 1):2 * n] += minus
    return h


def iprs(vectors):
    p = np.abs(vectors / np.abs(vectors).max(axis=0)) ** 2
    return (p**2).sum(axis=0) / p.sum(axis=0) ** 2


def gap(lam, ipr):
    thr = 1e-3 * np.abs(lam).max()
    cand = [i for i in np.argsort(np.abs(lam)) if abs(lam[i]) < thr and ipr[i] > 0.1][:2]
    keep = np.setdiff1d(np.arange(len(lam)), cand)
    re = lam[keep].real
    pos, neg = re[re > 0], re[re < 0]
    return float(pos.min() - neg.max()) if len(pos) and len(neg) else 0.0, len(cand)


def chain_summary(blocks, n, periodic):
    h = chain(blocks, n, periodic)
    lam, vl, vr = sl.eig(h, left=True, right=True)
    right, left = iprs(vr), iprs(vl)
    g, edges = gap(lam, right)
    return dict(
        max_abs_imag=float(np.abs(lam.imag).max()),
        complex_fraction=float(np.mean(np.abs(lam.imag) > 1e-2)),
        gap=g,
        edge_modes=edges,
        median_ipr=float(np.median(right)),
        median_left_ipr=float(np.median(left)),
    )


def main():
    lee = lee_blocks(**LEE)
    demo = demo_blocks()
    out = {"solver": "numpy/scipy LAPACK geev; finite differences, 2^15 samples per 2pi"}

    raw = band_integral(lee, "plus", 2, 0)
    out["lee_loop_integral"] = {"re": raw.real, "im": raw.imag}
    bands = {}
    for name, g in (("first", 0), ("second", 1)):
        wp = (-1j * band_integral(lee, "plus", 1, g) / np.pi)
        wm = (-1j * band_integral(lee, "minus", 1, g) / np.pi)
        bands[name] = {"w_plus": wp.real, "w_minus": wm.real, "im": max(abs(wp.imag), abs(wm.imag))}
    out["lee_band_windings"] = bands

    demo_raw = {}
    for name, g in (("first", 0), ("second", 1)):
        r = band_integral(demo, "plus", 1, g)
        demo_raw[name] = {"re": r.real, "im": r.imag}
    out["demo_loop_integral"] = demo_raw

    out["lee_open"] = {str(n): chain_summary(lee, n, False) for n in (30, 800)}
    out["lee_periodic"] = {"30": chain_summary(lee, 30, True)}
    herm = lee_blocks(0.52, 0.5, 0.0)
    out["hermitian_open"] = {"30": chain_summary(herm, 30, False)}
    out["hermitian_periodic"] = {"30": chain_summary(herm, 30, True)}
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
