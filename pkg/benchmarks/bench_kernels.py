"""Time the compiled link-budget kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--users 800] [--stations 1700] [--repeat 7]

Prints the best-of-N wall time per kernel and backend, the speed-up, and the
largest relative disagreement between the two outputs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from convergesim import _pykernels

try:
    from convergesim import _ckernels
except ImportError:
    _ckernels = None


def _inputs(n_users, n_stations, n_tiers, side, seed):
    rng = np.random.default_rng(seed)
    user_xy = rng.uniform(0, side, (n_users, 2))
    station_xy = rng.uniform(0, side, (n_stations, 2))
    tier = np.sort(rng.integers(0, n_tiers, n_stations)).astype(np.int64)
    tx = np.array([10.0, 1.0, 0.1][:n_tiers])[tier]
    return user_xy, station_xy, tier, tx


def _rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(scale > 0, np.abs(a - b) / scale, 0.0)
    return float(r.max()) if r.size else 0.0


def run(n_users, n_stations, alpha, repeat, side=4.0, d_min=1e-3, n_tiers=3, seed=0):
    user_xy, station_xy, tier, tx = _inputs(n_users, n_stations, n_tiers, side, seed)
    rx = _pykernels.received_power_matrix(user_xy, station_xy, tx, alpha, side, d_min)
    best, _ = _pykernels.best_per_tier(rx, tier, n_tiers)
    serving = best[np.arange(n_users), np.argmax(np.where(best >= 0, 1, 0), axis=1)]
    active = np.unique(serving).astype(np.int64)
    cases = {
        "received_power_matrix": lambda m: m.received_power_matrix(user_xy, station_xy, tx, alpha, side, d_min),
        "best_per_tier": lambda m: m.best_per_tier(rx, tier, n_tiers)[1],
        "band_interference_excluding": lambda m: m.band_interference_excluding(rx, tier, best),
        "cochannel_interference": lambda m: m.cochannel_interference(rx, tier, active, serving),
    }
    rows = []
    for name, call in cases.items():
        t_py = min(timeit.repeat(lambda: call(_pykernels), number=1, repeat=repeat))
        if _ckernels is None:
            rows.append((name, t_py, float("nan"), float("nan")))
            continue
        t_c = min(timeit.repeat(lambda: call(_ckernels), number=1, repeat=repeat))
        rows.append((name, t_py, t_c, _rel(call(_pykernels), call(_ckernels))))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--users", type=int, default=800)
    ap.add_argument("--stations", type=int, default=1700)
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--alpha", type=float, nargs="+", default=[3.0, 4.0, 3.5])
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; run `python3 setup.py build_ext --inplace`")
    print(f"{args.users} users x {args.stations} stations, best of {args.repeat}")
    print(f"{'kernel':<30}{'alpha':>6}{'numpy ms':>11}{'cython ms':>11}{'speed-up':>10}{'max rel diff':>14}")
    for alpha in args.alpha:
        for name, t_py, t_c, diff in run(args.users, args.stations, alpha, args.repeat):
            print(f"{name:<30}{alpha:>6g}{t_py * 1e3:>11.2f}{t_c * 1e3:>11.2f}{t_py / t_c:>9.1f}x{diff:>14.1e}")


if __name__ == "__main__":
    main()
