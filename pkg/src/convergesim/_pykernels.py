"""NumPy implementations of the link-budget kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used when
the extension is not built. Station indices refer to positions in the station
arrays, which callers keep sorted by station id so "first maximum" doubles as
the lowest-id tie-break.
"""

import numpy as np


def received_power_matrix(user_xy, station_xy, tx_power, alpha, side, d_min):
    user_xy = np.asarray(user_xy, dtype=np.float64).reshape(-1, 2)
    station_xy = np.asarray(station_xy, dtype=np.float64).reshape(-1, 2)
    dx = np.abs(user_xy[:, None, 0] - station_xy[None, :, 0])
    dy = np.abs(user_xy[:, None, 1] - station_xy[None, :, 1])
    dx = np.minimum(dx, side - dx)
    dy = np.minimum(dy, side - dy)
    d = np.maximum(np.sqrt(dx * dx + dy * dy), d_min)
    return np.asarray(tx_power, dtype=np.float64)[None, :] * np.power(d, -alpha)


def best_per_tier(rx, station_tier, n_tiers):
    rx = np.asarray(rx, dtype=np.float64)
    station_tier = np.asarray(station_tier, dtype=np.int64)
    n_users = rx.shape[0]
    best_idx = np.full((n_users, n_tiers), -1, dtype=np.int64)
    best_rx = np.zeros((n_users, n_tiers), dtype=np.float64)
    for k in range(n_tiers):
        cols = np.flatnonzero(station_tier == k)
        if cols.size == 0 or n_users == 0:
            continue
        pos = np.argmax(rx[:, cols], axis=1)
        best_idx[:, k] = cols[pos]
        best_rx[:, k] = rx[np.arange(n_users), cols[pos]]
    return best_idx, best_rx


def band_interference_excluding(rx, station_band, candidates):
    rx = np.asarray(rx, dtype=np.float64)
    station_band = np.asarray(station_band, dtype=np.int64)
    candidates = np.asarray(candidates, dtype=np.int64)
    n_users, n_cand = candidates.shape
    out = np.zeros((n_users, n_cand), dtype=np.float64)
    cols = np.arange(rx.shape[1])
    for k in range(n_cand):
        cand = candidates[:, k]
        ok = cand >= 0
        if not ok.any():
            continue
        band = station_band[np.where(ok, cand, 0)]
        mask = (station_band[None, :] == band[:, None]) & (cols[None, :] != cand[:, None])
        out[:, k] = np.where(ok, (rx * mask).sum(axis=1), 0.0)
    return out


def cochannel_interference(rx, station_band, active_idx, serving):
    rx = np.asarray(rx, dtype=np.float64)
    station_band = np.asarray(station_band, dtype=np.int64)
    active_idx = np.asarray(active_idx, dtype=np.int64)
    serving = np.asarray(serving, dtype=np.int64)
    if serving.size == 0:
        return np.zeros(0, dtype=np.float64)
    sub = rx[:, active_idx]
    mask = (station_band[active_idx][None, :] == station_band[serving][:, None]) & (
        active_idx[None, :] != serving[:, None]
    )
    return (sub * mask).sum(axis=1)
