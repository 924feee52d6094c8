from dataclasses import replace

import numpy as np
import pytest

from convergesim.config import ExperimentConfig
from convergesim.metrics import BASELINE
from convergesim.runner import E_C, I_C, N_USERS, InfeasibleDrop, drop_seed, run_drop, run_sweep, sample_geometry

SMALL = ExperimentConfig(alphas=(3.0, 4.0), lambda_multiples=(0.5, 1.0, 2.0), drops=3, time_steps=2)


def test_drop_is_deterministic():
    a = run_drop(SMALL, 4.0, 2.0, drop_seed(1, 0, 0, 0), keep_traces=True)
    b = run_drop(SMALL, 4.0, 2.0, drop_seed(1, 0, 0, 0), keep_traces=True)
    assert a.geometry_digest == b.geometry_digest
    assert a.association_digests == b.association_digests
    for s in a.schemes:
        assert a.snapshots[s].tobytes() == b.snapshots[s].tobytes()
    assert a.traces == b.traces


def test_snapshot_shape_and_paired_guarantees():
    cfg = replace(SMALL, time_steps=4)
    r = run_drop(cfg, 4.0, 2.0, drop_seed(5, 0, 0, 1), keep_traces=True)
    for s in r.schemes:
        assert r.snapshots[s].shape == (4, 5)
    base = r.snapshots[BASELINE]
    assert np.all(r.snapshots["interference-min"][:, I_C] <= base[:, I_C])
    assert np.all(r.snapshots["energy-opt"][:, E_C] >= base[:, E_C])
    assert np.array_equal(r.snapshots["energy-opt"][:, N_USERS], base[:, N_USERS])
    assert len(r.traces["interference-min"]) == 4
    assert all(t.is_monotone() for ts in r.traces.values() for t in ts)


def test_single_step_is_static_drop():
    r = run_drop(replace(SMALL, time_steps=1), 3.0, 1.0, (2, 0, 0, 0))
    assert all(v.shape[0] == 1 for v in r.snapshots.values())


def test_geometry_depends_only_on_seed():
    a = run_drop(SMALL, 3.0, 1.0, (9, 0, 0, 0))
    b = run_drop(SMALL, 4.0, 1.0, (9, 0, 0, 0))
    c = run_drop(SMALL, 3.0, 1.0, (9, 0, 0, 1))
    assert a.geometry_digest == b.geometry_digest != c.geometry_digest


def test_infeasible_geometry_is_resampled():
    cfg = replace(SMALL, base_intensity=0.05, tier_density_ratios=(1.0, 1.0, 1.0), accessible="random")
    results = [run_drop(cfg, 4.0, 4.0, (3, 0, 0, d), schemes=(BASELINE,)) for d in range(10)]
    assert any(r.resamples > 0 for r in results)


def test_sample_geometry_raises_when_unreachable():
    cfg = replace(SMALL, base_intensity=1e-6, tier_density_ratios=(1.0, 1.0, 1.0))
    with pytest.raises(InfeasibleDrop):
        sample_geometry(cfg, 1e7, np.random.default_rng(0))


def test_sweep_counts_and_pairing():
    run = run_sweep(SMALL, workers=1)
    pts = run.result.points
    assert len(pts) == 3 * 2 * 3
    assert len(run.drops) == 2 * 3 and all(len(v) == 3 for v in run.drops.values())
    assert run.violations == 0
    digests = [d.geometry_digest for cell in run.drops.values() for d in cell]
    assert len(set(digests)) == len(digests)
    for alpha in SMALL.alphas:
        base = run.result.curve(BASELINE, alpha)
        assert base[0].norm_interference == 1.0 and base[0].norm_eff == 1.0
        for p, q in zip(run.result.curve("interference-min", alpha), base):
            assert p.mean_interference_w <= q.mean_interference_w
        for p, q in zip(run.result.curve("energy-opt", alpha), base):
            assert p.mean_eff_bpj >= q.mean_eff_bpj


def test_sweep_adds_baseline_when_missing():
    run = run_sweep(replace(SMALL, drops=2, lambda_multiples=(1.0,), alphas=(4.0,)),
                    schemes=("energy-opt",), workers=1)
    assert {p.scheme for p in run.result.points} == {BASELINE, "energy-opt"}


def test_parallel_sweep_matches_serial():
    cfg = replace(SMALL, drops=2, lambda_multiples=(1.0, 2.0), alphas=(4.0,))
    assert run_sweep(cfg, workers=2).result == run_sweep(cfg, workers=1).result
