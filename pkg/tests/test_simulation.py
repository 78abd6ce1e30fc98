import math

import numpy as np
import pytest
from dataclasses import replace

from redcap_bm.energy import sweep_energy
from redcap_bm.mobility import initial_offset, mobility_offset, total_offset
from redcap_bm.optimizer import solve_trial
from redcap_bm.scenario import SystemConfig, build_codebook
from redcap_bm.simulation import (
    FeasibilityEntry,
    GridPoint,
    InfeasibleRecommendation,
    draw_batch,
    feasibility_region,
    offset_and_gain_curves,
    recommend_config,
    region_bound,
    run_monte_carlo,
    sample_trial,
    sweep,
)
from redcap_bm.timing import BurstConfig, beam_management_time, last_burst_duration

CFG = BurstConfig(8, 20, 4)


def test_single_trial_aggregation():
    config = SystemConfig(speed=3.0)
    cfg = BurstConfig(8, 80, 4)
    for seed in range(6):
        st = run_monte_carlo(config, cfg, 1, seed)
        out = solve_trial(*sample_trial(config, seed, 0), config, cfg)
        assert st.trials == 1
        assert st.n_feasible == int(out.feasible)
        assert st.mean_n_star == (out.n_star if out.feasible else None)
        assert st.misdetection_probability == out.misdetected
        assert st.infeasible_fraction == (0.0 if out.feasible else 1.0)


def test_bit_reproducible():
    a = run_monte_carlo(SystemConfig(), CFG, 300, 5)
    b = run_monte_carlo(SystemConfig(), CFG, 300, 5)
    for name in ("mean_n_star", "n_star_ci", "misdetection_probability", "infeasible_fraction", "mean_energy"):
        assert getattr(a, name) == getattr(b, name)
    for name in ("n_star", "misdetected", "n_peak", "mean_theta", "mean_gain"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = run_monte_carlo(SystemConfig(), CFG, 300, 6)
    assert not np.array_equal(a.n_star, c.n_star)


@pytest.mark.parametrize("rule", ["best", "at-peak", "trial"])
@pytest.mark.parametrize("extra", [{}, dict(mobility_distance="3d", los_mode="bernoulli", shadowing=True)])
def test_batch_matches_object_path(rule, extra):
    config = replace(SystemConfig(speed=4.0), misdetection_rule=rule, **extra)
    cfg = BurstConfig(8, 80, 4)
    st = run_monte_carlo(config, cfg, 80, 13)
    for i in range(80):
        out = solve_trial(*sample_trial(config, 13, i), config, cfg)
        assert (out.n_star or 0) == st.n_star[i]
        assert out.n_peak == st.n_peak[i]
        assert out.misdetected == pytest.approx(st.misdetected[i], abs=1e-15)


def test_stats_invariants():
    st = run_monte_carlo(SystemConfig(speed=5.0), BurstConfig(8, 160, 4), 500, 1)
    assert 0 <= st.misdetection_probability <= 1 and 0 <= st.infeasible_fraction <= 1
    assert st.n_star_ci >= 0 and st.misdetection_ci >= 0 and st.infeasible_ci >= 0
    served = st.n_star[st.n_star > 0]
    assert st.mean_energy == pytest.approx(np.mean([sweep_energy(int(n), SystemConfig().power, 4) for n in served]))
    assert st.n_feasible == served.size


def test_no_feasible_trial_reports_no_mean():
    st = run_monte_carlo(replace(SystemConfig(), snr_threshold_db=400.0), CFG, 10, 0)
    assert st.mean_n_star is None and st.mean_energy is None and st.infeasible_fraction == 1.0


def test_crn_monotone_in_speed_and_period():
    periods, speeds = (5, 20, 80, 160), (0.5, 1.0, 3.0, 5.0)
    rows = sweep(SystemConfig(), [8], periods, speeds, [18.0], [7.0], 1000, 0)
    d = {(t, v): s for _, t, v, _, _, s in rows}
    for metric in ("misdetection_probability", "infeasible_fraction"):
        m = np.array([[getattr(d[(t, v)], metric) for v in speeds] for t in periods])
        assert np.all(np.diff(m, axis=0) >= 0)
        assert np.all(np.diff(m, axis=1) >= 0)


def test_sweep_thread_independent():
    args = (SystemConfig(), [8, 16], [20, 160], [1.0, 5.0], [18.0], [3.0, 10.0], 200, 4)
    a = sweep(*args, threads=1)
    b = sweep(*args, threads=3)
    assert [(r[:5], r[5].n_star.tolist(), r[5].misdetected.tolist()) for r in a] == \
           [(r[:5], r[5].n_star.tolist(), r[5].misdetected.tolist()) for r in b]


def test_static_curves():
    c = offset_and_gain_curves(SystemConfig(), CFG, 0.0, 2000, 0)
    n = np.array(c.candidates)
    # small arrays leave a short last interval before the wrap, pulling the mean down a little
    assert np.allclose(c.mean_theta, 1 / (2 * n), rtol=0.05)
    assert np.allclose(c.mean_theta[n >= 8], 1 / (2 * n[n >= 8]), rtol=0.015)
    assert np.all(np.diff(c.mean_theta) < 0)
    assert np.all(np.diff(c.mean_gain) > 0)
    assert c.n_peak == 64


def test_fast_curves_peak_inside():
    c = offset_and_gain_curves(SystemConfig(), BurstConfig(8, 160, 4), 5.0, 500, 0)
    assert c.n_peak < 64
    i = c.candidates.index(c.n_peak)
    assert c.mean_gain[i] > c.mean_gain[0] and c.mean_gain[i] > c.mean_gain[-1]


def test_product_only_up_to_last_burst_term():
    batch = draw_batch(SystemConfig(), 300, 2)
    for n in (4, 8, 16, 40):
        cb = build_codebook(n)
        a_cfg, b_cfg = BurstConfig(8, 40, 4), BurstConfig(8, 20, 4)
        th_a = total_offset(initial_offset(batch.phi, cb), mobility_offset(2.0, beam_management_time(cb.size, a_cfg), batch.d))
        th_b = total_offset(initial_offset(batch.phi, cb), mobility_offset(4.0, beam_management_time(cb.size, b_cfg), batch.d))
        bound = 2.0 * last_burst_duration(cb.size, 8, 4) / batch.d
        assert np.all(np.abs(th_a - th_b) <= bound * (1 + 1e-9) + 1e-15)
        ca = offset_and_gain_curves(SystemConfig(), a_cfg, 2.0, 300, batch=batch)
        cb_ = offset_and_gain_curves(SystemConfig(), b_cfg, 4.0, 300, batch=batch)
        k = ca.candidates.index(n)
        assert abs(ca.mean_theta[k] - cb_.mean_theta[k]) <= bound.mean() * (1 + 1e-9)


def test_vacuous_region_is_whole_grid():
    cfg = replace(SystemConfig(), snr_threshold_db=-200.0)
    region = feasibility_region(cfg, [8, 64], [-200.0], 18.0, [1.0, 5.0, 25.0], [5, 160], 50, 0)
    for e in region:
        assert e.bound == pytest.approx(25.0 * 0.160)
        assert e.monotone and all(g.feasible for g in e.evidence)


def test_region_invariants():
    region = feasibility_region(SystemConfig(), [8], [3.0, 10.0], 18.0, [1.0, 2.0, 5.0], [5, 20, 80, 160], 300, 0,
                                epsilon=0.05)
    for e in region:
        if e.bound is None:
            continue
        assert any(g.product == e.bound and g.feasible for g in e.evidence)
        assert all(g.feasible for g in e.evidence if g.product < e.bound - 1e-12)


def test_region_bound_flags_non_monotone():
    ev = [GridPoint(1.0, 5, 0.005, 0.0, True), GridPoint(1.0, 10, 0.01, 0.01, False),
          GridPoint(1.0, 20, 0.02, 0.0, True)]
    assert region_bound(ev) == (0.005, False)
    assert region_bound(ev[:1]) == (0.005, True)
    assert region_bound([GridPoint(1.0, 5, 0.005, 0.5, False)]) == (None, True)


def test_region_rejects_bad_speed():
    with pytest.raises(ValueError):
        feasibility_region(SystemConfig(), [8], [7.0], 18.0, [30.0], [20], 10, 0)


def test_recommend_rule():
    def entry(n_ss, bound):
        return FeasibilityEntry(n_ss, 7.0, 18.0, bound, (), True)

    rec = recommend_config([entry(16, 4.0), entry(8, 0.08)], 1.0)
    assert (rec.n_ss, rec.t_ss_ms) == (8, 80)
    rec = recommend_config([entry(8, None), entry(16, 0.16)], 1.0)
    assert (rec.n_ss, rec.t_ss_ms) == (16, 160)
    with pytest.raises(InfeasibleRecommendation):
        recommend_config([entry(8, None), entry(16, 0.004)], 1.0)
