import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from redcap_bm.mobility import initial_offset, mobility_offset, offset_breakdown, total_offset
from redcap_bm.rng import RandomStream
from redcap_bm.scenario import UEState, build_codebook
from redcap_bm.timing import BurstConfig, beam_management_time, burst_count, last_burst_duration, sweep_size


def enumerate_offset(phi, cb):
    """Nearest boresight by brute force, including the wrap to 2*pi."""
    best = None
    for k, b in enumerate(cb.angles):
        for target in (b, b + 2 * math.pi, b - 2 * math.pi):
            diff = phi - target
            if best is None or abs(diff) < abs(best[0]) - 1e-15:
                best = (diff, k)
    return best[0]


def test_examples():
    cb = build_codebook(8)
    assert initial_offset(0.10, cb) == pytest.approx(0.10)
    assert initial_offset(0.15, cb) == pytest.approx(-0.10)
    assert initial_offset(cb.angles[5], cb) == 0.0
    assert mobility_offset(0.0, 0.1, 3.0) == 0.0
    assert mobility_offset(1.0, 20.241e-3, 10.0) == pytest.approx(2.0241e-3, rel=1e-14)
    assert total_offset(-0.05, 0.05) == 0.0
    assert total_offset(0.1, 0.05) == pytest.approx(0.15)
    assert total_offset(-0.1, 0.05) == pytest.approx(0.05)


def test_enumeration_oracle():
    rs = RandomStream(31)
    for n in (2, 3, 7, 8, 13, 64):
        cb = build_codebook(n)
        phi = rs.uniform(0, 2 * math.pi, 400)
        got = initial_offset(phi, cb)
        assert np.allclose(got, [enumerate_offset(p, cb) for p in phi], atol=1e-12)
        assert np.all(np.abs(got) <= cb.beamwidth / 2 + 1e-12)


def test_tie_goes_to_lower_boresight():
    cb = build_codebook(8)
    assert initial_offset(0.125, cb) == pytest.approx(0.125)


def test_mean_initial_offset():
    cb = build_codebook(8)
    phi = RandomStream(4).uniform(0, 2 * math.pi, 100_000)
    assert np.abs(initial_offset(phi, cb)).mean() == pytest.approx(cb.beamwidth / 4, rel=0.01)


def test_mobility_offset_rejects_zero_distance():
    with pytest.raises(ValueError):
        mobility_offset(1.0, 0.1, 0.0)


@given(st.floats(0, 25), st.floats(0.1, 5.0))
def test_linear_in_speed(v, a):
    t_bm = beam_management_time(26, BurstConfig(8, 20, 4))
    assert mobility_offset(a * v, t_bm, 7.0) == pytest.approx(a * mobility_offset(v, t_bm, 7.0), rel=1e-12, abs=1e-300)


@given(st.integers(4, 64), st.sampled_from([8, 16, 32, 64]), st.sampled_from([5, 10, 20, 40, 80, 160]),
       st.sampled_from([5, 10, 20, 40, 80, 160]), st.floats(0.1, 25), st.floats(0.1, 25), st.floats(1, 15))
def test_product_decomposition(n, n_ss, t1, t2, v1, v2, d):
    s_d = sweep_size(n)
    m = burst_count(s_d, n_ss) - 1
    if m < 1:
        return
    tv1 = mobility_offset(v1, beam_management_time(s_d, BurstConfig(n_ss, t1, 4)), d)
    tv2 = mobility_offset(v2, beam_management_time(s_d, BurstConfig(n_ss, t2, 4)), d)
    t_l = last_burst_duration(s_d, n_ss, 4)
    expect = (v1 * t1 / 1000 - v2 * t2 / 1000) * m / d + (v1 - v2) * t_l / d
    assert tv1 - tv2 == pytest.approx(expect, rel=1e-9, abs=1e-12)


def test_breakdown():
    ue = UEState(5.0, 0.2, 2.0, math.hypot(23.5, 5.0))
    cfg = BurstConfig(8, 20, 4)
    b = offset_breakdown(ue, 8, cfg)
    assert b.initial == pytest.approx(-0.05)
    assert b.motion == pytest.approx(2.0 * beam_management_time(26, cfg) / 5.0)
    assert b.total == abs(b.initial + b.motion)
