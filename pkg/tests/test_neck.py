"""Glued-neck desk model: weights, partition, curvature error."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neckforge.errors import ConfigOverlap, ValidationError
from neckforge.neck import (NeckConfig, WeightedNormSpec,
                            approximate_curvature_error, build_glued_factor,
                            covariance_selftest, error_sweep, weight,
                            weighted_norm, _cutoff)


def test_weight_anchors_centered():
    cfg = NeckConfig(epsilon=0.05)
    S = cfg.S_eps
    w = weight(cfg, np.array([-S / 2, 0.0, S / 2]))
    assert w[0] == 1.0 and w[2] == 1.0          # exactly 1 at the neck ends
    assert abs(w[1] - 1.0 / np.cosh(S / 2)) <= 1e-15


def test_weight_cap_and_symmetry():
    cfg = NeckConfig(epsilon=0.05)
    s = np.linspace(-cfg.half_window, cfg.half_window, 1001)
    w = weight(cfg, s)
    assert np.all(w > 0) and np.all(w < 2.0)    # capped extension outside
    assert np.max(np.abs(w - w[::-1])) <= 5e-15


def test_paper_literal_weight_small_in_neck():
    cfg = NeckConfig(epsilon=0.05, weight_convention="paper-literal")
    w0 = weight(cfg, np.array([0.0]))[0]
    # cosh(s)/cosh(S) ~ 2 eps at the waist
    assert abs(w0 - 1.0 / np.cosh(cfg.S_eps)) <= 1e-15
    assert w0 < 3 * cfg.epsilon


def test_norm_monotone_toward_weaker_weight():
    # for data supported in the funnel (weight <= 1 there), more negative
    # exponents discount the neck more: |v|_mu <= |v|_mu' for mu < mu' < 0.
    # outside the neck the capped weight exceeds 1, so the comparison is
    # deliberately restricted to neck-supported data.
    cfg = NeckConfig(epsilon=0.05)
    v = cfg.line_function(np.exp(-4.0 * cfg.s_grid() ** 2))
    norms = [weighted_norm(WeightedNormSpec(mu=mu, k=0), cfg, v)
             for mu in (-0.3, -0.7, -1.2)]
    assert norms[0] > norms[1] > norms[2]


@settings(max_examples=20, deadline=None)
@given(scale=st.floats(0.1, 50.0), mu=st.floats(-1.4, -0.1))
def test_norm_homogeneous(scale, mu):
    cfg = NeckConfig(epsilon=0.1, n_s=512)
    vals = np.cos(cfg.s_grid())
    a = weighted_norm(WeightedNormSpec(mu=mu, k=0), cfg, cfg.line_function(vals))
    b = weighted_norm(WeightedNormSpec(mu=mu, k=0), cfg,
                      cfg.line_function(scale * vals))
    assert abs(b - scale * a) <= 1e-12 * max(1.0, b)


def test_norm_grid_mismatch_rejected():
    cfg = NeckConfig(epsilon=0.05)
    other = NeckConfig(epsilon=0.1)
    v = other.line_function(np.ones(other.s_grid().size))
    with pytest.raises(ValidationError):
        weighted_norm(WeightedNormSpec(mu=-0.5, k=0), cfg, v)


def test_partition_exact_for_symmetric_profile():
    cfg = NeckConfig(epsilon=0.05)
    s = cfg.s_grid()
    chi = _cutoff(cfg, s)
    flipped = np.interp(-s, s, chi)
    assert np.max(np.abs(chi + flipped - 1.0)) <= 5e-15
    # plateaus: pure summand 1 beyond the seam band
    assert np.all(chi[s < -cfg.cutoff_width] > 1.0 - 1e-12)
    assert np.all(chi[s > cfg.cutoff_width] < 1e-12)


def test_asymmetric_profile_breaks_partition_in_band_only():
    cfg = NeckConfig(epsilon=0.05, cutoff_profile="asymmetric")
    s = cfg.s_grid()
    chi = _cutoff(cfg, s)
    gap = np.abs(chi + np.interp(-s, s, chi) - 1.0)
    assert np.max(gap) > 1e-3
    assert np.max(gap[np.abs(s) > cfg.cutoff_width]) <= 1e-12


def test_factor_is_one_without_perturbation():
    cfg = NeckConfig(epsilon=0.05, perturbation=False)
    U = build_glued_factor(cfg, 3)
    assert np.max(np.abs(U.values - 1.0)) <= 1e-14


def test_perturbed_factor_size():
    cfg = NeckConfig(epsilon=0.05)
    U = build_glued_factor(cfg, 3)
    dev = np.max(np.abs(U.values - 1.0))
    d2 = cfg.resolved_delta ** 2
    assert 0.1 * d2 <= dev <= 1.5 * d2


def test_unperturbed_error_is_roundoff():
    cfg = NeckConfig(epsilon=0.05, perturbation=False)
    _, E = approximate_curvature_error(cfg, 3)
    assert E <= 1e-10


def test_error_sweep_decreasing():
    rows = error_sweep(3, (1e-1, 2.5e-2), WeightedNormSpec(mu=-0.5, k=0))
    assert rows[0]["E"] > rows[1]["E"] > 0


def test_error_amplitude_tracks_perturbation_size():
    # leading curvature defect of 1 + delta^2 q is -c delta^2 q + O(delta^4),
    # so the raw sup should sit near c * delta^2 / 2 (q <= 1, plateau ~ 1/2)
    cfg = NeckConfig(epsilon=0.05)
    err, E = approximate_curvature_error(cfg, 3)
    from neckforge.symbol import constants
    scale = constants(3).c * cfg.resolved_delta ** 2 / 2.0
    sup = np.max(np.abs(err.values))
    assert 0.5 * scale <= sup <= 2.0 * scale
    assert E > 0


def test_chart_overlap_rejected():
    with pytest.raises(ConfigOverlap):
        build_glued_factor(NeckConfig(epsilon=0.2, delta=0.25), 3)


def test_epsilon_range_validated():
    with pytest.raises(ValidationError):
        NeckConfig(epsilon=0.3)
    with pytest.raises(ValidationError):
        NeckConfig(epsilon=-0.01)


@pytest.mark.parametrize("n", [2, 3])
def test_covariance_selftest_tiny(n):
    cfg = NeckConfig(epsilon=0.05, n_s=1024)
    assert covariance_selftest(cfg, n, n_exact=24) <= 1e-6
