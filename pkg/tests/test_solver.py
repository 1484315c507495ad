"""Periodic-cylinder curvature solver and the flat-ball degenerate variant."""

import numpy as np
import pytest

from neckforge.errors import (Diverged, NonPositiveConformalFactor,
                              ResonanceError, ValidationError)
from neckforge.neck import WeightedNormSpec
from neckforge.solver import (BallState, PeriodicCylinderState,
                              apply_linearized, apply_Q, ball_apply_Q,
                              ball_newton_probe, ball_solve_linearized,
                              cylinder_smallest_multiplier, default_period,
                              newton_solve, quadratic_remainder,
                              solve_linearized, state_norm,
                              uniform_invertibility_study)
from neckforge.symbol import constants

NORM = WeightedNormSpec(mu=-0.5, k=0)


def _perturbed(n=3, m_max=8, N_s=256, modes=(1, 2), amp=0.01):
    state = PeriodicCylinderState.ones(n, m_max=m_max, N_s=N_s)
    f_hat = state.f_hat.copy()
    for m in modes:
        f_hat[m, 1] += 0.5 * N_s * amp
        f_hat[m, -1] += 0.5 * N_s * amp
    return state.with_table(f_hat)


def test_constant_state_is_exact_solution():
    state = PeriodicCylinderState.ones(3)
    q = apply_Q(state)
    want = constants(3).c
    # Q(1) = c in every Fourier bin that carries mass
    assert abs(q[0, 0].real / state.N_s - want) <= 1e-14
    off = np.abs(q).sum() - np.abs(q[0, 0])
    assert off <= 1e-9 * np.abs(q[0, 0])


def test_scaled_constant_closed_form():
    # Q(t * 1) = c * t^(-2/(n-1)): covariance in its simplest clothing
    n = 3
    state = PeriodicCylinderState.ones(n)
    t = 1.37
    q = apply_Q(state.with_table(t * state.f_hat))
    want = constants(n).c * t ** (-2.0 / (n - 1))
    assert abs(q[0, 0].real / state.N_s - want) <= 1e-13


def test_linearized_matches_finite_difference():
    state = PeriodicCylinderState.ones(3, m_max=4, N_s=128)
    rng = np.random.default_rng(3)
    direction = rng.standard_normal((5, 128))
    d_hat = np.fft.fft(direction, axis=1)
    d_hat /= state_norm(state, d_hat, NORM)
    eps = 1e-6
    plus = apply_Q(state.with_table(state.f_hat + eps * d_hat))
    minus = apply_Q(state.with_table(state.f_hat - eps * d_hat))
    fd = (plus - minus) / (2 * eps)
    lin = apply_linearized(state, d_hat)
    assert np.max(np.abs(fd - lin)) <= 1e-4 * np.max(np.abs(lin))


def test_solve_then_apply_roundtrip():
    state = PeriodicCylinderState.ones(3, m_max=6, N_s=128)
    rng = np.random.default_rng(11)
    h_hat = np.fft.fft(rng.standard_normal((7, 128)), axis=1)
    v_hat = solve_linearized(state, h_hat)
    back = apply_linearized(state, v_hat)
    assert np.max(np.abs(back - h_hat)) <= 1e-12 * np.max(np.abs(h_hat))


def test_resonant_period_rejected():
    # a period putting 2 pi k / L exactly at the mode-0 crossing frequency
    from neckforge.indicial import first_root
    from neckforge.symbol import ModeSpec
    tau0 = first_root(ModeSpec(n=3, m=0)).tau
    L_bad = 2.0 * np.pi / tau0
    with pytest.raises(ResonanceError):
        PeriodicCylinderState.ones(3, L=L_bad)


def test_non_hermitian_table_rejected():
    state = PeriodicCylinderState.ones(3, m_max=2, N_s=64)
    bad = state.f_hat.copy()
    bad[1, 3] += 1.0  # no conjugate partner: grid values become complex
    with pytest.raises(ValidationError):
        state.with_table(bad)


def test_newton_converges_quadratically():
    rep = newton_solve(_perturbed(), NORM, tol=1e-11, method="newton")
    assert rep.converged
    assert rep.residual_history[-1] <= 1e-10
    assert rep.iterations <= 8
    # recovered factor is the constant 1
    flat = np.abs(rep.final_f.f_hat).sum() - np.abs(rep.final_f.f_hat[0, 0])
    assert flat <= 1e-8 * np.abs(rep.final_f.f_hat[0, 0])


def test_fixed_point_converges_linearly():
    rep = newton_solve(_perturbed(), NORM, tol=1e-11, method="fixed-point")
    assert rep.converged
    hist = [r for r in rep.residual_history if r > 1e-13]
    ratios = [hist[i + 1] / hist[i] for i in range(len(hist) - 1)]
    assert max(ratios) < 0.5


def test_zero_start_already_converged():
    rep = newton_solve(PeriodicCylinderState.ones(3), NORM)
    assert rep.converged and rep.iterations == 0


def test_large_amplitude_leaves_positivity():
    with pytest.raises((NonPositiveConformalFactor, Diverged)):
        newton_solve(_perturbed(amp=0.6), NORM, method="fixed-point")


def test_quadratic_remainder_stable_across_amplitudes():
    state = PeriodicCylinderState.ones(3, m_max=6, N_s=128)
    rng = np.random.default_rng(5)
    d_hat = np.fft.fft(rng.standard_normal((7, 128)), axis=1)
    d_hat /= state_norm(state, d_hat, NORM)
    vals = [quadratic_remainder(state, a * d_hat, NORM)
            for a in (1e-2, 1e-3, 1e-4)]
    assert max(vals) / min(vals) < 3.0


def test_ball_constant_curvature():
    st = BallState.ones(3, k_max=6)
    q = ball_apply_Q(st)
    assert abs(q[0] - (3 - 1) / 2.0) <= 1e-13
    assert np.max(np.abs(q[1:])) <= 1e-10


def test_ball_kernel_blocks_inversion():
    st = BallState.ones(3, k_max=6)
    h = np.zeros(7)
    h[1] = 1e-3  # content exactly on the degenerate degree
    with pytest.raises(ResonanceError):
        ball_solve_linearized(st, h)


def test_ball_probe_reports_resonance():
    outcome, msg, hist = ball_newton_probe(3, k_max=8, amplitude=0.01, degree=1)
    assert outcome in ("resonance", "stall")
    assert len(hist) >= 1


def test_smallest_multiplier_at_default_period():
    # frozen from the invertibility study; also the margin the resonance
    # check enforces at construction
    got = cylinder_smallest_multiplier(3, default_period(3), 8, 256)
    assert abs(got - 0.18757289797052445) <= 1e-12


def test_invertibility_study_shapes():
    rep = uniform_invertibility_study(3, [1e-1, 5e-2], mu=-0.5, m_max=2,
                                      N_s=256)
    assert len(rep["rows"]) == 2
    assert rep["sigma_min_overall"] > 0
    for row in rep["rows"]:
        assert row["per_mode"] and row["sigma_min"] > 0


def test_bad_weight_rate_rejected():
    with pytest.raises(ValidationError):
        uniform_invertibility_study(3, [1e-1], mu=-2.0, m_max=2, N_s=256)
