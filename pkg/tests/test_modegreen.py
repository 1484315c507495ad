"""Mode-wise line solves: inversion identities, tails, kernel symmetry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neckforge.errors import TailMismatch, ValidationError
from neckforge.indicial import root_catalog
from neckforge.modegreen import (DecayProfile, LineFunction, apply_L0,
                                 classify_growth, fit_tail_rate, green_solve,
                                 homogeneous_basis, mode0_sine_coefficient,
                                 synthesize_kernel)
from neckforge.symbol import ModeSpec, constants

DELTA = 0.5


def _rhs(m, delta=DELTA, half=30.0, N=4096):
    return LineFunction.from_callable(
        lambda s: np.exp(-delta * np.sqrt(s * s + 4.0)),
        s0=-half, s1=half, N=N, mode=m)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_apply_after_solve_is_identity(m):
    spec = ModeSpec(n=3, m=m)
    h = _rhs(m)
    v = green_solve(spec, h, DecayProfile(delta=DELTA))
    back = apply_L0(spec, v)
    interior = np.abs(v.grid()) <= 15.0
    err = np.max(np.abs(back.materialize()[interior] - h.values[interior]))
    assert err <= 1e-10


@pytest.mark.parametrize("m", [1, 2, 3])
def test_solution_inherits_declared_decay(m):
    # first indicial exponent of these modes exceeds delta, so the
    # particular solution must decay at the source rate, not faster
    spec = ModeSpec(n=3, m=m)
    v = green_solve(spec, _rhs(m), DecayProfile(delta=DELTA))
    assert abs(fit_tail_rate(v, "+") + DELTA) <= 0.05 * DELTA
    assert abs(fit_tail_rate(v, "-") - DELTA) <= 0.05 * DELTA


def test_homogeneous_basis_annihilated():
    for m in range(4):
        spec = ModeSpec(n=3, m=m)
        for w in homogeneous_basis(spec, j_max=2):
            lw = apply_L0(spec, w)
            rel = np.max(np.abs(lw.values)) / (
                constants(3).kappa * np.max(np.abs(w.values)))
            assert rel <= 1e-9


def test_kernel_even_and_normalized():
    s_half = np.linspace(1.25, 3.0, 64)
    s = np.concatenate([-s_half[::-1], s_half])
    vals, trunc = synthesize_kernel(ModeSpec(n=3, m=0), s)
    assert np.max(np.abs(vals - vals[::-1])) <= 1e-8
    assert np.max(trunc) <= 1e-8  # first omitted residue term, pointwise


def test_mode0_sine_coefficient_value():
    # 2 / Theta'(tau0) at n = 3, frozen from a 40-digit mpmath derivative
    got = mode0_sine_coefficient(ModeSpec(n=3, m=0))
    assert abs(got - 2.2971976106098572) <= 1e-8


def test_overclaimed_decay_rejected():
    # declaring faster decay than the data has leaves visible mass at the
    # shifted window ends; the solve must refuse rather than wrap it around
    h = _rhs(1, delta=0.3, half=12.0, N=1024)
    with pytest.raises(TailMismatch):
        green_solve(ModeSpec(n=3, m=1), h, DecayProfile(delta=1.2), beta=0.9)


def test_classify_growth_trivial_for_roundoff():
    spec = ModeSpec(n=3, m=1)
    cat = root_catalog(spec, 3)
    noise = LineFunction(-15.0, 30.0 / 1024, 1024,
                         1e-14 * np.ones(1024), 1, 0.0)
    verdict = classify_growth(noise, -0.5, spec, cat)
    assert verdict.verdict == "trivial"
    assert verdict.sup <= 1e-6


def test_classify_growth_flags_homogeneous_content():
    # a genuine homogeneous solution violates the weighted bound and its
    # basis coordinates are recovered
    spec = ModeSpec(n=3, m=1)
    cat = root_catalog(spec, 3)
    w = homogeneous_basis(spec, catalog=cat, j_max=1)[0]
    verdict = classify_growth(w, -0.5, spec, cat)
    assert verdict.verdict != "trivial"
    assert verdict.coefficients is not None
    assert np.max(np.abs(verdict.coefficients)) > 1e-3


def test_materialize_matches_envelope_algebra():
    f = LineFunction.from_callable(np.cos, -4.0, 4.0, 256, mode=0,
                                   envelope_rate=0.3)
    s = f.grid()
    assert np.allclose(f.materialize(), np.cos(s) * np.exp(0.3 * s), rtol=1e-14)


@settings(max_examples=25, deadline=None)
@given(rate=st.floats(-0.5, 0.5), scale=st.floats(0.1, 10.0))
def test_apply_L0_is_linear_in_scale(rate, scale):
    spec = ModeSpec(n=3, m=1)
    f = LineFunction.from_callable(lambda s: np.exp(-0.3 * s * s),
                                   -10.0, 10.0, 512, mode=1,
                                   envelope_rate=rate)
    g = LineFunction(f.s0, f.ds, f.N, scale * f.values, 1, rate)
    a = apply_L0(spec, f)
    b = apply_L0(spec, g)
    assert np.allclose(b.values, scale * a.values, rtol=1e-10, atol=1e-12)


def test_grid_mismatch_rejected():
    with pytest.raises(ValidationError):
        LineFunction(-1.0, 0.1, 32, np.zeros(16), 0, 0.0)
