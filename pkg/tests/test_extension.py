"""Bulk-extension route: the symbol recomputed without Gamma functions."""

import numpy as np
import pytest

from neckforge.errors import ValidationError
from neckforge.extension import (BallModel, HalfCylinderProblem,
                                 ball_kernel_degrees,
                                 ball_linearized_eigenvalue, cross_validate,
                                 dtn_ball_eigenvalue, dtn_cylinder,
                                 dtn_halfdisk_2d)
from neckforge.symbol import ModeSpec, theta


@pytest.mark.parametrize("n,m,xi", [
    (2, 0, 0.0), (2, 1, 1.0), (2, 3, 4.0),
    (3, 0, 0.5), (3, 2, 2.0), (3, 4, 4.0),
    (4, 1, 0.0), (5, 0, 1.0),
])
def test_shooting_matches_symbol(n, m, xi):
    spec = ModeSpec(n=n, m=m)
    prob = HalfCylinderProblem(spec, xi=xi, scheme="collocation-ODE")
    got = dtn_cylinder(prob)
    want = float(theta(spec, xi))
    assert abs(got - want) / want <= 1e-10


def test_finite_difference_second_order():
    spec = ModeSpec(n=3, m=1)
    errs = []
    for grid in (128, 256, 512):
        prob = HalfCylinderProblem(spec, xi=1.0, phi_grid=grid,
                                   scheme="finite-difference")
        got = dtn_cylinder(prob)
        errs.append(abs(got - float(theta(spec, 1.0))))
    # halving h divides the error by ~4; demand at least 3x per doubling
    assert errs[0] / errs[1] >= 3.0
    assert errs[1] / errs[2] >= 3.0


def test_halfdisk_agrees_at_modest_accuracy():
    # independent 2-D hemisphere solve with no separation assumption
    got = dtn_halfdisk_2d(xi=0.5, m=1)
    want = float(theta(ModeSpec(n=2, m=1), 0.5))
    assert abs(got - want) / want <= 5e-3


def test_ball_eigenvalues_exact():
    model = BallModel(n=3, k_max=8)
    for k in range(9):
        assert dtn_ball_eigenvalue(model, k) == float(k + 1)
        assert ball_linearized_eigenvalue(model, k) == float(k - 1)


def test_ball_kernel_is_degree_one():
    assert ball_kernel_degrees(BallModel(n=3, k_max=8)) == (1,)
    assert ball_kernel_degrees(BallModel(n=5, k_max=6)) == (1,)


def test_cross_validate_rows_complete():
    rows = cross_validate(3, (0, 1), (0.0, 1.0), scheme="collocation-ODE")
    assert len(rows) == 4
    assert all(set(r) >= {"n", "m", "xi", "dtn", "theta", "rel_err"}
               for r in rows)
    assert max(r["rel_err"] for r in rows) <= 1e-8


def test_unknown_scheme_rejected():
    with pytest.raises(ValidationError):
        HalfCylinderProblem(ModeSpec(n=3, m=0), xi=1.0, scheme="spectral")
