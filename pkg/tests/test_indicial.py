"""Indicial roots against frozen mpmath oracles.

The reference values below were produced by a 40-digit mpmath computation
(gamma products evaluated on the imaginary axis, findroot) — a different
special-function stack and a different root-finding method than the package
uses, so agreement is meaningful.
"""

import numpy as np
import pytest

from neckforge.indicial import (check_lemma, find_roots, first_root,
                                root_catalog, sigma_ladder)
from neckforge.symbol import ModeSpec

# mode-0 crossing frequency per dimension
TAU0 = {2: 0.80990727068780252, 3: 1.2191319876982279,
        4: 1.54527531318392, 5: 1.8230586436431967}

# exponent ladders, n = 3 (mode 0 leads with its oscillatory sigma = 0 root)
LADDER_M0 = (0.0, 2.7214109165766458, 4.8361113978734753, 6.8835616365043332)
LADDER_M1 = (1.0, 3.7787019380974985, 5.8598340748607976)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_mode0_first_root_is_oscillatory(n, tol=1e-12):
    root = first_root(ModeSpec(n=n, m=0))
    assert root.sigma == 0.0
    assert abs(root.tau - TAU0[n]) <= tol


def test_mode1_first_exponent_exact_n3():
    root = first_root(ModeSpec(n=3, m=1))
    assert abs(root.sigma - 1.0) <= 1e-10
    assert root.tau == 0.0


@pytest.mark.parametrize("m,ladder", [(0, LADDER_M0), (1, LADDER_M1)])
def test_sigma_ladders_n3(m, ladder):
    got = sigma_ladder(ModeSpec(n=3, m=m), len(ladder))
    assert np.max(np.abs(np.asarray(got[:len(ladder)]) - ladder)) <= 1e-10


def test_catalog_roots_certified_and_ordered():
    cat = root_catalog(ModeSpec(n=3, m=2), 3)
    sigmas = [r.sigma for r in cat.roots]
    assert sigmas == sorted(sigmas)
    assert cat.certified
    # each root actually solves the characteristic equation
    assert all(abs(r.residual) < 1e-9 for r in cat.roots)


def test_first_exponents_increase_with_mode():
    vals = [first_root(ModeSpec(n=3, m=m)).sigma for m in range(1, 7)]
    assert all(vals[i] < vals[i + 1] for i in range(len(vals) - 1))


def test_no_genuinely_complex_roots_low_modes():
    # all certified roots are either on the real-frequency axis (sigma = 0)
    # or on the decay axis (tau = 0); nothing in the open quadrant
    for n in (2, 3, 4):
        for m in range(3):
            cat = root_catalog(ModeSpec(n=n, m=m), 3)
            for r in cat.roots:
                assert r.sigma == 0.0 or r.tau == 0.0


def test_check_lemma_n3_all_clauses():
    rep = check_lemma(3, m_max=6, j_max=3, tol_b=1e-8)
    assert rep.passed
    assert rep.clause_a and rep.clause_b and rep.clause_c and rep.clause_d
    assert abs(rep.tau0 - TAU0[3]) <= 1e-10


def test_find_roots_box_encloses_expected_count():
    # the mode-0 oscillatory pair: one root in the upper-right box, none in a
    # box that stops short of tau0
    cat = find_roots(ModeSpec(n=3, m=0), (0.0, 1.5, 0.0, 2.0))
    assert len(cat.roots) == 1
    assert abs(cat.roots[0].tau - TAU0[3]) <= 1e-10
    empty = find_roots(ModeSpec(n=3, m=0), (0.3, 1.5, 0.0, 1.0))
    assert len(empty.roots) == 0
