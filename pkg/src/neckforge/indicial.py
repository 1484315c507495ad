"""Indicial roots of the linearized cylinder operator.

Convention (fixed once, used everywhere): a mode-m indicial root is a
complex exponent lambda = sigma + i*tau such that v = exp(lambda * s)
solves the linearized equation, i.e.

    Theta_m(-i * lambda) = kappa,

where Theta_m is the analytic continuation of the cylinder symbol and
kappa the linearization constant.  Equivalently, in the complex frequency
plane the zero sits at zeta = -i*lambda.  Roots come in the four-fold
family (+-sigma +- i*tau); catalogs store the closed first quadrant
representative (sigma >= 0, tau >= 0) sorted by increasing sigma, then tau.

The characteristic function F(lambda) = Theta_m(-i lambda) - kappa is
meromorphic with known simple poles on the real axis at +-2(A + k),
A the numerator Gamma offset.  Counting therefore uses the argument
principle for meromorphic functions:

    #zeros inside = winding of F along the boundary + #poles inside,

with the winding accumulated from adaptively refined boundary samples and
the pole count read off the explicit ladder.  Certified counts drive a
box-subdivision search; individual roots are polished by damped Newton
iteration on F and reported with the residual |F| and the symbol
derivative at the root (the ingredient of Green-kernel residues).

Real-axis and imaginary-axis roots (where F is real-valued) are located by
sign-change bracketing, which is both faster and immune to the contour
passing through the axis ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ContourThroughRoot, NonConvergence, PoleError
from .symbol import ModeSpec, constants, theta, theta_analytic

__all__ = [
    "IndicialRoot",
    "RootCatalog",
    "LemmaReport",
    "find_roots",
    "first_root",
    "root_catalog",
    "sigma_ladder",
    "check_lemma",
]


@dataclass(frozen=True)
class IndicialRoot:
    """One indicial root lambda = sigma + i*tau in the exp(lambda s) convention."""

    sigma: float
    tau: float
    residual: float
    dtheta: complex  # d Theta / d zeta at zeta = -i * lambda, for residues
    multiplicity: int = 1

    @property
    def lam(self) -> complex:
        return complex(self.sigma, self.tau)


@dataclass(frozen=True)
class RootCatalog:
    spec: ModeSpec
    kappa: float
    roots: tuple
    search_box: tuple
    certified: bool

    def sigma(self, j: int) -> float:
        return self.roots[j].sigma

    def tau(self, j: int) -> float:
        return self.roots[j].tau

    def __len__(self):
        return len(self.roots)


def _char_fn(spec: ModeSpec, kappa: float):
    def F(lam):
        return theta_analytic(spec, -1j * np.asarray(lam, dtype=np.complex128)) - kappa
    return F


def _pole_ladder(spec: ModeSpec, limit: float):
    """Real poles of F at +-2(A + k) with |value| <= limit."""
    a = spec.a_offset
    poles = []
    k = 0
    while 2.0 * (a + k) <= limit:
        poles.append(2.0 * (a + k))
        k += 1
    return poles


def _poles_inside(spec: ModeSpec, box):
    slo, shi, tlo, thi = box
    if not (tlo < 0.0 < thi):
        return 0
    count = 0
    for p in _pole_ladder(spec, abs(slo) + abs(shi) + 2.0):
        if slo < p < shi:
            count += 1
        if slo < -p < shi:
            count += 1
    return count


def _box_path(box, pts_per_edge):
    slo, shi, tlo, thi = box
    corners = [complex(slo, tlo), complex(shi, tlo), complex(shi, thi), complex(slo, thi)]
    ts = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        frac = np.linspace(0.0, 1.0, pts_per_edge, endpoint=False)
        ts.append(a + (b - a) * frac)
    path = np.concatenate(ts)
    return np.append(path, path[0])


def _winding(F, box, kappa_scale, max_points=120000):
    """Winding number of F along the box boundary, counterclockwise.

    Adaptively inserts midpoints until consecutive phase increments are
    below pi/2.  Raises ContourThroughRoot when the boundary runs into a
    near-zero of F, NonConvergence when refinement stalls.
    """
    pts = _box_path(box, 96)
    try:
        vals = F(pts)
    except PoleError as err:
        raise ContourThroughRoot(f"counting contour of box {box} hits a pole: {err}")
    floor = 1e-9 * max(kappa_scale, 1e-30)
    for _ in range(48):
        if np.min(np.abs(vals)) < floor:
            raise ContourThroughRoot(
                f"|F| < {floor:g} on the counting contour of box {box}; perturb the box"
            )
        d_arg = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(d_arg) > 0.5 * np.pi
        if not np.any(bad):
            total = float(np.sum(d_arg))
            w = total / (2.0 * np.pi)
            if abs(w - round(w)) > 0.05:
                raise NonConvergence(f"winding {w} not integral on box {box}")
            return int(round(w))
        if len(pts) > max_points:
            raise NonConvergence(f"contour refinement exhausted on box {box}")
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (pts[idx] + pts[idx + 1])
        try:
            mid_vals = F(mids)
        except PoleError as err:
            raise ContourThroughRoot(f"counting contour of box {box} hits a pole: {err}")
        pts = np.insert(pts, idx + 1, mids)
        vals = np.insert(vals, idx + 1, mid_vals)
    raise NonConvergence(f"contour refinement did not settle on box {box}")


def _newton_polish(F, lam0, tol, max_iter=80):
    lam = complex(lam0)
    for _ in range(max_iter):
        f0 = complex(F(lam))
        if abs(f0) <= tol:
            h = 1e-6 * (1.0 + abs(lam))
            deriv = (complex(F(lam + h)) - complex(F(lam - h))) / (2.0 * h)
            return lam, abs(f0), deriv
        h = 1e-6 * (1.0 + abs(lam))
        deriv = (complex(F(lam + h)) - complex(F(lam - h))) / (2.0 * h)
        if deriv == 0:
            break
        step = f0 / deriv
        cap = 0.5 * (1.0 + abs(lam))
        if abs(step) > cap:
            step *= cap / abs(step)
        lam = lam - step
    raise NonConvergence(f"Newton polish failed to reach |F| <= {tol:g} from {lam0}")


def _bisect_real(g, a, b, tol=1e-14, max_iter=200):
    fa, fb = g(a), g(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NonConvergence(f"no sign change on [{a}, {b}]")
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        fm = g(mid)
        if fm == 0.0 or (b - a) < tol * (1.0 + abs(mid)):
            return mid
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _fold(x, tol=1e-9):
    return 0.0 if abs(x) < tol else x


def _make_root(F, lam, tol):
    lam_p, res, deriv = _newton_polish(F, lam, tol)
    sigma = _fold(lam_p.real)
    tau = _fold(abs(lam_p.imag))
    # dTheta/dzeta at zeta = -i*lambda equals i * F'(lambda)
    return IndicialRoot(sigma=sigma, tau=tau, residual=res, dtheta=1j * deriv)


def _dedup(roots, tol=1e-7):
    kept = []
    for r in sorted(roots, key=lambda r: (r.sigma, r.tau)):
        if all(abs(r.sigma - k.sigma) > tol or abs(r.tau - k.tau) > tol for k in kept):
            kept.append(r)
    return kept


def _subdivide_search(F, spec, box, tol, kappa_scale, depth=0):
    """Certified recursive search: returns polished roots inside the box."""
    count = _winding(F, box, kappa_scale) + _poles_inside(spec, box)
    if count == 0:
        return []
    slo, shi, tlo, thi = box
    diam = max(shi - slo, thi - tlo)
    if count == 1 or diam < 2e-4:
        center = complex(0.5 * (slo + shi), 0.5 * (tlo + thi))
        try:
            lam, res, deriv = _newton_polish(F, center, tol)
        except NonConvergence:
            lam = None
        if lam is not None and slo - 1e-9 <= lam.real <= shi + 1e-9 \
                and tlo - 1e-9 <= lam.imag <= thi + 1e-9:
            return [IndicialRoot(
                sigma=_fold(lam.real), tau=_fold(abs(lam.imag)),
                residual=res, dtheta=1j * deriv, multiplicity=count,
            )]
        if diam < 2e-4:
            raise NonConvergence(f"cannot isolate {count} roots in minimal box {box}")
    if depth > 60:
        raise NonConvergence(f"subdivision too deep at box {box}")
    # split the long side; retry fractions if the cut runs through a root
    horizontal = (shi - slo) >= (thi - tlo)
    last_err = None
    for frac in (0.5, 0.55, 0.45, 0.61, 0.39):
        if horizontal:
            cut = slo + frac * (shi - slo)
            children = [(slo, cut, tlo, thi), (cut, shi, tlo, thi)]
        else:
            cut = tlo + frac * (thi - tlo)
            children = [(slo, shi, tlo, cut), (slo, shi, cut, thi)]
        try:
            out = []
            for child in children:
                out.extend(_subdivide_search(F, spec, child, tol, kappa_scale, depth + 1))
            return out
        except (ContourThroughRoot, NonConvergence) as err:
            last_err = err
            continue
    raise last_err


def find_roots(spec: ModeSpec, box, tol: float = 1e-10, kappa: float | None = None) -> RootCatalog:
    """Certified root search for F(lambda) = Theta_m(-i lambda) - kappa in a box.

    box = (sigma_lo, sigma_hi, tau_lo, tau_hi).  The box is inflated by a
    small margin so roots sitting exactly on the axes are enclosed; only
    roots inside the requested box are reported.  Raises ContourThroughRoot
    if no margin keeps the counting contour clear of a zero or pole.
    """
    if kappa is None:
        kappa = constants(spec.n, spec.gamma).kappa
    F = _char_fn(spec, kappa)
    slo, shi, tlo, thi = map(float, box)
    if not (shi > slo and thi > tlo):
        raise NonConvergence(f"degenerate box {box}")

    last_err = None
    for eta in (0.0137, 0.0059, 0.0233, 0.0081):
        ext = (slo - eta, shi + eta, tlo - eta, thi + eta)
        # the margin must keep the contour clear of the real pole ladder:
        # no pole near a vertical edge, no horizontal edge hugging the axis
        ladder = _pole_ladder(spec, abs(ext[0]) + abs(ext[1]) + 2.0)
        signed = [q for p in ladder for q in (p, -p)]
        if any(min(abs(p - ext[0]), abs(p - ext[1])) < 3e-3 for p in signed):
            continue
        if any(ext[0] < p < ext[1] for p in signed) and \
                min(abs(ext[2]), abs(ext[3])) < 3e-3:
            continue
        try:
            found = _subdivide_search(F, spec, ext, tol, kappa)
        except ContourThroughRoot as err:
            last_err = err
            continue
        found = _dedup(found)
        inside = [r for r in found
                  if slo - 1e-9 <= r.sigma <= shi + 1e-9
                  and (tlo - 1e-9 <= r.tau <= thi + 1e-9
                       or tlo - 1e-9 <= -r.tau <= thi + 1e-9)]
        return RootCatalog(
            spec=spec, kappa=kappa, roots=tuple(_dedup(inside)),
            search_box=(slo, shi, tlo, thi), certified=True,
        )
    raise last_err if last_err is not None else ContourThroughRoot(f"no safe margin for box {box}")


def first_root(spec: ModeSpec, tol: float = 1e-12, kappa: float | None = None) -> IndicialRoot:
    """Smallest-sigma indicial root.

    Mode 0: the purely oscillatory pair (sigma = 0, tau > 0), located by
    bisection of Theta_0(tau) = kappa on the real frequency axis.
    Mode >= 1: the first real root, bracketed in (0, 2B) where the symbol
    continuation falls from Theta_m(0) > kappa to 0 with no pole between.
    """
    if kappa is None:
        kappa = constants(spec.n, spec.gamma).kappa
    F = _char_fn(spec, kappa)
    if spec.m == 0:
        g = lambda t: theta(spec, t) - kappa
        hi = 2.0
        while g(hi) < 0.0:
            hi *= 2.0
            if hi > 1e6:
                raise NonConvergence("mode-0 first root bracket not found")
        tau0 = _bisect_real(g, 0.0, hi)
        lam, res, deriv = _newton_polish(F, 1j * tau0, tol)
        return IndicialRoot(sigma=_fold(lam.real), tau=abs(lam.imag), residual=res, dtheta=1j * deriv)
    upper = 2.0 * spec.b_offset
    grid = np.linspace(1e-9, upper - 1e-9, 400)
    vals = np.real(F(grid.astype(complex)))
    idx = np.nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))[0]
    if len(idx) == 0:
        raise NonConvergence(f"no real first root found in (0, {upper}) for {spec}")
    i = idx[0]
    g = lambda x: float(np.real(F(complex(x))))
    sig0 = _bisect_real(g, float(grid[i]), float(grid[i + 1]))
    lam, res, deriv = _newton_polish(F, complex(sig0), tol)
    return IndicialRoot(sigma=lam.real, tau=_fold(abs(lam.imag)), residual=res, dtheta=1j * deriv)


def _axis_roots_real(F, spec, sigma_max, tol):
    """Sign-change roots of the real-valued restriction F(lambda), lambda real > 0."""
    poles = _pole_ladder(spec, sigma_max + 1.0)
    cuts = [1e-9] + [p for p in poles if p < sigma_max] + [sigma_max]
    roots = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        pad = 1e-6 * (1.0 + b)
        lo, hi = a + pad, b - pad
        if hi <= lo:
            continue
        grid = np.linspace(lo, hi, max(80, int(50 * (hi - lo))))
        vals = np.real(F(grid.astype(complex)))
        sign_flip = np.nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))[0]
        g = lambda x: float(np.real(F(complex(x))))
        for i in sign_flip:
            x0 = _bisect_real(g, float(grid[i]), float(grid[i + 1]))
            roots.append(_make_root(F, complex(x0), tol))
    return roots


def _axis_roots_imag(F, spec, kappa, tau_max, tol):
    grid = np.linspace(1e-9, tau_max, 600)
    vals = theta(spec, grid) - kappa
    sign_flip = np.nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))[0]
    roots = []
    g = lambda t: theta(spec, t) - kappa
    for i in sign_flip:
        t0 = _bisect_real(g, float(grid[i]), float(grid[i + 1]))
        roots.append(_make_root(F, 1j * t0, tol))
    return roots


def _interior_roots(F, spec, sigma_max, tau_max, tol, kappa):
    margin = 0.02
    box = (margin, sigma_max, margin, tau_max)
    try:
        return _subdivide_search(F, spec, box, tol, kappa)
    except ContourThroughRoot:
        box = (margin * 1.7, sigma_max + 0.011, margin * 1.7, tau_max + 0.011)
        return _subdivide_search(F, spec, box, tol, kappa)


def _certify_count(F, spec, sigma_max, tau_max, kappa, expected):
    """Full first-quadrant count including the axes, via one meromorphic winding."""
    for eta in (0.0137, 0.0059, 0.0233):
        box = (-eta, sigma_max, -eta, tau_max)
        try:
            return (_winding(F, box, kappa) + _poles_inside(spec, box)) == expected
        except (ContourThroughRoot, NonConvergence):
            continue
    return False


@lru_cache(maxsize=256)
def _catalog_cached(n, gamma, m, j_count, tau_max, tol):
    spec = ModeSpec(n=n, gamma=gamma, m=m)
    kappa = constants(n, gamma).kappa
    F = _char_fn(spec, kappa)
    # growth offset keeps the search edge off the real pole ladder 2(A + k)
    sigma_max = 2.0 * spec.a_offset + 2.3137
    while True:
        roots = []
        roots += _axis_roots_imag(F, spec, kappa, tau_max, tol)
        roots += _axis_roots_real(F, spec, sigma_max, tol)
        roots += _interior_roots(F, spec, sigma_max, tau_max, tol, kappa)
        roots = _dedup(roots)
        if len(roots) >= j_count or sigma_max > 2.0 * spec.a_offset + 2.0 * j_count + 24.0:
            break
        sigma_max += 2.0
    if len(roots) < j_count:
        raise NonConvergence(
            f"only {len(roots)} roots located for {spec} within sigma <= {sigma_max}"
        )
    certified = _certify_count(F, spec, sigma_max, tau_max, kappa, len(roots))
    return RootCatalog(
        spec=spec, kappa=kappa, roots=tuple(sorted(roots, key=lambda r: (r.sigma, r.tau))),
        search_box=(0.0, sigma_max, 0.0, tau_max), certified=certified,
    )


def root_catalog(spec: ModeSpec, j_count: int, tau_max: float = 20.0,
                 tol: float = 1e-10) -> RootCatalog:
    """First-quadrant catalog holding at least j_count roots, sorted by sigma.

    Combines axis scans (where the characteristic function is real) with
    certified interior box counting, then cross-checks the total against a
    single meromorphic winding over the whole quadrant.
    """
    return _catalog_cached(spec.n, float(spec.gamma), spec.m, int(j_count),
                           float(tau_max), float(tol))


def sigma_ladder(spec: ModeSpec, j_count: int) -> np.ndarray:
    cat = root_catalog(spec, j_count)
    return np.array([r.sigma for r in cat.roots[:j_count]])


@dataclass
class LemmaReport:
    """Outcome of the structural root checks across modes.

    clause_a -- mode-0 first root purely oscillatory (sigma = 0, tau > 0)
    clause_b -- mode-1 first root real and equal to 1 within tol
    clause_c -- first real exponent strictly increasing in the mode degree
    clause_d -- all higher exponents exceed (n-1)/2
    """

    n: int
    gamma: float
    m_max: int
    j_max: int
    clause_a: bool = False
    clause_b: bool = False
    clause_c: bool = False
    clause_d: bool = False
    tau0: float = float("nan")
    sigma_first: dict = field(default_factory=dict)
    ladders: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.clause_a and self.clause_b and self.clause_c and self.clause_d


def check_lemma(n: int, gamma: float = 0.5, m_max: int = 6, j_max: int = 3,
                tol_b: float = 1e-8) -> LemmaReport:
    """Verify the structural picture of the indicial set for one dimension n."""
    report = LemmaReport(n=n, gamma=gamma, m_max=m_max, j_max=j_max)

    r0 = first_root(ModeSpec(n=n, gamma=gamma, m=0))
    report.tau0 = r0.tau
    report.clause_a = (r0.sigma == 0.0) and (r0.tau > 0.0)
    if not report.clause_a:
        report.notes.append(f"mode-0 first root not purely oscillatory: {r0}")

    for m in range(1, max(m_max, 1) + 1):
        rm = first_root(ModeSpec(n=n, gamma=gamma, m=m))
        report.sigma_first[m] = rm.sigma
        if rm.tau != 0.0:
            report.notes.append(f"mode-{m} first root unexpectedly off-axis: {rm}")
    report.clause_b = abs(report.sigma_first.get(1, float("nan")) - 1.0) <= tol_b

    sigmas = [report.sigma_first[m] for m in range(1, m_max + 1)]
    report.clause_c = all(b > a for a, b in zip(sigmas[:-1], sigmas[1:]))
    if not report.clause_c:
        report.notes.append(f"first exponents not increasing: {sigmas}")

    ok_d = True
    bar = (n - 1) / 2.0
    for m in range(0, m_max + 1):
        cat = root_catalog(ModeSpec(n=n, gamma=gamma, m=m), j_max + 1)
        report.ladders[m] = [(r.sigma, r.tau) for r in cat.roots[: j_max + 1]]
        if not cat.certified:
            report.notes.append(f"mode-{m} catalog count not certified")
        for j in range(1, j_max + 1):
            if cat.roots[j].sigma <= bar:
                ok_d = False
                report.notes.append(
                    f"mode {m} root j={j} has sigma {cat.roots[j].sigma} <= {bar}"
                )
    report.clause_d = ok_d
    return report
