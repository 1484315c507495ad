"""Nonlinear boundary-curvature solve on a periodic model neck.

The compact stand-in for the glued manifold is the periodic cylinder
(s in R/LZ) x S^{n-1} with zonal (rotation-invariant) data.  States hold
per-mode Fourier coefficient tables f_hat[m, k]; the boundary operator P
is diagonal there with multiplier Theta_m(xi_k), xi_k = 2*pi*k/L, and the
curvature map is

    Q(f) = f^{-(n+1)/(n-1)} * (P f),

evaluated by collocation: transform to a (Gauss node) x (s grid) product
grid, combine pointwise, project back.  The frozen linearization at f = 1
is the diagonal multiplier Theta_m(xi_k) - kappa, whose inversion is the
model Green operator; the period is chosen so no lattice frequency hits
the mode-0 crossing of kappa (the oscillatory indicial pair on the line
reappears on a periodic domain as a near-resonant grid frequency).

The iteration solves Q(1 + v) = c either in the frozen fixed-point form
v <- v - G(Q(1+v) - c) or by full Newton steps (re-linearized, solved
iteratively with G as preconditioner).  A flat-ball variant with the same
zonal machinery exhibits the degree-1 kernel of the linearized operator;
its inversion must fail loudly, never silently.

Per-mode work inside a step is vectorized; steps themselves are
sequential and pure.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse.linalg
from scipy.special import eval_chebyt, eval_gegenbauer, roots_jacobi

from .errors import (Diverged, NonPositiveConformalFactor, ResonanceError,
                     ValidationError)
from .extension import BallModel, ball_linearized_eigenvalue, dtn_ball_eigenvalue
from .indicial import first_root
from .neck import WeightedNormSpec, weight as neck_weight
from .symbol import ModeSpec, constants, theta

__all__ = [
    "PeriodicCylinderState",
    "NewtonReport",
    "ZonalBasis",
    "default_period",
    "apply_Q",
    "apply_linearized",
    "solve_linearized",
    "newton_solve",
    "state_norm",
    "quadratic_remainder",
    "BallState",
    "ball_apply_Q",
    "ball_solve_linearized",
    "ball_newton_probe",
    "uniform_invertibility_study",
    "cylinder_smallest_multiplier",
]

RESONANCE_MARGIN = 1e-3


# ---------------------------------------------------------------------------
# zonal collocation


@dataclass(frozen=True)
class ZonalBasis:
    """Discrete zonal transform on S^{n-1}.

    Rows of `table` sample the degree-m zonal functions at Gauss nodes of
    the cross-section measure (1-x^2)^{(n-3)/2} dx; they are normalized so
    the constant function is exactly mode 0 with coefficient 1, and the
    Gauss quadrature makes the discrete projection exact on products of
    two truncated expansions.
    """

    n: int
    m_max: int
    nodes: np.ndarray
    weights: np.ndarray
    table: np.ndarray  # (m_max+1, n_nodes)

    @classmethod
    def build(cls, n: int, m_max: int) -> "ZonalBasis":
        if n < 2:
            raise ValidationError(f"need n >= 2, got {n}")
        if m_max < 0:
            raise ValidationError("m_max must be nonnegative")
        J = 2 * (m_max + 1)
        a = (n - 3) / 2.0
        x, w = roots_jacobi(J, a, a)
        rows = np.empty((m_max + 1, J))
        for m in range(m_max + 1):
            if n == 2:
                rows[m] = eval_chebyt(m, x)
            else:
                rows[m] = eval_gegenbauer(m, (n - 2) / 2.0, x)
        # normalize to <E_m, E_m>_w = total mass, so E_0 == 1
        mass = float(np.sum(w))
        norms = np.sqrt(np.sum(w * rows * rows, axis=1) / mass)
        rows /= norms[:, None]
        return cls(n=n, m_max=m_max, nodes=x, weights=w, table=rows)

    def to_grid(self, mode_values: np.ndarray) -> np.ndarray:
        """(m_max+1, ...) per-mode samples -> (n_nodes, ...) grid values."""
        return np.tensordot(self.table.T, mode_values, axes=1)

    def to_modes(self, grid_values: np.ndarray) -> np.ndarray:
        mass = float(np.sum(self.weights))
        proj = self.table * self.weights[None, :] / mass
        return np.tensordot(proj, grid_values, axes=1)


@lru_cache(maxsize=64)
def _basis(n: int, m_max: int) -> ZonalBasis:
    return ZonalBasis.build(n, m_max)


# ---------------------------------------------------------------------------
# state


def default_period(n: int) -> float:
    """Non-resonant period: an irrational multiple of the mode-0
    oscillation period 2*pi/tau_0."""
    tau0 = first_root(ModeSpec(n=n, gamma=0.5, m=0)).tau
    return 2.0 * np.pi / tau0 * (1.0 + 1.0 / np.sqrt(2.0))


@lru_cache(maxsize=128)
def _multiplier_table(n: int, L: float, m_max: int, N_s: int):
    xi = 2.0 * np.pi * np.fft.fftfreq(N_s, d=L / N_s)
    out = np.empty((m_max + 1, N_s))
    for m in range(m_max + 1):
        out[m] = theta(ModeSpec(n=n, gamma=0.5, m=m), np.abs(xi))
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PeriodicCylinderState:
    """Zonal conformal factor f = 1 + v on the periodic cylinder,
    stored as per-mode Fourier coefficient rows f_hat[m, k]."""

    n: int
    L: float
    m_max: int
    N_s: int
    f_hat: np.ndarray

    def __post_init__(self):
        if self.L <= 0:
            raise ValidationError("period must be positive")
        if self.N_s < 8 or self.N_s % 2:
            raise ValidationError("need an even frequency count >= 8")
        if self.f_hat.shape != (self.m_max + 1, self.N_s):
            raise ValidationError(
                f"coefficient table shape {self.f_hat.shape} does not match "
                f"modes {self.m_max + 1} x frequencies {self.N_s}")
        scale = np.max(np.abs(self.f_hat)) or 1.0
        flipped = np.conj(self.f_hat[:, (-np.arange(self.N_s)) % self.N_s])
        if np.max(np.abs(self.f_hat - flipped)) > 1e-8 * scale:
            raise ValidationError("coefficients are not Hermitian-symmetric "
                                  "(state must be real-valued)")
        mults = _multiplier_table(self.n, self.L, self.m_max, self.N_s)
        kappa = constants(self.n).kappa
        if np.min(np.abs(mults[0] - kappa)) <= RESONANCE_MARGIN:
            raise ResonanceError(
                f"period L={self.L:.6g} puts a lattice frequency on the mode-0 "
                "crossing; pick an irrational multiple (default_period)")

    # -- constructors ------------------------------------------------------
    @classmethod
    def ones(cls, n: int, L: float | None = None, m_max: int = 8,
             N_s: int = 256) -> "PeriodicCylinderState":
        L = default_period(n) if L is None else L
        f_hat = np.zeros((m_max + 1, N_s), dtype=complex)
        f_hat[0, 0] = N_s  # fft of the constant 1
        return cls(n=n, L=L, m_max=m_max, N_s=N_s, f_hat=f_hat)

    @classmethod
    def from_mode_values(cls, n: int, L: float, values: np.ndarray
                         ) -> "PeriodicCylinderState":
        values = np.asarray(values, dtype=float)
        m_max = values.shape[0] - 1
        return cls(n=n, L=L, m_max=m_max, N_s=values.shape[1],
                   f_hat=np.fft.fft(values, axis=1))

    # -- views -------------------------------------------------------------
    def mode_values(self) -> np.ndarray:
        return np.real(np.fft.ifft(self.f_hat, axis=1))

    def s_grid(self) -> np.ndarray:
        return (self.L / self.N_s) * np.arange(self.N_s)

    def with_table(self, f_hat: np.ndarray) -> "PeriodicCylinderState":
        return replace(self, f_hat=f_hat)


# ---------------------------------------------------------------------------
# operators


def _n_power(n: int) -> float:
    return (n + 1) / (n - 1)


def apply_Q(state: PeriodicCylinderState) -> np.ndarray:
    """Curvature map Q(f) = f^{-(n+1)/(n-1)} (P f) as a coefficient table."""
    mults = _multiplier_table(state.n, state.L, state.m_max, state.N_s)
    basis = _basis(state.n, state.m_max)
    f_vals = state.mode_values()
    Pf_vals = np.real(np.fft.ifft(mults * state.f_hat, axis=1))
    f_grid = basis.to_grid(f_vals)
    if np.min(f_grid) <= 0.0:
        raise NonPositiveConformalFactor(
            f"factor reaches {np.min(f_grid):.3g} on the collocation grid")
    Q_grid = f_grid ** (-_n_power(state.n)) * basis.to_grid(Pf_vals)
    return np.fft.fft(basis.to_modes(Q_grid), axis=1)


def apply_linearized(state: PeriodicCylinderState, v_hat: np.ndarray) -> np.ndarray:
    """Frozen linearization at f = 1: diagonal multiplier Theta_m - kappa."""
    mults = _multiplier_table(state.n, state.L, state.m_max, state.N_s)
    return (mults - constants(state.n).kappa) * v_hat


def solve_linearized(state: PeriodicCylinderState, h_hat: np.ndarray) -> np.ndarray:
    """Model Green operator: per-mode division by Theta_m - kappa."""
    mults = _multiplier_table(state.n, state.L, state.m_max, state.N_s)
    denom = mults - constants(state.n).kappa
    bad = np.abs(denom) <= RESONANCE_MARGIN
    if np.any(bad):
        m_bad, k_bad = np.argwhere(bad)[0]
        raise ResonanceError(
            f"multiplier vanishes at mode {m_bad}, frequency index {k_bad}")
    return h_hat / denom


def _jacobian_matvec(state: PeriodicCylinderState):
    """Exact derivative of apply_Q at the given state, as a matvec on
    coefficient tables: DQ(f) w = f^{-N} P w - N f^{-N-1} (P f) w."""
    mults = _multiplier_table(state.n, state.L, state.m_max, state.N_s)
    basis = _basis(state.n, state.m_max)
    Npow = _n_power(state.n)
    f_grid = basis.to_grid(state.mode_values())
    Pf_grid = basis.to_grid(np.real(np.fft.ifft(mults * state.f_hat, axis=1)))
    coef_a = f_grid ** (-Npow)
    coef_b = -Npow * f_grid ** (-Npow - 1.0) * Pf_grid

    def matvec(w_hat: np.ndarray) -> np.ndarray:
        Pw_grid = basis.to_grid(np.real(np.fft.ifft(mults * w_hat, axis=1)))
        w_grid = basis.to_grid(np.real(np.fft.ifft(w_hat, axis=1)))
        out_grid = coef_a * Pw_grid + coef_b * w_grid
        return np.fft.fft(basis.to_modes(out_grid), axis=1)

    return matvec


# ---------------------------------------------------------------------------
# norms and reports


def state_norm(state: PeriodicCylinderState, table: np.ndarray,
               norm: WeightedNormSpec) -> float:
    """Sup norm of a coefficient table on the collocation grid.

    The periodic model has no neck funnel, so the weight is identically 1
    and mu is inert; k = 1 adds the s-difference-quotient sup, keeping the
    interface of the neck norms.
    """
    basis = _basis(state.n, state.m_max)
    vals = basis.to_grid(np.real(np.fft.ifft(table, axis=1)))
    total = float(np.max(np.abs(vals)))
    if norm.k == 1:
        ds = state.L / state.N_s
        dq = np.abs(np.diff(vals, axis=-1, append=vals[..., :1])) / ds
        total = max(total, float(np.max(dq)))
    return total


@dataclass(frozen=True)
class NewtonReport:
    iterations: int
    residual_history: tuple
    converged: bool
    final_f: PeriodicCylinderState
    method: str
    notes: str = ""


def _residual_table(state: PeriodicCylinderState) -> np.ndarray:
    out = apply_Q(state)
    out[0, 0] -= constants(state.n).c * state.N_s
    return out


def newton_solve(state0: PeriodicCylinderState,
                 norm: WeightedNormSpec = WeightedNormSpec(mu=-0.5, k=0),
                 tol: float = 1e-11, max_iter: int = 40,
                 method: str = "fixed-point") -> NewtonReport:
    """Drive Q(f) to the constant c from a nearby start.

    fixed-point: the frozen-inverse update v <- v - G(Q(f) - c), the form
    whose contraction the error analysis provides near f = 1 (intended
    basin: initial perturbation sup-norm <~ 0.05).  newton: re-linearized
    steps, preconditioned by G, for quadratic tails.  Three consecutive
    residual increases raise Diverged carrying the partial report.
    """
    if method not in ("fixed-point", "newton"):
        raise ValidationError(f"unknown method {method!r}")
    state = state0
    history = []
    rising = 0
    for it in range(max_iter + 1):
        res = _residual_table(state)
        rnorm = state_norm(state, res, norm)
        history.append(rnorm)
        if rnorm <= tol:
            return NewtonReport(iterations=it, residual_history=tuple(history),
                                converged=True, final_f=state, method=method)
        if len(history) >= 2 and rnorm >= history[-2]:
            rising += 1
            if rising >= 3:
                report = NewtonReport(iterations=it, residual_history=tuple(history),
                                      converged=False, final_f=state, method=method,
                                      notes="residual rose 3 consecutive steps")
                raise Diverged("iteration diverged", report=report)
        else:
            rising = 0
        if it == max_iter:
            break
        if method == "fixed-point":
            step = solve_linearized(state, res)
        else:
            step = _newton_step(state, res)
        state = state.with_table(state.f_hat - step)
    return NewtonReport(iterations=max_iter, residual_history=tuple(history),
                        converged=False, final_f=state, method=method,
                        notes="max_iter reached")


def _newton_step(state: PeriodicCylinderState, res: np.ndarray) -> np.ndarray:
    matvec = _jacobian_matvec(state)
    shape = res.shape

    def mv_flat(x):
        return matvec(x.reshape(shape)).ravel()

    def prec_flat(x):
        return solve_linearized(state, x.reshape(shape)).ravel()

    dim = res.size
    A = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=mv_flat,
                                           dtype=complex)
    M = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=prec_flat,
                                           dtype=complex)
    sol, info = scipy.sparse.linalg.lgmres(A, res.ravel(), M=M,
                                           rtol=1e-13, atol=0.0, maxiter=200)
    if info != 0:
        raise ResonanceError("inner linear solve failed to converge; "
                             "the linearized operator is near-singular")
    return sol.reshape(shape)


def quadratic_remainder(state1: PeriodicCylinderState, v_hat: np.ndarray,
                        norm: WeightedNormSpec = WeightedNormSpec(mu=-0.5, k=0)
                        ) -> float:
    """||Q(1+v) - c - Lv|| / ||v||^2 — the constant whose boundedness makes
    the remainder genuinely quadratic."""
    pert = state1.with_table(state1.f_hat + v_hat)
    res = _residual_table(pert)
    rem = res - apply_linearized(state1, v_hat)
    vn = state_norm(state1, v_hat, norm)
    if vn == 0.0:
        raise ValidationError("need a nonzero direction")
    return state_norm(state1, rem, norm) / vn**2


# ---------------------------------------------------------------------------
# flat-ball variant (degenerate linearization)


@dataclass(frozen=True)
class BallState:
    """Zonal factor on the flat-ball boundary sphere; one real coefficient
    per spherical-harmonic degree."""

    n: int
    k_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.k_max + 1,):
            raise ValidationError("coefficient count must be k_max + 1")

    @classmethod
    def ones(cls, n: int, k_max: int = 8) -> "BallState":
        c = np.zeros(k_max + 1)
        c[0] = 1.0
        return cls(n=n, k_max=k_max, coeffs=c)


def ball_apply_Q(state: BallState) -> np.ndarray:
    basis = _basis(state.n, state.k_max)
    model = BallModel(n=state.n, k_max=state.k_max)
    eig = np.array([dtn_ball_eigenvalue(model, k) for k in range(state.k_max + 1)])
    f_grid = basis.to_grid(state.coeffs)
    if np.min(f_grid) <= 0.0:
        raise NonPositiveConformalFactor("ball factor lost positivity")
    Pf_grid = basis.to_grid(eig * state.coeffs)
    return basis.to_modes(f_grid ** (-_n_power(state.n)) * Pf_grid)


def ball_solve_linearized(state: BallState, h: np.ndarray) -> np.ndarray:
    """Division by the linearized spectrum k - 1; the degree-1 kernel is a
    hard resonance whenever the data has degree-1 content."""
    model = BallModel(n=state.n, k_max=state.k_max)
    lam = np.array([ball_linearized_eigenvalue(model, k)
                    for k in range(state.k_max + 1)])
    kernel = np.abs(lam) <= RESONANCE_MARGIN
    if np.any(kernel & (np.abs(h) > 1e-14 * max(np.max(np.abs(h)), 1.0))):
        k_bad = int(np.flatnonzero(kernel)[0])
        raise ResonanceError(
            f"linearized ball operator has kernel at degree {k_bad}; "
            "data with that content cannot be inverted")
    out = np.where(kernel, 0.0, h / np.where(kernel, 1.0, lam))
    return out


def ball_newton_probe(n: int, k_max: int = 8, amplitude: float = 0.01,
                      degree: int = 1, max_iter: int = 12):
    """Fixed-point iteration on the ball from a single-degree perturbation.

    Returns ('resonance', message) when the kernel blocks the first solve,
    or ('stall', residual_history) if iteration proceeds without the
    quadratic collapse — for degree 1 it must never converge quadratically.
    """
    state = BallState.ones(n, k_max)
    coeffs = state.coeffs.copy()
    coeffs[degree] += amplitude
    state = BallState(n=n, k_max=k_max, coeffs=coeffs)
    c_ball = dtn_ball_eigenvalue(BallModel(n=n, k_max=k_max), 0)
    history = []
    for _ in range(max_iter):
        res = ball_apply_Q(state) - c_ball * np.eye(k_max + 1)[0]
        history.append(float(np.max(np.abs(res))))
        try:
            step = ball_solve_linearized(state, res)
        except ResonanceError as exc:
            return "resonance", str(exc), tuple(history)
        state = BallState(n=n, k_max=k_max, coeffs=state.coeffs - step)
    return "stall", "no quadratic collapse", tuple(history)


# ---------------------------------------------------------------------------
# uniform invertibility across the glueing sweep


def cylinder_smallest_multiplier(n: int, L: float, m_max: int, N_s: int) -> float:
    mults = _multiplier_table(n, L, m_max, N_s)
    return float(np.min(np.abs(mults - constants(n).kappa)))


def _dense_multiplier(theta_row: np.ndarray) -> np.ndarray:
    N = theta_row.size
    F = np.fft.fft(np.eye(N), axis=0)
    return np.real(np.fft.ifft(theta_row[:, None] * F, axis=0))


def _glued_factor_on(s: np.ndarray, epsilon: float, n: int) -> np.ndarray:
    """Glued conformal factor evaluated on an arbitrary grid (fixed-window
    sweeps need a common grid across epsilons)."""
    from .neck import NeckConfig, _cutoff, _deviation_profile

    cfg = NeckConfig(epsilon=epsilon, n_s=max(256, s.size))
    delta = cfg.resolved_delta
    chi = _cutoff(cfg, s)
    g1 = 1.0 + delta**2 * _deviation_profile(cfg, s)
    g2 = 1.0 + delta**2 * _deviation_profile(cfg, -s)
    return chi * g1 + (1.0 - chi) * g2


def uniform_invertibility_study(n: int, eps_list, mu: float, m_max: int = 3,
                                N_s: int = 512, pad: float = 4.0,
                                threads: int = 1) -> dict:
    """Smallest weighted singular value of the linearization at the glued
    factor, swept over epsilon on one fixed window.

    The window is sized for the smallest epsilon and shared by the whole
    sweep so singular values are comparable (a per-epsilon window would
    move the frequency lattice and masquerade as an epsilon trend).  The
    report carries per-epsilon values and the log-log slope; boundedness
    away from zero — not monotonicity — is the claim under test.

    Two measures are reported per mode: the operator smallest singular
    value between the weighted sup-norm spaces (1/||A^{-1}|| with the
    max-row-sum operator norm) — the quantity matching the sup-norm
    estimates the inversion theory runs on — and the l2 SVD of the
    weight-conjugated matrix as an auxiliary diagnostic.  The slope in
    the report refers to the sup-norm measure.
    """
    from .neck import NeckConfig

    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValidationError("need at least one epsilon")
    if not -(n - 1) / 2 < mu < 0:
        raise ValidationError(f"mu={mu} outside the inversion range for n={n}")
    S_max = max(-np.log(e) for e in eps_list)
    L = S_max + 2.0 * pad
    # nudge the window off the mode-0 crossing if needed
    for j in range(200):
        trial = L * (1.0 + 0.003 * j)
        if cylinder_smallest_multiplier(n, trial, 0, N_s) > RESONANCE_MARGIN:
            L = trial
            break
    else:
        raise ResonanceError("could not find a non-resonant window length")
    s = -0.5 * L + (L / N_s) * np.arange(N_s)
    xi = 2.0 * np.pi * np.fft.fftfreq(N_s, d=L / N_s)
    Npow = _n_power(n)

    dense = {m: _dense_multiplier(theta(ModeSpec(n=n, gamma=0.5, m=m), np.abs(xi)))
             for m in range(m_max + 1)}

    def one(eps: float) -> dict:
        U = _glued_factor_on(s, eps, n)
        u = U ** ((n - 1) / 4.0)
        Pu = np.real(np.fft.ifft(theta(ModeSpec(n=n, gamma=0.5, m=0), np.abs(xi))
                                 * np.fft.fft(u)))
        a = u ** (-Npow)
        b = -Npow * u ** (-Npow - 1.0) * Pu
        cfg = NeckConfig(epsilon=eps, n_s=N_s)
        w = neck_weight(cfg, s)
        wl = w ** (-mu)
        per_mode = {}
        per_mode_l2 = {}
        for m in range(m_max + 1):
            A = a[:, None] * dense[m] + np.diag(b)
            Aw = wl[:, None] * A / wl[None, :]
            per_mode[m] = float(1.0 / np.max(np.sum(np.abs(scipy.linalg.inv(Aw)),
                                                    axis=1)))
            per_mode_l2[m] = float(scipy.linalg.svdvals(Aw)[-1])
        return {"epsilon": eps, "per_mode": per_mode, "per_mode_l2": per_mode_l2,
                "sigma_min": min(per_mode.values()),
                "sigma_min_l2": min(per_mode_l2.values())}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, eps_list))
    else:
        rows = [one(e) for e in eps_list]

    loge = np.log(eps_list)

    def _slope(key):
        vals = np.log([r[key] for r in rows])
        return float(np.polyfit(loge, vals, 1)[0]) if len(eps_list) > 1 else 0.0

    return {"n": n, "mu": mu, "L": L, "N_s": N_s, "m_max": m_max,
            "rows": rows, "slope": _slope("sigma_min"),
            "slope_l2": _slope("sigma_min_l2"),
            "sigma_min_overall": min(r["sigma_min"] for r in rows)}
