"""Fourier symbol of the conformal fractional boundary operator on a cylinder.

On the model half-cylinder with boundary R x S^(n-1), the order-2*gamma
conformal boundary operator acts mode-by-mode: on a spherical-harmonic
mode of degree m and a longitudinal frequency xi it multiplies by

    Theta_m(xi) = 2^(2 gamma) * |Gamma(A + i xi/2)|^2 / |Gamma(B + i xi/2)|^2,

with offsets

    A = 1/2 + gamma/2 + (n/2 + m - 1)/2,
    B = 1/2 - gamma/2 + (n/2 + m - 1)/2.

The same Gamma-quotient, read as a function of a complex frequency zeta,

    Theta_m(zeta) = 2^(2 gamma) Gamma(A + i zeta/2) Gamma(A - i zeta/2)
                    / (Gamma(B + i zeta/2) Gamma(B - i zeta/2)),

is the analytic continuation used for indicial-root hunting; it restricts
to the real-axis formula since A and B are real.

Two constants drive everything downstream at gamma = 1/2:

    c     = Theta_0(0) = 2 Gamma((n+1)/4)^2 / Gamma((n-1)/4)^2
            (the boundary curvature of the exact cylinder; 2/pi at n = 3),
    kappa = (n+1)/(n-1) * c
            (the multiplier subtracted by the linearized operator).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpec, PoleError, ValidationError
from .specfun import POLE_TOL, log_gamma

__all__ = ["ModeSpec", "Constants", "theta", "theta_analytic", "constants"]


@dataclass(frozen=True)
class ModeSpec:
    """One cross-sectional mode of the cylinder operator.

    n      -- boundary dimension (the cylinder boundary is R x S^(n-1)), n >= 2
    gamma  -- operator order / 2, in (0, n/2); 1/2 is the curvature case
    m      -- spherical-harmonic degree on S^(n-1), m >= 0
    """

    n: int
    gamma: float = 0.5
    m: int = 0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n!r}")
        if not (0.0 < self.gamma < self.n / 2.0):
            raise ValidationError(f"gamma must lie in (0, n/2), got {self.gamma!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 0:
            raise ValidationError(f"m must be an integer >= 0, got {self.m!r}")

    @property
    def mu(self) -> float:
        """Laplace eigenvalue m(m + n - 2) of the degree-m harmonics."""
        return float(self.m * (self.m + self.n - 2))

    @property
    def a_offset(self) -> float:
        return 0.5 + 0.5 * self.gamma + 0.5 * (self.n / 2.0 + self.m - 1.0)

    @property
    def b_offset(self) -> float:
        return 0.5 - 0.5 * self.gamma + 0.5 * (self.n / 2.0 + self.m - 1.0)


@dataclass(frozen=True)
class Constants:
    """Curvature constant of the exact cylinder and its linearization shift."""

    n: int
    c: float
    kappa: float


def _reject_degenerate(spec: ModeSpec):
    b = spec.b_offset
    if b < 0.5 and abs(b - round(b)) < POLE_TOL and round(b) <= 0:
        raise DegenerateSpec(
            f"symbol denominator offset B = {b} sits on a Gamma pole; "
            f"spec {spec} is degenerate at xi = 0"
        )


def theta(spec: ModeSpec, xi):
    """Symbol value Theta_m(xi) for real xi (scalar or array); real, positive.

    Evaluated via log-Gamma differences and one exponentiation, so large
    |xi| neither overflows nor loses the leading |xi|^(2*gamma) growth.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(np.abs(xi_arr) < POLE_TOL):
        _reject_degenerate(spec)
    za = spec.a_offset + 0.5j * xi_arr
    zb = spec.b_offset + 0.5j * xi_arr
    # A, B real: the conjugate Gamma factor doubles the real part of log Gamma.
    log_theta = 2.0 * spec.gamma * np.log(2.0) \
        + 2.0 * np.real(log_gamma(za)) - 2.0 * np.real(log_gamma(zb))
    out = np.exp(log_theta)
    return float(out) if np.ndim(xi) == 0 else out


def theta_analytic(spec: ModeSpec, zeta):
    """Analytic continuation of the symbol to complex frequency zeta.

    Returns exact zeros where the denominator Gammas have poles; raises
    PoleError where the numerator Gammas do (a genuine pole of the symbol).
    Scalar or array input.
    """
    z_arr = np.asarray(zeta, dtype=np.complex128)
    scalar = z_arr.ndim == 0
    z_flat = np.atleast_1d(z_arr)

    za_p = spec.a_offset + 0.5j * z_flat
    za_m = spec.a_offset - 0.5j * z_flat
    zb_p = spec.b_offset + 0.5j * z_flat
    zb_m = spec.b_offset - 0.5j * z_flat

    def _near_pole(w):
        re, im = np.real(w), np.imag(w)
        nearest = np.round(re)
        return (nearest <= 0.0) & (np.abs(re - nearest) < POLE_TOL) & (np.abs(im) < POLE_TOL)

    num_pole = _near_pole(za_p) | _near_pole(za_m)
    if np.any(num_pole):
        raise PoleError(f"theta_analytic pole at zeta = {z_flat[num_pole]}")
    den_pole = _near_pole(zb_p) | _near_pole(zb_m)

    out = np.zeros_like(z_flat)
    ok = ~den_pole
    if np.any(ok):
        log_val = (2.0 * spec.gamma * np.log(2.0)
                   + log_gamma(za_p[ok]) + log_gamma(za_m[ok])
                   - log_gamma(zb_p[ok]) - log_gamma(zb_m[ok]))
        out[ok] = np.exp(log_val)
    return complex(out[0]) if scalar else out.reshape(z_arr.shape)


def constants(n: int, gamma: float = 0.5) -> Constants:
    """Cylinder curvature constant c = Theta_0(0) and kappa = (n+1)/(n-1) c."""
    c = theta(ModeSpec(n=n, gamma=gamma, m=0), 0.0)
    return Constants(n=n, c=c, kappa=(n + 1.0) / (n - 1.0) * c)
