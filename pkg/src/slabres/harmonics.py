"""Diffraction-order exponents and the diagonal Dirichlet-to-Neumann action.

Order m of a pseudo-periodic field carries the z-exponent

    eta_m^2 = eps0*mu0*omega^2 - (m + kappa)^2.

The square root is taken with the branch cut on the negative imaginary axis
of the radicand, so that for real parameters eta_m is positive real on
propagating orders and positive imaginary on evanescent ones, and the map
continues analytically into the complex (kappa, omega) neighborhood used by
dispersion tracking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GrazingOrderError
from .structure import Medium


def branch_sqrt(w):
    """Square root with branch cut on the negative imaginary axis.

    Computed as sqrt(|w|) * exp(i*theta/2) with theta = arg(w) chosen in
    (-pi/2, 3*pi/2].  On the real axis the result is made exactly real
    (w > 0) or exactly imaginary (w < 0), matching the sign rule
    eta = |eta| resp. eta = i|eta|.  Accepts scalars or arrays.
    """
    w = np.asarray(w, dtype=complex)
    theta = np.angle(w)
    theta = np.where(theta <= -0.5 * math.pi, theta + 2.0 * math.pi, theta)
    out = np.sqrt(np.abs(w)) * np.exp(0.5j * theta)
    real_w = w.imag == 0.0
    if np.any(real_w):
        exact = np.where(w.real >= 0.0,
                         np.sqrt(np.maximum(w.real, 0.0)) + 0.0j,
                         1j * np.sqrt(np.maximum(-w.real, 0.0)))
        out = np.where(real_w, exact, out)
    if out.ndim == 0:
        return complex(out)
    return out


def _radicand(m, kappa, omega, epsmu):
    m = np.asarray(m)
    return epsmu * omega**2 - (m + kappa) ** 2


def eta(m: int, kappa: complex, omega: complex, ambient: Medium) -> complex:
    """z-exponent of diffraction order m at (kappa, omega).

    Raises GrazingOrderError when the radicand vanishes exactly.
    """
    w = _radicand(m, kappa, omega, ambient.eps * ambient.mu)
    if np.any(w == 0):
        raise GrazingOrderError(f"grazing order m={m} at kappa={kappa}, omega={omega}")
    return branch_sqrt(w)


def eta_many(ms, kappa, omega, ambient: Medium):
    """Vector of eta_m over an array of orders (shared validation)."""
    w = _radicand(ms, kappa, omega, ambient.eps * ambient.mu)
    if np.any(w == 0):
        bad = np.asarray(ms)[np.nonzero(np.atleast_1d(w == 0))[0]]
        raise GrazingOrderError(f"grazing order(s) m={bad.tolist()} at kappa={kappa}, omega={omega}")
    return branch_sqrt(w)


def eta_derivatives(m, kappa, omega, ambient: Medium) -> tuple[complex, complex]:
    """Partial derivatives (d eta/d omega, d eta/d kappa).

    d_omega = eps0*mu0*omega / eta_m and d_kappa = -(m + kappa) / eta_m.
    """
    e = eta(m, kappa, omega, ambient)
    epsmu = ambient.eps * ambient.mu
    return epsmu * omega / e, -(m + kappa) / e


def in_diamond(kappa: float, omega: float, ambient: Medium) -> bool:
    """True iff exactly the m=0 order propagates: |k| < omega*sqrt(eps0 mu0) < 1-|k|."""
    root = math.sqrt(ambient.eps * ambient.mu)
    ak = abs(kappa)
    return ak < 0.5 and ak < omega * root < 1.0 - ak


@dataclass(frozen=True)
class HarmonicExponent:
    m: int
    eta: complex
    propagating: bool


def harmonic_exponent(m: int, kappa: float, omega: float, ambient: Medium) -> HarmonicExponent:
    """eta_m packaged with its propagating/evanescent classification (real parameters)."""
    w = _radicand(m, kappa, omega, ambient.eps * ambient.mu)
    if w == 0:
        raise GrazingOrderError(f"grazing order m={m}")
    return HarmonicExponent(m=m, eta=eta(m, kappa, omega, ambient), propagating=bool(np.real(w) > 0))


@dataclass(frozen=True)
class DiamondPoint:
    """A validated (kappa, omega) pair inside the single-order region."""

    kappa: float
    omega: float
    ambient: Medium = Medium(1.0, 1.0)

    def __post_init__(self):
        from .errors import OutsideDiamondError

        if not in_diamond(self.kappa, self.omega, self.ambient):
            raise OutsideDiamondError(
                f"(kappa, omega) = ({self.kappa}, {self.omega}) outside the diamond"
            )


def dtn_apply(trace_coeffs: dict[int, complex], kappa, omega, M: int,
              ambient: Medium) -> dict[int, complex]:
    """Apply the diagonal DtN multiplier: coefficient m maps to -i*eta_m*f_m.

    All supplied orders must satisfy |m| <= M; grazing orders raise.
    """
    out = {}
    for m, fm in trace_coeffs.items():
        if abs(m) > M:
            raise ValueError(f"order m={m} exceeds truncation M={M}")
        out[m] = -1j * eta(m, kappa, omega, ambient) * fm
    return out
