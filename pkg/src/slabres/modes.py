"""Guided-mode location and complex dispersion tracking.

A guided mode is a zero of the smallest-magnitude eigenvalue ell(kappa, omega)
of the pencil (P, Q) = (H - omega^2 B, H + B).  The eigenvalue is computed by
shift-invert Arnoldi at shift 0 (largest magnitude of P^-1 Q); its zero in
omega is polished by complex Newton with the derivative obtained from
first-order eigenvalue perturbation,

    d ell / d omega = y* (P' - ell Q') x / (y* Q x),

where x, y are right and left eigenvectors and P', Q' contain the analytic
omega-derivative of the boundary form (and -2*omega*B for P).  A centered
finite difference at relative step 1e-6 serves as fallback when the left
eigenvector cannot be matched.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .assembly import SPLU_OPTIONS, Assembler, build_mesh
from .errors import ConvergenceError, OutsideDiamondError
from .harmonics import in_diamond
from .structure import SlabStructure

#: accept a polished root as a true guided mode when |Im omega| is below this
#: fraction of |omega|
_IM_ACCEPT = 1e-6
#: Newton step tolerance, relative to max(1, |omega|)
_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 25


@dataclass(frozen=True)
class EigenPoint:
    """Smallest-magnitude pencil eigenvalue at one (kappa, omega)."""

    kappa: complex
    omega: complex
    ell: complex
    vector: np.ndarray
    residual: float


@dataclass
class DispersionTrace:
    """Complex roots omega_root(kappa) near a guided-mode pair.

    samples hold absolute kappa values (kappa0 + offset).  ell1/ell2 are
    filled by the quadratic fit when the trace has enough samples; failures
    lists the kappa offsets where Newton continuation diverged.
    """

    kappa0: float
    omega0: float
    samples: list[tuple[float, complex]]
    ell1: Optional[float] = None
    ell2: Optional[complex] = None
    fit_residual: Optional[float] = None
    failures: tuple[float, ...] = ()


class _PencilSolve(NamedTuple):
    ell: complex
    x: np.ndarray
    residual: float
    lu: object
    P: object
    Q: object


def _seed_vector(n: int) -> np.ndarray:
    # fixed seed: deterministic output files; random direction so symmetry
    # subspaces (e.g. x-antisymmetric modes at kappa=0) are always excited
    rng = np.random.default_rng(12345)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _pencil_smallest(assembler: Assembler, kappa: complex, omega: complex, *,
                     k: int = 3, tol: float = 1e-10, maxiter: int = 200,
                     pencil_beta: float = 1.0) -> _PencilSolve:
    H = assembler.h_matrix(kappa, omega)
    P = (H - omega * omega * assembler.B).tocsc()
    Q = (H + pencil_beta * assembler.B).tocsr()
    n = P.shape[0]
    lu = spla.splu(P, **SPLU_OPTIONS)
    op = spla.LinearOperator((n, n), matvec=lambda v: lu.solve(Q @ v), dtype=complex)
    try:
        nu, vecs = spla.eigs(op, k=k, which="LM", v0=_seed_vector(n), tol=tol,
                             maxiter=maxiter)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"pencil eigensolve did not converge: {exc}") from exc
    i = int(np.argmax(np.abs(nu)))
    ell = 1.0 / nu[i]
    x = vecs[:, i]
    x = x / np.linalg.norm(x)
    residual = float(np.linalg.norm(P @ x - ell * (Q @ x)))
    return _PencilSolve(ell=ell, x=x, residual=residual, lu=lu, P=P, Q=Q)


def _left_eigvec(assembler: Assembler, sol: _PencilSolve, *, k: int = 3,
                 tol: float = 1e-10, maxiter: int = 200):
    """Left eigenvector y with y* P = ell y* Q, via the adjoint operator."""
    n = sol.P.shape[0]
    QH = sol.Q.conj().T.tocsr()
    op = spla.LinearOperator((n, n), matvec=lambda v: sol.lu.solve(QH @ v, trans="H"),
                             dtype=complex)
    nu, vecs = spla.eigs(op, k=k, which="LM", v0=_seed_vector(n), tol=tol,
                         maxiter=maxiter)
    lams = 1.0 / np.conj(nu)
    j = int(np.argmin(np.abs(lams - sol.ell)))
    if abs(lams[j] - sol.ell) > 1e-6 * max(abs(sol.ell), 1e-12):
        return None
    y = vecs[:, j]
    return y / np.linalg.norm(y)


def smallest_eigenpair(s: SlabStructure, kappa: complex, omega: complex,
                       nx: int = 128, nz: int = 128, *, maxiter: int = 200,
                       assembler: Optional[Assembler] = None,
                       pencil_beta: float = 1.0) -> EigenPoint:
    """Generalized eigenvalue of (H - omega^2 B, H + B) of smallest magnitude.

    Shift-invert iteration at shift 0 using the sparse factorization of the
    scattering matrix; raises ConvergenceError after maxiter iterations.
    """
    if assembler is None:
        assembler = Assembler(s, build_mesh(s, nx, nz))
    sol = _pencil_smallest(assembler, kappa, omega, maxiter=maxiter,
                           pencil_beta=pencil_beta)
    return EigenPoint(kappa=kappa, omega=omega, ell=sol.ell, vector=sol.x,
                      residual=sol.residual)


def _dell_domega(assembler: Assembler, kappa: complex, omega: complex,
                 sol: _PencilSolve, *, pencil_beta: float = 1.0) -> complex:
    y = _left_eigvec(assembler, sol)
    if y is not None:
        dH = assembler.dtn_matrix_domega(kappa, omega)
        dP = dH - 2.0 * omega * assembler.B
        dQ = dH
        denom = np.vdot(y, sol.Q @ sol.x)
        if abs(denom) > 0:
            num = np.vdot(y, dP @ sol.x) - sol.ell * np.vdot(y, dQ @ sol.x)
            return num / denom
    # finite-difference fallback
    h = 1e-6 * max(abs(omega), 1.0)
    lp = _pencil_smallest(assembler, kappa, omega + h, pencil_beta=pencil_beta).ell
    lm = _pencil_smallest(assembler, kappa, omega - h, pencil_beta=pencil_beta).ell
    return (lp - lm) / (2.0 * h)


class _NewtonResult(NamedTuple):
    omega: complex
    ell: complex
    residual: float
    iterations: int
    converged: bool


def _newton_root(assembler: Assembler, kappa: complex, omega_start: complex, *,
                 maxit: int = _NEWTON_MAXIT, tol: float = _NEWTON_TOL,
                 pencil_beta: float = 1.0) -> _NewtonResult:
    om = complex(omega_start)
    sol = None
    for it in range(1, maxit + 1):
        sol = _pencil_smallest(assembler, kappa, om, pencil_beta=pencil_beta)
        dl = _dell_domega(assembler, kappa, om, sol, pencil_beta=pencil_beta)
        if dl == 0 or not np.isfinite(dl):
            return _NewtonResult(om, sol.ell, sol.residual, it, False)
        step = sol.ell / dl
        om = om - step
        if not np.isfinite(om) or om.real <= 0:
            return _NewtonResult(om, sol.ell, sol.residual, it, False)
        if abs(step) <= tol * max(1.0, abs(om)):
            sol = _pencil_smallest(assembler, kappa, om, pencil_beta=pencil_beta)
            return _NewtonResult(om, sol.ell, sol.residual, it, True)
    return _NewtonResult(om, sol.ell, sol.residual, maxit, False)


def find_guided_modes(s: SlabStructure, kappa0: float, omega_window: tuple[float, float],
                      nx: int = 128, nz: int = 128, *, coarse: int = 200,
                      assembler: Optional[Assembler] = None,
                      pencil_beta: float = 1.0) -> list[tuple[float, float]]:
    """Locate real guided-mode frequencies in a window at fixed kappa0.

    Scans |ell| on a coarse omega grid, polishes each local minimum by complex
    Newton, and accepts roots whose imaginary part is negligible
    (|Im omega| <= 1e-6 |omega|).  Returns (omega0, residual) pairs sorted by
    frequency; empty list when the window holds no modes.
    """
    lo, hi = float(omega_window[0]), float(omega_window[1])
    if not (in_diamond(kappa0, lo, s.ambient) and in_diamond(kappa0, hi, s.ambient)):
        raise OutsideDiamondError(
            f"omega window ({lo}, {hi}) not inside the diamond at kappa={kappa0}"
        )
    if assembler is None:
        assembler = Assembler(s, build_mesh(s, nx, nz))
    omegas = np.linspace(lo, hi, coarse)
    magnitudes = np.empty(coarse)
    for i, om in enumerate(omegas):
        magnitudes[i] = abs(_pencil_smallest(assembler, kappa0, om, k=2, tol=1e-8,
                                             pencil_beta=pencil_beta).ell)
    floor = float(np.median(magnitudes))
    minima = [i for i in range(1, coarse - 1)
              if magnitudes[i] < magnitudes[i - 1] and magnitudes[i] < magnitudes[i + 1]]

    width = hi - lo
    accepted: list[tuple[float, float]] = []
    for i in minima:
        res = _newton_root(assembler, kappa0, omegas[i], pencil_beta=pencil_beta)
        if not res.converged:
            continue
        om = res.omega
        if abs(om.imag) > _IM_ACCEPT * abs(om):
            continue
        if not (lo - 0.05 * width <= om.real <= hi + 0.05 * width):
            continue
        if abs(res.ell) > 1e-6 * max(floor, 1e-12):
            continue
        if any(abs(om.real - prev) <= 1e-9 * max(1.0, abs(prev)) for prev, _ in accepted):
            continue
        accepted.append((float(om.real), res.residual))
    accepted.sort(key=lambda t: t[0])
    return accepted


def trace_dispersion(s: SlabStructure, kappa0: float, omega0: float,
                     kappa_offsets: Sequence[float], nx: int = 128, nz: int = 128, *,
                     assembler: Optional[Assembler] = None,
                     pencil_beta: float = 1.0) -> DispersionTrace:
    """Continue the complex root omega_root(kappa) away from (kappa0, omega0).

    Offsets are processed outward from zero on each side, each Newton solve
    warm-started from the previous root.  Diverged offsets are recorded in
    failures and omitted from the samples.
    """
    if assembler is None:
        assembler = Assembler(s, build_mesh(s, nx, nz))
    offsets = [float(k) for k in kappa_offsets]
    plus = sorted([k for k in offsets if k > 0])
    minus = sorted([k for k in offsets if k < 0], key=abs)
    zeros = [k for k in offsets if k == 0.0]

    samples: list[tuple[float, complex]] = []
    failures: list[float] = []

    for kt in zeros:
        res = _newton_root(assembler, kappa0, omega0, pencil_beta=pencil_beta)
        if res.converged:
            samples.append((kappa0 + kt, res.omega))
        else:
            failures.append(kt)

    for side in (plus, minus):
        warm = complex(omega0)
        for kt in side:
            res = _newton_root(assembler, kappa0 + kt, warm, pencil_beta=pencil_beta)
            if res.converged:
                samples.append((kappa0 + kt, res.omega))
                warm = res.omega
            else:
                failures.append(kt)

    samples.sort(key=lambda t: t[0])
    trace = DispersionTrace(kappa0=kappa0, omega0=omega0, samples=samples,
                            failures=tuple(failures))
    nonzero = [k for k, _ in samples if k != kappa0]
    if len(nonzero) >= 4:
        fit = dispersion_coefficients(trace)
        trace.ell1, trace.ell2, trace.fit_residual = fit.ell1, fit.ell2, fit.residual
    return trace


class DispersionFit(NamedTuple):
    ell1: float
    ell2: complex
    residual: float


def dispersion_coefficients(trace: DispersionTrace) -> DispersionFit:
    """Least-squares fit omega_root(kappa0 + kt) = omega0 - ell1*kt - ell2*kt^2.

    ell1 is projected onto the real axis (it is real by theory).  Requires at
    least four offsets; raises ValueError on an underdetermined trace.
    """
    kts = np.array([k for k, _ in trace.samples]) - trace.kappa0
    oms = np.array([om for _, om in trace.samples])
    if np.count_nonzero(kts != 0.0) < 4:
        raise ValueError("underdetermined trace: need >= 4 nonzero kappa offsets")
    A = np.stack([-kts, -kts**2], axis=1)
    rhs = oms - trace.omega0
    coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    ell1 = float(np.real(coef[0]))
    ell2 = complex(coef[1])
    residual = float(np.linalg.norm(A @ np.array([ell1, ell2]) - rhs))
    return DispersionFit(ell1=ell1, ell2=ell2, residual=residual)
