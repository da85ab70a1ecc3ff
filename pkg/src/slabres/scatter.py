"""Plane-wave scattering solves, R/T extraction and transmittance sweeps.

R and T are read off the zeroth discrete Fourier coefficient of the boundary
traces, the same truncated-Fourier machinery the DtN form uses; this is what
ties the extracted coefficients to the exact discrete energy identity
|R|^2 + |T|^2 = 1.  Extracting by pointwise sampling would break it.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import SPLU_OPTIONS, Assembler, build_mesh
from .errors import ConfigError, OutsideDiamondError, SingularSolveError
from .harmonics import branch_sqrt, in_diamond
from .structure import SlabStructure, check_symmetries

#: relative residual above which the direct solve is declared near-singular
#: and redone in a regularized least-squares sense
_RESIDUAL_SWITCH = 1e-6
#: normal-equation shift, relative to max |H| entry
_LSQ_SHIFT = 1e-12


@dataclass(frozen=True)
class ScatteringSolution:
    """Field and far-field scalars of one scattering solve."""

    kappa: float
    omega: float
    side: str
    R: complex
    T: complex
    field: np.ndarray
    energy_defect: float
    least_squares: bool = False

    @property
    def transmittance(self) -> float:
        return abs(self.T) ** 2


@dataclass(frozen=True)
class SweepRow:
    kappa: float
    omega: float
    R: complex
    T: complex
    transmittance: float
    energy_defect: float


@dataclass(frozen=True)
class SweepTable:
    """Rows sorted by (kappa, omega), independent of execution schedule."""

    rows: tuple[SweepRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)


def _solve_system(assembler: Assembler, kappa: float, omega: float, side: str):
    H = assembler.h_matrix(kappa, omega)
    P = (H - omega**2 * assembler.B).tocsc()
    p = assembler.source(kappa, omega, side, check_diamond=False)
    least_squares = False
    try:
        lu = spla.splu(P, **SPLU_OPTIONS)
        x = lu.solve(p)
        bad = not np.all(np.isfinite(x))
        if not bad:
            resid = np.linalg.norm(P @ x - p) / max(np.linalg.norm(p), 1e-300)
            bad = resid > _RESIDUAL_SWITCH
    except RuntimeError:
        bad = True
    if bad:
        # regularized normal equations; the far field is unique even when the
        # solution set is affine, so the least-squares representative is valid
        shift = _LSQ_SHIFT * abs(H).max()
        PH = P.conj().T.tocsc()
        A = (PH @ P + shift * sp.identity(P.shape[0], dtype=complex, format="csc")).tocsc()
        lu = spla.splu(A, **SPLU_OPTIONS)
        x = lu.solve(PH @ p)
        least_squares = True
    return x, least_squares


def _extract(assembler: Assembler, x: np.ndarray, kappa: float, omega: float, side: str):
    mesh = assembler.mesh
    epsmu = assembler.ambient.eps * assembler.ambient.mu
    eta0 = branch_sqrt(epsmu * omega**2 - kappa**2)
    phase = np.exp(-1j * eta0 * mesh.L)
    u0_bot = x[mesh.bottom_nodes].mean()
    u0_top = x[mesh.top_nodes].mean()
    if side == "left":
        T = u0_top * phase
        R = (u0_bot - phase) * phase
    else:
        T = u0_bot * phase
        R = (u0_top - phase) * phase
    return R, T


def solve_scattering(s: SlabStructure, kappa: float, omega: float, side: str = "left",
                     nx: int = 128, nz: int = 128, *, allow_outside: bool = False,
                     assembler: Optional[Assembler] = None) -> ScatteringSolution:
    """Solve one plane-wave scattering problem.

    Args:
        s: slab structure.
        kappa, omega: real Bloch wavenumber and frequency, inside the diamond
            unless allow_outside is set.
        side: incidence side, 'left' (from z = -inf) or 'right'.
        nx, nz: mesh resolution (ignored when an assembler is supplied).
        assembler: optional prebuilt Assembler to reuse cached matrices.

    Returns:
        ScatteringSolution with complex R, T, the nodal field and the energy
        defect | |R|^2 + |T|^2 - 1 |.
    """
    if assembler is None:
        assembler = Assembler(s, build_mesh(s, nx, nz))
    if not allow_outside and not in_diamond(kappa, omega, assembler.ambient):
        raise OutsideDiamondError(
            f"(kappa, omega) = ({kappa}, {omega}) outside the diamond; "
            "pass allow_outside=True to override"
        )
    x, least_squares = _solve_system(assembler, kappa, omega, side)
    if not np.all(np.isfinite(x)):
        raise SingularSolveError(f"singular solve at (kappa, omega) = ({kappa}, {omega})")
    R, T = _extract(assembler, x, kappa, omega, side)
    defect = abs(abs(R) ** 2 + abs(T) ** 2 - 1.0)
    return ScatteringSolution(kappa=kappa, omega=omega, side=side, R=R, T=T,
                              field=x, energy_defect=defect, least_squares=least_squares)


def reduced_smatrix(s: SlabStructure, kappa: float, omega: float,
                    nx: int = 128, nz: int = 128, *,
                    assembler: Optional[Assembler] = None) -> np.ndarray:
    """2x2 reduced scattering matrix [[T, R], [R, T]] from one left-incidence solve.

    Requires a z-symmetric structure; otherwise the matrix does not have this
    form and an error is raised.
    """
    if not check_symmetries(s).z_symmetric:
        raise ConfigError("reduced_smatrix requires a z-symmetric structure")
    sol = solve_scattering(s, kappa, omega, "left", nx, nz, assembler=assembler)
    return np.array([[sol.T, sol.R], [sol.R, sol.T]], dtype=complex)


def transmittance_sweep(s: SlabStructure, kappa_list: Sequence[float],
                        omega_grid: Sequence[float], nx: int = 128, nz: int = 128,
                        *, allow_outside: bool = False, threads: int = 1) -> SweepTable:
    """Scattering scalars over a (kappa, omega) grid.

    Grid points are independent tasks; rows are gathered and sorted by
    (kappa, omega) so the table does not depend on the execution schedule.
    """
    kappas = [float(k) for k in kappa_list]
    omegas = [float(w) for w in omega_grid]
    if not allow_outside:
        for k in kappas:
            for w in omegas:
                if not in_diamond(k, w, s.ambient):
                    raise OutsideDiamondError(
                        f"sweep point (kappa, omega) = ({k}, {w}) outside the diamond"
                    )
    mesh = build_mesh(s, nx, nz)
    assemblers = {k: Assembler(s, mesh) for k in kappas} if threads > 1 else None
    shared = Assembler(s, mesh) if threads <= 1 else None

    def task(point):
        k, w = point
        asm = assemblers[k] if assemblers is not None else shared
        sol = solve_scattering(s, k, w, "left", allow_outside=allow_outside, assembler=asm)
        return SweepRow(kappa=k, omega=w, R=sol.R, T=sol.T,
                        transmittance=sol.transmittance, energy_defect=sol.energy_defect)

    points = [(k, w) for k in kappas for w in omegas]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(task, points))
    else:
        rows = [task(pt) for pt in points]
    rows.sort(key=lambda r: (r.kappa, r.omega))
    return SweepTable(rows=tuple(rows))


SWEEP_CSV_HEADER = "kappa,omega,re_R,im_R,re_T,im_T,transmittance,energy_defect"


def format_sweep_csv(table: SweepTable, *, comment: Optional[str] = None,
                     kappa_name: str = "kappa", omega_name: str = "omega") -> str:
    """Render a sweep table in the canonical CSV form (17 significant digits)."""
    lines = []
    if comment:
        lines.append(f"# {comment}")
    header = SWEEP_CSV_HEADER
    if kappa_name != "kappa" or omega_name != "omega":
        header = header.replace("kappa", kappa_name).replace("omega", omega_name)
    lines.append(header)
    f = lambda v: "%.17g" % v
    for r in table.rows:
        lines.append(",".join([
            f(r.kappa), f(r.omega),
            f(r.R.real), f(r.R.imag), f(r.T.real), f(r.T.imag),
            f(r.transmittance), f(r.energy_defect),
        ]))
    return "\n".join(lines) + "\n"


class TransmittanceMap:
    """Callable |T|^2(kappa, omega) with the assembler cached across calls.

    Used by the extremum locator and the curve tracer, which evaluate many
    frequencies at a fixed kappa.
    """

    def __init__(self, s: SlabStructure, nx: int = 128, nz: int = 128):
        self.structure = s
        self.assembler = Assembler(s, build_mesh(s, nx, nz))
        self.calls = 0

    def __call__(self, kappa: float, omega: float) -> float:
        self.calls += 1
        sol = solve_scattering(self.structure, kappa, omega, "left",
                               assembler=self.assembler)
        return sol.transmittance
