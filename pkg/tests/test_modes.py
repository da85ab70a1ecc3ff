import numpy as np
import pytest
import scipy.sparse.linalg as spla

from slabres import (Assembler, OutsideDiamondError, build_mesh,
                     dispersion_coefficients, find_guided_modes, smallest_eigenpair,
                     solve_scattering, trace_dispersion)
from slabres.assembly import SPLU_OPTIONS
from slabres.modes import DispersionTrace, _dell_domega, _pencil_smallest


def test_eigenpair_residual_contract(rod):
    ep = smallest_eigenpair(rod, 0.0, 0.52, 64, 64)
    assert ep.residual <= 1e-8
    assert abs(np.linalg.norm(ep.vector) - 1.0) <= 1e-12


def test_rod_mode_found_and_deep(rod, rod_mode_64):
    omega0, residual = rod_mode_64
    assert residual <= 1e-8
    assert omega0 == pytest.approx(0.5039, rel=0.02)
    ep_root = smallest_eigenpair(rod, 0.0, omega0, 64, 64)
    ep_off = smallest_eigenpair(rod, 0.0, omega0 + 0.03, 64, 64)
    # the pencil eigenvalue collapses by orders of magnitude at the mode
    assert abs(ep_root.ell) <= 1e-3 * abs(ep_off.ell)
    assert abs(ep_off.ell) >= 0.01


def test_homogeneous_has_no_modes(homogeneous):
    assert find_guided_modes(homogeneous, 0.0, (0.3, 0.7), 32, 32, coarse=25) == []


def test_window_must_lie_in_diamond(rod):
    with pytest.raises(OutsideDiamondError):
        find_guided_modes(rod, 0.0, (0.5, 1.2), 32, 32)


def test_root_invariant_under_pencil_scaling(rod, rod_mode_64):
    # only the zero set of the pencil is structure-meaningful: replacing
    # Q = H + B by H + 2B must not move the root
    omega0, _ = rod_mode_64
    modes2 = find_guided_modes(rod, 0.0, (omega0 - 0.01, omega0 + 0.01), 64, 64,
                               coarse=15, pencil_beta=2.0)
    assert len(modes2) == 1
    assert abs(modes2[0][0] - omega0) <= 1e-10 * omega0
    ep1 = smallest_eigenpair(rod, 0.0, omega0, 64, 64)
    ep2 = smallest_eigenpair(rod, 0.0, omega0, 64, 64, pencil_beta=2.0)
    assert abs(ep1.ell) <= 1e-8 and abs(ep2.ell) <= 1e-8


def test_newton_derivative_matches_finite_difference(rod):
    asm = Assembler(rod, build_mesh(rod, 32, 32))
    kappa, omega = 0.02, 0.52
    sol = _pencil_smallest(asm, kappa, omega)
    dl = _dell_domega(asm, kappa, omega, sol)
    h = 1e-6
    fd = (_pencil_smallest(asm, kappa, omega + h).ell
          - _pencil_smallest(asm, kappa, omega - h).ell) / (2 * h)
    assert abs(dl - fd) <= 1e-5 * abs(fd)


def test_trace_dispersion_properties(rod, rod_mode_64):
    omega0, _ = rod_mode_64
    trace = trace_dispersion(rod, 0.0, omega0, [0.0, 0.01, 0.02, -0.01, -0.02], 64, 64)
    assert not trace.failures
    samples = dict(trace.samples)
    assert len(samples) == 5
    # anchor point reproduces the mode frequency
    assert samples[0.0] == pytest.approx(omega0, abs=1e-9)
    for kt, om in samples.items():
        assert om.imag <= 1e-8
        if kt != 0.0:
            assert om.imag < 0.0  # radiating resonance away from kappa0
    # x-symmetric structure: complex root is even in the offset
    assert abs(samples[0.01] - samples[-0.01]) <= 1e-9
    assert abs(samples[0.02] - samples[-0.02]) <= 1e-9
    assert trace.ell1 is not None
    assert abs(trace.ell1) <= 1e-4
    assert trace.ell2.imag > 0.0


def test_dispersion_fit_roundtrip():
    ell1, ell2 = 0.9, 0.1 + 0.48j
    omega0 = 0.6
    kts = [-0.02, -0.01, 0.01, 0.02]
    samples = [(kt, omega0 - ell1 * kt - ell2 * kt * kt) for kt in kts]
    trace = DispersionTrace(kappa0=0.0, omega0=omega0, samples=samples)
    fit = dispersion_coefficients(trace)
    assert fit.ell1 == pytest.approx(0.9, abs=1e-10)
    assert fit.ell2 == pytest.approx(0.1 + 0.48j, abs=1e-10)
    assert fit.residual <= 1e-12


def test_dispersion_fit_underdetermined():
    trace = DispersionTrace(kappa0=0.0, omega0=0.6,
                            samples=[(0.01, 0.6 + 0j), (-0.01, 0.6 + 0j)])
    with pytest.raises(ValueError, match="underdetermined"):
        dispersion_coefficients(trace)


def test_scattering_well_conditioned_off_resonance(rod):
    # where |ell| stays away from zero the factorization is healthy
    asm = Assembler(rod, build_mesh(rod, 32, 32))
    checked = 0
    for kappa, omega in ((0.1, 0.85), (0.2, 0.607), (0.3, 0.607)):
        sol = _pencil_smallest(asm, kappa, omega)
        if abs(sol.ell) < 0.1:
            continue
        n = asm.mesh.n_nodes
        P = (asm.h_matrix(kappa, omega) - omega**2 * asm.B).tocsc()
        lu = spla.splu(P, **SPLU_OPTIONS)
        inv_norm = spla.onenormest(
            spla.LinearOperator((n, n), matvec=lu.solve,
                                rmatvec=lambda v: lu.solve(v, trans="T"),
                                dtype=complex))
        p_norm = spla.onenormest(P)
        assert inv_norm * p_norm < 1e12
        solve_scattering(rod, kappa, omega, "left", 32, 32)
        checked += 1
    assert checked >= 2
