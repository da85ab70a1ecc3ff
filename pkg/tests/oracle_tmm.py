"""Independent 1D transfer-matrix oracle for a homogeneous dielectric layer.

Used to validate the 2D solver on x-invariant structures.  Deliberately
implemented from the classic interface/propagation matrices, sharing no code
with the solver under test.
"""
import numpy as np


def layer_rt(omega: float, kappa: float, eps_layer: float, half_thickness: float,
             eps_ambient: float = 1.0, mu: float = 1.0):
    """Reflection/transmission of a layer |z| <= half_thickness.

    Fields u(z) with continuity of u and u'/mu; incident exp(i k0 z) from
    below.  Returns (R, T) for the transmitted wave T exp(i k0 z).
    """
    d = 2.0 * half_thickness
    k0 = np.sqrt(eps_ambient * mu * omega**2 - kappa**2 + 0j)
    k1 = np.sqrt(eps_layer * mu * omega**2 - kappa**2 + 0j)
    # state vector (u, u'/mu) propagated across the layer
    c, s = np.cos(k1 * d), np.sin(k1 * d)
    M = np.array([[c, mu * s / k1], [-k1 * s / mu, c]], dtype=complex)
    z_lo, z_hi = -half_thickness, half_thickness
    e_in = np.exp(1j * k0 * z_lo)
    e_re = np.exp(-1j * k0 * z_lo)
    e_tr = np.exp(1j * k0 * z_hi)
    ik = 1j * k0 / mu
    # state(z_hi) = M @ state(z_lo) with state(z_lo) = (e_in + R e_re, ik (e_in - R e_re))
    lhs = np.array([
        [-(M[0, 0] * e_re - M[0, 1] * ik * e_re), e_tr],
        [-(M[1, 0] * e_re - M[1, 1] * ik * e_re), ik * e_tr],
    ], dtype=complex)
    rhs = np.array([
        M[0, 0] * e_in + M[0, 1] * ik * e_in,
        M[1, 0] * e_in + M[1, 1] * ik * e_in,
    ], dtype=complex)
    R, T = np.linalg.solve(lhs, rhs)
    return complex(R), complex(T)
