import json

import pytest

from slabres import (Assembler, Disk, Medium, Rectangle, SlabStructure, build_mesh,
                     find_guided_modes, trace_dispersion)
from slabres.fitter import anomaly_report

ROD_CONFIG = {
    "period": 6.283185307179586,
    "L": 2.0,
    "ambient": {"eps": 1.0, "mu": 1.0},
    "inclusions": [
        {"shape": "disk", "center": [0.0, 0.0], "radius": 1.5707963267948966,
         "eps": 10.0, "mu": 1.0}
    ],
}


@pytest.fixture(scope="session")
def rod_config_text():
    return json.dumps(ROD_CONFIG)


@pytest.fixture(scope="session")
def rod():
    """Single dielectric rod of radius pi/2, eps=10, in vacuum."""
    return SlabStructure(
        L=2.0, ambient=Medium(1.0, 1.0),
        inclusions=(Disk((0.0, 0.0), 1.5707963267948966, Medium(10.0, 1.0)),))


@pytest.fixture(scope="session")
def layer():
    """Uniform layer eps=4 for |z| <= 1 inside vacuum (aligned interfaces)."""
    import math

    return SlabStructure(
        L=2.0, ambient=Medium(1.0, 1.0),
        inclusions=(Rectangle((-math.pi, -1.0), (math.pi, 1.0), Medium(4.0, 1.0)),))


@pytest.fixture(scope="session")
def homogeneous():
    return SlabStructure(L=2.0, ambient=Medium(1.0, 1.0))


@pytest.fixture(scope="session")
def rod_mode_64(rod):
    """First rod mode at the 64x64 working resolution used by module tests."""
    modes = find_guided_modes(rod, 0.0, (0.48, 0.54), 64, 64, coarse=40)
    assert modes, "64x64 mode location failed"
    return modes[0]


# ---------------------------------------------------------------------------
# expensive shared results (session scope; production 128x128 resolution)

@pytest.fixture(scope="session")
def rod_asm_128(rod):
    return Assembler(rod, build_mesh(rod, 128, 128))


@pytest.fixture(scope="session")
def rod_modes_128(rod, rod_asm_128):
    """Guided modes of the rod at kappa0 = 0 in the window (0.45, 0.8)."""
    return find_guided_modes(rod, 0.0, (0.45, 0.8), assembler=rod_asm_128)


@pytest.fixture(scope="session")
def rod_trace_128(rod, rod_modes_128, rod_asm_128):
    omega0 = rod_modes_128[0][0]
    return trace_dispersion(rod, 0.0, omega0, [0.01, 0.02, -0.01, -0.02],
                            assembler=rod_asm_128)


@pytest.fixture(scope="session")
def rod_report_128(rod, rod_trace_128):
    """Extrema + fit at kappa offsets {0.01, 0.015, 0.02, 0.03} (no curve tracing)."""
    trace = rod_trace_128
    return anomaly_report(rod, 0.0, trace.omega0, [0.01, 0.015, 0.02, 0.03],
                          nx=128, nz=128, trace_curves=False,
                          dispersion=(trace.ell1, trace.ell2))
