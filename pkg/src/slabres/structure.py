"""Periodic slab material layout.

A structure is an ambient medium filling the plane plus a list of piecewise
constant inclusions (disks and rectangles) confined to the strip |z| <= L.
Everything is 2*pi-periodic in x; the period is fixed because the whole
diffraction-order bookkeeping (integer orders m, Brillouin zone [-1/2, 1/2))
assumes it.  Inclusions later in the list override earlier ones.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError

PERIOD = 2.0 * math.pi


@dataclass(frozen=True)
class Medium:
    """Isotropic lossless material: relative permittivity and permeability."""

    eps: float
    mu: float

    def __post_init__(self):
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ConfigError(f"nonpositive permittivity: eps={self.eps}")
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ConfigError(f"nonpositive permeability: mu={self.mu}")


@dataclass(frozen=True)
class Disk:
    """Circular inclusion. center=(x, z); containment wraps in x."""

    center: tuple[float, float]
    radius: float
    material: Medium

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ConfigError(f"nonpositive extent: disk radius {self.radius}")

    def z_extent(self) -> tuple[float, float]:
        cz = self.center[1]
        return (cz - self.radius, cz + self.radius)

    def contains(self, x, z):
        dx = np.mod(np.asarray(x) - self.center[0] + math.pi, PERIOD) - math.pi
        dz = np.asarray(z) - self.center[1]
        return dx * dx + dz * dz <= self.radius * self.radius


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangular inclusion between corner_min and corner_max."""

    corner_min: tuple[float, float]
    corner_max: tuple[float, float]
    material: Medium

    def __post_init__(self):
        wx = self.corner_max[0] - self.corner_min[0]
        wz = self.corner_max[1] - self.corner_min[1]
        if not (wx > 0.0 and wz > 0.0):
            raise ConfigError(f"nonpositive extent: rectangle {wx} x {wz}")
        if wx > PERIOD:
            raise ConfigError("rectangle wider than one period")

    def z_extent(self) -> tuple[float, float]:
        return (self.corner_min[1], self.corner_max[1])

    def contains(self, x, z):
        width = self.corner_max[0] - self.corner_min[0]
        dx = np.mod(np.asarray(x) - self.corner_min[0], PERIOD)
        z = np.asarray(z)
        in_x = dx <= width
        in_z = (z >= self.corner_min[1]) & (z <= self.corner_max[1])
        return in_x & in_z


Inclusion = Union[Disk, Rectangle]


@dataclass(frozen=True)
class SlabStructure:
    """Periodic material layout; immutable, safe to share across workers.

    Attributes:
        L: half-height of the strip containing all inclusions.
        ambient: medium outside the strip (and between inclusions).
        inclusions: ordered tuple; later entries override earlier ones.
        period: always 2*pi; other values are rejected.
    """

    L: float
    ambient: Medium
    inclusions: tuple[Inclusion, ...] = ()
    period: float = PERIOD

    def __post_init__(self):
        if self.period != PERIOD:
            raise ConfigError(f"period must be 2*pi exactly, got {self.period!r}")
        if not (self.L > 0.0 and math.isfinite(self.L)):
            raise ConfigError(f"strip half-height must be positive, got {self.L}")
        object.__setattr__(self, "inclusions", tuple(self.inclusions))
        for inc in self.inclusions:
            lo, hi = inc.z_extent()
            if lo < -self.L or hi > self.L:
                raise ConfigError(
                    f"inclusion extends outside the strip |z| <= {self.L}: z in [{lo}, {hi}]"
                )


def load_config(text: str) -> SlabStructure:
    """Parse a JSON structure document into a validated SlabStructure.

    Schema::

        {"period": 6.283185307179586, "L": <real>,
         "ambient": {"eps": e, "mu": m},
         "inclusions": [
            {"shape": "disk", "center": [x, z], "radius": r, "eps": e, "mu": m},
            {"shape": "rectangle", "min": [x0, z0], "max": [x1, z1], "eps": e, "mu": m}
         ]}

    Raises ConfigError on malformed documents or violated invariants.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed structure document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("structure document must be a JSON object")
    try:
        period = float(doc["period"])
        L = float(doc["L"])
        amb = doc["ambient"]
        ambient = Medium(float(amb["eps"]), float(amb["mu"]))
        inclusions = []
        for entry in doc.get("inclusions", []):
            mat = Medium(float(entry["eps"]), float(entry.get("mu", 1.0)))
            shape = entry["shape"]
            if shape == "disk":
                cx, cz = entry["center"]
                inclusions.append(Disk((float(cx), float(cz)), float(entry["radius"]), mat))
            elif shape == "rectangle":
                x0, z0 = entry["min"]
                x1, z1 = entry["max"]
                inclusions.append(
                    Rectangle((float(x0), float(z0)), (float(x1), float(z1)), mat)
                )
            else:
                raise ConfigError(f"unknown inclusion shape: {shape!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed structure document: {exc}") from exc
    return SlabStructure(L=L, ambient=ambient, inclusions=tuple(inclusions), period=period)


def structure_to_config(s: SlabStructure) -> str:
    """Serialize a SlabStructure back to its JSON document form."""
    entries = []
    for inc in s.inclusions:
        if isinstance(inc, Disk):
            entries.append(
                {"shape": "disk", "center": list(inc.center), "radius": inc.radius,
                 "eps": inc.material.eps, "mu": inc.material.mu}
            )
        else:
            entries.append(
                {"shape": "rectangle", "min": list(inc.corner_min), "max": list(inc.corner_max),
                 "eps": inc.material.eps, "mu": inc.material.mu}
            )
    doc = {
        "period": s.period,
        "L": s.L,
        "ambient": {"eps": s.ambient.eps, "mu": s.ambient.mu},
        "inclusions": entries,
    }
    return json.dumps(doc, indent=2)


def material_at(s: SlabStructure, x: float, z: float) -> Medium:
    """Material at a point; x is reduced modulo the period, last inclusion wins."""
    if abs(z) > s.L:
        return s.ambient
    for inc in reversed(s.inclusions):
        if bool(inc.contains(x, z)):
            return inc.material
    return s.ambient


def sample_materials(s: SlabStructure, x, z):
    """Vectorized material sampling.

    Args:
        x, z: broadcastable coordinate arrays.

    Returns:
        (eps, mu) arrays of the broadcast shape.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    x, z = np.broadcast_arrays(x, z)
    eps = np.full(x.shape, s.ambient.eps)
    mu = np.full(x.shape, s.ambient.mu)
    for inc in s.inclusions:
        mask = inc.contains(x, z)
        eps[mask] = inc.material.eps
        mu[mask] = inc.material.mu
    return eps, mu


@dataclass(frozen=True)
class SymmetryReport:
    z_symmetric: bool
    x_symmetric: bool


_SYMMETRY_SAMPLES = 256


def check_symmetries(s: SlabStructure) -> SymmetryReport:
    """Detect mirror symmetries by sampling on a 256x256 lattice over one period.

    Cell-center sampling keeps the lattice invariant under both reflections, so
    exact comparison of the piecewise-constant material values suffices.
    """
    n = _SYMMETRY_SAMPLES
    xs = -math.pi + (np.arange(n) + 0.5) * (PERIOD / n)
    zs = -s.L + (np.arange(n) + 0.5) * (2.0 * s.L / n)
    X, Z = np.meshgrid(xs, zs, indexing="ij")
    eps, mu = sample_materials(s, X, Z)
    eps_zr, mu_zr = sample_materials(s, X, -Z)
    eps_xr, mu_xr = sample_materials(s, -X, Z)
    z_sym = bool(np.array_equal(eps, eps_zr) and np.array_equal(mu, mu_zr))
    x_sym = bool(np.array_equal(eps, eps_xr) and np.array_equal(mu, mu_xr))
    return SymmetryReport(z_symmetric=z_sym, x_symmetric=x_sym)
