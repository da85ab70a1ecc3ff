import json
import math

import numpy as np
import pytest

from slabres import (ConfigError, Disk, Medium, Rectangle, SlabStructure,
                     check_symmetries, load_config, material_at)
from slabres.structure import sample_materials


def test_load_rod_config(rod_config_text):
    s = load_config(rod_config_text)
    assert s.period == 2.0 * math.pi
    assert s.L == 2.0
    assert s.ambient == Medium(1.0, 1.0)
    assert len(s.inclusions) == 1
    assert isinstance(s.inclusions[0], Disk)
    assert s.inclusions[0].material.eps == 10.0


def test_empty_inclusions_is_homogeneous():
    s = SlabStructure(L=1.0, ambient=Medium(2.0, 1.5))
    for x, z in [(0.0, 0.0), (3.0, 0.7), (-2.0, -5.0)]:
        assert material_at(s, x, z) == Medium(2.0, 1.5)


def test_zero_radius_rejected():
    with pytest.raises(ConfigError, match="nonpositive extent"):
        Disk((0.0, 0.0), 0.0, Medium(1.0, 1.0))


def test_bad_period_rejected(rod_config_text):
    doc = json.loads(rod_config_text)
    doc["period"] = 6.28
    with pytest.raises(ConfigError, match="period"):
        load_config(json.dumps(doc))


def test_inclusion_outside_strip_rejected():
    with pytest.raises(ConfigError, match="strip"):
        SlabStructure(L=1.0, ambient=Medium(1.0, 1.0),
                      inclusions=(Disk((0.0, 0.5), 0.8, Medium(2.0, 1.0)),))


def test_nonpositive_material_rejected():
    with pytest.raises(ConfigError, match="permittivity"):
        Medium(-1.0, 1.0)
    with pytest.raises(ConfigError, match="permeability"):
        Medium(1.0, 0.0)


def test_malformed_document():
    with pytest.raises(ConfigError, match="malformed"):
        load_config("{not json")
    with pytest.raises(ConfigError):
        load_config(json.dumps({"period": 6.283185307179586}))


def test_material_probes(rod):
    assert material_at(rod, 0.0, 0.0).eps == 10.0
    assert material_at(rod, 0.0, 1.9).eps == 1.0          # outside r = pi/2
    assert material_at(rod, 2.0 * math.pi, 0.0).eps == 10.0   # periodic wrap
    assert material_at(rod, 0.0, 2.5).eps == 1.0          # beyond the strip


def test_periodicity_random_points(rod):
    rng = np.random.default_rng(7)
    for _ in range(200):
        x = rng.uniform(-10.0, 10.0)
        z = rng.uniform(-2.5, 2.5)
        n = rng.integers(-3, 4)
        assert material_at(rod, x, z) == material_at(rod, x + 2.0 * math.pi * n, z)


def test_ambient_beyond_strip_everywhere(rod):
    rng = np.random.default_rng(8)
    xs = rng.uniform(-7, 7, 100)
    zs = np.where(rng.random(100) < 0.5, 1, -1) * rng.uniform(2.0001, 9, 100)
    eps, mu = sample_materials(rod, xs, zs)
    assert np.all(eps == 1.0) and np.all(mu == 1.0)


def test_last_inclusion_wins():
    inner = Disk((0.0, 0.0), 0.5, Medium(3.0, 1.0))
    outer = Disk((0.0, 0.0), 1.0, Medium(5.0, 1.0))
    s = SlabStructure(L=2.0, ambient=Medium(1.0, 1.0), inclusions=(outer, inner))
    assert material_at(s, 0.0, 0.0).eps == 3.0
    assert material_at(s, 0.75, 0.0).eps == 5.0


def test_nonoverlapping_order_irrelevant():
    a = Disk((-1.5, 0.5), 0.4, Medium(3.0, 1.0))
    b = Rectangle((1.0, -1.0), (2.0, -0.2), Medium(6.0, 2.0))
    s1 = SlabStructure(L=2.0, ambient=Medium(1.0, 1.0), inclusions=(a, b))
    s2 = SlabStructure(L=2.0, ambient=Medium(1.0, 1.0), inclusions=(b, a))
    n = 64
    xs = np.linspace(-math.pi, math.pi, n, endpoint=False) + 0.01
    zs = np.linspace(-2.0, 2.0, n) + 0.003
    X, Z = np.meshgrid(xs, zs)
    e1, m1 = sample_materials(s1, X, Z)
    e2, m2 = sample_materials(s2, X, Z)
    assert np.array_equal(e1, e2) and np.array_equal(m1, m2)


def test_wrap_containment_across_seam():
    d = Disk((math.pi, 0.0), 0.3, Medium(4.0, 1.0))
    s = SlabStructure(L=1.0, ambient=Medium(1.0, 1.0), inclusions=(d,))
    assert material_at(s, -math.pi + 0.1, 0.0).eps == 4.0
    assert material_at(s, math.pi - 0.1, 0.0).eps == 4.0


def test_symmetries_centered_rod(rod):
    rep = check_symmetries(rod)
    assert rep.z_symmetric and rep.x_symmetric


def test_symmetries_offset_disk():
    s = SlabStructure(L=2.0, ambient=Medium(1.0, 1.0),
                      inclusions=(Disk((0.0, 0.5), 0.4, Medium(2.0, 1.0)),))
    rep = check_symmetries(s)
    assert not rep.z_symmetric
    assert rep.x_symmetric


def test_symmetries_mirrored_pair():
    pair = (Disk((0.3, 0.7), 0.3, Medium(2.0, 1.0)),
            Disk((0.3, -0.7), 0.3, Medium(2.0, 1.0)))
    s = SlabStructure(L=2.0, ambient=Medium(1.0, 1.0), inclusions=pair)
    rep = check_symmetries(s)
    assert rep.z_symmetric
    assert not rep.x_symmetric
