"""Dimension estimates, region handling, confinement, critical points.

Dimension oracles are synthetic clouds with known answers: lines and filling
curves near one, uniform noise near two.  Region and critical-point oracles
come from the tetrahedral entry, whose octant geometry and single interior
minimum (value 3 sqrt 3 at theta = arctan sqrt 2, psi = pi/4) are exact.
"""

import dataclasses
import math
from types import SimpleNamespace

import numpy as np
import pytest

from platodyn import (IntegratorConfig, box_counting_dimension,
                      classify_section, confinement_check,
                      find_critical_points, find_region, integrate, make,
                      natural_system, sample_initial_conditions)
from platodyn.charts import PhaseState
from platodyn.diagnostics import (DEFAULT_SCALES, MIN_SECTION_POINTS,
                                  classification_scales)
from platodyn.potentials import free

ATAN_SQRT2 = math.atan(math.sqrt(2.0))
OCTANT_SEED = (ATAN_SQRT2, math.pi / 4)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def _golden_curve(n):
    # quasi-periodic sweep of an ellipse: how section points of a torus
    # accumulate, without integrating anything
    k = np.arange(n)
    t = 2.0 * math.pi * np.mod(k * GOLDEN, 1.0)
    return np.c_[1.3 * np.cos(t), 0.7 * np.sin(t)]


# ---------------------------------------------------------------------------
# box-counting dimension

def test_line_has_dimension_one():
    pts = np.c_[np.linspace(0.0, 1.0, 2000), np.linspace(0.0, 2.0, 2000)]
    assert box_counting_dimension(pts) == pytest.approx(1.0, abs=0.1)


def test_noise_has_dimension_two():
    rng = np.random.default_rng(11)
    pts = rng.random((20000, 2))
    dim = box_counting_dimension(pts, classification_scales(20000))
    assert dim == pytest.approx(2.0, abs=0.15)


def test_dimension_input_validation():
    with pytest.raises(ValueError, match="\\(n, 2\\)"):
        box_counting_dimension(np.zeros((5, 3)))
    pts = _golden_curve(200)
    with pytest.raises(ValueError, match="three scales"):
        box_counting_dimension(pts, scales=(0.5, 0.05))
    with pytest.raises(ValueError, match="decade"):
        box_counting_dimension(pts, scales=(0.5, 0.3, 0.2))
    with pytest.raises(ValueError, match="distinct"):
        box_counting_dimension(np.ones((50, 2)))


def test_classification_scales_track_cloud_size():
    small = classification_scales(300)
    assert small[0] == 0.5
    assert small[-1] == pytest.approx(1.0 / 20.0)
    huge = classification_scales(100000)
    assert huge[-1] == pytest.approx(1.0 / 128.0)
    for scales in (small, huge, DEFAULT_SCALES):
        assert scales[0] / scales[-1] >= 10.0 - 1e-9


# ---------------------------------------------------------------------------
# classification

def test_classify_curve_and_noise():
    curve = classify_section(_golden_curve(400))
    assert curve.label == "curve-like"
    assert curve.n_points == 400
    rng = np.random.default_rng(7)
    noise = classify_section(rng.random((400, 2)))
    assert noise.label == "scattered"
    assert noise.dimension > curve.dimension


def test_classify_insufficient_data():
    v = classify_section(_golden_curve(MIN_SECTION_POINTS - 1))
    assert v.label == "insufficient"
    assert math.isnan(v.dimension)
    # repeated single point: size alone is not enough
    assert classify_section(np.ones((200, 2))).label == "insufficient"
    # the floor is adjustable
    assert classify_section(_golden_curve(80), min_points=50).label == \
        "curve-like"


def test_classify_threshold_overrides():
    rng = np.random.default_rng(7)
    noise = rng.random((400, 2))
    assert classify_section(noise, thresholds=(1.9, 1.95)).label == \
        "curve-like"
    assert classify_section(noise, thresholds=(0.5, 1.0)).label == "scattered"
    assert classify_section(noise, thresholds=(1.0, 2.5)).label == \
        "ambiguous-curve-like"


def test_classify_accepts_point_set_objects():
    carrier = SimpleNamespace(points=_golden_curve(400))
    assert classify_section(carrier).label == "curve-like"


def test_enrichment_keeps_verdict_stable():
    # growing a torus sample must never flip curve-like to scattered, and
    # the dimension estimate settles within a tenth
    pts = _golden_curve(500)
    verdicts = [classify_section(pts[:n]) for n in (250, 375, 500)]
    labels = [v.label for v in verdicts]
    assert "scattered" not in labels
    assert labels[-1] == "curve-like"
    for a, b in zip(verdicts, verdicts[1:]):
        assert abs(a.dimension - b.dimension) <= 0.1


# ---------------------------------------------------------------------------
# regions

def test_octant_region_of_tetrahedral_factor():
    vt = make("V_T")
    region = find_region(vt, OCTANT_SEED, resolution=128)
    assert region.sign == 1
    # one octant of the (theta, psi) rectangle, minus a conservative border
    assert 0.10 < region.fraction <= 0.1251
    cells = np.argwhere(region.mask)
    for i, j in cells[:: max(1, len(cells) // 50)]:
        a, b = region.cell_center(i, j)
        assert vt.region_factor(a, b) > 0.0


def test_region_wraps_periodic_axis():
    # a factor negative on |psi| > pi/2 has one component straddling the cut
    host = make("Ca2")
    spec = dataclasses.replace(host,
                               region_factor=lambda r, psi: -math.cos(psi))
    region = find_region(spec, (1.0, 3.0), resolution=96)
    assert 0.40 < region.fraction < 0.52
    cols = np.unique(np.argwhere(region.mask)[:, 1])
    assert cols.min() == 0 and cols.max() == region.resolution - 1


def test_region_input_validation():
    with pytest.raises(ValueError, match="no angular factor"):
        find_region(free("sphere"), OCTANT_SEED)
    with pytest.raises(ValueError, match="two-coordinate"):
        find_region(make("Ca1"), (0.0, 0.0, 0.0))
    vt = make("V_T")
    with pytest.raises(ValueError, match="zero set"):
        find_region(vt, (math.pi / 2, 0.0), resolution=64)
    with pytest.raises(ValueError, match="outside"):
        find_region(vt, (9.0, 0.7), resolution=64)


def test_region_seed_snaps_to_nearest_matching_cell():
    vt = make("V_T")
    # seed close to the octant wall: its own cell may rasterize to the wrong
    # sign, the fill must still start inside the component
    region = find_region(vt, (ATAN_SQRT2, 0.02), resolution=64)
    assert region.sign == 1
    assert region.fraction > 0.05


# ---------------------------------------------------------------------------
# sampling and confinement

@pytest.fixture(scope="module")
def octant():
    vt = make("V_T")
    return vt, natural_system(vt), find_region(vt, OCTANT_SEED,
                                               resolution=128)


def test_sampler_hits_energy_and_region(octant):
    vt, sys, region = octant
    states = sample_initial_conditions(sys, region, 8.0, 12, seed=4)
    assert len(states) == 12
    for st in states:
        assert sys.energy(st) == pytest.approx(8.0, abs=1e-12)
        assert vt.region_factor(*st.q) > 0.0


def test_sampler_is_seed_deterministic(octant):
    _, sys, region = octant
    a = sample_initial_conditions(sys, region, 8.0, 5, seed=9)
    b = sample_initial_conditions(sys, region, 8.0, 5, seed=9)
    c = sample_initial_conditions(sys, region, 8.0, 5, seed=10)
    assert [s.q for s in a] == [s.q for s in b]
    assert [s.q for s in a] != [s.q for s in c]


def test_sampler_rejects_closed_region(octant):
    _, sys, region = octant
    # the well bottom sits at 3 sqrt 3, just above 5: nothing fits below it
    with pytest.raises(ValueError, match="could not place"):
        sample_initial_conditions(sys, region, 5.0, 3, seed=0)


def test_sampler_needs_two_degrees():
    sys = natural_system(make("Ca1"))
    with pytest.raises(ValueError, match="two-degree"):
        sample_initial_conditions(sys, None, 1.0, 1)


def test_orbit_stays_in_its_octant(octant):
    vt, sys, region = octant
    st = sample_initial_conditions(sys, region, 8.0, 1, seed=4)[0]
    trace = integrate(sys, st, IntegratorConfig(method="rk4", h=0.002,
                                                t1=10.0))
    assert trace.flag is None
    assert confinement_check(trace, vt)
    assert confinement_check(trace, vt, expected_sign=1)
    assert not confinement_check(trace, vt, expected_sign=-1)


def test_confinement_follows_lifted_orbits(octant):
    vt, _, region = octant
    sys3 = natural_system(vt, level="H3-euclid3", k=1.0)
    st = PhaseState(chart=sys3.chart, q=(1.0,) + OCTANT_SEED,
                    p=(0.2, 0.4, 0.6))
    trace = integrate(sys3, st, IntegratorConfig(method="adaptive", t1=10.0))
    assert trace.flag is None
    assert confinement_check(trace, vt)


def test_confinement_needs_a_factor():
    sys = natural_system(free("sphere"))
    st = PhaseState(chart=sys.chart, q=(1.0, 0.5), p=(0.1, 0.3))
    trace = integrate(sys, st, IntegratorConfig(t1=0.1))
    with pytest.raises(ValueError, match="no angular factor"):
        confinement_check(trace, free("sphere"))


# ---------------------------------------------------------------------------
# critical points

def test_tetrahedral_well_has_one_minimum():
    cps = find_critical_points(make("V_T"), OCTANT_SEED)
    assert len(cps) == 1
    cp = cps[0]
    assert cp.kind == "min"
    assert cp.grad_norm <= 1e-8
    assert abs(cp.location[0] - ATAN_SQRT2) < 1e-6
    assert abs(cp.location[1] - math.pi / 4) < 1e-6
    assert cp.value == pytest.approx(3.0 * math.sqrt(3.0), abs=1e-6)


def test_octahedral_well_has_one_minimum():
    cps = find_critical_points(make("V_O"), (0.9553, math.pi / 4))
    assert len(cps) == 1
    assert cps[0].kind == "min"
    assert cps[0].value == pytest.approx(27.0, abs=1e-6)


def test_icosahedral_well_has_one_minimum():
    vi = make("V_I")
    cps = find_critical_points(vi, vi.default_start)
    assert len(cps) == 1
    assert cps[0].kind == "min"
    assert cps[0].value == pytest.approx(27.0 / 5.0, abs=1e-6)


def test_well_straddling_the_cut_reports_once():
    # this triangular well is centered on psi = +-pi; newton runs reach it
    # from both ends of the periodic axis and must collapse to one report
    cps = find_critical_points(make("V_I"), (1.3821, 3.14))
    assert len(cps) == 1
    assert cps[0].value == pytest.approx(27.0 / 5.0, abs=1e-6)


def test_extra_multistarts_do_not_duplicate():
    cps = find_critical_points(make("V_T"), OCTANT_SEED, multistart_count=48)
    assert len(cps) == 1
