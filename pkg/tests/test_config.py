import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fresnel_ris import PanelSpec, default_scenario
from fresnel_ris.config import (ConfigMatrix, ElementState, PairGeometry, ZoneBand, aggregate,
                                baseline_beamform, baseline_random, judge_element,
                                quantize_onebit, reflection_coefficient, seed_zones,
                                threshold_xi, tposj, upsilon, zone_bounds, zone_matrix)
from fresnel_ris.exceptions import DomainError
from fresnel_ris.field import Link
from fresnel_ris.geometry import build_b_frame, zone_ellipse, zone_plane_intersection
from fresnel_ris.oracle import config_via_index, zone_index_field
from fresnel_ris.units import ETA0

LAM = 0.0107068735


def test_reflection_coefficient_limits():
    assert reflection_coefficient(ETA0) == 0
    assert reflection_coefficient(float("inf")) == 1
    assert reflection_coefficient(0.0) == -1
    with pytest.raises(DomainError):
        reflection_coefficient(-ETA0)


def test_element_coefficient_values():
    from fresnel_ris.config import ElementCoefficient
    assert ElementCoefficient(ElementState.ABSORB, 0.9).value == 0
    assert ElementCoefficient(ElementState.ON, 0.9).value == -0.9
    assert ElementCoefficient(ElementState.OFF, 0.9).value == 0.9


@pytest.mark.parametrize("t, expected", [(0.9, 1), (0.0, 0), (-1.8, -1), (0.45, 0), (1.8, 1),
                                         (0.9 + 0.9 - 0.9, 1)])
def test_upsilon(t, expected):
    assert upsilon(t, 0.9) == expected


def test_aggregate_cancels_adjacent_bands():
    a = ConfigMatrix.from_states([[1, 0], [1, 1]], 0.9, "tposj")
    b = ConfigMatrix.from_states([[-1, 0], [0, 1]], 0.9, "tposj")
    out = aggregate([a, b])
    np.testing.assert_array_equal(out.states(), [[0, 0], [1, 1]])
    np.testing.assert_allclose(out.coeffs, [[0, 0], [0.9, 0.9]])
    with pytest.raises(DomainError):
        aggregate([a, ConfigMatrix.from_states([[1]], 0.9, "tposj")])


def test_zone_band_validation():
    with pytest.raises(DomainError):
        ZoneBand(5, 0.0)
    with pytest.raises(DomainError):
        ZoneBand(5, 1e-3, tau=0.7)


def test_threshold_default_scenario(geom, frame, scenario):
    xi = threshold_xi(frame, 0.5, seed_zones(geom), LAM, panel=scenario.panels[0])
    assert xi == pytest.approx(2.2926e-3, rel=1e-3)


def test_threshold_is_mm_scale_like_the_zone_spacing(geom, frame, scenario):
    xi = threshold_xi(frame, 0.5, seed_zones(geom), LAM, panel=scenario.panels[0])
    f = zone_index_field(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, LAM).values
    pitch = LAM / 2
    grad = np.hypot(np.gradient(f, pitch, axis=0), np.gradient(f, pitch, axis=1))
    spacing = float(np.mean(1.0 / grad))
    assert spacing == pytest.approx(4.43e-3, rel=0.01)
    assert 0.5 * spacing <= xi <= 2 * spacing
    # tau = 1/2 spans half the spacing on each side of a boundary
    assert xi == pytest.approx(spacing / 2, rel=0.05)


def test_threshold_without_height_term():
    # both ends on the plane: the gap is sqrt(d1 d2 / d) times a constant and
    # peaks at d1 = d / 2
    f = build_b_frame([10, 0, 0.0], [-10, 0, 0.0])
    xi = threshold_xi(f, 0.5, [30], LAM, model="fresnel")
    r = lambda i: i * LAM * f.d / 4   # noqa: E731
    assert xi == pytest.approx(math.sqrt(r(30.5)) - math.sqrt(r(30)), rel=1e-6)


@given(st.floats(0.05, 0.45))
def test_threshold_monotone_in_tau(tau):
    f = build_b_frame([10, 10, 15], [-10, 10, 1.5])
    zones = range(1990, 2011)
    assert threshold_xi(f, tau, zones, LAM) < threshold_xi(f, tau + 0.05, zones, LAM)


def test_threshold_errors(frame):
    with pytest.raises(DomainError):
        threshold_xi(frame, 0.0, [2000], LAM)
    with pytest.raises(DomainError):
        threshold_xi(frame, 0.5, [], LAM)


def test_zone_bounds_against_index_oracle(geom, frame, scenario):
    xi = 2.2926e-3
    f = zone_index_field(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, LAM).values
    corners = [f[0, 0], f[0, -1], f[-1, 0], f[-1, -1]]
    # the lowest-index element sits 0.09 index units (~0.4 mm) below 1945
    assert math.ceil(f.min()) == 1945 and round(max(corners)) == 2056
    assert zone_bounds(frame, scenario.panels[0], xi, LAM, geom=geom) == (1945, 2056)


def test_zone_bounds_empty_far_away():
    panel = PanelSpec(3, 3, LAM / 2, LAM / 2)
    f = build_b_frame([1000, 500, 30], [1010, 480, 2])
    # a link 1 km away: zones near the panel are dense, but with a tiny xi no
    # curve passes close enough to any element centre
    assert zone_bounds(f, panel, 1e-7, LAM) is None


def test_judge_center_element(frame):
    p = frame.to_b(np.zeros(3))
    c = judge_element(p, frame, ZoneBand(2000, 2.29e-3), LAM, 0.9)
    assert c.state is ElementState.ON and c.value == -0.9
    assert judge_element(p, frame, ZoneBand(2003, 2.29e-3), LAM, 0.9).state is ElementState.ABSORB


def test_judge_on_odd_curve(frame):
    ell = zone_ellipse(frame, 2001, LAM)
    v = zone_plane_intersection(frame, 2001, 0.5 * (ell.d1_lo + ell.d1_hi), LAM)[0].v
    assert judge_element(v, frame, ZoneBand(2001, 1e-4), LAM, 0.9).value == 0.9


def test_zone_matrix_codomain_and_empty(frame, scenario):
    m = zone_matrix(frame, scenario.panels[0], ZoneBand(2000, 2.29e-3), LAM, 0.9)
    assert set(np.unique(m.coeffs.real)) <= {-0.9, 0.0}
    assert np.count_nonzero(m.coeffs) > 0
    empty = zone_matrix(frame, scenario.panels[0], ZoneBand(5, 2.29e-3), LAM, 0.9)
    assert not np.any(empty.coeffs)


def test_zone_matrix_is_one_connected_arc():
    sc = default_scenario(tx_antennas=[(10, 0, 15)], rx=(-10, 0, 1.5))
    g = PairGeometry(sc.panels[0], sc.tx_antennas[0], sc.rx, LAM)
    # half-width of half a diagonal pitch: a rasterized curve cannot skip a cell
    xi = 0.5 * math.sqrt(2) * LAM / 2
    m = zone_matrix(g.frame, sc.panels[0], ZoneBand(751, xi), LAM, 0.9, geom=g)
    on = m.coeffs.real != 0
    # flood fill with 8-connectivity
    start = tuple(np.argwhere(on)[0])
    seen, todo = {start}, [start]
    while todo:
        r, c = todo.pop()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                q = (r + dr, c + dc)
                if (0 <= q[0] < on.shape[0] and 0 <= q[1] < on.shape[1] and on[q]
                        and q not in seen):
                    seen.add(q)
                    todo.append(q)
    assert len(seen) == on.sum()


def test_tposj_matches_parity_oracle(scenario):
    res = tposj(scenario)
    st_ = res.configs[0].states()
    oracle = config_via_index(
        zone_index_field(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, LAM), 0.5
    ).states()
    refl = st_ != 0
    assert np.mean(st_[refl] == oracle[refl]) >= 0.99
    assert set(np.unique(res.configs[0].coeffs.real)) <= {-0.9, 0.0, 0.9}


def test_tposj_symmetric_scenario_is_mirror_symmetric():
    sc = default_scenario(tx_antennas=[(10, 0, 15)], rx=(-10, 0, 1.5))
    s = tposj(sc).configs[0].states()
    np.testing.assert_array_equal(s, s[:, ::-1])


def test_tposj_reflecting_set_grows_with_tau(scenario):
    prev = None
    for tau in (0.1, 0.2, 0.3, 0.4, 0.5):
        refl = tposj(scenario.replace(tau=tau)).configs[0].states() != 0
        if prev is not None:
            assert np.all(refl[prev])
        prev = refl


def test_tposj_deterministic_and_fixed_xi(scenario):
    a, b = tposj(scenario), tposj(scenario)
    np.testing.assert_array_equal(a.configs[0].coeffs, b.configs[0].coeffs)
    fixed = tposj(scenario, xi=0.2 * LAM)
    assert fixed.pairs[0].xi == 0.2 * LAM


def test_tposj_two_antennas_combine(scenario):
    sc = scenario.replace(tx_antennas=[(10, 10, 15), (10.5, 10, 15)])
    res = tposj(sc)
    assert len(res.pairs) == 2 and len(res.configs) == 1
    total = res.pairs[0].states.astype(int) + res.pairs[1].states
    np.testing.assert_array_equal(res.configs[0].states(), np.clip(total, -1, 1))


def test_text_grid_symbols():
    m = ConfigMatrix.from_states([[1, -1, 0]], 0.9, "tposj")
    assert m.to_text() == "+−·\n"
    with pytest.raises(ValueError):
        ConfigMatrix(np.ones((1, 1), complex), "continuous", 0.9).to_text()


def test_random_baseline():
    panel = PanelSpec(80, 80, LAM / 2, LAM / 2)
    a, b = baseline_random(panel, 0.9, 7), baseline_random(panel, 0.9, 7)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    assert np.all(np.abs(a.coeffs) == 0.9)
    assert abs(a.coeffs.real.mean()) < 3 * 0.9 / 80
    c = baseline_random(panel, 0.9, 7, continuous=True)
    np.testing.assert_allclose(np.abs(c.coeffs), 0.9)


def test_onebit_quantizer_ties_to_zero():
    np.testing.assert_array_equal(quantize_onebit(np.array([0.0, math.pi / 2, -math.pi / 2,
                                                            math.pi, 3.0, 1.6])),
                                  [1, 1, 1, -1, -1, -1])


def test_beamform_reference_is_global_phase(scenario, link):
    p = [link.evaluate(baseline_beamform(scenario, reference=r), los=False).power_w
         for r in (0.0, 1.0, -2.5)]
    assert p[1] == pytest.approx(p[0], rel=1e-12) and p[2] == pytest.approx(p[0], rel=1e-12)


def test_single_element_onebit_equals_continuous(scenario):
    sc = scenario.replace(panels=(PanelSpec(1, 1, LAM / 2, LAM / 2),))
    link = Link(sc)
    p1 = link.evaluate(baseline_beamform(sc, resolution="onebit")).power_w
    pc = link.evaluate(baseline_beamform(sc)).power_w
    assert p1 == pytest.approx(pc, rel=1e-12)


def random_scenario(rng):
    tx = (rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(3, 20))
    rx = (rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0.5, 10))
    n = int(rng.integers(8, 24))
    return default_scenario(tx_antennas=[tx], rx=rx, panels=(PanelSpec(n, n, LAM / 2, LAM / 2),))


def test_beamforming_orderings_on_random_scenarios():
    rng = np.random.default_rng(11)
    for _ in range(20):
        sc = random_scenario(rng)
        link = Link(sc)
        pc = link.evaluate(baseline_beamform(sc)).power_w
        p1 = link.evaluate(baseline_beamform(sc, resolution="onebit")).power_w
        pr = np.mean([link.evaluate(baseline_random(sc.panels[0], 0.9, s)).power_w
                      for s in range(200)])
        assert p1 <= pc * (1 + 1e-12)
        assert p1 >= pr
