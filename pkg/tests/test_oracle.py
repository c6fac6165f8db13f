import math

import numpy as np
import pytest

from fresnel_ris.config import tposj
from fresnel_ris.geometry import PanelSpec
from fresnel_ris.oracle import (config_via_index, curve_point_toward, dump_curve_csv,
                                element_phasors, exact_zone_curve, plane_minimizer,
                                zone_index_field)
from fresnel_ris.field import element_channels

LAM = 0.0107068735


def test_curve_points_are_on_the_ellipsoid(scenario):
    tx, rx = scenario.tx_antennas[0], scenario.rx
    d = np.linalg.norm(tx - rx)
    pts = exact_zone_curve(2000, tx, rx, LAM, n=90)
    assert pts.shape == (90, 3) and np.all(pts[:, 2] == 0)
    path = np.linalg.norm(pts - tx, axis=1) + np.linalg.norm(pts - rx, axis=1)
    assert np.max(np.abs(path - d - 1000 * LAM)) < 1e-8 * d


def test_zone_below_the_minimum_excess_is_empty(scenario):
    assert exact_zone_curve(1, scenario.tx_antennas[0], scenario.rx, LAM).shape == (0, 3)


def test_plane_minimizer_is_specular():
    p = plane_minimizer([4, 0, 3], [0, 0, 1])
    assert p == pytest.approx([1.0, 0.0, 0.0])


def test_curve_point_toward_lies_on_ray(scenario):
    tx, rx = scenario.tx_antennas[0], scenario.rx
    w = curve_point_toward(2000, tx, rx, LAM, [0.1, 0.05, 0.0])
    p0 = plane_minimizer(tx, rx)
    u, v = w - p0, np.array([0.1, 0.05, 0.0]) - p0
    assert abs(u[0] * v[1] - u[1] * v[0]) < 1e-9 * np.linalg.norm(u) * np.linalg.norm(v)


def test_index_field_is_smooth(scenario):
    f = zone_index_field(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, LAM).values
    pitch = scenario.panels[0].elem_a
    bound = 2 * pitch * 2 / LAM
    assert np.max(np.abs(np.diff(f, axis=0))) < bound
    assert np.max(np.abs(np.diff(f, axis=1))) < bound
    # the panel centre sits between the four middle elements
    assert f[39:41, 39:41].mean() == pytest.approx(2000.0486, abs=0.05)


def test_parity_configuration_signs():
    class F:
        values = np.array([[2.9, 3.2, 3.5, 4.05]])
    cfg = config_via_index(F, 0.25)
    np.testing.assert_array_equal(cfg.states(), [[1, 1, 0, -1]])


def test_oracle_phasors_match_channels(scenario):
    a = element_phasors(scenario)[0]
    b = element_channels(scenario)[0]
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_oracle_skips_shadowed_panel(scenario):
    sc = scenario.replace(rx=np.array([-10.0, 10.0, -1.0]))
    assert np.all(element_phasors(sc)[0] == 0)


def test_single_element_never_beats_its_bound(scenario):
    sc = scenario.replace(panels=(PanelSpec(1, 1, LAM / 2, LAM / 2),))
    h = element_phasors(sc)[0][0, 0]
    r_i = np.linalg.norm(sc.tx_antennas[0])
    r_r = np.linalg.norm(sc.rx)
    amp = math.sqrt(376.730313668 * 1.0 * 31.6227766 / (2 * math.pi))
    assert abs(h) <= amp * 2 * (LAM / 2) ** 2 / (2 * LAM * r_i * r_r)


def test_tposj_band_shares_parity_with_oracle(scenario):
    cfg = tposj(scenario).configs[0]
    f = zone_index_field(scenario.panels[0], scenario.tx_antennas[0], scenario.rx, LAM).values
    on = cfg.states() != 0
    k = np.rint(f[on])
    agree = np.where(k % 2 == 1, 1, -1) == cfg.states()[on]
    assert agree.mean() >= 0.99


def test_dump_curve_csv(tmp_path, scenario):
    pts = exact_zone_curve(2000, scenario.tx_antennas[0], scenario.rx, LAM, n=4)
    path = tmp_path / "c.csv"
    dump_curve_csv(pts, path)
    rows = path.read_text().splitlines()
    assert rows[0] == "x_m,y_m,z_m" and len(rows) == 5
    assert float(rows[1].split(",")[0]) == pts[0, 0]
