import numpy as np
import pytest

from fresnel_ris import load_scenario, default_scenario
from fresnel_ris.exceptions import DomainError, ScenarioError
from fresnel_ris.scenario import scenario_from_dict


def test_defaults():
    sc = default_scenario()
    assert sc.lam == pytest.approx(0.0107068735, rel=1e-9)
    assert sc.panels[0].shape == (80, 80)
    assert sc.tx_power_w == pytest.approx(1.0) and sc.noise_w == pytest.approx(1e-12)
    assert sc.tau == 0.5 and sc.gamma_r == 0.9 and not sc.los


def test_toml_round_trip(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text('frequency_hz = 28e9\nrx_m = [-5, 8, 2]\nseed = 7\ntrials = 20\n'
                    "sigma_m = [0.01, 0.0, 0.02]\n\n[[panels]]\nrows = 20\ncols = 30\n")
    sc, run = load_scenario(path)
    assert sc.panels[0].shape == (20, 30)
    np.testing.assert_array_equal(sc.rx, [-5, 8, 2])
    assert run["seed"] == 7 and run["trials"] == 20 and run["sigma_m"] == [0.01, 0.0, 0.02]
    again, _ = scenario_from_dict(sc.to_dict())
    assert again.digest() == sc.digest()


@pytest.mark.parametrize("text", ["bogus = 1\n", "[[panels]]\nrowz = 3\n", "trials = 0\n",
                                  "sigma_m = [0.1, -0.1, 0]\n", "gamma_r = 2.0\n",
                                  "frequency_hz = \n"])
def test_bad_files_raise(tmp_path, text):
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "nope.toml")


def test_direct_construction_validates():
    with pytest.raises(DomainError):
        default_scenario(tau=0.0)
    with pytest.raises(DomainError):
        default_scenario(radius_model="taylor")
