import json

import pytest

from rotor_bands.config import RunConfig, build_run_config, load_config_file
from rotor_bands.exceptions import InvalidInput, NotAResonance


def test_defaults():
    config = build_run_config('bands', {'p': 1, 'q': 3})
    assert config.grid == 256
    assert config.seed == 0
    assert config.format == 'csv'
    assert config.mu_list == (1e-4, 2e-4, 5e-4, 1e-3)
    params = config.params()
    assert (params.Q, params.beta) == (3, 0.5)


def test_config_file_and_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"P": 2, "Q": 2, "beta": 0, "mu": 2.0, "grid": 64, "mu-list": [1e-3, 1e-2]}))
    config = build_run_config('flatness', {'mu': 0.5, 'grid': None}, str(path))
    assert config.mu == 0.5
    assert config.grid == 64
    assert config.mu_list == (1e-3, 1e-2)
    assert config.params().q == 1


def test_yaml_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("q_list: 3,5,7\nformat: JSON\nreport: true\n")
    config = build_run_config('decay', {}, str(path))
    assert config.q_list == (3, 5, 7)
    assert config.format == 'json'
    assert config.report


@pytest.mark.parametrize("content", ["[1, 2]", "P: [unclosed"])
def test_bad_config_file(tmp_path, content):
    path = tmp_path / "bad.yaml"
    path.write_text(content)
    with pytest.raises(InvalidInput):
        load_config_file(str(path))


def test_missing_config_file(tmp_path):
    with pytest.raises(InvalidInput):
        load_config_file(str(tmp_path / "absent.json"))


def test_parameterization_errors():
    with pytest.raises(InvalidInput):
        build_run_config('bands', {'P': 2, 'Q': 2, 'p': 1, 'q': 1}).params()
    with pytest.raises(InvalidInput):
        build_run_config('bands', {'p': 1}).params()
    with pytest.raises(InvalidInput):
        build_run_config('bands', {}).params()
    with pytest.raises(NotAResonance):
        build_run_config('bands', {'p': 1, 'q': 3, 'beta': 0.3}).params()


def test_invalid_values():
    with pytest.raises(InvalidInput):
        build_run_config('bands', {'format': 'xml'})
    with pytest.raises(InvalidInput):
        build_run_config('bands', {'mu_list': '1e-3,abc'})
    with pytest.raises(InvalidInput):
        build_run_config('bands', {'grid': 12.5})
    with pytest.raises(InvalidInput):
        RunConfig(command='plot')


def test_meta_echo():
    meta = build_run_config('verify', {'checks': '1,8'}).as_dict()
    assert meta['command'] == 'verify'
    assert meta['checks'] == [1, 8]
