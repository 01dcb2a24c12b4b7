import json
import math

import pytest

from contrast_spectra.config import ConfigError, DEFAULTS, flatten, load_config, params_from_config
from contrast_spectra.params import limits, q_eps


def write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_defaults():
    cfg = load_config(None)
    assert cfg == DEFAULTS
    p = params_from_config(cfg)
    assert limits(p).q == pytest.approx(5.0) and limits(p).r == pytest.approx(1.0)


def test_flatten():
    assert flatten({"a": {"b": 1, "c": {"d": 2}}, "e": 3}) == {"a.b": 1, "a.c.d": 2, "e": 3}


def test_explicit_laws(tmp_path):
    path = write(tmp_path, """
n: 2
R: 0.25
d: {coeff: 1.0, exp: 0.0}
alpha: {coeff: 1.0, exp: 0.0}
beta: {coeff: 1.0, exp: 0.0}
domain: {kind: rectangle, L_x: 1, d_minus: -1, d_plus: 1}
""")
    p = params_from_config(load_config(path))
    assert q_eps(p, 1.0) == pytest.approx(8.0)


def test_dotted_keys_and_json(tmp_path):
    doc = {"canonical.q": 3.0, "canonical.r": 0.5, "domain.kind": "waveguide", "canonical.d_coeff": 0.01}
    path = write(tmp_path, json.dumps(doc), "c.json")
    p = params_from_config(load_config(path))
    assert p.domain.is_waveguide
    assert p.d_law.coefficient == 0.01
    assert limits(p).q == pytest.approx(3.0)


def test_infinite_q(tmp_path):
    path = write(tmp_path, "canonical: {q: inf, r: 1}\n")
    assert math.isinf(limits(params_from_config(load_config(path))).q)


def test_errors(tmp_path):
    with pytest.raises(ConfigError):
        params_from_config(load_config(write(tmp_path, "d: {coeff: 1, exp: 2}\n")))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "- 1\n- 2\n"))
    with pytest.raises(ValueError):
        params_from_config(load_config(write(tmp_path, "domain: {kind: disk}\n")))
