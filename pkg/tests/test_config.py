"""Config grammar: parsing, serialization, validation."""

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbem.config import (ConfigError, format_complex, parse_complex,
                             parse_config, serialize_config)
from hyperbem.geometry import Ellipse, Polygon

MINIMAL = """
geometry.kind = ellipse
geometry.a = 2.0
geometry.b = 1.0
medium1.eps1 = 1+0.02i
medium1.eps2 = -2+0.02i
medium2.eps1 = 1+0i
medium2.eps2 = 1+0i
problem.k0 = 1.0
source.domain = 1
source.x = 0.0
source.y = 0.0
source.amplitude = -1+0i
"""


def test_parse_minimal_config_applies_defaults():
    cfg, defaulted = parse_config(MINIMAL)
    assert isinstance(cfg.curve(), Ellipse)
    assert cfg.tau == 0.1
    assert cfg.gamma == 0.7
    assert cfg.m0 == 100
    assert "tau" in defaulted and "gamma" in defaulted
    assert "k0" not in defaulted
    cfg.validate()


def test_serialize_parse_round_trip():
    cfg, _ = parse_config(MINIMAL)
    text = serialize_config(cfg)
    cfg2, defaulted2 = parse_config(text)
    assert cfg2 == cfg
    assert not defaulted2 - {"polygon_vertices"}


def test_polygon_round_trip():
    text = MINIMAL.replace("geometry.kind = ellipse", "geometry.kind = polygon")
    text = text.replace("geometry.a = 2.0\ngeometry.b = 1.0",
                        "geometry.vertices = 0,0; 1,0; 1,0.2; 0,0.2")
    text = text.replace("source.x = 0.0", "source.x = 0.5")
    text = text.replace("source.y = 0.0", "source.y = 0.1")
    cfg, _ = parse_config(text)
    assert isinstance(cfg.curve(), Polygon)
    cfg2, _ = parse_config(serialize_config(cfg))
    assert cfg2 == cfg


def test_unknown_key_rejected_with_line_number():
    with pytest.raises(ConfigError, match="line"):
        parse_config(MINIMAL + "\nnot.a.key = 3\n")


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(MINIMAL + "\nproblem.k0 = 2.0\n")


def test_malformed_line_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\njust some words\n")


def test_validation_rejects_gain_media():
    cfg, _ = parse_config(MINIMAL.replace("1+0.02i", "1-0.02i"))
    with pytest.raises(ConfigError, match="[Ii]m"):
        cfg.validate()


def test_validation_rejects_source_on_boundary():
    text = MINIMAL.replace("source.x = 0.0", "source.x = 2.0")
    cfg, _ = parse_config(text)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_validation_rejects_source_outside_declared_domain():
    # domain 1 is the interior; a far exterior point contradicts it
    text = MINIMAL.replace("source.x = 0.0", "source.x = 10.0")
    cfg, _ = parse_config(text)
    with pytest.raises(ConfigError):
        cfg.validate()


def test_validation_rejects_bad_adapt_parameters():
    cfg, _ = parse_config(MINIMAL)
    for change in ({"gamma": 1.5}, {"tau": 0.0}, {"levels": 0}, {"m0": 2},
                   {"k0": -1.0}, {"quad_rel_tol": 0.0}, {"m_ref": 10}):
        bad = dataclasses.replace(cfg, **change)
        with pytest.raises(ConfigError):
            bad.validate()


def test_parse_complex_literals():
    assert parse_complex("1+0.02i") == 1 + 0.02j
    assert parse_complex("-2+0.02i") == -2 + 0.02j
    assert parse_complex("-4+0.05i") == -4 + 0.05j
    assert parse_complex("3") == 3 + 0j
    assert parse_complex("0+2i") == 2j
    assert parse_complex("1-2i") == 1 - 2j
    for bad in ("1+2j+3", "i", "1+i*2"):
        with pytest.raises(ConfigError):
            parse_complex(bad)


@settings(max_examples=200, deadline=None)
@given(re=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
       im=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_complex_literal_round_trip(re, im):
    z = complex(re, im)
    assert parse_complex(format_complex(z)) == z
