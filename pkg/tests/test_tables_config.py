import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dislocation_lab.config import RunConfig, parse_config
from dislocation_lab.errors import ValidationError
from dislocation_lab.plotting import emit_svg_scatter
from dislocation_lab.tables import ResultTable, emit_table, read_table

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(rows=st.lists(st.tuples(st.integers(-10 ** 6, 10 ** 6), finite, st.complex_numbers(allow_nan=False,
                                                                                      allow_infinity=False)),
                min_size=1, max_size=8))
def test_round_trip_is_lossless(rows, tmp_path_factory):
    t = ResultTable(["j", "E", "z"], [list(r) for r in rows], provenance="test run")
    d = tmp_path_factory.mktemp("t")
    for fmt in ("csv", "json"):
        back = read_table(emit_table(t, fmt, d / f"t.{fmt}"))
        assert back == t


def test_table_validation(tmp_path):
    with pytest.raises(ValidationError):
        ResultTable(["a", "a"], [])
    with pytest.raises(ValidationError):
        ResultTable(["a", "b"], [[1.0]])
    with pytest.raises(ValidationError, match="collides"):
        ResultTable(["z", "z_re"], [[1j, 0.5]])
    with pytest.raises(ValidationError):
        emit_table(ResultTable(["a"], [[1.0]]), "xml", tmp_path / "t.xml")
    emit_table(ResultTable(["z"], [[1 + 2j]]), "csv", tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[2] == "z_re,z_im"


def test_config_defaults_and_fractions():
    cfg = parse_config("[numerics]\nh = 1/128\n[sweep]\ndeltas = 0.04, 0.02\n")
    assert cfg.numerics.h == 1 / 128
    assert cfg.sweep.deltas == [0.04, 0.02]
    V, W = cfg.potentials()
    assert W.coefficient(1) == -1j


@pytest.mark.parametrize("text, match", [
    ("[modle]\nV =\n", "unknown section"),
    ("[model]\ncolour = red\n", "unknown key"),
    ("[model]\nW = 2 0 -1\n", "parity"),
    ("[model]\nW = 1 0 -1, -1 0 -1\n", "reality"),
    ("[numerics]\nh = x\n", "expected a number"),
    ("[sweep]\ntheta_sharp = 1.2\n", "theta_sharp"),
    ("[output]\nformats = json, pdf\n", "unknown format"),
])
def test_config_rejections(text, match):
    with pytest.raises(ValidationError, match=match):
        parse_config(text)


def test_hash_ignores_location_and_threads():
    a = parse_config("[output]\ndirectory = /tmp/a\n[run]\nthreads = 4\n")
    b = RunConfig()
    assert a.hash() == b.hash()
    c = parse_config("[run]\nseed = 7\n")
    assert c.hash() != b.hash()
    assert json.loads(b.canonical())["model"]["wall"] == "tanh"


def test_svg_is_deterministic_and_tagged(tmp_path):
    pts = [(0.01, 9.87), (0.02, 9.88)]
    lines = {"j0": (np.array([0, 0.02]), np.array([9.86, 9.86]))}
    a = emit_svg_scatter(pts, lines, "delta", "E", tmp_path / "a.svg", title="t").read_bytes()
    b = emit_svg_scatter(pts, lines, "delta", "E", tmp_path / "b.svg", title="t").read_bytes()
    assert a == b
    text = a.decode()
    assert 'id="points"' in text and 'id="line_j0"' in text
    with pytest.raises(ValidationError):
        emit_svg_scatter([(0, np.nan)], {}, "x", "y", tmp_path / "c.svg")
