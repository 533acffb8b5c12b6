from pathlib import Path

import numpy as np
import pytest

from ktlab.config import DEFAULT_MEASURE, Scenario, parse_config, parse_config_text, parse_operator
from ktlab.errors import ParseError, RangeError, UnknownKey
from ktlab.operators import DiagonalOperator, MatrixOperator
from ktlab.verify import THEOREM_IDS

ROOT = Path(__file__).resolve().parents[1]


def test_minimal_config_gets_defaults(tmp_path):
    p = tmp_path / "mini.cfg"
    p.write_text("operator = diagonal polynomial(alpha=2, N=100000)\n")
    (sc,) = parse_config(p)
    assert sc.name == "mini"
    assert (sc.T_max, sc.S_min, sc.points_per_decade, sc.epsilon) == (1e6, 1e-6, 16, 0.1)
    assert sc.measure == DEFAULT_MEASURE and sc.checks == () and sc.strict is False
    op = sc.build_operator()
    assert isinstance(op, DiagonalOperator) and op.n == 100001


def test_epsilon_out_of_range():
    with pytest.raises(RangeError) as exc:
        parse_config_text("operator = diagonal eigenvalues(0)\nepsilon = 1.5\n")
    assert exc.value.line == 2 and str(exc.value).startswith("line 2:")


def test_unknown_key():
    with pytest.raises(UnknownKey) as exc:
        parse_config_text("[a]\noperator = diagonal eigenvalues(0)\ncolour = red\n")
    assert exc.value.line == 3


@pytest.mark.parametrize("text,line", [
    ("[a]\noperator diagonal\n", 2),
    ("[a\n", 1),
    ("[a]\noperator = diagonal nope(1)\n", 2),
    ("[a]\noperator = matrix [[1, 2], [3]]\n", 2),
    ("[a]\noperator = diagonal eigenvalues(0)\nchecks = Bogus\n", 3),
    ("[a]\noperator = diagonal eigenvalues(0)\nmeasure = atom(1)\n", 3),
    ("[a]\noperator = diagonal eigenvalues(0)\nc = 0.1\nc = 0.2\n", 4),
    ("[a]\nc = 0.3\n", 1),
    ("[a]\noperator = diagonal eigenvalues(0)\n[a]\noperator = diagonal eigenvalues(0)\n", 3),
    ("[a]\noperator = diagonal polynomial(alpha=2)\n", 2),
    ("[a]\noperator = diagonal polynomial(alpha=2, N=1.5)\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_config_text(text)
    assert exc.value.line == line


@pytest.mark.parametrize("key,value", [("c", "1"), ("S_min", "2"), ("T_max", "1"),
                                       ("points_per_decade", "3"), ("C_scan", "0, 1")])
def test_range_errors(key, value):
    with pytest.raises(RangeError):
        parse_config_text(f"operator = diagonal eigenvalues(0)\n{key} = {value}\n")


def test_golden_alpha2():
    (sc,) = parse_config(ROOT / "scenarios" / "alpha2.cfg")
    expected = Scenario(
        name="alpha2",
        operator=parse_operator("diagonal polynomial(alpha=2, N=1000000)"),
        measure="expdensity(1, 0; 1) - atom(0, 1, 0)",
        checks=("MLowerBound", "Dichotomy_2_2", "ResolventBound_2_3", "LowerBound_2_4",
                "LogCharacterization_2_5", "S0InftyProxy_3_1", "MuDecay_3_4", "UpperBound_3_5"),
        epsilon=0.1, c=0.5,
    )
    assert sc == expected


def test_catalog_parses():
    scs = parse_config(ROOT / "scenarios" / "catalog.cfg")
    names = [s.name for s in scs]
    assert names == ["S1_alpha1.5", "S1_alpha2", "S1_alpha3", "S2_exponential", "S3_lacunary",
                     "S3b_slowly_varying", "S4_splitting", "S5_jordan"]
    assert all(set(s.checks) <= set(THEOREM_IDS) for s in scs)


def test_operator_forms():
    m = parse_operator("matrix [[0, 1], [0, -1]]").build()
    assert isinstance(m, MatrixOperator) and m.n == 2
    r1 = parse_operator("matrix random(n=5, seed=3)").build()
    r2 = parse_operator("matrix random(n=5, seed=3)").build(seed=99)
    assert np.array_equal(r1.entries, r2.entries)
    r3 = parse_operator("matrix random(n=5)").build(seed=7)
    assert r3.spectral_abscissa == pytest.approx(-0.1)
    d = parse_operator("diagonal eigenvalues(0, -1+2j, -0.5)").build()
    assert d.n == 3


def test_comments_and_default_section():
    scs = parse_config_text("# header\noperator = diagonal eigenvalues(0)  # zero\n[b]\n"
                            "operator = diagonal eigenvalues(-1)\nstrict = yes\n", default_name="x")
    assert [s.name for s in scs] == ["x", "b"] and scs[1].strict
