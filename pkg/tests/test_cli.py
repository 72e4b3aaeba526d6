import json
import subprocess
import sys

import pytest

from bubbletree.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- trees -------------------------------------------------------------------

def test_trees_census(capsys):
    code, out, _ = run(capsys, "trees", "3")
    assert code == 0
    assert out.splitlines()[0] == "20 trees, 7 ghost"


def test_trees_k1(capsys):
    code, out, _ = run(capsys, "trees", "1")
    assert code == 0
    assert out.startswith("2 trees, 0 ghost")


def test_trees_usage_error_is_exit_3(capsys):
    code, _out, err = run(capsys, "trees", "0")
    assert code == 3
    assert "K must be >= 1" in err


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["trees", "3", "--bogus"])
    assert e.value.code == 2


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2


def test_trees_hasse_and_dot(capsys):
    code, out, _ = run(capsys, "trees", "2", "--hasse")
    assert code == 0 and "cover relations" in out
    code, dot, _ = run(capsys, "trees", "2", "--dot")
    assert code == 0 and dot.startswith("digraph")


# -- flip ---------------------------------------------------------------------

def test_flip_k2(capsys):
    code, out, _ = run(capsys, "flip", "2", "--chi", "4", "--sigma", "0")
    assert code == 0
    assert "1 flip events" in out and "S^11" in out


def test_flip_k3_json(capsys):
    code, out, _ = run(capsys, "flip", "3", "--chi", "4", "--sigma", "0", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["audits"] == "ok"
    assert [e["energy"] for e in data["events"]] == [2, 2, 2, 2, 3, 3, 3]


def test_flip_k1_zero_events(capsys):
    code, out, _ = run(capsys, "flip", "1", "--chi", "4", "--sigma", "0")
    assert code == 0 and out.startswith("0 flip events")


def test_flip_parity_validation(capsys):
    code, _out, err = run(capsys, "flip", "2", "--chi", "3", "--sigma", "0")
    assert code == 3 and "even" in err


# -- fm ------------------------------------------------------------------------

@pytest.fixture
def family_file(tmp_path):
    data = {
        "schema": 1,
        "points": [
            {"weight": 1, "coords": [["0", "1"], ["0", "0", "1"], ["0"], ["0"]]},
            {"weight": 1, "coords": [["0", "1"], ["0", "0", "-1"], ["0"], ["0"]]},
            {"weight": 1, "coords": [["0", "2"], ["0"], ["0"], ["0"]]},
        ],
    }
    path = tmp_path / "family.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_fm_limit(capsys, family_file):
    code, out, _ = run(capsys, "fm-limit", family_file)
    assert code == 0
    assert "format: [x1[y1[z1,z2],y2]]" in out


def test_fm_limit_bad_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": 1, "points": []}')
    code, _out, err = run(capsys, "fm-limit", str(bad))
    assert code == 3 and "at least one point" in err
    code, _out, err = run(capsys, "fm-limit", str(tmp_path / "none.json"))
    assert code == 3 and "cannot read" in err


def test_fm_strata(capsys):
    code, out, _ = run(capsys, "fm-strata", "1,1,1")
    assert code == 0
    assert out.splitlines()[0].startswith("4 strata")


# -- walls / delta ----------------------------------------------------------------

@pytest.fixture
def hyperbolic_file(tmp_path):
    path = tmp_path / "H.json"
    path.write_text('{"schema": 1, "matrix": [[0,1],[1,0]]}')
    return str(path)


def test_walls_table(capsys, hyperbolic_file):
    code, out, _ = run(
        capsys, "walls", "--form", hyperbolic_file, "--c", "1,1",
        "--p1", "-2", "--from", "2,1", "--to", "1,2",
    )
    assert code == 0
    assert out.splitlines()[0].startswith("1 wall(s) crossed")


def test_walls_validation(capsys, hyperbolic_file):
    code, _out, err = run(
        capsys, "walls", "--form", hyperbolic_file, "--c", "1,1",
        "--p1", "-2", "--from", "1,0", "--to", "1,2",
    )
    assert code == 3 and "positive square" in err


def test_delta_r0(capsys):
    code, out, _ = run(
        capsys, "delta", "--p1", "-6", "--chi", "4", "--sigma", "0",
        "--alpha-sq", "-6",
    )
    assert code == 0
    assert "r = 0" in out and "(-1/8) * Aalpha^3" in out


def test_delta_with_form(capsys, hyperbolic_file):
    code, out, _ = run(
        capsys, "delta", "--p1", "-6", "--chi", "4", "--sigma", "0",
        "--form", hyperbolic_file, "--alpha", "1,-1",
    )
    assert code == 0 and "r = 1" in out


def test_delta_obstructed_is_validation_error(capsys):
    code, _out, err = run(
        capsys, "delta", "--p1", "-5", "--chi", "4", "--sigma", "0",
        "--alpha-sq", "-1",
    )
    assert code == 3 and "obstruction" in err


# -- localize ------------------------------------------------------------------------

@pytest.fixture
def cp1_file(tmp_path):
    lau = lambda terms: {"schema": 1, "symbols": {}, "terms": terms}
    data = {
        "schema": 1,
        "symbols": {},
        "loci": [
            {
                "name": "north",
                "dimension": 0,
                "multiplicity": "1",
                "restricted": lau([{"u": 1, "coeff": "1", "monomial": {}}]),
                "euler": lau([{"u": 1, "coeff": "1", "monomial": {}}]),
            },
            {
                "name": "south",
                "dimension": 0,
                "multiplicity": "1",
                "restricted": lau([{"u": 1, "coeff": "-1", "monomial": {}}]),
                "euler": lau([{"u": 1, "coeff": "-1", "monomial": {}}]),
            },
        ],
    }
    path = tmp_path / "cp1.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_localize(capsys, cp1_file):
    code, out, _ = run(capsys, "localize", cp1_file)
    assert code == 0 and out.strip() == "2"


def test_localize_json_deterministic(capsys, cp1_file):
    code1, out1, _ = run(capsys, "localize", cp1_file, "--json")
    code2, out2, _ = run(capsys, "localize", cp1_file, "--json")
    assert code1 == code2 == 0 and out1 == out2


# -- parse ----------------------------------------------------------------------------

def test_parse_tree(capsys):
    code, out, _ = run(capsys, "parse", "--tree", "[1[2,1]]")
    assert code == 0 and out.strip() == "[1[1,2]]"


def test_parse_tree_json(capsys):
    code, out, _ = run(capsys, "parse", "--tree", "[1[2,1]]", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["bracket"] == "[1[1,2]]"
    assert len(data["vertices"]) == 3 and len(data["edges"]) == 2


def test_parse_config(capsys):
    code, out, _ = run(capsys, "parse", "--config", "[x[y,-y],z]")
    assert code == 0 and out.strip() == "[x[y,-y],z]"


def test_parse_error_exit_code(capsys):
    code, _out, err = run(capsys, "parse", "--tree", "[1[1,]]")
    assert code == 3


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bubbletree", "trees", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("2 trees, 0 ghost")


# -- determinism across commands ---------------------------------------------------------

def test_byte_identical_reruns(capsys, hyperbolic_file):
    for argv in (
        ["trees", "3", "--json"],
        ["flip", "3", "--chi", "4", "--sigma", "0", "--json"],
        ["fm-strata", "1,1,1", "--json"],
        ["walls", "--form", hyperbolic_file, "--c", "1,1", "--p1", "-2",
         "--from", "2,1", "--to", "1,2", "--json"],
        ["delta", "--p1", "-6", "--chi", "4", "--sigma", "0",
         "--alpha-sq", "-2", "--json"],
    ):
        _c1, out1, _ = run(capsys, *argv)
        _c2, out2, _ = run(capsys, *argv)
        assert out1 == out2
