import json
import math
import warnings

import pytest

from lrd_spectra import cli, figures
from lrd_spectra.errors import ConfigError, NonConvergenceWarning


def test_parse_grid():
    g = figures.parse_grid("log:1:100:3")
    assert list(g.points()) == pytest.approx([1.0, 10.0, 100.0])
    assert list(figures.parse_grid("lin:0:1:5").points()) == pytest.approx([0, 0.25, 0.5, 0.75, 1])


@pytest.mark.parametrize("text", ["lin:0:1:1", "log:0:1:5", "lin:2:1:5", "lin:0:inf:5", "cubic:0:1:5",
                                  "lin:0:1", "lin:a:1:5"])
def test_bad_grids(text):
    with pytest.raises(ConfigError):
        figures.parse_grid(text)


def test_fmt():
    assert figures.fmt(0.1) == "0.1"
    assert figures.fmt(-0.0) == "0"
    assert figures.fmt(math.nan) == "nan"
    assert figures.fmt(-math.inf) == "-inf"
    assert figures.fmt(1 / 3) == "0.333333333333"


def test_every_figure_renders():
    for fid in figures.figure_ids():
        header, rows, flagged = figures.figure_table(fid)
        assert not flagged, fid
        assert rows and all(len(r) == len(header) for r in rows)


def test_figure_layouts():
    header, _, _ = figures.figure_table("8d")
    assert header[0] == "r" and len(header) == 3 and all("theta=" in h for h in header[1:])


def test_defaults_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "defaults.json"
    path.write_text(json.dumps({"figures": {"only": {"model": "exp_gamma", "grid": "lin:1:2:2",
                                                     "series": [{"name": "B", "quantity": "cov"}]}}}))
    monkeypatch.setenv(figures.DEFAULTS_ENV, str(path))
    assert figures.figure_ids() == ("only",)
    text, flagged = figures.figure_csv("only")
    assert text == "r,B\n1,0.5\n2,0.2\n" and not flagged
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        figures.load_defaults()


def test_models_list(capsys):
    assert cli.main(["models", "list"]) == cli.EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0].split()[:2] == ["id", "params"]
    assert len(out) == 10


def test_eval_writes_csv(capsys):
    code = cli.main(["eval", "--model", "exp_gamma", "--quantity", "cov", "--grid", "lin:1:3:2"])
    assert code == cli.EXIT_OK
    assert capsys.readouterr().out == "point,value\n1,0.5\n3,0.1\n"


@pytest.mark.parametrize("argv", [
    ["eval", "--model", "exp_gamma", "--quantity", "cov", "--grid", "lin:1:1:2"],
    ["eval", "--model", "nope", "--quantity", "cov", "--grid", "lin:1:2:2"],
    ["eval", "--model", "exp_gamma", "--quantity", "entropy", "--grid", "lin:1:2:2"],
    ["eval", "--model", "exp_gamma", "--quantity", "b_n_mc", "--grid", "lin:1:2:2"],
    ["eval", "--model", "directional_exp", "--quantity", "cov", "--grid", "lin:1:2:2"],
    ["eval", "--model", "exp_gamma", "--param", "a", "--quantity", "cov", "--grid", "lin:1:2:2"],
    ["verify", "--model", "exp_gamma", "--theorem", "T99"],
    ["verify", "--model", "exp_gamma", "--theorem", "OR-ball"],
    ["figure", "zz"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_verify_output(capsys):
    assert cli.main(["verify", "--model", "truncated_quadratic", "--param", "n=9", "--theorem", "T3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "CONFIRMED"
    assert "scale,side_a,side_b,ratio" in out
    assert cli.main(["verify", "--model", "truncated_quadratic", "--theorem", "T2"]) == 0
    assert capsys.readouterr().out.startswith("FAILED_AS_PREDICTED")


def test_eval_flags_nonconvergence(capsys, monkeypatch):
    real = figures.model_eval

    def flaky(spec, quantity, arg, tol=None):
        if arg > 1.5:
            warnings.warn("panel sums did not settle", NonConvergenceWarning)
        return real(spec, quantity, arg, tol=tol)

    monkeypatch.setattr(figures, "model_eval", flaky)
    code = cli.main(["eval", "--model", "exp_gamma", "--quantity", "cov", "--grid", "lin:1:2:2"])
    assert code == cli.EXIT_NUMERIC
    assert capsys.readouterr().out == "point,value,flag\n1,0.5,ok\n2,0.2,nonconverged\n"


def test_tol_must_be_positive(capsys):
    argv = ["eval", "--model", "exp_gamma", "--quantity", "cov", "--grid", "lin:1:2:2", "--tol", "0"]
    assert cli.main(argv) == cli.EXIT_USAGE


def test_figure_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["figure", "1a", "--out", str(a)]) == 0
    assert cli.main(["figure", "1a", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
