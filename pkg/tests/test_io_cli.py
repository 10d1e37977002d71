import numpy as np
import pytest
from numpy.testing import assert_allclose

from ihrlevy import cli
from ihrlevy.config import parse_config, process_spec_from, study_config_from
from ihrlevy.errors import DegenerateColumn, InsufficientData, InvalidConfig, ParseError
from ihrlevy.graph import Graph
from ihrlevy.io import read_edges, read_matrix, read_panel_csv, write_edges, write_matrix
from ihrlevy.pipeline import OUTPUT_FILES, FitOptions, fit_data, load_increments


def test_matrix_and_edges_roundtrip(tmp_path):
    a = np.array([[0, 1.5], [1.5, 0]])
    write_matrix(tmp_path / "g.csv", a)
    assert_allclose(read_matrix(tmp_path / "g.csv"), a)
    g = Graph(4, [(0, 3), (1, 2)])
    write_edges(tmp_path / "g.edges", g)
    assert (tmp_path / "g.edges").read_text() == "1 4\n2 3\n"
    assert read_edges(tmp_path / "g.edges", 4).edges == g.edges


def test_bad_edges(tmp_path):
    p = tmp_path / "bad.edges"
    p.write_text("1 2\n2 2\n")
    with pytest.raises(ParseError, match="line 2"):
        read_edges(p, 3)


def test_panel_errors(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ParseError, match="line 3"):
        read_panel_csv(p)
    p.write_text("a,b\n1,2\n1,3\n")
    with pytest.raises(DegenerateColumn):
        read_panel_csv(p)
    p.write_text("a,b\n1,2\n2,3\n")
    with pytest.raises(InsufficientData):
        read_panel_csv(p, min_rows=5)


def test_parse_config():
    cfg = parse_config("# comment\nalpha = 1.2\nstudy.n_list = (100, 200)\nname = hello\n")
    assert cfg == {"alpha": 1.2, "study.n_list": (100, 200), "name": "hello"}
    with pytest.raises(InvalidConfig):
        parse_config("novalue\n")


def test_process_config():
    cfg = parse_config("gamma = [[0, 1], [1, 0]]\npsi = [(1, 2, 0.5)]\nepsilon = 0.2\nn = 50\n")
    spec, sim = process_spec_from(cfg)
    assert spec.ising.psi[0, 1] == 0.5 and sim["eps"] == 0.2 and sim["n"] == 50
    with pytest.raises(InvalidConfig):
        process_spec_from(parse_config("gamma = [[0, 1], [1, 0]]\nbogus = 1\n"))


def test_study_config_keys():
    cfg = study_config_from(parse_config("study.d = 6\nstudy.a = 2\nreplications = 3\n"))
    assert (cfg.d, cfg.a, cfg.replications) == (6, 2, 3)
    with pytest.raises(InvalidConfig):
        study_config_from({"study.unknown": 1})


def _write_process(tmp_path):
    (tmp_path / "g.csv").write_text("0,1,2\n1,0,1.5\n2,1.5,0\n")
    (tmp_path / "proc.cfg").write_text("gamma = g.csv\npsi = [(1, 2, 0.4), (2, 3, -0.3)]\nn = 1500\nepsilon = 0.1\n")
    return tmp_path / "proc.cfg"


def test_cli_pipeline(tmp_path):
    cfg = _write_process(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["--out-dir", str(out), "--seed", "1", "simulate", "--config", str(cfg)]) == 0
    panel = out / "increments.csv"
    assert cli.main(["--out-dir", str(out), "estimate-variogram", "--panel", str(panel)]) == 0
    assert cli.main(["--out-dir", str(out), "learn-graph", "--gamma", str(out / "gamma_hat.csv"), "--n", "1500"]) == 0
    (tmp_path / "t.edges").write_text("1 2\n2 3\n")
    assert cli.main(["--out-dir", str(out), "fit-ising", "--panel", str(panel), "--graph", str(tmp_path / "t.edges")]) == 0
    for name in ("gamma_hat.csv", "graph.edges", "penalty_path.csv", "psi_fit.csv", "weights.csv", "trace.csv"):
        assert (out / name).exists()
    lines = (out / "weights.csv").read_text().splitlines()
    assert lines[0] == "orthant,gamma" and len(lines) == 9


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["--out-dir", str(tmp_path), "simulate", "--config", str(tmp_path / "none.cfg")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\nx,3\n")
    assert cli.main(["--out-dir", str(tmp_path), "estimate-variogram", "--panel", str(bad)]) == 3
    assert "line 3" in capsys.readouterr().err
    g = tmp_path / "g.csv"
    g.write_text("0,-1\n-1,0\n")
    (tmp_path / "c.cfg").write_text("gamma = g.csv\n")
    assert cli.main(["--out-dir", str(tmp_path), "simulate", "--config", str(tmp_path / "c.cfg")]) == 4


def test_cli_help_lists_keys(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    text = capsys.readouterr().out
    for key in ("gamma", "psi", "alpha", "epsilon", "study."):
        assert key in text


def test_run_study_cli(tmp_path):
    (tmp_path / "s.cfg").write_text("study.d = 5\nstudy.replications = 1\nstudy.n_list = (800,)\n")
    out = tmp_path / "st"
    assert cli.main(["--out-dir", str(out), "--seed", "3", "run-study", "--config", str(tmp_path / "s.cfg")]) == 0
    for name in ("study_results.csv", "study_timing.csv", "f1_boxplot.csv"):
        assert (out / name).exists()


def _small_panel(tmp_path, n=1500):
    from ihrlevy.io import write_panel
    from ihrlevy.rng import make_rng
    from ihrlevy.study import StudyConfig, gen_barabasi_albert, gen_model
    from ihrlevy.levy import simulate_increments

    rng = make_rng(8)
    g = gen_barabasi_albert(5, 1, rng)
    spec = gen_model(g, StudyConfig(d=5), rng)
    panel = simulate_increments(spec, n, 1.0, 0.1, rng)
    write_panel(tmp_path / "panel.csv", panel)
    return tmp_path / "panel.csv", panel


def test_fit_data_outputs(tmp_path):
    path, _ = _small_panel(tmp_path)
    rep = fit_data(path, tmp_path / "fit", FitOptions())
    for name in OUTPUT_FILES:
        assert (tmp_path / "fit" / name).exists()
    rows = np.genfromtxt(tmp_path / "fit" / "m_compare.csv", delimiter=",", names=True)
    assert_allclose(rows["m_empirical"], rows["half_one_plus_a"], atol=1e-12)
    chi = np.genfromtxt(tmp_path / "fit" / "chi_compare.csv", delimiter=",", names=True, dtype=None, encoding=None)
    assert np.all(np.isfinite(chi["chi_implied"])) and np.all(np.isfinite(chi["chi_empirical"]))
    assert set(rep.chi_mad) == {"mst_chi", "mst_gamma", "eglearn"}


def test_fit_data_levels(tmp_path):
    _, panel = _small_panel(tmp_path, 300)
    lv = np.exp(np.cumsum(0.01 * panel.data, axis=0))
    p = tmp_path / "levels.csv"
    np.savetxt(p, lv, delimiter=",", header="a,b,c,d,e", comments="")
    inc = load_increments(p, "logdiff")
    assert inc.n == 299
    assert_allclose(inc.data, np.diff(np.log(lv), axis=0))


def test_fit_data_constant_column(tmp_path):
    x = np.random.default_rng(0).standard_cauchy(size=(200, 3))
    x[:, 1] = 4.0
    p = tmp_path / "c.csv"
    np.savetxt(p, x, delimiter=",", header="a,b,c", comments="")
    with pytest.raises(DegenerateColumn):
        fit_data(p, tmp_path / "o")
    assert cli.main(["--out-dir", str(tmp_path / "o"), "fit-data", "--panel", str(p)]) == 3
