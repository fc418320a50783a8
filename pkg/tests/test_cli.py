import csv

import pytest

import bathtub as bt
from bathtub import cli

PAPER_CONF = """\
network.L = 10
fd.variant = trapezoidal
fd.u = 30
fd.C = 750
fd.w = 10
fd.kappa = 200
demand.influx.kind = pulse
demand.influx.ramp = 10000
demand.influx.plateau = 4000
demand.influx.end = 1.0
demand.distance.kind = uniform
demand.distance.Btilde_nodes = 0:2, 0.4:5, 0.6:5, 1.0:2
grid.dx = 0.015625
grid.X = 5
grid.stop = z:30
model.kind = generalized
outputs = series,ksurface,audit
"""

MINIMAL_CONF = """\
network.L = 10
fd.variant = greenshields
fd.u = 30
fd.kappa = 200
demand.influx.kind = zero
demand.distance.kind = exponential
demand.distance.B = 2
grid.dx = 0.25
grid.X = 4
grid.stop = t:0.25
model.kind = generalized
"""

GRIDLOCK_CONF = """\
network.L = 10
fd.variant = trapezoidal
fd.u = 30
fd.C = 750
fd.w = 10
fd.kappa = 200
demand.influx.kind = constant
demand.influx.rate = 4000
demand.distance.kind = exponential
demand.distance.B = 2
grid.dx = 0.03125
grid.X = 16
grid.stop = t:8
model.kind = generalized
outputs = series
"""


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestParsing:
    def test_minimal_config_fills_defaults(self):
        cfg = cli.parse_config(MINIMAL_CONF)
        assert cfg.outputs == ("series",)
        assert cfg.scheme == "characteristic"
        assert isinstance(cfg.ic, bt.EmptyNetwork)
        assert cfg.output_dir == "."

    def test_invalid_kappa_names_the_key(self):
        bad = MINIMAL_CONF.replace("fd.kappa = 200", "fd.kappa = -5")
        with pytest.raises(bt.ConfigError, match="fd.kappa"):
            cli.parse_config(bad)

    def test_duplicate_key_cites_both_lines(self):
        bad = MINIMAL_CONF + "network.L = 12\n"
        with pytest.raises(bt.ConfigError, match="line 12.*line 1"):
            cli.parse_config(bad)

    def test_unknown_key_is_an_error(self):
        with pytest.raises(bt.ConfigError, match="unknown key"):
            cli.parse_config(MINIMAL_CONF + "grid.foo = 1\n")

    def test_missing_equals_reports_line(self):
        with pytest.raises(bt.ConfigError, match="line 2"):
            cli.parse_config("network.L = 10\nnonsense\n")

    def test_comments_and_blanks_ignored(self):
        cfg = cli.parse_config("# header\n\n" + MINIMAL_CONF)
        assert cfg.L == 10.0

    def test_node_lists_accumulate_over_lines(self):
        split = MINIMAL_CONF.replace(
            "demand.distance.B = 2",
            "demand.distance.Btilde_nodes = 0:2, 0.4:5\n"
            "demand.distance.Btilde_nodes = 0.6:5, 1.0:2")
        cfg = cli.parse_config(split)
        assert cfg.btilde(0.5) == 5.0

    def test_btilde_nodes_reproduce_peak_profile(self):
        cfg = cli.parse_config(PAPER_CONF)
        formula = lambda t: 2.0 + max(0.0, min(7.5 * t, 3.0, 7.5 * (1.0 - t)))
        for t in (0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5):
            assert cfg.btilde(t) == pytest.approx(formula(t), abs=1e-12)

    def test_vickrey_requires_exponential_distances(self):
        bad = MINIMAL_CONF.replace("model.kind = generalized",
                                   "model.kind = vickrey")
        bad = bad.replace("demand.distance.kind = exponential",
                          "demand.distance.kind = uniform")
        with pytest.raises(bt.ConfigError):
            cli.parse_config(bad)


class TestRun:
    def test_paper_config_reaches_horizon(self, tmp_path):
        cfg = cli.parse_config(PAPER_CONF)
        code = cli.run(cfg, output_dir=str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "series.csv")
        lam = [float(r["lambda"]) for r in rows]
        t = [float(r["t"]) for r in rows]
        assert 0.75 <= t[lam.index(max(lam))] <= 1.0

    def test_series_satisfies_conservation_identity(self, tmp_path):
        cfg = cli.parse_config(PAPER_CONF)
        cli.run(cfg, output_dir=str(tmp_path))
        rows = read_csv(tmp_path / "series.csv")
        lam0 = float(rows[0]["lambda"])
        for r in rows:
            lhs = float(r["G"])
            rhs = lam0 + float(r["F"]) - float(r["lambda"])
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, lam0 + float(r["F"]))

    def test_ksurface_layout(self, tmp_path):
        cfg = cli.parse_config(PAPER_CONF)
        cli.run(cfg, output_dir=str(tmp_path))
        with open(tmp_path / "ksurface.csv") as fh:
            header = fh.readline().strip().split(",")
            row = fh.readline().strip().split(",")
        assert header[0] == "t"
        assert float(header[1]) == 0.0
        assert float(header[-1]) == 5.0
        assert len(row) == len(header)

    def test_gridlock_exits_2_with_outputs(self, tmp_path):
        cfg = cli.parse_config(GRIDLOCK_CONF)
        code = cli.run(cfg, output_dir=str(tmp_path))
        assert code == 2
        rows = read_csv(tmp_path / "series.csv")
        assert float(rows[-1]["v"]) < 1e-9

    def test_zero_influx_gives_all_zero_counts(self, tmp_path):
        cfg = cli.parse_config(MINIMAL_CONF)
        code = cli.run(cfg, output_dir=str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "series.csv")
        assert all(float(r["lambda"]) == 0.0 for r in rows)

    def test_traveltimes_output(self, tmp_path):
        text = PAPER_CONF.replace("outputs = series,ksurface,audit",
                                  "outputs = series,traveltimes")
        cfg = cli.parse_config(text)
        assert cli.run(cfg, output_dir=str(tmp_path)) == 0
        rows = read_csv(tmp_path / "traveltimes.csv")
        assert len(rows) > 10
        for r in rows:
            assert float(r["exact"]) > 0.0

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = cli.parse_config(PAPER_CONF)
        d1, d2 = tmp_path / "a", tmp_path / "b"
        cli.run(cfg, output_dir=str(d1))
        cli.run(cli.parse_config(PAPER_CONF), output_dir=str(d2))
        for name in ("series.csv", "ksurface.csv", "audit.csv"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_main_entry_point(self, tmp_path):
        conf = tmp_path / "run.conf"
        conf.write_text(MINIMAL_CONF)
        code = cli.main(["run", str(conf), "--out", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "series.csv").exists()

    def test_main_reports_config_errors(self, tmp_path, capsys):
        conf = tmp_path / "bad.conf"
        conf.write_text("nonsense\n")
        assert cli.main(["run", str(conf)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_vickrey_model_runs(self, tmp_path):
        text = MINIMAL_CONF.replace("model.kind = generalized",
                                    "model.kind = vickrey")
        text = text.replace("grid.stop = t:0.25", "grid.stop = t:0.25\ngrid.dt = 0.001")
        text = text.replace("demand.influx.kind = zero",
                            "demand.influx.kind = constant\n"
                            "demand.influx.rate = 1000")
        cfg = cli.parse_config(text)
        code = cli.run(cfg, output_dir=str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "series.csv")
        assert float(rows[-1]["lambda"]) > 0.0

    def test_constant_distance_model_runs(self, tmp_path):
        text = MINIMAL_CONF.replace("model.kind = generalized",
                                    "model.kind = constant")
        text = text.replace("demand.distance.kind = exponential",
                            "demand.distance.kind = deterministic")
        text = text.replace("grid.stop = t:0.25",
                            "grid.stop = z:6\ngrid.dz = 0.125")
        text = text.replace("demand.influx.kind = zero",
                            "demand.influx.kind = constant\n"
                            "demand.influx.rate = 500")
        cfg = cli.parse_config(text)
        assert cli.run(cfg, output_dir=str(tmp_path)) == 0


class TestTableInputs:
    def test_tabulated_diagram_from_csv(self, tmp_path):
        table = tmp_path / "fd.csv"
        table.write_text("density,speed\n0,30\n100,10\n200,0\n")
        text = MINIMAL_CONF.replace(
            "fd.variant = greenshields\nfd.u = 30\nfd.kappa = 200",
            f"fd.variant = tabulated\nfd.table = {table}")
        cfg = cli.parse_config(text)
        assert cfg.fd.speed(50.0) == pytest.approx(20.0)
        assert cli.run(cfg, output_dir=str(tmp_path / "out")) == 0

    def test_tabulated_survival_from_csv(self, tmp_path):
        table = tmp_path / "surv.csv"
        # first row: x grid; then rows of t followed by survival values
        table.write_text("0,1,2\n0.0,1,0.5,0\n1.0,1,0.8,0\n")
        text = MINIMAL_CONF.replace(
            "demand.distance.kind = exponential\ndemand.distance.B = 2",
            f"demand.distance.kind = tabulated\ndemand.table = {table}")
        cfg = cli.parse_config(text)
        assert cfg.distances.survival(0.0, 1.0) == pytest.approx(0.5)
        assert cli.run(cfg, output_dir=str(tmp_path / "out")) == 0

    def test_tabulated_initial_profile_from_csv(self, tmp_path):
        table = tmp_path / "ic.csv"
        table.write_text("x,count\n0,50\n1,25\n2,0\n")
        text = MINIMAL_CONF + f"ic.kind = tabulated\nic.table = {table}\n"
        cfg = cli.parse_config(text)
        assert cfg.ic.lambda0 == 50.0
        assert cli.run(cfg, output_dir=str(tmp_path / "out")) == 0

    def test_missing_table_file_is_a_config_error(self, tmp_path):
        text = MINIMAL_CONF.replace(
            "fd.variant = greenshields\nfd.u = 30\nfd.kappa = 200",
            "fd.variant = tabulated\nfd.table = /nonexistent.csv")
        with pytest.raises(bt.ConfigError, match="fd.table"):
            cli.parse_config(text)


class TestSweep:
    def test_peak_count_monotone_in_plateau(self, tmp_path):
        text = PAPER_CONF.replace("grid.dx = 0.015625", "grid.dx = 0.0625")
        text = text.replace("outputs = series,ksurface,audit",
                            "outputs = series")
        code = cli.sweep(text, "demand.influx.plateau",
                         [2000.0, 3000.0, 4000.0], output_dir=str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "summary.csv")
        assert len(rows) == 3
        peaks = [float(r["peak_lambda"]) for r in rows]
        assert peaks == sorted(peaks)

    def test_dx_sweep_emits_convergence_orders(self, tmp_path):
        text = PAPER_CONF.replace("outputs = series,ksurface,audit",
                                  "outputs = series")
        code = cli.sweep(text, "grid.dx", [2**-3, 2**-4, 2**-5, 2**-6],
                         output_dir=str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "convergence.csv")
        orders = [float(r["order"]) for r in rows]
        assert all(0.7 <= p <= 1.3 for p in orders)

    def test_empty_value_list_rejected(self, tmp_path):
        with pytest.raises(bt.ConfigError):
            cli.sweep(PAPER_CONF, "grid.dx", [], output_dir=str(tmp_path))

    def test_failed_run_marks_row_and_exit(self, tmp_path):
        code = cli.sweep(PAPER_CONF, "network.L", [10.0, -1.0],
                         output_dir=str(tmp_path))
        assert code == 1
        rows = read_csv(tmp_path / "summary.csv")
        assert rows[0]["status"] == "ok"
        assert rows[1]["status"].startswith("failed")
