import io
import json
import math

import numpy as np
import pytest

from lpboot.cli import EXIT_CONFIG, EXIT_DATA, main
from lpboot.config import OutputSpec, ingest_csv, parse_config, with_overrides
from lpboot.dgp import Series
from lpboot.errors import ConfigError, DataError, IoError, MissingColumn, NonNumeric, ParseError
from lpboot.harness import CoverageRecord, CoverageReport
from lpboot.infer import infer
from lpboot.intervals import IntervalMethod
from lpboot.report import REPORT_HEADER, emit_report, read_report_csv, render_table

MINIMAL = {"design": 1, "rho": [0.95], "n": 95, "horizons": [1], "alpha": 0.1, "R": 10, "B": 50, "seed": 7}


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2))
    return path


def record(cov=0.9004, method=IntervalMethod.RB, h=1, rho=0.95):
    return CoverageRecord(1, rho, 95, h, method, cov, math.sqrt(cov * (1 - cov) / 5000), 0.35123, 0, 12.5, 5000)


class TestParseConfig:
    def test_minimal_study(self):
        cfg = parse_config(MINIMAL)
        s = cfg.study
        assert cfg.mode == "study" and cfg.infer is None
        assert (s.designs, s.rhos, s.replications, s.bootstrap_B, s.base_seed) == ((1,), (0.95,), 10, 50, 7)

    def test_nested_block_from_file(self, tmp_path):
        path = write_json(tmp_path / "c.json", {"mode": "study", "study": MINIMAL,
                                                "output": {"csv": str(tmp_path / "o.csv"), "table": False}})
        cfg = parse_config(path)
        assert cfg.study.n == 95 and cfg.output.csv == tmp_path / "o.csv" and not cfg.output.table

    def test_alpha_out_of_range(self, tmp_path):
        path = write_json(tmp_path / "c.json", {**MINIMAL, "alpha": 1.5})
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert err.value.field == "alpha"
        assert "alpha" in str(err.value)
        lines = path.read_text().splitlines()
        assert err.value.line == next(i for i, ln in enumerate(lines, 1) if '"alpha"' in ln)

    def test_horizon_too_large(self):
        with pytest.raises(ConfigError) as err:
            parse_config({**MINIMAL, "horizons": [94]})
        assert err.value.field == "horizons"

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            parse_config({**MINIMAL, "replicatons": 5})
        assert err.value.field == "replicatons"

    def test_duplicate_alias(self):
        with pytest.raises(ConfigError):
            parse_config({**MINIMAL, "replications": 5})

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text('{\n  "n": 95,\n  "alpha": ,\n}')
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert err.value.line == 3

    def test_missing_output_dir(self, tmp_path):
        with pytest.raises(ConfigError) as err:
            parse_config({**MINIMAL, "output": {"csv": str(tmp_path / "nope" / "o.csv")}})
        assert err.value.field == "output.csv"

    def test_both_modes_rejected(self):
        with pytest.raises(ConfigError):
            parse_config({"mode": "study", "study": MINIMAL, "infer": {}})

    def test_infer_mode(self, tmp_path):
        cfg = parse_config({"infer": {"input_csv": "x.csv", "column": "y", "horizons": [1, 4],
                                      "methods": ["rb", "AA"], "B": 99}})
        assert cfg.mode == "infer" and cfg.study is None
        assert cfg.infer.methods == (IntervalMethod.RB, IntervalMethod.AA) and cfg.infer.B == 99

    def test_paper_scale_flag(self):
        cfg = parse_config({**MINIMAL, "paper_scale": True})
        assert cfg.study.replications == 5000 and cfg.study.bootstrap_B == 1000

    def test_overrides(self):
        cfg = with_overrides(parse_config(MINIMAL), threads=3, seed=11)
        assert cfg.study.threads == 3 and cfg.study.base_seed == 11


class TestIngest:
    def write(self, tmp_path, text, name="d.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    def test_too_short(self, tmp_path):
        with pytest.raises(DataError):
            ingest_csv(self.write(tmp_path, "y\n1\n2\n3\n"), "y")

    def test_one_to_ten(self, tmp_path):
        s = ingest_csv(self.write(tmp_path, "y\n" + "\n".join(str(i) for i in range(1, 11)) + "\n"), "y")
        assert len(s.y) == 10 and s.y[0] == 1.0 and s.y[-1] == 10.0

    def test_nan_row(self, tmp_path):
        text = "t,y\n1,0.5\n2,0.1\n3,0.3\n4,NaN\n5,1\n6,2\n"
        with pytest.raises(NonNumeric) as err:
            ingest_csv(self.write(tmp_path, text), "y")
        assert err.value.row == 4

    @pytest.mark.parametrize("bad", ["abc", "", "inf"])
    def test_other_non_numeric(self, tmp_path, bad):
        text = f"t,y\n1,1\n2,2\n3,{bad}\n4,4\n5,5\n6,6\n"
        with pytest.raises(NonNumeric) as err:
            ingest_csv(self.write(tmp_path, text), "y")
        assert err.value.row == 3

    def test_missing_column(self, tmp_path):
        with pytest.raises(MissingColumn):
            ingest_csv(self.write(tmp_path, "x\n1\n2\n3\n4\n5\n"), "y")

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ParseError) as err:
            ingest_csv(self.write(tmp_path, "a,y\n1,2\n3\n4,5\n6,7\n8,9\n1,1\n"), "y")
        assert err.value.line == 3

    def test_bom_and_demean(self, tmp_path):
        p = tmp_path / "bom.csv"
        p.write_bytes("﻿y\n1\n2\n3\n4\n5\n".encode("utf-8"))
        np.testing.assert_allclose(ingest_csv(p, "y", demean=True).y, [-2, -1, 0, 1, 2])

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            ingest_csv(tmp_path / "none.csv", "y")


class TestEmitReport:
    def test_single_cell_csv(self, tmp_path):
        out = tmp_path / "r.csv"
        emit_report(CoverageReport([record()]), OutputSpec(csv=out, table=False))
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0] == "design,rho,n,h,method,coverage_pct,mc_se_pct,median_length,failed,seconds"
        assert lines[0].split(",") == REPORT_HEADER

    def test_table_two_decimals(self):
        buf = io.StringIO()
        emit_report(CoverageReport([record(0.9004)]), OutputSpec(), stream=buf)
        assert "90.04" in buf.getvalue()

    def test_table_row_order(self):
        recs = [record(0.8, h=6, rho=1.0), record(0.9, h=1, rho=1.0), record(0.85, h=18, rho=0.95),
                record(0.86, h=1, rho=0.95)]
        text = render_table(CoverageReport(recs))
        order = [text.index(v) for v in ("86.00", "85.00", "90.00", "80.00")]
        assert order == sorted(order)

    def test_empty(self, tmp_path):
        out = tmp_path / "r.csv"
        with pytest.raises(IoError):
            emit_report(CoverageReport([]), OutputSpec(csv=out))
        assert not out.exists()

    def test_round_trip(self, tmp_path):
        recs = [record(0.9004), record(2 / 3, IntervalMethod.AA_HC3, 12, 1.0)]
        out = tmp_path / "r.csv"
        emit_report(CoverageReport(recs), OutputSpec(csv=out, table=False))
        back = read_report_csv(out)
        for a, b in zip(recs, back):
            assert (a.design, a.rho, a.n, a.h, a.method) == (b.design, b.rho, b.n, b.h, b.method)
            assert b.coverage_rate == pytest.approx(a.coverage_rate, rel=1e-15)
            assert b.mc_se == pytest.approx(a.mc_se, rel=1e-15)
            assert b.median_length == a.median_length and b.wall_time == a.wall_time

    def test_json_mirror(self, tmp_path):
        out = tmp_path / "r.json"
        emit_report(CoverageReport([record()]), OutputSpec(json=out, table=False))
        doc = json.loads(out.read_text())
        assert list(doc["records"][0]) == REPORT_HEADER
        assert doc["records"][0]["coverage_pct"] == pytest.approx(90.04)

    def test_unwritable(self, tmp_path):
        with pytest.raises(IoError):
            emit_report(CoverageReport([record()]), OutputSpec(csv=tmp_path, table=False))

    def test_inference_result(self, tmp_path):
        y = np.cumsum(np.random.default_rng(0).normal(size=60))
        res = infer(Series(y), [1, 3], methods=["AA", "RB"], B=50)
        out = tmp_path / "i.csv"
        emit_report(res, OutputSpec(csv=out, table=False))
        assert len(out.read_text().splitlines()) == 5


class TestMain:
    def study_config(self, tmp_path, **extra):
        cfg = {**MINIMAL, "R": 4, "B": 20, "horizons": [1, 6],
               "output": {"csv": str(tmp_path / "out.csv"), "timing": False}, **extra}
        return write_json(tmp_path / "study.json", cfg)

    def test_study_success(self, tmp_path, capsys):
        assert main(["study", "--config", str(self.study_config(tmp_path))]) == 0
        assert "Design 1" in capsys.readouterr().out
        assert len((tmp_path / "out.csv").read_text().splitlines()) == 1 + 2 * 8

    def test_study_bytes_are_deterministic(self, tmp_path):
        cfg = self.study_config(tmp_path)
        main(["study", "--config", str(cfg), "--no-table"])
        first = (tmp_path / "out.csv").read_bytes()
        main(["study", "--config", str(cfg), "--no-table", "--threads", "3"])
        assert (tmp_path / "out.csv").read_bytes() == first

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "bad.json", {**MINIMAL, "alpha": 1.5})
        assert main(["study", "--config", str(cfg)]) == EXIT_CONFIG == 2
        assert "alpha" in capsys.readouterr().err

    def test_env_threads_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LPBOOT_THREADS", "bogus")
        assert main(["study", "--config", str(self.study_config(tmp_path)), "--no-table"]) == EXIT_CONFIG

    def test_infer_success(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        y = np.cumsum(np.random.default_rng(1).normal(size=80))
        data.write_text("y\n" + "\n".join(str(float(v)) for v in y) + "\n")
        out = tmp_path / "i.json"
        code = main(["infer", "--input", str(data), "--column", "y", "--horizons", "1,6",
                     "--method", "RB,AA", "--b", "100", "--seed", "3", "--json", str(out)])
        assert code == 0
        rows = json.loads(out.read_text())["records"]
        assert [(r["h"], r["method"]) for r in rows] == [(1, "RB"), (1, "AA"), (6, "RB"), (6, "AA")]
        assert all(r["lower"] <= r["beta_hat"] <= r["upper"] for r in rows)

    def test_infer_missing_column_exit(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("x\n1\n2\n3\n4\n5\n6\n")
        assert main(["infer", "--input", str(data), "--column", "y"]) == EXIT_DATA == 3

    def test_infer_horizon_too_long(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_text("y\n" + "\n".join(str(v) for v in np.random.default_rng(2).normal(size=10)) + "\n")
        assert main(["infer", "--input", str(data), "--column", "y", "--horizons", "8"]) == EXIT_CONFIG

    def test_infer_without_input(self):
        assert main(["infer", "--column", "y"]) == EXIT_CONFIG
