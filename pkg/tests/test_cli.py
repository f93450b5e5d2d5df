"""Command-line workflows: ingestion, artifacts, determinism, exit codes."""

import csv
import json

import numpy as np
import pytest

from wadbounds.cli import main, read_config_file, resolve_settings, build_parser

from conftest import linear_sample


def write_sample_csv(path, sample):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y_lower", "y_upper"] + [f"z{j + 1}" for j in range(sample.ell)])
        for lo, hi, z in zip(sample.y_lower, sample.y_upper, sample.z):
            writer.writerow([repr(float(lo)), repr(float(hi))] + [repr(float(v)) for v in z])


@pytest.fixture
def sample_csv(tmp_path):
    path = tmp_path / "data.csv"
    write_sample_csv(path, linear_sample(60, seed=0, width=0.5))
    return str(path)


def read_all(outdir):
    return {p.name: p.read_bytes() for p in sorted(outdir.iterdir())}


class TestEstimateCommand:
    def test_artifacts_written(self, sample_csv, tmp_path):
        out = tmp_path / "out"
        assert main(["estimate", sample_csv, "-o", str(out), "--grid-m", "16"]) == 0
        names = {p.name for p in out.iterdir()}
        assert names == {"support.csv", "hull.csv", "bounds.csv", "meta.json"}
        support = (out / "support.csv").read_text().splitlines()
        assert support[0] == "angle,p1,p2,raw_value,hull_value"
        meta = json.loads((out / "meta.json").read_text())
        assert meta["kernel"]["family"] == "gaussian"
        assert meta["grid_M"] == 16

    def test_reruns_byte_identical(self, sample_csv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["estimate", sample_csv, "-o", str(out), "--grid-m", "16", "--seed", "7"]) == 0
        assert read_all(a) == read_all(b)

    def test_degenerate_input_single_hull_point(self, tmp_path):
        path = tmp_path / "point.csv"
        write_sample_csv(path, linear_sample(50, seed=1, width=0.0))
        out = tmp_path / "out"
        assert main(["estimate", str(path), "-o", str(out), "--grid-m", "16"]) == 0
        rows = (out / "hull.csv").read_text().splitlines()[1:]
        pts = np.array([[float(v) for v in r.split(",")] for r in rows])
        assert np.max(np.ptp(pts, axis=0)) < 1e-10

    def test_nondegenerate_bounds_widths_positive(self, sample_csv, tmp_path):
        out = tmp_path / "out"
        assert main(["estimate", sample_csv, "-o", str(out), "--grid-m", "16"]) == 0
        for line in (out / "bounds.csv").read_text().splitlines()[1:]:
            _, lo, hi = line.split(",")
            assert float(hi) > float(lo)

    def test_higher_order_kernel_flag(self, sample_csv, tmp_path):
        out = tmp_path / "out"
        code = main(
            ["estimate", sample_csv, "-o", str(out), "--grid-m", "16", "--kernel", "higher_order_gaussian"]
        )
        assert code == 0
        meta = json.loads((out / "meta.json").read_text())
        assert meta["kernel"]["order"] == 3
        assert meta["moment_report"]["passed"] is True


class TestIngestErrors:
    def test_missing_header(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n1,2,3\n")
        assert main(["estimate", str(path), "-o", str(tmp_path / "o")]) == 2

    def test_interval_violation_names_line(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        lines = ["y_lower,y_upper,z1"] + ["0.0,1.0,%f" % (i * 0.1) for i in range(10)]
        lines[6] = "2.0,1.0,0.5"  # file line 7
        path.write_text("\n".join(lines) + "\n")
        assert main(["estimate", str(path), "-o", str(tmp_path / "o")]) == 2
        assert "7" in capsys.readouterr().err

    def test_nonnumeric_field(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("y_lower,y_upper,z1\n0.0,1.0,abc\n0.0,1.0,0.5\n")
        assert main(["estimate", str(path), "-o", str(tmp_path / "o")]) == 2

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("y_lower,y_upper,z1,z2\n0.0,1.0,0.5\n0.0,1.0,0.5,0.6\n")
        assert main(["estimate", str(path), "-o", str(tmp_path / "o")]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["estimate", str(tmp_path / "nope.csv"), "-o", str(tmp_path / "o")]) == 2

    def test_singular_renormalization_exit_code(self, tmp_path):
        rng = np.random.default_rng(3)
        z1 = rng.standard_normal(30)
        path = tmp_path / "collinear.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y_lower", "y_upper", "z1", "z2"])
            for v in z1:
                writer.writerow([repr(float(v) - 0.5), repr(float(v) + 0.5), repr(float(v)), repr(float(v))])
        code = main(["estimate", str(path), "-o", str(tmp_path / "o"), "--renormalize", "--grid-m", "8"])
        assert code == 3


class TestInferCommand:
    def test_confidence_artifact(self, sample_csv, tmp_path):
        out = tmp_path / "out"
        code = main(["infer", sample_csv, "-o", str(out), "--grid-m", "12", "--b", "100"])
        assert code == 0
        lines = (out / "confidence.csv").read_text().splitlines()
        assert lines[0] == "record,index,p1,p2,value,lower,upper"
        records = {line.split(",")[0] for line in lines[1:]}
        assert records == {"radius", "expanded_support", "coordinate_interval", "coordinate_radius"}
        meta = json.loads((out / "meta.json").read_text())
        assert meta["bootstrap"]["B"] == 100

    def test_reruns_byte_identical(self, sample_csv, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["infer", sample_csv, "-o", str(out), "--grid-m", "12", "--b", "100", "--seed", "5"]) == 0
        assert read_all(a) == read_all(b)


class TestSimulateCommand:
    ARGS = [
        "simulate",
        "--n-values", "80",
        "--c-values", "0.5",
        "--h-values", "0.5,0.7",
        "--replications", "2",
        "--grid-m", "8",
        "--oracle-draws", "20000",
    ]

    def test_risk_table_layout(self, tmp_path):
        out = tmp_path / "out"
        assert main(self.ARGS + ["-o", str(out)]) == 0
        lines = (out / "risk_table.csv").read_text().splitlines()
        assert lines[0] == "n,c,h,R_H,R_IH,R_OH,se_RH,se_RIH,se_ROH,failures,R"
        assert len(lines) == 3
        payload = json.loads((out / "risk_table.json").read_text())
        assert len(payload["rows"]) == 2

    def test_single_replication_empty_se_cells(self, tmp_path):
        out = tmp_path / "out"
        args = [a if a != "2" else "1" for a in self.ARGS]
        assert main(args + ["-o", str(out)]) == 0
        row = (out / "risk_table.csv").read_text().splitlines()[1].split(",")
        assert row[6:9] == ["", "", ""]

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(self.ARGS + ["-o", str(out), "--seed", "9"]) == 0
        assert read_all(a) == read_all(b)

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(self.ARGS + ["-o", str(a), "--jobs", "1"]) == 0
        assert main(self.ARGS + ["-o", str(b), "--jobs", "2"]) == 0
        assert read_all(a)["risk_table.csv"] == read_all(b)["risk_table.csv"]


class TestOracleCommand:
    def test_bounds_positive_width(self, tmp_path):
        out = tmp_path / "out"
        code = main(["oracle", "-o", str(out), "--c", "1.0", "--oracle-draws", "50000", "--grid-m", "16"])
        assert code == 0
        for line in (out / "bounds.csv").read_text().splitlines()[1:]:
            _, lo, hi = line.split(",")
            assert float(hi) > float(lo)


class TestConfigHandling:
    def test_config_file_parsed(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("h = 0.4\nkernel = gaussian  # comment\n\ngrid_m = 12\n")
        parser = build_parser()
        args = parser.parse_args(["estimate", "in.csv", "-o", "out", "--config", str(cfg)])
        settings = resolve_settings(args)
        assert settings["h"] == 0.4
        assert settings["grid_m"] == 12
        assert settings["htilde"] == 0.4  # defaults to h

    def test_flags_override_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("h = 0.4\n")
        parser = build_parser()
        args = parser.parse_args(["estimate", "in.csv", "-o", "out", "--config", str(cfg), "--h", "0.9"])
        assert resolve_settings(args)["h"] == 0.9

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bandwidth = 0.4\n")
        with pytest.raises(ValueError):
            read_config_file(str(cfg))

    def test_unknown_config_key_exit_code(self, sample_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bandwidth = 0.4\n")
        assert main(["estimate", sample_csv, "-o", str(tmp_path / "o"), "--config", str(cfg)]) == 1


class TestArgumentParsing:
    def test_version_exits_cleanly(self, capsys):
        assert main(["--version"]) == 0

    def test_unknown_command(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_output_flag(self, sample_csv, capsys):
        assert main(["estimate", sample_csv]) == 1
