import os
import struct

import numpy as np
import pytest
from click.testing import CliRunner

from cubiph.cli import main
from cubiph.synth import synth_dataset, write_idx_images, write_idx_labels

RING_CSV = (
    "0.9,0.9,0.9,0.9,0.9\n"
    "0.9,0.2,0.2,0.2,0.9\n"
    "0.9,0.2,0.9,0.2,0.9\n"
    "0.9,0.2,0.2,0.2,0.9\n"
    "0.9,0.9,0.9,0.9,0.9\n"
)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def csv_dataset(tmp_path):
    d = tmp_path / "data"
    d.mkdir()
    (d / "a.csv").write_text(RING_CSV)
    (d / "b.csv").write_text("0.1,0.5\n0.3,0.8\n")
    return d


@pytest.fixture
def idx_dataset(tmp_path):
    pixels, labels = synth_dataset(6, size=12, seed=3)
    d = tmp_path / "idx"
    d.mkdir()
    write_idx_images(pixels, d / "train-images-idx3-ubyte")
    write_idx_labels(labels, d / "train-labels-idx1-ubyte")
    return d


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


class TestCompute:
    def test_per_image_files(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["compute", "--dataset", str(csv_dataset), "--format", "csv", "--out", str(out)])
        files = sorted(os.listdir(out))
        assert files == ["diagram_000000.csv", "diagram_000001.csv"]
        text = (out / "diagram_000000.csv").read_text()
        assert "1,0.2,0.9" in text  # the ring's hole

    def test_rerun_is_byte_identical(self, runner, csv_dataset, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        args = ["compute", "--dataset", str(csv_dataset), "--format", "csv"]
        run_ok(runner, args + ["--out", str(out1)])
        run_ok(runner, args + ["--out", str(out2)])
        for name in os.listdir(out1):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_single_file(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["compute", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out), "--single-file"])
        lines = (out / "diagrams.csv").read_text().splitlines()
        assert lines[0] == "image_id,degree,birth,death"

    def test_unreadable_path_exits_2(self, runner, tmp_path):
        missing = tmp_path / "nope.csv"
        result = runner.invoke(
            main, ["compute", "--dataset", str(missing), "--format", "csv", "--out", str(tmp_path)]
        )
        assert result.exit_code == 2
        assert "nope.csv" in result.output

    def test_idx_requires_labels(self, runner, idx_dataset, tmp_path):
        result = runner.invoke(
            main,
            ["compute", "--dataset", str(idx_dataset / "train-images-idx3-ubyte"),
             "--format", "idx", "--out", str(tmp_path)],
        )
        assert result.exit_code == 2


class TestLabels:
    def test_mnist_grid_headers(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["labels", "--dataset", str(csv_dataset), "--format", "csv", "--out", str(out)])
        header = (out / "labels.csv").read_text().splitlines()[0].split(",")
        thetas = [h for h in header if h.startswith("theta=")]
        assert thetas == [
            "theta=0.15", "theta=0.2", "theta=0.25", "theta=0.3", "theta=0.4",
            "theta=0.6", "theta=0.7", "theta=0.8", "theta=0.9", "theta=1",
        ]

    def test_cifar_grid_is_ten_equally_spaced(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["labels", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out), "--theta-grid", "cifar10"])
        header = (out / "labels.csv").read_text().splitlines()[0].split(",")
        thetas = [float(h.split("=")[1]) for h in header if h.startswith("theta=")]
        assert len(thetas) == 10
        assert thetas[0] == 0.15
        assert thetas[-1] == 0.55
        diffs = np.diff(thetas)
        assert np.allclose(diffs, diffs[0], atol=1e-6)

    def test_empty_dataset_header_only(self, runner, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        out = tmp_path / "out"
        run_ok(runner, ["labels", "--dataset", str(d), "--format", "csv", "--out", str(out)])
        lines = (out / "labels.csv").read_text().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("id,label,theta=")

    def test_idx_labels_flow(self, runner, idx_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, [
            "labels", "--dataset", str(idx_dataset / "train-images-idx3-ubyte"),
            "--labels", str(idx_dataset / "train-labels-idx1-ubyte"),
            "--format", "idx", "--out", str(out),
        ])
        lines = (out / "labels.csv").read_text().splitlines()
        assert len(lines) == 7  # header + 6 rows


class TestStatsCmd:
    def test_stats_files_written(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["stats", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out), "--theta", "0.3", "--mode", "atleast"])
        assert (out / "stats_histogram.csv").exists()
        assert (out / "stats_crosstab.csv").exists()

    def test_figures_flag(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["stats", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out), "--figures"])
        assert (out / "stats_histogram.png").exists()
        assert (out / "stats_ph_classes.png").exists()


class TestExportGraph:
    def test_symmetrized_square_degree(self, runner, tmp_path):
        d = tmp_path / "data"
        d.mkdir()
        (d / "img.csv").write_text("0.2,0.6\n0.6,0.4\n")
        out = tmp_path / "out"
        run_ok(runner, ["export-graph", "--dataset", str(d), "--format", "csv",
                        "--out", str(out), "--encodings", "sym", "--node-features"])
        lines = (out / "graph_sym_000000.txt").read_text().splitlines()
        assert lines[0] == "nodes=9"
        degree = {}
        for line in lines[1:]:
            s, t, _ = line.split()
            degree[s] = degree.get(s, 0) + 1
            degree[t] = degree.get(t, 0) + 1
        assert degree["8"] == 4  # the square cell always has four faces
        assert (out / "graph_sym_000000_nodes.csv").exists()

    def test_all_encodings(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["export-graph", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out)])
        names = sorted(os.listdir(out))
        assert "graph_cc_000000.txt" in names
        assert "graph_fcc_000001.txt" in names
        assert "graph_sym_000001.txt" in names


class TestVerify:
    def test_random_trials_pass(self, runner):
        result = run_ok(runner, ["verify", "--trials", "60", "--seed", "9"])
        assert "60/60 exact Betti matches" in result.output

    def test_dataset_verification(self, runner, idx_dataset):
        result = run_ok(runner, [
            "verify", "--dataset", str(idx_dataset / "train-images-idx3-ubyte"),
            "--labels", str(idx_dataset / "train-labels-idx1-ubyte"),
            "--format", "idx", "--trials", "4",
        ])
        assert "4/4 exact Betti matches" in result.output


class TestBench:
    def test_report_format(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        result = run_ok(runner, ["bench", "--dataset", str(csv_dataset), "--format", "csv",
                                 "--out", str(out)])
        assert "mean/img (s)" in result.output
        assert "batch of 100 (full pipeline):" in result.output
        csv_text = (out / "bench.csv").read_text()
        assert csv_text.startswith("stage,mean_s,median_s,p95_s")
        assert "batch_of_100" in csv_text

    def test_single_image_batch_equals_per_image(self, runner, tmp_path):
        d = tmp_path / "one"
        d.mkdir()
        (d / "img.csv").write_text("0.1,0.9\n0.5,0.3\n")
        out = tmp_path / "out"
        result = run_ok(runner, ["bench", "--dataset", str(d), "--format", "csv", "--out", str(out)])
        import csv as csvmod

        with open(out / "bench.csv") as fh:
            rows = {r["stage"]: r for r in csvmod.DictReader(fh)}
        assert float(rows["batch_of_100"]["mean_s"]) == pytest.approx(
            float(rows["full"]["mean_s"]), rel=1e-9
        )


class TestConfigFile:
    def test_toml_defaults_with_flag_override(self, runner, csv_dataset, tmp_path):
        cfg = tmp_path / "job.toml"
        cfg.write_text(f'dataset = "{csv_dataset}"\nfmt = "csv"\ntheta_grid = [0.2, 0.5]\n')
        out = tmp_path / "out"
        run_ok(runner, ["labels", "--config", str(cfg), "--out", str(out)])
        header = (out / "labels.csv").read_text().splitlines()[0]
        assert "theta=0.2" in header and "theta=0.5" in header
        # explicit flag beats the file
        out2 = tmp_path / "out2"
        run_ok(runner, ["labels", "--config", str(cfg), "--out", str(out2),
                        "--theta-grid", "0.4,0.6"])
        header2 = (out2 / "labels.csv").read_text().splitlines()[0]
        assert "theta=0.4" in header2 and "theta=0.2" not in header2

    def test_unknown_config_key_rejected(self, runner, csv_dataset, tmp_path):
        cfg = tmp_path / "bad.toml"
        cfg.write_text('nonsense = 1\n')
        result = runner.invoke(main, ["labels", "--config", str(cfg), "--dataset",
                                      str(csv_dataset), "--format", "csv"])
        assert result.exit_code == 2

    def test_bad_theta_grid_rejected(self, runner, csv_dataset):
        result = runner.invoke(main, ["labels", "--dataset", str(csv_dataset),
                                      "--format", "csv", "--theta-grid", "0.5,0.4"])
        assert result.exit_code == 2


class TestFeaturesCmd:
    def test_pi_dumps(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        run_ok(runner, ["features", "--dataset", str(csv_dataset), "--format", "csv",
                        "--out", str(out), "--pi-out", str(out / "pi"), "--pi-format", "f64"])
        assert (out / "features.csv").exists()
        assert (out / "pi" / "pi_000000.f64").exists()

    def test_jobs_parallel_output_matches_serial(self, runner, idx_dataset, tmp_path):
        base = ["features", "--dataset", str(idx_dataset / "train-images-idx3-ubyte"),
                "--labels", str(idx_dataset / "train-labels-idx1-ubyte"), "--format", "idx"]
        out1, out2 = tmp_path / "s", tmp_path / "p"
        run_ok(runner, base + ["--out", str(out1), "--jobs", "1"])
        run_ok(runner, base + ["--out", str(out2), "--jobs", "2"])
        assert (out1 / "features.csv").read_bytes() == (out2 / "features.csv").read_bytes()


class TestSynthModule:
    def test_idx_files_load_back(self, tmp_path):
        from cubiph.ingest import load_idx

        pixels, labels = synth_dataset(5, size=10, seed=1)
        img_path = tmp_path / "imgs"
        lab_path = tmp_path / "labs"
        write_idx_images(pixels, img_path)
        write_idx_labels(labels, lab_path)
        ds = load_idx(img_path.read_bytes(), lab_path.read_bytes())
        assert len(ds) == 5
        assert ds.images[0].values.shape == (10, 10)
        assert all(0 <= l <= 9 for l in ds.class_labels)


class TestJobsEnvVar:
    def test_cubiph_jobs_env_fallback(self, runner, csv_dataset, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(
            main,
            ["labels", "--dataset", str(csv_dataset), "--format", "csv", "--out", str(out)],
            env={"CUBIPH_JOBS": "2"},
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        assert (out / "labels.csv").exists()
