"""CLI subcommands: artifacts, schemas, exit codes, reproducibility."""

import numpy as np
import pytest

from mixedmc import ColumnBlockLayout, SamplingScheme, datagen, gaussian, poisson
from mixedmc.cli import main


@pytest.fixture
def instance_dir(tmp_path):
    layout = ColumnBlockLayout(12, ((gaussian(1.0), 6), (poisson(), 6)))
    inst = datagen.make_instance(layout, rank=2, gamma=2.0,
                                 scheme=SamplingScheme.uniform(0.8), seed=3)
    path = tmp_path / "inst"
    datagen.save_instance(inst, str(path))
    return path


class TestComplete:
    def test_artifacts_and_exit_zero(self, instance_dir, tmp_path):
        out = tmp_path / "out"
        code = main([
            "complete",
            "--data", str(instance_dir / "y.csv"),
            "--mask", str(instance_dir / "mask.csv"),
            "--layout", str(instance_dir / "layout.txt"),
            "--truth", str(instance_dir / "theta.csv"),
            "--out", str(out),
            "--mu", "1e-3", "--lambda", "2e-3", "--alpha", "3",
            "--tol", "1e-4", "--max-iter", "500",
        ])
        assert code == 0
        for name in ("theta_hat.csv", "completed.csv", "trace.csv", "report.txt"):
            assert (out / name).exists()
        report = (out / "report.txt").read_text()
        assert "relative_error_overall=" in report
        assert "relative_error[poisson]=" in report

    def test_tolerance_reached_in_trace(self, instance_dir, tmp_path):
        out = tmp_path / "out"
        code = main([
            "complete",
            "--data", str(instance_dir / "y.csv"),
            "--mask", str(instance_dir / "mask.csv"),
            "--layout", str(instance_dir / "layout.txt"),
            "--out", str(out),
            "--mu", "1e-3", "--lambda", "1e-3", "--alpha", "3", "--tol", "1e-4",
        ])
        assert code == 0
        rows = (out / "trace.csv").read_text().strip().splitlines()
        assert rows[0] == "iter,r_p,r_d,rho"
        *_, last = rows
        _, r_p, r_d, _ = last.split(",")
        # stopping rule normalizes by 1 + ||Z||_F, so raw residuals may exceed
        # the tolerance by that factor at most
        theta = np.loadtxt(out / "theta_hat.csv", delimiter=",")
        scale = 1.0 + np.linalg.norm(theta) * 3  # coarse bound on ||Z||_F
        assert max(float(r_p), float(r_d)) < 1e-4 * scale

    def test_missing_layout_exit_2(self, instance_dir, tmp_path, capsys):
        code = main([
            "complete",
            "--data", str(instance_dir / "y.csv"),
            "--mask", str(instance_dir / "mask.csv"),
            "--layout", str(instance_dir / "nope.txt"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 2
        assert "nope.txt" in capsys.readouterr().err

    def test_numerical_failure_exit_3(self, instance_dir, tmp_path, monkeypatch):
        import mixedmc.solver as solver_mod
        from mixedmc.matnorm import EigenSolverError

        def boom(*args, **kwargs):
            raise EigenSolverError("synthetic non-convergence")

        monkeypatch.setattr(solver_mod, "psd_project", boom)
        code = main([
            "complete",
            "--data", str(instance_dir / "y.csv"),
            "--mask", str(instance_dir / "mask.csv"),
            "--layout", str(instance_dir / "layout.txt"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 3


class TestSimulate:
    ARGS = ["--n1", "15", "--block-width", "3", "--rates", "0.5,0.9",
            "--ranks", "2,3", "--seeds", "0,1", "--gamma", "2",
            "--tol", "1e-3", "--max-iter", "150"]

    def test_results_schema_and_plots(self, tmp_path):
        out = tmp_path / "sim"
        assert main(["simulate", "--out", str(out)] + self.ARGS) == 0
        lines = (out / "results.csv").read_text().strip().splitlines()
        header = lines[0].split(",")
        assert header[:3] == ["sweep", "value", "seed"]
        assert "err_average" in header and "err_overall" in header
        # (2 rates + 2 ranks) x 2 seeds records
        assert len(lines) == 1 + 8
        assert (out / "error_vs_rate.svg").read_text().startswith("<?xml")
        assert (out / "error_vs_rank.svg").exists()

    def test_rerun_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--out", str(out_a)] + self.ARGS) == 0
        assert main(["simulate", "--out", str(out_b)] + self.ARGS) == 0
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()

    def test_bad_rate_exit_2(self, tmp_path):
        assert main(["simulate", "--out", str(tmp_path / "x"),
                     "--rates", "0.5,1.5"]) == 2

    def test_explicit_rates_run_only_that_sweep(self, tmp_path):
        out = tmp_path / "rates_only"
        assert main(["simulate", "--out", str(out), "--n1", "15",
                     "--block-width", "3", "--rates", "0.5,0.9",
                     "--seeds", "0,1,2", "--gamma", "2",
                     "--tol", "1e-3", "--max-iter", "100"]) == 0
        lines = (out / "results.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * 3  # one row per (rate, seed)
        assert all(line.startswith("rate,") for line in lines[1:])
        assert (out / "error_vs_rate.svg").exists()
        assert not (out / "error_vs_rank.svg").exists()

    def test_threads_match_serial(self, tmp_path):
        out_a, out_b = tmp_path / "serial", tmp_path / "pool"
        assert main(["simulate", "--out", str(out_a)] + self.ARGS) == 0
        assert main(["simulate", "--out", str(out_b), "--threads", "3"] + self.ARGS) == 0
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()


class TestBenchEig:
    def test_paired_rows(self, tmp_path):
        out = tmp_path / "bench"
        code = main(["bench-eig", "--out", str(out), "--n1", "15",
                     "--block-width", "3", "--rank", "2", "--seeds", "0",
                     "--gamma", "2", "--tol", "1e-3", "--max-iter", "150"])
        assert code == 0
        lines = (out / "bench.csv").read_text().strip().splitlines()
        assert lines[0].startswith("mode,seed,err_overall")
        modes = [line.split(",")[0] for line in lines[1:]]
        assert modes == ["full", "trunc:3"]


class TestDetect:
    def test_binary_column(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        rng = np.random.default_rng(0)
        col = (rng.random(200) < 0.4).astype(float)
        np.savetxt(data, col.reshape(-1, 1), delimiter=",")
        assert main(["detect", "--data", str(data)]) == 0
        out = capsys.readouterr().out
        assert "cols 0:1 kind=bernoulli" in out

    def test_groups_and_output_file(self, tmp_path):
        rng = np.random.default_rng(1)
        data = np.column_stack([rng.poisson(4.0, 300), rng.poisson(4.0, 300),
                                rng.normal(0, 1, 300)])
        path = tmp_path / "mixed.csv"
        np.savetxt(path, data, delimiter=",")
        out = tmp_path / "det"
        assert main(["detect", "--data", str(path), "--groups", "0:2,2:3",
                     "--out", str(out)]) == 0
        text = (out / "detect.txt").read_text()
        assert "cols 0:2 kind=poisson" in text
        assert "cols 2:3 kind=gaussian" in text

    def test_non_numeric_cell_exit_2(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,oops\n")
        assert main(["detect", "--data", str(path)]) == 2
        err = capsys.readouterr().err
        assert "row 2" in err and "column 2" in err

    def test_simulated_mixed_instance_blocks_redetected(self, tmp_path, capsys):
        # one tall fully observed column per kind; at n1 = 1e4 at least 4 of
        # the 5 blocks must come back under their true kind
        from mixedmc import (ColumnBlockLayout, SamplingScheme, bernoulli,
                             gamma as gamma_model, gen_observed,
                             gen_low_rank_theta, negbin, poisson)

        rng = np.random.default_rng(17)
        layout = ColumnBlockLayout(10**4, (
            (gaussian(1.0), 1), (bernoulli(), 1), (poisson(), 1),
            (gamma_model(2.0), 1), (negbin(2.0), 1),
        ))
        theta, _ = gen_low_rank_theta(10**4, 5, 1, 2.0, layout, rng)
        mask = np.ones((10**4, 5), bool)
        y = gen_observed(theta, layout, mask, rng)
        path = tmp_path / "mixed.csv"
        np.savetxt(path, y, delimiter=",")
        assert main(["detect", "--data", str(path)]) == 0
        out = capsys.readouterr().out.splitlines()
        expected = ["gaussian", "bernoulli", "poisson", "gamma", "negbin"]
        hits = sum(f"kind={kind}" in line for line, kind in zip(out, expected))
        assert hits >= 4, out


class TestConfigFile:
    def test_config_supplies_defaults_and_cli_overrides(self, tmp_path, instance_dir):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "mu = 1e-3\nlam = 1e-3\nalpha = 3\ntol = 1e-3\nmax-iter = 120\n"
            f"data = {instance_dir / 'y.csv'}\n"
            f"mask = {instance_dir / 'mask.csv'}\n"
            f"layout = {instance_dir / 'layout.txt'}\n"
        )
        out = tmp_path / "out"
        assert main(["complete", "--config", str(cfg), "--out", str(out),
                     "--alpha", "2.5"]) == 0
        report = (out / "report.txt").read_text()
        assert "alpha=2.5" in report  # CLI wins
        assert "mu=0.001" in report   # config supplies the rest

    def test_bad_config_line_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("this is not a key value line\n")
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
        assert "expected 'key = value'" in capsys.readouterr().err
