"""Experiment runner and command-line interface tests."""

import json

import numpy as np
import pytest

from mddsim.cli import main
from mddsim.experiments import (
    ConfigError,
    ExperimentConfig,
    colored_noise_fidelity,
    verify_bounds,
    verify_decay,
    verify_lemma,
)
from mddsim.noise import SpectralDensity
from mddsim.states import haar_random_state


def write_config(tmp_path, **kwargs):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(kwargs))
    return str(path)


class TestConfig:
    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            ExperimentConfig.from_dict({"experiment": "qft-toy", "shotz": 3})

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            ExperimentConfig.from_dict({"experiment": "bogus"})

    def test_bad_grid_rejected(self):
        with pytest.raises(ConfigError, match="increasing"):
            ExperimentConfig.from_dict({"experiment": "fidelity-sweep", "t_grid": [2.0, 1.0]})

    def test_missing_experiment_rejected(self):
        with pytest.raises(ConfigError, match="name an experiment"):
            ExperimentConfig.from_dict({})


class TestCliContract:
    def test_usage_error_exit_code(self, capsys):
        assert main(["run"]) == 2

    def test_config_error_exit_code(self, tmp_path, capsys):
        missing = tmp_path / "nope.json"
        assert main(["run", "--config", str(missing)]) == 2

    def test_fidelity_sweep_csv_schema(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fidelity-sweep", num_states=3,
                           num_qubits=2, t_grid=[5.0, 50.0], sequences=["none", "mdd"])
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        lines = (tmp_path / "out" / "fidelity_sweep.csv").read_text().splitlines()
        assert lines[0] == "t,sequence,mean_F,min_F,max_F"
        assert len(lines) == 1 + 2 * 2
        for line in lines[1:]:
            t, kind, mean_f, min_f, max_f = line.split(",")
            assert kind in ("none", "mdd")
            for token in (t, mean_f, min_f, max_f):
                assert np.isfinite(float(token))

    def test_fidelity_sweep_aligned_curve_uppermost(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fidelity-sweep", num_states=20,
                           num_qubits=4, sequences=["none", "xx", "udd8", "mdd"], seed=0)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        means = {}
        for line in (tmp_path / "out" / "fidelity_sweep.csv").read_text().splitlines()[1:]:
            t, kind, mean_f, _, _ = line.split(",")
            means.setdefault(float(t), {})[kind] = float(mean_f)
        for t, row in means.items():
            assert set(row) == {"none", "xx", "udd8", "mdd"}
            assert row["mdd"] == max(row.values()), f"aligned curve not uppermost at t={t}"

    def test_lemma_check_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="lemma-check", num_states=2,
                           trials=500, t_grid=[50.0])
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        report = json.loads((tmp_path / "out" / "lemma_report.json").read_text())
        assert all(entry["violations"] == 0 for entry in report)
        assert {"claim_id", "margin", "worst_case", "seed"} <= set(report[0])

    def test_seed_override(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fidelity-sweep", num_states=2,
                           num_qubits=2, t_grid=[10.0], sequences=["none"])
        main(["run", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1"])
        main(["run", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
        a = (tmp_path / "a" / "fidelity_sweep.csv").read_text()
        b = (tmp_path / "b" / "fidelity_sweep.csv").read_text()
        assert a != b

    def test_byte_identical_across_runs_and_worker_counts(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="fidelity-sweep", num_states=4,
                           num_qubits=3, t_grid=[5.0, 50.0, 250.0],
                           sequences=["none", "xx", "mdd"])
        outputs = []
        for name, jobs in (("r1", "1"), ("r2", "1"), ("r4", "2")):
            assert main(["run", "--config", cfg, "--out", str(tmp_path / name),
                         "--jobs", jobs]) == 0
            outputs.append((tmp_path / name / "fidelity_sweep.csv").read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_sqd_recover_hubbard_dimer_improves(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="sqd-recover", fcidump="hubbard-dimer",
                           sample_shots=20, flip_rate=0.2, seed=4)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        lines = (tmp_path / "out" / "sqd_recovery.csv").read_text().splitlines()
        assert lines[0] == "iteration,batch,E0,abs_error"
        by_iteration = {}
        for line in lines[1:]:
            iteration, _, _, err = line.split(",")
            by_iteration.setdefault(int(iteration), []).append(float(err))
        first = np.mean(by_iteration[min(by_iteration)])
        last = np.mean(by_iteration[max(by_iteration)])
        assert last < first

    def test_qft_toy_exit_zero(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="qft-toy", num_qubits=4, shots=20_000)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        lines = (tmp_path / "out" / "qft_success.csv").read_text().splitlines()
        assert lines[0] == "seed,strategy,p_success"

    def test_verify_suite_exit_codes(self, tmp_path, capsys):
        assert main(["verify", "--suite", "bounds", "--out", str(tmp_path)]) == 0
        report = json.loads((tmp_path / "verify_bounds.json").read_text())
        assert report["passed"] is True

    def test_csv_values_all_finite(self, tmp_path, capsys):
        cfg = write_config(tmp_path, experiment="filter-noise", num_states=2,
                           t_grid=[20.0, 60.0], sequences=["none", "xx"])
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
        for name in ("chi_curves.csv", "filter_fidelity.csv"):
            lines = (tmp_path / "out" / name).read_text().splitlines()
            for line in lines[1:]:
                for token in line.split(",")[2:]:
                    assert np.isfinite(float(token))


class TestVerifySuites:
    def test_lemma_suite_small(self):
        report = verify_lemma(seed=1, num_states=3, trials=1000)
        assert report["passed"] and report["violations"] == 0

    def test_decay_suite_small(self):
        report = verify_decay(seed=1, trials=20)
        assert report["passed"]

    def test_bounds_suite_small(self):
        report = verify_bounds(seed=1, trials=20)
        assert report["passed"] and report["violations"] == 0


class TestColoredNoiseModel:
    def test_alignment_beats_bare_evolution(self):
        spectrum = SpectralDensity("ohmic", omega_c=0.1)
        for i in range(5):
            psi = haar_random_state(2, seed=(3, i))
            f_mdd = colored_noise_fidelity(psi, "mdd", 250.0, spectrum, 200.0)
            f_none = colored_noise_fidelity(psi, "none", 250.0, spectrum, 200.0)
            assert f_mdd >= f_none - 1e-12

    def test_pulse_suppression_monotone_in_dephasing(self):
        # same damping, smaller chi: the pulsed fidelity cannot drop below the
        # free one under this composition for any state
        spectrum = SpectralDensity("one_over_f", omega_c=0.1)
        for i in range(5):
            psi = haar_random_state(2, seed=(4, i))
            f_udd = colored_noise_fidelity(psi, "udd8", 250.0, spectrum, 80.0)
            f_xx = colored_noise_fidelity(psi, "xx", 250.0, spectrum, 80.0)
            f_none = colored_noise_fidelity(psi, "none", 250.0, spectrum, 80.0)
            assert f_udd >= f_xx - 1e-12
            assert f_xx >= f_none - 1e-12
