import logging

import pytest

from app.core.errors import ConfigError
from app.models import load_config
from app.services.experiment import CSV_COLUMNS, render_report, run_experiment


def _without_wall_time(report):
    return report.model_dump(exclude={"wall_time"})


class TestConfig:
    def test_unknown_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            load_config({"scenario": "telepathy"})

    def test_field_level_message(self):
        with pytest.raises(ConfigError, match="trials"):
            load_config({"scenario": "honest_read", "trials": 0})

    def test_unknown_field(self):
        with pytest.raises(ConfigError, match="colour"):
            load_config({"scenario": "honest_read", "colour": "red"})

    def test_seed_range(self):
        load_config({"scenario": "honest_read", "seed": 2 ** 64 - 1})
        with pytest.raises(ConfigError, match="seed"):
            load_config({"scenario": "honest_read", "seed": 2 ** 64})


class TestScenarios:
    def test_collective_attack_is_perfect(self):
        config = load_config({"scenario": "collective_attack", "message_bits": 8, "trials": 1000, "seed": 11})
        report = run_experiment(config)
        assert report.bit_accuracy == 1.0
        assert report.detection_rate == 0.0
        assert report.mean_fidelity == pytest.approx(1.0, abs=1e-12)

    def test_honest_read_single_bit(self, within_3sigma):
        config = load_config({"scenario": "honest_read", "message_bits": 1, "trials": 4000, "seed": 5})
        report = run_experiment(config)
        assert report.bit_accuracy == 1.0
        assert within_3sigma(round(report.detection_rate * 4000), 4000, 0.5)

    def test_honest_read_eight_bits(self, within_3sigma):
        config = load_config({"scenario": "honest_read", "message_bits": 8, "trials": 2000, "seed": 6})
        report = run_experiment(config)
        assert within_3sigma(round(report.detection_rate * 2000), 2000, 1 - 0.5 ** 8)

    def test_single_qubit_attack(self, within_3sigma):
        config = load_config({"scenario": "single_qubit_attack", "trials": 4000, "seed": 8})
        report = run_experiment(config)
        assert report.bit_accuracy == 1.0
        assert within_3sigma(round(report.detection_rate * 4000), 4000, 0.5)
        assert report.mean_fidelity < 1.0

    def test_swap_test_suite(self, within_3sigma):
        config = load_config({"scenario": "swap_test_suite", "message_bits": 2, "trials": 4000, "seed": 9})
        report = run_experiment(config)
        assert report.bob_detection_rate is not None
        assert within_3sigma(round(report.bob_detection_rate * 4000), 4000, 1 - 0.75 ** 2)

    def test_analyzer_demo(self):
        config = load_config({"scenario": "analyzer_demo", "message_bits": 6, "trials": 40, "seed": 3})
        report = run_experiment(config)
        assert report.bit_accuracy == 1.0
        assert report.detection_rate == 0.0
        assert report.mean_fidelity == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.slow
    def test_honest_read_large_sample(self, within_3sigma):
        for bits in (1, 8):
            config = load_config({"scenario": "honest_read", "message_bits": bits, "trials": 10_000, "seed": 1})
            report = run_experiment(config)
            assert report.bit_accuracy == 1.0
            assert within_3sigma(round(report.detection_rate * 10_000), 10_000, 1 - 0.5 ** bits)

    @pytest.mark.slow
    def test_single_qubit_attack_large_sample(self, within_3sigma):
        for bits in (1, 8):
            config = load_config({"scenario": "single_qubit_attack", "message_bits": bits,
                                  "trials": 100_000, "seed": 12})
            report = run_experiment(config)
            assert within_3sigma(round(report.detection_rate * 100_000), 100_000, 1 - 0.5 ** bits)


class TestReport:
    def test_reproducible_across_thread_counts(self):
        config = load_config({"scenario": "single_qubit_attack", "message_bits": 3, "trials": 60,
                              "seed": 77, "records": True})
        first = run_experiment(config, threads=1)
        second = run_experiment(config, threads=4)
        assert _without_wall_time(first) == _without_wall_time(second)

    def test_records_consistent_with_accuracy(self):
        config = load_config({"scenario": "honest_read", "message_bits": 4, "trials": 30, "records": True})
        report = run_experiment(config)
        assert len(report.records) == 30
        assert all(r.bits_sealed == r.bits_read for r in report.records)
        assert report.detection_rate == sum(r.detected for r in report.records) / 30

    def test_three_sigma_bands(self):
        config = load_config({"scenario": "honest_read", "trials": 100, "seed": 2})
        report = run_experiment(config)
        p = report.detection_rate
        assert report.detection_rate_3sigma == pytest.approx(3 * (p * (1 - p) / 100) ** 0.5)
        assert report.bit_accuracy_3sigma == 0.0

    def test_csv_layout(self):
        config = load_config({"scenario": "collective_attack", "message_bits": 2, "trials": 5,
                              "output_format": "csv"})
        lines = render_report(run_experiment(config), "csv").splitlines()
        assert lines[0].split(",") == list(CSV_COLUMNS)
        assert len(lines) == 6
        assert lines[1].split(",")[:2] == ["collective_attack", "0"]
        assert lines[1].split(",")[4] == "0"


@pytest.mark.parametrize("scenario", ["honest_read", "single_qubit_attack", "swap_test_suite", "analyzer_demo"])
def test_trials_are_not_logged_individually(caplog, scenario):
    caplog.set_level(logging.INFO)
    config = load_config({"scenario": scenario, "message_bits": 2, "trials": 300, "seed": 4})
    run_experiment(config, threads=2)
    assert len(caplog.records) < 10
    assert not [r for r in caplog.records if r.levelno >= logging.WARNING]
