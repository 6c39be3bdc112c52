import json
import logging

import pytest

from app import cli_main


@pytest.fixture
def paths(tmp_path):
    return {name: str(tmp_path / f"{name}.json") for name in ("mem", "rec", "grant", "families", "cfg")}


def _seal(paths, bits="0110"):
    return cli_main(["seal", "--bits", bits, "--seed", "7", "--out", paths["mem"], "--record", paths["rec"]])


def test_seal_writes_documents(paths, capsys):
    assert _seal(paths) == 0
    assert len(json.loads(open(paths["mem"]).read())["triplets"]) == 4
    assert "sealed 4 bits" in capsys.readouterr().out


def test_collective_attack_keeps_seal_intact(paths, capsys):
    _seal(paths)
    capsys.readouterr()
    assert cli_main(["attack", "--mode", "collective", "--memory", paths["mem"]]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "0110"
    assert cli_main(["verify", "--as", "alice", "--memory", paths["mem"], "--record", paths["rec"],
                     "--seed", "1"]) == 0
    assert capsys.readouterr().out.strip() == "intact"


def test_bob_verifies_with_grant(paths, capsys):
    _seal(paths)
    assert cli_main(["grant", "--record", paths["rec"], "--controls", "--out", paths["grant"]]) == 0
    assert cli_main(["verify", "--as", "bob", "--memory", paths["mem"], "--grant", paths["grant"],
                     "--seed", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "intact"


def test_read_prints_bits(paths, capsys):
    _seal(paths, "1011")
    capsys.readouterr()
    assert cli_main(["read", "--memory", paths["mem"], "--seed", "2"]) == 0
    assert capsys.readouterr().out.strip() == "1011"


def test_analyze_protocol_families(paths, capsys):
    assert cli_main(["families", "--out", paths["families"]]) == 0
    capsys.readouterr()
    assert cli_main(["analyze", "--families", paths["families"]]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["readable"] is True
    assert (report["decomposition"]["dim0"], report["decomposition"]["dim1"]) == (4, 4)
    diagonal = [report["measurement"]["p0"][k][k][0] for k in range(8)]
    assert diagonal == pytest.approx([1, 1, 1, 0, 1, 0, 0, 0], abs=1e-12)
    assert report["measurement"]["embedding_valid"] is True


def test_analyze_overlapping_families(paths, capsys):
    document = {"dim": 2, "family0": [[[1, 0], [0, 0]]], "family1": [[[0.6, 0], [0.8, 0]]]}
    with open(paths["families"], "w") as f:
        json.dump(document, f)
    assert cli_main(["analyze", "--families", paths["families"]]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["readable"] is False
    assert report["decomposition"]["max_cross_overlap"] == pytest.approx(0.6)


def test_experiment_from_config_file(paths, capsys):
    with open(paths["cfg"], "w") as f:
        json.dump({"scenario": "collective_attack", "message_bits": 4, "trials": 20, "seed": 5}, f)
    assert cli_main(["experiment", "--config", paths["cfg"]]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["bit_accuracy"] == 1.0 and report["detection_rate"] == 0.0


def test_experiment_csv(capsys):
    assert cli_main(["experiment", "--scenario", "honest_read", "--trials", "3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "scenario,trial,bits_sealed,bits_read,detected,mean_fidelity"
    assert len(lines) == 4


@pytest.mark.parametrize("argv", [
    [],
    ["seal", "--bits", "01a"],
    ["attack", "--mode", "sideways", "--memory", "m.json"],
    ["seal", "--bits", "01", "--seed", "-1", "--out", "m.json", "--record", "r.json"],
    ["read", "--memory", "m.json", "--seed", str(2 ** 64)],
    ["attack", "--mode", "single", "--memory", "m.json", "--seed", "x"],
    ["experiment", "--scenario", "honest_read", "--trials", "0"],
])
def test_usage_errors(argv):
    assert cli_main(argv) == 2


def test_verify_alice_requires_record(paths):
    _seal(paths)
    assert cli_main(["verify", "--as", "alice", "--memory", paths["mem"]]) == 2


def test_malformed_input_is_runtime_error(paths):
    with open(paths["mem"], "w") as f:
        f.write("{broken")
    assert cli_main(["read", "--memory", paths["mem"]]) == 1


def test_record_mismatch_is_runtime_error(paths):
    _seal(paths, "01")
    cli_main(["seal", "--bits", "0", "--out", paths["grant"], "--record", paths["cfg"]])
    assert cli_main(["verify", "--as", "alice", "--memory", paths["mem"], "--record", paths["cfg"]]) == 1


def test_seed_bounds_are_accepted(paths):
    assert cli_main(["seal", "--bits", "01", "--seed", "0", "--out", paths["mem"], "--record", paths["rec"]]) == 0
    assert cli_main(["read", "--memory", paths["mem"], "--seed", str(2 ** 64 - 1)]) == 0


def test_verbose_switches_to_debug(paths):
    cli_main(["-v", "families", "--out", paths["families"]])
    assert logging.getLogger().level == logging.DEBUG
    cli_main(["families", "--out", paths["families"]])
    assert logging.getLogger().level != logging.DEBUG
