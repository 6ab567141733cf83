"""End-to-end command line tests: every subcommand, exit codes, manifests."""

import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cubepack.cli import main
from cubepack.packing import packing_from_dict, packing_to_dict


def run(*argv):
    return main([str(a) for a in argv])


def read(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture()
def packing_file(tmp_path):
    out = tmp_path / "packing.json"
    assert run("pack", "build", "--d", 3, "--mode", "warmup", "--out", out) == 0
    return out


@pytest.fixture()
def pow_packing_file(tmp_path):
    out = tmp_path / "pow.json"
    code = run("pack", "build", "--d", 2, "--mode", "lemmaB",
               "--s-prime", 3, "--out", out)
    assert code == 0
    return out


# -- pack ----------------------------------------------------------------------


def test_pack_build_warmup_writes_remark_packing(packing_file):
    doc = read(packing_file)
    assert doc["d"] == 3
    assert doc["epsilon"] == "1/9"
    assert sorted(doc["words"]) == ["2", "3"]
    assert len(doc["words"]["2"]) == 1 and len(doc["words"]["3"]) == 4
    assert doc["report"]["weight_placed"] == "3/2"
    assert doc["manifest"]["version"]
    assert "timestamp" not in json.dumps(doc["manifest"]).lower()


def test_pack_build_output_round_trips(packing_file):
    doc = read(packing_file)
    packing = packing_from_dict(doc)
    again = packing_to_dict(packing)
    stripped = {k: v for k, v in doc.items() if k not in ("manifest", "report")}
    assert again == stripped


def test_pack_verify_ok(packing_file, capsys):
    assert run("pack", "verify", packing_file) == 0
    assert "OK" in capsys.readouterr().out


def test_pack_verify_rejects_overlap(packing_file, tmp_path, capsys):
    doc = read(packing_file)
    doc["words"]["3"].append(doc["words"]["3"][0])
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert run("pack", "verify", bad) == 1
    assert "FAIL" in capsys.readouterr().err


def test_pack_weight_prints_exact_values(packing_file, capsys):
    assert run("pack", "weight", packing_file) == 0
    out = capsys.readouterr().out
    assert "3/2" in out


def test_pack_build_lemma_b_override(pow_packing_file):
    doc = read(pow_packing_file)
    assert doc["report"]["classes"] == [2, 4]
    assert doc["epsilon"] == "1/16"
    assert doc["report"]["s_prime_overridden"] is True


def test_pack_build_lemma_b_degenerate_at_small_d(tmp_path, capsys):
    out = tmp_path / "degenerate.json"
    assert run("pack", "build", "--d", 3, "--mode", "lemmaB", "--out", out) == 0
    doc = read(out)
    assert doc["status"] == "degenerate"
    assert "degenerate" in capsys.readouterr().out


def test_pack_build_rejects_eps_outside_warmup(tmp_path):
    out = tmp_path / "x.json"
    code = run("pack", "build", "--d", 4, "--mode", "lemmaA",
               "--eps", "1/9", "--out", out)
    assert code == 2


def test_missing_input_file_is_bad_input(tmp_path):
    assert run("pack", "verify", tmp_path / "nope.json") == 2


def test_seed_flag_works_globally_and_per_subcommand(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("--seed", 5, "pack", "build", "--d", 3, "--out", a) == 0
    assert run("pack", "build", "--d", 3, "--seed", 9, "--out", b) == 0
    assert read(a)["manifest"]["seed"] == 5
    assert read(b)["manifest"]["seed"] == 9


# -- online --------------------------------------------------------------------


@pytest.fixture()
def instance_file(tmp_path, packing_file):
    out = tmp_path / "instance.json"
    code = run("online", "adversary", "--packing", packing_file,
               "--M", 1, "--out", out)
    assert code == 0
    return out


def test_adversary_emits_certified_instance(instance_file):
    doc = read(instance_file)
    assert doc["scale"] == 16
    assert doc["lower_bound"] == 12
    assert doc["offline_bin_count"] == 16
    assert [s["k"] for s in doc["segments"]] == [2, 3]
    assert [s["count"] for s in doc["segments"]] == [16, 64]
    assert doc["manifest"]["inputs"]["packing"]


def test_adversary_rejects_odd_scale(tmp_path, packing_file, capsys):
    code = run("online", "adversary", "--packing", packing_file,
               "--M", 1, "--scale", 7, "--out", tmp_path / "x.json")
    assert code == 2
    assert "even" in capsys.readouterr().err


def test_online_run_beats_the_certified_floor(tmp_path, instance_file, capsys):
    report = tmp_path / "report.json"
    code = run("online", "run", "--alg", "class-harmonic",
               "--instance", instance_file, "--M", 1, "--report", report)
    assert code == 0
    doc = read(report)
    assert doc["bins_used"] == 24
    assert doc["bins_used"] >= doc["ratio_report"]["certified_lower_bound"]
    assert doc["ratio_report"]["ratio"] == "3/2"
    assert "24 bins" in capsys.readouterr().out


# -- game ----------------------------------------------------------------------


@pytest.fixture()
def equilibrium_file(tmp_path, packing_file):
    out = tmp_path / "poa.json"
    code = run("game", "poa", "--packing", packing_file, "--out", out)
    assert code == 0
    doc = read(out)
    eq = tmp_path / "equilibrium.json"
    eq.write_text(json.dumps(doc["p_prime"]))
    return eq


def test_game_poa_matches_hand_count(tmp_path, packing_file, capsys):
    out = tmp_path / "poa.json"
    assert run("game", "poa", "--packing", packing_file, "--out", out) == 0
    doc = read(out)
    assert doc["optimum_bins"] == 8
    assert doc["equilibrium_bins"] == 12
    assert doc["ratio"] == "3/2"
    assert doc["equilibrium_certified"] is True
    assert "3/2" in capsys.readouterr().out


def test_game_spoa_certifies_power_of_two_toy(tmp_path, pow_packing_file, capsys):
    out = tmp_path / "spoa.json"
    code = run("game", "spoa", "--packing", pow_packing_file, "--out", out)
    assert code == 0
    doc = read(out)
    assert doc["ratio"] == "4/3"
    assert doc["coalition_proof"] is True
    assert doc["max_coalition_size"] == 3
    assert "4/3" in capsys.readouterr().out


def test_game_spoa_rejects_odd_classes(tmp_path, packing_file):
    code = run("game", "spoa", "--packing", packing_file,
               "--out", tmp_path / "x.json")
    assert code == 2


def test_nash_check_accepts_equilibrium(equilibrium_file, capsys):
    assert run("game", "nash-check", equilibrium_file) == 0
    assert "Nash" in capsys.readouterr().out


def _break_one_bin(eq_doc):
    """Move one cube of the fullest bin into a fresh under-filled bin."""
    from collections import Counter

    counts = Counter(row["bin"] for row in eq_doc["cubes"])
    big = counts.most_common(1)[0][0]
    fresh = max(counts) + 1
    for row in eq_doc["cubes"]:
        if row["bin"] == big:
            row["bin"] = fresh
            row["base"] = ["0"] * eq_doc["d"]
            break
    return eq_doc


def test_nash_check_flags_broken_config(tmp_path, equilibrium_file, capsys):
    doc = _break_one_bin(read(equilibrium_file))
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    assert run("game", "nash-check", broken) == 1
    assert "not an equilibrium" in capsys.readouterr().err


def test_dynamics_settles_broken_config(tmp_path, equilibrium_file, capsys):
    doc = _break_one_bin(read(equilibrium_file))
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    settled = tmp_path / "settled.json"
    code = run("game", "dynamics", broken, "--policy", "best", "--out", settled)
    assert code == 0
    assert "nash" in capsys.readouterr().out
    assert run("game", "nash-check", settled) == 0
    assert read(settled)["dynamics"]["status"] == "nash"


def test_game_prop1_sweep_passes(capsys):
    assert run("game", "prop1", "--kmax", 20, "--dmax", 6) == 0
    assert "OK" in capsys.readouterr().out


# -- reproduce -----------------------------------------------------------------


def test_reproduce_emits_expected_row_and_bundle(tmp_path, capsys):
    out = tmp_path / "bundle"
    code = run("--out-dir", out, "reproduce", "--d-list", 3, "--seed", 0)
    assert code == 0
    summary = read(out / "summary.json")
    row = summary["rows"][0]
    assert row["family"]["weight"] == "3/2"
    assert row["family"]["sizes"] == {"2": 1, "3": 4}
    assert row["adversary"]["lower_bound"] == 12
    assert row["online"]["bins_used"] == 24
    assert row["online"]["meets_lower_bound"] is True
    assert row["poa"]["ratio"] == "3/2"
    assert row["spoa"]["status"] == "skipped"
    for name in ("family_d3.json", "packing_d3.json", "instance_d3.json",
                 "online_d3.json", "poa_d3.json", "summary.csv",
                 "bundle.sha256"):
        assert (out / name).exists()
    csv_text = (out / "summary.csv").read_text()
    assert "3,2,1/9" in csv_text
    assert "bundle" in capsys.readouterr().out


def test_reproduce_is_bit_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("--out-dir", a, "reproduce", "--d-list", 2, 3, "--seed", 4) == 0
    assert run("--out-dir", b, "reproduce", "--d-list", 2, 3, "--seed", 4) == 0
    files_a = sorted(p.name for p in a.iterdir())
    files_b = sorted(p.name for p in b.iterdir())
    assert files_a == files_b
    for name in files_a:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_reproduce_continues_past_stage_errors(tmp_path):
    # d=3 has no power-of-two pair: the spoa stage records a skip, the
    # pipeline still exits 0 and the other stages fill their rows
    out = tmp_path / "bundle"
    assert run("--out-dir", out, "reproduce", "--d-list", 3) == 0
    row = read(out / "summary.json")["rows"][0]
    assert row["spoa"]["status"] == "skipped"
    assert row["online"]["status"] == "ok"


# -- process level -------------------------------------------------------------


def test_module_entry_point_exit_codes(tmp_path):
    out = tmp_path / "p.json"
    proc = subprocess.run(
        [sys.executable, "-m", "cubepack.cli", "pack", "build",
         "--d", "3", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run(
        [sys.executable, "-m", "cubepack.cli", "pack", "verify",
         str(tmp_path / "missing.json")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
