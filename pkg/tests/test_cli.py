"""Command-line surface: subcommands, exit codes, identity mapping, logs."""

import hashlib
import json
import re
import subprocess
import sys

import pytest

from pakelab.cli import load_params_file, main
from pakelab.core import TOY_PARAMS, validate_params
from pakelab.netio.store import VerifierStore


def run_cli(*argv):
    return main(list(argv))


# -- params ---------------------------------------------------------------------


def test_params_gen_and_check(tmp_path, capsys):
    out = tmp_path / "group.params"
    assert run_cli("params", "gen", "--bits", "16", "--seed", "7",
                   "--out", str(out)) == 0
    params = load_params_file(str(out))
    assert params.q.bit_length() == 16
    validate_params(params)
    assert run_cli("params", "check", str(out)) == 0
    assert "ok: q=" in capsys.readouterr().out


def test_params_gen_is_deterministic(capsys):
    assert run_cli("params", "gen", "--bits", "10", "--seed", "3") == 0
    first = capsys.readouterr().out
    assert run_cli("params", "gen", "--bits", "10", "--seed", "3") == 0
    assert capsys.readouterr().out == first


def test_params_check_rejects_bad_files(tmp_path, capsys):
    garbled = tmp_path / "garbled.params"
    garbled.write_text("13 six\n")
    assert run_cli("params", "check", str(garbled)) == 2
    non_gen = tmp_path / "nongen.params"
    non_gen.write_text("13\n12\n")
    assert run_cli("params", "check", str(non_gen)) == 3
    assert run_cli("params", "check", str(tmp_path / "void.params")) == 3


# -- simulate --------------------------------------------------------------------


def test_simulate_toy_run(capsys):
    assert run_cli("simulate", "--scheme", "proposed", "--x", "3",
                   "--y", "4") == 0
    out = capsys.readouterr().out
    assert "key: 9" in out
    assert "auth: client->server ok, server->client ok" in out
    assert "msg1" in out and "msg4" in out


def test_simulate_json_line(capsys):
    assert run_cli("simulate", "--scheme", "lky", "--x", "3", "--y", "4",
                   "--json") == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["kind"] == "session"
    assert obj["key_a"] == obj["key_b"] == "1"


def test_simulate_reports_failed_runs_with_exit_1(capsys):
    assert run_cli("simulate", "--scheme", "lky", "--x", "7", "--y", "4") == 1
    assert "retry nonce" in capsys.readouterr().out


def test_simulate_needs_nonces_or_seed():
    assert run_cli("simulate", "--scheme", "lky", "--x", "3") == 3


def test_simulate_golden(capsys):
    assert run_cli("simulate", "--golden") == 0
    out = capsys.readouterr().out
    assert "golden proposed-toy: ok" in out
    assert "golden lky-toy: ok" in out


def test_simulate_golden_bless_prints_without_mutating(capsys):
    assert run_cli("simulate", "--golden", "--bless") == 0
    out = capsys.readouterr().out
    assert out.count("regenerated:") == 2


def test_bless_requires_golden():
    assert run_cli("simulate", "--bless") == 3


# -- attacks ----------------------------------------------------------------------


def test_attack_stolen_verifier_lky(capsys):
    assert run_cli("attack", "stolen-verifier-lky", "--trials", "20",
                   "--seed", "1") == 0
    assert "20/20 impersonations accepted" in capsys.readouterr().out


def test_attack_stolen_verifier_proposed_prints_claim_and_verdict(capsys):
    assert run_cli("attack", "stolen-verifier-proposed", "--trials", "20",
                   "--seed", "1") == 0
    out = capsys.readouterr().out
    assert "20/20 impersonations accepted" in out
    assert "claimed: verifier theft alone" in out
    assert "measured verdict: claim does not hold at desk scale" in out


def test_attack_mitm(capsys):
    assert run_cli("attack", "mitm", "--scheme", "proposed", "--field", "e_b",
                   "--value", "8") == 0
    out = capsys.readouterr().out
    assert "no impersonation" in out
    assert "client rejected" in out


def test_attack_census(capsys):
    assert run_cli("attack", "census", "--dictionary", "10,11",
                   "--x", "3", "--y", "4") == 0
    out = capsys.readouterr().out
    assert "10: consistent (witness x'=3, y'=4)" in out
    assert "11: ruled out" in out


def test_attack_census_dlog_method_agrees(capsys):
    assert run_cli("attack", "census", "--dict", "10,11", "--method", "dlog",
                   "--x", "3", "--y", "4") == 0
    assert "10: consistent (witness x'=3, y'=4)" in capsys.readouterr().out


# -- register ---------------------------------------------------------------------


def test_register_builds_a_store(tmp_path, capsys):
    store_path = tmp_path / "verifiers.tsv"
    args = ("register", "--store", str(store_path), "--hash", "toysum",
            "--id-a", "9", "--id-b", "12", "--password", "10")
    assert run_cli(*args) == 0
    assert "registered id_a=9 id_b=12 v=0x7" in capsys.readouterr().out
    assert VerifierStore.load(store_path).lookup(9, 12).v == 7
    assert run_cli(*args) == 3              # duplicate pair
    assert run_cli(*args, "--replace") == 0


def test_register_maps_string_identities(tmp_path, capsys):
    store_path = tmp_path / "verifiers.tsv"
    assert run_cli("register", "--store", str(store_path),
                   "--id-a", "alice", "--id-b", "bob",
                   "--password", "hunter2") == 0
    err = capsys.readouterr().err
    assert "mapped to integer" in err
    alice = int.from_bytes(hashlib.sha256(b"alice").digest(), "big")
    bob = int.from_bytes(hashlib.sha256(b"bob").digest(), "big")
    assert VerifierStore.load(store_path).lookup(alice, bob) is not None


# -- bench -----------------------------------------------------------------------


def test_bench_renders_table_and_csv(tmp_path, capsys):
    csv_path = tmp_path / "costs.csv"
    assert run_cli("bench", "--trials", "5", "--seed", "0",
                   "--csv", str(csv_path)) == 0
    out = capsys.readouterr().out
    assert "modexp_client" in out
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "scheme,metric,measured,claimed"
    assert len(lines) == 15


def test_bench_rejects_zero_trials():
    assert run_cli("bench", "--trials", "0", "--seed", "0") == 3


# -- session log via environment -----------------------------------------------------


def test_pake_log_env_appends_session_lines(tmp_path, monkeypatch):
    log = tmp_path / "sessions.jsonl"
    monkeypatch.setenv("PAKE_LOG", str(log))
    assert run_cli("simulate", "--scheme", "proposed", "--x", "3",
                   "--y", "4") == 0
    obj = json.loads(log.read_text().splitlines()[-1])
    assert obj["kind"] == "session"
    assert obj["key_a"] == "9"


# -- serve/connect over a real socket ---------------------------------------------------


@pytest.fixture
def served_store(tmp_path):
    store_path = tmp_path / "verifiers.tsv"
    assert run_cli("register", "--store", str(store_path), "--hash", "toysum",
                   "--id-a", "9", "--id-b", "12", "--password", "10") == 0
    return store_path


def test_serve_and_connect_via_cli(served_store, capsys):
    proc = subprocess.Popen(
        [sys.executable, "-u", "-m", "pakelab.cli", "serve",
         "--listen", "127.0.0.1:0", "--store", str(served_store),
         "--hash", "toysum", "--y-override", "4"],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True)
    try:
        banner = proc.stdout.readline()
        match = re.search(r"serving proposed on 127\.0\.0\.1:(\d+)", banner)
        assert match, banner
        addr = f"127.0.0.1:{match.group(1)}"

        assert run_cli("connect", "--addr", addr, "--hash", "toysum",
                       "--id-a", "9", "--id-b", "12", "--password", "10",
                       "--x", "3") == 0
        assert "session key: 9" in capsys.readouterr().out

        # wrong password: authentication refusals exit 1
        assert run_cli("connect", "--addr", addr, "--hash", "toysum",
                       "--id-a", "9", "--id-b", "12", "--password", "11",
                       "--x", "5") == 1
        assert "server refused" in capsys.readouterr().err
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_connect_refused_port_exits_3():
    # nothing listens on a fresh ephemeral port that was never opened
    assert run_cli("connect", "--addr", "127.0.0.1:1", "--hash", "toysum",
                   "--id-a", "9", "--id-b", "12", "--password", "10") == 3


def test_serve_requires_an_existing_store(tmp_path):
    assert run_cli("serve", "--listen", "127.0.0.1:0",
                   "--store", str(tmp_path / "absent.tsv")) == 3


def test_serve_rejects_a_corrupt_store(tmp_path):
    bad = tmp_path / "verifiers.tsv"
    bad.write_text("not a store\n")
    assert run_cli("serve", "--listen", "127.0.0.1:0",
                   "--store", str(bad)) == 2
