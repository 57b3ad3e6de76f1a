import json
import subprocess
import sys

import pytest

from ifnet.cli import main
from ifnet.model import serialize_network_spec, make_spec, msg
from netgen import layered_spec

SPECS = "specs"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prune_layered(capsys):
    code, out, _ = run(["prune", "--spec", f"{SPECS}/layered17.json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["m_star"] == ["M_{1,2,4}^{3}", "M_{3,4}^{1,2}", "M_{4}^{1}"]


def test_prune_lex_tie(capsys):
    code, out, _ = run(["prune", "--spec", f"{SPECS}/layered17.json", "--tie", "lex"], capsys)
    assert code == 0 and json.loads(out)["m_tilde"]


def test_sumrate_and_encoding(capsys):
    code, out, _ = run(["sumrate", "--spec", f"{SPECS}/layered17.json", "--encoding"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["terms"][-1] == "I(M_{1,2,4}^{3};Y_3|Q)"
    assert doc["encoding_terms"][-1] == "I(W_{1,2,4};Y_3|Q)"
    assert doc["with_q"] is True


def test_sumrate_gaussian_eval_rounded(capsys):
    code, out, _ = run(["sumrate", "--spec", f"{SPECS}/layered17.json", "--eval", "gaussian"], capsys)
    v = json.loads(out)["evaluation"]["value"]
    assert code == 0 and v > 0
    assert v == float(f"{v:.12g}")


def test_sumrate_oracle_eval(tmp_path, capsys):
    from ifnet import oracle
    ch = oracle.cascade_network(oracle.bsc(0.11), [oracle.bsc(0.1)], (2,))
    p = tmp_path / "bc.json"
    p.write_text(serialize_network_spec(make_spec(1, 2, [msg("1", "1")], discrete=ch)))
    code, out, _ = run(["sumrate", "--spec", str(p), "--eval", "oracle"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["evaluation"]["value"] == pytest.approx(1 - oracle.binary_entropy(0.11), abs=1e-11)
    assert doc["terms"] == ["I(M_{1}^{1};Y_1)"]
    code, _, err = run(["sumrate", "--spec", str(p), "--eval", "oracle", "--caps", "8", "--budget", "10"], capsys)
    assert code == 3 and "budget" in err


def test_region_four_tx(capsys):
    code, out, _ = run(["region", "--spec", f"{SPECS}/four_tx_mac.json"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["constraints"]) == 9
    assert sorted(doc["sumrate_messages"]) == ["M_{1,2,3}^{1}", "M_{2,4}^{1}"]
    code, out, _ = run(["region", "--spec", f"{SPECS}/four_tx_mac.json", "--han"], capsys)
    assert len(json.loads(out)["constraints"]) == 15


def test_region_rejects_multi_receiver(capsys):
    code, _, err = run(["region", "--spec", f"{SPECS}/layered17.json"], capsys)
    assert code == 2 and err.startswith("error:")


def test_graph_dot(capsys):
    code, out, _ = run(["graph", "--spec", f"{SPECS}/four_tx_mac.json"], capsys)
    assert code == 0 and out.startswith("digraph")
    code, out2, _ = run(["graph", "--spec", f"{SPECS}/four_tx_mac.json", "--encoding"], capsys)
    assert code == 0 and "W_{1,2,3}" in out2


def test_bound_variants(capsys):
    code, out, _ = run(["bound", "--spec", f"{SPECS}/layered17.json"], capsys)
    assert code == 0 and len(json.loads(out)["bounds"]) == 1
    code, out, _ = run(["bound", "--spec", f"{SPECS}/layered17.json", "--all-orders"], capsys)
    assert len(json.loads(out)["bounds"]) == 6
    code, out, _ = run(["bound", "--spec", f"{SPECS}/four_tx_mac.json", "--theorem", "6"], capsys)
    assert json.loads(out)["count"] == 15
    code, out, _ = run(["bound", "--spec", f"{SPECS}/four_tx_mac.json", "--theorem", "7"], capsys)
    doc = json.loads(out)
    assert doc["count"] == 15 * 4 and all("theta" in c for c in doc["constraints"])


def test_bound_over_limit_exits_3(capsys):
    code, _, err = run(["bound", "--spec", f"{SPECS}/layered17.json", "--theorem", "7", "--all-orders"], capsys)
    assert code == 3 and "limit" in err


def test_classify(capsys):
    code, out, _ = run(["classify", "--spec", f"{SPECS}/many_to_one.json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["class"] == "many_to_one" and doc["exact"]
    code, out, _ = run(["classify", "--spec", f"{SPECS}/layered17.json"], capsys)
    assert json.loads(out)["class"] == "degraded"


def test_check_degraded(tmp_path, capsys):
    code, out, _ = run(["check-degraded", "--spec", f"{SPECS}/layered17.json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["degraded"] and doc["order"] == [1, 2, 3]
    code, out, _ = run(["check-degraded", "--spec", f"{SPECS}/many_to_one.json"], capsys)
    assert json.loads(out)["degraded"] is False
    from ifnet import oracle
    ch = oracle.cascade_network(oracle.bsc(0.11), [oracle.bsc(0.1)], (2,))
    p = tmp_path / "bc.json"
    p.write_text(serialize_network_spec(make_spec(1, 2, [msg("1", "2")], discrete=ch)))
    code, out, _ = run(["check-degraded", "--spec", str(p)], capsys)
    assert json.loads(out) == {"degraded": True, "method": "physical", "order": [1, 2]}
    code, out, _ = run(["check-degraded", "--spec", str(p), "--stochastic"], capsys)
    doc = json.loads(out)
    assert doc["degraded"] and doc["method"] == "stochastic" and doc["order"] == [1, 2]


def test_gaussian_subcommand(capsys):
    code, out, _ = run(["gaussian", "--prop", "5", "--a", "15", "--b", "0.0666666666667", "--powers", "100,0.5"],
                       capsys)
    assert code == 0 and json.loads(out)["value"] > 0
    code, out, _ = run(["gaussian", "--prop", "4", "--a", "1,1,1,1", "--b2", "1.5", "--b3", "2",
                        "--powers", "1,1,1,1", "--alpha", "0", "--beta", "0"], capsys)
    assert code == 0 and json.loads(out)["alpha"] == 0
    code, _, _ = run(["gaussian", "--prop", "4", "--a", "1,1"], capsys)
    assert code == 2


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run(["sweep-fig23", "--points", "5", "--out", str(out)], capsys)
    assert code == 0 and stdout == ""
    lines = out.read_text().splitlines()
    assert lines[0] == "P,optimal,alpha1,beta1" and len(lines) == 6
    code, _, _ = run(["sweep-fig23", "--points", "0"], capsys)
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["prune", "--spec", "specs/empty_messages.json"],
    ["prune", "--spec", "no/such/file.json"],
    ["prune", "--spec", "specs/layered17.json", "--order", "1,1,2"],
    ["sumrate", "--spec", "specs/four_tx_mac.json", "--eval", "oracle"],
])
def test_invalid_inputs_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_threads_flag_accepted_and_deterministic(capsys):
    _, a, _ = run(["--threads", "4", "sumrate", "--spec", "specs/layered17.json", "--eval", "gaussian"], capsys)
    _, b, _ = run(["sumrate", "--spec", "specs/layered17.json", "--eval", "gaussian"], capsys)
    assert a == b


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ifnet", "prune", "--spec", "specs/layered17.json"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "M_{4}^{1}" in r.stdout
    r = subprocess.run([sys.executable, "-m", "ifnet", "nope"], capture_output=True, text=True)
    assert r.returncode == 2


def test_spec_file_matches_builder():
    with open("specs/layered17.json") as f:
        from ifnet.model import parse_network_spec
        spec = parse_network_spec(f.read())
    assert spec.messages == layered_spec().messages
