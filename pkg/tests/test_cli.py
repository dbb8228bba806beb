import json

import pytest

from plkacr import fixtures
from plkacr.cli import main
from plkacr.netfile import load


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def fx(name):
    return fixtures.path(name)


def test_analyze_example1(capsys):
    rep = report(capsys, "analyze", fx("example1"))
    assert rep["schema"] == 1 and rep["command"] == "analyze"
    assert rep["summary"]["deficiency"] == 0
    assert rep["classification"]["kind"] == "PL-RDK"
    assert {"reactions": ["R1", "R2"], "species": "A2"}.items() <= rep["sf_pairs"][0].items()


def test_analyze_schmitz(capsys):
    rep = report(capsys, "analyze", fx("schmitz"))
    assert rep["summary"]["deficiency"] == 0
    c = rep["classification"]
    assert c["minimally_ndk"]
    (node,) = c["ndk_nodes"]
    assert node["reactant"] == "M1" and node["binary"] and node["monospecies"]


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", fx("example4"), "--output", "text")
    assert code == 0
    assert "PL-NDK" in out and "SF-pair {R1, R4} in X1" in out


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    code, out, err = run(capsys, "analyze", bad)
    assert code == 2 and out == "" and "line 1" in err


def test_missing_file_and_bad_args(capsys, tmp_path):
    assert run(capsys, "analyze", tmp_path / "none.json")[0] == 2
    assert run(capsys, "frobnicate", fx("example1"))[0] == 2
    assert run(capsys, "verify", fx("example4"), "--trials", "0")[0] == 2


def test_transform_schmitz_writes_file(capsys, tmp_path):
    out = tmp_path / "t.json"
    rep = report(capsys, "transform", fx("schmitz"), "--write", out)
    after = rep["after"]
    assert (after["n"], after["l"], after["deficiency"]) == (8, 2, 1)
    assert all(rep["checks"].values())
    sys = load(out)
    assert sys.net.n == 8


def test_transform_noop_and_forced(capsys):
    rep = report(capsys, "transform", fx("example1"))
    assert rep["moves"] == [] and "already PL-RDK" in rep["notes"][0]
    rep = report(capsys, "transform", fx("example1"), "--force-translate", "R3")
    assert rep["after"]["deficiency"] == 1 and rep["checks"]["dynamically_equivalent"]
    assert rep["transformed_network"]["schema"] == 1


def test_transform_bad_label(capsys):
    code, _, err = run(capsys, "transform", fx("example1"), "--force-translate", "R9")
    assert code == 2 and "R9" in err


def test_transform_equivalence_breach(capsys, monkeypatch):
    from plkacr import cli
    from plkacr.transform import TransformChecks

    monkeypatch.setattr(cli, "check_transform", lambda rec: TransformChecks(True, True, True, False))
    assert run(capsys, "transform", fx("schmitz"))[0] == 3


def test_decompose(capsys):
    rep = report(capsys, "decompose", fx("example1"))
    d = rep["decomposition"]
    assert d["parts"] == [["R1", "R2"], ["R3", "R4"]]
    assert d["independent"] and d["incidence_independent"] and d["bi_independent"] and d["c_decomposition"]


def test_decompose_bad_partition(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps({"parts": [["R1"], ["R1", "R2", "R3", "R4"]]}))
    code, _, err = run(capsys, "decompose", fx("example1"), "--decomposition", f)
    assert code == 2 and "more than one part" in err


def test_certify_example4_verify(capsys):
    rep = report(capsys, "certify", fx("example4"), "--verify", fx("example4_rates"))
    fired = {(c["species"], c["theorem"]) for c in rep["certificates"]}
    assert {("X1", "DZ-d0"), ("X3", "DZ-d0")} <= fired
    spreads = rep["verification"]["species"]
    assert spreads["X1"]["acr_spread"] <= 1e-6 and spreads["X3"]["acr_spread"] <= 1e-6
    assert rep["disagreements"] == []
    cert = rep["certificates"][0]
    assert cert["assumptions"]["positive_equilibrium"]["status"] == "numeric-evidence"
    assert cert["assumptions"]["positive_equilibrium"]["residual"] <= 1e-10


def test_certify_idhkp(capsys):
    rep = report(capsys, "certify", fx("idhkp"), "--assume", "positive-equilibrium")
    assert ("I", "DZ-d0") in {(c["species"], c["theorem"]) for c in rep["certificates"]}
    assert not any(c["conditional"] for c in rep["certificates"])


def test_certify_example1_decomposition(capsys):
    rep = report(
        capsys, "certify", fx("example1"),
        "--decomposition", fx("example1_linkage_classes"), "--assume", "complex-balanced",
    )
    fired = {(c["kind"], c["species"]) for c in rep["certificates"]}
    assert {("ACR", "A2"), ("BCR", "A2")} <= fired


def test_certify_nothing_fires(capsys):
    rep = report(capsys, "certify", fx("ab_mass_action"))
    assert rep["certificates"] == [] and rep["reasons"]


def test_certify_reports_disagreement(capsys, tmp_path):
    k = tmp_path / "k.json"
    k.write_text(json.dumps([1] * 8))
    code, out, _ = run(
        capsys, "certify", fx("schmitz"), "--assume", "complex-balanced", "--verify", k, "--output", "text"
    )
    assert code == 0
    assert "WARNING: ACR(M1)" in out


def test_certify_invalid_decomposition(capsys, tmp_path):
    f = tmp_path / "d.json"
    f.write_text(json.dumps([["R1"], ["R2"]]))
    assert run(capsys, "certify", fx("example1"), "--decomposition", f)[0] == 2


def test_rates_file_errors(capsys, tmp_path):
    f = tmp_path / "k.json"
    f.write_text(json.dumps({"rates": {"R1": 1}}))
    assert run(capsys, "certify", fx("example4"), "--verify", f)[0] == 2
    f.write_text(json.dumps([1, 1, 2, 1, -1]))
    assert run(capsys, "verify", fx("example4"), "--rates", f)[0] == 2
    assert run(capsys, "verify", fx("example4"))[0] == 2


def test_verify(capsys):
    rep = report(capsys, "verify", fx("ab_mass_action"), "--species", "A")
    a = rep["verification"]["species"]["A"]
    assert a["acr"] == "fail" and a["acr_spread"] > 1e-3
    code, _, _ = run(capsys, "verify", fx("ab_mass_action"), "--species", "Q")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", fx("schmitz")],
        ["certify", fx("example4"), "--verify", fx("example4_rates"), "--seed", "3"],
        ["transform", fx("schmitz")],
    ],
)
def test_reports_are_byte_identical(capsys, argv):
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
