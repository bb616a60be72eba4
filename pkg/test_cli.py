"""
Tests for the command line surface: reports, exit codes and output files
"""

import json
from pathlib import Path

import pytest

from DGMorse.main import dispatch, main
from DGMorse.output_formatter import OutputFormatter
from DGMorse.config import ToolkitConfig

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return str((FIXTURES / name).resolve())


def run(*argv):
    return dispatch([str(a) for a in argv])


def test_passing_module_report():
    code, report = run("ainfty", "verify", fixture("c2_regular.json"))
    assert code == 0
    assert report["schema"] == 1
    assert report["command"] == "ainfty verify"
    assert report["status"] == "pass"
    assert report["seed"] == 0


def test_failing_morphism_exits_with_one():
    code, report = run("ainfty", "verify", fixture("c2_bad.json"), "--max-arity", 3)
    assert code == 1
    assert report["status"] == "fail"


def test_bad_square_is_a_verification_failure():
    code, report = run("complex", "homology", fixture("bad_square.json"))
    assert code == 1
    assert report["checks"][0]["check"] == "ComplexError"
    assert "witness" in report["checks"][0]


def test_missing_file_is_an_input_error():
    code, report = run("ainfty", "verify", "missing.json")
    assert code == 2
    assert report["status"] == "error"
    assert report["error"]["type"] == "SchemaError"


def test_wrong_fixture_kind_is_an_input_error():
    code, report = run("morse", "build", fixture("c2_regular.json"))
    assert code == 2
    assert "expected enriched" in report["error"]["message"]


def test_invalid_configuration_is_an_input_error():
    code, report = run("sng", "betti", "--max-k", -1)
    assert code == 2
    assert report["error"]["type"] == "ConfigurationError"


def test_argument_errors_return_an_empty_report():
    code, report = run("bogus")
    assert code == 2
    assert report == {}


def test_complex_homology_tables():
    code, report = run("complex", "homology", fixture("circle_cells.json"))
    assert code == 0
    assert report["tables"]["homology"] == [{"degree": 0, "dim": 1}, {"degree": 1, "dim": 1}]


def test_sng_coproduct_rows():
    code, report = run("sng", "coproduct", "--group", "C2", "--n", 3, "--class", "x,[s],1")
    assert code == 0
    rows = [(r["left"], r["right"], r["multiplicity"]) for r in report["tables"]["coproduct"]]
    assert rows == [("x_{[1],0}", "x_{[s],0}", 1), ("x_{[s],0}", "x_{[1],0}", 1)]


def test_sng_betti_with_group_fixture():
    code, report = run("sng", "betti", "--group", fixture("c3_table.json"), "--max-k", 1)
    assert code == 0
    assert report["tables"]["betti"][0] == {"degree": 0, "dim": 3}


def test_sng_check_cyclic_case():
    code, report = run("sng", "check", "--group", "C2", "--max-k", 2, "--workers", 1)
    assert code == 0
    assert [c["check"] for c in report["checks"]] == ["sng_properties", "morse_cross_check"]


def test_specseq_page_table():
    code, report = run("morse", "specseq", fixture("lens2.json"), "--page", 2)
    assert code == 0
    rows = {row["q"]: row for row in report["tables"]["E2"]}
    assert rows[0] == {"q": 0, "0": 2, "1": 0, "2": 0, "3": 2}
    assert rows[1] == {"q": 1, "0": 0, "1": 0, "2": 0, "3": 0}


def test_mutated_enriched_complex_fails():
    code, report = run("morse", "build", fixture("lens2_mutated_enriched.json"))
    assert code == 1
    assert report["checks"][0]["check"] == "ComplexError"


def test_induced_identity_has_full_rank():
    lens = fixture("lens2.json")
    code, report = run("morse", "induce", fixture("c2_conj_identity.json"), lens, lens)
    assert code == 0
    assert all(row["rank"] == row["source"] for row in report["tables"]["homology_map"])


def test_induce_with_small_arity_bound_fails():
    lens = fixture("lens2.json")
    code, report = run("morse", "induce", fixture("c2_conj_identity.json"), lens, lens, "--max-arity", 3)
    assert code == 1
    assert report["checks"][0]["check"] == "ArityBoundError"


def test_pathmod_transfer_of_cone():
    code, report = run("pathmod", "transfer", fixture("c2_cone.json"), "--max-arity", 3)
    assert code == 0
    assert report["tables"]["fiber"] == [{"degree": 0, "dim": 2}, {"degree": 1, "dim": 0}]


def test_cubical_boundary_of_circle():
    code, report = run("cubical", "boundary", fixture("circle.json"))
    assert code == 0
    assert report["tables"]["boundary"] == []


def test_sweeps_are_deterministic_in_the_seed():
    argv = ("ainfty", "sweep", "all", "--profile", "acceptance", "--instances", 1, "--seed", 5,
            "--max-arity", 3, "--arity", 3, "--workers", 1)
    first = run(*argv)
    second = run(*argv)
    assert first == second
    assert first[0] == 0
    assert first[1]["seed"] == 5
    assert first[1]["tables"]["sweeps"] == [{"sweep": f"{name}_sweep", "instances": 1, "failed": 0}
                                            for name in ("iso", "transfer", "quasi", "path")]
    details = first[1]["checks"][0]["checks"][0]["details"]
    assert details["degrees"] == [-2, 6]
    assert details["max_dim"] == 5


def test_timings_are_reported_on_request():
    code, report = run("complex", "retract", fixture("interval.json"), "--timings")
    assert code == 0
    assert "total" in report["timings"]


def test_empty_report_serializes_to_empty_object():
    assert OutputFormatter(ToolkitConfig()).emit_report({}) == b"{}\n"


def test_unknown_format_is_rejected():
    from DGMorse.exceptions import ConfigurationError

    with pytest.raises(ConfigurationError):
        OutputFormatter(ToolkitConfig()).emit_report({}, "yaml")


def test_main_writes_text_output(tmp_path):
    target = tmp_path / "out" / "report.txt"
    code = main(["complex", "homology", fixture("interval.json"), "--format", "text", "-o", str(target)])
    assert code == 0
    text = target.read_text(encoding="utf-8")
    assert text.startswith("command: complex homology  status: pass")
    assert "[homology]" in text


def test_main_prints_json_and_saves_results(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["complex", "homology", fixture("interval.json"), "--save"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "pass"
    saved = sorted(p.name for p in (tmp_path / "dgmorse_output").iterdir())
    assert len(saved) == 2
    assert saved[0].startswith("dgmorse_results_")
    assert saved[1].startswith("dgmorse_summary_")


def test_main_reports_input_errors_on_stderr(capsys):
    assert main(["ainfty", "verify", "missing.json"]) == 2
    assert capsys.readouterr().err.startswith("error: ")


def test_main_saves_text_results(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["complex", "homology", fixture("interval.json"), "--format", "text", "--save"])
    assert code == 0
    assert capsys.readouterr().out.startswith("command: complex homology")
    saved = sorted((tmp_path / "dgmorse_output").iterdir())
    assert saved[0].name.startswith("dgmorse_results_") and saved[0].suffix == ".txt"
    assert "[homology]" in saved[0].read_text(encoding="utf-8")
    assert saved[1].name.startswith("dgmorse_summary_")
