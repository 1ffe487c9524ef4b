"""Command-line interface: exit codes, output stability, export formats."""

from __future__ import annotations

import json

import pytest

from wfregions.cli import main

from conftest import FIXTURES


def fx(name: str) -> str:
    return str(FIXTURES / f"{name}.ecws")


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ── analyze ──────────────────────────────────────────────────────────────────


def test_analyze_identical_pair(capsys):
    code, out, _ = run(capsys, "analyze", fx("nested"), fx("nested"))
    assert code == 0
    payload = json.loads(out)
    assert payload["scr"] == []
    assert payload["pscr_exists"] is True
    assert payload["pscr"] == []


def test_analyze_claims_pair(capsys):
    code, out, _ = run(capsys, "analyze", fx("claims_old"), fx("claims_new"))
    assert code == 0
    payload = json.loads(out)
    assert payload["scr"] == ["PC", "PC_enabled", "u1", "u2", "u3"]
    assert payload["pscr"] == ["PC", "PC_enabled"]
    assert payload["per_place"]["u1"] == "overestimation"


def test_analyze_output_is_byte_stable(capsys):
    _, first, _ = run(capsys, "analyze", fx("training_old"), fx("training_new"))
    _, second, _ = run(capsys, "analyze", fx("training_old"), fx("training_new"))
    assert first == second
    # keys arrive sorted for diff-friendly output
    payload = json.loads(first)
    assert list(payload) == sorted(payload)


def test_analyze_with_marking_decision(capsys):
    code, out, _ = run(
        capsys,
        "analyze", fx("claims_old"), fx("claims_new"),
        "--marking", "u1,PC",
    )
    assert code == 0
    assert json.loads(out)["decision"] == "non_migratable"

    code, out, _ = run(
        capsys,
        "analyze", fx("claims_old"), fx("claims_new"),
        "--marking", "u1,c2",
    )
    assert json.loads(out)["decision"] == "migratable"


def test_analyze_unknown_marking_place(capsys):
    code, _, err = run(
        capsys,
        "analyze", fx("nested"), fx("nested"),
        "--marking", "p1,zz",
    )
    assert code == 3
    assert "unknown places" in err


def test_analyze_malformed_marking(capsys):
    code, _, err = run(
        capsys,
        "analyze", fx("nested"), fx("nested"),
        "--marking", "p2,,",
    )
    assert code == 3
    assert "malformed" in err


def test_analyze_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.ecws"), fx("nested"))
    assert code == 2
    assert "cannot read" in err


def test_analyze_parse_error_names_file(capsys, tmp_path):
    bad = tmp_path / "bad.ecws"
    bad.write_text("p1t1\n")
    code, _, err = run(capsys, "analyze", str(bad), fx("nested"))
    assert code == 2
    assert "bad.ecws" in err and "unexpected 't1'" in err


# ── oracle ───────────────────────────────────────────────────────────────────


def test_oracle_reports_agreement(capsys):
    code, out, _ = run(capsys, "oracle", fx("parallel_old"), fx("branchswap_new"))
    assert code == 0
    payload = json.loads(out)
    assert payload["reachable_old"] == 6
    assert payload["non_migratable"] == ["p2,p5", "p3,p4"]
    assert payload["semantic_pscr_exists"] is False
    assert payload["agreement"]["all"] is True


def test_oracle_respects_state_cap(capsys):
    code, _, err = run(capsys, "oracle", fx("nested"), fx("nested"), "--cap", "5")
    assert code == 4
    assert "more than 5 markings" in err


# ── compare ──────────────────────────────────────────────────────────────────


def test_compare_table(capsys):
    code, out, _ = run(capsys, "compare", fx("relabel_old"), fx("relabel_new"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split() == [
        "approach", "totalMarkings", "correctDecisions",
        "falseNegatives", "falsePositives", "unknowns",
    ]
    assert len(lines) == 3
    assert lines[1].startswith("PSCR") and lines[2].startswith("SESE")


def test_compare_json_rows(capsys):
    code, out, _ = run(
        capsys, "compare", fx("relabel_old"), fx("relabel_new"), "--json"
    )
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[0] == {
        "approach": "PSCR",
        "totalMarkings": 8,
        "correctDecisions": 8,
        "falseNegatives": 0,
        "falsePositives": 0,
        "unknowns": 0,
    }
    assert rows[1]["approach"] == "SESE"
    assert rows[1]["correctDecisions"] == 2
    assert rows[1]["falseNegatives"] == 6


def test_compare_uses_scr_when_no_perfect_region(capsys):
    _, out, _ = run(
        capsys, "compare", fx("parallel_old"), fx("branchswap_new"), "--json"
    )
    rows = json.loads(out)["rows"]
    assert rows[0]["approach"] == "SCR"
    assert rows[0]["unknowns"] == 4
    assert rows[0]["falseNegatives"] == rows[0]["falsePositives"] == 0


# ── export ───────────────────────────────────────────────────────────────────


def test_export_ctree_mgs(capsys):
    code, out, _ = run(capsys, "export", fx("nested"), "--what", "ctree", "--format", "mgs")
    assert code == 0
    assert out.strip() == "{p1,p2,p3,({p4,({p5,p7},{p6,p8}),p9},{p10,p11}),p12}"


def test_export_gcs_mgs(capsys):
    code, out, _ = run(
        capsys, "export", fx("nested"), "--what", "gcs", "p6", "--format", "mgs"
    )
    assert code == 0
    assert out.strip() == "{({({p5,p7})},{p10,p11})}"


def test_export_gcs_needs_place(capsys):
    code, _, err = run(capsys, "export", fx("nested"), "--what", "gcs")
    assert code == 2
    assert "needs a place label" in err


def test_export_net_dot(capsys):
    code, out, _ = run(capsys, "export", fx("xorloop_old"), "--what", "net")
    assert code == 0
    assert out.startswith("digraph wfnet {")
    assert '"p1" [shape=circle];' in out
    assert '"t1" [shape=box];' in out
    assert '"p1" -> "t1";' in out


def test_export_net_refuses_mgs(capsys):
    code, _, err = run(
        capsys, "export", fx("xorloop_old"), "--what", "net", "--format", "mgs"
    )
    assert code == 2
    assert "only export as dot" in err


def test_export_ctree_dot(capsys):
    code, out, _ = run(capsys, "export", fx("nested"), "--what", "ctree", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph ctree {")


def test_export_unknown_target(capsys):
    code, _, err = run(capsys, "export", fx("nested"), "--what", "pdf")
    assert code == 2
    assert "unknown export target" in err


# ── fuzz ─────────────────────────────────────────────────────────────────────


def test_fuzz_reports_agreement(capsys):
    code, out, _ = run(capsys, "fuzz", "--count", "30", "--seed", "7")
    assert code == 0
    assert out.strip() == "checked 30 pairs: full agreement"


def test_fuzz_is_deterministic_per_seed(capsys):
    _, first, _ = run(capsys, "fuzz", "--count", "20", "--seed", "3")
    _, second, _ = run(capsys, "fuzz", "--count", "20", "--seed", "3")
    assert first == second


# ── argument errors ──────────────────────────────────────────────────────────


def test_missing_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
