from __future__ import annotations

import json

import pytest

from segfib.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, is_unimodal, main, pm_peak, unimodal_at

PM5 = '{"family": "pm", "m": 5}'
P0 = '{"family": "pm", "m": 0}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_generate_pm(capsys):
    code, out, _ = run(capsys, "generate", "--input", PM5)
    assert code == EXIT_OK
    verts = {tuple(v) for v in out["polytope"]["vertices"]}
    assert len(verts) == 8
    assert (1, 1, 5) in verts and (1, 1, 6) in verts


def test_generate_round_trip(capsys, tmp_path):
    f = tmp_path / "p.json"
    assert main(["generate", "--input", PM5, "--output", str(f)]) == EXIT_OK
    code, out, _ = run(capsys, "generate", "--input", str(f))
    assert code == EXIT_OK
    assert json.loads(f.read_text())["polytope"]["vertices"] == out["polytope"]["vertices"]


@pytest.mark.parametrize("spec", ['{"family": "nope"}', '{"family": "pm"}', "[1", '{"points": []}'])
def test_malformed_input_is_usage_error(capsys, spec):
    code, _, err = run(capsys, "generate", "--input", spec)
    assert code == EXIT_USAGE
    assert "error" in err


def test_unknown_task(capsys):
    code, _, _ = run(capsys, "analyze", "--input", PM5, "--tasks", "gaps,bogus")
    assert code == EXIT_USAGE


def test_analyze_gaps(capsys):
    code, out, _ = run(capsys, "analyze", "--input", PM5, "--tasks", "gaps")
    assert code == EXIT_OK
    g = out["results"]["gaps"]
    assert g["gap_vector"] == [0, 2, 4] and g["gamma"] == 3


def test_analyze_cube_all_tasks(capsys):
    code, out, _ = run(capsys, "analyze", "--input", '{"family": "cube", "dim": 3}', "--tasks",
                       "gaps,very_ample,smooth,ehrhart,integrally_closed")
    assert code == EXIT_OK
    r = out["results"]
    assert r["gaps"]["gamma"] == 0
    assert r["very_ample"]["value"] and r["smooth"]["value"] and r["integrally_closed"]["value"]
    assert r["ehrhart"]["coefficients"] == ["1", "3", "3", "1"]


def test_analyze_product_keeps_gaps(capsys):
    spec = '{"family": "product", "base": {"family": "pm", "m": 5}}'
    code, out, _ = run(capsys, "analyze", "--input", spec, "--tasks", "gaps", "--kmax", "8")
    assert code == EXIT_OK
    assert out["results"]["gaps"]["gamma"] >= 2


def test_analyze_height_cap_is_reported(capsys):
    code, out, _ = run(capsys, "analyze", "--input", PM5, "--tasks", "gaps", "--kmax", "2")
    assert code == EXIT_OK
    assert out["results"]["gaps"]["capped"] and out["results"]["gaps"]["cap_reason"] == "height cap"


def test_triangulate_p0(capsys):
    code, out, _ = run(capsys, "triangulate", "--input", P0)
    assert code == EXIT_OK
    assert len(out["triangulation"]["simplices"]) == 6
    assert out["ok"] and all(out["certificates"][k] for k in
                             ("unimodular", "flag", "regular", "verify_complex", "refines"))


@pytest.mark.parametrize("diagonal", ["main", "anti"])
def test_triangulate_pm_reports_face_error(capsys, diagonal):
    code, out, err = run(capsys, "triangulate", "--input", PM5, "--diagonal", diagonal)
    assert code == EXIT_FAILED
    assert out["error"] == "face_compatibility"
    assert err.strip()


def test_triangulate_without_fibration(capsys):
    code, _, _ = run(capsys, "triangulate", "--input", '{"points": [[0, 0], [1, 0], [0, 1]]}')
    assert code == EXIT_USAGE


def test_verify_round_trip(capsys, tmp_path):
    f = tmp_path / "t.json"
    assert main(["triangulate", "--input", P0, "--output", str(f)]) == EXIT_OK
    code, out, _ = run(capsys, "verify", "--input", str(f))
    assert code == EXIT_OK and out["ok"]


def test_verify_detects_tampering(capsys, tmp_path):
    f = tmp_path / "t.json"
    assert main(["triangulate", "--input", P0, "--output", str(f)]) == EXIT_OK
    data = json.loads(f.read_text())
    data["triangulation"]["simplices"].pop()
    f.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--input", str(f))
    assert code == EXIT_FAILED and not out["ok"]


def test_corpus_empty_range(capsys):
    code, out, _ = run(capsys, "corpus", "--input", '{"family": "pm", "m": [5, 4]}')
    assert code == EXIT_OK
    assert out["counts"]["instances"] == 0 and out["witness"] is None


def test_corpus_pm(capsys):
    code, out, _ = run(capsys, "corpus", "--input", '{"family": "pm", "m": [4, 6]}')
    assert code == EXIT_OK
    assert [e["key"] for e in out["instances"]] == ["pm:4", "pm:5", "pm:6"]
    assert out["counts"]["peak_failures"] == 0


def test_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["triangulate", "--input", P0, "--output", str(f)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_unimodality_helpers():
    assert is_unimodal([1, 3, 3, 2]) and not is_unimodal([2, 1, 2])
    assert unimodal_at([0, 2, 4], 3) and not unimodal_at([0, 2, 4], 2)
    assert [pm_peak(m) for m in (4, 5, 6)] == [2, 3, 4]
