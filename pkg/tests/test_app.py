"""
Integration tests for the command-line interface
Runs main() on corpus documents and checks exit codes and report shape.
"""

import json
from pathlib import Path

import pytest

from app import EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, build_report, main
from roots import RootSystem
from settings import TOOL_VERSION

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else None


class TestClassifyCommand:
    """Test the classify subcommand."""

    def test_a2_report(self, capsys):
        """Test that A2 is spherical, not applicable, with a stable key order."""
        code, report = run(capsys, "classify", CORPUS / "a2.json")
        assert code == EXIT_OK
        assert list(report)[:3] == ["tool_version", "command", "input_digest"]
        assert report["tool_version"] == TOOL_VERSION
        assert report["coxeter_matrix"] == [[1, 3], [3, 1]]
        assert report["classification"]["components"][0]["label"] == "A2"
        assert report["applicable"]["value"] is False
        assert report["coxeter_element"] == "elliptic"
        assert "timing" not in report

    def test_affine_family_member(self, capsys):
        """Test that [[2,-5],[-1,2]] is classified affine."""
        code, report = run(capsys, "classify", CORPUS / "m_minus5.json")
        assert code == EXIT_OK
        assert report["classification"]["components"][0]["kind"] == "affine"
        assert report["coxeter_matrix"] == [[1, "inf"], ["inf", 1]]

    def test_triangle_applicable(self, capsys):
        """Test that the (3,3,4) triangle group is applicable with a hyperbolic Coxeter element."""
        code, report = run(capsys, "classify", CORPUS / "tri334.json")
        assert code == EXIT_OK
        assert report["applicable"]["value"] is True
        assert report["coxeter_element"] == "hyperbolic"

    def test_digest_is_stable(self, capsys):
        """Test that the same input gives the same digest."""
        _, first = run(capsys, "classify", CORPUS / "a2.json")
        _, second = run(capsys, "classify", CORPUS / "a2.json")
        assert first["input_digest"] == second["input_digest"]

    def test_timing_only_on_request(self, capsys):
        """Test that --timing adds the elapsed time."""
        _, report = run(capsys, "--timing", "classify", CORPUS / "a2.json")
        assert "seconds" in report["timing"]


class TestAnalyzeCommand:
    """Test the analyze subcommand."""

    def test_triangle_not_closed(self, capsys):
        """Test that "1 2 1 3" in the triangle group is NotClosed."""
        code, report = run(capsys, "analyze", CORPUS / "tri334.json", "--word", "1 2 1 3")
        assert code == EXIT_OK
        assert report["certificate"]["conclusion"] == "NotClosed"
        assert report["certificate"]["verification"]["passed"] is True
        assert list(report)[-1] == "caps"

    def test_a2_trivial(self, capsys):
        """Test that A2 with "1 2" is TrivialContraction."""
        code, report = run(capsys, "analyze", CORPUS / "a2.json", "--word", "1 2")
        assert code == EXIT_OK
        assert report["certificate"]["conclusion"] == "TrivialContraction"

    def test_caps_from_flags(self, capsys):
        """Test that explicit caps appear in the report."""
        _, report = run(capsys, "analyze", CORPUS / "a2.json", "--word", "1 2", "--orbit-cap", "5",
                        "--max-power", "8")
        assert report["caps"]["orbit_cap"] == 5
        assert report["caps"]["power_cap"] == 8


class TestInputErrors:
    """Test exit code 3 for every kind of bad input."""

    def test_missing_file(self, capsys, tmp_path):
        """Test that an unreadable file is an input error."""
        code, report = run(capsys, "classify", tmp_path / "missing.json")
        assert code == EXIT_INPUT_ERROR
        assert "cannot read" in report["error"]

    def test_invalid_matrix(self, capsys, tmp_path):
        """Test that a positive off-diagonal entry is an input error."""
        path = tmp_path / "bad.json"
        path.write_text('{"cartan": [[2, 1], [-1, 2]]}', encoding="utf-8")
        code, _ = run(capsys, "classify", path)
        assert code == EXIT_INPUT_ERROR

    def test_bad_word(self, capsys):
        """Test that a generator outside the rank is an input error."""
        code, report = run(capsys, "analyze", CORPUS / "a2.json", "--word", "1 9")
        assert code == EXIT_INPUT_ERROR
        assert "error" in report

    def test_unknown_subcommand(self, capsys):
        """Test that argparse failures map to exit code 3."""
        assert main(["explode"]) == EXIT_INPUT_ERROR

    def test_help_exits_cleanly(self, capsys):
        """Test that --help is not an error."""
        assert main(["--help"]) == EXIT_OK

    def test_tree_degree_limit(self, capsys):
        """Test that degree 11 is refused."""
        code, _ = run(capsys, "tree", "witness", "--degree", "11")
        assert code == EXIT_INPUT_ERROR


class TestWallsCommand:
    """Test the walls subcommand."""

    def test_affine_simple_walls_nested(self, capsys):
        """Test that the simple walls of A1~ are nested with (-,-) empty."""
        code, report = run(capsys, "walls", CORPUS / "a1_affine.json", "--alpha", "1,0", "--beta", "0,1")
        assert code == EXIT_OK
        assert report["relation"] == {"kind": "nested", "empty_quadrant": "(-,-)"}
        assert report["disjoint"] is False
        assert report["pairings"] == [-2, -2]
        assert "bfs_radius" in report["caps"]

    def test_triangle_simple_walls_cross(self, capsys):
        """Test that two simple walls of the triangle group cross."""
        code, report = run(capsys, "walls", CORPUS / "tri334.json", "--alpha", "1, 0, 0", "--beta", "0,1,0")
        assert code == EXIT_OK
        assert report["alpha"] == [1, 0, 0]
        assert report["relation"]["kind"] == "crossing"

    def test_search_radius_exhausted(self, capsys):
        """Test that walls two chambers apart are undecided within radius 1."""
        code, report = run(capsys, "walls", CORPUS / "a1_affine.json", "--alpha", "1,0", "--beta", "3,2",
                           "--bfs-radius", "1")
        assert code == EXIT_INCONCLUSIVE
        assert report["relation"] is None

    @pytest.mark.parametrize("alpha", ["1,-1", "1,1", "1,0,0"])
    def test_bad_roots(self, capsys, alpha):
        """Test that mixed-sign, imaginary and wrong-arity literals are input errors."""
        code, report = run(capsys, "walls", CORPUS / "a1_affine.json", "--alpha", alpha, "--beta", "0,1")
        assert code == EXIT_INPUT_ERROR
        assert "error" in report


class TestCrossCheckFailure:
    """Test that a failed internal cross-check is reported, not raised."""

    def test_crossing_disagreement_exit_code(self, capsys, monkeypatch):
        """Test that a pairing/order disagreement gives exit code 1 with a JSON error."""
        def disagree(self, alpha, beta):
            raise RuntimeError(f"crossing criteria disagree for roots {alpha} and {beta}")

        monkeypatch.setattr(RootSystem, "walls_cross", disagree)
        code, report = run(capsys, "walls", CORPUS / "tri334.json", "--alpha", "1,0,0", "--beta", "0,1,0")
        assert code == EXIT_VERIFICATION_FAILED
        assert "crossing criteria disagree" in report["error"]


class TestTreeCommandIntegration:
    """Test the tree subcommands end to end."""

    def test_witness(self, capsys):
        """Test that the non-closed witness passes at depth 14."""
        code, report = run(capsys, "tree", "witness", "--depth", "14")
        assert code == EXIT_OK
        assert report["witness"]["passed"] is True
        assert len(report["witness"]["sequence"]) == 8
        assert report["caps"]["depth"] == 14

    def test_scale_of_translation(self, capsys):
        """Test that a translation of length 2 in the 3-regular tree has scale 4."""
        code, report = run(capsys, "tree", "scale", "--depth", "12", "--translation-length", "2")
        assert code == EXIT_OK
        assert report["scale"] == 4
        assert report["q"] == 2

    def test_fold_corpus_line(self, capsys):
        """Test that the corpus line folds with one elliptic factor."""
        code, report = run(capsys, "tree", "fold", "--line", CORPUS / "line.json", "--depth", "10")
        assert code == EXIT_OK
        assert report["fold"]["elliptic_factors"] == 1
        assert report["line"]["forward"] == {"prefix": "012", "block": "01"}

    def test_parabolic_portrait(self, capsys):
        """Test that the line-reversing portrait is outside P_h and the criteria agree."""
        code, report = run(capsys, "tree", "parabolic", "--portrait", CORPUS / "portrait.json", "--depth", "12")
        assert code == EXIT_OK
        assert report["parabolic"] == {
            "in_parabolic": False,
            "bounded_orbit": False,
            "agrees": True,
            "shift": None,
        }

    def test_contract_random_elliptic(self, capsys):
        """Test that a seeded elliptic element is checked over four samples."""
        code, report = run(capsys, "tree", "contract", "--depth", "12", "--seed", "3")
        verdict = report["contraction"]["verdict"]
        assert code == (EXIT_INCONCLUSIVE if verdict == "Inconclusive" else EXIT_OK)
        assert len(report["contraction"]["ray_radii"]) == 5
        assert report["contraction"]["horizon"] == 4

    def test_classify_portrait(self, capsys):
        """Test that the portrait is elliptic."""
        code, report = run(capsys, "tree", "classify", "--portrait", CORPUS / "portrait.json", "--depth", "10")
        assert code == EXIT_OK
        assert report["isometry"]["kind"] == "elliptic"


class TestBuildReport:
    """Test report assembly."""

    def test_key_order(self):
        """Test that caps and timing come last."""
        report = build_report(["classify"], "abc", {"x": 1}, {"orbit_cap": 1}, 0.12345)
        assert list(report) == ["tool_version", "command", "input_digest", "x", "caps", "timing"]
        assert report["timing"] == {"seconds": 0.123}

    @pytest.mark.parametrize("caps, timing", [(None, None)])
    def test_optional_sections_omitted(self, caps, timing):
        """Test that absent caps and timing are left out."""
        assert list(build_report([], "d", {}, caps, timing)) == ["tool_version", "command", "input_digest"]
