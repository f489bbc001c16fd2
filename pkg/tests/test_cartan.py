"""
Unit tests for GCM parsing, Coxeter matrices, components and type classification.
"""

import math
import json
import pytest

from cartan import (
    CartanMatrixError,
    CoxeterKind,
    GeneralizedCartanMatrix,
    classify_type,
    components,
    coxeter_matrix,
    main_theorem_applicable,
    parse_gcm,
    submatrix,
)


def gcm(rows):
    return GeneralizedCartanMatrix(tuple(tuple(r) for r in rows))


def block(*blocks):
    n = sum(len(b) for b in blocks)
    rows = [[0] * n for _ in range(n)]
    offset = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                rows[offset + i][offset + j] = x
        offset += len(b)
    return gcm(rows)


class TestParseGcm:
    """Test GCM document parsing and validation."""

    def test_a2_document(self):
        """Test that the A2 document parses to a rank-2 matrix."""
        A = parse_gcm('{"cartan": [[2,-1],[-1,2]]}')
        assert A.n == 2
        assert A.entries == ((2, -1), (-1, 2))
        assert A.q == 2

    def test_large_negative_entry_accepted(self):
        """Test that [[2,-5],[-1,2]] is a valid GCM."""
        A = parse_gcm('{"cartan": [[2,-5],[-1,2]]}')
        assert A[0, 1] == -5

    def test_zero_asymmetry_rejected(self):
        """Test that a one-sided zero is reported with both mirrored positions."""
        with pytest.raises(CartanMatrixError) as info:
            parse_gcm('{"cartan": [[2,-1],[0,2]]}')
        assert "zero-asymmetry" in str(info.value)
        assert info.value.location == "(1,2)/(2,1)"

    def test_bad_diagonal_rejected(self):
        """Test that a diagonal entry other than 2 is rejected at its position."""
        with pytest.raises(CartanMatrixError) as info:
            parse_gcm('{"cartan": [[2,-1],[-1,3]]}')
        assert info.value.location == (2, 2)

    def test_positive_off_diagonal_rejected(self):
        """Test that positive off-diagonal entries are rejected."""
        with pytest.raises(CartanMatrixError) as info:
            parse_gcm('{"cartan": [[2,1],[-1,2]]}')
        assert info.value.location == (1, 2)

    def test_non_square_rejected(self):
        """Test that ragged rows are rejected."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": [[2,-1],[-1]]}')

    def test_empty_matrix_rejected(self):
        """Test that a rank-0 matrix is rejected."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": []}')

    def test_malformed_json_rejected(self):
        """Test that broken JSON is reported as a CartanMatrixError."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": [[2,-1],[-1,2]]')

    def test_trailing_data_rejected(self):
        """Test that trailing content after the document is rejected."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": [[2]]} {}')

    def test_unknown_field_rejected(self):
        """Test that unexpected fields are rejected."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": [[2]], "colour": "blue"}')

    def test_non_integer_entry_rejected(self):
        """Test that float entries are rejected."""
        with pytest.raises(CartanMatrixError):
            parse_gcm('{"cartan": [[2.0, -1], [-1, 2]]}')

    def test_q_echoed(self):
        """Test that q is carried into the matrix and its report."""
        A = parse_gcm(json.dumps({"name": "a1", "cartan": [[2]], "q": 3}))
        assert A.to_dict() == {"name": "a1", "cartan": [[2]], "q": 3}


class TestCoxeterMatrix:
    """Test the p -> m rule."""

    def test_simple_bond(self):
        """Test that p=1 gives m=3."""
        assert coxeter_matrix(gcm([[2, -1], [-1, 2]])).m[0][1] == 3

    def test_infinite_bond(self):
        """Test that p=5 gives m=infinity."""
        assert coxeter_matrix(gcm([[2, -5], [-1, 2]])).m[0][1] == math.inf

    def test_commuting(self):
        """Test that p=0 gives m=2."""
        assert coxeter_matrix(gcm([[2, 0], [0, 2]])).m[0][1] == 2

    def test_double_and_triple_bonds(self):
        """Test that p=2 and p=3 give m=4 and m=6."""
        assert coxeter_matrix(gcm([[2, -2], [-1, 2]])).m[0][1] == 4
        assert coxeter_matrix(gcm([[2, -3], [-1, 2]])).m[0][1] == 6

    def test_symmetric_with_unit_diagonal(self):
        """Test that the Coxeter matrix is symmetric with 1 on the diagonal."""
        D = coxeter_matrix(gcm([[2, -1, -1], [-1, 2, -1], [-1, -2, 2]]))
        for i in range(3):
            assert D.m[i][i] == 1
            for j in range(3):
                assert D.m[i][j] == D.m[j][i]

    def test_report_writes_infinity_as_text(self):
        """Test that infinite entries are reported as "inf"."""
        assert coxeter_matrix(gcm([[2, -2], [-2, 2]])).to_report() == [[1, "inf"], ["inf", 1]]

    @pytest.mark.parametrize("rows", [
        [[2, -2], [-1, 2]],
        [[2, -3], [-1, 2]],
        [[2, -5], [-1, 2]],
        [[2, -1, -1], [-1, 2, -1], [-1, -2, 2]],
        [[2, -1, 0], [-1, 2, -2], [0, -1, 2]],
        [[2, -4, 0], [-1, 2, -3], [0, -1, 2]],
    ])
    def test_transpose_invariant(self, rows):
        """Test that a GCM and its transpose have the same Coxeter matrix."""
        A = gcm(rows)
        assert coxeter_matrix(A.transpose()).m == coxeter_matrix(A).m


class TestComponents:
    """Test diagram component splitting."""

    def test_connected(self):
        """Test that A2 has one component."""
        assert components(coxeter_matrix(gcm([[2, -1], [-1, 2]]))) == [frozenset({0, 1})]

    def test_no_edges(self):
        """Test that A1 x A1 splits into singletons."""
        assert components(coxeter_matrix(gcm([[2, 0], [0, 2]]))) == [frozenset({0}), frozenset({1})]

    def test_block_diagonal(self):
        """Test that A2 + A1~ splits along its blocks."""
        A = block([[2, -1], [-1, 2]], [[2, -2], [-2, 2]])
        assert components(coxeter_matrix(A)) == [frozenset({0, 1}), frozenset({2, 3})]


class TestClassifyType:
    """Test classification against the spherical and affine tables."""

    @pytest.mark.parametrize("rows, label", [
        ([[2, -1], [-1, 2]], "A2"),
        ([[2, -2], [-1, 2]], "B2"),
        ([[2, -3], [-1, 2]], "G2"),
        ([[2, -1, 0], [-1, 2, -2], [0, -1, 2]], "B3"),
        ([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]], "D4"),
        ([[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]], "F4"),
    ])
    def test_spherical(self, rows, label):
        """Test that finite types are recognised with their labels."""
        classification = classify_type(coxeter_matrix(gcm(rows)))
        assert classification.irreducible
        assert classification.components[0].kind == CoxeterKind.SPHERICAL
        assert classification.components[0].label == label

    @pytest.mark.parametrize("rows, label", [
        ([[2, -2], [-2, 2]], "A1~"),
        ([[2, -5], [-1, 2]], "A1~"),
        ([[2, -4], [-1, 2]], "A1~"),
        ([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], "A2~"),
        ([[2, -1, 0], [-1, 2, -3], [0, -1, 2]], "G2~"),
        ([[2, -2, 0], [-1, 2, -1], [0, -2, 2]], "C2~"),
    ])
    def test_affine(self, rows, label):
        """Test that affine types are recognised with their labels."""
        component = classify_type(coxeter_matrix(gcm(rows))).components[0]
        assert component.kind == CoxeterKind.AFFINE
        assert component.label == label

    def test_e6_affine(self):
        """Test that the star with three arms of length 2 is affine E6~."""
        edges = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)]
        rows = [[2 if i == j else 0 for j in range(7)] for i in range(7)]
        for i, j in edges:
            rows[i][j] = rows[j][i] = -1
        component = classify_type(coxeter_matrix(gcm(rows))).components[0]
        assert (component.kind, component.label) == (CoxeterKind.AFFINE, "E6~")

    def test_triangle_334_indefinite(self):
        """Test that the (3,3,4) triangle is indefinite."""
        component = classify_type(coxeter_matrix(gcm([[2, -1, -1], [-1, 2, -1], [-1, -2, 2]]))).components[0]
        assert component.kind == CoxeterKind.INDEFINITE
        assert component.label is None

    def test_right_angled_indefinite(self):
        """Test that the triangle with all bonds infinite is indefinite."""
        rows = [[2, -2, -2], [-2, 2, -2], [-2, -2, 2]]
        assert classify_type(coxeter_matrix(gcm(rows))).components[0].kind == CoxeterKind.INDEFINITE

    def test_reducible_report_uses_one_based_generators(self):
        """Test that components are reported with 1-based generators."""
        A = block([[2, -1], [-1, 2]], [[2, -2], [-2, 2]])
        report = classify_type(coxeter_matrix(A)).to_dict()
        assert report["irreducible"] is False
        assert [c["generators"] for c in report["components"]] == [[1, 2], [3, 4]]
        assert [c["kind"] for c in report["components"]] == ["spherical", "affine"]


class TestMainTheoremApplicable:
    """Test the type hypothesis check."""

    def test_triangle_applicable(self):
        """Test that the (3,3,4) triangle satisfies the hypothesis."""
        assert main_theorem_applicable(gcm([[2, -1, -1], [-1, 2, -1], [-1, -2, 2]])) == (True, "irreducible indefinite")

    def test_affine_not_applicable(self):
        """Test that [[2,-5],[-1,2]] fails with reason affine."""
        assert main_theorem_applicable(gcm([[2, -5], [-1, 2]])) == (False, "affine")

    def test_spherical_not_applicable(self):
        """Test that A2 fails with reason spherical."""
        assert main_theorem_applicable(gcm([[2, -1], [-1, 2]])) == (False, "spherical")

    def test_reducible_not_applicable(self):
        """Test that A2 + A1~ fails with reason reducible."""
        A = block([[2, -1], [-1, 2]], [[2, -2], [-2, 2]])
        assert main_theorem_applicable(A) == (False, "reducible")


class TestSubmatrix:
    """Test component restriction."""

    def test_restriction(self):
        """Test that a submatrix keeps the chosen rows and columns."""
        A = block([[2, -1], [-1, 2]], [[2, -2], [-2, 2]])
        sub = submatrix(A, (2, 3))
        assert sub.entries == ((2, -2), (-2, 2))
        assert sub.q == A.q


@pytest.mark.acceptance
class TestClassificationAcceptance:
    """Test the shipped corpus against its expected types."""

    @pytest.mark.parametrize("name, kinds", [
        ("a2", ["spherical"]),
        ("m_minus1", ["spherical"]),
        ("m_minus2", ["spherical"]),
        ("m_minus3", ["spherical"]),
        ("a1_affine", ["affine"]),
        ("m_minus5", ["affine"]),
        ("m_minus6", ["affine"]),
        ("m_minus10", ["affine"]),
        ("affine_a2t", ["affine"]),
        ("tri334", ["indefinite"]),
        ("right_angled", ["indefinite"]),
        ("block_a2_tri334", ["spherical", "indefinite"]),
    ])
    def test_corpus_classification(self, corpus, name, kinds):
        """Test that every corpus GCM is classified exactly."""
        classification = classify_type(coxeter_matrix(corpus(name)))
        assert [c.kind.value for c in classification.components] == kinds
