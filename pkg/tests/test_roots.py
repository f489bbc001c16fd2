"""
Unit tests for real roots, reflections and wall relations
"""

import pytest

from cartan import GeneralizedCartanMatrix
from roots import (
    InconclusiveError,
    Root,
    RootError,
    WallKind,
    create_root_system,
    parse_root,
    quadrant_text,
)


class TestRootLiteral:
    """Test root construction and parsing."""

    def test_parse(self):
        """Test that "1,1,0" parses to a positive root of height 2."""
        root = parse_root("1,1,0", 3)
        assert root.vector == (1, 1, 0)
        assert root.is_positive
        assert root.height == 2

    def test_negation_and_positive_part(self):
        """Test negation and the positive representative."""
        root = Root((0, -2, -1))
        assert not root.is_positive
        assert root.positive() == Root((0, 2, 1))
        assert -(-root) == root

    def test_text(self):
        """Test that roots print as comma-separated coordinates."""
        assert str(Root((1, 0, 2))) == "1,0,2"

    def test_mixed_signs_rejected(self):
        """Test that a vector with both signs is not a root."""
        with pytest.raises(RootError):
            parse_root("1,-1", 2)

    def test_zero_rejected(self):
        """Test that the zero vector is not a root."""
        with pytest.raises(RootError):
            Root((0, 0))

    def test_wrong_arity(self):
        """Test that the coordinate count must match the rank."""
        with pytest.raises(RootError):
            parse_root("1,0,0", 2)

    def test_non_integer(self):
        """Test that non-integer coordinates are rejected."""
        with pytest.raises(RootError):
            parse_root("1,a", 2)

    def test_quadrant_text(self):
        """Test sign-pair formatting."""
        assert quadrant_text((1, -1)) == "(+,-)"
        assert quadrant_text((-1, -1)) == "(-,-)"


class TestA2Roots:
    """Test the finite root system of A2."""

    def setup_method(self):
        """Setup test fixtures."""
        self.roots = create_root_system(GeneralizedCartanMatrix(((2, -1), (-1, 2))))
        self.a1 = self.roots.simple_root(0)
        self.a2 = self.roots.simple_root(1)

    def test_six_real_roots(self):
        """Test that the orbit of the simple roots has six elements."""
        vectors = {r.vector for r in self.roots.real_roots(orbit_cap=3)}
        assert vectors == {(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)}

    def test_locate_highest_root(self):
        """Test that alpha1 + alpha2 is s1(alpha2)."""
        assert self.roots.locate(Root((1, 1))) == ((0,), 1)

    def test_not_a_root(self):
        """Test that 2 alpha1 + alpha2 is rejected."""
        assert not self.roots.is_real_root((2, 1))
        with pytest.raises(RootError):
            self.roots.root((2, 1))

    def test_reflection_negates_root(self):
        """Test that r_alpha sends alpha to -alpha."""
        highest = Root((1, 1))
        reflection = self.roots.reflection_of(highest)
        assert self.roots.act(reflection, highest) == -highest
        assert self.roots.group.order(reflection) == 2

    def test_pairing(self):
        """Test <alpha1, alpha2^vee> = -1 and <alpha, alpha^vee> = 2."""
        assert self.roots.pairing(self.a1, self.a2) == -1
        assert self.roots.pairing(self.a1, self.a1) == 2

    def test_side(self):
        """Test that the base chamber lies in D(alpha1) and s1 C does not."""
        group = self.roots.group
        assert self.roots.side(self.a1, group.identity()) == 1
        assert self.roots.side(self.a1, group.generator(0)) == -1
        assert self.roots.side(self.a2, group.generator(0)) == 1

    def test_simple_walls_cross(self):
        """Test that the two simple walls of A2 cross."""
        assert self.roots.walls_cross(self.a1, self.a2)
        assert self.roots.wall_relation(self.a1, self.a2).kind == WallKind.CROSSING

    def test_equal_and_opposite(self):
        """Test the equal and opposite relations."""
        assert self.roots.wall_relation(self.a1, self.a1).kind == WallKind.EQUAL
        assert self.roots.wall_relation(self.a1, -self.a1).kind == WallKind.OPPOSITE
        assert not self.roots.disjoint(self.a1, -self.a1)

    def test_walls_cross_needs_distinct_walls(self):
        """Test that walls_cross rejects alpha = -beta."""
        with pytest.raises(RootError):
            self.roots.walls_cross(self.a1, -self.a1)


class TestB2Roots:
    """Test coroots in a non-symmetric type."""

    def test_asymmetric_pairings(self):
        """Test that B2 pairings follow the GCM entries."""
        roots = create_root_system(GeneralizedCartanMatrix(((2, -2), (-1, 2))))
        a1, a2 = roots.simple_root(0), roots.simple_root(1)
        assert roots.pairing(a1, a2) == -1
        assert roots.pairing(a2, a1) == -2

    def test_long_root_pairing(self):
        """Test that every real root pairs to 2 with its own coroot."""
        roots = create_root_system(GeneralizedCartanMatrix(((2, -2), (-1, 2))))
        for root in roots.real_roots(orbit_cap=4):
            assert roots.pairing(root, root) == 2


class TestAffineWalls:
    """Test parallel walls in A1~."""

    def setup_method(self):
        """Setup test fixtures."""
        self.roots = create_root_system(GeneralizedCartanMatrix(((2, -2), (-2, 2))))
        self.a1 = self.roots.simple_root(0)
        self.a2 = self.roots.simple_root(1)

    def test_imaginary_root_rejected(self):
        """Test that delta = alpha1 + alpha2 is not a real root."""
        assert not self.roots.is_real_root((1, 1))

    def test_real_root_located(self):
        """Test that 2 alpha1 + alpha2 is real."""
        assert self.roots.is_real_root((2, 1))

    def test_simple_walls_do_not_cross(self):
        """Test that the two simple walls are parallel."""
        assert not self.roots.walls_cross(self.a1, self.a2)

    def test_nested_with_empty_negative_quadrant(self):
        """Test that alpha1, alpha2 are nested with (-,-) empty."""
        relation = self.roots.wall_relation(self.a1, self.a2)
        assert relation.kind == WallKind.NESTED
        assert relation.empty_quadrant == (-1, -1)
        assert relation.to_dict() == {"kind": "nested", "empty_quadrant": "(-,-)"}

    def test_witness_chambers_have_recorded_signs(self):
        """Test that every witness chamber lies in its recorded quadrant."""
        relation = self.roots.wall_relation(self.a1, self.a2)
        for quadrant, word in relation.witnesses.items():
            chamber = self.roots.group.element(word)
            assert (self.roots.side(self.a1, chamber), self.roots.side(self.a2, chamber)) == quadrant

    def test_negative_half_apartments_disjoint(self):
        """Test that D(-alpha1) and D(-alpha2) share no chamber."""
        assert self.roots.disjoint(-self.a1, -self.a2)

    def test_positive_half_apartments_meet(self):
        """Test that D(alpha1) and D(alpha2) share the base chamber."""
        assert not self.roots.disjoint(self.a1, self.a2)

    def test_zero_radius_inconclusive(self):
        """Test that a search confined to the base chamber is inconclusive."""
        with pytest.raises(InconclusiveError) as info:
            self.roots.wall_relation(self.a1, self.a2, radius_cap=0)
        assert info.value.stage == "wall_relation"
        assert info.value.cap == 0

    def test_real_roots_are_real(self):
        """Test that every enumerated vector is a real root."""
        for root in self.roots.real_roots(orbit_cap=4):
            assert self.roots.is_real_root(root.vector)

    def test_disjoint_symmetric(self):
        """Test that disjointness does not depend on the order of the two roots."""
        roots = self.roots.real_roots(orbit_cap=3)
        for alpha in roots:
            for beta in roots:
                assert self.roots.disjoint(alpha, beta) == self.roots.disjoint(beta, alpha)


class TestTriangleRoots:
    """Test the root system of the (3,3,4) triangle group."""

    def test_reflections_negate_enumerated_roots(self, root_system):
        """Test that each enumerated root is sent to its negative by its reflection."""
        roots = root_system("tri334")
        for root in roots.real_roots(orbit_cap=3):
            assert roots.act(roots.reflection_of(root), root) == -root

    def test_side_equivariant(self, root_system):
        """Test that side(w alpha, w x) equals side(alpha, x)."""
        roots = root_system("tri334")
        group = roots.group
        ball = roots.cayley_ball(2)
        for alpha in roots.real_roots(orbit_cap=1):
            for w in ball:
                for x in ball:
                    assert roots.side(roots.act(w, alpha), group.multiply(w, x)) == roots.side(alpha, x)

    def test_enumeration_order_is_stable(self, root_system):
        """Test that the first roots are the simple ones."""
        roots = root_system("tri334")
        first = roots.real_roots(orbit_cap=0)
        assert [r.vector for r in first] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_cayley_ball_shared(self, root_system):
        """Test that the cached ball starts at the identity."""
        ball = root_system("tri334").cayley_ball(2)
        assert ball[0].is_identity
        assert len(ball) == 1 + 3 + 6


@pytest.mark.acceptance
class TestWallTrichotomyAcceptance:
    """Test that the crossing test agrees with the order of r_alpha r_beta on every pair."""

    @pytest.mark.parametrize("name, orbit_cap", [("a1_affine", 6), ("tri334", 3)])
    def test_every_pair(self, root_system, name, orbit_cap):
        """Test that walls cross exactly when r_alpha r_beta has finite order, for all enumerated pairs."""
        roots = root_system(name)
        group = roots.group
        real = roots.real_roots(orbit_cap=orbit_cap)
        pairs = crossings = 0
        for alpha in real:
            for beta in real:
                if alpha == beta or alpha == -beta:
                    continue
                product = group.multiply(roots.reflection_of(alpha), roots.reflection_of(beta))
                p = roots.pairing(alpha, beta) * roots.pairing(beta, alpha)
                crossing = roots.walls_cross(alpha, beta)
                assert crossing == (group.order(product) is not None)
                assert crossing == (0 <= p <= 3)
                pairs += 1
                crossings += crossing
        assert pairs > 0
        assert (crossings == 0) == (name == "a1_affine")
