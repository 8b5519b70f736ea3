"""Gaussian subspaces as foliations: invariance, canonical divisor,
quotients, integrability."""

from fractions import Fraction

import pytest

from tests.conftest import f1_fan, quadrant_fan, random_complete_fan, random_subspace
from torifol.errors import NotQCartier, TorifolError
from torifol.foliation import (
    GaussianSubspace,
    ToricFoliatedPair,
    canonical_divisor,
    is_algebraically_integrable,
    quotient_foliation,
    ray_iota,
)
from torifol.gaussian import GaussRat, I, RatSubspace, gauss_vec, kernel_basis

F = Fraction


class TestRayIota:
    def test_ray_inside(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, [gauss_vec([1, 0])]))
        assert ray_iota(pair, 0) == 1

    def test_irrational_line_excludes(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, [(I, GaussRat(1))]))
        assert ray_iota(pair, 0) == 0

    def test_full_space(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace.full(2))
        assert ray_iota(pair, 0) == 1 and ray_iota(pair, 1) == 1

    def test_unknown_ray(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, []))
        with pytest.raises(TorifolError):
            ray_iota(pair, 7)


class TestCanonicalDivisor:
    def test_zero_subspace(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, []))
        assert all(v == 0 for v in canonical_divisor(pair).values())

    def test_full_subspace(self):
        pair = ToricFoliatedPair(f1_fan(), GaussianSubspace.full(2))
        assert all(v == -1 for v in canonical_divisor(pair).values())

    def test_f1_vertical(self):
        pair = ToricFoliatedPair(f1_fan(), GaussianSubspace(2, [gauss_vec([0, 1])]))
        k = canonical_divisor(pair)
        # both (0,1) and (0,-1) lie on the complex line through (0,1)
        assert k == {0: F(0), 1: F(-1), 2: F(0), 3: F(-1)}

    def test_support_law_randomized(self, rng):
        for _ in range(50):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            k = canonical_divisor(pair)
            for i, r in enumerate(fan.rays):
                if W.contains(r):
                    assert k[i] == -1
                else:
                    assert k[i] == 0


class TestQuotient:
    def test_rank_two_collapse(self):
        W = GaussianSubspace(2, [gauss_vec([0, 1])])
        proj, q = quotient_foliation(W, RatSubspace(2, [(0, 1)]))
        assert proj == ((1, 0),)
        assert q.rank == 1 and q.dim == 0

    def test_full_space_quotient(self):
        W = GaussianSubspace.full(2)
        proj, q = quotient_foliation(W, RatSubspace(2, [(1, 0)]))
        assert q.rank == 1 and q.dim == 1

    def test_rank_three_mixed(self):
        W = GaussianSubspace(3, [gauss_vec([0, 1, 0]), (GaussRat(0), GaussRat(0), I)])
        proj, q = quotient_foliation(W, RatSubspace(3, [(0, 1, 0)]))
        assert proj == ((1, 0, 0), (0, 0, 1))
        # image of (0,0,i) is the line through (0,1) over Q(i)
        assert q.basis == ((GaussRat(0), GaussRat(1)),)

    def test_u_not_inside_w(self):
        W = GaussianSubspace(2, [gauss_vec([1, 0])])
        with pytest.raises(TorifolError):
            quotient_foliation(W, RatSubspace(2, [(0, 1)]))

    def test_ray_images_stay_primitive(self, rng):
        for _ in range(20):
            fan = random_complete_fan(rng, 3)
            U = RatSubspace(3, [fan.rays[0]])
            W = GaussianSubspace.full(3)
            proj, _ = quotient_foliation(W, U)
            from torifol.gaussian import apply_rows, primitive_vector

            for r in fan.rays[1:]:
                img = apply_rows(proj, r)
                if any(img):
                    primitive_vector(img)  # well-defined, nonzero


class TestIntegrable:
    def test_lattice_line(self):
        assert is_algebraically_integrable(GaussianSubspace(2, [gauss_vec([0, 1])]))

    def test_irrational_line(self):
        assert not is_algebraically_integrable(GaussianSubspace(2, [(I, GaussRat(1))]))

    def test_kernel_example(self):
        W = GaussianSubspace(3, kernel_basis([gauss_vec([1, -1, I])]))
        assert W.dim == 2 and W.trace.dim == 1
        assert not is_algebraically_integrable(W)


class TestIntersection:
    def test_membership_law(self, rng):
        # v in W1 cap W2 iff v in W1 and v in W2, checked on every fan ray
        for _ in range(30):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W1 = random_subspace(rng, rank, rays=fan.rays)
            W2 = random_subspace(rng, rank, rays=fan.rays)
            meet = W1.intersection(W2)
            for r in fan.rays:
                assert meet.contains(r) == (W1.contains(r) and W2.contains(r))


class TestPairConstruction:
    def test_rank_mismatch(self):
        with pytest.raises(TorifolError):
            ToricFoliatedPair(quadrant_fan(), GaussianSubspace(3, []))

    def test_non_cartier_rejected_at_construction(self):
        from tests.conftest import square_cone_fan

        fan = square_cone_fan()
        W = GaussianSubspace(3, [gauss_vec([1, 0, 1])])  # one square ray in W
        with pytest.raises(NotQCartier):
            ToricFoliatedPair(fan, W)

    def test_zero_delta_dropped(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, []), {0: F(0)})
        assert pair.delta == {}
