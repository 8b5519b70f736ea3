"""Singularity classifiers: worked examples, witnesses, and the
implication/oracle properties that guard them."""

import itertools
from fractions import Fraction

import pytest

from tests.conftest import (
    f1_fan,
    octant_fan,
    quadrant_fan,
    random_complete_fan,
    random_simplicial_cone,
    random_subspace,
)
from torifol.classify import (
    has_simple_singularities,
    is_canonical,
    is_f_dlt,
    is_log_canonical,
    is_non_dicritical,
    is_non_resonant,
    is_tangent,
    is_terminal_at,
    singular_locus,
)
from torifol.divisor import discrepancy_at
from torifol.errors import (
    NonSimplicialFan,
    NonSmoothFan,
    NonZeroDelta,
    TorifolError,
)
from torifol.fan import Fan
from torifol.foliation import GaussianSubspace, ToricFoliatedPair
from torifol.gaussian import GaussRat, I, gauss_vec, kernel_basis, primitive_vector

F = Fraction


def _span(rank, *vecs):
    return GaussianSubspace(rank, [gauss_vec(v) for v in vecs])


def _kernel_w():
    # rational trace is the line through (1,1,0)
    return GaussianSubspace(3, kernel_basis([gauss_vec([1, -1, I])]))


class TestNonDicritical:
    @pytest.mark.parametrize(
        "lam,expected",
        [
            (GaussRat(1), False),
            (GaussRat(2), False),
            (GaussRat(F(1, 2)), False),
            (GaussRat(-1), True),
            (I, True),
            (GaussRat(1, 1), True),
        ],
    )
    def test_quadrant_line(self, lam, expected):
        W = GaussianSubspace(2, [(lam, GaussRat(1))])
        assert bool(is_non_dicritical(quadrant_fan(), W)) is expected

    def test_witness_positive_slope(self):
        v = is_non_dicritical(quadrant_fan(), _span(2, (1, 1)))
        assert not v
        assert v.certificate == {"cone": (0, 1), "point": (1, 1)}

    def test_octant_kernel_witness(self):
        v = is_non_dicritical(octant_fan(), _kernel_w())
        assert not v
        assert v.certificate["point"] == (1, 1, 0)
        assert v.certificate["cone"] == (0, 1)

    def test_witness_replayable(self, rng):
        for _ in range(25):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            v = is_non_dicritical(fan, W)
            if not v:
                cone = v.certificate["cone"]
                point = v.certificate["point"]
                assert W.trace.contains(point)
                assert fan.relint_contains(cone, point)
                assert not all(W.contains(g) for g in fan.generators(cone))

    def test_refinement_preserves(self, rng):
        # refining the fan cannot create dicriticality
        for _ in range(15):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            if not is_non_dicritical(fan, W):
                continue
            cone = rng.choice(fan.max_cones)
            u = primitive_vector(
                tuple(sum(fan.rays[i][k] for i in cone) for k in range(rank))
            )
            sub = fan.star_subdivide(u)
            assert is_non_dicritical(sub, W)

    def test_same_trace_same_verdict(self, rng):
        # enlarging W without new rational points keeps every verdict
        for _ in range(20):
            fan = random_complete_fan(rng, 3)
            W = random_subspace(rng, 3, rays=fan.rays)
            if W.dim >= 3:
                continue
            extra = (I, GaussRat(1, 1), GaussRat(2, -1))
            W2 = GaussianSubspace(3, list(W.basis) + [extra])
            if W2.trace != W.trace or W2.dim == W.dim:
                continue
            assert bool(is_non_dicritical(fan, W)) == bool(is_non_dicritical(fan, W2))


class TestSingularLocus:
    def test_transverse_axis(self):
        locus = singular_locus(octant_fan(), _span(3, (0, 0, 1)))
        assert (0, 1) not in locus

    def test_complex_tilt(self):
        locus = singular_locus(octant_fan(), _span(3, (1, I, 0)))
        assert (0, 1) in locus

    def test_full_space_smooth(self):
        assert singular_locus(octant_fan(), GaussianSubspace.full(3)) == ()

    def test_needs_simplicial(self):
        from tests.conftest import square_cone_fan

        with pytest.raises(NonSimplicialFan):
            singular_locus(square_cone_fan(), _span(3, (0, 0, 1)))


class TestLogCanonical:
    def test_zero_boundary(self):
        pair = ToricFoliatedPair(f1_fan(), _span(2, (0, 1)))
        assert is_log_canonical(pair)

    def test_large_coefficient_on_w_ray(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 0)), {0: F(3, 2)})
        v = is_log_canonical(pair)
        assert not v and v.certificate["ray"] == 0

    def test_positive_coefficient_off_w(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 0)), {1: F(1, 2)})
        v = is_log_canonical(pair)
        assert not v and v.certificate["ray"] == 1


class TestCanonical:
    def test_axis_line(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 0)))
        assert is_canonical(pair)

    def test_diagonal_line(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 1)))
        v = is_canonical(pair)
        assert not v
        assert v.certificate["point"] == (1, 1) and v.certificate["phi"] == 0

    def test_trivial_trace(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, [(I, GaussRat(1))]))
        assert is_canonical(pair)

    def test_rejects_boundary(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 0)), {1: F(-1)})
        with pytest.raises(NonZeroDelta):
            is_canonical(pair)

    def test_witness_replayable(self, rng):
        for _ in range(30):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            v = is_canonical(pair)
            if not v:
                u = primitive_vector(v.certificate["point"])
                a, iota = discrepancy_at(pair, u)
                assert iota == 1 and a < 0


class TestTerminal:
    def test_axis_line_terminal(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 0)))
        assert is_terminal_at(pair, (0, 1))

    def test_zero_subspace(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, []))
        v = is_terminal_at(pair, (0, 1))
        assert not v and "reason" in v.certificate

    def test_diagonal_interior_witness(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 1)))
        v = is_terminal_at(pair, (0, 1))
        assert not v and v.certificate["point"] == (1, 1)

    def test_boundary_trace_direction(self):
        # W = span{e3, e1+e2}: recession of the slab is nonzero but the
        # interior still holds the lattice point (1,1,1)
        pair = ToricFoliatedPair(octant_fan(), _span(3, (0, 0, 1), (1, 1, 0)))
        v = is_terminal_at(pair, (0, 1, 2))
        assert not v
        u = v.certificate["point"]
        assert all(x > 0 for x in u) and pair.support.value(u) <= 1

    def test_unknown_cone(self):
        pair = ToricFoliatedPair(quadrant_fan(), GaussianSubspace(2, []))
        with pytest.raises(TorifolError):
            is_terminal_at(pair, (0, 5))

    def test_terminal_implies_canonical_witnessless(self, rng):
        # a terminal verdict at every cone of a canonical pair stays
        # consistent: canonical false gives some non-terminal cone
        for _ in range(20):
            gens = random_simplicial_cone(rng, rng.choice([2, 3]))
            rank = len(gens[0])
            fan = Fan(rank, gens, [tuple(range(len(gens)))])
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            if not is_canonical(pair):
                assert any(
                    not is_terminal_at(pair, c)
                    for c in fan.cones
                )


class TestFdlt:
    def test_f1_vertical_true(self):
        pair = ToricFoliatedPair(f1_fan(), _span(2, (0, 1)))
        assert is_f_dlt(pair)

    def test_dicritical_zero_cone(self):
        pair = ToricFoliatedPair(quadrant_fan(), _span(2, (1, 1)))
        v = is_f_dlt(pair)
        assert not v and v.certificate["cone"] == (0, 1)

    def test_boundary_on_invariant_ray(self):
        pair = ToricFoliatedPair(f1_fan(), _span(2, (0, 1)), {0: F(1, 2)})
        v = is_f_dlt(pair)
        assert not v and v.certificate["ray"] == 0

    def test_negative_delta_rejected(self):
        from torifol.errors import NegativeDelta

        pair = ToricFoliatedPair(f1_fan(), _span(2, (0, 1)), {1: F(-1)})
        with pytest.raises(NegativeDelta):
            is_f_dlt(pair)


class TestTangent:
    def test_axis_plus_line(self):
        assert is_tangent(quadrant_fan(), _span(2, (0, 1)), (0,))

    def test_contained_span(self):
        assert not is_tangent(octant_fan(), _span(3, (I, 1, 0)), (0, 1))

    def test_full_space_zero_cone(self):
        assert is_tangent(quadrant_fan(), GaussianSubspace.full(2), ())


class TestSimple:
    def test_negative_slope(self):
        assert has_simple_singularities(quadrant_fan(), _span(2, (-1, 1)))

    def test_interior_slope(self):
        assert not has_simple_singularities(quadrant_fan(), _span(2, (1, 2)))

    def test_full(self):
        assert has_simple_singularities(quadrant_fan(), GaussianSubspace.full(2))

    def test_needs_smooth(self):
        fan = Fan(2, [(1, 0), (1, 2)], [(0, 1)])
        with pytest.raises(NonSmoothFan):
            has_simple_singularities(fan, GaussianSubspace(2, []))

    def test_matches_non_dicritical_on_smooth(self, rng):
        for _ in range(20):
            fan = random_complete_fan(rng, 2)
            if not fan.is_smooth:
                continue
            W = random_subspace(rng, 2, rays=fan.rays)
            assert bool(has_simple_singularities(fan, W)) == bool(
                is_non_dicritical(fan, W)
            )


class TestNonResonant:
    def test_positive_pair(self):
        assert is_non_resonant([GaussRat(1), GaussRat(2)])

    def test_cancelling_pair(self):
        assert not is_non_resonant([GaussRat(1), GaussRat(-1)])

    def test_weighted_cancellation(self):
        # 3*2 + 2*(-3) = 0
        assert not is_non_resonant([GaussRat(2), GaussRat(-3)])

    def test_imaginary_mix(self):
        assert is_non_resonant([I, GaussRat(1)])
        assert not is_non_resonant([I, -I])

    def test_zero_rejected(self):
        with pytest.raises(TorifolError):
            is_non_resonant([GaussRat(0), GaussRat(1)])


def canonicity_slab_box(pair, extra_point=None):
    """Per-instance integer search box around {u in V meet cone : phi <= 1}.

    Unbounded directions are clamped to a small window; a claimed witness is
    always folded into the box so the scan can re-derive it independently.
    """
    import math

    from torifol.polyhedra import EQ, GE, coordinate_interval

    fan = pair.fan
    cone = fan.max_cones[0]
    m = pair.support.functionals[cone]
    cons = list(fan.hrep(cone).constraints())
    cons.append((tuple(-x for x in m), F(-1), GE))
    for a in pair.W.trace.annihilator_rows():
        cons.append((a, F(0), EQ))
    box = []
    for j in range(fan.rank):
        iv = coordinate_interval(cons, fan.rank, j)
        lo, hi = iv if iv is not None else (0, 0)
        lo = -6 if lo is None else math.floor(lo) - 1
        hi = 6 if hi is None else math.ceil(hi) + 1
        if extra_point is not None:
            lo = min(lo, extra_point[j])
            hi = max(hi, extra_point[j])
        box.append(range(lo, hi + 1))
    return box


def brute_force_canonical_witness(pair, box):
    """Scan primitive lattice points of a box for negative discrepancies,
    using barycentric cone membership (independent of the H-rep path)."""
    fan = pair.fan
    cone = fan.max_cones[0]
    gens = fan.generators(cone)
    rank = fan.rank
    from torifol.gaussian import solve_linear, vec_gcd

    rows = [tuple(F(g[i]) for g in gens) for i in range(rank)]
    for point in itertools.product(*box):
        if not any(point) or vec_gcd(point) != 1:
            continue
        lam = solve_linear(rows, tuple(F(x) for x in point))
        if lam is None or any(l < 0 for l in lam):
            continue
        if any(
            sum(li * F(g[k]) for li, g in zip(lam, gens)) != point[k]
            for k in range(rank)
        ):
            continue
        if not pair.W.contains(point):
            continue
        a, _ = discrepancy_at(pair, point)
        if a < 0:
            return point
    return None


class TestCanonicityOracle:
    def test_oracle_equivalence(self, rng):
        hits = 0
        for _ in range(60):
            gens = random_simplicial_cone(rng, rng.choice([2, 3]), max_coord=4)
            rank = len(gens[0])
            fan = Fan(rank, gens, [tuple(range(len(gens)))])
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            verdict = is_canonical(pair)
            if not verdict:
                hits += 1
                u = primitive_vector(verdict.certificate["point"])
                a, _ = discrepancy_at(pair, u)
                assert a < 0
                brute = brute_force_canonical_witness(
                    pair, canonicity_slab_box(pair, extra_point=u)
                )
                assert brute is not None
            else:
                brute = brute_force_canonical_witness(pair, canonicity_slab_box(pair))
                assert brute is None
        assert hits > 0


class TestImplications:
    def test_canonical_implies_non_dicritical(self, rng):
        for _ in range(40):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            if is_canonical(pair):
                assert is_non_dicritical(fan, W)

    def test_fdlt_implies_non_dicritical(self, rng):
        for _ in range(40):
            rank = rng.choice([2, 3])
            fan = random_complete_fan(rng, rank)
            W = random_subspace(rng, rank, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            if is_f_dlt(pair):
                assert is_non_dicritical(fan, W)

    def test_simple_implies_canonical_on_smooth(self, rng):
        for _ in range(40):
            fan = random_complete_fan(rng, 2)
            if not fan.is_smooth:
                continue
            W = random_subspace(rng, 2, rays=fan.rays)
            pair = ToricFoliatedPair(fan, W)
            if has_simple_singularities(fan, W):
                assert is_canonical(pair)
