"""Rational polyhedral fans: validation, face/wall structure, star
subdivision, and exact point location.

Cones are stored as sorted tuples of indices into the fan's ray list; the
zero cone is the empty tuple.  All geometry is exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import (
    DanglingWall,
    NotStronglyConvex,
    OverlapError,
    RedundantGenerator,
    TorifolError,
)
from .gaussian import matrix_rank, vec_gcd
from .polyhedra import (
    EQ,
    GE,
    ConeHrep,
    cone_hrep,
    feasible,
    lattice_index,
)


class Fan:
    """A validated fan: rays, maximal cones, and the full face closure."""

    __slots__ = (
        "rank",
        "rays",
        "max_cones",
        "cones",
        "cone_dims",
        "is_simplicial",
        "is_smooth",
        "is_complete",
        "_wall_incidence",
        "_face_lists",
    )

    def __init__(self, rank, rays, max_cones):
        built = _build(rank, rays, max_cones)
        (
            self.rank,
            self.rays,
            self.max_cones,
            self.cones,
            self.cone_dims,
            self.is_simplicial,
            self.is_smooth,
            self.is_complete,
            self._wall_incidence,
            self._face_lists,
        ) = built

    # -- geometry ----------------------------------------------------------
    def generators(self, cone):
        return tuple(self.rays[i] for i in cone)

    def hrep(self, cone) -> ConeHrep:
        return cone_hrep(self.generators(cone), self.rank)

    def cone_contains(self, cone, vec):
        return self.hrep(cone).contains(vec)

    def relint_contains(self, cone, vec):
        if not cone:
            return not any(Fraction(x) for x in vec)
        return self.hrep(cone).relint_contains(vec)

    def dim(self, cone):
        return self.cone_dims[cone]

    def multiplicity(self, cone):
        """Lattice index of a simplicial cone (1 = smooth)."""
        return lattice_index(self.generators(cone))

    def ray_index(self, vec):
        v = tuple(int(x) for x in vec)
        try:
            return self.rays.index(v)
        except ValueError:
            return None

    # -- queries -----------------------------------------------------------
    def cones_of_dim(self, d):
        return tuple(c for c in self.cones if self.cone_dims[c] == d)

    def locate_cone(self, vec):
        """The unique cone whose relative interior holds vec, or None."""
        v = tuple(Fraction(x) for x in vec)
        if not any(v):
            return ()
        for cone in self.cones:
            if cone and self.relint_contains(cone, v):
                return cone
        return None

    def contains_point(self, vec):
        return self.locate_cone(vec) is not None

    def max_cone_containing(self, vec):
        for cone in self.max_cones:
            if self.cone_contains(cone, vec):
                return cone
        return None

    def containing_max(self, cone):
        """Some maximal cone having the given cone as a face."""
        for mc in self.max_cones:
            if cone in self._face_lists[mc]:
                return mc
        return None

    def walls(self):
        """Codimension-one cones with their incident maximal cones."""
        return tuple(
            (wall, tuple(sorted(incident)))
            for wall, incident in sorted(self._wall_incidence.items())
        )

    # -- surgery -----------------------------------------------------------
    def star_subdivide(self, u):
        """Star subdivision at a primitive lattice vector in the support."""
        u = tuple(int(x) for x in u)
        if not any(u):
            raise TorifolError("cannot subdivide at the zero vector")
        if vec_gcd(u) != 1:
            raise TorifolError(f"subdivision vector {u} is not primitive")
        if self.max_cone_containing(u) is None:
            raise TorifolError(f"{u} lies outside the support of the fan")
        existing = self.ray_index(u)
        rays = self.rays if existing is not None else self.rays + (u,)
        u_idx = existing if existing is not None else len(self.rays)
        new_max = []
        for cone in self.max_cones:
            if not self.cone_contains(cone, u):
                new_max.append(cone)
                continue
            d = self.cone_dims[cone]
            for face in self._face_lists[cone]:
                if self.cone_dims[face] != d - 1 or self.cone_contains(face, u):
                    continue
                new_max.append(tuple(sorted(set(face) | {u_idx})))
        new_max = sorted(set(new_max))
        return Fan(self.rank, rays, new_max)

    # -- comparison --------------------------------------------------------
    def same_fan(self, other) -> bool:
        """Equality up to ray numbering."""
        if self.rank != other.rank or set(self.rays) != set(other.rays):
            return False
        mine = {frozenset(self.rays[i] for i in c) for c in self.max_cones}
        theirs = {frozenset(other.rays[i] for i in c) for c in other.max_cones}
        return mine == theirs

    def __repr__(self):
        return (
            f"Fan(rank={self.rank}, rays={len(self.rays)}, "
            f"max_cones={len(self.max_cones)})"
        )


def _build(rank, rays, max_cones):
    rays = tuple(tuple(int(x) for x in r) for r in rays)
    for r in rays:
        if len(r) != rank:
            raise TorifolError(f"ray {r} has wrong length")
        if not any(r):
            raise TorifolError("zero vector cannot be a ray")
        if vec_gcd(r) != 1:
            raise TorifolError(f"ray {r} is not primitive")
    if len(set(rays)) != len(rays):
        raise TorifolError("duplicate rays")
    max_cones = tuple(sorted({tuple(sorted(set(c))) for c in max_cones}))
    if not max_cones:
        max_cones = ((),)
    used = set()
    for cone in max_cones:
        for i in cone:
            if not (0 <= i < len(rays)):
                raise TorifolError(f"cone {cone} references unknown ray {i}")
            used.add(i)
    if used != set(range(len(rays))):
        unused = sorted(set(range(len(rays))) - used)
        raise TorifolError(f"rays {unused} appear in no cone")

    gens_of = {c: tuple(rays[i] for i in c) for c in max_cones}
    for cone in max_cones:
        gens = gens_of[cone]
        if cone and not _strongly_convex(gens, rank):
            raise NotStronglyConvex(f"cone {cone} contains a line")
        for j, g in enumerate(gens):
            others = gens[:j] + gens[j + 1:]
            if others and cone_hrep(others, rank).contains(g):
                raise RedundantGenerator(f"generator {g} is redundant in cone {cone}")

    # face closure
    face_lists = {}
    all_cones = set()
    dims = {(): 0}
    for cone in max_cones:
        faces = _enumerate_faces(rank, rays, cone)
        face_lists[cone] = faces
        for f in faces:
            all_cones.add(f)
            if f not in dims:
                dims[f] = matrix_rank([tuple(Fraction(x) for x in rays[i]) for i in f]) if f else 0
    all_cones.add(())

    # maximality: no listed maximal cone may be a face of another
    for a, b in itertools.combinations(max_cones, 2):
        if a in face_lists[b] or b in face_lists[a]:
            raise OverlapError(f"maximal cone {a} is a face of {b}")

    # pairwise intersections must be common faces
    for a, b in itertools.combinations(max_cones, 2):
        shared = tuple(sorted(set(a) & set(b)))
        if shared not in face_lists[a] or shared not in face_lists[b]:
            raise OverlapError(f"cones {a} and {b} do not meet along a common face")
        _check_intersection_inside(rank, rays, a, b, shared)

    cones = tuple(sorted(all_cones, key=lambda c: (dims[c], c)))
    simplicial = all(len(c) == dims[c] for c in max_cones)
    smooth = simplicial and all(
        lattice_index(gens_of[c]) == 1 for c in max_cones if c
    )

    wall_incidence = {}
    for mi, cone in enumerate(max_cones):
        for f in face_lists[cone]:
            if dims[f] == rank - 1:
                wall_incidence.setdefault(f, []).append(mi)
    pure = all(dims[c] == rank for c in max_cones)
    complete = (
        pure
        and len(max_cones) > 0
        and max_cones != ((),)
        and all(len(v) == 2 for v in wall_incidence.values())
    )
    return (
        rank,
        rays,
        max_cones,
        cones,
        dims,
        simplicial,
        smooth,
        complete,
        {w: tuple(v) for w, v in wall_incidence.items()},
        face_lists,
    )


def _strongly_convex(gens, rank):
    from .polyhedra import is_strongly_convex

    return is_strongly_convex(gens, rank)


def _enumerate_faces(rank, rays, cone):
    """All faces of a maximal cone, as sorted ray-index tuples (incl. itself)."""
    if not cone:
        return {()}
    gens = [rays[i] for i in cone]
    if matrix_rank([tuple(Fraction(x) for x in g) for g in gens]) == len(gens):
        # simplicial: every generator subset spans a face
        return {tuple(sorted(s)) for k in range(len(cone) + 1)
                for s in itertools.combinations(cone, k)}
    faces = set()
    for k in range(len(cone) + 1):
        for subset in itertools.combinations(cone, k):
            inside = set(subset)
            outside = [rays[i] for i in cone if i not in inside]
            cons = [(tuple(Fraction(x) for x in rays[i]), Fraction(0), EQ) for i in subset]
            cons += [(tuple(Fraction(x) for x in g), Fraction(1), GE) for g in outside]
            if feasible(cons, rank) is not None:
                faces.add(tuple(sorted(subset)))
    return faces


def _check_intersection_inside(rank, rays, a, b, shared):
    """Verify that Cone(a) meets Cone(b) inside Cone(shared rays) only."""
    ha = cone_hrep([rays[i] for i in a], rank)
    hb = cone_hrep([rays[i] for i in b], rank)
    base = ha.constraints() + hb.constraints()
    hs = cone_hrep([rays[i] for i in shared], rank)
    tests = []
    for e in hs.eqs:
        tests.append((e, Fraction(1), GE))
        tests.append((tuple(-x for x in e), Fraction(1), GE))
    for q in hs.ineqs:
        tests.append((tuple(-x for x in q), Fraction(1), GE))
    for t in tests:
        if feasible(base + [t], rank) is not None:
            raise OverlapError(
                f"cones {a} and {b} overlap outside their common face {shared}"
            )


def validate_fan(rank, rays, max_cones):
    """Build a canonical Fan and report its predicates.

    Returns (fan, report) with report keys simplicial / smooth / complete.
    """
    fan = Fan(rank, rays, max_cones)
    report = {
        "simplicial": fan.is_simplicial,
        "smooth": fan.is_smooth,
        "complete": fan.is_complete,
    }
    return fan, report


def faces_and_walls(fan: Fan, require_paired: bool = True):
    """The face list plus every wall with its incident maximal cones."""
    walls = []
    for wall, incident in fan.walls():
        if require_paired and len(incident) != 2:
            raise DanglingWall(
                f"wall {wall} is incident to {len(incident)} maximal cones"
            )
        walls.append((wall, incident))
    return fan.cones, tuple(walls)


def star_subdivide(fan: Fan, u):
    return fan.star_subdivide(u)


def locate_cone(fan: Fan, vec):
    return fan.locate_cone(vec)
