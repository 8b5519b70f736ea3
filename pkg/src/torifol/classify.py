"""Exact singularity classifiers for toric foliated pairs.

Every predicate returns a :class:`Verdict`; a false verdict always carries a
witness that can be replayed through ``discrepancy_at`` or ``strict_meet``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    NonSimplicialFan,
    NonSmoothFan,
    NonZeroDelta,
    TorifolError,
    UnboundedError,
)
from .fan import Fan
from .foliation import GaussianSubspace, ToricFoliatedPair
from .gaussian import GaussRat, gauss_vec, matrix_rank, primitive_vector
from .polyhedra import (
    EQ,
    GE,
    GT,
    feasible,
    lattice_feasible,
    lattice_points,
    strict_meet_witness,
)


@dataclass(frozen=True)
class Verdict:
    value: bool
    certificate: Optional[dict] = None

    def __bool__(self):
        return self.value


def is_non_dicritical(fan: Fan, W: GaussianSubspace) -> Verdict:
    """Every cone whose relative interior meets W over the lattice must lie
    in W; the witness of a failure is the cone and a lattice point."""
    V = W.trace
    if V.dim == 0:
        return Verdict(True)
    for cone in fan.cones:
        if not cone:
            continue
        gens = fan.generators(cone)
        if all(W.contains(g) for g in gens):
            continue
        w = strict_meet_witness(gens, V)
        if w is not None:
            return Verdict(False, {"cone": cone, "point": w})
    return Verdict(True)


def singular_locus(fan: Fan, W: GaussianSubspace):
    """Cones whose orbit closure lies in the singular locus of the foliation.

    Requires a simplicial fan.  A cone is excluded exactly when W meets its
    complex span in the span of a subset of its own ray generators.
    """
    if not fan.is_simplicial:
        raise NonSimplicialFan("singular locus criterion needs a simplicial fan")
    singular = []
    for cone in fan.cones:
        if not cone:
            continue
        gens = fan.generators(cone)
        span = GaussianSubspace(fan.rank, [gauss_vec(g) for g in gens])
        meet = W.intersection(span)
        inside = [g for g in gens if meet.contains(g)]
        if len(inside) != meet.dim:
            singular.append(cone)
    return tuple(singular)


def is_log_canonical(pair: ToricFoliatedPair) -> Verdict:
    """Boundary coefficients at most 1 on rays inside W and at most 0 outside."""
    for i in range(len(pair.fan.rays)):
        d = pair.delta.get(i, Fraction(0))
        bound = Fraction(pair.iota[i])
        if d > bound:
            return Verdict(
                False,
                {"ray": i, "coefficient": d, "iota": pair.iota[i]},
            )
    return Verdict(True)


def _phi_functional(pair: ToricFoliatedPair, cone):
    """The linear functional representing phi_{K+Delta} on a cone."""
    mc = pair.fan.containing_max(cone)
    if mc is None:
        raise TorifolError(f"{cone} is not a cone of the fan")
    return pair.support.functionals[mc]


def _vanishing_direction(pair, cone, subspace):
    """A nonzero rational point of subspace inside the cone with phi = 0."""
    fan = pair.fan
    hrep = fan.hrep(cone)
    m = _phi_functional(pair, cone)
    pos = tuple(
        sum(Fraction(a[i]) for a in hrep.ineqs) for i in range(fan.rank)
    )
    cons = list(hrep.constraints())
    cons.append((m, Fraction(0), EQ))
    cons.append((pos, Fraction(1), EQ))
    for a in subspace.annihilator_rows():
        cons.append((a, Fraction(0), EQ))
    return feasible(cons, fan.rank)


def is_canonical(pair: ToricFoliatedPair) -> Verdict:
    """No nonzero lattice point of W inside a cone with phi_K below 1.

    Defined for an empty boundary only.  Per maximal cone: first reject a
    nonzero vanishing subcone of phi, then enumerate the lattice points of
    the bounded slab {u in V and the cone : phi(u) <= 1}.
    """
    if pair.delta:
        raise NonZeroDelta("canonicity is only computed for an empty boundary")
    V = pair.W.trace
    if V.dim == 0:
        return Verdict(True)
    fan = pair.fan
    for cone in fan.max_cones:
        if not cone:
            continue
        hit = _vanishing_direction(pair, cone, V)
        if hit is not None:
            u = primitive_vector(hit)
            return Verdict(False, {"cone": cone, "point": u, "phi": Fraction(0)})
        m = pair.support.functionals[cone]
        cons = list(fan.hrep(cone).constraints())
        cons.append((tuple(-x for x in m), Fraction(-1), GE))
        for a in V.annihilator_rows():
            cons.append((a, Fraction(0), EQ))
        try:
            points = lattice_points(cons, fan.rank)
        except UnboundedError as exc:  # pragma: no cover - excluded by branch (a)
            raise TorifolError("canonicity slab unexpectedly unbounded") from exc
        for u in points:
            if not any(u):
                continue
            phi = sum(Fraction(a) * x for a, x in zip(m, u))
            if phi < 1:
                return Verdict(False, {"cone": cone, "point": u, "phi": phi})
    return Verdict(True)


def is_terminal_at(pair: ToricFoliatedPair, cone) -> Verdict:
    """Terminality at the generic point of a cone's orbit closure.

    Needs an empty boundary.  True when some ray of the cone lies in W and
    no lattice point of W sits in the cone's relative interior with
    phi_K at most 1.
    """
    if pair.delta:
        raise NonZeroDelta("terminality is only computed for an empty boundary")
    fan = pair.fan
    if cone not in fan.cone_dims:
        raise TorifolError(f"unknown cone {cone}")
    if not cone:
        return Verdict(False, {"reason": "the zero cone admits no ray inside W"})
    if not any(pair.iota[i] for i in cone):
        # phi vanishes on the whole cone, so any interior lattice point is a
        # center of nonpositive discrepancy
        total = tuple(sum(r[i] for r in fan.generators(cone)) for i in range(fan.rank))
        u = primitive_vector(total)
        return Verdict(
            False,
            {"cone": cone, "point": u, "phi": pair.support.value(u),
             "reason": "no ray of the cone lies in W"},
        )
    V = pair.W.trace
    m = _phi_functional(pair, cone)
    hrep = fan.hrep(cone)
    cons = [(a, Fraction(0), EQ) for a in hrep.eqs]
    cons += [(a, Fraction(0), GT) for a in hrep.ineqs]
    cons.append((tuple(-Fraction(x) for x in m), Fraction(-1), GE))
    for a in V.annihilator_rows():
        cons.append((a, Fraction(0), EQ))
    u = lattice_feasible(cons, fan.rank)
    if u is not None:
        phi = sum(Fraction(a) * x for a, x in zip(m, u))
        return Verdict(False, {"cone": cone, "point": u, "phi": phi})
    return Verdict(True)


def is_f_dlt(pair: ToricFoliatedPair) -> Verdict:
    """Boundary supported on rays inside W with coefficients at most 1, and
    every cone where phi_{K+Delta} vanishes is simplicial and non-dicritical."""
    if not pair.delta_is_effective():
        from .errors import NegativeDelta

        raise NegativeDelta("the boundary must be effective")
    for i, d in pair.delta.items():
        if d > 0 and not pair.iota[i]:
            return Verdict(False, {"ray": i, "reason": "boundary on an invariant ray"})
        if d > 1:
            return Verdict(False, {"ray": i, "reason": "boundary coefficient above 1"})
    fan = pair.fan
    V = pair.W.trace
    phi_at_ray = [pair.support.value(r) for r in fan.rays]
    for cone in fan.cones:
        if not cone:
            continue
        if any(phi_at_ray[i] != 0 for i in cone):
            continue
        if len(cone) != fan.cone_dims[cone]:
            return Verdict(False, {"cone": cone, "reason": "non-simplicial zero cone"})
        gens = fan.generators(cone)
        if all(pair.W.contains(g) for g in gens):
            continue
        if V.dim:
            w = strict_meet_witness(gens, V)
            if w is not None:
                return Verdict(False, {"cone": cone, "point": w,
                                       "reason": "dicritical zero cone"})
    return Verdict(True)


def is_tangent(fan: Fan, W: GaussianSubspace, cone) -> bool:
    """The orbit closure of the cone is tangent to the foliation exactly
    when W together with the cone's complex span fills N_C."""
    if cone not in fan.cone_dims:
        raise TorifolError(f"unknown cone {cone}")
    rows = list(W.basis)
    rows += [gauss_vec(fan.rays[i]) for i in cone]
    if not rows:
        return fan.rank == 0
    return matrix_rank(rows) == fan.rank


def has_simple_singularities(fan: Fan, W: GaussianSubspace) -> Verdict:
    """On a smooth fan this coincides with non-dicriticality."""
    if not fan.is_smooth:
        raise NonSmoothFan("simple-singularity test needs a smooth fan")
    return is_non_dicritical(fan, W)


def is_non_resonant(lams) -> bool:
    """No vanishing nonzero nonnegative-integer combination of the entries."""
    entries = [x if isinstance(x, GaussRat) else GaussRat(x) for x in lams]
    if not entries:
        return True
    if any(not e for e in entries):
        raise TorifolError("non-resonance is undefined with a zero entry")
    m = len(entries)
    cons = [
        (tuple(e.re for e in entries), Fraction(0), EQ),
        (tuple(e.im for e in entries), Fraction(0), EQ),
        (tuple(Fraction(1) for _ in entries), Fraction(1), EQ),
    ]
    for j in range(m):
        unit = tuple(Fraction(1) if k == j else Fraction(0) for k in range(m))
        cons.append((unit, Fraction(0), GE))
    return feasible(cons, m) is None
