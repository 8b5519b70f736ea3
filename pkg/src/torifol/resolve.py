"""Fan surgeries that produce models with prescribed singularity classes:
simplicialization, non-dicritical (dagger) resolution, smooth refinement,
foliated log resolution, and the F-dlt modification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classify import is_f_dlt, is_non_dicritical
from .errors import (
    IterationCapExceeded,
    NegativeDelta,
    NonSimplicialFan,
    TheoremViolation,
    TorifolError,
)
from .fan import Fan
from .foliation import GaussianSubspace, ToricFoliatedPair
from .gaussian import primitive_vector
from .polyhedra import EQ, GE, feasible, parallelotope_lattice_points

STEP_CAP = 10_000


@dataclass(frozen=True)
class RefinementMorphism:
    """A refinement obtained from ``target`` by an ordered list of star
    subdivisions; ``source`` is the refined fan."""

    source: Fan
    target: Fan
    steps: tuple  # ordered primitive subdivision centres

    @property
    def added_rays(self):
        old = set(self.target.rays)
        return tuple(r for r in self.source.rays if r not in old)

    @property
    def is_identity(self):
        return not self.steps

    def replay(self) -> Fan:
        """Re-apply the log to the target; must reproduce the source exactly."""
        fan = self.target
        for u in self.steps:
            fan = fan.star_subdivide(u)
        return fan

    def verify(self):
        replayed = self.replay()
        if replayed.rays != self.source.rays or replayed.max_cones != self.source.max_cones:
            raise TorifolError("refinement log does not reproduce its source")
        return True


def _identity(fan: Fan) -> RefinementMorphism:
    return RefinementMorphism(fan, fan, ())


def _simpliciality_defect(fan: Fan) -> int:
    return sum(
        len(c) - fan.cone_dims[c]
        for c in fan.max_cones
        if len(c) != fan.cone_dims[c]
    )


def simplicialize_same_rays(fan: Fan) -> RefinementMorphism:
    """Refine to a simplicial fan using only star subdivisions at existing
    rays, so no ray is added."""
    work = fan
    steps = []
    for _ in range(STEP_CAP):
        bad = [c for c in work.max_cones if len(c) != work.cone_dims[c]]
        if not bad:
            return RefinementMorphism(work, fan, tuple(steps))
        defect = _simpliciality_defect(work)
        cone = sorted(bad, key=lambda c: tuple(work.rays[i] for i in c))[0]
        progressed = False
        for ray in sorted(work.generators(cone)):
            candidate = work.star_subdivide(ray)
            if _simpliciality_defect(candidate) < defect:
                work = candidate
                steps.append(ray)
                progressed = True
                break
        if not progressed:
            raise IterationCapExceeded(
                f"no ray subdivision reduces non-simpliciality of {cone}"
            )
    raise IterationCapExceeded("simplicialization hit the step cap")


def _ray_trace_in_cone(fan: Fan, cone, V):
    """The primitive generator of V meet cone when that meet is a single ray
    passing through the cone's relative interior, else None."""
    hrep = fan.hrep(cone)
    pos = tuple(
        sum(Fraction(a[i]) for a in hrep.ineqs) for i in range(fan.rank)
    )
    cons = list(hrep.constraints())
    for a in V.annihilator_rows():
        cons.append((a, Fraction(0), EQ))
    w = feasible(cons + [(pos, Fraction(1), EQ)], fan.rank)
    if w is None:
        return None
    # one-dimensionality: nothing in V meet cone escapes the line through w
    from .gaussian import kernel_basis

    for f in kernel_basis([w]):
        for sgn in (1, -1):
            probe = tuple(Fraction(sgn) * x for x in f)
            if feasible(cons + [(probe, Fraction(1), GE)], fan.rank) is not None:
                return None
    if not hrep.relint_contains(w):
        return None
    return primitive_vector(w)


def dagger_resolution(fan: Fan, W: GaussianSubspace) -> RefinementMorphism:
    """Refine (adding rays inside W only) until every cone whose relative
    interior meets the lattice points of W lies in W.

    Simplicializes first, then sweeps the cone dimensions from 2 upward,
    star-subdividing at the ray where W crosses a cone's interior.
    """
    simp = simplicialize_same_rays(fan)
    work = simp.source
    steps = list(simp.steps)
    V = W.trace
    if V.dim == 0:
        return RefinementMorphism(work, fan, tuple(steps))
    for sweep in range(50):
        changed = False
        for k in range(2, fan.rank + 1):
            centres = []
            for cone in work.cones_of_dim(k):
                if all(W.contains(g) for g in work.generators(cone)):
                    continue
                ray = _ray_trace_in_cone(work, cone, V)
                if ray is not None and work.ray_index(ray) is None:
                    centres.append(ray)
            for ray in sorted(set(centres)):
                if work.ray_index(ray) is not None:
                    continue
                work = work.star_subdivide(ray)
                steps.append(ray)
                changed = True
        if is_non_dicritical(work, W):
            return RefinementMorphism(work, fan, tuple(steps))
        if not changed:
            raise IterationCapExceeded(
                "dagger resolution stalled without reaching non-dicriticality"
            )
    raise IterationCapExceeded("dagger resolution exceeded its sweep cap")


def _multiplicity_multiset(fan: Fan):
    out = {}
    for c in fan.max_cones:
        m = fan.multiplicity(c)
        out[m] = out.get(m, 0) + 1
    return out


def _multiset_decreased(before, after):
    removed = {}
    added = {}
    for k in set(before) | set(after):
        d = before.get(k, 0) - after.get(k, 0)
        if d > 0:
            removed[k] = d
        elif d < 0:
            added[k] = -d
    if not removed:
        return False
    return all(any(r > a for r in removed) for a in added)


def smooth_refinement(fan: Fan) -> RefinementMorphism:
    """Refine a simplicial fan to a smooth one by star subdivisions at the
    least nonzero lattice point of a fundamental parallelotope."""
    if not fan.is_simplicial:
        raise NonSimplicialFan("smooth refinement needs a simplicial fan")
    work = fan
    steps = []
    for _ in range(STEP_CAP):
        bad = [c for c in work.max_cones if c and work.multiplicity(c) > 1]
        if not bad:
            return RefinementMorphism(work, fan, tuple(steps))
        cone = sorted(bad, key=lambda c: tuple(work.rays[i] for i in c))[0]
        points = parallelotope_lattice_points(work.generators(cone), work.rank)
        if not points:
            raise TorifolError("multiplicity above 1 but empty parallelotope")
        centre = primitive_vector(points[0])
        before = _multiplicity_multiset(work)
        work = work.star_subdivide(centre)
        steps.append(centre)
        after = _multiplicity_multiset(work)
        if not _multiset_decreased(before, after):
            raise TheoremViolation(
                "smooth refinement step failed to decrease multiplicities"
            )
    raise IterationCapExceeded("smooth refinement hit the step cap")


def foliated_log_resolution(pair: ToricFoliatedPair):
    """Dagger resolution followed by smooth refinement.

    Returns (morphism, resolved pair) where the resolved boundary is the
    strict transform of the old one plus every exceptional divisor with
    coefficient 1.
    """
    d = dagger_resolution(pair.fan, pair.W)
    s = smooth_refinement(d.source)
    morphism = RefinementMorphism(s.source, pair.fan, d.steps + s.steps)
    new_fan = morphism.source
    delta = {}
    for i, r in enumerate(new_fan.rays):
        old = pair.fan.ray_index(r)
        if old is not None:
            v = pair.delta.get(old, Fraction(0))
            if v:
                delta[i] = v
        else:
            delta[i] = Fraction(1)
    resolved = ToricFoliatedPair(
        new_fan, GaussianSubspace(new_fan.rank, pair.W.basis), delta
    )
    nd = is_non_dicritical(new_fan, resolved.W)
    if not nd:
        raise TheoremViolation(f"log resolution is still dicritical: {nd.certificate}")
    if not new_fan.is_smooth:
        raise TheoremViolation("log resolution failed to produce a smooth fan")
    return morphism, resolved


def fdlt_modification(pair: ToricFoliatedPair):
    """Simplicialize, then resolve dicriticality; the new boundary is the
    truncated non-invariant part of the old one plus the non-invariant
    exceptional divisors.

    Returns (morphism, modified pair, extraction report); the report lists
    every added ray with its value under the old support function, which the
    underlying theorem forces to be nonpositive.
    """
    if not pair.delta_is_effective():
        raise NegativeDelta("the boundary must be effective")
    morphism = dagger_resolution(pair.fan, pair.W)
    new_fan = morphism.source
    delta = {}
    for i, r in enumerate(new_fan.rays):
        old = pair.fan.ray_index(r)
        if old is not None:
            if pair.iota[old]:
                v = min(pair.delta.get(old, Fraction(0)), Fraction(1))
                if v:
                    delta[i] = v
        else:
            if pair.W.contains(r):
                delta[i] = Fraction(1)
    modified = ToricFoliatedPair(
        new_fan, GaussianSubspace(new_fan.rank, pair.W.basis), delta
    )
    report = []
    for r in morphism.added_rays:
        phi = pair.support.value(r)
        if phi > 0:
            raise TheoremViolation(
                f"extracted ray {r} has positive log discrepancy value {phi}"
            )
        report.append((r, phi))
    verdict = is_f_dlt(modified)
    if not verdict:
        raise TheoremViolation(
            f"modification failed to be F-dlt: {verdict.certificate}"
        )
    return morphism, modified, tuple(report)
