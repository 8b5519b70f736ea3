"""The complete Q-factorial toric foliated minimal model program: wall
relations, extremal classes, contraction surgery, flips, Mori fiber spaces,
the driver loop, and cone-theorem certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .classify import is_f_dlt, is_log_canonical, is_non_dicritical, is_tangent
from .errors import (
    IterationCapExceeded,
    NegativeDelta,
    PreservationError,
    TheoremViolation,
    TorifolError,
)
from .fan import Fan
from .foliation import GaussianSubspace, ToricFoliatedPair, quotient_foliation
from .gaussian import RatSubspace, apply_rows, primitive_vector, solve_linear
from .polyhedra import EQ, GE, feasible

DEFAULT_STEP_CAP = 10_000


@dataclass(frozen=True)
class WallRelation:
    """The unique linear relation among the n+1 rays around a wall,
    normalized so the last coefficient is 1.

    ``rays`` lists fan ray indices: the wall rays in ascending order, then
    the two opposite rays (the lexicographically larger generator last).
    Positions are partitioned by coefficient sign.
    """

    wall: tuple
    rays: tuple
    coeffs: tuple
    negative: tuple  # positions with negative coefficient
    zero: tuple
    positive: tuple

    @property
    def alpha(self):
        return len(self.negative)


def wall_relation(fan: Fan, wall) -> WallRelation:
    if not (fan.is_complete and fan.is_simplicial):
        raise TorifolError("wall relations need a complete simplicial fan")
    incidence = dict(fan.walls())
    if wall not in incidence:
        raise TorifolError(f"{wall} is not a wall of the fan")
    ca, cb = (fan.max_cones[i] for i in incidence[wall])
    opp_a = next(i for i in ca if i not in wall)
    opp_b = next(i for i in cb if i not in wall)
    if fan.rays[opp_a] > fan.rays[opp_b]:
        last, second = opp_a, opp_b
    else:
        last, second = opp_b, opp_a
    ordered = tuple(wall) + (second, last)
    basis_rows = [tuple(Fraction(x) for x in fan.rays[i]) for i in ordered[:-1]]
    matrix = [tuple(row[j] for row in basis_rows) for j in range(fan.rank)]
    rhs = tuple(-Fraction(x) for x in fan.rays[last])
    sol = solve_linear(matrix, rhs)
    if sol is None:
        raise TorifolError("wall relation system is inconsistent (internal error)")
    coeffs = tuple(sol) + (Fraction(1),)
    total = [Fraction(0)] * fan.rank
    for a, i in zip(coeffs, ordered):
        for k in range(fan.rank):
            total[k] += a * fan.rays[i][k]
    if any(total):
        raise TorifolError("wall relation does not sum to zero (internal error)")
    if coeffs[-2] <= 0:
        raise TheoremViolation("opposite rays of a wall are not on opposite sides")
    negative = tuple(p for p, a in enumerate(coeffs) if a < 0)
    zero = tuple(p for p, a in enumerate(coeffs) if a == 0)
    positive = tuple(p for p, a in enumerate(coeffs) if a > 0)
    return WallRelation(wall, ordered, coeffs, negative, zero, positive)


def curve_class(fan: Fan, relation: WallRelation):
    """The relation coefficients spread over all rays, scaled to a primitive
    integer vector; positive proportionality classes compare equal."""
    vec = [Fraction(0)] * len(fan.rays)
    for a, i in zip(relation.coeffs, relation.rays):
        vec[i] = a
    return primitive_vector(vec)


@dataclass(frozen=True)
class ExtremalClass:
    rep: tuple  # primitive class vector over ray indices
    walls: tuple  # representative walls
    sign: Fraction  # (K+Delta) . class, up to positive scale
    is_extremal: bool

    @property
    def is_negative(self):
        return self.sign < 0


def extremal_rays(pair: ToricFoliatedPair):
    """Group wall curve classes by positive proportionality, mark the
    extremal ones, and pair each class against K+Delta (sign-exact)."""
    fan = pair.fan
    if not (fan.is_complete and fan.is_simplicial):
        raise TorifolError("extremal classes need a complete simplicial fan")
    by_rep = {}
    for wall, _ in fan.walls():
        rel = wall_relation(fan, wall)
        rep = curve_class(fan, rel)
        by_rep.setdefault(rep, []).append(wall)
    log = pair.log_divisor()
    classes = []
    reps = sorted(by_rep)
    for rep in reps:
        sign = sum(log[i] * rep[i] for i in range(len(fan.rays)))
        others = [r for r in reps if r != rep]
        classes.append(
            ExtremalClass(
                rep,
                tuple(sorted(by_rep[rep])),
                sign,
                not _in_cone_of(rep, others),
            )
        )
    return classes


def _in_cone_of(rep, others):
    if not others:
        return False
    m = len(others)
    width = len(rep)
    cons = []
    for c in range(width):
        row = tuple(Fraction(o[c]) for o in others)
        cons.append((row, Fraction(rep[c]), EQ))
    for j in range(m):
        unit = tuple(Fraction(1) if k == j else Fraction(0) for k in range(m))
        cons.append((unit, Fraction(0), GE))
    return feasible(cons, m) is not None


@dataclass(frozen=True)
class MMPStep:
    kind: str  # "divisorial" | "flip" | "mori_fiber_space"
    ray_class: tuple
    alpha: int
    walls: tuple
    detail: dict
    after: Optional[ToricFoliatedPair]
    checks: dict = field(default_factory=dict)


def contract_ray(pair: ToricFoliatedPair, rep) -> MMPStep:
    """Contract a K+Delta-negative extremal class; the step kind follows the
    sign pattern of its wall relations."""
    fan = pair.fan
    classes = {c.rep: c for c in extremal_rays(pair)}
    rep = tuple(int(x) for x in rep)
    if rep not in classes:
        raise TorifolError(f"{rep} is not a wall curve class of the fan")
    cls = classes[rep]
    if not cls.is_extremal:
        raise TorifolError(f"{rep} is not extremal")
    if cls.sign >= 0:
        raise TorifolError(f"{rep} is not negative against K+Delta")
    relations = [wall_relation(fan, w) for w in cls.walls]
    alphas = {r.alpha for r in relations}
    if len(alphas) != 1:
        raise TheoremViolation(f"inconsistent contraction type across walls: {alphas}")
    alpha = alphas.pop()
    neg_sets = {frozenset(r.rays[p] for p in r.negative) for r in relations}
    if len(neg_sets) != 1:
        raise TheoremViolation("negative-part rays differ across walls of one class")
    if alpha == 1:
        return _divisorial(pair, cls, relations)
    if alpha == 0:
        return _fiber_type(pair, cls, relations)
    return _flip(pair, cls, relations)


def _divisorial(pair, cls, relations):
    fan = pair.fan
    removed = next(iter(relations[0].rays[p] for p in relations[0].negative))
    removed_ray = fan.rays[removed]
    keep = [i for i in range(len(fan.rays)) if i != removed]
    remap = {old: new for new, old in enumerate(keep)}
    new_rays = [fan.rays[i] for i in keep]
    new_max = set()
    incidence = dict(fan.walls())
    swallowed = set()
    for wall in cls.walls:
        ca, cb = (fan.max_cones[i] for i in incidence[wall])
        swallowed.add(ca)
        swallowed.add(cb)
        merged = tuple(remap[i] for i in sorted((set(ca) | set(cb)) - {removed}))
        new_max.add(merged)
    for cone in fan.max_cones:
        if cone in swallowed:
            continue
        if removed in cone:
            raise TheoremViolation(
                "a maximal cone through the contracted ray was not swallowed"
            )
        new_max.add(tuple(remap[i] for i in cone))
    new_fan = Fan(fan.rank, new_rays, sorted(new_max))
    if not new_fan.star_subdivide(removed_ray).same_fan(fan):
        raise TheoremViolation(
            "divisorial contraction is not inverted by the star subdivision"
        )
    delta = {
        remap[i]: v for i, v in pair.delta.items() if i != removed
    }
    after = ToricFoliatedPair(
        new_fan, GaussianSubspace(new_fan.rank, pair.W.basis), delta
    )
    detail = {"removed_ray": removed_ray, "removed_index": removed}
    return MMPStep("divisorial", cls.rep, 1, cls.walls, detail, after)


def _fiber_type(pair, cls, relations):
    fan = pair.fan
    rel = relations[0]
    plus_ids = sorted(rel.rays[p] for p in rel.positive)
    plus_gens = [fan.rays[i] for i in plus_ids]
    from .polyhedra import cone_hrep

    hrep = cone_hrep(plus_gens, fan.rank)
    for g in plus_gens:
        if not hrep.contains(tuple(-x for x in g)):
            raise TheoremViolation("positive part of a fiber wall is not a subspace")
    U = RatSubspace(fan.rank, [tuple(Fraction(x) for x in g) for g in plus_gens])
    nd_input = bool(is_non_dicritical(fan, pair.W))
    u_in_w = all(pair.W.contains(g) for g in plus_gens)
    if nd_input and not u_in_w:
        raise TheoremViolation(
            "non-dicritical input but the contracted subspace is not inside W"
        )
    if u_in_w:
        proj, w_bar = quotient_foliation(pair.W, U)
    else:
        from .gaussian import quotient_projection, GaussRat

        proj = quotient_projection(fan.rank, U.rows)
        images = []
        for w in pair.W.basis:
            re = apply_rows(proj, tuple(e.re for e in w))
            im = apply_rows(proj, tuple(e.im for e in w))
            images.append(tuple(GaussRat(a, b) for a, b in zip(re, im)))
        w_bar = GaussianSubspace(len(proj), images)
    new_rank = len(proj)
    incidence = dict(fan.walls())
    image_cones = set()
    ray_images = {}
    for i, r in enumerate(fan.rays):
        img = apply_rows(proj, r)
        ray_images[i] = primitive_vector(img) if any(img) else None
    for wall in cls.walls:
        ca, cb = (fan.max_cones[i] for i in incidence[wall])
        cone_ids = sorted(set(ca) | set(cb))
        image = sorted({ray_images[i] for i in cone_ids if ray_images[i] is not None})
        image_cones.add(tuple(image))
    new_rays = sorted({r for c in image_cones for r in c})
    index = {r: k for k, r in enumerate(new_rays)}
    new_max = sorted({tuple(sorted(index[r] for r in c)) for c in image_cones})
    if new_rank == 0:
        base_fan = Fan(0, [], [()])
    else:
        base_fan = Fan(new_rank, new_rays, new_max)
        if not (base_fan.is_complete and base_fan.is_simplicial):
            raise TheoremViolation("Mori fiber base fan is not complete simplicial")
    delta_bar = {}
    for i, v in pair.delta.items():
        img = ray_images[i]
        if img is not None and img in index:
            delta_bar[index[img]] = delta_bar.get(index[img], Fraction(0)) + v
    base_pair = ToricFoliatedPair(base_fan, w_bar, delta_bar)
    detail = {
        "subspace_rays": [fan.rays[i] for i in plus_ids],
        "subspace_in_w": u_in_w,
        "projection": proj,
        "base_rank": new_rank,
    }
    return MMPStep("mori_fiber_space", cls.rep, 0, cls.walls, detail, base_pair)


def _flip(pair, cls, relations):
    fan = pair.fan
    to_remove = set()
    to_add = set()
    fan0_extra = set()
    for rel in relations:
        ids = set(rel.rays)
        fan0_extra.add(tuple(sorted(ids)))
        for p in rel.positive:
            cone = tuple(sorted(ids - {rel.rays[p]}))
            if cone not in fan.max_cones:
                raise TheoremViolation(
                    f"expected maximal cone {cone} missing from the flip locus"
                )
            to_remove.add(cone)
        for p in rel.negative:
            to_add.add(tuple(sorted(ids - {rel.rays[p]})))
    new_max = sorted((set(fan.max_cones) - to_remove) | to_add)
    new_fan = Fan(fan.rank, fan.rays, new_max)
    if not (new_fan.is_complete and new_fan.is_simplicial):
        raise TheoremViolation("flipped fan is not complete simplicial")
    after = ToricFoliatedPair(
        new_fan, GaussianSubspace(new_fan.rank, pair.W.basis), dict(pair.delta)
    )
    fan0 = Fan(fan.rank, fan.rays, sorted((set(fan.max_cones) - to_remove) | fan0_extra))
    detail = {
        "flipping_locus": sorted(to_remove),
        "flipped_locus": sorted(to_add),
        "intermediate_max_cones": fan0.max_cones,
    }
    return MMPStep("flip", cls.rep, relations[0].alpha, cls.walls, detail, after)


@dataclass(frozen=True)
class MMPTrace:
    initial: ToricFoliatedPair
    steps: tuple
    result: str  # "nef" | "mori_fiber_space"
    final: ToricFoliatedPair
    nef_certificate: tuple = ()


def run_mmp(pair: ToricFoliatedPair, max_steps: int = DEFAULT_STEP_CAP) -> MMPTrace:
    """Contract lexicographically least negative extremal classes until the
    log divisor is nef or a Mori fiber space appears, re-verifying after
    every step that non-dicriticality and F-dlt-ness survive when present."""
    fan = pair.fan
    if not (fan.is_complete and fan.is_simplicial):
        raise TorifolError("the MMP needs a complete simplicial fan")
    if not pair.delta_is_effective():
        raise NegativeDelta("the MMP needs an effective boundary")
    lc = is_log_canonical(pair)
    if not lc:
        raise TorifolError(f"pair is not log canonical: {lc.certificate}")
    steps = []
    current = pair
    for _ in range(max_steps):
        classes = extremal_rays(current)
        negatives = [c for c in classes if c.is_extremal and c.is_negative]
        if not negatives:
            certificate = tuple((c.rep, c.sign) for c in classes)
            if any(c.sign < 0 for c in classes):
                raise TheoremViolation(
                    "a negative class survives but no extremal class is negative"
                )
            return MMPTrace(pair, tuple(steps), "nef", current, certificate)
        chosen = sorted(negatives, key=lambda c: c.rep)[0]
        nd_before = bool(is_non_dicritical(current.fan, current.W))
        fdlt_before = bool(is_f_dlt(current))
        step = contract_ray(current, chosen.rep)
        checks = {"nd_before": nd_before, "fdlt_before": fdlt_before}
        after = step.after
        nd_after = bool(is_non_dicritical(after.fan, after.W))
        fdlt_after = bool(is_f_dlt(after))
        checks["nd_after"] = nd_after
        checks["fdlt_after"] = fdlt_after
        if nd_before and not nd_after:
            raise PreservationError(
                f"{step.kind} step lost non-dicriticality"
            )
        if fdlt_before and not fdlt_after:
            raise PreservationError(f"{step.kind} step lost F-dlt-ness")
        step = MMPStep(
            step.kind, step.ray_class, step.alpha, step.walls, step.detail,
            step.after, checks,
        )
        steps.append(step)
        if step.kind == "mori_fiber_space":
            return MMPTrace(pair, tuple(steps), "mori_fiber_space", after)
        current = after
    raise IterationCapExceeded(f"MMP did not finish within {max_steps} steps")


def cone_certificate(pair: ToricFoliatedPair):
    """For each negative extremal class, an invariant curve tangent to the
    foliation, with the positive-part ray inside W that witnesses it."""
    fan = pair.fan
    lc = is_log_canonical(pair)
    if not lc:
        raise TorifolError(f"pair is not log canonical: {lc.certificate}")
    if not pair.delta_is_effective():
        raise NegativeDelta("cone certificates need an effective boundary")
    out = []
    for cls in extremal_rays(pair):
        if not (cls.is_extremal and cls.is_negative):
            continue
        rel = wall_relation(fan, cls.walls[0])
        candidates = [
            p for p in rel.positive if pair.W.contains(fan.rays[rel.rays[p]])
        ]
        if not candidates:
            raise TheoremViolation(
                f"negative class {cls.rep} has no positive-part ray inside W"
            )
        last = len(rel.rays) - 1
        preferred = [p for p in candidates if p != last]
        if preferred:
            ell = preferred[0]
            ordered, coeffs = rel.rays, rel.coeffs
        else:
            # renormalize with the opposite rays swapped so ell avoids the
            # distinguished last slot
            a_n = rel.coeffs[-2]
            ordered = rel.rays[:-2] + (rel.rays[-1], rel.rays[-2])
            coeffs = tuple(c / a_n for c in rel.coeffs[:-2]) + (
                Fraction(1) / a_n,
                Fraction(1),
            )
            ell = last - 1
        curve = tuple(
            sorted(ordered[p] for p in range(len(ordered)) if p not in (ell, last))
        )
        tangent = is_tangent(fan, pair.W, curve)
        if not tangent:
            raise TheoremViolation(
                f"certificate curve {curve} for class {cls.rep} is not tangent"
            )
        out.append(
            {
                "class": cls.rep,
                "wall": rel.wall,
                "ell_ray": fan.rays[ordered[ell]],
                "curve_cone": curve,
                "tangent": True,
            }
        )
    return out
