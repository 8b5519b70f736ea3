"""Exact polyhedral computations over Q: Fourier-Motzkin elimination with
witness recovery, cone H-representations, lattice-point enumeration, and
integer feasibility for (possibly unbounded) rational systems.

A constraint is a triple ``(coeffs, rhs, rel)`` meaning ``coeffs . x REL rhs``
with ``rel`` one of ``"="``, ``">="``, ``">"``.  No floating point anywhere.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import ceil, floor, gcd

from .errors import NotStronglyConvex, TorifolError, UnboundedError
from .gaussian import RatSubspace, primitive_vector

EQ, GE, GT = "=", ">=", ">"


def _normalize(con):
    """Scale a constraint by a positive rational to primitive integers."""
    coeffs, rhs, rel = con
    denom = 1
    for f in list(coeffs) + [rhs]:
        denom = denom * f.denominator // gcd(denom, f.denominator)
    ints = [int(f * denom) for f in coeffs]
    b = int(rhs * denom)
    g = 0
    for x in ints + [b]:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
        b = b // g
    return (tuple(ints), b, rel)


def _as_fracs(con):
    coeffs, rhs, rel = con
    return (tuple(Fraction(x) for x in coeffs), Fraction(rhs), rel)


def _const_ok(con):
    _, b, rel = con
    if rel == EQ:
        return b == 0
    if rel == GE:
        return b <= 0
    return b < 0


def _dedupe(cons):
    # equalities are kept apart; a strict inequality subsumes the matching
    # non-strict one, nothing else merges
    eqs = set()
    ineqs = {}
    for con in cons:
        key = _normalize(con)
        coeffs, b, rel = key
        if not any(coeffs):
            if not _const_ok(key):
                return None  # plainly infeasible
            continue
        if rel == EQ:
            eqs.add((coeffs, b))
        else:
            prev = ineqs.get((coeffs, b))
            if prev is None or (prev == GE and rel == GT):
                ineqs[(coeffs, b)] = rel
    out = [
        (tuple(Fraction(c) for c in coeffs), Fraction(b), EQ)
        for coeffs, b in sorted(eqs)
    ]
    out += [
        (tuple(Fraction(c) for c in coeffs), Fraction(b), rel)
        for (coeffs, b), rel in sorted(ineqs.items())
    ]
    return out


def feasible(cons, nvars):
    """Exact rational feasibility; returns a witness tuple or None.

    Equalities are eliminated by substitution, the rest by Fourier-Motzkin;
    back-substitution recovers a deterministic rational witness.
    """
    active = _dedupe([_as_fracs(c) for c in cons])
    if active is None:
        return None
    records = []
    for j in range(nvars):
        eq_pick = None
        for idx, (c, b, rel) in enumerate(active):
            if rel == EQ and c[j]:
                eq_pick = idx
                break
        if eq_pick is not None:
            c, b, _ = active[eq_pick]
            records.append(("eq", j, c, b))
            rest = active[:eq_pick] + active[eq_pick + 1:]
            new = []
            for d, e, rel in rest:
                if d[j]:
                    f = d[j] / c[j]
                    d = tuple(dk - f * ck if k != j else Fraction(0)
                              for k, (dk, ck) in enumerate(zip(d, c)))
                    e = e - f * b
                new.append((d, e, rel))
            active = _dedupe(new)
        else:
            lowers, uppers, others = [], [], []
            for c, b, rel in active:
                if not c[j]:
                    others.append((c, b, rel))
                    continue
                expr = tuple(-ck / c[j] if k != j else Fraction(0)
                             for k, ck in enumerate(c))
                const = b / c[j]
                strict = rel == GT
                if c[j] > 0:
                    lowers.append((expr, const, strict))
                else:
                    uppers.append((expr, const, strict))
            records.append(("fm", j, lowers, uppers))
            new = list(others)
            for lv, lc, ls in lowers:
                for uv, uc, us in uppers:
                    vec = tuple(u - l for u, l in zip(uv, lv))
                    new.append((vec, lc - uc, GT if (ls or us) else GE))
            active = _dedupe(new)
        if active is None:
            return None
    for con in active:
        if not _const_ok(_normalize(con)):
            return None
    # back-substitution, reverse elimination order
    values = [Fraction(0)] * nvars
    for record in reversed(records):
        if record[0] == "eq":
            _, j, c, b = record
            s = b - sum(ck * values[k] for k, ck in enumerate(c) if k != j)
            values[j] = s / c[j]
        else:
            _, j, lowers, uppers = record
            lo = hi = None
            lo_strict = hi_strict = False
            for lv, lc, ls in lowers:
                v = lc + sum(a * values[k] for k, a in enumerate(lv))
                if lo is None or v > lo or (v == lo and ls):
                    lo, lo_strict = v, ls if (lo is None or v > lo) else (lo_strict or ls)
            for uv, uc, us in uppers:
                v = uc + sum(a * values[k] for k, a in enumerate(uv))
                if hi is None or v < hi or (v == hi and us):
                    hi, hi_strict = v, us if (hi is None or v < hi) else (hi_strict or us)
            if lo is None and hi is None:
                values[j] = Fraction(0)
            elif lo is None:
                values[j] = hi - 1
            elif hi is None:
                values[j] = lo + 1
            elif lo < hi:
                values[j] = (lo + hi) / 2
            else:
                if lo > hi or lo_strict or hi_strict:
                    raise TorifolError("Fourier-Motzkin back-substitution lost feasibility")
                values[j] = lo
    return tuple(values)


def satisfies(cons, point):
    for c, b, rel in cons:
        v = sum(Fraction(a) * Fraction(x) for a, x in zip(c, point))
        b = Fraction(b)
        if rel == EQ and v != b:
            return False
        if rel == GE and v < b:
            return False
        if rel == GT and v <= b:
            return False
    return True


def project(cons, nvars, keep):
    """Eliminate every variable not in ``keep``; width is preserved."""
    active = _dedupe([_as_fracs(c) for c in cons])
    if active is None:
        return None
    for j in range(nvars):
        if j in keep:
            continue
        eq_pick = None
        for idx, (c, b, rel) in enumerate(active):
            if rel == EQ and c[j]:
                eq_pick = idx
                break
        if eq_pick is not None:
            c, b, _ = active[eq_pick]
            rest = active[:eq_pick] + active[eq_pick + 1:]
            new = []
            for d, e, rel in rest:
                if d[j]:
                    f = d[j] / c[j]
                    d = tuple(dk - f * ck if k != j else Fraction(0)
                              for k, (dk, ck) in enumerate(zip(d, c)))
                    e = e - f * b
                new.append((d, e, rel))
            active = _dedupe(new)
        else:
            lowers, uppers, others = [], [], []
            for c, b, rel in active:
                if not c[j]:
                    others.append((c, b, rel))
                    continue
                expr = tuple(-ck / c[j] if k != j else Fraction(0)
                             for k, ck in enumerate(c))
                const = b / c[j]
                strict = rel == GT
                (lowers if c[j] > 0 else uppers).append((expr, const, strict))
            new = list(others)
            for lv, lc, ls in lowers:
                for uv, uc, us in uppers:
                    vec = tuple(u - l for u, l in zip(uv, lv))
                    new.append((vec, lc - uc, GT if (ls or us) else GE))
            active = _dedupe(new)
        if active is None:
            return None
    return active


def coordinate_interval(cons, nvars, j):
    """(lo, hi) of coordinate j over the solution set; None means unbounded.

    Strictness is ignored; callers scanning integers filter by membership.
    """
    projected = project(cons, nvars, {j})
    if projected is None:
        return None
    lo = hi = None
    for c, b, rel in projected:
        cj = c[j]
        if not cj:
            continue
        v = b / cj
        if rel == EQ:
            lo = v if lo is None else max(lo, v)
            hi = v if hi is None else min(hi, v)
        elif cj > 0:
            lo = v if lo is None else max(lo, v)
        else:
            hi = v if hi is None else min(hi, v)
    return (lo, hi)


def _homogenized(cons):
    return [(c, Fraction(0), EQ if rel == EQ else GE) for c, b, rel in cons]


def recession_direction(cons, nvars):
    """A nonzero rational recession direction, or None when the set is bounded."""
    hom = _homogenized([_as_fracs(c) for c in cons])
    for j in range(nvars):
        for sgn in (1, -1):
            unit = tuple(Fraction(sgn) if k == j else Fraction(0) for k in range(nvars))
            w = feasible(hom + [(unit, Fraction(1), GE)], nvars)
            if w is not None:
                return w
    return None


def lattice_points(cons, nvars):
    """All integer points of a bounded rational solution set, in lex order."""
    if nvars == 0:
        return [()] if satisfies(cons, ()) else []
    if recession_direction(cons, nvars) is not None:
        raise UnboundedError("solution set has a nonzero recession direction")
    ranges = []
    for j in range(nvars):
        iv = coordinate_interval(cons, nvars, j)
        if iv is None:
            return []
        lo, hi = iv
        if lo is None or hi is None:
            raise UnboundedError(f"coordinate {j} is unbounded")
        ranges.append(range(ceil(lo), floor(hi) + 1))
    out = []
    for point in itertools.product(*ranges):
        if satisfies(cons, point):
            out.append(tuple(point))
    return out


def lattice_feasible(cons, nvars):
    """An integer solution of a rational constraint system, or None.

    Works on unbounded sets: pick a lattice recession direction r, note that
    any integer solution can be walked back along r until one more backward
    step exits the set, and that such minimal solutions satisfy one of
    finitely many band constraints; recurse on the bands.  The recession
    cone loses a dimension per level, so the recursion depth is at most the
    number of variables.  Lineality is not supported (and never arises for
    subsets of strongly convex cones).
    """
    if nvars == 0:
        return () if satisfies(cons, ()) else None
    if feasible(cons, nvars) is None:
        return None
    split = _split_lineality(cons, nvars)
    if split is not None:
        return split[0]
    rec = recession_direction(cons, nvars)
    if rec is None:
        for j in range(nvars):
            iv = coordinate_interval(cons, nvars, j)
            if iv is None:
                return None
        pts = lattice_points(cons, nvars)
        return pts[0] if pts else None
    r = primitive_vector(rec)
    bands = []
    for c, b, rel in [_as_fracs(c) for c in cons]:
        d = sum(a * Fraction(x) for a, x in zip(c, r))
        if rel == EQ or d <= 0:
            continue
        if rel == GE:
            bands.append((tuple(-a for a in c), -(b + d), GT))
        else:
            bands.append((tuple(-a for a in c), -(b + d), GE))
    if not bands:
        raise TorifolError("lattice_feasible: unexpected lineality after reduction")
    for band in bands:
        hit = lattice_feasible(list(cons) + [band], nvars)
        if hit is not None:
            return hit
    return None


def _split_lineality(cons, nvars):
    """Quotient out directions unconstrained by every normal, if any.

    Every constraint normal vanishes on the lineality space, so the system
    descends to the quotient lattice; a hit lifts through an integer section
    of the projection.  Returns None when there is no lineality (the caller
    proceeds), else a 1-tuple holding the lifted witness or None.
    """
    from .gaussian import integer_section, kernel_basis, quotient_projection

    normals = [tuple(Fraction(x) for x in c) for c, _, _ in cons]
    nonzero = [c for c in normals if any(c)]
    if not nonzero:
        zero = (0,) * nvars
        return (zero if satisfies(cons, zero) else None,)
    lin = kernel_basis(nonzero)
    if not lin:
        return None
    proj = quotient_projection(nvars, lin)
    section = integer_section(proj)
    m = len(proj)
    reduced = []
    for c, b, rel in cons:
        c = tuple(Fraction(x) for x in c)
        chat = tuple(
            sum(ci * si for ci, si in zip(c, section[j])) for j in range(m)
        )
        reduced.append((chat, Fraction(b), rel))
    y = lattice_feasible(reduced, m)
    if y is None:
        return (None,)
    lifted = tuple(
        sum(int(yj) * section[j][k] for j, yj in enumerate(y))
        for k in range(nvars)
    )
    if not satisfies(cons, lifted):
        raise TorifolError("lineality lift failed (internal error)")
    return (lifted,)


# ---------------------------------------------------------------------------
# Cone H-representations
# ---------------------------------------------------------------------------

class ConeHrep:
    """H-description of a polyhedral cone: equalities and facet inequalities.

    Implicit equalities are extracted and redundant inequalities pruned, so
    relative-interior membership is ``eqs == 0 and ineqs > 0``.
    """

    __slots__ = ("nvars", "eqs", "ineqs")

    def __init__(self, nvars, eqs, ineqs):
        self.nvars = nvars
        self.eqs = eqs
        self.ineqs = ineqs

    def contains(self, vec):
        return all(_dot(a, vec) == 0 for a in self.eqs) and all(
            _dot(a, vec) >= 0 for a in self.ineqs
        )

    def relint_contains(self, vec):
        return all(_dot(a, vec) == 0 for a in self.eqs) and all(
            _dot(a, vec) > 0 for a in self.ineqs
        )

    def constraints(self, strict=False):
        rel = GT if strict else GE
        cons = [(a, 0, EQ) for a in self.eqs]
        cons += [(a, 0, rel) for a in self.ineqs]
        return cons

    def dim(self):
        from .gaussian import matrix_rank

        if not self.eqs:
            return self.nvars
        return self.nvars - matrix_rank([tuple(Fraction(x) for x in a) for a in self.eqs])


def _dot(a, vec):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, vec))


_HREP_CACHE = {}


def cone_hrep(generators, nvars) -> ConeHrep:
    """H-representation of Cone(generators), computed once and cached."""
    key = (nvars, tuple(sorted(tuple(int(x) for x in g) for g in generators)))
    hit = _HREP_CACHE.get(key)
    if hit is not None:
        return hit
    gens = key[1]
    m = len(gens)
    width = m + nvars
    cons = []
    for i in range(nvars):
        row = [Fraction(0)] * width
        for j, g in enumerate(gens):
            row[j] = Fraction(g[i])
        row[m + i] = Fraction(-1)
        cons.append((tuple(row), Fraction(0), EQ))
    for j in range(m):
        row = [Fraction(0)] * width
        row[j] = Fraction(1)
        cons.append((tuple(row), Fraction(0), GE))
    projected = project(cons, width, set(range(m, width)))
    if projected is None:
        raise TorifolError("cone projection infeasible (internal error)")
    eqs, ineqs = [], []
    for c, b, rel in projected:
        vec = tuple(c[m:])
        if not any(vec):
            continue
        norm = _normalize((vec, b, rel))[0]
        if rel == EQ:
            eqs.append(norm)
        else:
            ineqs.append(norm)
    eqs = sorted(set(eqs))
    ineqs = sorted(set(ineqs) - {tuple([0] * nvars)})
    # implicit equalities: inequalities whose positive side is unreachable
    changed = True
    while changed:
        changed = False
        base = [(a, 0, EQ) for a in eqs] + [(a, 0, GE) for a in ineqs]
        for a in list(ineqs):
            if feasible(base + [(a, 1, GE)], nvars) is None:
                ineqs.remove(a)
                eqs.append(a)
                eqs = sorted(set(eqs))
                changed = True
    # prune redundant inequalities
    kept = list(ineqs)
    for a in list(kept):
        others = [x for x in kept if x != a]
        test = [(e, 0, EQ) for e in eqs] + [(x, 0, GE) for x in others]
        neg = tuple(-t for t in a)
        if feasible(test + [(neg, 1, GE)], nvars) is None:
            kept = others
    hrep = ConeHrep(nvars, tuple(sorted(set(eqs))), tuple(sorted(set(kept))))
    _HREP_CACHE[key] = hrep
    return hrep


def cone_contains(generators, nvars, vec):
    return cone_hrep(generators, nvars).contains(vec)


def is_strongly_convex(generators, nvars):
    """No nonnegative nonzero relation among the generators."""
    m = len(generators)
    if m == 0:
        return True
    cons = []
    for i in range(nvars):
        row = tuple(Fraction(g[i]) for g in generators)
        cons.append((row, Fraction(0), EQ))
    cons.append((tuple(Fraction(1) for _ in range(m)), Fraction(1), EQ))
    for j in range(m):
        unit = tuple(Fraction(1) if k == j else Fraction(0) for k in range(m))
        cons.append((unit, Fraction(0), GE))
    return feasible(cons, m) is None


def extreme_generators(generators, nvars):
    """The subset of generators that are not conic combinations of the rest."""
    gens = [tuple(int(x) for x in g) for g in generators]
    kept = list(dict.fromkeys(gens))
    changed = True
    while changed:
        changed = False
        for g in list(kept):
            others = [h for h in kept if h != g]
            if not others:
                continue
            if cone_contains(others, nvars, g):
                kept.remove(g)
                changed = True
    return tuple(kept)


def strict_meet(cone_generators, subspace: RatSubspace) -> bool:
    """Does the relative interior of the cone meet the subspace?"""
    return strict_meet_witness(cone_generators, subspace) is not None


def strict_meet_witness(cone_generators, subspace: RatSubspace):
    """A primitive lattice point in Relint(cone) meeting the subspace, or None."""
    gens = [tuple(int(x) for x in g) for g in cone_generators]
    n = subspace.rank
    if not gens or any(not any(g) for g in gens):
        raise TorifolError("cone generators must be nonzero")
    if not is_strongly_convex(gens, n):
        raise NotStronglyConvex(f"generators {gens} span a cone containing a line")
    hrep = cone_hrep(gens, n)
    cons = list(hrep.constraints(strict=True))
    for a in subspace.annihilator_rows():
        cons.append((a, Fraction(0), EQ))
    w = feasible(cons, n)
    if w is None:
        return None
    return primitive_vector(w)


# ---------------------------------------------------------------------------
# Rational polyhedra given by generators
# ---------------------------------------------------------------------------

class RatPolyhedron:
    """conv(vertices) + cone(rays) in Q^n; H-description derived on demand."""

    __slots__ = ("rank", "vertices", "rays", "_hrep")

    def __init__(self, rank, vertices, rays=()):
        self.rank = rank
        verts = sorted({tuple(Fraction(x) for x in v) for v in vertices})
        if not verts:
            raise TorifolError("polyhedron needs at least one vertex generator")
        raylist = sorted({primitive_vector(r) for r in rays if any(Fraction(x) for x in r)})
        for v in verts:
            if len(v) != rank:
                raise TorifolError("vertex has wrong length")
        for r in raylist:
            if len(r) != rank:
                raise TorifolError("ray has wrong length")
        self.vertices = tuple(verts)
        self.rays = tuple(raylist)
        self._hrep = None

    @property
    def is_bounded(self):
        return not self.rays

    def hrep(self):
        """(equalities, inequalities) as ((vec, rhs), ...) with vec.x >= rhs."""
        if self._hrep is not None:
            return self._hrep
        nv, nr, n = len(self.vertices), len(self.rays), self.rank
        width = nv + nr + n
        cons = []
        for i in range(n):
            row = [Fraction(0)] * width
            for j, v in enumerate(self.vertices):
                row[j] = v[i]
            for j, r in enumerate(self.rays):
                row[nv + j] = Fraction(r[i])
            row[nv + nr + i] = Fraction(-1)
            cons.append((tuple(row), Fraction(0), EQ))
        row = [Fraction(0)] * width
        for j in range(nv):
            row[j] = Fraction(1)
        cons.append((tuple(row), Fraction(1), EQ))
        for j in range(nv + nr):
            unit = [Fraction(0)] * width
            unit[j] = Fraction(1)
            cons.append((tuple(unit), Fraction(0), GE))
        projected = project(cons, width, set(range(nv + nr, width)))
        if projected is None:
            raise TorifolError("polyhedron projection infeasible (internal error)")
        eqs, ineqs = [], []
        for c, b, rel in projected:
            vec = tuple(c[nv + nr:])
            if not any(vec) and b == 0:
                continue
            coeffs, rhs, _ = _normalize((vec, b, rel))
            (eqs if rel == EQ else ineqs).append((coeffs, rhs))
        self._hrep = (tuple(sorted(set(eqs))), tuple(sorted(set(ineqs))))
        # generators must satisfy the derived description
        for v in self.vertices:
            if not self.contains(v):
                raise TorifolError("H-description disagrees with generators")
        return self._hrep

    def contains(self, point):
        eqs, ineqs = self.hrep()
        p = tuple(Fraction(x) for x in point)
        return all(_dot(a, p) == b for a, b in eqs) and all(
            _dot(a, p) >= b for a, b in ineqs
        )

    def bounding_box(self):
        los = [min(v[i] for v in self.vertices) for i in range(self.rank)]
        his = [max(v[i] for v in self.vertices) for i in range(self.rank)]
        return los, his


def enumerate_lattice_points(poly: RatPolyhedron, bounded_check: bool = True):
    """All lattice points of a bounded polyhedron, lexicographically sorted."""
    if poly.rays:
        if bounded_check:
            raise UnboundedError("polyhedron has nonzero recession")
        raise UnboundedError("cannot enumerate an unbounded polyhedron")
    los, his = poly.bounding_box()
    ranges = [range(ceil(lo), floor(hi) + 1) for lo, hi in zip(los, his)]
    out = []
    for point in itertools.product(*ranges):
        if poly.contains(point):
            out.append(point)
    return out


# ---------------------------------------------------------------------------
# Simplicial-cone lattice helpers
# ---------------------------------------------------------------------------

def lattice_index(generators):
    """gcd of the maximal minors of the generator matrix (cone multiplicity)."""
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        return 1
    k, n = len(gens), len(gens[0])
    if k > n:
        raise TorifolError("more generators than ambient rank")
    g = 0
    for cols in itertools.combinations(range(n), k):
        sub = [[row[c] for c in cols] for row in gens]
        g = gcd(g, abs(_int_det(sub)))
    return g


def _int_det(mat):
    m = [[Fraction(x) for x in row] for row in mat]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = None
        for r in range(c, n):
            if m[r][c]:
                pivot = r
                break
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    num = det
    assert num.denominator == 1
    return int(num)


def parallelotope_lattice_points(generators, nvars):
    """Nonzero lattice points sum(t_i g_i), 0 <= t_i < 1, of an independent set."""
    gens = [tuple(int(x) for x in g) for g in generators]
    los = [sum(min(0, g[i]) for g in gens) for i in range(nvars)]
    his = [sum(max(0, g[i]) for g in gens) for i in range(nvars)]
    matrix_rows = [tuple(Fraction(g[i]) for g in gens) for i in range(nvars)]
    from .gaussian import solve_linear

    found = []
    for point in itertools.product(*[range(lo, hi + 1) for lo, hi in zip(los, his)]):
        if not any(point):
            continue
        t = solve_linear(matrix_rows, tuple(Fraction(x) for x in point))
        if t is None:
            continue
        if any(sum(ti * Fraction(g[i]) for ti, g in zip(t, gens)) != point[i]
               for i in range(nvars)):
            continue
        if all(0 <= ti < 1 for ti in t):
            found.append(tuple(point))
    return sorted(found)
