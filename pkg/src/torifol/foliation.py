"""Complex subspaces W of N_C over the Gaussian rationals and the toric
foliated pairs they define."""

from __future__ import annotations

from fractions import Fraction

from .divisor import support_function
from .errors import TorifolError
from .fan import Fan
from .gaussian import (
    GaussRat,
    RatSubspace,
    apply_rows,
    gauss_vec,
    in_row_space,
    quotient_projection,
    real_trace_subspace,
    rref,
)


class GaussianSubspace:
    """A subspace W of C^n spanned by vectors with Gaussian-rational entries.

    The stored basis is the canonical reduced row echelon form, and the
    rational trace V (the rational vectors lying in W) is precomputed.
    """

    __slots__ = ("rank", "basis", "pivots", "trace")

    def __init__(self, rank: int, vectors=()):
        self.rank = rank
        vecs = [gauss_vec(v) for v in vectors]
        for v in vecs:
            if len(v) != rank:
                raise TorifolError("subspace vector has wrong length")
        rows, pivots = rref(vecs) if vecs else ((), ())
        self.basis = rows
        self.pivots = pivots
        self.trace = real_trace_subspace(rank, rows)

    @classmethod
    def full(cls, rank):
        eye = []
        for k in range(rank):
            row = [GaussRat(0)] * rank
            row[k] = GaussRat(1)
            eye.append(tuple(row))
        return cls(rank, eye)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec) -> bool:
        v = gauss_vec(vec)
        if len(v) != self.rank:
            raise TorifolError("vector has wrong length")
        return in_row_space(self.basis, self.pivots, v)

    def intersection(self, other: "GaussianSubspace") -> "GaussianSubspace":
        """W1 cap W2, computed from the joint annihilator."""
        if self.rank != other.rank:
            raise TorifolError("ambient ranks differ")
        from .gaussian import kernel_basis

        anns = []
        for space in (self, other):
            if space.basis:
                anns.extend(kernel_basis(space.basis))
            else:
                anns.extend(GaussianSubspace.full(space.rank).basis)
        if not anns:
            return GaussianSubspace.full(self.rank)
        return GaussianSubspace(self.rank, kernel_basis(anns))

    def __eq__(self, other):
        return (
            isinstance(other, GaussianSubspace)
            and self.rank == other.rank
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.rank, self.basis))

    def __repr__(self):
        return f"GaussianSubspace(rank={self.rank}, dim={self.dim})"


def is_algebraically_integrable(W: GaussianSubspace) -> bool:
    """True when W is the complex span of its lattice points."""
    return W.trace.dim == W.dim


def quotient_foliation(W: GaussianSubspace, U: RatSubspace):
    """Quotient by a rational subspace U with U_C contained in W.

    Returns (projection_rows, quotient_subspace): an integer projection
    matrix whose kernel lattice is U's lattice points (Hermite-canonical,
    hence deterministic) and the image of W in the quotient.
    """
    if U.rank != W.rank:
        raise TorifolError("ambient ranks differ")
    for row in U.rows:
        if not W.contains(row):
            raise TorifolError("U is not contained in W")
    proj = quotient_projection(W.rank, U.rows)
    new_rank = len(proj)
    images = []
    for w in W.basis:
        re = apply_rows(proj, tuple(e.re for e in w))
        im = apply_rows(proj, tuple(e.im for e in w))
        images.append(tuple(GaussRat(a, b) for a, b in zip(re, im)))
    quotient = GaussianSubspace(new_rank, images)
    if quotient.dim != W.dim - U.dim:
        raise TorifolError("quotient dimension mismatch (internal error)")
    return proj, quotient


class ToricFoliatedPair:
    """A fan, a Gaussian subspace W, and a rational invariant boundary.

    Construction fails unless K+Delta admits a support function, so every
    pair in circulation is Q-Cartier.
    """

    __slots__ = ("fan", "W", "delta", "iota", "support")

    def __init__(self, fan: Fan, W: GaussianSubspace, delta=None):
        if fan.rank != W.rank:
            raise TorifolError("fan and subspace have different ambient ranks")
        self.fan = fan
        self.W = W
        d = {int(k): Fraction(v) for k, v in (delta or {}).items()}
        for k, v in d.items():
            if not (0 <= k < len(fan.rays)):
                raise TorifolError(f"delta references unknown ray index {k}")
        self.delta = {k: v for k, v in sorted(d.items()) if v != 0}
        self.iota = tuple(
            1 if W.contains(r) else 0 for r in fan.rays
        )
        self.support = support_function(fan, self.log_divisor())

    def ray_iota(self, ray_index: int) -> int:
        """1 when the ray lies in W (its divisor is non-invariant), else 0."""
        if not (0 <= ray_index < len(self.fan.rays)):
            raise TorifolError(f"unknown ray index {ray_index}")
        return self.iota[ray_index]

    def canonical_divisor(self):
        """Coefficients of the canonical divisor: -1 on rays inside W."""
        return {
            i: Fraction(-1) if self.iota[i] else Fraction(0)
            for i in range(len(self.fan.rays))
        }

    def log_divisor(self):
        """Coefficients of K + Delta."""
        can = self.canonical_divisor()
        return {
            i: can[i] + self.delta.get(i, Fraction(0))
            for i in range(len(self.fan.rays))
        }

    def delta_is_effective(self) -> bool:
        return all(v >= 0 for v in self.delta.values())

    def with_fan(self, fan: Fan, delta=None):
        return ToricFoliatedPair(fan, GaussianSubspace(fan.rank, self.W.basis), delta)

    def __repr__(self):
        return f"ToricFoliatedPair({self.fan!r}, dim W={self.W.dim})"


def ray_iota(pair: ToricFoliatedPair, ray_index: int) -> int:
    return pair.ray_iota(ray_index)


def canonical_divisor(pair: ToricFoliatedPair):
    return pair.canonical_divisor()
