"""Support functions of Q-Cartier invariant divisors and the per-ray
discrepancy oracle."""

from __future__ import annotations

from fractions import Fraction

from .errors import NotQCartier, TorifolError
from .fan import Fan
from .gaussian import solve_linear, vec_gcd


class SupportFunction:
    """Piecewise-linear function on |fan|, one linear functional per
    maximal cone, determined by its values -a_rho at the ray generators."""

    __slots__ = ("fan", "functionals")

    def __init__(self, fan: Fan, functionals):
        self.fan = fan
        self.functionals = dict(functionals)

    def value(self, u):
        """phi(u) for u in the support; raises outside."""
        cone = self.fan.max_cone_containing(u)
        if cone is None:
            raise TorifolError(f"{tuple(u)} lies outside the support of the fan")
        m = self.functionals[cone]
        return sum(Fraction(a) * Fraction(x) for a, x in zip(m, u))

    def restricted_to_zero(self, cone) -> bool:
        """True when phi vanishes identically on the given cone."""
        return all(self.value(self.fan.rays[i]) == 0 for i in cone)


def support_function(fan: Fan, divisor) -> SupportFunction:
    """Solve for the per-cone functionals of a torus-invariant divisor.

    ``divisor`` maps ray index -> coefficient a_rho; missing keys are 0.
    The functional m of each maximal cone satisfies <m, v_rho> = -a_rho on
    the cone's rays; inconsistency raises NotQCartier with the witness cone.
    Underdetermined cones take the canonical solution with free variables 0,
    and agreement across shared faces is verified globally.
    """
    coeffs = {int(k): Fraction(v) for k, v in dict(divisor).items()}
    for k in coeffs:
        if not (0 <= k < len(fan.rays)):
            raise TorifolError(f"divisor references unknown ray index {k}")
    functionals = {}
    for cone in fan.max_cones:
        rows = [tuple(Fraction(x) for x in fan.rays[i]) for i in cone]
        rhs = tuple(-coeffs.get(i, Fraction(0)) for i in cone)
        if not rows:
            functionals[cone] = tuple(Fraction(0) for _ in range(fan.rank))
            continue
        m = solve_linear(rows, rhs)
        if m is None:
            raise NotQCartier(cone)
        functionals[cone] = m
    sf = SupportFunction(fan, functionals)
    # face agreement: any two maximal cones must induce the same values on
    # every ray of their common face
    for i, a in enumerate(fan.max_cones):
        for b in fan.max_cones[i + 1:]:
            for r in set(a) & set(b):
                va = _pair(functionals[a], fan.rays[r])
                vb = _pair(functionals[b], fan.rays[r])
                if va != vb:
                    raise NotQCartier(a, "support function disagrees on a shared face")
    return sf


def _pair(m, v):
    return sum(Fraction(a) * Fraction(x) for a, x in zip(m, v))


def evaluate_phi(sf: SupportFunction, u) -> Fraction:
    return sf.value(u)


def discrepancy_at(pair, u):
    """(discrepancy, iota) of the divisor extracted by star subdivision at u.

    ``u`` must be a primitive lattice vector in the support of the fan.
    iota is 1 exactly when u lies in W; the discrepancy is
    phi_{K+Delta}(u) - iota.
    """
    u = tuple(int(x) for x in u)
    if not any(u):
        raise TorifolError("discrepancy undefined at the zero vector")
    if vec_gcd(u) != 1:
        raise TorifolError(f"{u} is not primitive")
    phi = pair.support.value(u)
    iota = 1 if pair.W.contains(u) else 0
    return (phi - iota, iota)
