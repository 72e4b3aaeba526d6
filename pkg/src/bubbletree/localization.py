"""Exact circle-equivariant localization: Euler-class inversion, fixed-point
sums, boundary/link pairings, and the Spin(4) substitution and fiber
pushforward rules.

An admissible equivariant Euler class has an invertible leading term c*u^k
(2k = codimension) and a nilpotent remainder, so its inverse is a terminating
geometric series once a truncation degree is fixed.  Fixed-locus integration
is rule-driven: the caller supplies the value of each top-degree monomial on
the locus, and every other degree integrates to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact_algebra import (
    EquivariantLaurent,
    GradedPolynomial,
    GradedSymbol,
    Monomial,
    _mono_degree,
    _mono_str,
)


class LocalizationError(ValueError):
    pass


def euler_invert(E: EquivariantLaurent, top_degree: int) -> EquivariantLaurent:
    """Invert E = c*u^k*(1 + eta) where c is a nonzero rational and every
    monomial of eta carries positive cohomological degree.

    The geometric series for (1 + eta)^{-1} terminates after truncation at
    top_degree, and E * euler_invert(E) == 1 exactly (after truncation)."""
    if E.is_zero():
        raise LocalizationError("cannot invert the zero class")
    k = E.max_u_exponent()
    lead = E.coefficient(k)
    c = lead.constant_term()
    if c == 0:
        raise LocalizationError("vanishing leading coefficient")
    # eta = E/(c u^k) - 1 must be nilpotent: all monomials of positive degree
    eta = E.shift(-k).scale(Fraction(1, 1) / c) - 1
    for _exp, p in eta.items():
        if p.constant_term() != 0:
            raise LocalizationError("non-nilpotent remainder beyond the leading term")
    inv = EquivariantLaurent.constant(1)
    power = EquivariantLaurent.constant(1)
    j = 1
    while True:
        power = (power * eta).truncate(top_degree)
        if power.is_zero():
            break
        inv = inv + power.scale(Fraction((-1) ** j))
        j += 1
    return inv.shift(-k).scale(Fraction(1, 1) / c).truncate(top_degree)


@dataclass(frozen=True)
class FixedLocusDatum:
    """One fixed component: its dimension, the restricted class, the
    equivariant Euler class of its normal bundle, rule-based integration
    over it, and an orbifold multiplicity."""

    name: str
    dimension: int
    restricted_class: EquivariantLaurent
    euler_class: EquivariantLaurent
    integration_rules: Mapping[Monomial, GradedPolynomial | Fraction] = field(
        default_factory=dict
    )
    multiplicity: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.dimension < 0 or self.dimension % 2:
            raise LocalizationError(f"{self.name}: dimension must be even and >= 0")


def integrate_over_locus(datum: FixedLocusDatum, series: EquivariantLaurent) -> EquivariantLaurent:
    """Integrate every u-coefficient over the locus: degree-0 symbols factor
    through, the positive-degree part must have exactly the locus dimension
    and is looked up in the integration rules; lower degrees integrate to
    zero and a reachable top-degree monomial without a rule is an error."""
    out = EquivariantLaurent.zero()
    for u_exp, poly in series.items():
        for mono, coeff in poly.terms():
            scalar_part = tuple((s, e) for s, e in mono if s.degree == 0)
            geom_part = tuple((s, e) for s, e in mono if s.degree > 0)
            deg = _mono_degree(geom_part)
            if deg != datum.dimension:
                continue
            if datum.dimension == 0:
                value: GradedPolynomial | Fraction = Fraction(1)
            elif geom_part in datum.integration_rules:
                value = datum.integration_rules[geom_part]
            else:
                raise LocalizationError(
                    f"{datum.name}: no integration rule for top-degree monomial "
                    f"{_mono_str(geom_part) or '1'}"
                )
            if not isinstance(value, GradedPolynomial):
                value = GradedPolynomial.constant(Fraction(value))
            term = GradedPolynomial.monomial(scalar_part, coeff) * value
            if not term.is_zero():
                out = out + EquivariantLaurent({u_exp: term})
    return out


def localize_sum(
    loci: Sequence[FixedLocusDatum], top_degree: int | None = None
) -> EquivariantLaurent:
    """Fixed-point sum: sum_i multiplicity_i * integral_i(gamma_i / E_i),
    returned as a full Laurent series in u.

    The truncation degree defaults to each locus's dimension."""
    total = EquivariantLaurent.zero()
    for datum in loci:
        deg = datum.dimension if top_degree is None else top_degree
        inv = euler_invert(datum.euler_class, deg)
        integrand = (datum.restricted_class * inv).truncate(deg)
        total = total + integrate_over_locus(datum, integrand).scale(datum.multiplicity)
    return total


def _check_degree_two(gamma: EquivariantLaurent, name: str) -> None:
    for u_exp, poly in gamma.items():
        for mono, _c in poly.terms():
            if 2 * u_exp + _mono_degree(mono) != 2:
                raise LocalizationError(f"{name}: class is not of pure degree 2")


def boundary_pairing(
    loci: Sequence[FixedLocusDatum],
    m: int,
    gamma: EquivariantLaurent | None = None,
) -> GradedPolynomial:
    """Link pairing around the fixed set of a 2m-dimensional model:
    sum_i integral_i(gamma_i^{m-1} u / E_i).

    gamma must be an equivariant class of degree 2 (mu + f*u); when omitted,
    each locus's restricted_class is used as gamma_i.  A degree count shows
    every locus contributes only at u^0, so the u^0 coefficient is returned.

    The boundary-side picture (the invariant form descended to the quotient
    of the link) is never constructed as a differential form; this
    fixed-locus sum is taken as the defining computation of the pairing.
    """
    if m < 1:
        raise LocalizationError("half-dimension m must be >= 1")
    total = EquivariantLaurent.zero()
    for datum in loci:
        g = gamma if gamma is not None else datum.restricted_class
        _check_degree_two(g, datum.name)
        deg = datum.dimension
        inv = euler_invert(datum.euler_class, deg)
        integrand = ((g ** (m - 1)).shift(1) * inv).truncate(deg)
        total = total + integrate_over_locus(datum, integrand).scale(datum.multiplicity)
    return total.coefficient(0)


# ---------------------------------------------------------------------------
# Spin(4) substitution and pushforward along the fiber
# ---------------------------------------------------------------------------

C_L = GradedSymbol("c_L", 4)
C_R = GradedSymbol("c_R", 4)


def spin_substitute(p: GradedPolynomial, p1_name: str = "p1", e_name: str = "e") -> GradedPolynomial:
    """Rewrite in Spin(4) generators: p1 -> -2(c_R + c_L), e -> c_L - c_R,
    so that p1 + 2e -> -4 c_R and p1 - 2e -> -4 c_L."""
    cl = GradedPolynomial.symbol(C_L)
    cr = GradedPolynomial.symbol(C_R)
    return p.substitute({p1_name: (cr + cl).scale(-2), e_name: cl - cr})


@dataclass(frozen=True)
class PushforwardRules:
    """Fiber integration of powers of the degree-4 class p1 along a fiber of
    dimension 8r-8: a table power -> class on the base; powers above 2r-1
    vanish for degree reasons, and powers without an entry are an error."""

    r: int
    table: Mapping[int, GradedPolynomial]
    p1_name: str = "p1"

    def __post_init__(self) -> None:
        if self.r < 1:
            raise LocalizationError("pushforward fiber level r must be >= 1")

    def value(self, power: int) -> GradedPolynomial:
        if power > 2 * self.r - 1:
            return GradedPolynomial.zero()
        if power in self.table:
            return self.table[power]
        raise LocalizationError(
            f"p1 power {power} has no pushforward rule and no zero declaration"
        )


def standard_pushforward(
    r: int,
    sigma: int,
    A: GradedSymbol,
    B_L: GradedSymbol,
    B_R: GradedSymbol,
    e_symbol: GradedSymbol,
) -> PushforwardRules:
    """The table forced by degree counting on an 8r-8 fiber: p1^{2(r-1)}
    integrates to A; p1^{2r-1} to B_R(2e+3*sigma) + B_L(2e-3*sigma); lower
    powers vanish (their degree is below the fiber dimension)."""
    e = GradedPolynomial.symbol(e_symbol)
    b_r = GradedPolynomial.symbol(B_R)
    b_l = GradedPolynomial.symbol(B_L)
    table: dict[int, GradedPolynomial] = {
        s: GradedPolynomial.zero() for s in range(0, max(2 * r - 2, 0))
    }
    table[2 * (r - 1)] = GradedPolynomial.symbol(A)
    table[2 * r - 1] = b_r * (e.scale(2) + 3 * sigma) + b_l * (e.scale(2) - 3 * sigma)
    return PushforwardRules(r, table)


def apply_pushforward(p: GradedPolynomial, rules: PushforwardRules) -> GradedPolynomial:
    """Replace each p1-power via the rules; the cofactor of each power must
    itself be free of p1."""
    by_power: dict[int, GradedPolynomial] = {}
    for mono, coeff in p.terms():
        power = 0
        rest = []
        for s, e in mono:
            if s.name == rules.p1_name:
                power = e
            else:
                rest.append((s, e))
        by_power.setdefault(power, GradedPolynomial.zero())
        by_power[power] = by_power[power] + GradedPolynomial.monomial(rest, coeff)
    out = GradedPolynomial.zero()
    for power, cofactor in sorted(by_power.items()):
        out = out + cofactor * rules.value(power)
    return out
