"""Exact arithmetic core: graded polynomials and Laurent series in u.

Every scalar is an arbitrary-precision rational (`Rational`, backed by
``fractions.Fraction``).  A `GradedPolynomial` is a finite sum of monomials in
`GradedSymbol`s of even cohomological degree; an `EquivariantLaurent` is a
finite Laurent series in a distinguished degree-2 variable ``u`` whose
coefficients are graded polynomials.  All values are immutable after
construction; nothing here uses floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json
import re
from typing import Iterable, Mapping, Union

Rational = Fraction

ScalarLike = Union[int, Fraction]


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GradedSymbol:
    """A named formal class of even non-negative cohomological degree."""

    name: str
    degree: int

    def __post_init__(self) -> None:
        if not self.name or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", self.name):
            raise AlgebraError(f"bad symbol name {self.name!r}")
        if self.name == "u":
            raise AlgebraError("'u' is reserved for the Laurent variable")
        if self.degree < 0 or self.degree % 2 != 0:
            raise AlgebraError(
                f"symbol {self.name!r}: degree must be even and >= 0, got {self.degree}"
            )

    def __str__(self) -> str:
        return self.name


def sym(name: str, degree: int) -> GradedSymbol:
    return GradedSymbol(name, degree)


# A monomial is a tuple of (symbol, exponent) pairs, sorted by symbol name,
# with strictly positive exponents.  The empty tuple is the unit monomial.
Monomial = tuple

_ONE: Monomial = ()


def _mono_make(pairs: Iterable[tuple[GradedSymbol, int]]) -> Monomial:
    acc: dict[GradedSymbol, int] = {}
    for s, e in pairs:
        if e < 0:
            raise AlgebraError(f"negative exponent for {s.name}")
        if e:
            acc[s] = acc.get(s, 0) + e
    names = {}
    for s in acc:
        if s.name in names and names[s.name] != s.degree:
            raise AlgebraError(f"symbol {s.name!r} used with two degrees")
        names[s.name] = s.degree
    return tuple(sorted(acc.items(), key=lambda kv: kv[0].name))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return _mono_make(list(a) + list(b))


def _mono_degree(m: Monomial) -> int:
    return sum(s.degree * e for s, e in m)


def _mono_str(m: Monomial) -> str:
    return "*".join(s.name if e == 1 else f"{s.name}^{e}" for s, e in m)


class GradedPolynomial:
    """Multivariate polynomial over `Rational` with graded symbols.

    Terms are stored as a mapping monomial -> nonzero coefficient, and compared
    structurally; a canonical sorted order makes equal polynomials print
    identically.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, ScalarLike] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = c
        object.__setattr__(self, "_terms", clean)

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero() -> "GradedPolynomial":
        return GradedPolynomial()

    @staticmethod
    def constant(c: ScalarLike) -> "GradedPolynomial":
        return GradedPolynomial({_ONE: Fraction(c)})

    @staticmethod
    def symbol(s: GradedSymbol, exp: int = 1, coeff: ScalarLike = 1) -> "GradedPolynomial":
        return GradedPolynomial({_mono_make([(s, exp)]): Fraction(coeff)})

    @staticmethod
    def monomial(pairs: Iterable[tuple[GradedSymbol, int]], coeff: ScalarLike = 1) -> "GradedPolynomial":
        return GradedPolynomial({_mono_make(pairs): Fraction(coeff)})

    # -- inspection ---------------------------------------------------
    def terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: (_mono_degree(kv[0]), _mono_str(kv[0])))

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get(_ONE, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self._terms)

    def degree(self) -> int:
        """Largest monomial degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(_mono_degree(m) for m in self._terms)

    def min_degree(self) -> int:
        if not self._terms:
            return -1
        return min(_mono_degree(m) for m in self._terms)

    def homogeneous_part(self, degree: int) -> "GradedPolynomial":
        return GradedPolynomial(
            {m: c for m, c in self._terms.items() if _mono_degree(m) == degree}
        )

    def symbols(self) -> set[GradedSymbol]:
        return {s for m in self._terms for s, _ in m}

    # -- ring operations ----------------------------------------------
    def __add__(self, other: "GradedPolynomial | ScalarLike") -> "GradedPolynomial":
        other = _as_poly(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return GradedPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "GradedPolynomial":
        return GradedPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "GradedPolynomial | ScalarLike") -> "GradedPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other: ScalarLike) -> "GradedPolynomial":
        return _as_poly(other) - self

    def __mul__(self, other: "GradedPolynomial | ScalarLike") -> "GradedPolynomial":
        other = _as_poly(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return GradedPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GradedPolynomial":
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        out = GradedPolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c: ScalarLike) -> "GradedPolynomial":
        c = Fraction(c)
        return GradedPolynomial({m: cc * c for m, cc in self._terms.items()})

    def substitute(self, mapping: Mapping[str, "GradedPolynomial"]) -> "GradedPolynomial":
        """Replace symbols (by name) with polynomials; a ring homomorphism."""
        out = GradedPolynomial.zero()
        for m, c in self._terms.items():
            term = GradedPolynomial.constant(c)
            for s, e in m:
                rep = mapping.get(s.name)
                term = term * (rep**e if rep is not None else GradedPolynomial.symbol(s, e))
            out = out + term
        return out

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = GradedPolynomial.constant(other)
        if not isinstance(other, GradedPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms()))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"GradedPolynomial({poly_to_text(self)!r})"


def _as_poly(x: "GradedPolynomial | ScalarLike") -> GradedPolynomial:
    if isinstance(x, GradedPolynomial):
        return x
    return GradedPolynomial.constant(x)


def poly_truncate(p: GradedPolynomial, top_degree: int) -> GradedPolynomial:
    """Drop every monomial of degree > top_degree (vanishing above the
    real dimension of the ambient space)."""
    if top_degree < 0:
        raise AlgebraError("top_degree must be >= 0")
    return GradedPolynomial(
        {m: c for m, c in p._terms.items() if _mono_degree(m) <= top_degree}
    )


class EquivariantLaurent:
    """Finite Laurent series in u (deg u = 2) with polynomial coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, GradedPolynomial | ScalarLike] | None = None):
        clean: dict[int, GradedPolynomial] = {}
        for k, p in (coeffs or {}).items():
            p = _as_poly(p)
            if not p.is_zero():
                clean[int(k)] = p
        object.__setattr__(self, "_coeffs", clean)

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero() -> "EquivariantLaurent":
        return EquivariantLaurent()

    @staticmethod
    def constant(c: ScalarLike) -> "EquivariantLaurent":
        return EquivariantLaurent({0: GradedPolynomial.constant(c)})

    @staticmethod
    def from_poly(p: GradedPolynomial, u_exp: int = 0) -> "EquivariantLaurent":
        return EquivariantLaurent({u_exp: p})

    @staticmethod
    def u(exp: int = 1, coeff: ScalarLike = 1) -> "EquivariantLaurent":
        return EquivariantLaurent({exp: GradedPolynomial.constant(coeff)})

    # -- inspection ---------------------------------------------------
    def coefficient(self, u_exp: int) -> GradedPolynomial:
        return self._coeffs.get(u_exp, GradedPolynomial.zero())

    def items(self) -> list[tuple[int, GradedPolynomial]]:
        return sorted(self._coeffs.items())

    def u_exponents(self) -> list[int]:
        return sorted(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def max_u_exponent(self) -> int:
        if not self._coeffs:
            raise AlgebraError("zero series has no leading term")
        return max(self._coeffs)

    # -- operations ---------------------------------------------------
    def __add__(self, other: "EquivariantLaurent | ScalarLike") -> "EquivariantLaurent":
        other = _as_laurent(other)
        out = dict(self._coeffs)
        for k, p in other._coeffs.items():
            out[k] = out.get(k, GradedPolynomial.zero()) + p
        return EquivariantLaurent(out)

    __radd__ = __add__

    def __neg__(self) -> "EquivariantLaurent":
        return EquivariantLaurent({k: -p for k, p in self._coeffs.items()})

    def __sub__(self, other: "EquivariantLaurent | ScalarLike") -> "EquivariantLaurent":
        return self + (-_as_laurent(other))

    def __rsub__(self, other: ScalarLike) -> "EquivariantLaurent":
        return _as_laurent(other) - self

    def __mul__(self, other: "EquivariantLaurent | GradedPolynomial | ScalarLike") -> "EquivariantLaurent":
        if isinstance(other, GradedPolynomial):
            other = EquivariantLaurent.from_poly(other)
        other = _as_laurent(other)
        out: dict[int, GradedPolynomial] = {}
        for k1, p1 in self._coeffs.items():
            for k2, p2 in other._coeffs.items():
                k = k1 + k2
                prod = p1 * p2
                out[k] = out.get(k, GradedPolynomial.zero()) + prod
        return EquivariantLaurent(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "EquivariantLaurent":
        if n < 0:
            raise AlgebraError("negative power; use euler_invert for inverses")
        out = EquivariantLaurent.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, c: ScalarLike) -> "EquivariantLaurent":
        return EquivariantLaurent({k: p.scale(c) for k, p in self._coeffs.items()})

    def shift(self, u_exp: int) -> "EquivariantLaurent":
        """Multiply by u^u_exp."""
        return EquivariantLaurent({k + u_exp: p for k, p in self._coeffs.items()})

    def truncate(self, top_degree: int) -> "EquivariantLaurent":
        """Coefficient-wise poly_truncate (u-power is not counted)."""
        return EquivariantLaurent(
            {k: poly_truncate(p, top_degree) for k, p in self._coeffs.items()}
        )

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = EquivariantLaurent.constant(other)
        if isinstance(other, GradedPolynomial):
            other = EquivariantLaurent.from_poly(other)
        if not isinstance(other, EquivariantLaurent):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(tuple((k, p) for k, p in self.items()))

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __repr__(self) -> str:
        return f"EquivariantLaurent({laurent_to_text(self)!r})"


def _as_laurent(x: "EquivariantLaurent | ScalarLike") -> EquivariantLaurent:
    if isinstance(x, EquivariantLaurent):
        return x
    return EquivariantLaurent.constant(x)


def laurent_mul(a: EquivariantLaurent, b: EquivariantLaurent, top_degree: int) -> EquivariantLaurent:
    """Distributive product, coefficient-wise truncated at top_degree."""
    return (a * b).truncate(top_degree)


def constant_u_term(a: EquivariantLaurent) -> GradedPolynomial:
    """Coefficient of u^0."""
    return a.coefficient(0)


# ---------------------------------------------------------------------------
# canonical text form
# ---------------------------------------------------------------------------


def _term_text(c: Fraction, m: Monomial, u_exp: int) -> str:
    factors = []
    ms = _mono_str(m)
    if u_exp:
        us = "u" if u_exp == 1 else f"u^{u_exp}"
    else:
        us = ""
    body = "*".join(x for x in (ms, us) if x)
    if not body:
        return str(c)
    if c == 1:
        return body
    if c == -1:
        return f"-{body}"
    return f"{c}*{body}"


def poly_to_text(p: GradedPolynomial) -> str:
    if p.is_zero():
        return "0"
    parts = [_term_text(c, m, 0) for m, c in p.terms()]
    return _join_terms(parts)


def laurent_to_text(a: EquivariantLaurent) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for k in sorted(a._coeffs, reverse=True):
        for m, c in a._coeffs[k].terms():
            parts.append(_term_text(c, m, k))
    return _join_terms(parts)


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for t in parts[1:]:
        if t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


class TextParseError(AlgebraError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _tokenize(s: str) -> list[tuple[str, str, int]]:
    toks = []
    i = 0
    while i < len(s):
        m = _TOKEN.match(s, i)
        if not m:
            if s[i:].strip():
                raise TextParseError(f"unexpected character {s[i]!r}", i)
            break
        if m.group("num"):
            toks.append(("num", m.group("num"), m.start()))
        elif m.group("name"):
            toks.append(("name", m.group("name"), m.start()))
        else:
            toks.append(("op", m.group("op"), m.start()))
        i = m.end()
    return toks


def laurent_from_text(s: str, symbols: Mapping[str, int]) -> EquivariantLaurent:
    """Parse the canonical text form.  `symbols` maps symbol name -> degree."""
    toks = _tokenize(s)
    if not toks:
        raise TextParseError("empty expression", 0)
    out = EquivariantLaurent.zero()
    i = 0
    n = len(toks)

    def parse_term(i: int) -> tuple[EquivariantLaurent, int]:
        sign = Fraction(1)
        while i < n and toks[i][0] == "op" and toks[i][1] in "+-":
            if toks[i][1] == "-":
                sign = -sign
            i += 1
        coeff = sign
        mono: list[tuple[GradedSymbol, int]] = []
        u_exp = 0
        expect_factor = True
        while i < n:
            kind, val, pos = toks[i]
            if kind == "num":
                coeff *= Fraction(val)
                i += 1
            elif kind == "name":
                exp = 1
                j = i + 1
                if j < n and toks[j][:2] == ("op", "^"):
                    j += 1
                    neg = False
                    if j < n and toks[j][:2] == ("op", "-"):
                        neg = True
                        j += 1
                    if j >= n or toks[j][0] != "num" or "/" in toks[j][1]:
                        raise TextParseError("expected integer exponent", pos)
                    exp = int(toks[j][1]) * (-1 if neg else 1)
                    j += 1
                if val == "u":
                    u_exp += exp
                else:
                    if val not in symbols:
                        raise TextParseError(f"unknown symbol {val!r}", pos)
                    if exp < 0:
                        raise TextParseError("negative power of a graded symbol", pos)
                    mono.append((GradedSymbol(val, symbols[val]), exp))
                i = j
            else:
                break
            expect_factor = False
            if i < n and toks[i][:2] == ("op", "*"):
                i += 1
                expect_factor = True
        if expect_factor:
            raise TextParseError("dangling operator", toks[min(i, n - 1)][2])
        term = EquivariantLaurent({u_exp: GradedPolynomial.monomial(mono, coeff)})
        return term, i

    first = True
    while i < n:
        if not first:
            if toks[i][0] != "op" or toks[i][1] not in "+-":
                raise TextParseError("expected '+' or '-'", toks[i][2])
        term, i = parse_term(i)
        out = out + term
        first = False
    return out


def poly_from_text(s: str, symbols: Mapping[str, int]) -> GradedPolynomial:
    lau = laurent_from_text(s, symbols)
    for k in lau.u_exponents():
        if k != 0:
            raise TextParseError("'u' not allowed in a plain polynomial", 0)
    return constant_u_term(lau)


# ---------------------------------------------------------------------------
# JSON term-list form
# ---------------------------------------------------------------------------


def laurent_to_json(a: EquivariantLaurent) -> dict:
    symbols: dict[str, int] = {}
    terms = []
    for k in sorted(a._coeffs, reverse=True):
        for m, c in a._coeffs[k].terms():
            for s, _ in m:
                symbols[s.name] = s.degree
            terms.append(
                {
                    "u": k,
                    "coeff": str(c),
                    "monomial": {s.name: e for s, e in m},
                }
            )
    return {"schema": 1, "symbols": dict(sorted(symbols.items())), "terms": terms}


def laurent_from_json(data: dict) -> EquivariantLaurent:
    if data.get("schema") != 1:
        raise AlgebraError("unsupported schema")
    known = {"schema", "symbols", "terms"}
    extra = set(data) - known
    if extra:
        raise AlgebraError(f"unknown fields: {sorted(extra)}")
    degs = {str(k): int(v) for k, v in data.get("symbols", {}).items()}
    out = EquivariantLaurent.zero()
    for t in data.get("terms", []):
        mono = [
            (GradedSymbol(name, degs[name]), int(e))
            for name, e in t.get("monomial", {}).items()
        ]
        out = out + EquivariantLaurent(
            {int(t.get("u", 0)): GradedPolynomial.monomial(mono, Fraction(t["coeff"]))}
        )
    return out


def poly_to_json(p: GradedPolynomial) -> dict:
    return laurent_to_json(EquivariantLaurent.from_poly(p))


def poly_from_json(data: dict) -> GradedPolynomial:
    return constant_u_term(laurent_from_json(data))


def laurent_json_text(a: EquivariantLaurent) -> str:
    return json.dumps(laurent_to_json(a), sort_keys=True)
