"""Exact sparse multivariate polynomials over the rationals.

A :class:`MultiPoly` stores a map ``exponent vector -> Fraction`` where the
exponent vector is aligned with a sorted tuple of indeterminate names.  The
fixed global name order is ``d < l < m < parameters`` (``d``, ``l``, ``m``
render the operators usually written as del, lambda, mu) with parameters
ordered alphabetically.  Indeterminates listed as *units* may carry negative
(Laurent) exponents; everything else is an ordinary polynomial variable.

:class:`ParamPoly` is the same structure with :class:`LinearForm` values: each
coefficient is an affine expression in named :class:`Unknown` symbols.  It is
the raw material of every linear solve in this package; multiplying two
ParamPolys is forbidden because it would leave the linear regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]


class PolyError(Exception):
    pass


class ParseError(PolyError):
    pass


class UnitSubstitutionError(PolyError):
    """Raised when a non-invertible value is substituted into a unit variable."""


class NonlinearCombinationError(PolyError):
    """Raised when an operation would produce terms quadratic in unknowns."""


_HEAD = {"d": 0, "l": 1, "m": 2}


def _vkey(name: str) -> tuple:
    return (_HEAD.get(name, 3), name)


def _as_frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected rational scalar, got {type(x).__name__}")


_ALIGN_CACHE: dict = {}


def _align(avars: tuple, bvars: tuple):
    """Return (vars, amap, bmap) embedding both variable tuples into their union.

    ``amap``/``bmap`` are index maps (or None when no remap is needed).
    """
    if avars == bvars:
        return avars, None, None
    key = (avars, bvars)
    hit = _ALIGN_CACHE.get(key)
    if hit is not None:
        return hit
    merged = tuple(sorted(set(avars) | set(bvars), key=_vkey))
    amap = tuple(merged.index(v) for v in avars)
    bmap = tuple(merged.index(v) for v in bvars)
    out = (merged, None if amap == tuple(range(len(merged))) else amap,
           None if bmap == tuple(range(len(merged))) else bmap)
    _ALIGN_CACHE[key] = out
    return out


def _remap(terms: dict, vmap, width: int) -> dict:
    if vmap is None:
        return terms
    out = {}
    for exps, c in terms.items():
        e = [0] * width
        for pos, val in zip(vmap, exps):
            e[pos] = val
        out[tuple(e)] = c
    return out


class MultiPoly:
    """Sparse exact-rational polynomial, optionally Laurent in unit variables."""

    __slots__ = ("vars", "terms", "units")

    def __init__(self, vars: tuple = (), terms: Mapping = None, units: Iterable[str] = ()):
        terms = dict(terms or {})
        units = frozenset(units)
        # trim unused variables and zero coefficients for structural equality
        terms = {e: _as_frac(c) for e, c in terms.items() if c != 0}
        used = [False] * len(vars)
        for exps in terms:
            for k, e in enumerate(exps):
                if e:
                    used[k] = True
        if not all(used):
            keep = [k for k, u in enumerate(used) if u]
            vars = tuple(vars[k] for k in keep)
            terms = {tuple(e[k] for k in keep): c for e, c in terms.items()}
        for exps in terms:
            for name, e in zip(vars, exps):
                if e < 0 and name not in units:
                    raise PolyError(f"negative exponent on non-unit variable {name!r}")
        self.vars = tuple(vars)
        self.terms = terms
        self.units = units

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(units: Iterable[str] = ()) -> "MultiPoly":
        return MultiPoly((), {}, units)

    @staticmethod
    def const(c: Scalar, units: Iterable[str] = ()) -> "MultiPoly":
        c = _as_frac(c)
        return MultiPoly((), {(): c} if c else {}, units)

    @staticmethod
    def var(name: str, exp: int = 1, units: Iterable[str] = ()) -> "MultiPoly":
        if exp < 0 and name not in units:
            raise PolyError(f"negative exponent on non-unit variable {name!r}")
        return MultiPoly((name,), {(exp,): Fraction(1)}, units)

    @staticmethod
    def monomial(powers: Mapping[str, int], coeff: Scalar = 1, units: Iterable[str] = ()) -> "MultiPoly":
        names = tuple(sorted((n for n, e in powers.items() if e), key=_vkey))
        exps = tuple(powers[n] for n in names)
        return MultiPoly(names, {exps: _as_frac(coeff)}, units)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.vars

    def constant_value(self) -> Fraction:
        if self.vars:
            raise PolyError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def total_degree(self) -> int:
        """Largest sum of exponents over all terms (0 for the zero polynomial)."""
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        if name not in self.vars:
            return 0
        k = self.vars.index(name)
        return max((e[k] for e in self.terms), default=0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    __hash__ = None  # mutable dict inside; structural equality only

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if isinstance(other, ParamPoly):
            return NotImplemented
        if not isinstance(other, MultiPoly):
            return NotImplemented
        vars, amap, bmap = _align(self.vars, other.vars)
        terms = dict(_remap(self.terms, amap, len(vars)))
        for e, c in _remap(other.terms, bmap, len(vars)).items():
            acc = terms.get(e)
            if acc is None:
                terms[e] = c
            else:
                acc = acc + c
                if acc:
                    terms[e] = acc
                else:
                    del terms[e]
        return MultiPoly(vars, terms, self.units | other.units)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, self.units)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if isinstance(other, ParamPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "MultiPoly":
        c = _as_frac(c)
        if not c:
            return MultiPoly.zero(self.units)
        return MultiPoly(self.vars, {e: c * v for e, v in self.terms.items()}, self.units)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, ParamPoly):
            return NotImplemented  # handled by ParamPoly.__rmul__
        if not isinstance(other, MultiPoly):
            return NotImplemented
        vars, amap, bmap = _align(self.vars, other.vars)
        n = len(vars)
        aterms = _remap(self.terms, amap, n)
        bterms = _remap(other.terms, bmap, n)
        out: dict = {}
        for ea, ca in aterms.items():
            for eb, cb in bterms.items():
                e = tuple(x + y for x, y in zip(ea, eb)) if n else ()
                c = ca * cb
                acc = out.get(e)
                if acc is None:
                    out[e] = c
                else:
                    acc = acc + c
                    if acc:
                        out[e] = acc
                    else:
                        del out[e]
        return MultiPoly(vars, out, self.units | other.units)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            base = self._unit_monomial()
            return base._mono_pow(n)
        out = MultiPoly.const(1, self.units)
        for _ in range(n):
            out = out * self
        return out

    def _unit_monomial(self) -> "MultiPoly":
        """Check this is a single term supported on unit variables only."""
        if len(self.terms) != 1:
            raise UnitSubstitutionError("value is not a unit monomial")
        for name in self.vars:
            if name not in self.units:
                raise UnitSubstitutionError(f"variable {name!r} is not a unit")
        return self

    def _mono_pow(self, n: int) -> "MultiPoly":
        ((exps, c),) = self.terms.items()
        return MultiPoly(self.vars, {tuple(e * n for e in exps): c ** n}, self.units)

    # -- substitution and coefficient extraction ----------------------------

    def substitute(self, name: str, value) -> "MultiPoly":
        """Exact composition: replace ``name`` by ``value`` (poly or scalar)."""
        if isinstance(value, (int, Fraction)):
            value = MultiPoly.const(value, self.units)
        if name not in self.vars:
            return self
        k = self.vars.index(name)
        rest_vars = self.vars[:k] + self.vars[k + 1:]
        units = self.units | value.units
        needs_neg = any(e[k] < 0 for e in self.terms)
        if needs_neg:
            value._unit_monomial()
            if value.is_zero():
                raise UnitSubstitutionError("zero substituted into a unit variable")
        powers: dict[int, MultiPoly] = {}

        def vpow(e: int) -> MultiPoly:
            p = powers.get(e)
            if p is None:
                p = value._mono_pow(e) if e < 0 else value ** e
                powers[e] = p
            return p

        out = MultiPoly.zero(units)
        for exps, c in self.terms.items():
            rest = MultiPoly(rest_vars, {exps[:k] + exps[k + 1:]: c}, units)
            e = exps[k]
            out = out + (rest * vpow(e) if e else rest)
        return out

    def rename(self, old: str, new: str) -> "MultiPoly":
        if old not in self.vars:
            return self
        return self.substitute(old, MultiPoly.var(new, units=self.units))

    def collect(self, names: Iterable[str]) -> dict:
        """Group terms by their monomial in ``names``.

        Returns a map ``monomial -> MultiPoly in the remaining variables`` where
        a monomial is a tuple of (name, exponent) pairs sorted by the global
        order.  Summing ``monomial * coefficient`` reconstructs the polynomial.
        """
        names = set(names)
        sel = [k for k, v in enumerate(self.vars) if v in names]
        rest = [k for k, v in enumerate(self.vars) if v not in names]
        rest_vars = tuple(self.vars[k] for k in rest)
        out: dict = {}
        for exps, c in self.terms.items():
            mono = tuple((self.vars[k], exps[k]) for k in sel if exps[k])
            rest_exps = tuple(exps[k] for k in rest)
            acc = out.get(mono)
            piece = MultiPoly(rest_vars, {rest_exps: c}, self.units)
            out[mono] = piece if acc is None else acc + piece
        return out

    def coefficient(self, powers: Mapping[str, int]) -> "MultiPoly":
        """Coefficient of the exact monomial ``powers`` in those variables."""
        wanted = {n: e for n, e in powers.items() if e}
        for mono, coeff in self.collect(powers.keys()).items():
            if dict(mono) == wanted:
                return coeff
        return MultiPoly.zero(self.units)

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self)})"


def _term_sort_key(vars: tuple, exps: tuple):
    # graded lexicographic, highest first
    return (-sum(exps), tuple(-e for e in exps))


def _format_coeff(c: Fraction) -> str:
    return str(c)


def format_poly(p) -> str:
    """Canonical text form: graded-lex descending, bit-exact rationals."""
    if isinstance(p, ParamPoly):
        return _format_parampoly(p)
    if not p.terms:
        return "0"
    parts = []
    for exps in sorted(p.terms, key=lambda e: _term_sort_key(p.vars, e)):
        c = p.terms[exps]
        factors = [f"{n}^{e}" if e != 1 else n for n, e in zip(p.vars, exps) if e]
        if not factors:
            body = _format_coeff(abs(c))
        elif abs(c) == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(abs(c))] + factors)
        parts.append(("-" if c < 0 else "+", body))
    sign, body = parts[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        text += sign + body
    return text


# --------------------------------------------------------------------------
# unknowns and affine forms


@dataclass(frozen=True, order=True)
class Unknown:
    """A named scalar unknown, optionally carrying an integer multi-index."""

    name: str
    index: tuple = ()

    def __str__(self) -> str:
        if self.index:
            return f"{self.name}[{','.join(str(i) for i in self.index)}]"
        return self.name


class LinearForm:
    """Affine form  constant + sum(coeff * unknown)  over the rationals."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const: Scalar = 0, coeffs: Mapping[Unknown, Scalar] = None):
        self.const = _as_frac(const)
        self.coeffs = {u: _as_frac(c) for u, c in (coeffs or {}).items() if c != 0}

    @staticmethod
    def of(u: Unknown) -> "LinearForm":
        return LinearForm(0, {u: 1})

    def is_zero(self) -> bool:
        return not self.const and not self.coeffs

    def is_constant(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LinearForm(other)
        if not isinstance(other, LinearForm):
            return NotImplemented
        return self.const == other.const and self.coeffs == other.coeffs

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinearForm(self.const + other, self.coeffs)
        coeffs = dict(self.coeffs)
        for u, c in other.coeffs.items():
            acc = coeffs.get(u, Fraction(0)) + c
            if acc:
                coeffs[u] = acc
            else:
                coeffs.pop(u, None)
        return LinearForm(self.const + other.const, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return LinearForm(-self.const, {u: -c for u, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LinearForm(other)
        return self + (-other)

    def scale(self, c: Scalar) -> "LinearForm":
        c = _as_frac(c)
        if not c:
            return LinearForm()
        return LinearForm(self.const * c, {u: v * c for u, v in self.coeffs.items()})

    def evaluate(self, assignment: Mapping[Unknown, Scalar]) -> Fraction:
        total = self.const
        for u, c in self.coeffs.items():
            total += c * _as_frac(assignment.get(u, 0))
        return total

    def __str__(self) -> str:
        parts = []
        for u in sorted(self.coeffs):
            c = self.coeffs[u]
            body = str(u) if abs(c) == 1 else f"{abs(c)}*{u}"
            parts.append(("-" if c < 0 else "+", body))
        if self.const or not parts:
            parts.append(("-" if self.const < 0 else "+", str(abs(self.const))))
        sign, body = parts[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            text += sign + body
        return text

    def __repr__(self) -> str:
        return f"LinearForm({self})"


class ParamPoly:
    """Polynomial whose coefficients are :class:`LinearForm` values."""

    __slots__ = ("vars", "terms", "units")

    def __init__(self, vars: tuple = (), terms: Mapping = None, units: Iterable[str] = ()):
        terms = {e: v for e, v in (terms or {}).items() if not v.is_zero()}
        used = [False] * len(vars)
        for exps in terms:
            for k, e in enumerate(exps):
                if e:
                    used[k] = True
        if not all(used):
            keep = [k for k, u in enumerate(used) if u]
            vars = tuple(vars[k] for k in keep)
            terms = {tuple(e[k] for k in keep): v for e, v in terms.items()}
        units = frozenset(units)
        for exps in terms:
            for name, e in zip(vars, exps):
                if e < 0 and name not in units:
                    raise PolyError(f"negative exponent on non-unit variable {name!r}")
        self.vars = tuple(vars)
        self.terms = dict(terms)
        self.units = units

    @staticmethod
    def zero(units: Iterable[str] = ()) -> "ParamPoly":
        return ParamPoly((), {}, units)

    @staticmethod
    def from_poly(p: MultiPoly) -> "ParamPoly":
        return ParamPoly(p.vars, {e: LinearForm(c) for e, c in p.terms.items()}, p.units)

    @staticmethod
    def from_unknown(u: Unknown, mono: MultiPoly = None) -> "ParamPoly":
        """The unknown ``u`` times an optional monomial."""
        if mono is None:
            return ParamPoly((), {(): LinearForm.of(u)})
        out = ParamPoly.zero(mono.units)
        for e, c in mono.terms.items():
            out = out + ParamPoly(mono.vars, {e: LinearForm(0, {u: c})}, mono.units)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            other = ParamPoly.from_poly(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ParamPoly.from_poly(MultiPoly.const(other))
        elif isinstance(other, MultiPoly):
            other = ParamPoly.from_poly(other)
        if not isinstance(other, ParamPoly):
            return NotImplemented
        vars, amap, bmap = _align(self.vars, other.vars)
        terms = dict(_remap(self.terms, amap, len(vars)))
        for e, v in _remap(other.terms, bmap, len(vars)).items():
            acc = terms.get(e)
            acc = v if acc is None else acc + v
            if acc.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = acc
        return ParamPoly(vars, terms, self.units | other.units)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.vars, {e: -v for e, v in self.terms.items()}, self.units)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, MultiPoly)):
            return self + (-ParamPoly.from_poly(
                other if isinstance(other, MultiPoly) else MultiPoly.const(other)))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "ParamPoly":
        c = _as_frac(c)
        if not c:
            return ParamPoly.zero(self.units)
        return ParamPoly(self.vars, {e: v.scale(c) for e, v in self.terms.items()}, self.units)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, ParamPoly):
            raise NonlinearCombinationError(
                "product of two parametric polynomials is not linear in the unknowns")
        if not isinstance(other, MultiPoly):
            return NotImplemented
        vars, amap, bmap = _align(self.vars, other.vars)
        n = len(vars)
        aterms = _remap(self.terms, amap, n)
        bterms = _remap(other.terms, bmap, n)
        out: dict = {}
        for ea, va in aterms.items():
            for eb, cb in bterms.items():
                e = tuple(x + y for x, y in zip(ea, eb)) if n else ()
                v = va.scale(cb)
                acc = out.get(e)
                acc = v if acc is None else acc + v
                if acc.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = acc
        return ParamPoly(vars, out, self.units | other.units)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, MultiPoly):
            return self * other
        return NotImplemented

    def substitute(self, name: str, value) -> "ParamPoly":
        if isinstance(value, (int, Fraction)):
            value = MultiPoly.const(value, self.units)
        if isinstance(value, ParamPoly):
            raise NonlinearCombinationError("cannot substitute a parametric value")
        if name not in self.vars:
            return self
        k = self.vars.index(name)
        rest_vars = self.vars[:k] + self.vars[k + 1:]
        units = self.units | value.units
        if any(e[k] < 0 for e in self.terms):
            value._unit_monomial()
        powers: dict[int, MultiPoly] = {}

        def vpow(e: int) -> MultiPoly:
            p = powers.get(e)
            if p is None:
                p = value._mono_pow(e) if e < 0 else value ** e
                powers[e] = p
            return p

        out = ParamPoly.zero(units)
        for exps, v in self.terms.items():
            rest = ParamPoly(rest_vars, {exps[:k] + exps[k + 1:]: v}, units)
            e = exps[k]
            out = out + (rest * vpow(e) if e else rest)
        return out

    def rename(self, old: str, new: str) -> "ParamPoly":
        if old not in self.vars:
            return self
        return self.substitute(old, MultiPoly.var(new, units=self.units))

    def collect(self, names: Iterable[str]) -> dict:
        """As :meth:`MultiPoly.collect`; coefficients are ParamPoly values
        (plain LinearForms once every variable is collected)."""
        names = set(names)
        sel = [k for k, v in enumerate(self.vars) if v in names]
        rest = [k for k, v in enumerate(self.vars) if v not in names]
        rest_vars = tuple(self.vars[k] for k in rest)
        out: dict = {}
        for exps, v in self.terms.items():
            mono = tuple((self.vars[k], exps[k]) for k in sel if exps[k])
            rest_exps = tuple(exps[k] for k in rest)
            piece = ParamPoly(rest_vars, {rest_exps: v}, self.units)
            acc = out.get(mono)
            out[mono] = piece if acc is None else acc + piece
        if not rest_vars:
            out = {mono: pp.terms.get((), LinearForm()) for mono, pp in out.items()}
        return out

    def specialize(self, assignment: Mapping[Unknown, Scalar]) -> MultiPoly:
        terms = {}
        for e, v in self.terms.items():
            c = v.evaluate(assignment)
            if c:
                terms[e] = c
        return MultiPoly(self.vars, terms, self.units)

    def __str__(self) -> str:
        return _format_parampoly(self)

    def __repr__(self) -> str:
        return f"ParamPoly({self})"


def _format_parampoly(p: ParamPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for exps in sorted(p.terms, key=lambda e: _term_sort_key(p.vars, e)):
        v = p.terms[exps]
        factors = [f"{n}^{e}" if e != 1 else n for n, e in zip(p.vars, exps) if e]
        mono = "*".join(factors) if factors else "1"
        parts.append(f"({v})*{mono}" if factors else f"({v})")
    return " + ".join(parts)


def equations_from_zero(p: ParamPoly) -> list:
    """Linear forms whose simultaneous vanishing is equivalent to ``p == 0``.

    One form per stored monomial, in deterministic monomial order.
    """
    order = sorted(p.terms, key=lambda e: _term_sort_key(p.vars, e))
    return [p.terms[e] for e in order]


def poly_arith(op: str, p, q=None):
    """Spec-surface dispatcher for the four basic arithmetic operations."""
    if op == "add":
        return p + q
    if op == "negate":
        return -p
    if op == "multiply":
        if isinstance(p, ParamPoly) and isinstance(q, ParamPoly):
            raise NonlinearCombinationError(
                "product of two parametric polynomials is not linear in the unknowns")
        return p * q
    if op == "scale":
        return p.scale(q) if isinstance(p, (MultiPoly, ParamPoly)) else p * q
    raise ValueError(f"unknown operation {op!r}")


def substitute(p, name: str, value):
    return p.substitute(name, value)


def collect(p, names: Iterable[str]) -> dict:
    return p.collect(names)


# --------------------------------------------------------------------------
# text syntax:  d, l, m and parameter names; rationals p/q; + - * ^ ( )


def _tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("num", text[i:j])
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("name", text[i:j])
            i = j
            continue
        if ch in "+-*^()/":
            yield (ch, ch)
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    yield ("end", "")


class _Parser:
    def __init__(self, text: str, units: Iterable[str]):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.units = frozenset(units)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self) -> MultiPoly:
        p = self.expr()
        if self.peek()[0] != "end":
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return p

    def expr(self) -> MultiPoly:
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.take()[0] == "-":
                sign = -sign
        p = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.factor()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> MultiPoly:
        kind, val = self.peek()
        if kind == "-":
            self.take()
            return -self.factor()
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
        elif kind == "num":
            self.take()
            num = int(val)
            den = 1
            if self.peek()[0] == "/":
                self.take()
                den = int(self.take("num")[1])
                if den == 0:
                    raise ParseError("zero denominator")
            p = MultiPoly.const(Fraction(num, den), self.units)
        elif kind == "name":
            self.take()
            p = MultiPoly.var(val, units=self.units)
        else:
            raise ParseError(f"unexpected token {val!r}")
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            e = sign * int(self.take("num")[1])
            if e < 0:
                p = p._unit_monomial()._mono_pow(e)
            else:
                p = p ** e
        return p


def parse_poly(text: str, units: Iterable[str] = ("c",)) -> MultiPoly:
    """Parse the report/spec text syntax into a :class:`MultiPoly`.

    ``units`` lists names permitted Laurent exponents (the loop twist ``c``
    by default).
    """
    return _Parser(text, units).parse()
