"""Z-graded Lie conformal algebras presented by structure constants.

An algebra is a family list plus a table ``(family, family) -> [(family,
structure polynomial in d, l)]`` with the additive index rule: the bracket of
generators ``X_i`` and ``Y_j`` is supported at index ``i + j`` with
index-independent coefficient polynomials.  The four builtins are the loop
Virasoro algebra ``cv``, the loop Heisenberg-Virasoro algebra ``chv``, the
loop Schroedinger-Virasoro algebra ``csv`` (families L, M, Y) and its
extension ``csv-ext`` (adds N).

Bracket evaluation implements full conformal sesquilinearity:

* left coefficient:   [p(d) a  l  b] = p(-l) [a l b]
* right coefficient:  [a  l  q(d) b] = q(d + l) [a l b]

Checks certify skew-symmetry and the Jacobi identity as exact polynomial
identities over a finite index window; index-independence of the table
transports the certificate to all of Z.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .poly import MultiPoly, ParamPoly, format_poly, parse_poly

DEL, LAM, MU = "d", "l", "m"


class CoreError(Exception):
    pass


class UnknownFamilyError(CoreError):
    pass


class WindowUnderflowError(CoreError):
    """A check needed a table entry outside the supplied window."""


@dataclass(frozen=True, order=True)
class BasisKey:
    """A graded generator: family name plus integer loop index."""

    family: str
    index: int

    def __str__(self) -> str:
        return f"{self.family}@{self.index}"


def parse_key(text: str) -> BasisKey:
    fam, _, idx = text.partition("@")
    return BasisKey(fam, int(idx))


@dataclass(frozen=True)
class Window:
    """Finite index range [lo, hi] certifying an infinite graded statement."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise CoreError(f"empty window {self.lo}..{self.hi}")

    def __contains__(self, i: int) -> bool:
        return self.lo <= i <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __str__(self) -> str:
        return f"{self.lo}..{self.hi}"


def _norm_terms(terms: Mapping) -> dict:
    out = {}
    for key, poly in terms.items():
        if poly is None:
            continue
        if isinstance(poly, (int, Fraction)):
            poly = MultiPoly.const(poly)
        if not poly.is_zero():
            out[key] = poly
    return out


class Element:
    """Finite C[d]-combination of graded generators."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = None):
        self.terms = _norm_terms(terms or {})

    @staticmethod
    def basis(family: str, index: int) -> "Element":
        return Element({BasisKey(family, index): MultiPoly.const(1)})

    def __eq__(self, other) -> bool:
        return isinstance(other, Element) and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "Element") -> "Element":
        terms = dict(self.terms)
        for k, p in other.terms.items():
            terms[k] = terms.get(k, MultiPoly.zero()) + p
        return Element(terms)

    def __rmul__(self, poly) -> "Element":
        return Element({k: poly * p for k, p in self.terms.items()})

    def __str__(self) -> str:
        return _format_terms(self.terms)

    __repr__ = __str__


class LambdaElement:
    """Value of a lambda-bracket: finite map key -> polynomial in d, l (, m)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = None):
        self.terms = _norm_terms(terms or {})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, LambdaElement) and self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "LambdaElement") -> "LambdaElement":
        terms = dict(self.terms)
        for k, p in other.terms.items():
            terms[k] = terms.get(k, MultiPoly.zero()) + p
        return LambdaElement(terms)

    def __sub__(self, other: "LambdaElement") -> "LambdaElement":
        terms = dict(self.terms)
        for k, p in other.terms.items():
            terms[k] = terms.get(k, MultiPoly.zero()) - p
        return LambdaElement(terms)

    def __neg__(self) -> "LambdaElement":
        return LambdaElement({k: -p for k, p in self.terms.items()})

    def map_coeffs(self, fn) -> "LambdaElement":
        return LambdaElement({k: fn(p) for k, p in self.terms.items()})

    def __str__(self) -> str:
        return _format_terms(self.terms)

    __repr__ = __str__


def _format_terms(terms: Mapping) -> str:
    if not terms:
        return "0"
    parts = [f"({format_poly(p)})*{k}" for k, p in sorted(terms.items(), key=lambda kv: kv[0])]
    return " + ".join(parts)


@dataclass(frozen=True)
class OpeTerm:
    """Coefficient of the j-th delta derivative in a local commutator."""

    j: int
    value: Element


class AlgebraSpec:
    """Structure-constant presentation of a Z-graded Lie conformal algebra."""

    def __init__(self, name: str, families: Iterable[str], table: Mapping):
        self.name = name
        self.families = tuple(families)
        if len(set(self.families)) != len(self.families):
            raise CoreError("duplicate family names")
        full = {}
        for fa, fb in product(self.families, repeat=2):
            full[(fa, fb)] = tuple(table.get((fa, fb), ()))
        for (fa, fb), outs in table.items():
            if fa not in self.families or fb not in self.families:
                raise UnknownFamilyError(f"table references unknown family in ({fa},{fb})")
        for outs in full.values():
            for fam, poly in outs:
                if fam not in self.families:
                    raise UnknownFamilyError(f"unknown output family {fam!r}")
                bad = set(poly.vars) - {DEL, LAM}
                if bad:
                    raise CoreError(f"structure polynomial uses {sorted(bad)}")
        self.table = full

    def pair(self, fa: str, fb: str):
        try:
            return self.table[(fa, fb)]
        except KeyError:
            raise UnknownFamilyError(f"no such family pair ({fa},{fb})") from None

    def family_index(self, fam: str) -> int:
        try:
            return self.families.index(fam)
        except ValueError:
            raise UnknownFamilyError(f"unknown family {fam!r}") from None

    def __repr__(self) -> str:
        return f"AlgebraSpec({self.name!r})"


def _p(text: str) -> MultiPoly:
    return parse_poly(text, units=())

_BUILTIN_TABLES = {
    "cv": (
        ("L",),
        {("L", "L"): (("L", "d+2*l"),)},
    ),
    "chv": (
        ("L", "M"),
        {
            ("L", "L"): (("L", "d+2*l"),),
            ("L", "M"): (("M", "d+l"),),
            ("M", "L"): (("M", "l"),),
        },
    ),
    "csv": (
        ("L", "M", "Y"),
        {
            ("L", "L"): (("L", "d+2*l"),),
            ("L", "M"): (("M", "d+l"),),
            ("M", "L"): (("M", "l"),),
            ("L", "Y"): (("Y", "d+3/2*l"),),
            ("Y", "L"): (("Y", "1/2*d+3/2*l"),),
            ("Y", "Y"): (("M", "d+2*l"),),
        },
    ),
    "csv-ext": (
        ("L", "M", "Y", "N"),
        {
            ("L", "L"): (("L", "d+2*l"),),
            ("L", "M"): (("M", "d+l"),),
            ("M", "L"): (("M", "l"),),
            ("L", "Y"): (("Y", "d+3/2*l"),),
            ("Y", "L"): (("Y", "1/2*d+3/2*l"),),
            ("Y", "Y"): (("M", "d+2*l"),),
            ("L", "N"): (("N", "d+l"),),
            ("N", "L"): (("N", "l"),),
            ("N", "M"): (("M", "2"),),
            ("M", "N"): (("M", "-2"),),
            ("N", "Y"): (("Y", "1"),),
            ("Y", "N"): (("Y", "-1"),),
        },
    ),
}

BUILTIN_NAMES = tuple(_BUILTIN_TABLES)


def builtin(name: str) -> AlgebraSpec:
    """One of cv, chv, csv, csv-ext (loop Virasoro-family conformal algebras)."""
    try:
        families, raw = _BUILTIN_TABLES[name]
    except KeyError:
        raise CoreError(f"unknown builtin algebra {name!r}") from None
    table = {pair: tuple((fam, _p(text)) for fam, text in outs) for pair, outs in raw.items()}
    return AlgebraSpec(name, families, table)


# --------------------------------------------------------------------------
# bracket evaluation


def bracket(alg: AlgebraSpec, a: Element, b: Element, lam: str = LAM) -> LambdaElement:
    """[a lam b] with full sesquilinear extension to C[d]-combinations."""
    lam_var = MultiPoly.var(lam)
    out: dict = {}
    for ka, p in a.terms.items():
        left = p.substitute(DEL, -lam_var)
        for kb, q in b.terms.items():
            outs = alg.pair(ka.family, kb.family)
            if not outs:
                continue
            right = q.substitute(DEL, MultiPoly.var(DEL) + lam_var)
            factor = left * right
            idx = ka.index + kb.index
            for fam, s in outs:
                if lam != LAM:
                    s = s.rename(LAM, lam)
                key = BasisKey(fam, idx)
                term = factor * s
                acc = out.get(key)
                out[key] = term if acc is None else acc + term
    return LambdaElement(out)


def conjugate_bracket(alg: AlgebraSpec, a: Element, b: Element, lam: str = LAM) -> LambdaElement:
    """-[b_{-lam-d} a]: computes [b mu a] then substitutes mu -> -lam-d."""
    inner = bracket(alg, b, a, lam="_mu")
    repl = -MultiPoly.var(lam) - MultiPoly.var(DEL)
    return LambdaElement({k: -(p.substitute("_mu", repl)) for k, p in inner.terms.items()})


def jacobi_residual(alg: AlgebraSpec, ka: BasisKey, kb: BasisKey, kc: BasisKey) -> LambdaElement:
    """[a l [b m c]] - [[a l b] l+m c] - [b m [a l c]] as exact polynomials.

    Nested evaluation uses the two substitution rules: a coefficient entering
    the first bracket slot has d -> -l-m, a coefficient on an inner result is
    shifted d -> d+l (resp. d+m) by sesquilinearity.
    """
    ea, eb, ec = (Element.basis(k.family, k.index) for k in (ka, kb, kc))
    d_var = MultiPoly.var(DEL)
    l_var = MultiPoly.var(LAM)
    m_var = MultiPoly.var(MU)

    lhs: dict = {}
    inner_bc = bracket(alg, eb, ec, lam=MU)
    for kw, r in inner_bc.terms.items():
        shifted = r.substitute(DEL, d_var + l_var)
        for kt, s in bracket(alg, ea, Element.basis(kw.family, kw.index), lam=LAM).terms.items():
            acc = lhs.get(kt)
            term = shifted * s
            lhs[kt] = term if acc is None else acc + term

    rhs: dict = {}
    ab = bracket(alg, ea, eb, lam=LAM)
    for kv, q in ab.terms.items():
        qc = q.substitute(DEL, -l_var - m_var)
        for fam, s in alg.pair(kv.family, kc.family):
            s_nu = s.substitute(LAM, l_var + m_var)
            kt = BasisKey(fam, kv.index + kc.index)
            term = qc * s_nu
            acc = rhs.get(kt)
            rhs[kt] = term if acc is None else acc + term
    ac = bracket(alg, ea, ec, lam=LAM)
    for kw, p in ac.terms.items():
        shifted = p.substitute(DEL, d_var + m_var)
        for kt, s in bracket(alg, eb, Element.basis(kw.family, kw.index), lam=MU).terms.items():
            term = shifted * s
            acc = rhs.get(kt)
            rhs[kt] = term if acc is None else acc + term

    return LambdaElement(lhs) - LambdaElement(rhs)


# --------------------------------------------------------------------------
# reports


@dataclass
class CheckItem:
    check: str
    subject: str
    ok: bool
    instances: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        out = {"check": self.check, "subject": self.subject,
               "status": "ok" if self.ok else "fail", "instances": self.instances}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class Report:
    title: str
    items: list
    notes: list

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def failures(self) -> list:
        return [i for i in self.items if not i.ok]

    def to_json(self) -> dict:
        return {"title": self.title, "ok": self.ok,
                "items": [i.to_json() for i in self.items], "notes": list(self.notes)}

    def __str__(self) -> str:
        lines = [self.title]
        for item in self.items:
            mark = "ok  " if item.ok else "FAIL"
            line = f"  [{mark}] {item.check} {item.subject} ({item.instances} instances)"
            if item.detail:
                line += f": {item.detail}"
            lines.append(line)
        for note in self.notes:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


_CERT_NOTE = ("structure constants are index-independent, so one interior instance "
              "per family tuple certifies the identity for all integer indices")


def check_skew(alg: AlgebraSpec, w: Window) -> Report:
    """Certify [a l b] = -[b_{-l-d} a] over the window, per family pair."""
    items = []
    for fa, fb in product(alg.families, repeat=2):
        count, bad = 0, None
        for i, j in product(w, w):
            if i + j not in w:
                continue
            count += 1
            a, b = Element.basis(fa, i), Element.basis(fb, j)
            residual = bracket(alg, a, b) - conjugate_bracket(alg, a, b)
            if not residual.is_zero() and bad is None:
                bad = f"({fa}@{i},{fb}@{j}) residual {residual}"
        items.append(CheckItem("skew", f"[{fa},{fb}]", bad is None, count, bad or ""))
    return Report(f"skew-symmetry of {alg.name} on {w}", items, [_CERT_NOTE])


def check_jacobi(alg: AlgebraSpec, w: Window) -> Report:
    """Certify the Jacobi identity over the window, per family triple."""
    items = []
    triples = [(i, j, k) for i, j, k in product(w, w, w)
               if i + j in w and j + k in w and i + k in w and i + j + k in w]
    for fa, fb, fc in product(alg.families, repeat=3):
        count, bad = 0, None
        for i, j, k in triples:
            count += 1
            residual = jacobi_residual(alg, BasisKey(fa, i), BasisKey(fb, j), BasisKey(fc, k))
            if not residual.is_zero() and bad is None:
                bad = f"({fa}@{i},{fb}@{j},{fc}@{k}) residual {residual}"
        items.append(CheckItem("jacobi", f"[{fa},{fb},{fc}]", bad is None, count, bad or ""))
    return Report(f"Jacobi identity of {alg.name} on {w}", items, [_CERT_NOTE])


# --------------------------------------------------------------------------
# OPE translation


def ope_to_lambda(terms: Iterable[OpeTerm]) -> LambdaElement:
    """sum_j (l^j / j!) c^j for a finite list of delta-derivative coefficients."""
    out = LambdaElement({})
    for term in sorted(terms, key=lambda t: t.j):
        if term.j < 0:
            raise CoreError("negative delta-derivative order")
        fact = 1
        for k in range(2, term.j + 1):
            fact *= k
        mono = MultiPoly.monomial({LAM: term.j}, Fraction(1, fact)) if term.j else MultiPoly.const(1)
        out = out + LambdaElement({k: mono * p for k, p in term.value.terms.items()})
    return out


# --------------------------------------------------------------------------
# JSON formats


def algebra_to_json(alg: AlgebraSpec) -> dict:
    brackets = []
    for (fa, fb), outs in sorted(alg.table.items()):
        if not outs:
            continue
        brackets.append({
            "left": fa, "right": fb,
            "out": [{"family": fam, "poly": format_poly(p)} for fam, p in outs],
        })
    return {"families": list(alg.families), "brackets": brackets}


def algebra_from_json(data: Mapping, name: str = "custom") -> AlgebraSpec:
    try:
        families = list(data["families"])
        table = {}
        for entry in data.get("brackets", ()):
            pair = (entry["left"], entry["right"])
            outs = tuple((o["family"], _p(o["poly"])) for o in entry.get("out", ()))
            table[pair] = table.get(pair, ()) + outs
    except (KeyError, TypeError) as exc:
        raise CoreError(f"malformed algebra JSON: {exc}") from exc
    return AlgebraSpec(name, families, table)


def load_algebra(source: str) -> AlgebraSpec:
    """Builtin name or path to an algebra JSON file."""
    if source in _BUILTIN_TABLES:
        return builtin(source)
    with open(source, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return algebra_from_json(data, name=source)
