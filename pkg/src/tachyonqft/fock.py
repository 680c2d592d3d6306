"""Exact ladder-operator algebra on a Fock space and its dual.

Operators carry opaque momentum labels; the continuum normalisation
``(2 pi)^3 2 omega_p delta^3(p - q)`` stays a real symbol (``DeltaWeight``),
so every identity checked here is exact.  Coefficients are sympy
expressions.

Normal order puts direct-space factors before dual ones.  Inside the direct
space creations come first; inside the dual space ``a*_k`` (which creates
``<k|`` from ``<0|``) comes before ``a*dag_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

import sympy

__all__ = [
    "ModeLabel",
    "LadderOp",
    "DeltaWeight",
    "OperatorExpr",
    "DualState",
    "STAR_TRANSPOSE",
    "STAR_ADJOINT",
    "label",
    "a",
    "adag",
    "a_star",
    "a_star_dag",
    "scalar",
    "commutator",
    "star",
    "twin_c",
    "boost_map",
    "dual_vacuum_action",
    "twin_field",
    "mode_function",
]

STAR_TRANSPOSE = "star1"
STAR_ADJOINT = "star2"
_CONVENTIONS = (STAR_TRANSPOSE, STAR_ADJOINT)

ANNIHILATE, CREATE = "annihilate", "create"
DIRECT, DUAL = "direct", "dual"


@dataclass(frozen=True, order=True)
class ModeLabel:
    """Opaque momentum label closed under negation and boost image.

    A boost acts linearly, so ``L(-p) = -(Lp)`` and a label is fixed by its
    base name, the number of boosts applied and an overall sign.
    """

    base: str
    boosts: int = 0
    negated: bool = False

    def __neg__(self) -> "ModeLabel":
        return ModeLabel(self.base, self.boosts, not self.negated)

    def boosted(self) -> "ModeLabel":
        return ModeLabel(self.base, self.boosts + 1, self.negated)

    def __str__(self) -> str:
        return ("−" if self.negated else "") + "Λ" * self.boosts + self.base


def label(name: str) -> ModeLabel:
    return ModeLabel(name)


@dataclass(frozen=True)
class LadderOp:
    kind: str
    space: str
    label: ModeLabel

    def __post_init__(self):
        if self.kind not in (ANNIHILATE, CREATE):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.space not in (DIRECT, DUAL):
            raise ValueError(f"unknown space {self.space!r}")

    def adjoint(self) -> "LadderOp":
        return LadderOp(CREATE if self.kind == ANNIHILATE else ANNIHILATE, self.space, self.label)

    def starred(self) -> "LadderOp":
        return LadderOp(self.kind, DUAL if self.space == DIRECT else DIRECT, self.label)

    @property
    def rank(self) -> int:
        # position class in normal order
        if self.space == DIRECT:
            return 0 if self.kind == CREATE else 1
        return 2 if self.kind == ANNIHILATE else 3

    def sort_key(self):
        return (self.rank, self.label)

    def __str__(self) -> str:
        head = "a" + ("*" if self.space == DUAL else "") + ("†" if self.kind == CREATE else "")
        return f"{head}[{self.label}]"


# symbol name -> unordered label pair, so boosts can relabel deltas
_DELTA_REGISTRY: dict[sympy.Symbol, tuple[ModeLabel, ModeLabel]] = {}


def _delta_symbol(p: ModeLabel, q: ModeLabel) -> sympy.Symbol:
    if p.negated and q.negated:
        # delta(-p + q) with omega_{-p} = omega_p
        p, q = -p, -q
    p, q = sorted((p, q))
    sym = sympy.Symbol(f"Δ({p},{q})", real=True)
    _DELTA_REGISTRY[sym] = (p, q)
    return sym


def DeltaWeight(p: ModeLabel, q: ModeLabel, sign: int = 1) -> "OperatorExpr":
    """``sign * (2 pi)^3 2 omega_p delta^3(p - q)`` as a c-number expression."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return OperatorExpr({(): sign * _delta_symbol(p, q)})


def _contraction(left: LadderOp, right: LadderOp):
    """``[left, right]`` for a pair out of normal order, or None if they commute."""
    if left.space != right.space or left.kind == right.kind:
        return None
    if left.space == DIRECT and left.kind == ANNIHILATE:
        return _delta_symbol(left.label, right.label)
    if left.space == DUAL and left.kind == CREATE:
        return _delta_symbol(left.label, right.label)
    return None


def _clean(terms: Mapping) -> dict:
    out = {}
    for ops, c in terms.items():
        c = sympy.expand(c)
        if c != 0:
            out[ops] = c
    return out


class OperatorExpr:
    """Formal sum of coefficient * ordered product of ladder operators.

    Arithmetic keeps products as written; ``normal_ordered`` applies the
    commutation rules.  Equality compares normal forms.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        self._terms = _clean(terms or {})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @classmethod
    def of(cls, op: LadderOp, coeff=1) -> "OperatorExpr":
        return cls({(op,): sympy.sympify(coeff)})

    def _combine(self, other, sign):
        other = _as_expr(other)
        terms = dict(self._terms)
        for ops, c in other._terms.items():
            terms[ops] = terms.get(ops, 0) + sign * c
        return OperatorExpr(terms)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return _as_expr(other)._combine(self, -1)

    def __neg__(self):
        return OperatorExpr({k: -v for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, OperatorExpr):
            c = sympy.sympify(other)
            return OperatorExpr({k: v * c for k, v in self._terms.items()})
        terms: dict = {}
        for (o1, c1), (o2, c2) in itertools.product(self._terms.items(), other._terms.items()):
            key = o1 + o2
            terms[key] = terms.get(key, 0) + c1 * c2
        return OperatorExpr(terms)

    def __rmul__(self, other):
        c = sympy.sympify(other)
        return OperatorExpr({k: c * v for k, v in self._terms.items()})

    def is_zero(self) -> bool:
        return not self.normal_ordered()._terms

    def __eq__(self, other):
        if not isinstance(other, (OperatorExpr, int, complex, float, sympy.Basic)):
            return NotImplemented
        return (self - _as_expr(other)).is_zero()

    def __hash__(self):
        return hash(self.pretty())

    def spaces(self) -> set[str]:
        return {op.space for ops in self._terms for op in ops}

    def scalar_part(self):
        return self._terms.get((), sympy.Integer(0))

    def adjoint(self) -> "OperatorExpr":
        return OperatorExpr({
            tuple(op.adjoint() for op in reversed(ops)): sympy.conjugate(c)
            for ops, c in self._terms.items()
        })

    def normal_ordered(self) -> "OperatorExpr":
        pending = list(self._terms.items())
        done: dict = {}
        while pending:
            ops, c = pending.pop()
            for i in range(len(ops) - 1):
                x, y = ops[i], ops[i + 1]
                if y.sort_key() < x.sort_key():
                    pending.append((ops[:i] + (y, x) + ops[i + 2:], c))
                    delta = _contraction(x, y)
                    if delta is not None:
                        pending.append((ops[:i] + ops[i + 2:], c * delta))
                    break
            else:
                done[ops] = done.get(ops, 0) + c
        return OperatorExpr(done)

    def map_coefficients(self, fn) -> "OperatorExpr":
        return OperatorExpr({k: fn(v) for k, v in self._terms.items()})

    def pretty(self) -> str:
        nf = self.normal_ordered()._terms
        if not nf:
            return "0"
        parts = []
        for ops in sorted(nf, key=lambda o: (len(o), [op.sort_key() for op in o])):
            coeff = sympy.sstr(nf[ops], order="lex")
            body = " ".join(str(op) for op in ops)
            parts.append(f"({coeff})" + (f" {body}" if body else ""))
        return " + ".join(parts)

    def __str__(self):
        return self.pretty()

    def __repr__(self):
        return f"OperatorExpr({self.pretty()})"


def _as_expr(x) -> OperatorExpr:
    if isinstance(x, OperatorExpr):
        return x
    return OperatorExpr({(): sympy.sympify(x)})


def scalar(c) -> OperatorExpr:
    return _as_expr(c)


def a(k: ModeLabel) -> OperatorExpr:
    return OperatorExpr.of(LadderOp(ANNIHILATE, DIRECT, k))


def adag(k: ModeLabel) -> OperatorExpr:
    return OperatorExpr.of(LadderOp(CREATE, DIRECT, k))


def a_star(k: ModeLabel) -> OperatorExpr:
    return OperatorExpr.of(LadderOp(ANNIHILATE, DUAL, k))


def a_star_dag(k: ModeLabel) -> OperatorExpr:
    return OperatorExpr.of(LadderOp(CREATE, DUAL, k))


def commutator(A, B, normalize: bool = True) -> OperatorExpr:
    A, B = _as_expr(A), _as_expr(B)
    out = A * B - B * A
    return out.normal_ordered() if normalize else out


def star(A: OperatorExpr, convention: str = STAR_TRANSPOSE) -> OperatorExpr:
    """Dual-space image with ``(AB)* = B* A*``.

    ``star1`` keeps coefficients, ``star2`` conjugates them.  Input must live
    in one space; a dual-space input maps back to the direct space.
    """
    if convention not in _CONVENTIONS:
        raise ValueError(f"convention must be one of {_CONVENTIONS}")
    A = _as_expr(A)
    if len(A.spaces()) > 1:
        raise ValueError("star needs an expression in a single space")
    conj = sympy.conjugate if convention == STAR_ADJOINT else (lambda c: c)
    return OperatorExpr({
        tuple(op.starred() for op in reversed(ops)): conj(c) for ops, c in A.terms.items()
    })


def twin_c(k: ModeLabel) -> OperatorExpr:
    """``c_k = a_k (x) 1 + 1 (x) a*_k``; its adjoint is ``c_k^dag``."""
    return a(k) + a_star(k)


def _relabel_delta(sym, fn):
    p, q = _DELTA_REGISTRY[sym]
    return _delta_symbol(fn(p), fn(q))


def boost_map(A: OperatorExpr, sign_flip: bool) -> OperatorExpr:
    """Induced action of a boost on ladder operators.

    Without a flip every label goes to its boost image.  With a flip
    annihilators and creators trade places at the negated image, in both
    spaces.  Delta weights in coefficients are relabelled by the boost.
    """
    A = _as_expr(A)

    def image(op: LadderOp) -> LadderOp:
        lab = op.label.boosted()
        if not sign_flip:
            return LadderOp(op.kind, op.space, lab)
        return LadderOp(op.adjoint().kind, op.space, -lab)

    def coeff(c):
        subs = {s: _relabel_delta(s, ModeLabel.boosted) for s in c.free_symbols if s in _DELTA_REGISTRY}
        return c.xreplace(subs)

    return OperatorExpr({tuple(image(op) for op in ops): coeff(c) for ops, c in A.terms.items()})


@dataclass(frozen=True)
class DualState:
    """Linear combination of bras ``<k1 ... kn|``; the empty tuple is ``<0|``."""

    components: tuple[tuple[tuple[ModeLabel, ...], object], ...]

    @property
    def is_zero(self) -> bool:
        return not self.components

    def coefficient(self, labels: Iterable[ModeLabel] = ()) -> object:
        key = tuple(labels)
        for k, c in self.components:
            if k == key:
                return c
        return sympy.Integer(0)

    def __str__(self) -> str:
        if not self.components:
            return "0"
        return " + ".join(
            f"({sympy.sstr(c, order='lex')}) <{','.join(str(x) for x in k) or '0'}|" for k, c in self.components
        )


def dual_vacuum_action(A: OperatorExpr) -> DualState:
    """Act with a dual-space operator on ``<0|``.

    ``a*_k <0| = <k|`` and ``a*dag_k <0| = 0``; products are normal ordered
    first so every surviving term is a string of ``a*`` on the vacuum.
    """
    A = _as_expr(A)
    if DIRECT in A.spaces():
        raise ValueError("dual_vacuum_action needs a dual-space expression")
    comps = {}
    for ops, c in A.normal_ordered().terms.items():
        if any(op.kind == CREATE for op in ops):
            continue
        comps[tuple(op.label for op in ops)] = c
    return DualState(tuple(sorted(comps.items(), key=lambda kv: (len(kv[0]), kv[0]))))


def mode_function(k: ModeLabel, x: str) -> sympy.Symbol:
    """Opaque complex mode function ``u_k(x)``."""
    return sympy.Symbol(f"u[{k},{x}]")


def twin_field(k: ModeLabel, x: str, convention: str = STAR_TRANSPOSE) -> OperatorExpr:
    """One momentum mode of the twin field at point ``x``.

    ``phi = u a_k + conj(u) a_k^dag`` on the direct space plus its star image
    under the chosen convention.
    """
    u = mode_function(k, x)
    phi = u * a(k) + sympy.conjugate(u) * adag(k)
    return phi + star(phi, convention)
