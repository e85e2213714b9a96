"""The divided power superalgebra O(m, n) = O(m) (x) Lambda(n) over F_p.

Basis monomials are ``x^(alpha) x^u`` with ``alpha`` an m-tuple of exponents
in [0, p-1] and ``u`` a strictly increasing tuple of odd indices in
{m+1, ..., m+n}.  Multiplication carries the per-coordinate binomial factors
of divided powers (truncating to zero when an exponent sum reaches p) and the
inversion-count sign on the exterior part.  Indices 1..m are even, m+1..m+n
odd; tau(i) is that parity.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from oddcartan import exactlin

__all__ = [
    "Ambient",
    "Mono",
    "SuperPoly",
    "WittElement",
    "mul",
    "derive",
    "apply_witt",
    "substitute_linear",
    "zdeg",
    "parity",
    "mono_degree",
    "mono_parity",
    "mono_sort_key",
    "serialize",
]

# A monomial is (alpha, u): alpha a tuple of ints, u a sorted tuple of indices.
Mono = tuple[tuple[int, ...], tuple[int, ...]]


class Ambient(NamedTuple):
    m: int
    n: int
    p: int

    @property
    def nvars(self) -> int:
        return self.m + self.n

    def tau(self, i: int) -> int:
        """Parity of the variable x_i (0 even, 1 odd)."""
        if not 1 <= i <= self.m + self.n:
            raise IndexError("variable index %d out of range" % i)
        return 0 if i <= self.m else 1


@lru_cache(maxsize=None)
def _pascal(p: int) -> np.ndarray:
    """binom(i, j) mod p for 0 <= j <= i <= p-1."""
    t = np.zeros((p, p), dtype=np.int64)
    for i in range(p):
        t[i, 0] = 1
        for j in range(1, i + 1):
            t[i, j] = (t[i - 1, j - 1] + t[i - 1, j]) % p
    return t


def _merge_odd(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sort the concatenation u.v, counting inversions; None on a repeat."""
    if not u:
        return 1, v
    if not v:
        return 1, u
    merged: list[int] = []
    inv = 0
    i = j = 0
    while i < len(u) and j < len(v):
        if u[i] == v[j]:
            return None
        if u[i] < v[j]:
            merged.append(u[i])
            i += 1
        else:
            merged.append(v[j])
            inv += len(u) - i
            j += 1
    merged.extend(u[i:])
    merged.extend(v[j:])
    sign = -1 if inv & 1 else 1
    return sign, tuple(merged)


def mono_degree(mono: Mono) -> int:
    return sum(mono[0]) + len(mono[1])


def mono_parity(mono: Mono) -> int:
    return len(mono[1]) & 1


def mono_sort_key(mono: Mono) -> tuple:
    """Canonical monomial order: total degree, then lex on alpha, then u."""
    return (mono_degree(mono), mono[0], mono[1])


def mono_mul(a: Mono, b: Mono, p: int) -> tuple[int, Mono] | None:
    """Product of two monomials: (coefficient, monomial) or None if zero."""
    alpha, u = a
    beta, v = b
    pas = _pascal(p)
    coeff = 1
    gamma = []
    for x, y in zip(alpha, beta):
        s = x + y
        if s >= p:
            return None
        if x and y:
            coeff = (coeff * int(pas[s, x])) % p
        gamma.append(s)
    merged = _merge_odd(u, v)
    if merged is None:
        return None
    sign, w = merged
    coeff = (coeff * sign) % p
    if coeff == 0:
        return None
    return coeff, (tuple(gamma), w)


class SuperPoly:
    """A finite F_p-combination of monomials of one ambient O(m, n)."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Ambient, terms: Mapping[Mono, int] | None = None) -> None:
        self.ambient = ambient
        self.terms: dict[Mono, int] = {}
        if terms:
            p = ambient.p
            for mono, c in terms.items():
                c %= p
                if c:
                    self.terms[mono] = c

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(ambient: Ambient) -> "SuperPoly":
        return SuperPoly(ambient)

    @staticmethod
    def one(ambient: Ambient) -> "SuperPoly":
        return SuperPoly(ambient, {((0,) * ambient.m, ()): 1})

    @staticmethod
    def monomial(ambient: Ambient, mono: Mono, coeff: int = 1) -> "SuperPoly":
        return SuperPoly(ambient, {mono: coeff})

    @staticmethod
    def variable(ambient: Ambient, i: int) -> "SuperPoly":
        if i <= ambient.m:
            alpha = tuple(1 if k == i - 1 else 0 for k in range(ambient.m))
            return SuperPoly(ambient, {(alpha, ()): 1})
        return SuperPoly(ambient, {((0,) * ambient.m, (i,)): 1})

    # -- ring structure --------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperPoly):
            return NotImplemented
        return self.ambient == other.ambient and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(sorted(self.terms.items()))))

    def __add__(self, other: "SuperPoly") -> "SuperPoly":
        self._check(other)
        out = dict(self.terms)
        p = self.ambient.p
        for mono, c in other.terms.items():
            s = (out.get(mono, 0) + c) % p
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        res = SuperPoly(self.ambient)
        res.terms = out
        return res

    def __sub__(self, other: "SuperPoly") -> "SuperPoly":
        return self + other.scale(-1)

    def scale(self, c: int) -> "SuperPoly":
        p = self.ambient.p
        c %= p
        if c == 0:
            return SuperPoly(self.ambient)
        res = SuperPoly(self.ambient)
        res.terms = {mono: (v * c) % p for mono, v in self.terms.items()}
        return res

    def __mul__(self, other: "SuperPoly") -> "SuperPoly":
        return mul(self, other)

    def _check(self, other: "SuperPoly") -> None:
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return serialize(self)


def mul(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    f._check(g)
    p = f.ambient.p
    acc: dict[Mono, int] = {}
    for ma, ca in f.terms.items():
        for mb, cb in g.terms.items():
            prod = mono_mul(ma, mb, p)
            if prod is None:
                continue
            c, mono = prod
            s = (acc.get(mono, 0) + ca * cb * c) % p
            if s:
                acc[mono] = s
            else:
                acc.pop(mono, None)
    res = SuperPoly(f.ambient)
    res.terms = acc
    return res


def derive_mono(ambient: Ambient, i: int, mono: Mono) -> tuple[int, Mono] | None:
    """partial_i on one monomial: (coefficient, monomial) or None."""
    alpha, u = mono
    if i <= ambient.m:
        if alpha[i - 1] == 0:
            return None
        beta = list(alpha)
        beta[i - 1] -= 1
        return 1, (tuple(beta), u)
    if i not in u:
        return None
    pos = u.index(i)  # 0-based; sign (-1)^pos
    sign = -1 if pos & 1 else 1
    return sign, (alpha, u[:pos] + u[pos + 1:])


def derive(i: int, f: SuperPoly) -> SuperPoly:
    amb = f.ambient
    if not 1 <= i <= amb.nvars:
        raise IndexError("variable index %d out of range" % i)
    p = amb.p
    acc: dict[Mono, int] = {}
    for mono, c in f.terms.items():
        d = derive_mono(amb, i, mono)
        if d is None:
            continue
        sign, dm = d
        s = (acc.get(dm, 0) + c * sign) % p
        if s:
            acc[dm] = s
        else:
            acc.pop(dm, None)
    res = SuperPoly(amb)
    res.terms = acc
    return res


class WittElement:
    """A superderivation sum a_i * partial_i with SuperPoly coefficients."""

    __slots__ = ("ambient", "coeffs")

    def __init__(self, ambient: Ambient, coeffs: Mapping[int, SuperPoly]) -> None:
        self.ambient = ambient
        self.coeffs = {i: c for i, c in coeffs.items() if c}

    def __call__(self, f: SuperPoly) -> SuperPoly:
        return apply_witt(self, f)


def apply_witt(w: WittElement, f: SuperPoly) -> SuperPoly:
    if w.ambient != f.ambient:
        raise ValueError("ambient mismatch")
    out = SuperPoly(f.ambient)
    for i, a in w.coeffs.items():
        out = out + mul(a, derive(i, f))
    return out


def zdeg(f: SuperPoly):
    """Z-degree |alpha| + |u| if homogeneous, None otherwise; 0 is an error."""
    if not f.terms:
        raise ValueError("zero polynomial has no degree")
    degs = {mono_degree(mono) for mono in f.terms}
    return degs.pop() if len(degs) == 1 else None


def parity(f: SuperPoly):
    """Z_2-parity |u| mod 2 if homogeneous, None otherwise; 0 is an error."""
    if not f.terms:
        raise ValueError("zero polynomial has no parity")
    pars = {mono_parity(mono) for mono in f.terms}
    return pars.pop() if len(pars) == 1 else None


# ---------------------------------------------------------------------------
# linear substitution (automorphism lifting kernel)
# ---------------------------------------------------------------------------

def _dp_linear(ambient: Ambient, coeffs: dict[int, int], k: int) -> SuperPoly:
    """k-th divided power of the even linear form sum_j coeffs[j] x_j.

    (sum a_j x_j)^(k) = sum_{|beta|=k} (prod a_j^{beta_j}) x^(beta),
    truncated at exponents >= p.
    """
    p = ambient.p
    support = sorted(coeffs)
    acc: dict[Mono, int] = {}

    def rec(idx: int, remaining: int, alpha: list[int], c: int) -> None:
        if idx == len(support):
            if remaining == 0 and c % p:
                acc[(tuple(alpha), ())] = (acc.get((tuple(alpha), ()), 0) + c) % p
            return
        j = support[idx]
        aj = coeffs[j]
        power = 1
        for e in range(0, min(remaining, p - 1) + 1):
            if e:
                power = (power * aj) % p
                if power == 0:
                    break
            alpha[j - 1] = e
            rec(idx + 1, remaining - e, alpha, (c * power) % p)
        alpha[j - 1] = 0

    rec(0, k, [0] * ambient.m, 1)
    res = SuperPoly(ambient)
    res.terms = {mono: c for mono, c in acc.items() if c}
    return res


def substitute_linear(f: SuperPoly, a: Iterable) -> SuperPoly:
    """Algebra endomorphism x_i -> y_i = sum_j A[j-1, i-1] x_j.

    A must be even (parity-block-diagonal) and invertible; odd mixing is
    rejected because only even changes of basis extend to automorphisms.
    """
    amb = f.ambient
    p = amb.p
    mat = np.asarray(a, dtype=np.int64) % p
    nv = amb.nvars
    if mat.shape != (nv, nv):
        raise ValueError("matrix must be %dx%d" % (nv, nv))
    if mat[: amb.m, amb.m:].any() or mat[amb.m:, : amb.m].any():
        raise ValueError("matrix is not even (mixes parities)")
    if exactlin.rank(mat, p) != nv:
        raise ValueError("matrix is not invertible")

    # cache per column: the even images as coefficient dicts / odd as polys
    even_cols: dict[int, dict[int, int]] = {}
    odd_cols: dict[int, SuperPoly] = {}
    for i in range(1, amb.m + 1):
        even_cols[i] = {j + 1: int(mat[j, i - 1]) for j in range(amb.m) if mat[j, i - 1]}
    for i in range(amb.m + 1, nv + 1):
        col = SuperPoly(amb)
        for j in range(amb.m, nv):
            if mat[j, i - 1]:
                col = col + SuperPoly.variable(amb, j + 1).scale(int(mat[j, i - 1]))
        odd_cols[i] = col

    out = SuperPoly(amb)
    for (alpha, u), c in f.terms.items():
        term = SuperPoly.one(amb).scale(c)
        for i, e in enumerate(alpha, start=1):
            if e:
                term = mul(term, _dp_linear(amb, even_cols[i], e))
                if not term:
                    break
        if term:
            for i in u:
                term = mul(term, odd_cols[i])
                if not term:
                    break
        out = out + term
    return out


# ---------------------------------------------------------------------------
# canonical text form
# ---------------------------------------------------------------------------

def serialize(f: SuperPoly) -> str:
    """Canonical text form: terms in monomial order, `c * x(a1,..) ^ u{i1,..}`."""
    if not f.terms:
        return "0"
    parts = []
    for mono in sorted(f.terms, key=mono_sort_key):
        alpha, u = mono
        parts.append("%d * x(%s) ^ u{%s}" % (
            f.terms[mono],
            ",".join(str(e) for e in alpha),
            ",".join(str(i) for i in u),
        ))
    return " + ".join(parts)
