"""Symplectic superspace structure on the degree -1 component.

The degree -1 component of each algebra family carries an odd, nondegenerate,
skew supersymmetric bilinear form: for the HO/SHO ambient the pairing of f
and g is the constant term of the Hamiltonian field of f applied to g, and
for KO/SKO it is the coefficient of the constant in the bracket [f, g].
On the ordered variable basis (x_1 .. x_n | x_{1'} .. x_{n'}) the Gram
matrix is the standard block form [[0, I], [-I, 0]] in both cases.

Parity here is the polynomial parity: the unprimed variables span the even
part, the primed variables the odd part.  This module provides homogeneous
symplectic bases of subspaces, their completion to a full basis, the
(k, s, d0, d1) invariant classifying subspaces up to symplectic isomorphism,
the standard representative subspaces with their companion spaces, and the
lift of an even symplectic matrix to an algebra automorphism by linear
substitution (fixing z in the contact ambients).
"""

from __future__ import annotations

from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .algebras import Algebra, SuperPoly, _coerce_algebra, d_ho
from .dpsuper import apply_witt, substitute_linear
from .exactlin import inv_mod, nullspace, row_basis, rref


class SSDim(NamedTuple):
    """Classifying invariant of a homogeneous subspace.

    ``k`` is half the rank of the restricted form, ``s`` the dimension of a
    maximal isotropic subspace (dim - k), ``d0``/``d1`` the even/odd
    dimensions.  Two homogeneous subspaces of the same space are isomorphic
    as symplectic superspaces exactly when these four numbers agree.
    """

    k: int
    s: int
    d0: int
    d1: int


class SympSpace:
    """The degree -1 component with its odd bilinear form."""

    def __init__(self, d: "Algebra | str") -> None:
        alg = _coerce_algebra(d)
        self.alg = alg
        self.n = alg.n
        self.p = alg.p
        self.dim = 2 * alg.n
        self.gram = self._build_gram()

    def _build_gram(self) -> np.ndarray:
        alg = self.alg
        vecs = [alg.variable(j) for j in range(1, self.dim + 1)]
        g = np.zeros((self.dim, self.dim), dtype=np.int64)
        for a, va in enumerate(vecs):
            for b, vb in enumerate(vecs):
                if alg.kind == "H":
                    val = apply_witt(d_ho(va), vb)
                else:
                    val = alg.bracket(va, vb)
                g[a, b] = val.terms.get(((0,) * alg.n, ()), 0) if val else 0
        return g % self.p

    # -- identity ----------------------------------------------------------

    @property
    def key(self) -> tuple:
        return (self.alg.kind, self.n, self.p)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SympSpace):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "<SympSpace of %s>" % self.alg.descriptor

    # -- vectors -----------------------------------------------------------

    def vector(self, f: "SuperPoly | Sequence[int] | np.ndarray") -> np.ndarray:
        """Coefficient vector of an element of the degree -1 component."""
        if isinstance(f, SuperPoly):
            vec = np.zeros(self.dim, dtype=np.int64)
            n = self.n
            for (alpha, u), c in f.terms.items():
                if sum(alpha) == 1 and not u:
                    vec[alpha.index(1)] = c
                elif sum(alpha) == 0 and len(u) == 1 and u[0] <= 2 * n:
                    vec[u[0] - 1] = c
                else:
                    raise ValueError("element is not in the degree -1 component")
            return vec % self.p
        vec = np.asarray(f, dtype=np.int64)
        if vec.shape != (self.dim,):
            raise ValueError("vector length must be %d" % self.dim)
        return vec % self.p

    def poly(self, vec: "Sequence[int] | np.ndarray") -> SuperPoly:
        vec = self.vector(vec)
        out = SuperPoly.zero(self.alg.ambient)
        for j, c in enumerate(vec, start=1):
            if c:
                out = out + self.alg.variable(j).scale(int(c))
        return out

    def form(self, v, w) -> int:
        """The bilinear form, through the algebra bracket."""
        v = self.vector(v)
        w = self.vector(w)
        return int(v @ self.gram @ w % self.p)

    def parity_split(self, vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        even = vec.copy()
        even[self.n:] = 0
        odd = vec.copy()
        odd[: self.n] = 0
        return even, odd


def form_value(sp: SympSpace, v, w) -> int:
    return sp.form(v, w)


class HomSubspace:
    """Homogeneous subspace of a SympSpace: even basis rows, then odd rows."""

    def __init__(self, parent: SympSpace, vectors: Iterable = ()) -> None:
        self.parent = parent
        n, p = parent.n, parent.p
        evens, odds = [], []
        for v in vectors:
            vec = parent.vector(v)
            e, o = parent.parity_split(vec)
            if e.any() and o.any():
                raise ValueError("subspace vectors must be parity homogeneous")
            (evens if e.any() else odds if o.any() else evens).append(vec)
        self.even_rows = row_basis(np.array([v for v in evens if v.any()], dtype=np.int64)
                                   .reshape(-1, 2 * n), p)
        self.odd_rows = row_basis(np.array([v for v in odds if v.any()], dtype=np.int64)
                                  .reshape(-1, 2 * n), p)

    @classmethod
    def from_polys(cls, parent: SympSpace, polys: Iterable[SuperPoly]) -> "HomSubspace":
        return cls(parent, [parent.vector(f) for f in polys])

    @property
    def sdim(self) -> tuple[int, int]:
        return (len(self.even_rows), len(self.odd_rows))

    @property
    def dim(self) -> int:
        return len(self.even_rows) + len(self.odd_rows)

    @property
    def basis(self) -> list[np.ndarray]:
        return [row for row in self.even_rows] + [row for row in self.odd_rows]

    def member(self, v) -> bool:
        vec = self.parent.vector(v)
        stacked = np.vstack([self.even_rows, self.odd_rows, vec.reshape(1, -1)])
        return len(row_basis(stacked, self.parent.p)) == self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomSubspace):
            return NotImplemented
        return (self.parent == other.parent
                and np.array_equal(self.even_rows, other.even_rows)
                and np.array_equal(self.odd_rows, other.odd_rows))

    def __hash__(self) -> int:
        return hash((self.parent.key, self.even_rows.tobytes(), self.odd_rows.tobytes()))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "<HomSubspace sdim=%s>" % (self.sdim,)


def symplectic_basis(u: HomSubspace) -> tuple[list[np.ndarray], SSDim]:
    """Homogeneous basis with Gram pairs (b_i, b_{i'}) = 1 for i < k, else 0.

    Returns the basis ordered evens-then-odds, paired vectors first in each
    parity group, together with the (k, s, d0, d1) invariant.  Pair selection
    scans the current bases row-major, so the output is canonical for
    canonical input bases.
    """
    sp = u.parent
    p = sp.p
    evens = [row.copy() for row in u.even_rows]
    odds = [row.copy() for row in u.odd_rows]
    pairs_e: list[np.ndarray] = []
    pairs_o: list[np.ndarray] = []
    while True:
        found = None
        for i, e in enumerate(evens):
            for j, o in enumerate(odds):
                if sp.form(e, o):
                    found = (i, j)
                    break
            if found is not None:
                break
        if found is None:
            break
        i, j = found
        e0 = evens.pop(i)
        o0 = odds.pop(j)
        o0 = o0 * inv_mod(sp.form(e0, o0), p) % p
        evens = [(e - sp.form(e, o0) * e0) % p for e in evens]
        odds = [(o - sp.form(e0, o) * o0) % p for o in odds]
        pairs_e.append(e0)
        pairs_o.append(o0)
    k = len(pairs_e)
    d0 = k + len(evens)
    d1 = k + len(odds)
    basis = pairs_e + evens + pairs_o + odds
    return basis, SSDim(k, d0 + d1 - k, d0, d1)


def ssdim(u: HomSubspace) -> SSDim:
    return symplectic_basis(u)[1]


def sym_isomorphic(u: HomSubspace, v: HomSubspace) -> bool:
    if u.parent != v.parent:
        raise ValueError("subspaces live in different symplectic spaces")
    return ssdim(u) == ssdim(v)


def orthogonal(u: HomSubspace) -> HomSubspace:
    """The space of vectors pairing to zero with all of u."""
    sp = u.parent
    rows = [sp.gram @ b % sp.p for b in u.basis]
    if not rows:
        return HomSubspace(sp, np.eye(sp.dim, dtype=np.int64))
    sol = nullspace(np.array(rows, dtype=np.int64), sp.p)
    vecs: list[np.ndarray] = []
    for v in sol:
        e, o = sp.parity_split(v % sp.p)
        if e.any():
            vecs.append(e)
        if o.any():
            vecs.append(o)
    return HomSubspace(sp, vecs)


def _solve(amat: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """One solution of A x = b over F_p (raises if inconsistent)."""
    rows, cols = amat.shape
    aug = np.hstack([amat, b.reshape(-1, 1)]) % p
    red, rk = rref(aug, p)
    x = np.zeros(cols, dtype=np.int64)
    for row in red[:rk]:
        piv = int(np.argmax(row != 0))
        if piv == cols:
            raise ValueError("inconsistent linear system")
        x[piv] = row[cols]
    # verify (free variables set to zero)
    if ((amat @ x - b) % p).any():
        raise ValueError("inconsistent linear system")
    return x


def extend_basis(u: HomSubspace) -> list[np.ndarray]:
    """Completion of u's symplectic basis to one of the whole space.

    Returns 2n vectors, the n even ones first, with (b_i, b_{n+j}) the
    identity pattern.  The vectors of u occupy the leading slots of each
    parity group (paired vectors first, then u's isotropic evens; u's
    isotropic odds sit at the mirrored odd positions), matching the layout
    of the standard subspaces.
    """
    sp = u.parent
    n, p = sp.n, sp.p
    basis, ssd = symplectic_basis(u)
    k, d0 = ssd.k, ssd.d0
    pe, ie = basis[:k], basis[k:d0]
    po, io = basis[d0:d0 + k], basis[d0 + k:]
    t, r = len(ie), len(io)
    fixed_odds = po + io

    # even-half unknowns: form(eps, o) = eps . (G[:n] @ o)
    if fixed_odds:
        wmat = np.array([(sp.gram[:n] @ o) % p for o in fixed_odds], dtype=np.int64)
    else:
        wmat = np.zeros((0, n), dtype=np.int64)

    def lift_even(half: np.ndarray) -> np.ndarray:
        full = np.zeros(2 * n, dtype=np.int64)
        full[:n] = half % p
        return full

    # partners for u's isotropic odds: pair 1 with the matching io, 0 otherwise
    partners = []
    for j in range(r):
        target = np.zeros(k + r, dtype=np.int64)
        target[k + j] = 1
        partners.append(lift_even(_solve(wmat, target, p)))

    # tail evens: orthogonal to every fixed odd, extending u's isotropic evens
    if fixed_odds:
        hom = nullspace(wmat, p)
    else:
        hom = np.eye(n, dtype=np.int64)
    chosen = row_basis(np.array([e[:n] for e in ie], dtype=np.int64).reshape(-1, n), p)
    tail: list[np.ndarray] = []
    for cand in hom:
        if len(chosen) + len(tail) == n - k - r:
            break
        stacked = np.vstack([chosen.reshape(-1, n)] + [v[:n] for v in tail]
                            + [cand.reshape(1, -1)])
        if len(row_basis(stacked, p)) > len(chosen) + len(tail):
            tail.append(lift_even(cand))
    if len(chosen) + len(tail) != n - k - r:
        raise RuntimeError("internal defect: even completion fell short")

    evens = pe + ie + partners + tail
    # odds are the unique duals: solve F X = I with F[i,j] = form(evens[i], x_{j'})
    fmat = np.array([(e @ sp.gram[:, n:]) % p for e in evens], dtype=np.int64)
    aug = np.hstack([fmat, np.eye(n, dtype=np.int64)])
    red, rk = rref(aug, p)
    if rk != n or not np.array_equal(red[:, :n], np.eye(n, dtype=np.int64)):
        raise RuntimeError("internal defect: even block is singular")
    inv = red[:, n:]
    odds = []
    for j in range(n):
        full = np.zeros(2 * n, dtype=np.int64)
        full[n:] = inv[:, j] % p
        odds.append(full)

    out = evens + odds
    for i in range(n):
        for j in range(n):
            want = 1 if i == j else 0
            if sp.form(out[i], out[n + j]) != want:
                raise RuntimeError("internal defect: completed Gram is not canonical")
    for j, o in enumerate(po):
        if not np.array_equal(out[n + j], o):
            raise RuntimeError("internal defect: paired odd vectors moved")
    for j, o in enumerate(io):
        if not np.array_equal(out[n + k + t + j], o):
            raise RuntimeError("internal defect: isotropic odd vectors moved")
    return out


class StandardSubspace(NamedTuple):
    """A standard subspace with its four companion spaces."""

    V: HomSubspace
    V1: HomSubspace
    V2: HomSubspace
    V2bar: HomSubspace
    V3: HomSubspace
    k: int
    t: int
    s: int


def standard_subspace(d: "Algebra | str", k: int, t: int, s: int) -> StandardSubspace:
    """The standard subspace spanned by unit vectors, plus its companions.

    V is spanned by x_i for i in 1..k and k+1..k+t together with x_{i'} for
    i in 1..k and k+t+1..s; the companions split off the paired part (V1),
    the unpaired part (V2), its mirror (V2bar), and the untouched indices
    (V3).
    """
    sp = SympSpace(d)
    n = sp.n
    if not (0 <= k <= s <= n) or not (0 <= t <= s - k):
        raise ValueError("need 0 <= k <= s <= n and 0 <= t <= s - k")
    if k + s == 0:
        raise ValueError("the standard subspace must be nontrivial")

    def unit(i: int) -> np.ndarray:
        v = np.zeros(2 * n, dtype=np.int64)
        v[i - 1] = 1
        return v

    def span(evens: Iterable[int], odds: Iterable[int]) -> HomSubspace:
        vecs = [unit(i) for i in evens] + [unit(n + i) for i in odds]
        return HomSubspace(sp, vecs)

    v = span(range(1, k + t + 1), list(range(1, k + 1)) + list(range(k + t + 1, s + 1)))
    v1 = span(range(1, k + 1), range(1, k + 1))
    v2 = span(range(k + 1, k + t + 1), range(k + t + 1, s + 1))
    v2bar = span(range(k + t + 1, s + 1), range(k + 1, k + t + 1))
    v3 = span(range(s + 1, n + 1), range(s + 1, n + 1))
    return StandardSubspace(v, v1, v2, v2bar, v3, k, t, s)


class LiftedAutomorphism:
    """Algebra automorphism from an even symplectic matrix on degree -1."""

    def __init__(self, d: "Algebra | str", matrix: Iterable) -> None:
        alg = _coerce_algebra(d)
        sp = SympSpace(alg)
        n, p = alg.n, alg.p
        mat = np.asarray(matrix, dtype=np.int64) % p
        if mat.shape != (2 * n, 2 * n):
            raise ValueError("matrix must be %dx%d" % (2 * n, 2 * n))
        if mat[:n, n:].any() or mat[n:, :n].any():
            raise ValueError("matrix is not even (mixes parities)")
        a, dblock = mat[:n, :n], mat[n:, n:]
        if not np.array_equal(a.T @ dblock % p, np.eye(n, dtype=np.int64)):
            raise ValueError("matrix is not symplectic: need A^T D = I")
        self.alg = alg
        self.space = sp
        self.matrix = mat
        nv = alg.ambient.nvars
        full = np.eye(nv, dtype=np.int64)
        full[:n, :n] = a
        full[alg.ambient.m:alg.ambient.m + n, alg.ambient.m:alg.ambient.m + n] = dblock
        self._subst = full

    def __call__(self, f: SuperPoly) -> SuperPoly:
        return substitute_linear(f, self._subst)

    def apply_vector(self, v) -> np.ndarray:
        vec = self.space.vector(v)
        return (self.matrix @ vec) % self.alg.p

    def apply_subspace(self, u: HomSubspace) -> HomSubspace:
        if u.parent != self.space:
            raise ValueError("subspace lives in a different symplectic space")
        return HomSubspace(self.space, [self.apply_vector(b) for b in u.basis])


def lift_automorphism(d: "Algebra | str", matrix: Iterable) -> LiftedAutomorphism:
    return LiftedAutomorphism(d, matrix)


def paired_matrix(a: Iterable, p: int) -> np.ndarray:
    """The even symplectic matrix diag(A, (A^T)^{-1}) built from an even block."""
    amat = np.asarray(a, dtype=np.int64) % p
    n = amat.shape[0]
    if amat.shape != (n, n):
        raise ValueError("even block must be square")
    aug = np.hstack([amat.T, np.eye(n, dtype=np.int64)])
    red, _ = rref(aug, p)
    if not np.array_equal(red[:, :n], np.eye(n, dtype=np.int64)):
        raise ValueError("even block is not invertible")
    out = np.zeros((2 * n, 2 * n), dtype=np.int64)
    out[:n, :n] = amat
    out[n:, n:] = red[:, n:]
    return out


def standardizing_map(u: HomSubspace) -> tuple[StandardSubspace, LiftedAutomorphism]:
    """The standard subspace with u's invariant and a lift carrying it onto u.

    Returns (std, phi) with phi(std.V) = u; phi sends the standard basis to
    the completion produced by extend_basis, so the companion spaces of std
    transport to companions of u along the same map.
    """
    sp = u.parent
    if u.dim == 0:
        raise ValueError("the trivial subspace has no standard representative")
    ssd = ssdim(u)
    k, t, s = ssd.k, ssd.d0 - ssd.k, ssd.s
    std = standard_subspace(sp.alg, k, t, s)
    full = extend_basis(u)
    mat = np.array(full, dtype=np.int64).T % sp.p
    phi = LiftedAutomorphism(sp.alg, mat)
    if phi.apply_subspace(std.V) != u:
        raise RuntimeError("internal defect: carrier map misses the target")
    return std, phi
