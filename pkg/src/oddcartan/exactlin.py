"""Exact, deterministic linear algebra over the prime field F_p.

Everything is integer arithmetic on numpy ``int64`` arrays of residues in
``[0, p-1]``; there is no floating point anywhere.  The pivot rule is fixed
(first nonzero column, rows sorted by pivot), so every subspace has one
canonical reduced-row-echelon basis and subspace equality is literal equality
of those bases.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "inv_mod",
    "normalize",
    "rref",
    "rank",
    "row_basis",
    "nullspace",
    "Subspace",
    "subspace_sum",
    "subspace_intersect",
    "eigencomponent_split",
    "EchelonBasis",
]


def inv_mod(a: int, p: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``p``."""
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse mod %d" % p)
    return pow(a, p - 2, p)


def normalize(mat: Iterable, p: int) -> np.ndarray:
    """Coerce to an int64 residue matrix (2-d), reducing mod p."""
    m = np.array(mat, dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return m % p


# ---------------------------------------------------------------------------
# row reduction
# ---------------------------------------------------------------------------

def rref(mat: Iterable, p: int) -> tuple[np.ndarray, int]:
    """Reduced row echelon form over F_p.

    Returns ``(echelon, rank)``; ``echelon`` has the same shape as the input
    (zero rows stay at the bottom).  Pivots are the first nonzero column of
    each surviving row, ascending.
    """
    m = normalize(mat, p).copy()
    nrows, ncols = m.shape
    r = 0
    for c in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if m[i, c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * inv_mod(int(m[r, c]), p)) % p
        col = m[:, c].copy()
        col[r] = 0
        if col.any():
            m = (m - np.outer(col, m[r])) % p
        r += 1
        if r == nrows:
            break
    return m, r


def rank(mat: Iterable, p: int) -> int:
    return rref(mat, p)[1]


def row_basis(mat: Iterable, p: int) -> np.ndarray:
    """Canonical basis (rref, no zero rows) of the row space."""
    m, r = rref(mat, p)
    return m[:r]


def nullspace(mat: Iterable, p: int) -> np.ndarray:
    """Canonical basis of the right null space {v : M v = 0}, as rows."""
    m = normalize(mat, p)
    nrows, ncols = m.shape
    ech, r = rref(m, p)
    pivots = []
    j = 0
    for i in range(r):
        while j < ncols and ech[i, j] == 0:
            j += 1
        pivots.append(j)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, c in enumerate(free):
        basis[k, c] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-ech[i, c]) % p
    # already in rref by construction up to row order; re-reduce for canon
    return row_basis(basis, p) if len(free) else basis


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """Row space of a canonical rref basis over F_p.

    Two subspaces are equal iff (p, ambient_dim, canonical basis) coincide.
    """

    __slots__ = ("p", "ambient_dim", "basis", "_pivots")

    def __init__(self, ambient_dim: int, p: int, vectors: Iterable = ()) -> None:
        self.p = p
        self.ambient_dim = ambient_dim
        vecs = np.array(list(vectors) if not isinstance(vectors, np.ndarray) else vectors,
                        dtype=np.int64)
        if vecs.size == 0:
            self.basis = np.zeros((0, ambient_dim), dtype=np.int64)
        else:
            if vecs.ndim == 1:
                vecs = vecs.reshape(1, -1)
            if vecs.shape[1] != ambient_dim:
                raise ValueError("vector length %d != ambient_dim %d"
                                 % (vecs.shape[1], ambient_dim))
            self.basis = row_basis(vecs, p)
        self._pivots = tuple(int(np.argmax(row != 0)) for row in self.basis)

    # -- basics ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.p == other.p and self.ambient_dim == other.ambient_dim
                and self.basis.shape == other.basis.shape
                and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self) -> int:
        return hash((self.p, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "Subspace(dim=%d, ambient=%d, p=%d)" % (self.dim, self.ambient_dim, self.p)

    # -- membership ---------------------------------------------------------

    def reduce(self, v: Iterable) -> np.ndarray:
        """Residue of v after elimination against the basis."""
        w = np.asarray(v, dtype=np.int64) % self.p
        if w.shape != (self.ambient_dim,):
            raise ValueError("dimension mismatch")
        for row, piv in zip(self.basis, self._pivots):
            cf = w[piv]
            if cf:
                w = (w - cf * row) % self.p
        return w

    def member(self, v: Iterable) -> bool:
        return not self.reduce(v).any()

    def coords(self, v: Iterable):
        """Coefficients of v in the canonical basis, or None if not a member."""
        w = np.asarray(v, dtype=np.int64) % self.p
        if w.shape != (self.ambient_dim,):
            raise ValueError("dimension mismatch")
        coeffs = np.zeros(self.dim, dtype=np.int64)
        for i, (row, piv) in enumerate(zip(self.basis, self._pivots)):
            cf = w[piv]
            if cf:
                coeffs[i] = cf
                w = (w - cf * row) % self.p
        if w.any():
            return None
        return coeffs

    def contains(self, other: "Subspace") -> bool:
        return all(self.member(row) for row in other.basis)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise ValueError("dimension mismatch")
    stacked = np.vstack([a.basis, b.basis]) if a.dim + b.dim else a.basis
    return Subspace(a.ambient_dim, a.p, stacked)


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the left null space of the stacked bases."""
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise ValueError("dimension mismatch")
    if a.dim == 0 or b.dim == 0:
        return Subspace(a.ambient_dim, a.p)
    stacked = np.vstack([a.basis, b.basis])
    # coefficients (x | y) with x*A + y*B = 0  <=>  stacked^T (x|y)^T = 0
    kern = nullspace(stacked.T, a.p)
    vecs = (kern[:, : a.dim] @ a.basis) % a.p if kern.size else kern
    return Subspace(a.ambient_dim, a.p, vecs)


# ---------------------------------------------------------------------------
# eigencomponent splitting
# ---------------------------------------------------------------------------

def eigencomponent_split(
    op: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    x: Iterable,
    eigenvalues: Sequence[int],
    p: int,
) -> list[np.ndarray]:
    """Split x = sum x_i with op(x_i) = lambda_i x_i, lambda_i distinct.

    ``op`` is a matrix or a callable on residue vectors.  Uses the Lagrange
    product  x_i = prod_{j != i} (op - lambda_j) / (lambda_i - lambda_j)
    applied to x; exactness is checked and violations raise ValueError.
    """
    evs = [e % p for e in eigenvalues]
    if len(set(evs)) != len(evs):
        raise ValueError("eigenvalues not pairwise distinct")
    if isinstance(op, np.ndarray):
        mat = op % p

        def apply(v: np.ndarray) -> np.ndarray:
            return (mat @ v) % p
    else:
        apply = op  # type: ignore[assignment]
    x0 = np.asarray(x, dtype=np.int64) % p
    parts: list[np.ndarray] = []
    for i, li in enumerate(evs):
        y = x0.copy()
        for j, lj in enumerate(evs):
            if j == i:
                continue
            y = ((np.asarray(apply(y), dtype=np.int64) - lj * y)
                 * inv_mod(li - lj, p)) % p
        if np.any((np.asarray(apply(y), dtype=np.int64) - li * y) % p):
            raise ValueError("input is not in the claimed sum of eigenspaces")
        parts.append(y)
    if np.any((sum(parts) - x0) % p):
        raise ValueError("components do not sum back to the input")
    return parts


# ---------------------------------------------------------------------------
# incremental echelon basis (the closure workhorse)
# ---------------------------------------------------------------------------

class EchelonBasis:
    """Growable rref basis; add() reports whether the vector was new."""

    __slots__ = ("p", "ambient_dim", "_rows", "_pivots")

    def __init__(self, ambient_dim: int, p: int) -> None:
        self.p = p
        self.ambient_dim = ambient_dim
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._rows)

    def rows(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return np.array(self._rows, dtype=np.int64)

    def reduce(self, v: Iterable) -> np.ndarray:
        w = np.asarray(v, dtype=np.int64) % self.p
        for row, piv in zip(self._rows, self._pivots):
            cf = w[piv]
            if cf:
                w = (w - cf * row) % self.p
        return w

    def contains(self, v: Iterable) -> bool:
        return not self.reduce(v).any()

    def add(self, v: Iterable) -> bool:
        """Insert v into the basis; True iff the dimension grew."""
        w = self.reduce(v)
        nz = np.flatnonzero(w)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        w = (w * inv_mod(int(w[piv]), self.p)) % self.p
        # back-substitute into the existing rows to stay fully reduced
        for i, row in enumerate(self._rows):
            cf = row[piv]
            if cf:
                self._rows[i] = (row - cf * w) % self.p
        at = 0
        while at < len(self._pivots) and self._pivots[at] < piv:
            at += 1
        self._rows.insert(at, w)
        self._pivots.insert(at, piv)
        return True

    def to_subspace(self) -> Subspace:
        return Subspace(self.ambient_dim, self.p, self.rows())
