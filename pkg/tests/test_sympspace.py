"""Tests for the symplectic superspace structure on the degree -1 component."""

import itertools
import random

import numpy as np
import pytest

from oddcartan.algebras import get_algebra, parse_descriptor
from oddcartan.dpsuper import SuperPoly
from oddcartan.sympspace import (
    HomSubspace,
    SSDim,
    SympSpace,
    extend_basis,
    form_value,
    lift_automorphism,
    orthogonal,
    paired_matrix,
    ssdim,
    standard_subspace,
    standardizing_map,
    sym_isomorphic,
    symplectic_basis,
)

SP4 = SympSpace("HO:4:5")


def unit(sp, i):
    v = np.zeros(sp.dim, dtype=np.int64)
    v[i - 1] = 1
    return v


def random_hom_subspace(sp, rng):
    n, p = sp.n, sp.p
    vecs = []
    for _ in range(rng.randrange(1, n + 1)):
        v = np.zeros(2 * n, dtype=np.int64)
        half = rng.randrange(2)
        for a in range(n):
            v[a + half * n] = rng.randrange(p)
        vecs.append(v)
    return HomSubspace(sp, vecs)


def gram_is_canonical_for(u, basis, k):
    sp = u.parent
    d0 = u.sdim[0]
    evens, odds = basis[:d0], basis[d0:]
    for i, e in enumerate(evens):
        for j, o in enumerate(odds):
            want = 1 if i == j and i < k else 0
            if sp.form(e, o) != want:
                return False
            if sp.form(o, e) != (-want) % sp.p:
                return False
    for a, b in itertools.combinations(evens, 2):
        if sp.form(a, b):
            return False
    for a, b in itertools.combinations(odds, 2):
        if sp.form(a, b):
            return False
    return True


# ---------------------------------------------------------------------------
# the form itself
# ---------------------------------------------------------------------------

def test_gram_matrix_is_standard():
    for desc in ("HO:3:5", "SHO:3:5", "KO:3:5", "SKO:3:5:1", "HO:4:5"):
        sp = SympSpace(desc)
        n = sp.n
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[:n, n:] = np.eye(n, dtype=np.int64)
        want[n:, :n] = (-np.eye(n, dtype=np.int64)) % sp.p
        assert np.array_equal(sp.gram, want)


def test_form_values():
    sp = SympSpace("HO:3:5")
    assert form_value(sp, unit(sp, 1), unit(sp, 4)) == 1
    assert form_value(sp, unit(sp, 4), unit(sp, 1)) == 4  # i.e. -1
    assert form_value(sp, unit(sp, 1), unit(sp, 2)) == 0
    assert form_value(sp, unit(sp, 4), unit(sp, 5)) == 0
    ho = get_algebra("HO", 3, 5)
    assert form_value(sp, ho.variable(1), ho.variable(4)) == 1
    # bilinearity
    assert form_value(sp, unit(sp, 1) + 2 * unit(sp, 2),
                      unit(sp, 4) + 3 * unit(sp, 5)) == (1 + 2 * 3) % 5


def test_form_rejects_non_degree_minus_one():
    sp = SympSpace("HO:3:5")
    ho = get_algebra("HO", 3, 5)
    with pytest.raises(ValueError):
        form_value(sp, ho.monomial((2, 0, 0), ()), ho.variable(1))
    with pytest.raises(ValueError):
        form_value(sp, np.zeros(5, dtype=np.int64), unit(sp, 1))
    sk = SympSpace("SKO:3:5:1")
    sko = get_algebra("SKO", 3, 5, 1)
    z = SuperPoly.monomial(sko.ambient, ((0, 0, 0), (7,)))
    with pytest.raises(ValueError):
        form_value(sk, z, sko.variable(1))


def test_hom_subspace_rejects_mixed_vectors():
    sp = SympSpace("HO:3:5")
    with pytest.raises(ValueError):
        HomSubspace(sp, [unit(sp, 1) + unit(sp, 4)])


# ---------------------------------------------------------------------------
# symplectic bases
# ---------------------------------------------------------------------------

def test_symplectic_basis_examples():
    sp = SympSpace("HO:3:5")
    u = HomSubspace(sp, [unit(sp, 1)])
    basis, sd = symplectic_basis(u)
    assert sd == SSDim(0, 1, 1, 0)
    assert np.array_equal(basis[0], unit(sp, 1))
    u = HomSubspace(sp, [unit(sp, 1), unit(sp, 4)])
    basis, sd = symplectic_basis(u)
    assert sd == SSDim(1, 1, 1, 1)
    assert gram_is_canonical_for(u, basis, 1)
    u = HomSubspace(sp, [unit(sp, 1) + unit(sp, 2), unit(sp, 4)])
    basis, sd = symplectic_basis(u)
    assert sd == SSDim(1, 1, 1, 1)
    assert gram_is_canonical_for(u, basis, 1)


def test_symplectic_basis_standard_subspaces():
    for k in range(0, 5):
        for s in range(k, 5):
            for t in range(0, s - k + 1):
                if k + s == 0:
                    continue
                std = standard_subspace("HO:4:5", k, t, s)
                basis, sd = symplectic_basis(std.V)
                assert sd == SSDim(k, s, k + t, s - t)
                assert gram_is_canonical_for(std.V, basis, k)


def test_symplectic_basis_random_subspaces():
    rng = random.Random(11)
    for _ in range(200):
        u = random_hom_subspace(SP4, rng)
        if u.dim == 0:
            continue
        basis, sd = symplectic_basis(u)
        assert gram_is_canonical_for(u, basis, sd.k)
        assert sd.s == u.dim - sd.k
        assert (sd.d0, sd.d1) == u.sdim
        # determinism: same input, same output
        again, sd2 = symplectic_basis(u)
        assert sd2 == sd
        assert all(np.array_equal(a, b) for a, b in zip(basis, again))


def test_orthogonal_complement_dimension():
    rng = random.Random(12)
    for _ in range(60):
        u = random_hom_subspace(SP4, rng)
        perp = orthogonal(u)
        assert u.dim + perp.dim == SP4.dim
    v = HomSubspace(SP4, [unit(SP4, 1)])
    perp = orthogonal(v)
    assert perp.member(unit(SP4, 1))        # isotropic line
    assert not perp.member(unit(SP4, 5))    # its partner pairs to 1


# ---------------------------------------------------------------------------
# basis extension
# ---------------------------------------------------------------------------

def assert_full_canonical(sp, full):
    n = sp.n
    assert len(full) == 2 * n
    for i in range(n):
        for j in range(n):
            assert sp.form(full[i], full[n + j]) == (1 if i == j else 0)


def test_extend_basis_from_zero():
    sp = SympSpace("HO:3:5")
    full = extend_basis(HomSubspace(sp, []))
    assert_full_canonical(sp, full)
    for i in range(6):
        assert np.array_equal(full[i], unit(sp, i + 1))


def test_extend_basis_examples():
    sp = SympSpace("HO:3:5")
    u = HomSubspace(sp, [unit(sp, 2)])
    full = extend_basis(u)
    assert_full_canonical(sp, full)
    assert np.array_equal(full[0], unit(sp, 2))
    u = HomSubspace(sp, [unit(sp, 1), unit(sp, 4)])
    full = extend_basis(u)
    assert_full_canonical(sp, full)
    assert np.array_equal(full[0], unit(sp, 1))
    assert np.array_equal(full[3], unit(sp, 4))


def test_extend_basis_random():
    rng = random.Random(13)
    for _ in range(80):
        u = random_hom_subspace(SP4, rng)
        full = extend_basis(u)
        assert_full_canonical(SP4, full)
        # the even part of the canonical basis of u leads the even group
        basis, sd = symplectic_basis(u)
        for i in range(sd.d0):
            assert np.array_equal(basis[i], full[i])


# ---------------------------------------------------------------------------
# the classifying invariant
# ---------------------------------------------------------------------------

def test_ssdim_examples():
    sp = SympSpace("HO:3:5")
    a = HomSubspace(sp, [unit(sp, 1)])
    b = HomSubspace(sp, [unit(sp, 2)])
    c = HomSubspace(sp, [unit(sp, 4)])
    assert ssdim(a) == SSDim(0, 1, 1, 0)
    assert sym_isomorphic(a, b)
    assert not sym_isomorphic(a, c)
    d = HomSubspace(sp, [unit(sp, 1), unit(sp, 4)])
    e = HomSubspace(sp, [unit(sp, 1) + unit(sp, 2), unit(sp, 4)])
    assert sym_isomorphic(d, e)


def test_sym_isomorphic_rejects_different_parents():
    a = HomSubspace(SympSpace("HO:3:5"), [unit(SympSpace("HO:3:5"), 1)])
    b = HomSubspace(SP4, [unit(SP4, 1)])
    with pytest.raises(ValueError):
        sym_isomorphic(a, b)


def test_ssdim_same_for_ho_and_ko_parents():
    spk = SympSpace("KO:3:5")
    sph = SympSpace("HO:3:5")
    assert spk == SympSpace("SKO:3:5:2")
    assert spk != sph  # different ambients
    u = HomSubspace(spk, [unit(spk, 1), unit(spk, 4)])
    assert ssdim(u) == SSDim(1, 1, 1, 1)


# ---------------------------------------------------------------------------
# lifted automorphisms
# ---------------------------------------------------------------------------

def random_even_block(n, p, rng):
    while True:
        a = np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)],
                     dtype=np.int64)
        try:
            return paired_matrix(a, p)
        except ValueError:
            continue


def random_block_poly(alg, rng):
    gs = alg.space
    key = rng.choice(list(gs.block_keys()))
    rows = gs.blocks[key]
    vec = np.zeros(alg.lattice.block_size(key), dtype=np.int64)
    for row in rows:
        vec = (vec + rng.randrange(alg.p) * np.asarray(row)) % alg.p
    return alg.lattice.vec_poly(key, vec)


def test_lift_identity():
    phi = lift_automorphism("HO:3:5", np.eye(6, dtype=np.int64))
    ho = get_algebra("HO", 3, 5)
    f = ho.monomial((2, 1, 0), (4, 5))
    assert phi(f) == f


def test_lift_rejects_bad_matrices():
    bad = np.eye(6, dtype=np.int64)
    bad[0, 3] = 1  # mixes parities
    with pytest.raises(ValueError):
        lift_automorphism("HO:3:5", bad)
    notsymp = np.eye(6, dtype=np.int64)
    notsymp[0, 0] = 2  # A^T D != I
    with pytest.raises(ValueError):
        lift_automorphism("HO:3:5", notsymp)
    with pytest.raises(ValueError):
        paired_matrix(np.zeros((3, 3), dtype=np.int64), 5)


def test_lift_preserves_bracket():
    rng = random.Random(14)
    for desc in ("HO:3:5", "SHO:3:5", "KO:3:5", "SKO:3:5:1"):
        alg = get_algebra(*parse_descriptor(desc))
        checked = 0
        while checked < 25:
            phi = lift_automorphism(desc, random_even_block(alg.n, alg.p, rng))
            f = random_block_poly(alg, rng)
            g = random_block_poly(alg, rng)
            if not (f and g):
                continue
            checked += 1
            assert phi(alg.bracket(f, g)) == alg.bracket(phi(f), phi(g))


def test_lift_preserves_form_and_ssdim():
    rng = random.Random(15)
    sp = SP4
    for _ in range(100):
        phi = lift_automorphism("HO:4:5", random_even_block(4, 5, rng))
        v = np.array([rng.randrange(5) for _ in range(8)], dtype=np.int64)
        w = np.array([rng.randrange(5) for _ in range(8)], dtype=np.int64)
        assert sp.form(phi.apply_vector(v), phi.apply_vector(w)) == sp.form(v, w)
        u = random_hom_subspace(sp, rng)
        if u.dim:
            assert ssdim(phi.apply_subspace(u)) == ssdim(u)


def test_lift_fixes_z_and_preserves_kernels():
    sko = get_algebra("SKO", 3, 5, 1)
    rng = random.Random(16)
    phi = lift_automorphism("SKO:3:5:1", random_even_block(3, 5, rng))
    z = SuperPoly.monomial(sko.ambient, ((0, 0, 0), (7,)))
    assert phi(z) == z
    kernel = sko.chain()["SKO''"]
    for f in list(kernel.iter_basis_polys())[:50]:
        assert kernel.member(phi(f))
    sho = get_algebra("SHO", 3, 5)
    psi = lift_automorphism("SHO:3:5", random_even_block(3, 5, rng))
    hkernel = sho.chain()["SHO'"]
    for f in list(hkernel.iter_basis_polys())[:50]:
        assert hkernel.member(psi(f))


# ---------------------------------------------------------------------------
# standard subspaces and transport
# ---------------------------------------------------------------------------

def test_standard_subspace_examples():
    std = standard_subspace("HO:4:5", 1, 0, 1)
    assert std.V == HomSubspace(SP4, [unit(SP4, 1), unit(SP4, 5)])
    assert std.V1 == std.V
    assert std.V2.dim == 0 and std.V2bar.dim == 0
    assert std.V3.sdim == (3, 3)
    assert std.V3.member(unit(SP4, 2)) and std.V3.member(unit(SP4, 6))
    std = standard_subspace("HO:4:5", 0, 1, 1)
    assert std.V == HomSubspace(SP4, [unit(SP4, 1)])
    assert std.V2bar == HomSubspace(SP4, [unit(SP4, 5)])
    with pytest.raises(ValueError):
        standard_subspace("HO:4:5", 0, 0, 0)
    with pytest.raises(ValueError):
        standard_subspace("HO:4:5", 2, 3, 4)  # t > s - k
    with pytest.raises(ValueError):
        standard_subspace("HO:4:5", 3, 0, 2)  # k > s


def test_standard_ssdim():
    std = standard_subspace("HO:4:5", 1, 1, 3)
    assert ssdim(std.V) == SSDim(1, 3, 2, 2)
    assert std.V.dim == 4


def test_standardizing_map_round_trip():
    rng = random.Random(17)
    for _ in range(40):
        u = random_hom_subspace(SP4, rng)
        if u.dim == 0:
            continue
        std, phi = standardizing_map(u)
        assert phi.apply_subspace(std.V) == u
        assert ssdim(std.V) == ssdim(u)
    with pytest.raises(ValueError):
        standardizing_map(HomSubspace(SP4, []))
