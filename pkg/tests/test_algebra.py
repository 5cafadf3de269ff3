import numpy as np
import pytest

from gamevalues.algebra import (ConvergenceError, FiniteGroup, ValidationError,
                                commutator, cyclic_group, eig_sym, group_from_name,
                                polar_unitary, psd_project, symmetric_group)


def compose(g, h):
    return tuple(g[h[i]] for i in range(len(g)))


def test_cyclic_trivial():
    g = cyclic_group(1)
    assert g.table.tolist() == [[0]]
    assert g.identity == 0


def test_cyclic_three():
    g = cyclic_group(3)
    assert g.table[1, 2] == 0
    assert g.inverse[1] == 2
    g.validate()


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8, 12, 24])
def test_cyclic_invariants(n):
    g = cyclic_group(n)
    g.validate()
    assert g.is_latin_square()
    assert g.is_associative()
    assert np.all(g.table[np.arange(n), g.inverse] == g.identity)


def test_symmetric_group_order():
    assert symmetric_group(3).order == 6
    assert symmetric_group(1).order == 1
    assert symmetric_group(4).order == 24


def test_symmetric_group_invariants():
    s4 = symmetric_group(4)
    s4.validate()


def test_symmetric_group_guard():
    with pytest.raises(ValidationError):
        symmetric_group(8)
    with pytest.raises(ValidationError):
        symmetric_group(0)


def test_s3_commuting_pairs():
    s3 = symmetric_group(3)
    t = s3.table
    commuting = sum(1 for a in range(6) for b in range(6) if t[a, b] == t[b, a])
    assert commuting == 18


def test_s3_element_order_is_lexicographic():
    # one-line notation sorted: identity first
    s3 = symmetric_group(3)
    assert s3.identity == 0


def test_commutator_abelian():
    z3 = cyclic_group(3)
    assert commutator(z3, 1, 2) == 0


def test_commutator_self():
    s3 = symmetric_group(3)
    for g in range(6):
        assert commutator(s3, g, g) == s3.identity


def test_commutator_flip_cycle_is_three_cycle():
    # oracle: direct composition of one-line permutations
    s3 = symmetric_group(3)
    import itertools
    elems = sorted(itertools.permutations(range(3)))
    flip = elems.index((0, 2, 1))
    cyc = elems.index((1, 2, 0))
    got = commutator(s3, flip, cyc)
    f, g = elems[flip], elems[cyc]
    finv = tuple(np.argsort(f))
    ginv = tuple(np.argsort(g))
    expected = elems.index(compose(compose(compose(f, g), finv), ginv))
    assert got == expected
    assert got != s3.identity
    # it is a 3-cycle: applying it three times gives the identity
    assert s3.table[got, s3.table[got, got]] == s3.identity


def test_group_json_roundtrip():
    s3 = symmetric_group(3)
    back = FiniteGroup.from_json(s3.to_json())
    assert np.array_equal(back.table, s3.table)


def test_group_from_name():
    assert group_from_name("Z5").order == 5
    assert group_from_name("S3").order == 6
    with pytest.raises(ValidationError):
        group_from_name("Q8")


def test_bad_table_rejected():
    with pytest.raises(ValidationError):
        FiniteGroup(order=2, table=np.array([[0, 0], [0, 0]]))


# -- spectral routines -------------------------------------------------------

def test_eig_identity():
    w, q = eig_sym(np.eye(3))
    assert np.allclose(w, 1.0)


def test_eig_diag_sorted_ascending():
    w, q = eig_sym(np.diag([2.0, -1.0]))
    assert np.allclose(w, [-1.0, 2.0])


def test_eig_random_reconstruction():
    rng = np.random.default_rng(0)
    for trial in range(100):
        n = int(rng.integers(2, 31))
        m = rng.normal(size=(n, n))
        m = m + m.T
        w, q = eig_sym(m)
        assert abs(m.trace() - w.sum()) < 1e-8
        assert np.linalg.norm(m - (q * w) @ q.T) < 1e-8
        assert np.max(np.abs(q.T @ q - np.eye(n))) < 1e-10


def test_eig_matches_lapack_eigenvalues():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 20))
        m = rng.normal(size=(n, n))
        m = m + m.T
        w, _ = eig_sym(m)
        assert np.max(np.abs(w - np.linalg.eigvalsh(m))) < 1e-9


def test_eig_hermitian_embedding():
    rng = np.random.default_rng(3)
    for _ in range(25):
        n = int(rng.integers(2, 12))
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        m = m + m.conj().T
        w, q = eig_sym(m)
        scale = 1.0 + np.max(np.abs(m))
        assert np.max(np.abs(m - (q * w) @ q.conj().T)) <= 1e-10 * scale
        assert np.max(np.abs(q.conj().T @ q - np.eye(n))) <= 1e-10
        assert np.max(np.abs(w - np.linalg.eigvalsh(m))) < 1e-9


def test_eig_rejects_nonsymmetric():
    with pytest.raises(ValidationError):
        eig_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_dimension_guard():
    with pytest.raises(ValidationError):
        eig_sym(np.eye(201))


def test_psd_project_fixed_point():
    rng = np.random.default_rng(5)
    f = rng.normal(size=(6, 6))
    m = f @ f.T
    assert np.max(np.abs(psd_project(m) - m)) < 1e-9


def test_psd_project_diag():
    assert np.allclose(psd_project(np.diag([1.0, -2.0])), np.diag([1.0, 0.0]))
    assert np.allclose(psd_project(-np.eye(2)), 0.0)


def test_psd_project_idempotent_and_nearest():
    rng = np.random.default_rng(9)
    for _ in range(20):
        m = rng.normal(size=(7, 7))
        m = m + m.T
        p = psd_project(m)
        assert np.max(np.abs(psd_project(p) - p)) < 1e-9
        # oracle: spectral clamp through lapack
        w, q = np.linalg.eigh(m)
        nearest = (q * np.maximum(w, 0)) @ q.T
        assert np.linalg.norm(p - nearest) < 1e-9


def test_polar_fixed_point_on_unitary():
    rng = np.random.default_rng(11)
    z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u0, _ = np.linalg.qr(z)
    assert np.max(np.abs(polar_unitary(u0) - u0)) < 1e-10


def test_polar_scalings():
    assert np.allclose(polar_unitary(2 * np.eye(3)), np.eye(3))
    assert np.allclose(polar_unitary(np.diag([3.0, 1.0 + 0j])), np.eye(2))


def test_polar_random():
    rng = np.random.default_rng(13)
    for _ in range(20):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        u = polar_unitary(m)
        assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-9
        p = u.conj().T @ m
        assert np.max(np.abs(p - p.conj().T)) < 1e-9  # positive factor is Hermitian
        assert np.min(np.linalg.eigvalsh((p + p.conj().T) / 2)) > -1e-9


def test_polar_singular_rejected():
    with pytest.raises(ValidationError):
        polar_unitary(np.zeros((3, 3)))
