import pytest

from toralconj import exact_linalg as xl
from toralconj import tower as tw
from toralconj.errors import ResourceLimitError, ToralConjError

from conftest import A1, A2, B1, random_hyperbolic, random_unimodular

I3 = xl.identity(3)


@pytest.fixture(scope="module")
def towA1():
    return tw.build_tower(A1, 4)


@pytest.fixture(scope="module")
def towA2():
    return tw.build_tower(A2, 4)


# ------------------------------------------------------------------ construction

def test_build_tower_orders(towA1, towA2):
    assert [lv.module.order for lv in towA1.levels][:2] == [16, 512]
    assert towA2.levels[0].module.order == 10


def test_build_tower_rejects_non_hyperbolic():
    with pytest.raises(ToralConjError):
        tw.build_tower(I3, 2)
    with pytest.raises(ResourceLimitError):
        tw.build_tower(A1, 9)


def test_single_level_tower():
    t = tw.build_tower(A1, 1)
    assert t.depth == 1
    assert list(t.epis) == [(1, 1)]


def test_nesting_on_generators(towA1, towA2):
    for tower in (towA1, towA2):
        for k in range(1, tower.depth):
            upper = tower.level(k + 1)
            lower = tower.level(k)
            M = xl.mat_sub(upper.power, I3)
            for row in M:
                assert xl.lattice_membership(lower.lattice, row) is not None


def test_epi_compatibility(towA1):
    for m in range(1, 5):
        for k in range(1, m + 1):
            for l in range(1, k + 1):
                lhs = towA1.epis[(m, k)].compose(towA1.epis[(k, l)])
                assert lhs.mat == towA1.epis[(m, l)].mat


# ------------------------------------------------------------------ lemma identities

def test_factorization_identity():
    assert tw.verify_factorization(A1, 1)
    assert tw.verify_factorization(A1, 2)
    assert tw.verify_factorization(A2, 3)


def test_factorization_random_hyperbolic(rng):
    for _ in range(5):
        A = random_hyperbolic(rng)
        for k in (1, 2, 3):
            assert tw.verify_factorization(A, k)


def test_filtered_from_below():
    for A in (A1, A2):
        for k1, k2 in ((1, 1), (1, 2), (2, 2)):
            assert tw.verify_filtered(A, k1, k2)


# ------------------------------------------------------------------ coherent elements

def test_iota_homomorphism(towA1):
    m1, m2 = (1, -2, 3), (0, 4, -1)
    s = tuple(a + b for a, b in zip(m1, m2))
    c1, c2 = tw.iota(towA1, m1), tw.iota(towA1, m2)
    cs = tw.iota(towA1, s)
    for k in range(towA1.depth):
        mod = towA1.levels[k].module
        added = tuple(
            (a + b) % d for a, b, d in zip(c1.levels[k], c2.levels[k], mod.factors)
        )
        assert added == cs.levels[k]


def test_iota_zero_and_gamma(towA1):
    z = tw.iota(towA1, (0, 0, 0))
    assert all(not any(lv) for lv in z.levels)
    assert tw.gamma_action(towA1, z) == z
    m = (1, 0, 0)
    assert tw.gamma_action(towA1, tw.iota(towA1, m)) == tw.iota(towA1, xl.vec_mat(m, A1))


def test_gamma_rejects_incoherent(towA1):
    c = tw.iota(towA1, (1, 0, 0))
    broken = tw.CoherentElement(c.levels[:-1] + (tuple(x + 1 for x in c.levels[-1]),))
    with pytest.raises(ValueError):
        tw.gamma_action(towA1, broken)


# ------------------------------------------------------------------ injectivity probe

def test_probe_all_escape_at_depth_4(towA1):
    rep = tw.injectivity_probe(towA1, 3)
    assert rep["all_escape"]
    assert rep["inconclusive_at_depth"] == []


def test_probe_vectors_stuck_at_low_depth():
    # (0,0,4) lies in both N_1 and N_2 for the first example matrix, so a
    # depth-2 probe at bound 4 must report it as inconclusive
    t2 = tw.build_tower(A1, 2)
    rep = tw.injectivity_probe(t2, 4)
    assert not rep["all_escape"]
    assert [0, 0, 4] in rep["inconclusive_at_depth"]


# ------------------------------------------------------------------ level isomorphism families

def test_level_iso_refutation_example1(towA1):
    towB1 = tw.build_tower(B1, 2)
    out = tw.level_iso_family(tw.build_tower(A1, 2), towB1, 2)
    assert out.kind == "not_found_at_level"
    assert out.level == 2
    assert out.witness["kind"] == "canonical_quotient"
    assert out.witness["divisor"] == "x+1"
    assert out.witness["mismatch"]["left"] == [4, 8]
    assert out.witness["mismatch"]["right"] == [2, 16]


def test_level_iso_canonical_quotient_oracle():
    # the certificate is sound because Z^3 (A^2 - I) <= Z^3 (A + I)
    plus = xl.hnf_basis(xl.mat_add(A1, I3))
    sq = xl.mat_sub(xl.mat_mul(A1, A1), I3)
    for row in sq:
        assert xl.lattice_membership(plus, row) is not None


def test_level_iso_self(towA1):
    out = tw.level_iso_family(towA1, towA1, 2)
    assert out.kind == "found"
    for m in out.family.maps:
        assert m.mat == xl.identity(m.source.rank)


def test_level_iso_conjugate_pair(rng):
    A = A1
    U = random_unimodular(rng)
    B = xl.mat_mul(xl.mat_mul(U, A), xl.unimodular_inverse(U))
    tA, tB = tw.build_tower(A, 3), tw.build_tower(B, 3)
    out = tw.level_iso_family(tA, tB, 3)
    assert out.kind == "found"
    assert out.family.verify()


# ------------------------------------------------------------------ delta lattices

def test_delta_identity_family(towA1):
    out = tw.level_iso_family(towA1, towA1, 2)
    delta = tw.delta_lattice(towA1, towA1, out.family, 2)
    # Delta = {(m, m~) : m - m~ in N_2}
    N2 = towA1.level(2).lattice
    for i in range(3):
        e = tuple(1 if j == i else 0 for j in range(3))
        assert xl.lattice_membership(delta.basis, e + e) is not None
    for nu in N2:
        assert xl.lattice_membership(delta.basis, (0, 0, 0) + nu) is not None
        assert xl.lattice_membership(delta.basis, nu + (0, 0, 0)) is not None


def test_delta_nesting_and_classification_conjugate(rng):
    A = A1
    U = random_unimodular(rng)
    B = xl.mat_mul(xl.mat_mul(U, A), xl.unimodular_inverse(U))
    tA, tB = tw.build_tower(A, 3), tw.build_tower(B, 3)
    C = xl.unimodular_inverse(U)
    fam = tw.transport_family(tA, tB, C)
    deltas = [tw.delta_lattice(tA, tB, fam, k) for k in (1, 2, 3)]
    for d1, d2 in zip(deltas, deltas[1:]):
        for row in d2.basis:
            assert xl.lattice_membership(d1.basis, row) is not None
    cls = tw.classify_delta(tA, tB, fam, deltas, search_bound=5)
    assert cls.kind == "graph_of_conjugator"
    got = cls.conjugator
    assert xl.mat_mul(A, got) == xl.mat_mul(got, B)
    assert xl.det(got) in (1, -1)


def test_classify_example2_not_graph():
    from conftest import B2

    tA, tB = tw.build_tower(A2, 3), tw.build_tower(B2, 3)
    out = tw.level_iso_family(tA, tB, 3)
    assert out.kind == "found"
    deltas = [tw.delta_lattice(tA, tB, out.family, k) for k in (1, 2, 3)]
    cls = tw.classify_delta(tA, tB, out.family, deltas, search_bound=5)
    assert cls.kind != "graph_of_conjugator"


def test_transport_family_identity(towA1):
    fam = tw.transport_family(towA1, towA1, I3)
    assert fam.verify()
    deltas = [tw.delta_lattice(towA1, towA1, fam, k) for k in (1, 2)]
    cls = tw.classify_delta(towA1, towA1, fam, deltas, search_bound=2)
    assert cls.kind == "graph_of_conjugator"
    assert xl.det(cls.conjugator) in (1, -1)


def test_probe_e1_escapes_at_level_1(towA1):
    # the first standard basis vector is not in N_1 for this matrix
    assert xl.lattice_membership(towA1.level(1).lattice, (1, 0, 0)) is None


def test_delta_depth_zero_is_everything(towA1):
    fam = tw.transport_family(towA1, towA1, I3, depth=2)
    d0 = tw.delta_lattice(towA1, towA1, fam, 0)
    assert d0.basis == xl.identity(6)


def test_classify_identity_certificate_is_identity(towA1):
    fam = tw.transport_family(towA1, towA1, I3, depth=2)
    deltas = [tw.delta_lattice(towA1, towA1, fam, k) for k in (1, 2)]
    cls = tw.classify_delta(towA1, towA1, fam, deltas, search_bound=2)
    assert cls.kind == "graph_of_conjugator"
    assert cls.conjugator == I3
