import pytest

from toralconj import exact_linalg as xl
from toralconj import ideal_theory as it
from toralconj import polys
from toralconj.errors import UnsupportedError

from conftest import A2, B2, rng, random_unimodular

P2 = (-1, -8, -2, 1)  # x^3 - 2x^2 - 8x - 1


@pytest.fixture(scope="module")
def nf():
    return it.NumberField.create(P2)


@pytest.fixture(scope="module")
def pair():
    I, v, nf_ = it.eigen_ideal(A2)
    J, w, _ = it.eigen_ideal(B2)
    return I, v, J, w, nf_


def test_number_field_rejects_reducible():
    with pytest.raises(UnsupportedError):
        it.NumberField.create((1, -2, 1))
    with pytest.raises(UnsupportedError):
        it.NumberField.create((0, 1))


# ------------------------------------------------------------------ elements

def test_elem_mul_basics(nf):
    b = it.FieldElement.beta(nf)
    one = it.FieldElement.from_int(nf, 1)
    x = it.FieldElement.make(nf, (3, -2, 5), 7)
    assert x.mul(one).num == x.num and x.mul(one).den == x.den
    # beta * beta^2 = beta^3 = 2 beta^2 + 8 beta + 1 for this polynomial
    b2 = b.mul(b)
    assert b.mul(b2).num == (1, 8, 2)


def test_elem_inverse(nf):
    for coords, den in (((1, 0, 0), 1), ((0, 1, 0), 1), ((3, -2, 5), 7)):
        z = it.FieldElement.make(nf, coords, den)
        w = z.inverse()
        assert z.mul(w).num == (1, 0, 0) and z.mul(w).den == 1


def test_reduce_poly_high_degree(nf):
    # beta^6 reduced two ways: ((beta^3)^2) and reduce_poly of x^6
    b = it.FieldElement.beta(nf)
    b3 = b.mul(b).mul(b)
    direct = nf.reduce_poly([0, 0, 0, 0, 0, 0, 1])
    assert b3.mul(b3).num == direct


# ------------------------------------------------------------------ eigen ideal

def test_eigen_ideal_companion_is_full_ring(pair):
    I, v, J, w, nf_ = pair
    assert (I.mat, I.den) == (xl.identity(3), 1)
    # v A = beta v re-derived through an independent linear-algebra check:
    # each coordinate column of v A equals coords of beta * v_j
    beta = it.FieldElement.beta(nf_)
    for j in range(3):
        acc = it.FieldElement.from_int(nf_, 0)
        for i in range(3):
            acc = acc.add(v[i].mul_int(A2[i][j]))
        assert acc.sub(v[j].mul(beta)).is_zero()


def test_eigen_ideal_B_full_rank(pair):
    _, _, J, w, nf_ = pair
    assert len(J.mat) == 3
    assert J.is_subset(it.FractionalIdeal.z_beta(nf_))


def test_eigen_ideal_transport(rng):
    # eigen ideal of a conjugate matrix is equivalent (same class)
    A = A2
    U = random_unimodular(rng)
    B = xl.mat_mul(xl.mat_mul(U, A), xl.unimodular_inverse(U))
    I, _, nf_ = it.eigen_ideal(A)
    J, _, _ = it.eigen_ideal(B)
    # both Z[beta]-classes: multiplier rings agree
    assert it.multiplier_ring(I) == it.multiplier_ring(J)


# ------------------------------------------------------------------ products / colons

def test_ideal_product_principal(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    z = it.FieldElement.make(nf, (2, 1, 0))
    w = it.FieldElement.make(nf, (0, 0, 3))
    lhs = it.ideal_product(zb.scale(z), zb.scale(w))
    rhs = zb.scale(z.mul(w))
    assert lhs == rhs


def test_ideal_product_with_ring(pair):
    I, _, J, _, nf_ = pair
    zb = it.FractionalIdeal.z_beta(nf_)
    assert it.ideal_product(J, zb) == J


def test_colon_contains_ring(pair):
    I, _, J, _, nf_ = pair
    II = it.colon_ideal(I, I)
    assert it.FractionalIdeal.z_beta(nf_).is_subset(II)
    JJ = it.colon_ideal(J, J)
    assert it.FractionalIdeal.z_beta(nf_).is_subset(JJ)


def test_colon_scaling(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    z = it.FieldElement.make(nf, (1, 2, 0))
    assert it.colon_ideal(zb.scale(z), zb) == zb.scale(z)


def test_colon_product_adjunction(pair):
    I, _, J, _, _ = pair
    X = it.colon_ideal(I, J)  # {z : z J <= I}
    assert it.ideal_product(X, J).is_subset(I)


# ------------------------------------------------------------------ multiplier rings

def test_multiplier_rings_equal_z_beta(pair):
    I, _, J, _, nf_ = pair
    zb = it.FractionalIdeal.z_beta(nf_)
    assert it.multiplier_ring(I) == zb
    assert it.multiplier_ring(J) == zb


def test_multiplier_ring_scale_invariance(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    base = zb
    for coords in ((2, 0, 0), (1, 1, 0), (0, 3, 1), (5, 0, 2), (1, -1, 1)):
        z = it.FieldElement.make(nf, coords)
        assert it.multiplier_ring(base.scale(z)) == it.multiplier_ring(base)


# ------------------------------------------------------------------ weak equivalence

def _nested_pair(pair):
    I, v, J, w, nf_ = pair
    scale = 1
    I2, v2 = I, v
    while not I2.is_subset(J):
        scale += 1
        I2 = I.scale_int(scale)
        v2 = tuple(x.mul_int(scale) for x in v)
    return I2, v2, J, w, nf_


def test_weak_equivalence_self(pair):
    I, _, _, _, _ = pair
    we = it.weak_equivalence(I, I)
    assert we.equivalent


def test_weak_equivalence_principal_scalings(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    for coords in ((2, 0, 0), (1, 1, 0), (0, 1, 1)):
        z = it.FieldElement.make(nf, coords)
        we = it.weak_equivalence(zb, zb.scale(z))
        assert we.equivalent


def test_weak_equivalence_example2(pair):
    I2, _, J, _, _ = _nested_pair(pair)
    we = it.weak_equivalence(I2, J)
    assert we.equivalent
    # all three identities re-verified here, independently of the routine
    assert it.ideal_product(I2, we.X) == J
    assert it.ideal_product(J, we.Y) == I2
    assert it.ideal_product(we.X, we.Y) == it.multiplier_ring(I2)


# ------------------------------------------------------------------ principality

def test_principal_search_trivial(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    res = it.principal_search(zb, 1)
    assert res.found
    two = zb.scale_int(2)
    res2 = it.principal_search(two, 2)
    assert res2.found
    assert it.multiplier_ring(two).scale(res2.generator) == two


def test_principal_search_example2_fails(pair):
    I2, _, J, _, _ = _nested_pair(pair)
    X = it.colon_ideal(J, I2)
    res = it.principal_search(X, 8)
    assert not res.found
    assert res.bound == 8


# ------------------------------------------------------------------ two generators, bezout, X_g

def test_two_generator_trivial(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    two = it.FieldElement.from_int(nf, 2)
    gamma = it.two_generator_rep(zb, two, bound=2)
    assert gamma is not None
    # 2 O + gamma O = O requires gamma to complete 2 to the whole ring
    a, b = it.solve_bezout(two, gamma, zb)
    assert a.mul(two).add(b.mul(gamma)).sub(it.FieldElement.from_int(nf, 1)).is_zero()


def test_xg_pipeline_example2(pair):
    I2, v2, J, w, nf_ = _nested_pair(pair)
    X = it.colon_ideal(J, I2)
    for gs in ("x+1", "x-1", "x^2+1"):
        g = polys.parse(gs)
        alpha = it.FieldElement.from_poly(nf_, g)
        assert X.contains(alpha)
        gamma = it.two_generator_rep(X, alpha, bound=6)
        assert gamma is not None
        O = it.multiplier_ring(X)
        a, b = it.solve_bezout(alpha, gamma, O)
        assert a.mul(alpha).add(b.mul(gamma)).sub(it.FieldElement.from_int(nf_, 1)).is_zero()
        Xg = it.xg_matrix(A2, B2, I2, J, g, gamma, v2, w)
        assert xl.mat_mul(Xg, A2) == xl.mat_mul(B2, Xg)
        assert xl.det(Xg) != 0
        iso = it.induced_bf_isomorphism(A2, B2, g, Xg)
        assert iso.is_isomorphism()


def test_xg_identity_case(pair):
    I, v, _, _, nf_ = pair
    one = it.FieldElement.from_int(nf_, 1)
    Xg = it.xg_matrix(A2, A2, I, I, (0, 1), one, v, v)
    assert Xg == xl.identity(3)


def test_beta_closure_idempotent(pair):
    I, _, J, _, _ = pair
    for ideal in (I, J):
        again = it.FractionalIdeal.normalize(ideal.nf, ideal.mat, ideal.den)
        assert again == ideal


def test_theorem_desk_form_full_family(pair):
    # whenever weak equivalence holds and a two-generator representation is
    # found for every screen polynomial, each induced BF map is an
    # isomorphism -- matching the screen pass on this pair
    from toralconj.bf_invariants import default_family

    I2, v2, J, w, nf_ = _nested_pair(pair)
    assert it.weak_equivalence(I2, J).equivalent
    X = it.colon_ideal(J, I2)
    for g in default_family(A2, B2):
        alpha = it.FieldElement.from_poly(nf_, g)
        assert not alpha.is_zero()
        assert X.contains(alpha)
        gamma = it.two_generator_rep(X, alpha, bound=6)
        assert gamma is not None, f"no two-generator rep for {polys.to_str(g)}"
        Xg = it.xg_matrix(A2, B2, I2, J, g, gamma, v2, w)
        iso = it.induced_bf_isomorphism(A2, B2, g, Xg)
        assert iso.is_isomorphism(), f"induced map not an isomorphism for {polys.to_str(g)}"


def test_inverse_ideal_identity(pair):
    # I I^-1 = O(I) for an invertible ideal (maximal-order case)
    _, _, J, _, nf_ = pair
    O = it.multiplier_ring(J)
    Jinv = it.colon_ideal(O, J)
    assert it.ideal_product(J, Jinv) == O


def test_multiplier_of_ring_is_ring(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    assert it.colon_ideal(zb, zb) == it.multiplier_ring(zb) == zb


def test_weak_equivalence_symmetric(pair):
    I2, _, J, _, _ = _nested_pair(pair)
    fwd = it.weak_equivalence(I2, J)
    bwd = it.weak_equivalence(J, I2)
    assert fwd.equivalent == bwd.equivalent
    # the canonical witnesses swap roles
    assert fwd.X == bwd.Y and fwd.Y == bwd.X


def test_two_generator_alpha_one(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    one = it.FieldElement.from_int(nf, 1)
    gamma = it.two_generator_rep(zb, one, bound=2)
    assert gamma is not None  # anything in the ring completes 1 O = O
    a, b = it.solve_bezout(one, gamma, zb)
    assert a.mul(one).add(b.mul(gamma)).sub(one).is_zero()


def test_bezout_with_zero_gamma(nf):
    zb = it.FractionalIdeal.z_beta(nf)
    one = it.FieldElement.from_int(nf, 1)
    zero = it.FieldElement.from_int(nf, 0)
    a, b = it.solve_bezout(one, zero, zb)
    assert a.mul(one).sub(one).is_zero()


def test_xg_on_conjugate_pair(rng):
    # transported pair: the construction must intertwine and induce
    # isomorphisms exactly as in the inequivalent case
    U = random_unimodular(rng)
    B = xl.mat_mul(xl.mat_mul(U, A2), xl.unimodular_inverse(U))
    I, v, nf_ = it.eigen_ideal(A2)
    J, w, _ = it.eigen_ideal(B)
    scale = 1
    I2, v2 = I, v
    while not I2.is_subset(J):
        scale += 1
        I2 = I.scale_int(scale)
        v2 = tuple(x.mul_int(scale) for x in v)
    X = it.colon_ideal(J, I2)
    g = polys.parse("x+1")
    alpha = it.FieldElement.from_poly(nf_, g)
    gamma = it.two_generator_rep(X, alpha, bound=6)
    assert gamma is not None
    Xg = it.xg_matrix(A2, B, I2, J, g, gamma, v2, w)
    assert xl.mat_mul(Xg, A2) == xl.mat_mul(B, Xg)
    iso = it.induced_bf_isomorphism(A2, B, g, Xg)
    assert iso.is_isomorphism()
