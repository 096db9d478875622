"""Number-field side of the invariants: arithmetic in Q(beta) for a monic
irreducible defining polynomial, eigenvector fractional ideals, multiplier
rings, colon ideals, weak equivalence, bounded principality and
two-generator searches, and the intertwining matrix built from a
two-generator representation.

Ideals are full-rank Z-lattices in power-basis coordinates, stored as an
integer HNF matrix over a positive denominator so equality is bit-exact.
"""

import itertools
from dataclasses import dataclass
from math import gcd

from . import exact_linalg as xl
from . import polys
from .errors import InternalInconsistencyError, UnsupportedError

Mat = xl.Mat
Vec = xl.Vec


@dataclass(frozen=True)
class NumberField:
    """Q(beta) for a fixed monic defining polynomial p of degree n >= 2."""

    p: polys.Poly
    n: int
    beta_n_row: Vec           # coordinates of beta^n in the power basis

    @classmethod
    def create(cls, p: polys.Poly, assume_irreducible: bool = False) -> "NumberField":
        n = polys.degree(p)
        if n < 2 or not polys.is_monic(p):
            raise UnsupportedError("defining polynomial must be monic of degree >= 2")
        if n <= 4:
            if not polys.is_irreducible_deg_le4(p):
                raise UnsupportedError(f"reducible polynomial {polys.to_str(p)}")
        elif not assume_irreducible:
            raise UnsupportedError("degree > 4 needs caller-asserted irreducibility")
        elif polys.integer_roots(p):
            raise UnsupportedError("asserted-irreducible polynomial has a linear factor")
        return cls(p=p, n=n, beta_n_row=tuple(-c for c in p[:-1]))

    def reduce_poly(self, coeffs) -> Vec:
        """Coordinates of an integer polynomial in beta of any degree.

        One top-down pass: each beta^i with i >= n rewrites into strictly
        lower powers via beta^n."""
        work = list(coeffs)
        if len(work) < self.n:
            work += [0] * (self.n - len(work))
        for i in range(len(work) - 1, self.n - 1, -1):
            c = work[i]
            if c:
                base = i - self.n
                for j, r in enumerate(self.beta_n_row):
                    work[base + j] += c * r
            work[i] = 0
        return tuple(work[: self.n])


@dataclass(frozen=True)
class FieldElement:
    """num / den over the power basis 1, beta, ..., beta^(n-1), in lowest terms."""

    nf: NumberField
    num: Vec
    den: int

    @staticmethod
    def make(nf: NumberField, num, den: int = 1) -> "FieldElement":
        num = tuple(int(x) for x in num)
        if len(num) != nf.n:
            raise ValueError("coordinate length mismatch")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = tuple(-x for x in num), -den
        g = den
        for x in num:
            g = gcd(g, x)
        if g > 1:
            num = tuple(x // g for x in num)
            den //= g
        return FieldElement(nf, num, den)

    @staticmethod
    def from_int(nf: NumberField, c: int) -> "FieldElement":
        return FieldElement.make(nf, (c,) + (0,) * (nf.n - 1))

    @staticmethod
    def beta(nf: NumberField) -> "FieldElement":
        return FieldElement.make(nf, (0, 1) + (0,) * (nf.n - 2))

    @staticmethod
    def from_poly(nf: NumberField, g: polys.Poly) -> "FieldElement":
        return FieldElement.make(nf, nf.reduce_poly(list(g)))

    def is_zero(self) -> bool:
        return not any(self.num)

    def add(self, other: "FieldElement") -> "FieldElement":
        num = tuple(a * other.den + b * self.den for a, b in zip(self.num, other.num))
        return FieldElement.make(self.nf, num, self.den * other.den)

    def neg(self) -> "FieldElement":
        return FieldElement(self.nf, tuple(-x for x in self.num), self.den)

    def sub(self, other: "FieldElement") -> "FieldElement":
        return self.add(other.neg())

    def mul(self, other: "FieldElement") -> "FieldElement":
        conv = [0] * (2 * self.nf.n - 1)
        for i, a in enumerate(self.num):
            if a == 0:
                continue
            for j, b in enumerate(other.num):
                conv[i + j] += a * b
        return FieldElement.make(self.nf, self.nf.reduce_poly(conv), self.den * other.den)

    def mul_int(self, c: int) -> "FieldElement":
        return FieldElement.make(self.nf, tuple(c * x for x in self.num), self.den)

    def inverse(self) -> "FieldElement":
        """Solve w z = 1 as an exact linear system."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        M, zden = multiplication_matrix(self)
        rhs = (zden,) + (0,) * (self.nf.n - 1)
        num, den = xl.solve_right_rational(xl.transpose(M), rhs)
        return FieldElement.make(self.nf, num, den)

    def to_str(self) -> str:
        terms = []
        for i, c in enumerate(self.num):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 and i > 0 else str(abs(c))
            sign = "-" if c < 0 else ("+" if terms else "")
            if i == 0:
                body = str(abs(c))
            elif i == 1:
                body = f"{mag}b"
            else:
                body = f"{mag}b^{i}"
            terms.append(sign + body)
        body = "".join(terms) if terms else "0"
        return body if self.den == 1 else f"({body})/{self.den}"


def multiplication_matrix(z: FieldElement) -> tuple[Mat, int]:
    """Row-action matrix M with coords(w z) = coords(w) @ M / den."""
    nf = z.nf
    rows = []
    for i in range(nf.n):
        conv = [0] * (i + nf.n)
        for j, c in enumerate(z.num):
            conv[i + j] = c
        rows.append(nf.reduce_poly(conv))
    return tuple(rows), z.den


@dataclass(frozen=True)
class FractionalIdeal:
    """Full-rank Z-lattice in K closed under multiplication by beta.

    Lattice = {v @ mat / den : v integral}, mat in HNF, den > 0, and
    gcd(content(mat), den) = 1, so equality is plain tuple comparison.
    """

    nf: NumberField
    mat: Mat
    den: int

    @staticmethod
    def normalize(nf: NumberField, rows: Mat, den: int, check_beta: bool = True) -> "FractionalIdeal":
        if den <= 0:
            raise ValueError("denominator must be positive")
        basis = xl.hnf_basis(rows)
        if len(basis) != nf.n:
            raise ValueError("ideal lattice is not full rank")
        g = den
        for r in basis:
            for x in r:
                g = gcd(g, x)
        if g > 1:
            basis = tuple(tuple(x // g for x in r) for r in basis)
            den //= g
        ideal = FractionalIdeal(nf=nf, mat=basis, den=den)
        if check_beta and not ideal.is_beta_closed():
            raise ValueError("lattice is not closed under multiplication by beta")
        return ideal

    @staticmethod
    def from_elements(nf: NumberField, gens: list[FieldElement]) -> "FractionalIdeal":
        """Z[beta]-module generated by the elements: span of each generator
        times the power basis."""
        den = 1
        for g in gens:
            den = den * g.den // gcd(den, g.den)
        rows = []
        beta = FieldElement.beta(nf)
        for g in gens:
            cur = g
            for _ in range(nf.n):
                rows.append(tuple(x * (den // cur.den) for x in cur.num))
                cur = cur.mul(beta)
        return FractionalIdeal.normalize(nf, tuple(rows), den)

    @staticmethod
    def z_beta(nf: NumberField) -> "FractionalIdeal":
        return FractionalIdeal.normalize(nf, xl.identity(nf.n), 1, check_beta=False)

    def basis_elements(self) -> list[FieldElement]:
        return [FieldElement.make(self.nf, row, self.den) for row in self.mat]

    def contains(self, z: FieldElement) -> bool:
        scaled = [x * self.den for x in z.num]
        if any(s % z.den for s in scaled):
            return False
        target = tuple(s // z.den for s in scaled)
        return xl.lattice_membership(self.mat, target) is not None

    def is_beta_closed(self) -> bool:
        beta = FieldElement.beta(self.nf)
        return all(self.contains(b.mul(beta)) for b in self.basis_elements())

    def contains_one(self) -> bool:
        return self.contains(FieldElement.from_int(self.nf, 1))

    def is_subset(self, other: "FractionalIdeal") -> bool:
        return all(other.contains(b) for b in self.basis_elements())

    def scale_int(self, c: int) -> "FractionalIdeal":
        if c == 0:
            raise ValueError("scaling by zero")
        return FractionalIdeal.normalize(
            self.nf, xl.mat_scale(self.mat, abs(c)), self.den, check_beta=False
        )

    def scale(self, z: FieldElement) -> "FractionalIdeal":
        M, zden = multiplication_matrix(z)
        return FractionalIdeal.normalize(
            self.nf, xl.mat_mul(self.mat, M), self.den * zden, check_beta=False
        )

    def to_data(self) -> dict:
        return {"basis": [list(r) for r in self.mat], "den": self.den}


def ideal_product(I: FractionalIdeal, J: FractionalIdeal) -> FractionalIdeal:
    """HNF span of all pairwise basis products."""
    prods = [a.mul(b) for a in I.basis_elements() for b in J.basis_elements()]
    den = 1
    for z in prods:
        den = den * z.den // gcd(den, z.den)
    rows = tuple(tuple(x * (den // z.den) for x in z.num) for z in prods)
    return FractionalIdeal.normalize(I.nf, rows, den, check_beta=False)


def colon_ideal(I: FractionalIdeal, J: FractionalIdeal) -> FractionalIdeal:
    """(I : J) = {z in K : z J <= I}: intersection over the basis of J of the
    preimages of I under multiplication."""
    current: tuple[Mat, int] | None = None
    for b in J.basis_elements():
        M, mden = multiplication_matrix(b)
        inv, invden = xl.invert_rational(M)
        rows = xl.mat_scale(xl.mat_mul(I.mat, inv), mden)
        den = I.den * invden
        g = den
        for r in rows:
            for x in r:
                g = gcd(g, x)
        lat = (tuple(tuple(x // g for x in r) for r in rows), den // g)
        if current is None:
            current = lat
        else:
            cd = current[1] * lat[1] // gcd(current[1], lat[1])
            inter = xl.lattice_intersection(
                xl.mat_scale(current[0], cd // current[1]),
                xl.mat_scale(lat[0], cd // lat[1]),
            )
            g2 = cd
            for r in inter:
                for x in r:
                    g2 = gcd(g2, x)
            current = (tuple(tuple(x // g2 for x in r) for r in inter), cd // g2)
    assert current is not None
    return FractionalIdeal.normalize(I.nf, current[0], current[1], check_beta=False)


def multiplier_ring(I: FractionalIdeal) -> FractionalIdeal:
    """O(I) = (I : I), with the ring axioms and Z[beta]-containment verified."""
    O = colon_ideal(I, I)
    if not O.contains_one():
        raise InternalInconsistencyError("multiplier ring misses 1")
    if not FractionalIdeal.z_beta(I.nf).is_subset(O):
        raise InternalInconsistencyError("multiplier ring misses Z[beta]")
    if ideal_product(O, O) != O:
        raise InternalInconsistencyError("multiplier ring not multiplicatively closed")
    return O


def eigen_vector(A: Mat, nf: NumberField) -> tuple[FieldElement, ...]:
    """Row vector v over K with v A = beta v: the first nonzero row of
    adj(beta I - A), assembled from the Horner matrices of char_poly(A)."""
    n = len(A)
    p = xl.char_poly(A)
    if p != nf.p:
        raise ValueError("field polynomial does not match the matrix")
    # adj(xI - A) = sum_j x^j B_j with B_(n-1) = I and B_(j-1) = A B_j + p_j I
    Bs = [xl.identity(n)]
    for j in range(n - 1, 0, -1):
        Bs.append(xl.mat_add(xl.mat_mul(A, Bs[-1]), xl.mat_scale(xl.identity(n), p[j])))
    Bs.reverse()
    for i in range(n):
        coords = [
            FieldElement.make(nf, tuple(Bs[j][i][col] for j in range(n)))
            for col in range(n)
        ]
        if any(not c.is_zero() for c in coords):
            v = tuple(coords)
            _verify_eigen(v, A, nf)
            return v
    raise InternalInconsistencyError("adjugate of beta I - A vanished entirely")


def _verify_eigen(v, A: Mat, nf: NumberField) -> None:
    beta = FieldElement.beta(nf)
    for j in range(len(A)):
        lhs = FieldElement.from_int(nf, 0)
        for i in range(len(A)):
            lhs = lhs.add(v[i].mul_int(A[i][j]))
        if not lhs.sub(v[j].mul(beta)).is_zero():
            raise InternalInconsistencyError("eigenvector identity v A = beta v failed")


def eigen_ideal(A: Mat, assume_irreducible: bool = False) -> tuple[FractionalIdeal, tuple[FieldElement, ...], NumberField]:
    """Fractional ideal spanned by the entries of a beta-eigenvector of A,
    made primitive inside Z[beta]; returns (ideal, eigenvector, field).

    The span of the entries is automatically beta-closed because
    beta v_i = (v A)_i is an integer combination of the entries.
    """
    p = xl.char_poly(A)
    nf = NumberField.create(p, assume_irreducible=assume_irreducible)
    v = eigen_vector(A, nf)
    den = 1
    for c in v:
        den = den * c.den // gcd(den, c.den)
    rows = [tuple(x * (den // c.den) for x in c.num) for c in v]
    g = 0
    for r in rows:
        for x in r:
            g = gcd(g, x)
    # rescale the eigenvector so its entries are primitive integral coordinates
    v_prim = tuple(FieldElement.make(nf, tuple(x // g for x in r)) for r in rows)
    ideal = FractionalIdeal.normalize(nf, tuple(c.num for c in v_prim), 1)
    span = FractionalIdeal.from_elements(nf, list(v_prim))
    if (span.mat, span.den) != (ideal.mat, ideal.den):
        raise InternalInconsistencyError("eigen ideal span mismatch")
    return ideal, v_prim, nf


@dataclass(frozen=True)
class WeakEquivalence:
    equivalent: bool
    reason: str | None
    X: FractionalIdeal | None
    Y: FractionalIdeal | None

    def to_data(self) -> dict:
        out: dict = {"weakly_equivalent": self.equivalent}
        if self.reason:
            out["reason"] = self.reason
        if self.X is not None:
            out["X"] = self.X.to_data()
        if self.Y is not None:
            out["Y"] = self.Y.to_data()
        return out


def weak_equivalence(I: FractionalIdeal, J: FractionalIdeal) -> WeakEquivalence:
    """Test I X = J, J Y = I, X Y = O for X = (J : I), Y = (I : J).

    All three identities are verified exactly; none is assumed from the
    others.  Requires O(I) = O(J) first.
    """
    OI = multiplier_ring(I)
    OJ = multiplier_ring(J)
    if (OI.mat, OI.den) != (OJ.mat, OJ.den):
        return WeakEquivalence(False, "ring_mismatch", None, None)
    X = colon_ideal(J, I)
    Y = colon_ideal(I, J)
    checks = {
        "IX=J": ideal_product(I, X) == J,
        "JY=I": ideal_product(J, Y) == I,
        "XY=O": ideal_product(X, Y) == OI,
    }
    if all(checks.values()):
        return WeakEquivalence(True, None, X, Y)
    failed = ",".join(k for k, ok in checks.items() if not ok)
    return WeakEquivalence(False, f"identity_failed:{failed}", X, Y)


@dataclass(frozen=True)
class PrincipalResult:
    found: bool
    generator: FieldElement | None
    bound: int
    tried: int

    def to_data(self) -> dict:
        out = {"principal": self.found, "bound": self.bound, "candidates": self.tried}
        if self.generator is not None:
            out["generator"] = self.generator.to_str()
        return out


def principal_search(X: FractionalIdeal, bound: int) -> PrincipalResult:
    """Bounded search for z with z O(X) = X over integer combinations of the
    basis of X with coefficients in [-bound, bound].

    Absence within the bound is reported as not-found, never as a proof of
    non-principality.
    """
    O = multiplier_ring(X)
    basis = X.basis_elements()
    n = len(basis)
    tried = 0
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=n):
        if not any(coeffs):
            continue
        nz = next(c for c in coeffs if c)
        if nz < 0:
            continue  # z and -z generate the same ideal
        tried += 1
        z = FieldElement.from_int(X.nf, 0)
        for c, b in zip(coeffs, basis):
            if c:
                z = z.add(b.mul_int(c))
        if O.scale(z) == X:
            return PrincipalResult(True, z, bound, tried)
    return PrincipalResult(False, None, bound, tried)


def two_generator_rep(
    X: FractionalIdeal, alpha: FieldElement, bound: int = 6
) -> FieldElement | None:
    """gamma in X with alpha O + gamma O = X, by bounded enumeration over
    basis combinations of X; None if the bound is exhausted.

    Requires alpha a nonzero element of X and X invertible in O = O(X).
    """
    if alpha.is_zero() or not X.contains(alpha):
        raise ValueError("alpha must be a nonzero element of X")
    O = multiplier_ring(X)
    Xinv = colon_ideal(O, X)
    if ideal_product(X, Xinv) != O:
        raise ValueError("X is not invertible in its multiplier ring")
    alpha_O = O.scale(alpha)
    basis = X.basis_elements()
    for coeffs in xl.shell_vectors(len(basis), bound):
        if not any(coeffs):
            continue
        nz = next(c for c in coeffs if c)
        if nz < 0:
            continue
        gamma = FieldElement.from_int(X.nf, 0)
        for c, b in zip(coeffs, basis):
            if c:
                gamma = gamma.add(b.mul_int(c))
        if gamma.is_zero():
            continue
        if _ideal_sum(alpha_O, O.scale(gamma)) == X:
            return gamma
    return None


def _ideal_sum(a: FractionalIdeal, b: FractionalIdeal) -> FractionalIdeal:
    cd = a.den * b.den // gcd(a.den, b.den)
    rows = xl.mat_scale(a.mat, cd // a.den) + xl.mat_scale(b.mat, cd // b.den)
    return FractionalIdeal.normalize(a.nf, rows, cd, check_beta=False)



def solve_bezout(
    alpha: FieldElement, gamma: FieldElement, O: FractionalIdeal
) -> tuple[FieldElement, FieldElement]:
    """a, b in O with a alpha + b gamma = 1, by an exact integer linear solve
    over the 2n coordinates; verified by multiplication before return."""
    nf = O.nf
    obasis = O.basis_elements()
    rows = [b.mul(alpha) for b in obasis] + [b.mul(gamma) for b in obasis]
    den = 1
    for z in rows:
        den = den * z.den // gcd(den, z.den)
    M = tuple(tuple(x * (den // z.den) for x in z.num) for z in rows)
    target = (den,) + (0,) * (nf.n - 1)
    sol = xl.solve_left(M, target)
    if sol is None:
        raise InternalInconsistencyError(
            "Bezout system unsolvable although 1 lies in alpha O + gamma O"
        )
    coeffs = sol[0]
    n = len(obasis)
    a = FieldElement.from_int(nf, 0)
    bb = FieldElement.from_int(nf, 0)
    for c, b in zip(coeffs[:n], obasis):
        if c:
            a = a.add(b.mul_int(c))
    for c, b in zip(coeffs[n:], obasis):
        if c:
            bb = bb.add(b.mul_int(c))
    check = a.mul(alpha).add(bb.mul(gamma))
    if not check.sub(FieldElement.from_int(nf, 1)).is_zero():
        raise InternalInconsistencyError("Bezout solution failed verification")
    return a, bb


def xg_matrix(
    A: Mat,
    B: Mat,
    I: FractionalIdeal,
    J: FractionalIdeal,
    g: polys.Poly,
    gamma: FieldElement,
    v: tuple[FieldElement, ...],
    w: tuple[FieldElement, ...],
) -> Mat:
    """Integer matrix X with gamma v = w X (entrywise over K), verified to
    satisfy X A = B X and det X != 0.

    v and w must be the eigenvector tuples whose entries span I and J; the
    induced map on the finite quotients is checked by the caller.
    """
    n = len(A)
    wden = 1
    for e in w:
        wden = wden * e.den // gcd(wden, e.den)
    wmat = tuple(tuple(x * (wden // e.den) for x in e.num) for e in w)
    cols = []
    for j in range(n):
        gv = gamma.mul(v[j])
        # solve sum_i w_i X_ij = gv_j over the power-basis coordinates:
        # (wmat/wden)^T x = gv.num / gv.den
        lhs = xl.transpose(wmat)
        target = tuple(x * wden for x in gv.num)
        num, den = xl.solve_right_rational(lhs, target)
        if any(x % (den * gv.den) for x in num):
            raise InternalInconsistencyError("X_g solution is not integral")
        cols.append(tuple(x // (den * gv.den) for x in num))
    X = xl.transpose(tuple(cols))
    if xl.mat_mul(X, A) != xl.mat_mul(B, X):
        raise InternalInconsistencyError("X_g does not intertwine: X A != B X")
    if xl.det(X) == 0:
        raise InternalInconsistencyError("X_g is singular")
    return X


def induced_bf_isomorphism(A: Mat, B: Mat, g: polys.Poly, X: Mat):
    """The module isomorphism of the finite quotients induced by an
    intertwiner X with X A = B X.

    m -> m X is well defined from the B-side quotient to the A-side quotient
    because X g(A) = g(B) X; it is verified bijective and then inverted, so
    the returned map goes A-side -> B-side.
    """
    from .finite_modules import map_from_ambient, quotient

    PA = quotient(xl.eval_poly_at_matrix(g, A), A)
    PB = quotient(xl.eval_poly_at_matrix(g, B), B)
    back = map_from_ambient(PB, PA, X)
    if back is None or not back.is_isomorphism():
        raise InternalInconsistencyError(
            "X_g does not induce a bijection of the finite quotients"
        )
    return back.inverse()
