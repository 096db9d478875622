"""Exact integer matrix kernels: normal forms, determinants, adjugates,
characteristic polynomials, resultants, and lattice arithmetic.

Matrices are immutable tuples of row tuples of Python ints; row convention
throughout (lattices are row spans, vectors act as v @ M).  No floating point
anywhere.
"""

import itertools
import os
from fractions import Fraction
from math import gcd

from . import polys
from .errors import ResourceLimitError

Vec = tuple[int, ...]
Mat = tuple[Vec, ...]

DEFAULT_MAX_BITS = 1_000_000


def max_bits() -> int:
    raw = os.environ.get("TORALCONJ_MAX_BITS", "")
    try:
        return int(raw) if raw else DEFAULT_MAX_BITS
    except ValueError:
        return DEFAULT_MAX_BITS


def guard_bits(M: Mat) -> None:
    """Fail loudly instead of stalling on runaway entry growth."""
    cap = max_bits()
    for row in M:
        for x in row:
            if x.bit_length() > cap:
                raise ResourceLimitError(
                    f"matrix entry exceeds TORALCONJ_MAX_BITS={cap} bits"
                )


def mat(rows) -> Mat:
    out = tuple(tuple(int(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix")
    return out


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Mat:
    return tuple((0,) * c for _ in range(r))


def dims(M: Mat) -> tuple[int, int]:
    return (len(M), len(M[0]) if M else 0)


def is_square(M: Mat) -> bool:
    return all(len(r) == len(M) for r in M)


def transpose(M: Mat) -> Mat:
    return tuple(zip(*M)) if M else ()


def mat_add(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A: Mat, B: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_neg(A: Mat) -> Mat:
    return tuple(tuple(-x for x in r) for r in A)


def mat_scale(A: Mat, c: int) -> Mat:
    return tuple(tuple(c * x for x in r) for r in A)


def mat_mul(A: Mat, B: Mat) -> Mat:
    if dims(A)[1] != dims(B)[0]:
        raise ValueError("dimension mismatch")
    Bt = transpose(B)
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A
    )


def vec_mat(v: Vec, M: Mat) -> Vec:
    if len(v) != len(M):
        raise ValueError("dimension mismatch")
    n = len(M[0]) if M else 0
    return tuple(sum(v[i] * M[i][j] for i in range(len(v))) for j in range(n))


def mat_pow(M: Mat, e: int) -> Mat:
    if e < 0:
        raise ValueError("negative power")
    result = identity(len(M))
    base = M
    while e:
        if e & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base) if e > 1 else base
        e >>= 1
    return result


def det(M: Mat) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not is_square(M):
        raise ValueError("determinant of non-square matrix")
    n = len(M)
    if n == 0:
        return 1
    a = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _faddeev_leverrier(M: Mat) -> tuple[polys.Poly, Mat]:
    """Characteristic polynomial (monic, lowest degree first) and the Horner
    matrix B with adj(M) = (-1)^(n+1) B."""
    n = len(M)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    B = identity(n)
    prev = B
    for k in range(1, n + 1):
        C = mat_mul(M, prev)
        t = sum(C[i][i] for i in range(n))
        if t % k != 0:
            raise AssertionError("Faddeev-LeVerrier trace division not exact")
        coeffs[n - k] = -(t // k)
        B = prev
        prev = mat_add(C, mat_scale(identity(n), coeffs[n - k]))
    # prev is now p(M), which must vanish by Cayley-Hamilton
    if any(any(x != 0 for x in row) for row in prev):
        raise AssertionError("Cayley-Hamilton verification failed")
    return tuple(coeffs), B


def char_poly(M: Mat) -> polys.Poly:
    """Monic characteristic polynomial det(xI - M), lowest degree first."""
    if not is_square(M):
        raise ValueError("characteristic polynomial of non-square matrix")
    return _faddeev_leverrier(M)[0]


def adjugate(M: Mat) -> Mat:
    """Adjugate with the identity M adj(M) = det(M) I verified exactly."""
    if not is_square(M):
        raise ValueError("adjugate of non-square matrix")
    n = len(M)
    if n == 0:
        return ()
    _, B = _faddeev_leverrier(M)
    adj = B if (n + 1) % 2 == 0 else mat_neg(B)
    d = det(M)
    if mat_mul(M, adj) != mat_scale(identity(n), d):
        raise AssertionError("adjugate identity failed")
    return adj


def eval_poly_at_matrix(g: polys.Poly, M: Mat) -> Mat:
    """Horner evaluation of g at a square matrix."""
    n = len(M)
    acc = zeros(n, n)
    for c in reversed(g):
        acc = mat_add(mat_mul(acc, M), mat_scale(identity(n), c))
    return acc


def matrix_power_factorial(M: Mat, k: int, cap: int = 6) -> Mat:
    """M^(k!) via P_1 = M, P_k = P_(k-1)^k, with binary powering per step."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > cap:
        raise ResourceLimitError(f"factorial power cap exceeded: k={k} > {cap}")
    P = M
    for j in range(2, k + 1):
        P = mat_pow(P, j)
        guard_bits(P)
    return P


def resultant(p: polys.Poly, g: polys.Poly) -> int:
    """Resultant via the Sylvester determinant (Bareiss underneath).

    For monic p the second argument is first reduced mod p, which leaves the
    value unchanged and keeps the Sylvester matrix small.
    """
    if not p or not g:
        raise ValueError("resultant of zero polynomial")
    if polys.is_monic(p) and polys.degree(g) > polys.degree(p):
        g = polys.divmod_exact(g, p)[1]
        if not g:
            return 0
    m, n = polys.degree(p), polys.degree(g)
    if m == 0:
        return p[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    rows = []
    for i in range(n):  # n rows of p coefficients
        row = [0] * size
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(tuple(row))
    for i in range(m):  # m rows of g coefficients
        row = [0] * size
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(tuple(row))
    return det(tuple(rows))


def discriminant(p: polys.Poly) -> int:
    """disc(p) = (-1)^(n(n-1)/2) res(p, p') / lc(p)."""
    n = polys.degree(p)
    if n < 1:
        raise ValueError("discriminant needs a nonconstant polynomial")
    r = resultant(p, polys.derivative(p))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    val = sign * r
    if val % p[-1] != 0:
        raise AssertionError("discriminant division not exact")
    return val // p[-1]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def hnf(M: Mat) -> tuple[Mat, Mat]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U @ M equal to H stacked over zero
    rows, pivots positive, and entries above each pivot reduced into
    [0, pivot).  H contains only the nonzero rows, so it is the canonical
    basis of the row lattice of M.
    """
    nrows, ncols = dims(M)
    W = [list(r) for r in M]
    U = [list(r) for r in identity(nrows)]
    piv = 0
    pivots: list[int] = []
    for col in range(ncols):
        # clear everything below position piv in this column
        pivot_row = None
        for i in range(piv, nrows):
            if W[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        W[piv], W[pivot_row] = W[pivot_row], W[piv]
        U[piv], U[pivot_row] = U[pivot_row], U[piv]
        for i in range(piv + 1, nrows):
            if W[i][col] == 0:
                continue
            a, b = W[piv][col], W[i][col]
            if b % a == 0:
                q = b // a
                for j in range(ncols):
                    W[i][j] -= q * W[piv][j]
                for j in range(nrows):
                    U[i][j] -= q * U[piv][j]
            else:
                x, y, g = _xgcd(a, b)
                ag, bg = a // g, b // g
                for j in range(ncols):
                    wp, wi = W[piv][j], W[i][j]
                    W[piv][j] = x * wp + y * wi
                    W[i][j] = -bg * wp + ag * wi
                for j in range(nrows):
                    up, ui = U[piv][j], U[i][j]
                    U[piv][j] = x * up + y * ui
                    U[i][j] = -bg * up + ag * ui
        if W[piv][col] < 0:
            W[piv] = [-x for x in W[piv]]
            U[piv] = [-x for x in U[piv]]
        d = W[piv][col]
        for i in range(piv):
            q = W[i][col] // d
            if q:
                for j in range(ncols):
                    W[i][j] -= q * W[piv][j]
                for j in range(nrows):
                    U[i][j] -= q * U[piv][j]
        pivots.append(col)
        piv += 1
    H = tuple(tuple(r) for r in W[:piv])
    return H, tuple(tuple(r) for r in U)


def hnf_basis(M: Mat) -> Mat:
    return hnf(M)[0]


def snf(M: Mat) -> tuple[Vec, Mat, Mat]:
    """Smith normal form of a square matrix: (diag, U, V) with U M V diagonal,
    entries nonnegative and each dividing the next."""
    if not is_square(M):
        raise ValueError("snf of non-square matrix")
    n = len(M)
    W = [list(r) for r in M]
    U = [list(r) for r in identity(n)]
    V = [list(r) for r in identity(n)]

    def row_op(i1, i2, x, y, bg, ag):
        for j in range(n):
            a, b = W[i1][j], W[i2][j]
            W[i1][j] = x * a + y * b
            W[i2][j] = -bg * a + ag * b
        for j in range(n):
            a, b = U[i1][j], U[i2][j]
            U[i1][j] = x * a + y * b
            U[i2][j] = -bg * a + ag * b

    def col_op(j1, j2, x, y, bg, ag):
        for i in range(n):
            a, b = W[i][j1], W[i][j2]
            W[i][j1] = x * a + y * b
            W[i][j2] = -bg * a + ag * b
        for i in range(n):
            a, b = V[i][j1], V[i][j2]
            V[i][j1] = x * a + y * b
            V[i][j2] = -bg * a + ag * b

    for t in range(n):
        # find a nonzero pivot in the trailing submatrix
        found = None
        for i in range(t, n):
            for j in range(t, n):
                if W[i][j] != 0:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i0, j0 = found
        if i0 != t:
            W[t], W[i0] = W[i0], W[t]
            U[t], U[i0] = U[i0], U[t]
        if j0 != t:
            for r in range(n):
                W[r][t], W[r][j0] = W[r][j0], W[r][t]
            for r in range(n):
                V[r][t], V[r][j0] = V[r][j0], V[r][t]
        while True:
            for i in range(t + 1, n):
                if W[i][t] != 0:
                    a, b = W[t][t], W[i][t]
                    if b % a == 0:
                        q = b // a
                        for j in range(n):
                            W[i][j] -= q * W[t][j]
                        for j in range(n):
                            U[i][j] -= q * U[t][j]
                    else:
                        x, y, g = _xgcd(a, b)
                        row_op(t, i, x, y, b // g, a // g)
            for j in range(t + 1, n):
                if W[t][j] != 0:
                    a, b = W[t][t], W[t][j]
                    if b % a == 0:
                        q = b // a
                        for i in range(n):
                            W[i][j] -= q * W[i][t]
                        for i in range(n):
                            V[i][j] -= q * V[i][t]
                    else:
                        x, y, g = _xgcd(a, b)
                        col_op(t, j, x, y, b // g, a // g)
            if all(W[i][t] == 0 for i in range(t + 1, n)) and all(
                W[t][j] == 0 for j in range(t + 1, n)
            ):
                # enforce divisibility of the remaining block by the pivot
                bad = None
                for i in range(t + 1, n):
                    for j in range(t + 1, n):
                        if W[i][j] % W[t][t] != 0:
                            bad = i
                            break
                    if bad:
                        break
                if bad is None:
                    break
                for j in range(n):
                    W[t][j] += W[bad][j]
                for j in range(n):
                    U[t][j] += U[bad][j]
        if W[t][t] < 0:
            for j in range(n):
                W[t][j] = -W[t][j]
            for j in range(n):
                U[t][j] = -U[t][j]
    diag = tuple(W[i][i] for i in range(n))
    return diag, tuple(tuple(r) for r in U), tuple(tuple(r) for r in V)


def unimodular_inverse(U: Mat) -> Mat:
    """Exact inverse of a matrix with determinant +-1."""
    d = det(U)
    if d not in (1, -1):
        raise ValueError("matrix is not unimodular")
    return mat_scale(adjugate(U), d)


def left_kernel(M: Mat) -> Mat:
    """HNF basis of {x : x @ M = 0}."""
    H, U = hnf(M)
    rank = len(H)
    return hnf_basis(U[rank:]) if rank < len(U) else ()


def lattice_membership(basis: Mat, v: Vec) -> Vec | None:
    """Coordinates of v in an HNF row basis, or None when v is not in the
    lattice.  Back-substitution along the pivot staircase."""
    if basis and len(v) != len(basis[0]):
        raise ValueError("dimension mismatch")
    rem = list(v)
    coords = []
    for row in basis:
        col = next(j for j, x in enumerate(row) if x != 0)
        if rem[col] % row[col] != 0:
            return None
        q = rem[col] // row[col]
        coords.append(q)
        if q:
            for j in range(col, len(rem)):
                rem[j] -= q * row[j]
    if any(rem):
        return None
    return tuple(coords)


def solve_left(M: Mat, b: Vec) -> tuple[Vec, Mat] | None:
    """Integer solutions of x @ M = b: (particular, kernel basis) or None."""
    H, U = hnf(M)
    rank = len(H)
    rem = list(b)
    y = [0] * len(U)
    for i, row in enumerate(H):
        col = next(j for j, x in enumerate(row) if x != 0)
        if rem[col] % row[col] != 0:
            return None
        q = rem[col] // row[col]
        y[i] = q
        if q:
            for j in range(col, len(rem)):
                rem[j] -= q * row[j]
    if any(rem):
        return None
    particular = vec_mat(tuple(y), U)
    kernel = hnf_basis(U[rank:]) if rank < len(U) else ()
    return particular, kernel


def lattice_intersection(B1: Mat, B2: Mat) -> Mat:
    """HNF basis of the intersection of two row lattices of equal ambient
    dimension, via the left kernel of the stacked bases."""
    c1 = dims(B1)[1] if B1 else None
    c2 = dims(B2)[1] if B2 else None
    if c1 is not None and c2 is not None and c1 != c2:
        raise ValueError("ambient dimension mismatch")
    if not B1 or not B2:
        return ()
    stacked = B1 + mat_neg(B2)
    kern = left_kernel(stacked)
    rows = [vec_mat(k[: len(B1)], B1) for k in kern]
    return hnf_basis(tuple(rows))


def lattice_sum(B1: Mat, B2: Mat) -> Mat:
    return hnf_basis(B1 + B2)


def congruence_kernel(C: Mat, moduli: Vec) -> Mat:
    """HNF basis of {f : f @ C = 0 mod moduli, columnwise}.

    The j-th column of C is a linear form constrained modulo moduli[j];
    computed as a left kernel with slack rows diag(moduli).
    """
    k, q = dims(C)
    if len(moduli) != q:
        raise ValueError("moduli/columns mismatch")
    if q == 0 or k == 0:
        return identity(k)
    slack = tuple(
        tuple(moduli[i] if j == i else 0 for j in range(q)) for i in range(q)
    )
    kern = left_kernel(C + slack)
    rows = [row[:k] for row in kern]
    return hnf_basis(tuple(rows))


def invert_rational(M: Mat) -> tuple[Mat, int]:
    """Inverse of a nonsingular integer matrix as (integer matrix, denominator),
    i.e. M^-1 = matrix / den with den = det(M) sign-normalized positive."""
    d = det(M)
    if d == 0:
        raise ValueError("singular matrix")
    adj = adjugate(M)
    if d < 0:
        return mat_neg(adj), -d
    return adj, d


def inverse_infinity_norm_bound(M: Mat) -> Fraction:
    """Exact 1 / max-column-abs-sum of M^-1: a lower bound on the infinity
    norm of any nonzero row vector x @ M with x integral."""
    inv, den = invert_rational(M)
    cols = transpose(inv)
    worst = max(sum(abs(x) for x in col) for col in cols)
    return Fraction(den, worst)


def solve_right_rational(M: Mat, rhs: Vec) -> tuple[Vec, int]:
    """Solve M x = rhs over Q for nonsingular M: returns (vector, denominator)."""
    inv, den = invert_rational(M)
    num = vec_mat(rhs, transpose(inv))
    g = 0
    for x in num:
        g = gcd(g, x)
    g = gcd(g, den)
    if g > 1:
        num = tuple(x // g for x in num)
        den //= g
    return num, den


def shell_vectors(rank: int, radius: int):
    """Integer coefficient vectors ordered by max-norm shells (deterministic:
    shell radius ascending, lexicographic within a shell)."""
    for rho in range(radius + 1):
        for c in itertools.product(range(-rho, rho + 1), repeat=rank):
            if c and max(abs(x) for x in c) != rho:
                continue
            if not c and rho != 0:
                continue
            yield c
