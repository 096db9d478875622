"""Decision pipeline: orchestrates similarity, the BF screen, direct
unimodular search, the fractional-ideal route, and the tower route into a
single verdict with machine-checkable evidence.

A Conjugate verdict always carries C with A C = C B and det C = +-1,
re-verified at emission; NotConjugate always carries a finite witness that
re-verifies from scratch; everything else is an honest Unknown that embeds
its budgets.
"""

import itertools
from dataclasses import dataclass

from . import exact_linalg as xl
from . import ideal_theory as ideals
from . import polys
from .bf_invariants import default_family, hyperbolicity_check, strong_bf_screen
from .errors import InternalInconsistencyError
from .finite_modules import module_iso_exists, quotient
from .tower import build_tower, classify_delta, delta_lattice, level_iso_family

Mat = xl.Mat
Vec = xl.Vec


@dataclass(frozen=True)
class PipelineConfig:
    family_max_shift: int = 5
    family_max_power: int = 6
    cyclotomic_index: int = 12
    iso_budget: int = 100_000
    tower_depth: int = 4
    unimodular_bound: int = 5
    search_max_candidates: int = 200_000
    principal_bound: int = 8
    two_generator_bound: int = 6
    power_cap: int = 6

    def to_data(self) -> dict:
        return {
            "family_max_shift": self.family_max_shift,
            "family_max_power": self.family_max_power,
            "cyclotomic_index": self.cyclotomic_index,
            "iso_budget": self.iso_budget,
            "tower_depth": self.tower_depth,
            "unimodular_bound": self.unimodular_bound,
            "search_max_candidates": self.search_max_candidates,
            "principal_bound": self.principal_bound,
            "two_generator_bound": self.two_generator_bound,
            "power_cap": self.power_cap,
        }


DEFAULT_CONFIG = PipelineConfig()


def similarity_check(A: Mat, B: Mat) -> bool:
    """Similarity over Q via rational canonical data.

    Characteristic polynomials must agree; for an irreducible one that is
    already decisive, otherwise the full invariant-factor lists of xI - A
    and xI - B (determinantal-divisor quotients over Z[x]) are compared.
    """
    if len(A) != len(B):
        raise ValueError("dimension mismatch")
    pa, pb = xl.char_poly(A), xl.char_poly(B)
    if pa != pb:
        return False
    n = len(A)
    if 2 <= n <= 4 and polys.is_irreducible_deg_le4(pa):
        return True
    return _poly_invariant_factors(A) == _poly_invariant_factors(B)


def _poly_invariant_factors(A: Mat) -> tuple:
    """Invariant factors of xI - A from gcds of k x k polynomial minors."""
    n = len(A)
    entries = {
        (i, j): polys.trim((-A[i][j], 1)) if i == j else polys.trim((-A[i][j],))
        for i in range(n)
        for j in range(n)
    }
    dets = [polys.ONE]
    for k in range(1, n + 1):
        g: polys.Poly = ()
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                minor = _poly_det([[entries[(i, j)] for j in cols] for i in rows])
                g = polys.poly_gcd(g, minor) if g else polys.primitive_part(minor)
                if g == polys.ONE:
                    break
            if g == polys.ONE:
                break
        dets.append(g if g else ())
    factors = []
    for k in range(1, n + 1):
        q, r = polys.divmod_exact(dets[k], dets[k - 1])
        if r != ():
            raise InternalInconsistencyError("determinantal divisors not nested")
        factors.append(q)
    return tuple(f for f in factors if polys.degree(f) >= 1)


def _poly_det(M: list[list[polys.Poly]]) -> polys.Poly:
    """Cofactor-expansion determinant over Z[x]; fine for n <= 4 blocks."""
    k = len(M)
    if k == 1:
        return M[0][0]
    out: polys.Poly = ()
    for j in range(k):
        if M[0][j] == ():
            continue
        sub = [row[:j] + row[j + 1 :] for row in M[1:]]
        term = polys.mul(M[0][j], _poly_det(sub))
        out = polys.add(out, term if j % 2 == 0 else polys.neg(term))
    return out


@dataclass(frozen=True)
class IntertwinerBasis:
    """HNF-reduced basis (vectorized rows) of {C : A C = C B} over Z."""

    n: int
    basis: Mat

    @property
    def rank(self) -> int:
        return len(self.basis)

    def matrix(self, coeffs: Vec) -> Mat:
        v = xl.vec_mat(coeffs, self.basis)
        return tuple(tuple(v[i * self.n + j] for j in range(self.n)) for i in range(self.n))


def intertwiner_lattice(A: Mat, B: Mat) -> IntertwinerBasis:
    """Integer kernel of C -> A C - C B, rows verified to intertwine."""
    n = len(A)
    rows = []
    for k in range(n):
        for l in range(n):
            row = [0] * (n * n)
            for i in range(n):
                for j in range(n):
                    row[i * n + j] = (A[i][k] if l == j else 0) - (B[l][j] if i == k else 0)
            rows.append(tuple(row))
    basis = xl.left_kernel(tuple(rows))
    out = IntertwinerBasis(n=n, basis=basis)
    for r in range(out.rank):
        K = out.matrix(tuple(1 if i == r else 0 for i in range(out.rank)))
        if xl.mat_mul(A, K) != xl.mat_mul(K, B):
            raise InternalInconsistencyError("intertwiner basis row fails A K = K B")
    return out


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    conjugator: Mat | None
    bound: int
    tried: int

    def to_data(self) -> dict:
        out = {"found": self.found, "bound": self.bound, "candidates": self.tried}
        if self.conjugator is not None:
            out["conjugator"] = [list(r) for r in self.conjugator]
        return out


def unimodular_search(
    basis: IntertwinerBasis, bound: int, max_candidates: int = 200_000
) -> SearchOutcome:
    """Enumerate C = sum c_i K_i over max-norm shells |c| <= bound and return
    the first C with det C = +-1, re-verified."""
    tried = 0
    for c in xl.shell_vectors(basis.rank, bound):
        if not any(c):
            continue
        nz = next(x for x in c if x)
        if nz < 0:
            continue  # -C is unimodular iff C is
        if tried >= max_candidates:
            break
        tried += 1
        C = basis.matrix(c)
        if xl.det(C) in (1, -1):
            return SearchOutcome(True, C, bound, tried)
    return SearchOutcome(False, None, bound, tried)



@dataclass(frozen=True)
class Verdict:
    outcome: str                     # "conjugate" | "not_conjugate" | "unknown"
    certificate: Mat | None
    witness: dict | None
    evidence: tuple[dict, ...]
    config: PipelineConfig

    def to_data(self) -> dict:
        out: dict = {"outcome": self.outcome}
        if self.certificate is not None:
            out["certificate"] = [list(r) for r in self.certificate]
        if self.witness is not None:
            out["witness"] = self.witness
        out["evidence"] = list(self.evidence)
        out["config"] = self.config.to_data()
        return out


def _emit_conjugate(A: Mat, B: Mat, C: Mat, evidence, config) -> Verdict:
    if xl.mat_mul(A, C) != xl.mat_mul(C, B):
        raise InternalInconsistencyError("certificate fails A C = C B")
    if xl.det(C) not in (1, -1):
        raise InternalInconsistencyError("certificate determinant is not a unit")
    return Verdict("conjugate", C, None, tuple(evidence), config)


def _emit_not_conjugate(A: Mat, B: Mat, witness: dict, evidence, config) -> Verdict:
    kind = witness.get("kind")
    if kind == "similarity":
        if similarity_check(A, B):
            raise InternalInconsistencyError("similarity witness does not re-verify")
    elif kind == "bf_screen":
        g = polys.parse(witness["g"])
        res = module_iso_exists(
            quotient(xl.eval_poly_at_matrix(g, A), A),
            quotient(xl.eval_poly_at_matrix(g, B), B),
            budget=config.iso_budget,
        )
        if res.verdict != "no":
            raise InternalInconsistencyError("BF witness does not re-verify")
    elif kind == "tower_level":
        detail = witness["detail"]
        if detail["kind"] == "canonical_quotient":
            from .finite_modules import invariant_mismatch

            g = polys.parse(detail["divisor"])
            again = invariant_mismatch(
                quotient(xl.eval_poly_at_matrix(g, A), A),
                quotient(xl.eval_poly_at_matrix(g, B), B),
            )
            if again is None:
                raise InternalInconsistencyError("tower witness does not re-verify")
        else:
            k = witness["level"]
            MA = xl.mat_sub(xl.matrix_power_factorial(A, k, cap=config.power_cap), xl.identity(len(A)))
            MB = xl.mat_sub(xl.matrix_power_factorial(B, k, cap=config.power_cap), xl.identity(len(B)))
            res = module_iso_exists(quotient(MA, A), quotient(MB, B), budget=config.iso_budget)
            if res.verdict != "no":
                raise InternalInconsistencyError("tower witness does not re-verify")
    elif kind == "multiplier_ring":
        ra = ideals.multiplier_ring(ideals.eigen_ideal(A)[0])
        rb = ideals.multiplier_ring(ideals.eigen_ideal(B)[0])
        if (ra.mat, ra.den) == (rb.mat, rb.den):
            raise InternalInconsistencyError("ring witness does not re-verify")
    else:
        raise InternalInconsistencyError(f"unknown witness kind {kind!r}")
    return Verdict("not_conjugate", None, witness, tuple(evidence), config)


def decide(A: Mat, B: Mat, config: PipelineConfig = DEFAULT_CONFIG) -> Verdict:
    """Full decision pipeline; see the package README for the stage order."""
    evidence: list[dict] = []
    if len(A) != len(B) or not xl.is_square(A) or not xl.is_square(B):
        raise ValueError("inputs must be square matrices of equal size")

    if A == B:
        evidence.append({"stage": "identical_inputs"})
        return _emit_conjugate(A, B, xl.identity(len(A)), evidence, config)

    # (1) similarity
    similar = similarity_check(A, B)
    evidence.append(
        {
            "stage": "similarity",
            "similar": similar,
            "char_poly_left": polys.to_str(xl.char_poly(A)),
            "char_poly_right": polys.to_str(xl.char_poly(B)),
        }
    )
    if not similar:
        return _emit_not_conjugate(
            A,
            B,
            {
                "kind": "similarity",
                "char_poly_left": polys.to_str(xl.char_poly(A)),
                "char_poly_right": polys.to_str(xl.char_poly(B)),
            },
            evidence,
            config,
        )

    # (2) hyperbolicity gates
    hyp = hyperbolicity_check(A)
    evidence.append({"stage": "hyperbolicity", "hyperbolic": hyp})

    # (3) strong BF screen
    family = default_family(
        A,
        B,
        max_shift=config.family_max_shift,
        max_power=config.family_max_power,
        cyclotomic_index=config.cyclotomic_index,
    )
    screen = strong_bf_screen(A, B, family, budget=config.iso_budget)
    evidence.append({"stage": "bf_screen", "report": screen.to_data()})
    if screen.outcome == "not_equivalent":
        rec = screen.records[-1]
        return _emit_not_conjugate(
            A,
            B,
            {
                "kind": "bf_screen",
                "g": polys.to_str(screen.witness),
                "left": {"order": rec["order_left"], "invariant_factors": rec["factors_left"]},
                "right": {"order": rec["order_right"], "invariant_factors": rec["factors_right"]},
            },
            evidence,
            config,
        )

    # (4) direct unimodular search in the intertwiner lattice
    lattice = intertwiner_lattice(A, B)
    search = unimodular_search(lattice, config.unimodular_bound, config.search_max_candidates)
    evidence.append({"stage": "unimodular_search", "rank": lattice.rank, "result": search.to_data()})
    if search.found:
        return _emit_conjugate(A, B, search.conjugator, evidence, config)

    # (5) ideal route (irreducible characteristic polynomial only)
    p = xl.char_poly(A)
    irreducible = 2 <= len(A) <= 4 and polys.is_irreducible_deg_le4(p)
    if irreducible and hyp:
        verdict = _ideal_route(A, B, evidence, config)
        if verdict is not None:
            return verdict

    # (6) tower route
    if hyp:
        verdict = _tower_route(A, B, evidence, config)
        if verdict is not None:
            return verdict

    return Verdict("unknown", None, None, tuple(evidence), config)


def _ideal_route(A: Mat, B: Mat, evidence: list, config: PipelineConfig) -> Verdict | None:
    I, v, nf = ideals.eigen_ideal(A)
    J, w, _ = ideals.eigen_ideal(B)
    # arrange I <= J inside Z[beta], rescaling the eigenvector to match
    scale = 1
    I2, v2 = I, v
    while not I2.is_subset(J):
        scale += 1
        I2 = I.scale_int(scale)
        v2 = tuple(x.mul_int(scale) for x in v)
        if scale > 10_000:
            raise InternalInconsistencyError("could not nest I inside J")
    OI = ideals.multiplier_ring(I2)
    OJ = ideals.multiplier_ring(J)
    rings_equal = (OI.mat, OI.den) == (OJ.mat, OJ.den)
    record: dict = {
        "stage": "ideal_route",
        "ideal_left": I2.to_data(),
        "ideal_right": J.to_data(),
        "ring_left": OI.to_data(),
        "ring_right": OJ.to_data(),
        "rings_equal": rings_equal,
    }
    if not rings_equal:
        evidence.append(record)
        return _emit_not_conjugate(
            A,
            B,
            {"kind": "multiplier_ring", "left": OI.to_data(), "right": OJ.to_data()},
            evidence,
            config,
        )
    we = ideals.weak_equivalence(I2, J)
    record["weak_equivalence"] = we.to_data()
    if we.equivalent:
        X = ideals.colon_ideal(J, I2)
        pr = ideals.principal_search(X, config.principal_bound)
        record["principal_search"] = pr.to_data()
        if pr.found:
            z = pr.generator
            zI = I2.scale(z)
            if zI == J:
                zv = tuple(x.mul(z) for x in v2)
                T = _change_of_basis(zv, w, J)
                record["conjugator_from_generator"] = [list(r) for r in T]
                evidence.append(record)
                C = xl.unimodular_inverse(T)
                return _emit_conjugate(A, B, C, evidence, config)
            record["generator_rejected"] = "z I != J"
    evidence.append(record)
    return None


def _change_of_basis(zv, w, J: ideals.FractionalIdeal) -> Mat:
    """Unimodular T with z v = w T for two eigenvector bases of the same
    ideal J; satisfies T A = B T by the eigenvector identities."""
    from math import gcd as _gcd

    n = len(w)
    wden = 1
    for e in w:
        wden = wden * e.den // _gcd(wden, e.den)
    wmat = tuple(tuple(x * (wden // e.den) for x in e.num) for e in w)
    cols = []
    for j in range(n):
        target = tuple(x * wden for x in zv[j].num)
        num, den = xl.solve_right_rational(xl.transpose(wmat), target)
        if any(x % (den * zv[j].den) for x in num):
            raise InternalInconsistencyError("change of basis is not integral")
        cols.append(tuple(x // (den * zv[j].den) for x in num))
    T = xl.transpose(tuple(cols))
    if xl.det(T) not in (1, -1):
        raise InternalInconsistencyError("change of basis is not unimodular")
    return T


def _tower_route(A: Mat, B: Mat, evidence: list, config: PipelineConfig) -> Verdict | None:
    towA = build_tower(A, config.tower_depth, cap=max(config.tower_depth, 4))
    towB = build_tower(B, config.tower_depth, cap=max(config.tower_depth, 4))
    outcome = level_iso_family(towA, towB, budget=config.iso_budget)
    record: dict = {"stage": "tower_route", "level_iso": outcome.to_data()}
    if outcome.kind == "not_found_at_level":
        evidence.append(record)
        return _emit_not_conjugate(
            A,
            B,
            {"kind": "tower_level", "level": outcome.level, "detail": outcome.witness},
            evidence,
            config,
        )
    if outcome.kind == "unknown":
        evidence.append(record)
        return None
    family = outcome.family
    deltas = [
        delta_lattice(towA, towB, family, k) for k in range(1, config.tower_depth + 1)
    ]
    cls = classify_delta(
        towA,
        towB,
        family,
        deltas,
        search_bound=config.unimodular_bound,
        max_candidates=config.search_max_candidates,
    )
    record["delta"] = cls.to_data()
    evidence.append(record)
    if cls.kind == "graph_of_conjugator":
        return _emit_conjugate(A, B, cls.conjugator, evidence, config)
    return None
