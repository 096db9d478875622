"""Truncated quotient towers G_k = Z^n / Z^n (A^(k!) - I): construction with
verified nesting and epimorphism compatibility, coherent elements, the
level-isomorphism family search between two towers, and the paired
congruence lattice that can certify a conjugator.

Only finite truncations are materialized; depth is capped because entries of
A^(k!) grow factorially.
"""

import itertools
from dataclasses import dataclass

from . import exact_linalg as xl
from . import polys
from .bf_invariants import hyperbolicity_check
from .errors import InternalInconsistencyError, ResourceLimitError, ToralConjError
from .finite_modules import (
    FiniteModulePresentation,
    IsoResult,
    ModuleMap,
    invariant_mismatch,
    module_iso_exists,
    quotient,
)
from .intfactor import divisors

Mat = xl.Mat
Vec = xl.Vec

DEFAULT_DEPTH_CAP = 4


@dataclass(frozen=True)
class TowerLevel:
    k: int
    power: Mat                 # A^(k!)
    lattice: Mat               # HNF basis of N_k = Z^n (A^(k!) - I)
    module: FiniteModulePresentation


@dataclass(frozen=True)
class Tower:
    base: Mat
    depth: int
    levels: tuple[TowerLevel, ...]
    epis: dict                 # (k, l) -> ModuleMap for l <= k

    @property
    def n(self) -> int:
        return len(self.base)

    def level(self, k: int) -> TowerLevel:
        return self.levels[k - 1]


def build_tower(A: Mat, depth: int, cap: int = DEFAULT_DEPTH_CAP) -> Tower:
    """Construct levels 1..depth, verifying nesting N_(k+1) <= N_k and the
    compatibility of all canonical epimorphisms; fails loudly otherwise."""
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > cap:
        raise ResourceLimitError(f"tower depth cap exceeded: {depth} > {cap}")
    if not hyperbolicity_check(A):
        raise ToralConjError("matrix is not hyperbolic; tower quotients need det(A^r - I) != 0")
    n = len(A)
    levels = []
    P = A
    for k in range(1, depth + 1):
        if k > 1:
            P = xl.mat_pow(P, k)
            xl.guard_bits(P)
        M = xl.mat_sub(P, xl.identity(n))
        levels.append(
            TowerLevel(k=k, power=P, lattice=xl.hnf_basis(M), module=quotient(M, A))
        )
    for k in range(1, depth):
        upper = levels[k]      # level k+1
        lower = levels[k - 1]  # level k
        for row in xl.mat_sub(upper.power, xl.identity(n)):
            if xl.lattice_membership(lower.lattice, row) is None:
                raise InternalInconsistencyError(f"nesting N_{k+1} <= N_{k} failed")
    epis: dict = {}
    for k in range(1, depth + 1):
        for l in range(1, k + 1):
            epis[(k, l)] = _canonical_epi(levels[k - 1].module, levels[l - 1].module)
    _verify_epi_compatibility(levels, epis)
    return Tower(base=A, depth=depth, levels=tuple(levels), epis=epis)


def _canonical_epi(Gk: FiniteModulePresentation, Gl: FiniteModulePresentation) -> ModuleMap:
    """[m]_k -> [m]_l on canonical generators; verified surjective and
    intertwining."""
    rows = tuple(
        Gl.reduce(Gk.lift(tuple(1 if i == j else 0 for i in range(Gk.rank))))
        for j in range(Gk.rank)
    )
    epi = ModuleMap(Gk, Gl, rows)
    if not (epi.is_well_defined() and epi.intertwines() and epi.is_surjective()):
        raise InternalInconsistencyError("canonical epimorphism failed verification")
    return epi


def _verify_epi_compatibility(levels, epis) -> None:
    depth = len(levels)
    for m in range(1, depth + 1):
        for k in range(1, m + 1):
            for l in range(1, k + 1):
                lhs = epis[(m, k)].compose(epis[(k, l)])
                if lhs.mat != epis[(m, l)].mat:
                    raise InternalInconsistencyError(
                        f"epimorphism compatibility failed at {m}->{k}->{l}"
                    )


def verify_factorization(A: Mat, k: int, cap: int = 6) -> bool:
    """Exact identity A^((k+1)!) - I = (sum of A^((k+1)! - j k!)) (A^(k!) - I)."""
    n = len(A)
    T = xl.matrix_power_factorial(A, k, cap=cap)
    if k + 1 > cap:
        raise ResourceLimitError(f"factorial power cap exceeded: {k + 1} > {cap}")
    lhs = xl.mat_sub(xl.mat_pow(T, k + 1), xl.identity(n))
    acc = xl.identity(n)
    total = xl.identity(n)
    for _ in range(k):
        acc = xl.mat_mul(acc, T)
        total = xl.mat_add(total, acc)
    rhs = xl.mat_mul(total, xl.mat_sub(T, xl.identity(n)))
    return lhs == rhs


def verify_filtered(A: Mat, k1: int, k2: int, cap: int = 6) -> bool:
    """N_(k1+k2) <= N_k1 intersect N_k2, checked on generators."""
    n = len(A)
    b1 = xl.hnf_basis(xl.mat_sub(xl.matrix_power_factorial(A, k1, cap=cap), xl.identity(n)))
    b2 = xl.hnf_basis(xl.mat_sub(xl.matrix_power_factorial(A, k2, cap=cap), xl.identity(n)))
    inter = xl.lattice_intersection(b1, b2)
    M3 = xl.mat_sub(xl.matrix_power_factorial(A, k1 + k2, cap=cap), xl.identity(n))
    return all(xl.lattice_membership(inter, row) is not None for row in M3)


@dataclass(frozen=True)
class CoherentElement:
    levels: tuple[Vec, ...]


def iota(tower: Tower, m: Vec) -> CoherentElement:
    """The canonical embedding of a lattice point: level-wise reduction."""
    return CoherentElement(tuple(lv.module.reduce(m) for lv in tower.levels))


def is_coherent(tower: Tower, c: CoherentElement) -> bool:
    for k in range(1, tower.depth + 1):
        for l in range(1, k):
            if tower.epis[(k, l)].apply(c.levels[k - 1]) != c.levels[l - 1]:
                return False
    return True


def gamma_action(tower: Tower, c: CoherentElement) -> CoherentElement:
    """Level-wise action of the base matrix; rejects incoherent input."""
    if not is_coherent(tower, c):
        raise ValueError("incoherent element")
    return CoherentElement(
        tuple(lv.module.act(e) for lv, e in zip(tower.levels, c.levels))
    )


def injectivity_probe(tower: Tower, bound: int) -> dict:
    """For every nonzero m with max-norm <= bound, find the least level whose
    lattice excludes m.

    Each exclusion is certified twice: HNF membership and exact rational
    inverse (m (A^(k!)-I)^-1 not integral).  The per-level norm lower bound
    1/colsum|M^-1| is reported as well; it can only certify vectors shorter
    than itself, which for a matrix with contracting directions never
    reaches far (the inverse has an eigenvalue near -1), so it is evidence,
    not the primary certificate.
    """
    n = tower.n
    inverses = []
    norm_bounds = []
    for lv in tower.levels:
        M = xl.mat_sub(lv.power, xl.identity(n))
        inv, den = xl.invert_rational(M)
        inverses.append((inv, den))
        norm_bounds.append(xl.inverse_infinity_norm_bound(M))
    escape_at: dict[Vec, int] = {}
    stuck: list[Vec] = []
    disagreements = []
    for m in itertools.product(range(-bound, bound + 1), repeat=n):
        if not any(m):
            continue
        nz = next(x for x in m if x)
        if nz < 0:
            continue  # symmetric under negation; mirror below
        least = None
        for lv, (inv, den) in zip(tower.levels, inverses):
            member_hnf = xl.lattice_membership(lv.lattice, m) is not None
            xi_num = xl.vec_mat(m, inv)
            member_inv = all(x % den == 0 for x in xi_num)
            if member_hnf != member_inv:
                disagreements.append({"m": list(m), "k": lv.k})
            if not member_hnf:
                least = lv.k
                break
        if least is None:
            stuck.append(m)
            stuck.append(tuple(-x for x in m))
        else:
            escape_at[m] = least
            escape_at[tuple(-x for x in m)] = least
    if disagreements:
        raise InternalInconsistencyError(f"membership routes disagree: {disagreements[:3]}")
    counts: dict[int, int] = {}
    for k in escape_at.values():
        counts[k] = counts.get(k, 0) + 1
    return {
        "bound": bound,
        "depth": tower.depth,
        "all_escape": not stuck,
        "escape_counts_by_level": dict(sorted(counts.items())),
        "inconclusive_at_depth": [list(v) for v in stuck],
        "inverse_norm_bounds": [
            {"k": lv.k, "bound": f"{b.numerator}/{b.denominator}"}
            for lv, b in zip(tower.levels, norm_bounds)
        ],
    }


@dataclass(frozen=True)
class LevelIsoFamily:
    """Per-level isomorphisms Psi_k compatible with the canonical epis."""

    source: Tower
    target: Tower
    maps: tuple[ModuleMap, ...]

    def verify(self) -> bool:
        K = len(self.maps)
        for k in range(1, K + 1):
            if not self.maps[k - 1].is_isomorphism():
                return False
        for k in range(1, K + 1):
            for l in range(1, k + 1):
                lhs = self.maps[k - 1].compose(self.target.epis[(k, l)])
                rhs = self.source.epis[(k, l)].compose(self.maps[l - 1])
                if lhs.mat != rhs.mat:
                    return False
        return True


@dataclass(frozen=True)
class LevelIsoOutcome:
    kind: str                         # "found" | "not_found_at_level" | "unknown"
    family: LevelIsoFamily | None = None
    level: int | None = None
    witness: dict | None = None
    progress: tuple[dict, ...] = ()

    def to_data(self) -> dict:
        out = {"kind": self.kind}
        if self.level is not None:
            out["level"] = self.level
        if self.witness is not None:
            out["witness"] = self.witness
        if self.progress:
            out["progress"] = list(self.progress)
        if self.family is not None:
            out["family_matrices"] = [[list(r) for r in m.mat] for m in self.family.maps]
        return out


def _divisor_polynomials(k: int) -> list[polys.Poly]:
    """Cyclotomic divisors and proper x^e - 1 divisors of x^(k!) - 1."""
    m = 1
    for i in range(2, k + 1):
        m *= i
    out: list[polys.Poly] = []
    for d in divisors(m):
        out.append(polys.cyclotomic(d))
    for e in divisors(m):
        if e < m:
            g = polys.x_pow_minus_one(e)
            if g not in out:
                out.append(g)
    return out


def level_iso_family(
    towA: Tower,
    towB: Tower,
    depth: int | None = None,
    budget: int = 100_000,
) -> LevelIsoOutcome:
    """Search for a compatible family of level isomorphisms.

    Per level, first screen the canonical quotients by every divisor g of
    x^(k!) - 1 (any level isomorphism induces an isomorphism of the
    corresponding BF_g quotients, so a fingerprint mismatch there refutes the
    level); then run the module isomorphism search on the level itself.  A
    family found at the deepest level is pushed down by projection, which is
    automatically compatible, and re-verified.
    """
    K = depth or min(towA.depth, towB.depth)
    if K > min(towA.depth, towB.depth):
        raise ValueError("requested depth exceeds tower depth")
    progress: list[dict] = []
    deepest: IsoResult | None = None
    for k in range(1, K + 1):
        for g in _divisor_polynomials(k):
            qa = quotient(xl.eval_poly_at_matrix(g, towA.base), towA.base)
            qb = quotient(xl.eval_poly_at_matrix(g, towB.base), towB.base)
            mism = invariant_mismatch(qa, qb)
            if mism is not None:
                return LevelIsoOutcome(
                    kind="not_found_at_level",
                    level=k,
                    witness={
                        "kind": "canonical_quotient",
                        "divisor": polys.to_str(g),
                        "mismatch": mism,
                        "left": qa.fingerprint(),
                        "right": qb.fingerprint(),
                    },
                    progress=tuple(progress),
                )
        res = module_iso_exists(
            towA.level(k).module, towB.level(k).module, budget=budget
        )
        progress.append({"level": k, "iso": res.to_data()})
        if res.verdict == "no":
            return LevelIsoOutcome(
                kind="not_found_at_level",
                level=k,
                witness={"kind": "module_iso_no", "detail": res.witness},
                progress=tuple(progress),
            )
        if res.verdict == "unknown":
            return LevelIsoOutcome(
                kind="unknown",
                witness={"kind": "budget", "level": k, "detail": res.witness},
                progress=tuple(progress),
            )
        if k == K:
            deepest = res
    assert deepest is not None and deepest.iso is not None
    maps = _family_by_projection(towA, towB, K, deepest.iso)
    family = LevelIsoFamily(source=towA, target=towB, maps=maps)
    if not family.verify():
        raise InternalInconsistencyError("projected level family failed verification")
    return LevelIsoOutcome(kind="found", family=family, progress=tuple(progress))


def transport_family(towA: Tower, towB: Tower, C: Mat, depth: int | None = None) -> LevelIsoFamily:
    """The family [m]_k -> [m C]_k induced by an exact intertwiner C with
    A C = C B that is bijective at every level (e.g. a conjugator);
    compatibility is automatic and the whole family is re-verified."""
    K = depth or min(towA.depth, towB.depth)
    if xl.mat_mul(towA.base, C) != xl.mat_mul(C, towB.base):
        raise ValueError("transport matrix does not intertwine")
    from .finite_modules import map_from_ambient

    maps = []
    for k in range(1, K + 1):
        m = map_from_ambient(towA.level(k).module, towB.level(k).module, C)
        if m is None or not m.is_isomorphism():
            raise ValueError(f"transport matrix is not bijective at level {k}")
        maps.append(m)
    family = LevelIsoFamily(source=towA, target=towB, maps=tuple(maps))
    if not family.verify():
        raise InternalInconsistencyError("transport family failed verification")
    return family


def _family_by_projection(towA: Tower, towB: Tower, K: int, sigma: ModuleMap) -> tuple[ModuleMap, ...]:
    """Derive Psi_l for l < K from the deepest isomorphism by projecting
    representatives; well-defined because an isomorphism maps the image
    submodule (x^(l!) - 1) G_K onto its counterpart."""
    maps: list[ModuleMap] = []
    GK_A = towA.level(K).module
    for l in range(1, K + 1):
        Gl_A = towA.level(l).module
        Gl_B = towB.level(l).module
        rows = []
        for j in range(Gl_A.rank):
            gen = Gl_A.lift(tuple(1 if i == j else 0 for i in range(Gl_A.rank)))
            img = sigma.apply(GK_A.reduce(gen))
            rep = towB.level(K).module.lift(img)
            rows.append(Gl_B.reduce(rep))
        maps.append(ModuleMap(Gl_A, Gl_B, tuple(rows)))
    return tuple(maps)


@dataclass(frozen=True)
class PairLattice:
    """Full-rank sublattice of Z^(2n): pairs (m, m~) agreeing through the
    family up to the given depth."""

    depth: int
    basis: Mat

    def to_data(self) -> dict:
        return {"depth": self.depth, "basis": [list(r) for r in self.basis]}


def delta_lattice(towA: Tower, towB: Tower, family: LevelIsoFamily, depth: int) -> PairLattice:
    """Delta_K = {(m, m~) : Psi_k([m]_k) = [m~]_k for all k <= depth},
    computed as a congruence kernel at the deepest level (compatibility makes
    the lower levels automatic).  Depth 0 is the empty constraint Z^(2n)."""
    n = towA.n
    if depth == 0:
        return PairLattice(depth=0, basis=xl.identity(2 * n))
    psi = family.maps[depth - 1]
    GB = towB.level(depth).module
    rows = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        rows.append(tuple(int(x) for x in psi.apply(towA.level(depth).module.reduce(e))))
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        rows.append(tuple(-x for x in GB.reduce(e)))
    basis = xl.congruence_kernel(tuple(rows), GB.factors)
    if len(basis) != 2 * n:
        raise InternalInconsistencyError("pair lattice is not full rank")
    for nu in towB.level(depth).lattice:
        if xl.lattice_membership(basis, (0,) * n + nu) is None:
            raise InternalInconsistencyError("pair lattice misses {0} x N_K")
    return PairLattice(depth=depth, basis=basis)


@dataclass(frozen=True)
class DeltaClassification:
    kind: str                         # "graph_of_conjugator" | "shrinking_nonfunctional" | "indeterminate"
    conjugator: Mat | None
    per_level: tuple[dict, ...]

    def to_data(self) -> dict:
        out = {"kind": self.kind, "per_level": list(self.per_level)}
        if self.conjugator is not None:
            out["conjugator"] = [list(r) for r in self.conjugator]
        return out


def classify_delta(
    towA: Tower,
    towB: Tower,
    family: LevelIsoFamily,
    deltas: list[PairLattice],
    search_bound: int = 5,
    max_candidates: int = 200_000,
) -> DeltaClassification:
    """Decide whether the deepest pair lattice is the graph of an honest
    conjugator plus {0} x N_K.

    The family induces an integer matrix C~ per level with Delta_k =
    graph(C~) + {0} x N_k; a conjugacy certificate is an exact intertwiner
    C (A C = C B) congruent to C~ row-wise mod N_k with det C = +-1.
    Existence of any such intertwiner is decided by an exact affine solve;
    the unimodular one is then sought over small coefficient shells of the
    intertwiner lattice, filtered by the congruence.  The per-level record
    keeps the smallest |det| among intertwiners whose graph lies in
    Delta_k; strict growth of that index (an unsolvable level counting as
    infinite) is reported as shrinking.
    """
    from .finite_modules import intertwiner_kernel

    A, B = towA.base, towB.base
    n = towA.n
    for d1, d2 in zip(deltas, deltas[1:]):
        for row in d2.basis:
            if xl.lattice_membership(d1.basis, row) is None:
                raise InternalInconsistencyError("pair lattices are not nested")
    kern = intertwiner_kernel(A, B)
    per_level: list[dict] = []
    conjugator = None
    for delta in deltas:
        k = delta.depth
        psi = family.maps[k - 1]
        GA = towA.level(k).module
        GB = towB.level(k).module
        ctil = tuple(
            GB.lift(psi.apply(GA.reduce(tuple(1 if j == i else 0 for j in range(n)))))
            for i in range(n)
        )
        Nb = towB.level(k).lattice
        solvable = _graph_repr_solvable(A, B, ctil, Nb, n)
        rec: dict = {"level": k, "solvable": solvable}
        best = None
        found = None
        tried = 0
        if solvable:
            for c in xl.shell_vectors(len(kern), search_bound):
                if tried >= max_candidates:
                    break
                if not any(c):
                    continue
                tried += 1
                C = _unflatten(xl.vec_mat(c, kern), n)
                if any(
                    xl.lattice_membership(Nb, row) is None
                    for row in xl.mat_sub(C, ctil)
                ):
                    continue
                d = abs(xl.det(C))
                if d and (best is None or d < best):
                    best = d
                if d == 1:
                    found = C
                    break
        rec["min_abs_det"] = best
        per_level.append(rec)
        if k == deltas[-1].depth and found is not None:
            if xl.mat_mul(A, found) != xl.mat_mul(found, B) or abs(xl.det(found)) != 1:
                raise InternalInconsistencyError("conjugator candidate failed re-verification")
            for i in range(n):
                e = tuple(1 if j == i else 0 for j in range(n))
                pair = e + xl.vec_mat(e, found)
                if xl.lattice_membership(deltas[-1].basis, pair) is None:
                    raise InternalInconsistencyError("conjugator graph not inside pair lattice")
            conjugator = found
    if conjugator is not None:
        return DeltaClassification("graph_of_conjugator", conjugator, tuple(per_level))
    vals = [r["min_abs_det"] for r in per_level]
    if len(vals) >= 2 and _strictly_growing(vals):
        return DeltaClassification("shrinking_nonfunctional", None, tuple(per_level))
    return DeltaClassification("indeterminate", None, tuple(per_level))


def _graph_repr_solvable(A: Mat, B: Mat, ctil: Mat, Nb: Mat, n: int) -> bool:
    """Whether any integer intertwiner is row-congruent to C~ mod N: solve
    A (C~ + E N) = (C~ + E N) B for integer E."""
    R = xl.mat_sub(xl.mat_mul(ctil, B), xl.mat_mul(A, ctil))
    NbB = xl.mat_mul(Nb, B)
    rows = []
    for kk in range(n):
        for ll in range(n):
            row = [0] * (n * n)
            for i in range(n):
                for j in range(n):
                    row[i * n + j] = A[i][kk] * Nb[ll][j] - (NbB[ll][j] if i == kk else 0)
            rows.append(tuple(row))
    rvec = tuple(R[i][j] for i in range(n) for j in range(n))
    return xl.solve_left(tuple(rows), rvec) is not None


def _strictly_growing(vals: list) -> bool:
    for a, b in zip(vals, vals[1:]):
        if a is None:            # infinite stays infinite: not strict growth
            return False
        if b is not None and b <= a:
            return False
    return True


def _unflatten(v: Vec, n: int) -> Mat:
    return tuple(tuple(v[i * n + j] for j in range(n)) for i in range(n))

