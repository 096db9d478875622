"""Generalized Bowen-Franks groups, hyperbolicity and invertibility gates,
and the strong-BF-equivalence screen over a finite polynomial family.

A screen pass is a necessary-condition filter only and is reported as
"passed_screen", never as full equivalence over all polynomials.
"""

from dataclasses import dataclass, field

from . import exact_linalg as xl
from . import polys
from .errors import ToralConjError
from .finite_modules import FiniteModulePresentation, IsoResult, module_iso_exists, quotient

Mat = xl.Mat


class BFConstructionError(ToralConjError):
    """g(A) is singular, so Z^n / Z^n g(A) is infinite."""

    def __init__(self, g: polys.Poly, determinant: int):
        self.g = g
        self.determinant = determinant
        super().__init__(f"g(A) singular (det={determinant}) for g={polys.to_str(g)}")


def hyperbolicity_check(A: Mat) -> bool:
    """True iff no eigenvalue has modulus one, decided exactly.

    Root-of-unity eigenvalues and all other unit-modulus eigenvalues are both
    caught by the reciprocal-gcd plus Sturm-count test on the characteristic
    polynomial, so no numerical fallback is needed.
    """
    return not polys.has_root_on_unit_circle(xl.char_poly(A))


def invertibility_check(A: Mat, g: polys.Poly) -> bool:
    return xl.det(xl.eval_poly_at_matrix(g, A)) != 0


@dataclass(frozen=True)
class BFGroup:
    g: polys.Poly
    base: Mat
    module: FiniteModulePresentation

    @property
    def order(self) -> int:
        return self.module.order

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.module.factors


def bf_group(A: Mat, g: polys.Poly) -> BFGroup:
    """BF_g(A) = Z^n / Z^n g(A) with the action of A; the order is
    cross-checked against |res(char_poly(A), g)| at construction."""
    gA = xl.eval_poly_at_matrix(g, A)
    d = xl.det(gA)
    if d == 0:
        raise BFConstructionError(g, d)
    module = quotient(gA, A)
    expected = abs(xl.resultant(xl.char_poly(A), g))
    if module.order != expected:
        raise AssertionError("BF order disagrees with the resultant")
    return BFGroup(g=g, base=A, module=module)


def tower_group(A: Mat, k: int, cap: int = 6) -> BFGroup:
    """G_k = BF_{x^(k!)-1}(A), relations built from the factorial power."""
    P = xl.matrix_power_factorial(A, k, cap=cap)
    M = xl.mat_sub(P, xl.identity(len(A)))
    d = xl.det(M)
    g = polys.x_pow_minus_one(_factorial(k))
    if d == 0:
        raise BFConstructionError(g, 0)
    module = quotient(M, A)
    expected = abs(xl.resultant(xl.char_poly(A), g))
    if module.order != expected:
        raise AssertionError("tower group order disagrees with the resultant")
    return BFGroup(g=g, base=A, module=module)


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def default_family(
    A: Mat,
    B: Mat | None = None,
    max_shift: int = 5,
    max_power: int = 6,
    cyclotomic_index: int = 12,
) -> list[polys.Poly]:
    """The screening family {x -+ c} + {x^m -+ 1} + small cyclotomics,
    deduplicated in a fixed order and filtered by invertibility for A."""
    cands: list[polys.Poly] = []
    for c in range(1, max_shift + 1):
        cands.append((-c, 1))
        cands.append((c, 1))
    for m in range(1, max_power + 1):
        cands.append(polys.x_pow_minus_one(m))
        cands.append(polys.x_pow_plus_one(m))
    for d in range(1, cyclotomic_index + 1):
        cands.append(polys.cyclotomic(d))
    seen = set()
    out = []
    for g in cands:
        if g in seen:
            continue
        seen.add(g)
        if invertibility_check(A, g):
            out.append(g)
    return out


@dataclass(frozen=True)
class ScreenReport:
    family: tuple[polys.Poly, ...]
    outcome: str                      # "not_equivalent" | "passed_screen" | "partial_unknown"
    witness: polys.Poly | None
    records: tuple[dict, ...]
    undecided: tuple[polys.Poly, ...] = field(default_factory=tuple)

    def to_data(self) -> dict:
        out = {
            "family": [polys.to_str(g) for g in self.family],
            "outcome": self.outcome,
            "records": list(self.records),
        }
        if self.witness is not None:
            out["witness"] = polys.to_str(self.witness)
        if self.undecided:
            out["undecided"] = [polys.to_str(g) for g in self.undecided]
        return out


def strong_bf_screen(
    A: Mat,
    B: Mat,
    family: list[polys.Poly] | None = None,
    budget: int = 100_000,
) -> ScreenReport:
    """Per-polynomial module comparison of BF_g(A) against BF_g(B).

    Assumes the caller has already established similarity of A and B.  Stops
    at the first certified non-isomorphism; a full pass is only the finite
    screen passing, never equivalence over every polynomial.
    """
    if family is None:
        family = default_family(A, B)
    records: list[dict] = []
    undecided: list[polys.Poly] = []
    for g in family:
        ga = bf_group(A, g)
        gb = bf_group(B, g)
        res: IsoResult = module_iso_exists(ga.module, gb.module, budget=budget)
        rec = {
            "g": polys.to_str(g),
            "order_left": ga.order,
            "order_right": gb.order,
            "factors_left": list(ga.invariant_factors),
            "factors_right": list(gb.invariant_factors),
            "iso": res.to_data(),
        }
        records.append(rec)
        if res.verdict == "no":
            return ScreenReport(
                family=tuple(family),
                outcome="not_equivalent",
                witness=g,
                records=tuple(records),
            )
        if res.verdict == "unknown":
            undecided.append(g)
    if undecided:
        return ScreenReport(
            family=tuple(family),
            outcome="partial_unknown",
            witness=None,
            records=tuple(records),
            undecided=tuple(undecided),
        )
    return ScreenReport(
        family=tuple(family),
        outcome="passed_screen",
        witness=None,
        records=tuple(records),
    )
