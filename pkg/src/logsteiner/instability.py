"""Unstable hyperplanes of Steiner bundles.

Two independent oracles decide whether a line is unstable for a
logarithmic bundle on the plane: the bundle side computes ``h^0`` of the
restricted dual directly from the pencil, the ideal side asks for a curve of
degree ``r+2`` through ``Z`` and the dual point. Everything else here
(scans, classification, splitting types, the Torelli comparison) is built on
these two.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .exactalg import Field, Mat, QQ, kernel_basis, rank, rank_of_rows
from .polygeom import (
    DegenerateInputError,
    HomForm,
    PointConfig,
    ProjPoint,
    h0_ideal,
    hyperplane_basis,
    incidence,
    is_general_position,
    linear_system,
    monomial_values,
    monomials,
    points_on_hyperplane,
    projective_points,
    random_point,
)
from .steiner import (
    IsoResult,
    PreconditionError,
    StrategyError,
    SteinerPresentation,
    build_logarithmic,
    build_schwarzenberger,
    form_determinant,
    is_isomorphic,
    restrict_to_hyperplane,
)


# ---------------------------------------------------------------------------
# bundle-side and ideal-side oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnstableResult:
    unstable: bool
    kernel_dim: int
    sheaf_mode: bool = False

    def __bool__(self) -> bool:
        return self.unstable


def restricted_dual_sections(P: SteinerPresentation, basis: Mat) -> int:
    """``h^0`` of ``E^v`` restricted to the linear subspace spanned by ``basis``.

    The restricted dual pencil ``sum t_j N~_j^T`` kills ``v`` iff every
    ``N~_j^T v`` vanishes; the stacked ``(s*m) x tau`` matrix has that kernel.
    """
    f = P.field
    rows: list = []
    m, tau = P.m, P.tau
    for j in range(basis.cols):
        Nj = P.combine(basis.col(j))
        e = Nj.entries
        # rows of N~_j^T are the columns of N~_j
        for b in range(m):
            rows.append([e[a * m + b] for a in range(tau)])
    return tau - rank_of_rows(f, rows, tau)


def unstable_test_bundle(P: SteinerPresentation, h: ProjPoint | Sequence) -> UnstableResult:
    """Is the hyperplane with dual coordinates ``h`` unstable for ``E``?"""
    if not isinstance(h, ProjPoint):
        h = ProjPoint(P.field, h)
    if len(h.coords) != P.nvars:
        raise ValueError("hyperplane lives in the wrong space")
    k = restricted_dual_sections(P, hyperplane_basis(h))
    sheaf = not P.default_validity.valid
    return UnstableResult(k > 0, k, sheaf)


def _require_plane_gp(Z: PointConfig, r: int):
    if Z.n != 2:
        raise PreconditionError("the ideal-side oracle works on the plane")
    gp = is_general_position(Z, r)
    if not gp.ok:
        raise PreconditionError(f"Z is not in ({r + 1})-general position: {'; '.join(gp.reasons)}")


def unstable_test_ideal(Z: PointConfig, r: int, l: ProjPoint | Sequence, check: bool = True) -> bool:
    """``l`` is unstable iff ``l`` is in ``Z`` or a degree ``r+2`` curve passes through ``Z`` and ``l``."""
    if check:
        _require_plane_gp(Z, r)
    if not isinstance(l, ProjPoint):
        l = ProjPoint(Z.field, l)
    if l in Z:
        return True
    return h0_ideal(Z.add(l), r + 2) > 0


# ---------------------------------------------------------------------------
# W reports
# ---------------------------------------------------------------------------

FINITE, CURVE, WHOLE = "Finite", "Curve", "WholeSpace"


@dataclass(frozen=True)
class WReport:
    kind: str
    points: tuple = ()
    curve: HomForm | None = None
    degree: int | None = None
    method: str = ""
    expected_codimension: int | None = None
    cross_checks: dict = dc_field(default_factory=dict, compare=False, hash=False)

    def point_set(self) -> frozenset:
        return frozenset(self.points)


def expected_codimension(m: int, n: int, r: int) -> int:
    return m * n - (m + n + r) + 1


def classify_W_ideal(Z: PointConfig, r: int, check: bool = True) -> WReport:
    """Unstable locus of ``E_{r+1}(Z)`` read off from ``t = h^0(J_Z(r+2))``."""
    if check:
        _require_plane_gp(Z, r)
    t = h0_ideal(Z, r + 2)
    m = len(Z) - len(monomials(3, r + 1))
    codim = expected_codimension(m, 2, r)
    if t == 0:
        return WReport(FINITE, tuple(sorted(Z.points)), None, None, "ideal-side", codim, {"t": t})
    if t == 1:
        f = linear_system(Z, r + 2)[0].monic()
        return WReport(CURVE, (), f, r + 2, "ideal-side", codim, {"t": t})
    # any extra point is one linear condition on a t >= 2 dimensional system
    return WReport(WHOLE, (), None, None, "ideal-side", codim, {"t": t})


def scan_unstable(P: SteinerPresentation, domain: Iterable[ProjPoint]) -> list[ProjPoint]:
    return [h for h in domain if unstable_test_bundle(P, h).unstable]


def _fit_curve(field: Field, pts: Sequence[ProjPoint], degree: int) -> list[HomForm]:
    Z = PointConfig(field, 2, tuple(pts))
    return linear_system(Z, degree)


def scan_W_bundle(P: SteinerPresentation, domain: str | Sequence[ProjPoint] = "exhaustive",
                  degree: int | None = None) -> tuple[list[ProjPoint], WReport]:
    """Scan a domain of dual points with the bundle-side oracle and classify.

    ``degree`` defaults to the rank of ``E`` (``r + 2`` on the plane).
    """
    if P.n != 2:
        raise PreconditionError("W classification is done on the plane")
    if isinstance(domain, str):
        if domain != "exhaustive":
            raise StrategyError(f"unknown domain {domain!r}")
        if not P.field.is_prime:
            raise StrategyError("exhaustive scans need a prime field")
        dom = list(projective_points(P.field, 2))
        exhaustive = True
    else:
        dom = list(domain)
        exhaustive = False
    found = sorted(scan_unstable(P, dom))
    deg = P.rank if degree is None else degree
    codim = expected_codimension(P.m, P.n, P.r)
    checks = {"exhaustive": exhaustive, "domain_size": len(dom), "found": len(found)}
    method = "bundle-scan"
    if dom and len(found) == len(dom):
        return found, WReport(WHOLE, (), None, None, method, codim, checks)
    forms = _fit_curve(P.field, found, deg) if found else []
    checks["curves_through_found"] = len(forms)
    if len(forms) == 1:
        f = forms[0].monic()
        on_curve = sorted(q for q in dom if f(q) == 0)
        checks["found_equals_curve"] = on_curve == found
        if on_curve == found:
            return found, WReport(CURVE, (), f, deg, method, codim, checks)
    if not forms and P.field.is_prime and len(found) > deg * P.field.p + 1:
        checks["too_many_for_a_curve"] = True
        return found, WReport(WHOLE, (), None, None, method, codim, checks)
    return found, WReport(FINITE, tuple(found), None, None, method, codim, checks)


def same_locus(a: WReport, b: WReport) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == FINITE:
        return a.point_set() == b.point_set()
    if a.kind == CURVE:
        return a.curve.is_proportional(b.curve)
    return True


# ---------------------------------------------------------------------------
# splitting types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplittingType:
    degrees: tuple  # non-increasing

    @property
    def zeros(self) -> int:
        return sum(1 for a in self.degrees if a == 0)

    def __str__(self) -> str:
        return "{" + ", ".join(map(str, self.degrees)) + "}"


def _h1_index(d: int) -> dict:
    """Basis of ``H^1(O(-d))`` on ``P^1``: ``u^-i w^-(d-i)`` for ``0 < i < d``."""
    return {i: k for k, i in enumerate(range(1, d))}


def _line_h1_kernel(A: Mat, B: Mat, t: int) -> int:
    """``h^0(E_l(-t))`` for the pencil ``u*A + w*B`` on the line, ``t >= 1``.

    Equals the kernel of ``H^1(O(-1-t))^m -> H^1(O(-t))^tau``.
    """
    f = A.field
    tau, m = A.rows, A.cols
    src, dst = _h1_index(t + 1), _h1_index(t)
    ns, nd = len(src), len(dst)
    ncols = m * ns
    if ncols == 0:
        return 0
    if nd == 0:
        return ncols
    rows = [[f.zero()] * ncols for _ in range(tau * nd)]
    for b in range(m):
        for i, k in src.items():
            col = b * ns + k
            for a in range(tau):
                ua, wb = A[a, b], B[a, b]
                # u * u^-i w^-(t+1-i) = u^-(i-1) w^-(t+1-i)
                if ua and (i - 1) in dst:
                    rows[a * nd + dst[i - 1]][col] = f.convert(rows[a * nd + dst[i - 1]][col] + ua)
                # w * u^-i w^-(t+1-i) = u^-i w^-(t-i)
                if wb and i in dst:
                    rows[a * nd + dst[i]][col] = f.convert(rows[a * nd + dst[i]][col] + wb)
    return ncols - rank_of_rows(f, rows, ncols)


def line_basis(P: SteinerPresentation, line) -> Mat:
    """Normalize a line description to an ``nvars x 2`` basis matrix."""
    if isinstance(line, Mat):
        B = line
    elif isinstance(line, ProjPoint):
        if P.n != 2:
            raise DegenerateInputError("a dual point describes a line only in the plane")
        B = hyperplane_basis(line)
    else:
        p1, p2 = line
        c1 = p1.coords if isinstance(p1, ProjPoint) else [P.field.convert(x) for x in p1]
        c2 = p2.coords if isinstance(p2, ProjPoint) else [P.field.convert(x) for x in p2]
        B = Mat.from_rows(P.field, [c1, c2]).T
    if B.shape != (P.nvars, 2) or rank(B) != 2:
        raise DegenerateInputError("degenerate line parametrization")
    return B


def splitting_type(P: SteinerPresentation, line) -> SplittingType:
    """Splitting type of ``E`` on a line from ``g(t) = h^0(E_l(-t))``."""
    B = line_basis(P, line)
    A0 = P.combine(B.col(0))
    A1 = P.combine(B.col(1))
    g = {t: _line_h1_kernel(A0, A1, t) for t in range(1, P.m + 3)}
    if g[1] != P.m:
        raise AssertionError(f"h0(E_l(-1)) = {g[1]} but c1 = {P.m}")
    degrees: list = []
    for t in range(P.m + 1, 0, -1):
        count_ge = g[t] - g[t + 1]
        already = len(degrees)
        degrees.extend([t] * (count_ge - already))
    positive = len(degrees)
    degrees.extend([0] * (P.rank - positive))
    if sum(degrees) != P.m or len(degrees) != P.rank:
        raise AssertionError(f"inconsistent splitting data {degrees}")
    return SplittingType(tuple(degrees))


# ---------------------------------------------------------------------------
# secant lemma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SecantViolation:
    line: ProjPoint
    secant_points: int
    stable_point: ProjPoint


def secant_pencil_check(P: SteinerPresentation, S: Iterable[ProjPoint], r: int | None = None,
                        samples: int = 30, seed: int = 0) -> list[SecantViolation]:
    """Every line of the dual plane meeting ``S`` in ``r+3`` points must lie in ``W``.

    Over ``F_p`` the lines are enumerated and checked point by point; over Q
    lines through pairs of ``S`` are checked on seeded samples.
    """
    if P.n != 2:
        raise PreconditionError("the secant check is for the plane")
    r = P.r if r is None else r
    need = r + 3
    S = set(S)
    field = P.field
    violations = []
    if field.is_prime:
        Slist = sorted(S)
        walk = len(Slist) > field.p + 1
        for x in projective_points(field, 2):
            line = points_on_hyperplane(x)
            if walk:
                on = sum(1 for q in line if q in S)
            else:
                on = sum(1 for q in Slist if incidence(q, x))
            if on < need:
                continue
            for q in line:
                if q not in S and not unstable_test_bundle(P, q).unstable:
                    violations.append(SecantViolation(x, on, q))
                    break
        return violations
    from .polygeom import secant_lines

    cfg = PointConfig(field, 2, tuple(sorted(S)))
    rng = random.Random(seed)
    for x, on in secant_lines(cfg, need).items():
        B = hyperplane_basis(x)
        for _ in range(samples):
            t = random_point(field, 1, rng)
            q = ProjPoint(field, B.apply(list(t.coords)))
            if q not in S and not unstable_test_bundle(P, q).unstable:
                violations.append(SecantViolation(x, len(on), q))
                break
    return violations


# ---------------------------------------------------------------------------
# square case: determinantal curve of unstable lines
# ---------------------------------------------------------------------------


def determinantal_curve(P: SteinerPresentation) -> HomForm | None:
    """Degree-``m`` form cutting out ``W(E)`` when ``E`` is in ``S_{2, r+2, r+2}``.

    Built from ``H^1(E(-3)) -> H^1(E(-2))`` via Cech monomials of
    ``H^2(O(-4))`` and ``H^2(O(-3))``. Returns ``None`` when the square-case
    hypotheses fail (shape, or ``H^1(E(-3))`` of the wrong size).
    """
    if P.n != 2 or P.tau != 2 * P.m:
        return None
    f = P.field
    m, tau = P.m, P.tau
    # H^2(O(-4)) basis: exponents (2,1,1), (1,2,1), (1,1,2); H^2(O(-3)): (1,1,1)
    src = [(2, 1, 1), (1, 2, 1), (1, 1, 2)]
    # E(-3) <- O(-3)^tau <- O(-4)^m: H^1(E(-3)) = ker(H^2(O(-4))^m -> H^2(O(-3))^tau)
    ncols = 3 * m
    rows = [[f.zero()] * ncols for _ in range(tau)]
    for b in range(m):
        for k, e in enumerate(src):
            i = e.index(2)  # multiplying by X_i lands on (1,1,1)
            for a in range(tau):
                v = P.matrices[i][a, b]
                if v:
                    rows[a][b * 3 + k] = f.convert(rows[a][b * 3 + k] + v)
    K = kernel_basis(Mat.from_rows(f, rows, ncols))
    if K.cols != m:
        return None
    # X_i : H^2(O(-4)) -> H^2(O(-3)), componentwise on the m copies
    D = []
    for i in range(3):
        k = next(j for j, e in enumerate(src) if e[i] == 2)
        D.append([[K[b * 3 + k, c] for c in range(K.cols)] for b in range(m)])
    forms = [[HomForm(f, 3, 1, tuple(D[i][b][c] for i in range(3))) for c in range(m)] for b in range(m)]
    return form_determinant(forms, f, 3)


# ---------------------------------------------------------------------------
# projected twisted cubic
# ---------------------------------------------------------------------------


def twisted_cubic_point(field: Field, u, v) -> list:
    return [field.convert(u ** 3), field.convert(u * u * v), field.convert(u * v * v), field.convert(v ** 3)]


def projected_cubic(h: ProjPoint | Sequence, field: Field = QQ, samples: int = 16) -> HomForm:
    """Cubic of the dual plane of ``H`` traced by the unstable planes ``H_{u,v}``.

    The unstable planes of the Schwarzenberger bundle on ``P^3`` have dual
    coordinates ``[u^3 : u^2 v : u v^2 : v^3]``; intersected with ``H`` they
    give the lines with internal coordinates ``basis^T c(u, v)``. The cubic is
    recovered by interpolation.
    """
    if not isinstance(h, ProjPoint):
        h = ProjPoint(field, h)
    field = h.field
    if h.dim != 3:
        raise ValueError("h must be a plane of P^3")
    c = h.normalized
    # h on the twisted cubic iff the 2x2 minors of [[c0,c1,c2],[c1,c2,c3]] vanish
    M = Mat.from_rows(field, [[c[0], c[1], c[2]], [c[1], c[2], c[3]]])
    if rank(M) < 2:
        raise PreconditionError(f"{h!r} lies on the twisted cubic; the projection degenerates")
    B = hyperplane_basis(h)
    params = [(1, s) for s in range(samples)] + [(0, 1)]
    if field.is_prime:
        params = [(1, s) for s in range(field.p)] + [(0, 1)]
    images = []
    for u, v in params:
        w = B.T.apply(twisted_cubic_point(field, u, v))
        if any(w):
            images.append(ProjPoint(field, w))
    rows = [monomial_values(field, q.coords, 3) for q in dict.fromkeys(images)]
    K = kernel_basis(Mat.from_rows(field, rows, 10))
    if K.cols != 1:
        raise PreconditionError(f"interpolation kernel has dimension {K.cols}, expected 1")
    return HomForm(field, 3, 3, tuple(K.col(0))).monic()


def family_two_bundle(h: ProjPoint, n: int = 2) -> SteinerPresentation:
    """``E_{n+3}(C_3)`` restricted to the plane ``h``."""
    return restrict_to_hyperplane(build_schwarzenberger(3, n + 3, h.field), h)


# ---------------------------------------------------------------------------
# Torelli comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorelliReport:
    isomorphic: bool
    case: int | None
    same_set: bool
    common_curve: HomForm | None
    violation: bool
    iso: IsoResult
    distinguishing: str = ""
    note: str = ""
    w_reports: tuple = ()


def torelli_compare(Z1: PointConfig, Z2: PointConfig, r: int, trials: int = 20, seed: int = 0) -> TorelliReport:
    """Compare ``E_{r+1}(Z1)`` and ``E_{r+1}(Z2)`` against the dichotomy."""
    if Z1.n != 2 or Z2.n != 2:
        raise PreconditionError("the comparison is on the plane")
    if len(Z1) != len(Z2):
        raise PreconditionError(f"point sets differ in size ({len(Z1)} vs {len(Z2)})")
    problems = []
    for name, Z in (("Z1", Z1), ("Z2", Z2)):
        gp = is_general_position(Z, r)
        if not gp.ok:
            problems.append(f"{name}: {'; '.join(gp.reasons)}")
    if problems:
        raise PreconditionError(" | ".join(problems))
    P1 = build_logarithmic(Z1, r, check=False)
    P2 = build_logarithmic(Z2, r, check=False)
    iso = is_isomorphic(P1, P2, trials=trials, seed=seed)
    same = Z1.same_set(Z2)
    union = Z1.union(Z2)
    curves = linear_system(union, r + 2)
    common = curves[0].monic() if curves else None
    w1, w2 = classify_W_ideal(Z1, r, check=False), classify_W_ideal(Z2, r, check=False)
    if iso.isomorphic:
        if same:
            return TorelliReport(True, 1, True, common, False, iso, note="Z1 = Z2", w_reports=(w1, w2))
        if common is not None:
            note = (f"both sets lie on the degree-{r + 2} curve {common}; "
                    f"E_{r + 1}(Z) is the pushforward of J_Z({r + 1}) restricted to that curve")
            return TorelliReport(True, 2, False, common, False, iso, note=note, w_reports=(w1, w2))
        return TorelliReport(True, None, False, None, True, iso,
                             note="isomorphic but distinct and on no common curve", w_reports=(w1, w2))
    if not same_locus(w1, w2):
        why = f"unstable loci differ ({w1.kind} vs {w2.kind})"
    else:
        why = f"hom-space dimension {iso.hom_dim} without invertible element"
    return TorelliReport(False, None, same, common, same and not iso.probabilistic, iso,
                         distinguishing=why, w_reports=(w1, w2))


__all__ = [
    "UnstableResult", "unstable_test_bundle", "unstable_test_ideal", "restricted_dual_sections",
    "WReport", "FINITE", "CURVE", "WHOLE", "expected_codimension", "classify_W_ideal",
    "scan_unstable", "scan_W_bundle", "same_locus",
    "SplittingType", "splitting_type", "line_basis",
    "SecantViolation", "secant_pencil_check", "determinantal_curve",
    "twisted_cubic_point", "projected_cubic", "family_two_bundle",
    "TorelliReport", "torelli_compare",
]
