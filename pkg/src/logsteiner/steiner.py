"""Steiner presentations ``0 -> O(-1)^m -> O^tau -> E -> 0`` as pencils of matrices.

A presentation stores ``N_0, ..., N_n`` (each ``tau x m``); the map is
``N(X) = sum X_i N_i``. Builders cover generalized logarithmic bundles of
point sets, Schwarzenberger bundles and pushforwards from plane curves.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Sequence

from .exactalg import Field, FieldMismatchError, Mat, QQ, cokernel_projection, kernel_basis, rank, rank_of_rows
from .polygeom import (
    DegenerateInputError,
    HomForm,
    MONOMIAL_ORDER,
    PointConfig,
    ProjPoint,
    count_projective_points,
    eval_matrix,
    form_multiplication_matrix,
    hyperplane_basis,
    is_general_position,
    monomials,
    multiplication_matrix,
    projective_points,
    random_point,
)


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


class StrategyError(ValueError):
    """A validation or scan strategy is not available for the input."""


@dataclass(frozen=True)
class SteinerPresentation:
    field: Field
    nvars: int
    m: int
    tau: int
    matrices: tuple
    provenance: dict = dataclasses.field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) != self.nvars:
            raise ValueError(f"expected {self.nvars} matrices, got {len(mats)}")
        for N in mats:
            if N.field != self.field:
                raise FieldMismatchError(f"matrix over {N.field} in a presentation over {self.field}")
            if N.shape != (self.tau, self.m):
                raise ValueError(f"matrix shape {N.shape} != {(self.tau, self.m)}")
        if self.tau - self.m < 1:
            raise ValueError("a Steiner bundle has positive rank")

    @property
    def n(self) -> int:
        return self.nvars - 1

    @property
    def rank(self) -> int:
        return self.tau - self.m

    @property
    def c1(self) -> int:
        return self.m

    @property
    def r(self) -> int:
        """Offset in ``tau = m + n + r``."""
        return self.tau - self.m - self.n

    def pencil_at(self, x: Sequence) -> Mat:
        """The scalar matrix ``N(x)`` for raw coordinates ``x``."""
        coords = x.coords if isinstance(x, ProjPoint) else [self.field.convert(c) for c in x]
        out = [0] * (self.tau * self.m)
        for c, N in zip(coords, self.matrices):
            if c:
                out = [a + c * b for a, b in zip(out, N.entries)]
        return Mat(self.field, self.tau, self.m, tuple(self.field.convert(v) for v in out))

    def combine(self, weights: Sequence) -> Mat:
        """``sum_i weights[i] * N_i`` for raw weights."""
        return self.pencil_at(weights)

    @cached_property
    def default_validity(self) -> "BundleValidity":
        if self.field.is_prime and count_projective_points(self.field, self.n) <= 200_000:
            return validate_bundle(self, "exhaustive-fp")
        return validate_bundle(self, "minors")


def _with_provenance(P: SteinerPresentation, **extra) -> SteinerPresentation:
    prov = dict(P.provenance)
    prov.update(extra)
    return SteinerPresentation(P.field, P.nvars, P.m, P.tau, P.matrices, prov)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_logarithmic(Z: PointConfig, r: int, check: bool = True) -> SteinerPresentation:
    """Generalized logarithmic bundle ``E_{r+1}(Z)``.

    ``H^1(J_Z(d))`` is realized as the cokernel of the evaluation map
    ``S_d -> K^Z``; multiplication by ``Y_i`` acts on ``K^Z`` diagonally by
    the ``i``-th coordinates of the stored representatives. The pencil is the
    transpose of ``H^1(J_Z(r)) -> H^1(J_Z(r+1))``.
    """
    if r < 0:
        raise PreconditionError("r must be non-negative")
    if check:
        gp = is_general_position(Z, r)
        if not gp.ok:
            detail = "; ".join(gp.reasons)
            if gp.bad_secants:
                detail += "; lines: " + ", ".join(f"{l!r} through points {list(on)}" for l, on in gp.bad_secants)
            raise PreconditionError(f"Z is not in ({r + 1})-general position: {detail}")
    f = Z.field
    pi_lo, lift_lo = cokernel_projection(eval_matrix(Z, r))
    pi_hi, _ = cokernel_projection(eval_matrix(Z, r + 1))
    tau, m = pi_lo.rows, pi_hi.rows
    nvars = Z.n + 1
    mats = []
    for i in range(nvars):
        # column j of M_i: pi_hi applied to z_i * e_{lift_lo[j]}
        cols = []
        for s in lift_lo:
            z = Z.points[s].coords[i]
            cols.append([f.convert(z * pi_hi[a, s]) for a in range(m)])
        Mi = Mat.from_rows(f, cols, m)  # tau x m, already the transpose
        mats.append(Mi)
    prov = {
        "kind": "logarithmic",
        "r": r,
        "n": Z.n,
        "points": [p.to_strings() for p in Z],
        "orientation": "N_i = transpose(pi_{r+1} . diag(z_i) . lift_r)",
        "trivial": m == 0,
    }
    return SteinerPresentation(f, nvars, m, tau, tuple(mats), prov)


def build_schwarzenberger(n: int, m: int, field: Field = QQ) -> SteinerPresentation:
    """Schwarzenberger bundle ``E_m(C_n)``: banded ``(m+1) x (m-n+1)`` pencil."""
    if n < 1:
        raise PreconditionError("n must be positive")
    if m < n:
        raise PreconditionError(f"Schwarzenberger bundle needs m >= n (got m={m}, n={n})")
    tau, cols = m + 1, m - n + 1
    one, zero = field.one(), field.zero()
    mats = []
    for i in range(n + 1):
        data = [zero] * (tau * cols)
        for j in range(cols):
            data[(j + i) * cols + j] = one
        mats.append(Mat(field, tau, cols, tuple(data)))
    prov = {
        "kind": "schwarzenberger",
        "n": n,
        "index": m,
        "curve": f"[u^{n} : u^{n - 1}v : ... : v^{n}] (dual coordinates)",
    }
    return SteinerPresentation(field, n + 1, cols, tau, tuple(mats), prov)


def quotient_basis(f: HomForm, e: int) -> tuple[Mat, list[int]]:
    """Projection ``S_e -> (S/f)_e`` and the lifting monomial indices."""
    n = f.nvars
    if e < f.degree:
        size = len(monomials(n, e))
        return Mat.identity(f.field, size), list(range(size))
    return cokernel_projection(form_multiplication_matrix(f, e - f.degree))


def build_curve_twist(f: HomForm, a: int) -> SteinerPresentation:
    """Pushforward of ``O_X(a)`` from the plane curve ``X = {f = 0}``.

    ``H^0(O_X(e))`` is the degree-``e`` part of ``S/(f)``; ``N_i`` is
    multiplication by ``Y_i`` from degree ``a-1`` to degree ``a``.
    """
    if f.nvars != 3:
        raise PreconditionError("curve twists are built for plane curves")
    if f.is_zero():
        raise DegenerateInputError("the zero form defines no curve")
    d = f.degree
    if d < 1:
        raise DegenerateInputError("a curve needs positive degree")
    if a < d - 1:
        raise PreconditionError(f"need a >= deg f - 1 = {d - 1} (got a={a})")
    field = f.field
    pi_hi, _ = quotient_basis(f, a)
    _, lift_lo = quotient_basis(f, a - 1) if a >= 1 else (None, [])
    mats = []
    for i in range(3):
        mult = multiplication_matrix(field, 3, i, a - 1) if a >= 1 else None
        cols = []
        for s in lift_lo:
            cols.append(pi_hi.apply(mult.col(s)))
        mats.append(Mat.from_rows(field, cols, pi_hi.rows).T if cols else Mat.zeros(field, pi_hi.rows, 0))
    m, tau = len(lift_lo), pi_hi.rows
    prov = {"kind": "curve", "curve": str(f), "degree": d, "twist": a}
    return SteinerPresentation(field, 3, m, tau, tuple(mats), prov)


# ---------------------------------------------------------------------------
# restriction
# ---------------------------------------------------------------------------


def restrict_to_subspace(P: SteinerPresentation, basis: Mat, note: dict | None = None) -> SteinerPresentation:
    """Substitute ``X = basis @ t`` (``basis`` is ``nvars x s``) into the pencil."""
    if basis.rows != P.nvars:
        raise ValueError("basis has the wrong number of rows")
    if basis.field != P.field:
        raise FieldMismatchError(f"{basis.field} vs {P.field}")
    mats = tuple(P.combine(basis.col(j)) for j in range(basis.cols))
    prov = {"kind": "restricted", "parent": P.provenance.get("kind", "manual"),
            "basis": basis.to_strings()}
    if note:
        prov.update(note)
    return SteinerPresentation(P.field, basis.cols, P.m, P.tau, mats, prov)


def restrict_to_hyperplane(P: SteinerPresentation, h: ProjPoint | Sequence) -> SteinerPresentation:
    if not isinstance(h, ProjPoint):
        h = ProjPoint(P.field, h)
    if len(h.coords) != P.nvars:
        raise ValueError("hyperplane lives in the wrong space")
    return restrict_to_subspace(P, hyperplane_basis(h), {"hyperplane": h.to_strings()})


# ---------------------------------------------------------------------------
# bundle validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BundleValidity:
    valid: bool
    strategy: str
    conclusive: bool
    bad_point: ProjPoint | None = None
    checked: int = 0
    note: str = ""

    def __bool__(self) -> bool:
        return self.valid


def _pencil_rank(P: SteinerPresentation, coords) -> int:
    return rank(P.pencil_at(coords))


def validate_bundle(P: SteinerPresentation, strategy: str = "exhaustive-fp", samples: int = 200,
                    seed: int = 0) -> BundleValidity:
    """Check that ``N(x)`` is injective at every point.

    ``exhaustive-fp`` scans ``P^n(F_p)``; ``sampled`` tests seeded random
    points; ``minors`` checks that the maximal minors have no common zero
    over the algebraic closure.
    """
    if strategy == "exhaustive-fp":
        if not P.field.is_prime:
            raise StrategyError("exhaustive-fp needs a prime field")
        count = 0
        for x in projective_points(P.field, P.n):
            count += 1
            if _pencil_rank(P, x.coords) < P.m:
                return BundleValidity(False, strategy, True, x, count)
        return BundleValidity(True, strategy, True, None, count)
    if strategy == "sampled":
        rng = random.Random(seed)
        for i in range(samples):
            x = random_point(P.field, P.n, rng)
            if _pencil_rank(P, x.coords) < P.m:
                return BundleValidity(False, strategy, True, x, i + 1)
        return BundleValidity(True, strategy, False, None, samples, "probabilistic")
    if strategy == "minors":
        ok, note = _minors_have_no_common_zero(P)
        return BundleValidity(ok, strategy, True, None, 0, note)
    raise StrategyError(f"unknown strategy {strategy!r}")


def pencil_form_matrix(P: SteinerPresentation) -> list[list[HomForm]]:
    """``N(X)`` as a ``tau x m`` matrix of linear forms."""
    return [[HomForm(P.field, P.nvars, 1, tuple(N[a, b] for N in P.matrices)) for b in range(P.m)]
            for a in range(P.tau)]


def form_determinant(M: list[list[HomForm]], field: Field, nvars: int) -> HomForm:
    """Determinant of a square matrix of forms by Laplace expansion."""
    k = len(M)
    if k == 0:
        return HomForm.from_terms(field, nvars, 0, {(0,) * nvars: 1})
    memo: dict = {}

    def minor(row: int, cols: tuple) -> HomForm:
        if row == k:
            return HomForm.from_terms(field, nvars, 0, {(0,) * nvars: 1})
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = None
        for idx, c in enumerate(cols):
            entry = M[row][c]
            if entry.is_zero():
                continue
            term = entry * minor(row + 1, cols[:idx] + cols[idx + 1:])
            if idx % 2:
                term = -term
            total = term if total is None else total + term
        if total is None:
            deg = sum(M[i][0].degree for i in range(row, k))
            total = HomForm.zero(field, nvars, deg)
        memo[key] = total
        return total

    return minor(0, tuple(range(k)))


def maximal_minors(P: SteinerPresentation) -> list[HomForm]:
    F = pencil_form_matrix(P)
    out = []
    for rows in itertools.combinations(range(P.tau), P.m):
        sub = [[F[a][b] for b in range(P.m)] for a in rows]
        d = form_determinant(sub, P.field, P.nvars)
        if not d.is_zero():
            out.append(d)
    return out


def _ideal_fills_degree(gens: list[HomForm], D: int) -> bool:
    """Whether the degree-``D`` part of the ideal generated by ``gens`` is everything."""
    if not gens:
        return False
    field, nvars = gens[0].field, gens[0].nvars
    target = comb(nvars - 1 + D, D)
    mats = [form_multiplication_matrix(g, D - g.degree) for g in gens]
    cols = [M.col(j) for M in mats for j in range(M.cols)]
    if len(cols) < target:
        return False
    if field.is_prime:
        return rank_of_rows(field, cols, target) == target
    # rank over Q is at least the rank modulo a prime not dividing denominators
    from .exactalg import GF

    for p in (2_147_483_647, 2_147_483_629):
        Fp = GF(p)
        try:
            red = [[Fp.convert(x) for x in c] for c in cols]
        except ZeroDivisionError:
            continue
        if rank_of_rows(Fp, red, target) == target:
            return True
    return rank_of_rows(field, cols, target) == target


def _minors_have_no_common_zero(P: SteinerPresentation) -> tuple[bool, str]:
    if P.m == 0:
        return True, "no twisted summands"
    minors = maximal_minors(P)
    if not minors:
        return False, "all maximal minors vanish identically"
    # with no common zero, n+1 generic combinations form a regular sequence,
    # so the ideal contains every form of degree (n+1)(m-1)+1
    bound = (P.n + 1) * (P.m - 1) + 1
    for D in range(P.m, bound + 1):
        if _ideal_fills_degree(minors, D):
            return True, f"maximal minors generate all forms of degree {D} (cost: {len(minors)} minors)"
    return False, f"maximal minors miss degree {bound}; common zero exists"


# ---------------------------------------------------------------------------
# homomorphisms and isomorphism
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomSpace:
    """Basis of pairs ``(A, B)`` with ``B @ N1_i == N2_i @ A`` for all ``i``."""

    basis: tuple
    shape_a: tuple
    shape_b: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combine(self, coeffs: Sequence) -> tuple[Mat, Mat]:
        A, B = self.basis[0]
        f = A.field
        ea = [0] * len(A.entries)
        eb = [0] * len(B.entries)
        for c, (Ai, Bi) in zip(coeffs, self.basis):
            if c:
                ea = [x + c * y for x, y in zip(ea, Ai.entries)]
                eb = [x + c * y for x, y in zip(eb, Bi.entries)]
        return (Mat(f, A.rows, A.cols, tuple(f.convert(x) for x in ea)),
                Mat(f, B.rows, B.cols, tuple(f.convert(x) for x in eb)))


def intertwines(P1: SteinerPresentation, P2: SteinerPresentation, A: Mat, B: Mat) -> bool:
    return all(B @ N1 == N2 @ A for N1, N2 in zip(P1.matrices, P2.matrices))


def hom_space(P1: SteinerPresentation, P2: SteinerPresentation) -> HomSpace:
    """All morphisms of presentations ``P1 -> P2`` (equivalently ``E1 -> E2``)."""
    if P1.field != P2.field:
        raise FieldMismatchError(f"{P1.field} vs {P2.field}")
    if P1.nvars != P2.nvars:
        raise ValueError("presentations live on different spaces")
    f = P1.field
    m1, t1, m2, t2 = P1.m, P1.tau, P2.m, P2.tau
    na = m2 * m1
    nunk = na + t2 * t1
    rows = []
    for N1, N2 in zip(P1.matrices, P2.matrices):
        for a in range(t2):
            for b in range(m1):
                eq = [f.zero()] * nunk
                # sum_c B[a,c] N1[c,b]
                for c in range(t1):
                    v = N1[c, b]
                    if v:
                        eq[na + a * t1 + c] = f.convert(eq[na + a * t1 + c] + v)
                # - sum_d N2[a,d] A[d,b]
                for d in range(m2):
                    v = N2[a, d]
                    if v:
                        eq[d * m1 + b] = f.convert(eq[d * m1 + b] - v)
                rows.append(eq)
    if rows:
        K = kernel_basis(Mat.from_rows(f, rows, nunk))
    else:
        K = Mat.identity(f, nunk)
    basis = []
    for j in range(K.cols):
        v = K.col(j)
        A = Mat(f, m2, m1, tuple(v[:na]))
        B = Mat(f, t2, t1, tuple(v[na:]))
        basis.append((A, B))
    return HomSpace(tuple(basis), (m2, m1), (t2, t1))


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    witness: tuple | None = None
    hom_dim: int = 0
    probabilistic: bool = False
    failure_bound: float = 0.0
    method: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.isomorphic


def _is_iso_pair(A: Mat, B: Mat) -> bool:
    return A.is_invertible() and B.is_invertible()


def is_isomorphic(P1: SteinerPresentation, P2: SteinerPresentation, trials: int = 20,
                  seed: int = 0, exhaustive_limit: int = 1009) -> IsoResult:
    """Search the hom space for a pair ``(A, B)`` of invertible matrices.

    Over ``F_p`` with ``p <= exhaustive_limit`` and hom dimension at most 2 the
    search is exhaustive; otherwise seeded random combinations are tried and a
    negative answer carries a Schwartz-Zippel failure bound.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    if (P1.m, P1.tau) != (P2.m, P2.tau) or P1.nvars != P2.nvars:
        return IsoResult(False, reason=f"shape mismatch {(P1.m, P1.tau)} vs {(P2.m, P2.tau)}")
    if P1.field != P2.field:
        return IsoResult(False, reason="field mismatch")
    H = hom_space(P1, P2)
    if H.dim == 0:
        return IsoResult(False, hom_dim=0, method="hom-space", reason="no nonzero morphism")
    f = P1.field

    def found(A, B, method):
        if not intertwines(P1, P2, A, B) or not _is_iso_pair(A, B):
            raise AssertionError("witness failed exact verification")
        return IsoResult(True, (A, B), H.dim, False, 0.0, method, "verified witness")

    for A, B in H.basis:
        if _is_iso_pair(A, B):
            return found(A, B, "basis")

    if f.is_prime and f.p <= exhaustive_limit and H.dim <= 2:
        # projective combinations suffice: invertibility is scale-invariant
        for c in projective_points(f, H.dim - 1) if H.dim > 1 else ():
            A, B = H.combine(c.coords)
            if _is_iso_pair(A, B):
                return found(A, B, "exhaustive")
        return IsoResult(False, None, H.dim, False, 0.0, "exhaustive",
                         "no invertible morphism over the base field")

    rng = random.Random(seed)
    bound = 1000
    for _ in range(trials):
        coeffs = [f.convert(f.random(rng, bound)) for _ in range(H.dim)]
        if not any(coeffs):
            continue
        A, B = H.combine(coeffs)
        if _is_iso_pair(A, B):
            return found(A, B, "random")
    size = f.size() if f.is_prime else 2 * bound + 1
    per = min(1.0, (P1.m + P1.tau) / size)
    return IsoResult(False, None, H.dim, True, per ** trials, "random",
                     f"no invertible combination in {trials} trials")


__all__ = [
    "PreconditionError", "StrategyError", "SteinerPresentation", "MONOMIAL_ORDER",
    "build_logarithmic", "build_schwarzenberger", "build_curve_twist", "quotient_basis",
    "restrict_to_subspace", "restrict_to_hyperplane",
    "BundleValidity", "validate_bundle", "pencil_form_matrix", "form_determinant", "maximal_minors",
    "HomSpace", "hom_space", "intertwines", "IsoResult", "is_isomorphic",
]
