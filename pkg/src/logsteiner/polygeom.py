"""Homogeneous forms, projective points and ideal-sheaf cohomology of point sets.

Monomials are ordered graded-lexicographically with ``Y0 > Y1 > ...``.
Points of the dual space carry a fixed representative; everything computed
from a :class:`PointConfig` is invariant under rescaling representatives.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

from .exactalg import Field, FieldMismatchError, Mat, QQ, kernel_basis, rank_of_rows

MONOMIAL_ORDER = "grlex(Y0>Y1>...)"


class DegenerateInputError(ValueError):
    """Zero vectors, coincident points and similar degenerate data."""


class UndefinedInputError(ValueError):
    """Input outside the domain of an operation (e.g. too few points)."""


# ---------------------------------------------------------------------------
# monomials and forms
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree ``d`` in ``nvars`` variables, grlex order."""
    if nvars == 0:
        return ((),) if d == 0 else ()
    if nvars == 1:
        return ((d,),)
    out = []
    for e0 in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - e0):
            out.append((e0,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, d: int) -> dict:
    return {e: i for i, e in enumerate(monomials(nvars, d))}


def monomial_values(field: Field, coords: Sequence, d: int) -> list:
    """Values of all degree-``d`` monomials at ``coords`` (raw field values)."""
    nvars = len(coords)
    if field.is_prime:
        p = field.p
        powers = [[pow(c, e, p) for e in range(d + 1)] for c in coords]
        out = []
        for exps in monomials(nvars, d):
            v = 1
            for i, e in enumerate(exps):
                if e:
                    v = v * powers[i][e] % p
            out.append(v)
        return out
    powers = [[c ** e for e in range(d + 1)] for c in coords]
    out = []
    for exps in monomials(nvars, d):
        v = Fraction(1)
        for i, e in enumerate(exps):
            if e:
                v *= powers[i][e]
        out.append(v)
    return out


def multiplication_matrix(field: Field, nvars: int, var: int, d: int) -> Mat:
    """Matrix of multiplication by ``Y_var`` from degree ``d`` to ``d + 1``."""
    src = monomials(nvars, d)
    idx = _monomial_index(nvars, d + 1)
    rows, cols = len(idx), len(src)
    data = [field.zero()] * (rows * cols)
    one = field.one()
    for j, e in enumerate(src):
        t = list(e)
        t[var] += 1
        data[idx[tuple(t)] * cols + j] = one
    return Mat(field, rows, cols, tuple(data))


def form_multiplication_matrix(f: "HomForm", d: int) -> Mat:
    """Matrix of ``g -> f*g`` from degree ``d`` forms to degree ``d + deg f``."""
    field = f.field
    src = monomials(f.nvars, d)
    idx = _monomial_index(f.nvars, d + f.degree)
    rows, cols = len(idx), len(src)
    data = [field.zero()] * (rows * cols)
    fterms = [(e, c) for e, c in zip(monomials(f.nvars, f.degree), f.coeffs) if c]
    for j, e in enumerate(src):
        for fe, c in fterms:
            k = idx[tuple(a + b for a, b in zip(e, fe))]
            data[k * cols + j] = field.convert(data[k * cols + j] + c)
    return Mat(field, rows, cols, tuple(data))


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")
_VAR_RE = re.compile(r"^Y(\d+)(?:\^(\d+))?$")


@dataclass(frozen=True)
class HomForm:
    """Homogeneous form; ``coeffs`` indexed by ``monomials(nvars, degree)``."""

    field: Field
    nvars: int
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != comb(self.nvars - 1 + self.degree, self.degree):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def from_terms(cls, field: Field, nvars: int, degree: int, terms: dict) -> "HomForm":
        idx = _monomial_index(nvars, degree)
        coeffs = [field.zero()] * len(idx)
        for e, c in terms.items():
            if sum(e) != degree or len(e) != nvars:
                raise ValueError(f"monomial {e} is not of degree {degree} in {nvars} variables")
            coeffs[idx[tuple(e)]] = field.convert(coeffs[idx[tuple(e)]] + field.convert(c))
        return cls(field, nvars, degree, tuple(coeffs))

    @classmethod
    def zero(cls, field: Field, nvars: int, degree: int) -> "HomForm":
        return cls(field, nvars, degree, (field.zero(),) * comb(nvars - 1 + degree, degree))

    @classmethod
    def variable(cls, field: Field, nvars: int, i: int) -> "HomForm":
        e = [0] * nvars
        e[i] = 1
        return cls.from_terms(field, nvars, 1, {tuple(e): 1})

    @classmethod
    def linear(cls, field: Field, coeffs: Sequence) -> "HomForm":
        return cls(field, len(coeffs), 1, tuple(field.convert(c) for c in coeffs))

    def terms(self) -> dict:
        return {e: c for e, c in zip(monomials(self.nvars, self.degree), self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, point) -> object:
        coords = point.coords if isinstance(point, ProjPoint) else point
        vals = monomial_values(self.field, [self.field.convert(c) for c in coords], self.degree)
        return self.field.convert(sum(a * b for a, b in zip(self.coeffs, vals) if a))

    evaluate = __call__

    def _check(self, other: "HomForm"):
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other: "HomForm") -> "HomForm":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degrees")
        f = self.field
        return HomForm(f, self.nvars, self.degree, tuple(f.convert(a + b) for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "HomForm":
        f = self.field
        return HomForm(f, self.nvars, self.degree, tuple(f.convert(-a) for a in self.coeffs))

    def __sub__(self, other: "HomForm") -> "HomForm":
        return self + (-other)

    def scale(self, c) -> "HomForm":
        f = self.field
        c = f.convert(c)
        return HomForm(f, self.nvars, self.degree, tuple(f.convert(c * a) for a in self.coeffs))

    def __mul__(self, other: "HomForm") -> "HomForm":
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms().items():
            for e2, c2 in other.terms().items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return HomForm.from_terms(self.field, self.nvars, self.degree + other.degree, out)

    def monic(self) -> "HomForm":
        """Rescale so the grlex-leading coefficient is 1 (zero stays zero)."""
        lead = next((c for c in self.coeffs if c), None)
        if lead is None:
            return self
        return self.scale(self.field.inv(lead))

    def is_proportional(self, other: "HomForm") -> bool:
        self._check(other)
        return self.degree == other.degree and self.monic() == other.monic()

    def substitute(self, basis: Mat) -> "HomForm":
        """Pull back along the linear map ``t -> basis @ t`` (``nvars x s`` basis)."""
        if basis.rows != self.nvars:
            raise ValueError("substitution matrix has the wrong number of rows")
        s = basis.cols
        lin = [HomForm(self.field, s, 1, tuple(basis.row(i))) for i in range(self.nvars)]
        result = HomForm.zero(self.field, s, self.degree)
        for e, c in self.terms().items():
            term = HomForm.from_terms(self.field, s, 0, {(0,) * s: c})
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * lin[i]
            result = result + term
        return result

    # text syntax -------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        for e, c in self.terms().items():
            cs = self.field.to_str(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            factors = [f"Y{i}" if k == 1 else f"Y{i}^{k}" for i, k in enumerate(e) if k]
            if not factors:
                body = cs
            elif cs == "1":
                body = "*".join(factors)
            else:
                body = "*".join([cs] + factors)
            parts.append(("- " if neg else "+ ") + body)
        if not parts:
            return "0"
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    @classmethod
    def parse(cls, text: str, field: Field = QQ, nvars: int | None = None) -> "HomForm":
        """Parse ``c*Y0^a*Y1^b*...`` sums; ``c`` may be ``num/den``."""
        text = text.strip()
        if not text:
            raise ValueError("empty form")
        terms: dict = {}
        maxvar = -1
        parsed = []
        pos = 0
        for m in _TERM_RE.finditer(text):
            if m.start() != pos and text[pos:m.start()].strip():
                raise ValueError(f"cannot parse form near {text[pos:]!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            coeff = Fraction(sign)
            exps: dict = {}
            for factor in m.group(2).strip().split("*"):
                factor = factor.strip()
                vm = _VAR_RE.match(factor)
                if vm:
                    i = int(vm.group(1))
                    exps[i] = exps.get(i, 0) + int(vm.group(2) or 1)
                    maxvar = max(maxvar, i)
                elif re.fullmatch(r"\d+(/\d+)?", factor):
                    coeff *= Fraction(factor)
                else:
                    raise ValueError(f"bad factor {factor!r} in form {text!r}")
            parsed.append((coeff, exps))
        if text[pos:].strip():
            raise ValueError(f"trailing garbage in form {text!r}")
        if nvars is None:
            nvars = maxvar + 1
        if maxvar >= nvars:
            raise ValueError(f"form uses Y{maxvar} but only {nvars} variables declared")
        degrees = {sum(e.values()) for _, e in parsed}
        if len(degrees) != 1:
            raise ValueError(f"form {text!r} is not homogeneous")
        degree = degrees.pop()
        for coeff, exps in parsed:
            e = tuple(exps.get(i, 0) for i in range(nvars))
            terms[e] = terms.get(e, 0) + coeff
        return cls.from_terms(field, nvars, degree, terms)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


class ProjPoint:
    """A projective point with a stored representative.

    ``normalize=True`` (default) stores the representative with leading
    coordinate 1. Equality and hashing always use the normalized form.
    """

    __slots__ = ("field", "coords", "normalized")

    def __init__(self, field: Field, coords: Sequence, normalize: bool = True):
        vals = tuple(field.convert(c) for c in coords)
        lead = next((c for c in vals if c), None)
        if lead is None:
            raise DegenerateInputError("the zero vector is not a projective point")
        inv = field.inv(lead)
        norm = tuple(field.convert(c * inv) for c in vals)
        self.field = field
        self.normalized = norm
        self.coords = norm if normalize else vals

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def rescaled(self, c) -> "ProjPoint":
        c = self.field.convert(c)
        if not c:
            raise DegenerateInputError("rescaling by zero")
        return ProjPoint(self.field, [c * x for x in self.coords], normalize=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjPoint) and self.field == other.field and self.normalized == other.normalized

    def __hash__(self) -> int:
        return hash((self.field, self.normalized))

    def __lt__(self, other: "ProjPoint") -> bool:
        return _sort_key(self) < _sort_key(other)

    def to_strings(self, normalized: bool = False) -> list[str]:
        return [self.field.to_str(x) for x in (self.normalized if normalized else self.coords)]

    def __repr__(self) -> str:
        return "[" + ":".join(self.to_strings()) + "]"


def _sort_key(p: ProjPoint):
    if p.field.is_prime:
        return p.normalized
    return tuple((x.numerator, x.denominator) for x in p.normalized)


@dataclass(frozen=True)
class PointConfig:
    """Ordered set of distinct points of the dual space ``P^{n v}``."""

    field: Field
    n: int
    points: tuple = dc_field(default=())

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        seen = set()
        for p in pts:
            if not isinstance(p, ProjPoint):
                raise TypeError("PointConfig holds ProjPoint instances")
            if p.field != self.field:
                raise FieldMismatchError(f"point over {p.field} in a configuration over {self.field}")
            if p.dim != self.n:
                raise ValueError(f"point {p} does not live in P^{self.n}")
            if p in seen:
                raise DegenerateInputError(f"duplicate point {p}")
            seen.add(p)

    @classmethod
    def from_coords(cls, field: Field, coords: Iterable[Sequence], normalize: bool = True) -> "PointConfig":
        pts = [ProjPoint(field, c, normalize=normalize) for c in coords]
        if not pts:
            raise UndefinedInputError("empty configuration needs an explicit dimension")
        return cls(field, pts[0].dim, tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[ProjPoint]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in self.as_set()

    def as_set(self) -> frozenset:
        return frozenset(self.points)

    def same_set(self, other: "PointConfig") -> bool:
        return self.field == other.field and self.as_set() == other.as_set()

    def add(self, p: ProjPoint) -> "PointConfig":
        return PointConfig(self.field, self.n, self.points + (p,))

    def union(self, other: "PointConfig") -> "PointConfig":
        extra = tuple(p for p in other.points if p not in self.as_set())
        return PointConfig(self.field, self.n, self.points + extra)

    def remove(self, p: ProjPoint) -> "PointConfig":
        return PointConfig(self.field, self.n, tuple(q for q in self.points if q != p))

    def sorted(self) -> "PointConfig":
        return PointConfig(self.field, self.n, tuple(sorted(self.points)))


# ---------------------------------------------------------------------------
# evaluation and ideal cohomology
# ---------------------------------------------------------------------------


def _eval_rows(Z: PointConfig, d: int) -> list[list]:
    return [monomial_values(Z.field, p.coords, d) for p in Z]


def eval_matrix(Z: PointConfig, d: int) -> Mat:
    """``|Z| x C(n+d, n)`` matrix of monomial values at the stored representatives."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    ncols = comb(Z.n + d, Z.n)
    rows = _eval_rows(Z, d)
    return Mat(Z.field, len(rows), ncols, tuple(x for r in rows for x in r))


def _eval_rank(Z: PointConfig, d: int) -> int:
    return rank_of_rows(Z.field, _eval_rows(Z, d), comb(Z.n + d, Z.n))


def h0_ideal(Z: PointConfig, d: int) -> int:
    """``h^0(J_Z(d))``: degree-``d`` forms vanishing on ``Z``."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    return comb(Z.n + d, Z.n) - _eval_rank(Z, d)


def h1_ideal(Z: PointConfig, d: int) -> int:
    """``h^1(J_Z(d))``: failure of ``Z`` to impose independent conditions."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    return len(Z) - _eval_rank(Z, d)


def linear_system(Z: PointConfig, d: int) -> list[HomForm]:
    """Basis of the degree-``d`` forms vanishing on ``Z``."""
    K = kernel_basis(eval_matrix(Z, d))
    return [HomForm(Z.field, Z.n + 1, d, tuple(K.col(j))) for j in range(K.cols)]


# ---------------------------------------------------------------------------
# duality, lines, secants
# ---------------------------------------------------------------------------


def incidence(p: ProjPoint, h: ProjPoint) -> bool:
    """Whether ``p`` lies on the hyperplane with coordinates ``h``."""
    if p.field != h.field:
        raise FieldMismatchError(f"{p.field} vs {h.field}")
    if len(p.coords) != len(h.coords):
        raise ValueError("dimension mismatch")
    return p.field.convert(sum(a * b for a, b in zip(p.coords, h.coords))) == 0


def dual_line_through(p1: ProjPoint, p2: ProjPoint) -> ProjPoint:
    """The line through two points of a projective plane, as a dual point."""
    if p1 == p2:
        raise DegenerateInputError("a line needs two distinct points")
    if p1.dim != 2 or p2.dim != 2:
        raise ValueError("dual_line_through works in the plane")
    a, b = p1.coords, p2.coords
    cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    return ProjPoint(p1.field, cross)


def hyperplane_basis(h: ProjPoint) -> Mat:
    """Deterministic ``(n+1) x n`` basis of the hyperplane ``sum h_i X_i = 0``.

    The last coordinate with nonzero ``h``-entry is solved for; the remaining
    coordinates, in order, are the free (internal) coordinates.
    """
    f = h.field
    c = h.coords
    j = max(i for i, x in enumerate(c) if x)
    inv = f.inv(c[j])
    cols = []
    for i in range(len(c)):
        if i == j:
            continue
        v = [f.zero()] * len(c)
        v[i] = f.one()
        v[j] = f.convert(-c[i] * inv)
        cols.append(v)
    return Mat.from_rows(f, cols, len(c)).T


def secant_lines(Z: PointConfig, min_points: int = 3) -> dict:
    """Lines of the dual plane containing at least ``min_points`` points of ``Z``.

    Returns ``{line: sorted tuple of point indices}``.
    """
    if Z.n != 2:
        raise ValueError("secant lines are computed in the plane")
    found: dict = {}
    pts = Z.points
    for i, j in itertools.combinations(range(len(pts)), 2):
        line = dual_line_through(pts[i], pts[j])
        if line in found:
            continue
        on = tuple(k for k, q in enumerate(pts) if incidence(q, line))
        found[line] = on
    return {l: on for l, on in found.items() if len(on) >= min_points}


def max_secant(Z: PointConfig) -> int:
    """Largest number of points of ``Z`` on one line of the dual plane."""
    if Z.n != 2:
        raise ValueError("max_secant is defined in the plane")
    if len(Z) < 2:
        raise UndefinedInputError("max_secant needs at least two points")
    return max(len(on) for on in secant_lines(Z, 2).values())


@dataclass(frozen=True)
class GeneralPosition:
    ok: bool
    r: int
    h0: int
    max_secant: int | None = None
    bad_secants: tuple = ()
    sampled: bool = False
    samples: int = 0
    reasons: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def hyperplane_h1(Z: PointConfig, h: ProjPoint, d: int) -> int:
    """``h^1`` of ``J_{Z ∩ x}(d)`` on the hyperplane ``x`` with coordinates ``h``.

    Evaluating ambient degree-``d`` forms suffices: restriction to the
    hyperplane is surjective in every degree.
    """
    on = PointConfig(Z.field, Z.n, tuple(p for p in Z if incidence(p, h)))
    if not len(on):
        return 0
    return h1_ideal(on, d)


def is_general_position(Z: PointConfig, r: int, samples: int = 50, seed: int = 0) -> GeneralPosition:
    """Test ``(r+1)``-general position.

    In the plane the test is exact: no degree ``r+1`` curve through ``Z`` and
    no line holding ``r+3`` points. For ``n >= 3`` hyperplanes are sampled
    (spans of random ``n``-subsets of ``Z``) and the result is flagged.
    """
    h0 = h0_ideal(Z, r + 1)
    reasons = []
    if h0:
        reasons.append(f"h0(J_Z({r + 1})) = {h0} != 0")
    if Z.n == 2:
        if len(Z) < 2:
            return GeneralPosition(False, r, h0, None, (), False, 0, tuple(reasons) + ("fewer than two points",))
        lines = secant_lines(Z, 2)
        ms = max(len(on) for on in lines.values())
        bad = tuple(sorted(((l, on) for l, on in lines.items() if len(on) >= r + 3), key=lambda t: _sort_key(t[0])))
        if bad:
            reasons.append(f"{len(bad)} line(s) with >= {r + 3} points, max {ms}")
        return GeneralPosition(not reasons, r, h0, ms, bad, False, 0, tuple(reasons))
    rng = random.Random(seed)
    bad = []
    pts = Z.points
    for _ in range(samples):
        if len(pts) >= Z.n:
            chosen = rng.sample(range(len(pts)), Z.n)
            K = kernel_basis(Mat.from_rows(Z.field, [pts[i].coords for i in chosen]))
            h = ProjPoint(Z.field, K.col(0)) if K.cols == 1 else random_point(Z.field, Z.n, rng)
        else:
            h = random_point(Z.field, Z.n, rng)
        if hyperplane_h1(Z, h, r + 1):
            bad.append((h, tuple(i for i, p in enumerate(pts) if incidence(p, h))))
    if bad:
        reasons.append(f"{len(bad)} sampled hyperplane(s) where h0 jumps")
    return GeneralPosition(not reasons, r, h0, None, tuple(bad), True, samples, tuple(reasons))


# ---------------------------------------------------------------------------
# enumeration and sampling
# ---------------------------------------------------------------------------


def projective_points(field: Field, n: int) -> Iterator[ProjPoint]:
    """All points of ``P^n(F_p)`` in sorted normalized order."""
    if not field.is_prime:
        raise ValueError("exhaustive enumeration needs a prime field")
    return iter(_point_list(field, n))


@lru_cache(maxsize=16)
def _point_list(field: Field, n: int) -> tuple:
    p = field.p
    return tuple(ProjPoint(field, (0,) * lead + (1,) + tail)
                 for lead in range(n + 1) for tail in itertools.product(range(p), repeat=n - lead))


def count_projective_points(field: Field, n: int) -> int:
    p = field.p
    return (p ** (n + 1) - 1) // (p - 1)


@lru_cache(maxsize=4096)
def points_on_hyperplane(h: ProjPoint) -> tuple:
    """All ``F_p``-points of the hyperplane ``h`` (via its deterministic basis)."""
    B = hyperplane_basis(h)
    return tuple(ProjPoint(h.field, B.apply(list(t.coords))) for t in projective_points(h.field, h.dim - 1))


def random_point(field: Field, n: int, rng: random.Random, bound: int = 20) -> ProjPoint:
    while True:
        c = [field.random(rng, bound) for _ in range(n + 1)]
        if any(c):
            return ProjPoint(field, c)


def random_config(field: Field, n: int, k: int, rng: random.Random, bound: int = 20) -> PointConfig:
    pts: list = []
    seen = set()
    while len(pts) < k:
        p = random_point(field, n, rng, bound)
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return PointConfig(field, n, tuple(pts))


def curve_points(f: HomForm) -> list[ProjPoint]:
    """All ``F_p``-points of the plane curve ``f = 0``."""
    return [q for q in projective_points(f.field, f.nvars - 1) if f(q) == 0]


__all__ = [
    "MONOMIAL_ORDER", "DegenerateInputError", "UndefinedInputError",
    "monomials", "monomial_values", "multiplication_matrix", "form_multiplication_matrix",
    "HomForm", "ProjPoint", "PointConfig",
    "eval_matrix", "h0_ideal", "h1_ideal", "linear_system",
    "incidence", "dual_line_through", "hyperplane_basis", "secant_lines", "max_secant",
    "GeneralPosition", "is_general_position", "hyperplane_h1",
    "projective_points", "count_projective_points", "points_on_hyperplane",
    "random_point", "random_config", "curve_points",
]
