"""Exact scalars and dense matrices over Q and prime fields F_p.

Matrices store *raw* field values (``Fraction`` for Q, ``int`` in ``[0, p)``
for F_p) together with a field descriptor; :class:`FieldElem` is the tagged
scalar used at API boundaries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class FieldMismatchError(ValueError):
    """Raised when values from different fields are combined."""


class FieldSpecError(ValueError):
    """Raised for a malformed or unsupported field descriptor."""


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


class Field:
    """Common interface of the two supported base fields."""

    is_prime = False
    characteristic = 0

    def __call__(self, x):
        return self.convert(x)

    def convert(self, x):
        raise NotImplementedError

    def zero(self):
        return self.convert(0)

    def one(self):
        return self.convert(1)

    def inv(self, a):
        raise NotImplementedError

    def to_str(self, a) -> str:
        return str(a)

    def from_str(self, s: str):
        return self.convert(Fraction(s.strip()))

    def random(self, rng: random.Random, bound: int = 1000):
        raise NotImplementedError

    def size(self) -> int | None:
        return None

    @property
    def descriptor(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Rationals(Field):
    def convert(self, x):
        if isinstance(x, FieldElem):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} element used over {self}")
            return x.value
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        return Fraction(x)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def random(self, rng: random.Random, bound: int = 1000):
        return Fraction(rng.randint(-bound, bound))

    @property
    def descriptor(self) -> str:
        return "Q"

    def __repr__(self) -> str:
        return "QQ"


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    is_prime = True

    def __post_init__(self):
        if not (2 <= self.p < 2**31) or not _is_prime(self.p):
            raise FieldSpecError(f"p={self.p} is not a prime below 2^31")

    @property
    def characteristic(self) -> int:  # type: ignore[override]
        return self.p

    def convert(self, x):
        if isinstance(x, FieldElem):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} element used over {self}")
            return x.value
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        return int(x) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def random(self, rng: random.Random, bound: int = 1000):
        return rng.randrange(self.p)

    def size(self) -> int:
        return self.p

    @property
    def descriptor(self) -> str:
        return f"p={self.p}"

    def __repr__(self) -> str:
        return f"GF({self.p})"


QQ = Rationals()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


@lru_cache(maxsize=None)
def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def parse_field(desc: str | Field) -> Field:
    """Parse ``"Q"``/``"rational"`` or ``"p=31"``/``"GF(31)"``."""
    if isinstance(desc, Field):
        return desc
    s = desc.strip().lower().replace(" ", "")
    if s in ("q", "qq", "rational", "rationals"):
        return QQ
    for prefix, suffix in (("p=", ""), ("gf(", ")"), ("f_", ""), ("f", "")):
        if s.startswith(prefix) and s.endswith(suffix):
            body = s[len(prefix): len(s) - len(suffix) if suffix else None]
            if body.isdigit():
                return GF(int(body))
    raise FieldSpecError(f"unrecognised field descriptor {desc!r}")


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldElem:
    field: Field
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.convert(self.value))

    def _other(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field.convert(other)

    def _wrap(self, v):
        return FieldElem(self.field, v)

    def __add__(self, other):
        return self._wrap(self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.value - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.value)

    def __mul__(self, other):
        return self._wrap(self.value * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def __truediv__(self, other):
        return self._wrap(self.value * self.field.inv(self._other(other)))

    def __rtruediv__(self, other):
        return self._wrap(self._other(other) * self.field.inv(self.value))

    def inverse(self):
        return self._wrap(self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return self.field.to_str(self.value)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mat:
    """Immutable dense matrix; ``entries`` is row-major."""

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    # construction ------------------------------------------------------

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        conv = field.convert
        return cls(field, len(rows), cols, tuple(conv(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], rows: int | None = None) -> "Mat":
        cols = list(columns)
        if rows is None:
            rows = len(cols[0]) if cols else 0
        return cls.from_rows(field, [list(c) for c in cols], rows).T if cols else cls.zeros(field, rows, 0)

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Mat":
        return cls(field, rows, cols, (field.zero(),) * (rows * cols))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        z, o = field.zero(), field.one()
        return cls(field, n, n, tuple(o if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, field: Field, diag: Sequence) -> "Mat":
        n = len(diag)
        z = field.zero()
        d = [field.convert(x) for x in diag]
        return cls(field, n, n, tuple(d[i] if i == j else z for i in range(n) for j in range(n)))

    # access ------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list:
        return list(self.entries[j::self.cols]) if self.cols else []

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def elem(self, i: int, j: int) -> FieldElem:
        return FieldElem(self.field, self[i, j])

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    # algebra -----------------------------------------------------------

    @property
    def T(self) -> "Mat":
        r, c = self.rows, self.cols
        e = self.entries
        return Mat(self.field, c, r, tuple(e[i * c + j] for j in range(c) for i in range(r)))

    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def _reduce(self, values: Iterable) -> tuple:
        if self.field.is_prime:
            p = self.field.p
            return tuple(v % p for v in values)
        return tuple(values)

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Mat(self.field, self.rows, self.cols,
                   self._reduce(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Mat(self.field, self.rows, self.cols,
                   self._reduce(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat":
        return Mat(self.field, self.rows, self.cols, self._reduce(-a for a in self.entries))

    def scale(self, c) -> "Mat":
        c = self.field.convert(c)
        return Mat(self.field, self.rows, self.cols, self._reduce(c * a for a in self.entries))

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            for c in ocols:
                out.append(sum(a * b for a, b in zip(r, c) if a and b))
        if not self.field.is_prime:
            out = [Fraction(x) for x in out]
        return Mat(self.field, self.rows, other.cols, self._reduce(out))

    def apply(self, vec: Sequence) -> list:
        """Matrix times a column vector given as a list of raw values."""
        out = [sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows)]
        return list(self._reduce(out))

    def hstack(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        rows = [self.row(i) + other.row(i) for i in range(self.rows)]
        return Mat(self.field, self.rows, self.cols + other.cols, tuple(x for r in rows for x in r))

    def vstack(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return Mat(self.field, self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat(self.field, len(rows), len(cols),
                   tuple(self[i, j] for i in rows for j in cols))

    # linear algebra ----------------------------------------------------

    def rref(self) -> tuple["Mat", list[int]]:
        return rref(self)

    def rank(self) -> int:
        return rank(self)

    def kernel_basis(self) -> "Mat":
        return kernel_basis(self)

    def det(self):
        return det(self)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and rank(self) == self.rows

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise ValueError("non-square matrix")
        n = self.rows
        R, piv = rref(self.hstack(Mat.identity(self.field, n)))
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return R.submatrix(range(n), range(n, 2 * n))

    def to_strings(self) -> list[list[str]]:
        f = self.field
        return [[f.to_str(x) for x in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_strings(cls, field: Field, rows: Sequence[Sequence[str]], cols: int | None = None) -> "Mat":
        return cls.from_rows(field, [[field.from_str(s) for s in r] for r in rows], cols)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.field.to_str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Mat<{self.field!r} {self.rows}x{self.cols}>[{body}]"


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def _bitsize(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def _echelon(field: Field, rows: list[list], ncols: int, reduced: bool,
             stop_col: int | None = None) -> tuple[list[list], list[int]]:
    """In-place Gaussian elimination on a list of rows.

    Pivots are searched only in columns ``< stop_col`` (default: all).
    """
    limit = ncols if stop_col is None else stop_col
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    if field.is_prime:
        p = field.p
        for c in range(limit):
            if r == nrows:
                break
            piv = next((i for i in range(r, nrows) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            prow = rows[r]
            inv = pow(prow[c], -1, p)
            if inv != 1:
                prow = rows[r] = [x * inv % p for x in prow]
            start = 0 if reduced else r + 1
            for i in range(start, nrows):
                if i != r:
                    f = rows[i][c]
                    if f:
                        rows[i] = [(a - f * b) % p for a, b in zip(rows[i], prow)]
            pivots.append(c)
            r += 1
    else:
        for c in range(limit):
            if r == nrows:
                break
            cands = [i for i in range(r, nrows) if rows[i][c]]
            if not cands:
                continue
            piv = min(cands, key=lambda i: _bitsize(rows[i][c]))
            rows[r], rows[piv] = rows[piv], rows[r]
            prow = rows[r]
            lead = prow[c]
            if lead != 1:
                prow = rows[r] = [x / lead for x in prow]
            start = 0 if reduced else r + 1
            for i in range(start, nrows):
                if i != r:
                    f = rows[i][c]
                    if f:
                        rows[i] = [a - f * b if b else a for a, b in zip(rows[i], prow)]
            pivots.append(c)
            r += 1
    return rows, pivots


def rref(M: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form and the (strictly increasing) pivot columns."""
    rows, piv = _echelon(M.field, M.to_rows(), M.cols, reduced=True)
    return Mat(M.field, M.rows, M.cols, tuple(x for r in rows for x in r)), piv


def rank(M: Mat) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    # eliminate along the shorter side
    rows = M.to_rows() if M.rows <= M.cols else M.T.to_rows()
    _, piv = _echelon(M.field, rows, len(rows[0]), reduced=False)
    return len(piv)


def rank_of_rows(field: Field, rows: list[list], ncols: int) -> int:
    """Rank of raw row lists (no Mat wrapping); rows are consumed."""
    if not rows or ncols == 0:
        return 0
    _, piv = _echelon(field, rows, ncols, reduced=False)
    return len(piv)


def kernel_basis(M: Mat) -> Mat:
    """Columns form a basis of the right null space of ``M``."""
    R, piv = rref(M)
    free = [j for j in range(M.cols) if j not in set(piv)]
    f = M.field
    zero, one = f.zero(), f.one()
    cols = []
    for j in free:
        v = [zero] * M.cols
        v[j] = one
        for i, pc in enumerate(piv):
            v[pc] = f.convert(-R[i, j])
        cols.append(v)
    if not cols:
        return Mat.zeros(f, M.cols, 0)
    return Mat.from_rows(f, cols).T


def cokernel_projection(M: Mat) -> tuple[Mat, list[int]]:
    """Deterministic projection onto ``K^rows / im(M)``.

    Returns ``(pi, selected)`` with ``pi @ M == 0``, ``pi`` of full row rank
    ``rows - rank(M)``, and ``pi`` sending the unit vectors ``e_s`` for
    ``s in selected`` to the standard basis. ``selected`` is the
    lexicographically first set of unit vectors completing ``im(M)``.
    """
    n = M.rows
    aug = M.hstack(Mat.identity(M.field, n))
    rows, piv = _echelon(M.field, aug.to_rows(), aug.cols, reduced=True)
    rk = sum(1 for c in piv if c < M.cols)
    selected = [c - M.cols for c in piv if c >= M.cols]
    pi_rows = [r[M.cols:] for r in rows[rk:]]
    return Mat(M.field, n - rk, n, tuple(x for r in pi_rows for x in r)), selected


def det(M: Mat):
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    f = M.field
    rows = M.to_rows()
    n = M.rows
    d = f.one()
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c]), None)
        if piv is None:
            return f.zero()
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = -d
        lead = rows[c][c]
        d = d * lead
        inv = f.inv(lead)
        for i in range(c + 1, n):
            x = rows[i][c]
            if x:
                t = x * inv
                rows[i] = [a - t * b for a, b in zip(rows[i], rows[c])]
                if f.is_prime:
                    rows[i] = [a % f.p for a in rows[i]]
    return f.convert(d)


def random_matrix(field: Field, rows: int, cols: int, rng: random.Random, bound: int = 10) -> Mat:
    return Mat(field, rows, cols, tuple(field.convert(field.random(rng, bound)) for _ in range(rows * cols)))


__all__ = [
    "Field", "Rationals", "PrimeField", "QQ", "GF", "parse_field",
    "FieldElem", "FieldMismatchError", "FieldSpecError",
    "Mat", "rref", "rank", "rank_of_rows", "kernel_basis", "cokernel_projection", "det",
    "random_matrix",
]
