"""Seeded generators of point configurations used by the census and test suites."""

from __future__ import annotations

import random

from .exactalg import Field, Mat
from .polygeom import (
    HomForm,
    PointConfig,
    ProjPoint,
    curve_points,
    dual_line_through,
    h0_ideal,
    incidence,
    is_general_position,
    random_config,
)


def general_config(field: Field, k: int, r: int, rng: random.Random, t: int | None = None,
                   max_tries: int = 10_000, bound: int = 20) -> PointConfig:
    """``(r+1)``-general ``k``-set; with ``t`` given, also ``h^0(J_Z(r+2)) == t``."""
    for _ in range(max_tries):
        Z = random_config(field, 2, k, rng, bound)
        if is_general_position(Z, r).ok and (t is None or h0_ideal(Z, r + 2) == t):
            return Z
    raise RuntimeError(f"no suitable {k}-point configuration found")


def random_invertible(field: Field, rng: random.Random, n: int = 3, bound: int = 5) -> Mat:
    while True:
        M = Mat.from_rows(field, [[field.random(rng, bound) for _ in range(n)] for _ in range(n)])
        if M.is_invertible():
            return M


def conic_config(field: Field, k: int, rng: random.Random, veronese: bool = False, bound: int = 6) -> PointConfig:
    """``k`` distinct points on a smooth conic (the image of ``[u^2 : uv : v^2]``)."""
    g = Mat.identity(field, 3) if veronese else random_invertible(field, rng)
    pts: dict = {}
    while len(pts) < k:
        u, v = field.random(rng, bound), field.random(rng, bound)
        if not (u or v):
            continue
        q = ProjPoint(field, g.apply([u * u, u * v, v * v]))
        pts.setdefault(q, None)
    return PointConfig(field, 2, tuple(pts))


def cuspidal_cubic_config(field: Field, k: int, rng: random.Random, bound: int = 6) -> PointConfig:
    """``k`` points on a projectively transformed cuspidal cubic ``[u^3 : uv^2 : v^3]``."""
    g = random_invertible(field, rng)
    pts: dict = {}
    while len(pts) < k:
        u, v = field.random(rng, bound), field.random(rng, bound)
        if not (u or v):
            continue
        pts.setdefault(ProjPoint(field, g.apply([u ** 3, u * v * v, v ** 3])), None)
    return PointConfig(field, 2, tuple(pts))


def random_smooth_cubic(field: Field, rng: random.Random, min_points: int = 20) -> tuple[HomForm, list[ProjPoint]]:
    """A plane cubic over ``F_p`` with no line components and enough rational points.

    Smoothness is checked through the partial derivatives at rational points
    only; cubics used here just need no 4 collinear points and a unique cubic
    through the sampled sets, which callers verify.
    """
    if not field.is_prime:
        raise ValueError("random cubics are sampled over F_p")
    while True:
        f = HomForm(field, 3, 3, tuple(field.random(rng) for _ in range(10)))
        if f.is_zero():
            continue
        pts = curve_points(f)
        if len(pts) < min_points:
            continue
        # no line components: no line holds more than 3 rational points
        ok = True
        for a in pts[:6]:
            for b in pts[6:12]:
                L = dual_line_through(a, b)
                if sum(1 for q in pts if incidence(q, L)) > 3:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return f, pts


def _line_section(pts: list[ProjPoint], rng: random.Random) -> tuple | None:
    a, b = rng.sample(pts, 2)
    L = dual_line_through(a, b)
    on = [q for q in pts if incidence(q, L)]
    return tuple(on) if len(on) == 3 else None


def cubic_sharing_pair(field: Field, rng: random.Random, equivalent: bool = True,
                       max_tries: int = 2000) -> tuple[PointConfig, PointConfig, HomForm]:
    """Two 9-point sets on one cubic, ``(2)``-general, each with ``t = 1``.

    With ``equivalent`` the sets differ by two collinear triples, so they are
    linearly equivalent divisors on the cubic; otherwise they are independent
    random 9-subsets.
    """
    f, pts = random_smooth_cubic(field, rng)
    for _ in range(max_tries):
        if equivalent:
            s1, s2 = _line_section(pts, rng), _line_section(pts, rng)
            if s1 is None or s2 is None or set(s1) & set(s2):
                continue
            rest = [q for q in pts if q not in s1 and q not in s2]
            if len(rest) < 6:
                continue
            base = rng.sample(rest, 6)
            Z1 = PointConfig(field, 2, tuple(base) + s1)
            Z2 = PointConfig(field, 2, tuple(base) + s2)
        else:
            Z1 = PointConfig(field, 2, tuple(rng.sample(pts, 9)))
            Z2 = PointConfig(field, 2, tuple(rng.sample(pts, 9)))
            if Z1.same_set(Z2):
                continue
        if all(is_general_position(Z, 1).ok and h0_ideal(Z, 3) == 1 for Z in (Z1, Z2)):
            return Z1, Z2, f.monic()
    raise RuntimeError("could not build a cubic-sharing pair")


def shuffled_rescaled(Z: PointConfig, rng: random.Random) -> PointConfig:
    """Same set, permuted order and random nonzero rescaling of representatives."""
    pts = list(Z.points)
    rng.shuffle(pts)
    out = []
    for p in pts:
        c = 0
        while not c:
            c = Z.field.convert(Z.field.random(rng, 9))
        out.append(p.rescaled(c))
    return PointConfig(Z.field, Z.n, tuple(out))


__all__ = [
    "general_config", "random_invertible", "conic_config", "cuspidal_cubic_config",
    "random_smooth_cubic", "cubic_sharing_pair", "shuffled_rescaled",
]
