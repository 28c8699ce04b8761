"""Acceptance gate: criteria 1-10, each at its stated (exact) tolerance.

Every criterion is computed by ``run_criteria``; criterion 10 runs it a
second time and compares per-criterion SHA-256 digests of the serialized
artifacts. One PASS/FAIL line per criterion is printed in the pytest
terminal summary, or on stdout when this file is run as a script.
"""

from __future__ import annotations

import hashlib
import random
import sys
import time
from functools import lru_cache

import pytest

from logsteiner.exactalg import GF, QQ
from logsteiner.formats import dumps, form_to_json, mat_pair_to_json, presentation_to_json, wreport_to_json
from logsteiner.instability import (
    CURVE,
    FINITE,
    WHOLE,
    classify_W_ideal,
    family_two_bundle,
    projected_cubic,
    scan_W_bundle,
    secant_pencil_check,
    splitting_type,
    torelli_compare,
    unstable_test_bundle,
    unstable_test_ideal,
)
from logsteiner.polygeom import HomForm, PointConfig, ProjPoint, curve_points, projective_points, random_point
from logsteiner.samples import (
    conic_config,
    cubic_sharing_pair,
    cuspidal_cubic_config,
    general_config,
    random_invertible,
    shuffled_rescaled,
)
from logsteiner.steiner import (
    build_curve_twist,
    build_logarithmic,
    build_schwarzenberger,
    intertwines,
    is_isomorphic,
    validate_bundle,
)
from oracles import plane_points_mod

F31 = GF(31)
P2_SIZE = 31 * 31 + 31 + 1
CONIC = HomForm.parse("Y0*Y2 - Y1^2", QQ)
FERMAT = HomForm.parse("Y0^3 + Y1^3 + Y2^3", F31)
# eliminating s = u/v from [u^3 : u v^2 : v^3]
CUSPIDAL = HomForm.parse("Y0*Y2^2 - Y1^3", F31)

ACCEPTANCE_LINES: list[str] = []

TITLES = {
    1: "tangent-bundle identity (frame, every line unstable, kernel 1)",
    2: "finite case: 20+20 exhaustive scans over F_31 return exactly Z",
    3: "oracle agreement: 40 x 993 exhaustive tests and 500+ rational tests",
    4: "Veronese 5-subsets over Q are Schwarzenberger E_3(C_2), W = conic",
    5: "Fermat cubic twists: a=2 whole plane, a=3 exactly the cubic",
    6: "restricted Schwarzenberger(3,5): W equals the projected cubic",
    7: "secant-line lemma: zero violations on all bundles of 1-6",
    8: "splitting coherence on 200 (bundle, line) pairs",
    9: "Torelli census: 50 pairs, zero dichotomy violations",
    10: "determinism: byte-identical artifacts on rerun",
}


def _pt_key(q: ProjPoint) -> tuple:
    return tuple(int(c) for c in q.normalized)


def _digest(chunks: list[str]) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c.encode())
    return h.hexdigest()


class Run:
    """Results and artifacts of one pass over criteria 1-9."""

    def __init__(self):
        self.ok: dict[int, bool] = {}
        self.detail: dict[int, str] = {}
        self.artifacts: dict[int, list[str]] = {i: [] for i in range(1, 10)}
        self.bundles: list[tuple[str, object, list]] = []  # (label, presentation, unstable set or None)

    def art(self, i: int, obj) -> None:
        self.artifacts[i].append(dumps(obj))

    def done(self, i: int, ok: bool, detail: str) -> None:
        self.ok[i] = bool(ok)
        self.detail[i] = detail


# ---------------------------------------------------------------------------


def criterion_1(run: Run) -> None:
    Z = PointConfig.from_coords(F31, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    P = build_logarithmic(Z, 0)
    valid = validate_bundle(P, "exhaustive-fp")
    kernels = [unstable_test_bundle(P, q).kernel_dim for q in projective_points(F31, 2)]
    found, rep = scan_W_bundle(P)
    run.bundles.append(("frame", P, found))
    run.art(1, presentation_to_json(P))
    run.art(1, kernels)
    ok = (P.m, P.tau) == (1, 3) and valid.valid and len(kernels) == P2_SIZE and set(kernels) == {1}
    ok = ok and rep.kind == WHOLE
    run.done(1, ok, f"shape=({P.m},{P.tau}) valid={valid.valid} lines={len(kernels)} "
                    f"kernel dims={sorted(set(kernels))}")


def _c2_configs() -> list[tuple[PointConfig, int]]:
    out = []
    for k, r in ((6, 0), (10, 1)):
        for i in range(20):
            out.append((general_config(F31, k, r, random.Random(f"c2:{k}:{r}:{i}"), t=0), r))
    return out


def criteria_2_3(run: Run) -> None:
    exact = mismatches = tests = 0
    for Z, r in _c2_configs():
        P = build_logarithmic(Z, r)
        found, rep = scan_W_bundle(P)
        ideal = [q for q in projective_points(F31, 2) if unstable_test_ideal(Z, r, q, check=False)]
        tests += P2_SIZE
        mismatches += len(set(found) ^ set(ideal))
        exact += set(found) == Z.as_set() and rep.kind == FINITE
        run.bundles.append((f"log k={len(Z)} r={r}", P, found))
        run.art(2, {"points": [p.to_strings() for p in Z], "found": [q.to_strings() for q in found]})
        run.art(3, [q.to_strings() for q in ideal])
    run.done(2, exact == 40, f"{exact}/40 configurations with W = Z exactly")

    q_tests = q_bad = 0
    for i, (Z, r) in enumerate(_rational_configs()):
        P = build_logarithmic(Z, r)
        for q in _rational_probes(Z, r, random.Random(f"c3q:{i}")):
            b = unstable_test_bundle(P, q).unstable
            d = unstable_test_ideal(Z, r, q, check=False)
            q_tests += 1
            q_bad += b != d
            run.art(3, [q.to_strings(), b, d])
    ok = mismatches == 0 and q_bad == 0 and q_tests >= 500 and tests == 40 * P2_SIZE
    run.done(3, ok, f"F_31: {tests - mismatches}/{tests} agree; Q: {q_tests - q_bad}/{q_tests} agree")


def _rational_configs() -> list[tuple[PointConfig, int]]:
    rng = random.Random("c3-configs")
    cfgs = [(general_config(QQ, 6, 0, rng, t=0), 0) for _ in range(3)]
    cfgs += [(conic_config(QQ, 5, rng), 0) for _ in range(2)]
    cfgs += [(conic_config(QQ, 6, rng), 0)]
    cfgs += [(general_config(QQ, 10, 1, rng, t=0, bound=12), 1) for _ in range(2)]
    cfgs += [(general_config(QQ, 9, 1, rng, bound=12), 1)]
    cfgs += [(cuspidal_cubic_config(QQ, 9, rng), 1) for _ in range(2)]
    cfgs += [(cuspidal_cubic_config(QQ, 10, rng), 1)]
    return cfgs


def _rational_probes(Z: PointConfig, r: int, rng: random.Random, total: int = 42) -> list[ProjPoint]:
    probes = list(Z)
    curves = classify_W_ideal(Z, r, check=False)
    if curves.kind == CURVE:
        # extra rational points of the curve where it is easy to find them
        f = curves.curve
        for _ in range(400):
            if len(probes) >= len(Z) + 10:
                break
            a = probes[rng.randrange(len(Z))]
            b = probes[rng.randrange(len(Z))] if f.degree == 3 else random_point(QQ, 2, rng, 4)
            if a == b:
                continue
            for q in _line_curve_points(f, a, b):
                if q not in probes:
                    probes.append(q)
    while len(probes) < total:
        probes.append(random_point(QQ, 2, rng, 6))
    return probes[:total]


def _line_curve_points(f: HomForm, a: ProjPoint, b: ProjPoint) -> list[ProjPoint]:
    """Residual intersection of ``f`` with the line ``ab``.

    ``g(s, t) = f(s a + t b)`` vanishes at ``t = 0`` (and at ``s = 0`` for a
    cubic with both points on it), leaving one linear factor whose root is a
    rational point of ``f``.
    """
    def g(s, t):
        return f([s * x + t * y for x, y in zip(a.coords, b.coords)])

    if f.degree == 2:
        # g = t (alpha s + beta t)
        beta = g(0, 1)
        alpha = g(1, 1) - beta
    elif f.degree == 3:
        # g = s t (alpha s + beta t)
        g12, g21 = g(1, 2), g(2, 1)
        alpha = (2 * g21 - g12) / 6
        beta = (2 * g12 - g21) / 6
    else:
        return []
    c = [-beta * x + alpha * y for x, y in zip(a.coords, b.coords)]
    if not any(c) or f(c) != 0:
        return []
    return [ProjPoint(QQ, c)]


def criterion_4(run: Run) -> None:
    S = build_schwarzenberger(2, 3)
    rng = random.Random("c4")
    good = 0
    for i in range(5):
        ts = rng.sample(range(-12, 13), 5)
        Z = PointConfig.from_coords(QQ, [(t * t, t, 1) for t in ts])
        P = build_logarithmic(Z, 0)
        res = is_isomorphic(P, S, seed=i)
        verified = False
        if res.isomorphic:
            A, B = res.witness
            verified = intertwines(P, S, A, B) and A.is_invertible() and B.is_invertible()
        rep = classify_W_ideal(Z, 0)
        conic = rep.kind == CURVE and rep.curve.is_proportional(CONIC)
        good += res.isomorphic and verified and conic
        conic_pts = [ProjPoint(QQ, (t * t, t, 1)) for t in range(-20, 21)]
        run.bundles.append((f"veronese {ts}", P, sorted(set(Z) | set(conic_pts))))
        run.art(4, {"presentation": presentation_to_json(P), "witness": mat_pair_to_json(res.witness),
                    "report": wreport_to_json(rep)})
    run.done(4, good == 5, f"{good}/5 subsets isomorphic with verified witness and conic W")


def criterion_5(run: Run) -> None:
    P2 = build_curve_twist(FERMAT, 2)
    P3 = build_curve_twist(FERMAT, 3)
    f2, r2 = scan_W_bundle(P2)
    f3, r3 = scan_W_bundle(P3)
    oracle = sorted(pt for pt in plane_points_mod(31) if (pt[0] ** 3 + pt[1] ** 3 + pt[2] ** 3) % 31 == 0)
    got = sorted(_pt_key(q) for q in f3)
    run.bundles += [("fermat a=2", P2, f2), ("fermat a=3", P3, f3)]
    for P, f, rep in ((P2, f2, r2), (P3, f3, r3)):
        run.art(5, {"presentation": presentation_to_json(P), "report": wreport_to_json(rep)})
    ok = len(f2) == P2_SIZE and r2.kind == WHOLE and got == oracle and r3.kind == CURVE
    ok = ok and r3.curve.is_proportional(FERMAT)
    run.done(5, ok, f"a=2: {len(f2)}/{P2_SIZE} unstable; a=3: {len(got)} found vs {len(oracle)} cubic points")


def _on_twisted_cubic(c) -> bool:
    rows = [[c[0], c[1], c[2]], [c[1], c[2], c[3]]]
    return all((rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i]) % 31 == 0
               for i in range(3) for j in range(i + 1, 3))


def criterion_6(run: Run) -> None:
    rng = random.Random("c6")
    while True:
        h = random_point(F31, 3, rng)
        if all(h.coords) and not _on_twisted_cubic([int(x) for x in h.coords]):
            break
    results = []
    for hp in (h, ProjPoint(F31, (0, 1, 0, 0))):
        P = family_two_bundle(hp)
        valid = validate_bundle(P, "exhaustive-fp").valid
        found, rep = scan_W_bundle(P, degree=3)
        f = projected_cubic(hp, F31)
        pts = sorted(curve_points(f))
        results.append((valid and found == pts, f))
        run.bundles.append((f"family II {hp}", P, found))
        run.art(6, {"plane": hp.to_strings(), "cubic": form_to_json(f), "found": [q.to_strings() for q in found]})
    cusp = results[1][1].is_proportional(CUSPIDAL)
    ok = all(r for r, _ in results) and cusp
    run.done(6, ok, f"general plane {h}: {results[0][0]}; X1=0: {results[1][0]}, cubic {results[1][1]} "
                    f"cuspidal={cusp}")


def criterion_7(run: Run) -> None:
    total = 0
    for label, P, S in run.bundles:
        v = secant_pencil_check(P, S, seed=0)
        total += len(v)
        run.art(7, [label, len(v)])
    run.done(7, total == 0, f"{total} violations over {len(run.bundles)} bundles")


def criterion_8(run: Run) -> None:
    pool = [(lbl, P, S) for lbl, P, S in run.bundles if P.n == 2]
    rng = random.Random("c8")
    bad = 0
    zero_lines = 0
    for i in range(200):
        lbl, P, S = pool[rng.randrange(len(pool))]
        if S and rng.random() < 0.5:
            q = S[rng.randrange(len(S))]
        else:
            q = random_point(P.field, 2, rng, 9)
        st = splitting_type(P, q)
        kd = unstable_test_bundle(P, q).kernel_dim
        zero_lines += st.zeros > 0
        bad += sum(st.degrees) != P.m or st.zeros != kd
        run.art(8, [lbl, q.to_strings(), list(st.degrees), kd])
    run.done(8, bad == 0, f"{200 - bad}/200 coherent ({zero_lines} lines with a zero summand)")


def _same_conic_pair(rng: random.Random) -> tuple[PointConfig, PointConfig]:
    g = random_invertible(F31, rng)
    pts = sorted({ProjPoint(F31, g.apply([u * u, u * v, v * v]))
                  for u, v in [(1, t) for t in range(31)] + [(0, 1)]})
    while True:
        a = PointConfig(F31, 2, tuple(rng.sample(pts, 5)))
        b = PointConfig(F31, 2, tuple(rng.sample(pts, 5)))
        if not a.same_set(b):
            return a, b


def _c9_pairs() -> list[tuple[str, PointConfig, PointConfig, int]]:
    rng = random.Random("c9")
    pairs = []
    for i in range(10):
        k, r = ((6, 0), (10, 1))[i % 2]
        Z = general_config(F31, k, r, rng)
        pairs.append(("equal", Z, shuffled_rescaled(Z, rng), r))
    for _ in range(10):
        a, b = _same_conic_pair(rng)
        pairs.append(("conic", a, b, 0))
    for _ in range(10):
        a, b, _ = cubic_sharing_pair(F31, rng, equivalent=True)
        pairs.append(("cubic-equivalent", a, b, 1))
    for _ in range(5):
        a, b, _ = cubic_sharing_pair(F31, rng, equivalent=False)
        pairs.append(("cubic-other", a, b, 1))
    for i in range(15):
        k, r = ((6, 0), (10, 1))[i % 2]
        while True:
            a = general_config(F31, k, r, rng, t=0)
            b = general_config(F31, k, r, rng, t=0)
            if not a.same_set(b):
                break
        pairs.append(("generic", a, b, r))
    return pairs


def criterion_9(run: Run) -> None:
    violations = 0
    counts: dict[str, list[int]] = {}
    expected_fail = []
    for i, (kind, a, b, r) in enumerate(_c9_pairs()):
        rep = torelli_compare(a, b, r, seed=i)
        violations += rep.violation
        if rep.isomorphic and not (a.same_set(b) or rep.common_curve is not None):
            violations += 1
        c = counts.setdefault(kind, [0, 0])
        c[0] += 1
        c[1] += rep.isomorphic
        if kind in ("equal", "conic", "cubic-equivalent") and not rep.isomorphic:
            expected_fail.append((i, kind))
        if kind == "generic" and rep.isomorphic:
            expected_fail.append((i, kind))
        run.art(9, {"kind": kind, "isomorphic": rep.isomorphic, "case": rep.case,
                    "hom_dim": rep.iso.hom_dim, "witness": mat_pair_to_json(rep.iso.witness),
                    "curve": str(rep.common_curve) if rep.common_curve is not None else None})
    summary = ", ".join(f"{k}: {v[1]}/{v[0]} iso" for k, v in counts.items())
    run.done(9, violations == 0 and not expected_fail,
             f"{violations} violations; {summary}; unexpected: {expected_fail}")


def run_criteria() -> Run:
    run = Run()
    criterion_1(run)
    criteria_2_3(run)
    criterion_4(run)
    criterion_5(run)
    criterion_6(run)
    criterion_7(run)
    criterion_8(run)
    criterion_9(run)
    return run


@lru_cache(maxsize=None)
def results() -> tuple[Run, Run]:
    first = run_criteria()
    second = run_criteria()
    return first, second


def _line(i: int, ok: bool, detail: str) -> str:
    return f"criterion {i:2d} {'PASS' if ok else 'FAIL'}  {TITLES[i]} [{detail}]"


def _record(i: int, ok: bool, detail: str) -> None:
    line = _line(i, ok, detail)
    if line not in ACCEPTANCE_LINES:
        ACCEPTANCE_LINES.append(line)
    print(line)


def criterion_10_check() -> tuple[bool, str]:
    a, b = results()
    diffs = [i for i in range(1, 10) if _digest(a.artifacts[i]) != _digest(b.artifacts[i])]
    total = sum(len(a.artifacts[i]) for i in range(1, 10))
    return not diffs, f"{total} artifacts, digest {_digest(sum(a.artifacts.values(), []))[:16]}, differing: {diffs}"


@pytest.mark.parametrize("i", range(1, 10))
def test_criterion(i):
    run, _ = results()
    _record(i, run.ok[i], run.detail[i])
    assert run.ok[i], run.detail[i]


def test_criterion_10_determinism():
    ok, detail = criterion_10_check()
    _record(10, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    start = time.perf_counter()
    run, _ = results()
    for i in range(1, 10):
        print(_line(i, run.ok[i], run.detail[i]))
    ok, detail = criterion_10_check()
    print(_line(10, ok, detail))
    print(f"elapsed {time.perf_counter() - start:.1f}s")
    sys.exit(0 if all(run.ok.values()) and ok else 1)
