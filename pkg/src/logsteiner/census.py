"""Seeded census: sample point sets, build bundles, compare both oracles exhaustively."""

from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

from .exactalg import Field, parse_field
from .instability import classify_W_ideal, same_locus, scan_W_bundle, secant_pencil_check, unstable_test_ideal
from .polygeom import PointConfig, h0_ideal, is_general_position, projective_points
from .steiner import build_logarithmic

CSV_HEADER = ["id", "k", "r", "t", "w_kind", "agreement", "secant_ok", "ms"]


class CensusInfeasible(RuntimeError):
    """General-position rejection sampling failed."""


class CensusFailure(RuntimeError):
    """An oracle or coherence check failed; carries a reproducer."""

    def __init__(self, message: str, reproducer: dict):
        super().__init__(message)
        self.reproducer = reproducer


@dataclass(frozen=True)
class CensusConfig:
    field: str = "p=31"
    k: int = 10
    r: int = 1
    count: int = 100
    seed: int = 42
    workers: int = 1
    timing: bool = True
    max_retries: int = 10_000


@dataclass(frozen=True)
class CensusRecord:
    id: int
    k: int
    r: int
    t: int
    w_kind: str
    agreement: bool
    secant_ok: bool
    ms: int
    coherent: bool = True


def sample_general(field: Field, k: int, r: int, rng: random.Random, max_retries: int = 10_000,
                   domain: Sequence | None = None) -> tuple[PointConfig, int]:
    """Uniform ``k``-subsets of ``P^2(F_p)``, retried until ``(r+1)``-general."""
    pts = list(domain) if domain is not None else list(projective_points(field, 2))
    if k > len(pts):
        raise CensusInfeasible(f"k={k} exceeds the {len(pts)} points of the plane")
    for attempt in range(1, max_retries + 1):
        Z = PointConfig(field, 2, tuple(rng.sample(pts, k)))
        if is_general_position(Z, r).ok:
            return Z, attempt
    raise CensusInfeasible(f"no ({r + 1})-general {k}-set in {max_retries} attempts "
                           f"(rejection rate > 99%)")


def _minimize(Z: PointConfig, r: int, witness) -> PointConfig:
    """Greedily drop points while the oracle disagreement at ``witness`` persists."""
    def disagrees(Y):
        if not is_general_position(Y, r).ok:
            return False
        P = build_logarithmic(Y, r, check=False)
        from .instability import unstable_test_bundle

        return unstable_test_bundle(P, witness).unstable != unstable_test_ideal(Y, r, witness, check=False)

    changed = True
    while changed:
        changed = False
        for p in list(Z.points):
            Y = Z.remove(p)
            if len(Y) >= 2 and disagrees(Y):
                Z, changed = Y, True
                break
    return Z


def check_configuration(Z: PointConfig, r: int) -> dict:
    """Both oracles over all of ``P^2(F_p)``, plus secant and classification checks."""
    P = build_logarithmic(Z, r, check=False)
    found, scan = scan_W_bundle(P)
    ideal = sorted(q for q in projective_points(Z.field, 2) if unstable_test_ideal(Z, r, q, check=False))
    wi = classify_W_ideal(Z, r, check=False)
    mismatch = sorted(set(found) ^ set(ideal))
    return {
        "presentation": P,
        "found": found,
        "scan": scan,
        "ideal": wi,
        "agreement": not mismatch,
        "mismatch": mismatch,
        "coherent": same_locus(scan, wi),
        "secant_ok": not secant_pencil_check(P, found, r),
        "t": h0_ideal(Z, r + 2),
    }


def _run_one(args) -> tuple[CensusRecord, dict | None]:
    cfg, idx = args
    field = parse_field(cfg.field)
    rng = random.Random(f"{cfg.seed}:{idx}")
    start = time.perf_counter()
    Z, _ = sample_general(field, cfg.k, cfg.r, rng, cfg.max_retries)
    res = check_configuration(Z, cfg.r)
    ms = int(round((time.perf_counter() - start) * 1000)) if cfg.timing else 0
    rec = CensusRecord(idx, cfg.k, cfg.r, res["t"], res["scan"].kind, res["agreement"], res["secant_ok"], ms,
                       res["coherent"])
    repro = None
    if not (res["agreement"] and res["secant_ok"] and res["coherent"]):
        small = _minimize(Z, cfg.r, res["mismatch"][0]) if res["mismatch"] else Z
        repro = {
            "field": field.descriptor,
            "n": 2,
            "r": cfg.r,
            "points": [p.to_strings() for p in small],
            "witness": res["mismatch"][0].to_strings() if res["mismatch"] else None,
            "census_id": idx,
        }
    return rec, repro


def run_census(cfg: CensusConfig) -> list[CensusRecord]:
    """Run ``cfg.count`` configurations; raises :class:`CensusFailure` on any disagreement."""
    field = parse_field(cfg.field)
    if not field.is_prime:
        raise ValueError("the census runs over a prime field")
    jobs = [(cfg, i) for i in range(cfg.count)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    results.sort(key=lambda t: t[0].id)
    for rec, repro in results:
        if repro is not None:
            raise CensusFailure(f"configuration {rec.id} failed a check", repro)
    return [rec for rec, _ in results]


def census_csv(records: Sequence[CensusRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow([rec.id, rec.k, rec.r, rec.t, rec.w_kind, str(rec.agreement).lower(),
                    str(rec.secant_ok).lower(), rec.ms])
    if records:
        kinds: dict = {}
        for rec in records:
            kinds[rec.w_kind] = kinds.get(rec.w_kind, 0) + 1
        w.writerow(["summary", records[0].k, records[0].r, "",
                    ";".join(f"{k}:{v}" for k, v in sorted(kinds.items())),
                    str(all(r.agreement for r in records)).lower(),
                    str(all(r.secant_ok for r in records)).lower(),
                    sum(r.ms for r in records)])
    return buf.getvalue()


def record_dict(rec: CensusRecord) -> dict:
    return asdict(rec)
