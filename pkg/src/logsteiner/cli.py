"""Command-line interface.

Exit codes: 0 success, 1 precondition violation, 2 property/verification
failure, 3 I/O, format or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import census as census_mod
from .exactalg import FieldSpecError, parse_field
from .formats import (
    FormatError,
    config_from_json,
    dumps,
    form_to_json,
    mat_pair_to_json,
    point_to_json,
    presentation_from_json,
    presentation_to_json,
    read_json,
    wreport_to_json,
)
from .instability import (
    classify_W_ideal,
    projected_cubic,
    scan_W_bundle,
    splitting_type,
    torelli_compare,
    unstable_test_bundle,
    unstable_test_ideal,
)
from .polygeom import DegenerateInputError, HomForm, ProjPoint, UndefinedInputError, random_point
from .steiner import (
    PreconditionError,
    StrategyError,
    build_curve_twist,
    build_logarithmic,
    build_schwarzenberger,
    is_isomorphic,
    restrict_to_hyperplane,
    validate_bundle,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class JobConfig:
    """Flags of one invocation; a ``--config`` JSON file fills unset ones."""

    command: str
    options: dict = dc_field(default_factory=dict)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _coords(text: str, field):
    try:
        return [field.from_str(s) for s in text.replace(";", ",").split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad coordinate list {text!r}") from exc


def _load_points(source: str, field_flag: str | None):
    doc = read_json(source)
    field = parse_field(field_flag) if field_flag else None
    return config_from_json(doc, field)


def _load_presentation(source: str):
    return presentation_from_json(read_json(source))


def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_build_log(a):
    _require(a, "points", "r")
    Z = _load_points(a.points, a.field)
    _emit(presentation_to_json(build_logarithmic(Z, a.r)), a.out)


def cmd_build_schw(a):
    _require(a, "n", "m")
    _emit(presentation_to_json(build_schwarzenberger(a.n, a.m, parse_field(a.field or "Q"))), a.out)


def cmd_build_curve(a):
    _require(a, "curve", "a")
    f = HomForm.parse(a.curve, parse_field(a.field or "Q"), nvars=3)
    _emit(presentation_to_json(build_curve_twist(f, a.a)), a.out)


def cmd_restrict(a):
    _require(a, "presentation", "hyperplane")
    P = _load_presentation(a.presentation)
    _emit(presentation_to_json(restrict_to_hyperplane(P, _coords(a.hyperplane, P.field))), a.out)


def cmd_validate(a):
    _require(a, "presentation")
    P = _load_presentation(a.presentation)
    strategy = a.strategy or ("exhaustive-fp" if P.field.is_prime else "minors")
    v = validate_bundle(P, strategy, seed=a.seed or 0)
    doc = {"valid": v.valid, "strategy": v.strategy, "conclusive": v.conclusive,
           "bad_point": point_to_json(v.bad_point) if v.bad_point else None,
           "checked": v.checked, "note": v.note}
    _emit(doc, a.out)
    if not v.valid:
        raise VerificationFailure("presentation is not a bundle")


def cmd_unstable(a):
    _require(a, "point")
    doc = {}
    if a.presentation:
        P = _load_presentation(a.presentation)
        res = unstable_test_bundle(P, _coords(a.point, P.field))
        doc["bundle"] = {"unstable": res.unstable, "kernel_dim": res.kernel_dim, "sheaf_mode": res.sheaf_mode}
    if a.points:
        _require(a, "r")
        Z = _load_points(a.points, a.field)
        doc["ideal"] = {"unstable": unstable_test_ideal(Z, a.r, _coords(a.point, Z.field))}
    if not doc:
        raise UsageError("unstable needs --presentation and/or --points")
    _emit(doc, a.out)
    if "bundle" in doc and "ideal" in doc and doc["bundle"]["unstable"] != doc["ideal"]["unstable"]:
        raise VerificationFailure("bundle-side and ideal-side oracles disagree")


def cmd_splitting(a):
    _require(a, "presentation")
    P = _load_presentation(a.presentation)
    if a.line:
        line = ProjPoint(P.field, _coords(a.line, P.field))
    elif a.line_points:
        first, second = a.line_points.split(";")
        line = (_coords(first, P.field), _coords(second, P.field))
    else:
        raise UsageError("splitting needs --line or --line-points")
    st = splitting_type(P, line)
    kd = unstable_test_bundle(P, line).kernel_dim if isinstance(line, ProjPoint) else None
    _emit({"splitting_type": list(st.degrees), "zeros": st.zeros, "unstable_kernel_dim": kd}, a.out)


def cmd_w_classify(a):
    _require(a, "points", "r")
    Z = _load_points(a.points, a.field)
    _emit(wreport_to_json(classify_W_ideal(Z, a.r)), a.out)


def cmd_w_scan(a):
    _require(a, "presentation")
    P = _load_presentation(a.presentation)
    if a.exhaustive:
        domain = "exhaustive"
    elif a.sample:
        import random

        rng = random.Random(a.seed or 0)
        domain = [random_point(P.field, P.n, rng) for _ in range(a.sample)]
    else:
        raise UsageError("w-scan needs --exhaustive or --sample N")
    found, rep = scan_W_bundle(P, domain)
    doc = wreport_to_json(rep)
    doc["found"] = [point_to_json(p) for p in found]
    _emit(doc, a.out)


def cmd_iso(a):
    _require(a, "pa", "pb")
    P1, P2 = _load_presentation(a.pa), _load_presentation(a.pb)
    res = is_isomorphic(P1, P2, trials=a.trials or 20, seed=a.seed or 0)
    _emit({"isomorphic": res.isomorphic, "hom_dim": res.hom_dim, "probabilistic": res.probabilistic,
           "failure_bound": repr(res.failure_bound), "method": res.method, "reason": res.reason,
           "witness": mat_pair_to_json(res.witness)}, a.out)


def cmd_torelli(a):
    _require(a, "za", "zb", "r")
    Z1, Z2 = _load_points(a.za, a.field), _load_points(a.zb, a.field)
    rep = torelli_compare(Z1, Z2, a.r, trials=a.trials or 20, seed=a.seed or 0)
    doc = {
        "isomorphic": rep.isomorphic,
        "case": rep.case,
        "same_set": rep.same_set,
        "common_curve": form_to_json(rep.common_curve) if rep.common_curve is not None else None,
        "violation": rep.violation,
        "distinguishing": rep.distinguishing,
        "note": rep.note,
        "probabilistic": rep.iso.probabilistic,
        "hom_dim": rep.iso.hom_dim,
        "w_reports": [wreport_to_json(w) for w in rep.w_reports],
    }
    _emit(doc, a.out)
    if rep.violation:
        raise VerificationFailure("Torelli dichotomy violated")


def cmd_projected_cubic(a):
    _require(a, "hyperplane")
    field = parse_field(a.field or "Q")
    _emit(form_to_json(projected_cubic(ProjPoint(field, _coords(a.hyperplane, field)))), a.out)


def cmd_census(a):
    cfg = census_mod.CensusConfig(
        field=a.field or "p=31", k=a.k if a.k is not None else 10, r=a.r if a.r is not None else 1,
        count=a.count if a.count is not None else 100, seed=a.seed if a.seed is not None else 42,
        workers=a.workers or 1, timing=not a.no_timing,
    )
    try:
        records = census_mod.run_census(cfg)
    except census_mod.CensusFailure as exc:
        raise VerificationFailure(str(exc), exc.reproducer) from exc
    text = census_mod.census_csv(records)
    if a.out and a.out != "-":
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "build-log": cmd_build_log,
    "build-schw": cmd_build_schw,
    "build-curve": cmd_build_curve,
    "restrict": cmd_restrict,
    "validate": cmd_validate,
    "unstable": cmd_unstable,
    "splitting": cmd_splitting,
    "w-classify": cmd_w_classify,
    "w-scan": cmd_w_scan,
    "iso": cmd_iso,
    "torelli": cmd_torelli,
    "projected-cubic": cmd_projected_cubic,
    "census": cmd_census,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logsteiner", description="Steiner bundles, unstable lines and Torelli checks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file supplying flag values")
        p.add_argument("--field")
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        if name in ("build-log", "unstable", "w-classify", "torelli", "census"):
            p.add_argument("--r", type=int)
        if name in ("build-log", "unstable", "w-classify"):
            p.add_argument("--points")
        if name in ("restrict", "validate", "unstable", "splitting", "w-scan"):
            p.add_argument("--presentation")
        if name in ("iso", "torelli"):
            p.add_argument("--trials", type=int)
    g = sub.choices
    g["build-schw"].add_argument("--n", type=int)
    g["build-schw"].add_argument("--m", type=int)
    g["build-curve"].add_argument("--curve")
    g["build-curve"].add_argument("--a", type=int)
    g["restrict"].add_argument("--hyperplane")
    g["projected-cubic"].add_argument("--hyperplane")
    g["validate"].add_argument("--strategy", choices=["exhaustive-fp", "sampled", "minors"])
    g["unstable"].add_argument("--point")
    g["splitting"].add_argument("--line")
    g["splitting"].add_argument("--line-points")
    g["w-scan"].add_argument("--exhaustive", action="store_true")
    g["w-scan"].add_argument("--sample", type=int)
    g["iso"].add_argument("--pa")
    g["iso"].add_argument("--pb")
    g["torelli"].add_argument("--za")
    g["torelli"].add_argument("--zb")
    g["census"].add_argument("--k", type=int)
    g["census"].add_argument("--count", type=int)
    g["census"].add_argument("--workers", type=int)
    g["census"].add_argument("--no-timing", action="store_true")
    return parser


def _apply_config(args) -> JobConfig:
    job = JobConfig(args.command, {k: v for k, v in vars(args).items() if k not in ("command", "config")})
    if getattr(args, "config", None):
        doc = read_json(args.config)
        if not isinstance(doc, dict):
            raise FormatError("config file must hold a JSON object")
        for key, value in doc.items():
            attr = key.replace("-", "_")
            if attr not in job.options:
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            if job.options[attr] in (None, False):
                job.options[attr] = value
                setattr(args, attr, value)
    return job


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage() + "logsteiner: error: a subcommand is required")
        _apply_config(args)
        COMMANDS[args.command](args)
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_IO
    except VerificationFailure as exc:
        sys.stderr.write(f"verification failure: {exc}\n")
        if exc.payload is not None:
            sys.stderr.write("reproducer: " + json.dumps(exc.payload, sort_keys=True) + "\n")
        return EXIT_VERIFY
    except (PreconditionError, DegenerateInputError, UndefinedInputError, StrategyError,
            census_mod.CensusInfeasible) as exc:
        sys.stderr.write(f"precondition violated: {exc}\n")
        return EXIT_PRECONDITION
    except (OSError, FormatError, FieldSpecError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_IO


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
