"""JSON formats for point configurations, presentations, forms and W reports.

Scalars are always strings (``"num/den"`` over Q, residues over F_p). Output
is dumped with sorted keys so equal objects give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .exactalg import Field, Mat, parse_field
from .polygeom import MONOMIAL_ORDER, HomForm, PointConfig, ProjPoint
from .steiner import SteinerPresentation


class FormatError(ValueError):
    """Malformed input file or document."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def write_json(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        return text
    Path(path).write_text(text)
    return text


def read_json(path: str | Path) -> Any:
    p = str(path)
    if p.startswith("@"):
        p = p[1:]
    try:
        return json.loads(Path(p).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{p}: invalid JSON ({exc})") from exc


def _need(doc: dict, *keys: str):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing key(s) {missing}")


# points ----------------------------------------------------------------------


def point_to_json(p: ProjPoint, normalized: bool = True) -> list[str]:
    return p.to_strings(normalized=normalized)


def config_to_json(Z: PointConfig) -> dict:
    return {"field": Z.field.descriptor, "n": Z.n, "points": [p.to_strings() for p in Z]}


def config_from_json(doc: dict, field: Field | None = None) -> PointConfig:
    _need(doc, "points")
    F = field if field is not None else parse_field(doc.get("field", "Q"))
    try:
        pts = [ProjPoint(F, [F.from_str(str(s)) for s in c], normalize=False) for c in doc["points"]]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad point data: {exc}") from exc
    n = doc.get("n", pts[0].dim if pts else None)
    if n is None:
        raise FormatError("cannot infer the dimension of an empty configuration")
    return PointConfig(F, int(n), tuple(pts))


# forms -----------------------------------------------------------------------


def form_to_json(f: HomForm) -> dict:
    return {
        "nvars": f.nvars,
        "degree": f.degree,
        "coefficients": [f.field.to_str(c) for c in f.coeffs],
        "text": str(f),
        "monomial_order": MONOMIAL_ORDER,
    }


def form_from_json(doc: dict, field: Field) -> HomForm:
    _need(doc, "nvars", "degree", "coefficients")
    return HomForm(field, int(doc["nvars"]), int(doc["degree"]),
                   tuple(field.from_str(s) for s in doc["coefficients"]))


# presentations -----------------------------------------------------------------


def presentation_to_json(P: SteinerPresentation) -> dict:
    return {
        "field": P.field.descriptor,
        "nvars": P.nvars,
        "m": P.m,
        "total": P.tau,
        "matrices": [N.to_strings() for N in P.matrices],
        "provenance": P.provenance,
        "monomial_order": MONOMIAL_ORDER,
    }


def presentation_from_json(doc: dict) -> SteinerPresentation:
    _need(doc, "field", "nvars", "m", "total", "matrices")
    F = parse_field(doc["field"])
    m, tau = int(doc["m"]), int(doc["total"])
    try:
        mats = tuple(Mat.from_strings(F, rows, m) if rows else Mat.zeros(F, tau, m) for rows in doc["matrices"])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad matrix data: {exc}") from exc
    return SteinerPresentation(F, int(doc["nvars"]), m, tau, mats, dict(doc.get("provenance", {})))


# reports -----------------------------------------------------------------------


def wreport_to_json(rep) -> dict:
    return {
        "kind": rep.kind,
        "points": [point_to_json(p) for p in rep.points],
        "curve": form_to_json(rep.curve) if rep.curve is not None else None,
        "degree": rep.degree,
        "method": rep.method,
        "expected_codimension": rep.expected_codimension,
        "cross_checks": {k: rep.cross_checks[k] for k in sorted(rep.cross_checks)},
    }


def mat_pair_to_json(pair) -> dict | None:
    if pair is None:
        return None
    A, B = pair
    return {"A": A.to_strings(), "B": B.to_strings()}


__all__ = [
    "FormatError", "dumps", "write_json", "read_json",
    "point_to_json", "config_to_json", "config_from_json",
    "form_to_json", "form_from_json",
    "presentation_to_json", "presentation_from_json",
    "wreport_to_json", "mat_pair_to_json",
]
