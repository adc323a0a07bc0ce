"""JSON (de)serialization of curve documents.

Document layout (field names are contractual, unknown fields rejected):

    {
      "components":   [{"id": ..., "genus": ..., "roles": {point: role}}],
      "singularities": [{"id": ..., "k": ..., "branches": [{"component", "point"}],
                         "equivariant": bool}],
      "markings":     [{"index": ..., "component": ..., "point": ...}]
    }

A role is "weierstrass", "free" or {"conjugate": pair_id}.  "roles" and
"equivariant" may be omitted (undecorated component, equivariant crimping).
"""

from __future__ import annotations

import json

from .curve import (
    BranchPoint,
    Component,
    DecoratedCurve,
    Marking,
    ROLE_FREE,
    ROLE_WEIERSTRASS,
    SingularityType,
    Singularity,
    conjugate_role,
)

__all__ = ["CurveDocumentError", "curve_from_json", "curve_to_json", "load_curve", "dump_curve"]


class CurveDocumentError(ValueError):
    """Malformed curve document."""


def _check_fields(obj, required, optional, where):
    if not isinstance(obj, dict):
        raise CurveDocumentError(f"{where}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise CurveDocumentError(f"{where}: unknown fields {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise CurveDocumentError(f"{where}: missing fields {sorted(missing)}")


def _parse_role(value, where):
    if value == ROLE_WEIERSTRASS or value == ROLE_FREE:
        return value
    if isinstance(value, dict) and set(value) == {"conjugate"}:
        return conjugate_role(str(value["conjugate"]))
    raise CurveDocumentError(f"{where}: bad role {value!r}")


def curve_from_json(doc) -> DecoratedCurve:
    _check_fields(doc, ["components", "singularities", "markings"], [], "document")

    components = []
    for c in doc["components"]:
        _check_fields(c, ["id", "genus"], ["roles"], "component")
        roles = None
        if c.get("roles") is not None:
            roles = {
                str(pt): _parse_role(role, f"component {c['id']}")
                for pt, role in c["roles"].items()
            }
        genus = c["genus"]
        if not isinstance(genus, int) or genus < 0:
            raise CurveDocumentError(f"component {c['id']}: genus must be a nonnegative integer")
        components.append(Component(str(c["id"]), genus, roles))

    singularities = []
    for s in doc["singularities"]:
        _check_fields(s, ["id", "k", "branches"], ["equivariant"], "singularity")
        if not isinstance(s["k"], int) or s["k"] < 1:
            raise CurveDocumentError(f"singularity {s['id']}: k must be a positive integer")
        branches = []
        for b in s["branches"]:
            _check_fields(b, ["component", "point"], [], "branch")
            branches.append(BranchPoint(str(b["component"]), str(b["point"])))
        singularities.append(
            Singularity(
                str(s["id"]),
                SingularityType(s["k"]),
                tuple(branches),
                bool(s.get("equivariant", True)),
            )
        )

    markings = []
    for m in doc["markings"]:
        _check_fields(m, ["index", "component", "point"], [], "marking")
        if not isinstance(m["index"], int):
            raise CurveDocumentError("marking: index must be an integer")
        markings.append(Marking(m["index"], BranchPoint(str(m["component"]), str(m["point"]))))

    return DecoratedCurve(tuple(components), tuple(singularities), tuple(markings))


def _role_to_json(role):
    if isinstance(role, tuple):
        return {"conjugate": role[1]}
    return role


def curve_to_json(curve: DecoratedCurve) -> dict:
    comps = []
    for c in curve.components:
        entry = {"id": c.id, "genus": c.geometric_genus}
        if c.hyperelliptic_roles is not None:
            entry["roles"] = {pt: _role_to_json(r) for pt, r in sorted(c.hyperelliptic_roles.items())}
        comps.append(entry)
    sings = [
        {
            "id": s.id,
            "k": s.k,
            "branches": [{"component": b.component_id, "point": b.local_point_id} for b in s.branches],
            "equivariant": bool(s.equivariant_crimping),
        }
        for s in curve.singularities
    ]
    marks = [
        {"index": m.index, "component": m.point.component_id, "point": m.point.local_point_id}
        for m in curve.markings
    ]
    return {"components": comps, "singularities": sings, "markings": marks}


def load_curve(path) -> DecoratedCurve:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurveDocumentError(f"{path}: {exc}") from exc
    return curve_from_json(doc)


def dump_curve(curve: DecoratedCurve, path) -> None:
    with open(path, "w") as fh:
        json.dump(curve_to_json(curve), fh, indent=2)
        fh.write("\n")
