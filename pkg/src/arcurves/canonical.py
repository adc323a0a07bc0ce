"""Canonical labeling of decorated curves.

Two curves get equal keys iff they are isomorphic as decorated curves:
component genera, singularity types and crimping flags, marking indices
(not permutable) and role decorations are all respected, while component
ids, singularity ids, local point ids and conjugate pair ids are not.

The key is computed by iterative color refinement on the incidence
multigraph followed by exhaustive backtracking over the residual symmetry
(component classes, parallel identical singularities, tied slots); the
serialization is lossless, so distinct keys certify non-isomorphism.
"""

from __future__ import annotations

import itertools

from .curve import (
    DecoratedCurve,
    InvalidCurveError,
    ROLE_FREE,
    ROLE_WEIERSTRASS,
    validate,
)
from .patterns import role_regime

__all__ = ["canonical_form", "isomorphic"]

_MAX_SERIALIZATIONS = 500_000


def _normalized_roles(curve, comp, slot_points):
    """Role mapping with the regime semantics baked in: wildcard components
    drop their roles, generic (arithmetic genus 2) components default
    missing slots to free, decorated components keep their mapping and plain
    components stay undecorated."""
    regime = role_regime(curve, comp)
    if regime in ("wildcard", "plain"):
        return None
    roles = dict(comp.hyperelliptic_roles) if comp.hyperelliptic_roles is not None else {}
    if regime == "generic":
        for pt in slot_points:
            roles.setdefault(pt, ROLE_FREE)
    return roles


def _role_tag(roles, pt):
    if roles is None:
        return "-"
    role = roles.get(pt)
    if role is None:
        return "?"
    if role == ROLE_WEIERSTRASS:
        return "w"
    if role == ROLE_FREE:
        return "f"
    return "c"


def _comp_slot_points(curve, distinguished):
    pts = {c.id: [] for c in curve.components}
    for s in curve.singularities:
        for b in s.branches:
            pts[b.component_id].append(b.local_point_id)
    for m in curve.markings:
        pts[m.point.component_id].append(m.point.local_point_id)
    for d in distinguished:
        pts[d.component_id].append(d.local_point_id)
    return pts


def _initial_colors(curve, distinguished):
    slot_points = _comp_slot_points(curve, distinguished)
    by_slot = {}
    for s in curve.singularities:
        loop = s.sing_type.is_odd and s.branches[0].component_id == s.branches[1].component_id
        for b in s.branches:
            by_slot[b.key()] = ("s", s.k, bool(s.equivariant_crimping) if s.k >= 2 else True, loop)
    for m in curve.markings:
        by_slot[m.point.key()] = ("m", m.index)
    for d in distinguished:
        by_slot[d.key()] = ("d",)
    colors = {}
    for c in curve.components:
        roles = _normalized_roles(curve, c, slot_points[c.id])
        profile = sorted(
            (by_slot[(c.id, pt)], _role_tag(roles, pt)) for pt in slot_points[c.id]
        )
        hyper_mark = role_regime(curve, c)
        colors[c.id] = (c.geometric_genus, hyper_mark, tuple(profile))
    return colors


def _refine_colors(curve, colors):
    while True:
        fresh = {}
        for c in curve.components:
            edges = []
            for s in curve.singularities:
                if not s.sing_type.is_odd:
                    continue
                a, b = s.branches[0].component_id, s.branches[1].component_id
                ek = (s.k, bool(s.equivariant_crimping) if s.k >= 2 else True)
                if a == c.id:
                    edges.append((ek, colors[b]))
                if b == c.id and a != b:
                    edges.append((ek, colors[a]))
            fresh[c.id] = (colors[c.id], tuple(sorted(edges)))
        # compress
        palette = sorted(set(fresh.values()))
        new = {cid: palette.index(v) for cid, v in fresh.items()}
        old_classes = _classes(colors)
        new_classes = _classes(new)
        if len(new_classes) == len(old_classes):
            return new
        colors = new


def _classes(colors):
    out = {}
    for cid, col in colors.items():
        out.setdefault(col, []).append(cid)
    return out


def canonical_form(curve: DecoratedCurve, distinguished=()):
    """Total-order key, invariant under relabeling of components,
    singularities, local points and conjugate pair names."""
    report = validate(curve, distinguished)
    if not report.ok:
        raise InvalidCurveError("; ".join(report.problems))
    colors = _refine_colors(curve, _initial_colors(curve, distinguished))
    classes = [sorted(ids) for _, ids in sorted(_classes(colors).items())]
    best = None
    budget = [_MAX_SERIALIZATIONS]
    for class_orders in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [cid for cls in class_orders for cid in cls]
        for text in _serializations(curve, order, distinguished, budget):
            if best is None or text < best:
                best = text
    return best


def isomorphic(a: DecoratedCurve, b: DecoratedCurve) -> bool:
    return canonical_form(a) == canonical_form(b)


def _serializations(curve, comp_order, distinguished, budget):
    comp_pos = {cid: i for i, cid in enumerate(comp_order)}
    sings = list(curve.singularities)

    def sing_key(s):
        flag = bool(s.equivariant_crimping) if s.k >= 2 else True
        return (s.k, flag, tuple(sorted(comp_pos[b.component_id] for b in s.branches)))

    groups = {}
    for s in sings:
        groups.setdefault(sing_key(s), []).append(s)
    group_keys = sorted(groups)

    for arrangement in itertools.product(
        *(itertools.permutations(groups[k]) for k in group_keys)
    ):
        ordered_sings = [s for grp in arrangement for s in grp]
        sing_pos = {s.id: i for i, s in enumerate(ordered_sings)}
        yield from _serialize_with_slots(
            curve, comp_order, comp_pos, ordered_sings, sing_pos, distinguished, budget
        )


def _serialize_with_slots(
    curve, comp_order, comp_pos, ordered_sings, sing_pos, distinguished, budget
):
    slot_points = _comp_slot_points(curve, distinguished)
    base_key = {}
    for s in curve.singularities:
        for b in s.branches:
            base_key[b.key()] = (2, sing_pos[s.id])
    for m in curve.markings:
        base_key[m.point.key()] = (1, m.index)
    for d in distinguished:
        base_key[d.key()] = (0, 0)

    # Per component: order slots by (base key, role tag); identical keys are
    # genuinely ambiguous (loop branches, several distinguished points,
    # conjugate pairs) and get backtracked over.
    per_comp_orders = []
    for cid in comp_order:
        comp = curve.component(cid)
        roles = _normalized_roles(curve, comp, slot_points[cid])
        keyed = sorted(
            slot_points[cid], key=lambda pt: (base_key[(cid, pt)], _role_tag(roles, pt))
        )
        tie_groups = []
        for _, grp in itertools.groupby(
            keyed, key=lambda pt: (base_key[(cid, pt)], _role_tag(roles, pt))
        ):
            tie_groups.append(list(grp))
        per_comp_orders.append(
            [
                [pt for grp in arrangement for pt in grp]
                for arrangement in itertools.product(
                    *(itertools.permutations(g) for g in tie_groups)
                )
            ]
        )

    for slot_choice in itertools.product(*per_comp_orders):
        budget[0] -= 1
        if budget[0] < 0:
            raise RuntimeError("canonical form search budget exceeded")
        slot_pos = {}
        for cid, pts in zip(comp_order, slot_choice):
            for i, pt in enumerate(pts):
                slot_pos[(cid, pt)] = i
        yield _render(
            curve, comp_order, comp_pos, ordered_sings, slot_choice, slot_pos, distinguished
        )


def _render(curve, comp_order, comp_pos, ordered_sings, slot_choice, slot_pos, distinguished):
    comp_entries = []
    for cid, pts in zip(comp_order, slot_choice):
        comp = curve.component(cid)
        roles = _normalized_roles(curve, comp, pts)
        if roles is None:
            role_entry = None if comp.geometric_genus <= 1 or comp.hyperelliptic_roles is None else ()
        else:
            pair_partner = {}
            by_pair = {}
            for pt in pts:
                role = roles.get(pt)
                if isinstance(role, tuple):
                    by_pair.setdefault(role[1], []).append(pt)
            for members in by_pair.values():
                if len(members) == 2:
                    pair_partner[members[0]] = members[1]
                    pair_partner[members[1]] = members[0]
            rendered = []
            for i, pt in enumerate(pts):
                role = roles.get(pt)
                if role is None:
                    rendered.append("?")
                elif role == ROLE_WEIERSTRASS:
                    rendered.append("w")
                elif role == ROLE_FREE:
                    rendered.append("f")
                elif pt in pair_partner:
                    rendered.append(("c", slot_pos[(cid, pair_partner[pt])]))
                else:
                    rendered.append(("c?",))  # unpaired conjugate decoration
            role_entry = tuple(rendered)
        comp_entries.append((comp.geometric_genus, role_entry))

    sing_entries = []
    for s in ordered_sings:
        flag = bool(s.equivariant_crimping) if s.k >= 2 else True
        branches = tuple(
            sorted((comp_pos[b.component_id], slot_pos[b.key()]) for b in s.branches)
        )
        sing_entries.append((s.k, flag, branches))

    mark_entries = tuple(
        sorted(
            (m.index, comp_pos[m.point.component_id], slot_pos[m.point.key()])
            for m in curve.markings
        )
    )
    dist_entries = tuple(
        sorted((comp_pos[d.component_id], slot_pos[d.key()]) for d in distinguished)
    )
    return repr((tuple(comp_entries), tuple(sing_entries), mark_entries, dist_entries))
