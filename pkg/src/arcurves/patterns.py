"""Recognizers for the named configurations on a decorated curve.

Covers subcurves, singularity classification (inner / outer / lonely /
separating), atoms, rosaries and closed rosaries, hyperelliptic tails,
bridges and dangling bridges, and hyperelliptic chains.

Role conventions.  Rational and genus-1 components admit every involution a
pattern may ask for, so their roles are granted on demand.  A genus-2
component is always hyperelliptic (its involution is unique); undecorated
slots are read as generic, i.e. free.  A component of genus >= 3 is
hyperelliptic only when decorated; a decorated component must carry a role
for every slot a pattern inspects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curve import (
    BranchPoint,
    DecoratedCurve,
    ROLE_FREE,
    ROLE_WEIERSTRASS,
    UnknownSingularityError,
    require_valid,
)

__all__ = [
    "RoleDataMissingError",
    "Subcurve",
    "PatternHit",
    "classify_singularity",
    "find_atoms",
    "find_rosaries",
    "find_hyperelliptic_tails_and_bridges",
    "find_hyperelliptic_chains",
    "component_is_hyperelliptic",
    "component_arithmetic_genus",
    "role_regime",
    "can_be_weierstrass",
    "can_be_free",
    "can_be_conjugate_pair",
    "is_atomic_singularity",
    "is_even_atom_shape",
    "component_subcurve",
    "extract_subcurve",
    "internal_singularities",
    "boundary_singularities",
    "subcurve_genus",
]


class RoleDataMissingError(ValueError):
    """A pattern inspected a slot of a decorated component without a role."""


@dataclass(frozen=True)
class Subcurve:
    """A connected union of components with its boundary data.

    ``boundary`` lists the singularity ids joining the subcurve to its
    complement; ``marking_indices`` the markings it carries.
    """

    component_ids: frozenset
    boundary: tuple
    marking_indices: tuple


@dataclass(frozen=True)
class PatternHit:
    kind: str
    subcurve: Subcurve
    # ((, "singularity"|"marking", ref), attach_k); attach_k = 0 for markings.
    attachments: tuple = ()
    length: int = 0
    singularities: tuple = ()
    genus: int = 0
    honest: bool = False


# -- subcurve helpers ---------------------------------------------------------


def internal_singularities(curve, comp_ids):
    inside = set(comp_ids)
    return [
        s
        for s in curve.singularities
        if all(b.component_id in inside for b in s.branches)
    ]


def boundary_singularities(curve, comp_ids):
    """Odd singularities with exactly one branch inside; returns
    (singularity, inside branch)."""
    inside = set(comp_ids)
    out = []
    for s in curve.singularities:
        flags = [b.component_id in inside for b in s.branches]
        if any(flags) and not all(flags):
            out.append((s, s.branches[flags.index(True)]))
    return out


def component_subcurve(curve, comp_ids) -> Subcurve:
    inside = set(comp_ids)
    boundary = tuple(sorted(s.id for s, _ in boundary_singularities(curve, inside)))
    marks = tuple(
        sorted(m.index for m in curve.markings if m.point.component_id in inside)
    )
    return Subcurve(frozenset(inside), boundary, marks)


def subcurve_genus(curve, comp_ids) -> int:
    """Arithmetic genus of the induced (assumed connected) configuration."""
    inside = set(comp_ids)
    internal = internal_singularities(curve, inside)
    total = sum(c.geometric_genus for c in curve.components if c.id in inside)
    total += sum(s.sing_type.severity for s in internal)
    odd = sum(1 for s in internal if s.sing_type.is_odd)
    return total + odd - len(inside) + 1


def extract_subcurve(curve, comp_ids):
    """Standalone curve for a subcurve: boundary branch points become
    distinguished points.  Returns (curve, distinguished)."""
    inside = set(comp_ids)
    comps = tuple(c for c in curve.components if c.id in inside)
    sings = tuple(internal_singularities(curve, inside))
    marks = tuple(m for m in curve.markings if m.point.component_id in inside)
    dist = tuple(b for _, b in boundary_singularities(curve, inside))
    return DecoratedCurve(comps, sings, marks), dist


# -- roles --------------------------------------------------------------------
#
# Role regimes per component:
#   wildcard  - rational components and smooth genus-1 components: every
#               involution a pattern may ask for exists; Weierstrass slots on
#               rational components are limited by the branch-divisor budget
#               (degree 2g+2 leaves 2 - #even singularities simple branch
#               points).
#   generic   - components of arithmetic genus 2 (positive geometric genus):
#               hyperelliptic with a unique involution; undecorated slots are
#               generic, i.e. free; explicit decorations honored.
#   decorated - positive geometric genus, arithmetic genus >= 3, roles
#               present; a pattern inspecting an unlisted slot errors.
#   plain     - positive geometric genus, arithmetic genus >= 3, undecorated:
#               not hyperelliptic.


def component_arithmetic_genus(curve, comp_id) -> int:
    return subcurve_genus(curve, [comp_id])


def _internal_even_count(curve, comp_id) -> int:
    return sum(
        1
        for s in internal_singularities(curve, [comp_id])
        if not s.sing_type.is_odd
    )


def role_regime(curve, comp) -> str:
    arith = component_arithmetic_genus(curve, comp.id)
    if comp.geometric_genus == 0 or arith <= 1:
        return "wildcard"
    if arith == 2:
        return "generic"
    return "decorated" if comp.hyperelliptic_roles is not None else "plain"


def component_is_hyperelliptic(curve, comp) -> bool:
    """Whether the one-component subcurve is a hyperelliptic curve.  A
    rational component is a double cover of the line iff its even
    singularities fit into the branch divisor (at most two)."""
    if comp.geometric_genus == 0:
        return _internal_even_count(curve, comp.id) <= 2
    return role_regime(curve, comp) in ("wildcard", "generic", "decorated")


def _explicit_role(curve, comp, point_id):
    """Explicit role of a slot, or None when the regime grants wildcards."""
    regime = role_regime(curve, comp)
    if regime == "wildcard":
        return None
    roles = comp.hyperelliptic_roles
    if regime == "generic":
        if roles is None or point_id not in roles:
            return ROLE_FREE
        return roles[point_id]
    if regime == "plain":
        raise RoleDataMissingError(
            f"component {comp.id} (arithmetic genus >= 3) is not hyperelliptic"
        )
    if point_id not in roles:
        raise RoleDataMissingError(f"component {comp.id}: no role for point {point_id}")
    return roles[point_id]


def can_be_weierstrass(curve, comp, point_id) -> bool:
    if not component_is_hyperelliptic(curve, comp):
        return False
    role = _explicit_role(curve, comp, point_id)
    if role is not None:
        return role == ROLE_WEIERSTRASS
    if comp.geometric_genus == 0:
        return _internal_even_count(curve, comp.id) <= 1
    return True


def can_be_free(curve, comp, point_id) -> bool:
    if not component_is_hyperelliptic(curve, comp):
        return False
    role = _explicit_role(curve, comp, point_id)
    return role is None or role == ROLE_FREE


def can_be_conjugate_pair(curve, comp, point_a, point_b) -> bool:
    if not component_is_hyperelliptic(curve, comp) or point_a == point_b:
        return False
    ra = _explicit_role(curve, comp, point_a)
    rb = _explicit_role(curve, comp, point_b)
    if ra is None and rb is None:
        return True
    return isinstance(ra, tuple) and isinstance(rb, tuple) and ra[1] == rb[1]


# -- singularity classification ------------------------------------------------


def classify_singularity(curve, sing_id) -> str:
    """Most specific of separating > lonely > outer > inner."""
    require_valid(curve)
    sing = curve.singularity(sing_id)
    if not sing.sing_type.is_odd:
        return "inner"
    a, b = sing.branches[0].component_id, sing.branches[1].component_id
    if a == b:
        return "inner"
    # separating: removing this edge disconnects the incidence multigraph
    adj = curve.adjacency()
    seen = {a}
    stack = [a]
    while stack:
        v = stack.pop()
        for sid, w in adj[v]:
            if sid == sing_id or w in seen:
                continue
            seen.add(w)
            stack.append(w)
    if b not in seen:
        return "separating"
    others = [
        s
        for s in curve.singularities
        if s.id != sing_id
        and s.sing_type.is_odd
        and {s.branches[0].component_id, s.branches[1].component_id} == {a, b}
    ]
    return "lonely" if not others else "outer"


# -- atoms ---------------------------------------------------------------------


def _external_slots(curve, comp_ids):
    """Slots on the subcurve that are not branches of internal singularities:
    markings and boundary branches, as (ref, attach_k, comp_id, point_id)."""
    inside = set(comp_ids)
    internal_ids = {s.id for s in internal_singularities(curve, inside)}
    out = []
    for s, b in boundary_singularities(curve, inside):
        out.append((("singularity", s.id), s.k, b.component_id, b.local_point_id))
    for m in curve.markings:
        if m.point.component_id in inside:
            out.append(
                (("marking", m.index), 0, m.point.component_id, m.point.local_point_id)
            )
    return sorted(out, key=lambda e: (e[2], e[3]))


def is_even_atom_shape(curve, comp_id, *, require_flag=True) -> bool:
    """One rational component whose only internal singularity is a single
    even A_{2h}, h >= 1, with at most one further special point."""
    comp = curve.component(comp_id)
    if comp.geometric_genus != 0:
        return False
    internal = internal_singularities(curve, [comp_id])
    if len(internal) != 1 or internal[0].sing_type.is_odd:
        return False
    sing = internal[0]
    if sing.sing_type.severity < 1:
        return False
    if require_flag and not sing.equivariant_crimping:
        return False
    return len(_external_slots(curve, [comp_id])) <= 1


def _odd_atom_pair(curve, sing):
    """The two components of an odd-atom-shaped pattern around ``sing``,
    or None."""
    if not sing.sing_type.is_odd or sing.sing_type.severity < 1:
        return None
    a, b = sing.branches[0].component_id, sing.branches[1].component_id
    if a == b:
        return None
    comps = [curve.component(a), curve.component(b)]
    if any(c.geometric_genus != 0 for c in comps):
        return None
    internal = internal_singularities(curve, [a, b])
    if [s.id for s in internal] != [sing.id]:
        return None
    for cid in (a, b):
        if len(_external_slots(curve, [cid])) > 1:
            return None
    return (a, b)


def find_atoms(curve, r) -> list:
    """All even and odd atoms: torus-carrying one- or two-component
    configurations around a single equivariantly crimped singularity."""
    require_valid(curve)
    hits = []
    for comp in curve.components:
        if is_even_atom_shape(curve, comp.id):
            sing = internal_singularities(curve, [comp.id])[0]
            hits.append(
                PatternHit(
                    kind="even_atom",
                    subcurve=component_subcurve(curve, [comp.id]),
                    attachments=tuple(
                        (ref, k) for ref, k, _, _ in _external_slots(curve, [comp.id])
                    ),
                    length=1,
                    singularities=(sing.id,),
                    genus=sing.sing_type.severity,
                )
            )
    for sing in curve.singularities:
        if not sing.equivariant_crimping and sing.k >= 2:
            continue
        pair = _odd_atom_pair(curve, sing)
        if pair is None:
            continue
        hits.append(
            PatternHit(
                kind="odd_atom",
                subcurve=component_subcurve(curve, pair),
                attachments=tuple(
                    (ref, k) for ref, k, _, _ in _external_slots(curve, pair)
                ),
                length=2,
                singularities=(sing.id,),
                genus=sing.sing_type.severity,
            )
        )
    return hits


def is_atomic_singularity(curve, sing_id) -> bool:
    """Whether the singularity lies on an A_i- or A_i/A_j-attached atom with
    i, j in {0, 1} (attachments only at markings or nodes)."""
    sing = curve.singularity(sing_id)
    if sing.k < 2:
        raise ValueError("atomicity applies to A_k with k >= 2")
    if not sing.equivariant_crimping:
        return False
    if sing.sing_type.is_odd:
        pair = _odd_atom_pair(curve, sing)
        if pair is None:
            return False
        slots = _external_slots(curve, pair)
    else:
        comp_id = sing.branches[0].component_id
        if not is_even_atom_shape(curve, comp_id):
            return False
        if internal_singularities(curve, [comp_id])[0].id != sing.id:
            return False
        slots = _external_slots(curve, [comp_id])
    return all(k in (0, 1) for _, k, _, _ in slots)


# -- rosaries -------------------------------------------------------------------


def _rosary_candidates(curve, distinguished=()):
    """Rational components with at most two special points."""
    out = set()
    for c in curve.components:
        if c.geometric_genus != 0:
            continue
        if len(curve.slots_of(c.id, distinguished)) <= 2:
            out.add(c.id)
    return out


def find_rosaries(curve, r) -> list:
    """Maximal attached rosaries: paths or cycles of two-special-point
    rational components consecutively joined by odd A_{>=3} singularities.
    Isolated rational components carrying an even singularity are reported
    as rosaries of length 1."""
    require_valid(curve)
    candidates = _rosary_candidates(curve)
    links = [
        s
        for s in curve.singularities
        if s.sing_type.is_odd
        and s.k >= 3
        and all(b.component_id in candidates for b in s.branches)
    ]
    adj = {}
    for s in links:
        a, b = s.branches[0].component_id, s.branches[1].component_id
        adj.setdefault(a, []).append((s.id, b))
        if a != b:
            adj.setdefault(b, []).append((s.id, a))

    hits = []
    seen = set()
    link_by_id = {s.id: s for s in links}

    for start in sorted(candidates):
        if start in seen or start not in adj:
            continue
        piece = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for _, w in adj.get(v, ()):
                if w not in piece:
                    piece.add(w)
                    stack.append(w)
        seen |= piece
        edge_count = len({sid for v in piece for sid, _ in adj.get(v, ())})
        if edge_count == len(piece):
            hits.append(_closed_rosary_hit(curve, piece, adj))
        else:
            hits.append(_open_rosary_hit(curve, piece, adj, link_by_id))

    for cid in sorted(candidates - seen):
        internal = internal_singularities(curve, [cid])
        if any(s.sing_type.is_odd for s in internal):
            continue  # loop singularity: not a length-1 rosary
        if not any(s.sing_type.severity >= 1 for s in internal):
            continue
        hits.append(
            PatternHit(
                kind="rosary",
                subcurve=component_subcurve(curve, [cid]),
                attachments=_rosary_attachments(curve, [cid], ()),
                length=1,
                singularities=(),
            )
        )
    return hits


def _rosary_attachments(curve, comp_ids, link_ids):
    inside = set(comp_ids)
    linkset = set(link_ids)
    att = []
    for ref, k, _, _ in _external_slots(curve, inside):
        att.append((ref, k))
    # even singularities internal to the rosary components are attachment
    # points of the pattern, not interior links
    for s in internal_singularities(curve, inside):
        if s.id in linkset:
            continue
        att.append((("singularity", s.id), s.k))
    return tuple(sorted(att, key=repr))


def _closed_rosary_hit(curve, piece, adj):
    link_ids = sorted({sid for v in piece for sid, _ in adj.get(v, ())})
    return PatternHit(
        kind="closed_rosary",
        subcurve=component_subcurve(curve, piece),
        attachments=(),
        length=len(piece),
        singularities=tuple(link_ids),
    )


def _open_rosary_hit(curve, piece, adj, link_by_id):
    degree = {v: len(adj.get(v, ())) for v in piece}
    ends = sorted(v for v in piece if degree[v] <= 1)
    start = ends[0]
    order, link_seq = [start], []
    used = set()
    cur = start
    while True:
        nxt = None
        for sid, w in adj.get(cur, ()):
            if sid not in used:
                used.add(sid)
                link_seq.append(sid)
                nxt = w
                break
        if nxt is None:
            break
        order.append(nxt)
        cur = nxt
    return PatternHit(
        kind="rosary",
        subcurve=component_subcurve(curve, piece),
        attachments=_rosary_attachments(curve, piece, link_seq),
        length=len(order),
        singularities=tuple(link_seq),
    )


# -- hyperelliptic tails, bridges, dangling bridges ------------------------------


def find_hyperelliptic_tails_and_bridges(curve, r) -> list:
    """Single-component hyperelliptic tails (attached at a Weierstrass
    point), bridges (attached at a conjugate pair) and dangling bridges
    (attached at a free point); honesty is recorded for these
    single-component subcurves.  A component admitting several role readings
    yields one hit per reading."""
    require_valid(curve)
    hits = []
    whole = len(curve.components)
    for comp in curve.components:
        if not component_is_hyperelliptic(curve, comp):
            continue
        genus = subcurve_genus(curve, [comp.id])
        if genus < 1:
            continue
        slots = _external_slots(curve, [comp.id])
        sub = component_subcurve(curve, [comp.id])
        if len(slots) == 1:
            (ref, k, cid, pt) = slots[0]
            if ref[0] == "marking" and whole > 1:
                continue  # a marked component inside a larger curve is not a tail
            if can_be_weierstrass(curve, comp, pt):
                hits.append(
                    PatternHit(
                        kind="hyperelliptic_tail",
                        subcurve=sub,
                        attachments=((ref, k),),
                        genus=genus,
                        honest=True,
                    )
                )
            if can_be_free(curve, comp, pt):
                hits.append(
                    PatternHit(
                        kind="dangling_bridge",
                        subcurve=sub,
                        attachments=((ref, k),),
                        genus=genus,
                        honest=True,
                    )
                )
        elif len(slots) == 2:
            (ref_a, ka, _, pa), (ref_b, kb, _, pb) = slots
            if can_be_conjugate_pair(curve, comp, pa, pb):
                hits.append(
                    PatternHit(
                        kind="hyperelliptic_bridge",
                        subcurve=sub,
                        attachments=((ref_a, ka), (ref_b, kb)),
                        genus=genus,
                        honest=True,
                    )
                )
    return hits


# -- hyperelliptic chains ---------------------------------------------------------


def _chain_candidates(curve):
    out = {}
    for c in curve.components:
        if not component_is_hyperelliptic(curve, c):
            continue
        slots = _external_slots(curve, [c.id])
        if len(slots) > 2:
            continue
        if len(slots) == 2:
            (_, _, _, pa), (_, _, _, pb) = slots
            if not can_be_conjugate_pair(curve, c, pa, pb):
                continue
        out[c.id] = slots
    return out


def find_hyperelliptic_chains(curve, r) -> list:
    """Maximal chains (length >= 2) of hyperelliptic components linked at
    conjugate points by odd A_{>=3} singularities."""
    require_valid(curve)
    candidates = _chain_candidates(curve)
    links = [
        s
        for s in curve.singularities
        if s.sing_type.is_odd
        and s.k >= 3
        and all(b.component_id in candidates for b in s.branches)
        and s.branches[0].component_id != s.branches[1].component_id
    ]
    adj = {}
    for s in links:
        a, b = s.branches[0].component_id, s.branches[1].component_id
        adj.setdefault(a, []).append((s.id, b))
        adj.setdefault(b, []).append((s.id, a))
    link_by_id = {s.id: s for s in links}
    hits = []
    seen = set()
    for start in sorted(candidates):
        if start in seen or start not in adj:
            continue
        piece = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for _, w in adj.get(v, ()):
                if w not in piece:
                    piece.add(w)
                    stack.append(w)
        seen |= piece
        if len(piece) < 2:
            continue
        edge_ids = {sid for v in piece for sid, _ in adj.get(v, ())}
        if len(edge_ids) >= len(piece):
            continue  # closed configurations are not reported as chains
        hit = _open_rosary_hit(curve, piece, adj, link_by_id)
        hits.append(
            PatternHit(
                kind="hyperelliptic_chain",
                subcurve=hit.subcurve,
                attachments=hit.attachments,
                length=hit.length,
                singularities=hit.singularities,
            )
        )
    return hits
