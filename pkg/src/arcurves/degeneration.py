"""Isotrivial degeneration moves and closed-point classification.

Every move normalizes away part of the curve and reattaches the unique
torus-symmetric configuration of the same genus: non-atomic singularities
are traded for nodally attached atoms, hyperelliptic tails and bridges of
small genus collapse onto atoms, and an unpointed hyperelliptic curve in
the maximal singularity range collapses onto a single atom.  A curve
admitting no move is special; special curves are the closed points, with
the converse open only for unpointed curves beyond the largest separating
singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .canonical import canonical_form
from .curve import (
    BranchPoint,
    Component,
    DecoratedCurve,
    Marking,
    SingularityType,
    Singularity,
    arithmetic_genus,
    conjugate_role,
    is_stable,
    normalize_keep_disconnected,
    require_valid,
    stabilize,
)
from .patterns import (
    component_is_hyperelliptic,
    find_hyperelliptic_tails_and_bridges,
    find_rosaries,
    internal_singularities,
    is_atomic_singularity,
    is_even_atom_shape,
)
from .autgroup import is_gm_rosary

__all__ = [
    "Move",
    "one_step_specializations",
    "is_special",
    "closed_point_status",
    "degeneration_digraph",
    "Digraph",
    "digraph_to_dot",
    "run_to_sink",
    "generic_fibers_over_rosary",
    "MoveConstructionError",
]


class MoveConstructionError(AssertionError):
    """A constructed move target violated a preserved invariant."""


@dataclass(frozen=True)
class Move:
    kind: str
    source: DecoratedCurve
    target: DecoratedCurve
    detail: str
    source_key: str
    target_key: str


# -- id bookkeeping -------------------------------------------------------------


def _fresh_ids(taken, stem, count):
    out = []
    i = 0
    while len(out) < count:
        cand = f"{stem}{i}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        i += 1
    return out


def _taken_ids(curve):
    return {c.id for c in curve.components} | {s.id for s in curve.singularities}


# -- target builders -------------------------------------------------------------


def _finish(kind, source, raw_target, dist, r, detail):
    target, leftover = stabilize(raw_target, dist, r)
    if leftover:
        raise MoveConstructionError(f"{kind}: distinguished points left over")
    require_valid(target)
    if arithmetic_genus(target) != arithmetic_genus(source):
        raise MoveConstructionError(f"{kind}: genus changed")
    if len(target.markings) != len(source.markings):
        raise MoveConstructionError(f"{kind}: marking count changed")
    if not is_stable(target, r):
        raise MoveConstructionError(f"{kind}: target not stable")
    src_key = canonical_form(source)
    dst_key = canonical_form(target)
    if src_key == dst_key:
        return None
    return Move(kind, source, target, detail, src_key, dst_key)


def _move_even_atom_drop(curve, sing, r):
    h = sing.sing_type.severity
    whole, dist = normalize_keep_disconnected(curve, [sing.id])
    attach = sing.branches[0]
    taken = _taken_ids(whole)
    (ea,) = _fresh_ids(taken, "ea", 1)
    (qid, nid) = _fresh_ids(taken, "x", 2)
    comps = whole.components + (Component(ea, 0),)
    sings = whole.singularities + (
        Singularity(qid, SingularityType(2 * h), (BranchPoint(ea, "b"),), True),
        Singularity(nid, SingularityType(1), (attach, BranchPoint(ea, "m")), True),
    )
    raw = DecoratedCurve(comps, sings, whole.markings)
    dist = tuple(d for d in dist if d != attach)
    return _finish("even_atom_drop", curve, raw, dist, r, f"singularity {sing.id}")


def _move_odd_atom_drop(curve, sing, r):
    h = sing.sing_type.severity
    whole, dist = normalize_keep_disconnected(curve, [sing.id])
    b1, b2 = sing.branches
    taken = _taken_ids(whole)
    pa, pb = _fresh_ids(taken, "oa", 2)
    (qid, n1, n2) = _fresh_ids(taken, "x", 3)
    comps = whole.components + (Component(pa, 0), Component(pb, 0))
    sings = whole.singularities + (
        Singularity(
            qid, SingularityType(2 * h + 1), (BranchPoint(pa, "b"), BranchPoint(pb, "b")), True
        ),
        Singularity(n1, SingularityType(1), (b1, BranchPoint(pa, "m")), True),
        Singularity(n2, SingularityType(1), (b2, BranchPoint(pb, "m")), True),
    )
    raw = DecoratedCurve(comps, sings, whole.markings)
    dist = tuple(d for d in dist if d not in (b1, b2))
    return _finish("odd_atom_drop", curve, raw, dist, r, f"singularity {sing.id}")


def _replace_component(curve, comp_id, new_comps, new_sings, slot_map):
    """Remove one component with its internal singularities; boundary
    branches and markings on it are rewired through slot_map."""
    internal = {s.id for s in internal_singularities(curve, [comp_id])}
    comps = tuple(c for c in curve.components if c.id != comp_id) + tuple(new_comps)
    sings = []
    for s in curve.singularities:
        if s.id in internal:
            continue
        branches = tuple(
            slot_map.get((b.component_id, b.local_point_id), b) for b in s.branches
        )
        sings.append(Singularity(s.id, s.sing_type, branches, s.equivariant_crimping))
    marks = tuple(
        Marking(m.index, slot_map.get((m.point.component_id, m.point.local_point_id), m.point))
        for m in curve.markings
    )
    return DecoratedCurve(comps, tuple(sings) + tuple(new_sings), marks)


def _move_tail_to_even_atom(curve, hit, r):
    comp_id = next(iter(hit.subcurve.component_ids))
    h = hit.genus
    taken = _taken_ids(curve)
    (ea,) = _fresh_ids(taken, "ea", 1)
    (qid,) = _fresh_ids(taken, "x", 1)
    attach_pt = _attachment_point(curve, hit, comp_id, 0)
    raw = _replace_component(
        curve,
        comp_id,
        [Component(ea, 0)],
        [Singularity(qid, SingularityType(2 * h), (BranchPoint(ea, "b"),), True)],
        {attach_pt: BranchPoint(ea, "m")},
    )
    return _finish("tail_to_even_atom", curve, raw, (), r, f"component {comp_id}")


def _move_dangling_to_odd_atom(curve, hit, r):
    comp_id = next(iter(hit.subcurve.component_ids))
    h = hit.genus
    taken = _taken_ids(curve)
    pa, pb = _fresh_ids(taken, "oa", 2)
    (qid,) = _fresh_ids(taken, "x", 1)
    attach_pt = _attachment_point(curve, hit, comp_id, 0)
    raw = _replace_component(
        curve,
        comp_id,
        [Component(pa, 0), Component(pb, 0)],
        [
            Singularity(
                qid,
                SingularityType(2 * h + 1),
                (BranchPoint(pa, "b"), BranchPoint(pb, "b")),
                True,
            )
        ],
        {attach_pt: BranchPoint(pa, "m")},
    )
    return _finish("dangling_bridge_to_odd_atom", curve, raw, (), r, f"component {comp_id}")


def _move_bridge_to_odd_atom(curve, hit, r):
    comp_id = next(iter(hit.subcurve.component_ids))
    h = hit.genus
    taken = _taken_ids(curve)
    pa, pb = _fresh_ids(taken, "oa", 2)
    (qid,) = _fresh_ids(taken, "x", 1)
    pt_a = _attachment_point(curve, hit, comp_id, 0)
    pt_b = _attachment_point(curve, hit, comp_id, 1)
    raw = _replace_component(
        curve,
        comp_id,
        [Component(pa, 0), Component(pb, 0)],
        [
            Singularity(
                qid,
                SingularityType(2 * h + 1),
                (BranchPoint(pa, "b"), BranchPoint(pb, "b")),
                True,
            )
        ],
        {pt_a: BranchPoint(pa, "m"), pt_b: BranchPoint(pb, "m")},
    )
    return _finish("bridge_to_odd_atom", curve, raw, (), r, f"component {comp_id}")


def _move_tail_via_odd_pinch(curve, hit, r):
    """A tail attached through A_{2k+1}, k >= 1, collapses together with the
    attaching singularity onto an odd atom of genus k pinched at its free
    end into an equivariant even singularity of the tail's genus."""
    comp_id = next(iter(hit.subcurve.component_ids))
    h = hit.genus
    (ref, kk) = hit.attachments[0]
    sing = curve.singularity(ref[1])
    ksev = sing.sing_type.severity
    other = next(b for b in sing.branches if b.component_id != comp_id)

    internal = {s.id for s in internal_singularities(curve, [comp_id])} | {sing.id}
    taken = _taken_ids(curve)
    pa, pb = _fresh_ids(taken, "pinch", 2)
    (qid, eid, nid) = _fresh_ids(taken, "x", 3)
    comps = tuple(c for c in curve.components if c.id != comp_id) + (
        Component(pa, 0),
        Component(pb, 0),
    )
    sings = tuple(s for s in curve.singularities if s.id not in internal) + (
        Singularity(
            qid,
            SingularityType(2 * ksev + 1),
            (BranchPoint(pa, "b"), BranchPoint(pb, "b1")),
            True,
        ),
        Singularity(eid, SingularityType(2 * h), (BranchPoint(pb, "b2"),), True),
        Singularity(nid, SingularityType(1), (other, BranchPoint(pa, "m")), True),
    )
    raw = DecoratedCurve(comps, sings, curve.markings)
    return _finish("tail_via_odd_pinch", curve, raw, (), r, f"component {comp_id}")


def _even_atom_curve(g):
    return DecoratedCurve(
        (Component("ea", 0),),
        (Singularity("q", SingularityType(2 * g), (BranchPoint("ea", "b"),), True),),
        (),
    )


def _odd_atom_curve(g):
    return DecoratedCurve(
        (Component("oa0", 0), Component("oa1", 0)),
        (
            Singularity(
                "q",
                SingularityType(2 * g + 1),
                (BranchPoint("oa0", "b"), BranchPoint("oa1", "b")),
                True,
            ),
        ),
        (),
    )


def _move_whole_curve(curve, r):
    g = arithmetic_genus(curve)
    target = _even_atom_curve(g) if r == 2 * g else _odd_atom_curve(g)
    return _finish("whole_curve_to_atom", curve, target, (), r, "whole curve")


def _attachment_point(curve, hit, comp_id, index):
    """(comp_id, point_id) of the hit's index-th attachment on the
    subcurve side."""
    ref, _ = hit.attachments[index]
    if ref[0] == "marking":
        for m in curve.markings:
            if m.index == ref[1]:
                return (m.point.component_id, m.point.local_point_id)
        raise KeyError(ref)
    sing = curve.singularity(ref[1])
    for b in sing.branches:
        if b.component_id == comp_id:
            return (b.component_id, b.local_point_id)
    raise KeyError(ref)


# -- the move catalog -------------------------------------------------------------


def one_step_specializations(curve: DecoratedCurve, r: int, n: int) -> list:
    """All one-step isotrivial degenerations with this curve as generic
    fiber, at the combinatorial-type level.  Sound and sufficient: a curve
    has no moves iff it is special."""
    require_valid(curve)
    if n != len(curve.markings):
        raise ValueError(f"curve has {len(curve.markings)} markings, n={n} given")
    if not is_stable(curve, r):
        raise ValueError("moves are defined for stable curves")
    g = arithmetic_genus(curve)
    moves = []

    for sing in sorted(curve.singularities, key=lambda s: s.id):
        if sing.k < 2 or is_atomic_singularity(curve, sing.id):
            continue
        if sing.sing_type.is_odd:
            move = _move_odd_atom_drop(curve, sing, r)
        else:
            move = _move_even_atom_drop(curve, sing, r)
        if move:
            moves.append(move)

    for hit in find_hyperelliptic_tails_and_bridges(curve, r):
        comp_id = next(iter(hit.subcurve.component_ids))
        h = hit.genus
        if hit.kind == "hyperelliptic_tail":
            (ref, k) = hit.attachments[0]
            if k in (0, 1):
                if 2 * h <= r and not is_even_atom_shape(curve, comp_id):
                    move = _move_tail_to_even_atom(curve, hit, r)
                    if move:
                        moves.append(move)
            elif k % 2 == 1 and 2 * h <= r:
                move = _move_tail_via_odd_pinch(curve, hit, r)
                if move:
                    moves.append(move)
        elif hit.kind == "dangling_bridge":
            (ref, k) = hit.attachments[0]
            if (
                k in (0, 1)
                and h >= 2
                and 2 * h + 1 <= r
                and not is_even_atom_shape(curve, comp_id)
            ):
                move = _move_dangling_to_odd_atom(curve, hit, r)
                if move:
                    moves.append(move)
        elif hit.kind == "hyperelliptic_bridge":
            ks = [k for _, k in hit.attachments]
            if all(k in (0, 1) for k in ks) and h >= 1 and 2 * h + 1 <= r:
                move = _move_bridge_to_odd_atom(curve, hit, r)
                if move:
                    moves.append(move)

    if n == 0 and r >= 2 * g and len(curve.components) == 1:
        comp = curve.components[0]
        if component_is_hyperelliptic(curve, comp):
            if r >= 2 * g + 1 or not is_even_atom_shape(curve, comp.id):
                move = _move_whole_curve(curve, r)
                if move:
                    moves.append(move)

    return moves


# -- special curves and closed points ----------------------------------------------


def is_special(curve: DecoratedCurve, r: int, n: int) -> bool:
    """Whether the curve satisfies the three closed-point conditions: atomic
    worse-than-nodal singularities, atomic small hyperelliptic tails and
    bridges, and (unpointed, r >= 2g) the whole curve being the appropriate
    atom."""
    require_valid(curve)
    if n != len(curve.markings):
        raise ValueError(f"curve has {len(curve.markings)} markings, n={n} given")
    if not is_stable(curve, r):
        raise ValueError("specialness is defined for stable curves")
    g = arithmetic_genus(curve)

    for sing in curve.singularities:
        if sing.k >= 2 and not is_atomic_singularity(curve, sing.id):
            return False

    for hit in find_hyperelliptic_tails_and_bridges(curve, r):
        comp_id = next(iter(hit.subcurve.component_ids))
        h = hit.genus
        if hit.kind == "hyperelliptic_tail":
            (_, k) = hit.attachments[0]
            if k in (0, 1) and 2 * h <= r and not is_even_atom_shape(curve, comp_id):
                return False
        elif hit.kind == "dangling_bridge":
            (_, k) = hit.attachments[0]
            if (
                k in (0, 1)
                and h >= 2
                and 2 * h + 1 <= r
                and not is_even_atom_shape(curve, comp_id)
            ):
                return False
        elif hit.kind == "hyperelliptic_bridge":
            ks = [k for _, k in hit.attachments]
            if all(k in (0, 1) for k in ks) and h >= 1 and 2 * h + 1 <= r:
                return False

    if n == 0 and r >= 2 * g and len(curve.components) == 1:
        comp = curve.components[0]
        if component_is_hyperelliptic(curve, comp):
            if r >= 2 * g + 1 or not is_even_atom_shape(curve, comp.id):
                return False

    return True


def closed_point_status(curve: DecoratedCurve, r: int, n: int) -> str:
    """"Closed", "NotClosed", or "SpecialButConverseUnproven" (special
    unpointed curves beyond the reductive range)."""
    if not is_special(curve, r, n):
        return "NotClosed"
    g = arithmetic_genus(curve)
    if n >= 1 or r <= 2 * g:
        return "Closed"
    return "SpecialButConverseUnproven"


# -- degeneration digraph ------------------------------------------------------------


@dataclass(frozen=True)
class Digraph:
    nodes: tuple  # canonical keys, sorted
    curves: dict  # key -> representative curve
    edges: tuple  # (source_key, target_key, kind), sorted

    def sinks(self):
        with_out = {e[0] for e in self.edges}
        return tuple(k for k in self.nodes if k not in with_out)


def degeneration_digraph(curves, r: int, n: int) -> Digraph:
    """Specialization digraph over canonical forms; endpoints outside the
    given list are added as they appear."""
    reps = {}
    for c in curves:
        reps.setdefault(canonical_form(c), c)
    edges = set()
    queue = sorted(reps)
    seen = set(queue)
    while queue:
        key = queue.pop(0)
        for move in one_step_specializations(reps[key], r, n):
            edges.add((move.source_key, move.target_key, move.kind))
            if move.target_key not in reps:
                reps[move.target_key] = move.target
            if move.target_key not in seen:
                seen.add(move.target_key)
                queue.append(move.target_key)
    return Digraph(tuple(sorted(reps)), reps, tuple(sorted(edges)))


def digraph_to_dot(graph: Digraph, labels=None) -> str:
    """DOT rendering with sinks highlighted."""
    labels = labels or {}
    sinks = set(graph.sinks())
    index = {key: i for i, key in enumerate(graph.nodes)}
    lines = ["digraph degenerations {", "  rankdir=LR;"]
    for key in graph.nodes:
        label = labels.get(key, f"t{index[key]}")
        style = ' style=filled fillcolor="lightblue" peripheries=2' if key in sinks else ""
        lines.append(f'  n{index[key]} [label="{label}"{style}];')
    dedup = {(s, t) for s, t, _ in graph.edges}
    for s, t in sorted(dedup):
        lines.append(f"  n{index[s]} -> n{index[t]};")
    lines.append("}")
    return "\n".join(lines)


def run_to_sink(curve, r, n, max_steps=None):
    """Iterate the first available move until a special curve is reached;
    returns (sink, number of steps)."""
    steps = 0
    current = curve
    bound = max_steps if max_steps is not None else 10 * (len(curve.singularities) + len(curve.components) + 1)
    while True:
        moves = one_step_specializations(current, r, n)
        if not moves:
            return current, steps
        current = moves[0].target
        steps += 1
        if steps > bound:
            raise RuntimeError("degeneration did not terminate within the declared bound")


# -- generic fibers over rosaries ------------------------------------------------------


def _chain_curve(unit_genera, link_sevs, *, left_rational, right_rational, closed=False):
    """A 2-pointed chain (or unmarked closed chain) of hyperelliptic units
    of the given genera, linked by odd singularities of the given
    severities; optional rational 1-pointed end pieces.  Each unit's two
    chain points are exchanged by its involution (decorated explicitly for
    genus >= 2)."""
    pieces = []
    if left_rational:
        pieces.append(("rat0", 0))
    pieces.extend((f"u{i}", g) for i, g in enumerate(unit_genera))
    if right_rational:
        pieces.append(("rat1", 0))
    m = len(pieces)
    endpoint = {
        j: ("l" if (closed or j > 0) else "m0", "r" if (closed or j < m - 1) else "m1")
        for j in range(m)
    }
    markings = ()
    if not closed:
        markings = (
            Marking(1, BranchPoint(pieces[0][0], endpoint[0][0])),
            Marking(2, BranchPoint(pieces[m - 1][0], endpoint[m - 1][1])),
        )
    comps = []
    for j, (name, genus) in enumerate(pieces):
        if genus >= 2:
            pair = conjugate_role(f"{name}p")
            comps.append(Component(name, genus, {endpoint[j][0]: pair, endpoint[j][1]: pair}))
        else:
            comps.append(Component(name, genus))
    nlinks = m if closed else m - 1
    if len(link_sevs) != nlinks:
        raise AssertionError("chain template link count mismatch")
    sings = []
    for t in range(nlinks):
        a, b = pieces[t][0], pieces[(t + 1) % m][0]
        sings.append(
            Singularity(
                f"q{t}",
                SingularityType(2 * link_sevs[t] + 1),
                (BranchPoint(a, endpoint[t][1]), BranchPoint(b, endpoint[(t + 1) % m][0])),
                True,
            )
        )
    return DecoratedCurve(tuple(comps), tuple(sings), markings)


def generic_fibers_over_rosary(curve, hit, r) -> list:
    """Catalog of generic-fiber shapes of isotrivial degenerations to the
    given rosary: alternating singularity classes deform to chains of
    hyperelliptic curves.  Returns (case label, template curve) pairs."""
    if hit.kind not in ("rosary", "closed_rosary"):
        raise ValueError("expected a rosary or closed rosary hit")
    if not is_gm_rosary(curve, hit, r):
        raise ValueError("the rosary torus does not survive in the curve")
    sevs = [curve.singularity(sid).sing_type.severity for sid in hit.singularities]
    ell = hit.length
    shapes = []
    if hit.kind == "closed_rosary":
        for parity in (0, 1):
            units = [sevs[i] for i in range(parity, ell, 2)]
            links = [sevs[i] for i in range(1 - parity, ell, 2)]
            shapes.append(
                (
                    "closed_chain",
                    _chain_curve(units, links, left_rational=False, right_rational=False, closed=True),
                )
            )
    elif ell % 2 == 0:
        units = [sevs[i] for i in range(0, ell - 1, 2)]
        links = [sevs[i] for i in range(1, ell - 1, 2)]
        shapes.append(
            ("e1", _chain_curve(units, links, left_rational=False, right_rational=False))
        )
        if ell >= 4:
            units = [sevs[i] for i in range(1, ell - 1, 2)]
            links = [sevs[i] for i in range(0, ell - 1, 2)]
            shapes.append(
                ("e2", _chain_curve(units, links, left_rational=True, right_rational=True))
            )
    else:
        units = [sevs[i] for i in range(0, ell - 1, 2)]
        links = [sevs[i] for i in range(1, ell - 1, 2)]
        shapes.append(
            ("o", _chain_curve(units, links, left_rational=False, right_rational=True))
        )
        units = [sevs[i] for i in range(1, ell - 1, 2)]
        links = [sevs[i] for i in range(0, ell - 1, 2)]
        shapes.append(
            ("o", _chain_curve(units, links, left_rational=True, right_rational=False))
        )
    dedup = {}
    for label, template in shapes:
        dedup.setdefault(canonical_form(template), (label, template))
    return [dedup[k] for k in sorted(dedup)]
