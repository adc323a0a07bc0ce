"""Decorated-multigraph model of n-pointed curves with A-type singularities.

A curve is a multigraph of irreducible components decorated with singularity
data.  Each singularity of type A_k (local model y^2 = x^{k+1}) is unibranch
when k is even and two-branched when k is odd; odd singularities (including
nodes, k = 1) are the edges of the incidence multigraph, loops allowed.
Branch points of singularities, marked points and distinguished points all
occupy pairwise distinct smooth slots on the normalizations of the
components.

All values are immutable after construction and all operations are pure
functions, so curves are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence, Union

__all__ = [
    "InvalidCurveError",
    "UnknownSingularityError",
    "StabilizationError",
    "SingularityType",
    "BranchPoint",
    "Component",
    "Singularity",
    "Marking",
    "DecoratedCurve",
    "ValidationReport",
    "ROLE_WEIERSTRASS",
    "ROLE_FREE",
    "conjugate_role",
    "validate",
    "require_valid",
    "arithmetic_genus",
    "is_prestable",
    "is_stable",
    "branch_weight",
    "stability_degree",
    "partial_normalization",
    "normalize_keep_disconnected",
    "stabilize",
]


class InvalidCurveError(ValueError):
    """Raised when an operation receives a curve that fails validation."""


class UnknownSingularityError(ValueError):
    """Raised when a singularity id does not exist on the curve."""


class StabilizationError(ValueError):
    """Raised when contraction would orphan markings (malformed input)."""


ROLE_WEIERSTRASS = "weierstrass"
ROLE_FREE = "free"

# A role is "weierstrass", "free", or ("conjugate", pair_id).
Role = Union[str, tuple]


def conjugate_role(pair_id: str) -> Role:
    return ("conjugate", pair_id)


@dataclass(frozen=True)
class SingularityType:
    """Type A_k; k >= 1 (smooth points are never stored)."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"A_k requires k >= 1, got k={self.k}")

    @property
    def is_odd(self) -> bool:
        return self.k % 2 == 1

    @property
    def branch_count(self) -> int:
        return 2 if self.is_odd else 1

    @property
    def severity(self) -> int:
        """h with k = 2h (even) or k = 2h+1 (odd); drives genus counts."""
        return self.k // 2


@dataclass(frozen=True)
class BranchPoint:
    """A smooth slot on the normalization of one component."""

    component_id: str
    local_point_id: str

    def key(self) -> tuple:
        return (self.component_id, self.local_point_id)


@dataclass(frozen=True)
class Component:
    id: str
    geometric_genus: int
    # None means undecorated.  Decorations matter only for genus >= 2:
    # genus <= 1 components admit every involution the patterns ask for,
    # genus 2 components are hyperelliptic with undecorated slots generic
    # (free), genus >= 3 undecorated components are not hyperelliptic.
    hyperelliptic_roles: Optional[Mapping[str, Role]] = None


@dataclass(frozen=True)
class Singularity:
    id: str
    sing_type: SingularityType
    branches: tuple
    # Whether the crimping datum is chosen torus-equivariantly.  Meaningful
    # for k >= 2 only; ignored for nodes.
    equivariant_crimping: bool = True

    @property
    def k(self) -> int:
        return self.sing_type.k


@dataclass(frozen=True)
class Marking:
    index: int
    point: BranchPoint


@dataclass(frozen=True)
class DecoratedCurve:
    components: tuple
    singularities: tuple
    markings: tuple

    # -- structural accessors ------------------------------------------------

    def component(self, comp_id: str) -> Component:
        for c in self.components:
            if c.id == comp_id:
                return c
        raise KeyError(comp_id)

    def singularity(self, sing_id: str) -> Singularity:
        for s in self.singularities:
            if s.id == sing_id:
                return s
        raise UnknownSingularityError(sing_id)

    def component_ids(self) -> list:
        return [c.id for c in self.components]

    def slot_table(self) -> dict:
        """Map (component_id, local_point_id) -> occupant descriptor.

        Occupants are ("branch", sing_id, branch_index) or ("marking", index).
        """
        table = {}
        for s in self.singularities:
            for i, b in enumerate(s.branches):
                table.setdefault(b.key(), []).append(("branch", s.id, i))
        for m in self.markings:
            table.setdefault(m.point.key(), []).append(("marking", m.index))
        return table

    def slots_of(self, comp_id: str, distinguished: Sequence[BranchPoint] = ()) -> list:
        """Ordered (by local point id) slots on a component, with occupants."""
        occupied = {}
        for key, occs in self.slot_table().items():
            if key[0] == comp_id:
                occupied[key[1]] = occs[0]
        for d in distinguished:
            if d.component_id == comp_id:
                occupied.setdefault(d.local_point_id, ("distinguished",))
        return sorted(occupied.items())

    def adjacency(self) -> dict:
        """Incidence multigraph: comp_id -> list of (sing_id, other_comp_id).

        One edge per odd singularity (loops allowed); even singularities are
        not edges.
        """
        adj = {c.id: [] for c in self.components}
        for s in self.singularities:
            if s.sing_type.is_odd:
                a, b = s.branches[0].component_id, s.branches[1].component_id
                adj[a].append((s.id, b))
                if a != b:
                    adj[b].append((s.id, a))
        return adj

    def connected_components(self) -> list:
        """Partition of component ids by the incidence multigraph."""
        adj = self.adjacency()
        seen = set()
        pieces = []
        for cid in self.component_ids():
            if cid in seen:
                continue
            stack, piece = [cid], set()
            while stack:
                v = stack.pop()
                if v in piece:
                    continue
                piece.add(v)
                for _, w in adj.get(v, ()):
                    if w not in piece:
                        stack.append(w)
            seen |= piece
            pieces.append(piece)
        return pieces

    def first_betti_number(self) -> int:
        odd = sum(1 for s in self.singularities if s.sing_type.is_odd)
        return odd - len(self.components) + len(self.connected_components())


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.problems


def validate(curve: DecoratedCurve, distinguished: Sequence[BranchPoint] = ()) -> ValidationReport:
    """Check all structural invariants; problems ARE the output, never raised."""
    problems = []
    comp_ids = [c.id for c in curve.components]
    if len(set(comp_ids)) != len(comp_ids):
        problems.append("duplicate component ids")
    comp_set = set(comp_ids)
    if not comp_set:
        problems.append("curve has no components")

    sing_ids = [s.id for s in curve.singularities]
    if len(set(sing_ids)) != len(sing_ids):
        problems.append("duplicate singularity ids")

    for s in curve.singularities:
        expected = s.sing_type.branch_count
        if len(s.branches) != expected:
            problems.append(
                f"singularity {s.id}: A_{s.k} needs {expected} branch(es), has {len(s.branches)}"
            )
        for b in s.branches:
            if b.component_id not in comp_set:
                problems.append(f"singularity {s.id}: unknown component {b.component_id}")

    indices = sorted(m.index for m in curve.markings)
    if indices != list(range(1, len(indices) + 1)):
        problems.append(f"marking indices {indices} are not exactly 1..n")
    for m in curve.markings:
        if m.point.component_id not in comp_set:
            problems.append(f"marking {m.index}: unknown component {m.point.component_id}")

    # All special points occupy pairwise distinct smooth slots.
    used = {}
    def claim(key, who):
        if key in used:
            problems.append(f"slot {key} used by both {used[key]} and {who}")
        else:
            used[key] = who
    for s in curve.singularities:
        for b in s.branches:
            claim(b.key(), f"singularity {s.id}")
    for m in curve.markings:
        claim(m.point.key(), f"marking {m.index}")
    for d in distinguished:
        claim(d.key(), "distinguished point")
        if d.component_id not in comp_set:
            problems.append(f"distinguished point on unknown component {d.component_id}")

    # Role decorations reference actual slots of their own component; a
    # conjugate pair id joins at most two slots, both on that component.
    for c in curve.components:
        if c.hyperelliptic_roles is None:
            continue
        own = {k[1] for k in used if k[0] == c.id}
        pairs = {}
        for pt, role in c.hyperelliptic_roles.items():
            if pt not in own:
                problems.append(f"component {c.id}: role on unknown point {pt}")
            if isinstance(role, tuple):
                if len(role) != 2 or role[0] != "conjugate":
                    problems.append(f"component {c.id}: malformed role {role!r}")
                else:
                    pairs.setdefault(role[1], []).append(pt)
            elif role not in (ROLE_WEIERSTRASS, ROLE_FREE):
                problems.append(f"component {c.id}: unknown role {role!r}")
        for pid, pts in pairs.items():
            if len(pts) > 2:
                problems.append(f"component {c.id}: conjugate pair {pid} has {len(pts)} points")

    # Rational components with no special points cannot occur in a connected
    # stable configuration.
    for c in curve.components:
        if c.geometric_genus == 0 and not any(k[0] == c.id for k in used):
            problems.append(f"component {c.id}: genus-0 component with no special points")

    if comp_set and len(curve.connected_components()) > 1:
        problems.append("incidence multigraph is disconnected")

    return ValidationReport(tuple(problems))


def require_valid(curve: DecoratedCurve, distinguished: Sequence[BranchPoint] = ()) -> None:
    report = validate(curve, distinguished)
    if not report.ok:
        raise InvalidCurveError("; ".join(report.problems))


def arithmetic_genus(curve: DecoratedCurve) -> int:
    """Genus of the connected curve: sum of component genera, singularity
    severities, and the first Betti number of the incidence multigraph."""
    require_valid(curve)
    return _genus_of_configuration(curve)


def _genus_of_configuration(curve: DecoratedCurve) -> int:
    """Sum of genera of connected pieces (no validity check)."""
    total = sum(c.geometric_genus for c in curve.components)
    total += sum(s.sing_type.severity for s in curve.singularities)
    return total + curve.first_betti_number()


def is_prestable(curve: DecoratedCurve, r: int) -> bool:
    require_valid(curve)
    if r < 1:
        raise ValueError("r must be a positive integer")
    return all(s.k <= r for s in curve.singularities)


def branch_weight(k: int) -> int:
    """Conductor weight of one branch of an A_k singularity on the
    normalization: h+1 per branch when k = 2h+1, 2h when k = 2h."""
    if k % 2 == 1:
        return k // 2 + 1
    return k


def stability_degree(
    curve: DecoratedCurve, comp_id: str, distinguished: Sequence[BranchPoint] = ()
) -> int:
    """Degree of the log-dualizing bundle on a component; > 0 on every
    component characterizes stability.  Distinguished points count as
    markings."""
    comp = curve.component(comp_id)
    deg = 2 * comp.geometric_genus - 2
    for _, occ in curve.slots_of(comp_id, distinguished):
        if occ[0] == "branch":
            deg += branch_weight(curve.singularity(occ[1]).k)
        else:  # marking or distinguished
            deg += 1
    return deg


def is_stable(
    curve: DecoratedCurve, r: int, distinguished: Sequence[BranchPoint] = ()
) -> bool:
    require_valid(curve, distinguished)
    if not is_prestable(curve, r):
        raise InvalidCurveError(f"curve is not prestable for r={r}")
    return all(
        stability_degree(curve, c.id, distinguished) > 0 for c in curve.components
    )


# -- partial normalization ---------------------------------------------------


def normalize_keep_disconnected(
    curve: DecoratedCurve,
    sing_ids: Iterable[str],
    distinguished: Sequence[BranchPoint] = (),
):
    """Remove the named singularities, turning their branch points into
    distinguished points; the result may be disconnected.  Returns
    (curve, distinguished)."""
    ids = set(sing_ids)
    known = {s.id for s in curve.singularities}
    for sid in ids:
        if sid not in known:
            raise UnknownSingularityError(sid)
    new_distinguished = list(distinguished)
    survivors = []
    for s in curve.singularities:
        if s.id in ids:
            new_distinguished.extend(s.branches)
        else:
            survivors.append(s)
    out = DecoratedCurve(curve.components, tuple(survivors), curve.markings)
    return out, tuple(new_distinguished)


def partial_normalization(
    curve: DecoratedCurve,
    sing_ids: Iterable[str],
    distinguished: Sequence[BranchPoint] = (),
):
    """Normalize along the named singularities and split into connected
    pieces.  Returns a list of (piece, distinguished points on the piece);
    each piece inherits its markings and role decorations."""
    require_valid(curve, distinguished)
    whole, dist = normalize_keep_disconnected(curve, sing_ids, distinguished)
    return split_pieces(whole, dist)


def split_pieces(curve: DecoratedCurve, distinguished: Sequence[BranchPoint] = ()):
    """Split a possibly disconnected configuration into connected pieces."""
    pieces = []
    for comp_ids in curve.connected_components():
        comps = tuple(c for c in curve.components if c.id in comp_ids)
        sings = tuple(
            s for s in curve.singularities if s.branches[0].component_id in comp_ids
        )
        marks = tuple(m for m in curve.markings if m.point.component_id in comp_ids)
        dist = tuple(d for d in distinguished if d.component_id in comp_ids)
        pieces.append((DecoratedCurve(comps, sings, marks), dist))
    pieces.sort(key=lambda pd: sorted(c.id for c in pd[0].components))
    return pieces


# -- stabilization -----------------------------------------------------------


def _drop_role(comp: Component, point_id: str) -> Component:
    if comp.hyperelliptic_roles and point_id in comp.hyperelliptic_roles:
        roles = {k: v for k, v in comp.hyperelliptic_roles.items() if k != point_id}
        return replace(comp, hyperelliptic_roles=roles)
    return comp


def stabilize(
    curve: DecoratedCurve,
    distinguished: Sequence[BranchPoint] = (),
    r: int = None,
):
    """Contract genus-0 components of non-positive stability degree to a
    fixed point.

    A component carrying exactly two nodes is contracted by merging them into
    one node; a component carrying one node and one point-like slot (marking
    or distinguished point) is removed with the point relocated to the other
    side of the node; a component whose only slot is a node is removed
    together with the node.  Returns (curve, distinguished).
    """
    cur, dist = curve, tuple(distinguished)
    while True:
        nxt = _stabilize_once(cur, dist)
        if nxt is None:
            return cur, dist
        cur, dist = nxt


def _slot_kinds(curve, comp_id, distinguished):
    kinds = []
    for pt, occ in curve.slots_of(comp_id, distinguished):
        if occ[0] == "branch":
            s = curve.singularity(occ[1])
            kind = "node" if s.k == 1 else "sing"
            kinds.append((pt, kind, occ))
        elif occ[0] == "marking":
            kinds.append((pt, "marking", occ))
        else:
            kinds.append((pt, "distinguished", occ))
    return kinds


def _stabilize_once(curve, distinguished):
    for comp in curve.components:
        if comp.geometric_genus != 0:
            continue
        if stability_degree(curve, comp.id, distinguished) > 0:
            continue
        slots = _slot_kinds(curve, comp.id, distinguished)
        node_slots = [s for s in slots if s[1] == "node"]
        point_slots = [s for s in slots if s[1] in ("marking", "distinguished")]
        if len(slots) == 1 and len(node_slots) == 1:
            return _contract_leaf_node(curve, distinguished, comp, node_slots[0])
        if len(slots) == 2 and len(node_slots) == 2:
            sid0, sid1 = node_slots[0][2][1], node_slots[1][2][1]
            if sid0 == sid1:
                continue  # loop node: an irreducible genus-1 piece, not a sprout
            return _contract_double_node(curve, distinguished, comp, node_slots)
        if len(slots) == 2 and len(node_slots) == 1 and len(point_slots) == 1:
            return _contract_sprout(curve, distinguished, comp, node_slots[0], point_slots[0])
    return None


def _other_branch(sing, comp_id, point_id):
    for b in sing.branches:
        if not (b.component_id == comp_id and b.local_point_id == point_id):
            return b
    raise AssertionError("node has no other branch")


def _remove_component(curve, comp_id):
    return tuple(c for c in curve.components if c.id != comp_id)


def _contract_leaf_node(curve, distinguished, comp, node_slot):
    pt, _, occ = node_slot
    sing = curve.singularity(occ[1])
    partner = _other_branch(sing, comp.id, pt)
    comps = []
    for c in _remove_component(curve, comp.id):
        comps.append(_drop_role(c, partner.local_point_id) if c.id == partner.component_id else c)
    sings = tuple(s for s in curve.singularities if s.id != sing.id)
    return DecoratedCurve(tuple(comps), sings, curve.markings), distinguished


def _contract_double_node(curve, distinguished, comp, node_slots):
    (pt0, _, occ0), (pt1, _, occ1) = node_slots
    n0, n1 = curve.singularity(occ0[1]), curve.singularity(occ1[1])
    a = _other_branch(n0, comp.id, pt0)
    b = _other_branch(n1, comp.id, pt1)
    merged = Singularity(n0.id, SingularityType(1), (a, b), True)
    sings = tuple(
        merged if s.id == n0.id else s
        for s in curve.singularities
        if s.id != n1.id
    )
    return DecoratedCurve(_remove_component(curve, comp.id), sings, curve.markings), distinguished


def _contract_sprout(curve, distinguished, comp, node_slot, point_slot):
    pt, _, occ = node_slot
    sing = curve.singularity(occ[1])
    partner = _other_branch(sing, comp.id, pt)
    sings = tuple(s for s in curve.singularities if s.id != sing.id)
    comps = _remove_component(curve, comp.id)
    ppt, pkind, pocc = point_slot
    markings = curve.markings
    dist = distinguished
    if pkind == "marking":
        idx = pocc[1]
        markings = tuple(
            Marking(m.index, partner) if m.index == idx else m for m in curve.markings
        )
    else:
        dist = tuple(
            partner if (d.component_id == comp.id and d.local_point_id == ppt) else d
            for d in distinguished
        )
    if any(m.point.component_id == comp.id for m in markings):
        raise StabilizationError(
            f"contracting component {comp.id} would disconnect markings"
        )
    return DecoratedCurve(comps, sings, markings), dist
