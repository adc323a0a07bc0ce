"""Connected automorphism groups via signed weight solving.

A one-parameter subgroup of automorphisms induces an integer weight on the
tangent line of the normalization at every special point.  On a rational
component with two special points the two weights are opposite; with one
special point the weight is free; components of positive genus or with
three or more special points carry weight zero.  Gluing two branches into
an equivariantly crimped odd singularity forces the branch weights to be
equal; a non-equivariant crimping (odd or even) kills the weight at its
branches.  Nodes impose nothing.  The resulting homogeneous system is
solved with a signed union-find; an odd cycle of sign constraints forces
zero.

The unipotent summand appears exactly for unpointed curves with a
separating A_{2g+1}-singularity whose two sides normalize to rational
configurations; the torus half survives iff that crimping is equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import (
    DecoratedCurve,
    arithmetic_genus,
    is_prestable,
    require_valid,
)
from .patterns import find_rosaries, PatternHit

__all__ = [
    "WeightAssignment",
    "AutDescriptor",
    "aut_identity_component",
    "hyperelliptic_singularities",
    "gm_rosaries",
    "has_attached_gm_rosary",
    "is_gm_rosary",
    "modelled_aut_dimension",
    "stab_no_out_case",
]


@dataclass(frozen=True)
class WeightAssignment:
    """Integer tangent weights, one per special-point slot."""

    weights: tuple  # ((component_id, point_id), weight), sorted

    def weight(self, comp_id, point_id) -> int:
        for key, w in self.weights:
            if key == (comp_id, point_id):
                return w
        raise KeyError((comp_id, point_id))

    def as_dict(self) -> dict:
        return dict(self.weights)

    def negated(self) -> "WeightAssignment":
        return WeightAssignment(tuple((key, -w) for key, w in self.weights))


@dataclass(frozen=True)
class AutDescriptor:
    torus_rank: int
    unipotent: bool
    basis: tuple

    def name(self) -> str:
        if self.unipotent:
            return "Gm x| Ga" if self.torus_rank == 1 else "Ga"
        if self.torus_rank == 0:
            return "trivial"
        if self.torus_rank == 1:
            return "Gm"
        return f"Gm^{self.torus_rank}"

    @property
    def dimension(self) -> int:
        return self.torus_rank + (1 if self.unipotent else 0)


class _SignedUnionFind:
    """Union-find over variables with relations x_a = s * x_b, plus a zero
    sink; merging with inconsistent sign forces the class to zero."""

    def __init__(self, n):
        self.parent = list(range(n + 1))  # element n is the zero sink
        self.sign = [1] * (n + 1)
        self.zero_sink = n

    def find(self, a):
        if self.parent[a] == a:
            return a, 1
        root, s = self.find(self.parent[a])
        self.parent[a] = root
        self.sign[a] *= s
        return root, self.sign[a]

    def union(self, a, sa, b, sb):
        """Impose sa * x_a == sb * x_b (sa, sb in {+1, -1})."""
        ra, wa = self.find(a)
        rb, wb = self.find(b)
        zr, _ = self.find(self.zero_sink)
        if ra == rb:
            if ra != zr and sa * wa != sb * wb:
                self.parent[ra] = zr  # odd sign cycle forces the class to zero
                self.sign[ra] = 1
            return
        if rb == zr:
            self.parent[ra] = zr
            self.sign[ra] = 1
            return
        if ra == zr:
            self.parent[rb] = zr
            self.sign[rb] = 1
            return
        # x_ra = rel * x_rb
        self.parent[ra] = rb
        self.sign[ra] = sa * wa * sb * wb

    def force_zero(self, a):
        ra, _ = self.find(a)
        zr, _ = self.find(self.zero_sink)
        if ra != zr:
            self.parent[ra] = zr
            self.sign[ra] = 1

    def classes(self, n):
        out = {}
        for v in range(n):
            root, s = self.find(v)
            out.setdefault(root, []).append((v, s))
        zero_root, _ = self.find(self.zero_sink)
        return {root: members for root, members in out.items() if root != zero_root}


def _slot_variables(curve, distinguished):
    """Map slot -> (var_index, sign) for slots with potentially nonzero
    weight; absent slots are identically zero."""
    slot_sign = {}
    var_comp = []
    for comp in sorted(curve.components, key=lambda c: c.id):
        slots = curve.slots_of(comp.id, distinguished)
        if comp.geometric_genus != 0 or len(slots) > 2 or not slots:
            continue
        idx = len(var_comp)
        var_comp.append(comp.id)
        slot_sign[(comp.id, slots[0][0])] = (idx, 1)
        if len(slots) == 2:
            slot_sign[(comp.id, slots[1][0])] = (idx, -1)
    return slot_sign, var_comp


def _solve(curve, distinguished=()):
    slot_sign, var_comp = _slot_variables(curve, distinguished)
    uf = _SignedUnionFind(len(var_comp))

    def entry(branch):
        return slot_sign.get((branch.component_id, branch.local_point_id))

    for s in curve.singularities:
        if s.k == 1:
            continue
        if s.sing_type.is_odd:
            e1, e2 = entry(s.branches[0]), entry(s.branches[1])
            if s.equivariant_crimping:
                if e1 is None and e2 is None:
                    continue
                if e1 is None:
                    uf.force_zero(e2[0])
                elif e2 is None:
                    uf.force_zero(e1[0])
                else:
                    uf.union(e1[0], e1[1], e2[0], e2[1])
            else:
                for e in (e1, e2):
                    if e is not None:
                        uf.force_zero(e[0])
        else:
            e = entry(s.branches[0])
            if not s.equivariant_crimping and e is not None:
                uf.force_zero(e[0])

    classes = uf.classes(len(var_comp))
    all_slots = sorted(
        key for key in _all_slot_keys(curve, distinguished)
    )
    basis = []
    for root in sorted(classes, key=lambda r: min(v for v, _ in classes[r])):
        members = dict(classes[root])
        values = {}
        for key in all_slots:
            e = slot_sign.get(key)
            if e is not None and e[0] in members:
                values[key] = e[1] * members[e[0]]
            else:
                values[key] = 0
        basis.append(WeightAssignment(tuple(sorted(values.items()))))
    return basis, slot_sign


def _all_slot_keys(curve, distinguished):
    keys = []
    for s in curve.singularities:
        keys.extend(b.key() for b in s.branches)
    keys.extend(m.point.key() for m in curve.markings)
    keys.extend(d.key() for d in distinguished)
    return keys


def _separating_ga_singularity(curve):
    """The separating A_{2g+1}-singularity with rational sides, if any."""
    from .curve import _genus_of_configuration, normalize_keep_disconnected, split_pieces

    g = _genus_of_configuration(curve)
    for s in curve.singularities:
        if s.k != 2 * g + 1 or not s.sing_type.is_odd:
            continue
        if s.branches[0].component_id == s.branches[1].component_id:
            continue
        whole, dist = normalize_keep_disconnected(curve, [s.id])
        pieces = split_pieces(whole, dist)
        if len(pieces) == 2 and all(
            _genus_of_configuration(piece) == 0 for piece, _ in pieces
        ):
            return s
    return None


def aut_identity_component(curve: DecoratedCurve, r: int, n: int) -> AutDescriptor:
    """Descriptor of Aut0 of the pointed curve: a split torus, possibly with
    one unipotent factor for unpointed curves with a separating maximal odd
    singularity."""
    require_valid(curve)
    if not is_prestable(curve, r):
        raise ValueError(f"curve is not prestable for r={r}")
    if n != len(curve.markings):
        raise ValueError(f"curve has {len(curve.markings)} markings, n={n} given")
    basis, _ = _solve(curve)
    rank = len(basis)
    unipotent = False
    if n == 0:
        g = arithmetic_genus(curve)
        if r >= 2 * g + 1:
            unipotent = _separating_ga_singularity(curve) is not None
    if unipotent and rank > 1:
        raise ValueError(
            "unipotent factor with torus rank > 1: outside the classification "
            "of stable curves"
        )
    return AutDescriptor(rank, unipotent, tuple(basis))


def hyperelliptic_singularities(curve: DecoratedCurve, r: int, n: int) -> set:
    """A_{>=2} singularities on which the torus acts nontrivially at a
    branch."""
    descriptor = aut_identity_component(curve, r, n)
    out = set()
    for s in curve.singularities:
        if s.k < 2:
            continue
        for assignment in descriptor.basis:
            if any(assignment.weight(*b.key()) != 0 for b in s.branches):
                out.add(s.id)
                break
    return out


def _rosary_torus_survives(curve, hit, basis):
    comp_ids = hit.subcurve.component_ids
    for assignment in basis:
        for (cid, pt), w in assignment.weights:
            if cid in comp_ids and w != 0:
                return True
    return False


def gm_rosaries(curve: DecoratedCurve, r: int) -> list:
    """Rosary hits whose torus survives in Aut0 of the whole curve."""
    require_valid(curve)
    basis, _ = _solve(curve)
    return [h for h in find_rosaries(curve, r) if _rosary_torus_survives(curve, h, basis)]


def is_gm_rosary(curve: DecoratedCurve, hit: PatternHit, r: int) -> bool:
    basis, _ = _solve(curve)
    return _rosary_torus_survives(curve, hit, basis)


def has_attached_gm_rosary(curve: DecoratedCurve, r: int) -> bool:
    return bool(gm_rosaries(curve, r))


# -- modelled automorphism dimension (used by deformation bookkeeping) --------


def _free_ga_count(curve, distinguished):
    """Unipotent automorphisms surviving on one-special-point rational
    components: the slot must be a marking, a distinguished point, a node
    branch or a cusp branch (trivial crimping space); G_a is absorbed by the
    crimping of any worse singularity."""
    count = 0
    for comp in curve.components:
        if comp.geometric_genus != 0:
            continue
        slots = curve.slots_of(comp.id, distinguished)
        if len(slots) != 1:
            continue
        occ = slots[0][1]
        if occ[0] in ("marking", "distinguished"):
            count += 1
        elif occ[0] == "branch":
            k = curve.singularity(occ[1]).k
            if k in (1, 2):
                count += 1
    return count


def modelled_aut_dimension(curve, distinguished=()):
    """Dimension of Aut0 in the model: torus rank plus surviving unipotent
    factors.  Valid for prestable configurations, possibly disconnected and
    carrying distinguished points."""
    basis, _ = _solve(curve, distinguished)
    dim = len(basis) + _free_ga_count(curve, distinguished)
    if not curve.markings and not distinguished:
        if _separating_ga_singularity(curve) is not None:
            dim += 1
    return dim


# -- classification of rank-1 curves without outer nodes -----------------------


def stab_no_out_case(curve: DecoratedCurve, r: int):
    """For a stable curve without outer nodes and with torus rank one,
    return which of the three structure cases applies: "surjective_rosary",
    "closed_rosary" or "irreducible_even"; None if none matches."""
    all_comps = frozenset(c.id for c in curve.components)
    rosaries = find_rosaries(curve, r)
    for hit in rosaries:
        if hit.subcurve.component_ids != all_comps:
            continue
        if hit.kind == "closed_rosary":
            if hit.length % 2 == 0:
                return "closed_rosary"
            continue
        return "surjective_rosary"
    if len(curve.components) == 1:
        comp = curve.components[0]
        sings = curve.singularities
        if (
            comp.geometric_genus == 0
            and not curve.markings
            and 1 <= len(sings) <= 2
            and all(not s.sing_type.is_odd and s.k >= 2 for s in sings)
        ):
            return "irreducible_even"
    return None
