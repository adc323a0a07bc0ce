"""Tangent and deformation bookkeeping.

The first-order deformation space of a curve splits into one block per
singularity (the deformations of the singularity itself and the crimping
directions that preserve it) plus the deformations of the pointed
normalization.  Under a one-parameter automorphism group each block is
signed: the crimping block carries the sign of the tangent weight at the
singularity, the singularity block its negation.  Only opposition and
alternation of these signs are contractual; the absolute convention is a
choice.

Dimensions: the miniversal deformation of an A_k singularity has dimension
k; the raw crimping space of an even A_{2h} is an affine space of dimension
h-1 and of an odd A_{2h+1} a group torsor of dimension h, reduced by the
automorphism dimension the gluing absorbs (computed by peeling one
singularity at a time).  The normalization block is the residual of the
dimension identity

    total = 3g - 3 + n + dim Aut0,

which is recomputed independently from the per-component moduli counts and
cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .autgroup import aut_identity_component, modelled_aut_dimension
from .curve import (
    BranchPoint,
    DecoratedCurve,
    arithmetic_genus,
    is_stable,
    normalize_keep_disconnected,
    require_valid,
)

__all__ = [
    "DeformationSummand",
    "RepresentationModel",
    "raw_crimp_dim",
    "tangent_decomposition",
    "feasible_deformation_sets",
    "theta_feasible",
    "s_feasible",
]

SIGN_POSITIVE = "positive"
SIGN_ZERO = "zero"
SIGN_NEGATIVE = "negative"


@dataclass(frozen=True)
class DeformationSummand:
    kind: str  # "sing_deform" | "crimp" | "normalization"
    singularity_id: str
    dim: int
    sign: str


@dataclass(frozen=True)
class RepresentationModel:
    """A torus representation with an invariant closed union of coordinate
    subspaces (the origin is always contained)."""

    weights: tuple
    closed_set: tuple  # tuple of frozensets of coordinate indices

    @staticmethod
    def make(weights, closed_set) -> "RepresentationModel":
        weights = tuple(int(w) for w in weights)
        subsets = []
        for subset in closed_set:
            fs = frozenset(int(i) for i in subset)
            for i in fs:
                if not 0 <= i < len(weights):
                    raise ValueError(f"coordinate index {i} out of range")
            subsets.append(fs)
        return RepresentationModel(weights, tuple(subsets))


def raw_crimp_dim(k: int) -> int:
    """Dimension of the raw crimping space of an A_k singularity, k >= 2."""
    if k < 2:
        raise ValueError("crimping spaces exist for k >= 2")
    h = k // 2
    return h - 1 if k % 2 == 0 else h


def _sign_of(value: int) -> str:
    if value > 0:
        return SIGN_POSITIVE
    if value < 0:
        return SIGN_NEGATIVE
    return SIGN_ZERO


def _opposite(sign: str) -> str:
    if sign == SIGN_POSITIVE:
        return SIGN_NEGATIVE
    if sign == SIGN_NEGATIVE:
        return SIGN_POSITIVE
    return SIGN_ZERO


def _check_assignment(curve, assignment):
    weights = assignment.as_dict()
    for comp in curve.components:
        slots = curve.slots_of(comp.id)
        vals = [weights.get((comp.id, pt), 0) for pt, _ in slots]
        if comp.geometric_genus != 0 or len(slots) >= 3:
            if any(v != 0 for v in vals):
                raise ValueError(f"component {comp.id} must carry zero weights")
        elif len(slots) == 2 and vals[0] != -vals[1]:
            raise ValueError(f"component {comp.id}: two-point weights must be opposite")
    for s in curve.singularities:
        if s.k == 1:
            continue
        vals = [weights.get(b.key(), 0) for b in s.branches]
        if s.equivariant_crimping:
            if s.sing_type.is_odd and vals[0] != vals[1]:
                raise ValueError(f"singularity {s.id}: branch weights must agree")
        elif any(v != 0 for v in vals):
            raise ValueError(f"singularity {s.id}: non-equivariant crimping forces zero")
    return weights


def _tangent_weight(curve, sing, weights):
    if sing.sing_type.is_odd and sing.k >= 3:
        return weights.get(sing.branches[0].key(), 0)
    if sing.k == 1:
        return sum(weights.get(b.key(), 0) for b in sing.branches)
    return weights.get(sing.branches[0].key(), 0)


def _crimp_dims(curve):
    """Crimping dimensions by peeling singularities one at a time in sorted
    order: raw dimension minus the automorphism dimension the crimping
    absorbs."""
    dims = {}
    work, dist = curve, ()
    prev = modelled_aut_dimension(work, dist)
    for sid in sorted(s.id for s in curve.singularities if s.k >= 2):
        k = curve.singularity(sid).k
        work, dist = normalize_keep_disconnected(work, [sid], dist)
        cur = modelled_aut_dimension(work, dist)
        dims[sid] = raw_crimp_dim(k) - (cur - prev)
        prev = cur
    return dims


def _component_moduli(curve):
    """Deformation dimension of the full pointed normalization: sum over
    components of 3g - 3 + #special points + dim Aut."""
    total = 0
    for comp in curve.components:
        slots = curve.slots_of(comp.id)
        piece = DecoratedCurve((comp,), (), ())
        dist = tuple(BranchPoint(comp.id, pt) for pt, _ in slots)
        total += 3 * comp.geometric_genus - 3 + len(slots) + modelled_aut_dimension(piece, dist)
    return total


def tangent_decomposition(curve: DecoratedCurve, assignment) -> list:
    """Signed summands of the deformation space for one weight assignment:
    per singularity with k >= 2 a singularity block (dim k) and a crimping
    block, per node a one-dimensional block, plus the normalization block.
    The dimension identity against 3g - 3 + n + dim Aut0 is verified."""
    require_valid(curve)
    weights = _check_assignment(curve, assignment)
    crimp_dims = _crimp_dims(curve)
    summands = []
    for s in sorted(curve.singularities, key=lambda s: s.id):
        w = _tangent_weight(curve, s, weights)
        if s.k >= 2:
            summands.append(
                DeformationSummand("sing_deform", s.id, s.k, _opposite(_sign_of(w)))
            )
            summands.append(
                DeformationSummand("crimp", s.id, crimp_dims[s.id], _sign_of(w))
            )
        else:
            summands.append(DeformationSummand("sing_deform", s.id, 1, _sign_of(w)))

    g = arithmetic_genus(curve)
    n = len(curve.markings)
    total = 3 * g - 3 + n + modelled_aut_dimension(curve)
    residual = total - sum(s.dim for s in summands)
    expected = _component_moduli(curve)
    if residual != expected:
        raise AssertionError(
            f"dimension bookkeeping inconsistent: residual {residual}, "
            f"normalization moduli {expected}"
        )
    summands.append(DeformationSummand("normalization", "", residual, SIGN_ZERO))
    return summands


# -- simultaneous deformability -------------------------------------------------


def _fm_satisfiable(rows):
    """Whether some real x satisfies row . x <= -1 for every row
    (Fourier-Motzkin over exact rationals)."""
    if not rows:
        return True
    nvars = len(rows[0])
    ineqs = [tuple(Fraction(c) for c in row) + (Fraction(1),) for row in rows]
    for var in range(nvars):
        pos = [q for q in ineqs if q[var] > 0]
        neg = [q for q in ineqs if q[var] < 0]
        keep = [q for q in ineqs if q[var] == 0]
        for p in pos:
            for m in neg:
                lam, mu = -m[var], p[var]
                keep.append(tuple(lam * a + mu * b for a, b in zip(p, m)))
        ineqs = keep
    return all(q[-1] <= 0 for q in ineqs)


def feasible_deformation_sets(curve: DecoratedCurve, r: int) -> list:
    """All sets of worse-than-node singularities that deform simultaneously
    under one isotrivial degeneration with this special fiber: some nonzero
    weight assignment makes every singularity block in the set positive."""
    if not is_stable(curve, r):
        raise ValueError("feasible deformation sets require a stable curve")
    descriptor = aut_identity_component(curve, r, len(curve.markings))
    basis = descriptor.basis
    if not basis:
        return []
    sings = sorted(s.id for s in curve.singularities if s.k >= 2)
    functional = {}
    for sid in sings:
        s = curve.singularity(sid)
        functional[sid] = [
            _tangent_weight(curve, s, a.as_dict()) for a in basis
        ]
    out = []
    for size in range(len(sings) + 1):
        for subset in combinations(sings, size):
            # positive singularity block <=> negative tangent weight
            rows = [functional[sid] for sid in subset]
            if _fm_satisfiable(rows):
                out.append(frozenset(subset))
    return out


# -- abstract feasibility on weighted representation models ----------------------


def _contains_coordinate_subspace(model, coords) -> bool:
    """Whether the closed set contains the span of the given coordinates;
    the origin (empty span) is always contained."""
    if not coords:
        return True
    return any(coords <= subset for subset in model.closed_set)


def theta_feasible(model: RepresentationModel) -> bool:
    """True iff the closed set contains neither the positive-weight span nor
    the zero-weight span."""
    pos = frozenset(i for i, w in enumerate(model.weights) if w > 0)
    zero = frozenset(i for i, w in enumerate(model.weights) if w == 0)
    return not _contains_coordinate_subspace(model, pos) and not _contains_coordinate_subspace(
        model, zero
    )


def s_feasible(model: RepresentationModel) -> bool:
    """True iff the closed set contains neither the positive- nor the
    negative-weight span."""
    pos = frozenset(i for i, w in enumerate(model.weights) if w > 0)
    neg = frozenset(i for i, w in enumerate(model.weights) if w < 0)
    return not _contains_coordinate_subspace(model, pos) and not _contains_coordinate_subspace(
        model, neg
    )
