"""Exhaustive enumeration of stable combinatorial types at small (g, n, r).

Types are generated by component count, genus vector, connected incidence
multigraph (edges = odd singularities, loops allowed), severity
assignments, even-singularity placements, marking placements and decoration
variants, then filtered by validity and stability and deduplicated by
canonical form.  Decoration coverage follows the catalog policy: crimping
flags all-true plus the all-false variant, and hyperelliptic role variants
on components whose regime consults them.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .canonical import canonical_form
from .curve import (
    BranchPoint,
    Component,
    DecoratedCurve,
    Marking,
    SingularityType,
    Singularity,
    conjugate_role,
    ROLE_FREE,
    ROLE_WEIERSTRASS,
    is_prestable,
    is_stable,
    validate,
)

__all__ = ["ResourceBoundError", "enumerate_types"]


class ResourceBoundError(RuntimeError):
    """The enumeration exceeded its candidate budget."""


@lru_cache(maxsize=None)
def _partitions_up_to(total, cap):
    """Partitions of every value <= total with parts <= cap, parts
    non-increasing."""
    out = [()]
    stack = [((), total, cap)]
    while stack:
        prefix, rem, c = stack.pop()
        for part in range(1, min(rem, c) + 1):
            nxt = prefix + (part,)
            out.append(nxt)
            stack.append((nxt, rem - part, part))
    return tuple(sorted(set(out)))


def _genus_vectors(g, c):
    for vec in itertools.product(range(g + 1), repeat=c):
        if sum(vec) <= g:
            yield vec


@lru_cache(maxsize=None)
def _connected_multigraphs(c, e):
    """Edge multisets ((u, v) with u <= v, sorted) of connected multigraphs
    on c vertices with e edges; vertices appear in first-use order."""
    results = []

    def non_loop_components(edges):
        parent = list(range(c))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        return len({find(v) for v in range(c)})

    def rec(edges, used_max):
        if len(edges) == e:
            if used_max == c - 1 and non_loop_components(edges) == 1:
                results.append(tuple(edges))
            return
        remaining = e - len(edges)
        # connectivity and coverage must still be achievable
        if used_max < c - 1 and remaining < (c - 1 - used_max):
            return
        last = edges[-1] if edges else (0, -1)
        for u in range(min(used_max + 1, c - 1) + 1):
            for v in range(u, min(max(used_max + 1, u + 1), c - 1) + 1):
                if (u, v) < last:
                    continue
                if max(u, v) > used_max + 1:
                    continue
                edges.append((u, v))
                rec(edges, max(used_max, u, v))
                edges.pop()

    if c == 1:
        return (tuple((0, 0) for _ in range(e)),)
    rec([], 0)
    return tuple(results)


def _severity_assignments(edges, budget, max_k):
    """Severity per edge, identical parallel edges non-increasing."""
    mults = tuple(len(list(grp)) for _, grp in itertools.groupby(edges))
    return _severity_assignments_cached(mults, budget, max_k)


@lru_cache(maxsize=None)
def _severity_assignments_cached(mults, budget, max_k):
    if not mults:
        return ((),)
    out = []
    head, rest = mults[0], mults[1:]
    for parts in _bounded_multisets(head, min(budget, max_k)):
        for tail in _severity_assignments_cached(rest, budget - sum(parts), max_k):
            out.append(parts + tail)
    return tuple(out)


@lru_cache(maxsize=None)
def _bounded_multisets(count, cap):
    """Non-increasing tuples of the given length with entries in 0..cap."""
    if count == 0:
        return ((),)
    out = []
    for first in range(cap, -1, -1):
        for rest in _bounded_multisets(count - 1, first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _partitions_exact(total, cap):
    """Partitions of exactly ``total`` with parts in 1..cap."""
    if total == 0:
        return ((),)
    out = []
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions_exact(total - first, first):
            out.append((first,) + rest)
    return tuple(out)


def _even_placements(c, budget, max_h, mins):
    """Per-component multisets of even severities h >= 1 totaling budget,
    with the component sums bounded below by ``mins``."""
    if sum(mins) > budget:
        return

    def rec(i, rem):
        if i == c - 1:
            if rem >= mins[i]:
                for p in _partitions_exact(rem, max_h):
                    yield (p,)
            return
        tail_min = sum(mins[i + 1 :])
        for s in range(mins[i], rem - tail_min + 1):
            for p in _partitions_exact(s, max_h):
                for rest in rec(i + 1, rem - s):
                    yield (p,) + rest

    yield from rec(0, budget)


def _role_variants(curve):
    """Decoration variants for components whose role regime consults
    decorations (positive geometric genus, arithmetic contribution >= 2),
    over the slots patterns actually inspect: attachment branches and
    markings."""
    from .patterns import _external_slots, component_arithmetic_genus

    per_comp = []
    for comp in curve.components:
        arith = component_arithmetic_genus(curve, comp.id)
        if comp.geometric_genus == 0 or arith <= 1:
            per_comp.append([None])
            continue
        slots = sorted(pt for _, _, _, pt in _external_slots(curve, [comp.id]))
        variants = [None]
        if arith >= 3:
            variants.append({})  # bare hyperelliptic marker
        variants.extend(_slot_role_maps(slots, comp.id))
        if arith == 2:
            # undecorated already means hyperelliptic with free slots
            variants = [v for v in variants if v != {pt: ROLE_FREE for pt in slots}]
        per_comp.append(variants)
    for chosen in itertools.product(*per_comp):
        yield chosen


def _slot_role_maps(slots, comp_id):
    """All role maps over the given slots: disjoint conjugate pairs plus
    weierstrass/free on the rest."""
    if not slots:
        return []
    out = []
    for pairs in _pairings(tuple(sorted(slots))):
        singles = [pt for pt in slots if all(pt not in pr for pr in pairs)]
        for wf in itertools.product((ROLE_WEIERSTRASS, ROLE_FREE), repeat=len(singles)):
            roles = {}
            for i, pr in enumerate(pairs):
                role = conjugate_role(f"{comp_id}p{i}")
                roles[pr[0]] = role
                roles[pr[1]] = role
            roles.update(dict(zip(singles, wf)))
            out.append(roles)
    return out


def _pairings(slots):
    """All sets of disjoint unordered pairs (possibly empty)."""
    out = [()]
    for size in range(1, len(slots) // 2 + 1):
        for combo in itertools.combinations(itertools.combinations(slots, 2), size):
            flat = [pt for pr in combo for pt in pr]
            if len(set(flat)) == len(flat):
                out.append(combo)
    return out


def enumerate_types(g, n, r, max_components, *, decorations=True, max_candidates=5_000_000):
    """All stable types with the given invariants up to isomorphism, as a
    sorted dict canonical key -> curve.  With ``decorations=False`` only the
    all-equivariant undecorated representative of each structure is emitted
    (sufficient for decoration-independent statistics such as the genus)."""
    if 3 * g - 3 + n < 0:
        raise ValueError("3g-3+n must be nonnegative")
    if r < 1:
        raise ValueError("r must be positive")
    found = {}
    budget = [max_candidates]
    max_odd_k = (r - 1) // 2
    max_even_h = r // 2
    for c in range(1, max_components + 1):
        for genera in _genus_vectors(g, c):
            rem_after_genus = g - sum(genera)
            min_e = 0 if c == 1 else c - 1
            for e in range(min_e, (c - 1) + rem_after_genus + 1):
                b1 = e - c + 1
                if b1 < 0 or b1 > rem_after_genus:
                    continue
                sev_budget = rem_after_genus - b1
                for edges in _connected_multigraphs(c, e):
                    for odd_ks in _severity_assignments(edges, sev_budget, max_odd_k):
                        even_budget = sev_budget - sum(odd_ks)
                        base_deg = [2 * g0 - 2 for g0 in genera]
                        for (u, v), k in zip(edges, odd_ks):
                            base_deg[u] += k + 1
                            base_deg[v] += k + 1
                        total_need = sum(max(0, 1 - d) for d in base_deg)
                        if total_need > n + 2 * even_budget:
                            continue
                        for marks in itertools.product(range(c), repeat=n):
                            deg = list(base_deg)
                            for ci in marks:
                                deg[ci] += 1
                            mins = tuple(max(0, 1 - d + 1) // 2 for d in deg)
                            for evens in _even_placements(c, even_budget, max_even_h, mins):
                                _emit(
                                    found,
                                    budget,
                                    genera,
                                    edges,
                                    odd_ks,
                                    evens,
                                    marks,
                                    r,
                                    decorations,
                                )
    return dict(sorted(found.items()))


def _stable_precheck(genera, edges, odd_ks, evens, marks):
    """Per-component degree of the log-dualizing bundle, from the raw data."""
    deg = [2 * g0 - 2 for g0 in genera]
    for (u, v), k in zip(edges, odd_ks):
        deg[u] += k + 1
        deg[v] += k + 1
    for i, heights in enumerate(evens):
        deg[i] += 2 * sum(heights)
    for ci in marks:
        deg[ci] += 1
    return all(d > 0 for d in deg)


def _emit(found, budget, genera, edges, odd_ks, evens, marks, r, decorations):
    # curves built here are valid, prestable and stable by construction
    base = _build_curve(genera, edges, odd_ks, evens, marks)
    if not decorations:
        budget[0] -= 1
        if budget[0] < 0:
            raise ResourceBoundError("enumeration candidate budget exceeded")
        found.setdefault(canonical_form(base), base)
        return
    flag_options = [True]
    if any(s.k >= 2 for s in base.singularities):
        flag_options.append(False)
    for flag in flag_options:
        flagged = _with_flags(base, flag)
        for chosen in _role_variants(flagged):
            budget[0] -= 1
            if budget[0] < 0:
                raise ResourceBoundError("enumeration candidate budget exceeded")
            comps = tuple(
                Component(comp.id, comp.geometric_genus, roles)
                for comp, roles in zip(flagged.components, chosen)
            )
            curve = DecoratedCurve(comps, flagged.singularities, flagged.markings)
            key = canonical_form(curve)
            found.setdefault(key, curve)


def _build_curve(genera, edges, odd_ks, evens, marks):
    comps = tuple(Component(f"c{i}", genus) for i, genus in enumerate(genera))
    sings = []
    for j, ((u, v), k) in enumerate(zip(edges, odd_ks)):
        sings.append(
            Singularity(
                f"s{j}",
                SingularityType(2 * k + 1),
                (BranchPoint(f"c{u}", f"e{j}a"), BranchPoint(f"c{v}", f"e{j}b")),
                True,
            )
        )
    t = len(edges)
    for i,部 in enumerate(evens):
        for h in 部:
            sings.append(
                Singularity(
                    f"s{t}",
                    SingularityType(2 * h),
                    (BranchPoint(f"c{i}", f"v{t}"),),
                    True,
                )
            )
            t += 1
    markings = tuple(
        Marking(j + 1, BranchPoint(f"c{ci}", f"m{j}")) for j, ci in enumerate(marks)
    )
    return DecoratedCurve(comps, tuple(sings), markings)


def _with_flags(curve, flag):
    sings = tuple(
        Singularity(s.id, s.sing_type, s.branches, flag if s.k >= 2 else True)
        for s in curve.singularities
    )
    return DecoratedCurve(curve.components, sings, curve.markings)
