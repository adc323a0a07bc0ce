"""GIT of binary forms of degree 2g+2.

A double cover of the line of genus g is cut out by a binary form of degree
2g+2; only the multiplicity profile of its roots (a partition of 2g+2)
matters for semistability.  A profile is semistable iff no root has
multiplicity above g+1 and stable iff none reaches g+1; a root of
multiplicity m >= 2 corresponds to an A_{m-1}-singularity on the cover.
Open loci are modeled as upward-closed sets of profiles in the coarsening
order (colliding roots coarsen the profile).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .curve import SingularityType

__all__ = [
    "MultiplicityProfile",
    "all_profiles",
    "is_semistable",
    "is_stable",
    "singularity_profile",
    "coarsens",
    "refinement_covers",
    "is_upward_closed",
    "admits_gms",
    "max_multiplicity_locus",
    "fh_weight_split",
    "hyperelliptic_stack_dims",
]


@dataclass(frozen=True)
class MultiplicityProfile:
    """Root multiplicities of a degree-(2g+2) binary form."""

    parts: tuple
    g: int

    @staticmethod
    def make(parts, g) -> "MultiplicityProfile":
        parts = tuple(sorted((int(p) for p in parts), reverse=True))
        if not parts or any(p < 1 for p in parts):
            raise ValueError("profile parts must be positive integers")
        if sum(parts) != 2 * g + 2:
            raise ValueError(f"profile parts must sum to 2g+2 = {2 * g + 2}")
        return MultiplicityProfile(parts, g)

    @property
    def max_part(self) -> int:
        return self.parts[0]


@lru_cache(maxsize=None)
def _partitions(total, cap):
    if total == 0:
        return ((),)
    out = []
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions(total - first, first):
            out.append((first,) + rest)
    return tuple(out)


def all_profiles(g) -> list:
    """Every multiplicity profile for genus g, coarsest first."""
    total = 2 * g + 2
    return [MultiplicityProfile(p, g) for p in _partitions(total, total)]


def is_semistable(profile: MultiplicityProfile) -> bool:
    return profile.max_part <= profile.g + 1


def is_stable(profile: MultiplicityProfile) -> bool:
    return profile.max_part <= profile.g


def singularity_profile(profile: MultiplicityProfile) -> list:
    """Singularity types of the double cover: a root of multiplicity m >= 2
    gives an A_{m-1}-singularity.  The full-degree profile is the
    non-reduced cover and is rejected."""
    if profile.max_part >= 2 * profile.g + 2:
        raise ValueError("a root of full multiplicity gives a non-reduced cover")
    return sorted(
        (SingularityType(m - 1) for m in profile.parts if m >= 2),
        key=lambda t: t.k,
        reverse=True,
    )


def coarsens(pi: MultiplicityProfile, rho: MultiplicityProfile) -> bool:
    """Whether ``pi`` is obtained from ``rho`` by merging parts (i.e. ``rho``
    refines ``pi``); the partial order of the profile poset, coarse <= fine."""
    if pi.g != rho.g:
        raise ValueError("profiles of different genus")
    return _can_group(tuple(sorted(rho.parts, reverse=True)), tuple(sorted(pi.parts, reverse=True)))


@lru_cache(maxsize=None)
def _can_group(fine, coarse):
    """Whether the multiset ``fine`` can be partitioned into groups summing
    to the entries of ``coarse``."""
    if not coarse:
        return not fine
    target, rest = coarse[0], coarse[1:]
    fine = list(fine)

    def pick(idx, remaining, chosen):
        if remaining == 0:
            left = [p for i, p in enumerate(fine) if i not in chosen]
            return _can_group(tuple(sorted(left, reverse=True)), rest)
        prev = None
        for i in range(idx, len(fine)):
            if i in chosen or fine[i] > remaining or fine[i] == prev:
                continue
            chosen.add(i)
            if pick(i + 1, remaining - fine[i], chosen):
                chosen.remove(i)
                return True
            chosen.remove(i)
            prev = fine[i]
        return False

    return pick(0, target, set())


def refinement_covers(profile: MultiplicityProfile) -> list:
    """Profiles obtained by splitting one part in two (one step finer)."""
    out = set()
    for i, p in enumerate(profile.parts):
        if p < 2:
            continue
        rest = profile.parts[:i] + profile.parts[i + 1 :]
        for a in range(1, p // 2 + 1):
            out.add(MultiplicityProfile.make(rest + (a, p - a), profile.g))
    return sorted(out, key=lambda q: q.parts)


def is_upward_closed(profiles, g) -> bool:
    """Whether the set is open: closed under refining any member."""
    pset = set(profiles)
    for p in pset:
        if p.g != g:
            raise ValueError("profile of wrong genus in the set")
        for q in refinement_covers(p):
            if q not in pset:
                return False
    return True


def max_multiplicity_locus(g, m) -> list:
    """The open set of profiles with all multiplicities <= m."""
    return [p for p in all_profiles(g) if p.max_part <= m]


def admits_gms(profiles, g) -> bool:
    """Whether the open set of profiles admits a separated good moduli
    space: it sits inside the stable locus, or inside the semistable locus
    while containing the entire strictly semistable stratum."""
    pset = set(profiles)
    if not is_upward_closed(pset, g):
        raise ValueError("the profile set is not upward-closed (not open)")
    if not pset:
        return True
    maxpart = max(p.max_part for p in pset)
    if maxpart <= g:
        return True
    if maxpart <= g + 1:
        strictly = {p for p in all_profiles(g) if p.max_part == g + 1}
        return strictly <= pset
    return False


def fh_weight_split(g, h):
    """Dimensions of the two opposite-sign weight blocks of the deformation
    space at the two-root form with multiplicities (h, 2g+2-h)."""
    if not 1 <= h <= g + 1:
        raise ValueError(f"h must satisfy 1 <= h <= g+1, got {h}")
    return (h - 1, 2 * g + 1 - h)


def hyperelliptic_stack_dims(g, kind) -> int:
    """Ambient affine dimension of the one-pointed hyperelliptic loci: 2g-1
    over a Weierstrass marking, 2g+1 over a moving pair."""
    if g < 1:
        raise ValueError("g must be at least 1")
    if kind == "weierstrass":
        return 2 * g - 1
    if kind == "g12":
        return 2 * g + 1
    raise ValueError(f"unknown kind {kind!r}")
