"""Finite families of affine subspaces on one side of a dual pair.

Provides the admissibility scan (no thick pair), perfect-pair enumeration,
pruning of members that are thin against the whole other side, grouping by
linear part, and the deterministic pick of the next linear-part block for the
recursive decomposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

from .affine import (
    AffineSubspace,
    LinearSubspace,
    DualPair,
    PairClass,
    affine_contains_affine,
    affine_intersection,
    classify_linear,
    classify_pair,
    perp,
    E_SIDE,
)
from .errors import HypothesisViolated


@dataclass(frozen=True)
class Arrangement:
    """Deduplicated, order-preserving family of same-side affine subspaces."""

    side: str
    members: tuple

    @staticmethod
    def of(side: str, members, warn_nested: bool = True) -> "Arrangement":
        seen = []
        for m in members:
            if m.side != side:
                raise ValueError(f"member on side {m.side!r} in a {side!r} family")
            if seen and m.ambient_dim != seen[0].ambient_dim:
                raise ValueError("members have mixed ambient dimensions")
            if m not in seen:
                seen.append(m)
        arr = Arrangement(side, tuple(seen))
        if warn_nested:
            nested = arr._nested_members()
            if nested:
                warnings.warn(
                    f"arrangement has nested members (kept as given): {nested}",
                    stacklevel=2,
                )
        return arr

    def _nested_members(self):
        out = []
        for i, a in enumerate(self.members):
            for j, b in enumerate(self.members):
                if i != j and affine_contains_affine(b, a):
                    out.append((i, j))
        return out

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def is_empty(self) -> bool:
        return not self.members

    def without(self, member: AffineSubspace) -> "Arrangement":
        return Arrangement(self.side,
                           tuple(m for m in self.members if m != member))


def has_thick_pair(dp: DualPair, xs: Arrangement,
                   ys: Arrangement) -> Optional[tuple]:
    """First thick pair in input order, or None."""
    for x in xs:
        for y in ys:
            if classify_pair(dp, x, y) is PairClass.THICK:
                return (x, y)
    return None


def perfect_pairs(dp: DualPair, xs: Arrangement, ys: Arrangement) -> list:
    return [(x, y) for x in xs for y in ys
            if classify_pair(dp, x, y) is PairClass.PERFECT]


def prune_thin(dp: DualPair, xs: Arrangement,
               ys: Arrangement) -> tuple[Arrangement, Arrangement]:
    """Drop members that are thin against every member of the other side."""
    keep_x = [x for x in xs
              if any(classify_pair(dp, x, y) is not PairClass.THIN for y in ys)]
    keep_y = [y for y in ys
              if any(classify_pair(dp, x, y) is not PairClass.THIN for x in xs)]
    return (Arrangement(xs.side, tuple(keep_x)),
            Arrangement(ys.side, tuple(keep_y)))


def group_by_linear_part(xs: Arrangement) -> dict:
    """Partition into translate families, keyed by canonical linear part."""
    groups: dict[LinearSubspace, list] = {}
    for m in xs:
        groups.setdefault(m.linear, []).append(m)
    return groups


def _basis_sort_key(l: LinearSubspace):
    return tuple(tuple(row) for row in l.basis)


def induction_pick(dp: DualPair, xs: Arrangement,
                   ys: Arrangement) -> Optional[tuple]:
    """Next linear-part block: largest-dimension L(X), with perp as its partner.

    Requires a pre-pruned, thick-free input. Verifies that every member
    outside the chosen blocks is thin against them; with the
    largest-dimension pick this is implied by the absence of thick pairs, so
    a failure signals an internal bug.
    """
    if xs.is_empty():
        return None
    parts = list(group_by_linear_part(xs).keys())
    parts.sort(key=lambda l: (-l.dim, _basis_sort_key(l)))
    x0 = parts[0]
    y0 = perp(dp, x0, E_SIDE)
    for x in xs:
        if x.linear != x0:
            if classify_linear(dp, x.linear, y0) is not PairClass.THIN:
                raise HypothesisViolated(
                    f"member {x} is not thin against the chosen block")
    for y in ys:
        if y.linear != y0:
            if classify_linear(dp, x0, y.linear) is not PairClass.THIN:
                raise HypothesisViolated(
                    f"member {y} is not thin against the chosen block")
    return (x0, y0)


def meet_family(xs0: Arrangement, xs_other: Arrangement) -> Arrangement:
    """All nonempty pairwise coset intersections, deduplicated."""
    if xs0.side != xs_other.side:
        raise ValueError("meet_family needs same-side arrangements")
    met = []
    for a in xs0:
        for b in xs_other:
            got = affine_intersection(a, b)
            if got is not None:
                met.append(got)
    return Arrangement.of(xs0.side, met, warn_nested=False)
