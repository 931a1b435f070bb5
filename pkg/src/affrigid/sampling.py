"""Seeded random generators for spaces, arrangements, and distributions.

Used by the property suite and the experiment scripts. Everything is driven
by an explicit ``random.Random`` instance so runs are reproducible.
"""

from __future__ import annotations

import random
from typing import Optional

from gmpy2 import mpq

from .affine import (
    AffineSubspace,
    E_SIDE,
    F_SIDE,
    LinearSubspace,
    PairClass,
    affine_subspace,
    classify_pair,
    linear_span,
    perp,
)
from .arrangement import Arrangement, has_thick_pair
from .finitemodel import Distribution, FiniteSpace, zero_distribution


def random_linear_subspace(rng: random.Random, space: FiniteSpace,
                           dim: int) -> LinearSubspace:
    field = space.base_field
    while True:
        gens = [tuple(rng.randrange(space.p) for _ in range(space.n))
                for _ in range(dim)]
        sub = linear_span(field, gens, space.n)
        if sub.dim == dim:
            return sub


def random_affine(rng: random.Random, space: FiniteSpace, side: str,
                  dim: int) -> AffineSubspace:
    lin = random_linear_subspace(rng, space, dim)
    base = tuple(rng.randrange(space.p) for _ in range(space.n))
    return affine_subspace(side, base, lin)


def _member_dim(rng: random.Random, space: FiniteSpace) -> int:
    # keep coset unions small on big spaces so the oracle stays fast
    if space.size > 400:
        return rng.choice([0, 0, 1, 1, 1])
    if space.n >= 2:
        return rng.choice([0, 1, 1] + ([2] if space.n >= 2 else []))
    return rng.choice([0, 0, 1])


def random_admissible_arrangements(
        rng: random.Random, space: FiniteSpace,
        max_x: int = 3, max_y: int = 3,
        perfect_bias: float = 0.75,
        max_attempts: int = 200) -> tuple[Arrangement, Arrangement]:
    """A thick-free pair of nonempty arrangements, biased toward containing
    perfect pairs (each X member gets a perp-matched Y coset with the given
    probability)."""
    dp = space.dual_pair
    for _ in range(max_attempts):
        xs_members = []
        for _ in range(rng.randrange(1, max_x + 1)):
            m = random_affine(rng, space, E_SIDE, _member_dim(rng, space))
            if m not in xs_members:
                xs_members.append(m)
        ys_members = []
        for m in xs_members:
            if rng.random() < perfect_bias:
                y = affine_subspace(
                    F_SIDE,
                    tuple(rng.randrange(space.p) for _ in range(space.n)),
                    perp(dp, m.linear, E_SIDE))
                if y not in ys_members:
                    ys_members.append(y)
        while len(ys_members) < max_y and rng.random() < 0.3:
            y = random_affine(rng, space, F_SIDE, _member_dim(rng, space))
            if y not in ys_members:
                ys_members.append(y)
        if not ys_members:
            continue

        # drop thick participants until the hypothesis holds
        changed = True
        while changed and xs_members and ys_members:
            changed = False
            for x in list(xs_members):
                for y in list(ys_members):
                    if classify_pair(dp, x, y) is PairClass.THICK:
                        if rng.random() < 0.5 and len(xs_members) > 1:
                            xs_members.remove(x)
                        else:
                            ys_members.remove(y)
                        changed = True
                        break
                if changed:
                    break
        if not xs_members or not ys_members:
            continue
        xs = Arrangement.of(E_SIDE, xs_members, warn_nested=False)
        ys = Arrangement.of(F_SIDE, ys_members, warn_nested=False)
        if has_thick_pair(dp, xs, ys) is None:
            return xs, ys
    raise RuntimeError("failed to sample an admissible arrangement")


def random_everywhere_thin_member(rng: random.Random, space: FiniteSpace,
                                  ys: Arrangement,
                                  max_dim: int = 1,
                                  max_attempts: int = 200
                                  ) -> Optional[AffineSubspace]:
    """A member that is thin against every member of ``ys``."""
    dp = space.dual_pair
    for _ in range(max_attempts):
        m = random_affine(rng, space, E_SIDE, rng.randrange(max_dim + 1))
        if all(classify_pair(dp, m, y) is PairClass.THIN for y in ys):
            return m
    return None


def random_space_member(rng: random.Random, space: FiniteSpace,
                        basis: list) -> Distribution:
    """A random rational combination of the given basis distributions."""
    field = space.value_field
    if not basis:
        return zero_distribution(space, E_SIDE)
    out = zero_distribution(space, basis[0].side)
    for b in basis:
        c = mpq(rng.randrange(-3, 4))
        if c != 0:
            out = out + b.scale(c)
    return out


def random_cyclotomic_values(rng: random.Random, space: FiniteSpace,
                             side: str, density: float = 0.6) -> Distribution:
    """A distribution with independent small random cyclotomic values."""
    field = space.value_field
    vals = []
    for _ in range(space.size):
        if rng.random() < density:
            vals.append(tuple(mpq(rng.randrange(-3, 4))
                              for _ in range(field.degree)))
        else:
            vals.append(field.zero())
    return Distribution(space, side, tuple(vals))
