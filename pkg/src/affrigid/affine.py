"""Dual pairs, linear and affine subspaces, and the pair classification.

A dual pair is a pair of coordinate spaces of equal dimension n joined by an
invertible pairing matrix B, with <x, y> = x^T B y for x on the E side and y
on the F side. Subspaces are kept in canonical reduced-echelon form and affine
cosets carry a canonical base point (zero at the pivot coordinates of the
linear part), so set equality is structural equality throughout.

A pair (X, Y) of affine subspaces is classified by the relative position of
perp(L(X)) and L(Y): properly contained means thick, equal means perfect, not
contained means thin.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .exactalg import Field, Matrix, Scalar, kernel_basis, rref, solve_affine

E_SIDE = "E"
F_SIDE = "F"


def opposite(side: str) -> str:
    return F_SIDE if side == E_SIDE else E_SIDE


class PairClass(enum.Enum):
    THIN = "Thin"
    PERFECT = "Perfect"
    THICK = "Thick"


@dataclass(frozen=True)
class LinearSubspace:
    """Subspace of a coordinate space, basis rows in reduced echelon form."""

    field: Field
    ambient_dim: int
    basis: tuple  # tuple of row tuples, canonical rref of any generating set

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.ambient_dim

    def pivots(self) -> tuple:
        field = self.field
        out = []
        for row in self.basis:
            for c, x in enumerate(row):
                if not field.is_zero(x):
                    out.append(c)
                    break
        return tuple(out)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return all(self.field.is_zero(x) for x in self.reduce(v))

    def reduce(self, v: Sequence[Scalar]) -> tuple:
        """Residue of v modulo this subspace: pivot coordinates eliminated."""
        field = self.field
        v = list(v)
        for row, piv in zip(self.basis, self.pivots()):
            c = v[piv]
            if field.is_zero(c):
                continue
            for i in range(piv, self.ambient_dim):
                v[i] = field.sub(v[i], field.mul(c, row[i]))
        return tuple(v)


def linear_span(field: Field, vectors: Iterable[Sequence[Scalar]],
                ambient_dim: int) -> LinearSubspace:
    """Canonical subspace spanned by the vectors; empty input gives zero."""
    vecs = [tuple(v) for v in vectors]
    for v in vecs:
        if len(v) != ambient_dim:
            raise ValueError("generator length does not match ambient dimension")
    if not vecs:
        return LinearSubspace(field, ambient_dim, ())
    res = rref(Matrix.from_rows(field, vecs))
    rows = tuple(res.echelon.row(i) for i in range(res.rank))
    return LinearSubspace(field, ambient_dim, rows)


def zero_subspace(field: Field, n: int) -> LinearSubspace:
    return LinearSubspace(field, n, ())


def full_subspace(field: Field, n: int) -> LinearSubspace:
    return linear_span(field, Matrix.identity(field, n).row_list(), n)


def subspace_sum(a: LinearSubspace, b: LinearSubspace) -> LinearSubspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return linear_span(a.field, list(a.basis) + list(b.basis), a.ambient_dim)


def subspace_intersection(a: LinearSubspace, b: LinearSubspace) -> LinearSubspace:
    """Canonical intersection, via the kernel of [A^T | -B^T]."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    field, n = a.field, a.ambient_dim
    if a.is_zero() or b.is_zero():
        return zero_subspace(field, n)
    ka, kb = a.dim, b.dim
    rows = []
    for i in range(n):
        row = [a.basis[r][i] for r in range(ka)]
        row += [field.neg(b.basis[r][i]) for r in range(kb)]
        rows.append(row)
    gens = []
    for v in kernel_basis(Matrix.from_rows(field, rows)):
        vec = [field.zero()] * n
        for r in range(ka):
            coef = v[r]
            if field.is_zero(coef):
                continue
            for i in range(n):
                vec[i] = field.add(vec[i], field.mul(coef, a.basis[r][i]))
        gens.append(vec)
    return linear_span(field, gens, n)


def subspace_contains(outer: LinearSubspace, inner: LinearSubspace) -> bool:
    return all(outer.contains(row) for row in inner.basis)


@dataclass(frozen=True)
class AffineSubspace:
    """Coset base + linear with the canonical coset representative as base."""

    side: str
    base: tuple
    linear: LinearSubspace

    @property
    def ambient_dim(self) -> int:
        return self.linear.ambient_dim

    @property
    def dim(self) -> int:
        return self.linear.dim

    def is_linear(self) -> bool:
        return all(self.linear.field.is_zero(x) for x in self.base)


def affine_subspace(side: str, base: Sequence[Scalar],
                    linear: LinearSubspace) -> AffineSubspace:
    """Coset with the base point reduced to its canonical representative."""
    if len(base) != linear.ambient_dim:
        raise ValueError("base point length does not match ambient dimension")
    if side not in (E_SIDE, F_SIDE):
        raise ValueError(f"side must be {E_SIDE!r} or {F_SIDE!r}")
    return AffineSubspace(side, linear.reduce(base), linear)


def affine_from_gens(field: Field, side: str, base: Sequence[Scalar],
                     gens: Iterable[Sequence[Scalar]], n: int) -> AffineSubspace:
    return affine_subspace(side, base, linear_span(field, gens, n))


def affine_point(field: Field, side: str, v: Sequence[Scalar]) -> AffineSubspace:
    return affine_subspace(side, v, zero_subspace(field, len(v)))


def affine_full(field: Field, side: str, n: int) -> AffineSubspace:
    return affine_subspace(side, [field.zero()] * n, full_subspace(field, n))


def affine_translate(u: Sequence[Scalar], x: AffineSubspace) -> AffineSubspace:
    """The coset u + x, canonicalized."""
    field = x.linear.field
    if len(u) != x.ambient_dim:
        raise ValueError("translation vector length mismatch")
    base = [field.add(a, b) for a, b in zip(u, x.base)]
    return affine_subspace(x.side, base, x.linear)


def affine_contains(x: AffineSubspace, v: Sequence[Scalar]) -> bool:
    field = x.linear.field
    if len(v) != x.ambient_dim:
        raise ValueError("vector length mismatch")
    diff = [field.sub(a, b) for a, b in zip(v, x.base)]
    return x.linear.contains(diff)


def affine_contains_affine(outer: AffineSubspace, inner: AffineSubspace) -> bool:
    return (subspace_contains(outer.linear, inner.linear)
            and affine_contains(outer, inner.base))


def affine_intersection(x1: AffineSubspace,
                        x2: AffineSubspace) -> Optional[AffineSubspace]:
    """Coset intersection; None when the cosets are disjoint."""
    if x1.side != x2.side or x1.ambient_dim != x2.ambient_dim:
        raise ValueError("sides or ambient dimensions differ")
    field, n = x1.linear.field, x1.ambient_dim
    k1, k2 = x1.dim, x2.dim
    # Solve base1 + t . basis1 = base2 + s . basis2 for (t, s).
    cols = []
    for r in range(k1):
        cols.append(x1.linear.basis[r])
    for r in range(k2):
        cols.append(tuple(field.neg(c) for c in x2.linear.basis[r]))
    mat = Matrix.from_rows(field,
                           [[col[i] for col in cols] for i in range(n)],
                           cols=k1 + k2)
    rhs = tuple(field.sub(a, b) for a, b in zip(x2.base, x1.base))
    sol = solve_affine(mat, rhs)
    if sol is None:
        return None
    point = list(x1.base)
    for r in range(k1):
        c = sol[r]
        if field.is_zero(c):
            continue
        for i in range(n):
            point[i] = field.add(point[i], field.mul(c, x1.linear.basis[r][i]))
    return affine_subspace(x1.side,
                           point,
                           subspace_intersection(x1.linear, x2.linear))


def affine_difference(x1: AffineSubspace, x2: AffineSubspace) -> AffineSubspace:
    """The coset of all differences u - v with u in x1 and v in x2."""
    if x1.side != x2.side or x1.ambient_dim != x2.ambient_dim:
        raise ValueError("sides or ambient dimensions differ")
    field = x1.linear.field
    base = [field.sub(a, b) for a, b in zip(x1.base, x2.base)]
    return affine_subspace(x1.side, base,
                           subspace_sum(x1.linear, x2.linear))


@dataclass(frozen=True)
class DualPair:
    """Two coordinate spaces of dimension n with an invertible pairing B."""

    field: Field
    dim: int
    pairing: Matrix

    def __post_init__(self):
        if self.pairing.rows != self.dim or self.pairing.cols != self.dim:
            raise ValueError("pairing matrix shape does not match dimension")
        if rref(self.pairing).rank != self.dim:
            raise ValueError("pairing matrix is singular")

    def pair(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        field = self.field
        acc = field.zero()
        for i, xi in enumerate(x):
            if field.is_zero(xi):
                continue
            row = self.pairing.row(i)
            for j, yj in enumerate(y):
                if field.is_zero(yj):
                    continue
                acc = field.add(acc, field.mul(xi, field.mul(row[j], yj)))
        return acc


def identity_pair(field: Field, n: int) -> DualPair:
    return DualPair(field, n, Matrix.identity(field, n))


def perp(dp: DualPair, l: LinearSubspace, side: str) -> LinearSubspace:
    """Orthogonal complement on the opposite side, in canonical form."""
    field, n = dp.field, dp.dim
    if l.ambient_dim != n:
        raise ValueError("subspace does not live in this dual pair")
    if l.is_zero():
        return full_subspace(field, n)
    b = dp.pairing if side == E_SIDE else dp.pairing.transpose()
    rows = []
    for basis_row in l.basis:
        row = []
        for j in range(n):
            acc = field.zero()
            for i, xi in enumerate(basis_row):
                if not field.is_zero(xi):
                    acc = field.add(acc, field.mul(xi, b.entries[i * n + j]))
            row.append(acc)
        rows.append(row)
    return linear_span(field, kernel_basis(Matrix.from_rows(field, rows)), n)


def classify_linear(dp: DualPair, lx: LinearSubspace,
                    ly: LinearSubspace) -> PairClass:
    """Classification from the linear parts alone."""
    p = perp(dp, lx, E_SIDE)
    if p.basis == ly.basis:
        return PairClass.PERFECT
    if subspace_contains(ly, p):
        return PairClass.THICK
    return PairClass.THIN


def classify_pair(dp: DualPair, x: AffineSubspace,
                  y: AffineSubspace) -> PairClass:
    """Thin, perfect, or thick relative position of an (E, F) coset pair."""
    if x.side != E_SIDE or y.side != F_SIDE:
        raise ValueError("classify_pair expects an E-side x and an F-side y")
    return classify_linear(dp, x.linear, y.linear)
