"""The exact finite model: functions on F_p^n with values in Q(zeta_p).

E and F are both realized as the point set of F_p^n, joined by an invertible
pairing matrix B over F_p. Distributions are dense cyclotomic-valued
functions; the Fourier transform is the direct character sum

    (F d)(y) = sum_x zeta^(<x, y>) d(x),        zeta = primitive p-th root

evaluated exactly. The constrained space of distributions supported in a
union of cosets with Fourier support in another union is computed as an exact
kernel: a modular row-selection pass (over a prime q = 1 mod p) picks a row
basis of the constraint system cheaply, the kernel of those rows is computed
exactly over Q(zeta_p), and every remaining constraint row is then verified
against the kernel, extending the selection until verification passes. The
result is therefore a certified exact kernel regardless of the choice of q.

On a finite point set there is a single space of functions: test functions,
measures, and distributions all coincide, so no dual-space bookkeeping
appears anywhere. Only prime fields are supported; extending the model to
F_{p^k} would need a trace-composed character and is left as an extension
point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .affine import (
    AffineSubspace,
    DualPair,
    E_SIDE,
    F_SIDE,
    opposite,
)
from .arrangement import Arrangement
from .exactalg import (
    Field,
    Matrix,
    Scalar,
    is_prime,
    kernel_basis,
    zeta_pow,
)


def _preselect_prime(p: int) -> int:
    """Smallest prime above 10^6 congruent to 1 mod p (deterministic)."""
    q = 10 ** 6
    q += (1 - q) % p
    while not is_prime(q):
        q += p
    return q


class FiniteSpace:
    """F_p^n with a fixed pairing, point enumeration, and cached tables.

    Points are enumerated lexicographically; index 0 is the origin. The same
    point set serves both sides of the dual pair.
    """

    def __init__(self, p: int, n: int, pairing: Optional[Matrix] = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if n < 0:
            raise ValueError("dimension must be nonnegative")
        self.p = p
        self.n = n
        self.base_field = Field.prime(p)
        self.value_field = Field.cyclotomic(p)
        if pairing is None:
            pairing = Matrix.identity(self.base_field, n)
        self.dual_pair = DualPair(self.base_field, n, pairing)
        self.size = p ** n
        self.points = tuple(itertools.product(range(p), repeat=n))
        self._index = {pt: i for i, pt in enumerate(self.points)}
        self._points_arr = np.array(self.points, dtype=np.int64).reshape(
            self.size, n)
        self._pairing_arr = np.array(
            [[int(v) for v in pairing.row(i)] for i in range(n)],
            dtype=np.int64).reshape(n, n)
        self._pair_table: Optional[np.ndarray] = None
        self._neg_index: Optional[np.ndarray] = None
        self._coset_cache: dict = {}

    def __eq__(self, other):
        return (isinstance(other, FiniteSpace)
                and self.p == other.p and self.n == other.n
                and self.dual_pair == other.dual_pair)

    def __hash__(self):
        return hash((self.p, self.n, self.dual_pair))

    def __repr__(self):
        return f"FiniteSpace(p={self.p}, n={self.n})"

    def index_of(self, point: Sequence[int]) -> int:
        return self._index[tuple(c % self.p for c in point)]

    def pair_table(self) -> np.ndarray:
        """<x_i, y_j> mod p for all point pairs, as an int8 array."""
        if self._pair_table is None:
            pts = self._points_arr
            left = (pts @ self._pairing_arr) % self.p
            table = np.empty((self.size, self.size), dtype=np.int8)
            step = max(1, (1 << 22) // max(self.size, 1))
            for start in range(0, self.size, step):
                block = (left[start:start + step] @ pts.T) % self.p
                table[start:start + step] = block.astype(np.int8)
            self._pair_table = table
        return self._pair_table

    def neg_index(self) -> np.ndarray:
        if self._neg_index is None:
            neg = (-self._points_arr) % self.p
            weights = self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
            self._neg_index = neg @ weights if self.n else np.zeros(1, np.int64)
        return self._neg_index

    def coset_indices(self, aff: AffineSubspace) -> np.ndarray:
        """Sorted point indices of an affine coset (cached)."""
        cached = self._coset_cache.get(aff)
        if cached is not None:
            return cached
        if aff.ambient_dim != self.n:
            raise ValueError("coset does not live in this space")
        k = aff.dim
        base = np.array([int(c) for c in aff.base], dtype=np.int64)
        if k == 0:
            pts = base.reshape(1, self.n)
        else:
            basis = np.array([[int(c) for c in row] for row in aff.linear.basis],
                             dtype=np.int64)
            coeffs = np.array(list(itertools.product(range(self.p), repeat=k)),
                              dtype=np.int64)
            pts = (coeffs @ basis + base) % self.p
        if self.n:
            weights = self.p ** np.arange(self.n - 1, -1, -1, dtype=np.int64)
            idx = np.unique(pts @ weights)
        else:
            idx = np.zeros(1, dtype=np.int64)
        self._coset_cache[aff] = idx
        return idx

    def union_indices(self, arr: Arrangement) -> np.ndarray:
        if arr.is_empty():
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(
            [self.coset_indices(m) for m in arr.members]))

    def pair_exponent(self, x: Sequence[int], y: Sequence[int]) -> int:
        acc = 0
        for i, xi in enumerate(x):
            if xi:
                row = self._pairing_arr[i]
                acc += xi * int(row @ np.array([int(c) for c in y]))
        return acc % self.p


@dataclass(frozen=True)
class Distribution:
    """Dense cyclotomic-valued function on the points of a finite space."""

    space: FiniteSpace
    side: str
    values: tuple

    def __post_init__(self):
        if len(self.values) != self.space.size:
            raise ValueError("value vector length must be p^n")

    def supp(self) -> tuple:
        """Indices of points with nonzero value (recomputed, never stale)."""
        field = self.space.value_field
        return tuple(i for i, v in enumerate(self.values)
                     if not field.is_zero(v))

    def is_zero(self) -> bool:
        field = self.space.value_field
        return all(field.is_zero(v) for v in self.values)

    def __add__(self, other: "Distribution") -> "Distribution":
        self._check_compatible(other)
        field = self.space.value_field
        return Distribution(self.space, self.side, tuple(
            field.add(a, b) for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "Distribution") -> "Distribution":
        self._check_compatible(other)
        field = self.space.value_field
        return Distribution(self.space, self.side, tuple(
            field.sub(a, b) for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "Distribution":
        field = self.space.value_field
        return Distribution(self.space, self.side,
                            tuple(field.neg(v) for v in self.values))

    def scale(self, c) -> "Distribution":
        field = self.space.value_field
        c = coerce_value(field, c)
        return Distribution(self.space, self.side,
                            tuple(field.mul(c, v) for v in self.values))

    def _check_compatible(self, other: "Distribution"):
        if self.space != other.space or self.side != other.side:
            raise ValueError("distributions live on different spaces or sides")


def coerce_value(field: Field, c) -> Scalar:
    """Accept an int, rational, or cyclotomic payload as a scalar value."""
    if isinstance(c, tuple):
        if len(c) != field.degree:
            raise ValueError("cyclotomic payload has wrong length")
        return c
    if isinstance(c, int):
        return field.from_int(c)
    return (mpq(c),) + (mpq(0),) * (field.degree - 1)


def zero_distribution(space: FiniteSpace, side: str) -> Distribution:
    z = space.value_field.zero()
    return Distribution(space, side, (z,) * space.size)


def delta(space: FiniteSpace, side: str, point, value=1) -> Distribution:
    field = space.value_field
    idx = point if isinstance(point, int) else space.index_of(point)
    vals = [field.zero()] * space.size
    vals[idx] = coerce_value(field, value)
    return Distribution(space, side, tuple(vals))


def from_point_values(space: FiniteSpace, side: str, pairs) -> Distribution:
    field = space.value_field
    vals = [field.zero()] * space.size
    for point, value in pairs:
        idx = point if isinstance(point, int) else space.index_of(point)
        vals[idx] = field.add(vals[idx], coerce_value(field, value))
    return Distribution(space, side, tuple(vals))


# -- core transforms -----------------------------------------------------------


def _char_sum(space: FiniteSpace, d: Distribution, sign: int) -> list:
    """sum_t zeta^(sign * <.,.>) d(t) as a dense accumulator list."""
    field = space.value_field
    p, deg = space.p, field.degree
    table = space.pair_table()
    out = [[mpq(0)] * deg for _ in range(space.size)]
    for i in d.supp():
        v = d.values[i]
        shifted = [field.zeta_shift(v, sign * k % p) for k in range(p)]
        row = table[i, :] if d.side == E_SIDE else table[:, i]
        for j, k in enumerate(row.tolist()):
            s = shifted[k]
            o = out[j]
            for t in range(deg):
                c = s[t]
                if c:
                    o[t] += c
    return out


def fourier(d: Distribution) -> Distribution:
    """Exact character-sum Fourier transform onto the opposite side."""
    out = _char_sum(d.space, d, +1)
    return Distribution(d.space, opposite(d.side),
                        tuple(tuple(o) for o in out))


def fourier_inverse(d: Distribution) -> Distribution:
    """Inverse transform: fourier_inverse(fourier(D)) = D exactly."""
    space = d.space
    out = _char_sum(space, d, -1)
    scale = mpq(1, space.size)
    return Distribution(space, opposite(d.side),
                        tuple(tuple(c * scale for c in o) for o in out))


def translate(u: Sequence[int], d: Distribution) -> Distribution:
    """Push-forward of translation by u: values move from x - u to x."""
    space = d.space
    p = space.p
    u = tuple(int(c) % p for c in u)
    if len(u) != space.n:
        raise ValueError("translation vector length mismatch")
    vals = []
    for pt in space.points:
        src = tuple((a - b) % p for a, b in zip(pt, u))
        vals.append(d.values[space.index_of(src)])
    return Distribution(space, d.side, tuple(vals))


def multiplier(u: Sequence[int], d: Distribution) -> Distribution:
    """Pointwise product with the character t -> zeta^(<u, t>).

    ``u`` lives on the side opposite to ``d``; the support is unchanged
    because character values are units.
    """
    space = d.space
    field = space.value_field
    u_arr = np.array([int(c) % space.p for c in u], dtype=np.int64)
    if d.side == F_SIDE:
        w = (u_arr @ space._pairing_arr) % space.p
    else:
        w = (space._pairing_arr @ u_arr) % space.p
    exps = (space._points_arr @ w) % space.p
    vals = [field.zeta_shift(v, int(k)) if not field.is_zero(v) else v
            for v, k in zip(d.values, exps.tolist())]
    return Distribution(space, d.side, tuple(vals))


def character_on(space: FiniteSpace, u: Sequence[int], side: str) -> Distribution:
    """The function t -> zeta^(<u, t>) on the given side (u on the other)."""
    full = Distribution(space, side,
                        (space.value_field.one(),) * space.size)
    return multiplier(u, full)


def twisted_indicator(space: FiniteSpace, aff: AffineSubspace,
                      twist: Sequence[int]) -> Distribution:
    """Character-twisted counting measure on a coset.

    Value zeta^(-<t, y0>) at each point t of the coset (for an E-side coset
    with twist point y0 on the F side), zero elsewhere. For a perfect pair
    (X, Y) and y0 in Y this generates the rigidity space of the pair: its
    transform is supported exactly on y0 + perp(L(X)).
    """
    field = space.value_field
    p = space.p
    idx = space.coset_indices(aff)
    twist_arr = np.array([int(c) % p for c in twist], dtype=np.int64)
    if aff.side == E_SIDE:
        w = (space._pairing_arr @ twist_arr) % p
    else:
        w = (twist_arr @ space._pairing_arr) % p
    exps = (-(space._points_arr[idx] @ w)) % p
    vals = [field.zero()] * space.size
    for i, k in zip(idx.tolist(), exps.tolist()):
        vals[i] = zeta_pow(field, k)
    return Distribution(space, aff.side, tuple(vals))


def restrict(d: Distribution, aff: AffineSubspace) -> Distribution:
    """Keep values on the coset, zero elsewhere."""
    space = d.space
    if aff.side != d.side:
        raise ValueError("coset side does not match the distribution")
    keep = set(space.coset_indices(aff).tolist())
    zero = space.value_field.zero()
    vals = tuple(v if i in keep else zero for i, v in enumerate(d.values))
    return Distribution(space, d.side, vals)


def restrict_to_arrangement(d: Distribution, arr: Arrangement) -> Distribution:
    space = d.space
    keep = set(space.union_indices(arr).tolist())
    zero = space.value_field.zero()
    vals = tuple(v if i in keep else zero for i, v in enumerate(d.values))
    return Distribution(space, d.side, vals)


def supported_in(d: Distribution, arr: Arrangement) -> bool:
    """True when every nonzero value sits inside the union of the family."""
    allowed = set(d.space.union_indices(arr).tolist())
    return all(i in allowed for i in d.supp())


def in_constrained_space(space: FiniteSpace, d: Distribution,
                         xs: Arrangement, ys: Arrangement,
                         d_hat: Optional[Distribution] = None) -> bool:
    if not supported_in(d, xs):
        return False
    if d_hat is None:
        d_hat = fourier(d)
    return supported_in(d_hat, ys)


# -- the brute-force constrained-space oracle -----------------------------------


def _modular_row_basis(mat: np.ndarray, q: int) -> list:
    """Indices of a row basis of ``mat`` over F_q, in elimination order."""
    work = mat % q
    nrows, ncols = work.shape
    order = np.arange(nrows)
    piv = 0
    selected = []
    for col in range(ncols):
        if piv >= nrows:
            break
        nz = np.nonzero(work[piv:, col])[0]
        if nz.size == 0:
            continue
        r = piv + int(nz[0])
        if r != piv:
            work[[piv, r]] = work[[r, piv]]
            order[[piv, r]] = order[[r, piv]]
        inv = pow(int(work[piv, col]), -1, q)
        work[piv] = (work[piv] * inv) % q
        below = work[piv + 1:, col]
        mask = below != 0
        if mask.any():
            work[piv + 1:][mask] = (
                work[piv + 1:][mask] - np.outer(below[mask], work[piv])) % q
        selected.append(int(order[piv]))
        piv += 1
    return selected


def _shift_accumulate(acc: list, payload: tuple, k: int, p: int, deg: int):
    # acc += zeta^k * payload, in place
    for i, c in enumerate(payload):
        if c == 0:
            continue
        e = (i + k) % p
        if e < deg:
            acc[e] += c
        else:
            for t in range(deg):
                acc[t] -= c


def _row_annihilates(field: Field, exps, vec: list, p: int, deg: int) -> bool:
    acc = [mpq(0)] * deg
    for k, payload in zip(exps, vec):
        if payload is not None:
            _shift_accumulate(acc, payload, k, p, deg)
    return all(c == 0 for c in acc)


def space_basis(space: FiniteSpace, xs: Arrangement,
                ys: Arrangement) -> tuple[int, list]:
    """Exact basis of the distributions supported in the union of ``xs``
    whose Fourier transform is supported in the union of ``ys``.

    Unknowns are the values on the points of the ``xs`` union (everything
    else is forced to zero); one constraint row per point outside the ``ys``
    union. Returns the kernel dimension and a list of basis distributions on
    the ``xs`` side. Every returned vector satisfies both support conditions
    exactly; the empty arrangement yields the zero space.
    """
    if ys.side != opposite(xs.side):
        raise ValueError("ys must live on the side dual to xs")
    field = space.value_field
    p, deg = space.p, field.degree
    var_idx = space.union_indices(xs)
    s = len(var_idx)
    if s == 0:
        return 0, []
    y_allowed = set(space.union_indices(ys).tolist())
    constraint_idx = np.array(
        [j for j in range(space.size) if j not in y_allowed], dtype=np.int64)

    table = space.pair_table()
    if xs.side == E_SIDE:
        exps = table[np.ix_(var_idx, constraint_idx)].T.astype(np.int64)
    else:
        exps = table[np.ix_(constraint_idx, var_idx)].astype(np.int64)
    nrows = exps.shape[0]

    if nrows == 0:
        kernel = kernel_basis(Matrix.from_rows(field, [], cols=s))
        return s, _embed_kernel(space, xs.side, var_idx, kernel)

    q = _preselect_prime(p)
    g = _order_p_element(p, q)
    powers = np.array([pow(g, k, q) for k in range(p)], dtype=np.int64)
    selected = _modular_row_basis(powers[exps], q)

    selected_set = set(selected)
    while True:
        rows = [[zeta_pow(field, int(k)) for k in exps[r]] for r in selected]
        kernel = kernel_basis(Matrix.from_rows(field, rows, cols=s))
        if not kernel:
            return 0, []
        sparse = [
            [v if not field.is_zero(v) else None for v in vec]
            for vec in kernel
        ]
        bad = None
        for r in range(nrows):
            if r in selected_set:
                continue
            row_exps = exps[r].tolist()
            for vec in sparse:
                if not _row_annihilates(field, row_exps, vec, p, deg):
                    bad = r
                    break
            if bad is not None:
                break
        if bad is None:
            return len(kernel), _embed_kernel(space, xs.side, var_idx, kernel)
        selected.append(bad)
        selected_set.add(bad)


def _order_p_element(p: int, q: int) -> int:
    if p == 2:
        return q - 1
    e = (q - 1) // p
    h = 2
    while True:
        g = pow(h, e, q)
        if g != 1:
            return g
        h += 1


def _embed_kernel(space: FiniteSpace, side: str, var_idx: np.ndarray,
                  kernel: list) -> list:
    field = space.value_field
    zero = field.zero()
    out = []
    for vec in kernel:
        vals = [zero] * space.size
        for pos, idx in enumerate(var_idx.tolist()):
            vals[idx] = vec[pos]
        out.append(Distribution(space, side, tuple(vals)))
    return out
