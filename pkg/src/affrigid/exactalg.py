"""Exact scalar and matrix arithmetic over Q, F_p, and Q(zeta_p).

Scalars are plain payloads tagged by a shared :class:`Field` descriptor:

* rationals       -> ``gmpy2.mpq`` (always in lowest terms, positive denominator)
* prime field F_p -> ``int`` in ``[0, p)``
* cyclotomic      -> tuple of ``p - 1`` rationals, coordinates in the power
  basis ``{1, zeta, ..., zeta^(p-2)}`` reduced modulo
  ``Phi_p(zeta) = 1 + zeta + ... + zeta^(p-1)``

Everything here is exact and deterministic: no floating point, no tolerances.
Equality of scalars is structural equality of canonical payloads, so matrices
and subspaces built from them can be compared and hashed directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

Scalar = object  # mpq | int | tuple[mpq, ...] depending on the field

_MPQ_ZERO = mpq(0)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """Descriptor of one of the three supported exact fields.

    ``kind`` is "Q", "Fp", or "cyclotomic"; ``p`` is the prime for the latter
    two. All scalar operations live here so that payloads stay plain values.
    """

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Q", "Fp", "cyclotomic"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "Q":
            if self.p is not None:
                raise ValueError("rational field takes no prime")
        else:
            if self.p is None or not is_prime(self.p):
                raise ValueError(f"{self.p!r} is not prime")

    @staticmethod
    def rationals() -> "Field":
        return Field("Q")

    @staticmethod
    def prime(p: int) -> "Field":
        return Field("Fp", p)

    @staticmethod
    def cyclotomic(p: int) -> "Field":
        return Field("cyclotomic", p)

    @property
    def degree(self) -> int:
        """Dimension over Q of the cyclotomic field (p - 1)."""
        if self.kind != "cyclotomic":
            raise ValueError("degree only defined for cyclotomic fields")
        return self.p - 1

    # -- scalar constructors -------------------------------------------------

    def zero(self) -> Scalar:
        if self.kind == "Q":
            return mpq(0)
        if self.kind == "Fp":
            return 0
        return (mpq(0),) * self.degree

    def one(self) -> Scalar:
        if self.kind == "Q":
            return mpq(1)
        if self.kind == "Fp":
            return 1
        return (mpq(1),) + (mpq(0),) * (self.degree - 1)

    def from_int(self, k: int) -> Scalar:
        if self.kind == "Q":
            return mpq(k)
        if self.kind == "Fp":
            return k % self.p
        return (mpq(k),) + (mpq(0),) * (self.degree - 1)

    def from_rational(self, q) -> Scalar:
        q = mpq(q)
        if self.kind == "Q":
            return q
        if self.kind == "Fp":
            num, den = int(q.numerator), int(q.denominator)
            return num * pow(den, -1, self.p) % self.p
        return (q,) + (mpq(0),) * (self.degree - 1)

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "cyclotomic":
            return tuple(x + y for x, y in zip(a, b))
        if self.kind == "Fp":
            return (a + b) % self.p
        return a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "cyclotomic":
            return tuple(x - y for x, y in zip(a, b))
        if self.kind == "Fp":
            return (a - b) % self.p
        return a - b

    def neg(self, a: Scalar) -> Scalar:
        if self.kind == "cyclotomic":
            return tuple(-x for x in a)
        if self.kind == "Fp":
            return (-a) % self.p
        return -a

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        if self.kind == "cyclotomic":
            return self._cyc_mul(a, b)
        if self.kind == "Fp":
            return (a * b) % self.p
        return a * b

    def inv(self, a: Scalar) -> Scalar:
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Q":
            return 1 / a
        if self.kind == "Fp":
            return pow(a, -1, self.p)
        return self._cyc_inv(a)

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def is_zero(self, a: Scalar) -> bool:
        if self.kind == "cyclotomic":
            return all(x == 0 for x in a)
        return a == 0

    # -- cyclotomic internals --------------------------------------------------

    def _cyc_reduce(self, coeffs: list) -> tuple:
        # Reduce a coefficient list of length <= 2p-3 modulo Phi_p, using
        # zeta^p = 1 and zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
        p, d = self.p, self.degree
        out = list(coeffs[:d]) + [mpq(0)] * (d - len(coeffs[:d]))
        for e in range(d, len(coeffs)):
            c = coeffs[e]
            if c == 0:
                continue
            r = e % p
            if r < d:
                out[r] += c
            else:
                for i in range(d):
                    out[i] -= c
        return tuple(out)

    def _cyc_mul(self, a: Sequence, b: Sequence) -> tuple:
        # Fused convolution and Phi_p reduction: accumulate on exponents
        # 0..p-1 (i + j < 2p - 2 needs one conditional fold), then fold the
        # zeta^(p-1) slot into -(1 + zeta + ... + zeta^(p-2)).
        p, d = self.p, self.degree
        acc = [_MPQ_ZERO] * p
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj != 0:
                    e = i + j
                    if e >= p:
                        e -= p
                    acc[e] += ai * bj
        top = acc[d]
        if top:
            return tuple(acc[t] - top for t in range(d))
        return tuple(acc[:d])

    def _cyc_inv(self, a: Sequence) -> tuple:
        # Extended Euclid in Q[x] against Phi_p; gcd is a nonzero constant.
        phi = [mpq(1)] * self.p
        r0, s0 = phi, [mpq(0)]
        r1 = list(a)
        while r1 and r1[-1] == 0:
            r1.pop()
        s1 = [mpq(1)]
        while True:
            if len(r1) == 1:
                c = r1[0]
                return self._cyc_reduce([x / c for x in s1])
            q, r = _poly_divmod(r0, r1)
            s = _poly_sub(s0, _poly_mul(q, s1))
            r0, s0, r1, s1 = r1, s1, r, s

    def zeta_shift(self, a: Sequence, k: int) -> tuple:
        """Multiply a cyclotomic payload by zeta^k (k mod p); O(p), no products."""
        p, d = self.p, self.degree
        k %= p
        if k == 0:
            return tuple(a)
        out = [mpq(0)] * d
        for i, c in enumerate(a):
            if c == 0:
                continue
            e = (i + k) % p
            if e < d:
                out[e] += c
            else:
                for t in range(d):
                    out[t] -= c
        return tuple(out)

    # -- serialization -------------------------------------------------------

    def format_scalar(self, a: Scalar):
        if self.kind == "Q":
            return f"{a.numerator}/{a.denominator}"
        if self.kind == "Fp":
            return int(a)
        return [f"{c.numerator}/{c.denominator}" for c in a]

    def parse_scalar(self, obj) -> Scalar:
        if self.kind == "Q":
            return parse_rational(obj)
        if self.kind == "Fp":
            if isinstance(obj, str):
                q = parse_rational(obj)
                return self.from_rational(q)
            if not isinstance(obj, int) or isinstance(obj, bool):
                raise ValueError(f"not an F_{self.p} scalar: {obj!r}")
            return obj % self.p
        if not isinstance(obj, (list, tuple)) or len(obj) != self.degree:
            raise ValueError(
                f"cyclotomic scalar must be a list of {self.degree} rationals"
            )
        return tuple(parse_rational(c) for c in obj)


def parse_rational(obj) -> mpq:
    """Parse an exact rational from an int or a 'num/den' string."""
    if isinstance(obj, bool):
        raise ValueError(f"not a rational: {obj!r}")
    if isinstance(obj, int):
        return mpq(obj)
    if isinstance(obj, str):
        try:
            return mpq(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {obj!r}") from exc
    raise ValueError(f"not a rational: {obj!r}")


def zeta_pow(field: Field, k: int) -> Scalar:
    """Canonical payload of zeta^k in the cyclotomic field, k taken mod p."""
    if field.kind != "cyclotomic":
        raise ValueError("zeta_pow needs a cyclotomic field")
    p, d = field.p, field.degree
    k %= p
    if k < d:
        out = [mpq(0)] * d
        out[k] = mpq(1)
        return tuple(out)
    return (mpq(-1),) * d


def cyc_mul(field: Field, x: Scalar, y: Scalar) -> Scalar:
    """Product of two cyclotomic payloads, reduced modulo Phi_p."""
    if field.kind != "cyclotomic":
        raise ValueError("cyc_mul needs a cyclotomic field")
    return field.mul(x, y)


# -- dense polynomial helpers over Q (for the cyclotomic inverse) -------------


def _poly_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a: list, b: list) -> list:
    out = [mpq(0)] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _poly_trim(out)

def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _poly_trim(out)

def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    q = [mpq(0)] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    while len(a) >= len(b):
        c = a[-1] * inv_lead
        k = len(a) - len(b)
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
        _poly_trim(a)
        if not a:
            break
    return _poly_trim(q), a


# -- matrices ------------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with row-major payload entries."""

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @staticmethod
    def from_rows(field: Field, rows: Iterable[Iterable[Scalar]],
                  cols: Optional[int] = None) -> "Matrix":
        rows = [tuple(r) for r in rows]
        if rows:
            cols = len(rows[0])
            if any(len(r) != cols for r in rows):
                raise ValueError("ragged rows")
        elif cols is None:
            raise ValueError("empty matrix needs an explicit column count")
        flat = tuple(itertools.chain.from_iterable(rows))
        return Matrix(field, len(rows), cols, flat)

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        zero, one = field.zero(), field.one()
        ent = tuple(one if i == j else zero for i in range(n) for j in range(n))
        return Matrix(field, n, n, ent)

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_list(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        ent = tuple(self.entries[r * self.cols + c]
                    for c in range(self.cols) for r in range(self.rows))
        return Matrix(self.field, self.cols, self.rows, ent)


@dataclass(frozen=True)
class RrefResult:
    echelon: Matrix
    rank: int
    pivots: tuple


def _rref_rows(field: Field, rows: list) -> tuple[list, list]:
    """In-place reduced row echelon form; returns (rows, pivot column list).

    Deterministic policy: leftmost pivot column, topmost nonzero row, pivot
    normalized to one, full elimination above and below.
    """
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    piv_row = 0
    for col in range(ncols):
        sel = None
        for r in range(piv_row, len(rows)):
            if not field.is_zero(rows[r][col]):
                sel = r
                break
        if sel is None:
            continue
        rows[piv_row], rows[sel] = rows[sel], rows[piv_row]
        mul, sub, is_zero = field.mul, field.sub, field.is_zero
        inv = field.inv(rows[piv_row][col])
        if not is_zero(sub(inv, field.one())):
            row = rows[piv_row]
            for c in range(col, ncols):
                row[c] = mul(inv, row[c])
        src = rows[piv_row]
        src_nonzero = [(c, src[c]) for c in range(col, ncols)
                       if not is_zero(src[c])]
        for r in range(len(rows)):
            if r == piv_row:
                continue
            factor = rows[r][col]
            if is_zero(factor):
                continue
            dst = rows[r]
            for c, s in src_nonzero:
                dst[c] = sub(dst[c], mul(factor, s))
        pivots.append(col)
        piv_row += 1
        if piv_row == len(rows):
            break
    return rows, pivots


def rref(m: Matrix) -> RrefResult:
    """Unique reduced row-echelon form with rank and pivot columns."""
    rows, pivots = _rref_rows(m.field, m.row_list())
    ech = Matrix.from_rows(m.field, rows, cols=m.cols)
    return RrefResult(ech, len(pivots), tuple(pivots))


def kernel_basis(m: Matrix) -> list:
    """Canonical basis of the right null space, one vector per free column."""
    res = rref(m)
    return kernel_from_rref(m.field, res.echelon.row_list()[:res.rank],
                            list(res.pivots), m.cols)


def kernel_from_rref(field: Field, pivot_rows: list, pivots: list,
                     ncols: int) -> list:
    zero = field.zero()
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [zero] * ncols
        vec[free] = field.one()
        for i, col in enumerate(pivots):
            vec[col] = field.neg(pivot_rows[i][free])
        basis.append(tuple(vec))
    return basis


def solve_affine(a: Matrix, b: Sequence[Scalar]) -> Optional[tuple]:
    """One solution of ``a . x = b`` with free variables pinned to zero.

    Returns None when the system is inconsistent.
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    field = a.field
    rows = [list(a.row(i)) + [b[i]] for i in range(a.rows)]
    rows, pivots = _rref_rows(field, rows)
    if a.cols in pivots:
        return None
    x = [field.zero()] * a.cols
    for i, col in enumerate(pivots):
        x[col] = rows[i][a.cols]
    return tuple(x)


def mat_vec(m: Matrix, v: Sequence[Scalar]) -> tuple:
    field = m.field
    out = []
    for i in range(m.rows):
        acc = field.zero()
        row = m.row(i)
        for c, vc in zip(row, v):
            acc = field.add(acc, field.mul(c, vc))
        out.append(acc)
    return tuple(out)


def vec_mat(v: Sequence[Scalar], m: Matrix) -> tuple:
    field = m.field
    out = [field.zero()] * m.cols
    for i, vi in enumerate(v):
        if field.is_zero(vi):
            continue
        row = m.row(i)
        for j in range(m.cols):
            out[j] = field.add(out[j], field.mul(vi, row[j]))
    return tuple(out)
