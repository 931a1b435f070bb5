"""JSON (de)serialization for configs, subspaces, and distributions.

Wire formats:

* rationals: ``"num/den"`` strings (plain ints accepted on input)
* prime-field scalars: plain ints
* cyclotomic values: arrays of ``p - 1`` rational strings
* matrices and vectors: row-major nested arrays of scalars
* affine subspaces: ``{"base": [...], "gens": [[...], ...]}``
* distributions: ``{"entries": [{"point": [...], "value": [...]}]}``

Canonicalization happens at parse time: subspace generators are reduced to
echelon form and coset base points to their canonical representatives, so
``parse(serialize(x)) == x`` for every object produced here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .affine import (
    AffineSubspace,
    DualPair,
    E_SIDE,
    F_SIDE,
    affine_subspace,
    linear_span,
)
from .arrangement import Arrangement
from .errors import InputError
from .exactalg import Field, Matrix
from .finitemodel import Distribution, FiniteSpace


def parse_field(obj) -> Field:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("field must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "Q":
        return Field.rationals()
    if kind == "Fp":
        p = obj.get("p")
        if not isinstance(p, int):
            raise InputError("Fp field needs an integer prime 'p'")
        try:
            return Field.prime(p)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"unknown field kind {kind!r}")


def field_to_json(field: Field) -> dict:
    if field.kind == "Q":
        return {"kind": "Q"}
    return {"kind": "Fp", "p": field.p}


def parse_vector(field: Field, obj, n: int) -> tuple:
    if not isinstance(obj, list) or len(obj) != n:
        raise InputError(f"vector must be a list of length {n}: {obj!r}")
    try:
        return tuple(field.parse_scalar(x) for x in obj)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def vector_to_json(field: Field, v) -> list:
    return [field.format_scalar(x) for x in v]


def parse_matrix(field: Field, obj, n: int) -> Matrix:
    if not isinstance(obj, list) or len(obj) != n:
        raise InputError(f"matrix must have {n} rows")
    rows = [parse_vector(field, row, n) for row in obj]
    return Matrix.from_rows(field, rows, cols=n)


def matrix_to_json(m: Matrix) -> list:
    return [vector_to_json(m.field, m.row(i)) for i in range(m.rows)]


def parse_affine(field: Field, side: str, obj, n: int) -> AffineSubspace:
    if not isinstance(obj, dict):
        raise InputError("subspace must be an object with 'base' and 'gens'")
    base = parse_vector(field, obj.get("base", [0] * n), n)
    gens_obj = obj.get("gens", [])
    if not isinstance(gens_obj, list):
        raise InputError("'gens' must be a list of vectors")
    gens = [parse_vector(field, g, n) for g in gens_obj]
    return affine_subspace(side, base, linear_span(field, gens, n))


def affine_to_json(field: Field, aff: AffineSubspace) -> dict:
    return {
        "base": vector_to_json(field, aff.base),
        "gens": [vector_to_json(field, row) for row in aff.linear.basis],
    }


def parse_arrangement(field: Field, side: str, obj, n: int) -> Arrangement:
    if not isinstance(obj, list):
        raise InputError("arrangement must be a list of subspaces")
    return Arrangement.of(side, [parse_affine(field, side, o, n) for o in obj])


def arrangement_to_json(field: Field, arr: Arrangement) -> list:
    return [affine_to_json(field, m) for m in arr.members]


def parse_distribution(space: FiniteSpace, obj, side: str = E_SIDE
                       ) -> Distribution:
    if not isinstance(obj, dict) or "entries" not in obj:
        raise InputError("distribution must be an object with 'entries'")
    cyc = space.value_field
    vals = [cyc.zero()] * space.size
    for entry in obj["entries"]:
        if not isinstance(entry, dict):
            raise InputError("distribution entries must be objects")
        point = parse_vector(space.base_field, entry.get("point"), space.n)
        try:
            value = cyc.parse_scalar(entry.get("value"))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        idx = space.index_of(point)
        vals[idx] = cyc.add(vals[idx], value)
    return Distribution(space, side, tuple(vals))


def distribution_to_json(d: Distribution) -> dict:
    cyc = d.space.value_field
    entries = []
    for i in d.supp():
        entries.append({
            "point": list(d.space.points[i]),
            "value": cyc.format_scalar(d.values[i]),
        })
    return {"entries": entries}


@dataclass
class JobConfig:
    """Parsed input document: field, pairing, both arrangements, and an
    optional distribution (prime-field mode only)."""

    field: Field
    dim: int
    pairing: Matrix
    xs: Arrangement
    ys: Arrangement
    distribution: Optional[Distribution] = None

    def is_prime_mode(self) -> bool:
        return self.field.kind == "Fp"

    def space(self) -> FiniteSpace:
        if not self.is_prime_mode():
            raise InputError("this command needs a prime-field configuration")
        return FiniteSpace(self.field.p, self.dim, self.pairing)

    def dual_pair(self) -> DualPair:
        return DualPair(self.field, self.dim, self.pairing)


def parse_config(obj) -> JobConfig:
    if not isinstance(obj, dict):
        raise InputError("input document must be a JSON object")
    field = parse_field(obj.get("field"))
    n = obj.get("dim")
    if not isinstance(n, int) or n < 0:
        raise InputError("'dim' must be a nonnegative integer")
    pairing = parse_matrix(field, obj.get("pairing"), n)
    try:
        dp = DualPair(field, n, pairing)
    except ValueError as exc:
        raise InputError(f"invalid pairing: {exc}") from exc
    xs = parse_arrangement(field, E_SIDE, obj.get("X", []), n)
    ys = parse_arrangement(field, F_SIDE, obj.get("Y", []), n)
    distribution = None
    if obj.get("distribution") is not None:
        if field.kind != "Fp":
            raise InputError("distributions need a prime-field configuration")
        space = FiniteSpace(field.p, n, pairing)
        distribution = parse_distribution(space, obj["distribution"])
    return JobConfig(field, n, dp.pairing, xs, ys, distribution)


def config_to_json(config: JobConfig) -> dict:
    out = {
        "field": field_to_json(config.field),
        "dim": config.dim,
        "pairing": matrix_to_json(config.pairing),
        "X": arrangement_to_json(config.field, config.xs),
        "Y": arrangement_to_json(config.field, config.ys),
    }
    if config.distribution is not None:
        out["distribution"] = distribution_to_json(config.distribution)
    return out
