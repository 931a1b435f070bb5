"""Command-line surface.

Subcommands: classify | check | dim | decompose | family | demo. One JSON
input document (see serialize) feeds every command; ``--format json``
switches the report to a machine-readable document containing every number
the text mode prints.

Exit codes: 0 success, 1 hypothesis violated (a thick pair exists),
2 avoiding-family search failed, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .affine import E_SIDE, F_SIDE, PairClass, classify_pair
from .arrangement import Arrangement, has_thick_pair, perfect_pairs
from .errors import (
    FamilyNotFound,
    InputError,
    ModelTooSmall,
    SupportViolation,
    ThickPairPresent,
)
from .exactalg import Field, Matrix
from .finitemodel import (
    FiniteSpace,
    fourier,
    space_basis,
    supported_in,
    twisted_indicator,
)
from .rigidity import (
    DEFAULT_BUDGET,
    decompose,
    find_avoiding_family,
    find_avoiding_family_rationals,
)
from .serialize import (
    JobConfig,
    affine_to_json,
    arrangement_to_json,
    distribution_to_json,
    field_to_json,
    parse_config,
    vector_to_json,
)

EXIT_OK = 0
EXIT_THICK = 1
EXIT_FAMILY = 2
EXIT_INVALID = 3

DEFAULT_CAP = 3000


def _load_config(path: str) -> JobConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config(doc)


def _emit(report: dict, fmt: str, render) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2))
    else:
        render(report)


def _class_label(c: PairClass) -> str:
    return c.value


def cmd_classify(config: JobConfig, args) -> int:
    dp = config.dual_pair()
    matrix = []
    witnesses = {"thick": [], "perfect": [], "thin": []}
    for i, x in enumerate(config.xs):
        row = []
        for j, y in enumerate(config.ys):
            c = classify_pair(dp, x, y)
            row.append(_class_label(c))
            witnesses[c.value.lower()].append([i, j])
        matrix.append(row)
    report = {
        "command": "classify",
        "field": field_to_json(config.field),
        "dim": config.dim,
        "classes": matrix,
        "witnesses": witnesses,
        "perfect_pairs": witnesses["perfect"],
    }

    def render(rep):
        print(f"pair classification ({len(config.xs)} x {len(config.ys)}):")
        for i, row in enumerate(rep["classes"]):
            print(f"  X[{i}]: " + "  ".join(
                f"Y[{j}]={label}" for j, label in enumerate(row)))
        print(f"perfect pairs: {rep['perfect_pairs']}")

    _emit(report, args.format, render)
    return EXIT_OK


def cmd_check(config: JobConfig, args) -> int:
    if not config.is_prime_mode():
        raise InputError("check needs a prime-field configuration")
    dp = config.dual_pair()
    witness = has_thick_pair(dp, config.xs, config.ys)
    if witness is not None:
        i = config.xs.members.index(witness[0])
        j = config.ys.members.index(witness[1])
        report = {
            "command": "check",
            "admissible": False,
            "witness": [i, j],
        }
        _emit(report, args.format,
              lambda rep: print(f"thick pair present: X[{i}] x Y[{j}]"))
        return EXIT_THICK
    perfect = perfect_pairs(dp, config.xs, config.ys)
    pairs = [[config.xs.members.index(x), config.ys.members.index(y)]
             for x, y in perfect]
    report = {
        "command": "check",
        "admissible": True,
        "witness": None,
        "perfect_pairs": pairs,
        "predicted_dimension": len(perfect),
    }

    def render(rep):
        print("admissible: no thick pair")
        print(f"perfect pairs: {rep['perfect_pairs']}")
        print(f"predicted dimension: {rep['predicted_dimension']}")

    _emit(report, args.format, render)
    return EXIT_OK


def cmd_dim(config: JobConfig, args) -> int:
    if not config.is_prime_mode():
        raise InputError("dim needs a prime-field configuration")
    if config.field.p ** config.dim > args.cap:
        raise InputError(
            f"p^n = {config.field.p ** config.dim} exceeds the cap {args.cap}")
    space = config.space()
    dp = space.dual_pair
    dimension, basis = space_basis(space, config.xs, config.ys)
    admissible = has_thick_pair(dp, config.xs, config.ys) is None
    predicted = (len(perfect_pairs(dp, config.xs, config.ys))
                 if admissible else None)
    report = {
        "command": "dim",
        "dimension": dimension,
        "admissible": admissible,
        "predicted_dimension": predicted,
        "matches_prediction": (dimension == predicted
                               if predicted is not None else None),
    }
    if args.basis:
        report["basis"] = [distribution_to_json(b) for b in basis]

    def render(rep):
        print(f"dimension: {rep['dimension']}")
        if rep["predicted_dimension"] is not None:
            print(f"predicted (perfect pairs): {rep['predicted_dimension']}"
                  f" -> {'match' if rep['matches_prediction'] else 'MISMATCH'}")
        else:
            print("not admissible (thick pair present); no prediction")
        if args.basis:
            print(f"basis: {len(rep['basis'])} vectors "
                  f"(see --format json for values)")

    _emit(report, args.format, render)
    return EXIT_OK


def _family_to_json(config: JobConfig, fam) -> dict:
    return {
        "members": [affine_to_json(config.field, y) for y in fam.ys],
        "vectors": [list(u) for u in fam.vectors],
        "m": fam.m,
        "forbidden": [affine_to_json(config.field, f) for f in fam.forbidden],
    }


def cmd_family(config: JobConfig, args) -> int:
    forbidden = list(config.xs.members)
    if config.is_prime_mode():
        space = config.space()
        try:
            fam = find_avoiding_family(space, config.ys, forbidden=forbidden,
                                       budget=args.budget, seed=args.seed)
        except FamilyNotFound as exc:
            report = {
                "command": "family",
                "found": False,
                "exhausted": exc.exhausted,
                "message": str(exc),
            }
            _emit(report, args.format,
                  lambda rep: print(f"no family: {rep['message']}"))
            return EXIT_FAMILY
        report = {
            "command": "family",
            "found": True,
            "family": _family_to_json(config, fam),
            "verified_combinations": 2 ** len(fam.ys) - 1,
        }
    else:
        dp = config.dual_pair()
        try:
            vectors = find_avoiding_family_rationals(
                dp, list(config.ys.members), forbidden)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        report = {
            "command": "family",
            "found": True,
            "family": {
                "members": arrangement_to_json(config.field, config.ys),
                "vectors": [vector_to_json(config.field, v) for v in vectors],
                "m": 1,
            },
            "verified_combinations": 2 ** len(config.ys) - 1,
        }

    def render(rep):
        print("avoiding family found:")
        for member, vec in zip(rep["family"]["members"],
                               rep["family"]["vectors"]):
            print(f"  u = {vec} for member with base {member['base']}")
        print(f"verified nonzero 0/1 combinations: "
              f"{rep['verified_combinations']}")

    _emit(report, args.format, render)
    return EXIT_OK


def _transcript_to_json(config: JobConfig, result) -> list:
    steps = []
    for step in result.transcript:
        fam = step.block.family
        steps.append({
            "level": step.level,
            "x0_basis": [vector_to_json(config.field, row)
                         for row in step.x0.basis],
            "y0_basis": [vector_to_json(config.field, row)
                         for row in step.y0.basis],
            "block_members": [affine_to_json(config.field, m)
                              for m in step.xs0],
            "family_vectors": [list(u) for u in fam.vectors],
            "constants": [list(map(str, c)) for _, c in step.block.constants],
            "expansion": [{"pattern": list(a), "coefficient": list(map(str, c))}
                          for a, c in step.block.expansion],
            "c0": list(map(str, step.block.c_zero)),
            "translate_count": step.block.translate_count,
            "pairs_resolved": len(step.pairs),
        })
    return steps


def cmd_decompose(config: JobConfig, args) -> int:
    if not config.is_prime_mode():
        raise InputError("decompose needs a prime-field configuration")
    if config.distribution is None:
        raise InputError("decompose needs a 'distribution' in the input")
    space = config.space()
    try:
        result = decompose(space, config.distribution, config.xs, config.ys,
                           budget=args.budget, seed=args.seed)
    except ThickPairPresent as exc:
        x, y = exc.witness
        i = config.xs.members.index(x)
        j = config.ys.members.index(y)
        report = {"command": "decompose", "error": "thick pair",
                  "witness": [i, j]}
        _emit(report, args.format,
              lambda rep: print(f"thick pair present: X[{i}] x Y[{j}]"))
        return EXIT_THICK
    except ModelTooSmall as exc:
        report = {"command": "decompose", "error": "model too small",
                  "p": exc.p, "detail": exc.detail}
        _emit(report, args.format, lambda rep: print(str(exc)))
        return EXIT_FAMILY
    except SupportViolation as exc:
        raise InputError(
            f"distribution is not in the constrained space: {exc}") from exc

    components = []
    for (x, y), comp in result.components.items():
        components.append({
            "x": affine_to_json(config.field, x),
            "y": affine_to_json(config.field, y),
            "x_index": config.xs.members.index(x),
            "y_index": config.ys.members.index(y),
            "distribution": distribution_to_json(comp),
            "supported_in_x": supported_in(comp, Arrangement(E_SIDE, (x,))),
            "transform_supported_in_y": supported_in(
                fourier(comp), Arrangement(F_SIDE, (y,))),
        })
    report = {
        "command": "decompose",
        "components": components,
        "residual_zero": result.residual.is_zero(),
        "perfect_pair_count": len(result.perfect),
        "transcript": _transcript_to_json(config, result),
    }

    def render(rep):
        print(f"decomposition into {len(rep['components'])} perfect-pair "
              f"components (residual zero: {rep['residual_zero']}):")
        for c in rep["components"]:
            support = len(c["distribution"]["entries"])
            print(f"  (X[{c['x_index']}], Y[{c['y_index']}]): "
                  f"{support} support points")
        for step in rep["transcript"]:
            print(f"  level {step['level']}: block of dimension "
                  f"{len(step['x0_basis'])}, family {step['family_vectors']}, "
                  f"{step['pairs_resolved']} pairs resolved")

    _emit(report, args.format, render)
    return EXIT_OK


def _quadratic_demo_config() -> JobConfig:
    # split quadratic space: hyperbolic plane (e1, e2) plus a definite
    # 2-dimensional block (e3, e4); the isotropic line is e1
    field = Field.rationals()
    one, zero = field.one(), field.zero()
    rows = [
        (zero, one, zero, zero),
        (one, zero, zero, zero),
        (zero, zero, one, zero),
        (zero, zero, zero, one),
    ]
    pairing = Matrix.from_rows(field, rows)
    from .affine import affine_subspace, linear_span
    e1 = (one, zero, zero, zero)
    e3 = (zero, zero, one, zero)
    e4 = (zero, zero, zero, one)
    origin = (zero, zero, zero, zero)
    f_plus = affine_subspace(E_SIDE, origin, linear_span(field, [e1], 4))
    f_block = affine_subspace(E_SIDE, origin,
                              linear_span(field, [e1, e3, e4], 4))
    f_plus_y = affine_subspace(F_SIDE, origin, linear_span(field, [e1], 4))
    f_block_y = affine_subspace(F_SIDE, origin,
                                linear_span(field, [e1, e3, e4], 4))
    xs = Arrangement.of(E_SIDE, [f_plus, f_block], warn_nested=False)
    ys = Arrangement.of(F_SIDE, [f_plus_y, f_block_y], warn_nested=False)
    return JobConfig(field, 4, pairing, xs, ys)


def cmd_demo(args) -> int:
    if args.name == "quadratic":
        config = _quadratic_demo_config()
        print("quadratic-space configuration: isotropic line F+, "
              "block F+ + F0")
        code = cmd_classify(config, args)
        expected = [["Thin", "Perfect"], ["Perfect", "Thick"]]
        dp = config.dual_pair()
        got = [[classify_pair(dp, x, y).value for y in config.ys]
               for x in config.xs]
        print(f"expected relative positions reproduced: {got == expected}")
        return code

    if args.name == "rigidity-tour":
        p = 5
        space = FiniteSpace(p, 2)
        f = space.base_field
        from .affine import affine_from_gens
        x1 = affine_from_gens(f, E_SIDE, (0, 0), [(1, 0)], 2)
        x2 = affine_from_gens(f, E_SIDE, (1, 2), [(0, 1)], 2)
        y1 = affine_from_gens(f, F_SIDE, (0, 0), [(0, 1)], 2)
        y2 = affine_from_gens(f, F_SIDE, (3, 0), [(1, 0)], 2)
        xs = Arrangement.of(E_SIDE, [x1, x2])
        ys = Arrangement.of(F_SIDE, [y1, y2])
        d = (twisted_indicator(space, x1, y1.base)
             + twisted_indicator(space, x2, y2.base).scale(2))
        print(f"decomposition tour over F_{p}^2: two lines against their "
              f"orthogonal partners")
        dimension, basis = space_basis(space, xs, ys)
        print(f"oracle dimension: {dimension} "
              f"(perfect pairs: {len(perfect_pairs(space.dual_pair, xs, ys))})")
        result = decompose(space, d, xs, ys, budget=args.budget,
                           seed=args.seed)
        for step in result.transcript:
            print(f"  level {step.level}: block linear part of dimension "
                  f"{step.x0.dim}, avoiding family "
                  f"{[list(u) for u in step.block.family.vectors]}, "
                  f"{len(step.pairs)} pairs resolved")
        for (x, y), comp in result.components.items():
            print(f"  component on (X base {tuple(map(int, x.base))}, "
                  f"Y base {tuple(map(int, y.base))}): "
                  f"{len(comp.supp())} support points")
        print(f"residual zero: {result.residual.is_zero()}")
        print(f"input reconstructed: {result.component_sum() == d}")
        return EXIT_OK

    raise InputError(f"unknown demo {args.name!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affrigid",
        description="thin/perfect/thick classification and support-rigidity "
                    "decomposition over F_p^n")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True,
                            help="path to the JSON input document")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--seed", type=int, default=0,
                        help="seed for the randomized family-search fallback")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="candidate budget for family searches")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="maximum p^n for the dimension oracle")
        sp.add_argument("--basis", action="store_true",
                        help="include the oracle basis in dim reports")

    for name in ("classify", "check", "dim", "decompose", "family"):
        add_common(sub.add_parser(name))
    demo = sub.add_parser("demo")
    demo.add_argument("name", help="quadratic | rigidity-tour")
    add_common(demo, needs_input=False)
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "check": cmd_check,
    "dim": cmd_dim,
    "decompose": cmd_decompose,
    "family": cmd_family,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "demo":
            return cmd_demo(args)
        config = _load_config(args.input)
        return COMMANDS[args.command](config, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
