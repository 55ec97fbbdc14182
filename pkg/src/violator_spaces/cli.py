"""Command-line front end.

Subcommands: check, solve, structure, uso, bench, sampling, probe.
Every randomized command prints its seed, and identical inputs, flags,
and seed produce byte-identical output.  Exit codes: 0 success, 1 axiom
or validation witness, 2 parse error, 3 solver failure, 4 size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, Tuple

from .algorithms import (
    IterationGuardExceeded,
    NoBasisFound,
    Rng,
    WeightOverflow,
    _mix64,
    basis1,
    basis2,
    sampling_check,
    solve,
    trivial_basis,
)
from .core import ConstraintSet, SolveStats, ViolationOracle
from .explicit import EXHAUSTIVE_WARN_N, ExplicitViolatorSpace
from .fileio import (
    ParseError,
    explicit_to_dict,
    load_path,
    uso_to_dict,
)
from .grid_uso import (
    EdgeConsistencyError,
    GenerationExhausted,
    GridPartition,
    coordinate_order_oracle,
    coordinate_order_uso,
    cyclic_cube_uso,
    random_uso,
    uso_oracle,
    validate_uso,
)
from .instances import lp2d_oracle, miniball_oracle, tabulate

DEFAULT_SEED = 1729
STRUCTURE_MAX_N = 16

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_SIZE = 4


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be >= 1")
    return value


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, out: Optional[str]) -> None:
    _write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", out)


def _load(path: str):
    kind, obj = load_path(path)
    return kind, obj


def _oracle_from_file(
    path: str, delta: Optional[int]
) -> Tuple[ViolationOracle, str]:
    """Build the violation oracle for any supported instance file."""
    kind, obj = _load(path)
    if kind == "explicit":
        space: ExplicitViolatorSpace = obj
        if space.n > EXHAUSTIVE_WARN_N:
            sys.stderr.write(
                f"warning: exhaustive axiom check over n={space.n} subsets is slow\n"
            )
        witness = space.check_axioms()
        if witness is not None:
            raise CheckFailed(witness.describe(space.names))
        return space.oracle(delta=delta), kind
    if kind == "abstract":
        witness = obj.check_axioms()
        if witness is not None:
            raise CheckFailed(witness.describe(obj.names))
        space = obj.violator_map()
        return space.oracle(delta=delta), kind
    if kind == "concrete":
        space = obj.to_abstract().violator_map()
        return space.oracle(delta=delta), kind
    if kind == "uso":
        u, names = obj
        witness = validate_uso(u)
        if witness is not None:
            raise CheckFailed(
                f"subgrid {witness.G.label(names)} has {len(witness.sinks)} sinks"
            )
        oracle = uso_oracle(u, names=names)
        if delta is not None:
            oracle.delta = delta
        return oracle, kind
    if kind == "points":
        ps, names = obj
        oracle = miniball_oracle(ps, names=names)
        if delta is not None:
            oracle.delta = delta
        return oracle, kind
    if kind == "halfplanes":
        lp, names = obj
        oracle = lp2d_oracle(lp, names=names)
        if delta is not None:
            oracle.delta = delta
        return oracle, kind
    raise ParseError(f"{path}: unsupported file kind {kind}")


class CheckFailed(Exception):
    """An input failed its axiom or USO validation; carries the witness."""


# -- check -------------------------------------------------------------


def cmd_check(args) -> int:
    try:
        kind, obj = _load(args.path)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except EdgeConsistencyError as exc:
        print(f"edge consistency violated: {exc}")
        return EXIT_WITNESS

    if kind == "explicit":
        if obj.n > EXHAUSTIVE_WARN_N:
            sys.stderr.write(
                f"warning: exhaustive axiom check over n={obj.n} subsets is slow\n"
            )
        witness = obj.check_axioms()
        if witness is None:
            print(f"ok: violator space over n={obj.n} satisfies both axioms")
            return EXIT_OK
        print(witness.describe(obj.names))
        return EXIT_WITNESS
    if kind == "abstract":
        witness = obj.check_axioms()
        if witness is None:
            print(f"ok: value table over n={obj.n} is monotone and local")
            return EXIT_OK
        print(witness.describe(obj.names))
        return EXIT_WITNESS
    if kind == "concrete":
        obj.to_abstract()
        print(
            f"ok: concrete problem with {len(obj.points)} points and"
            f" {obj.n} constraints"
        )
        return EXIT_OK
    if kind == "uso":
        u, names = obj
        witness = validate_uso(u)
        if witness is None:
            print(f"ok: unique-sink orientation over n={u.n}, {u.delta} blocks")
            return EXIT_OK
        print(
            f"subgrid {witness.G.label(names)} has {len(witness.sinks)} sinks"
        )
        return EXIT_WITNESS
    # live geometric instances: tabulate when small enough, then check
    oracle, _ = _oracle_from_file(args.path, None)
    if oracle.n > STRUCTURE_MAX_N:
        print(f"ok: parsed {kind} instance with n={oracle.n} (too large to tabulate)")
        return EXIT_OK
    space = tabulate(oracle)
    witness = space.check_axioms()
    if witness is None:
        print(f"ok: tabulated {kind} instance over n={oracle.n} satisfies both axioms")
        return EXIT_OK
    print(witness.describe(oracle.names))
    return EXIT_WITNESS


# -- solve -------------------------------------------------------------


def _run_algorithm(
    oracle: ViolationOracle, algo: str, rng: Rng
) -> Tuple[ConstraintSet, SolveStats]:
    G = oracle.ground_set()
    if algo == "trivial":
        stats = SolveStats(rng_seed=rng.seed)
        before = oracle.primitive_calls
        stats.trivial_calls = 1
        basis = trivial_basis(oracle, G)
        stats.primitive_calls = oracle.primitive_calls - before
        return basis, stats
    if algo == "clarkson1" or algo == "auto":
        return basis1(oracle, G, rng)
    if algo == "clarkson2":
        return basis2(oracle, G, rng)
    raise ValueError(f"unknown algorithm {algo!r}")


def cmd_solve(args) -> int:
    try:
        oracle, kind = _oracle_from_file(args.path, args.delta)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (CheckFailed, EdgeConsistencyError) as exc:
        sys.stderr.write(f"error: input failed validation: {exc}\n")
        return EXIT_WITNESS

    rng = Rng(args.seed)
    try:
        basis, stats = _run_algorithm(oracle, args.algo, rng)
    except (NoBasisFound, IterationGuardExceeded, WeightOverflow) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER

    names = oracle.names
    payload = {
        "instance": args.path,
        "kind": kind,
        "n": oracle.n,
        "delta": oracle.delta,
        "algorithm": args.algo,
        "seed": args.seed,
        "basis": [names[h] for h in basis],
        "stats": stats.as_dict(),
    }
    if hasattr(oracle, "edge_evals"):
        payload["edge_evals"] = oracle.edge_evals
    if args.format == "json":
        _emit_json(payload, args.out)
        return EXIT_OK
    lines = [
        f"instance: {args.path} ({kind}, n={oracle.n}, delta={oracle.delta})",
        f"algorithm: {args.algo}",
        f"seed: {args.seed}",
        f"basis: {{{', '.join(payload['basis'])}}}",
    ]
    for key, value in stats.as_dict().items():
        if key != "rng_seed":
            lines.append(f"{key}: {value}")
    if "edge_evals" in payload:
        lines.append(f"edge_evals: {payload['edge_evals']}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- structure ---------------------------------------------------------


def cmd_structure(args) -> int:
    try:
        kind, obj = _load(args.path)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except EdgeConsistencyError as exc:
        sys.stderr.write(f"error: input failed validation: {exc}\n")
        return EXIT_WITNESS

    if kind == "explicit":
        space = obj
    else:
        try:
            oracle, _ = _oracle_from_file(args.path, None)
        except (CheckFailed, EdgeConsistencyError) as exc:
            sys.stderr.write(f"error: input failed validation: {exc}\n")
            return EXIT_WITNESS
        if oracle.n > STRUCTURE_MAX_N:
            sys.stderr.write(
                f"error: structure needs a table; n={oracle.n} exceeds"
                f" the n <= {STRUCTURE_MAX_N} tabulation guard\n"
            )
            return EXIT_SIZE
        space = tabulate(oracle)

    witness = space.check_axioms()
    if witness is not None:
        print(witness.describe(space.names))
        return EXIT_WITNESS
    st = space.structure()
    names = space.names
    labels = st.class_labels()

    payload = {
        "instance": args.path,
        "n": space.n,
        "combinatorial_dimension": space.combinatorial_dimension(),
        "bases": [b.label(names).replace(",", "") or "∅" for b in st.bases],
        "classes": [
            {
                "label": labels[i],
                "members": [m.label(names).replace(",", "") for m in cls.members],
                "violators": cls.violators.label(names),
            }
            for i, cls in enumerate(st.classes)
        ],
        "acyclic": st.acyclic,
    }
    if st.acyclic:
        payload["linear_extension"] = [labels[i] for i in st.linear_extension]
        concrete = space.to_concrete()
        payload["s_table"] = {
            name: [concrete.points[p] for p in s]
            for name, s in zip(concrete.names, concrete.constraints)
        }
    else:
        payload["cycle"] = [labels[i] for i in st.cycle]

    if args.format == "json":
        _emit_json(payload, args.out)
        return EXIT_OK
    lines = [
        f"instance: {args.path} (n={space.n})",
        f"combinatorial dimension: {payload['combinatorial_dimension']}",
        f"bases ({len(st.bases)}): {' '.join(payload['bases'])}",
        f"classes ({len(st.classes)}): {' '.join(labels)}",
        f"acyclic: {'yes' if st.acyclic else 'no'}",
    ]
    if st.acyclic:
        lines.append("linear extension: " + " < ".join(payload["linear_extension"]))
        lines.append("concretization:")
        for name, s in payload["s_table"].items():
            lines.append(f"  S({name}) = {{{', '.join(s)}}}")
    else:
        cyc = payload["cycle"] + [payload["cycle"][0]]
        lines.append("cycle: " + " <=0 ".join(cyc))
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- uso ---------------------------------------------------------------


def cmd_uso(args) -> int:
    if args.action == "generate":
        sizes = _parse_sizes(args.blocks)
        if args.kind == "cyclic-cube":
            u = cyclic_cube_uso()
        else:
            partition = GridPartition.uniform(sizes)
            if args.kind == "coordinate":
                rng = Rng(args.seed)
                rankings = [
                    rng.subset(list(b), len(b)) for b in partition.blocks
                ]
                u = coordinate_order_uso(partition, rankings)
            else:
                try:
                    u = random_uso(partition, Rng(args.seed))
                except ValueError as exc:
                    sys.stderr.write(f"error: {exc}\n")
                    return EXIT_SIZE
                except GenerationExhausted as exc:
                    sys.stderr.write(f"error: {exc}\n")
                    return EXIT_SOLVER
        _emit_json(uso_to_dict(u), args.out)
        return EXIT_OK

    # tabulate
    try:
        kind, obj = _load(args.path)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except EdgeConsistencyError as exc:
        sys.stderr.write(f"error: input failed validation: {exc}\n")
        return EXIT_WITNESS
    if kind != "uso":
        sys.stderr.write(f"error: {args.path} is not a USO file\n")
        return EXIT_PARSE
    u, names = obj
    witness = validate_uso(u)
    if witness is not None:
        print(f"subgrid {witness.G.label(names)} has {len(witness.sinks)} sinks")
        return EXIT_WITNESS
    if u.n > STRUCTURE_MAX_N:
        sys.stderr.write(f"error: n={u.n} exceeds the tabulation guard\n")
        return EXIT_SIZE
    space = tabulate(uso_oracle(u, names=names))
    space.check_axioms()
    _emit_json(explicit_to_dict(space), args.out)
    return EXIT_OK


# -- bench -------------------------------------------------------------


def _parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from exc
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    return sizes


def _uniform_blocks(n: int, delta: int) -> List[int]:
    base = n // delta
    sizes = [base + (1 if i < n % delta else 0) for i in range(delta)]
    if any(s < 1 for s in sizes):
        raise ValueError(f"cannot split n={n} into {delta} nonempty blocks")
    return sizes


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    sizes = _parse_sizes(args.sizes)
    rows = ["n,delta,algo,mean_primitive_calls,mean_loop_iterations,trials,seed"]
    for n in sizes:
        partition = GridPartition.uniform(_uniform_blocks(n, args.delta))
        for algo in algos:
            total_calls = 0
            total_iters = 0
            for trial in range(args.trials):
                # same instance and randomness for every algorithm
                trial_rng = Rng(_mix64(args.seed, n, trial))
                rankings = [
                    trial_rng.subset(list(b), len(b)) for b in partition.blocks
                ]
                oracle = coordinate_order_oracle(partition, rankings)
                _, stats = _run_algorithm(oracle, algo, trial_rng)
                total_calls += stats.primitive_calls
                total_iters += stats.loop_iterations
            rows.append(
                f"{n},{args.delta},{algo},{total_calls / args.trials!r},"
                f"{total_iters / args.trials!r},{args.trials},{args.seed}"
            )
    _write("\n".join(rows) + "\n", args.out)
    return EXIT_OK


# -- sampling ----------------------------------------------------------


def cmd_sampling(args) -> int:
    try:
        oracle, kind = _oracle_from_file(args.path, args.delta)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (CheckFailed, EdgeConsistencyError) as exc:
        sys.stderr.write(f"error: input failed validation: {exc}\n")
        return EXIT_WITNESS

    W = ConstraintSet.empty(oracle.n)
    if args.w:
        index = {name: i for i, name in enumerate(oracle.names)}
        for name in args.w.split(","):
            name = name.strip()
            if name not in index:
                sys.stderr.write(f"error: unknown constraint name {name!r}\n")
                return EXIT_PARSE
            W = W.add(index[name])
    if not 0 <= args.r < oracle.n:
        sys.stderr.write(f"error: need 0 <= r < n={oracle.n}\n")
        return EXIT_PARSE
    report = sampling_check(oracle, W, args.r, args.trials, Rng(args.seed))
    payload = {"instance": args.path, "kind": kind, "n": oracle.n,
               "delta": oracle.delta, **report.as_dict()}
    if args.format == "json":
        _emit_json(payload, args.out)
        return EXIT_OK
    lines = [
        f"instance: {args.path} ({kind}, n={oracle.n}, delta={oracle.delta})",
        f"r: {report.r}",
        f"trials: {report.trials}",
        f"seed: {report.seed}",
        f"mean violators: {report.mean!r}",
        f"bound: {report.bound!r}",
        f"stddev: {report.stddev!r}",
        f"passed: {'yes' if report.passed else 'no'}",
    ]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- probe -------------------------------------------------------------


def _probe_candidate(rng: Rng, n: int, sweeps: int = 6):
    """One search step: a random consistency-respecting table pushed
    towards locality by bounded repair sweeps (where F is inside G and G
    is disjoint from V(F), overwrite V(G) with V(F)), then verified."""
    size = 1 << n
    table = []
    for g in range(size):
        comp = ~g & (size - 1)
        v = 0
        m = comp
        while m:
            low = m & -m
            if rng.randbelow(2):
                v |= low
            m ^= low
        table.append(v)
    for _ in range(sweeps):
        changed = False
        for g in range(size):
            f = (g - 1) & g
            while True:
                if g & table[f] == 0 and table[g] != table[f]:
                    table[g] = table[f]
                    changed = True
                if f == 0:
                    break
                f = (f - 1) & g
        if not changed:
            break
    space = ExplicitViolatorSpace(n, table)
    return space if space.check_axioms() is None else None


def cmd_probe(args) -> int:
    """Random search for a cyclic violator space of dimension two.

    Whether one exists is open; the probe reports what it saw and
    claims nothing.  Cyclic spaces of higher dimension do turn up.
    """
    rng = Rng(args.seed)
    valid = 0
    dim2 = 0
    cyclic_any = 0
    found = None
    for _ in range(args.attempts):
        space = _probe_candidate(rng, args.n)
        if space is None:
            continue
        valid += 1
        dim = space.combinatorial_dimension()
        acyclic = space.structure().acyclic
        if not acyclic:
            cyclic_any += 1
        if dim != 2:
            continue
        dim2 += 1
        if not acyclic:
            found = space
            break
    print(f"attempts: {args.attempts}")
    print(f"valid violator spaces: {valid}")
    print(f"dimension-2 spaces: {dim2}")
    print(f"cyclic spaces of any dimension: {cyclic_any}")
    if found is None:
        print("cyclic dimension-2 space: none found")
        return EXIT_OK
    print("cyclic dimension-2 space FOUND:")
    _emit_json(explicit_to_dict(found), args.out)
    return EXIT_OK


# -- wiring ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vspace",
        description=(
            "Check, analyze, solve, and benchmark violator-space instances:"
            " explicit tables, point sets (smallest enclosing ball),"
            " halfplane LPs, and grid unique-sink orientations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a file against its axioms")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="find a basis of the full ground set")
    p.add_argument("path")
    p.add_argument("--algo", default="auto",
                   choices=["trivial", "clarkson1", "clarkson2", "auto"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--delta", type=_positive_int, default=None)
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("structure", help="bases, classes, ordering, concretization")
    p.add_argument("path")
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("uso", help="generate or tabulate grid USOs")
    usub = p.add_subparsers(dest="action", required=True)
    pg = usub.add_parser("generate", help="emit a USO as JSON")
    pg.add_argument("--blocks", default="2,2,2",
                    help="comma-separated block sizes, e.g. 3,2,2")
    pg.add_argument("--kind", default="coordinate",
                    choices=["coordinate", "random", "cyclic-cube"])
    pg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pg.add_argument("--out", default=None)
    pg.set_defaults(func=cmd_uso)
    pt = usub.add_parser("tabulate", help="emit the induced violator table")
    pt.add_argument("path")
    pt.add_argument("--out", default=None)
    pt.set_defaults(func=cmd_uso)

    p = sub.add_parser("bench", help="benchmark algorithms on grid USOs")
    p.add_argument("--delta", type=_positive_int, default=2)
    p.add_argument("--sizes", default="64,128,256")
    p.add_argument("--algos", default="clarkson1,clarkson2")
    p.add_argument("--trials", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sampling", help="Monte-Carlo check of the expected"
                                        " violator-count bound")
    p.add_argument("path")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--trials", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--delta", type=_positive_int, default=None)
    p.add_argument("--w", default="",
                   help="comma-separated names for the fixed set W")
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sampling)

    p = sub.add_parser("probe", help="random search for a cyclic"
                                     " dimension-2 violator space")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--attempts", type=int, default=2000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_probe)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SIZE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
