"""Command line front end.

Exit codes: 0 success, 1 verification mismatch, 2 invalid input or
arguments, 3 pipeline failure (the message names the failing step).
"""

from __future__ import annotations

import argparse
import sys

from .cells import CellStructure
from .compiler import compile_walk
from .errors import ShiftCoinError, StageError
from .flow import walk_index
from .serialize import (
    protocol_from_json,
    protocol_to_json,
    read_json,
    walk_from_json,
    walk_to_json,
    write_json,
)
from .vm import evaluate, verify
from .walks import (
    BandedUnitary,
    build_three_state_walk,
    random_banded_unitary,
    regroup,
)


def _load_walk(path: str) -> BandedUnitary:
    return walk_from_json(read_json(path))


def _cmd_index(args: argparse.Namespace) -> int:
    walk = _load_walk(args.walk)
    print(walk_index(walk, cut=args.cut, radius=args.radius))
    return 0


def _cmd_compile(args: argparse.Namespace) -> int:
    walk = _load_walk(args.walk)
    result = compile_walk(walk, optimize=not args.no_optimize)
    report = verify(result.protocol, walk, tol=args.tol)
    if args.dump_stages:
        dec = result.decoupling
        print(f"stage index: net shift {result.net_shift}", file=sys.stderr)
        print(
            f"stage decouple: cuts {list(dec.cuts)}, "
            f"{len(dec.rotations)} window rotations, "
            f"{len(dec.arc_blocks)} arc blocks",
            file=sys.stderr,
        )
        for win in dec.rotations:
            print(
                f"  rotation window cells {list(win.cells)} dims {list(win.dims)}",
                file=sys.stderr,
            )
        for win in dec.arc_blocks:
            print(
                f"  arc block cells {list(win.cells)} dims {list(win.dims)}",
                file=sys.stderr,
            )
        print(
            f"stage lower: {len(result.raw_protocol)} raw items, "
            f"{len(result.protocol)} after fusion",
            file=sys.stderr,
        )
    print(report.summary(), file=sys.stderr)
    if not report.ok:
        return 1
    write_json(args.output, protocol_to_json(result.protocol))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    walk = _load_walk(args.walk)
    protocol = protocol_from_json(read_json(args.protocol))
    report = verify(protocol, walk, tol=args.tol)
    print(report.summary())
    return 0 if report.ok else 1


def _cmd_eval(args: argparse.Namespace) -> int:
    protocol = protocol_from_json(read_json(args.protocol))
    matrix = evaluate(protocol)
    walk = BandedUnitary(protocol.structure, matrix)
    write_json(args.output, walk_to_json(walk))
    return 0


def _parse_dims(args: argparse.Namespace) -> tuple[int, ...]:
    if args.dims:
        try:
            dims = tuple(int(part) for part in args.dims.split(","))
        except ValueError as exc:
            raise ValueError(f"bad --dims value {args.dims!r}") from exc
        return dims
    return (args.dim,) * args.cells


def _cmd_gen(args: argparse.Namespace) -> int:
    structure = CellStructure(_parse_dims(args))
    walk = random_banded_unitary(
        structure, args.bandwidth, net_shift=args.index, seed=args.seed
    )
    print(
        f"generated walk: {structure.num_cells} cells, dims "
        f"{list(structure.dims)}, bandwidth {walk.bandwidth}, "
        f"index {walk_index(walk)}",
        file=sys.stderr,
    )
    write_json(args.output, walk_to_json(walk))
    return 0


def _cmd_example(args: argparse.Namespace) -> int:
    walk = build_three_state_walk(args.cells)
    if args.as_qubits:
        total = 3 * args.cells
        if total % 2:
            raise ValueError(
                "--as-qubits needs an even cell count so the ring regroups "
                "into two-level cells"
            )
        walk = regroup(walk, (2,) * (total // 2))
    print(
        f"three-state walk: dims {list(walk.structure.dims)}, "
        f"bandwidth {walk.bandwidth}, index {walk_index(walk)}",
        file=sys.stderr,
    )
    write_json(args.output, walk_to_json(walk))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftcoin",
        description="Factor banded unitaries on a cell ring into "
        "conditional-shift and coin protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="print the transport index of a walk")
    p.add_argument("walk", help="walk JSON file")
    p.add_argument("--cut", type=int, default=0, help="cut position (default 0)")
    p.add_argument("--radius", type=int, default=None, help="summation radius")
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("compile", help="compile a walk into a protocol")
    p.add_argument("walk", help="walk JSON file")
    p.add_argument("-o", "--output", default=None, help="protocol JSON output")
    p.add_argument("--tol", type=float, default=None, help="verification tolerance")
    p.add_argument(
        "--no-optimize", action="store_true", help="keep the raw item sequence"
    )
    p.add_argument(
        "--dump-stages", action="store_true", help="report pipeline stages on stderr"
    )
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("verify", help="check a protocol against a walk")
    p.add_argument("walk", help="walk JSON file")
    p.add_argument("protocol", help="protocol JSON file")
    p.add_argument("--tol", type=float, default=None, help="verification tolerance")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("eval", help="evaluate a protocol into a walk file")
    p.add_argument("protocol", help="protocol JSON file")
    p.add_argument("-o", "--output", default=None, help="walk JSON output")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gen", help="generate a random banded walk")
    p.add_argument("--cells", type=int, default=8, help="ring length (default 8)")
    p.add_argument("--dim", type=int, default=2, help="levels per cell (default 2)")
    p.add_argument(
        "--dims", default=None, help="comma-separated per-cell dims, overrides --dim"
    )
    p.add_argument("--bandwidth", type=int, default=1, help="band radius (default 1)")
    p.add_argument("--index", type=int, default=0, help="net transport index")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("-o", "--output", default=None, help="walk JSON output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser(
        "example-three-state",
        help="build the three-level walk that shifts its outer levels",
    )
    p.add_argument("--cells", type=int, default=4, help="ring length (default 4)")
    p.add_argument(
        "--as-qubits",
        action="store_true",
        help="regroup onto two-level cells before writing",
    )
    p.add_argument("-o", "--output", default=None, help="walk JSON output")
    p.set_defaults(func=_cmd_example)

    return parser


def entry(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShiftCoinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(entry())
