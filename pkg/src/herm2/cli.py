"""Command-line front end: density | jordan | oracle | selftest.

Exit codes: 0 success, 1 unreadable or invalid input (including usage
errors), 2 failure inside a computation stage, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .density import local_density
from .errors import BudgetExceeded, Herm2Error
from .jordan import split_with_retry
from .lattice import HermitianLattice, direct_sum, new_lattice, scale_exp, with_ring
from .oracle import default_budget, normalized_density
from .ring import make_ring

SCHEMA_VERSION = 1
# Oracle value divided by the formula value, measured on rank-1 lattices for both cases.
CALIBRATION_CONSTANT = Fraction(1)
DEFAULT_MAX_DEPTH = 5


class InputError(Exception):
    """Unreadable or invalid lattice file or arguments; exit code 1."""


@dataclass
class LatticeFile:
    case: int
    residue_degree: int
    param: object
    precision: int
    gram: list | None = None
    jordan_blocks: list | None = None

    @classmethod
    def from_json(cls, obj) -> LatticeFile:
        if not isinstance(obj, dict):
            raise InputError("lattice file must hold a JSON object")
        missing = [k for k in ("case", "residue_degree", "param", "precision") if k not in obj]
        if missing:
            raise InputError(f"missing field(s): {', '.join(missing)}")
        if ("gram" in obj) == ("jordan_blocks" in obj):
            raise InputError("exactly one of 'gram' and 'jordan_blocks' must be present")
        unknown = set(obj) - {"case", "residue_degree", "param", "precision", "gram", "jordan_blocks"}
        if unknown:
            raise InputError(f"unknown field(s): {', '.join(sorted(unknown))}")
        try:
            return cls(int(obj["case"]), int(obj["residue_degree"]), obj["param"], int(obj["precision"]),
                       obj.get("gram"), obj.get("jordan_blocks"))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad header field: {exc}") from exc

    def to_json(self) -> dict:
        out = {"case": self.case, "residue_degree": self.residue_degree, "param": self.param,
               "precision": self.precision}
        if self.gram is not None:
            out["gram"] = self.gram
        else:
            out["jordan_blocks"] = self.jordan_blocks
        return out

    def lattice(self, precision_override: int | None = None) -> HermitianLattice:
        k = precision_override or self.precision
        if self.case not in (1, 2):
            raise InputError(f"case must be 1 or 2, got {self.case}")
        try:
            ring = make_ring(self.case, self.residue_degree, self.param, k)
        except (Herm2Error, ValueError) as exc:
            raise InputError(f"ring: {exc}") from exc
        if self.gram is not None:
            return _parse_gram(ring, self.gram, "gram")
        if not isinstance(self.jordan_blocks, list) or not self.jordan_blocks:
            raise InputError("'jordan_blocks' must be a nonempty list")
        pieces = []
        for t, spec in enumerate(self.jordan_blocks):
            if not isinstance(spec, dict) or set(spec) != {"i", "gram"}:
                raise InputError(f"jordan_blocks[{t}] must be an object with keys 'i' and 'gram'")
            L = _parse_gram(ring, spec["gram"], f"jordan_blocks[{t}].gram")
            if scale_exp(L) != spec["i"]:
                raise InputError(f"jordan_blocks[{t}] has scale π^{scale_exp(L)}, declared π^{spec['i']}")
            pieces.append(L)
        return _parse_gram(ring, direct_sum(*pieces).rows(), "jordan_blocks")


def _parse_gram(ring, gram, where: str) -> HermitianLattice:
    if not isinstance(gram, list) or not all(isinstance(row, list) for row in gram):
        raise InputError(f"{where} must be a list of rows")
    rows = []
    for a, row in enumerate(gram):
        parsed = []
        for b, x in enumerate(row):
            try:
                parsed.append(x if not isinstance(x, (int, str, dict)) else ring.from_json(x))
            except (TypeError, ValueError) as exc:
                raise InputError(f"{where}[{a}][{b}]: {exc}") from exc
        rows.append(parsed)
    try:
        return new_lattice(rows, ring)
    except (Herm2Error, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from exc


def load_lattice_file(path: str) -> LatticeFile:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return LatticeFile.from_json(obj)


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except BudgetExceeded:
        raise
    except Herm2Error as exc:
        raise StageError(getattr(exc, "stage", name) or name, exc) from exc
    except (ArithmeticError, AssertionError, ValueError) as exc:
        raise StageError(name, exc) from exc


# ---- output ---------------------------------------------------------------------

def _plain(obj):
    """JSON-safe copy: Fractions and big ints become decimal strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < 1 << 53 else str(obj)
    return str(obj)


def dump_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _text_lines(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(obj):
        val = obj[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines += _text_lines(val, indent + 1)
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                lines.append(f"{pad}  -")
                lines += _text_lines(item, indent + 2)
        else:
            lines.append(f"{pad}{key}: {json.dumps(_plain(val))}")
    return lines


def _emit(args, payload: dict) -> None:
    payload = {"schema": SCHEMA_VERSION, **payload}
    text = dump_json(payload) if args.format == "json" else "\n".join(_text_lines(_plain(payload))) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_profile(path: str | None, prof) -> None:
    if path:
        Path(path).write_text(dump_json({"schema": SCHEMA_VERSION, "profile": prof.to_json()}))


# ---- commands -------------------------------------------------------------------

def _oracle_lattice(L: HermitianLattice, depth: int) -> HermitianLattice:
    return L if L.ring.k >= depth else with_ring(L, L.ring.with_precision(depth))


def _run_oracle(L: HermitianLattice, args):
    budget = args.budget if args.budget is not None else default_budget()
    return _stage("oracle", normalized_density, _oracle_lattice(L, args.max_depth), args.max_depth, budget=budget)


def cmd_density(args) -> int:
    L = _load_lattice(args)
    rep = _stage("density", local_density, L)
    payload = {"command": "density", "report": rep.to_json()}
    code = 0
    if args.verify:
        prof = _run_oracle(L, args)
        _write_profile(args.emit_profile, prof)
        expected = CALIBRATION_CONSTANT * rep.beta_L
        match = prof.stabilized and prof.stabilized_value == expected
        payload["verification"] = {
            "calibration_constant": CALIBRATION_CONSTANT,
            "expected": expected,
            "oracle": prof.stabilized_value,
            "stabilized_at": prof.stabilized_at,
            "max_depth": args.max_depth,
            "match": match,
            "profile": prof.to_json(),
        }
        if not match:
            code = 3
            why = "no stabilization" if not prof.stabilized else f"oracle {prof.stabilized_value} != {expected}"
            print(f"verification mismatch: {why}", file=sys.stderr)
    _emit(args, payload)
    return code


def cmd_jordan(args) -> int:
    L = _load_lattice(args)
    dec = _stage("jordan", split_with_retry, L)
    _emit(args, {"command": "jordan", **dec.to_json()})
    return 0


def cmd_oracle(args) -> int:
    L = _load_lattice(args)
    prof = _run_oracle(L, args)
    _write_profile(args.emit_profile, prof)
    _emit(args, {"command": "oracle", "profile": prof.to_json()})
    return 0


def cmd_selftest(args) -> int:
    from .checks import selftest_checks

    failed = []
    for name, check in selftest_checks():
        try:
            res = check()
        except Exception as exc:  # a crashing suite counts as a failure of its property
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
            failed.append(name)
            continue
        print(f"{'PASS' if res.ok else 'FAIL'} {res.name}: {res.detail}")
        if not res.ok:
            failed.append(res.name)
    if failed:
        print(f"failing properties: {', '.join(failed)}")
        return 3
    return 0


def _load_lattice(args) -> HermitianLattice:
    return load_lattice_file(args.path).lattice(args.precision_override)


# ---- argument parsing -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision-override", type=_positive, default=None,
                        help="2-adic working precision k, replacing the file's value")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="indented text output")
    common.set_defaults(format="json")
    common.add_argument("--out", default=None, help="write the report to this file instead of stdout")

    oracle_opts = _Parser(add_help=False)
    oracle_opts.add_argument("--max-depth", type=_positive, default=DEFAULT_MAX_DEPTH,
                             help="largest 2-adic depth d counted by the oracle")
    oracle_opts.add_argument("--budget", type=_positive, default=None,
                             help="maximal number of stored partial solutions (default 2^24 or HERM2_BUDGET)")
    oracle_opts.add_argument("--emit-profile", default=None, metavar="PATH",
                             help="also write the full count profile JSON to PATH")

    parser = _Parser(prog="herm2", description="Local densities of hermitian lattices over ramified 2-adic extensions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("density", parents=[common, oracle_opts], help="local density with all intermediate data")
    p.add_argument("path")
    p.add_argument("--verify", action="store_true", help="compare with the congruence-counting oracle")
    p.set_defaults(func=cmd_density)
    p = sub.add_parser("jordan", parents=[common], help="Jordan splitting and block types")
    p.add_argument("path")
    p.set_defaults(func=cmd_jordan)
    p = sub.add_parser("oracle", parents=[common, oracle_opts], help="normalized congruence counts")
    p.add_argument("path")
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("selftest", parents=[common], help="run the quick invariant suites")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"math error in stage oracle: {exc}", file=sys.stderr)
        if getattr(args, "emit_profile", None) and exc.profile is not None:
            _write_profile(args.emit_profile, exc.profile)
        return 2
    except StageError as exc:
        print(f"math error in stage {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
