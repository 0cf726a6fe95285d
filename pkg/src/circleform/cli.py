"""Command-line harness around the simulator.

Subcommands:

* ``gen``      write a seeded instance (configuration and pattern files)
* ``run``      simulate one run, optionally tracing and rendering SVG frames
* ``batch``    sweep robot counts by schedulers; CSV plus a readable table
* ``explore``  exhaustively check every schedule on a small instance
* ``symmetry`` fully synchronous rounds from symmetric starts, fold trajectory
* ``verify``   replay a recorded trace and audit every round

Exit codes: 0 when all checks pass, 1 for usage or input problems, 2 when a
run violates an invariant, a counterexample or collision is found, the input
is unsolvable, or a trace fails verification.  ``--seed`` falls back to the
``APF_SEED`` environment variable, then to 0, so sweeps are reproducible.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from random import Random
from typing import Optional, Sequence

from .angles import Direction, format_turn, lex_compare, mod1
from .configuration import (
    Configuration,
    DoubleNomineeTied,
    classify,
    snapshot_of,
)
from .errors import (
    CircleFormError,
    GenerationError,
    PatternError,
    PreconditionError,
    StructuralError,
    SymmetricConfigurationError,
    TraceParseError,
)
from .formation import TargetPattern, compute, pattern_formed
from .formats import (
    load_config,
    load_pattern,
    read_trace,
    save_config,
    save_pattern,
    write_trace,
)
from .simulator import (
    POLICIES,
    ActivationPolicy,
    LazyAdversary,
    OrientationAdversary,
    RandomSubset,
    RoundRecord,
    RunReport,
    detect_collision,
    explore_schedules,
    fsync_symmetry_experiment,
    run,
    SYMMETRY_RULES,
)

_ATTEMPTS = 1000


# ---------------------------------------------------------------------------
# instance generation


def gen_instance(n: int, seed: int, q: Optional[int] = None) -> tuple[Configuration, TargetPattern]:
    """Seeded random instance: asymmetric start plus a formable pattern.

    Positions land on the 1/q grid (so denominators never exceed q), the
    configuration is rotationally asymmetric, and its smallest gap clears the
    pattern's gap floor, which the decision rule maintains as an invariant.
    Identical arguments produce identical instances.
    """
    if n < 3:
        raise PreconditionError("instances need at least 3 robots")
    q = q if q is not None else 36 * n
    if q < 4 * n:
        raise PreconditionError("grid denominator must be at least 4n")
    rng = Random(seed)
    for _ in range(_ATTEMPTS):
        weights = [rng.randrange(1, q) for _ in range(n)]
        total = sum(weights)
        try:
            pattern = TargetPattern.from_angles(Fraction(w, total) for w in weights)
        except PatternError:
            continue
        positions = sorted(Fraction(k, q) for k in rng.sample(range(q), n))
        c = Configuration(tuple(positions))
        if c.fold() != 1:
            continue
        if min(c.gaps) <= pattern.min_gap_floor:
            continue
        return c, pattern
    raise GenerationError(f"no valid instance in {_ATTEMPTS} attempts (n={n}, q={q})")


def symmetric_instance(
    fold: int, per_sector: int, seed: int, q: Optional[int] = None
) -> Configuration:
    """A fold-rotation-symmetric configuration of fold*per_sector robots."""
    if fold < 2:
        raise PreconditionError("symmetric instances need fold >= 2")
    if per_sector < 1:
        raise PreconditionError("at least one robot per sector")
    grid = q if q is not None else max(8 * per_sector, 16)
    rng = Random(seed)
    base = rng.sample(range(grid), per_sector)
    positions = [
        mod1(Fraction(x, grid * fold) + Fraction(j, fold))
        for x in base
        for j in range(fold)
    ]
    return Configuration.from_positions(positions)


# ---------------------------------------------------------------------------
# trace verification


def verify_trace(
    records: Sequence[RoundRecord], pattern: TargetPattern, mode: str = "det"
) -> list[str]:
    """Replay a trace and list everything inconsistent about it.

    Every round is re-derived: the decisions each activated robot must have
    computed from the recorded pre-round positions, the collision check, the
    post-round positions, the classification, the epoch accounting, and the
    formation bound.  In ``rand`` mode a recorded tie-break move is checked
    for validity (a nominee, the right direction, a draw inside the allowed
    window) instead of exact equality, since the draw itself is not
    reproducible from the trace.
    """
    if mode not in ("det", "rand"):
        raise PreconditionError(f"unknown mode {mode!r}")
    problems: list[str] = []
    if not records:
        return problems
    n = len(records[0].positions_before)
    if pattern.n != n:
        return [f"pattern has {pattern.n} gaps for {n} robots"]
    bound = n + 4 if mode == "det" else n + 6
    prev_after: Optional[tuple] = None
    terminated: set[int] = set()
    coverage: set[int] = set()
    epoch = 1
    formed_epoch: Optional[int] = None

    for rec in records:
        where = f"round {rec.round}"
        if len(rec.positions_before) != n or len(rec.positions_after) != n:
            problems.append(f"{where}: robot count changed mid-trace")
            break
        if prev_after is not None and rec.positions_before != prev_after:
            problems.append(f"{where}: positions_before break continuity")
        if rec.epoch != epoch:
            problems.append(f"{where}: epoch recorded as {rec.epoch}, expected {epoch}")
        try:
            order = sorted(range(n), key=rec.positions_before.__getitem__)
            c = Configuration(tuple(rec.positions_before[i] for i in order))
        except CircleFormError as e:
            problems.append(f"{where}: bad pre-round positions: {e}")
            break
        idx_of = {rid: k for k, rid in enumerate(order)}

        for rid in rec.activated:
            if rid in terminated:
                problems.append(f"{where}: robot {rid} was activated after terminating")
                continue
            recorded = rec.decisions[rid]
            if mode == "rand" and recorded.branch == "random_tiebreak":
                problems.extend(
                    f"{where}: robot {rid}: {msg}"
                    for msg in _check_random_move(c, idx_of[rid], recorded, pattern)
                )
                continue
            try:
                expected = compute(snapshot_of(c, idx_of[rid], False), pattern)
            except CircleFormError as e:
                problems.append(f"{where}: robot {rid}: {e}")
                continue
            if (
                expected.kind is not recorded.kind
                or expected.destination != recorded.destination
                or (expected.is_move and expected.path_direction is not recorded.path_direction)
                or expected.branch != recorded.branch
            ):
                problems.append(
                    f"{where}: robot {rid} recorded {recorded} but the rule gives {expected}"
                )

        witness = detect_collision(
            c, {idx_of[r]: d for r, d in rec.decisions.items()}
        )
        if witness is not None:
            a, b = order[witness.first], order[witness.second]
            problems.append(f"{where}: robots {a} and {b} collide at t={witness.time}")

        for rid in range(n):
            d = rec.decisions.get(rid)
            want = d.destination if d is not None and d.is_move else rec.positions_before[rid]
            if rec.positions_after[rid] != want:
                problems.append(f"{where}: robot {rid} ended at an unexplained position")

        try:
            after_order = sorted(range(n), key=rec.positions_after.__getitem__)
            c_after = Configuration(tuple(rec.positions_after[i] for i in after_order))
        except CircleFormError as e:
            problems.append(f"{where}: bad post-round positions: {e}")
            break
        if classify(c_after) != rec.config_class:
            problems.append(f"{where}: recorded class does not match the positions")

        for rid, d in rec.decisions.items():
            if d.kind.name == "TERMINATE":
                terminated.add(rid)
        if pattern_formed(c_after, pattern) and formed_epoch is None:
            formed_epoch = epoch
        coverage.update(rec.activated)
        alive_after = set(range(n)) - terminated
        if not alive_after or coverage >= alive_after:
            epoch += 1
            coverage.clear()
        prev_after = rec.positions_after

    if formed_epoch is not None and formed_epoch > bound:
        problems.append(f"formation took {formed_epoch} epochs, bound is {bound}")
    return problems


def _check_random_move(
    c: Configuration, idx: int, recorded, pattern: TargetPattern
) -> list[str]:
    """Validity of a tie-break draw that cannot be replayed exactly."""
    if c.n % 2:
        return ["tie-break move in an odd-count run"]
    found = classify(c)
    if not isinstance(found, DoubleNomineeTied):
        return ["tie-break move outside a tied configuration"]
    if idx not in (found.nominee_a, found.nominee_b):
        return ["tie-break move by a robot that is not a nominee"]
    if not recorded.is_move:
        return ["tie-break record is not a move"]
    s = snapshot_of(c, idx, False)
    cmp = lex_compare(s.forward_gaps, tuple(reversed(s.forward_gaps)))
    if cmp == 0:
        return ["nominee with a palindromic view"]
    expected_dir = Direction.FORWARD if cmp < 0 else Direction.REVERSE
    msgs = []
    if recorded.path_direction is not expected_dir:
        msgs.append("tie-break moved away from its smaller reading")
    travel = mod1(recorded.path_direction.sign * (recorded.destination - s.observer_position))
    limit = (min(s.forward_gaps) - pattern.min_gap_floor) / 2
    if not 0 < travel < limit:
        msgs.append(f"tie-break draw {travel} outside (0, {limit})")
    return msgs


# ---------------------------------------------------------------------------
# batch sweeps

CSV_COLUMNS = (
    "n", "scheduler", "trials", "formed", "max_epochs", "mean_epochs",
    "bound", "violations", "collisions",
)


def make_policy(name: str, p: float = 0.5, fairness: Optional[int] = None) -> ActivationPolicy:
    if name not in POLICIES:
        raise PreconditionError(f"unknown scheduler {name!r}")
    if name == "random":
        return RandomSubset(p, fairness)
    if name == "lazy":
        return LazyAdversary(fairness)
    return POLICIES[name](fairness)


def batch(
    ns: Sequence[int],
    trials: int,
    schedulers: Sequence[str],
    seed: int = 0,
    mode: str = "det",
    max_epochs: Optional[int] = None,
) -> list[dict]:
    """One row per (n, scheduler) cell; run errors become failed cells.

    ``formed`` counts runs that formed and fully terminated; ``max_epochs``
    and ``mean_epochs`` summarise the epochs to formation over formed runs.
    Errors raised by a run (for example a parity/mode mismatch) count as
    violations in the cell instead of crashing the sweep.
    """
    rows: list[dict] = []
    for n in ns:
        cells = {
            name: {"formed": 0, "epochs": [], "violations": 0, "collisions": 0}
            for name in schedulers
        }
        for t in range(trials):
            inst_seed = seed * 1_000_003 + n * 10_007 + t
            try:
                c0, pattern = gen_instance(n, inst_seed)
            except CircleFormError:
                for cell in cells.values():
                    cell["violations"] += 1
                continue
            for name in schedulers:
                cell = cells[name]
                try:
                    report, _ = run(
                        c0, pattern, make_policy(name),
                        mode=mode, seed=inst_seed, max_epochs=max_epochs,
                    )
                except CircleFormError:
                    cell["violations"] += 1
                    continue
                cell["collisions"] += report.collisions
                cell["violations"] += len(report.violations)
                if report.ok:
                    cell["formed"] += 1
                    cell["epochs"].append(report.formed_epoch)
        for name in schedulers:
            cell = cells[name]
            epochs = cell["epochs"]
            rows.append({
                "n": n,
                "scheduler": name,
                "trials": trials,
                "formed": cell["formed"],
                "max_epochs": max(epochs) if epochs else None,
                "mean_epochs": sum(epochs) / len(epochs) if epochs else None,
                "bound": n + 4 if mode == "det" else n + 6,
                "violations": cell["violations"],
                "collisions": cell["collisions"],
            })
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def write_batch_csv(rows: Sequence[dict], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[col]) for col in CSV_COLUMNS])


def format_batch_table(rows: Sequence[dict]) -> str:
    header = [col for col in CSV_COLUMNS]
    body = [[_format_cell(row[col]) for col in CSV_COLUMNS] for row in rows]
    widths = [
        max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in body:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def batch_ok(rows: Sequence[dict]) -> bool:
    return all(
        row["violations"] == 0
        and row["collisions"] == 0
        and row["formed"] == row["trials"]
        and (row["max_epochs"] is None or row["max_epochs"] <= row["bound"])
        for row in rows
    )


# ---------------------------------------------------------------------------
# SVG rendering


def render_svg(positions: Sequence[Fraction], caption: str) -> str:
    """A minimal standalone picture of one configuration."""
    size, r = 400, 160
    cx = cy = size // 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="#888" stroke-width="1"/>',
    ]
    for rid, p in enumerate(positions):
        theta = 2 * math.pi * float(p)
        x = cx + r * math.cos(theta)
        y = cy - r * math.sin(theta)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="#1f6fb2"/>')
        lx = cx + (r + 14) * math.cos(theta)
        ly = cy - (r + 14) * math.sin(theta)
        parts.append(
            f'<text x="{lx:.2f}" y="{ly:.2f}" font-size="11" text-anchor="middle" '
            f'dominant-baseline="middle" fill="#333">{rid}</text>'
        )
    parts.append(
        f'<text x="{cx}" y="{size - 12}" font-size="12" text-anchor="middle" '
        f'fill="#333">{caption}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def render_epoch_svgs(
    c0: Configuration, records: Sequence[RoundRecord], out_dir
) -> list[Path]:
    """Write one frame for the start and one per epoch boundary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / "epoch_000.svg"
    path.write_text(render_svg(c0.positions, "start"))
    written.append(path)
    for i, rec in enumerate(records):
        last = i + 1 == len(records)
        if last or records[i + 1].epoch != rec.epoch:
            path = out / f"epoch_{rec.epoch:03d}.svg"
            path.write_text(
                render_svg(rec.positions_after, f"after epoch {rec.epoch}")
            )
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# command handlers


def _resolve_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("APF_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise PreconditionError(f"APF_SEED must be an integer, got {env!r}")


def _print_report(report: RunReport) -> None:
    if report.formed:
        print(
            f"formed in epoch {report.formed_epoch} (bound {report.bound}); "
            f"{report.epochs} epochs, {report.rounds} rounds, "
            f"{report.terminated}/{report.n} terminated"
        )
    else:
        print(
            f"did not form: {report.epochs} epochs, {report.rounds} rounds, "
            f"{report.terminated}/{report.n} terminated"
        )
    if report.joint_tiebreaks:
        print(f"joint tie-break rounds: {report.joint_tiebreaks}")
    for v in report.violations:
        print(f"violation: {v}")


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.fold > 1:
        per_sector = max(1, args.n // args.fold)
        if per_sector * args.fold != args.n:
            raise PreconditionError("--n must be a multiple of --fold")
        c = symmetric_instance(args.fold, per_sector, seed)
        _, pattern = gen_instance(args.n, seed, args.q)
    else:
        c, pattern = gen_instance(args.n, seed, args.q)
    save_config(c, args.config)
    save_pattern(pattern, args.pattern)
    print(f"wrote {args.config} (n={c.n}, fold={c.fold()}) and {args.pattern}")
    return 0


def _cmd_run(args) -> int:
    c0 = load_config(args.config)
    pattern = load_pattern(args.pattern)
    seed = _resolve_seed(args.seed)
    policy = make_policy(args.scheduler, args.p, args.fairness)
    orientation = OrientationAdversary(args.orientation)
    try:
        report, records = run(
            c0, pattern, policy, orientation,
            mode=args.mode, seed=seed, max_epochs=args.max_epochs,
        )
    except SymmetricConfigurationError as e:
        print(f"Unsolvable: {e}")
        return 2
    _print_report(report)
    if args.trace:
        write_trace(records, args.trace)
        print(f"trace: {args.trace}")
    if args.svg:
        files = render_epoch_svgs(c0, records, args.svg)
        print(f"svg: {len(files)} frames in {args.svg}")
    return 0 if report.ok else 2


def _cmd_batch(args) -> int:
    ns = _parse_int_list(args.ns, "--ns")
    schedulers = [s.strip() for s in args.schedulers.split(",") if s.strip()]
    for s in schedulers:
        if s not in POLICIES:
            raise PreconditionError(f"unknown scheduler {s!r}")
    seed = _resolve_seed(args.seed)
    rows = batch(ns, args.trials, schedulers, seed, args.mode, args.max_epochs)
    print(format_batch_table(rows))
    if args.csv:
        write_batch_csv(rows, args.csv)
        print(f"csv: {args.csv}")
    return 0 if batch_ok(rows) else 2


def _cmd_explore(args) -> int:
    c0 = load_config(args.config)
    pattern = load_pattern(args.pattern)
    report = explore_schedules(c0, pattern, args.budget, mutant=args.mutant)
    print(
        f"explored {report.states} states over {report.edges} scheduled rounds "
        f"(budget {report.budget})"
    )
    if report.counterexample is None:
        print("no counterexample")
        return 0
    ce = report.counterexample
    print(f"counterexample: {ce.reason}")
    print("schedule: " + " ".join("{" + ",".join(map(str, step)) + "}" for step in ce.path))
    print("positions: " + " ".join(format_turn(p) for p in ce.positions))
    return 2


def _cmd_symmetry(args) -> int:
    folds = _parse_int_list(args.folds, "--folds")
    if any(k < 2 for k in folds):
        raise PreconditionError("--folds entries must be at least 2")
    rule = SYMMETRY_RULES.get(args.rule)
    if rule is None:
        raise PreconditionError(f"unknown rule {args.rule!r}")
    seed = _resolve_seed(args.seed)
    rng = Random(seed)
    failures = 0
    for idx in range(args.instances):
        k = folds[idx % len(folds)]
        per_sector = rng.randrange(1, 4)
        while k * per_sector < 3:
            per_sector += 1
        c0 = symmetric_instance(k, per_sector, rng.getrandbits(32))
        try:
            folds_seen = fsync_symmetry_experiment(c0, rule, args.rounds)
        except CircleFormError as e:
            print(f"instance {idx} (fold {k}): FAILED: {e}")
            failures += 1
            continue
        print(
            f"instance {idx} (fold {k}, n {c0.n}): "
            + " -> ".join(map(str, folds_seen))
        )
    return 2 if failures else 0


def _cmd_verify(args) -> int:
    pattern = load_pattern(args.pattern)
    try:
        records = read_trace(args.trace)
    except TraceParseError as e:
        print(f"parse error: {e}")
        return 2
    problems = verify_trace(records, pattern, args.mode)
    if problems:
        for p in problems:
            print(p)
        return 2
    print(f"OK: {len(records)} rounds verified")
    return 0


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise PreconditionError(f"{flag} expects comma-separated integers")
    if not values:
        raise PreconditionError(f"{flag} must name at least one value")
    return values


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1; 2 is reserved for failed checks
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circleform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a seeded instance")
    p.add_argument("--n", type=int, required=True, help="robot count")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--q", type=int, default=None, help="position grid denominator (>= 4n)")
    p.add_argument("--fold", type=int, default=1, help="rotational fold for a symmetric start")
    p.add_argument("--config", required=True, help="output configuration JSON")
    p.add_argument("--pattern", required=True, help="output pattern JSON")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("run", help="simulate one run")
    p.add_argument("--config", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--scheduler", choices=sorted(POLICIES), default="fsync")
    p.add_argument("--p", type=float, default=0.5, help="activation probability (random)")
    p.add_argument("--fairness", type=int, default=None, help="starvation window in rounds")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--mode", choices=("det", "rand"), default="det")
    p.add_argument("--orientation", choices=("random", "fixed-false", "fixed-true"),
                   default="random")
    p.add_argument("--trace", default=None, help="write a JSONL trace here")
    p.add_argument("--svg", default=None, help="write per-epoch SVG frames here")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("batch", help="sweep robot counts and schedulers")
    p.add_argument("--ns", required=True, help="comma-separated robot counts")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--schedulers", default="fsync,rr,random,lazy")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=("det", "rand"), default="det")
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--csv", default=None, help="write the summary CSV here")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("explore", help="exhaustively check schedules")
    p.add_argument("--config", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--budget", type=int, required=True, help="rounds to explore (<= 6)")
    p.add_argument("--mutant", default=None, help="run a deliberately weakened rule")
    p.set_defaults(func=_cmd_explore)

    p = sub.add_parser("symmetry", help="fold trajectories from symmetric starts")
    p.add_argument("--folds", default="2,3,4", help="comma-separated rotation folds")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--rule", choices=sorted(SYMMETRY_RULES), default="drift")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_symmetry)

    p = sub.add_parser("verify", help="replay and audit a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--mode", choices=("det", "rand"), default="det")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (PreconditionError, StructuralError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except CircleFormError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
