"""Command line entry point.

Subcommands::

    kmseed run          experiment grid -> per-trial and summary CSV rows
    kmseed bounds       table of guarantees for one configuration
    kmseed export       write a generated instance as a dataset CSV
    kmseed equivalence  TV distance between ER k-means++ and k-means++ outcomes
    kmseed coverage     covered/uncovered replay of seeded k-means++ runs

Exit codes: 0 success, 2 input error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds as _bounds
from .diagnostics import REPORT_COLUMNS, EquivalenceResult, coverage_report, report_rows, tv_distance
from .geometry import AllCoveredError, Dataset, as_dataset
from .instances import (
    GroundTruthInstance,
    bicriteria_lb_instance,
    synthetic_blobs,
    tight_covered_instance,
)
from .parallel import ParallelConfig, kmeans_parallel, kmeans_parallel_pois, kmeans_parallel_pruned
from .race import RaceConfig, er_kmeanspp
from .rng import derived_rng, make_rng
from .seeding import CenterList, kmeanspp, prune

ALGORITHMS = ("kmeanspp", "bicriteria+prune", "kpar", "kpar+prune", "kpar_pois", "er")
RESULT_COLUMNS = ("row_type", "algorithm", "k", "trial", "n_centers", "cost", "normalized_cost", "stderr")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


# ---------------------------------------------------------------- ingestion


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def ingest_csv(path) -> Dataset:
    """Read a UTF-8 CSV with one point per row.

    A first row with any non-numeric cell is a header.  A header whose last
    column is named ``weight`` makes that column the point weights.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if r and any(c.strip() for c in r)]
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"{path} is not valid UTF-8") from e
    if not rows:
        raise InputError(f"{path}: empty file")

    has_weight = False
    if not all(_is_number(c) for c in rows[0][1]):
        header = [c.strip().lower() for c in rows[0][1]]
        has_weight = header[-1] == "weight"
        width = len(header)
        rows = rows[1:]
        if not rows:
            raise InputError(f"{path}: header but no data rows")
    else:
        width = len(rows[0][1])

    values = np.empty((len(rows), width))
    for j, (lineno, r) in enumerate(rows):
        if len(r) != width:
            raise InputError(f"{path}: row {lineno} has {len(r)} columns, expected {width}")
        for c, cell in enumerate(r):
            try:
                v = float(cell)
            except ValueError:
                raise InputError(f"{path}: row {lineno} column {c + 1}: non-numeric value {cell.strip()!r}") from None
            if not math.isfinite(v):
                raise InputError(f"{path}: row {lineno} column {c + 1}: non-finite value {cell.strip()!r}")
            values[j, c] = v

    if has_weight:
        if width < 2:
            raise InputError(f"{path}: a weight column needs at least one coordinate column")
        pts, w = values[:, :-1], values[:, -1]
        if np.any(w < 0):
            bad = rows[int(np.argmax(w < 0))][0]
            raise InputError(f"{path}: row {bad}: negative weight")
    else:
        pts, w = values, None
    try:
        return as_dataset(pts, w)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e


def write_dataset_csv(X: Dataset, fh) -> None:
    pts = X.dense()
    cols = [f"x{j}" for j in range(X.d)]
    weighted = not X.unit_weights
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(cols + (["weight"] if weighted else []))
    for i in range(X.n):
        row = [repr(float(v)) for v in pts[i]]
        if weighted:
            row.append(repr(float(X.weights[i])))
        wr.writerow(row)


# ---------------------------------------------------------------- generators


def _ints(text: str, n: int, what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != n:
        raise InputError(f"{what} expects {n} comma-separated values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{what}: non-numeric parameter in {text!r}") from None


def parse_generator(text: str, seed: int) -> GroundTruthInstance:
    """``blobs:k,n,d,sep`` | ``tight:t`` | ``lb:k,delta,N``."""
    kind, _, args = text.partition(":")
    try:
        if kind == "blobs":
            k, n, d, sep = _ints(args, 4, "blobs")
            if k < 1 or n < k:
                raise InputError("blobs needs 1 <= k <= n")
            return synthetic_blobs(int(k), int(n) // int(k), int(d), sep, derived_rng(seed, 0xB10B))
        if kind == "tight":
            (t,) = _ints(args, 1, "tight")
            return tight_covered_instance(int(t))
        if kind == "lb":
            k, delta, N = _ints(args, 3, "lb")
            return bicriteria_lb_instance(int(k), int(delta), int(N))
    except InputError:
        raise
    except ValueError as e:
        raise InputError(f"generator {text!r}: {e}") from e
    raise InputError(f"unknown generator {kind!r}; expected blobs, tight or lb")


# ---------------------------------------------------------------- experiments


@dataclass
class ExperimentSpec:
    """One experiment grid.

    ``ell`` and ``delta`` are multiples of ``k``.  ``ell=None`` uses each
    algorithm's default: ``1/rounds`` for kpar and kpar_pois (so
    ``ell * rounds = k``), ``1`` for kpar+prune and er.  ``delta`` defaults
    to 4 (oversampling to ``5k`` like kpar+prune with five rounds).
    """

    dataset: Dataset
    algorithms: tuple[str, ...]
    ks: tuple[int, ...]
    trials: int = 1
    seed: int = 0
    ell: float | None = None
    rounds: int = 5
    delta: float = 4.0
    r_star: int | None = None
    normalize_k: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if not self.ks:
            raise InputError("k grid is empty")
        if min(self.ks) < 1:
            raise InputError("every k must be >= 1")
        if not self.algorithms:
            raise InputError("no algorithms given")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise InputError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if max(self.ks) > self.dataset.n:
            raise InputError(f"dataset has {self.dataset.n} points, fewer than k={max(self.ks)}")
        if self.rounds < 1:
            raise InputError("rounds must be >= 1")
        if self.ell is not None and not self.ell > 0:
            raise InputError("ell must be positive")
        if self.delta < 0:
            raise InputError("delta must be >= 0")
        if self.normalize_k is not None and not 1 <= self.normalize_k <= self.dataset.n:
            raise InputError(f"normalize-k must be in [1, {self.dataset.n}]")

    @property
    def k_ref(self) -> int:
        if self.normalize_k is not None:
            return self.normalize_k
        top = max(self.ks)
        return min(10 * top, max(top, self.dataset.n // 2))


def run_algorithm(name: str, X: Dataset, k: int, spec: ExperimentSpec, rng: np.random.Generator) -> CenterList:
    if name == "kmeanspp":
        return kmeanspp(X, k, rng)
    if name == "bicriteria+prune":
        over = kmeanspp(X, k + int(round(spec.delta * k)), rng)
        return over if len(over) <= k else prune(X, over, k, rng)
    if name in ("kpar", "kpar_pois"):
        ell = (spec.ell if spec.ell is not None else 1.0 / spec.rounds) * k
        cfg = ParallelConfig(k, ell, spec.rounds)
        return (kmeans_parallel if name == "kpar" else kmeans_parallel_pois)(X, cfg, rng)
    if name == "kpar+prune":
        ell = (spec.ell if spec.ell is not None else 1.0) * k
        return kmeans_parallel_pruned(X, ParallelConfig(k, ell, spec.rounds), rng)
    if name == "er":
        ell = (spec.ell if spec.ell is not None else 1.0) * k
        return er_kmeanspp(X, RaceConfig(k, ell, spec.r_star), rng).centers
    raise InputError(f"unknown algorithm {name!r}")


def _map(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def _check(cost: float, what: str) -> float:
    if not math.isfinite(cost):
        raise NumericError(f"non-finite cost in {what}")
    return cost


@dataclass
class ExperimentResult:
    rows: list[tuple]
    k_ref: int
    ref_cost: float

    def summary(self) -> dict[tuple[str, int], tuple[float, float]]:
        """``(algorithm, k) -> (mean normalized cost, stderr)``."""
        return {(r[1], r[2]): (r[6], r[7]) for r in self.rows if r[0] == "summary"}

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(RESULT_COLUMNS)
        for r in self.rows:
            wr.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in r])
        return buf.getvalue()


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every (algorithm, k, trial) and normalise by the mean k-means++
    cost at ``k_ref``.

    Trial ``i`` of algorithm ``a`` at ``k`` uses the stream keyed by
    ``(index of a in ALGORITHMS, k, i)``, so results do not depend on the
    worker count or on which other algorithms are in the grid.
    """
    X = spec.dataset
    ref_key = len(ALGORITHMS)

    def ref_trial(i):
        return _check(kmeanspp(X, spec.k_ref, derived_rng(spec.seed, ref_key, spec.k_ref, i)).cost, "reference run")

    ref = math.fsum(_map(ref_trial, range(spec.trials), spec.workers)) / spec.trials
    if not ref > 0:
        raise NumericError(f"mean k-means++ cost at k_ref={spec.k_ref} is zero; pick a smaller --normalize-k")

    tasks = [(a, k, i) for a in sorted(set(spec.algorithms)) for k in sorted(set(spec.ks)) for i in range(spec.trials)]

    def one(task):
        a, k, i = task
        try:
            res = run_algorithm(a, X, k, spec, derived_rng(spec.seed, ALGORITHMS.index(a), k, i))
        except AllCoveredError as e:
            raise NumericError(f"{a} at k={k}: {e}") from e
        return a, k, i, len(res), _check(res.cost, f"{a} at k={k}")

    out = sorted(_map(one, tasks, spec.workers))
    rows: list[tuple] = []
    for a, k, i, m, cost in out:
        rows.append(("trial", a, k, i, m, cost, cost / ref, None))
    groups: dict[tuple[str, int], list[float]] = {}
    for a, k, _, _, cost in out:
        groups.setdefault((a, k), []).append(cost / ref)
    for (a, k), vals in sorted(groups.items()):
        v = np.asarray(vals)
        se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
        rows.append(("summary", a, k, None, None, float(np.mean(v) * ref), float(np.mean(v)), se))
    return ExperimentResult(rows, spec.k_ref, ref)


# ---------------------------------------------------------------- bounds / equivalence


def emit_bounds(
    k: int,
    ell: float | None = None,
    T: int | None = None,
    delta: int | None = None,
    r_star: int | None = None,
    opt1: float | None = None,
    optk: float | None = None,
) -> str:
    """CSV with one ``bound,value`` row per bound identifier."""
    try:
        tab = _bounds.bound_table(k, ell, T, delta, r_star, opt1, optk)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(str(e)) from e
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(("bound", "value"))
    for name, value in tab.rows():
        wr.writerow((name, "" if value is None else repr(float(value))))
    return buf.getvalue()


def equivalence_cmd(
    X: Dataset,
    k: int,
    trials: int,
    seed: int,
    ell: float | None = None,
) -> tuple[EquivalenceResult, EquivalenceResult]:
    """TV distance between ER k-means++ (no round cap) and k-means++ ordered
    center tuples, plus a k-means++ vs k-means++ noise floor at the same
    sample size."""
    if trials < 1:
        raise InputError("trials must be >= 1")
    if not 1 <= k <= X.n:
        raise InputError(f"k must be in [1, {X.n}]")
    cfg = RaceConfig(k, float(k) if ell is None else ell)
    r1, r2, r3 = (make_rng(np.random.SeedSequence(seed, spawn_key=(j,))) for j in range(3))
    er = [er_kmeanspp(X, cfg, r1).centers.key() for _ in range(trials)]
    pp = [kmeanspp(X, k, r2).key() for _ in range(trials)]
    pp2 = [kmeanspp(X, k, r3).key() for _ in range(trials)]
    return tv_distance(er, pp), tv_distance(pp, pp2)


# ---------------------------------------------------------------- argparse


def _k_list(text: str) -> tuple[int, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi, *step = (int(v) for v in part.split(":"))
            out.extend(range(lo, hi + 1, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def _load(args) -> tuple[Dataset, GroundTruthInstance | None]:
    if args.data and args.generator:
        raise InputError("give either --data or --generator, not both")
    if args.data:
        return ingest_csv(args.data), None
    if args.generator:
        inst = parse_generator(args.generator, args.seed)
        return inst.dataset, inst
    raise InputError("a dataset is required: --data FILE or --generator SPEC")


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kmseed", description="k-means seeding experiments and bound tables.")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp):
        sp.add_argument("--data", help="dataset CSV (optional header, optional final 'weight' column)")
        sp.add_argument("--generator", help="blobs:k,n,d,sep | tight:t | lb:k,delta,N")
        sp.add_argument("--seed", type=int, default=0, help="master seed")
        sp.add_argument("--out", help="output CSV path (default stdout)")

    r = sub.add_parser("run", help="run an experiment grid")
    data_args(r)
    r.add_argument("--algo", default="kmeanspp", help=f"comma list from {', '.join(ALGORITHMS)}")
    r.add_argument("--k", required=True, help="k grid, e.g. 10,20 or 10:50:5")
    r.add_argument("--ell", type=float, help="oversampling factor as a multiple of k")
    r.add_argument("--rounds", type=int, default=5, help="rounds for the kpar family")
    r.add_argument("--delta", type=float, default=4.0, help="extra centers for bicriteria+prune, multiple of k")
    r.add_argument("--rstar", type=int, help="round cap for er")
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--normalize-k", type=int, help="k of the reference k-means++ run (default 10 * max k)")
    r.add_argument("--workers", type=int, default=1)

    b = sub.add_parser("bounds", help="emit the bound table")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--ell", type=float, help="oversampling factor as a multiple of k")
    b.add_argument("--rounds", type=int)
    b.add_argument("--delta", type=int, help="extra centers (absolute)")
    b.add_argument("--rstar", type=int)
    b.add_argument("--opt1", type=float)
    b.add_argument("--optk", type=float)
    b.add_argument("--out")

    e = sub.add_parser("export", help="write a generated instance as dataset CSV")
    e.add_argument("--generator", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")

    q = sub.add_parser("equivalence", help="TV distance between er and kmeanspp outcomes")
    data_args(q)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--ell", type=float, help="multiple of k (default 1)")
    q.add_argument("--trials", type=int, default=10000)

    c = sub.add_parser("coverage", help="covered/uncovered replay of k-means++ on a generated instance")
    c.add_argument("--generator", required=True)
    c.add_argument("--trials", type=int, default=1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            X, _ = _load(args)
            try:
                ks = _k_list(args.k)
            except ValueError:
                raise InputError(f"bad --k grid {args.k!r}") from None
            spec = ExperimentSpec(
                X,
                tuple(a.strip() for a in args.algo.split(",") if a.strip()),
                ks,
                trials=args.trials,
                seed=args.seed,
                ell=args.ell,
                rounds=args.rounds,
                delta=args.delta,
                r_star=args.rstar,
                normalize_k=args.normalize_k,
                workers=args.workers,
            )
            _write(run_experiment(spec).to_csv(), args.out)
        elif args.command == "bounds":
            ell = None if args.ell is None else args.ell * args.k
            _write(emit_bounds(args.k, ell, args.rounds, args.delta, args.rstar, args.opt1, args.optk), args.out)
        elif args.command == "export":
            inst = parse_generator(args.generator, args.seed)
            buf = io.StringIO()
            write_dataset_csv(inst.dataset, buf)
            _write(buf.getvalue(), args.out)
        elif args.command == "equivalence":
            X, _ = _load(args)
            ell = None if args.ell is None else args.ell * args.k
            res, floor = equivalence_cmd(X, args.k, args.trials, args.seed, ell)
            buf = io.StringIO()
            wr = csv.writer(buf, lineterminator="\n")
            wr.writerow(("comparison", "tv_distance", "trials_a", "trials_b", "outcomes"))
            wr.writerow(("er_vs_kmeanspp", repr(res.tv_distance), res.trials_a, res.trials_b, res.outcomes))
            wr.writerow(("kmeanspp_vs_kmeanspp", repr(floor.tv_distance), floor.trials_a, floor.trials_b, floor.outcomes))
            _write(buf.getvalue(), args.out)
        elif args.command == "coverage":
            inst = parse_generator(args.generator, args.seed)
            if args.trials < 1:
                raise InputError("trials must be >= 1")
            buf = io.StringIO()
            wr = csv.writer(buf, lineterminator="\n")
            wr.writerow(REPORT_COLUMNS)
            for i in range(args.trials):
                cl = kmeanspp(inst.dataset, inst.k, derived_rng(args.seed, 0, inst.k, i))
                rep = coverage_report(inst.dataset, inst.labels, cl)
                for row in report_rows(rep, args.generator, "kmeanspp", f"{args.seed}.{i}"):
                    wr.writerow([repr(v) if isinstance(v, float) else v for v in row])
            _write(buf.getvalue(), args.out)
    except InputError as e:
        print(f"kmseed: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, FloatingPointError) as e:
        print(f"kmseed: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"kmseed: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
