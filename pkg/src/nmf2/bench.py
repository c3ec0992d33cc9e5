"""Benchmark harness: seeded instance generation, per-method timing and
quality records, delimited report emission, and aggregate summaries.

Each instance gets its own child PRNG stream spawned from the master seed,
so results are identical no matter how many worker threads run the pool
(capped by the NMF2_THREADS environment variable).
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .anls import AnlsConfig, AnlsResult, anls, anls_batch, materialize_init, objective_batch
from .errors import InputError, Nmf2Error
from .generators import gen_boundary_noise, gen_integer4x4, gen_lognormal
from .linalg import as_matrix

FAMILIES = ("lognormal", "boundary", "int4")
DEFAULT_METHODS = ("qdr", "spa", "nndsvd", "random")
RECORD_FIELDS = (
    "instance_id",
    "method",
    "init_objective",
    "final_objective",
    "delta",
    "delta_init",
    "iters",
    "time_s",
)
SUMMARY_ROWS = ("mean time", "max time", "mean acc", "max acc", "mean acc init", "max acc init")


@dataclass
class GeneratorSpec:
    family: str
    seed: int
    count: int = 1
    m: int = 100
    n: int = 100
    noise_scale: float | None = None
    total: int = 1000

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.count < 1:
            raise InputError("count must be at least 1")
        if self.family != "int4" and (self.m < 2 or self.n < 2):
            raise InputError("matrix dimensions must be at least 2")
        if self.family == "int4" and self.total < 16:
            raise InputError("int4 family needs total >= 16")


@dataclass
class BenchRecord:
    instance_id: int
    method: str
    init_objective: float
    final_objective: float
    delta: float
    delta_init: float
    iters: int
    time_s: float


def generate_instance(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.family == "lognormal":
        return gen_lognormal(spec.m, spec.n, rng)
    if spec.family == "boundary":
        return gen_boundary_noise(spec.m, spec.n, spec.noise_scale, rng)
    return gen_integer4x4(spec.total, rng)


def _pool_size(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("NMF2_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"NMF2_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def _run_instance(instance_id, mat, methods, cfg, init_rng):
    rows = []
    for method in methods:
        start = time.perf_counter()
        try:
            start_nmf = materialize_init(mat, method, init_rng)
            init_obj = float(np.linalg.norm(mat - start_nmf.reconstruct()))
            result: AnlsResult = anls(mat, init=start_nmf, cfg=cfg)
            elapsed = time.perf_counter() - start
            final_obj = float(np.linalg.norm(mat - result.nmf.reconstruct()))
            rows.append([method, init_obj, final_obj, result.iters, elapsed])
        except Nmf2Error:
            rows.append([method, math.nan, math.nan, 0, time.perf_counter() - start])
    finals = [r[2] for r in rows if not math.isnan(r[2])]
    best = min(finals) if finals else math.nan
    records = []
    for method, init_obj, final_obj, iters, elapsed in rows:
        if best > 0 and not math.isnan(final_obj):
            delta = final_obj / best
            delta_init = init_obj / best
        elif best == 0.0 and final_obj == 0.0:
            delta, delta_init = 1.0, 1.0 if init_obj == 0.0 else math.inf
        else:
            delta, delta_init = math.nan, math.nan
        records.append(
            BenchRecord(
                instance_id=instance_id,
                method=method,
                init_objective=init_obj,
                final_objective=final_obj,
                delta=delta,
                delta_init=delta_init,
                iters=iters,
                time_s=elapsed,
            )
        )
    return records


def run_bench(
    spec: GeneratorSpec,
    methods=DEFAULT_METHODS,
    cfg: AnlsConfig | None = None,
    threads: int | None = None,
    warm_up: bool = True,
) -> list[BenchRecord]:
    """Generate ``spec.count`` instances and run ANLS from every method's
    starting point, timing initialization plus iteration per method.

    ``delta`` is each method's final error relative to the best final error
    among the methods on that instance; ``delta_init`` relates the starting
    error to the same baseline. Per-instance failures are recorded as NaN
    rows rather than aborting the batch.
    """
    cfg = cfg or AnlsConfig(epsilon=1e-3, max_iters=1000)
    for method in methods:
        if method not in DEFAULT_METHODS:
            raise InputError(f"unknown init method {method!r}")
    seq = np.random.SeedSequence(spec.seed)
    children = seq.spawn(spec.count + 1)
    if warm_up:
        # untimed run so first-call setup costs do not pollute instance 0
        warm_rng = np.random.default_rng(children[-1])
        try:
            mat = generate_instance(spec, warm_rng)
            _run_instance(-1, mat, methods, cfg, warm_rng)
        except Nmf2Error:
            pass

    def job(i):
        rng = np.random.default_rng(children[i])
        mat = generate_instance(spec, rng)
        return _run_instance(i, mat, methods, cfg, rng)

    workers = _pool_size(threads)
    if workers == 1:
        batches = [job(i) for i in range(spec.count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(job, range(spec.count)))
    records = [rec for batch in batches for rec in batch]
    records.sort(key=lambda r: (r.instance_id, methods.index(r.method)))
    return records


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def write_records_csv(records, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.instance_id,
                    r.method,
                    f"{r.init_objective:.17g}",
                    f"{r.final_objective:.17g}",
                    f"{r.delta:.17g}",
                    f"{r.delta_init:.17g}",
                    r.iters,
                    f"{r.time_s:.6f}",
                ]
            )


def read_records_csv(path: str) -> list[BenchRecord]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                BenchRecord(
                    instance_id=int(row["instance_id"]),
                    method=row["method"],
                    init_objective=float(row["init_objective"]),
                    final_objective=float(row["final_objective"]),
                    delta=float(row["delta"]),
                    delta_init=float(row["delta_init"]),
                    iters=int(row["iters"]),
                    time_s=float(row["time_s"]),
                )
            )
    return out


def aggregate_records(records, methods=None) -> dict[str, dict[str, float]]:
    """Per-method summary: mean/max of time, final quality ratio, and
    initial quality ratio (NaN rows are skipped)."""
    if methods is None:
        methods = []
        for r in records:
            if r.method not in methods:
                methods.append(r.method)
    table = {}
    for method in methods:
        rows = [r for r in records if r.method == method]
        times = [r.time_s for r in rows]
        deltas = [r.delta for r in rows if not math.isnan(r.delta)]
        dinits = [r.delta_init for r in rows if not math.isnan(r.delta_init)]
        table[method] = {
            "mean time": float(np.mean(times)) if times else math.nan,
            "max time": float(np.max(times)) if times else math.nan,
            "mean acc": float(np.mean(deltas)) if deltas else math.nan,
            "max acc": float(np.max(deltas)) if deltas else math.nan,
            "mean acc init": float(np.mean(dinits)) if dinits else math.nan,
            "max acc init": float(np.max(dinits)) if dinits else math.nan,
        }
    return table


def write_summary_csv(table: dict[str, dict[str, float]], path: str) -> None:
    methods = list(table)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stat"] + methods)
        for row_name in SUMMARY_ROWS:
            writer.writerow([row_name] + [f"{table[m][row_name]:.6g}" for m in methods])


# ---------------------------------------------------------------------------
# Multi-restart surrogate optimum (stand-in for a certified database)
# ---------------------------------------------------------------------------

def multi_restart_objective(
    mat,
    restarts: int = 50,
    epsilon: float = 1e-10,
    max_iters: int = 1000,
    seed=0,
) -> float:
    """Best final error over ANLS started from ``restarts`` random points
    plus all four standard initializations. Serves as a surrogate optimum
    where no certified answer is available."""
    mat = as_matrix(mat)
    m, n = mat.shape
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    starts_l, starts_r = [], []
    for method in ("qdr", "spa", "nndsvd", "random"):
        nmf = materialize_init(mat, method, rng)
        starts_l.append(nmf.l)
        starts_r.append(nmf.r)
    for _ in range(restarts):
        nmf = materialize_init(mat, "random", rng)
        starts_l.append(nmf.l)
        starts_r.append(nmf.r)
    l0 = np.stack(starts_l)
    r0 = np.stack(starts_r)
    mats = np.broadcast_to(mat, (l0.shape[0], m, n))
    l, r, _, _ = anls_batch(mats, l0, r0, epsilon=epsilon, max_iters=max_iters)
    return float(objective_batch(mats, l, r).min())
