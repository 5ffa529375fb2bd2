"""Oracles, input generators, baseline sorts, benchmarking and audits."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numba
import numpy as np
from numba import njit

from . import _kernels
from .drivers import SortReport, reserved_epsilon, sort
from .wordmodel import ModelError, WordModel

DISTRIBUTIONS = ("uniform", "exponential", "adversarial", "bestcase", "all-equal",
                 "sorted", "reverse")
CSV_HEADER = ("algorithm", "n", "m", "beta", "dist", "seed", "passes", "scanned_words",
              "wall_nanos", "verified")


class VerificationError(AssertionError):
    def __init__(self, algorithm, spec, message="output differs from oracle"):
        super().__init__(f"{algorithm} on {spec}: {message} (seed={spec.seed})")
        self.algorithm = algorithm
        self.spec = spec


@dataclass(frozen=True)
class GeneratorSpec:
    distribution: str
    n: int
    m: int
    seed: int = 0

    @property
    def beta(self) -> float:
        return self.m / self.n if self.n else 0.0

    @classmethod
    def from_beta(cls, distribution: str, n: int, beta: float, seed: int = 0):
        if beta <= 0:
            raise ModelError(f"beta must be positive, got {beta}")
        return cls(distribution, n, max(1, round(beta * n)), seed)


@dataclass
class BenchmarkRow:
    algorithm: str
    n: int
    m: int
    beta: float
    dist: str
    seed: int
    passes: int
    scanned_words: int
    wall_nanos: int
    verified: bool

    def as_csv(self) -> list:
        return [self.algorithm, self.n, self.m, f"{self.beta:g}", self.dist, self.seed,
                self.passes, self.scanned_words, self.wall_nanos, str(self.verified).lower()]


def oracle_sort(values) -> list:
    """Ground truth: Python's comparison sort of a copy."""
    return sorted(int(v) for v in values)


def _exponential(rng, n, m):
    # geometric on {0, 1, ...} with mean m/8, truncated to [0, m) by inverse CDF
    if m == 1:
        return np.zeros(n, dtype=np.uint64)
    q = 1.0 - 1.0 / (1.0 + m / 8.0)
    top = 1.0 - q ** m
    u = rng.random(n) * top
    v = np.floor(np.log1p(-u) / math.log(q)).astype(np.int64)
    return np.clip(v, 0, m - 1).astype(np.uint64)


def adversarial_values(n: int, m: int, model: WordModel, epsilon: str = "formula") -> list:
    """Values that let every sequential pass practice exactly one integer.

    Each singleton sits at the first value past the previous pass's
    interval; the rest form one block at ``m - 1`` and are sorted by the
    last pass.  Stops placing singletons when the block would fall inside
    the current interval.
    """
    out = []
    s, r = 0, n
    while r >= 3:
        nxt = s + r - reserved_epsilon(r, model, epsilon)
        if m - 1 < nxt:
            break
        out.append(s)
        s, r = nxt, r - 1
    out.extend([m - 1] * r)
    return out


def generate(spec: GeneratorSpec, model: Optional[WordModel] = None,
             epsilon: str = "formula") -> np.ndarray:
    """Deterministic uint64 input for ``spec``; all values lie in ``[0, m)``."""
    model = model or WordModel()
    n, m = spec.n, spec.m
    if m < 1 or m > model.value_limit:
        raise ModelError(f"m={m} outside [1, 2^{model.w - 1}]")
    if n < 0:
        raise ModelError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(spec.seed)
    d = spec.distribution
    if d in ("uniform", "sorted", "reverse"):
        v = rng.integers(0, m, n, dtype=np.uint64)
        if d != "uniform":
            v.sort()
            if d == "reverse":
                v = v[::-1].copy()
        return v
    if d == "exponential":
        return _exponential(rng, n, m)
    if d == "all-equal":
        return np.full(n, rng.integers(0, m, dtype=np.uint64), dtype=np.uint64)
    if d == "adversarial":
        v = np.array(adversarial_values(n, m, model, epsilon), dtype=np.uint64)
    elif d == "bestcase":
        if n == 0:
            return np.zeros(0, dtype=np.uint64)
        low = max(1, min(m, n // 2))
        v = rng.integers(0, low, n, dtype=np.uint64)
        v[-1] = m - 1
    else:
        raise ModelError(f"unknown distribution {d!r}; expected one of {DISTRIBUTIONS}")
    rng.shuffle(v)
    return v


@njit(cache=True)
def _counting_sort(src, dst, m):
    counts = np.zeros(m, dtype=np.int64)
    for x in src:
        counts[x] += 1
    p = 0
    for v in range(m):
        for _ in range(counts[v]):
            dst[p] = v
            p += 1


@njit(cache=True)
def _radix_sort(a, tmp, top):
    # LSD, 8-bit digits, stops after the highest non-zero digit
    counts = np.zeros(257, dtype=np.int64)
    shift = 0
    src, dst = a, tmp
    while shift < 64 and (top >> np.uint64(shift)) > 0:
        counts[:] = 0
        for x in src:
            counts[((x >> np.uint64(shift)) & np.uint64(255)) + 1] += 1
        for d in range(256):
            counts[d + 1] += counts[d]
        for x in src:
            d = (x >> np.uint64(shift)) & np.uint64(255)
            dst[counts[d]] = x
            counts[d] += 1
        src, dst = dst, src
        shift += 8
    return src


COUNTING_SORT_CAP = 1 << 27


def baseline_counting_sort(values, m: Optional[int] = None, cap: int = COUNTING_SORT_CAP):
    """Textbook counting sort: O(n + m) time, O(m) extra words."""
    values = np.asarray(values, dtype=np.uint64)
    if m is None:
        m = int(values.max()) + 1 if values.size else 1
    if m > cap:
        raise MemoryError(f"counting sort would need {m} counters (cap {cap})")
    out = np.empty_like(values)
    _counting_sort(values, out, m)
    return out


def baseline_radix_sort(values):
    """LSD radix sort on bytes with an n-word scratch buffer."""
    a = np.array(values, dtype=np.uint64)
    if a.size == 0:
        return a
    return _radix_sort(a, np.empty_like(a), a.max()).copy()


def _assoc(variant, epsilon="formula"):
    def run(values, spec, model):
        report = sort(values, model, variant=variant, epsilon=epsilon)
        return values, report
    return run


def _baseline(fn):
    def run(values, spec, model):
        return fn(values), None
    return run


ALGORITHMS: dict[str, Callable] = {
    "sequential": _assoc("sequential"),
    "recursive": _assoc("recursive"),
    "exact-epsilon": _assoc("exact-epsilon"),
    "counting": _baseline(lambda v: baseline_counting_sort(v)),
    "radix": _baseline(baseline_radix_sort),
    "numpy": _baseline(lambda v: np.sort(v, kind="quicksort")),
}
ASSOCIATIVE = ("sequential", "recursive", "exact-epsilon")


def _warm_up(algorithms, model):
    # first calls pay for JIT compilation or cache loading; keep that out of the timings
    spec = GeneratorSpec("uniform", 64, 64)
    for name in algorithms:
        ALGORITHMS[name](generate(spec, model), spec, model)


def run_benchmark(specs: Iterable[GeneratorSpec], algorithms: Iterable[str],
                  repetitions: int = 1, model: Optional[WordModel] = None,
                  verify: bool = True) -> list:
    """Generate, sort, check against the oracle and time every (spec, algorithm) cell.

    Wall time is the median over ``repetitions``; a mismatch raises
    :class:`VerificationError` naming the seed.
    """
    model = model or WordModel()
    algorithms = list(algorithms)
    for name in algorithms:
        if name not in ALGORITHMS:
            raise ModelError(f"unknown algorithm {name!r}; expected one of {sorted(ALGORITHMS)}")
    _warm_up(algorithms, model)
    rows = []
    for spec in specs:
        data = generate(spec, model)
        expected = np.array(oracle_sort(data), dtype=np.uint64) if verify else None
        for name in algorithms:
            times = []
            for _ in range(max(1, repetitions)):
                work = data.copy()
                t0 = time.perf_counter_ns()
                out, report = ALGORITHMS[name](work, spec, model)
                times.append(time.perf_counter_ns() - t0)
            ok = bool(np.array_equal(out, expected)) if verify else False
            if verify and not ok:
                raise VerificationError(name, spec)
            rows.append(BenchmarkRow(
                algorithm=name, n=spec.n, m=spec.m, beta=spec.beta, dist=spec.distribution,
                seed=spec.seed, passes=report.passes if report else 0,
                scanned_words=report.scanned_words if report else 0,
                wall_nanos=int(np.median(times)), verified=ok,
            ))
    return rows


def rows_to_csv(rows, out=None) -> str:
    buf = out or io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue() if out is None else ""


def trace_lines(report: SortReport) -> list:
    return [json.dumps(s.as_trace(k)) for k, s in enumerate(report.per_pass, 1)]


# bounds from the complexity analysis, with the slack stated beside each

def average_pass_bound(n: int) -> int:
    """ceil(log2 n) passes for uniform input at m = n, plus 2 for rounding."""
    return math.ceil(math.log2(n)) + 2


def worst_pass_bound(n: int, m: int) -> int:
    """Passes allowed for adversarial input: ceil((2 beta n - 1) / (n - 1)) + 1."""
    return -(-(2 * m - 1) // (n - 1)) + 1


def work_bound(n: int, m: int) -> int:
    """3 (n + 2m): the linear worst-case bound with a factor 3 for constants."""
    return 3 * (n + 2 * m)


# allocation audit

def _nrt():
    from numba.core.runtime import _nrt_python, rtsys
    _nrt_python.memsys_enable_stats()
    return rtsys


@dataclass
class AllocationAudit:
    kernel_calls: int = 0
    boxed_arrays: int = 0
    nrt_allocs: int = 0
    nrt_frees: int = 0

    @property
    def algorithm_allocs(self) -> int:
        """NRT allocations beyond the one array-view wrapper per boxed argument."""
        return self.nrt_allocs - self.boxed_arrays


class audit_allocations:
    """Count NRT allocations made while the block runs.

    Every kernel in :mod:`assocsort._kernels` is wrapped to count calls; each
    array handed in from Python costs exactly one NRT meminfo for its view, so
    ``algorithm_allocs`` is zero when the kernels themselves allocate nothing.
    """

    def __init__(self, module=_kernels):
        self.module = module
        self.result = AllocationAudit()
        self._saved = {}

    def __enter__(self):
        rtsys = _nrt()
        for name, disp in _kernels_of(self.module).items():
            self._saved[name] = disp
            setattr(self.module, name, self._counting(disp))
        self._before = rtsys.get_allocation_stats()
        return self.result

    def _counting(self, disp):
        result = self.result

        def call(*args):
            result.kernel_calls += 1
            result.boxed_arrays += sum(isinstance(x, np.ndarray) for x in args)
            return disp(*args)
        return call

    def __exit__(self, *exc):
        after = _nrt().get_allocation_stats()
        for name, disp in self._saved.items():
            setattr(self.module, name, disp)
        self.result.nrt_allocs = after.alloc - self._before.alloc
        self.result.nrt_frees = after.free - self._before.free
        return False


def _kernels_of(module) -> dict:
    return {name: obj for name, obj in vars(module).items()
            if isinstance(obj, numba.core.registry.CPUDispatcher)}


def kernel_state_words(dispatcher, signature) -> tuple[int, list]:
    """Scalar words held by a compiled kernel and, transitively, its callees.

    Recompiles ``dispatcher`` without caching to read its type map.  Returns
    the word count along the deepest call chain and any non-scalar locals
    other than the buffer argument (which must be empty).
    """
    fresh = numba.njit(dispatcher.py_func)
    fresh.compile(signature)
    typemap = fresh.overloads[signature].type_annotation.typemap
    own = {}
    callees = []
    foreign = []
    for var, ty in typemap.items():
        if var.startswith("arg."):
            continue
        if var.startswith("$"):
            if isinstance(ty, numba.types.Dispatcher):
                callees.append(ty.dispatcher)
            continue
        name = var.split(".")[0]
        if isinstance(ty, numba.types.Dispatcher):
            callees.append(ty.dispatcher)
        elif isinstance(ty, (numba.types.Integer, numba.types.Boolean,
                             numba.types.IntegerLiteral, numba.types.BooleanLiteral)):
            own[name] = 1
        elif isinstance(ty, numba.types.UniTuple) and isinstance(ty.dtype, numba.types.Integer):
            own[name] = max(own.get(name, 0), ty.count)
        elif isinstance(ty, numba.types.Array) and name == "a":
            own[name] = 1
        elif isinstance(ty, numba.types.NoneType):
            continue
        else:
            foreign.append((name, str(ty)))
    deepest = 0
    for callee in {id(c): c for c in callees}.values():
        for sig in callee.signatures:
            words, bad = kernel_state_words(callee, sig)
            deepest = max(deepest, words)
            foreign.extend(bad)
    return sum(own.values()) + deepest, foreign


def as_dict(row: BenchmarkRow) -> dict:
    return dataclasses.asdict(row)
