"""Monte Carlo sampling of discrete Levy areas and empirical characteristic
functions.

Path increments over the dyadic cells are drawn as L z with L the (dense)
Cholesky factor of the increment Gram matrix, one independent standard
normal vector z per process per sample. Randomness comes from the Philox
counter-based generator; the stream for a draw is keyed by

    key = (seed, 2 * sample_index + process_index)

so sample i always sees the same bits no matter how work is batched or how
many worker threads run, and the two processes never share a stream.

The discrete area of one sample is

    sum_{k<l} (d1_k d2_l - d2_k d1_l)

evaluated in O(N) with prefix sums; the reduction over l uses compensated
(Kahan) accumulation over pairwise-summed column chunks, so results are
bit-reproducible and safe for the million-term sums at high levels.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import covariance as cov
from .errors import ParameterError, ShapeError

#: samples per work batch; fixed so outputs never depend on the thread count
BATCH = 4096

MAX_LEVEL = 14


@dataclass(frozen=True)
class MCConfig:
    seed: int
    n_samples: int
    level: int
    kernel1: cov.CovKernel
    kernel2: cov.CovKernel

    def __post_init__(self):
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 1 <= self.level <= MAX_LEVEL:
            raise ParameterError(
                f"dyadic level must lie in [1, {MAX_LEVEL}], got {self.level}"
            )


@dataclass(frozen=True, eq=False)
class MCResult:
    samples: np.ndarray
    mean: float
    variance: float
    config: MCConfig


@dataclass(frozen=True, eq=False)
class EmpiricalCF:
    t_grid: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray


class _StreamSource:
    """Philox generator reused across streams of one worker.

    Re-keying through the state dict is bit-identical to constructing a fresh
    Philox(key=(seed, stream)) and avoids per-stream object churn.
    """

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & (2**64 - 1))
        self._bitgen = np.random.Philox(key=np.zeros(2, dtype=np.uint64))
        self._gen = np.random.Generator(self._bitgen)
        self._template = self._bitgen.state

    def fill(self, stream: int, out: np.ndarray):
        state = dict(self._template)
        state["state"] = {
            "counter": np.zeros(4, dtype=np.uint64),
            "key": np.array([self._seed, np.uint64(stream)], dtype=np.uint64),
        }
        state["buffer"] = np.zeros(4, dtype=np.uint64)
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        self._bitgen.state = state
        self._gen.standard_normal(out.shape[0], out=out)


def _increment_factors(config: MCConfig):
    part = cov.dyadic_partition(config.level)
    factors = []
    for kernel in (config.kernel1, config.kernel2):
        L = cov.cholesky_factor(cov.gram_matrix(kernel, part))
        diag_only = np.count_nonzero(L - np.diag(np.diagonal(L))) == 0
        factors.append((L, diag_only))
    return factors


def _batch_increments(seed, start, count, n, factors):
    source = _StreamSource(seed)
    out = []
    for proc, (L, diag_only) in enumerate(factors):
        Z = np.empty((count, n))
        for i in range(count):
            source.fill(2 * (start + i) + proc, Z[i])
        if diag_only:
            # L z for diagonal L is an elementwise scale, bit-identical to
            # the dense product but without the O(N^2) work per sample
            out.append(Z * np.diagonal(L)[None, :])
        else:
            out.append(Z @ L.T)
    return out


def sample_paths(config: MCConfig):
    """Increment arrays (n_samples, 2^level) for the two processes.

    Materializes everything; intended for moderate n_samples. run_mc streams
    batches instead and never holds more than one batch of increments.
    """
    factors = _increment_factors(config)
    n = 2**config.level
    parts1, parts2 = [], []
    for start in range(0, config.n_samples, BATCH):
        count = min(BATCH, config.n_samples - start)
        inc1, inc2 = _batch_increments(config.seed, start, count, n, factors)
        parts1.append(inc1)
        parts2.append(inc2)
    return np.concatenate(parts1), np.concatenate(parts2)


def _compensated_rowsum(terms: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Kahan accumulation over pairwise-summed column chunks, per row."""
    rows = terms.shape[0]
    total = np.zeros(rows)
    carry = np.zeros(rows)
    for start in range(0, terms.shape[1], chunk):
        y = terms[:, start : start + chunk].sum(axis=1) - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


def _areas_from_increments(inc1: np.ndarray, inc2: np.ndarray) -> np.ndarray:
    p1 = np.empty_like(inc1)
    p2 = np.empty_like(inc2)
    p1[:, 0] = 0.0
    p2[:, 0] = 0.0
    np.cumsum(inc1[:, :-1], axis=1, out=p1[:, 1:])
    np.cumsum(inc2[:, :-1], axis=1, out=p2[:, 1:])
    terms = inc2 * p1 - inc1 * p2
    return _compensated_rowsum(terms)


def discrete_levy_area(increments1, increments2) -> float:
    """Antisymmetrized double sum over k < l of the two increment arrays."""
    a = np.asarray(increments1, dtype=float)
    b = np.asarray(increments2, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise ShapeError(
            f"increment arrays must be 1-d with equal length, got {a.shape} and {b.shape}"
        )
    if a.size == 0:
        return 0.0
    return float(_areas_from_increments(a[None, :], b[None, :])[0])


def run_mc(config: MCConfig, threads: int = 1) -> MCResult:
    """Independent discrete-area draws with summary moments.

    Work is split into fixed-size batches; the thread count changes only the
    scheduling, never the per-sample streams or the reduction order, so the
    samples array is bit-identical for any `threads`.
    """
    factors = _increment_factors(config)
    n = 2**config.level
    areas = np.empty(config.n_samples)
    starts = list(range(0, config.n_samples, BATCH))

    def work(start):
        count = min(BATCH, config.n_samples - start)
        inc1, inc2 = _batch_increments(config.seed, start, count, n, factors)
        areas[start : start + count] = _areas_from_increments(inc1, inc2)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for start in starts:
            work(start)
    mean = float(np.mean(areas))
    variance = float(np.var(areas, ddof=1)) if config.n_samples > 1 else 0.0
    return MCResult(samples=areas, mean=mean, variance=variance, config=config)


def empirical_cf(result: MCResult, t_grid) -> EmpiricalCF:
    """Empirical characteristic function on a grid of real arguments.

    estimate(t) = mean of exp(i t A); at t = 0 this is exactly 1. The per
    component standard error is 1/sqrt(n_samples).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ShapeError("t_grid must be a nonempty 1-d array")
    samples = result.samples
    if samples.size == 0:
        raise ShapeError("empirical CF needs at least one sample")
    estimates = np.empty(len(t), dtype=complex)
    for idx, tk in enumerate(t):
        estimates[idx] = np.mean(np.exp(1j * tk * samples))
    stderr = np.full(len(t), 1.0 / np.sqrt(samples.size))
    return EmpiricalCF(t_grid=t, estimates=estimates, std_errors=stderr)
