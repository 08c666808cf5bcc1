"""The Levy kernel, its dyadic step approximations and exact chaos norms.

The kernel lives on ([0,1] x {1,2})^2 and takes the value +1/2 on the
off-diagonal triangle s < t of the (1,2) block, -1/2 on s > t, with signs
flipped on the (2,1) block and zero diagonal blocks. Its level-n dyadic
approximation replaces the triangles by unions of product cells, which
zeroes out the band of diagonal cells of width 2^-n.

Inner products in the tensor Hilbert space attached to covariance kernels
R_1, R_2 reduce, for step functions, to quadruple sums of cell values against
the two increment Gram matrices; this gives the exact squared norm of any
dyadic approximation. Squared distances between levels are instead computed
by the four-corner reduction: the inner double integral of the sign field
over a product cell collapses to a four-term rectangular increment around
the evaluation point, which is then integrated against the second covariance
as an anchored Riemann-Stieltjes sum on a refinement subgrid. For covariance
kernels with independent increments the anchored sum is exact once the
subgrid is at least as fine as both levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import covariance as cov
from .errors import DomainError, NumericalError, ParameterError

EXACT_SUM = "ExactSum"
REFINED_QUADRATURE = "RefinedQuadrature"

#: entry budget per quadrature sweep block, keeps peak memory ~ tens of MB
_BLOCK = 1 << 20


def kernel_eval(s: float, i: int, t: float, j: int) -> float:
    """Value of the Levy kernel at ((s,i),(t,j)); the diagonal s = t gets 0."""
    _check_index(i)
    _check_index(j)
    if i == j or s == t:
        return 0.0
    base = 0.5 if s < t else -0.5
    return base if (i, j) == (1, 2) else -base


def cell_index(x: float, level: int) -> int:
    """Index of the left-open dyadic cell (t_k, t_{k+1}] containing x; 0 at x=0."""
    return min(max(math.ceil(x * 2**level) - 1, 0), 2**level - 1)


def approx_eval(level: int, s: float, i: int, t: float, j: int) -> float:
    """Value of the level-n step approximation; zero on diagonal cells."""
    if level < 0:
        raise ParameterError(f"approximation level must be >= 0, got {level}")
    _check_index(i)
    _check_index(j)
    if i == j:
        return 0.0
    k = cell_index(s, level)
    l = cell_index(t, level)
    if k == l:
        return 0.0
    base = 0.5 if k < l else -0.5
    return base if (i, j) == (1, 2) else -base


def _check_index(i):
    if i not in (1, 2):
        raise ParameterError(f"process index must be 1 or 2, got {i}")


@dataclass(frozen=True)
class DyadicApprox:
    """Level-n dyadic step approximation of the Levy kernel."""

    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ParameterError(f"approximation level must be >= 1, got {self.level}")

    def eval(self, s, i, t, j):
        return approx_eval(self.level, s, i, t, j)


def split_increment(
    kernel: cov.CovKernel,
    k: int,
    l: int,
    n: int,
    m: int,
    u: float,
    v: float,
) -> float:
    """Four-term covariance increment around (u,v) inside cell I_k^n x I_l^m.

    Splitting the cell at (u,v) into four quadrants, this is the increment
    over the upper-right minus upper-left minus lower-right plus lower-left.
    At the cell's lower-left corner it equals the increment over the whole
    cell; at interior points it interpolates the quadrant cancellations.
    """
    x0, x1 = k * 2.0**-n, (k + 1) * 2.0**-n
    y0, y1 = l * 2.0**-m, (l + 1) * 2.0**-m
    if not (x0 <= u <= x1 and y0 <= v <= y1):
        raise DomainError(
            f"evaluation point ({u}, {v}) outside cell [{x0},{x1}]x[{y0},{y1}]"
        )
    a1 = cov.rect_increment(kernel, cov.Rectangle(u, x1, v, y1))
    a2 = cov.rect_increment(kernel, cov.Rectangle(x0, u, v, y1))
    a3 = cov.rect_increment(kernel, cov.Rectangle(u, x1, y0, v))
    a4 = cov.rect_increment(kernel, cov.Rectangle(x0, u, y0, v))
    return a1 - a2 - a3 + a4


@dataclass(frozen=True)
class SplitIncrement:
    """Evaluator of split_increment bound to one cell of one covariance."""

    kernel: cov.CovKernel
    k: int
    l: int
    n: int
    m: int

    def __call__(self, u: float, v: float) -> float:
        return split_increment(self.kernel, self.k, self.l, self.n, self.m, u, v)


@dataclass(frozen=True)
class ChaosNorm:
    """A squared tensor-space norm with its evaluation metadata."""

    value: float
    level_pair: tuple
    refine: int
    method: str


def _default_refine(n: int, m: int, r1, r2) -> int:
    base = max(n, m)
    if cov.has_independent_increments(r1) and cov.has_independent_increments(r2):
        return base + 1
    return base + 2


def _axis_bounds(r: int, level: int):
    """Anchors and enclosing level-cell bounds for every level-r subcell."""
    idx = np.arange(2**r)
    anchors = idx / 2.0**r
    coarse = idx >> (r - level)
    lo = coarse / 2.0**level
    hi = lo + 2.0**-level
    return anchors, lo, hi


def _star_term(r1: cov.CovKernel, r2: cov.CovKernel, n: int, m: int, refine: int) -> float:
    """Anchored quadrature of the four-corner field against the paired Gram.

    One term per off-diagonal block ordering: the field of the first
    covariance on the level-(n,m) cell geometry integrated dR of the second,
    plus the mirrored term. The anchored sum runs on the level-refine subgrid.
    """
    u, t0, t1 = _axis_bounds(refine, n)
    v, s0, s1 = _axis_bounds(refine, m)
    total = 0.0
    for P, Q in ((r1, r2), (r2, r1)):
        gram_q = cov.gram_matrix(Q, cov.dyadic_partition(refine)).matrix
        size = len(u)
        block = max(1, _BLOCK // size)
        acc = []
        for start in range(0, size, block):
            sl = slice(start, start + block)
            field = (
                cov.eval_grid(P, t1[sl], s1)
                + cov.eval_grid(P, t1[sl], s0)
                + cov.eval_grid(P, t0[sl], s1)
                + cov.eval_grid(P, t0[sl], s0)
                - 2.0 * (
                    cov.eval_grid(P, t1[sl], v)
                    + cov.eval_grid(P, t0[sl], v)
                    + cov.eval_grid(P, u[sl], s1)
                    + cov.eval_grid(P, u[sl], s0)
                )
                + 4.0 * cov.eval_grid(P, u[sl], v)
            )
            acc.append(np.sum(field * gram_q[sl]))
        total += float(np.sum(acc))
    return 0.25 * total


def cell_sign_matrix(level: int, refine: int) -> np.ndarray:
    """Step values of the level-n approximation on the level-refine cell grid."""
    if refine < level:
        raise ParameterError(f"refine level {refine} is below the approximation level {level}")
    coarse = np.arange(2**refine) >> (refine - level)
    return 0.5 * np.sign(coarse[None, :] - coarse[:, None])


def norm_approx(
    n: int,
    r1: cov.CovKernel,
    r2: cov.CovKernel,
    refine: int | None = None,
) -> ChaosNorm:
    """Exact squared tensor norm of the level-n approximation.

    The approximation is a step function on any subgrid at least as fine as
    its own level, so its norm is the exact quadruple sum of cell values
    against the two increment Gram matrices, contracted as
    2 * tr(G_1 A G_2 A^T). Exact for every kernel at every admissible refine.
    """
    if n < 1:
        raise ParameterError(f"approximation level must be >= 1, got {n}")
    refine = _resolve_refine(n, 0, r1, r2, refine)
    A = cell_sign_matrix(n, refine)
    g1 = cov.gram_matrix(r1, cov.dyadic_partition(refine)).matrix
    g2 = cov.gram_matrix(r2, cov.dyadic_partition(refine)).matrix
    value = 2.0 * float(np.sum((g1 @ A) * (A @ g2)))
    return ChaosNorm(value=value, level_pair=(n, n), refine=refine, method=EXACT_SUM)


def norm_diff(
    n: int,
    m: int,
    r1: cov.CovKernel,
    r2: cov.CovKernel,
    refine: int | None = None,
) -> ChaosNorm:
    """Squared tensor distance between the level-n and level-m approximations.

    Assembled from four corner-field quadratures via the bilinear expansion
    of the difference; exact for independent-increment covariances once
    refine > max(n, m), quadrature-converged otherwise.
    """
    if n < 1 or m < 1:
        raise ParameterError(f"approximation levels must be >= 1, got ({n}, {m})")
    refine = _resolve_refine(n, m, r1, r2, refine)
    stars = {}
    for pair in dict.fromkeys([(n, n), (m, m), (n, m), (m, n)]):
        stars[pair] = _star_term(r1, r2, pair[0], pair[1], refine)
    value = stars[(n, n)] + stars[(m, m)] - stars[(n, m)] - stars[(m, n)]
    scale = abs(stars[(n, n)]) + abs(stars[(m, m)]) + 1e-300
    if value < 0.0:
        if value < -1e-10 * scale:
            raise NumericalError(
                f"squared distance came out negative ({value:.3e}) at refine {refine}"
            )
        value = 0.0
    exact = cov.has_independent_increments(r1) and cov.has_independent_increments(r2)
    return ChaosNorm(
        value=value,
        level_pair=(n, m),
        refine=refine,
        method=EXACT_SUM if exact else REFINED_QUADRATURE,
    )


def _resolve_refine(n, m, r1, r2, refine):
    if refine is None:
        return _default_refine(n, m, r1, r2)
    if refine < max(n, m):
        raise ParameterError(
            f"refine level {refine} is below the approximation levels ({n}, {m})"
        )
    return refine


def existence_check(p: float, q: float) -> bool:
    """Complementary-variation condition for the limit object to exist."""
    return 1.0 / p + 1.0 / q > 1.0


def fbm_variation_index(hurst: float) -> float:
    """1/(2H) for rough fractional kernels, 1 for bounded variation."""
    if not 0.0 < hurst < 1.0:
        raise ParameterError(f"Hurst parameter must lie in (0,1), got {hurst}")
    return 1.0 / (2.0 * hurst) if hurst <= 0.5 else 1.0


def fbm_existence_check(h1: float, h2: float) -> bool:
    return existence_check(fbm_variation_index(h1), fbm_variation_index(h2))


COVERED = "covered"
NOT_COVERED = "not-covered-by-theorem"
UNKNOWN = "unknown-variation"


def coverage_flag(r1: cov.CovKernel, r2: cov.CovKernel) -> str:
    """Whether the kernel pair satisfies the existence condition, if decidable."""
    p = cov.variation_index(r1)
    q = cov.variation_index(r2)
    if p is None or q is None:
        return UNKNOWN
    return COVERED if existence_check(p, q) else NOT_COVERED


@dataclass(frozen=True)
class CauchyTable:
    rows: tuple  # ((n, m, ChaosNorm), ...)
    slope: float | None
    flag: str

    def csv(self) -> str:
        lines = ["n,m,norm_sq,refine,flag"]
        for n, m, norm in self.rows:
            lines.append(f"{n},{m},{norm.value:.17g},{norm.refine},{self.flag}")
        return "\n".join(lines) + "\n"


def cauchy_table(
    levels,
    r1: cov.CovKernel,
    r2: cov.CovKernel,
    refine: int | None = None,
) -> CauchyTable:
    """Distances across consecutive levels with a fitted dyadic decay rate.

    The slope is the least-squares fit of log2(norm_sq) against n over the
    consecutive pairs (n, n+1); -1 means norm_sq halves per level.
    """
    levels = [int(x) for x in levels]
    if len(levels) < 2 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ParameterError("levels must be an increasing list with at least two entries")
    rows = []
    for a, b in zip(levels, levels[1:]):
        rows.append((a, b, norm_diff(a, b, r1, r2, refine=refine)))
    xs = [a for a, _, norm in rows if norm.value > 0]
    ys = [math.log2(norm.value) for _, _, norm in rows if norm.value > 0]
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else None
    return CauchyTable(rows=tuple(rows), slope=slope, flag=coverage_flag(r1, r2))
