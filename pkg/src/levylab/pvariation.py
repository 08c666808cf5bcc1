"""Grid p-variation estimates, control-map audits and the 2D Young integral.

1D variation of f over sample points x_0 < ... < x_n is the supremum of

    ( sum_i |f(x_{i+1'}) - f(x_{i'})|^p )^{1/p}

over all sub-partitions of the samples; on a fixed sample set this supremum
is computed exactly by dynamic programming. The 2D analogue replaces point
differences with rectangular increments over a partition pair. The true 2D
supremum over arbitrary partition pairs is combinatorially explosive, so
``v2p_grid`` sums |increment|^p over the full dyadic product grid of a given
level and reports it as a lower bound; ``variation_profile`` tracks that
bound over a refinement ladder and classifies its behaviour.

The Young integral of f against a kernel g is the anchored Riemann-Stieltjes
sum over dyadic cells (anchor = lower-left corner, matching left-closed dyadic
cell conventions up to continuity). Its classical bound

    |I| <= c(p,q) ||f||_{W_p^2} V_q^2(g),   1/p + 1/q > 1,

has an unspecified constant c(p,q), so the ratio |I| / (||f|| V_q^2(g)) is
reported for inspection rather than asserted.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import covariance as cov
from .errors import ParameterError, ResourceError

#: relative tolerance deciding that a profile has stabilized
PROFILE_TOL = 1e-3
#: per-level growth ratio classifying a profile as growing
GROWTH_FACTOR = 1.2
#: numerical slack allowed in superadditivity audits
SLACK_TOL = 1e-9
#: default cap on dyadic grid levels (4096^2 cells)
MAX_LEVEL = 12

STABILIZING = "Stabilizing"
GROWING = "Growing"
INCONCLUSIVE = "Inconclusive"


def v1p(samples, p: float) -> float:
    """Exact 1D p-variation over all sub-partitions of the sample points.

    samples: sequence of (point, value) pairs with strictly increasing points.
    """
    if p < 1.0:
        raise ParameterError(f"variation exponent must satisfy p >= 1, got {p}")
    pts = np.asarray([s[0] for s in samples], dtype=float)
    vals = np.asarray([s[1] for s in samples], dtype=float)
    if len(pts) and np.any(np.diff(pts) <= 0):
        raise ParameterError("sample points must be strictly increasing")
    n = len(vals)
    if n < 2:
        return 0.0
    # best[j] = max over sub-partitions ending at j of sum |delta|^p
    best = np.zeros(n)
    for j in range(1, n):
        best[j] = np.max(best[:j] + np.abs(vals[j] - vals[:j]) ** p)
    return float(best[-1] ** (1.0 / p))


def v1p_exhaustive(samples, p: float) -> float:
    """Reference implementation: enumerate every sub-partition.

    Exponential in the sample count; intended for grids with <= 6 points.
    """
    if p < 1.0:
        raise ParameterError(f"variation exponent must satisfy p >= 1, got {p}")
    vals = [float(s[1]) for s in samples]
    n = len(vals)
    if n < 2:
        return 0.0
    interior = range(1, n - 1)
    sup = 0.0
    for r in range(0, n - 1):
        for choice in combinations(interior, r):
            idx = (0,) + choice + (n - 1,)
            total = sum(
                abs(vals[idx[k + 1]] - vals[idx[k]]) ** p for k in range(len(idx) - 1)
            )
            sup = max(sup, total)
    return sup ** (1.0 / p)


def v2p_grid(kernel, p: float, level: int, max_level: int = MAX_LEVEL) -> float:
    """(sum over level-n product-grid cells |rect increment|^p)^{1/p}.

    A lower bound of the true 2D p-variation (the supremum is restricted to
    the full dyadic product partition of the given level).
    """
    if p < 1.0:
        raise ParameterError(f"variation exponent must satisfy p >= 1, got {p}")
    if level > max_level:
        raise ResourceError(f"grid level {level} exceeds cap {max_level}")
    inc = cov.gram_matrix(kernel, cov.dyadic_partition(level)).matrix
    return float(np.sum(np.abs(inc) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class VariationProfile:
    p: float
    levels: tuple  # ((level, estimate), ...)
    verdict: str

    def estimates(self):
        return [e for _, e in self.levels]


def variation_profile(
    kernel,
    p: float,
    max_level: int,
    profile_tol: float = PROFILE_TOL,
    growth_factor: float = GROWTH_FACTOR,
) -> VariationProfile:
    """Ladder of v2p_grid estimates for levels 1..max_level with a verdict.

    Stabilizing: the last two estimates agree to profile_tol relatively.
    Growing: each of the last three refinement steps multiplies the estimate
    by at least growth_factor. Otherwise inconclusive.
    """
    ests = [(n, v2p_grid(kernel, p, n, max_level=max(max_level, MAX_LEVEL)))
            for n in range(1, max_level + 1)]
    vals = [e for _, e in ests]
    verdict = INCONCLUSIVE
    if len(vals) >= 2:
        a, b = vals[-2], vals[-1]
        if abs(b - a) <= profile_tol * max(abs(a), 1e-300):
            verdict = STABILIZING
        elif len(vals) >= 4 and all(
            vals[i + 1] >= growth_factor * vals[i] for i in range(len(vals) - 4, len(vals) - 1)
        ):
            verdict = GROWING
    return VariationProfile(p=p, levels=tuple(ests), verdict=verdict)


def profile_csv(profile: VariationProfile) -> str:
    lines = ["level,estimate,verdict"]
    for level, est in profile.levels:
        lines.append(f"{level},{est:.17g},{profile.verdict}")
    return "\n".join(lines) + "\n"


def area_control():
    """The area measure, the canonical 2D control."""
    return lambda rect: (rect.s1 - rect.s0) * (rect.u1 - rect.u0)


def grid_control(kernel, p: float, level: int = 6):
    """Control candidate omega(rect) = sum |increment|^p over a local grid.

    The p-th power of the grid p-variation of the kernel restricted to the
    rectangle, evaluated on a uniform 2^level subdivision of the rectangle.
    """
    if p < 1.0:
        raise ParameterError(f"variation exponent must satisfy p >= 1, got {p}")
    n = 2**level

    def omega(rect):
        xs = np.linspace(rect.s0, rect.s1, n + 1)
        ys = np.linspace(rect.u0, rect.u1, n + 1)
        corners = cov.eval_grid(kernel, xs, ys)
        inc = np.diff(np.diff(corners, axis=0), axis=1)
        return float(np.sum(np.abs(inc) ** p))

    return omega


@dataclass(frozen=True)
class ControlEstimate:
    """One control evaluation omega(rect)^{1/exponent} pinned to its rectangle."""

    rectangle: cov.Rectangle
    value: float
    exponent: float

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError(f"control values must be >= 0, got {self.value}")


@dataclass(frozen=True)
class ControlReport:
    trials: int
    max_violation: float
    n_violations: int
    slack: float
    worst_case: tuple | None = None  # (whole, left, right) ControlEstimates

    @property
    def ok(self) -> bool:
        return self.n_violations == 0


def control_product_check(
    omega1,
    omega2,
    p: float,
    q: float,
    trials: int = 1000,
    seed: int = 0,
    slack: float = SLACK_TOL,
) -> ControlReport:
    """Randomized superadditivity audit of omega1^{1/p} * omega2^{1/q}.

    Requires 1/p + 1/q >= 1; splits random rectangles along both axes and
    reports the worst violation of omega(left) + omega(right) <= omega(whole).
    """
    if p <= 0 or q <= 0 or 1.0 / p + 1.0 / q < 1.0:
        raise ParameterError(
            f"control product requires 1/p + 1/q >= 1, got p={p}, q={q}"
        )
    rng = np.random.default_rng(seed)

    def estimate(rect):
        value = omega1(rect) ** (1.0 / p) * omega2(rect) ** (1.0 / q)
        return ControlEstimate(rectangle=rect, value=float(value), exponent=1.0)

    worst = -np.inf
    worst_case = None
    n_bad = 0
    for _ in range(trials):
        x0, x1 = np.sort(rng.uniform(0.0, 1.0, 2))
        y0, y1 = np.sort(rng.uniform(0.0, 1.0, 2))
        whole = estimate(cov.Rectangle(x0, x1, y0, y1))
        mx = x0 + rng.uniform() * (x1 - x0)
        my = y0 + rng.uniform() * (y1 - y0)
        for left, right in (
            (cov.Rectangle(x0, mx, y0, y1), cov.Rectangle(mx, x1, y0, y1)),
            (cov.Rectangle(x0, x1, y0, my), cov.Rectangle(x0, x1, my, y1)),
        ):
            el, er = estimate(left), estimate(right)
            viol = el.value + er.value - whole.value
            if viol > worst:
                worst = viol
                worst_case = (whole, el, er)
            if viol > slack:
                n_bad += 1
    return ControlReport(
        trials=trials,
        max_violation=float(worst),
        n_violations=n_bad,
        slack=slack,
        worst_case=worst_case,
    )


@dataclass(frozen=True)
class YoungNorm:
    """Four-part variation norm of a grid function on [0,1]^2."""

    v2p: float
    v1p_bottom_edge: float
    v1p_left_edge: float
    corner_abs: float

    @property
    def total(self) -> float:
        return self.v2p + self.v1p_bottom_edge + self.v1p_left_edge + self.corner_abs


@dataclass(frozen=True)
class YoungBound:
    f_norm: YoungNorm
    g_variation: float
    ratio: float
    refinement_delta: float


def young_integral_2d(f, g, p: float, q: float, level: int) -> tuple[float, YoungBound]:
    """Anchored Riemann-Stieltjes sum of f against the kernel g.

    f is evaluated at the lower-left corner of each dyadic cell of the given
    level; the attached report carries the four-part norm of f, the grid
    q-variation of g, their product ratio against |value|, and the change
    from the next-coarser level as a refinement estimate.
    """
    if p < 1.0 or q < 1.0:
        raise ParameterError(f"variation exponents must satisfy p,q >= 1, got p={p}, q={q}")
    if 1.0 / p + 1.0 / q <= 1.0:
        raise ParameterError(
            f"Young pairing requires 1/p + 1/q > 1, got p={p}, q={q}"
        )
    if level < 1:
        raise ParameterError("level must be >= 1")
    value = _anchored_sum(f, g, level)
    coarse = _anchored_sum(f, g, level - 1)

    nodes = cov.dyadic_partition(level)
    fvals = _eval_on_nodes(f, nodes)
    finc = np.diff(np.diff(fvals, axis=0), axis=1)
    f_v2p = float(np.sum(np.abs(finc) ** p) ** (1.0 / p))
    bottom = v1p(list(zip(nodes, fvals[:, 0])), p)
    left = v1p(list(zip(nodes, fvals[0, :])), p)
    norm = YoungNorm(
        v2p=f_v2p,
        v1p_bottom_edge=bottom,
        v1p_left_edge=left,
        corner_abs=float(abs(fvals[0, 0])),
    )
    vq = v2p_grid(g, q, level)
    denom = norm.total * vq
    ratio = abs(value) / denom if denom > 0 else float("nan")
    return value, YoungBound(
        f_norm=norm,
        g_variation=vq,
        ratio=ratio,
        refinement_delta=abs(value - coarse),
    )


def _eval_on_nodes(f, nodes):
    S, T = np.meshgrid(nodes, nodes, indexing="ij")
    vals = np.asarray(f(S, T), dtype=float)
    return np.broadcast_to(vals, S.shape).copy()


def _anchored_sum(f, g, level):
    nodes = cov.dyadic_partition(level)
    fvals = _eval_on_nodes(f, nodes)
    inc = cov.gram_matrix(g, nodes).matrix
    return float(np.sum(fvals[:-1, :-1] * inc))
