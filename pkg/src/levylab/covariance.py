"""Covariance kernels on [0,1]^2 and their rectangular-increment calculus.

Supported kernels (all with R(0,t) = R(s,0) = 0, processes started at zero):

    brownian    R(s,t) = min(s,t)
    fbm         R(s,t) = (s^{2H} + t^{2H} - |s-t|^{2H}) / 2,  H in (0,1)
    weighted    R(s,t) = int_0^{min(s,t)} f(u)^2 du  for a polynomial weight
                f(u) = c u^d, so R(s,t) = c^2 (s ^ t)^{2d+1} / (2d+1)
    tabulated   bilinear interpolation of a value table on a uniform mesh

The rectangular increment

    R([s0,s1] x [u0,u1]) = R(s1,u1) - R(s1,u0) - R(s0,u1) + R(s0,u0)

is the basic quantity out of which every inner product downstream is built;
weighted kernels therefore carry a closed-form antiderivative of f^2 instead
of a quadrature rule, so increments stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    NumericalError,
    ParameterError,
    PartitionError,
    ShapeError,
)

BROWNIAN = "brownian"
FBM = "fbm"
WEIGHTED = "weighted"
TABULATED = "tabulated"

#: escalation ladder for Cholesky / Gram regularization
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)

#: relative tolerance for positive semidefiniteness audits
PSD_TOL = 1e-8


@dataclass(frozen=True)
class PolyWeight:
    """Weight f(u) = coeff * u**degree with exact antiderivative of f^2."""

    degree: int
    coeff: float = 1.0

    def __post_init__(self):
        if self.degree < 0:
            raise ParameterError(f"polynomial weight degree must be >= 0, got {self.degree}")

    def antiderivative_sq(self, x):
        """int_0^x f(u)^2 du = coeff^2 x^{2d+1} / (2d+1)."""
        k = 2 * self.degree + 1
        return (self.coeff**2 / k) * np.asarray(x, dtype=float) ** k

    @property
    def norm_sq(self) -> float:
        """L^2([0,1]) norm squared of f."""
        return float(self.antiderivative_sq(1.0))


@dataclass(frozen=True, eq=False)
class CovKernel:
    kind: str
    hurst: float | None = None
    weight: PolyWeight | None = None
    table: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (BROWNIAN, FBM, WEIGHTED, TABULATED):
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        if self.kind == FBM:
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise ParameterError(f"Hurst parameter must lie in (0,1), got {self.hurst}")
        if self.kind == WEIGHTED and self.weight is None:
            raise ParameterError("weighted kernel requires a weight spec")
        if self.kind == TABULATED:
            t = self.table
            if t is None or t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 2:
                raise ShapeError("tabulated kernel requires a square table with >= 2 nodes")

    def __repr__(self):
        return f"CovKernel({kernel_spec_string(self)!r})"


def brownian() -> CovKernel:
    return CovKernel(BROWNIAN)


def fractional_brownian(hurst: float) -> CovKernel:
    return CovKernel(FBM, hurst=float(hurst))


def weighted_poly(degree: int, coeff: float = 1.0) -> CovKernel:
    return CovKernel(WEIGHTED, weight=PolyWeight(int(degree), float(coeff)))


def tabulated(values: np.ndarray) -> CovKernel:
    return CovKernel(TABULATED, table=np.array(values, dtype=float))


def tabulated_from_fn(fn, mesh: int) -> CovKernel:
    """Sample fn(s,t) on a uniform (mesh+1)^2 node grid."""
    t = np.linspace(0.0, 1.0, mesh + 1)
    S, T = np.meshgrid(t, t, indexing="ij")
    return tabulated(fn(S, T))


def load_table_csv(path) -> CovKernel:
    """Read a tabulated kernel from CSV with header ``s,t,value``.

    The (s,t) points must fill a complete uniform mesh on [0,1]^2.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().lower().replace(" ", "")
        if header != "s,t,value":
            raise ShapeError(f"expected CSV header 's,t,value', got {header!r}")
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            s, t, v = line.split(",")
            rows.append((float(s), float(t), float(v)))
    if not rows:
        raise ShapeError("empty kernel table")
    svals = np.array(sorted({r[0] for r in rows}))
    n = len(svals)
    expected = np.linspace(0.0, 1.0, n)
    if not np.allclose(svals, expected, atol=1e-12):
        raise ShapeError("table mesh is not a uniform subdivision of [0,1]")
    if len(rows) != n * n:
        raise ShapeError(f"incomplete table: expected {n * n} rows, got {len(rows)}")
    values = np.full((n, n), np.nan)
    step = 1.0 / (n - 1)
    for s, t, v in rows:
        i = int(round(s / step))
        j = int(round(t / step))
        values[i, j] = v
    if np.isnan(values).any():
        raise ShapeError("table does not cover the full mesh")
    return tabulated(values)


def _check_unit_square(x, y):
    if np.any((np.asarray(x) < 0) | (np.asarray(x) > 1) | (np.asarray(y) < 0) | (np.asarray(y) > 1)):
        raise DomainError("covariance arguments must lie in [0,1]")


def eval_grid(kernel: CovKernel, x, y) -> np.ndarray:
    """R on the outer product of coordinate vectors x and y.

    x has shape (m,), y has shape (k,); the result has shape (m, k).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_unit_square(x, y)
    S = x[:, None]
    T = y[None, :]
    if kernel.kind == BROWNIAN:
        return np.broadcast_to(np.minimum(S, T), (len(x), len(y))).copy()
    if kernel.kind == FBM:
        h2 = 2.0 * kernel.hurst
        return 0.5 * (S**h2 + T**h2 - np.abs(S - T) ** h2)
    if kernel.kind == WEIGHTED:
        vals = kernel.weight.antiderivative_sq(np.minimum(S, T))
        return np.broadcast_to(vals, (len(x), len(y))).copy()
    return _bilinear(kernel.table, S, T)


def _bilinear(table, S, T):
    m = table.shape[0] - 1
    xs = np.clip(S * m, 0.0, m)
    ys = np.clip(T * m, 0.0, m)
    i = np.minimum(xs.astype(int), m - 1)
    j = np.minimum(ys.astype(int), m - 1)
    fx = xs - i
    fy = ys - j
    v00 = table[i, j]
    v10 = table[i + 1, j]
    v01 = table[i, j + 1]
    v11 = table[i + 1, j + 1]
    return (
        v00 * (1 - fx) * (1 - fy)
        + v10 * fx * (1 - fy)
        + v01 * (1 - fx) * fy
        + v11 * fx * fy
    )


def eval(kernel: CovKernel, s: float, t: float) -> float:  # noqa: A001 - shadows builtins.eval on purpose
    """Point evaluation R(s,t)."""
    return float(eval_grid(kernel, [s], [t])[0, 0])


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle [s0,s1] x [u0,u1] inside the unit square."""

    s0: float
    s1: float
    u0: float
    u1: float

    def __post_init__(self):
        if not (self.s0 <= self.s1 and self.u0 <= self.u1):
            raise ParameterError(f"degenerate rectangle bounds {self}")
        _check_unit_square([self.s0, self.s1], [self.u0, self.u1])


def rect_increment(kernel: CovKernel, rect: Rectangle) -> float:
    """Mixed second difference of R over rect."""
    corners = eval_grid(kernel, [rect.s0, rect.s1], [rect.u0, rect.u1])
    return float(corners[1, 1] - corners[1, 0] - corners[0, 1] + corners[0, 0])


def dyadic_partition(level: int) -> np.ndarray:
    if level < 0:
        raise ParameterError(f"dyadic level must be >= 0, got {level}")
    return np.linspace(0.0, 1.0, 2**level + 1)


@dataclass(frozen=True, eq=False)
class GridGram:
    """Increment Gram matrix: matrix[k,l] = R over I_k x I_l of the partition."""

    partition: np.ndarray
    matrix: np.ndarray


def gram_matrix(kernel: CovKernel, partition) -> GridGram:
    part = np.asarray(partition, dtype=float)
    if part.ndim != 1 or len(part) < 2:
        raise PartitionError("partition needs at least two breakpoints")
    if part[0] != 0.0 or part[-1] != 1.0:
        raise PartitionError("partition must start at 0 and end at 1")
    if np.any(np.diff(part) <= 0):
        raise PartitionError("partition breakpoints must be strictly increasing")
    corners = eval_grid(kernel, part, part)
    matrix = np.diff(np.diff(corners, axis=0), axis=1)
    return GridGram(partition=part, matrix=matrix)


def cholesky_factor(gram: GridGram, jitter: float = 0.0) -> np.ndarray:
    """Lower-triangular L with L L^T = matrix + jitter I.

    Escalates through JITTER_LADDER on failure; small-Hurst Gram matrices
    are ill-conditioned and routinely need the ladder.
    """
    m = gram.matrix
    scale = float(np.max(np.abs(m))) or 1.0
    ladder = [jitter] + [j for j in JITTER_LADDER if j > jitter]
    for j in ladder:
        try:
            return np.linalg.cholesky(m + (j * scale) * np.eye(m.shape[0]))
        except np.linalg.LinAlgError:
            continue
    smallest = float(np.linalg.eigvalsh(m)[0])
    raise NumericalError(
        f"Cholesky factorization failed after jitter ladder {tuple(ladder)}; "
        f"smallest Gram eigenvalue {smallest:.3e}"
    )


def has_independent_increments(kernel: CovKernel) -> bool:
    """True when disjoint-interval increments are uncorrelated.

    For these kernels the increment measure is concentrated on the diagonal,
    which makes several dyadic quadratures downstream exact.
    """
    return kernel.kind in (BROWNIAN, WEIGHTED)


def variation_index(kernel: CovKernel) -> float | None:
    """Smallest p with finite grid p-variation, where known.

    Bounded variation (p = 1) for Brownian-type kernels; 1/(2H) for rough
    fractional kernels with H <= 1/2; unknown (None) for tabulated data.
    """
    if kernel.kind in (BROWNIAN, WEIGHTED):
        return 1.0
    if kernel.kind == FBM:
        return 1.0 / (2.0 * kernel.hurst) if kernel.hurst <= 0.5 else 1.0
    return None


def parse_kernel_spec(text: str) -> CovKernel:
    """Parse a flat key=value kernel record.

    Accepted forms: ``brownian``, ``kind=fbm hurst=0.35``, ``fbm hurst=0.35``,
    ``kind=weighted weight=poly degree=1 coeff=2``, ``kind=tabulated path=t.csv``.
    """
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ParameterError("empty kernel spec")
    fields = {}
    for tok in tokens:
        if "=" in tok:
            key, val = tok.split("=", 1)
            fields[key.strip()] = val.strip()
        elif "kind" not in fields:
            fields["kind"] = tok
        else:
            raise ParameterError(f"stray token {tok!r} in kernel spec {text!r}")
    kind = fields.pop("kind", None)
    if kind is None:
        raise ParameterError(f"kernel spec {text!r} does not name a kind")
    kind = {"fractional": FBM, "fractionalbrownian": FBM}.get(kind, kind)
    if kind == BROWNIAN:
        _reject_extras(fields, (), text)
        return brownian()
    if kind == FBM:
        if "hurst" not in fields:
            raise ParameterError("fbm kernel spec requires hurst=")
        hurst = float(fields.pop("hurst"))
        _reject_extras(fields, (), text)
        return fractional_brownian(hurst)
    if kind == WEIGHTED:
        weight = fields.pop("weight", "poly")
        if weight != "poly":
            raise ParameterError(f"unsupported weight family {weight!r}")
        degree = int(fields.pop("degree", 1))
        coeff = float(fields.pop("coeff", 1.0))
        _reject_extras(fields, (), text)
        return weighted_poly(degree, coeff)
    if kind == TABULATED:
        if "path" not in fields:
            raise ParameterError("tabulated kernel spec requires path=")
        path = fields.pop("path")
        _reject_extras(fields, (), text)
        return load_table_csv(path)
    raise ParameterError(f"unknown kernel kind {kind!r}")


def _reject_extras(fields, allowed, text):
    extras = set(fields) - set(allowed)
    if extras:
        raise ParameterError(f"unknown kernel spec keys {sorted(extras)} in {text!r}")


def kernel_spec_string(kernel: CovKernel) -> str:
    """Canonical key=value record for config echoes."""
    if kernel.kind == BROWNIAN:
        return "kind=brownian"
    if kernel.kind == FBM:
        return f"kind=fbm hurst={kernel.hurst:g}"
    if kernel.kind == WEIGHTED:
        w = kernel.weight
        return f"kind=weighted weight=poly degree={w.degree} coeff={w.coeff:g}"
    return f"kind=tabulated mesh={kernel.table.shape[0] - 1}"


def min_eigenvalue_ratio(gram: GridGram) -> float:
    """Smallest over largest |eigenvalue| of the Gram, for PSD audits."""
    w = np.linalg.eigvalsh(gram.matrix)
    top = float(np.max(np.abs(w))) or 1.0
    return float(w[0]) / top


def is_psd(gram: GridGram, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue_ratio(gram) >= -tol
