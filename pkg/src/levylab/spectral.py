"""Characteristic functions of second-chaos variables via operator spectra.

For a symmetric Hilbert-Schmidt operator with eigenvalues a_n (repeated by
multiplicity) the double-integral variable I_2 has

    E[exp(z I_2)] = prod_n ((1 - 2 z a_n) exp(2 z a_n))^{-1/2},
    valid for 2 |Re z| sigma < 1, sigma = sup |a_n|,

the regularized (Carleman-Fredholm) determinant. The classical area operator
has spectrum +-(pi (2n+1))^{-1}, each value twice, which collapses the
product to 1/cosh. Equivalently cosh factors as

    cosh(z) = prod_{n>=0} (1 + 4 z^2 / (pi^2 (2n+1)^2)).

Two discretizations are provided: midpoint collocation of the classical
block integral operator (h(1) + h(0) = 0 boundary behaviour emerges in the
eigenvectors), and the generalized symmetric eigenproblem K g = a G g on
dyadic step functions for arbitrary covariance pairs, with K the cross-Gram
of the step kernel and G the block-diagonal increment Gram.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import covariance as cov
from . import levy_kernel as lk
from .errors import NumericalError, ParameterError, ResourceError, ShapeError

#: relative gap below which eigenvalues are merged into one multiplicity cluster
CLUSTER_TOL = 1e-6
#: relative tolerance for matching mirrored eigenvalue clusters
PAIR_TOL = 1e-6


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicities, sorted by |alpha| descending.

    tail_sq carries the sum of squared eigenvalues *not* listed (zero for
    finite spectra); truncation bounds downstream rely on it.
    """

    entries: tuple  # ((alpha, multiplicity), ...)
    tail_sq: float = 0.0

    @property
    def spectral_radius(self) -> float:
        return max((abs(a) for a, _ in self.entries), default=0.0)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(
            [a for a, _ in self.entries], [m for _, m in self.entries]
        )

    def csv(self) -> str:
        lines = ["alpha,multiplicity"]
        for a, m in self.entries:
            lines.append(f"{a:.17g},{m}")
        return "\n".join(lines) + "\n"


def classical_spectrum(count: int) -> Spectrum:
    """First `count` levels of the classical area spectrum.

    Level n contributes +-(pi (2n+1))^{-1}, each with multiplicity 2. The
    remaining tail of squared eigenvalues is carried analytically: the full
    sum over the spectrum is 1/2.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    ns = np.arange(count)
    alphas = 1.0 / (np.pi * (2 * ns + 1))
    entries = []
    for a in alphas:
        entries.append((float(a), 2))
        entries.append((float(-a), 2))
    listed_sq = float(np.sum(4.0 * alphas**2))
    tail_sq = max(0.5 - listed_sq, 0.0)
    return Spectrum(entries=tuple(entries), tail_sq=tail_sq)


@dataclass(frozen=True)
class CFProduct:
    z: complex
    value: complex
    truncation: int
    tail_bound: float


def cf_from_spectrum(spectrum: Spectrum, z: complex, n_entries: int | None = None) -> CFProduct:
    """Truncated regularized determinant evaluated at z.

    Uses the first n_entries eigenvalues (repeated by multiplicity; default
    all). Factors are combined through per-factor principal logarithms so the
    square-root branch stays unambiguous and long products cannot underflow.
    The tail bound |z|^2 * (sum of squared eigenvalues beyond the truncation)
    bounds the error against the untruncated product for purely imaginary z.
    """
    z = complex(z)
    sigma = spectrum.spectral_radius
    if 2.0 * abs(z.real) * sigma >= 1.0:
        raise ParameterError(
            f"argument outside the determinant domain: 2|Re z| sigma = "
            f"{2.0 * abs(z.real) * sigma:.6g} >= 1"
        )
    eigs = spectrum.eigenvalues()
    if n_entries is None:
        n_entries = len(eigs)
    if n_entries < 0:
        raise ParameterError(f"n_entries must be >= 0, got {n_entries}")
    used = eigs[:n_entries]
    skipped = eigs[n_entries:]
    w = 2.0 * z * used
    log_sum = complex(np.sum(np.log1p(-w) + w))
    value = np.exp(-0.5 * log_sum)
    tail_sq = spectrum.tail_sq + float(np.sum(skipped**2))
    return CFProduct(
        z=z,
        value=complex(value),
        truncation=int(len(used)),
        tail_bound=abs(z) ** 2 * tail_sq,
    )


def cosh_factorization_check(z: complex, n_factors: int) -> float:
    """|prod_{n<N} (1 + 4 z^2 / (pi^2 (2n+1)^2)) - cosh(z)|."""
    if n_factors < 0:
        raise ParameterError(f"n_factors must be >= 0, got {n_factors}")
    n = np.arange(n_factors)
    factors = 1.0 + 4.0 * complex(z) ** 2 / (np.pi**2 * (2 * n + 1) ** 2)
    product = complex(np.prod(factors)) if n_factors else 1.0 + 0.0j
    return float(abs(product - np.cosh(complex(z))))


def weighted_cf(weight_norm_sq: float, t: float) -> float:
    """Characteristic function sech(t * ||f||^2) of the weighted-process area."""
    if weight_norm_sq <= 0:
        raise ParameterError(f"weight norm squared must be positive, got {weight_norm_sq}")
    return 1.0 / math.cosh(t * weight_norm_sq)


def discretize_classical_operator(grid_size: int) -> np.ndarray:
    """Midpoint collocation of the classical block operator on 2g points.

    Off-diagonal blocks discretize h -> (int_0^t h - int_t^1 h)/2 with
    uniform weight 1/g at midpoints t_i = (i + 1/2)/g; the sign-kernel form
    keeps the matrix exactly symmetric, which the spectrum tests require.
    """
    if grid_size < 4:
        raise ParameterError(f"grid_size must be >= 4, got {grid_size}")
    idx = np.arange(grid_size)
    signs = np.sign(idx[:, None] - idx[None, :]).astype(float)
    block = 0.5 * signs / grid_size
    g = grid_size
    matrix = np.zeros((2 * g, 2 * g))
    matrix[:g, g:] = -block
    matrix[g:, :g] = block
    return matrix


def eigen_solve(matrix: np.ndarray, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    """Symmetric eigensolve with multiplicity clustering.

    Eigenvalues closer than cluster_tol * spectral_radius are merged into a
    single entry whose value is the cluster mean; discretization splits exact
    multiplicities by O(1/g^2), which this tolerance absorbs.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    scale = float(np.max(np.abs(m))) or 1.0
    if asym > 1e-10 * max(scale, 1.0):
        raise ShapeError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    w = np.linalg.eigvalsh((m + m.T) / 2.0)
    sigma = float(np.max(np.abs(w))) if w.size else 0.0
    gap = cluster_tol * (sigma or 1.0)
    entries = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            members = w[start:i]
            entries.append((float(np.mean(members)), int(len(members))))
            start = i
    entries.sort(key=lambda e: (-abs(e[0]), -e[0]))
    return Spectrum(entries=tuple(entries))


@dataclass(frozen=True)
class SymmetryReport:
    violations: tuple
    n_clusters: int
    max_pair_gap: float

    @property
    def ok(self) -> bool:
        return not self.violations


def symmetry_check(spectrum: Spectrum, pair_tol: float = PAIR_TOL) -> SymmetryReport:
    """Audit mirror symmetry and even multiplicity of a spectrum.

    Groups entries into |alpha| clusters at pair_tol * spectral_radius and
    requires, per nonzero cluster, equal positive and negative multiplicity
    (hence even total).
    """
    sigma = spectrum.spectral_radius
    tol = pair_tol * (sigma or 1.0)
    order = sorted(spectrum.entries, key=lambda e: abs(e[0]))
    clusters = []
    for alpha, mult in order:
        if clusters and abs(alpha) - clusters[-1]["ref"] <= tol:
            clusters[-1]["members"].append((alpha, mult))
        else:
            clusters.append({"ref": abs(alpha), "members": [(alpha, mult)]})
    violations = []
    max_gap = 0.0
    for c in clusters:
        members = c["members"]
        plus = sum(m for a, m in members if a > tol)
        minus = sum(m for a, m in members if a < -tol)
        zero = sum(m for a, m in members if abs(a) <= tol)
        total = plus + minus + zero
        ref = c["ref"]
        if plus != minus:
            violations.append(
                f"cluster |alpha|~{ref:.6g}: multiplicity {plus} (+) vs {minus} (-)"
            )
        if total % 2 != 0:
            violations.append(f"cluster |alpha|~{ref:.6g}: odd total multiplicity {total}")
        pos_vals = [abs(a) for a, _ in members if a > tol]
        neg_vals = [abs(a) for a, _ in members if a < -tol]
        if pos_vals and neg_vals:
            max_gap = max(max_gap, abs(np.mean(pos_vals) - np.mean(neg_vals)))
    return SymmetryReport(
        violations=tuple(violations), n_clusters=len(clusters), max_pair_gap=float(max_gap)
    )


MAX_OPERATOR_LEVEL = 10


def discretize_general_operator(
    r1: cov.CovKernel, r2: cov.CovKernel, level: int
) -> tuple[np.ndarray, np.ndarray]:
    """Generalized symmetric eigenproblem K g = alpha G g on dyadic steps.

    K is the cross-Gram of the level-n step kernel: its (1,2) block is
    G_1 A G_2 with A the cell sign matrix, and the (2,1) block its transpose;
    G is the block-diagonal increment Gram of the two covariances. Returns
    the pair (K, G); solve through `whiten_operator` + `eigen_solve`.
    """
    if level < 1:
        raise ParameterError(f"level must be >= 1, got {level}")
    if level > MAX_OPERATOR_LEVEL:
        raise ResourceError(
            f"operator level {level} exceeds cap {MAX_OPERATOR_LEVEL}"
        )
    part = cov.dyadic_partition(level)
    g1 = cov.gram_matrix(r1, part).matrix
    g2 = cov.gram_matrix(r2, part).matrix
    n = g1.shape[0]
    A = lk.cell_sign_matrix(level, level)
    X = g1 @ A @ g2
    K = np.zeros((2 * n, 2 * n))
    K[:n, n:] = X
    K[n:, :n] = X.T
    G = np.zeros((2 * n, 2 * n))
    G[:n, :n] = g1
    G[n:, n:] = g2
    return K, G


def whiten_operator(K: np.ndarray, G: np.ndarray) -> np.ndarray:
    """G^{-1/2} K G^{-1/2} with the Gram regularized by the jitter ladder."""
    w, V = np.linalg.eigh((G + G.T) / 2.0)
    scale = float(np.max(np.abs(w))) or 1.0
    for jitter in cov.JITTER_LADDER:
        shifted = w + jitter * scale
        if np.min(shifted) > 0:
            inv_half = V @ np.diag(shifted**-0.5) @ V.T
            M = inv_half @ K @ inv_half
            return (M + M.T) / 2.0
    raise NumericalError(
        f"increment Gram is singular beyond the jitter ladder "
        f"(smallest eigenvalue {float(np.min(w)):.3e})"
    )


def general_spectrum(
    r1: cov.CovKernel, r2: cov.CovKernel, level: int, cluster_tol: float = CLUSTER_TOL
) -> Spectrum:
    """Spectrum of the step-kernel operator for a covariance pair."""
    K, G = discretize_general_operator(r1, r2, level)
    return eigen_solve(whiten_operator(K, G), cluster_tol=cluster_tol)


def cf_curve(spectrum: Spectrum, t_grid, n_entries: int | None = None):
    """CFProduct at z = i t for every t in the grid."""
    return [cf_from_spectrum(spectrum, 1j * float(t), n_entries) for t in np.asarray(t_grid)]
