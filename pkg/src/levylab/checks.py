"""Self-contained invariant audits backing the `check` CLI command.

Each check returns a short detail string on success and raises AssertionError
(or any error) on failure; run_all collects (name, ok, detail) triples.
"""
from __future__ import annotations

import numpy as np

from . import covariance as cov
from . import levy_kernel as lk
from . import pvariation as pv
from . import simulate as sim
from . import spectral as sp


def _kernels():
    return {
        "brownian": cov.brownian(),
        "fbm-0.35": cov.fractional_brownian(0.35),
        "fbm-0.75": cov.fractional_brownian(0.75),
        "weighted-u": cov.weighted_poly(1),
        "product-st": cov.tabulated_from_fn(lambda S, T: S * T, 32),
    }


def check_rect_additivity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for kernel in _kernels().values():
        for _ in range(40):
            x0, xm, x1 = np.sort(rng.uniform(0, 1, 3))
            y0, y1 = np.sort(rng.uniform(0, 1, 2))
            whole = cov.rect_increment(kernel, cov.Rectangle(x0, x1, y0, y1))
            left = cov.rect_increment(kernel, cov.Rectangle(x0, xm, y0, y1))
            right = cov.rect_increment(kernel, cov.Rectangle(xm, x1, y0, y1))
            worst = max(worst, abs(whole - (left + right)))
    assert worst <= 1e-12, f"additivity violated by {worst:.3e}"
    return f"max split residual {worst:.2e}"


def check_gram_telescoping():
    worst = 0.0
    for kernel in _kernels().values():
        gram = cov.gram_matrix(kernel, cov.dyadic_partition(5))
        total = cov.rect_increment(kernel, cov.Rectangle(0, 1, 0, 1))
        worst = max(worst, abs(float(gram.matrix.sum()) - total))
    assert worst <= 1e-10, f"telescoping off by {worst:.3e}"
    return f"max telescoping residual {worst:.2e}"


def check_brownian_diagonal():
    for level in (1, 4, 7):
        m = cov.gram_matrix(cov.brownian(), cov.dyadic_partition(level)).matrix
        off = m - np.diag(np.diagonal(m))
        assert np.max(np.abs(off)) == 0.0
        assert np.allclose(np.diagonal(m), 2.0**-level)
    return "diagonal at levels 1,4,7"


def check_gram_psd():
    worst = 0.0
    for kernel in _kernels().values():
        gram = cov.gram_matrix(kernel, cov.dyadic_partition(6))
        worst = min(worst, cov.min_eigenvalue_ratio(gram))
    assert worst >= -cov.PSD_TOL, f"Gram eigenvalue ratio {worst:.3e}"
    return f"min eigenvalue ratio {worst:.2e}"


def check_symmetry_zero_edge():
    pts = np.linspace(0, 1, 9)
    for name, kernel in _kernels().items():
        if name == "product-st":
            continue  # test-only kernel, not a process covariance
        vals = cov.eval_grid(kernel, pts, pts)
        assert np.max(np.abs(vals - vals.T)) <= 1e-12, name
        assert np.max(np.abs(vals[0])) <= 1e-12, name
        assert np.max(np.abs(vals[:, 0])) <= 1e-12, name
    return "symmetric, zero on the axes"


def check_holder_ordering():
    for kernel in (cov.brownian(), cov.fractional_brownian(0.35)):
        for level in (3, 5):
            vals = [pv.v2p_grid(kernel, p, level) for p in (1.0, 1.5, 2.0, 3.0)]
            assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:])), vals
    return "l^p ordering holds on fixed grids"


def check_level_monotonicity():
    cases = [
        (cov.brownian(), 1.0),
        (cov.fractional_brownian(0.35), 1.0),
        (cov.fractional_brownian(0.35), 1 / 0.7),
        (cov.weighted_poly(1), 1.0),
    ]
    for kernel, p in cases:
        vals = [pv.v2p_grid(kernel, p, n) for n in range(1, 8)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:])), (kernel, p, vals)
    return "grid sums non-decreasing for the audited cases"


def check_v1p_bruteforce():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = rng.integers(2, 7)
        pts = np.sort(rng.uniform(0, 1, n))
        while len(np.unique(pts)) < n:
            pts = np.sort(rng.uniform(0, 1, n))
        vals = rng.normal(size=n)
        p = float(rng.uniform(1.0, 3.0))
        samples = list(zip(pts, vals))
        fast = pv.v1p(samples, p)
        slow = pv.v1p_exhaustive(samples, p)
        assert abs(fast - slow) <= 1e-12, (fast, slow)
    return "dynamic program matches exhaustive enumeration"


def check_young_step_exact():
    def f(S, T):
        return np.where(S >= 0.5, 1.0, 0.0) + np.where(T >= 0.25, 2.0, 0.0)

    vals = []
    for level in (3, 5, 7):
        v, _ = pv.young_integral_2d(f, cov.brownian(), 2.0, 1.0, level)
        vals.append(v)
    spread = max(vals) - min(vals)
    assert spread <= 1e-12, vals
    return f"step integrand refinement spread {spread:.2e}"


def check_levy_antisymmetry():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s, t = rng.uniform(0, 1, 2)
        assert lk.kernel_eval(s, 1, t, 2) + lk.kernel_eval(s, 2, t, 1) == 0.0
        assert lk.kernel_eval(s, 1, t, 2) + lk.kernel_eval(t, 1, s, 2) == 0.0
        assert lk.kernel_eval(s, 1, t, 1) == 0.0
    return "block and argument antisymmetry"


def check_norm_diff_basics():
    br = cov.brownian()
    fbm = cov.fractional_brownian(0.75)
    assert lk.norm_diff(3, 3, br, br).value == 0.0
    a = lk.norm_diff(2, 4, fbm, fbm, refine=6).value
    b = lk.norm_diff(4, 2, fbm, fbm, refine=6).value
    assert abs(a - b) <= 1e-12, (a, b)
    return "zero at equal levels, symmetric in the pair"


def check_brownian_variance_identity():
    br = cov.brownian()
    worst = 0.0
    for n in (1, 4, 8):
        worst = max(worst, abs(2.0 * lk.norm_approx(n, br, br).value - (1.0 - 2.0**-n)))
    assert worst <= 1e-10, worst
    return f"max residual {worst:.2e}"


def check_triangle_consistency():
    br = cov.brownian()
    worst = 0.0
    for n, m in ((1, 2), (2, 5), (3, 4)):
        d = lk.norm_diff(n, m, br, br).value
        e = abs(lk.norm_approx(n, br, br).value - lk.norm_approx(m, br, br).value)
        worst = max(worst, abs(d - e))
    assert worst <= 1e-10, worst
    return f"max residual {worst:.2e}"


def check_area_identities():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        a = rng.normal(size=n)
        b = rng.normal(size=n)
        ab = sim.discrete_levy_area(a, b)
        assert ab == -sim.discrete_levy_area(b, a)
        assert sim.discrete_levy_area(2.0 * a, b) == 2.0 * ab
        ref = sum(
            a[k] * b[l] - b[k] * a[l] for k in range(n) for l in range(n) if k < l
        )
        assert abs(ab - ref) <= 1e-10 * max(1.0, abs(ref))
    return "antisymmetry, scaling, quadratic-oracle agreement"


def check_mc_determinism():
    config = sim.MCConfig(
        seed=99, n_samples=64, level=5, kernel1=cov.brownian(), kernel2=cov.brownian()
    )
    r1 = sim.run_mc(config, threads=1)
    r2 = sim.run_mc(config, threads=3)
    assert np.array_equal(r1.samples, r2.samples)
    return "bit-identical samples across thread counts"


def check_cf_real_and_bounded():
    spec = sp.classical_spectrum(200)
    prev = 1.1
    for t in np.linspace(0.0, 3.0, 13):
        res = sp.cf_from_spectrum(spec, 1j * t)
        assert abs(res.value.imag) <= 1e-12
        assert abs(res.value) <= 1.0 + 1e-12
        assert res.value.real <= prev + 1e-12
        prev = res.value.real
    return "real, bounded by 1, decreasing on [0,3]"


def check_cf_tail_bound():
    spec = sp.classical_spectrum(50)
    for t in (0.5, 1.0, 2.0):
        res = sp.cf_from_spectrum(spec, 1j * t)
        err = abs(res.value - 1.0 / np.cosh(t))
        assert err <= res.tail_bound, (t, err, res.tail_bound)
    return "truncation bound dominates the true error"


def check_cosh_residual():
    res = sp.cosh_factorization_check(1.0, 100_000)
    assert res < 1e-4, res
    return f"residual {res:.2e} at N=1e5"


def check_classical_operator_structure():
    spec = sp.eigen_solve(sp.discretize_classical_operator(128))
    report = sp.symmetry_check(spec)
    assert report.ok, report.violations
    assert spec.entries[0][1] == 2, spec.entries[:2]
    top = abs(spec.entries[0][0])
    assert abs(top - 1.0 / np.pi) <= 0.01 / np.pi
    return "mirror pairs with multiplicity 2, top near 1/pi"


ALL_CHECKS = [
    ("covariance.rect-additivity", check_rect_additivity),
    ("covariance.gram-telescoping", check_gram_telescoping),
    ("covariance.brownian-diagonal", check_brownian_diagonal),
    ("covariance.gram-psd", check_gram_psd),
    ("covariance.symmetry-zero-edge", check_symmetry_zero_edge),
    ("pvariation.holder-ordering", check_holder_ordering),
    ("pvariation.level-monotonicity", check_level_monotonicity),
    ("pvariation.v1p-bruteforce", check_v1p_bruteforce),
    ("pvariation.young-step-exactness", check_young_step_exact),
    ("levy.kernel-antisymmetry", check_levy_antisymmetry),
    ("levy.norm-diff-basics", check_norm_diff_basics),
    ("levy.brownian-variance-identity", check_brownian_variance_identity),
    ("levy.triangle-consistency", check_triangle_consistency),
    ("simulate.area-identities", check_area_identities),
    ("simulate.determinism", check_mc_determinism),
    ("spectral.cf-real-bounded", check_cf_real_and_bounded),
    ("spectral.cf-tail-bound", check_cf_tail_bound),
    ("spectral.cosh-residual", check_cosh_residual),
    ("spectral.classical-structure", check_classical_operator_structure),
]


def run_all():
    """Run every audit; returns a list of (name, ok, detail)."""
    results = []
    for name, fn in ALL_CHECKS:
        try:
            detail = fn()
            results.append((name, True, detail or ""))
        except Exception as exc:  # noqa: BLE001 - report any failure mode
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
    return results
