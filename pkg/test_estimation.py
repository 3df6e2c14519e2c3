#!/usr/bin/env python3
"""
Test suite for the MD and ML estimators.
"""

import sys
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from mnnts import (
    ArgumentError,
    DataError,
    DimVector,
    MnntsParams,
    density,
    density_batch,
    fit,
    fit_md,
    fit_ml,
    log_likelihood,
    marginal,
    mean_resultant,
    moment_vector,
    permute_vars,
    synthetic_wind_dataset,
    torus_grid,
)
from mnnts.core import TWO_PI
from mnnts.estimation import loglik_and_gradient, loglik_gradient
from mnnts.sampling import RngState, sample

RNG = np.random.default_rng(99)


def random_params(dims) -> MnntsParams:
    dims = dims if isinstance(dims, DimVector) else DimVector(tuple(dims))
    size = dims.total_length
    return MnntsParams.from_vector(dims, RNG.normal(size=size) + 1j * RNG.normal(size=size))


def test_md_estimator():
    """Test the mean-resultant estimator."""
    print("\n" + "=" * 70)
    print("TEST: MD Estimator")
    print("=" * 70)

    dims = DimVector((2, 1))
    x = np.array([[1.2, 4.0]])
    report = fit_md(x, dims)
    peak = density(report.params, x[0])
    assert abs(peak - dims.total_length / TWO_PI**2) < 1e-12
    others = density_batch(report.params, RNG.uniform(0, TWO_PI, size=(200, 2)))
    assert np.all(others <= peak + 1e-12)
    assert report.iterations == 1 and report.converged
    print("✓ One observation puts the density maximum at that observation")

    report = fit_md(RNG.uniform(0, TWO_PI, size=(30, 2)), (0, 0))
    assert abs(density(report.params, [0.3, 2.0]) - 1 / TWO_PI**2) < 1e-14
    print("✓ M = 0 gives the uniform model")

    rows = RNG.uniform(0, TWO_PI, size=(80, 3))
    dims3 = DimVector((1, 2, 0))
    perm = (3, 1, 2)
    direct = fit_md(rows[:, [i - 1 for i in perm]], dims3.select([i - 1 for i in perm])).params
    moved = permute_vars(fit_md(rows, dims3).params, perm)
    points = RNG.uniform(0, TWO_PI, size=(20, 3))
    assert np.max(np.abs(density_batch(direct, points) - density_batch(moved, points))) < 1e-12
    print("✓ Estimate is equivariant under variable permutation")

    pooled = mean_resultant(rows, dims3)
    halves = (30 * mean_resultant(rows[:30], dims3) + 50 * mean_resultant(rows[30:], dims3)) / 80
    assert np.max(np.abs(pooled - halves)) < 1e-12
    expected = np.mean([moment_vector(r, dims3) for r in rows], axis=0)
    assert np.max(np.abs(pooled - expected)) < 1e-12
    print("✓ Mean resultant pools linearly")

    try:
        fit_md(np.empty((0, 2)), dims)
        assert False, "Should reject an empty dataset"
    except DataError:
        pass
    try:
        fit(x, dims, "moments")
        assert False, "Should reject an unknown estimator"
    except ArgumentError:
        pass
    print("✓ Rejects empty data and unknown estimators")

    print("\n✅ MD Estimator: ALL TESTS PASSED")


def test_gradient():
    """Test the log-likelihood gradient against finite differences."""
    print("\n" + "=" * 70)
    print("TEST: Log-Likelihood Gradient")
    print("=" * 70)

    dims = DimVector((2, 1))
    rows = RNG.uniform(0, TWO_PI, size=(50, 2))
    c = RNG.normal(size=6) + 1j * RNG.normal(size=6)
    value, grad = loglik_and_gradient(c, rows, dims)
    # rescaling c by s adds 2 n log s
    normalized = log_likelihood(MnntsParams.from_vector(dims, c), rows).value
    assert abs(value - normalized - 2 * 50 * np.log(np.linalg.norm(c) * TWO_PI)) < 1e-8

    h = 1e-6
    for _ in range(6):
        direction = RNG.normal(size=6) + 1j * RNG.normal(size=6)
        plus, _ = loglik_and_gradient(c + h * direction, rows, dims)
        minus, _ = loglik_and_gradient(c - h * direction, rows, dims)
        numeric = (plus - minus) / (2 * h)
        analytic = np.vdot(grad, direction).real
        assert abs(numeric - analytic) <= 1e-5 * max(1.0, abs(analytic)), (numeric, analytic)
    print("✓ Directional derivatives match central differences")
    assert np.array_equal(loglik_gradient(c, rows, dims), grad)

    try:
        loglik_and_gradient(c[:4], rows, dims)
        assert False, "Should reject a wrong-length c"
    except ArgumentError:
        pass
    print("✓ Rejects wrong-length parameter vectors")

    print("\n✅ Log-Likelihood Gradient: ALL TESTS PASSED")


def test_ml_estimator():
    """Test maximum likelihood by projected gradient ascent."""
    print("\n" + "=" * 70)
    print("TEST: ML Estimator")
    print("=" * 70)

    dims = DimVector((1, 2))
    data = sample(random_params(dims), RngState(21), 400)
    md = fit_md(data, dims)
    ml = fit_ml(data, dims, max_iter=2000, tol=1e-6)
    assert ml.loglik >= md.loglik - 1e-9
    assert abs(ml.trace[0] - md.loglik) < 1e-8
    for before, after in zip(ml.trace, ml.trace[1:]):
        assert after >= before - 1e-9 * abs(before)
    assert len(ml.trace) == ml.iterations + 1
    assert abs(ml.loglik - log_likelihood(ml.params, data).value) < 1e-8
    assert abs(np.vdot(ml.params.c, ml.params.c).real - TWO_PI**-2) < 1e-12
    assert ml.converged or ml.grad_norm < 1e-4
    print(f"✓ {ml.summary()}")
    print(f"✓ ML improves on MD: {ml.loglik:.4f} >= {md.loglik:.4f}")

    x = np.array([[0.5, 2.5]])
    single = fit_ml(x, dims)
    assert single.iterations == 0 and single.converged
    print("✓ ML starting at the one-observation optimum stops at once")

    uniform = fit_ml(RNG.uniform(0, TWO_PI, size=(20, 1)), (0,))
    assert uniform.iterations == 0 and uniform.converged
    capped = fit_ml(data, dims, max_iter=3)
    assert capped.iterations <= 3
    assert capped.loglik >= md.loglik - 1e-9
    print("✓ M = 0 and iteration caps")

    for kwargs in [{"tol": 0.0}, {"max_iter": -1}, {"init": random_params((1, 1))}]:
        try:
            fit_ml(data, dims, **kwargs)
            assert False, f"Should reject {kwargs}"
        except ArgumentError:
            pass
    print("✓ Rejects invalid settings")

    print("\n✅ ML Estimator: ALL TESTS PASSED")


def test_recovery():
    """Test that both estimators recover a near-uniform model."""
    print("\n" + "=" * 70)
    print("TEST: Parameter Recovery")
    print("=" * 70)

    truth = MnntsParams.from_vector((2,), [1.0, 0.15 + 0.05j, 0.1j])
    grid = torus_grid(truth.dims, 64)
    target = density_batch(truth, grid)

    def sup_error(p: MnntsParams) -> float:
        return float(np.max(np.abs(density_batch(p, grid) - target)))

    improved = 0
    for seed in range(10):
        stream = RngState(seed)
        small = fit_md(sample(truth, stream.split(0), 100), truth.dims)
        large = fit_md(sample(truth, stream.split(1), 10000), truth.dims)
        improved += sup_error(large.params) < sup_error(small.params)
    assert improved >= 9, f"error shrank in only {improved} of 10 seeds"
    print(f"✓ MD error shrinks from n=100 to n=10000 in {improved}/10 seeds")

    data = sample(truth, RngState(2024), 10000)
    md = fit(data, truth.dims, "md")
    ml = fit(data, truth.dims, "ml", tol=1e-7)
    gap = np.max(np.abs(density_batch(md.params, grid) - density_batch(ml.params, grid)))
    assert gap < 0.05 * target.max(), (gap, target.max())
    assert sup_error(ml.params) < 0.04
    print(f"✓ ML and MD densities differ by at most {gap:.4f} (max density {target.max():.4f})")

    print("\n✅ Parameter Recovery: ALL TESTS PASSED")


def test_high_dimensional_fit():
    """Test an MD fit of seven stations with M = 3 each."""
    print("\n" + "=" * 70)
    print("TEST: High-Dimensional MD Fit")
    print("=" * 70)

    data = synthetic_wind_dataset(n_obs=2000, seed=1)
    dims = DimVector((3,) * 7)
    assert dims.total_length == 16384
    report = fit_md(data, dims)
    assert abs(np.vdot(report.params.c, report.params.c).real - TWO_PI**-7) < 1e-12
    assert np.isfinite(report.loglik)
    for var in range(1, 8):
        m = marginal(report.params, [var])
        assert abs(m.probs.sum() - 1.0) < 1e-10
    print(f"✓ 16384 coefficients, loglik {report.loglik:.2f}")

    print("\n✅ High-Dimensional MD Fit: ALL TESTS PASSED")


def run_all_tests():
    """Run all tests."""
    print("\n" + "=" * 70)
    print("MNNTS ESTIMATION - TEST SUITE")
    print("=" * 70)

    tests = [
        ("MD Estimator", test_md_estimator),
        ("Log-Likelihood Gradient", test_gradient),
        ("ML Estimator", test_ml_estimator),
        ("Parameter Recovery", test_recovery),
        ("High-Dimensional MD Fit", test_high_dimensional_fit),
    ]

    passed = 0
    failed = 0

    for name, test_func in tests:
        try:
            test_func()
            passed += 1
        except AssertionError as e:
            print(f"\n❌ {name} FAILED: {e}")
            failed += 1
        except Exception as e:
            print(f"\n❌ {name} ERROR: {e}")
            import traceback
            traceback.print_exc()
            failed += 1

    print("\n" + "=" * 70)
    print(f"TEST SUMMARY: {passed} passed, {failed} failed")
    print("=" * 70)

    return failed == 0


if __name__ == "__main__":
    success = run_all_tests()
    sys.exit(0 if success else 1)
