#!/usr/bin/env python3
"""
Test suite for SplitMix64 streams and MNNTS sampling.

Goodness of fit is checked with Kolmogorov-Smirnov tests against the exact
CDFs and a chi-squared test on exact cell probabilities.
"""

import sys
from pathlib import Path

import numpy as np
from scipy import stats

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent))

from mnnts import (
    ArgumentError,
    DimVector,
    MnntsParams,
    RngState,
    circular_correlation,
    cdf_univariate,
    marginal,
    mixture_cdf,
    multi_index,
    product_model,
    sample,
    sample_mixture,
    sample_univariate,
)
from mnnts.core import TWO_PI
from mnnts.sampling import invert_cdf

RNG = np.random.default_rng(314)


def random_params(dims) -> MnntsParams:
    size = DimVector(tuple(dims)).total_length
    return MnntsParams.from_vector(dims, RNG.normal(size=size) + 1j * RNG.normal(size=size))


def arc_integral(d: int, a: float, b: float) -> complex:
    """Integral of exp(i d t) over [a, b]."""
    if d == 0:
        return b - a
    return (np.exp(1j * d * b) - np.exp(1j * d * a)) / (1j * d)


def cell_probability(p: MnntsParams, lo, hi) -> float:
    """Exact probability of the box [lo, hi] from the sum form of the density."""
    index = [multi_index(i, p.dims) for i in range(p.dims.total_length)]
    total = 0.0 + 0.0j
    for a, ka in enumerate(index):
        for b, kb in enumerate(index):
            term = np.conj(p.c[a]) * p.c[b]
            for s in range(p.n_vars):
                term *= arc_integral(ka[s] - kb[s], lo[s], hi[s])
            total += term
    return float(total.real)


def test_rng_state():
    """Test the SplitMix64 stream."""
    print("\n" + "=" * 70)
    print("TEST: RngState")
    print("=" * 70)

    rng = RngState(0)
    first = rng.next_uint64(3)
    assert int(first[0]) == 0xE220A8397B1DCDAF
    assert int(first[1]) == 0x6E789E6AA1B965F4
    assert int(first[2]) == 0x06C45D188009454F
    assert rng.counter == 3
    print("✓ Reference outputs for seed 0")

    a, b = RngState(42), RngState(42)
    assert np.array_equal(a.next_uint64(5), np.concatenate([b.next_uint64(2), b.next_uint64(3)]))
    u = RngState(7).uniform(10000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02
    print("✓ Streams are deterministic and uniforms lie in [0, 1)")

    root = RngState(5)
    children = [root.split(i) for i in range(4)]
    assert len({child.seed for child in children}) == 4
    assert root.split(2).seed == children[2].seed
    assert root.counter == 0
    assert RngState(-1).seed == 2**64 - 1
    assert "splitmix64" == RngState.algorithm
    print("✓ Sub-streams are distinct and reproducible")

    for bad in [lambda: root.split(-1), lambda: root.next_uint64(-1)]:
        try:
            bad()
            assert False, "Should reject negative arguments"
        except ArgumentError:
            pass
    print("✓ Rejects negative arguments")

    print("\n✅ RngState: ALL TESTS PASSED")


def test_univariate_sampling():
    """Test inverse-transform sampling with KS tests."""
    print("\n" + "=" * 70)
    print("TEST: Univariate Sampling")
    print("=" * 70)

    passes = 0
    for seed in range(10):
        p = random_params((3,))
        draws = sample_univariate(p, RngState(seed), 10000)
        assert draws.min() >= 0.0 and draws.max() < TWO_PI
        result = stats.kstest(draws, lambda t: cdf_univariate(p, np.clip(t, 0.0, TWO_PI)))
        passes += result.pvalue > 0.01
    assert passes >= 9, f"only {passes} of 10 KS tests passed"
    print(f"✓ {passes}/10 KS tests pass at 1%")

    p = random_params((2,))
    assert np.array_equal(sample_univariate(p, RngState(3), 50), sample_univariate(p, 3, 50))
    stream = sample(p, RngState(9), 50).rows[:, 0]
    assert np.array_equal(stream, sample_univariate(p, RngState(9), 50))
    print("✓ Univariate sampling consumes one uniform per draw")

    u = np.linspace(0.01, 0.99, 99)
    assert np.max(np.abs(invert_cdf(np.array([1.0 / TWO_PI]), u) - TWO_PI * u)) < 1e-12
    q = random_params((3,))
    theta = invert_cdf(np.array([np.trace(np.outer(q.c, np.conj(q.c)), offset=d) for d in range(4)]), u)
    assert np.max(np.abs(cdf_univariate(q, theta) - u)) < 1e-12
    print("✓ Bisection inverts the CDF to full precision")

    for bad in [lambda: sample_univariate(p, 1, 0), lambda: sample_univariate(random_params((1, 1)), 1, 5)]:
        try:
            bad()
            assert False, "Should reject invalid arguments"
        except ArgumentError:
            pass
    print("✓ Rejects invalid arguments")

    print("\n✅ Univariate Sampling: ALL TESTS PASSED")


def test_mixture_sampling():
    """Test sampling from marginal mixtures."""
    print("\n" + "=" * 70)
    print("TEST: Mixture Sampling")
    print("=" * 70)

    m = marginal(random_params((2, 2)), [1])
    n = 20000
    draws, picks = sample_mixture(m, RngState(17), n)
    for k, prob in enumerate(m.probs):
        sigma = np.sqrt(n * prob * (1 - prob))
        assert abs(np.count_nonzero(picks == k) - n * prob) <= 4 * sigma + 1, (k, prob)
    result = stats.kstest(draws, lambda t: mixture_cdf(m, np.clip(t, 0.0, TWO_PI)))
    assert result.pvalue > 1e-3, result.pvalue
    print(f"✓ Component frequencies within 4 sigma, KS p-value {result.pvalue:.3f}")

    print("\n✅ Mixture Sampling: ALL TESTS PASSED")


def test_multivariate_sampling():
    """Test chain-rule sampling of multivariate models."""
    print("\n" + "=" * 70)
    print("TEST: Multivariate Sampling")
    print("=" * 70)

    p = random_params((2, 2))
    data = sample(p, RngState(8), 3000)
    assert data.var_names == ("theta1", "theta2")
    assert np.array_equal(data.rows, sample(p, RngState(8), 3000).rows)
    assert not np.array_equal(data.rows, sample(p, RngState(10), 3000).rows)
    for var in (1, 2):
        m = marginal(p, [var])
        result = stats.kstest(data.rows[:, var - 1], lambda t: mixture_cdf(m, np.clip(t, 0.0, TWO_PI)))
        assert result.pvalue > 1e-3, (var, result.pvalue)
    print("✓ Deterministic per seed, both marginals pass KS")

    p = random_params((2, 2))
    n = 10000
    data = sample(p, RngState(77), n)
    edges = TWO_PI * np.arange(13) / 12
    observed, _, _ = np.histogram2d(data.rows[:, 0], data.rows[:, 1], bins=[edges, edges])
    expected = np.array([
        [cell_probability(p, (edges[i], edges[j]), (edges[i + 1], edges[j + 1])) for j in range(12)]
        for i in range(12)
    ]) * n
    assert abs(expected.sum() - n) < 1e-6
    observed, expected = observed.ravel(), expected.ravel()
    small = expected < 5
    if np.any(small):
        observed = np.append(observed[~small], observed[small].sum())
        expected = np.append(expected[~small], expected[small].sum())
    statistic = np.sum((observed - expected) ** 2 / expected)
    p_value = stats.chi2.sf(statistic, observed.size - 1)
    assert p_value > 0.01, p_value
    print(f"✓ 12x12 chi-squared test: p-value {p_value:.3f}")

    indep = product_model([random_params((2,)), random_params((2,))])
    data = sample(indep, RngState(4), 10000)
    r = circular_correlation(data.rows[:, 0], data.rows[:, 1])
    assert abs(r) < 0.05, r
    print(f"✓ Independent blocks are uncorrelated: r = {r:.4f}")

    data = sample(random_params((1, 0, 2)), RngState(12), 200, var_names=("a", "b", "c"))
    assert data.rows.shape == (200, 3) and data.var_names == ("a", "b", "c")
    assert data.rows.min() >= 0.0 and data.rows.max() < TWO_PI
    try:
        sample(p, 1, 10, var_names=("only",))
        assert False, "Should reject a name count mismatch"
    except ArgumentError:
        pass
    print("✓ Trivariate draws and variable names")

    print("\n✅ Multivariate Sampling: ALL TESTS PASSED")


def run_all_tests():
    """Run all tests."""
    print("\n" + "=" * 70)
    print("MNNTS SAMPLING - TEST SUITE")
    print("=" * 70)

    tests = [
        ("RngState", test_rng_state),
        ("Univariate Sampling", test_univariate_sampling),
        ("Mixture Sampling", test_mixture_sampling),
        ("Multivariate Sampling", test_multivariate_sampling),
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
