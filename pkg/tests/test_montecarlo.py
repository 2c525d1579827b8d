"""Tests for the Wishart sampler and its empirical statistics."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from hardedge.distributions import FiniteSpec, gap_finite
from hardedge.microscopic import gap_micro
from hardedge.montecarlo import (
    SampleBatch,
    SamplerConfig,
    empirical_gap,
    exponential_correlation,
    hard_edge_scale,
    ks_distance,
    load_correlation,
    microscopic_rescale,
    sample_batch,
    trace_average,
)


def test_config_validation() -> None:
    config = SamplerConfig(p=3, n=5, num_samples=10, seed=1)
    assert config.nu == 2, "nu must be n - p"
    with pytest.raises(AssertionError):
        SamplerConfig(p=0, n=1, num_samples=1, seed=0)
    with pytest.raises(AssertionError):
        SamplerConfig(p=4, n=3, num_samples=1, seed=0)
    with pytest.raises(AssertionError):
        SamplerConfig(p=2, n=2, num_samples=0, seed=0)
    with pytest.raises(AssertionError):
        SamplerConfig(p=2, n=2, num_samples=1, seed=2**64)
    with pytest.raises(ValueError):
        SamplerConfig(p=3, n=3, num_samples=1, seed=0,
                      correlation=np.eye(2))
    skew = np.eye(3)
    skew[0, 1] = 1e-6
    with pytest.raises(ValueError):
        SamplerConfig(p=3, n=3, num_samples=1, seed=0, correlation=skew)
    with pytest.raises(ValueError):
        SamplerConfig(p=2, n=2, num_samples=1, seed=0,
                      correlation=np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_batch_validation() -> None:
    config = SamplerConfig(p=2, n=2, num_samples=3, seed=0)
    with pytest.raises(ValueError):
        SampleBatch(config=config, smallest_eigenvalues=np.ones(2))
    with pytest.raises(ValueError):
        SampleBatch(config=config,
                    smallest_eigenvalues=np.array([1.0, -0.5, 2.0]))
    batch = SampleBatch(config=config,
                        smallest_eigenvalues=np.array([0.5, 1.0, 2.0]))
    assert batch.algorithm == "Philox4x64"
    assert batch.key_scheme == "(seed, sample_index)"


def test_determinism_across_thread_counts() -> None:
    config = SamplerConfig(p=6, n=8, num_samples=200, seed=42)
    serial = sample_batch(config)
    threaded = sample_batch(config, workers=4)
    assert np.array_equal(serial.smallest_eigenvalues,
                          threaded.smallest_eigenvalues), \
        "thread count must not change any sample"


def test_single_entry_is_chi_square() -> None:
    # At p = n = 1 the eigenvalue is g^2 with unit mean and variance 2.
    config = SamplerConfig(p=1, n=1, num_samples=100_000, seed=7)
    batch = sample_batch(config, workers=4)
    mean = batch.smallest_eigenvalues.mean()
    assert abs(mean - 1.0) <= 3.0 * math.sqrt(2.0 / config.num_samples), \
        f"chi-square mean off: {mean}"


def test_scalar_correlation_rescales_samples() -> None:
    base = SamplerConfig(p=5, n=7, num_samples=50, seed=3)
    scaled = SamplerConfig(p=5, n=7, num_samples=50, seed=3,
                           correlation=2.5 * np.eye(5))
    ratio = sample_batch(scaled).smallest_eigenvalues \
        / sample_batch(base).smallest_eigenvalues
    assert np.max(np.abs(ratio / 2.5 - 1.0)) <= 1e-12, \
        "scalar correlation must rescale eigenvalues exactly"


def test_empirical_gap_endpoints_and_median() -> None:
    config = SamplerConfig(p=10, n=14, num_samples=4000, seed=2024)
    batch = sample_batch(config, workers=4)
    assert empirical_gap(batch, 0.0) == (1.0, 0.0)
    beyond = float(batch.smallest_eigenvalues.max()) + 1.0
    assert empirical_gap(batch, beyond) == (0.0, 0.0)
    median = brentq(
        lambda t: gap_finite(FiniteSpec(p=10, k=2, t=t)) - 0.5, 1e-4, 3.0)
    estimate, error = empirical_gap(batch, median)
    assert abs(estimate - 0.5) <= 3.0 * error, \
        f"estimate {estimate} too far from analytic median"


def test_ks_against_own_empirical_cdf() -> None:
    config = SamplerConfig(p=4, n=6, num_samples=500, seed=9)
    batch = sample_batch(config)
    ordered = np.sort(batch.smallest_eigenvalues)

    def own_cdf(x: float) -> float:
        return float(np.searchsorted(ordered, x, side="right")) / ordered.size

    assert ks_distance(batch, own_cdf) <= 1.0 / ordered.size + 1e-12


def test_ks_self_consistency_by_inverse_transform() -> None:
    # Drawing directly from the analytic CDF must stay under the 99%
    # Kolmogorov quantile 1.63/sqrt(N).
    count = 20000
    rng = np.random.Generator(
        np.random.Philox(key=np.array([99, 0], dtype=np.uint64)))
    quantiles = rng.random(count)
    samples = np.array([
        brentq(lambda u: 1.0 - gap_micro(0, u) - q, 1e-12, 400.0)
        for q in quantiles])
    config = SamplerConfig(p=1, n=1, num_samples=count, seed=99)
    synthetic = SampleBatch(config=config, smallest_eigenvalues=samples)
    distance = ks_distance(synthetic, lambda u: 1.0 - gap_micro(0, u))
    assert distance < 1.63 / math.sqrt(count), f"KS too large: {distance}"


def test_ks_against_analytic_gap() -> None:
    config = SamplerConfig(p=10, n=14, num_samples=20000, seed=2024)
    batch = sample_batch(config, workers=4)
    top = float(batch.smallest_eigenvalues.max()) * 1.01
    grid = np.linspace(0.0, top, 240)
    curve = np.array([gap_finite(FiniteSpec(p=10, k=2, t=t)) for t in grid])
    cdf = PchipInterpolator(grid, 1.0 - curve)
    assert ks_distance(batch, cdf) <= 0.02


def test_microscopic_rescale_round_trip() -> None:
    config = SamplerConfig(p=7, n=9, num_samples=100, seed=13)
    batch = sample_batch(config)
    rescaled = microscopic_rescale(batch)
    assert np.allclose(rescaled.smallest_eigenvalues,
                       28.0 * batch.smallest_eigenvalues, rtol=1e-15)
    back = microscopic_rescale(rescaled, inverse=True)
    assert np.allclose(back.smallest_eigenvalues,
                       batch.smallest_eigenvalues, rtol=1e-14)


def test_hard_edge_scale_accounts_for_correlation() -> None:
    plain = SamplerConfig(p=6, n=8, num_samples=40, seed=21)
    assert hard_edge_scale(plain) == 24.0
    shrunk = SamplerConfig(p=6, n=8, num_samples=40, seed=21,
                           correlation=0.5 * np.eye(6))
    assert hard_edge_scale(shrunk) == pytest.approx(48.0, rel=1e-14)
    # A scalar correlation rescales the eigenvalues and the hard-edge
    # factor inversely, so the microscopic variable is unchanged.
    u_plain = microscopic_rescale(sample_batch(plain)).smallest_eigenvalues
    u_shrunk = microscopic_rescale(sample_batch(shrunk)).smallest_eigenvalues
    assert np.allclose(u_shrunk, u_plain, rtol=1e-12)


def test_trace_moment_matches_correlation_diagonal() -> None:
    config = SamplerConfig(p=8, n=10, num_samples=4000, seed=11,
                           correlation=exponential_correlation(8))
    mean, error = trace_average(config)
    assert abs(mean - 1.0) <= 3.0 * error, \
        f"trace average {mean} off the diagonal mean 1.0"


def test_exponential_correlation_shape() -> None:
    corr = exponential_correlation(6, decay=0.5)
    assert corr.shape == (6, 6)
    assert np.all(np.diag(corr) == 1.0)
    assert corr[0, 3] == pytest.approx(0.125)
    np.linalg.cholesky(corr)


def test_load_correlation(tmp_path: Path) -> None:
    good = tmp_path / "corr.csv"
    matrix = exponential_correlation(4, decay=0.3)
    np.savetxt(good, matrix, delimiter=",")
    loaded = load_correlation(str(good), 4)
    assert np.allclose(loaded, matrix, atol=1e-12)

    wrong_size = tmp_path / "wrong.csv"
    np.savetxt(wrong_size, np.eye(3), delimiter=",")
    with pytest.raises(ValueError):
        load_correlation(str(wrong_size), 4)

    asymmetric = tmp_path / "asym.csv"
    skew = np.eye(4)
    skew[0, 1] = 1e-3
    np.savetxt(asymmetric, skew, delimiter=",")
    with pytest.raises(ValueError):
        load_correlation(str(asymmetric), 4)

    indefinite = tmp_path / "indef.csv"
    bad = np.eye(4)
    bad[0, 1] = bad[1, 0] = 2.0
    np.savetxt(indefinite, bad, delimiter=",")
    with pytest.raises(ValueError):
        load_correlation(str(indefinite), 4)
