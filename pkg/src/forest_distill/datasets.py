"""Synthetic dataset generators for demos and verification.

The two *_like generators mimic the shapes and class structure of small
public time series benchmarks (daily power demand patterns and two-day
ECG recordings) so the full pipeline can be exercised without shipping
the original archives. Real archive files can always be loaded with
``io_formats.read_ucr_tsv`` instead.
"""

from __future__ import annotations

import numpy as np

from .model import CLASSIFICATION, REGRESSION, Dataset


def _znorm(X: np.ndarray) -> np.ndarray:
    mu = X.mean(axis=1, keepdims=True)
    sd = X.std(axis=1, keepdims=True)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def make_gaussian_classes(n_points: int = 120, n_features: int = 5,
                          n_classes: int = 2, separation: float = 2.0,
                          seed: int = 0) -> Dataset:
    """Gaussian blobs, one per class, separated along random directions."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=separation, size=(n_classes, n_features))
    per = n_points // n_classes
    X, y = [], []
    for c in range(n_classes):
        n = per + (1 if c < n_points - per * n_classes else 0)
        X.append(centers[c] + rng.normal(size=(n, n_features)))
        y.extend([c] * n)
    return Dataset(np.vstack(X), np.array(y), CLASSIFICATION)


def make_xor(n_points: int = 200, seed: int = 0) -> Dataset:
    """Two-feature XOR pattern: class is the quadrant parity."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n_points, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    return Dataset(X, y, CLASSIFICATION)


def make_single_feature_regression(n_points: int = 150, n_features: int = 4,
                                   noise: float = 0.05, seed: int = 0) -> Dataset:
    """Regression target driven by feature 0 plus small noise."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n_points, n_features))
    y = X[:, 0] + noise * rng.normal(size=n_points)
    return Dataset(X, y, REGRESSION)


def _power_demand_series(rng: np.random.Generator, n: int,
                         winter: bool, noise: float) -> np.ndarray:
    t = np.arange(24.0)
    X = np.empty((n, 24))
    for i in range(n):
        shift = rng.uniform(-1.2, 1.2)
        if winter:
            # Two demand peaks: morning and a stronger evening one.
            curve = (rng.uniform(0.5, 0.9) * np.exp(-((t - 8.5 - shift) ** 2) / 5.0)
                     + rng.uniform(0.9, 1.3) * np.exp(-((t - 19.0 - shift) ** 2) / 6.0))
        else:
            # One broad midday plateau.
            curve = rng.uniform(0.8, 1.2) * np.exp(-((t - 13.0 - shift) ** 2) / 40.0)
        curve += rng.uniform(-0.2, 0.2) + noise * rng.normal(size=24)
        X[i] = curve
    return _znorm(X)


def make_power_demand_like(n_train: int = 67, n_test: int = 1029,
                           noise: float = 0.35,
                           seed: int = 0) -> tuple[Dataset, Dataset]:
    """Two-class daily demand curves, 24 points, z-normalized per series.

    Class 0 shows a winter-style double peak, class 1 a flat summer
    plateau; the split sizes follow the usual small-train benchmark
    layout.
    """
    rng = np.random.default_rng(seed)

    def build(n):
        n0 = n // 2
        X = np.vstack([
            _power_demand_series(rng, n0, winter=True, noise=noise),
            _power_demand_series(rng, n - n0, winter=False, noise=noise),
        ])
        y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n - n0, dtype=int)])
        perm = rng.permutation(n)
        return Dataset(X[perm], y[perm], CLASSIFICATION)

    return build(n_train), build(n_test)


def _ecg_series(rng: np.random.Generator, n: int, peak_at: int,
                t_wave: float, noise: float, length: int) -> np.ndarray:
    t = np.arange(float(length))
    X = np.empty((n, length))
    for i in range(n):
        p = peak_at + rng.uniform(-2.0, 2.0)
        qrs = (-2.0 * np.exp(-((t - p + 3) ** 2) / 3.0)
               + rng.uniform(4.5, 5.5) * np.exp(-((t - p) ** 2) / 2.0)
               - 1.5 * np.exp(-((t - p - 4) ** 2) / 4.0))
        tw = t_wave * rng.uniform(0.8, 1.2) * np.exp(-((t - p - 22) ** 2) / 30.0)
        X[i] = qrs + tw + noise * rng.normal(size=length)
    return _znorm(X)


def make_ecg_days_like(n_train: int = 23, n_test: int = 861, length: int = 136,
                       noise: float = 0.25,
                       seed: int = 0) -> tuple[Dataset, Dataset]:
    """Two-class ECG-style signals distinguished around the main peak.

    The classes place the QRS peak at slightly different positions with
    different T-wave amplitudes, so a single subsequence feature can
    separate most of the data.
    """
    rng = np.random.default_rng(seed)

    def build(n):
        n0 = n // 2
        X = np.vstack([
            _ecg_series(rng, n0, peak_at=76, t_wave=1.2, noise=noise, length=length),
            _ecg_series(rng, n - n0, peak_at=86, t_wave=0.4, noise=noise, length=length),
        ])
        y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n - n0, dtype=int)])
        perm = rng.permutation(n)
        return Dataset(X[perm], y[perm], CLASSIFICATION)

    return build(n_train), build(n_test)


def make_two_level_series(n_points: int = 40, length: int = 24,
                          seed: int = 0) -> Dataset:
    """Separable toy: constant-level series at two distinct amplitudes."""
    rng = np.random.default_rng(seed)
    half = n_points // 2
    lo = rng.normal(0.0, 0.05, size=(half, length))
    hi = rng.normal(5.0, 0.05, size=(n_points - half, length))
    X = np.vstack([lo, hi])
    y = np.concatenate([np.zeros(half, dtype=int), np.ones(n_points - half, dtype=int)])
    return Dataset(X, y, CLASSIFICATION)
