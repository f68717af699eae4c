"""Canned problem instances for tests and experiments."""
from __future__ import annotations

import numpy as np

from .problem import ProblemInstance

COUNTEREXAMPLE_THRESHOLD = 2.0


def counterexample_instance(m_count: int = 8) -> ProblemInstance:
    """Three-sample landscape on which the two objectives disagree.

    The first parameter has every loss just under the canonical threshold,
    the last has the smallest mean thanks to a single outlier-ish zero loss,
    and everything in between is mediocre. Minimizing the mean picks the
    last index while maximizing the sub-threshold fraction picks the first,
    so the two optima drift apart without bound as the grid grows.
    """
    if m_count < 4:
        raise ValueError("need at least 4 parameters")
    if m_count & (m_count - 1):
        raise ValueError("parameter count must be a power of two")
    losses = np.tile([2.5, 2.0, 2.0], (m_count, 1)).astype(float)
    losses[0] = [1.9, 1.9, 1.9]
    losses[-1] = [2.1, 1.0, 0.0]
    theta = np.arange(1, m_count + 1, dtype=float)  # identity grid
    return ProblemInstance(theta_values=theta, losses=losses,
                           default_threshold=COUNTEREXAMPLE_THRESHOLD)


def synthetic_instance(m_count: int, n_count: int, seed: int,
                       distribution: str = "basin") -> ProblemInstance:
    """Deterministic synthetic landscape.

    "uniform": i.i.d. losses in [0, 1).

    "basin": a unique global minimum at a random center. Each sample j is
    free inside a radius that halves with j and expensive outside it, so
    the sub-threshold fraction climbs in geometrically narrowing steps down
    to a single best index. That gives amplitude amplification a region
    that keeps shrinking instead of a wide plateau.
    """
    rng = np.random.default_rng([seed, m_count, n_count])
    theta = np.arange(m_count, dtype=float)
    if distribution == "uniform":
        losses = rng.random((m_count, n_count))
        return ProblemInstance(theta_values=theta, losses=losses)
    if distribution != "basin":
        raise ValueError(f"unknown distribution {distribution!r}")
    center = int(rng.integers(m_count))
    dist = np.abs(np.arange(m_count) - center).astype(float)
    radii = np.array([m_count >> (j + 1) for j in range(n_count)], dtype=float)
    radii[-1] = 0.0
    outside = dist[:, None] > radii[None, :]
    losses = outside * (1.0 + dist[:, None] / m_count)
    return ProblemInstance(theta_values=theta, losses=losses,
                           default_threshold=0.5)


def outlier_classifier_instance(num_points: int, outlier_count: int,
                                seed: int, num_thresholds: int = 64) -> ProblemInstance:
    """1-D threshold classification with mislabeled extreme points.

    Clean class-0 points sit in [0, 1], clean class-1 points in [2, 3];
    outliers sit far right of everything but carry label 0. The grid is a
    set of candidate decision thresholds (predict 1 right of the
    threshold); the per-sample loss is 0 when the point is on its correct
    side and squared distance to the threshold otherwise, so distant
    misclassified outliers inflate mean losses hard.
    """
    if num_points < 1:
        raise ValueError("need at least one point")
    if outlier_count >= num_points:
        raise ValueError("outliers cannot outnumber the points")
    if num_thresholds & (num_thresholds - 1):
        raise ValueError("threshold count must be a power of two")
    rng = np.random.default_rng([seed, num_points, outlier_count])
    clean = num_points - outlier_count
    n0 = clean // 2
    n1 = clean - n0
    xs = np.concatenate([
        rng.uniform(0.0, 1.0, size=n0),
        rng.uniform(2.0, 3.0, size=n1),
        rng.uniform(3.5, 4.0, size=outlier_count),
    ])
    ys = np.concatenate([
        np.zeros(n0, dtype=int),
        np.ones(n1, dtype=int),
        np.zeros(outlier_count, dtype=int),  # mislabeled extremes
    ])
    is_outlier = np.zeros(num_points, dtype=bool)
    is_outlier[clean:] = True

    thresholds = np.linspace(-0.5, 4.5, num_thresholds)
    predicted_one = xs[None, :] > thresholds[:, None]
    wrong = predicted_one != (ys[None, :] == 1)
    losses = wrong * (xs[None, :] - thresholds[:, None]) ** 2
    problem = ProblemInstance(
        theta_values=thresholds,
        losses=losses,
        samples=tuple(zip(xs.tolist(), ys.tolist())),
        default_threshold=0.0,
    )
    # stash ground truth for evaluation helpers (frozen dataclass, so attach
    # via object.__setattr__ like __post_init__ does)
    object.__setattr__(problem, "labels", ys)
    object.__setattr__(problem, "points", xs)
    object.__setattr__(problem, "outlier_mask", is_outlier)
    return problem


def zero_one_error(problem: ProblemInstance, threshold_index: int,
                   subset: np.ndarray | None = None) -> float:
    """Fraction of (optionally masked) points misclassified by a threshold."""
    xs = problem.points
    ys = problem.labels
    predicted = (xs > problem.theta_values[threshold_index]).astype(int)
    wrong = predicted != ys
    if subset is not None:
        wrong = wrong[subset]
    return float(wrong.mean()) if len(wrong) else 0.0
