"""Brute-force oracles used by the test-suite."""

from __future__ import annotations

import itertools
from collections.abc import Callable

import numpy as np

from lsdc._types import FloatArray, IntArray


def central_difference(
    fn: Callable[[FloatArray], float], x: FloatArray, step: float = 1e-5
) -> FloatArray:
    """Return the central finite-difference gradient of a scalar function at x."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + step
        up = fn(x)
        x[idx] = orig - step
        down = fn(x)
        x[idx] = orig
        grad[idx] = (up - down) / (2 * step)
    return grad


def assert_gradient_close(
    analytic: FloatArray, numeric: FloatArray, rtol: float = 1e-4, atol: float = 1e-8
) -> None:
    """Assert relative agreement of two gradients, scaled by the larger norm."""
    scale = max(np.abs(numeric).max(), np.abs(analytic).max(), atol)
    err = np.abs(analytic - numeric).max() / scale
    assert err < rtol, f"relative gradient error {err:.3e} exceeds {rtol:.1e}"


def loop_adjacency(
    kind: str,
    x: FloatArray,
    tau: float | None = None,
    temperature: float | None = None,
    k: int | None = None,
) -> IntArray:
    """Return the adjacency of a batch computed pair by pair with scalar loops."""
    b = x.shape[0]
    d2 = [[float(np.sum((x[i] - x[j]) ** 2)) for j in range(b)] for i in range(b)]
    a = np.eye(b, dtype=np.int64)
    if kind == "knn":
        for i in range(b):
            ranked = sorted((d2[i][j], j) for j in range(b) if j != i)
            for _, j in ranked[:k]:
                a[i, j] = a[j, i] = 1
        return a
    if kind == "sne":
        z = [sum(np.exp(-d2[i][m] / temperature**2) for m in range(b) if m != i) for i in range(b)]
    for i in range(b):
        for j in range(b):
            if i == j:
                continue
            if kind == "l2":
                connected = d2[i][j] < tau
            elif kind == "cosine":
                cos = float(x[i] @ x[j]) / (np.linalg.norm(x[i]) * np.linalg.norm(x[j]))
                connected = cos > tau
            else:
                harmonic = 2 * z[i] * z[j] / (z[i] + z[j])
                connected = np.exp(-d2[i][j] / temperature**2) / harmonic > tau
            if connected:
                a[i, j] = 1
    return a


def enumerate_assignment(cost: FloatArray) -> tuple[tuple[int, ...], float]:
    """Return the minimum-cost permutation by enumerating all of them."""
    size = cost.shape[0]
    best = min(
        itertools.permutations(range(size)),
        key=lambda perm: sum(cost[i, perm[i]] for i in range(size)),
    )
    return best, float(sum(cost[i, best[i]] for i in range(size)))


def loop_composite_targets(
    a: FloatArray, perms: list[IntArray], weights: FloatArray
) -> FloatArray:
    """Return sum_s w_s A[i, perm_s(j)] with explicit loops."""
    b = a.shape[0]
    t = np.zeros((b, b))
    for i in range(b):
        for j in range(b):
            t[i, j] = sum(w * a[i, perm[j]] for w, perm in zip(weights, perms))
    return t


def random_probs(rng: np.random.Generator, b: int, k: int) -> FloatArray:
    """Return a random B x K matrix of probability rows."""
    logits = rng.normal(size=(b, k))
    e = np.exp(logits - logits.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)
