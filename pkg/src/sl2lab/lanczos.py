"""Lanczos iteration for the extreme eigenvalues of a self-adjoint operator.

Works on the orthogonal complement of a known eigenvector (the constant
vector, for Markov operators) and keeps the Krylov basis fully
reorthogonalised, which is affordable at the sizes used here (n in the low
thousands, a few hundred steps).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass(frozen=True)
class LanczosResult:
    theta_max: float
    theta_min: float
    residual: float
    iterations: int
    converged: bool


def lanczos_extremes(
    apply: Callable[[np.ndarray], np.ndarray],
    n: int,
    tol: float = 1e-10,
    maxiter: int | None = None,
    deflate: np.ndarray | None = None,
    seed: int = 0,
    check_every: int = 5,
) -> LanczosResult:
    """Largest and smallest eigenvalue of ``apply`` restricted to ``deflate``-perp.

    ``residual`` is the larger of the two explicit Ritz residuals
    ``||A x - theta x||`` for unit Ritz vectors ``x``.
    """
    if deflate is not None:
        u = np.asarray(deflate, dtype=float)
        u = u / np.linalg.norm(u)
    else:
        u = None
    dim = n - 1 if u is not None else n
    if maxiter is None:
        maxiter = int(np.ceil(50 * np.sqrt(n)))
    m = max(1, min(maxiter, dim))
    rng = np.random.Generator(np.random.Philox(seed))

    def project(v):
        if u is not None:
            v = v - u * (u @ v)
        return v

    def fresh(Qk):
        # random start vector orthogonal to the current basis
        v = project(rng.standard_normal(n))
        for _ in range(2):
            v -= Qk.T @ (Qk @ v)
        return v / np.linalg.norm(v)

    Q = np.zeros((m, n))
    alphas = np.zeros(m)
    betas = np.zeros(m)
    Q[0] = fresh(Q[:0])
    best = None
    k = 0
    for k in range(m):
        w = project(apply(Q[k]))
        alphas[k] = Q[k] @ w
        w -= alphas[k] * Q[k]
        if k > 0:
            w -= betas[k - 1] * Q[k - 1]
        for _ in range(2):
            w -= Q[: k + 1].T @ (Q[: k + 1] @ w)
        beta = float(np.linalg.norm(w))
        betas[k] = beta
        last = k == m - 1
        exhausted = beta < 1e-12 * max(1.0, abs(alphas[k]))
        full = last or (exhausted and k + 1 >= dim)
        if full or (not exhausted and (k + 1) % check_every == 0):
            theta, Y = _tridiag_eigs(alphas[: k + 1], betas[:k])
            est = beta * np.abs(Y[-1, [-1, 0]])
            if full or np.all(est <= 0.5 * tol):
                best = _ritz(apply, Q[: k + 1], theta, Y)
                if best[2] <= tol or full:
                    break
        if exhausted:
            # invariant subspace: continue the basis with a new direction
            betas[k] = 0.0
            if k + 1 < m:
                Q[k + 1] = fresh(Q[: k + 1])
        elif k + 1 < m:
            Q[k + 1] = w / beta
    if best is None:
        theta, Y = _tridiag_eigs(alphas[: k + 1], betas[:k])
        best = _ritz(apply, Q[: k + 1], theta, Y)
    tmax, tmin, res = best
    return LanczosResult(tmax, tmin, res, k + 1, bool(res <= tol))


def _tridiag_eigs(alphas, betas):
    if alphas.size == 1:
        return alphas.copy(), np.ones((1, 1))
    return eigh_tridiagonal(alphas, betas)


def _ritz(apply, Qk, theta, Y):
    res = 0.0
    for j in (-1, 0):
        x = Qk.T @ Y[:, j]
        x /= np.linalg.norm(x)
        r = apply(x) - theta[j] * x
        res = max(res, float(np.linalg.norm(r)))
    return float(theta[-1]), float(theta[0]), res
