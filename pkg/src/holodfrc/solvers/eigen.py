"""Generalized Rayleigh quotient maximization.

max_w (w^H A w)/(w^H B w) over nonzero w, for Hermitian A and positive
definite B, equals the largest eigenvalue of B^{-1} A with the corresponding
eigenvector as maximizer.  Solved through the symmetric-definite reduction
(Cholesky of B) for numerical stability rather than forming B^{-1} A.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla


def grq_max(a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest generalized eigenvalue and unit-norm eigenvector of (A, B).

    Raises ValueError when B is not positive definite.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    # Round-off guard: assemblies deliver Hermitian matrices up to float noise.
    a = 0.5 * (a + a.conj().T)
    b = 0.5 * (b + b.conj().T)
    try:
        sla.cholesky(b, lower=True)
    except np.linalg.LinAlgError as exc:
        raise ValueError("B must be positive definite") from exc
    vals, vecs = sla.eigh(a, b, check_finite=False)
    w = vecs[:, -1]
    w = w / np.linalg.norm(w)
    return float(vals[-1]), w


def rayleigh_quotient(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> float:
    num = float(np.real(w.conj() @ a @ w))
    den = float(np.real(w.conj() @ b @ w))
    return num / den
