"""Fractional maximin programming: tangent minorants plus Dinkelbach iteration.

The problems solved here share one shape: maximize the worst of several
quadratic ratios subject to convex quadratic constraints (per-subcarrier power
caps, linearized service-level constraints, box bounds).  Numerators are
handled through their affine tangent minorants, which turns every Dinkelbach
subproblem into the concave-branch epigraph QCQP of :mod:`.qcqp`; quadratic
numerators are supported by re-expanding the minorant in an outer loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qcqp import (
    ConcaveBranch,
    QuadConstraint,
    _embed_matrix,
    _embed_vector,
    solve_epigraph_qcqp,
)


def mm_minorize(h: np.ndarray, x_prev: np.ndarray) -> tuple[np.ndarray, float]:
    """Tangent affine lower bound of the PSD quadratic x -> x^H H x at x_prev.

    Returns (c, const) with  x^H H x >= 2 Re(c^H x) + const  for all x and
    equality at x = x_prev, where c = H x_prev and const = -x_prev^H H x_prev.
    """
    c = h @ x_prev
    const = -float(np.real(x_prev.conj() @ c))
    return c, const


@dataclass
class FractionalBranch:
    """One ratio: numerator over (x^H B x + noise).

    The numerator is either a PSD quadratic A (re-linearized per outer pass)
    or a fixed affine pair (c, const) meaning 2 Re(c^H x) + const.
    """

    denom: np.ndarray
    noise: float
    numer_quad: np.ndarray | None = None
    numer_affine: tuple[np.ndarray, float] | None = None

    def affine_at(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        if self.numer_affine is not None:
            return self.numer_affine
        return mm_minorize(self.numer_quad, x)

    def denom_value(self, x: np.ndarray) -> float:
        return float(np.real(x.conj() @ self.denom @ x)) + self.noise


@dataclass
class QuadraticFractionalProblem:
    branches: list[FractionalBranch]
    constraints: list[QuadConstraint] = field(default_factory=list)
    is_complex: bool = False

    def ratio(self, x: np.ndarray, surrogates=None) -> float:
        """Worst branch ratio; surrogate numerators when provided."""
        vals = []
        for i, br in enumerate(self.branches):
            if surrogates is not None:
                c, const = surrogates[i]
                num = 2.0 * float(np.real(np.vdot(c, x))) + const
            elif br.numer_quad is not None:
                num = float(np.real(x.conj() @ br.numer_quad @ x))
            else:
                c, const = br.numer_affine
                num = 2.0 * float(np.real(np.vdot(c, x))) + const
            vals.append(num / br.denom_value(x))
        return min(vals)


@dataclass
class DinkelbachResult:
    x: np.ndarray
    lam: float
    lam_history: list
    status: str  # "converged" | "max_iter" | "infeasible"


def _dinkelbach_affine(fp, surrogates, x0, zeta1, max_iter):
    """Dinkelbach loop for affine-numerator branches (fixed expansion point).

    The parametric subproblem max_x min_t [2 Re(c_t^H x) + const_t
    - lam (x^H B_t x + noise_t)] keeps per-branch constants: with several
    branches they shift which ratio is worst and cannot be dropped.

    Complex data is embedded into reals once here; only the lam-scaled copy
    of each denominator changes between subproblem solves.
    """
    if fp.is_complex:
        x = _embed_vector(np.asarray(x0, dtype=complex))
        denoms = [_embed_matrix(br.denom) for br in fp.branches]
        surr = [(_embed_vector(c), const) for c, const in surrogates]
        cons = [QuadConstraint(None if con.a is None else _embed_matrix(con.a),
                               _embed_vector(con.b), con.e)
                for con in fp.constraints]
    else:
        x = np.asarray(x0, dtype=float).copy()
        denoms = [br.denom for br in fp.branches]
        surr = list(surrogates)
        cons = list(fp.constraints)
    noises = [br.noise for br in fp.branches]

    def ratio(v):
        return min(
            (2.0 * float(c @ v) + const) / (float(v @ b @ v) + noise)
            for (c, const), b, noise in zip(surr, denoms, noises))

    lam = max(ratio(x), 0.0)
    history = [lam]
    status = "max_iter"
    for _ in range(max_iter):
        branches = [
            ConcaveBranch(c=c, q=lam * b, d=const - lam * noise)
            for (c, const), b, noise in zip(surr, denoms, noises)
        ]
        res = solve_epigraph_qcqp(branches, cons, x, is_complex=False)
        if res.status == "infeasible":
            # constraints do not involve lam, so this can only happen before
            # the first accepted iterate
            status = "infeasible"
            break
        x_new, f_gap = res.x, res.objective
        lam_new = ratio(x_new)
        if lam_new < lam:  # numerically stalled; keep the better iterate
            break
        x, lam = x_new, lam_new
        history.append(lam)
        d_min = min(float(x @ b @ x) + noise for b, noise in zip(denoms, noises))
        if f_gap <= zeta1 * max(1.0, abs(lam)) * d_min:
            status = "converged"
            break
    if fp.is_complex:
        half = len(x) // 2
        x = x[:half] + 1j * x[half:]
    return x, lam, history, status


def dinkelbach(fp: QuadraticFractionalProblem, x0: np.ndarray, zeta1: float,
               max_iter: int = 20, outer_iter: int = 30) -> DinkelbachResult:
    """Maximize the worst fractional branch of fp starting from feasible x0.

    Affine-numerator problems run a single Dinkelbach loop whose parameter
    sequence is nondecreasing.  Quadratic numerators wrap that loop in a
    minorize-maximize outer loop, re-expanding the tangent at each new point,
    which keeps the true worst ratio nondecreasing as well.
    """
    x = np.asarray(x0).copy()
    has_quad = any(br.numer_quad is not None for br in fp.branches)
    history: list = []
    if not has_quad:
        surrogates = [br.affine_at(x) for br in fp.branches]
        x, lam, history, status = _dinkelbach_affine(fp, surrogates, x, zeta1, max_iter)
        return DinkelbachResult(x, lam, history, status)

    lam_true = fp.ratio(x)
    status = "max_iter"
    for _ in range(outer_iter):
        surrogates = [br.affine_at(x) for br in fp.branches]
        x_new, _, hist, inner_status = _dinkelbach_affine(fp, surrogates, x,
                                                          zeta1, max_iter)
        history.extend(hist)
        if inner_status == "infeasible":
            status = "infeasible"
            break
        lam_new = fp.ratio(x_new)
        if lam_new < lam_true:
            break
        improved = lam_new - lam_true
        x, lam_true = x_new, lam_new
        if improved <= zeta1 * max(1.0, abs(lam_true)):
            status = "converged"
            break
    return DinkelbachResult(x, lam_true, history, status)
