"""Known temporal structure bases and the projection / expansion maps.

A basis is a tau x T matrix L with L @ L.T = c * I_tau for a scalar gram
constant c.  Three families are provided:

  identity:  L = I_T, c = 1 (no structure, tau = T)
  periodic:  L = (I_tau | ... | I_tau), c = T / tau (tau-periodic series)
  trig:      rows {1, sqrt(2) cos(2 pi n t / T), sqrt(2) sin(2 pi n t / T)}
             for n = 1..N evaluated at t = 1..T, tau = 2N + 1, c = T

Projection sends a d x T observation into the d x tau coefficient space
via X @ L.T / c (the pseudo-inverse is L.T / c because L @ L.T = c I);
expansion is the adjoint map back to d x T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

GRAM_RTOL = 1e-9


@dataclass(frozen=True)
class StructureBasis:
    kind: str              # "identity" | "periodic" | "trig"
    tau: int
    horizon: int
    gram_constant: float
    rows: np.ndarray       # tau x horizon

    def descriptor(self) -> dict:
        """Serializable identification of the basis (never the raw matrix)."""
        return {"kind": self.kind, "tau": self.tau, "horizon": self.horizon}


def _check_gram(rows: np.ndarray, c: float) -> None:
    tau = rows.shape[0]
    resid = np.linalg.norm(rows @ rows.T - c * np.eye(tau), "fro")
    if resid > GRAM_RTOL * c * tau:
        raise ValueError(
            f"basis gram residual {resid:.3e} exceeds {GRAM_RTOL * c * tau:.3e}; "
            "rows do not satisfy L L^T = c I"
        )


def build_identity(horizon: int) -> StructureBasis:
    """Unstructured basis: tau = T, L = I_T."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    return StructureBasis("identity", horizon, horizon, 1.0, np.eye(horizon))


def build_periodic(tau: int, horizon: int) -> StructureBasis:
    """Periodic basis: horizon must be a multiple of tau; c = horizon / tau."""
    if tau < 1:
        raise ValueError("tau must be positive")
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if horizon % tau != 0:
        raise ValueError(
            f"horizon {horizon} must be divisible by tau {tau} "
            "(periodic structure requires T = p * tau)"
        )
    p = horizon // tau
    rows = np.hstack([np.eye(tau)] * p)
    basis = StructureBasis("periodic", tau, horizon, horizon / tau, rows)
    _check_gram(rows, basis.gram_constant)
    return basis


def build_trig(n_freq: int, horizon: int) -> StructureBasis:
    """Real trigonometric basis with frequencies 0..n_freq; tau = 2 n_freq + 1.

    Discrete orthogonality L L^T = T I holds exactly when 2 * n_freq < T.
    """
    if n_freq < 0:
        raise ValueError("n_freq must be nonnegative")
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    if 2 * n_freq >= horizon:
        raise ValueError(
            f"2 * n_freq = {2 * n_freq} must be < horizon = {horizon} "
            "(discrete orthogonality breaks otherwise)"
        )
    t = np.arange(1, horizon + 1)
    rows = np.empty((2 * n_freq + 1, horizon))
    rows[0] = 1.0
    for n in range(1, n_freq + 1):
        phase = 2.0 * np.pi * n * t / horizon
        rows[2 * n - 1] = np.sqrt(2.0) * np.cos(phase)
        rows[2 * n] = np.sqrt(2.0) * np.sin(phase)
    basis = StructureBasis("trig", 2 * n_freq + 1, horizon, float(horizon), rows)
    _check_gram(rows, basis.gram_constant)
    return basis


def project(x, basis: StructureBasis) -> np.ndarray:
    """Project a d x T matrix onto the basis: X @ L^T / c (d x tau)."""
    x = as_matrix(x)
    if x.shape[1] != basis.horizon:
        raise ValueError(
            f"x has {x.shape[1]} columns but basis horizon is {basis.horizon}"
        )
    return x @ basis.rows.T / basis.gram_constant


def expand(a_tilde, basis: StructureBasis) -> np.ndarray:
    """Expand a d x tau coefficient matrix back to d x T: A @ L."""
    a_tilde = as_matrix(a_tilde)
    if a_tilde.shape[1] != basis.tau:
        raise ValueError(
            f"coefficient matrix has {a_tilde.shape[1]} columns "
            f"but basis tau is {basis.tau}"
        )
    return a_tilde @ basis.rows
