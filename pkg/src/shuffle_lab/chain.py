"""Exact single-card position chains.

The position of one card is Markov under all three shuffles (cut patterns and
coins are i.i.d.), so these kernels are computed in closed form; no simulation
enters this module.

Conventions: positions 1..n; ``rows[k-1, j-1] = P(next = j | now = k)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .models import CIRCULAR, OVERHAND, ShuffleModel

ROW_SUM_TOL = 1e-12
FOLD_WIDTH = 64  # circular law folded over |j| <= FOLD_WIDTH * n


class PowerIterationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PositionKernel:
    n: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        object.__setattr__(self, "rows", rows)
        if rows.shape != (self.n, self.n):
            raise ValueError(f"kernel must be {self.n}x{self.n}, got {rows.shape}")
        if np.any(rows < -1e-15):
            raise ValueError("negative kernel entry")
        err = np.abs(rows.sum(axis=1) - 1.0).max()
        if err > ROW_SUM_TOL:
            raise ValueError(f"row sums off by {err:.3e} (> {ROW_SUM_TOL})")


def _geom_with_atom(p: float, length: int) -> np.ndarray:
    """P(distance to the next cut) on 0..length: p(1-p)^d, atom (1-p)^length
    at the deck end."""
    d = np.arange(length + 1, dtype=np.float64)
    law = p * (1.0 - p) ** d
    law[length] = (1.0 - p) ** length
    return law


def _overhand_rows(n: int, p: float) -> np.ndarray:
    rows = np.empty((n, n))
    for k in range(1, n + 1):
        up = _geom_with_atom(p, k - 1)      # A: distance to the cut above
        down = _geom_with_atom(p, n - k)    # B: distance to the cut below
        # destination k + (B - A) spans exactly 1..n; the reversed/ shifted
        # convolution lines index m up with destination m + 1
        rows[k - 1, :] = np.convolve(down, up[::-1])
    return rows


def circular_displacement_law(n: int, p: float) -> np.ndarray:
    """Two-sided geometric law c(1-p)^|j|, c = p/(2-p), folded mod n and
    renormalized (the >= 1-cut conditioning; truncation error (1-p)^(64n))."""
    c = p / (2.0 - p)
    q = np.zeros(n)
    width = FOLD_WIDTH * n
    j = np.arange(-width, width + 1)
    np.add.at(q, np.mod(j, n), c * (1.0 - p) ** np.abs(j))
    return q / q.sum()


def _circular_rows(n: int, p: float) -> np.ndarray:
    q = circular_displacement_law(n, p)
    rows = np.empty((n, n))
    for k in range(n):
        rows[k] = np.roll(q, k)
    return rows


def _rudvalis_rows(n: int) -> np.ndarray:
    rows = np.zeros((n, n))
    for k in range(1, n - 1):
        rows[k - 1, k] = 1.0  # positions 1..n-2 shift down under either coin
    rows[n - 2, 0] = 0.5
    rows[n - 2, n - 1] = 0.5
    rows[n - 1, 0] = 0.5
    rows[n - 1, n - 1] = 0.5
    return rows


def position_kernel(m: ShuffleModel, n: int) -> PositionKernel:
    if n < 3:
        raise ValueError("position kernel needs n >= 3")
    if m.kind == OVERHAND:
        rows = _overhand_rows(n, m.p)
    elif m.kind == CIRCULAR:
        rows = _circular_rows(n, m.p)
    else:
        rows = _rudvalis_rows(n)
    return PositionKernel(n, rows)


def kernel_power(K: PositionKernel, t: int, check: bool = True) -> PositionKernel:
    """t-fold product by repeated squaring; float64 matmul keeps row sums
    within 1e-12 for every power used here (asserted when check=True)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    result = np.eye(K.n)
    base = K.rows.copy()
    e = t
    while e:
        if e & 1:
            result = result @ base
            if check:
                _assert_stochastic(result)
        e >>= 1
        if e:
            base = base @ base
            if check:
                _assert_stochastic(base)
    return PositionKernel(K.n, result)


def _assert_stochastic(rows: np.ndarray) -> None:
    err = np.abs(rows.sum(axis=1) - 1.0).max()
    if err > 1e-10:
        raise FloatingPointError(f"row sums drifted by {err:.3e}")


def rudvalis_nstep_closed_form(n: int, k: int) -> np.ndarray:
    """Exact law of a card's position after n Rudvalis steps, starting at k.

    For k outside {n-1, n}: the card rides deterministically to position n-1,
    then waits a geometric(1/2) number of steps to jump to the top; hence
    P(end at n) = 2^-(k+1) and P(end at j) = 2^-(k+2-j) for j = 1..k+1.
    For k in {n-1, n}: P(end at 1) = P(end at n) = 1/4 + 2^-n and
    P(end at j) = 2^-(n+1-j) for j = 2..n-1.
    """
    if n < 3:
        raise ValueError("needs n >= 3")
    if not 1 <= k <= n:
        raise ValueError(f"start position {k} out of 1..{n}")
    row = np.zeros(n)
    if k <= n - 2:
        row[n - 1] = 0.5 ** (k + 1)
        for j in range(1, k + 2):
            row[j - 1] = 0.5 ** (k + 2 - j)
    else:
        row[0] = row[n - 1] = 0.25 + 0.5**n
        for j in range(2, n):
            row[j - 1] = 0.5 ** (n + 1 - j)
    return row


def rudvalis_nstep_kernel(n: int) -> PositionKernel:
    rows = np.stack([rudvalis_nstep_closed_form(n, k) for k in range(1, n + 1)])
    return PositionKernel(n, rows)


def circulant_subdominant(q: np.ndarray) -> float:
    """Fourier eigenvalue at frequency 1 of a circulant kernel with
    displacement law q (symmetric spectrum cross-check)."""
    n = q.size
    d = np.arange(n)
    return float(np.sum(q * np.cos(2.0 * np.pi * d / n)))


def subdominant_eigenvalue(
    K: PositionKernel,
    tol: float = 1e-13,
    max_iter: int = 20000,
) -> float:
    """Largest-modulus eigenvalue orthogonal to the stationary vector, by
    power iteration with deflation of the constant mode.

    Intended for the doubly-stochastic, real-spectrum kernels built here
    (the packet-reversal kernels are symmetric).  Starts from the cosine
    vector, which is the exact subdominant eigenvector in the circulant case.
    Converges when successive Rayleigh quotients differ by less than ``tol``.
    """
    n = K.n
    A = K.rows
    v = np.cos(2.0 * np.pi * np.arange(1, n + 1) / n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    lam_prev = math.inf
    for _ in range(max_iter):
        w = A @ v
        lam = float(v @ w)
        w -= w.mean()
        nw = np.linalg.norm(w)
        if nw < 1e-300:
            return 0.0  # cosine mode annihilated; subdominant mass is zero
        v = w / nw
        if abs(lam - lam_prev) < tol:
            if abs(lam - 1.0) < 1e-12:
                warnings.warn(
                    "subdominant eigenvalue is 1 (degenerate kernel)",
                    stacklevel=2,
                )
            return lam
        lam_prev = lam
    raise PowerIterationError(
        f"power iteration did not converge in {max_iter} iterations"
    )
