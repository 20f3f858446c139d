"""Exact modal factorization of the five-point Laplacian.

On a box whose scalar ghosts are mirror (Neumann) or wrap (periodic), the
discrete Laplacian is diagonal in a tensor cosine/Fourier basis: DCT-II per
Neumann axis, FFT per periodic axis.  That gives a direct solver for any
operator that is a polynomial in the Laplacian (the phase-field update) and
a strong preconditioner for variable-coefficient Poisson problems.

Transform plumbing note: the periodic axis uses a real FFT applied after the
cosine transform, so every intermediate stays a real-to-complex transform of
real data.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft as sfft

from .grid import Grid2D


def _workers() -> int:
    env = os.environ.get("TRIPLEFLOW_THREADS", "")
    try:
        n = int(env)
    except ValueError:
        return 1
    return max(1, n)


def _lam_neumann(n: int, h: float) -> np.ndarray:
    k = np.arange(n)
    return (2.0 - 2.0 * np.cos(np.pi * k / n)) / (h * h)


def _lam_periodic_full(n: int, h: float) -> np.ndarray:
    k = np.arange(n)
    return (2.0 - 2.0 * np.cos(2.0 * np.pi * k / n)) / (h * h)


def _lam_periodic_half(n: int, h: float) -> np.ndarray:
    k = np.arange(n // 2 + 1)
    return (2.0 - 2.0 * np.cos(2.0 * np.pi * k / n)) / (h * h)


class ModalLaplacian:
    """Forward/inverse transforms plus the eigenvalue table for one grid.

    ``eigenvalues`` has the shape of the transformed interior and holds the
    eigenvalues of minus the Laplacian (all ``>= 0``; the (0, 0) entry is the
    constant mode).
    """

    def __init__(self, grid: Grid2D):
        self.grid = grid
        self.px = grid.periodic_x
        self.py = grid.periodic_y
        nx, ny, hx, hy = grid.nx, grid.ny, grid.hx, grid.hy
        if self.px and self.py:
            lx = _lam_periodic_full(nx, hx)
            ly = _lam_periodic_half(ny, hy)
        elif self.px:
            lx = _lam_periodic_half(nx, hx)
            ly = _lam_neumann(ny, hy)
        elif self.py:
            lx = _lam_neumann(nx, hx)
            ly = _lam_periodic_half(ny, hy)
        else:
            lx = _lam_neumann(nx, hx)
            ly = _lam_neumann(ny, hy)
        self.eigenvalues = lx[:, None] + ly[None, :]

    def forward(self, u: np.ndarray) -> np.ndarray:
        w = _workers()
        if self.px and self.py:
            return sfft.fft(sfft.rfft(u, axis=1, workers=w), axis=0, workers=w)
        if self.px:
            t = sfft.dct(u, type=2, axis=1, norm="ortho", workers=w)
            return sfft.rfft(t, axis=0, workers=w)
        if self.py:
            t = sfft.dct(u, type=2, axis=0, norm="ortho", workers=w)
            return sfft.rfft(t, axis=1, workers=w)
        return sfft.dctn(u, type=2, norm="ortho", workers=w)

    def inverse(self, U: np.ndarray) -> np.ndarray:
        w = _workers()
        g = self.grid
        if self.px and self.py:
            t = sfft.ifft(U, axis=0, workers=w)
            return sfft.irfft(t, n=g.ny, axis=1, workers=w)
        if self.px:
            t = sfft.irfft(U, n=g.nx, axis=0, workers=w)
            return sfft.idct(t, type=2, axis=1, norm="ortho", workers=w)
        if self.py:
            t = sfft.irfft(U, n=g.ny, axis=1, workers=w)
            return sfft.idct(t, type=2, axis=0, norm="ortho", workers=w)
        return sfft.idctn(U, type=2, norm="ortho", workers=w)

    def solve_polynomial(self, rhs: np.ndarray, coeffs: tuple[float, ...]) -> np.ndarray:
        """Solve ``sum_k coeffs[k] (-Laplacian)^k u = rhs`` exactly.

        With ``coeffs[0] == 0`` the operator is singular on constants; the
        constant mode of the solution is then set to zero (and the right-hand
        side is assumed mean-free).
        """
        lam = self.eigenvalues
        symbol = np.zeros_like(lam)
        for k, a in enumerate(coeffs):
            if a != 0.0:
                symbol += a * lam**k
        U = self.forward(rhs)
        if symbol.flat[0] == 0.0:
            symbol = symbol.copy()
            symbol.flat[0] = 1.0
            U = U.copy()
            U.flat[0] = 0.0
        return self.inverse(U / symbol)

    def make_poisson_preconditioner(self, bbar: float):
        """Inverse of ``-bbar * Laplacian`` (constant-mode component dropped)."""

        lam = self.eigenvalues * bbar
        inv = np.zeros_like(lam)
        nonzero = lam > 0.0
        inv[nonzero] = 1.0 / lam[nonzero]

        def apply(r: np.ndarray) -> np.ndarray:
            return self.inverse(self.forward(r) * inv)

        return apply
