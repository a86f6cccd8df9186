"""Chern numbers of Bloch bands on a discretized Brillouin zone.

Uses U(1) link variables built from normalized right-eigenvector overlaps
on a periodic n x n grid and the gauge-invariant plaquette field
F = Im log of the four-link product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBandError
from .greens_free import LIGHT_CIRCLE_GUARD
from .lattice import K0, LatticeSpec, LevelScheme, bz_grid
from .bloch import build_bloch_matrix

#: minimum allowed inter-band spacing on the grid before Chern numbers are
#: declared undefined
DEFAULT_GAP_FLOOR = 1e-6

#: default grid size; small gaps (~0.6 Gamma_0) need a fine grid
DEFAULT_GRID_N = 60


@dataclass
class ChernResult:
    """Per-band Chern integers with the underlying Berry-flux field."""

    chern: np.ndarray        # (nbands,) int
    flux: np.ndarray         # (nbands, n, n) plaquette field in (-pi, pi]
    residual: np.ndarray     # |sum flux / 2pi - C| per band
    min_gap: float           # smallest adjacent-band spacing seen on grid
    n: int


def _grid_eigvecs(lattice, scheme, n, env, a_ho, g_max, a_reg, k, guard):
    kgrid = bz_grid(lattice, n)
    dim = lattice.n_sites * scheme.n_components
    vals = np.zeros((n, n, dim), dtype=complex)
    vecs = np.zeros((n, n, dim, dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            bm = build_bloch_matrix(lattice, scheme, kgrid[i, j], env=env,
                                    a_ho=a_ho, g_max=g_max, a_reg=a_reg,
                                    k=k, guard=guard)
            w, v = np.linalg.eig(bm.matrix)
            order = np.argsort(w.real)
            vals[i, j] = w[order]
            vecs[i, j] = v[:, order] / np.linalg.norm(v[:, order], axis=0)
    return vals, vecs


def berry_flux_map(lattice: LatticeSpec, scheme: LevelScheme,
                   n: int = DEFAULT_GRID_N, *, env=None, a_ho: float = 0.0,
                   g_max: float | None = None, a_reg: float | None = None,
                   k: float = K0, guard: float = LIGHT_CIRCLE_GUARD,
                   gap_floor: float = DEFAULT_GAP_FLOOR) -> ChernResult:
    """Plaquette Berry-flux field and Chern numbers for every band."""
    vals, vecs = _grid_eigvecs(lattice, scheme, n, env, a_ho, g_max, a_reg,
                               k, guard)
    gaps = np.diff(vals.real, axis=-1)
    min_gap = float(gaps.min())
    if min_gap < gap_floor:
        i, j, b = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise DegenerateBandError(
            f"bands {b} and {b + 1} touch at grid plaquette ({i}, {j}) "
            f"(spacing {min_gap:.2e}); Chern numbers are undefined")
    nb = vals.shape[-1]
    # Link variables along the two grid directions, periodic wrap via roll.
    v = vecs
    v1 = np.roll(vecs, -1, axis=0)
    v2 = np.roll(vecs, -1, axis=1)
    ux = np.einsum("ijdb,ijdb->ijb", v.conj(), v1)
    uy = np.einsum("ijdb,ijdb->ijb", v.conj(), v2)
    ux /= np.abs(ux)
    uy /= np.abs(uy)
    prod = (ux * np.roll(uy, -1, axis=0)
            * np.roll(ux, -1, axis=1).conj() * uy.conj())
    flux = np.angle(prod)
    total = flux.sum(axis=(0, 1)) / (2.0 * np.pi)
    chern = np.rint(total).astype(int)
    residual = np.abs(total - chern)
    return ChernResult(chern, np.moveaxis(flux, -1, 0), residual, min_gap, n)


def chern_numbers(lattice: LatticeSpec, scheme: LevelScheme,
                  n: int = DEFAULT_GRID_N, *, env=None, a_ho: float = 0.0,
                  g_max: float | None = None, a_reg: float | None = None,
                  k: float = K0, guard: float = LIGHT_CIRCLE_GUARD,
                  gap_floor: float = DEFAULT_GAP_FLOOR,
                  residual_tol: float = 0.01) -> ChernResult:
    """Chern numbers for all bands; raises if the grid is too coarse."""
    res = berry_flux_map(lattice, scheme, n, env=env, a_ho=a_ho, g_max=g_max,
                         a_reg=a_reg, k=k, guard=guard, gap_floor=gap_floor)
    if res.residual.max() > residual_tol:
        raise DegenerateBandError(
            f"Chern residual {res.residual.max():.3f} exceeds "
            f"{residual_tol}; increase the grid size (n={n})")
    return res


def plaquette_fluxes_from_vectors(vecs: np.ndarray) -> np.ndarray:
    """Plaquette field for externally supplied eigenvectors.

    ``vecs`` has shape (n, n, dim, nbands); exposed for gauge-invariance
    checks.
    """
    v1 = np.roll(vecs, -1, axis=0)
    v2 = np.roll(vecs, -1, axis=1)
    ux = np.einsum("ijdb,ijdb->ijb", vecs.conj(), v1)
    uy = np.einsum("ijdb,ijdb->ijb", vecs.conj(), v2)
    ux /= np.abs(ux)
    uy /= np.abs(uy)
    prod = (ux * np.roll(uy, -1, axis=0)
            * np.roll(ux, -1, axis=1).conj() * uy.conj())
    return np.angle(prod)
