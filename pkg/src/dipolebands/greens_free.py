"""Free-space dyadic Green's function and its regularized Weyl decomposition.

Everything is vectorized over trailing momentum/position axes.  The
fluctuation width ``a_ho`` enters as a Gaussian momentum cutoff
exp(-a_ho^2 p^2 / 2); ``a_ho = 0`` selects the point-dipole limit in which
the contact (delta-function) term is dropped.
"""

from __future__ import annotations

import numpy as np
from scipy.special import wofz

from .errors import ConvergenceError, LightConeError
from .lattice import LatticeSpec, reciprocal_basis

#: default light-circle guard, relative to k
LIGHT_CIRCLE_GUARD = 1e-6

#: default regularization width (units of 1/k) used for point atoms
POINT_ATOM_AHO_K = 0.01

#: reciprocal-space cutoff in units of 1/a_ho; exp(-tail^2/2) bounds the
#: relative weight of the discarded Gaussian tail
SHELL_TAIL = 7.5


def greens_real(r, k: float) -> np.ndarray:
    """Free-space dyadic Green's function at displacement ``r`` (without the
    contact term).

    ``r`` has shape (..., 3); the result has shape (..., 3, 3).  Raises for
    zero displacement: the self-term is handled by
    :func:`regularized_source`.
    """
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r, axis=-1)
    if np.any(d == 0.0):
        raise ValueError(
            "greens_real is undefined at r = 0; use regularized_source")
    kr = k * d
    n = r / d[..., None]
    outer = n[..., :, None] * n[..., None, :]
    eye = np.eye(3)
    pref = -np.exp(1j * kr) / (4.0 * np.pi * d)
    s = 1.0 + 1j / kr - 1.0 / kr**2
    t = -1.0 - 3j / kr + 3.0 / kr**2
    return pref[..., None, None] * (s[..., None, None] * eye
                                    + t[..., None, None] * outer)


def regularized_source(k: float, a_ho: float) -> complex:
    """Fluctuation-averaged Green's function at the source, G*(0).

    Returns the complex scalar multiplying the identity.  Requires
    ``a_ho > 0``; the point-atom limit is taken by the cutoff-compensated
    lattice sum, never by this value alone.
    """
    if a_ho <= 0.0:
        raise ValueError("regularized_source requires a_ho > 0")
    u = k * a_ho / np.sqrt(2.0)
    # exp(-u^2) (erfi(u) - i) = -i w(u) with w the Faddeeva function.
    osc = -1j * wofz(u)
    alg = ((k * a_ho) ** 2 - 0.5) / (np.sqrt(np.pi / 2.0) * (k * a_ho) ** 3)
    return k / (6.0 * np.pi) * (osc - alg)


def _lambda_causal(p2, k: float):
    """sqrt(k^2 - p^2) on the causal branch: Re >= 0, evanescent +i|...|."""
    return np.sqrt(np.asarray(k**2 - p2, dtype=complex))


def weyl_auxiliaries(p, k: float, a_ho: float = 0.0,
                     guard: float = LIGHT_CIRCLE_GUARD):
    """Building blocks (Lambda, C, I0, I2) of the regularized Weyl tensor.

    ``p`` has shape (..., 2).  The odd integral I1 vanishes identically at
    z = 0 and is not returned.
    """
    p = np.asarray(p, dtype=float)
    p2 = p[..., 0] ** 2 + p[..., 1] ** 2
    pn = np.sqrt(p2)
    if np.any(np.abs(pn - k) < guard * k):
        raise LightConeError(
            "momentum sample within the light-circle guard band")
    lam = _lambda_causal(p2, k)
    cfac = np.exp(-0.5 * a_ho**2 * p2) / (2.0 * np.pi * k**2)
    # exp(-a^2 Lam^2/2) [-i + erfi(a Lam/sqrt 2)] = -i w(a Lam/sqrt 2):
    # the Faddeeva function keeps the product finite for evanescent Lambda.
    osc = -1j * wofz(a_ho * lam / np.sqrt(2.0))
    i0 = cfac * np.pi * osc / lam
    if a_ho > 0.0:
        i2 = cfac * (-np.sqrt(2.0 * np.pi) / a_ho + np.pi * lam * osc)
    else:
        # Point limit: the -sqrt(2 pi)/a_ho contact divergence is the
        # delta-term counterpart and is dropped, as in greens_real.
        i2 = cfac * np.pi * lam * osc
    return lam, cfac, i0, i2


def weyl_regularized(p, k: float, a_ho: float = 0.0,
                     guard: float = LIGHT_CIRCLE_GUARD) -> np.ndarray:
    """Regularized Weyl tensor g*(p; z=0); shape (..., 3, 3)."""
    p = np.asarray(p, dtype=float)
    _, _, i0, i2 = weyl_auxiliaries(p, k, a_ho, guard)
    px = p[..., 0]
    py = p[..., 1]
    g = np.zeros(p.shape[:-1] + (3, 3), dtype=complex)
    g[..., 0, 0] = (k**2 - px**2) * i0
    g[..., 1, 1] = (k**2 - py**2) * i0
    g[..., 2, 2] = k**2 * i0 - i2
    g[..., 0, 1] = g[..., 1, 0] = -px * py * i0
    return g


def default_g_max(a_reg: float) -> float:
    """Reciprocal-space cutoff large enough for the Gaussian tail at ``a_reg``."""
    return SHELL_TAIL / a_reg


def lattice_sum_free(lattice: LatticeSpec, k_b, k: float, a_ho: float = 0.0,
                     offset=None, g_max: float | None = None,
                     a_reg: float | None = None,
                     guard: float = LIGHT_CIRCLE_GUARD,
                     check_tail: bool = True) -> np.ndarray:
    """Momentum-space lattice sum of the free-space Green's function.

    With ``offset=None`` this is the same-sublattice sum
    ``pref * (1/A) sum_G g*(G - k_B; 0) - G*(0)``; with a 2-vector
    ``offset`` it is the inter-sublattice sum carrying the phase
    ``exp(+i offset.(G - k_B))`` and no source subtraction.

    ``a_ho = 0`` selects point atoms: the sum is evaluated at a small
    regularization width ``a_reg`` (default 0.01/k) and compensated by the
    cutoff-independence prefactor exp(k^2 a_reg^2 / 2).  ``a_ho > 0``
    evaluates the physical fluctuating-atom sum (no prefactor).
    """
    k_b = np.asarray(k_b, dtype=float)
    point = a_ho == 0.0
    if point:
        a_eff = a_reg if a_reg is not None else POINT_ATOM_AHO_K / k
    else:
        a_eff = a_ho
    if g_max is None:
        g_max = default_g_max(a_eff)
    rec = reciprocal_basis(lattice, g_max)
    p = rec.shells - k_b
    _, _, i0, i2 = weyl_auxiliaries(p, k, a_eff, guard)
    if offset is not None:
        phase = np.exp(1j * (p @ np.asarray(offset, dtype=float)))
        i0 = i0 * phase
        i2 = i2 * phase
    px = p[:, 0]
    py = p[:, 1]

    def assemble(w0, w2, wxx, wyy, wxy):
        g = np.zeros((3, 3), dtype=complex)
        g[0, 0] = k**2 * w0 - wxx
        g[1, 1] = k**2 * w0 - wyy
        g[2, 2] = k**2 * w0 - w2
        g[0, 1] = g[1, 0] = -wxy
        return g

    total = assemble(i0.sum(), i2.sum(), px**2 @ i0, py**2 @ i0,
                     (px * py) @ i0) / lattice.area
    if check_tail:
        # Absolute-value bound on the outermost-ring contribution.
        outer = np.hypot(px, py) > 0.9 * g_max
        a0 = np.abs(i0[outer])
        tail = max(np.abs(k**2 - px[outer]**2) @ a0,
                   np.abs(k**2 - py[outer]**2) @ a0,
                   np.abs(k**2 * i0[outer] - i2[outer]).sum(),
                   np.abs(px[outer] * py[outer]) @ a0) / lattice.area
        scale = max(np.abs(total).max(), 1.0)
        if tail > 1e-4 * scale:
            raise ConvergenceError(
                "last reciprocal shells still contribute significantly",
                details={"tail": tail, "g_max": g_max})
    if point:
        total = total * np.exp(0.5 * (k * a_eff) ** 2)
    if offset is None:
        total = total - regularized_source(k, a_eff) * np.eye(3)
    return total


def cutoff_extrapolated_sum(lattice: LatticeSpec, k_b, k: float,
                            a_ho_sequence, offset=None,
                            g_max: float | None = None,
                            rel_tol: float = 1e-3):
    """Point-atom lattice sum with an explicit a_ho -> 0 plateau check.

    Evaluates the cutoff-compensated combination at each width in the
    strictly decreasing ``a_ho_sequence`` and Richardson-extrapolates the
    last two values in a_ho^2.  Raises :class:`ConvergenceError` when the
    sequence does not plateau to ``rel_tol`` (relative, per component).
    """
    seq = [float(a) for a in a_ho_sequence]
    if any(b >= a for a, b in zip(seq, seq[1:])) or len(seq) < 2:
        raise ValueError("a_ho_sequence must be strictly decreasing, len >= 2")
    vals = [lattice_sum_free(lattice, k_b, k, a_ho=0.0, offset=offset,
                             g_max=g_max, a_reg=a) for a in seq]
    vals = np.array(vals)
    scale = max(np.abs(vals[-1]).max(), 1e-30)
    spread = np.abs(vals[-1] - vals[-2]).max() / scale
    if spread > rel_tol:
        raise ConvergenceError(
            "cutoff extrapolation did not plateau",
            details={"spread": spread, "values": vals, "a_ho": seq})
    x1, x2 = seq[-2] ** 2, seq[-1] ** 2
    extrap = (vals[-1] * x1 - vals[-2] * x2) / (x1 - x2)
    return extrap, spread
