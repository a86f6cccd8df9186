"""2D lattice geometry, reciprocal lattices and Brillouin-zone sampling.

Conventions used throughout the package:

* all lengths are measured in units of the transition wavelength (lambda = 1,
  so the free-space wavenumber is ``K0 = 2*pi``),
* all energies are measured in units of the single-atom linewidth Gamma_0,
  relative to the bare transition frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidLatticeError

# Free-space wavenumber of the atomic transition in lambda = 1 units.
K0 = 2.0 * np.pi


@dataclass(frozen=True)
class LatticeSpec:
    """Bravais lattice with an optional two-site basis.

    ``a1``/``a2`` are the primitive vectors, ``basis`` holds one or two
    ``(offset, detuning)`` pairs.  Offsets are absolute positions inside the
    unit cell; detunings are per-site energy shifts in Gamma_0.
    """

    a1: tuple[float, float]
    a2: tuple[float, float]
    basis: tuple[tuple[tuple[float, float], float], ...] = (((0.0, 0.0), 0.0),)
    name: str = "custom"

    def __post_init__(self):
        if abs(self.area) < 1e-15:
            raise InvalidLatticeError(
                f"degenerate lattice vectors a1={self.a1}, a2={self.a2}")
        if not 1 <= len(self.basis) <= 2:
            raise InvalidLatticeError("basis must hold one or two sites")

    @property
    def area(self) -> float:
        """Unit-cell area |a1 x a2|."""
        (x1, y1), (x2, y2) = self.a1, self.a2
        return abs(x1 * y2 - y1 * x2)

    @property
    def n_sites(self) -> int:
        return len(self.basis)

    @property
    def offsets(self) -> np.ndarray:
        return np.array([b[0] for b in self.basis], dtype=float)

    @property
    def detunings(self) -> np.ndarray:
        return np.array([b[1] for b in self.basis], dtype=float)

    @property
    def basis_vector(self) -> np.ndarray:
        """Offset of site 2 relative to site 1 (zero vector for m = 1)."""
        if self.n_sites == 1:
            return np.zeros(2)
        return self.offsets[1] - self.offsets[0]

    @property
    def family(self) -> str:
        """High-symmetry-point family: 'square' or 'triangular'."""
        if self.name in ("square", "nb-square"):
            return "square"
        if self.name == "triangular":
            return "triangular"
        return "custom"

    def positions(self, n1_range, n2_range) -> np.ndarray:
        """All site positions R + offset for the given integer ranges."""
        a1 = np.asarray(self.a1)
        a2 = np.asarray(self.a2)
        n1, n2 = np.meshgrid(np.asarray(n1_range), np.asarray(n2_range),
                             indexing="ij")
        cells = n1[..., None] * a1 + n2[..., None] * a2
        pts = cells[..., None, :] + self.offsets
        return pts.reshape(-1, 2)


def square_lattice(a: float) -> LatticeSpec:
    return LatticeSpec((a, 0.0), (0.0, a), name="square")


def triangular_lattice(a: float) -> LatticeSpec:
    return LatticeSpec((a, 0.0), (a / 2.0, a * np.sqrt(3.0) / 2.0),
                       name="triangular")


def nb_square_lattice(a: float, delta_omega: float) -> LatticeSpec:
    """Square lattice of spacing ``a`` with checkerboard detunings.

    The primitive cell holds two sites, so the Bravais vectors are the
    diagonals (a, a) and (a, -a) and the cell area is 2 a^2.
    """
    return LatticeSpec((a, a), (a, -a),
                       basis=(((0.0, 0.0), 0.0), ((a, 0.0), delta_omega)),
                       name="nb-square")


@dataclass(frozen=True)
class ReciprocalSet:
    """Reciprocal basis plus all G vectors with |G| <= g_max."""

    g1: tuple[float, float]
    g2: tuple[float, float]
    g_max: float
    shells: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.shells.setflags(write=False)


def reciprocal_basis(lattice: LatticeSpec, g_max: float = 0.0) -> ReciprocalSet:
    """Reciprocal vectors with a_i . g_j = 2 pi delta_ij and |G| <= g_max shells."""
    a1 = np.asarray(lattice.a1)
    a2 = np.asarray(lattice.a2)
    det = a1[0] * a2[1] - a1[1] * a2[0]
    if abs(det) < 1e-15:
        raise InvalidLatticeError("degenerate lattice vectors")
    g1 = 2.0 * np.pi * np.array([a2[1], -a2[0]]) / det
    g2 = 2.0 * np.pi * np.array([-a1[1], a1[0]]) / det
    shells = _shells(tuple(a1), tuple(a2), tuple(g1), tuple(g2), float(g_max))
    return ReciprocalSet(tuple(g1), tuple(g2), float(g_max), shells)


@lru_cache(maxsize=64)
def _shells(a1, a2, g1, g2, g_max):
    if g_max <= 0.0:
        return np.zeros((0, 2))
    # |n_i| = |G . a_i| / 2pi <= g_max |a_i| / 2pi bounds the integer search.
    n1_max = int(np.floor(g_max * np.hypot(*a1) / (2 * np.pi))) + 1
    n2_max = int(np.floor(g_max * np.hypot(*a2) / (2 * np.pi))) + 1
    n1, n2 = np.meshgrid(np.arange(-n1_max, n1_max + 1),
                         np.arange(-n2_max, n2_max + 1), indexing="ij")
    gs = n1[..., None] * np.asarray(g1) + n2[..., None] * np.asarray(g2)
    gs = gs.reshape(-1, 2)
    norms = np.hypot(gs[:, 0], gs[:, 1])
    gs = gs[norms <= g_max + 1e-12]
    norms = np.hypot(gs[:, 0], gs[:, 1])
    # Sort by |G|, ties broken lexicographically by (Gx, Gy).
    order = np.lexsort((gs[:, 1], gs[:, 0], np.round(norms, 12)))
    return gs[order]


def high_symmetry_points(lattice: LatticeSpec) -> dict[str, np.ndarray]:
    """Named k-points for the square and triangular families.

    X/K sit at edge midpoints/corners of the actual Brillouin zone of the
    Bravais lattice, so the nb-square values differ from the simple square.
    """
    rec = reciprocal_basis(lattice)
    g1 = np.asarray(rec.g1)
    g2 = np.asarray(rec.g2)
    pts = {"Gamma": np.zeros(2)}
    if lattice.family == "square":
        if lattice.n_sites == 1:
            pts["X"] = g1 / 2.0
            pts["M"] = (g1 + g2) / 2.0
        else:
            # Rotated-square BZ: corner at (g1+g2)/2, edge midpoint at g1/2.
            pts["X"] = g1 / 2.0
            pts["M"] = (g1 + g2) / 2.0
    elif lattice.family == "triangular":
        pts["M"] = g1 / 2.0
        pts["K"] = (2.0 * g1 + g2) / 3.0
    return pts


def bz_path(lattice: LatticeSpec, waypoints, samples_per_segment: int = 50):
    """Piecewise-linear k-path through named or explicit waypoints.

    Returns ``(k, s)`` where ``k`` has shape (n, 2) and ``s`` is the
    monotone arc length.  Both segment endpoints are included; interior
    waypoints are not duplicated.
    """
    named = high_symmetry_points(lattice)
    coords = []
    for wp in waypoints:
        if isinstance(wp, str):
            if wp not in named:
                raise KeyError(
                    f"unknown waypoint {wp!r} for lattice family "
                    f"{lattice.family!r}")
            coords.append(named[wp])
        else:
            coords.append(np.asarray(wp, dtype=float))
    if len(coords) == 0:
        return np.zeros((0, 2)), np.zeros(0)
    if len(coords) == 1:
        return np.array(coords), np.zeros(1)
    ks = [np.array(coords[0])[None, :]]
    for p0, p1 in zip(coords[:-1], coords[1:]):
        t = np.linspace(0.0, 1.0, samples_per_segment)[1:]
        ks.append(p0 + t[:, None] * (p1 - p0))
    k = np.vstack(ks)
    seg = np.hypot(*np.diff(k, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    return k, s


def bz_grid(lattice: LatticeSpec, n: int) -> np.ndarray:
    """n x n grid k(i, j) = (i/n) g1 + (j/n) g2 covering one reciprocal cell."""
    if n < 2:
        raise ValueError("grid size n must be >= 2")
    rec = reciprocal_basis(lattice)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return (i[..., None] * np.asarray(rec.g1)
            + j[..., None] * np.asarray(rec.g2)) / float(n)


def fold_to_first_bz(lattice: LatticeSpec, k_b) -> np.ndarray:
    """Translate k by reciprocal vectors to the minimum-norm representative."""
    rec = reciprocal_basis(lattice)
    g1 = np.asarray(rec.g1)
    g2 = np.asarray(rec.g2)
    k_b = np.asarray(k_b, dtype=float)
    # Reduce to the central cell first, then test the surrounding 5x5 block.
    inv = np.linalg.inv(np.stack([g1, g2], axis=1))
    frac = inv @ k_b
    k0 = k_b - np.round(frac[0]) * g1 - np.round(frac[1]) * g2
    best = k0
    for n1 in range(-2, 3):
        for n2 in range(-2, 3):
            cand = k0 - n1 * g1 - n2 * g2
            if np.hypot(*cand) < np.hypot(*best) - 1e-12:
                best = cand
    return best


@dataclass(frozen=True)
class LevelScheme:
    """Enabled dipole transitions and the Zeeman shift mu*B (in Gamma_0).

    The Zeeman term only couples x to y, so sigma+ and sigma- must be
    enabled together.
    """

    transitions: frozenset = frozenset({"sigma+", "sigma-", "pi"})
    mu_b: float = 0.0

    def __post_init__(self):
        t = self.transitions
        if ("sigma+" in t) != ("sigma-" in t):
            raise ValueError("sigma+ and sigma- must be enabled together")
        if not t:
            raise ValueError("at least one transition must be enabled")

    @property
    def components(self) -> tuple[int, ...]:
        """Cartesian component indices kept in the Bloch matrix."""
        comps = []
        if "sigma+" in self.transitions:
            comps += [0, 1]
        if "pi" in self.transitions:
            comps += [2]
        return tuple(comps)

    @property
    def n_components(self) -> int:
        return len(self.components)


def sigma_scheme(mu_b: float = 0.0) -> LevelScheme:
    return LevelScheme(frozenset({"sigma+", "sigma-"}), mu_b)


def full_scheme(mu_b: float = 0.0) -> LevelScheme:
    return LevelScheme(frozenset({"sigma+", "sigma-", "pi"}), mu_b)


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional anchors; the solvers only consume ``a_ho``.

    ``wavelength`` in metres and ``gamma0`` in rad/s are bookkeeping for
    output headers.  ``a_ho = 0`` means point-like atoms.
    """

    wavelength: float = 1.0
    gamma0: float = 1.0
    a_ho: float = 0.0

    def __post_init__(self):
        if self.wavelength <= 0 or self.gamma0 <= 0 or self.a_ho < 0:
            raise ValueError("wavelength, gamma0 must be > 0 and a_ho >= 0")

    @property
    def k(self) -> float:
        return 2.0 * np.pi / self.wavelength
