"""Bloch interaction matrix assembly and complex band diagonalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LightConeError
from .greens_free import LIGHT_CIRCLE_GUARD, lattice_sum_free
from .lattice import K0, LatticeSpec, LevelScheme, fold_to_first_bz


def momentum_sum(lattice: LatticeSpec, k_b, *, env=None, a_ho: float = 0.0,
                 offset=None, g_max: float | None = None,
                 a_reg: float | None = None, k: float = K0,
                 guard: float = LIGHT_CIRCLE_GUARD) -> np.ndarray:
    """Momentum-space Green's-function lattice sum, 3x3 complex.

    ``offset=None`` gives the same-sublattice sum (with source subtraction);
    a 2-vector ``offset`` gives the inter-sublattice sum with the
    exp(+i offset.(G - k_B)) phase.  A layered environment ``env`` adds the
    surface-scattered Weyl tensor to every G term and the scattered source
    value to the subtraction.
    """
    total = lattice_sum_free(lattice, k_b, k, a_ho=a_ho, offset=offset,
                             g_max=g_max, a_reg=a_reg, guard=guard)
    if env is not None:
        if a_ho != 0.0:
            raise ValueError(
                "fluctuation averaging is only supported in free space; "
                "use a_ho = 0 for surface runs")
        from .greens_layered import scattered_lattice_sum, scattered_source
        total = total + scattered_lattice_sum(lattice, k_b, k, env,
                                              offset=offset, guard=guard)
        if offset is None:
            total = total - scattered_source(k, env)
    return total


@dataclass
class BlochMatrix:
    """3m x 3m (or 2m x 2m for sigma-only schemes) Bloch matrix at k_B.

    Ordering is site-major, then the Cartesian components kept by the level
    scheme.  Energies are in Gamma_0, relative to the bare transition.
    """

    k_b: np.ndarray
    matrix: np.ndarray
    components: tuple[int, ...]
    n_sites: int
    meta: dict = field(default_factory=dict)


def zeeman_block(mu_b: float) -> np.ndarray:
    """Cartesian Zeeman matrix xi: Hermitian, couples x and y only."""
    xi = np.zeros((3, 3), dtype=complex)
    xi[0, 1] = -1j * mu_b
    xi[1, 0] = 1j * mu_b
    return xi


def build_bloch_matrix(lattice: LatticeSpec, scheme: LevelScheme, k_b, *,
                       env=None, a_ho: float = 0.0,
                       g_max: float | None = None, a_reg: float | None = None,
                       k: float = K0,
                       guard: float = LIGHT_CIRCLE_GUARD) -> BlochMatrix:
    """Assemble M(k_B) = (delta_omega - i/2) 1 + xi + chi in Gamma_0 units."""
    k_b = np.asarray(k_b, dtype=float)
    m = lattice.n_sites
    comps = scheme.components
    nc = len(comps)
    dim = m * nc
    mat = np.zeros((dim, dim), dtype=complex)
    # chi carries the physical prefactor 3 pi Gamma_0 c / omega_A = 3 pi / k.
    pref = 3.0 * np.pi / k
    xi = zeeman_block(scheme.mu_b)[np.ix_(comps, comps)]
    kwargs = dict(env=env, a_ho=a_ho, g_max=g_max, a_reg=a_reg, k=k,
                  guard=guard)
    same = momentum_sum(lattice, k_b, offset=None, **kwargs)
    blocks = {}
    for mu in range(m):
        blocks[(mu, mu)] = same
    if m == 2:
        b = lattice.basis_vector
        blocks[(0, 1)] = momentum_sum(lattice, k_b, offset=b, **kwargs)
        blocks[(1, 0)] = momentum_sum(lattice, k_b, offset=-b, **kwargs)
    for mu in range(m):
        for nu in range(m):
            blk = pref * blocks[(mu, nu)][np.ix_(comps, comps)]
            if mu == nu:
                blk = blk + xi + (lattice.detunings[mu] - 0.5j) * np.eye(nc)
            mat[mu * nc:(mu + 1) * nc, nu * nc:(nu + 1) * nc] = blk
    return BlochMatrix(k_b, mat, comps, m,
                       meta={"a_ho": a_ho, "g_max": g_max, "a_reg": a_reg,
                             "env": "layered" if env is not None else "free"})


@dataclass
class BandPoint:
    """One complex eigenmode at one Bloch vector."""

    k_b: np.ndarray
    band: int
    energy: complex          # (E - omega_A)/Gamma_0; Im part is -gamma
    eigenvector: np.ndarray  # unit norm, largest component real-positive
    inside_light_cone: bool | None = None

    @property
    def omega(self) -> float:
        return self.energy.real

    @property
    def gamma(self) -> float:
        return -self.energy.imag


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    i = np.argmax(np.abs(vec))
    ph = vec[i] / abs(vec[i])
    return vec / ph


def solve_bands(bm: BlochMatrix) -> list[BandPoint]:
    """All eigenpairs of the non-Hermitian Bloch matrix, Re E ascending."""
    if not np.all(np.isfinite(bm.matrix)):
        raise np.linalg.LinAlgError("non-finite Bloch matrix entries")
    vals, vecs = np.linalg.eig(bm.matrix)
    order = np.argsort(vals.real)
    pts = []
    for b, idx in enumerate(order):
        v = vecs[:, idx]
        v = _fix_phase(v / np.linalg.norm(v))
        pts.append(BandPoint(bm.k_b, b, vals[idx], v))
    return pts


def light_cone_classify(lattice: LatticeSpec, k_b, *, eps_d: float = 1.0,
                        k: float = K0) -> bool:
    """True if the folded Bloch vector lies inside the light circle.

    Uses the flat-cone approximation omega_kB ~ omega_A (valid because
    Gamma_0 << omega_A at optical frequencies).
    """
    folded = fold_to_first_bz(lattice, k_b)
    return bool(np.hypot(*folded) < np.sqrt(eps_d) * k)


@dataclass
class BandTable:
    """Band-sweep result over a k path or grid, with per-point records."""

    k: np.ndarray            # (npts, 2)
    arc: np.ndarray          # (npts,) arc length (zeros for grids)
    energies: np.ndarray     # (npts, nbands) complex, band-tracked order
    vectors: np.ndarray      # (npts, nbands, dim)
    inside: np.ndarray       # (npts,) light-cone flags
    skipped: list = field(default_factory=list)

    @property
    def n_bands(self) -> int:
        return self.energies.shape[1]

    def direct_gap(self, below: int) -> float:
        """min_k [E_{below+1}(k) - E_{below}(k)] over retained points."""
        re = self.energies.real
        return float(np.min(re[:, below + 1] - re[:, below]))

    def indirect_gap(self, below: int) -> float:
        """min_k E_{below+1} - max_k E_{below} over retained points."""
        re = self.energies.real
        return float(re[:, below + 1].min() - re[:, below].max())


def band_sweep(lattice: LatticeSpec, scheme: LevelScheme, kpts, arc=None, *,
               env=None, a_ho: float = 0.0, g_max: float | None = None,
               a_reg: float | None = None, k: float = K0,
               guard: float = LIGHT_CIRCLE_GUARD,
               track: bool = True) -> BandTable:
    """Solve the Bloch problem on a list of k-points.

    Light-circle-guarded points are skipped and reported in ``skipped``,
    never interpolated.  With ``track=True`` bands are connected along the
    sweep by maximal eigenvector overlap so crossings do not scramble the
    band index; at the first point bands are in Re E ascending order.
    """
    kpts = np.asarray(kpts, dtype=float).reshape(-1, 2)
    if arc is None:
        arc = np.zeros(len(kpts))
    arc = np.asarray(arc, dtype=float)
    eps_d = getattr(env, "eps_d", 1.0) if env is not None else 1.0
    rows = []
    skipped = []
    for i, kb in enumerate(kpts):
        try:
            bm = build_bloch_matrix(lattice, scheme, kb, env=env, a_ho=a_ho,
                                    g_max=g_max, a_reg=a_reg, k=k,
                                    guard=guard)
            pts = solve_bands(bm)
        except LightConeError as exc:
            skipped.append((i, kb.copy(), str(exc)))
            continue
        rows.append((i, kb, arc[i], pts))
    if not rows:
        raise LightConeError("every requested k-point was guarded")
    nb = len(rows[0][3])
    dim = rows[0][3][0].eigenvector.size
    energies = np.zeros((len(rows), nb), dtype=complex)
    vectors = np.zeros((len(rows), nb, dim), dtype=complex)
    kk = np.zeros((len(rows), 2))
    aa = np.zeros(len(rows))
    inside = np.zeros(len(rows), dtype=bool)
    prev = None
    for j, (i, kb, s, pts) in enumerate(rows):
        e = np.array([p.energy for p in pts])
        v = np.array([p.eigenvector for p in pts])
        if track and prev is not None:
            # Greedy assignment by eigenvector overlap with the previous k.
            ov = np.abs(prev @ v.conj().T)
            perm = np.full(nb, -1)
            used = np.zeros(nb, dtype=bool)
            for _ in range(nb):
                a, bnd = np.unravel_index(np.argmax(ov), ov.shape)
                perm[a] = bnd
                ov[a, :] = -1.0
                ov[:, bnd] = -1.0
                used[bnd] = True
            e = e[perm]
            v = v[perm]
        energies[j] = e
        vectors[j] = v
        kk[j] = kb
        aa[j] = s
        inside[j] = light_cone_classify(lattice, kb, eps_d=eps_d, k=k)
        prev = v
    return BandTable(kk, aa, energies, vectors, inside, skipped)
