"""Exact diagonalization of the two-excitation chain in the site basis.

This is the ground truth for the momentum-space machinery: the Hamiltonian is
written directly from photon/atom occupation numbers, with no Fourier
transform involved, and translation sectors are obtained from orbits of
site configurations under the cyclic shift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DimensionGuardExceeded, ProjectorRankMismatch
from .model import ModelParams

__all__ = [
    "MAX_ORACLE_SITES",
    "TwoExcitationBasis",
    "SectorSpectrum",
    "two_excitation_basis",
    "build_full_hamiltonian",
    "translation_operator",
    "momentum_isometry",
    "sector_eigh",
    "sector_project_spectrum",
    "FockSpace",
    "verify_operator_identities",
]

MAX_ORACLE_SITES = 16


# --- two-excitation basis -------------------------------------------------

@dataclass(frozen=True)
class TwoExcitationBasis:
    """Canonically ordered labels: photon pairs, photon+atom, atom pairs.

    ``configs[i]`` is the (photon occupations, atom occupations) tuple of
    basis state ``i``.
    """

    n_cavities: int
    ff_states: tuple
    fa_states: tuple
    aa_states: tuple
    configs: tuple

    @property
    def total_dim(self) -> int:
        return len(self.configs)

    def index(self) -> dict:
        return {c: i for i, c in enumerate(self.configs)}


def _guard(n: int):
    if n > MAX_ORACLE_SITES:
        raise DimensionGuardExceeded(
            f"oracle limited to N <= {MAX_ORACLE_SITES} (dimension {2 * n * n}); got N = {n}"
        )


def two_excitation_basis(n: int) -> TwoExcitationBasis:
    _guard(n)
    ff = [(a, b) for a in range(n) for b in range(a, n)]
    fa = [(a, b) for a in range(n) for b in range(n)]
    aa = [(a, b) for a in range(n) for b in range(a + 1, n)]
    empty = (0,) * n
    configs = []
    for a, b in ff:
        ph = [0] * n
        ph[a] += 1
        ph[b] += 1
        configs.append((tuple(ph), empty))
    for a, b in fa:
        ph, at = [0] * n, [0] * n
        ph[a] = 1
        at[b] = 1
        configs.append((tuple(ph), tuple(at)))
    for a, b in aa:
        at = [0] * n
        at[a] = at[b] = 1
        configs.append((empty, tuple(at)))
    return TwoExcitationBasis(n, tuple(ff), tuple(fa), tuple(aa), tuple(configs))


def build_full_hamiltonian(params: ModelParams) -> np.ndarray:
    """Dense two-excitation Hamiltonian in the orthonormal site basis.

    Bosonic factors come from ``a |n> = sqrt(n) |n-1>``; they produce the
    sqrt(2) on every matrix element touching a doubly occupied cavity.
    """
    n = params.n_cavities
    basis = two_excitation_basis(n)
    index = basis.index()
    dim = basis.total_dim
    h = np.zeros((dim, dim))
    delta, hop, g = params.detuning, params.tunneling, params.rabi

    for col, (ph, at) in enumerate(basis.configs):
        h[col, col] += delta * sum(ph)
        for site in range(n):
            nxt = (site + 1) % n
            for src, dst in ((site, nxt), (nxt, site)):
                if ph[src] and hop:
                    amp = np.sqrt(ph[src])
                    new = list(ph)
                    new[src] -= 1
                    amp *= np.sqrt(new[dst] + 1)
                    new[dst] += 1
                    h[index[(tuple(new), at)], col] += hop * amp
            if g and ph[site] and not at[site]:
                new_ph, new_at = list(ph), list(at)
                amp = np.sqrt(new_ph[site])
                new_ph[site] -= 1
                new_at[site] = 1
                h[index[(tuple(new_ph), tuple(new_at))], col] += g * amp
            if g and at[site]:
                new_ph, new_at = list(ph), list(at)
                new_at[site] = 0
                amp = np.sqrt(new_ph[site] + 1)
                new_ph[site] += 1
                h[index[(tuple(new_ph), tuple(new_at))], col] += g * amp
    return h


# --- translation sectors --------------------------------------------------

def _shift(config):
    ph, at = config
    return ph[-1:] + ph[:-1], at[-1:] + at[:-1]


def translation_operator(basis: TwoExcitationBasis) -> np.ndarray:
    """Permutation matrix of the shift ``site -> site + 1``."""
    index = basis.index()
    t = np.zeros((basis.total_dim, basis.total_dim))
    for col, cfg in enumerate(basis.configs):
        t[index[_shift(cfg)], col] = 1.0
    return t


def _orbits(basis: TwoExcitationBasis):
    seen = set()
    orbits = []
    for cfg in basis.configs:
        if cfg in seen:
            continue
        orbit = [cfg]
        nxt = _shift(cfg)
        while nxt != cfg:
            orbit.append(nxt)
            nxt = _shift(nxt)
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def momentum_isometry(basis: TwoExcitationBasis, p: int) -> np.ndarray:
    """Columns spanning the sector where the shift has eigenvalue exp(-2 pi i P / N).

    One column per translation orbit compatible with ``P``:
    ``sum_t exp(2 pi i P t / N) T^t |c> / sqrt(L)``.
    """
    n = basis.n_cavities
    index = basis.index()
    cols = []
    for orbit in _orbits(basis):
        length = len(orbit)
        if (p * length) % n:
            continue
        v = np.zeros(basis.total_dim, dtype=complex)
        for t, cfg in enumerate(orbit):
            v[index[cfg]] = np.exp(2j * np.pi * p * t / n) / np.sqrt(length)
        cols.append(v)
    return np.array(cols).T.reshape(basis.total_dim, len(cols))


def sector_eigh(params: ModelParams, p: int, hamiltonian: np.ndarray | None = None):
    """Eigenvalues and site-basis eigenvectors of one translation sector."""
    basis = two_excitation_basis(params.n_cavities)
    h = build_full_hamiltonian(params) if hamiltonian is None else hamiltonian
    u = momentum_isometry(basis, p)
    w, y = scipy.linalg.eigh(u.conj().T @ h @ u)
    return w, u @ y


@dataclass(frozen=True)
class SectorSpectrum:
    n_cavities: int
    by_sector: dict
    full: np.ndarray

    def all_eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([self.by_sector[p] for p in sorted(self.by_sector)]))


def sector_project_spectrum(params: ModelParams) -> SectorSpectrum:
    n = params.n_cavities
    basis = two_excitation_basis(n)
    h = build_full_hamiltonian(params)
    shift = translation_operator(basis)
    by_sector = {}
    dims = 0
    for p in range(n):
        u = momentum_isometry(basis, p)
        phase = np.exp(-2j * np.pi * p / n)
        if u.shape[1] and not np.allclose(shift @ u, phase * u, atol=1e-12):
            raise ProjectorRankMismatch(f"sector {p}: columns are not shift eigenvectors")
        dims += u.shape[1]
        by_sector[p] = scipy.linalg.eigvalsh(u.conj().T @ h @ u) if u.shape[1] else np.empty(0)
    if dims != 2 * n * n:
        raise ProjectorRankMismatch(f"sector dimensions sum to {dims}, expected {2 * n * n}")
    return SectorSpectrum(n, by_sector, scipy.linalg.eigvalsh(h))


# --- operator identities --------------------------------------------------

class FockSpace:
    """All configurations with at most ``max_exc`` excitations on ``n`` sites.

    Photon occupations are bounded by ``max_exc``; atoms are two-level.
    Operators are returned as sparse CSR matrices.
    """

    def __init__(self, n: int, max_exc: int = 3):
        self.n = n
        self.max_exc = max_exc
        configs = []
        for atoms in itertools.product((0, 1), repeat=n):
            na = sum(atoms)
            if na > max_exc:
                continue
            for photons in itertools.product(range(max_exc - na + 1), repeat=n):
                if sum(photons) + na <= max_exc:
                    configs.append((photons, atoms))
        configs.sort(key=lambda c: (sum(c[0]) + sum(c[1]), c))
        self.configs = configs
        self.index = {c: i for i, c in enumerate(configs)}
        self.excitations = np.array([sum(p) + sum(a) for p, a in configs])

    @property
    def dim(self) -> int:
        return len(self.configs)

    def _op(self, action):
        rows, cols, vals = [], [], []
        for col, cfg in enumerate(self.configs):
            out = action(cfg)
            if out is None:
                continue
            new, amp = out
            row = self.index.get(new)
            if row is not None:
                rows.append(row)
                cols.append(col)
                vals.append(amp)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim), dtype=complex)

    def photon_lower(self, site: int):
        def act(cfg):
            ph, at = cfg
            if not ph[site]:
                return None
            new = list(ph)
            new[site] -= 1
            return (tuple(new), at), np.sqrt(ph[site])
        return self._op(act)

    def atom_lower(self, site: int):
        def act(cfg):
            ph, at = cfg
            if not at[site]:
                return None
            new = list(at)
            new[site] = 0
            return (ph, tuple(new)), 1.0
        return self._op(act)

    def atom_z(self, site: int):
        diag = np.array([1.0 if at[site] else -1.0 for _, at in self.configs])
        return sp.diags(diag.astype(complex), format="csr")

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[((0,) * self.n, (0,) * self.n)]] = 1.0
        return v

    def mode_operators(self):
        """Fourier-transformed lowering operators ``b_k`` and ``s_k``."""
        n = self.n
        a = [self.photon_lower(s) for s in range(n)]
        sm = [self.atom_lower(s) for s in range(n)]
        b, s = [], []
        for k in range(n):
            ph = [np.exp(-2j * np.pi * k * site / n) / np.sqrt(n) for site in range(n)]
            b.append(sum(c * op for c, op in zip(ph, a)))
            s.append(sum(c * op for c, op in zip(ph, sm)))
        return b, s


def verify_operator_identities(n: int) -> dict:
    """Check the mode commutators and two-excitation operator actions.

    Returns the max elementwise residual of each identity.  Commutators are
    tested on states with at most one excitation, where the truncated
    representation is exact.
    """
    if n > 8:
        raise DimensionGuardExceeded(f"operator identity check limited to N <= 8, got {n}")
    space = FockSpace(n, max_exc=3)
    b, s = space.mode_operators()
    bd = [op.conj().T.tocsr() for op in b]
    sd = [op.conj().T.tocsr() for op in s]
    low = np.flatnonzero(space.excitations <= 1)
    sz = [space.atom_z(site) for site in range(n)]
    vac = space.vacuum()

    res = {"bb_commutator": 0.0, "ss_commutator": 0.0, "bs_on_ff": 0.0, "bs_on_fa": 0.0, "bs_on_aa": 0.0}
    eye = np.eye(space.dim)[:, low]
    for k in range(n):
        for j in range(n):
            comm = (b[k] @ bd[j] - bd[j] @ b[k]).toarray()[:, low]
            res["bb_commutator"] = max(res["bb_commutator"], np.abs(comm - (k == j) * eye).max())
            comm = (s[k] @ sd[j] - sd[j] @ s[k]).toarray()[:, low]
            rhs = sum(np.exp(2j * np.pi * site * (j - k) / n) * sz[site] for site in range(n))
            rhs = -(rhs.toarray()[:, low]) / n
            res["ss_commutator"] = max(res["ss_commutator"], np.abs(comm - rhs).max())

    ket_f = [op @ vac for op in bd]
    ket_a = [op @ vac for op in sd]

    def kff(k, j):
        return bd[k] @ ket_f[j]

    def kfa(k, j):
        return bd[k] @ ket_a[j]

    def kaa(k, j):
        return sd[k] @ ket_a[j]

    for l in range(n):
        exch = (b[l] @ sd[l] + bd[l] @ s[l]).tocsr()
        down = (bd[l] @ s[l]).tocsr()
        up = (b[l] @ sd[l]).tocsr()
        for k in range(n):
            for j in range(n):
                lhs = up @ kff(k, j)
                rhs = (l == j) * kfa(k, j) + (l == k) * kfa(j, k)
                res["bs_on_ff"] = max(res["bs_on_ff"], np.abs(lhs - rhs).max())
                lhs = exch @ kfa(k, j)
                rhs = (l == j) * kff(k, j) + (l == k) * kaa(k, j)
                res["bs_on_fa"] = max(res["bs_on_fa"], np.abs(lhs - rhs).max())
                lhs = down @ kaa(k, j)
                rhs = (k == l) * kfa(k, j) + (j == l) * kfa(j, k) - (2.0 / n) * kfa(l, (k + j - l) % n)
                res["bs_on_aa"] = max(res["bs_on_aa"], np.abs(lhs - rhs).max())
    return {key: float(val) for key, val in res.items()}
