"""Quasi-momentum block matrix and its eigenpairs.

The block matrix acts on coefficient vectors laid out as in
:func:`jchbound.model.coefficient_layout`.  It is real but not symmetric,
because the atom-pair kets it is written in are not orthogonal.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ComplexEigenvalueBeyondTolerance, EigensolverFailure, JCHError
from .model import (
    ModelParams,
    PairSet,
    check_sector,
    coefficient_layout,
    mode_frequencies,
    sector_pairs,
)
from .realspace import coefficient_gram, physical_norms, spurious_direction

__all__ = [
    "SectorMatrix",
    "SectorSolution",
    "SweepError",
    "assemble_sector_matrix",
    "solve_sector",
    "solve_sector_matrix",
    "sector_sweep",
    "TOL_REALITY",
    "TOL_SPURIOUS",
]

TOL_REALITY = 1e-9
TOL_SPURIOUS = 1e-8
ZERO_EIGENVALUE = 1e-8


@dataclass(frozen=True)
class SectorMatrix:
    params: ModelParams
    sector: int
    pair_set: PairSet
    entries: np.ndarray
    layout: tuple

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def block(self, k: int, j: int) -> np.ndarray:
        """Diagonal block belonging to pair ``(k, j)``."""
        rows = [i for i, (a, b, _) in enumerate(self.layout) if (a, b) == (k, j)]
        return self.entries[np.ix_(rows, rows)]


def assemble_sector_matrix(params: ModelParams, p: int) -> SectorMatrix:
    n = params.n_cavities
    p = check_sector(n, p)
    g = params.rabi
    omega = mode_frequencies(params)
    pair_set = sector_pairs(n, p)
    layout = coefficient_layout(pair_set)
    index = {label: i for i, label in enumerate(layout)}
    gamma = np.array([index[(k, j, "gamma")] for k, j in pair_set.pairs])

    h = np.zeros((len(layout), len(layout)))
    for k, j in pair_set.pairs:
        a = index[(k, j, "alpha")]
        b = index[(k, j, "beta")]
        c = index[(k, j, "gamma")]
        if k != j:
            bp = index[(k, j, "beta_prime")]
            h[a, a] = omega[k] + omega[j]
            h[a, b] = h[a, bp] = g
            for row, w in ((b, omega[k]), (bp, omega[j])):
                h[row, a] = g
                h[row, row] = w
                h[row, c] = g
                h[row, gamma] -= 2.0 * g / n
            h[c, b] = h[c, bp] = g
        else:
            h[a, a] = 2.0 * omega[k]
            h[a, b] = g
            h[b, a] = 2.0 * g
            h[b, b] = omega[k]
            h[b, c] = 2.0 * g
            h[b, gamma] -= 2.0 * g / n
            h[c, b] = g
    return SectorMatrix(params, p, pair_set, h, layout)


@dataclass(frozen=True)
class SectorSolution:
    """Eigenpairs of one sector, sorted by energy.

    ``vectors[:, i]`` is the coefficient vector of ``eigenvalues[i]`` with unit
    Euclidean norm.  ``physical_norms[i]`` is the norm of the state it
    represents; exactly one eigenpair per sector is spurious (zero norm).
    """

    params: ModelParams
    sector: int
    eigenvalues: np.ndarray
    vectors: np.ndarray
    physical_norms: np.ndarray
    spurious_flags: np.ndarray
    max_imag: float = 0.0
    layout: tuple = field(default=(), repr=False)

    @property
    def physical_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[~self.spurious_flags]

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def vector(self, i: int) -> np.ndarray:
        return self.vectors[:, i]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate to a real vector whose largest-magnitude entry is positive."""
    i = np.argmax(np.abs(vec))
    vec = vec * np.exp(-1j * np.angle(vec[i]))
    return vec.real if np.iscomplexobj(vec) else vec


def _rayleigh_polish(h, vecs, w, pair_set):
    """Physical Rayleigh quotients ``<psi|H|psi> / <psi|psi>`` in extended precision.

    ``gram @ h`` is symmetric, so the quotient's error is quadratic in the
    eigenvector error; long double keeps its rounding below double ulp.
    """
    ld = np.longdouble
    gram = coefficient_gram(pair_set).astype(ld)
    v = vecs.astype(ld)
    gv = gram @ v
    num = np.einsum("ia,ia->a", gv, h.astype(ld) @ v)
    den = np.einsum("ia,ia->a", gv, v)
    out = np.array(w, dtype=float)
    ok = den > 1e-20
    out[ok] = (num[ok] / den[ok]).astype(float)
    return out


def solve_sector_matrix(
    matrix: SectorMatrix,
    tol_reality: float = TOL_REALITY,
    tol_spurious: float = TOL_SPURIOUS,
) -> SectorSolution:
    """Diagonalize an assembled block matrix.

    The null direction of the atom-pair kets is an exact eigenvector with
    eigenvalue zero and can form a Jordan block with physical zero modes.  It
    is split off first; the general real eigensolver then works on the
    quotient, which is similar to the Hermitian sector Hamiltonian.
    """
    h = matrix.entries
    dim = h.shape[0]
    null = spurious_direction(matrix.pair_set)
    q = scipy.linalg.null_space(null[None, :])  # dim x (dim - 1)
    reduced = q.T @ h @ q
    try:
        w, y = scipy.linalg.eig(reduced)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(f"sector {matrix.sector}: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigensolverFailure(f"sector {matrix.sector}: non-finite eigenvalues")

    radius = float(np.max(np.abs(w))) if w.size else 0.0
    max_imag = float(np.max(np.abs(w.imag))) if w.size else 0.0
    if max_imag > tol_reality * max(1.0, radius):
        raise ComplexEigenvalueBeyondTolerance(
            f"sector {matrix.sector}: |Im lambda| = {max_imag:.3e} exceeds tolerance"
        )
    w = w.real

    # lift back: h (q y + t null) = lam (q y + t null) fixes t for lam != 0.
    # t does not change the physical state; near-zero lam keeps t = 0.
    vecs = np.empty((dim, dim))
    for i in range(len(w)):
        yi = _fix_phase(y[:, i])
        v = q @ yi
        leak = null @ (h @ v)
        if abs(w[i]) > ZERO_EIGENVALUE * max(1.0, radius):
            v = v + (leak / w[i]) * null
        vecs[:, i] = v / np.linalg.norm(v)
    vecs[:, -1] = null
    eigenvalues = np.append(_rayleigh_polish(h, vecs[:, :-1], w, matrix.pair_set), 0.0)

    norms = physical_norms(vecs, matrix.pair_set)
    order = sorted(range(dim), key=lambda i: (eigenvalues[i], tuple(vecs[:, i])))
    eigenvalues = eigenvalues[order]
    vecs = vecs[:, order]
    norms = norms[order]
    return SectorSolution(
        params=matrix.params,
        sector=matrix.sector,
        eigenvalues=eigenvalues,
        vectors=vecs,
        physical_norms=norms,
        spurious_flags=norms < tol_spurious,
        max_imag=max_imag,
        layout=matrix.layout,
    )


def solve_sector(
    params: ModelParams,
    p: int,
    tol_reality: float = TOL_REALITY,
    tol_spurious: float = TOL_SPURIOUS,
) -> SectorSolution:
    return solve_sector_matrix(assemble_sector_matrix(params, p), tol_reality, tol_spurious)


class SweepError(JCHError):
    """Wraps a failure of one sweep item together with its identity."""

    def __init__(self, params: ModelParams, sector: int, cause: Exception):
        super().__init__(f"sector {sector} at {params}: {cause}")
        self.params = params
        self.sector = sector
        self.cause = cause


def default_workers() -> int:
    env = os.environ.get("JCH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def sector_sweep(params_grid, sectors, workers: int | None = None, **solve_kwargs) -> list:
    """Solve every (params, sector) combination.

    Results follow the input order (params outer, sectors inner) regardless
    of how the work was scheduled.
    """
    params_grid = list(params_grid)
    sectors = list(sectors)
    if not params_grid:
        raise ValueError("params_grid must not be empty")
    jobs = [(prm, p) for prm in params_grid for p in sectors]
    if not jobs:
        return []

    def run(job):
        prm, p = job
        try:
            return solve_sector(prm, p, **solve_kwargs)
        except JCHError as exc:
            raise SweepError(prm, p, exc) from exc

    workers = workers or default_workers()
    if workers == 1 or len(jobs) == 1:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))
