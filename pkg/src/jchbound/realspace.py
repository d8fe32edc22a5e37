"""Real-space amplitudes and joint probabilities of two-excitation states.

A sector coefficient vector lives in the (non-orthogonal) momentum basis
``b_k^+ b_j^+``, ``b_k^+ s_j^+``, ``s_k^+ s_j^+`` acting on the ground state.
Here it is expanded on the orthonormal cavity-site basis

* photon pairs   ``a_n^+ a_m^+ |0> / sqrt(1 + delta_nm)``  (n <= m)
* photon + atom  ``a_n^+ sigma_m^+ |0>``                   (all n, m)
* atom pairs     ``sigma_n^+ sigma_m^+ |0>``               (n < m)

Photon-pair and atom-pair amplitudes are stored as full symmetric N x N arrays
(the atom-pair diagonal is identically zero); norms and probabilities only
count the canonical triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import UnnormalizedInput, ZeroNormVector
from .model import ModelParams, PairSet, check_sector, coefficient_layout, sector_pairs

__all__ = [
    "RealSpaceState",
    "JointProbabilities",
    "coefficient_gram",
    "physical_norms",
    "realspace_map",
    "spurious_direction",
    "to_real_space",
    "joint_probabilities",
    "localization_metrics",
    "translation_residual",
]

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class RealSpaceState:
    n_cavities: int
    sector: int
    amp_ff: np.ndarray
    amp_fa: np.ndarray
    amp_aa: np.ndarray
    norm: float

    def canonical_weights(self):
        """Squared amplitudes over the canonical index sets, as three arrays."""
        iu = np.triu_indices(self.n_cavities)
        iu1 = np.triu_indices(self.n_cavities, 1)
        return (
            np.abs(self.amp_ff[iu]) ** 2,
            np.abs(self.amp_fa.ravel()) ** 2,
            np.abs(self.amp_aa[iu1]) ** 2,
        )

    def total_probability(self) -> float:
        return float(sum(w.sum() for w in self.canonical_weights()))

    def as_vector(self) -> np.ndarray:
        """Flattened amplitudes ordered photon pairs, photon-atom, atom pairs."""
        iu = np.triu_indices(self.n_cavities)
        iu1 = np.triu_indices(self.n_cavities, 1)
        return np.concatenate([self.amp_ff[iu], self.amp_fa.ravel(), self.amp_aa[iu1]])


def _fourier(n: int) -> np.ndarray:
    idx = np.arange(n)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def realspace_map(pair_set: PairSet) -> np.ndarray:
    """Linear map from sector coefficients to orthonormal site amplitudes.

    Rows are ordered as :meth:`RealSpaceState.as_vector`: photon pairs
    (n <= m, row-major upper triangle), photon-atom (n, m) row-major, atom
    pairs (n < m).
    """
    n = pair_set.n_cavities
    layout = coefficient_layout(pair_set)
    E = _fourier(n)
    iu = np.triu_indices(n)
    iu1 = np.triu_indices(n, 1)
    n_ff, n_fa = len(iu[0]), n * n
    out = np.zeros((n_ff + n_fa + len(iu1[0]), len(layout)), dtype=complex)
    for col, (k, j, comp) in enumerate(layout):
        raw = np.outer(E[k], E[j])
        if comp == "alpha":
            amp = raw + raw.T
            amp[np.diag_indices(n)] = SQRT2 * np.diag(raw)
            out[:n_ff, col] = amp[iu]
        elif comp == "beta":
            out[n_ff:n_ff + n_fa, col] = raw.ravel()
        elif comp == "beta_prime":
            out[n_ff:n_ff + n_fa, col] = raw.T.ravel()
        else:
            amp = raw + raw.T
            out[n_ff + n_fa:, col] = amp[iu1]
    return out


def _unpack(vec: np.ndarray, n: int):
    iu = np.triu_indices(n)
    iu1 = np.triu_indices(n, 1)
    n_ff = len(iu[0])
    ff = np.zeros((n, n), dtype=complex)
    ff[iu] = vec[:n_ff]
    ff = ff + np.triu(ff, 1).T
    fa = vec[n_ff:n_ff + n * n].reshape(n, n)
    aa = np.zeros((n, n), dtype=complex)
    aa[iu1] = vec[n_ff + n * n:]
    aa = aa + aa.T
    return ff, fa, aa


def to_real_space(coeffs, params: ModelParams, p: int, normalize: bool = True) -> RealSpaceState:
    """Expand a sector coefficient vector on the orthonormal site basis.

    The returned ``norm`` is the physical norm before normalization; a vector
    with vanishing norm (the linearly dependent atom-pair direction) raises
    :class:`ZeroNormVector` when ``normalize`` is set.
    """
    n = params.n_cavities
    p = check_sector(n, p)
    pair_set = sector_pairs(n, p)
    coeffs = np.asarray(coeffs)
    rmap = realspace_map(pair_set)
    if coeffs.shape != (rmap.shape[1],):
        raise ValueError(f"coefficient vector has shape {coeffs.shape}, expected ({rmap.shape[1]},)")
    vec = rmap @ coeffs
    norm = float(np.linalg.norm(vec))
    if normalize:
        if norm < 1e-12:
            raise ZeroNormVector(f"coefficient vector has physical norm {norm:.3e}")
        vec = vec / norm
    ff, fa, aa = _unpack(vec, n)
    return RealSpaceState(n, p, ff, fa, aa, norm)


def coefficient_gram(pair_set: PairSet) -> np.ndarray:
    """Overlap matrix of the momentum kets in the coefficient layout.

    Photon-pair kets have squared norm ``1 + delta_kj``, photon-atom kets are
    orthonormal, and atom-pair kets overlap as
    ``delta + delta_kj - 2/N`` within one sector.
    """
    layout = coefficient_layout(pair_set)
    n = pair_set.n_cavities
    gram = np.zeros((len(layout), len(layout)))
    gamma_rows = [i for i, (_, _, c) in enumerate(layout) if c == "gamma"]
    for i, (k, j, comp) in enumerate(layout):
        if comp == "alpha":
            gram[i, i] = 2.0 if k == j else 1.0
        elif comp in ("beta", "beta_prime"):
            gram[i, i] = 1.0
        else:
            gram[i, i] = 2.0 if k == j else 1.0
    gram[np.ix_(gamma_rows, gamma_rows)] -= 2.0 / n
    return gram


def physical_norms(vectors: np.ndarray, pair_set: PairSet) -> np.ndarray:
    """Physical norm of each column of ``vectors`` (coefficient layout).

    Computed from the explicit site amplitudes, not from the overlap matrix:
    a quadratic form cannot resolve norms below ~1e-8.
    """
    return np.linalg.norm(realspace_map(pair_set) @ np.asarray(vectors), axis=0)


def spurious_direction(pair_set: PairSet) -> np.ndarray:
    """Unit coefficient vector that maps to the zero state.

    Only atom-pair coefficients are non-zero, proportional to
    ``1 / (1 + delta_kj)``.
    """
    layout = coefficient_layout(pair_set)
    v = np.zeros(len(layout))
    for i, (k, j, comp) in enumerate(layout):
        if comp == "gamma":
            v[i] = 0.5 if k == j else 1.0
    return v / np.linalg.norm(v)


def translation_residual(state: RealSpaceState) -> float:
    """Max deviation from ``amp(n+1, m+1) = exp(2 pi i P / N) amp(n, m)``."""
    phase = np.exp(2j * np.pi * state.sector / state.n_cavities)
    res = 0.0
    for amp in (state.amp_ff, state.amp_fa, state.amp_aa):
        shifted = np.roll(np.roll(amp, 1, axis=0), 1, axis=1)
        res = max(res, float(np.max(np.abs(shifted - amp / phase))) if amp.size else 0.0)
    return res


@dataclass(frozen=True)
class JointProbabilities:
    """Joint probabilities aggregated by separation ``d = (n - m) mod N``.

    Photon-pair and atom-pair weights of an unordered pair are split evenly
    between ``d`` and ``N - d`` so the arrays are symmetric and still sum to
    the total probability.  The photon-atom array uses photon site ``n`` and
    atom site ``m``.
    """

    p_ff: np.ndarray
    p_fa: np.ndarray
    p_aa: np.ndarray

    @property
    def n_cavities(self) -> int:
        return len(self.p_ff)

    @property
    def total(self) -> np.ndarray:
        return self.p_ff + self.p_fa + self.p_aa

    @cached_property
    def _metrics(self):
        return localization_metrics(self)

    @property
    def nn_mass(self) -> float:
        return self._metrics[0]

    @property
    def width(self) -> float:
        return self._metrics[1]

    def symmetric(self, d_max: int | None = None):
        """Separations ``-d_max..d_max`` and the three arrays re-indexed on them."""
        n = self.n_cavities
        if d_max is None:
            d_max = n // 2
        seps = np.arange(-d_max, d_max + 1)
        idx = seps % n
        return seps, self.p_ff[idx], self.p_fa[idx], self.p_aa[idx]


def _by_separation(weights: np.ndarray) -> np.ndarray:
    n = weights.shape[0]
    d = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return np.bincount(d.ravel(), weights=weights.ravel(), minlength=n)


def joint_probabilities(state: RealSpaceState, atol: float = 1e-10) -> JointProbabilities:
    total = state.total_probability()
    if abs(total - 1.0) > atol:
        raise UnnormalizedInput(f"state has total probability {total!r}")
    n = state.n_cavities
    upper = np.triu(np.ones((n, n), dtype=bool))
    strict = np.triu(np.ones((n, n), dtype=bool), 1)

    ff = np.where(upper, np.abs(state.amp_ff) ** 2, 0.0)
    # split off-diagonal unordered pairs between d and -d
    ff_sym = 0.5 * (ff + ff.T)
    ff_sym[np.diag_indices(n)] = np.diag(ff)
    aa = np.where(strict, np.abs(state.amp_aa) ** 2, 0.0)
    aa_sym = 0.5 * (aa + aa.T)

    return JointProbabilities(
        p_ff=_by_separation(ff_sym),
        p_fa=_by_separation(np.abs(state.amp_fa) ** 2),
        p_aa=_by_separation(aa_sym),
    )


def localization_metrics(probs: JointProbabilities):
    """Same-site plus nearest-neighbour mass and circular rms separation."""
    total = np.asarray(probs.total, dtype=float)
    n = len(total)
    d = np.arange(n)
    circ = np.minimum(d, n - d)
    nn_mass = float(total[circ <= 1].sum())
    width = float(np.sqrt(np.sum(total * circ.astype(float) ** 2)))
    return nn_mass, width
