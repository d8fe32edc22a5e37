"""Secular function, continuum bands, bound-state roots and critical coupling.

For a sector P the non-zero eigenvalues are the zeros of

    G(lam) = 1 - (2 g^2 / N) sum_{(k,j)} C_kj(lam) / ((1 + delta_kj) D_kj(lam))

with C_kj = (2 lam - W)(lam - W), W = Omega_k + Omega_j, and the quartic
D_kj = g^2 (2 lam - W)^2 - lam (lam - Omega_k)(lam - Omega_j)(lam - W).

D_kj is minus the characteristic polynomial of the real symmetric 4x4 matrix
returned by :func:`pair_matrix`, so its roots are real and are computed with a
symmetric eigensolver.  In the N -> infinity limit the roots of D_kj, swept
over all pairs of the sector, fill the scattering bands; bound states live in
the gaps between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    BisectionBracketFailure,
    NumericalRootFailure,
    PoleEvaluation,
    ResolutionTooCoarse,
    ZeroRabi,
)
from .model import ModelParams, check_sector, mode_frequencies, normal_mode_frequency, sector_pairs

__all__ = [
    "SecularTerms",
    "SecularFunction",
    "BandStructure",
    "BoundStateRecord",
    "CriticalCoupling",
    "pair_matrix",
    "quartic_coefficients",
    "eval_secular_terms",
    "eval_G",
    "unperturbed_pair_roots",
    "band_intervals",
    "continuum_branches",
    "find_bound_eigenvalues",
    "classify_eigenvalues",
    "strong_coupling_estimate",
    "critical_coupling",
    "critical_coupling_branches",
    "DEFAULT_RESOLUTION",
    "G_HI",
]

DEFAULT_RESOLUTION = 2048
G_HI = 10.0
EDGE_XTOL = 1e-12


@dataclass(frozen=True)
class SecularTerms:
    c_value: float
    d_value: float


def secular_terms(lam, omega_k, omega_j, g):
    """Vectorised ``(C, D)`` for frequencies and energies that broadcast."""
    w = omega_k + omega_j
    c = (2.0 * lam - w) * (lam - w)
    d = g * g * (2.0 * lam - w) ** 2 - lam * (lam - omega_k) * (lam - omega_j) * (lam - w)
    return c, d


def quartic_coefficients(omega_k: float, omega_j: float, g: float) -> np.ndarray:
    """Coefficients of D_kj in descending powers of lambda."""
    a, b = omega_k, omega_j
    w = a + b
    g2 = g * g
    return np.array([
        -1.0,
        2.0 * w,
        4.0 * g2 - a * b - w * w,
        a * b * w - 4.0 * g2 * w,
        g2 * w * w,
    ])


def pair_matrix(omega_k, omega_j, g) -> np.ndarray:
    """Symmetric 4x4 matrix (stacked over broadcast inputs) whose spectrum is the roots of D_kj."""
    omega_k, omega_j = np.broadcast_arrays(np.asarray(omega_k, float), np.asarray(omega_j, float))
    m = np.zeros(omega_k.shape + (4, 4))
    m[..., 0, 0] = omega_k + omega_j
    m[..., 1, 1] = omega_k
    m[..., 2, 2] = omega_j
    m[..., 0, 1] = m[..., 1, 0] = g
    m[..., 0, 2] = m[..., 2, 0] = g
    m[..., 1, 3] = m[..., 3, 1] = g
    m[..., 2, 3] = m[..., 3, 2] = g
    return m


def pair_roots(omega_k, omega_j, g) -> np.ndarray:
    """Sorted roots of D_kj, shape ``broadcast + (4,)``."""
    return np.linalg.eigvalsh(pair_matrix(omega_k, omega_j, g))


def eval_secular_terms(params: ModelParams, k: int, j: int, lam: float) -> SecularTerms:
    wk = normal_mode_frequency(params, k)
    wj = normal_mode_frequency(params, j)
    c, d = secular_terms(float(lam), wk, wj, params.rabi)
    return SecularTerms(float(c), float(d))


def unperturbed_pair_roots(params: ModelParams, k: int, j: int) -> np.ndarray:
    """The four real roots of D_kj, ascending, polished by one Newton step."""
    wk = normal_mode_frequency(params, k)
    wj = normal_mode_frequency(params, j)
    coeffs = quartic_coefficients(wk, wj, params.rabi)
    roots = pair_roots(wk, wj, params.rabi)
    deriv = np.polyder(coeffs)
    polished = roots.copy()
    for i, r in enumerate(roots):
        slope = np.polyval(deriv, r)
        # double roots have zero slope; Newton would only add noise there
        if abs(slope) > 1e-6 * np.sum(np.abs(coeffs)) * max(1.0, abs(r)) ** 3:
            step = np.polyval(coeffs, r) / slope
            if abs(step) < 1e-6 * max(1.0, abs(r)):
                polished[i] = r - step
    scale = np.array([np.sum(np.abs(coeffs) * max(1.0, abs(r)) ** np.arange(4, -1, -1)) for r in polished])
    resid = np.abs(np.polyval(coeffs, polished))
    if np.any(resid > 1e-8 * scale):
        raise NumericalRootFailure(f"pair ({k}, {j}): residual {resid.max():.3e}")
    return np.sort(polished)


class SecularFunction:
    """G(lambda) for one finite-N sector, with its pole set precomputed."""

    def __init__(self, params: ModelParams, p: int, tol_pole: float = 1e-12):
        n = params.n_cavities
        self.params = params
        self.sector = check_sector(n, p)
        pairs = sector_pairs(n, p).pairs
        omega = mode_frequencies(params)
        self.omega_k = np.array([omega[k] for k, _ in pairs])
        self.omega_j = np.array([omega[j] for _, j in pairs])
        self.weights = np.array([0.5 if k == j else 1.0 for k, j in pairs])
        self.prefactor = 2.0 * params.rabi ** 2 / n
        self.poles = np.unique(pair_roots(self.omega_k, self.omega_j, params.rabi).ravel())
        self.tol_pole = tol_pole

    def pole_distance(self, lam) -> np.ndarray:
        lam = np.asarray(lam, float)
        return np.min(np.abs(lam[..., None] - self.poles), axis=-1)

    def __call__(self, lam, check: bool = True):
        lam = np.asarray(lam, float)
        if self.params.rabi == 0:
            return np.ones_like(lam) if lam.ndim else 1.0
        if check:
            near = self.pole_distance(lam) <= self.tol_pole * np.maximum(1.0, np.abs(lam))
            if np.any(near):
                raise PoleEvaluation(f"lambda within {self.tol_pole:g} of a pole of G")
        c, d = secular_terms(lam[..., None], self.omega_k, self.omega_j, self.params.rabi)
        total = np.sum(self.weights * c / d, axis=-1)
        out = 1.0 - self.prefactor * total
        return float(out) if out.ndim == 0 else out


def eval_G(params: ModelParams, p: int, lam, tol_pole: float = 1e-12):
    return SecularFunction(params, p, tol_pole)(lam)


# --- continuum bands ------------------------------------------------------

def _angle(params: ModelParams, p, angle):
    if angle is not None:
        return float(angle) % (2.0 * math.pi), None
    p = check_sector(params.n_cavities, p)
    return 2.0 * math.pi * p / params.n_cavities, p


def _branch_roots(theta, angle, params: ModelParams):
    wk = params.detuning + 2.0 * params.tunneling * np.cos(theta)
    wj = params.detuning + 2.0 * params.tunneling * np.cos(angle - theta)
    return pair_roots(wk, wj, params.rabi)


def _refine_edge(branch: int, theta0: float, step: float, angle: float, params: ModelParams, sign: float):
    """Locally minimise ``sign * root_branch(theta)`` around a sampled extremum."""

    def f(t):
        return sign * _branch_roots(np.array(t), angle, params)[branch]

    res = optimize.minimize_scalar(
        f, bounds=(theta0 - step, theta0 + step), method="bounded",
        options={"xatol": EDGE_XTOL, "maxiter": 200},
    )
    best_t, best_v = (res.x, res.fun) if res.fun <= f(theta0) else (theta0, f(theta0))
    return float(best_t), float(sign * best_v)


def continuum_branches(params: ModelParams, angle: float, resolution: int = DEFAULT_RESOLUTION,
                       branches=(0, 1, 2, 3), check_continuity: bool = True):
    """Refined ``(min, max)`` of each sorted root branch over theta.

    Returns a dict ``branch -> ((lo, theta_lo), (hi, theta_hi))``.
    """
    if resolution < 64:
        raise ResolutionTooCoarse(f"resolution must be >= 64, got {resolution}")
    step = 2.0 * math.pi / resolution
    theta = np.arange(resolution) * step
    roots = _branch_roots(theta, angle, params)
    if check_continuity:
        hull = roots.max() - roots.min()
        eps_merge = 4.0 * max(hull, 1e-300) / resolution
        jumps = np.abs(np.diff(np.vstack([roots, roots[:1]]), axis=0)).max()
        if jumps > eps_merge:
            step /= 4
            theta = np.arange(resolution * 4) * step
            roots = _branch_roots(theta, angle, params)
            jumps = np.abs(np.diff(np.vstack([roots, roots[:1]]), axis=0)).max()
            if jumps > eps_merge:
                raise ResolutionTooCoarse(
                    f"adjacent-sample root jump {jumps:.3e} exceeds {eps_merge:.3e}"
                )
    out = {}
    for b in branches:
        col = roots[:, b]
        i_lo, i_hi = int(np.argmin(col)), int(np.argmax(col))
        t_lo, lo = _refine_edge(b, theta[i_lo], step, angle, params, 1.0)
        t_hi, hi = _refine_edge(b, theta[i_hi], step, angle, params, -1.0)
        out[b] = ((min(lo, col[i_lo]), t_lo), (max(hi, col[i_hi]), t_hi))
    return out


@dataclass(frozen=True)
class BandStructure:
    """Scattering bands of one sector (or continuum angle) as N -> infinity.

    ``branch_ranges[i]`` is the energy range swept by the i-th smallest root
    of D as the pair angle runs over the circle; ``edge_angles[i]`` the angles
    where those extremes are attained.  ``intervals`` merges overlapping
    branch ranges; ``gaps`` are the open intervals between them.
    """

    angle: float
    sector: int | None
    intervals: tuple
    gaps: tuple
    resolution: int
    branch_ranges: tuple
    edge_angles: tuple
    params: ModelParams = field(repr=False, default=None)

    @property
    def hull(self):
        return self.intervals[0][0], self.intervals[-1][1]

    def gap_of(self, lam: float):
        """The gap strictly containing ``lam``, or None."""
        for lo, hi in self.gaps:
            if lo < lam < hi:
                return lo, hi
        return None

    def edge_residuals(self) -> np.ndarray:
        """|D| at every branch edge, evaluated at the pair defining it."""
        prm = self.params
        out = []
        for (lo, hi), (t_lo, t_hi) in zip(self.branch_ranges, self.edge_angles):
            for lam, t in ((lo, t_lo), (hi, t_hi)):
                wk = prm.detuning + 2.0 * prm.tunneling * math.cos(t)
                wj = prm.detuning + 2.0 * prm.tunneling * math.cos(self.angle - t)
                out.append(abs(np.polyval(quartic_coefficients(wk, wj, prm.rabi), lam)))
        return np.array(out)

    def gap_widths(self):
        """Width of the gap above branch 0 and of the gap below branch 3.

        These are the gaps hosting the lower and upper bound-state branches;
        a non-positive width means the gap is closed.
        """
        (_, hi0), (lo1, _), (_, hi2), (lo3, _) = self.branch_ranges
        return lo1 - hi0, lo3 - hi2


def band_intervals(params: ModelParams, p: int | None = None, resolution: int = DEFAULT_RESOLUTION,
                   angle: float | None = None) -> BandStructure:
    """Continuum bands at the quasi-momentum angle of sector ``p`` (or ``angle``)."""
    angle, sector = _angle(params, p, angle)
    branches = continuum_branches(params, angle, resolution)
    ranges = tuple((branches[b][0][0], branches[b][1][0]) for b in range(4))
    angles = tuple((branches[b][0][1], branches[b][1][1]) for b in range(4))
    merged = []
    for lo, hi in sorted(ranges):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    intervals = tuple((lo, hi) for lo, hi in merged)
    gaps = tuple((intervals[i][1], intervals[i + 1][0]) for i in range(len(intervals) - 1))
    return BandStructure(angle, sector, intervals, gaps, resolution, ranges, angles, params)


# --- bound states ---------------------------------------------------------

@dataclass(frozen=True)
class BoundStateRecord:
    sector: int
    lambda_b: float
    gap: tuple
    margin: float
    branch: str


def _branch_tag(lam: float, bands: BandStructure) -> str:
    lo, hi = bands.hull
    return "upper" if lam > 0.5 * (lo + hi) else "lower"


def find_bound_eigenvalues(params: ModelParams, p: int, bands: BandStructure | None = None,
                           samples: int = 256, rtol: float = 1e-12) -> list:
    """Roots of G inside the band gaps of sector ``p``.

    Each gap is cut at the finite-N poles it contains and G is scanned for
    sign changes on every pole-free cell; roots are refined with Brent's
    method.  Zero is never reported.
    """
    p = check_sector(params.n_cavities, p)
    if bands is None:
        bands = band_intervals(params, p)
    if params.rabi == 0:
        return []
    sf = SecularFunction(params, p)
    records = []
    for gap_lo, gap_hi in bands.gaps:
        inner = sf.poles[(sf.poles > gap_lo) & (sf.poles < gap_hi)]
        cuts = np.concatenate([[gap_lo], inner, [gap_hi]])
        for a, b in zip(cuts[:-1], cuts[1:]):
            pad = 1e-9 * max(1.0, abs(a), abs(b), b - a)
            if b - a <= 2 * pad:
                continue
            grid = np.linspace(a + pad, b - pad, samples)
            grid = grid[sf.pole_distance(grid) > sf.tol_pole * np.maximum(1.0, np.abs(grid))]
            vals = sf(grid, check=False)
            for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
                root = optimize.brentq(lambda x: sf(x, check=False), grid[i], grid[i + 1],
                                       xtol=1e-14, rtol=rtol, maxiter=200)
                if abs(root) < 1e-10:
                    continue
                margin = min(root - gap_lo, gap_hi - root)
                records.append(BoundStateRecord(p, float(root), (gap_lo, gap_hi), float(margin),
                                                _branch_tag(root, bands)))
            for i in np.flatnonzero(vals == 0.0):
                root = float(grid[i])
                if abs(root) >= 1e-10:
                    records.append(BoundStateRecord(p, root, (gap_lo, gap_hi),
                                                    min(root - gap_lo, gap_hi - root),
                                                    _branch_tag(root, bands)))
    records.sort(key=lambda r: r.lambda_b)
    return records


def classify_eigenvalues(eigenvalues, bands: BandStructure, zero_tol: float = 1e-8):
    """Gap margin of each eigenvalue: distance to the nearest band edge when
    strictly inside a gap, 0 otherwise.  Zero eigenvalues are never bound."""
    out = np.zeros(len(eigenvalues))
    for i, lam in enumerate(eigenvalues):
        if abs(lam) <= zero_tol:
            continue
        gap = bands.gap_of(lam)
        if gap is not None:
            out[i] = min(lam - gap[0], gap[1] - lam)
    return out


def strong_coupling_estimate(params: ModelParams, p: int):
    """Large-g approximation of the two bound-state energies (lower, upper)."""
    p = check_sector(params.n_cavities, p)
    g, hop = params.rabi, params.tunneling
    if g == 0:
        raise ZeroRabi("the strong-coupling estimate needs g > 0")
    shift = hop * hop / (2.0 * g) * (4.0 + 5.0 * math.cos(2.0 * math.pi * p / params.n_cavities))
    val = math.sqrt(2.0) * (g - shift)
    return -val, val


# --- critical coupling ----------------------------------------------------

@dataclass(frozen=True)
class CriticalCoupling:
    angle: float
    lower: float
    upper: float

    @property
    def value(self) -> float:
        return max(self.lower, self.upper)


def _gap_widths(angle: float, detuning: float, g: float, resolution: int):
    prm = ModelParams(3, detuning, 1.0, g)
    br = continuum_branches(prm, angle, resolution, check_continuity=False)
    return br[1][0][0] - br[0][1][0], br[3][0][0] - br[2][1][0]


def critical_coupling_branches(p_angle: float, detuning: float = 0.0,
                               resolution: int = DEFAULT_RESOLUTION, g_hi: float = G_HI,
                               xtol: float = 1e-11) -> CriticalCoupling:
    """Couplings (units of J) at which the lower and upper host gaps close."""
    if not math.isfinite(p_angle) or not math.isfinite(detuning):
        raise BisectionBracketFailure("angle and detuning must be finite")
    angle = float(p_angle) % (2.0 * math.pi)
    out = []
    for branch in (0, 1):
        def width(g):
            return _gap_widths(angle, detuning, g, resolution)[branch]

        w_hi = width(g_hi)
        if w_hi <= 0:
            raise BisectionBracketFailure(
                f"gap still closed at g/J = {g_hi} (angle {angle:.6f}, detuning {detuning})"
            )
        if width(0.0) > 0:
            out.append(0.0)
            continue
        out.append(optimize.brentq(width, 0.0, g_hi, xtol=xtol, rtol=1e-14, maxiter=500))
    return CriticalCoupling(angle, out[0], out[1])


def critical_coupling(p_angle: float, detuning: float = 0.0, resolution: int = DEFAULT_RESOLUTION) -> float:
    """Ratio g_c / J below which neither bound branch survives."""
    return critical_coupling_branches(p_angle, detuning, resolution).value
