"""Two-polariton spectra and bound states of the Jaynes-Cummings-Hubbard chain."""

from .errors import *  # noqa: F401,F403
from .model import ModelParams, PairSet, mode_frequencies, normal_mode_frequency, sector_pairs, validate_params
from .oracle import build_full_hamiltonian, sector_project_spectrum, verify_operator_identities
from .realspace import JointProbabilities, RealSpaceState, joint_probabilities, localization_metrics, to_real_space
from .secular import (
    BandStructure,
    BoundStateRecord,
    band_intervals,
    classify_eigenvalues,
    critical_coupling,
    critical_coupling_branches,
    eval_G,
    eval_secular_terms,
    find_bound_eigenvalues,
    strong_coupling_estimate,
    unperturbed_pair_roots,
)
from .sector import SectorMatrix, SectorSolution, assemble_sector_matrix, sector_sweep, solve_sector

__version__ = "0.1.0"
