"""Loschmidt echo and Berry phase of a central spin coupled to an XY spin chain."""

from .berry import (
    BerryResult,
    ScalingFit,
    berry_phase_finite,
    berry_phase_thermodynamic,
    berry_phase_xx_closed_form,
    dbeta_dlambda,
    df_thermodynamic,
    effective_energies,
    f_thermodynamic,
    find_pseudocritical,
    scaling_fit,
)
from .errors import ConventionMismatch, NumericalError, ParameterError, XYEchoError
from .loschmidt import (
    EchoSeries,
    HeuristicParams,
    PurityInput,
    echo_series,
    heuristic_tau,
    loschmidt_echo,
    partial_product,
    purity,
)
from .oracle import build_pair_subspace, oracle_echo
from .spectrum import (
    BranchParams,
    CentralSpinParams,
    ChainParams,
    ModeData,
    ModeTable,
    derive_branch_params,
    df_function,
    f_function,
    mode_table,
)

__version__ = "0.1.0"
