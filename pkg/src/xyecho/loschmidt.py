"""Loschmidt echo of the chain under the two central-spin branches.

The echo factorises over momentum pairs::

    L(t) = prod_k [1 - sin^2(2 alpha_k) sin^2(2 Lambda_{k,e} t)]

With thousands of factors close to one the product is accumulated as an
exactly rounded sum of ``log1p(-s_k)``.  The scalar and the series entry
points share one kernel, so a value never depends on the grid it came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .spectrum import ChainParams, ModeTable


@dataclass(frozen=True)
class EchoSeries:
    times: np.ndarray
    values: np.ndarray
    log_values: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class HeuristicParams:
    """Small-momentum Gaussian envelope ``exp(-tau t^2)`` of the partial echo."""

    cutoff: int
    tau: float
    e_factor: float


@dataclass(frozen=True)
class PurityInput:
    c_g_sq: float
    c_e_sq: float

    def __post_init__(self):
        for w in (self.c_g_sq, self.c_e_sq):
            if not 0.0 <= w <= 1.0:
                raise ParameterError(f"branch weight {w} outside [0, 1]")
        if abs(self.c_g_sq + self.c_e_sq - 1.0) > 1e-12:
            raise ParameterError("branch weights must sum to 1")


def _log_factors(modes: ModeTable, times: np.ndarray, n: int | None = None) -> np.ndarray:
    """``log F_k(t)`` as a ``(len(times), n)`` array, rows contiguous."""
    s2a = np.square(modes.sin_2alpha[:n])
    lam_e = modes.lambda_e[:n]
    s = s2a[None, :] * np.square(np.sin(2.0 * np.outer(times, lam_e)))
    # F_k is in [0, 1]; rounding can push s a hair past 1
    s = np.minimum(s, 1.0)
    with np.errstate(divide="ignore"):
        return np.log1p(-s)


def _log_echo(modes: ModeTable, times: np.ndarray, n: int | None = None) -> np.ndarray:
    modes.chain.require_even()
    # fsum is correctly rounded: order-free, and dropping factors can only raise it
    logs = _log_factors(modes, times, n)
    return np.fromiter(map(math.fsum, logs), dtype=float, count=len(logs))


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("time grid must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise ParameterError("times must be finite and >= 0")
    return t


def loschmidt_echo(modes: ModeTable, t: float) -> float:
    """Exact echo ``L(t)`` of a mode table at a single time ``t >= 0``."""
    log_l = _log_echo(modes, _check_times([t]))[0]
    return float(np.exp(log_l))


def log_loschmidt_echo(modes: ModeTable, t: float) -> float:
    """``ln L(t)``; ``-inf`` if some factor vanishes exactly."""
    return float(_log_echo(modes, _check_times([t]))[0])


def echo_series(modes: ModeTable, times) -> EchoSeries:
    t = _check_times(times)
    if np.any(np.diff(t) < 0):
        raise ParameterError("times must be sorted ascending")
    log_l = _log_echo(modes, t)
    return EchoSeries(times=t, values=np.exp(log_l), log_values=log_l)


def purity(le: float, p: PurityInput) -> float:
    """Central-spin purity ``1 - 2 |c_g c_e|^2 (1 - L)``."""
    if not 0.0 <= le <= 1.0:
        raise ParameterError(f"echo value {le} outside [0, 1]")
    return 1.0 - 2.0 * p.c_g_sq * p.c_e_sq * (1.0 - le)


def e_factor(cutoff: int, n_sites: int) -> float:
    """``sum_{k<=cutoff} phi_k^2 = 4 pi^2 Nc (Nc+1)(2 Nc+1) / (6 N^2)``."""
    return 4 * math.pi**2 * cutoff * (cutoff + 1) * (2 * cutoff + 1) / (6 * n_sites**2)


def _check_cutoff(chain: ChainParams, cutoff: int) -> None:
    if cutoff < 1:
        raise ParameterError(f"cutoff must be >= 1, got {cutoff}")
    if cutoff >= chain.n_sites / 2:
        raise ParameterError(
            f"cutoff outside small-k regime (cutoff={cutoff}, N={chain.n_sites})")


def heuristic_tau(chain: ChainParams, delta: float, cutoff: int) -> HeuristicParams:
    """Decay rate ``tau = 16 E(Nc) gamma^2 delta^2 / (lam + delta - 1)^2``."""
    _check_cutoff(chain, cutoff)
    gap = chain.lam + delta - 1.0
    if gap == 0:
        raise NumericalError(
            f"tau pole: lambda + delta = 1 (lambda={chain.lam}, delta={delta})")
    e = e_factor(cutoff, chain.n_sites)
    tau = 16 * e * chain.gamma**2 * delta**2 / gap**2
    return HeuristicParams(cutoff=cutoff, tau=tau, e_factor=e)


def heuristic_envelope(params: HeuristicParams, t):
    return np.exp(-params.tau * np.square(t))


def heuristic_partial_sum(chain: ChainParams, delta: float, cutoff: int, t):
    """Small-k estimate of ``S(t) = ln L_c(t)``.

    ``-4 E gamma^2 delta^2 sin^2(2 t |lam-delta-1|) / ((lam-delta-1)^2 (lam+delta-1)^2)``;
    the removable zero of ``lam - delta - 1`` is handled through ``sinc``.
    """
    _check_cutoff(chain, cutoff)
    a = chain.lam - delta - 1.0
    b = chain.lam + delta - 1.0
    if b == 0:
        raise NumericalError(
            f"tau pole: lambda + delta = 1 (lambda={chain.lam}, delta={delta})")
    t = np.asarray(t, dtype=float)
    # sin(2 t a) / a = 2 t sinc(2 t a / pi)
    ratio = 2 * t * np.sinc(2 * t * a / np.pi)
    e = e_factor(cutoff, chain.n_sites)
    return -4 * e * chain.gamma**2 * delta**2 * ratio**2 / b**2


def small_k_sin2_2alpha(chain: ChainParams, delta: float, k):
    """Leading small-k form of ``sin^2(2 alpha_k)``."""
    a = chain.lam - delta - 1.0
    b = chain.lam + delta - 1.0
    k = np.asarray(k, dtype=float)
    return 16 * np.pi**2 * chain.gamma**2 * delta**2 * k**2 / (chain.n_sites**2 * a**2 * b**2)


def partial_product(modes: ModeTable, t: float, cutoff: int) -> float:
    """Product of the first ``cutoff`` echo factors; never below the full echo."""
    if not 1 <= cutoff <= len(modes):
        raise ParameterError(f"cutoff must lie in 1..{len(modes)}, got {cutoff}")
    return float(np.exp(_log_echo(modes, _check_times([t]), cutoff)[0]))


def partial_sum(modes: ModeTable, t: float, cutoff: int) -> float:
    if not 1 <= cutoff <= len(modes):
        raise ParameterError(f"cutoff must lie in 1..{len(modes)}, got {cutoff}")
    return float(_log_echo(modes, _check_times([t]), cutoff)[0])
