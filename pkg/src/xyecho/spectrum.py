"""Bogoliubov spectrum of the two effective XY chains seen by the central spin.

The central spin in its ground (excited) state shifts the transverse field of
the chain by ``+delta`` (``-delta``).  After the Jordan-Wigner and Fourier
transforms every momentum pair ``(k, -k)`` decouples, so the whole problem is
described by a table of per-mode energies and Bogoliubov angles.  Nothing in
this module builds an operator matrix.

Momenta are ``phi_k = 2 pi k / N`` for ``k = 1 .. N // 2``, each standing for
the pair ``(k, -k)``.  For even ``N`` the last entry is the unpaired boundary
momentum ``phi = pi``; its ``sin(phi)`` is set to exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import NumericalError, ParameterError

KAPPA_G = 1
KAPPA_E = -1


@dataclass(frozen=True)
class ChainParams:
    """Environment chain: anisotropy ``gamma``, field ``lam`` and ``n_sites``.

    Odd ``n_sites`` is accepted here because the finite-size Berry phase
    scans use odd chains; echo routines call :meth:`require_even`.
    """

    gamma: float
    lam: float
    n_sites: int

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.lam)):
            raise ParameterError("gamma and lambda must be finite")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ParameterError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))

    @property
    def n_modes(self) -> int:
        return self.n_sites // 2

    def require_even(self) -> None:
        if self.n_sites % 2:
            raise ParameterError(f"n_sites must be even, got {self.n_sites}")

    def with_lambda(self, lam: float) -> ChainParams:
        return ChainParams(self.gamma, lam, self.n_sites)


@dataclass(frozen=True)
class CentralSpinParams:
    """Central spin ``H_C = mu sz/2 + nu sx/2`` coupled with strength ``g``."""

    mu: float
    nu: float
    g: float

    @property
    def cos_tilt(self) -> float:
        if self.mu == 0 and self.nu == 0:
            raise ParameterError("central spin eigenbasis undefined (mu = nu = 0)")
        return math.cos(math.atan2(self.nu, self.mu))

    @property
    def tilt(self) -> float:
        if self.mu == 0 and self.nu == 0:
            raise ParameterError("central spin eigenbasis undefined (mu = nu = 0)")
        return math.atan2(self.nu, self.mu)


@dataclass(frozen=True)
class BranchParams:
    """Field shift ``delta`` and level offset ``big_delta`` of the two branches."""

    delta: float
    big_delta: float
    kappa_g: int = KAPPA_G
    kappa_e: int = KAPPA_E


def derive_branch_params(cs: CentralSpinParams, n_sites: int) -> BranchParams:
    """Backaction of the central spin on the chain.

    ``delta = g cos(theta) / N`` with the tilt taken from ``atan2(nu, mu)``,
    and ``big_delta = sqrt(mu^2 + nu^2) / 2``.  ``big_delta`` is only a global
    phase for the echo and never enters it.
    """
    if n_sites < 2:
        raise ParameterError(f"n_sites must be >= 2, got {n_sites}")
    r = math.hypot(cs.mu, cs.nu)
    if r == 0:
        raise ParameterError("central spin eigenbasis undefined (mu = nu = 0)")
    return BranchParams(delta=cs.g * (cs.mu / r) / n_sites, big_delta=r / 2)


class ModeData(NamedTuple):
    k: int
    phi: float
    lambda_g: float
    lambda_e: float
    theta_g: float
    theta_e: float
    alpha: float
    degenerate: bool


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModeTable:
    """Per-mode data for both branches, stored column-wise.

    ``cos_*``/``sin_*`` hold ``eps/Lambda`` and ``gamma sin(phi)/Lambda``
    directly; they are more accurate than taking cos/sin of the stored angle
    and are exactly 0 or +-1 in the XX and boundary cases.
    """

    chain: ChainParams
    delta: float
    k: np.ndarray
    phi: np.ndarray
    sin_phi: np.ndarray
    eps_g: np.ndarray
    eps_e: np.ndarray
    lambda_g: np.ndarray
    lambda_e: np.ndarray
    theta_g: np.ndarray
    theta_e: np.ndarray
    cos_g: np.ndarray
    sin_g: np.ndarray
    cos_e: np.ndarray
    sin_e: np.ndarray
    alpha: np.ndarray
    sin_2alpha: np.ndarray
    degenerate_g: np.ndarray
    degenerate_e: np.ndarray

    def __len__(self) -> int:
        return len(self.k)

    def __getitem__(self, i: int) -> ModeData:
        return ModeData(
            int(self.k[i]), float(self.phi[i]),
            float(self.lambda_g[i]), float(self.lambda_e[i]),
            float(self.theta_g[i]), float(self.theta_e[i]),
            float(self.alpha[i]),
            bool(self.degenerate_g[i] or self.degenerate_e[i]),
        )

    def __iter__(self) -> Iterator[ModeData]:
        return (self[i] for i in range(len(self)))

    @property
    def degenerate(self) -> np.ndarray:
        return self.degenerate_g | self.degenerate_e


def _branch(eps: np.ndarray, off: np.ndarray):
    lam = np.hypot(eps, off)
    degenerate = lam == 0
    safe = np.where(degenerate, 1.0, lam)
    cos_t = np.where(degenerate, 1.0, eps / safe)
    sin_t = np.where(degenerate, 0.0, off / safe)
    # off >= 0, so atan2 lands in [0, pi]; a degenerate mode is pinned to 0
    theta = np.where(degenerate, 0.0, np.arctan2(off, eps))
    return lam, theta, cos_t, sin_t, degenerate


def mode_table(chain: ChainParams, delta: float) -> ModeTable:
    """Bogoliubov energies and angles of every mode ``k = 1 .. N // 2``.

    ``eps_{k,i} = lam - cos(phi_k) + kappa_i delta`` with ``kappa_g = +1``,
    ``kappa_e = -1``; ``Lambda = sqrt(eps^2 + gamma^2 sin^2 phi)``.
    """
    if not math.isfinite(delta):
        raise ParameterError(f"delta must be finite, got {delta}")
    n = chain.n_sites
    k = np.arange(1, chain.n_modes + 1)
    phi = 2 * np.pi * k / n
    sin_phi = np.where(2 * k == n, 0.0, np.sin(phi))
    cos_phi = np.where(2 * k == n, -1.0, np.cos(phi))
    off = chain.gamma * sin_phi

    eps_g = chain.lam - cos_phi + KAPPA_G * delta
    eps_e = chain.lam - cos_phi + KAPPA_E * delta
    lam_g, th_g, c_g, s_g, deg_g = _branch(eps_g, off)
    lam_e, th_e, c_e, s_e, deg_e = _branch(eps_e, off)
    # sin(theta_e - theta_g) from the stored cos/sin pairs
    sin_2alpha = s_e * c_g - c_e * s_g

    arrays = dict(
        k=k, phi=phi, sin_phi=sin_phi, eps_g=eps_g, eps_e=eps_e,
        lambda_g=lam_g, lambda_e=lam_e, theta_g=th_g, theta_e=th_e,
        cos_g=c_g, sin_g=s_g, cos_e=c_e, sin_e=s_e,
        alpha=(th_e - th_g) / 2, sin_2alpha=sin_2alpha,
        degenerate_g=deg_g, degenerate_e=deg_e,
    )
    return ModeTable(chain=chain, delta=float(delta),
                     **{name: _readonly(a) for name, a in arrays.items()})


def f_function(chain: ChainParams, delta: float = 0.0) -> float:
    """Mean ground-branch ``cos(theta_k)``: ``(1/N) sum_{k=1}^{N//2} cos theta_k^(g)``."""
    modes = mode_table(chain, delta)
    return float(np.sum(modes.cos_g) / chain.n_sites)


def df_function(chain: ChainParams, delta: float = 0.0) -> float:
    """Analytic ``d f / d lambda = (1/N) sum gamma^2 sin^2(phi) / Lambda_g^3``."""
    modes = mode_table(chain, delta)
    if np.any(modes.degenerate_g):
        k = int(modes.k[np.argmax(modes.degenerate_g)])
        raise NumericalError(f"derivative singular at degenerate mode k={k}")
    off = chain.gamma * modes.sin_phi
    return float(np.sum(off**2 / modes.lambda_g**3) / chain.n_sites)
