"""Brute-force echo from explicit 2x2 evolution in each ``(k, -k)`` pair space.

Each pair subspace is spanned by ``|0_k 0_-k>`` and ``|1_k 1_-k>``.  In that
basis a branch Hamiltonian reads (trace dropped, it is a global phase)::

    h_i = [[-2 eps_i,        2i gamma sin(phi)],
           [-2i gamma sin(phi),        2 eps_i]]

whose ground state is ``(cos(theta_i/2), i sin(theta_i/2))``.  The echo is
then ``prod_k |<G_g| exp(-i h_e t) |G_g>|^2`` with the exponential taken from
a dense eigendecomposition, never from the closed-form product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConventionMismatch, ParameterError
from .spectrum import ChainParams, ModeData, mode_table

MAX_ORACLE_SITES = 200
_TOL = 1e-12


@dataclass(frozen=True)
class PairSubspace:
    k: int
    h_e: np.ndarray
    h_g: np.ndarray
    ground_g: np.ndarray


def pair_hamiltonian(eps: float, off: float) -> np.ndarray:
    return np.array([[-2 * eps, 2j * off], [-2j * off, 2 * eps]], dtype=complex)


def bogoliubov_vacuum(theta: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), 1j * np.sin(theta / 2)], dtype=complex)


def _check_branch(h: np.ndarray, energy: float, theta: float, label: str, k: int) -> None:
    evals, evecs = np.linalg.eigh(h)
    scale = max(1.0, energy)
    if np.max(np.abs(evals - np.array([-2 * energy, 2 * energy]))) > _TOL * scale:
        raise ConventionMismatch(
            f"convention mismatch: mode k={k} branch {label} has eigenvalues "
            f"{evals}, expected +-{2 * energy}")
    if energy == 0:
        return
    overlap = abs(np.vdot(evecs[:, 0], bogoliubov_vacuum(theta)))
    if 1 - overlap > _TOL:
        raise ConventionMismatch(
            f"convention mismatch: mode k={k} branch {label} ground state "
            f"overlap {overlap} with the Bogoliubov vacuum")


def build_pair_subspace(mode: ModeData, chain: ChainParams, delta: float) -> PairSubspace:
    """Pair Hamiltonians rebuilt from the chain parameters, checked against ``mode``."""
    phi = 2 * np.pi * mode.k / chain.n_sites
    off = chain.gamma * np.sin(phi)
    h_e = pair_hamiltonian(chain.lam - np.cos(phi) - delta, off)
    h_g = pair_hamiltonian(chain.lam - np.cos(phi) + delta, off)
    _check_branch(h_e, mode.lambda_e, mode.theta_e, "e", mode.k)
    _check_branch(h_g, mode.lambda_g, mode.theta_g, "g", mode.k)
    return PairSubspace(k=mode.k, h_e=h_e, h_g=h_g, ground_g=bogoliubov_vacuum(mode.theta_g))


def pair_overlap(pair: PairSubspace, t: float) -> complex:
    """``<G_g| exp(-i h_e t) |G_g>`` for one pair."""
    evals, evecs = np.linalg.eigh(pair.h_e)
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    return complex(np.vdot(pair.ground_g, u @ pair.ground_g))


def oracle_echo(chain: ChainParams, delta: float, t: float) -> float:
    chain.require_even()
    if chain.n_sites > MAX_ORACLE_SITES:
        raise ParameterError(
            f"oracle limited to n_sites <= {MAX_ORACLE_SITES}, got {chain.n_sites}")
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    result = 1.0
    for mode in mode_table(chain, delta):
        pair = build_pair_subspace(mode, chain, delta)
        result *= abs(pair_overlap(pair, t)) ** 2
    return result
