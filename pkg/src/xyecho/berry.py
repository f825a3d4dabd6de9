"""Ground-state Berry phase of the central spin and its finite-size scaling.

The chain enters the central spin only through its mean ground-branch angle
``f = (1/N) sum_k cos theta_k^(g)``, which adds ``4 g f`` to the ``z`` field.
Winding the transverse part of the effective field once around ``z`` gives::

    beta_g = pi (1 + x / sqrt(x^2 + nu^2)),    x = mu + 4 g f
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import NumericalError, ParameterError
from .spectrum import (
    CentralSpinParams,
    ChainParams,
    derive_branch_params,
    df_function,
    f_function,
)

REFERENCE_EXPONENT = 1.803
QUAD_EPSABS = 1e-10
FD_STEP = 1e-5

Regime = Literal["finite_n", "thermodynamic"]
Target = Literal["dbeta", "df"]


@dataclass(frozen=True)
class BerryResult:
    beta: float
    dbeta_dlambda: float
    f_value: float
    regime: Regime
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScalingFit:
    sizes: tuple[int, ...]
    peak_positions: tuple[float, ...]
    exponent: float
    target: Target
    reference_exponent: float = REFERENCE_EXPONENT
    intercept: float = field(default=float("nan"), repr=False)

    @property
    def distances(self) -> np.ndarray:
        """``1 - lambda_m`` for each size."""
        return 1.0 - np.asarray(self.peak_positions)


def _effective_x(cs: CentralSpinParams, f: float) -> float:
    return cs.mu + 4.0 * cs.g * f


def berry_phase_from_f(cs: CentralSpinParams, f: float) -> float:
    x = _effective_x(cs, f)
    r = math.hypot(x, cs.nu)
    if r == 0:
        raise NumericalError("Berry phase undefined (degenerate effective field)")
    return math.pi * (1.0 + x / r)


def dbeta_from_df(cs: CentralSpinParams, f: float, df: float) -> float:
    """Chain rule ``pi nu^2 (4 g df) / (x^2 + nu^2)^(3/2)``."""
    x = _effective_x(cs, f)
    r2 = x * x + cs.nu * cs.nu
    if r2 == 0:
        raise NumericalError("Berry phase undefined (degenerate effective field)")
    if df == 0 or cs.g == 0:
        return 0.0
    return math.pi * cs.nu**2 * 4.0 * cs.g * df / r2**1.5


def _g_branch_delta(chain: ChainParams, cs: CentralSpinParams, delta: float | None) -> float:
    if delta is not None:
        return float(delta)
    return derive_branch_params(cs, chain.n_sites).delta


# -- thermodynamic limit ----------------------------------------------------

def f_xx_closed_form(lam: float) -> float:
    """XX-chain limit: ``1/2 - arccos(lam)/pi`` inside ``|lam| <= 1``, else ``sign(lam)/2``."""
    if lam > 1:
        return 0.5
    if lam < -1:
        return -0.5
    return 0.5 - math.acos(lam) / math.pi


def _integrate(func: Callable[[float], float], gamma: float, lam: float, what: str,
               epsrel: float = 0.0) -> float:
    # lam - cos(phi) changes sign at `split`; for small gamma the integrand is
    # a step (or spike) of width ~gamma there, resolved by a geometric ladder
    split = math.acos(min(max(lam, -1.0), 1.0))
    points = {0.0, split, math.pi}
    width = gamma
    while 0 < width < math.pi:
        points.update(p for p in (split - width, split + width) if 0 < p < math.pi)
        width *= 10
    edges = sorted(points)
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        value, err, info, *warning = quad(func, a, b, epsabs=QUAD_EPSABS, epsrel=epsrel,
                                          limit=1000, full_output=1)
        if warning:
            raise NumericalError(
                f"quadrature of {what} did not converge on [{a:.6g}, {b:.6g}] "
                f"(gamma={gamma}, lambda={lam}, error estimate {err:.3g}, "
                f"{info['last']} subintervals): {warning[0]}")
        total += value
    return total / (2 * math.pi)


def f_thermodynamic(gamma: float, lam: float) -> float:
    """``(1/2pi) int_0^pi (lam - cos p) / sqrt((lam - cos p)^2 + gamma^2 sin^2 p) dp``."""
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0:
        return f_xx_closed_form(lam)

    def integrand(p):
        eps = lam - math.cos(p)
        return eps / math.hypot(eps, gamma * math.sin(p))

    return _integrate(integrand, gamma, lam, "f")


def df_thermodynamic(gamma: float, lam: float,
                     side: Literal["left", "right"] | None = None) -> float:
    """``d f / d lambda`` in the thermodynamic limit.

    The value is infinite on the critical line ``|lam| = 1``.  For the XX
    chain the two one-sided limits there differ (``inf`` inside the band,
    ``0`` outside); ``side`` selects one and is required at those points.
    """
    if gamma < 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    if gamma == 0:
        if abs(lam) == 1:
            if side is None:
                raise NumericalError(
                    f"derivative of f is one-sided at lambda={lam} for gamma=0")
            inside = (side == "left") == (lam > 0)
            return math.inf if inside else 0.0
        if abs(lam) > 1:
            return 0.0
        return 1.0 / (math.pi * math.sqrt(1.0 - lam * lam))
    if abs(lam) == 1:
        return math.inf

    def integrand(p):
        s = gamma * math.sin(p)
        return s * s / math.hypot(lam - math.cos(p), s) ** 3

    return _integrate(integrand, gamma, lam, "df/dlambda", epsrel=1e-10)


def berry_phase_thermodynamic(gamma: float, lam: float, cs: CentralSpinParams) -> BerryResult:
    """Berry phase of the central spin for an infinite chain (``delta -> 0``)."""
    f = f_thermodynamic(gamma, lam)
    flags: tuple[str, ...] = ()
    if gamma == 0 and abs(lam) == 1:
        df = df_thermodynamic(gamma, lam, side="left")
        flags = ("one_sided_derivative",)
    else:
        df = df_thermodynamic(gamma, lam)
    return BerryResult(
        beta=berry_phase_from_f(cs, f),
        dbeta_dlambda=dbeta_from_df(cs, f, df),
        f_value=f,
        regime="thermodynamic",
        flags=flags,
    )


def berry_phase_xx_closed_form(lam: float, cs: CentralSpinParams) -> float:
    """Thermodynamic XX Berry phase written out through ``arccos``."""
    return berry_phase_from_f(cs, f_xx_closed_form(lam))


# -- finite chains ----------------------------------------------------------

def berry_phase_finite(chain: ChainParams, cs: CentralSpinParams,
                       delta: float | None = None) -> BerryResult:
    """Berry phase for a chain of ``chain.n_sites`` spins.

    ``f`` uses the ground-branch angles, i.e. the field ``lam + delta`` with
    ``delta = g cos(theta) / N`` unless ``delta`` is given explicitly.
    """
    d = _g_branch_delta(chain, cs, delta)
    f = f_function(chain, d)
    x = _effective_x(cs, f)
    if cs.nu == 0 and x == 0:
        raise NumericalError("Berry phase undefined (degenerate effective field)")
    beta = berry_phase_from_f(cs, f)
    try:
        dbeta = dbeta_from_df(cs, f, df_function(chain, d))
        flags: tuple[str, ...] = ()
    except NumericalError:
        dbeta, flags = math.nan, ("degenerate_mode",)
    return BerryResult(beta=beta, dbeta_dlambda=dbeta, f_value=f,
                       regime="finite_n", flags=flags)


def dbeta_dlambda(chain: ChainParams, cs: CentralSpinParams,
                  method: Literal["analytic", "finite_difference"] = "analytic",
                  delta: float | None = None, step: float = FD_STEP) -> float:
    d = _g_branch_delta(chain, cs, delta)
    if method == "analytic":
        return dbeta_from_df(cs, f_function(chain, d), df_function(chain, d))
    if method == "finite_difference":
        hi = berry_phase_from_f(cs, f_function(chain.with_lambda(chain.lam + step), d))
        lo = berry_phase_from_f(cs, f_function(chain.with_lambda(chain.lam - step), d))
        return (hi - lo) / (2 * step)
    raise ParameterError(f"unknown derivative method {method!r}")


def effective_energies(chain: ChainParams, cs: CentralSpinParams,
                       delta: float | None = None) -> tuple[float, float]:
    """Levels ``(E_g, E_e) = (-E, E)`` of the mean-field central-spin Hamiltonian.

    ``E = sqrt((mu/2 + 2 g f)^2 + nu^2/4)``.
    """
    f = f_function(chain, _g_branch_delta(chain, cs, delta))
    e = math.hypot(cs.mu / 2 + 2 * cs.g * f, cs.nu / 2)
    return -e, e


# -- pseudocritical point ---------------------------------------------------

_INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(func: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-6) -> float:
    """Maximiser of a unimodal ``func`` on ``[a, b]`` to within ``tol``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = func(d)
    return (a + b) / 2


def _objective(chain: ChainParams, cs: CentralSpinParams, target: Target,
               delta: float | None) -> Callable[[float], float]:
    if target == "dbeta":
        d = _g_branch_delta(chain, cs, delta)
        return lambda lam: dbeta_from_df(
            cs, f_function(chain.with_lambda(lam), d), df_function(chain.with_lambda(lam), d))
    if target == "df":
        d = 0.0 if delta is None else float(delta)
        return lambda lam: df_function(chain.with_lambda(lam), d)
    raise ParameterError(f"unknown scaling target {target!r}")


def find_pseudocritical(chain: ChainParams, cs: CentralSpinParams,
                        bracket: tuple[float, float] = (0.5, 1.0),
                        target: Target = "dbeta", delta: float | None = None,
                        tol: float = 1e-6, n_grid: int = 200) -> float:
    """Position ``lambda_m`` of the peak of ``d beta/d lambda`` (or ``df/d lambda``).

    A coarse scan of ``bracket`` picks the best grid cell, golden-section
    search refines it.  ``chain.lam`` is ignored.  For ``target="df"`` the
    chain is taken without backaction unless ``delta`` is given.
    """
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise ParameterError(f"invalid bracket {bracket}")
    func = _objective(chain, cs, target, delta)
    grid = np.linspace(lo, hi, n_grid)
    values = np.array([func(x) for x in grid])
    if not np.all(np.isfinite(values)) or np.ptp(values) == 0:
        raise NumericalError(f"peak not bracketed in [{lo}, {hi}]")
    i = int(np.argmax(values))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]
    x = golden_section_max(func, a, b, tol)
    if x - lo <= tol or hi - x <= tol:
        raise NumericalError(f"peak not bracketed in [{lo}, {hi}] (maximum at edge {x:.8g})")
    return x


def scaling_fit(sizes: Sequence[int], cs: CentralSpinParams, gamma: float,
                target: Target = "dbeta", bracket: tuple[float, float] = (0.5, 1.0),
                tol: float = 1e-10, max_workers: int | None = 1) -> ScalingFit:
    """Fit ``log(1 - lambda_m)`` against ``log N``; ``exponent`` is minus the slope."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < 4:
        raise ParameterError(f"scaling fit needs at least 4 sizes, got {len(sizes)}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError(f"sizes must be strictly increasing, got {sizes}")

    def peak(n: int) -> float:
        return find_pseudocritical(ChainParams(gamma, bracket[0], n), cs, bracket,
                                   target=target, tol=tol)

    if max_workers == 1:
        peaks = [peak(n) for n in sizes]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            peaks = list(pool.map(peak, sizes))
    slope, intercept = np.polyfit(np.log(sizes), np.log(1.0 - np.asarray(peaks)), 1)
    return ScalingFit(sizes=tuple(sizes), peak_positions=tuple(peaks),
                      exponent=-float(slope), target=target, intercept=float(intercept))
