"""Two-degree-of-freedom model: first beam mode coupled to first electric mode.

All frequencies here are dimensionless, scaled by the short-circuit first
natural frequency omega1.  The mobility is the ratio of first-mode modal
velocity to first-mode modal force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .exceptions import ModelInputError, SolverError

DEFAULT_GRID_POINTS = 4001
DEFAULT_OMEGA_MAX = 3.0


@dataclass(frozen=True)
class ReducedParams:
    """Tuning ``beta``, electric damping ``delta``, modal coupling ``gamma``.

    ``beta = 0`` is the purely resistive network.  ``omega1`` [rad/s] is
    optional and only used to express frequencies in Hz.
    """

    beta: float
    delta: float
    gamma: float
    omega1: float | None = None

    def __post_init__(self):
        if not self.beta >= 0:
            raise ModelInputError(f"beta must be >= 0, got {self.beta!r}")
        if not self.delta >= 0:
            raise ModelInputError(f"delta must be >= 0, got {self.delta!r}")
        if not math.isfinite(self.gamma):
            raise ModelInputError(f"gamma must be finite, got {self.gamma!r}")
        object.__setattr__(self, "gamma", abs(float(self.gamma)))
        if self.omega1 is not None and not self.omega1 > 0:
            raise ModelInputError(f"omega1 must be positive, got {self.omega1!r}")

    @property
    def is_resistive(self) -> bool:
        return self.beta == 0


def reduced_params(L: float | None, R: float, lam1: float, c: float, omega1: float, gamma: float) -> ReducedParams:
    """beta = lam1 / (L c omega1^2), delta = lam1 / (R c omega1); ``L=None`` gives beta = 0."""
    if L is not None and not L > 0:
        raise ModelInputError(f"L must be positive, got {L!r}")
    for name, value in (("R", R), ("c", c), ("omega1", omega1)):
        if not value > 0:
            raise ModelInputError(f"{name} must be positive, got {value!r}")
    if not lam1 >= 0:
        raise ModelInputError(f"lam1 must be >= 0, got {lam1!r}")
    beta = 0.0 if L is None else lam1 / (L * c * omega1**2)
    delta = lam1 / (R * c * omega1)
    return ReducedParams(beta, delta, gamma, omega1)


def mobility_rl(omega, p: ReducedParams) -> np.ndarray:
    """H(w) = -jw(-w^2 + beta + jw delta) / (-w^4 + j delta w^3 + w^2 (beta + 1 + gamma^2) - j w delta - beta).

    Exact real-axis poles (delta = 0) come back as complex infinity.
    """
    w = np.asarray(omega, dtype=float)
    b, d, g2 = p.beta, p.delta, p.gamma**2
    num = -1j * w * (-(w**2) + b + 1j * w * d)
    # factored form of -w^4 + j d w^3 + w^2 (b + 1 + g2) - j w d - b; keeps the
    # uncoupled pole at w = 1 exact
    den = (1 - w**2) * (w**2 - b - 1j * w * d) + g2 * w**2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    return np.where(den == 0, complex(np.inf, np.inf), out)


def mobility_r(omega, p: ReducedParams) -> np.ndarray:
    """Resistive-network mobility: the RL mobility at beta = 0."""
    if p.beta != 0:
        raise ModelInputError(f"resistive mobility needs beta = 0, got {p.beta!r}")
    return mobility_rl(omega, p)


def _mobility(which: str):
    if which == "rl":
        return mobility_rl
    if which == "r":
        return mobility_r
    raise ModelInputError(f"network kind must be 'rl' or 'r', got {which!r}")


def fixed_points_rl(
    beta: float,
    gamma: float,
    deltas: tuple[float, float] | None = None,
    n_grid: int = DEFAULT_GRID_POINTS,
) -> tuple[float, float]:
    """The two frequencies (w_S < w_T) where |H_RL| does not depend on delta.

    Found as sign changes of log|H(w; d1)| - log|H(w; d2)| on a grid,
    polished with Brent's method.
    """
    if not beta > 0 or not gamma > 0:
        raise ModelInputError(f"fixed points need beta > 0 and gamma > 0, got {beta!r}, {gamma!r}")
    d1, d2 = deltas if deltas is not None else (0.5 * gamma, 2.0 * gamma)
    if d1 == d2 or min(d1, d2) <= 0:
        raise ModelInputError("need two distinct positive damping values")
    p1 = ReducedParams(beta, d1, gamma)
    p2 = ReducedParams(beta, d2, gamma)

    def gap(w):
        return np.log(np.abs(mobility_rl(w, p1))) - np.log(np.abs(mobility_rl(w, p2)))

    # both invariant points lie below sqrt(1 + beta + gamma^2/2)
    w_hi = max(DEFAULT_OMEGA_MAX, 1.5 * math.sqrt(1 + beta + gamma**2))
    grid = np.linspace(w_hi / n_grid, w_hi, n_grid)
    values = gap(grid)
    # near w = 0 both curves coincide to rounding; ignore round-off-level samples
    keep = np.nonzero(np.abs(values) > 1e-10 * np.abs(values).max())[0]
    flips = np.nonzero(np.signbit(values[keep[:-1]]) != np.signbit(values[keep[1:]]))[0]
    idx = keep[flips]
    nxt = keep[flips + 1]
    if len(idx) != 2:
        raise SolverError(
            f"expected 2 invariant points, bracketed {len(idx)}",
            {"omega": grid, "gap": values, "deltas": (d1, d2)},
        )
    roots = [
        brentq(lambda w: float(gap(w)), grid[i], grid[k], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        for i, k in zip(idx, nxt)
    ]
    return roots[0], roots[1]


def fixed_points_rl_closed_form(beta: float, gamma: float) -> tuple[float, float]:
    """Roots of 2 w^4 - (2 (1 + beta) + gamma^2) w^2 + 2 beta = 0 (check value)."""
    s = 2 * (1 + beta) + gamma**2
    disc = math.sqrt(s * s - 16 * beta)
    return math.sqrt((s - disc) / 4), math.sqrt((s + disc) / 4)


def fixed_point_r(gamma: float) -> tuple[float, float]:
    """Invariant point of the resistive mobility: (w_F, |H_R(w_F)|)."""
    if not gamma > 0:
        raise ModelInputError(f"gamma must be positive, got {gamma!r}")
    g2 = gamma * gamma
    return math.sqrt(1 + g2 / 2), math.sqrt(2 * (2 + g2) / g2**2)


def hinf_norm(
    p: ReducedParams,
    which: str = "rl",
    omega_max: float = DEFAULT_OMEGA_MAX,
    n_grid: int = DEFAULT_GRID_POINTS,
    return_peak: bool = False,
):
    """max |H| over (0, omega_max]; ``inf`` for undamped or uncoupled systems.

    A coarse grid locates every local maximum, each of which is refined by a
    golden-section search.  With ``return_peak`` the frequency is returned too.
    """
    H = _mobility(which)
    if p.delta == 0 or p.gamma == 0:
        # undamped electric mode, or the mechanical pole at w = 1 decouples
        return (math.inf, math.nan) if return_peak else math.inf
    grid = np.linspace(omega_max / (n_grid - 1), omega_max, n_grid)
    mag = np.abs(H(grid, p))
    interior = np.nonzero((mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:]))[0] + 1
    best, best_w = float(mag.max()), float(grid[np.argmax(mag)])

    def neg(w):
        return -float(np.abs(H(w, p)))

    for i in interior:
        try:
            res = minimize_scalar(neg, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=1e-10)
        except ValueError:  # plateau: not a strict bracket
            continue
        if -res.fun > best:
            best, best_w = float(-res.fun), float(res.x)
    return (best, best_w) if return_peak else best


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex response samples on an ascending frequency grid.

    ``units`` is ``"dimensionless"`` (scaled by omega1) or ``"hz"``.
    """

    frequency: np.ndarray
    values: np.ndarray
    units: str = "dimensionless"
    quantity: str = "mobility"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.frequency, dtype=float)
        if f.ndim != 1 or np.any(np.diff(f) <= 0):
            raise ModelInputError("frequency grid must be one-dimensional and strictly increasing")
        if self.units not in ("dimensionless", "hz"):
            raise ModelInputError(f"units must be 'dimensionless' or 'hz', got {self.units!r}")
        object.__setattr__(self, "frequency", f)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def phase(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(self.values), np.angle(self.values), np.nan)

    @property
    def unbounded(self) -> np.ndarray:
        return ~np.isfinite(self.values)

    def in_hz(self, omega1: float | None = None) -> "FrequencyResponse":
        if self.units == "hz":
            return self
        omega1 = omega1 or self.metadata.get("omega1")
        if not omega1:
            raise ModelInputError("omega1 is needed to express frequencies in Hz")
        return replace(self, frequency=self.frequency * omega1 / (2 * math.pi), units="hz")

    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.magnitude))
        return float(self.frequency[i]), float(self.magnitude[i])


def sweep(
    p: ReducedParams,
    which: str = "rl",
    grid=None,
    hz: bool = False,
) -> FrequencyResponse:
    """Sample the reduced mobility on ``grid`` (dimensionless; default 4001 points on (0, 3])."""
    H = _mobility(which)
    if grid is None:
        grid = np.linspace(DEFAULT_OMEGA_MAX / (DEFAULT_GRID_POINTS - 1), DEFAULT_OMEGA_MAX, DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    meta = {"model": "reduced", "network": which, "beta": p.beta, "delta": p.delta, "gamma": p.gamma}
    if p.omega1 is not None:
        meta["omega1"] = p.omega1
    resp = FrequencyResponse(grid, H(grid, p), metadata=meta)
    return resp.in_hz() if hz else resp
