"""Optimal line values and boundary conditions for R and RL lattice networks.

Two damping rules are available for the RL network:

``"nominal"``
    delta = sqrt(2/3) * gamma, the widely quoted design value.
``"flat"``
    delta = sqrt(3/2) * gamma, the value at which the mobility has zero slope
    at both invariant frequencies; it is the one that actually yields the
    H-infinity norm sqrt(2) / gamma for the two-mode mobility.

Both are tuned with beta = 1.  Reports carry the numerically evaluated peak
for the rule used, so the difference between the two is always visible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .electric_network import (
    LatticeNetwork,
    boundary_scale,
    build_lattice_matrix,
    electric_modes,
)
from .exceptions import ModelInputError
from .reduced_model import ReducedParams, fixed_point_r, hinf_norm

DAMPING_RULES = {"nominal": math.sqrt(2.0 / 3.0), "flat": math.sqrt(3.0 / 2.0)}
DEFAULT_SCAN_RESOLUTION = 81


def _positive(**values):
    for name, value in values.items():
        if not value > 0:
            raise ModelInputError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class RLOptimum:
    L: float
    R: float
    beta: float
    delta: float
    rule: str


def rl_damping(gamma: float, rule: str = "nominal") -> float:
    try:
        return DAMPING_RULES[rule] * gamma
    except KeyError:
        raise ModelInputError(f"unknown damping rule {rule!r}; choose from {sorted(DAMPING_RULES)}") from None


def optimal_rl(lam1: float, gamma: float, c: float, omega1: float, rule: str = "nominal") -> RLOptimum:
    """L = lam1 / (omega1^2 c) tunes beta = 1; R = lam1 / (omega1 c delta).

    ``gamma = 0`` yields ``R = inf``: no finite resistance is optimal.
    """
    _positive(lam1=lam1, c=c, omega1=omega1)
    if gamma < 0:
        raise ModelInputError(f"gamma must be >= 0, got {gamma!r}")
    delta = rl_damping(gamma, rule)
    L = lam1 / (omega1**2 * c)
    R = math.inf if delta == 0 else lam1 / (omega1 * c * delta)
    return RLOptimum(L=L, R=R, beta=1.0, delta=delta, rule=rule)


def optimal_r_damping(gamma: float) -> float:
    g2 = gamma * gamma
    return math.sqrt((8 + 10 * g2 + 3 * g2 * g2) / (8 + 2 * g2))


def optimal_r(lam1: float, gamma: float, c: float, omega1: float) -> tuple[float, float]:
    """Optimal resistive line: returns ``(R_opt, delta_opt)``."""
    _positive(lam1=lam1, gamma=gamma, c=c, omega1=omega1)
    delta = optimal_r_damping(gamma)
    g2 = gamma * gamma
    R = lam1 / (c * omega1) * math.sqrt((8 + 2 * g2) / (8 + 10 * g2 + 3 * g2 * g2))
    return R, delta


def performance_ratio(gamma: float) -> float:
    """Peak mobility of the optimal R network over that of the optimal RL network."""
    _positive(gamma=gamma)
    return math.sqrt(2.0 / gamma**2 + 1.0)


def network_coupling(gamma_row, chi, alpha0: float, alpha_n: float) -> tuple[float, float]:
    """``(gamma, lambda1)`` of the first electric mode for given boundaries."""
    gamma_row = np.asarray(gamma_row, dtype=float)
    lattice = build_lattice_matrix(len(gamma_row), alpha0, alpha_n)
    modes = electric_modes(lattice, chi)
    return abs(float(gamma_row @ modes.first)), modes.lambda1


@dataclass(frozen=True)
class BoundaryScan:
    """Coupling surface ``surface[i, j] = gamma(alphas[i], alphas[j])``.

    The first axis is alpha0, the second alpha_n.  Cells whose first electric
    eigenvalue is (numerically) degenerate are NaN and flagged.
    """

    alphas: np.ndarray
    surface: np.ndarray
    lambda1: np.ndarray
    flagged: np.ndarray
    argmax: tuple[float, float]
    max: float
    polished: tuple[float, float]
    polished_max: float

    def triples(self) -> np.ndarray:
        a0, an = np.meshgrid(self.alphas, self.alphas, indexing="ij")
        return np.column_stack([a0.ravel(), an.ravel(), self.surface.ravel()])


def _cell(gamma_row, chi, a0, an):
    lattice = build_lattice_matrix(len(gamma_row), a0, an)
    modes = electric_modes(lattice, chi)
    lam = modes.eigenvalues
    if lam.size > 1 and lam[1] - lam[0] <= 1e-10 * max(1.0, abs(lam[1])):
        return math.nan, lam[0], True
    return abs(float(gamma_row @ modes.first)), float(lam[0]), False


def _pattern_search(f, start, step=0.25, tol=1e-6):
    """Compass search for a maximum of ``f`` on the square [-1, 1]^2."""
    x = np.array(start, dtype=float)
    fx = f(*x)
    directions = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    while step > tol:
        moved = False
        for d in directions:
            y = np.clip(x + step * d, -1.0, 1.0)
            if np.array_equal(y, x):
                continue
            fy = f(*y)
            if fy > fx:
                x, fx, moved = y, fy, True
                break
        if not moved:
            step /= 2
    return (float(x[0]), float(x[1])), float(fx)


def boundary_scan(gamma_row, chi, resolution: int = DEFAULT_SCAN_RESOLUTION, polish: bool = True) -> BoundaryScan:
    """Evaluate the first-mode coupling over the closed square of boundary parameters.

    The grid includes alpha = -1 and alpha = 1 exactly.  Ties in the maximum go
    to the first cell in row-major (alpha0, alpha_n) order.
    """
    gamma_row = np.asarray(gamma_row, dtype=float)
    chi = np.asarray(chi, dtype=float)
    n = len(gamma_row)
    if chi.shape != (n,):
        raise ModelInputError(f"{n} coupling values but {chi.size} capacitance ratios")
    if resolution < 11:
        raise ModelInputError(f"scan resolution must be >= 11 per axis, got {resolution}")
    alphas = np.linspace(-1.0, 1.0, resolution)
    alphas[0], alphas[-1] = -1.0, 1.0
    surface = np.empty((resolution, resolution))
    lam = np.empty_like(surface)
    flagged = np.zeros_like(surface, dtype=bool)
    for i, a0 in enumerate(alphas):
        for j, an in enumerate(alphas):
            if n == 2 and a0 == -1.0 and an == -1.0:
                surface[i, j], lam[i, j], flagged[i, j] = math.nan, math.nan, True
                continue
            surface[i, j], lam[i, j], flagged[i, j] = _cell(gamma_row, chi, a0, an)
    k = int(np.nanargmax(surface))
    i, j = divmod(k, resolution)
    argmax = (float(alphas[i]), float(alphas[j]))
    best = float(surface[i, j])
    polished, polished_max = argmax, best
    if polish:

        def objective(a0, an):
            if n == 2 and a0 == -1.0 and an == -1.0:
                return -math.inf
            value, _, bad = _cell(gamma_row, chi, a0, an)
            return -math.inf if bad else value

        polished, polished_max = _pattern_search(objective, argmax, step=alphas[1] - alphas[0])
    return BoundaryScan(alphas, surface, lam, flagged, argmax, best, polished, polished_max)


@dataclass
class OptimizationReport:
    """Optimal network design plus the quantities it predicts.

    ``boundary`` values use ``inf`` for an open end and ``0`` for a short.
    """

    kind: str
    source: str
    n: int
    alpha0: float
    alpha_n: float
    lambda1: float
    gamma: float
    c: float
    omega1: float
    L: float | None
    R: float
    beta: float
    delta: float
    hinf: float
    boundary: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    scan: BoundaryScan | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("scan")
        if self.scan is not None:
            out["scan"] = {
                "resolution": len(self.scan.alphas),
                "argmax": list(self.scan.argmax),
                "max": self.scan.max,
                "polished": list(self.scan.polished),
                "polished_max": self.scan.polished_max,
                "flagged_cells": int(self.scan.flagged.sum()),
            }
        return out


def _boundary_values(alpha0, alpha_n, R, L):
    out = {}
    for end, alpha in (("0", alpha0), ("n", alpha_n)):
        s = boundary_scale(alpha)
        out[f"R{end}"] = R * s
        out[f"L{end}"] = None if L is None else L * s
    return out


def design_network(
    kind: str,
    gamma_row,
    capacitances,
    omega1: float,
    alphas: tuple[float, float] | None = None,
    rule: str = "nominal",
    resolution: int = DEFAULT_SCAN_RESOLUTION,
    source: str = "measured",
) -> tuple[OptimizationReport, LatticeNetwork]:
    """Full design: boundary choice (scanned unless given), then line values.

    Returns the report and the resulting :class:`LatticeNetwork`.
    """
    if kind not in ("rl", "r"):
        raise ModelInputError(f"network kind must be 'rl' or 'r', got {kind!r}")
    gamma_row = np.asarray(gamma_row, dtype=float)
    caps = np.asarray(capacitances, dtype=float)
    if gamma_row.shape != caps.shape:
        raise ModelInputError(f"{gamma_row.size} coupling values but {caps.size} capacitances")
    _positive(omega1=omega1)
    c = float(caps.mean())
    chi = caps / c
    scan = None
    if alphas is None:
        scan = boundary_scan(gamma_row, chi, resolution)
        alphas = scan.argmax
    alpha0, alpha_n = alphas
    gamma, lam1 = network_coupling(gamma_row, chi, alpha0, alpha_n)
    extras: dict = {}
    if kind == "rl":
        opt = optimal_rl(lam1, gamma, c, omega1, rule)
        L, R, beta, delta = opt.L, opt.R, opt.beta, opt.delta
        p = ReducedParams(beta, delta, gamma, omega1)
        norm = hinf_norm(p, "rl")
        other = "flat" if rule == "nominal" else "nominal"
        alt = optimal_rl(lam1, gamma, c, omega1, other)
        extras = {
            "damping_rule": rule,
            "target_hinf": math.sqrt(2) / gamma if gamma > 0 else math.inf,
            f"R_{other}": alt.R,
            f"delta_{other}": alt.delta,
            f"hinf_{other}": hinf_norm(ReducedParams(1.0, alt.delta, gamma), "rl"),
        }
    else:
        R, delta = optimal_r(lam1, gamma, c, omega1)
        L, beta = None, 0.0
        p = ReducedParams(beta, delta, gamma, omega1)
        norm = hinf_norm(p, "r")
        w_f, amp = fixed_point_r(gamma)
        extras = {"omega_F": w_f, "f_F_hz": w_f * omega1 / (2 * math.pi), "fixed_point_amplitude": amp}
    report = OptimizationReport(
        kind=kind,
        source=source,
        n=len(gamma_row),
        alpha0=alpha0,
        alpha_n=alpha_n,
        lambda1=lam1,
        gamma=gamma,
        c=c,
        omega1=omega1,
        L=L,
        R=R,
        beta=beta,
        delta=delta,
        hinf=norm,
        boundary=_boundary_values(alpha0, alpha_n, R, L),
        extras=extras,
        scan=scan,
    )
    net = LatticeNetwork(len(gamma_row), alpha0, alpha_n, chi, R=R if math.isfinite(R) else None, L=L)
    return report, net
