"""Synthetic inductors built from op-amps, resistors and one capacitor.

Two behavioural models are used, both exact two-terminal descriptions:

* Deboo floating inductor, ``L = R^2 C``;
* Antoniou grounded inductor (generalized impedance converter),
  ``L5 = R1 R4 R6 C5 / R2``.  ``R3`` only trims the quality factor and is
  carried along without entering the formula.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .electric_network import alpha_from_scale, build_lattice_matrix, electric_modes
from .exceptions import InfeasibleTargetError, ModelInputError

E24 = (1.0, 1.1, 1.2, 1.3, 1.5, 1.6, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0,
       3.3, 3.6, 3.9, 4.3, 4.7, 5.1, 5.6, 6.2, 6.8, 7.5, 8.2, 9.1)  # fmt: skip

TOPOLOGIES = ("deboo-floating", "antoniou-grounded")


def preferred_series(lo: float = 1.0, hi: float = 10e6, mantissas=E24) -> np.ndarray:
    """Preferred values from ``lo`` to ``hi`` inclusive (rounded to 3 significant digits)."""
    values = []
    for decade in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1):
        for m in mantissas:
            v = float(f"{m * 10.0**decade:.3g}")
            if lo * (1 - 1e-12) <= v <= hi * (1 + 1e-12):
                values.append(v)
    return np.array(sorted(set(values)))


@dataclass(frozen=True)
class ComponentCatalog:
    """Available resistors [Ohm] and capacitors [F]."""

    resistors: np.ndarray
    capacitors: np.ndarray
    tolerance: float = 0.01
    dielectric: str = "polyester"

    def __post_init__(self):
        for name in ("resistors", "capacitors"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ModelInputError(f"catalog needs at least one value in {name}")
            if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
                raise ModelInputError(f"{name} must be positive and finite")
            object.__setattr__(self, name, np.unique(arr))
        if not 0 <= self.tolerance < 1:
            raise ModelInputError(f"tolerance must lie in [0, 1), got {self.tolerance!r}")

    @classmethod
    def standard(cls, capacitors, lo: float = 1.0, hi: float = 10e6, extra_resistors=()) -> "ComponentCatalog":
        """E24 resistors over ``[lo, hi]`` plus any ``extra_resistors``."""
        res = np.concatenate([preferred_series(lo, hi), np.asarray(extra_resistors, dtype=float)])
        return cls(res, np.asarray(capacitors, dtype=float))

    def with_compositions(self) -> "ComponentCatalog":
        """Add every series and parallel pair of catalog capacitors."""
        c = self.capacitors
        a, b = np.meshgrid(c, c, indexing="ij")
        upper = np.triu_indices(len(c))
        extra = np.concatenate([(a + b)[upper], (a * b / (a + b))[upper]])
        return ComponentCatalog(self.resistors, np.concatenate([c, extra]), self.tolerance, self.dielectric)


def _check_positive(**values):
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise ModelInputError(f"{name} must be positive and finite, got {v!r}")


def deboo_inductance(R: float, C: float) -> float:
    _check_positive(R=R, C=C)
    return R * R * C


def antoniou_inductance(R1: float, R2: float, R4: float, R6: float, C5: float) -> float:
    _check_positive(R1=R1, R2=R2, R4=R4, R6=R6, C5=C5)
    return R1 * R4 * R6 * C5 / R2


@dataclass(frozen=True)
class CircuitRealization:
    topology: str
    components: dict
    inductance: float
    target: float
    relative_error: float = field(init=False)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ModelInputError(f"unknown topology {self.topology!r}")
        object.__setattr__(self, "relative_error", abs(self.inductance - self.target) / self.target)

    def recompute(self) -> float:
        c = self.components
        if self.topology == "deboo-floating":
            return deboo_inductance(c["R"], c["C"])
        return antoniou_inductance(c["R1"], c["R2"], c["R4"], c["R6"], c["C5"])

    def netlist(self) -> str:
        lines = [f"* {self.topology}: L = {self.inductance:.6g} H (target {self.target:.6g} H, "
                 f"error {self.relative_error:.3e})"]
        for name, value in self.components.items():
            unit = "F" if name.startswith("C") else "Ohm"
            lines.append(f"{name} {value:.6g} {unit}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "topology": self.topology,
            "components": dict(self.components),
            "inductance": self.inductance,
            "target": self.target,
            "relative_error": self.relative_error,
        }


def _rank_key(error, values, total_r, ordered):
    return (error, len(set(values)), total_r, ordered)


def _synth_deboo(target, cat):
    best = None
    R = cat.resistors
    for C in cat.capacitors:
        ideal = math.sqrt(target / C)
        k = int(np.searchsorted(R, ideal))
        for r in R[max(k - 1, 0) : k + 1]:
            L = deboo_inductance(float(r), float(C))
            key = _rank_key(abs(L - target) / target, (r,), float(r), (float(r), float(C)))
            if best is None or key < best[0]:
                best = (key, {"R": float(r), "C": float(C)}, L)
    return best


def _synth_antoniou(target, cat, R3):
    R = cat.resistors
    best = None
    # L = R1 R4 R6 C5 / R2; R1 and R4 enter symmetrically, so R1 <= R4
    i1, i4 = np.triu_indices(len(R))
    r1, r4 = R[i1], R[i4]
    for C in cat.capacitors:
        for r2 in R:
            ideal = target * r2 / (r1 * r4 * C)
            k = np.searchsorted(R, ideal)
            for cand in (np.clip(k - 1, 0, len(R) - 1), np.clip(k, 0, len(R) - 1)):
                r6 = R[cand]
                L = r1 * r4 * r6 * C / r2
                err = np.abs(L - target) / target
                m = err.min()
                if best is not None and m > best[0][0]:
                    continue
                for idx in np.nonzero(err == m)[0]:
                    vals = (float(r1[idx]), float(r2), float(r4[idx]), float(r6[idx]))
                    L_exact = antoniou_inductance(vals[0], vals[1], vals[2], vals[3], float(C))
                    e = abs(L_exact - target) / target
                    key = _rank_key(e, vals, sum(vals), vals + (float(C),))
                    if best is None or key < best[0]:
                        comps = {"R1": vals[0], "R2": vals[1], "R3": R3, "R4": vals[2], "R6": vals[3], "C5": float(C)}
                        best = (key, comps, L_exact)
    return best


def achievable_range(topology: str, catalog: ComponentCatalog) -> tuple[float, float]:
    R, C = catalog.resistors, catalog.capacitors
    if topology == "deboo-floating":
        return R[0] ** 2 * C[0], R[-1] ** 2 * C[-1]
    return R[0] ** 3 * C[0] / R[-1], R[-1] ** 3 * C[-1] / R[0]


def synthesize(
    target_L: float,
    topology: str,
    catalog: ComponentCatalog,
    compose_capacitors: bool = False,
    R3: float = 0.0,
    max_error: float | None = None,
) -> CircuitRealization:
    """Catalog combination closest to ``target_L``.

    Ties go to fewer distinct values, then smaller total resistance, then
    the lexicographically smallest component tuple.  A target outside the
    catalog's reach (or not met within ``max_error``) raises
    :class:`InfeasibleTargetError` with the achievable bounds.
    """
    _check_positive(target_L=target_L)
    if topology not in TOPOLOGIES:
        raise ModelInputError(f"topology must be one of {TOPOLOGIES}, got {topology!r}")
    if compose_capacitors:
        catalog = catalog.with_compositions()
    lo, hi = achievable_range(topology, catalog)
    if not lo * (1 - 1e-12) <= target_L <= hi * (1 + 1e-12):
        raise InfeasibleTargetError(
            f"target {target_L:g} H is outside the achievable range [{lo:g}, {hi:g}] H for {topology}",
            bounds=(lo, hi),
        )
    if topology == "deboo-floating":
        _, comps, L = _synth_deboo(target_L, catalog)
    else:
        _, comps, L = _synth_antoniou(target_L, catalog, float(R3))
    out = CircuitRealization(topology, comps, L, target_L)
    if max_error is not None and out.relative_error > max_error:
        raise InfeasibleTargetError(
            f"best {topology} realization misses {target_L:g} H by {out.relative_error:.3e} (> {max_error:g})",
            bounds=(lo, hi),
        )
    return out


def brute_force(target_L: float, topology: str, catalog: ComponentCatalog) -> float:
    """Smallest relative error over every catalog combination (small catalogs only)."""
    R, C = catalog.resistors, catalog.capacitors
    best = math.inf
    if topology == "deboo-floating":
        for r, c in itertools.product(R, C):
            best = min(best, abs(deboo_inductance(r, c) - target_L) / target_L)
    else:
        for r1, r2, r4, r6, c in itertools.product(R, R, R, R, C):
            best = min(best, abs(antoniou_inductance(r1, r2, r4, r6, c) - target_L) / target_L)
    return best


def terminal_alpha(L5: float, L_line: float) -> float:
    """alpha_n = (L5/L - 1)/(L5/L + 1); ``L5 = 0`` is a grounded short (-1)."""
    if not L_line > 0:
        raise ModelInputError(f"L_line must be positive, got {L_line!r}")
    if L5 < 0:
        raise ModelInputError(f"terminal inductance must be >= 0, got {L5!r}")
    return alpha_from_scale(L5 / L_line)


def terminal_inductance(alpha_n: float, L_line: float) -> float:
    """Inverse of :func:`terminal_alpha` on [-1, 1)."""
    if not -1 <= alpha_n < 1:
        raise ModelInputError(f"alpha_n must lie in [-1, 1), got {alpha_n!r}")
    return L_line * (1 + alpha_n) / (1 - alpha_n)


@dataclass(frozen=True)
class TuningCurve:
    L5: np.ndarray
    alpha_n: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    lambda1: np.ndarray
    L_line: float

    def rows(self) -> np.ndarray:
        return np.column_stack([self.L5, self.alpha_n, self.beta, self.gamma, self.lambda1])


def _first_mode(gamma_row, chi, alpha0, alpha_n):
    modes = electric_modes(build_lattice_matrix(len(gamma_row), alpha0, alpha_n), chi)
    return modes.lambda1, abs(float(gamma_row @ modes.first))


def tuning_curve(L_line, L5_values, gamma_row, chi, c, omega1, alpha0: float = 1.0) -> TuningCurve:
    """beta and gamma as the terminal inductance L5 varies at fixed line inductance."""
    _check_positive(L_line=L_line, c=c, omega1=omega1)
    gamma_row = np.asarray(gamma_row, dtype=float)
    chi = np.asarray(chi, dtype=float)
    L5 = np.asarray(L5_values, dtype=float)
    if np.any(L5 < 0) or np.any(L5 > 10 * L_line):
        raise ModelInputError("terminal inductances must lie within [0, 10 L_line]")
    alphas = np.array([terminal_alpha(v, L_line) for v in L5])
    lam = np.empty_like(L5)
    gam = np.empty_like(L5)
    for k, a in enumerate(alphas):
        lam[k], gam[k] = _first_mode(gamma_row, chi, alpha0, a)
    beta = lam / (L_line * c * omega1**2)
    return TuningCurve(L5, alphas, beta, gam, lam, float(L_line))


def tuning_crossing(L_line, gamma_row, chi, c, omega1, alpha0: float = 1.0, target_beta: float = 1.0) -> float:
    """Terminal inductance at which beta reaches ``target_beta`` (Brent root-find)."""

    def f(L5):
        lam, _ = _first_mode(np.asarray(gamma_row, float), np.asarray(chi, float), alpha0, terminal_alpha(L5, L_line))
        return lam / (L_line * c * omega1**2) - target_beta

    lo, hi = 0.0, 10 * L_line
    if f(lo) * f(hi) > 0:
        raise InfeasibleTargetError(
            f"beta = {target_beta:g} is not reached for L5 in [0, {hi:g}] H", bounds=(f(hi) + target_beta, f(lo) + target_beta)
        )
    return brentq(f, lo, hi, xtol=1e-12, rtol=1e-14)
