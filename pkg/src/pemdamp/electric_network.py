"""Tridiagonal lattice network linking adjacent transducers.

Adjacent nodes are joined by identical line elements (L and/or R in
parallel); each end node is grounded through a boundary element scaled by
``(1 + alpha) / (1 - alpha)``.  ``alpha = 1`` leaves the end open and
``alpha = -1`` shorts the end node to ground, which removes that node from
the problem instead of producing an infinite matrix entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ModelInputError, SolverError


def _check_alpha(name: str, alpha: float) -> float:
    alpha = float(alpha)
    if not -1.0 <= alpha <= 1.0:
        raise ModelInputError(f"{name} must lie in [-1, 1], got {alpha!r}")
    return alpha


def boundary_scale(alpha: float) -> float:
    """Ratio of a boundary element to the line element: (1 + a) / (1 - a).

    Returns ``inf`` for an open end (a = 1) and ``0`` for a short (a = -1).
    """
    alpha = _check_alpha("alpha", alpha)
    if alpha == 1.0:
        return math.inf
    return (1.0 + alpha) / (1.0 - alpha)


def alpha_from_scale(ratio: float) -> float:
    """Inverse of :func:`boundary_scale`; maps [0, inf] onto [-1, 1]."""
    if ratio < 0 or math.isnan(ratio):
        raise ModelInputError(f"boundary/line ratio must be >= 0, got {ratio!r}")
    if math.isinf(ratio):
        return 1.0
    return (ratio - 1.0) / (ratio + 1.0)


@dataclass(frozen=True)
class LatticeNetwork:
    """Lattice topology plus its physical scale values.

    ``R`` and ``L`` are the line resistance and inductance; ``L=None`` is the
    purely resistive network, ``R=None`` a lossless one.
    """

    n: int
    alpha0: float
    alpha_n: float
    chi: np.ndarray
    R: float | None = None
    L: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ModelInputError(f"a lattice needs at least 2 nodes, got n={self.n}")
        object.__setattr__(self, "alpha0", _check_alpha("alpha0", self.alpha0))
        object.__setattr__(self, "alpha_n", _check_alpha("alpha_n", self.alpha_n))
        chi = np.asarray(self.chi, dtype=float)
        if chi.shape != (self.n,):
            raise ModelInputError(f"chi must have {self.n} entries, got shape {chi.shape}")
        if np.any(chi <= 0):
            raise ModelInputError("capacitance ratios must be positive")
        if abs(chi.mean() - 1.0) > 1e-12:
            raise ModelInputError(f"capacitance ratios must average to 1, got mean {chi.mean()!r}")
        object.__setattr__(self, "chi", chi)
        for name in ("R", "L"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ModelInputError(f"{name} must be positive when given, got {value!r}")

    @classmethod
    def from_capacitances(cls, capacitances, alpha0: float, alpha_n: float, R=None, L=None):
        caps = np.asarray(capacitances, dtype=float)
        if np.any(caps <= 0):
            raise ModelInputError("capacitances must be positive")
        return cls(len(caps), alpha0, alpha_n, caps / caps.mean(), R, L)

    @property
    def kind(self) -> str:
        if self.L is not None:
            return "rl"
        if self.R is not None:
            return "r"
        return "open"

    def boundary_elements(self) -> dict[str, float | None]:
        """Grounding elements at both ends (inf = open, 0 = short)."""
        out = {}
        for end, alpha in (("0", self.alpha0), ("n", self.alpha_n)):
            s = boundary_scale(alpha)
            out[f"R{end}"] = None if self.R is None else self.R * s
            out[f"L{end}"] = None if self.L is None else self.L * s
        return out

    def lattice(self) -> "LatticeMatrix":
        return build_lattice_matrix(self.n, self.alpha0, self.alpha_n)


@dataclass(frozen=True)
class LatticeMatrix:
    """Effective lattice matrix after eliminating shorted boundary nodes.

    ``active`` flags the nodes that survive; ``matrix`` acts on those only.
    """

    matrix: np.ndarray
    active: np.ndarray

    @property
    def n(self) -> int:
        return len(self.active)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def expand(self, reduced: np.ndarray) -> np.ndarray:
        """Re-insert exact zeros for constrained nodes (leading axis)."""
        out = np.zeros((self.n,) + reduced.shape[1:], dtype=reduced.dtype)
        out[self.active] = reduced
        return out


def build_lattice_matrix(n: int, alpha0: float, alpha_n: float) -> LatticeMatrix:
    """Interior rows (-1, 2, -1), end diagonals 2 / (1 + alpha)."""
    if n < 2:
        raise ModelInputError(f"a lattice needs at least 2 nodes, got n={n}")
    alpha0 = _check_alpha("alpha0", alpha0)
    alpha_n = _check_alpha("alpha_n", alpha_n)
    full = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    active = np.ones(n, dtype=bool)
    if alpha0 == -1.0:
        active[0] = False
    else:
        full[0, 0] = 2.0 / (1.0 + alpha0)
    if alpha_n == -1.0:
        active[-1] = False
    else:
        full[-1, -1] = 2.0 / (1.0 + alpha_n)
    if not active.any():
        raise ModelInputError("both ends shorted on a two-node lattice leaves no free node")
    return LatticeMatrix(full[np.ix_(active, active)], active)


@dataclass(frozen=True)
class ElectricModes:
    """Blocked-beam electric eigenpairs, ascending.

    ``vectors[:, h]`` is the full-length mode ``h`` (zeros at constrained
    nodes), normalized so that sum_j psi_j^(h) chi_j psi_j^(k) = delta_hk.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    active: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def first(self) -> np.ndarray:
        return self.vectors[:, 0]


def electric_modes(lattice: LatticeMatrix, chi) -> ElectricModes:
    """Solve N psi = lambda diag(chi) psi on the active nodes.

    diag(chi) is factored as D^2 with D = diag(sqrt(chi)); the symmetric
    problem D^-1 N D^-1 u = lambda u is solved and psi = D^-1 u.
    """
    chi = np.asarray(chi, dtype=float)
    if chi.shape != (lattice.n,):
        raise ModelInputError(f"chi has {chi.size} entries for a {lattice.n}-node lattice")
    if np.any(chi <= 0) or not np.all(np.isfinite(chi)):
        raise ModelInputError("capacitance ratios must be positive and finite")
    d = 1.0 / np.sqrt(chi[lattice.active])
    scaled = lattice.matrix * d[:, None] * d[None, :]
    try:
        lam, u = np.linalg.eigh(scaled)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"lattice eigenproblem failed: {exc}") from exc
    psi = u * d[:, None]
    # largest-magnitude entry positive; first one wins a tie
    pivot = np.argmax(np.abs(psi), axis=0)
    signs = np.sign(psi[pivot, np.arange(psi.shape[1])])
    psi = psi * signs
    lam = np.where(np.abs(lam) < 1e-14, 0.0, lam)
    return ElectricModes(lam, lattice.expand(psi), lattice.active)


def network_modes(net: LatticeNetwork) -> ElectricModes:
    return electric_modes(net.lattice(), net.chi)


def first_eigenvalue_asymptotic(n: int) -> float:
    """Large-n estimate (pi / 2n)^2 of the first eigenvalue for an open/shorted line."""
    if n < 2:
        raise ModelInputError(f"n must be >= 2, got {n}")
    return (math.pi / (2 * n)) ** 2

