"""Piecewise Euler-Bernoulli cantilever with bonded piezoelectric patches.

The beam is discretized with two-node Hermite-cubic elements (deflection and
slope per node).  Element boundaries always include every patch edge, so the
piecewise-constant bending stiffness and mass per length are represented
exactly.  Mode shapes are mass-normalized so that

    (1/m_tot) * integral(rho * w_i * w_j dx) = delta_ij

which makes them dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .exceptions import ModelInputError, SolverError

DEFAULT_ELEMENTS_PER_SEGMENT = 8

# roots of 1 + cos(x) cosh(x) = 0 (clamped-free beam)
CANTILEVER_ROOTS = (
    1.8751040687119611,
    4.6940911329741745,
    7.8547574382376126,
    10.995540734875467,
    14.137168391046471,
)


@dataclass(frozen=True)
class Patch:
    """One bonded transducer covering ``[x, x + length]``.

    Attributes
    ----------
    x : float
        Left edge measured from the clamp [m].
    length : float
        Patch length [m].
    k_piezo : float
        Bending stiffness added over the covered region [N m^2].
    rho_piezo : float
        Mass per length added over the covered region [kg/m].
    g : float
        Piezoelectric coupling coefficient [N m/V].
    capacitance : float or None
        Inherent capacitance [F].  Not needed for the actuator patch.
    """

    x: float
    length: float
    k_piezo: float
    rho_piezo: float
    g: float
    capacitance: float | None = None

    @property
    def end(self) -> float:
        return self.x + self.length


@dataclass(frozen=True)
class BeamAssembly:
    """Host beam plus an array of network transducers and an optional actuator."""

    length: float
    k_beam: float
    rho_beam: float
    patches: tuple[Patch, ...] = ()
    actuator: Patch | None = None

    def __post_init__(self):
        object.__setattr__(self, "patches", tuple(self.patches))
        for name in ("length", "k_beam", "rho_beam"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ModelInputError(f"{name} must be positive and finite, got {value!r}")
        labelled = [(f"patch {i + 1}", p) for i, p in enumerate(self.patches)]
        if self.actuator is not None:
            labelled.append(("actuator", self.actuator))
        for label, p in labelled:
            for name in ("length", "k_piezo", "rho_piezo"):
                if not getattr(p, name) > 0:
                    raise ModelInputError(f"{label}: {name} must be positive, got {getattr(p, name)!r}")
            if p.x < 0 or p.end > self.length * (1 + 1e-12):
                raise ModelInputError(
                    f"{label} spans [{p.x:g}, {p.end:g}] m, outside the beam [0, {self.length:g}] m"
                )
        for i, p in enumerate(self.patches):
            if p.capacitance is None or not p.capacitance > 0:
                raise ModelInputError(f"patch {i + 1}: capacitance must be positive, got {p.capacitance!r}")
        # touching edges are allowed, overlap is not
        for a in range(len(labelled)):
            for b in range(a + 1, len(labelled)):
                (la, pa), (lb, pb) = labelled[a], labelled[b]
                if min(pa.end, pb.end) - max(pa.x, pb.x) > 1e-12 * self.length:
                    raise ModelInputError(f"{la} and {lb} overlap")

    @property
    def n(self) -> int:
        return len(self.patches)

    @property
    def capacitances(self) -> np.ndarray:
        return np.array([p.capacitance for p in self.patches], dtype=float)

    @classmethod
    def uniform_array(
        cls,
        length: float,
        k_beam: float,
        rho_beam: float,
        n: int,
        first_x: float,
        pitch: float,
        patch_length: float,
        k_piezo: float,
        rho_piezo: float,
        g: float | Sequence[float],
        capacitance: float | Sequence[float],
        actuator: Patch | None = None,
    ) -> "BeamAssembly":
        """Equally spaced identical patches; ``g`` and ``capacitance`` may vary per patch."""
        g_arr = np.broadcast_to(np.asarray(g, dtype=float), (n,))
        c_arr = np.broadcast_to(np.asarray(capacitance, dtype=float), (n,))
        patches = tuple(
            Patch(first_x + i * pitch, patch_length, k_piezo, rho_piezo, float(g_arr[i]), float(c_arr[i]))
            for i in range(n)
        )
        return cls(length, k_beam, rho_beam, patches, actuator)


def laminate_properties(
    E_beam: float,
    width_beam: float,
    thickness_beam: float,
    density_beam: float,
    E_piezo: float,
    width_piezo: float,
    thickness_piezo: float,
    density_piezo: float,
) -> tuple[float, float, float, float, float]:
    """Section properties of a beam with one patch bonded on one face.

    Perfect bonding, neutral axis shifted by the patch.  Returns
    ``(k_beam, rho_beam, k_piezo, rho_piezo, z_piezo)`` where ``k_piezo`` is
    the stiffness *added* by the patch and ``z_piezo`` the distance from the
    composite neutral axis to the patch mid-plane (useful for ``g = E d31 w z``).
    """
    hb, hp = thickness_beam, thickness_piezo
    ab, ap = E_beam * width_beam * hb, E_piezo * width_piezo * hp
    # neutral axis measured from the beam mid-plane
    z_na = ap * (hb + hp) / 2 / (ab + ap)
    k_beam = E_beam * width_beam * hb**3 / 12
    k_comp = k_beam + ab * z_na**2 + E_piezo * width_piezo * hp**3 / 12 + ap * ((hb + hp) / 2 - z_na) ** 2
    rho_beam = density_beam * width_beam * hb
    rho_piezo = density_piezo * width_piezo * hp
    return k_beam, rho_beam, k_comp - k_beam, rho_piezo, (hb + hp) / 2 - z_na


@dataclass(frozen=True)
class PiecewiseProfile:
    """Piecewise-constant k(x) and rho(x) on ``breakpoints``.

    ``owner[s]`` is the patch index covering segment ``s`` (0-based), ``-1``
    for bare beam and ``-2`` for the actuator.
    """

    breakpoints: np.ndarray
    k: np.ndarray
    rho: np.ndarray
    owner: np.ndarray

    @property
    def length(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def n_segments(self) -> int:
        return len(self.k)

    @property
    def m_tot(self) -> float:
        return float(np.sum(self.rho * np.diff(self.breakpoints)))

    def stiffness_at(self, x) -> np.ndarray:
        return self.k[self._segment(x)]

    def density_at(self, x) -> np.ndarray:
        return self.rho[self._segment(x)]

    def _segment(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, self.n_segments - 1)

    def same_as(self, other: "PiecewiseProfile") -> bool:
        return (
            self.breakpoints.shape == other.breakpoints.shape
            and np.allclose(self.breakpoints, other.breakpoints, rtol=1e-12, atol=0)
            and np.allclose(self.k, other.k, rtol=1e-12, atol=0)
            and np.allclose(self.rho, other.rho, rtol=1e-12, atol=0)
        )


def assemble_profile(assembly: BeamAssembly) -> PiecewiseProfile:
    """Split the beam into constant-property segments at every patch edge."""
    covers = [(p, i) for i, p in enumerate(assembly.patches)]
    if assembly.actuator is not None:
        covers.append((assembly.actuator, -2))
    covers.sort(key=lambda item: item[0].x)

    tol = 1e-12 * assembly.length
    points, k, rho, owner = [0.0], [], [], []
    cursor = 0.0
    for patch, idx in covers:
        if patch.x - cursor > tol:
            points.append(patch.x)
            k.append(assembly.k_beam)
            rho.append(assembly.rho_beam)
            owner.append(-1)
        elif points[-1] != patch.x:
            points[-1] = patch.x  # absorb a sub-tolerance sliver
        points.append(min(patch.end, assembly.length))
        k.append(assembly.k_beam + patch.k_piezo)
        rho.append(assembly.rho_beam + patch.rho_piezo)
        owner.append(idx)
        cursor = points[-1]
    if assembly.length - cursor > tol:
        points.append(assembly.length)
        k.append(assembly.k_beam)
        rho.append(assembly.rho_beam)
        owner.append(-1)
    else:
        points[-1] = assembly.length
    return PiecewiseProfile(np.array(points), np.array(k), np.array(rho), np.array(owner, dtype=int))


# Hermite cubic shape functions on [0, h], local coordinate s = x/h in [0, 1]
def _shape(s, h):
    s = np.asarray(s, dtype=float)
    return np.stack([1 - 3 * s**2 + 2 * s**3, h * (s - 2 * s**2 + s**3), 3 * s**2 - 2 * s**3, h * (s**3 - s**2)], -1)


def _shape_dx(s, h):
    s = np.asarray(s, dtype=float)
    return np.stack([(6 * s**2 - 6 * s) / h, 1 - 4 * s + 3 * s**2, (6 * s - 6 * s**2) / h, 3 * s**2 - 2 * s], -1)


def _shape_dxx(s, h):
    s = np.asarray(s, dtype=float)
    return np.stack([(12 * s - 6) / h**2, (6 * s - 4) / h, (6 - 12 * s) / h**2, (6 * s - 2) / h], -1)


def _element_matrices(k: float, rho: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    ke = k / h**3 * np.array(
        [
            [12, 6 * h, -12, 6 * h],
            [6 * h, 4 * h * h, -6 * h, 2 * h * h],
            [-12, -6 * h, 12, -6 * h],
            [6 * h, 2 * h * h, -6 * h, 4 * h * h],
        ]
    )
    me = rho * h / 420 * np.array(
        [
            [156, 22 * h, 54, -13 * h],
            [22 * h, 4 * h * h, 13 * h, -3 * h * h],
            [54, 13 * h, 156, -22 * h],
            [-13 * h, -3 * h * h, -22 * h, 4 * h * h],
        ]
    )
    return ke, me


def build_mesh(profile: PiecewiseProfile, elements_per_segment: int = DEFAULT_ELEMENTS_PER_SEGMENT):
    """Node coordinates and per-element (k, rho) for a profile."""
    if elements_per_segment < 1:
        raise ModelInputError(f"elements_per_segment must be >= 1, got {elements_per_segment}")
    nodes = [0.0]
    ek, erho = [], []
    for s in range(profile.n_segments):
        a, b = profile.breakpoints[s], profile.breakpoints[s + 1]
        inner = np.linspace(a, b, elements_per_segment + 1)[1:]
        nodes.extend(inner.tolist())
        ek.extend([profile.k[s]] * elements_per_segment)
        erho.extend([profile.rho[s]] * elements_per_segment)
    nodes = np.array(nodes)
    nodes[-1] = profile.length
    return nodes, np.array(ek), np.array(erho)


def global_matrices(nodes: np.ndarray, ek: np.ndarray, erho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Free-free stiffness and consistent mass matrices (2 dofs per node)."""
    ndof = 2 * len(nodes)
    K = np.zeros((ndof, ndof))
    M = np.zeros((ndof, ndof))
    for e, h in enumerate(np.diff(nodes)):
        ke, me = _element_matrices(ek[e], erho[e], h)
        sl = slice(2 * e, 2 * e + 4)
        K[sl, sl] += ke
        M[sl, sl] += me
    return K, M


@dataclass(frozen=True)
class ModalBasis:
    """Short-circuit cantilever modes sampled at the mesh nodes.

    ``shapes[i]`` and ``slopes[i]`` hold the normalized deflection and slope
    of mode ``i`` at ``nodes``; slopes carry units of 1/m.
    """

    nodes: np.ndarray
    frequencies: np.ndarray
    shapes: np.ndarray
    slopes: np.ndarray
    m_tot: float
    profile: PiecewiseProfile = field(repr=False)
    element_k: np.ndarray = field(repr=False)
    element_rho: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.frequencies)

    @property
    def omega1(self) -> float:
        return float(self.frequencies[0])

    @property
    def length(self) -> float:
        return float(self.nodes[-1])

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < -1e-12 * self.length) or np.any(x > self.length * (1 + 1e-12)):
            raise ModelInputError(f"coordinate outside the beam [0, {self.length:g}] m")
        e = np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, len(self.nodes) - 2)
        h = self.nodes[e + 1] - self.nodes[e]
        return e, (x - self.nodes[e]) / h, h

    def _dofs(self, e):
        # (..., modes, 4) local dof values
        q = np.stack([self.shapes[:, e], self.slopes[:, e], self.shapes[:, e + 1], self.slopes[:, e + 1]], -1)
        return np.moveaxis(q, 0, -2)

    def deflection(self, x) -> np.ndarray:
        """Mode deflections at ``x``; shape ``x.shape + (count,)``."""
        e, s, h = self._locate(x)
        return np.einsum("...mk,...k->...m", self._dofs(e), _shape(s, h))

    def slope(self, x) -> np.ndarray:
        e, s, h = self._locate(x)
        return np.einsum("...mk,...k->...m", self._dofs(e), _shape_dx(s, h))

    def curvature(self, x) -> np.ndarray:
        """Second derivative of the interpolated modes.

        Piecewise linear inside each element; at interior nodes the element on
        the right is used.
        """
        e, s, h = self._locate(x)
        return np.einsum("...mk,...k->...m", self._dofs(e), _shape_dxx(s, h))

    @property
    def tip(self) -> np.ndarray:
        return self.shapes[:, -1].copy()

    def mass_matrix(self) -> np.ndarray:
        return global_matrices(self.nodes, self.element_k, self.element_rho)[1]

    def orthonormality_residual(self) -> float:
        """max |(1/m_tot) int rho w_i w_j dx - delta_ij| over computed modes."""
        M = self.mass_matrix()
        Phi = self._dof_vectors()
        gram = Phi.T @ M @ Phi / self.m_tot
        return float(np.max(np.abs(gram - np.eye(self.count))))

    def _dof_vectors(self) -> np.ndarray:
        Phi = np.empty((2 * len(self.nodes), self.count))
        Phi[0::2] = self.shapes.T
        Phi[1::2] = self.slopes.T
        return Phi


_GAUSS3_X, _GAUSS3_W = np.polynomial.legendre.leggauss(3)


def _strain_energy(full: np.ndarray, nodes: np.ndarray, ek: np.ndarray) -> np.ndarray:
    """Twice the strain energy, int k w''^2 dx, of each dof column.

    Summed element by element from curvatures, which avoids the cancellation
    of the assembled stiffness matrix; used as a Rayleigh quotient numerator.
    """
    s = 0.5 * (_GAUSS3_X + 1.0)
    total = np.zeros(full.shape[1])
    for e, h in enumerate(np.diff(nodes)):
        curv = _shape_dxx(s, h) @ full[2 * e : 2 * e + 4]
        total += ek[e] * 0.5 * h * (_GAUSS3_W @ curv**2)
    return total


def compute_modes(
    profile: PiecewiseProfile,
    count: int,
    elements_per_segment: int = DEFAULT_ELEMENTS_PER_SEGMENT,
) -> ModalBasis:
    """First ``count`` clamped-free modes, normalized and with positive tip deflection."""
    if count < 1:
        raise ModelInputError(f"mode count must be >= 1, got {count}")
    nodes, ek, erho = build_mesh(profile, elements_per_segment)
    K, M = global_matrices(nodes, ek, erho)
    free = slice(2, None)  # clamp: w(0) = w'(0) = 0
    n_free = 2 * len(nodes) - 2
    if count > n_free:
        raise ModelInputError(f"requested {count} modes but the mesh only has {n_free} free dofs")
    try:
        # Short elements make lambda_max / lambda_1 huge; solving the inverted
        # pencil (M, K) puts the wanted modes at the top of the spectrum,
        # where the symmetric solver's absolute error is small in relative terms.
        mu, vec = scipy.linalg.eigh(M[free, free], K[free, free], subset_by_index=[n_free - count, n_free - 1])
    except (np.linalg.LinAlgError, ValueError) as exc:
        stats = {
            "nodes": len(nodes),
            "elements": len(nodes) - 1,
            "min_element": float(np.min(np.diff(nodes))),
            "max_element": float(np.max(np.diff(nodes))),
        }
        raise SolverError(f"beam eigenproblem failed: {exc}", stats) from exc
    if np.any(mu <= 0):
        raise SolverError("non-positive beam eigenvalue", {"inverse_eigenvalues": mu.tolist()})
    vec = vec[:, ::-1]

    m_tot = profile.m_tot
    full = np.zeros((2 * len(nodes), count))
    full[2:] = vec
    full /= np.sqrt(np.einsum("ik,ij,jk->k", full, M, full) / m_tot)
    w2 = _strain_energy(full, nodes, ek) / m_tot
    order = np.argsort(w2)
    full, w2 = full[:, order], w2[order]
    tip_sign = np.sign(full[-2])
    tip_sign[tip_sign == 0] = 1.0
    full *= tip_sign
    return ModalBasis(
        nodes=nodes,
        frequencies=np.sqrt(w2),
        shapes=full[0::2].T.copy(),
        slopes=full[1::2].T.copy(),
        m_tot=m_tot,
        profile=profile,
        element_k=ek,
        element_rho=erho,
    )


def cantilever_frequencies(k: float, rho: float, length: float, count: int = 3) -> np.ndarray:
    """Closed-form clamped-free angular frequencies of a uniform beam [rad/s]."""
    roots = np.array(CANTILEVER_ROOTS[:count])
    return roots**2 * math.sqrt(k / rho) / length**2


@dataclass(frozen=True)
class CouplingTable:
    """Modal coupling between mechanical modes (rows) and transducers (columns).

    ``G`` is the dimensional coupling [N/V]; it is ``None`` for tables built
    from measured dimensionless values.
    """

    gamma: np.ndarray
    capacitances: np.ndarray
    omega1: float
    G: np.ndarray | None = None
    m_tot: float | None = None

    @property
    def c(self) -> float:
        """Mean transducer capacitance [F]."""
        return float(np.mean(self.capacitances))

    @property
    def chi(self) -> np.ndarray:
        return self.capacitances / self.c

    @property
    def n(self) -> int:
        return self.gamma.shape[1]

    @property
    def modes(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def measured(cls, gamma, capacitances, omega1: float) -> "CouplingTable":
        """Table built directly from measured dimensionless couplings.

        ``gamma`` is either one row (first mode only) or a modes x n matrix.
        """
        gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
        caps = np.asarray(capacitances, dtype=float)
        if gamma.shape[1] != caps.size:
            raise ModelInputError(
                f"{gamma.shape[1]} coupling values per mode but {caps.size} capacitances"
            )
        if np.any(caps <= 0):
            raise ModelInputError("capacitances must be positive")
        if not omega1 > 0:
            raise ModelInputError(f"omega1 must be positive, got {omega1!r}")
        return cls(gamma=gamma, capacitances=caps, omega1=float(omega1))


def coupling_matrix(basis: ModalBasis, assembly: BeamAssembly) -> CouplingTable:
    """G_ij = g_j [w_i'(x_j + l_j) - w_i'(x_j)] and its dimensionless form."""
    if not basis.profile.same_as(assemble_profile(assembly)):
        raise ModelInputError("modal basis was not computed on this assembly")
    if assembly.n == 0:
        raise ModelInputError("assembly has no network transducers")
    left = basis.slope(np.array([p.x for p in assembly.patches]))  # (n, modes)
    right = basis.slope(np.array([p.end for p in assembly.patches]))
    g = np.array([p.g for p in assembly.patches])
    G = ((right - left) * g).T  # (modes, n)
    caps = assembly.capacitances
    c = float(np.mean(caps))
    gamma = G / (basis.omega1 * math.sqrt(c * basis.m_tot))
    return CouplingTable(gamma=gamma, capacitances=caps, omega1=basis.omega1, G=G, m_tot=basis.m_tot)


@dataclass(frozen=True)
class PointForce:
    x: float
    amplitude: float = 1.0


@dataclass(frozen=True)
class DistributedForce:
    """Force density ``density(x)`` [N/m] applied over ``[start, stop]``."""

    density: Callable[[np.ndarray], np.ndarray]
    start: float = 0.0
    stop: float | None = None


@dataclass(frozen=True)
class ActuatorDrive:
    """Patch actuator driven by ``voltage``; moment g * V applied at its edges."""

    x: float
    length: float
    g: float
    voltage: float = 1.0

    @classmethod
    def from_patch(cls, patch: Patch, voltage: float = 1.0) -> "ActuatorDrive":
        return cls(patch.x, patch.length, patch.g, voltage)


LoadSpec = PointForce | DistributedForce | ActuatorDrive

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(6)


def modal_force(basis: ModalBasis, load: LoadSpec) -> np.ndarray:
    """F_i = (1/m_tot) int f(x) w_i(x) dx for each retained mode [m/s^2 per load unit]."""
    length = basis.length
    tol = 1e-12 * length
    if isinstance(load, PointForce):
        if not -tol <= load.x <= length + tol:
            raise ModelInputError(f"point force at {load.x:g} m is outside the beam")
        return load.amplitude * basis.deflection(load.x) / basis.m_tot
    if isinstance(load, ActuatorDrive):
        end = load.x + load.length
        if load.x < -tol or end > length + tol or load.length <= 0:
            raise ModelInputError(f"actuator [{load.x:g}, {end:g}] m is outside the beam")
        jump = basis.slope(end) - basis.slope(load.x)
        return load.g * load.voltage * jump / basis.m_tot
    if isinstance(load, DistributedForce):
        stop = length if load.stop is None else load.stop
        if load.start < -tol or stop > length + tol or stop <= load.start:
            raise ModelInputError(f"distributed load [{load.start:g}, {stop:g}] m is outside the beam")
        total = np.zeros(basis.count)
        for a, b in zip(basis.nodes[:-1], basis.nodes[1:]):
            lo, hi = max(a, load.start), min(b, stop)
            if hi <= lo:
                continue
            xq = 0.5 * (hi - lo) * _GAUSS_X + 0.5 * (hi + lo)
            fq = np.asarray(load.density(xq), dtype=float) * np.ones_like(xq)
            total += 0.5 * (hi - lo) * (_GAUSS_W * fq) @ basis.deflection(xq)
        return total / basis.m_tot
    raise ModelInputError(f"unsupported load type {type(load).__name__}")
