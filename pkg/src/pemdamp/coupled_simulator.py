"""Multimode beam coupled to the full lattice network, in the frequency domain.

In time units of 1/omega1 the modal coordinates W (N beam modes) and the
scaled flux linkages psi (active network nodes) obey

    W'' + diag(r^2) W + 2 diag(zeta r) W' + Gamma psi'       = F
    chi psi'' + N psi' / (R c omega1) + N psi / (omega1^2 L c) - Gamma^T W' = 0

with r_i = omega_i / omega1.  Collected as ``M x'' + C x' + K x = f``; the
coupling sits in ``C`` with opposite signs (gyroscopic), so it does no work.
The reference deflection used to make W dimensionless is 1 m.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .beam_modal import ActuatorDrive, CouplingTable, DistributedForce, ModalBasis, PointForce, modal_force
from .electric_network import LatticeNetwork, electric_modes
from .exceptions import ModelInputError
from .reduced_model import FrequencyResponse

DEFAULT_MODES = 5


@dataclass(frozen=True)
class CoupledSystem:
    """Dimensionless second-order system ``M x'' + C x' + K x = f``.

    The first ``n_mech`` coordinates are beam modal amplitudes, the remaining
    ``n_elec`` electric coordinates (node flux linkages, or electric modal
    amplitudes after :meth:`project_electrical`).
    """

    M: np.ndarray
    C: np.ndarray
    K: np.ndarray
    n_mech: int
    frequency_ratios: np.ndarray
    omega1: float
    network: LatticeNetwork | None = None
    c: float | None = None
    tip: np.ndarray | None = None
    m_tot: float | None = None
    basis: ModalBasis | None = field(default=None, repr=False)
    metadata: dict = field(default_factory=dict)

    @property
    def n_elec(self) -> int:
        return self.M.shape[0] - self.n_mech

    @property
    def size(self) -> int:
        return self.M.shape[0]

    @property
    def coupling(self) -> np.ndarray:
        """The mechanical-electrical block of ``C`` (n_mech x n_elec)."""
        return self.C[: self.n_mech, self.n_mech :]

    @property
    def is_conservative(self) -> bool:
        return not np.any(self.C + self.C.T)

    def dynamic_matrix(self, omega) -> np.ndarray:
        w = np.asarray(omega, dtype=float)[..., None, None]
        return self.K + 1j * w * self.C - w**2 * self.M

    def project_electrical(self, count: int = 1) -> "CoupledSystem":
        """Keep only the first ``count`` electric modes of the blocked network."""
        if self.network is None or self.n_elec == 0:
            raise ModelInputError("system has no electric coordinates to project")
        if self.metadata.get("electric_coordinates") != "nodal":
            raise ModelInputError("electric coordinates are already modal")
        modes = electric_modes(self.network.lattice(), self.network.chi)
        if not 1 <= count <= modes.size:
            raise ModelInputError(f"can keep between 1 and {modes.size} electric modes, got {count}")
        psi = modes.vectors[modes.active][:, :count]
        T = scipy.linalg.block_diag(np.eye(self.n_mech), psi)
        meta = dict(self.metadata, electric_coordinates="modal", electric_modes=count)
        return replace(self, M=T.T @ self.M @ T, C=T.T @ self.C @ T, K=T.T @ self.K @ T, metadata=meta)

    def power_balance(self, omega: float, force) -> tuple[float, float]:
        """(input power, dissipated power) for a dimensionless force vector at ``omega``."""
        f = np.asarray(force, dtype=complex)
        x = np.linalg.solve(self.dynamic_matrix(omega), f)
        v = 1j * omega * x
        p_in = float(np.real(np.vdot(v, f)))
        p_diss = float(np.real(np.vdot(v, 0.5 * (self.C + self.C.T) @ v)))
        return p_in, p_diss


def _damping_vector(zeta, count):
    if zeta is None:
        return np.zeros(count), False
    z = np.broadcast_to(np.asarray(zeta, dtype=float), (count,)).copy() if np.ndim(zeta) == 0 else np.asarray(zeta, dtype=float)
    if z.shape != (count,):
        raise ModelInputError(f"need 1 or {count} damping ratios, got {z.size}")
    if np.any(z < 0):
        raise ModelInputError("damping ratios must be >= 0")
    return z, bool(np.any(z > 0))


def from_modal_data(
    frequency_ratios,
    gamma,
    network: LatticeNetwork | None,
    c: float,
    omega1: float,
    zeta=None,
    tip=None,
    m_tot: float | None = None,
    basis: ModalBasis | None = None,
) -> CoupledSystem:
    """Build the system from modal quantities.

    ``network=None`` models every transducer short-circuited (no electric
    coordinates).  A network with neither ``R`` nor ``L`` leaves the
    transducers floating.
    """
    r = np.asarray(frequency_ratios, dtype=float)
    gamma = np.atleast_2d(np.asarray(gamma, dtype=float))
    N = len(r)
    if N < 1 or np.any(r <= 0):
        raise ModelInputError("frequency ratios must be positive")
    if gamma.shape[0] != N:
        raise ModelInputError(f"coupling table has {gamma.shape[0]} mode rows for {N} modes")
    if not c > 0 or not omega1 > 0:
        raise ModelInputError("c and omega1 must be positive")
    z, damped = _damping_vector(zeta, N)

    Mm, Km, Cm = np.eye(N), np.diag(r**2), np.diag(2 * z * r)
    meta = {
        "modes": N,
        "structural_damping": damped,
        "zeta": z.tolist(),
        "network": "short" if network is None else network.kind,
    }
    if damped:
        meta["note"] = "modal damping zeta is an extension beyond the undamped beam model"
    if network is None:
        M, C, K = Mm, Cm, Km
    else:
        if network.n != gamma.shape[1]:
            raise ModelInputError(f"network has {network.n} nodes, coupling table {gamma.shape[1]} columns")
        lattice = network.lattice()
        A = lattice.matrix
        G = gamma[:, lattice.active]
        Ke = A / (omega1**2 * network.L * c) if network.L is not None else np.zeros_like(A)
        De = A / (network.R * c * omega1) if network.R is not None else np.zeros_like(A)
        Me = np.diag(network.chi[lattice.active])
        M = scipy.linalg.block_diag(Mm, Me)
        K = scipy.linalg.block_diag(Km, Ke)
        C = scipy.linalg.block_diag(Cm, De)
        C[:N, N:] = G
        C[N:, :N] = -G.T
        meta.update(alpha0=network.alpha0, alpha_n=network.alpha_n, R=network.R, L=network.L)
        meta["electric_coordinates"] = "nodal"
    return CoupledSystem(
        M=M,
        C=C,
        K=K,
        n_mech=N,
        frequency_ratios=r,
        omega1=float(omega1),
        network=network,
        c=float(c),
        tip=None if tip is None else np.asarray(tip, dtype=float)[:N],
        m_tot=m_tot,
        basis=basis,
        metadata=meta,
    )


def assemble(
    basis: ModalBasis,
    couplings: CouplingTable,
    network: LatticeNetwork | None,
    zeta=None,
    modes: int | None = None,
) -> CoupledSystem:
    """Coupled system from a computed modal basis and its coupling table."""
    N = basis.count if modes is None else modes
    if N > basis.count or N > couplings.modes:
        raise ModelInputError(f"requested {N} modes; basis has {basis.count}, couplings {couplings.modes}")
    if network is not None and not np.allclose(network.chi, couplings.chi, rtol=1e-9, atol=0):
        raise ModelInputError("network capacitance ratios differ from the coupling table's")
    return from_modal_data(
        basis.frequencies[:N] / basis.omega1,
        couplings.gamma[:N],
        network,
        couplings.c,
        basis.omega1,
        zeta=zeta,
        tip=basis.tip[:N],
        m_tot=basis.m_tot,
        basis=basis,
    )


def _drive_vector(sys: CoupledSystem, drive) -> np.ndarray:
    f = np.zeros(sys.size)
    if drive is None:
        f[0] = 1.0
    elif isinstance(drive, (PointForce, DistributedForce, ActuatorDrive)):
        if sys.basis is None:
            raise ModelInputError("physical loads need a system assembled from a modal basis")
        # W0 = 1 m reference deflection
        f[: sys.n_mech] = modal_force(sys.basis, drive)[: sys.n_mech] / sys.omega1**2
    else:
        d = np.asarray(drive, dtype=float)
        if d.shape != (sys.n_mech,):
            raise ModelInputError(f"modal drive needs {sys.n_mech} entries, got shape {d.shape}")
        f[: sys.n_mech] = d
    return f


def _solve(sys: CoupledSystem, omega: np.ndarray, f: np.ndarray) -> np.ndarray:
    A = sys.dynamic_matrix(omega)
    rhs = np.broadcast_to(f.astype(complex), (len(omega), sys.size))[..., None]
    try:
        return np.linalg.solve(A, rhs)[..., 0]
    except np.linalg.LinAlgError:
        out = np.empty((len(omega), sys.size), dtype=complex)
        for k in range(len(omega)):
            try:
                out[k] = np.linalg.solve(A[k], rhs[k, :, 0])
            except np.linalg.LinAlgError:
                out[k] = complex(np.inf, np.inf)
        return out


def frequency_response(
    sys: CoupledSystem,
    drive=None,
    grid=None,
    output: str = "modal",
    mode: int = 0,
    hz: bool = False,
) -> FrequencyResponse:
    """Velocity response on ``grid``.

    ``drive`` is a physical load (needs a basis), a dimensionless modal force
    vector, or ``None`` for a unit first-mode modal force.  ``output="modal"``
    returns the dimensionless modal velocity of ``mode``; ``output="tip"``
    the physical tip velocity per unit load [m/s per N or per V].  With
    ``hz=True`` the grid is read and reported in Hz.
    """
    if grid is None:
        grid = np.linspace(3.0 / 4000, 3.0, 4001)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ModelInputError("frequency grid must be positive and strictly increasing")
    omega = grid * 2 * math.pi / sys.omega1 if hz else grid
    if sys.frequency_ratios[-1] < 1.5 * omega[-1] and sys.n_mech > 1:
        warnings.warn(
            f"highest retained mode (ratio {sys.frequency_ratios[-1]:.3g}) is within 1.5x of the "
            f"grid's top frequency ({omega[-1]:.3g}); results near the top may not be converged",
            RuntimeWarning,
            stacklevel=2,
        )
    f = _drive_vector(sys, drive)
    x = _solve(sys, omega, f)
    bounded = np.isfinite(x).all(axis=1)
    x = np.where(bounded[:, None], x, 0)
    if output == "modal":
        if not 0 <= mode < sys.n_mech:
            raise ModelInputError(f"mode index {mode} outside 0..{sys.n_mech - 1}")
        values = 1j * omega * x[:, mode]
        quantity = f"modal velocity (mode {mode + 1})"
    elif output == "tip":
        if sys.tip is None:
            raise ModelInputError("tip output needs mode shapes (physics-mode assembly)")
        values = 1j * omega * sys.omega1 * (x[:, : sys.n_mech] @ sys.tip)
        quantity = "tip velocity per unit load"
    else:
        raise ModelInputError(f"output must be 'modal' or 'tip', got {output!r}")
    values = np.where(bounded, values, complex(np.inf, np.inf))
    meta = dict(sys.metadata, omega1=sys.omega1, output=output)
    return FrequencyResponse(grid, values, units="hz" if hz else "dimensionless", quantity=quantity, metadata=meta)


@dataclass
class ComparisonTable:
    """Per-mode peak magnitudes and reductions relative to a baseline variant."""

    baseline: str
    rows: list[dict]

    def peak(self, variant: str, mode: int) -> float:
        for row in self.rows:
            if row["variant"] == variant and row["mode"] == mode:
                return row["peak"]
        raise KeyError((variant, mode))

    def reduction(self, variant: str, mode: int) -> float | None:
        for row in self.rows:
            if row["variant"] == variant and row["mode"] == mode:
                return row["reduction_pct"]
        raise KeyError((variant, mode))

    def to_csv(self) -> str:
        lines = ["variant,mode,frequency,peak,reduction_pct"]
        for r in self.rows:
            red = "undefined" if r["reduction_pct"] is None else f"{r['reduction_pct']:.6g}"
            lines.append(f"{r['variant']},{r['mode']},{r['frequency']:.10g},{r['peak']:.10g},{red}")
        return "\n".join(lines) + "\n"


def _band_peak(sys, f, lo, hi, output, points=2001):
    omega = np.linspace(lo, hi, points)
    x = _solve(sys, omega, f)

    def measure(xs, w):
        if output == "tip":
            return np.abs(1j * w * (xs[..., : sys.n_mech] @ sys.tip))
        return np.abs(1j * w * xs[..., 0])

    mag = measure(x, omega)
    i = int(np.argmax(mag))
    if 0 < i < points - 1:

        def neg(w):
            return -float(measure(np.linalg.solve(sys.dynamic_matrix(w), f.astype(complex)), w))

        try:
            res = minimize_scalar(neg, bracket=(omega[i - 1], omega[i], omega[i + 1]), method="golden", tol=1e-10)
            if -res.fun > mag[i]:
                return float(res.x), float(-res.fun)
        except ValueError:
            pass
    return float(omega[i]), float(mag[i])


def comparison_suite(
    variants: Mapping[str, CoupledSystem],
    baseline: str,
    drive=None,
    modes: int | None = None,
    band: float = 0.15,
    output: str = "modal",
) -> ComparisonTable:
    """Peak response around each beam resonance and percentage reduction vs ``baseline``.

    Frequency bands are ``r_i (1 +/- band)``, clipped halfway to neighbouring
    modes.  A conservative variant (no dissipation at all) has unbounded
    peaks; reductions against such a baseline are reported as undefined.
    """
    if baseline not in variants:
        raise ModelInputError(f"baseline {baseline!r} is not among the variants")
    base = variants[baseline]
    r = base.frequency_ratios
    count = len(r) if modes is None else min(modes, len(r))
    bands = []
    for i in range(count):
        lo, hi = r[i] * (1 - band), r[i] * (1 + band)
        if i > 0:
            lo = max(lo, 0.5 * (r[i - 1] + r[i]))
        if i + 1 < len(r):
            hi = min(hi, 0.5 * (r[i] + r[i + 1]))
        bands.append((lo, hi))

    peaks: dict[str, list[tuple[float, float]]] = {}
    for name, sys in variants.items():
        f = _drive_vector(sys, drive)
        if sys.is_conservative:
            peaks[name] = [(float(r[i]), math.inf) for i in range(count)]
        else:
            peaks[name] = [_band_peak(sys, f, lo, hi, output) for lo, hi in bands]

    rows = []
    for name in variants:
        for i in range(count):
            w, pk = peaks[name][i]
            ref = peaks[baseline][i][1]
            reduction = None if not math.isfinite(ref) or not math.isfinite(pk) else 100.0 * (1.0 - pk / ref)
            rows.append({"variant": name, "mode": i + 1, "frequency": w, "peak": pk, "reduction_pct": reduction})
    return ComparisonTable(baseline, rows)
