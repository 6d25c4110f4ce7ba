"""Glue between a :class:`ProjectConfig` and the numerical modules."""

from __future__ import annotations

import numpy as np

from .beam_modal import (
    ActuatorDrive,
    BeamAssembly,
    CouplingTable,
    ModalBasis,
    Patch,
    assemble_profile,
    compute_modes,
    coupling_matrix,
    laminate_properties,
)
from .config import PhysicsConfig, ProjectConfig
from .exceptions import ModelInputError


def build_assembly(phys: PhysicsConfig) -> BeamAssembly:
    """Laminate section model: each patch adds stiffness and mass over its length.

    The coupling coefficient is ``g = E_p d31 w_p z_p`` with ``z_p`` the patch
    mid-plane offset from the composite neutral axis.
    """
    if phys.n == 0 and phys.actuator_x is None:
        k = phys.E_beam * phys.width_beam * phys.thickness_beam**3 / 12
        rho = phys.density_beam * phys.width_beam * phys.thickness_beam
        return BeamAssembly(phys.length, k, rho)
    k_b, rho_b, k_p, rho_p, z_p = laminate_properties(
        phys.E_beam,
        phys.width_beam,
        phys.thickness_beam,
        phys.density_beam,
        phys.E_piezo,
        phys.width_piezo,
        phys.thickness_piezo,
        phys.density_piezo,
    )
    g = phys.E_piezo * phys.d31 * phys.width_piezo * z_p
    actuator = None
    if phys.actuator_x is not None:
        actuator = Patch(phys.actuator_x, phys.actuator_length, k_p, rho_p, g)
    if phys.n == 0:
        return BeamAssembly(phys.length, k_b, rho_b, (), actuator)
    return BeamAssembly.uniform_array(
        phys.length,
        k_b,
        rho_b,
        phys.n,
        phys.first_x,
        phys.pitch,
        phys.patch_length,
        k_p,
        rho_p,
        g,
        phys.capacitance,
        actuator,
    )


def physics_model(cfg: ProjectConfig, modes: int | None = None):
    """``(assembly, basis, couplings or None)`` from the physics section."""
    if cfg.physics is None:
        raise ModelInputError("this command needs a [physics] section in the configuration")
    assembly = build_assembly(cfg.physics)
    basis = compute_modes(
        assemble_profile(assembly), modes or cfg.solver.modes, cfg.solver.elements_per_segment
    )
    couplings = coupling_matrix(basis, assembly) if assembly.n > 0 else None
    return assembly, basis, couplings


def measured_table(cfg: ProjectConfig) -> CouplingTable:
    if cfg.measured is None:
        raise ModelInputError("measured mode needs a [measured] section in the configuration")
    m = cfg.measured
    return CouplingTable.measured(np.array(m.gamma_rows), np.array(m.capacitance), m.omega1)


def coupling_inputs(cfg: ProjectConfig, mode: str):
    """``(table, basis or None, assembly or None)`` for the requested input mode."""
    if mode == "measured":
        return measured_table(cfg), None, None
    if mode == "physics":
        assembly, basis, couplings = physics_model(cfg)
        if couplings is None:
            raise ModelInputError("physics configuration has no network transducers (n = 0)")
        return couplings, basis, assembly
    raise ModelInputError(f"mode must be 'physics' or 'measured', got {mode!r}")


def actuator_drive(assembly: BeamAssembly | None):
    if assembly is None or assembly.actuator is None:
        return None
    return ActuatorDrive.from_patch(assembly.actuator)


__all__ = ["build_assembly", "physics_model", "measured_table", "coupling_inputs", "actuator_drive", "ModalBasis"]
