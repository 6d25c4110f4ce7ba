import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pemdamp import datasets as ds
from pemdamp.beam_modal import (
    CANTILEVER_ROOTS,
    ActuatorDrive,
    BeamAssembly,
    CouplingTable,
    DistributedForce,
    Patch,
    PointForce,
    assemble_profile,
    cantilever_frequencies,
    compute_modes,
    coupling_matrix,
    modal_force,
)
from pemdamp.exceptions import ModelInputError

from .conftest import prototype_assembly, rel


def _gauss_integral(basis, f, a, b, points=6):
    """Integrate f(x) over [a, b] element by element (f returns (..., modes))."""
    xg, wg = np.polynomial.legendre.leggauss(points)
    total = 0.0
    for lo, hi in zip(basis.nodes[:-1], basis.nodes[1:]):
        lo, hi = max(lo, a), min(hi, b)
        if hi <= lo:
            continue
        xq = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        total = total + 0.5 * (hi - lo) * np.tensordot(wg, f(xq), axes=1)
    return total


class TestAssembly:
    def test_overlap_rejected(self):
        p1 = Patch(0.01, 0.05, 1.0, 0.1, 1e-3, 50e-9)
        p2 = Patch(0.05, 0.05, 1.0, 0.1, 1e-3, 50e-9)
        with pytest.raises(ModelInputError, match="overlap"):
            BeamAssembly(0.3, 1.0, 0.1, (p1, p2))

    def test_actuator_must_not_overlap(self):
        p1 = Patch(0.01, 0.05, 1.0, 0.1, 1e-3, 50e-9)
        act = Patch(0.03, 0.02, 1.0, 0.1, 1e-3)
        with pytest.raises(ModelInputError, match="actuator"):
            BeamAssembly(0.3, 1.0, 0.1, (p1,), act)

    def test_patch_outside_beam(self):
        with pytest.raises(ModelInputError, match="outside"):
            BeamAssembly(0.3, 1.0, 0.1, (Patch(0.28, 0.05, 1.0, 0.1, 1e-3, 50e-9),))

    @pytest.mark.parametrize("field", ["length", "k_beam", "rho_beam"])
    def test_nonpositive_properties(self, field):
        kwargs = {"length": 0.3, "k_beam": 1.0, "rho_beam": 0.1, field: 0.0}
        with pytest.raises(ModelInputError):
            BeamAssembly(**kwargs)

    def test_missing_capacitance(self):
        with pytest.raises(ModelInputError, match="capacitance"):
            BeamAssembly(0.3, 1.0, 0.1, (Patch(0.01, 0.05, 1.0, 0.1, 1e-3),))


class TestProfile:
    def test_bare_beam_is_uniform(self, uniform_beam):
        prof = assemble_profile(uniform_beam)
        assert prof.n_segments == 1
        x = np.linspace(0, uniform_beam.length, 17)
        assert np.all(prof.stiffness_at(x) == uniform_beam.k_beam)
        assert np.all(prof.density_at(x) == uniform_beam.rho_beam)

    def test_five_patches_give_eleven_segments(self):
        prof = assemble_profile(prototype_assembly(with_actuator=False))
        assert prof.n_segments == 11
        assert np.sum(prof.owner >= 0) == 5
        assert np.sum(prof.owner == -1) == 6

    def test_total_mass_hand_sum(self, assembly):
        geo = ds.TABLE3_GEOMETRY
        p = assembly.patches[0]
        covered = 6 * geo["l_p"]  # five network patches and the actuator
        expected = assembly.rho_beam * geo["l"] + p.rho_piezo * covered
        assert rel(assemble_profile(assembly).m_tot, expected) < 1e-13


class TestModes:
    def test_uniform_cantilever_closed_form(self, uniform_beam):
        basis = compute_modes(assemble_profile(uniform_beam), 3)
        exact = cantilever_frequencies(uniform_beam.k_beam, uniform_beam.rho_beam, uniform_beam.length)
        np.testing.assert_allclose(basis.frequencies, exact, rtol=1e-3)

    def test_cantilever_roots_solve_characteristic_equation(self):
        for r in CANTILEVER_ROOTS:
            assert abs(1 + math.cos(r) * math.cosh(r)) < 1e-9 * math.cosh(r)

    def test_prototype_first_frequency_near_measured(self, basis):
        # material constants are assumptions; only a loose match is expected
        assert rel(basis.omega1, ds.OMEGA1) < 0.05

    def test_mesh_refinement(self, assembly):
        prof = assemble_profile(assembly)
        coarse = compute_modes(prof, 3).frequencies
        fine = compute_modes(prof, 3, elements_per_segment=16).frequencies
        assert rel(coarse[0], fine[0]) < 1e-4
        assert np.all(np.abs(coarse / fine - 1) < 1e-3)

    def test_orthonormality(self, basis):
        assert basis.orthonormality_residual() < 1e-8

    def test_orthonormality_by_quadrature(self, basis):
        prof = basis.profile
        gram = _gauss_integral(
            basis,
            lambda x: prof.density_at(x)[:, None, None] * basis.deflection(x)[:, :, None] * basis.deflection(x)[:, None, :],
            0.0,
            basis.length,
        )
        np.testing.assert_allclose(gram / basis.m_tot, np.eye(basis.count), atol=1e-9)

    def test_clamp_and_ordering(self, basis):
        assert np.all(np.diff(basis.frequencies) > 0)
        np.testing.assert_array_equal(basis.deflection(0.0), 0.0)
        np.testing.assert_array_equal(basis.slope(0.0), 0.0)
        assert np.all(basis.tip > 0)

    def test_deterministic(self, assembly, basis):
        again = compute_modes(assemble_profile(assembly), 5)
        np.testing.assert_array_equal(again.shapes, basis.shapes)


class TestCoupling:
    def test_slope_difference_matches_quadrature(self, assembly, basis):
        table = coupling_matrix(basis, assembly)
        for j, p in enumerate(assembly.patches):
            # curvature is linear on each element: 6-point Gauss is exact
            integral = _gauss_integral(basis, basis.curvature, p.x, p.end)
            np.testing.assert_allclose(table.G[:, j], p.g * integral, rtol=1e-9)

    def test_gamma_consistent_with_G(self, assembly, basis):
        t = coupling_matrix(basis, assembly)
        np.testing.assert_allclose(t.gamma, t.G / (t.omega1 * math.sqrt(t.c * t.m_tot)), rtol=1e-14)
        assert t.c == pytest.approx(np.mean(assembly.capacitances))

    def test_shrinking_patch_coupling_vanishes(self, uniform_beam):
        # a vanishing, massless patch on an unchanged beam
        basis = compute_modes(assemble_profile(uniform_beam), 3)
        g, x0 = 1e-3, 0.1
        values = []
        for length in (1e-2, 1e-3, 1e-4, 1e-5):
            values.append(abs(g * (basis.slope(x0 + length) - basis.slope(x0))[0]))
        assert values == sorted(values, reverse=True)
        assert values[-1] < 2e-3 * values[0]

    def test_measured_mode_injects_table(self):
        t = CouplingTable.measured(ds.TABLE1_GAMMA_AS_PRINTED, ds.TABLE2_CAPACITANCE, ds.OMEGA1)
        np.testing.assert_array_equal(t.gamma[0], np.array([122, 9.54, 5.77, 2.98, 0.083]) * 1e-3)
        np.testing.assert_allclose(t.chi.mean(), 1.0, rtol=1e-15)

    def test_measured_shape_mismatch(self):
        with pytest.raises(ModelInputError):
            CouplingTable.measured([0.1, 0.2], [1e-9, 1e-9, 1e-9], 100.0)

    def test_basis_from_other_assembly_rejected(self, basis, uniform_beam):
        with pytest.raises(ModelInputError):
            coupling_matrix(basis, prototype_assembly(with_actuator=False))


class TestLoads:
    def test_force_at_clamp_is_zero(self, basis):
        np.testing.assert_array_equal(modal_force(basis, PointForce(0.0)), 0.0)

    def test_unit_tip_force(self, basis):
        np.testing.assert_allclose(modal_force(basis, PointForce(basis.length)), basis.tip / basis.m_tot)

    def test_actuator_matches_quadrature(self, basis, assembly):
        act = assembly.actuator
        drive = ActuatorDrive.from_patch(act, voltage=2.5)
        integral = _gauss_integral(basis, basis.curvature, act.x, act.end)
        np.testing.assert_allclose(modal_force(basis, drive), act.g * 2.5 * integral / basis.m_tot, rtol=1e-9)

    def test_uniform_distributed_load(self, basis):
        integral = _gauss_integral(basis, basis.deflection, 0.0, basis.length)
        got = modal_force(basis, DistributedForce(lambda x: 3.0 * np.ones_like(x)))
        np.testing.assert_allclose(got, 3.0 * integral / basis.m_tot, rtol=1e-12)

    def test_load_outside_beam(self, basis):
        with pytest.raises(ModelInputError):
            modal_force(basis, PointForce(2 * basis.length))

    @given(st.floats(0.0, 1.0), st.floats(0.1, 10.0))
    def test_point_force_linearity(self, basis, s, a):
        x = s * basis.length
        np.testing.assert_allclose(
            modal_force(basis, PointForce(x, a)), a * modal_force(basis, PointForce(x)), rtol=1e-12, atol=1e-300
        )
