import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from pemdamp import datasets as ds
from pemdamp.electric_network import (
    LatticeNetwork,
    alpha_from_scale,
    boundary_scale,
    build_lattice_matrix,
    electric_modes,
    first_eigenvalue_asymptotic,
    network_modes,
)
from pemdamp.exceptions import ModelInputError


def chain_lambda1(n):
    """Closed form for an open/shorted chain: node n grounded, m = n - 1 free nodes."""
    m = n - 1
    return 4 * math.sin(math.pi / (2 * (2 * m + 1))) ** 2


def penalty_matrix(n, a0, an):
    """Full n x n matrix with finite end diagonals (no node elimination)."""
    N = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    N[0, 0] = 2 / (1 + a0)
    N[-1, -1] = 2 / (1 + an)
    return N


class TestMatrix:
    def test_two_nodes_matched(self):
        np.testing.assert_array_equal(build_lattice_matrix(2, 0, 0).matrix, [[2, -1], [-1, 2]])

    def test_open_shorted_five(self):
        lat = build_lattice_matrix(5, 1.0, -1.0)
        expected = [[1, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]
        np.testing.assert_array_equal(lat.matrix, expected)
        np.testing.assert_array_equal(lat.active, [True, True, True, True, False])

    def test_floating_line(self):
        m = build_lattice_matrix(4, 1.0, 1.0).matrix
        assert m[0, 0] == 1 and m[-1, -1] == 1

    def test_rejects_bad_inputs(self):
        with pytest.raises(ModelInputError):
            build_lattice_matrix(1, 0, 0)
        with pytest.raises(ModelInputError):
            build_lattice_matrix(2, -1, -1)
        with pytest.raises(ModelInputError):
            build_lattice_matrix(3, 1.5, 0)

    @given(st.integers(2, 12), st.floats(-0.99, 1.0), st.floats(-0.99, 1.0))
    def test_symmetric_psd(self, n, a0, an):
        m = build_lattice_matrix(n, a0, an).matrix
        np.testing.assert_array_equal(m, m.T)
        assert np.linalg.eigvalsh(m).min() > -1e-12

    def test_positive_definite_with_grounding(self):
        assert np.linalg.eigvalsh(build_lattice_matrix(6, 1.0, 0.3).matrix).min() > 0


class TestBoundaryScale:
    def test_limits(self):
        assert boundary_scale(1.0) == math.inf
        assert boundary_scale(-1.0) == 0.0
        assert boundary_scale(0.0) == 1.0

    @given(st.floats(-1.0, 0.999))
    def test_round_trip(self, a):
        assert alpha_from_scale(boundary_scale(a)) == pytest.approx(a, abs=1e-12)


class TestModes:
    def test_two_node_floating(self):
        modes = electric_modes(build_lattice_matrix(2, 1.0, 1.0), np.ones(2))
        np.testing.assert_allclose(modes.eigenvalues, [0.0, 2.0], atol=1e-14)
        np.testing.assert_allclose(modes.first, np.full(2, 1 / math.sqrt(2)))

    @pytest.mark.parametrize("n", [2, 3, 5, 10, 50, 200])
    def test_chain_closed_form(self, n):
        modes = electric_modes(build_lattice_matrix(n, 1.0, -1.0), np.ones(n))
        assert modes.lambda1 == pytest.approx(chain_lambda1(n), rel=1e-12)

    def test_prototype_against_nonsymmetric_solver(self):
        chi = ds.TABLE2_CAPACITANCE / ds.TABLE2_CAPACITANCE.mean()
        lat = build_lattice_matrix(5, 1.0, -1.0)
        modes = electric_modes(lat, chi)
        ref = np.sort(scipy.linalg.eig(lat.matrix, np.diag(chi[:4]), right=False).real)
        np.testing.assert_allclose(modes.eigenvalues, ref, rtol=1e-12)
        assert modes.lambda1 == pytest.approx(0.121222, abs=1e-6)

    def test_elimination_is_the_penalty_limit(self):
        chi = ds.TABLE2_CAPACITANCE / ds.TABLE2_CAPACITANCE.mean()
        limit = electric_modes(build_lattice_matrix(5, 1.0, -1.0), chi).lambda1
        an = -1 + 1e-9
        N = penalty_matrix(5, 1.0, an)
        lam = scipy.linalg.eigh(N, np.diag(chi), eigvals_only=True)[0]
        assert lam == pytest.approx(limit, abs=1e-6)
        # continuity: approaching from a sequence
        prev = None
        for eps in (1e-1, 1e-2, 1e-3, 1e-4):
            cur = electric_modes(build_lattice_matrix(5, 1.0, -1 + eps), chi).lambda1
            if prev is not None:
                assert abs(cur - limit) < abs(prev - limit)
            prev = cur

    @given(
        st.integers(2, 12),
        st.floats(-1.0, 1.0),
        st.floats(-0.99, 1.0),
        st.lists(st.floats(0.3, 3.0), min_size=12, max_size=12),
    )
    def test_residual_normalization_sign(self, n, a0, an, raw):
        chi = np.array(raw[:n])
        chi /= chi.mean()
        lat = build_lattice_matrix(n, a0, an)
        modes = electric_modes(lat, chi)
        psi = modes.vectors[lat.active]
        B = np.diag(chi[lat.active])
        assert np.all(modes.eigenvalues >= 0)
        resid = lat.matrix @ psi - B @ psi * modes.eigenvalues
        assert np.max(np.abs(resid)) < 1e-10 * max(1.0, np.abs(psi).max())
        np.testing.assert_allclose(psi.T @ B @ psi, np.eye(lat.size), atol=1e-10)
        idx = np.argmax(np.abs(psi), axis=0)
        assert np.all(psi[idx, np.arange(lat.size)] > 0)
        np.testing.assert_array_equal(modes.vectors[~lat.active], 0.0)


class TestAsymptotics:
    def test_n100(self):
        assert first_eigenvalue_asymptotic(100) == pytest.approx(2.467e-4, rel=1e-3)

    def test_n5_far_from_estimate(self):
        exact = electric_modes(build_lattice_matrix(5, 1.0, -1.0), np.ones(5)).lambda1
        est = first_eigenvalue_asymptotic(5)
        assert est == pytest.approx(0.0987, abs=1e-4)
        assert abs(exact / est - 1) > 0.1

    def test_error_is_first_order_in_one_over_n(self):
        errs = []
        for n in (25, 50, 100, 200):
            exact = electric_modes(build_lattice_matrix(n, 1.0, -1.0), np.ones(n)).lambda1
            errs.append(exact / first_eigenvalue_asymptotic(n) - 1)
        ratios = np.array(errs[:-1]) / np.array(errs[1:])
        np.testing.assert_allclose(ratios, 2.0, rtol=0.03)
        assert errs[1] == pytest.approx(0.02022, abs=1e-5)

    def test_lambda1_decreases_with_n(self):
        lam = [electric_modes(build_lattice_matrix(n, 1.0, -1.0), np.ones(n)).lambda1 for n in range(2, 40)]
        assert np.all(np.diff(lam) < 0)
        assert max(lam) <= 1.0


class TestNetwork:
    def test_chi_must_average_one(self):
        with pytest.raises(ModelInputError, match="average"):
            LatticeNetwork(3, 0, 0, np.array([1.0, 1.0, 1.1]))

    def test_from_capacitances_and_kind(self):
        net = LatticeNetwork.from_capacitances(ds.TABLE2_CAPACITANCE, 1.0, -1.0, R=1e3, L=2.0)
        assert net.kind == "rl"
        assert LatticeNetwork.from_capacitances([1, 2], 0, 0, R=1.0).kind == "r"
        assert LatticeNetwork.from_capacitances([1, 2], 0, 0).kind == "open"
        b = net.boundary_elements()
        assert b["R0"] == math.inf and b["Rn"] == 0.0 and b["L0"] == math.inf and b["Ln"] == 0.0

    def test_network_modes_match(self):
        net = LatticeNetwork.from_capacitances(ds.TABLE2_CAPACITANCE, 1.0, -1.0)
        assert network_modes(net).lambda1 == electric_modes(net.lattice(), net.chi).lambda1
