"""Tests for potentials, discretized operators, the potential metric,
and resolvent diagnostics.

Oracles used here are independent of the package internals: the cosine
form of the Dirichlet second-difference spectrum, dense matrices built
by explicit loops, scipy.linalg.expm for semigroup evolution, and
numpy.linalg solves for resolvents.
"""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from semistab import (
    AtomicMeasure,
    DomainError,
    InvariantViolation,
    MultiplicationModel,
    ResourceCapError,
    constant_potential,
    discretize,
    exp_well,
    gaussian_well,
    laplace_norm_sq,
    load_potential,
    metric_d,
    potential_from_text,
    potential_to_text,
    resolvent_apply,
    resolvent_gap,
    sampled_potential,
    save_potential,
    shift_potential,
    spectral_measure,
    spectrum_to_csv,
    square_well,
    truncate_potential,
)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def oracle_dirichlet_1d(n, h):
    """Dirichlet second-difference spectrum via the cosine identity.

    (2/h^2)(cos(j pi/(n+1)) - 1), j = 1..n, descending -- algebraically
    equal to the sine-squared form but computed differently.
    """
    j = np.arange(1, n + 1, dtype=float)
    vals = (2.0 / (h * h)) * (np.cos(j * math.pi / (n + 1)) - 1.0)
    return np.sort(vals)[::-1]


def oracle_dense_matrix(V, L, h):
    """Dense matrix of Lap_h + diag(V) on the interior grid, built by loops."""
    cells = round(2.0 * L / h)
    n = cells - 1
    xs = -L + h * np.arange(1, n + 1)
    inv_h2 = 1.0 / (h * h)
    if V.nu == 1:
        H = np.zeros((n, n))
        for i in range(n):
            H[i, i] = -2.0 * inv_h2 + float(V.eval(xs[i : i + 1])[0])
            if i + 1 < n:
                H[i, i + 1] = inv_h2
                H[i + 1, i] = inv_h2
        return H
    N = n * n
    H = np.zeros((N, N))
    for i in range(n):
        for j in range(n):
            p = i * n + j
            H[p, p] = -4.0 * inv_h2 + float(V.eval(np.array([[xs[i], xs[j]]]))[0])
            if i + 1 < n:
                H[p, p + n] = inv_h2
                H[p + n, p] = inv_h2
            if j + 1 < n:
                H[p, p + 1] = inv_h2
                H[p + 1, p] = inv_h2
    return H


def random_sampled_potential(rng):
    values = -rng.uniform(0.0, 1.0, 61)
    return sampled_potential(values, -30.0, 30.0, nu=1, a_bound=1.0)


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------


class TestDiscretize:
    def test_free_laplacian_matches_closed_form(self):
        op = discretize(constant_potential(0.0), L=10.0, h=0.1)
        assert op.N == 199
        expected = oracle_dirichlet_1d(199, 0.1)
        assert np.allclose(op.eigenvalues, expected, rtol=1e-9, atol=1e-12)

    def test_constant_well_shifts_spectrum_exactly(self):
        free = discretize(constant_potential(0.0), L=5.0, h=0.25)
        well = discretize(constant_potential(-0.7), L=5.0, h=0.25)
        assert np.allclose(well.eigenvalues, free.eigenvalues - 0.7, rtol=0, atol=1e-10)

    def test_2d_free_spectrum_is_tensor_sum(self):
        op = discretize(constant_potential(0.0, nu=2), L=4.5, h=1.0)
        assert op.n_side == 8 and op.N == 64
        one_d = oracle_dirichlet_1d(8, 1.0)
        sums = np.sort((one_d[:, None] + one_d[None, :]).ravel())[::-1]
        assert np.allclose(op.eigenvalues, sums, rtol=1e-9, atol=1e-12)

    def test_2d_matches_dense_loop_oracle(self):
        V = gaussian_well(depth=0.8, width=1.3, nu=2)
        op = discretize(V, L=2.0, h=0.5)
        H = oracle_dense_matrix(V, 2.0, 0.5)
        expected = np.sort(np.linalg.eigvalsh(H))[::-1]
        assert np.allclose(op.eigenvalues, expected, rtol=1e-10, atol=1e-12)

    def test_eigenvalues_sorted_descending_and_negative(self):
        op = discretize(gaussian_well(), L=5.0, h=0.25)
        assert np.all(np.diff(op.eigenvalues) <= 0)
        assert np.all(op.eigenvalues < 0)

    def test_grid_endpoints(self):
        op = discretize(constant_potential(0.0), L=2.0, h=0.25)
        assert op.grid[0] == pytest.approx(-1.75)
        assert op.grid[-1] == pytest.approx(1.75)

    def test_eigenpairs_verified_against_dense_matrix(self):
        V = exp_well(depth=0.5, width=2.0)
        op = discretize(V, L=5.0, h=0.5)
        H = oracle_dense_matrix(V, 5.0, 0.5)
        resid = H @ op.eigenvectors - op.eigenvectors * op.eigenvalues[None, :]
        scale = np.max(np.abs(op.eigenvalues))
        assert np.max(np.linalg.norm(resid, axis=0)) <= 1e-9 * scale
        gram = op.eigenvectors.T @ op.eigenvectors
        assert np.max(np.abs(gram - np.eye(op.N))) <= 1e-10

    def test_noninteger_cell_count_rejected(self):
        with pytest.raises(DomainError):
            discretize(constant_potential(0.0), L=1.0, h=0.3)

    def test_too_few_cells_rejected(self):
        with pytest.raises(DomainError):
            discretize(constant_potential(0.0), L=1.0, h=0.5)

    def test_grid_cap_enforced(self):
        with pytest.raises(ResourceCapError):
            discretize(constant_potential(0.0, nu=2), L=3.1, h=0.1)

    def test_bad_geometry_rejected(self):
        with pytest.raises(DomainError):
            discretize(constant_potential(0.0), L=-1.0, h=0.1)

    @pytest.mark.parametrize("nu", [1, 2])
    def test_random_potentials_give_negative_spectra(self, nu):
        rng = np.random.default_rng(2024_0 + nu)
        for _ in range(50):
            pick = rng.integers(0, 4)
            depth = float(rng.uniform(0.1, 3.0))
            width = float(rng.uniform(0.3, 4.0))
            if pick == 0:
                V = gaussian_well(depth, width, nu=nu)
            elif pick == 1:
                V = exp_well(depth, width, nu=nu)
            elif pick == 2:
                V = square_well(depth, width, nu=nu)
            else:
                V = constant_potential(-depth, nu=nu)
            if nu == 1:
                op = discretize(V, L=5.0, h=0.5)
            else:
                op = discretize(V, L=2.0, h=0.5)
            scale = np.max(np.abs(op.eigenvalues))
            assert np.all(op.eigenvalues <= 1e-10 * scale)


class TestPotentialConstruction:
    def test_positive_constant_rejected(self):
        with pytest.raises(InvariantViolation):
            constant_potential(0.5)

    def test_sampled_above_zero_rejected(self):
        with pytest.raises(InvariantViolation):
            sampled_potential([0.0, 0.2, -0.1], -1.0, 1.0)

    def test_sampled_below_negative_a_rejected(self):
        with pytest.raises(InvariantViolation):
            sampled_potential([-1.0, -0.2, 0.0], -1.0, 1.0, a_bound=0.5)

    def test_bad_shape_parameters_rejected(self):
        with pytest.raises(DomainError):
            gaussian_well(depth=-1.0)
        with pytest.raises(DomainError):
            exp_well(width=0.0)
        with pytest.raises(DomainError):
            square_well(radius=-2.0)

    def test_nu_must_be_one_or_two(self):
        with pytest.raises(DomainError):
            constant_potential(0.0, nu=3)

    def test_sampled_2d_needs_square_count(self):
        with pytest.raises(DomainError):
            sampled_potential(np.zeros(10), -1.0, 1.0, nu=2)

    def test_sampled_2d_interpolates_its_samples(self):
        rng = np.random.default_rng(5)
        vals = -rng.uniform(0.0, 1.0, 25)
        V = sampled_potential(vals, -2.0, 2.0, nu=2, a_bound=1.0)
        grid = np.linspace(-2.0, 2.0, 5)
        pts = np.stack(np.meshgrid(grid, grid, indexing="ij"), axis=-1).reshape(-1, 2)
        assert np.allclose(V.eval(pts), vals, rtol=0, atol=1e-12)


# ---------------------------------------------------------------------------
# spectral measures of vectors
# ---------------------------------------------------------------------------


class TestSpectralMeasure:
    def setup_method(self):
        self.op = discretize(gaussian_well(), L=5.0, h=0.25)
        rng = np.random.default_rng(31415)
        x = rng.uniform(-1.0, 1.0, self.op.N)
        self.x = x / np.linalg.norm(x)
        self.mu = spectral_measure(self.op, self.x)

    def test_mass_equals_norm_squared(self):
        norm_sq = float(self.x @ self.x)
        assert abs(self.mu.mass - norm_sq) <= 1e-12 * norm_sq

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_laplace_matches_matrix_exponential(self, t):
        H = oracle_dense_matrix(self.op.potential, self.op.L, self.op.h)
        u_t = expm(t * H) @ self.x
        expected = float(u_t @ u_t)
        got = laplace_norm_sq(self.mu, t)
        assert abs(got - expected) <= 1e-10 * expected

    def test_atoms_have_positive_weight_and_negative_position(self):
        assert np.all(self.mu.weights > 0)
        assert np.all(self.mu.positions <= 0)
        assert self.mu.n_atoms <= self.op.N

    def test_wrong_length_rejected(self):
        with pytest.raises(DomainError):
            spectral_measure(self.op, np.ones(7))

    def test_zero_vector_rejected(self):
        with pytest.raises(DomainError):
            spectral_measure(self.op, np.zeros(self.op.N))


# ---------------------------------------------------------------------------
# the metric on potentials
# ---------------------------------------------------------------------------


class TestMetric:
    def test_zero_versus_minus_one(self):
        V = constant_potential(0.0, a_bound=1.0)
        U = constant_potential(-1.0)
        for J, tol in ((10, 2e-3), (20, 1e-5)):
            d = metric_d(V, U, J=J, tail_tol=tol)
            assert float(d) == 2.0 - 2.0 ** (-J)

    def test_tiny_constant_gap(self):
        c = 2.0 ** (-25)
        V = constant_potential(0.0, a_bound=1.0)
        U = constant_potential(-c, a_bound=1.0)
        d = metric_d(V, U, J=20, tail_tol=1e-5)
        assert float(d) == 21 * c

    def test_metric_of_potential_with_itself_is_zero(self):
        V = gaussian_well()
        assert float(metric_d(V, V)) == 0.0

    def test_symmetry(self):
        rng = np.random.default_rng(97531)
        V = random_sampled_potential(rng)
        U = random_sampled_potential(rng)
        assert float(metric_d(V, U)) == float(metric_d(U, V))

    def test_triangle_inequality_on_random_triples(self):
        rng = np.random.default_rng(13579)
        pool = [random_sampled_potential(rng) for _ in range(12)]
        checked = 0
        while checked < 100:
            i, j, k = rng.integers(0, len(pool), 3)
            if i == j or j == k or i == k:
                continue
            d_ik = float(metric_d(pool[i], pool[k], J=12, tail_tol=5e-4))
            d_ij = float(metric_d(pool[i], pool[j], J=12, tail_tol=5e-4))
            d_jk = float(metric_d(pool[j], pool[k], J=12, tail_tol=5e-4))
            assert d_ik <= d_ij + d_jk + 1e-12
            checked += 1

    def test_truncation_distances_decrease_to_zero(self):
        V = exp_well(depth=1.0, width=1.0)
        dists = [float(metric_d(truncate_potential(V, k), V)) for k in range(1, 11)]
        for a, b in zip(dists, dists[1:]):
            assert b <= a + 1e-15
        assert dists[-1] < 1e-3
        assert dists[-1] < dists[0]

    def test_tail_attributes(self):
        d = metric_d(constant_potential(0.0, a_bound=1.0), constant_potential(-1.0))
        assert d.J == 20
        assert d.tail_bound == 2.0 ** (-20)
        assert len(d.terms) == 21

    def test_insufficient_truncation_depth_rejected(self):
        V = constant_potential(0.0, a_bound=1.0)
        with pytest.raises(DomainError):
            metric_d(V, V, J=3, tail_tol=1e-5)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DomainError):
            metric_d(gaussian_well(nu=1), gaussian_well(nu=2))

    def test_bound_mismatch_rejected(self):
        with pytest.raises(DomainError):
            metric_d(gaussian_well(depth=1.0), gaussian_well(depth=2.0))


# ---------------------------------------------------------------------------
# approximation sequences
# ---------------------------------------------------------------------------


class TestApproximationSequences:
    def test_shift_of_zero_is_minus_half(self):
        V = constant_potential(0.0, a_bound=1.0)
        W = shift_potential(V, 1)
        xs = np.linspace(-50.0, 50.0, 101)
        assert np.all(W.eval(xs) == -0.5)

    def test_constant_at_minus_a_is_a_fixed_point(self):
        V = constant_potential(-1.0)
        for l in (1, 2, 5, 17):
            W = shift_potential(V, l)
            xs = np.linspace(-10.0, 10.0, 41)
            assert np.max(np.abs(W.eval(xs) + 1.0)) <= 1e-15

    @pytest.mark.parametrize("l", [1, 5, 50])
    def test_shift_supremum_is_strictly_negative(self, l):
        V = gaussian_well()
        W = shift_potential(V, l)
        rng = np.random.default_rng(8675309)
        pts = rng.uniform(-100.0, 100.0, 10_000)
        assert np.max(W.eval(pts)) <= -V.a_bound / (l + 1) + 1e-15

    def test_truncation_zero_outside_ball_and_exact_inside(self):
        V = exp_well()
        W = truncate_potential(V, 3)
        inside = np.linspace(-2.99, 2.99, 51)
        outside = np.array([-10.0, -3.0, 3.0, 7.5])
        assert np.all(W.eval(inside) == V.eval(inside))
        assert np.all(W.eval(outside) == 0.0)

    def test_truncation_preserves_a_bound(self):
        V = gaussian_well(depth=2.5)
        assert truncate_potential(V, 4).a_bound == V.a_bound

    def test_invalid_indices_rejected(self):
        V = gaussian_well()
        with pytest.raises(DomainError):
            truncate_potential(V, 0)
        with pytest.raises(DomainError):
            shift_potential(V, 0)
        with pytest.raises(DomainError):
            shift_potential(V, 1.5)

    def test_shift_level_must_match_bound(self):
        V = gaussian_well(depth=1.0)
        with pytest.raises(DomainError):
            shift_potential(V, 2, a=0.5)


# ---------------------------------------------------------------------------
# resolvent diagnostics
# ---------------------------------------------------------------------------


class TestResolvent:
    def setup_method(self):
        self.V = gaussian_well()
        self.op = discretize(self.V, L=5.0, h=0.25)
        rng = np.random.default_rng(24680)
        self.u = rng.uniform(-1.0, 1.0, self.op.N)

    def test_matches_dense_complex_solve(self):
        H = oracle_dense_matrix(self.V, 5.0, 0.25)
        expected = np.linalg.solve(1j * np.eye(self.op.N) - H, self.u.astype(complex))
        got = resolvent_apply(self.op, self.u)
        norm_u = np.linalg.norm(self.u)
        assert np.linalg.norm(got - expected) <= 1e-10 * norm_u

    def test_matches_dense_solve_2d(self):
        V = square_well(depth=1.0, radius=1.0, nu=2)
        op = discretize(V, L=2.0, h=0.5)
        rng = np.random.default_rng(1122)
        u = rng.uniform(-1.0, 1.0, op.N)
        H = oracle_dense_matrix(V, 2.0, 0.5)
        expected = np.linalg.solve(1j * np.eye(op.N) - H, u.astype(complex))
        assert np.linalg.norm(resolvent_apply(op, u) - expected) <= 1e-10 * np.linalg.norm(u)

    def test_resolvent_is_a_contraction(self):
        rng = np.random.default_rng(555)
        for _ in range(5):
            u = rng.uniform(-1.0, 1.0, self.op.N)
            w = resolvent_apply(self.op, u)
            assert np.linalg.norm(w) <= np.linalg.norm(u) * (1 + 1e-12)

    def test_residual_below_tolerance(self):
        H = oracle_dense_matrix(self.V, 5.0, 0.25)
        w = resolvent_apply(self.op, self.u)
        resid = self.u - (1j * w - H @ w)
        assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(self.u)

    def test_truncation_gap_bounded_and_vanishing(self):
        op_full = discretize(self.V, L=10.0, h=0.25)
        rng = np.random.default_rng(77)
        u = rng.uniform(-1.0, 1.0, op_full.N)
        rhs_prev = math.inf
        for k in range(1, 7):
            op_k = discretize(truncate_potential(self.V, k), L=10.0, h=0.25)
            lhs, rhs = resolvent_gap(op_k, op_full, u)
            assert lhs <= rhs + 1e-9
            assert rhs <= rhs_prev + 1e-15
            rhs_prev = rhs
        assert rhs_prev <= 1e-12 * np.linalg.norm(u)
        assert lhs <= 1e-9

    def test_shift_gap_bounded_and_shrinking(self):
        op_full = discretize(self.V, L=10.0, h=0.25)
        rng = np.random.default_rng(78)
        u = rng.uniform(-1.0, 1.0, op_full.N)
        rhs_values = []
        for l in range(1, 21):
            op_l = discretize(shift_potential(self.V, l), L=10.0, h=0.25)
            lhs, rhs = resolvent_gap(op_l, op_full, u)
            assert lhs <= rhs + 1e-9
            rhs_values.append(rhs)
        assert rhs_values[-1] < rhs_values[0] / 5

    def test_small_metric_implies_small_resolvent_gap(self):
        V = self.V
        W = truncate_potential(V, 5)
        assert float(metric_d(W, V)) < 1e-6
        op_full = discretize(V, L=10.0, h=0.25)
        op_trunc = discretize(W, L=10.0, h=0.25)
        rng = np.random.default_rng(79)
        u = rng.uniform(-1.0, 1.0, op_full.N)
        lhs, _ = resolvent_gap(op_trunc, op_full, u)
        assert lhs < 1e-9

    def test_grid_mismatch_rejected(self):
        other = discretize(self.V, L=5.0, h=0.5)
        with pytest.raises(DomainError):
            resolvent_gap(other, self.op, np.ones(self.op.N))


class TestGapShrinkage:
    def test_top_eigenvalue_magnitude_nonincreasing_in_box_size(self):
        V = square_well(depth=1.0, radius=1.0)
        mags = []
        for L in (10.0, 20.0, 40.0):
            op = discretize(V, L=L, h=0.25)
            mags.append(abs(op.lambda_max))
        assert mags[1] <= mags[0] + 1e-12
        assert mags[2] <= mags[1] + 1e-12


# ---------------------------------------------------------------------------
# exact multiplication model
# ---------------------------------------------------------------------------


class TestMultiplicationModel:
    def test_monomial_norm_and_measure_mass_agree(self):
        model = MultiplicationModel("monomial", {"delta": 0.75})
        assert model.norm_sq == pytest.approx(0.4, rel=1e-15)
        mu = model.spectral_measure()
        assert mu.mass == pytest.approx(model.norm_sq, rel=1e-12)

    def test_monomial_ball_mass_closed_form(self):
        model = MultiplicationModel("monomial", {"delta": 0.6})
        mu = model.spectral_measure()
        p = 2 * 0.6 + 1
        for eps in (1e-4, 0.03, 0.7):
            assert mu.ball_mass(eps) == pytest.approx(eps ** p / p, rel=1e-12)

    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_indicator_laplace_closed_form(self, t):
        model = MultiplicationModel("indicator", {"y_lo": 1.0, "y_hi": 3.0})
        mu = model.spectral_measure()
        expected = (math.exp(-2.0 * t) - math.exp(-6.0 * t)) / (2.0 * t)
        assert laplace_norm_sq(mu, t) == pytest.approx(expected, rel=1e-10)

    def test_profile_values(self):
        model = MultiplicationModel("monomial", {"delta": 2.0})
        y = np.array([0.0, 0.5, 1.0, 1.5])
        assert np.allclose(model.profile(y), [0.0, 0.25, 1.0, 0.0])

    def test_invalid_profiles_rejected(self):
        with pytest.raises(DomainError):
            MultiplicationModel("monomial", {"delta": 0.0})
        with pytest.raises(DomainError):
            MultiplicationModel("indicator", {"y_lo": 3.0, "y_hi": 1.0})
        with pytest.raises(DomainError):
            MultiplicationModel("spline", {})


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


class TestPotentialSerialization:
    def _round_trip(self, V):
        W = potential_from_text(potential_to_text(V))
        assert W.kind == V.kind
        assert W.nu == V.nu
        assert W.a_bound == V.a_bound
        rng = np.random.default_rng(404)
        pts = rng.uniform(-20.0, 20.0, 200) if V.nu == 1 else rng.uniform(-20.0, 20.0, (200, 2))
        assert np.array_equal(W.eval(pts), V.eval(pts))
        return W

    def test_closed_form_round_trips(self):
        self._round_trip(constant_potential(-0.3))
        self._round_trip(gaussian_well(depth=1.7, width=0.9))
        self._round_trip(exp_well(depth=0.4, width=3.0, nu=2))
        self._round_trip(square_well(depth=2.0, radius=1.5))

    def test_sampled_round_trips(self):
        rng = np.random.default_rng(808)
        self._round_trip(sampled_potential(-rng.uniform(0, 1, 17), -4.0, 4.0, a_bound=1.0))
        self._round_trip(sampled_potential(-rng.uniform(0, 1, 16), -2.0, 2.0, nu=2, a_bound=1.0))

    def test_nested_wrapper_round_trips(self):
        V = truncate_potential(shift_potential(gaussian_well(nu=2), 3), 5)
        W = self._round_trip(V)
        assert W.base.kind == "shifted"
        assert W.base.base.kind == "gaussian-well"

    def test_file_round_trip(self, tmp_path):
        V = shift_potential(exp_well(depth=1.2), 4)
        path = tmp_path / "well.potential"
        save_potential(V, path)
        W = load_potential(path)
        assert W.params == V.params
        assert W.base.params == V.base.params

    def test_malformed_text_rejected(self):
        with pytest.raises(DomainError):
            potential_from_text("measure atomic n=1\n")
        with pytest.raises(DomainError):
            potential_from_text("")

    def test_spectrum_csv_round_trips_eigenvalues(self, tmp_path):
        op = discretize(gaussian_well(), L=2.0, h=0.25)
        path = tmp_path / "spectrum.csv"
        spectrum_to_csv(op, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "index,eigenvalue"
        assert len(lines) == op.N + 1
        parsed = np.array([float(ln.split(",")[1]) for ln in lines[1:]])
        assert np.array_equal(parsed, op.eigenvalues)
        indices = [int(ln.split(",")[0]) for ln in lines[1:]]
        assert indices == list(range(op.N))
