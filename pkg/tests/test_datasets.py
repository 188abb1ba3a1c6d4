"""Tests for the synthetic data generators and their field definitions."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from lagtime.datasets import (
    QUADWELL_MINIMA,
    SQRT_MODEL_TRANSITION_MATRIX,
    JetConfig,
    SdeSystem,
    Trajectory,
    benchmark_steps_per_second,
    bickley_flow,
    double_well_2d,
    double_well_system,
    euler_maruyama,
    jet_stream_function,
    jet_velocity,
    quadwell_1d,
    quadwell_drift,
    quadwell_potential,
    quadwell_system,
    read_trajectory,
    rossler,
    sample_sqrt_model,
    sqrt_backtransform,
    sqrt_transform,
    write_trajectory,
)
from lagtime.errors import DivergenceError, InvalidArgument


class TestTrajectory:
    def test_one_dimensional_frames_get_column_shape(self):
        traj = Trajectory(frames=np.arange(4.0), dt_effective=0.1)
        assert traj.frames.shape == (4, 1)
        assert len(traj) == 4

    def test_non_finite_frames_are_rejected(self):
        with pytest.raises(DivergenceError):
            Trajectory(frames=np.array([0.0, np.inf]), dt_effective=0.1)


class TestSdeSystem:
    def test_validation(self):
        drift = lambda t, x: -x
        with pytest.raises(InvalidArgument):
            SdeSystem(dimension=2, drift=drift, diffusion=np.eye(3), step=0.1)
        with pytest.raises(InvalidArgument):
            SdeSystem(dimension=1, drift=drift, diffusion=np.eye(1), step=0.0)
        with pytest.raises(InvalidArgument):
            SdeSystem(dimension=1, drift=drift, diffusion=np.eye(1), step=0.1,
                      n_substeps=0)


class TestEulerMaruyama:
    def test_noiseless_integration_is_the_euler_map(self):
        system = SdeSystem(
            dimension=1,
            drift=lambda t, x: -2.0 * x,
            diffusion=np.zeros((1, 1)),
            step=0.01,
            n_substeps=3,
        )
        traj = euler_maruyama(system, np.array([1.0]), n_frames=5, seed=0)
        # Every substep multiplies by (1 - 2 h); frames skip 3 substeps.
        factor = (1.0 - 0.02) ** 3
        expected = np.array([factor**k for k in range(5)])
        np.testing.assert_allclose(traj.frames.ravel(), expected, rtol=1e-12)
        assert traj.dt_effective == pytest.approx(0.03)

    def test_seeded_runs_are_bit_identical(self):
        system = double_well_system(n_substeps=5)
        a = euler_maruyama(system, np.zeros(2), n_frames=50, seed=123)
        b = euler_maruyama(system, np.zeros(2), n_frames=50, seed=123)
        c = euler_maruyama(system, np.zeros(2), n_frames=50, seed=124)
        np.testing.assert_array_equal(a.frames, b.frames)
        assert not np.array_equal(a.frames, c.frames)

    def test_first_frame_is_the_initial_condition(self):
        system = quadwell_system()
        traj = euler_maruyama(system, np.array([0.4]), n_frames=3, seed=0)
        assert traj.frames[0, 0] == 0.4

    def test_divergence_reports_the_step(self):
        system = SdeSystem(
            dimension=1,
            drift=lambda t, x: x**3,
            diffusion=np.zeros((1, 1)),
            step=1.0,
            n_substeps=1,
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(DivergenceError) as excinfo:
                euler_maruyama(system, np.array([2.0]), n_frames=100, seed=0)
        assert excinfo.value.step >= 1

    def test_validation(self):
        system = quadwell_system()
        with pytest.raises(InvalidArgument):
            euler_maruyama(system, np.zeros(2), n_frames=10, seed=0)
        with pytest.raises(InvalidArgument):
            euler_maruyama(system, np.zeros(1), n_frames=0, seed=0)


class TestCompiledParity:
    """The compiled steppers must reproduce the reference integrator bit for bit."""

    def test_double_well_matches_reference(self):
        reference = euler_maruyama(
            double_well_system(n_substeps=10), np.zeros(2), n_frames=40, seed=7
        )
        fast = double_well_2d(seed=7, n_frames=40, n_substeps=10)
        np.testing.assert_array_equal(fast.frames, reference.frames)

    def test_quadwell_matches_reference(self):
        reference = euler_maruyama(
            quadwell_system(n_substeps=10), np.array([0.0]), n_frames=40, seed=3
        )
        fast = quadwell_1d(seed=3, n_frames=40, n_substeps=10)
        np.testing.assert_array_equal(fast.frames, reference.frames)


class TestQuadwellPotential:
    def test_minima_are_exact_drift_zeros(self):
        minima = np.array(QUADWELL_MINIMA)
        np.testing.assert_array_equal(quadwell_potential(minima), np.zeros(4))
        np.testing.assert_array_equal(quadwell_drift(minima), np.zeros(4))

    def test_drift_is_negative_potential_gradient(self):
        x = np.linspace(-2.5, 2.6, 200)
        eps = 1e-6
        numeric = -(quadwell_potential(x + eps) - quadwell_potential(x - eps)) / (2 * eps)
        np.testing.assert_allclose(quadwell_drift(x), numeric, atol=1e-5)

    def test_potential_is_positive_between_wells(self):
        probes = np.array([-1.3, 0.0, 1.5])
        assert np.all(quadwell_potential(probes) > 0)

    def test_long_trajectory_stays_in_the_well_region(self):
        traj = quadwell_1d(seed=0, n_frames=5000)
        x = traj.frames.ravel()
        assert x.min() > -3.5 and x.max() < 3.6
        # The walker leaves the central barrier and spends time in wells.
        assert np.mean(np.abs(x) > 0.4) > 0.5


class TestJetField:
    def probe_points(self, seed=0, n=50):
        rng = np.random.default_rng(seed)
        pts = np.column_stack([rng.uniform(0, 20, n), rng.uniform(-2.5, 2.5, n)])
        times = rng.uniform(0, 40, 5)
        return pts, times

    def test_velocity_is_divergence_free(self):
        pts, times = self.probe_points()
        eps = 1e-5
        for t in times:
            dx = np.array([eps, 0.0])
            dy = np.array([0.0, eps])
            du_dx = (jet_velocity(t, pts + dx)[:, 0] - jet_velocity(t, pts - dx)[:, 0]) / (2 * eps)
            dv_dy = (jet_velocity(t, pts + dy)[:, 1] - jet_velocity(t, pts - dy)[:, 1]) / (2 * eps)
            np.testing.assert_allclose(du_dx + dv_dy, 0.0, atol=1e-6)

    def test_velocity_derives_from_the_stream_function(self):
        pts, times = self.probe_points(seed=1)
        eps = 1e-6
        for t in times:
            dx = np.array([eps, 0.0])
            dy = np.array([0.0, eps])
            dpsi_dx = (jet_stream_function(t, pts + dx) - jet_stream_function(t, pts - dx)) / (2 * eps)
            dpsi_dy = (jet_stream_function(t, pts + dy) - jet_stream_function(t, pts - dy)) / (2 * eps)
            vel = jet_velocity(t, pts)
            np.testing.assert_allclose(vel[:, 0], -dpsi_dy, atol=1e-6)
            np.testing.assert_allclose(vel[:, 1], dpsi_dx, atol=1e-6)

    def test_field_is_exactly_periodic_in_x(self):
        pts, times = self.probe_points(seed=2)
        shifted = pts + np.array([20.0, 0.0])
        for t in times:
            np.testing.assert_allclose(
                jet_stream_function(t, pts), jet_stream_function(t, shifted),
                rtol=0, atol=1e-12,
            )
            np.testing.assert_allclose(
                jet_velocity(t, pts), jet_velocity(t, shifted), rtol=0, atol=1e-12
            )

    def test_wave_speed_conventions(self):
        config = JetConfig()
        c1, c2, c3 = config.wave_speeds
        assert c3 == pytest.approx(0.461 * config.u0)
        assert c2 == pytest.approx(0.205 * config.u0)
        golden = (np.sqrt(5.0) - 1.0) / 2.0
        k1, k2, _ = config.wavenumbers
        assert c1 == pytest.approx(c3 + golden * (k2 / k1) * (c2 - c3))
        # In the co-moving frame the third wave does not move.
        assert config.phase_rates[2] == 0.0


class TestBickleyFlow:
    def test_forward_backward_round_trip(self):
        rng = np.random.default_rng(3)
        pts = np.column_stack([rng.uniform(0, 20, 30), rng.uniform(-2, 2, 30)])
        fwd = bickley_flow(pts, t0=0.0, t1=2.0, dt=1e-2)
        back = bickley_flow(fwd, t0=2.0, t1=0.0, dt=1e-2)
        # Compare on the cylinder: wrap the x-difference.
        dx = np.abs(back[:, 0] - pts[:, 0])
        dx = np.minimum(dx, 20.0 - dx)
        assert dx.max() < 1e-6
        np.testing.assert_allclose(back[:, 1], pts[:, 1], atol=1e-6)

    def test_horizontal_coordinate_is_wrapped(self):
        pts = np.array([[19.9, 0.0], [0.05, 0.5]])
        out = bickley_flow(pts, t0=0.0, t1=5.0, dt=1e-2)
        assert np.all(out[:, 0] >= 0.0) and np.all(out[:, 0] < 20.0)

    def test_zero_span_returns_input(self):
        pts = np.array([[1.0, 0.5]])
        np.testing.assert_array_equal(bickley_flow(pts, 1.0, 1.0), pts)

    def test_validation(self):
        pts = np.zeros((2, 2))
        with pytest.raises(InvalidArgument):
            bickley_flow(pts, 0.0, 1.0, dt=-0.1)
        with pytest.raises(InvalidArgument):
            bickley_flow(pts, 0.0, 0.0305, dt=1e-2)
        with pytest.raises(InvalidArgument):
            bickley_flow(np.zeros((2, 3)), 0.0, 1.0)


class TestSqrtModel:
    def test_transform_round_trip_is_exact(self):
        rng = np.random.default_rng(4)
        X = rng.normal(size=(200, 2)) * np.array([5.0, 1.0])
        np.testing.assert_allclose(sqrt_backtransform(sqrt_transform(X)), X, atol=1e-12)
        np.testing.assert_allclose(sqrt_transform(sqrt_backtransform(X)), X, atol=1e-12)

    def test_transform_only_shifts_second_coordinate(self):
        X = np.array([[4.0, 1.0], [-9.0, 0.0]])
        out = sqrt_transform(X)
        np.testing.assert_allclose(out[:, 0], X[:, 0])
        np.testing.assert_allclose(out[:, 1], [3.0, 3.0])

    def test_sampler_is_reproducible_and_labeled(self):
        obs, hidden = sample_sqrt_model(500, seed=0)
        obs2, hidden2 = sample_sqrt_model(500, seed=0)
        np.testing.assert_array_equal(obs, obs2)
        np.testing.assert_array_equal(hidden, hidden2)
        assert obs.shape == (500, 2)
        assert set(np.unique(hidden)) <= {0, 1}

    def test_unwarped_emissions_separate_the_states(self):
        obs, hidden = sample_sqrt_model(2000, seed=1)
        pre = sqrt_backtransform(obs)
        # State 0 sits at y = +1, state 1 at y = -1, both with tiny y-spread.
        sign_guess = (pre[:, 1] < 0).astype(int)
        assert np.mean(sign_guess == hidden) > 0.999

    def test_hidden_chain_matches_its_transition_matrix(self):
        _, hidden = sample_sqrt_model(100_000, seed=2)
        from lagtime.markov import count_transitions, msm_mle

        est = msm_mle(count_transitions(hidden, lag=1))
        np.testing.assert_allclose(
            est.transition_matrix, SQRT_MODEL_TRANSITION_MATRIX, atol=0.01
        )

    def test_frame_count_validation(self):
        with pytest.raises(InvalidArgument):
            sample_sqrt_model(0, seed=0)


class TestRossler:
    def test_frame_count_and_initial_state(self):
        traj = rossler(t1=1.0, dt=1e-3)
        assert traj.frames.shape == (1001, 3)
        np.testing.assert_allclose(traj.frames[0], [0.0, -6.78, 0.02])

    def test_matches_adaptive_reference_integration(self):
        def rhs(t, state):
            x1, x2, x3 = state
            return [-x2 - x3, x1 + 0.1 * x2, 0.1 + x3 * (x1 - 14.0)]

        traj = rossler(t1=10.0, dt=1e-3)
        ref = solve_ivp(
            rhs, (0.0, 10.0), [0.0, -6.78, 0.02], rtol=1e-11, atol=1e-11,
            dense_output=True,
        )
        np.testing.assert_allclose(traj.frames[-1], ref.sol(10.0), atol=1e-5)

    def test_validation(self):
        with pytest.raises(InvalidArgument):
            rossler(t1=0.0)
        with pytest.raises(InvalidArgument):
            rossler(dt=0.0)
        with pytest.raises(InvalidArgument):
            rossler(x0=(1.0, 2.0))


class TestDoubleWell2d:
    def test_shapes_and_determinism(self):
        a = double_well_2d(seed=5, n_frames=100, n_substeps=10)
        b = double_well_2d(seed=5, n_frames=100, n_substeps=10)
        np.testing.assert_array_equal(a.frames, b.frames)
        assert a.frames.shape == (100, 2)
        assert a.dt_effective == pytest.approx(0.01)

    def test_walker_leaves_the_saddle_and_stays_bounded(self):
        traj = double_well_2d(seed=6, n_frames=2000, n_substeps=10)
        x = traj.frames[:, 0]
        assert np.abs(x).max() > 0.8  # reaches a well bottom
        assert np.all(np.abs(traj.frames) < 5.0)


class TestBenchmark:
    def test_reports_throughput(self):
        result = benchmark_steps_per_second(n_steps=20_000, seed=0)
        assert result["steps_per_second"] > 0
        assert result["n_steps"] >= 20_000 - 100
        assert result["backend"] in ("numba", "python")
        assert result["elapsed_seconds"] > 0


class TestTrajectoryIO:
    def test_round_trip_preserves_frames_and_metadata(self, tmp_path):
        traj = quadwell_1d(seed=1, n_frames=50)
        path = tmp_path / "traj.csv"
        write_trajectory(traj, path, system="quadwell_1d", parameters={"h": 1e-3})
        loaded, meta = read_trajectory(path)
        np.testing.assert_allclose(loaded.frames, traj.frames, rtol=1e-15)
        assert meta["system"] == "quadwell_1d"
        assert meta["parameters"] == {"h": 1e-3}
        assert meta["seed"] == 1
        assert loaded.dt_effective == pytest.approx(traj.dt_effective)
        assert loaded.seed == 1

    def test_missing_sidecar_defaults(self, tmp_path):
        path = tmp_path / "bare.csv"
        np.savetxt(path, np.ones((3, 2)), delimiter=",")
        loaded, meta = read_trajectory(path)
        assert meta == {}
        assert loaded.dt_effective == 1.0
        assert loaded.frames.shape == (3, 2)

    def test_single_row_file_keeps_two_dimensions(self, tmp_path):
        traj = Trajectory(frames=np.array([[1.0, 2.0]]), dt_effective=0.5)
        path = tmp_path / "one.csv"
        write_trajectory(traj, path)
        loaded, _ = read_trajectory(path)
        assert loaded.frames.shape == (1, 2)
