import numpy as np
import pytest

from fdmafl.model import (
    Allocation,
    SystemConfig,
    data_rate,
    evaluate,
    generate_scenario,
    uplink_time,
)
from fdmafl.oracle import full_grid_objective
from fdmafl.orchestrator import (
    InfeasibleDeadline,
    SolveOptions,
    SolveReport,
    assert_feasible,
    baseline_comm_only,
    baseline_comp_only,
    baseline_random,
    check_deadline_feasible,
    solve,
)


class TestOptions:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(max_outer_k=0)
        with pytest.raises(ValueError):
            SolveOptions(sol_tol_eps0=0.0)
        with pytest.raises(ValueError):
            SolveOptions(mode="other")
        with pytest.raises(ValueError):
            SolveOptions(mode="fixed_deadline")


class TestWeightedMode:
    def test_deterministic(self):
        sc = generate_scenario(SystemConfig(num_devices=10, rng_seed=3))
        a = solve(sc)
        b = solve(sc)
        assert a.allocation.power_w.tolist() == b.allocation.power_w.tolist()
        assert a.allocation.bandwidth_hz.tolist() == b.allocation.bandwidth_hz.tolist()
        assert a.allocation.freq_hz.tolist() == b.allocation.freq_hz.tolist()
        assert a.cost.objective == b.cost.objective

    def test_single_device_matches_grid(self):
        sc = generate_scenario(SystemConfig(num_devices=1, rng_seed=0))
        report = solve(sc)
        assert_feasible(sc, report.allocation)
        assert report.allocation.bandwidth_hz[0] == pytest.approx(
            sc.config.total_bandwidth_hz, rel=1e-6
        )
        reference = full_grid_objective(sc, n_points=200, t_points=260)
        assert report.cost.objective <= reference * 1.02

    def test_feasible_across_seeds(self):
        for seed in range(10):
            sc = generate_scenario(SystemConfig(num_devices=7, rng_seed=seed))
            report = solve(sc)
            assert_feasible(sc, report.allocation)

    def test_trace_monotone(self):
        sc = generate_scenario(SystemConfig(num_devices=15, rng_seed=4))
        report = solve(sc)
        trace = report.objective_trace
        assert len(trace) == report.outer_iters
        for earlier, later in zip(trace, trace[1:]):
            assert later <= earlier * (1 + 1e-7)

    def test_fixed_point_consistency(self):
        # Re-running the solver from its own answer should barely move it.
        sc = generate_scenario(SystemConfig(num_devices=10, rng_seed=5))
        report = solve(sc)
        opts = SolveOptions(init_allocation=report.allocation)
        again = solve(sc, SolveOptions(max_outer_k=20))
        assert again.cost.objective == pytest.approx(report.cost.objective, rel=1e-9)
        assert isinstance(opts, SolveOptions)

    def test_pure_delay_weights(self):
        cfg = SystemConfig(num_devices=5, rng_seed=2, weight_energy=0.0, weight_time=1.0)
        sc = generate_scenario(cfg)
        report = solve(sc)
        assert_feasible(sc, report.allocation)
        assert np.allclose(report.allocation.power_w, sc.p_max)
        assert np.allclose(report.allocation.freq_hz, sc.f_max)
        rates = data_rate(
            report.allocation.power_w,
            report.allocation.bandwidth_hz,
            sc.gain,
            cfg.noise_psd_w_per_hz,
        )
        totals = sc.cycles_per_round / sc.f_max + uplink_time(sc.upload_bits, rates)
        # waterfilling equalizes the round times
        assert float(np.max(totals) - np.min(totals)) <= 1e-6 * float(np.max(totals))

    def test_report_dict_round_numbers(self):
        sc = generate_scenario(SystemConfig(num_devices=3, rng_seed=1))
        report = solve(sc)
        d = report.to_dict()
        assert d["objective"] == report.cost.objective
        assert len(d["power_w"]) == 3
        assert d["converged"] is True


class TestFixedDeadline:
    def test_generous_deadline_relaxes_everything(self):
        sc = generate_scenario(SystemConfig(num_devices=4, rng_seed=8))
        report = solve(sc, SolveOptions(mode="fixed_deadline", total_time_s=1e6))
        assert np.all(report.allocation.freq_hz <= sc.f_min * 1.01)
        assert np.all(report.allocation.power_w <= sc.p_min * 1.01)

    def test_deadline_respected(self):
        sc = generate_scenario(SystemConfig(num_devices=6, rng_seed=9))
        total = 150.0
        report = solve(sc, SolveOptions(mode="fixed_deadline", total_time_s=total))
        assert_feasible(sc, report.allocation)
        assert report.cost.total_delay_s <= total * (1 + 1e-6)

    def test_infeasible_deadline_raises_with_device(self):
        sc = generate_scenario(SystemConfig(num_devices=3, rng_seed=9))
        with pytest.raises(InfeasibleDeadline, match="device"):
            solve(sc, SolveOptions(mode="fixed_deadline", total_time_s=1e-3))
        with pytest.raises(InfeasibleDeadline):
            check_deadline_feasible(sc, 1e-3)

    def test_monotone_in_deadline(self):
        sc = generate_scenario(SystemConfig(num_devices=8, rng_seed=10))
        energies = []
        prev = None
        for total in (80.0, 100.0, 150.0):
            report = solve(
                sc,
                SolveOptions(
                    mode="fixed_deadline", total_time_s=total, init_allocation=prev
                ),
            )
            energies.append(report.cost.total_energy_j)
            prev = report.allocation
        assert energies[0] * (1 + 1e-6) >= energies[1]
        assert energies[1] * (1 + 1e-6) >= energies[2]


class TestBaselines:
    def test_random_variant_a(self):
        sc = generate_scenario(SystemConfig(num_devices=10, rng_seed=3))
        alloc = baseline_random(sc, "a")
        n = sc.config.num_devices
        assert np.allclose(alloc.power_w, sc.p_max)
        assert np.allclose(alloc.bandwidth_hz, sc.config.total_bandwidth_hz / n)
        assert float(np.sum(alloc.bandwidth_hz)) == pytest.approx(
            sc.config.total_bandwidth_hz
        )
        assert np.all((alloc.freq_hz >= sc.f_min) & (alloc.freq_hz <= sc.f_max))

    def test_random_variant_b(self):
        sc = generate_scenario(SystemConfig(num_devices=10, rng_seed=3))
        alloc = baseline_random(sc, "b")
        assert np.allclose(alloc.freq_hz, sc.f_max)
        assert np.all((alloc.power_w >= sc.p_min) & (alloc.power_w <= sc.p_max))

    def test_random_repeatable_and_variants_differ(self):
        sc = generate_scenario(SystemConfig(num_devices=10, rng_seed=3))
        a1 = baseline_random(sc, "a")
        a2 = baseline_random(sc, "a")
        assert a1.freq_hz.tolist() == a2.freq_hz.tolist()
        with pytest.raises(ValueError):
            baseline_random(sc, "c")

    def test_comp_only_keeps_initial_radio(self):
        sc = generate_scenario(SystemConfig(num_devices=5, rng_seed=7))
        n = sc.config.num_devices
        report = baseline_comp_only(sc, 150.0)
        assert np.allclose(report.allocation.power_w, sc.p_max)
        assert np.allclose(
            report.allocation.bandwidth_hz, sc.config.total_bandwidth_hz / (2 * n)
        )
        assert_feasible(sc, report.allocation)

    def test_comm_only_uses_uniform_slack_frequency(self):
        sc = generate_scenario(SystemConfig(num_devices=5, rng_seed=7))
        total = 150.0
        report = baseline_comm_only(sc, total)
        assert_feasible(sc, report.allocation)
        cfg = sc.config
        p0 = sc.p_max
        b0 = np.full(5, cfg.total_bandwidth_hz / 10)
        rates0 = data_rate(p0, b0, sc.gain, cfg.noise_psd_w_per_hz)
        max_t_up = float(np.max(uplink_time(sc.upload_bits, rates0)))
        expected = np.clip(
            sc.cycles_per_round / (total / cfg.global_rounds - max_t_up),
            sc.f_min,
            sc.f_max,
        )
        assert np.allclose(report.allocation.freq_hz, expected)

    def test_joint_beats_baselines(self):
        sc = generate_scenario(SystemConfig(num_devices=8, rng_seed=11))
        total = 150.0
        joint = solve(sc, SolveOptions(mode="fixed_deadline", total_time_s=total))
        comm = baseline_comm_only(sc, total)
        comp = baseline_comp_only(sc, total)
        floor_energy = min(comm.cost.total_energy_j, comp.cost.total_energy_j)
        assert joint.cost.total_energy_j <= floor_energy + 1e-9


class TestAssertFeasible:
    def test_raises_on_violation(self):
        sc = generate_scenario(SystemConfig(num_devices=2, rng_seed=0))
        bad = Allocation(sc.p_max * 2, np.full(2, 1e6), sc.f_max, 1e9)
        with pytest.raises(AssertionError, match="device"):
            assert_feasible(sc, bad)

    def test_report_type(self):
        sc = generate_scenario(SystemConfig(num_devices=2, rng_seed=0))
        report = solve(sc)
        assert isinstance(report, SolveReport)
        cost = evaluate(sc, report.allocation)
        assert cost.objective == pytest.approx(report.cost.objective, rel=1e-12)
