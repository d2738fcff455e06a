"""Volume constants and sandwich bounds against independent geometry.

Oracles used here:
  * Euclidean ball volumes pi^(n/2) / Gamma(n/2 + 1) and the equivalent
    ratio form 4 pi^(n/2) / (K (n-K) Gamma((n-K)/2) Gamma(K/2)).
  * Hand-computed shadows and slices for axis and diagonal lines.
  * The area of a union of two perpendicular strips inside the unit disk,
    4 (tau sqrt(1 - tau^2) + asin tau) - 4 tau^2, for the exact level-set
    measure of the two-axis dictionary.
"""

import math

import numpy as np
import pytest

from l0geom import (
    BoundReport,
    ConstantSet,
    Dictionary,
    NormSpec,
    Quantity,
    VolumeEstimate,
    assemble_constants,
    ball_volume,
    bound_report,
    compute_equiv_constants,
    constants_to_csv,
    cylinder_constant,
    euclid_ck,
    orthonormal_basis,
    overlap_budget,
    overlap_cap,
    overlap_constant,
    projected_ball_volume,
    slice_volume,
)
from l0geom.subspaces import empty_basis

L1, L2, LINF = NormSpec.l1(), NormSpec.l2(), NormSpec.linf()
AXES2 = Dictionary.from_vectors([[1.0, 0.0], [0.0, 1.0]])
THREE_LINES = Dictionary.from_vectors([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])

# Area of {x : min(|x_1|, |x_2|) <= tau} inside the unit disk: two chord
# strips minus their shared 2tau x 2tau square.
def two_strip_area(tau):
    return 4.0 * (tau * math.sqrt(1.0 - tau * tau) + math.asin(tau)) - 4.0 * tau * tau


class TestEuclidConstant:
    def test_matches_ratio_formula(self):
        for n in range(2, 7):
            for K in range(1, n):
                ratio = (
                    4.0
                    * math.pi ** (n / 2)
                    / (K * (n - K) * math.gamma((n - K) / 2) * math.gamma(K / 2))
                )
                assert euclid_ck(K, n) == pytest.approx(ratio, rel=1e-12)

    def test_edges_give_the_ball_volume(self):
        for n in range(1, 6):
            assert euclid_ck(0, n) == pytest.approx(math.pi ** (n / 2) / math.gamma(n / 2 + 1))
            assert euclid_ck(n, n) == euclid_ck(0, n)

    def test_range_guard(self):
        with pytest.raises(ValueError):
            euclid_ck(3, 2)


class TestShadowVolume:
    def test_euclidean_closed_form(self):
        line = orthonormal_basis([[1.0, 2.0, 2.0]])
        est = projected_ball_volume(L2, line)
        assert est.value == pytest.approx(math.pi)
        assert est.std_err == 0.0

    def test_full_subspace_is_a_point(self):
        full = orthonormal_basis(np.eye(2))
        assert projected_ball_volume(LINF, full).value == 1.0

    def test_empty_subspace_is_the_whole_ball(self):
        est = projected_ball_volume(L1, empty_basis(2))
        assert est.value == pytest.approx(2.0)  # l1 ball area 2^n / n!
        assert est.std_err == 0.0

    def test_box_shadow_of_the_diagonal(self):
        # The square [-1, 1]^2 projects onto the antidiagonal as a segment
        # of length 2 sqrt(2), and the sampling box equals that segment, so
        # the estimate is exact.
        diag = orthonormal_basis([[1.0, 1.0]])
        est = projected_ball_volume(LINF, diag, n_samples=4000)
        assert est.value == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-12)
        assert est.std_err == 0.0

    def test_forced_monte_carlo_agrees_with_closed_form(self):
        line = orthonormal_basis([[0.0, 0.0, 1.0]])
        est = projected_ball_volume(L2, line, n_samples=50_000, method="mc")
        assert est.std_err > 0.0
        assert abs(est.value - math.pi) <= 4.0 * est.std_err

    def test_worker_invariance(self):
        diag = orthonormal_basis([[1.0, -1.0, 0.0]])
        one = projected_ball_volume(L1, diag, n_samples=30_000, workers=1)
        four = projected_ball_volume(L1, diag, n_samples=30_000, workers=4)
        assert one == four

    def test_method_guard(self):
        with pytest.raises(ValueError):
            projected_ball_volume(L2, empty_basis(2), method="exact")


class TestSliceVolume:
    def test_euclidean_closed_form(self):
        plane = orthonormal_basis([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]])
        est = slice_volume(L2, plane)
        assert est.value == pytest.approx(math.pi)
        assert est.std_err == 0.0

    def test_zero_dimensional_convention(self):
        assert slice_volume(L1, empty_basis(3)).value == 1.0

    def test_full_slice_is_the_ball(self):
        full = orthonormal_basis(np.eye(2))
        assert slice_volume(LINF, full).value == pytest.approx(4.0)

    def test_diagonal_slice_of_the_l1_ball(self):
        # {t (1,1)/sqrt(2) : sqrt(2) |t| <= 1} has length sqrt(2).
        diag = orthonormal_basis([[1.0, 1.0]])
        est = slice_volume(L1, diag, n_samples=100_000)
        assert est.std_err > 0.0
        assert abs(est.value - math.sqrt(2.0)) <= 4.0 * est.std_err

    def test_forced_monte_carlo_agrees_with_closed_form(self):
        plane = orthonormal_basis([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        est = slice_volume(L2, plane, n_samples=50_000, method="mc")
        assert abs(est.value - math.pi) <= 4.0 * est.std_err


class TestCylinderConstant:
    def test_euclidean_line(self):
        line = orthonormal_basis([[3.0, 4.0]])
        est = cylinder_constant(L2, L2, line)
        assert est.value == pytest.approx(4.0)  # alpha(1) * alpha(1)
        assert est.std_err == 0.0

    def test_box_fidelity_with_l1_data_on_the_diagonal(self):
        diag = orthonormal_basis([[1.0, 1.0]])
        est = cylinder_constant(LINF, L1, diag, n_samples=100_000)
        assert abs(est.value - 4.0) <= 4.0 * est.std_err  # 2 sqrt(2) * sqrt(2)


class TestOverlapConstant:
    def test_orthogonal_lines_meet_at_the_origin(self):
        e1 = orthonormal_basis([[1.0, 0.0]])
        e2 = orthonormal_basis([[0.0, 1.0]])
        est = overlap_constant(L2, L2, e1, e2)
        assert est.value == pytest.approx(4.0 * math.pi)  # alpha(2) * (2 delta2)^2
        assert est.std_err == 0.0
        swapped = overlap_constant(L2, L2, e2, e1)
        assert swapped.value == est.value

    def test_planes_sharing_a_line(self):
        a = orthonormal_basis([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        b = orthonormal_basis([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        est = overlap_constant(L2, L2, a, b)
        assert est.value == pytest.approx(8.0 * math.pi)  # pi * 4 * alpha(1)
        assert est.std_err == 0.0

    def test_rejects_equal_or_mismatched_spans(self):
        e1 = orthonormal_basis([[1.0, 0.0]])
        e1_again = orthonormal_basis([[-2.0, 0.0]])
        with pytest.raises(ValueError):
            overlap_constant(L2, L2, e1, e1_again)
        with pytest.raises(ValueError):
            overlap_constant(L2, L2, e1, orthonormal_basis(np.eye(2)))


class TestOverlapCap:
    def test_formula(self):
        equiv = compute_equiv_constants(L2, L1, 3)
        cap = overlap_cap(3, 1, 4, equiv)
        expected = (
            12 * math.pi * (2.0 * equiv.delta2) ** 2 * 2.0 * equiv.delta3
        )
        assert cap == pytest.approx(expected, rel=1e-12)

    def test_tight_in_the_euclidean_point_meet_case(self):
        equiv = compute_equiv_constants(L2, L2, 2)
        consts = assemble_constants(AXES2, L2, L2, 1)
        assert consts.q_totals[0].value == pytest.approx(
            overlap_cap(2, 0, 2, equiv), rel=1e-12
        )

    def test_strict_for_short_slices(self):
        # Planes meeting along the diagonal of the first two coordinates:
        # the l1 slice of that line has length sqrt(2) < alpha(1) delta3.
        a = orthonormal_basis([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        b = orthonormal_basis([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]])
        equiv = compute_equiv_constants(L2, L1, 3)
        total = VolumeEstimate(0.0)
        for pair in ((a, b), (b, a)):
            est = overlap_constant(L2, L1, *pair, n_samples=50_000)
            total = VolumeEstimate(total.value + est.value, total.std_err + est.std_err)
        assert total.value + 3.0 * total.std_err < overlap_cap(3, 1, 2, equiv)

    def test_guards(self):
        equiv = compute_equiv_constants(L2, L2, 2)
        with pytest.raises(ValueError):
            overlap_cap(2, 3, 2, equiv)
        with pytest.raises(ValueError):
            overlap_cap(2, 0, -1, equiv)


class TestAssembleConstants:
    def test_two_axis_dictionary_is_fully_closed_form(self):
        c0 = assemble_constants(AXES2, L2, L2, 0)
        c1 = assemble_constants(AXES2, L2, L2, 1)
        c2 = assemble_constants(AXES2, L2, L2, 2)
        assert c0.c_total.value == pytest.approx(math.pi)
        assert c1.c_total.value == pytest.approx(8.0)
        assert c2.c_total.value == pytest.approx(math.pi)
        assert all(c.c_total.std_err == 0.0 for c in (c0, c1, c2))
        assert c0.q_totals == {} and c2.q_totals == {}
        assert c1.q_totals[0].value == pytest.approx(8.0 * math.pi)
        assert (c0.delta_gate, c1.delta_gate, c2.delta_gate) == (1.0, 2.0, 2.0)
        assert c1.delta_hat == 1.0 and c1.delta_pair == {0: 2.0}
        assert c1.euclidean and c1.k_min == 0
        assert len(c1.c_members) == 2

    def test_three_line_dictionary(self):
        c1 = assemble_constants(THREE_LINES, L2, L2, 1)
        assert c1.c_total.value == pytest.approx(12.0)
        assert c1.q_totals[0].value == pytest.approx(24.0 * math.pi)

    def test_general_norm_widths(self):
        c1 = assemble_constants(AXES2, L2, L1, 1, n_samples=2000)
        bar = compute_equiv_constants(L2, L1, 2).delta_bar
        assert bar == pytest.approx(math.sqrt(2.0))
        assert not c1.euclidean
        assert c1.delta_hat == pytest.approx(bar)
        assert c1.delta_pair[0] == pytest.approx(3.0 * bar)
        assert c1.delta_gate == pytest.approx(3.0 * bar)

    def test_level_guard(self):
        with pytest.raises(ValueError):
            assemble_constants(AXES2, L2, L2, 3)


class TestOverlapBudget:
    def test_hand_formula(self):
        c1 = assemble_constants(AXES2, L2, L2, 1)
        for tau, theta in ((0.05, 1.0), (0.1, 2.0)):
            total, err = overlap_budget(c1, tau, theta)
            assert total == pytest.approx(8.0 * math.pi * (tau / theta) ** 2)
            assert err == 0.0

    def test_extreme_levels_vanish(self):
        for K in (0, 2):
            c = assemble_constants(AXES2, L2, L2, K)
            assert overlap_budget(c, 0.1, 1.0) == (0.0, 0.0)

    def test_guards(self):
        c1 = assemble_constants(AXES2, L2, L2, 1)
        with pytest.raises(ValueError):
            overlap_budget(c1, -0.1, 1.0)


@pytest.fixture(scope="module")
def axes_constants():
    return tuple(assemble_constants(AXES2, L2, L2, K) for K in range(3))


DISK = VolumeEstimate(math.pi)


class TestBoundReports:
    def test_measure_sandwich_contains_the_exact_strip_area(self, axes_constants):
        for tau in (0.01, 0.02, 0.05, 0.1):
            rep = bound_report(Quantity.MEASURE_LEQ, tau, 1.0, axes_constants[1])
            truth = two_strip_area(tau)
            assert rep.valid
            assert rep.lower <= truth <= rep.upper
            assert rep.lower == pytest.approx(
                8.0 * tau * (1.0 - tau) - 8.0 * math.pi * tau * tau, rel=1e-12
            )
            assert rep.upper == pytest.approx(8.0 * tau * (1.0 + tau), rel=1e-12)
            assert rep.eps_terms["overlap"] == pytest.approx(8.0 * math.pi * tau * tau)

    def test_measure_point_mass_at_level_zero(self, axes_constants):
        tau = 0.07
        rep = bound_report(Quantity.MEASURE_EQ, tau, 1.0, axes_constants[0])
        assert rep.lower == pytest.approx(math.pi * tau * tau, rel=1e-12)
        assert rep.upper == pytest.approx(math.pi * tau * tau, rel=1e-12)

    def test_shell_sandwich_contains_the_exact_shell_area(self, axes_constants):
        for tau in (0.02, 0.05):
            rep = bound_report(
                Quantity.MEASURE_EQ, tau, 1.0, axes_constants[1],
                constants_prev=axes_constants[0],
            )
            truth = two_strip_area(tau) - math.pi * tau * tau
            assert rep.lower <= truth <= rep.upper
            assert set(rep.eps_terms) == {
                "overlap", "previous_ceiling", "previous_floor", "previous_overlap",
            }

    def test_probability_versions_divide_by_the_ball(self, axes_constants):
        tau = 0.05
        meas = bound_report(Quantity.MEASURE_LEQ, tau, 1.0, axes_constants[1])
        prob = bound_report(
            Quantity.PROB_LEQ, tau, 1.0, axes_constants[1], data_ball_vol=DISK
        )
        assert prob.lower == pytest.approx(meas.lower / math.pi, rel=1e-12)
        assert prob.upper == pytest.approx(meas.upper / math.pi, rel=1e-12)
        assert prob.lower <= two_strip_area(tau) / math.pi <= prob.upper

    def test_saturated_level_contains_probability_one(self, axes_constants):
        rep = bound_report(
            Quantity.PROB_LEQ, 0.1, 1.0, axes_constants[2], data_ball_vol=DISK
        )
        assert rep.lower <= 1.0 <= rep.upper

    def test_expectation_sandwich(self, axes_constants):
        tau = 0.02
        rep = bound_report(
            Quantity.EXPECT, tau, 1.0,
            all_constants=axes_constants[:2], data_ball_vol=DISK,
        )
        truth = 2.0 - tau * tau - two_strip_area(tau) / math.pi
        assert rep.valid
        assert rep.lower <= truth <= rep.upper
        assert rep.upper - rep.lower < 0.02

    def test_bounds_collapse_as_tau_shrinks(self, axes_constants):
        def spread(tau):
            rep = bound_report(
                Quantity.PROB_LEQ, tau, 1.0, axes_constants[1], data_ball_vol=DISK
            )
            return rep.upper / rep.lower

        assert spread(1e-3) < spread(1e-2) < spread(5e-2)
        assert spread(1e-3) < 1.02

    def test_validity_gate(self, axes_constants):
        rep = bound_report(Quantity.MEASURE_LEQ, 0.51, 1.0, axes_constants[1])
        assert rep.valid is False
        assert rep.lower is None and rep.upper is None
        exp = bound_report(
            Quantity.EXPECT, 0.51, 1.0,
            all_constants=axes_constants[:2], data_ball_vol=DISK,
        )
        assert exp.valid is False

    def test_sandwich_orders_correctly_at_random_valid_points(self, axes_constants):
        rng = np.random.default_rng(17)
        for _ in range(50):
            theta = float(rng.uniform(0.5, 3.0))
            tau = float(rng.uniform(0.001, theta / 2.001))
            for K, c in enumerate(axes_constants):
                prev = axes_constants[K - 1] if K >= 1 else None
                for q in Quantity:
                    if q is Quantity.EXPECT:
                        rep = bound_report(
                            q, tau, theta,
                            all_constants=axes_constants[:2], data_ball_vol=DISK,
                        )
                    else:
                        rep = bound_report(
                            q, tau, theta, c, constants_prev=prev, data_ball_vol=DISK
                        )
                    assert rep.valid
                    assert rep.lower <= rep.upper

    def test_monte_carlo_uncertainty_propagates(self):
        # The diagonal atom's l1-ball slice is strictly inside its sampling
        # box, so this constant set carries real Monte Carlo error.
        noisy = assemble_constants(THREE_LINES, L2, L1, 1, n_samples=4000)
        assert noisy.c_total.std_err > 0.0
        rep = bound_report(Quantity.MEASURE_LEQ, 0.02, 1.0, noisy)
        assert rep.upper_std_err > 0.0
        assert rep.lower_std_err > 0.0

    def test_required_input_errors(self, axes_constants):
        with pytest.raises(ValueError):
            bound_report(Quantity.MEASURE_LEQ, 0.05, 1.0)
        with pytest.raises(ValueError):
            bound_report(Quantity.MEASURE_EQ, 0.05, 1.0, axes_constants[1])
        with pytest.raises(ValueError):
            bound_report(
                Quantity.MEASURE_EQ, 0.05, 1.0, axes_constants[2],
                constants_prev=axes_constants[0],
            )
        with pytest.raises(ValueError):
            bound_report(Quantity.PROB_LEQ, 0.05, 1.0, axes_constants[1])
        with pytest.raises(ValueError):
            bound_report(Quantity.EXPECT, 0.05, 1.0, all_constants=axes_constants[:2])
        with pytest.raises(ValueError):
            bound_report(
                Quantity.EXPECT, 0.05, 1.0,
                all_constants=axes_constants[1:], data_ball_vol=DISK,
            )
        with pytest.raises(ValueError):
            bound_report(Quantity.MEASURE_LEQ, -0.05, 1.0, axes_constants[1])
        with pytest.raises(ValueError):
            bound_report("bogus", 0.05, 1.0, axes_constants[1])

    def test_quantity_round_trip(self):
        assert Quantity("prob_leq") is Quantity.PROB_LEQ
        assert Quantity.EXPECT.value == "expect"


class TestConstantsCsv:
    def test_exact_rendering(self, axes_constants):
        text = constants_to_csv(axes_constants)
        lines = text.splitlines()
        assert lines[0] == (
            "K,C_K,kK,Q_0,Q_1,deltaHat,Delta_K,ci,deltaPrime,Q_0_ci,Q_1_ci"
        )
        assert lines[1] == "0,3.141592653589793,0,,,1.0,1.0,0.0,,,"
        assert lines[3] == "2,3.141592653589793,2,,,1.0,2.0,0.0,,,"
        cells = lines[2].split(",")
        assert cells[0] == "1" and cells[2] == "0"
        assert float(cells[1]) == pytest.approx(8.0, rel=1e-14)
        assert float(cells[3]) == pytest.approx(8.0 * math.pi, rel=1e-14)
        assert cells[4] == "" and cells[10] == ""
        assert cells[5:10] == ["1.0", "2.0", "0.0", "2.0", "0.0"]
        assert text == constants_to_csv(list(axes_constants))
        assert text == constants_to_csv(tuple(reversed(axes_constants)))

    def test_guards(self, axes_constants):
        with pytest.raises(ValueError):
            constants_to_csv([])
        other = assemble_constants(
            Dictionary.from_vectors(np.eye(3)), L2, L2, 0
        )
        with pytest.raises(ValueError):
            constants_to_csv([axes_constants[0], other])
