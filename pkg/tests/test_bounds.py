import math

import numpy as np
import pytest

import conftest as C
from eigenbound import bounds, measures, oracle, testfn, variational as va
from eigenbound.errors import CriterionDegenerateError


def flagged_nd_table():
    p = measures.make_problem(preset="ou", D=40.0, case="ND", grid_size=256)
    return measures.build_tables(p, 40.0)


class TestDelta:
    def test_laplacian_both_orientations(self, lap_nd, lap_dn):
        d, x = bounds.delta("ND", lap_nd)
        assert d == pytest.approx(0.25, abs=1e-9)
        assert x == pytest.approx(0.5, abs=1e-4)
        d2, _ = bounds.delta("DN", lap_dn)
        assert d2 == pytest.approx(0.25, abs=1e-9)

    def test_flagged_tail_gives_infinity(self):
        d, _ = bounds.delta("ND", flagged_nd_table())
        assert math.isinf(d)

    def test_quadratic_weight_matches_scalar_optimum(self, quad_nd):
        # delta = sup arctan(x) (1 - x), maximized independently of the tables
        d, x = bounds.delta("ND", quad_nd)
        assert d == pytest.approx(0.23286826515374387, rel=1e-6)
        assert x == pytest.approx(0.4673377589811362, abs=1e-3)

    def test_duality_swap_preserves_delta(self, ou_nd_3):
        d_primal, _ = bounds.delta("ND", ou_nd_3)
        d_dual, _ = bounds.delta("DN", oracle.dual_table(ou_nd_3))
        assert d_dual == pytest.approx(d_primal, rel=1e-12)

    def test_nn_uses_increasing_orientation(self, lap_nn):
        d, _ = bounds.delta("NN", lap_nn)
        assert d == pytest.approx(0.25, abs=1e-9)


class TestBasicBounds:
    def test_laplacian_brackets_analytic_value(self, lap_nd, lap_dn):
        for table, case in ((lap_nd, "ND"), (lap_dn, "DN")):
            lo, hi = bounds.basic_bounds(case, table)
            assert lo == pytest.approx(1.0, abs=1e-8)
            assert hi == pytest.approx(4.0, abs=1e-7)
            assert lo <= C.PI_SQ_OVER_4 <= hi

    def test_zero_marker(self):
        assert bounds.basic_bounds("ND", flagged_nd_table()) == (0.0, 0.0)


class TestDelta1:
    def test_laplacian_closed_form(self, lap_nd, lap_dn):
        for case, table in (("ND", lap_nd), ("DN", lap_dn)):
            d1, x1 = bounds.delta1(case, table)
            assert d1 == pytest.approx(C.DELTA1_LAPLACIAN, rel=1e-6)
        # argmax mirrors between the orientations
        _, x_nd = bounds.delta1("ND", lap_nd)
        _, x_dn = bounds.delta1("DN", lap_dn)
        assert x_nd == pytest.approx(1 - x_dn, abs=1e-3)

    @pytest.mark.parametrize(
        "case,fixture",
        [("ND", "lap_nd"), ("DN", "lap_dn"), ("ND", "quad_nd"), ("DN", "quad_dn")],
    )
    def test_matches_double_integral_of_sqrt_seed(self, case, fixture, request):
        table = request.getfixturevalue(fixture)
        d1, _ = bounds.delta1(case, table)
        f = testfn.power(testfn.seed_function(case, table), 0.5)
        op, _ = va.double_integral_form(case, f)
        eps = table.problem.tolerances.bound_refine
        assert abs(d1 - op.sup) <= 5 * eps

    def test_degenerate_raises(self):
        with pytest.raises(CriterionDegenerateError):
            bounds.delta1("ND", flagged_nd_table())


class TestDelta1Prime:
    def test_laplacian_closed_form(self, lap_nd, lap_dn):
        d1p, x = bounds.delta1_prime("ND", lap_nd)
        assert d1p == pytest.approx(0.375, rel=1e-6)
        assert x == pytest.approx(0.25, abs=1e-3)
        d1p_dn, x_dn = bounds.delta1_prime("DN", lap_dn)
        assert d1p_dn == pytest.approx(0.375, rel=1e-6)
        assert x_dn == pytest.approx(0.75, abs=1e-3)

    @pytest.mark.parametrize(
        "case,fixture",
        [
            ("ND", "lap_nd"),
            ("DN", "lap_dn"),
            ("ND", "quad_nd"),
            ("DN", "quad_dn"),
            ("DN", "ou_dn_4"),
            ("DN", "ou_dn_8"),
        ],
    )
    def test_containment_in_delta_bracket(self, case, fixture, request):
        table = request.getfixturevalue(fixture)
        d, _ = bounds.delta(case, table)
        d1p, _ = bounds.delta1_prime(case, table)
        eps = table.problem.tolerances.bound_refine
        assert d - 10 * eps <= d1p <= 2 * d + 10 * eps


class TestReport:
    def test_positive_report_fields(self, lap_nd):
        rep = bounds.compute_report("ND", lap_nd)
        d = rep.to_dict()
        assert set(d) == {
            "case", "delta", "lower_basic", "upper_basic", "delta1",
            "delta1_prime", "lower_improved", "upper_improved", "argmax_x",
            "positivity",
        }
        assert d["positivity"] == "positive"
        assert d["lower_basic"] <= d["lower_improved"] <= d["upper_improved"] <= d["upper_basic"]

    def test_zero_report(self):
        rep = bounds.compute_report("ND", flagged_nd_table())
        assert rep.positivity == "zero"
        assert (rep.lower_basic, rep.upper_basic) == (0.0, 0.0)
        assert math.isinf(rep.delta)

    def test_nn_report_is_criterion_only(self, lap_nn):
        rep = bounds.compute_report("NN", lap_nn)
        assert rep.positivity == "positive"
        assert rep.lower_basic is None and rep.delta1 is None


class TestWeightedIntegralInequality:
    """For nonnegative locally integrable m, n with c = sup of (head of m
    times tail of n) finite, the head integral of m * psi^r stays below
    c/(1-r) * psi^{r-1}, psi being the tail of n."""

    @staticmethod
    def _piecewise(rng, x):
        breaks = np.linspace(0.0, 1.0, 17)
        levels = rng.uniform(0.0, 2.0, 16)
        idx = np.clip(np.searchsorted(breaks, x, side="right") - 1, 0, 15)
        return levels[idx]

    def test_hundred_random_weights(self):
        rng = np.random.default_rng(42)
        x = np.linspace(0.0, 1.0, 2001)
        dx = x[1] - x[0]
        for _ in range(100):
            m = self._piecewise(rng, 0.5 * (x[:-1] + x[1:]))
            n = self._piecewise(rng, 0.5 * (x[:-1] + x[1:]))
            r = rng.uniform(0.05, 0.95)
            M = np.concatenate([[0.0], np.cumsum(m * dx)])
            psi = np.concatenate([np.cumsum((n * dx)[::-1])[::-1], [0.0]])
            c = np.max(M * psi)
            if c == 0.0:
                continue
            w = m * (0.5 * (psi[:-1] + psi[1:])) ** r
            lhs = np.concatenate([[0.0], np.cumsum(w * dx)])
            keep = psi > 0
            rhs = np.full_like(psi, np.inf)
            rhs[keep] = c / (1 - r) * psi[keep] ** (r - 1)
            assert np.all(lhs[keep] <= rhs[keep] * (1 + 1e-6) + 1e-12)
