import math
import time

import numpy as np
import pytest

import conftest as C
from eigenbound import bounds, measures, oracle
from eigenbound.errors import RangeError


class TestEigensolve:
    def test_laplacian_nd(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="ND")
        t0 = time.perf_counter()
        sol = oracle.fd_eigensolve(p, 2000)
        assert time.perf_counter() - t0 < 1.0
        assert sol.lambda_ == pytest.approx(C.PI_SQ_OVER_4, rel=1e-4)
        assert sol.residual <= p.tolerances.oracle
        # analytic eigenfunction
        err = np.max(np.abs(sol.eigenfunction.values - np.cos(np.pi * sol.eigenfunction.x / 2)))
        assert err <= 1e-5

    def test_laplacian_dn(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="DN")
        sol = oracle.fd_eigensolve(p, 2000)
        assert sol.lambda_ == pytest.approx(C.PI_SQ_OVER_4, rel=1e-4)
        err = np.max(np.abs(sol.eigenfunction.values - np.sin(np.pi * sol.eigenfunction.x / 2)))
        assert err <= 1e-5

    def test_laplacian_nn_gap(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="NN")
        sol = oracle.fd_eigensolve(p, 2000)
        assert sol.lambda_ == pytest.approx(C.PI_SQ, rel=1e-4)
        err = np.max(np.abs(sol.eigenfunction.values - np.cos(np.pi * sol.eigenfunction.x)))
        assert err <= 1e-4
        # constant mode projected out against the speed measure
        w = np.concatenate([[0.5 * sol.eigenfunction.table.dmu[0]],
                            0.5 * (sol.eigenfunction.table.dmu[:-1] + sol.eigenfunction.table.dmu[1:]),
                            [0.5 * sol.eigenfunction.table.dmu[-1]]])
        assert abs(np.dot(w, sol.eigenfunction.values)) <= 1e-10

    def test_ou_truncation_linear_eigenfunction(self):
        p = measures.make_problem(preset="ou", D=8.0, case="DN")
        sol = oracle.fd_eigensolve(p, 4000)
        assert sol.lambda_ == pytest.approx(1.0, rel=1e-3)

    def test_rayleigh_consistency(self):
        for preset, case in (("laplacian", "ND"), ("laplacian", "NN"), ("ou", "DN")):
            p = measures.make_problem(preset=preset, D=2.0, case=case)
            sol = oracle.fd_eigensolve(p, 1500)
            assert abs(sol.rayleigh - sol.lambda_) <= 1e-10 * abs(sol.lambda_)

    def test_grid_convergence_second_order(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="ND")
        errs = [abs(oracle.fd_eigensolve(p, n).lambda_ - C.PI_SQ_OVER_4) for n in (250, 500, 1000)]
        assert errs[0] / errs[1] >= 3.0
        assert errs[1] / errs[2] >= 3.0

    def test_strict_domain_monotonicity(self):
        p = measures.make_problem(preset="ou", D=1.0, case="ND")
        pairs = [(0.4, 0.6), (0.6, 0.8), (0.5, 0.9)]
        for a, b in pairs:
            la = oracle.fd_eigensolve(measures.truncate(p, a), 800).lambda_
            lb = oracle.fd_eigensolve(measures.truncate(p, b), 800).lambda_
            assert la > lb

    def test_gap_exceeds_nd_eigenvalue(self):
        for D in (0.7, 1.0):
            p_nd = measures.make_problem(preset="laplacian", D=D, case="ND")
            p_nn = measures.make_problem(preset="laplacian", D=D, case="NN")
            assert oracle.fd_eigensolve(p_nn, 800).lambda_ > oracle.fd_eigensolve(p_nd, 800).lambda_

    def test_infinite_interval_rejected(self):
        p = measures.make_problem(preset="ou", D="inf", case="DN")
        with pytest.raises(RangeError):
            oracle.fd_eigensolve(p)

    def test_degenerate_coefficient_bracketed(self):
        # a = sqrt(x): the cascade-graded table carries panels far below the
        # scheme's width floor, which the assembly must merge away
        p = measures.make_problem(a="sqrt(x)", b="0", D=1.0, case="ND", grid_size=1000)
        table = measures.build_tables(p, 1.0)
        sol = oracle.fd_eigensolve(p)
        lo, hi = bounds.basic_bounds("ND", table)
        assert lo - 1e-6 <= sol.lambda_ <= hi + 1e-6
        assert abs(oracle.fd_eigensolve(p, 2000).lambda_ - sol.lambda_) <= 1e-5
        assert oracle.eigen_residuals(sol)["ii_deviation"] <= 5e-3


class TestResiduals:
    @pytest.mark.parametrize("case", ["ND", "DN"])
    def test_identities_near_exact(self, case):
        p = measures.make_problem(preset="laplacian", D=1.0, case=case)
        sol = oracle.fd_eigensolve(p, 2000)
        d = oracle.eigen_residuals(sol)
        assert d["ii_deviation"] <= 5e-3
        assert d["i_deviation"] <= 5e-3
        assert d["strictly_monotone"] and d["sign_constant"]

    def test_ou_identities(self):
        p = measures.make_problem(preset="ou", D=8.0, case="DN")
        sol = oracle.fd_eigensolve(p, 2000)
        d = oracle.eigen_residuals(sol)
        assert d["ii_deviation"] <= 5e-3
        assert d["rayleigh_gap"] <= 1e-10

    def test_decay_at_right_edge_for_large_truncation(self):
        # constant outward drift: scale mass finite, eigenvalue positive, and
        # the ND eigenfunction must die out at ever larger truncations (the
        # meaning of the boundary at infinity)
        p = measures.make_problem(a="1", b="1", D="inf", case="ND")
        edges = []
        for trunc in (8.0, 16.0, 32.0):
            sol = oracle.fd_eigensolve(measures.truncate(p, trunc), 1200)
            mid = np.argmin(np.abs(sol.eigenfunction.x - 0.75 * trunc))
            edges.append(abs(sol.eigenfunction.values[mid]))
        assert edges[0] > edges[1] > edges[2]
        assert edges[2] <= 1e-3


class TestInfiniteDomainLimit:
    def test_ou_dn_converges_to_one(self):
        p = measures.make_problem(preset="ou", D="inf", case="DN")
        lam, trace = oracle.infinite_domain_limit(p)
        assert trace.converged
        assert lam == pytest.approx(1.0, abs=1e-2)
        by_p8 = dict(zip(trace.points, trace.values))[8.0]
        assert by_p8 == pytest.approx(1.0, abs=1e-2)

    def test_laplacian_nd_trace_scales_to_zero(self):
        p = measures.make_problem(preset="laplacian", D="inf", case="ND", grid_size=600)
        lam, trace = oracle.infinite_domain_limit(p)
        expected = [(math.pi / (2 * q)) ** 2 for q in trace.points]
        assert trace.values == pytest.approx(expected, rel=1e-3)
        assert trace.monotone_decreasing
        assert lam == pytest.approx(expected[-1], rel=1e-3)

    def test_finite_interval_rejected(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="ND")
        with pytest.raises(RangeError):
            oracle.infinite_domain_limit(p)

    def test_ou_nn_gap_limit(self):
        # the half-line gap is 2: L(x^2 - 1) = 2 - 2x^2 with zero slope at 0
        p = measures.make_problem(preset="ou", D="inf", case="NN")
        lam, trace = oracle.infinite_domain_limit(p)
        assert lam == pytest.approx(2.0, abs=1e-2)
        assert trace.monotone_decreasing


class TestDuality:
    def test_laplacian_self_dual(self):
        p = measures.make_problem(preset="laplacian", D=1.0, case="ND")
        lam_nd, lam_dn = oracle.duality_pair(p)
        assert lam_nd == pytest.approx(C.PI_SQ_OVER_4, rel=2e-4)
        assert lam_dn == pytest.approx(C.PI_SQ_OVER_4, rel=2e-4)

    def test_ou_pair_two_grids(self):
        p = measures.make_problem(preset="ou", D=3.0, case="ND")
        for n in (1000, 2000):
            lam_nd, lam_dn = oracle.duality_pair(p, n)
            assert abs(lam_nd - lam_dn) <= 1e-3 * abs(lam_nd)

    def test_delta_matches_dual_delta(self, ou_nd_3):
        eps = ou_nd_3.problem.tolerances.bound_refine
        d, _ = bounds.delta("ND", ou_nd_3)
        d_dual, _ = bounds.delta("DN", oracle.dual_table(ou_nd_3))
        assert abs(d - d_dual) <= 10 * eps

    def test_infinite_interval_rejected(self):
        p = measures.make_problem(preset="ou", D="inf", case="ND")
        with pytest.raises(RangeError):
            oracle.duality_pair(p)
