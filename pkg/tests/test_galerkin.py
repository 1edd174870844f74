import math

import numpy as np
import pytest
from scipy.integrate import quad

import hermscale as hs
from hermscale import galerkin
from hermscale.basis import ScaledBasis
from hermscale.fourier import DecayMeta, TestFunction
from hermscale.quadrature import compute_grid

PI_M4 = np.pi ** -0.25


def plain_rhs(eval_u):
    return TestFunction(id="rhs", eval_u=eval_u, eval_Fu=None,
                        spatial_tail=lambda m: 0.0,
                        frequency_tail=lambda k: 0.0, l2_norm=1.0,
                        decay_meta=DecayMeta("exponential", 2, "exponential", 2))


def dense_matrix(system):
    n = system.basis.size
    a = np.diag(system.diag)
    for i, v in enumerate(system.offdiag2):
        a[i, i + 2] = a[i + 2, i] = v
    return a


def scaled_basis_derivative_values(basis, x):
    """phi_n'(x) via the alternative identity h_n' = sqrt(2n) h_{n-1} - x h_n,
    an independent route from the coupling form used by the assembler."""
    y = basis.beta * x
    h = hs.eval_hermite_functions(y, basis.n_max)
    out = np.empty_like(h)
    out[0] = -y * h[0]
    for n in range(1, basis.n_max + 1):
        out[n] = math.sqrt(2.0 * n) * h[n - 1] - y * h[n]
    return basis.beta ** 1.5 * out


class TestAssembly:
    def test_minimal_system(self):
        s = galerkin.assemble(ScaledBasis(0, 1.0), 1.0)
        assert s.diag == pytest.approx([1.5], rel=1e-15)
        assert s.offdiag2.size == 0

    def test_first_coupling(self):
        s = galerkin.assemble(ScaledBasis(2, 1.0), 1.0)
        assert s.offdiag2[0] == pytest.approx(-math.sqrt(2.0) / 2.0, rel=1e-15)

    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            galerkin.assemble(ScaledBasis(2, 1.0), 0.0)

    def test_matches_quadrature_inner_products(self):
        beta, gamma, n = 1.7, 2.0, 6
        basis = ScaledBasis(n, beta)
        s = galerkin.assemble(basis, gamma)
        a = dense_matrix(s)
        cut = (math.sqrt(2 * n + 1) + 14.0) / beta
        for m in range(n + 1):
            for k in range(m, n + 1):
                def stiff(x):
                    d = scaled_basis_derivative_values(basis, np.asarray(x))
                    return d[m] * d[k]
                def mass(x):
                    v = hs.eval_scaled_basis(basis, np.asarray(x))
                    return v[m] * v[k]
                ref = quad(stiff, -cut, cut, epsabs=1e-13, epsrel=1e-12,
                           limit=300)[0] \
                    + gamma * quad(mass, -cut, cut, epsabs=1e-13,
                                   epsrel=1e-12, limit=300)[0]
                assert abs(a[m, k] - ref) < 1e-10


class TestSolve:
    def test_exact_solution_in_space(self):
        # -u'' + u with u = h_0 gives f = (2 - x^2) h_0, inside the space
        # for N >= 2, so the solver must return e_0 exactly.
        f = plain_rhs(lambda x: (2.0 - np.asarray(x) ** 2) * PI_M4
                      * np.exp(-np.asarray(x) ** 2 / 2.0))
        problem = galerkin.ModelProblem(1.0, f)
        for n in (2, 6, 11):
            c = galerkin.solve(problem, ScaledBasis(n, 1.0), compute_grid(n))
            expect = np.zeros(n + 1)
            expect[0] = 1.0
            assert np.abs(c.values - expect).max() < 1e-10

    def test_narrow_gaussian_at_matched_scale(self):
        # exp(-x^2) = phi_0-multiple at beta = sqrt(2).
        u = hs.gaussian_power(1)
        problem = galerkin.manufactured_problem(u, 1.0)
        basis = ScaledBasis(8, math.sqrt(2.0))
        c = galerkin.solve(problem, basis, compute_grid(8))
        expect = np.zeros(9)
        expect[0] = np.pi ** 0.25 / 2.0 ** 0.25
        assert np.abs(c.values - expect).max() < 1e-10

    def test_parity_split_matches_dense(self):
        u = hs.algebraic(1.0)
        problem = galerkin.manufactured_problem(u, 1.0)
        basis = ScaledBasis(32, 1.3)
        grid = compute_grid(32)
        c = galerkin.solve(problem, basis, grid)
        system = galerkin.assemble(basis, 1.0)
        b = hs.analysis(grid, problem.rhs.eval_u(grid.scaled_nodes(1.3)),
                        1.3).values
        dense = np.linalg.solve(dense_matrix(system), b)
        assert np.abs(c.values - dense).max() < 1e-12

    def test_galerkin_orthogonality(self):
        # f = h_0 is reproduced exactly by interpolation, so the discrete
        # solution satisfies a(u - u_N, phi_m) = (f, phi_m) - a(u_N, phi_m)
        # = 0 even though u itself lies outside the space.
        n = 10
        basis = ScaledBasis(n, 1.0)
        f = plain_rhs(lambda x: PI_M4 * np.exp(-np.asarray(x) ** 2 / 2.0))
        c = galerkin.solve(galerkin.ModelProblem(1.0, f), basis, compute_grid(n))
        dc = hs.differentiate(c)
        cut = math.sqrt(2 * n + 3) + 14.0
        for m in (0, 1, 4, 9):
            def a_form(x):
                xs = np.asarray(x)
                d = scaled_basis_derivative_values(basis, xs)
                v = hs.eval_scaled_basis(basis, xs)
                return (hs.synthesize(dc, xs) * d[m]
                        + hs.synthesize(c, xs) * v[m])
            lhs = quad(a_form, -cut, cut, epsabs=1e-12, epsrel=1e-12,
                       limit=400)[0]
            rhs = quad(lambda x: f.eval_u(np.asarray(x))
                       * hs.eval_scaled_basis(basis, np.asarray(x))[m],
                       -cut, cut, epsabs=1e-12, epsrel=1e-12, limit=400)[0]
            assert abs(lhs - rhs) < 1e-8

    def test_scaling_consistency(self):
        # Change of variables: with gamma/beta^2 and samples scaled by
        # beta^(-5/2), the unscaled solve returns identical coefficients.
        u = hs.algebraic(2.0)
        gamma, beta, n = 1.0, 1.8, 24
        problem = galerkin.manufactured_problem(u, gamma)
        grid = compute_grid(n)
        c_scaled = galerkin.solve(problem, ScaledBasis(n, beta), grid)

        transported = plain_rhs(
            lambda y: problem.rhs.eval_u(np.asarray(y) / beta) / beta ** 2.5)
        c_plain = galerkin.solve(
            galerkin.ModelProblem(gamma / beta ** 2, transported),
            ScaledBasis(n, 1.0), grid)
        assert np.abs(c_scaled.values - c_plain.values).max() < 1e-10

    def test_table_regime_beta_choice(self):
        # At N=400 the 30/sqrt(N) schedule (beta = 1.5) beats beta = 5.
        u = hs.algebraic(1.0)
        problem = galerkin.manufactured_problem(u, 1.0)
        grid = compute_grid(400)
        errs = {}
        for beta in (1.5, 5.0):
            c = galerkin.solve(problem, ScaledBasis(400, beta), grid)
            errs[beta] = galerkin.solution_error(c, u, include_h1=False)["l2"]
        assert errs[1.5] < errs[5.0]

    def test_grid_mismatch(self):
        u = hs.algebraic(1.0)
        problem = galerkin.manufactured_problem(u, 1.0)
        with pytest.raises(ValueError):
            galerkin.solve(problem, ScaledBasis(4, 1.0), compute_grid(5))


class TestSolutionError:
    def test_zero_for_recovered_solution(self):
        u = hs.gaussian_power(1)
        problem = galerkin.manufactured_problem(u, 1.0)
        basis = ScaledBasis(8, math.sqrt(2.0))
        c = galerkin.solve(problem, basis, compute_grid(8))
        err = galerkin.solution_error(c, u)
        assert err["l2"] < 1e-10
        assert err["h1"] < 1e-9

    def test_monotone_decrease(self):
        u = hs.algebraic(1.0)
        problem = galerkin.manufactured_problem(u, 1.0)
        errs = []
        for n in (64, 128):
            c = galerkin.solve(problem, ScaledBasis(n, 1.0), compute_grid(n))
            errs.append(galerkin.solution_error(c, u, include_h1=False)["l2"])
        assert errs[0] > errs[1] > 0

    def test_h1_dominates_l2(self):
        u = hs.algebraic(1.5)
        problem = galerkin.manufactured_problem(u, 1.0)
        for n, beta in ((16, 1.0), (24, 2.0)):
            c = galerkin.solve(problem, ScaledBasis(n, beta), compute_grid(n))
            err = galerkin.solution_error(c, u)
            assert err["h1"] >= err["l2"]

    def test_requires_derivative(self):
        u = hs.algebraic(1.0)
        problem = galerkin.manufactured_problem(u, 1.0)
        basis = ScaledBasis(8, 1.0)
        c = galerkin.solve(problem, basis, compute_grid(8))
        bare = plain_rhs(u.eval_u)
        with pytest.raises(ValueError):
            galerkin.solution_error(c, bare)

    def test_discrete_norm_tracks_continuous_for_fast_decay(self):
        # For a rapidly decaying solution nothing lives outside the
        # collocation interval, so the two norms agree in order of
        # magnitude; the grid rule aliases the out-of-space residual, so
        # exact agreement is not expected.
        u = hs.gaussian_power(2)
        problem = galerkin.manufactured_problem(u, 1.0)
        basis = ScaledBasis(48, 1.0)
        grid = compute_grid(48)
        c = galerkin.solve(problem, basis, grid)
        full = galerkin.solution_error(c, u, include_h1=False)["l2"]
        disc = galerkin.discrete_solution_error(c, u, grid)
        assert full / 4.0 < disc < 4.0 * full


class TestCeaSanity:
    def test_single_constant_controls_h1_error(self):
        # ||u - u_N||_1 <= C (H1 projection error + interpolation error of f)
        # with one constant across the algebraic family.
        ratios = []
        for h in (1.0, 2.0, 3.0):
            u = hs.algebraic(h)
            problem = galerkin.manufactured_problem(u, 1.0)
            for n in (64, 128):
                basis = ScaledBasis(n, 1.0)
                grid = compute_grid(n)
                c = galerkin.solve(problem, basis, grid)
                h1 = galerkin.solution_error(c, u)["h1"]

                p = hs.project(u, basis, tol=1e-12)
                from hermscale.operators import residual_l2
                pl2 = residual_l2(u.eval_u, u.spatial_tail, p)
                dp = hs.differentiate(p)
                du = u.derivative()
                pd = residual_l2(u.eval_du, du.spatial_tail, dp)
                proj_h1 = math.sqrt(pl2 ** 2 + pd ** 2)

                f_int = hs.interpolation_error(problem.rhs, basis, grid)
                ratios.append(h1 / (proj_h1 + f_int))
        assert max(ratios) / min(ratios) < 10.0
        assert max(ratios) < 5.0


class TestManufacturedProblem:
    def test_requires_second_derivative(self):
        bare = plain_rhs(lambda x: np.exp(-np.asarray(x) ** 2))
        with pytest.raises(ValueError):
            galerkin.manufactured_problem(bare, 1.0)

    def test_rhs_transform_closed_form(self):
        u = hs.plain_gaussian(1.0)
        problem = galerkin.manufactured_problem(u, 2.0)
        k = 1.3
        expect = (2.0 + k * k) * float(u.eval_Fu(k))
        assert float(problem.rhs.eval_Fu(k)) == pytest.approx(expect, rel=1e-13)

    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            galerkin.ModelProblem(-1.0, plain_rhs(lambda x: x))
