#include "qsl/quantum_qsl.hpp"
#include "qsl/random.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <numbers>

using namespace qsl;
using Catch::Approx;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

cmat diag(std::initializer_list<double> d)
{
	cmat m = cmat::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
	Index k = 0;
	for(double x : d)
	{
		m(k, k) = x;
		++k;
	}
	return m;
}

cvec ket_plus()
{
	cvec v(2);
	v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
	return v;
}

/// Pade matrix exponential, independent of the spectral route.
cmat expm_evolve(const cmat& h, const cmat& rho, double t, double hbar)
{
	const cmat a = (cplx(0.0, -t / hbar) * h).eval();
	const cmat u = a.exp();
	return u * rho * u.adjoint();
}

} // namespace

TEST_CASE("evolve examples", "[quantum-qsl]")
{
	const HamiltonianMatrix h(diag({0.0, 1.0}));
	const auto plus = DensityMatrix::pure(ket_plus());

	CHECK((evolve(h, plus, 0.0, 1.0).matrix() - plus.matrix()).norm() == 0.0);

	const DensityMatrix stationary(diag({0.7, 0.3}));
	CHECK((evolve(h, stationary, 3.3, 1.0).matrix() - stationary.matrix()).cwiseAbs().maxCoeff() <= 1e-12);

	const auto rho_pi = evolve(h, plus, pi, 1.0);
	CHECK(std::abs(rho_pi.matrix()(0, 1) - cplx(-0.5, 0.0)) < 1e-14);
	CHECK(std::abs(rho_pi.matrix()(1, 0) - cplx(-0.5, 0.0)) < 1e-14);
	CHECK(std::abs(hs_inner(plus.matrix(), rho_pi.matrix())) < 1e-14);

	CHECK_THROWS_AS(evolve(h, DensityMatrix::maximally_mixed(3), 1.0, 1.0), std::invalid_argument);
	CHECK_THROWS_AS(evolve(h, plus, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("evolve agrees with a Pade matrix exponential", "[quantum-qsl]")
{
	Rng rng(41);
	for(int trial = 0; trial < 30; ++trial)
	{
		const Index d = 2 + trial % 10;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const double t = 0.1 + 0.37 * trial;
		const double hbar = 0.5 + 0.05 * trial;
		const cmat oracle = expm_evolve(h.matrix(), rho.matrix(), t, hbar);
		CHECK((evolve(h, rho, t, hbar).matrix() - oracle).cwiseAbs().maxCoeff() <= 1e-10);
	}
}

TEST_CASE("evolution is unitary and obeys the group law", "[quantum-qsl][property]")
{
	Rng rng(43);
	for(int trial = 0; trial < 50; ++trial)
	{
		const Index d = 2 + trial % 15;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const double t1 = 0.3 * trial;
		const double t2 = 1.7 - 0.05 * trial;
		const auto rt = evolve(h, rho, t1, 1.0);

		CHECK(std::abs(rt.matrix().trace() - cplx(1.0, 0.0)) <= 1e-10);
		CHECK(std::abs(purity(rt) - purity(rho)) <= 1e-10);
		const rvec e0 = SpectralDecomposition(rho.matrix()).eigenvalues();
		const rvec et = SpectralDecomposition(rt.matrix()).eigenvalues();
		CHECK((e0 - et).cwiseAbs().maxCoeff() <= 1e-9);

		const auto composed = evolve(h, rt, t2, 1.0);
		const auto direct = evolve(h, rho, t1 + t2, 1.0);
		CHECK((composed.matrix() - direct.matrix()).cwiseAbs().maxCoeff() <= 1e-10);
	}
}

TEST_CASE("bound curve lhs equals relative purity of the evolved state", "[quantum-qsl]")
{
	Rng rng(47);
	for(int trial = 0; trial < 20; ++trial)
	{
		const Index d = 2 + trial % 12;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const auto times = uniform_times(5.0, 17);
		const BoundCurve c = qsl_bound_curve(h, rho, times, 0.8);
		for(std::size_t k = 0; k < times.size(); ++k)
			CHECK(c.lhs[k] == Approx(relative_purity(rho, evolve(h, rho, times[k], 0.8))).margin(1e-12));
	}
}

TEST_CASE("qsl_bound_curve examples", "[quantum-qsl]")
{
	const HamiltonianMatrix h(diag({0.0, 1.0}));
	const auto times = std::vector<double>{0.0, 0.5, 1.0, 2.0, pi};

	SECTION("stationary state")
	{
		const BoundCurve c = qsl_bound_curve(h, DensityMatrix(diag({0.6, 0.4})), times, 1.0);
		for(std::size_t k = 0; k < times.size(); ++k)
		{
			CHECK(c.lhs[k] == Approx(1.0).margin(1e-14));
			CHECK(c.rhs[k] == 1.0);
			CHECK(c.slack[k] == Approx(0.0).margin(1e-14));
		}
	}

	SECTION("two-level |+> closed form")
	{
		const BoundCurve c = qsl_bound_curve(h, DensityMatrix::pure(ket_plus()), times, 1.0);
		CHECK(c.dispersion == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
		CHECK(c.lhs[0] == 1.0);
		CHECK(c.rhs[0] == 1.0);
		for(std::size_t k = 0; k < times.size(); ++k)
		{
			const double ch = std::cos(times[k] / 2.0);
			CHECK(c.lhs[k] == Approx(ch * ch).margin(1e-14));
			CHECK(c.rhs[k] == Approx(std::cos(times[k] / std::sqrt(2.0))).margin(1e-14));
		}
		// t = 1
		CHECK(c.lhs[2] == Approx(0.7701511529).margin(1e-9));
		CHECK(c.rhs[2] == Approx(0.7602445971).margin(1e-9));
		CHECK(c.slack[2] == Approx(0.0099065558).margin(1e-9));
		// t = pi
		CHECK(c.lhs[4] == Approx(0.0).margin(1e-14));
		CHECK(c.rhs[4] == Approx(-0.6056998670).margin(1e-9));
		CHECK(c.slack[4] == Approx(0.6056998670).margin(1e-9));
	}

	SECTION("two-level |+> past the validity horizon")
	{
		// At t = 2 pi sqrt(2) the cosine is back at 1 while cos^2(t/2) is about 0.07.
		const double t_bad = 2.0 * pi * std::sqrt(2.0);
		const BoundCurve c = qsl_bound_curve(h, DensityMatrix::pure(ket_plus()), {0.0, 1.0, t_bad}, 1.0);
		CHECK(c.validity_horizon() == Approx(1.5 * pi * std::sqrt(2.0)).epsilon(1e-14));
		CHECK(c.rhs[2] == Approx(1.0).margin(1e-14));
		CHECK(c.slack[2] < -0.9);
		CHECK(c.holds(1e-12));
	}

	SECTION("time grid validation")
	{
		const auto rho = DensityMatrix::pure(ket_plus());
		CHECK_THROWS_AS(qsl_bound_curve(h, rho, {0.0, 1.0, 0.5}, 1.0), std::invalid_argument);
		CHECK_THROWS_AS(qsl_bound_curve(h, rho, {0.1, 1.0}, 1.0), std::invalid_argument);
		CHECK_THROWS_AS(qsl_bound_curve(h, rho, {}, 1.0), std::invalid_argument);
	}
}

TEST_CASE("relative-purity bound holds for random mixed states", "[quantum-qsl][property]")
{
	Rng rng(53);
	double worst = 1.0;
	for(int trial = 0; trial < 100; ++trial)
	{
		const Index d = 2 + trial % 15;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const double rate = commutator_dispersion(h, rho, 1.0);
		const double t_max = std::min(4.0 * pi / h.spectral_norm(), 1.5 * pi / rate);
		const BoundCurve c = qsl_bound_curve(h, rho, uniform_times(t_max, 200), 1.0);
		CHECK(c.lhs[0] == Approx(1.0).margin(1e-12));
		CHECK(c.rhs[0] == 1.0);
		CHECK(c.min_slack_in_window() == c.min_slack());
		worst = std::min(worst, c.min_slack());
	}
	CHECK(worst >= -1e-9);
}

TEST_CASE("short-time expansion: 1 - lhs = dispersion^2 t^2 / 2 + O(t^4)", "[quantum-qsl][property]")
{
	Rng rng(59);
	for(int trial = 0; trial < 10; ++trial)
	{
		const Index d = 3 + trial;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const auto times = uniform_times(1e-3, 21);
		const BoundCurve c = qsl_bound_curve(h, rho, times, 1.0);

		// Least squares for 1 - lhs = a t^2 + b t^4.
		Eigen::MatrixXd basis(times.size(), 2);
		Eigen::VectorXd y(times.size());
		for(std::size_t k = 0; k < times.size(); ++k)
		{
			const double t2 = times[k] * times[k];
			basis(static_cast<Index>(k), 0) = t2;
			basis(static_cast<Index>(k), 1) = t2 * t2;
			y(static_cast<Index>(k)) = 1.0 - c.lhs[k];
		}
		const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(y);
		const double expected = 0.5 * c.dispersion * c.dispersion;
		CHECK(std::abs(coef(0) - expected) <= 1e-4 * expected);
	}
}

TEST_CASE("alpha_bound_curve", "[quantum-qsl]")
{
	Rng rng(61);
	const auto times = uniform_times(6.0, 50);

	SECTION("alpha = 1 reproduces the plain curve bit for bit")
	{
		const auto h = random_hamiltonian(rng, 6);
		const auto rho = random_density_matrix(rng, 6);
		const BoundCurve a = alpha_bound_curve(h, rho, 1.0, times, 1.0);
		const BoundCurve b = qsl_bound_curve(h, rho, times, 1.0);
		CHECK(a.lhs == b.lhs);
		CHECK(a.rhs == b.rhs);
		CHECK(a.slack == b.slack);
		CHECK(a.dispersion == b.dispersion);
	}

	SECTION("pure states are insensitive to alpha")
	{
		const auto h = random_hamiltonian(rng, 5);
		const auto rho = DensityMatrix::pure(random_pure_state(rng, 5));
		const BoundCurve b = qsl_bound_curve(h, rho, times, 1.0);
		for(double alpha : {0.5, 2.0, 3.0})
		{
			const BoundCurve a = alpha_bound_curve(h, rho, alpha, times, 1.0);
			CHECK(a.dispersion == Approx(b.dispersion).epsilon(1e-10));
			for(std::size_t k = 0; k < times.size(); ++k)
				CHECK(a.lhs[k] == Approx(b.lhs[k]).margin(1e-10));
		}
	}

	SECTION("diagonal mixture under sigma_x, alpha = 2, against brute-force evolution")
	{
		cmat sx(2, 2);
		sx << 0, 1, 1, 0;
		const HamiltonianMatrix h(sx);
		const DensityMatrix rho(diag({0.8, 0.2}));
		const auto grid = uniform_times(2.0 * pi, 100);
		const BoundCurve c = alpha_bound_curve(h, rho, 2.0, grid, 1.0);
		// rate sqrt(0.72 / 0.4112): the window ends near t = 3.56, well inside [0, 2 pi]
		CHECK(c.dispersion == Approx(std::sqrt(0.72 / 0.4112)).epsilon(1e-12));
		CHECK(c.min_slack_in_window() >= 0.0);
		CHECK(c.holds(0.0));
		// Beyond the window the cosine returns to 1 and the inequality is lost.
		CHECK(c.min_slack() < -0.5);

		const cmat a = diag({0.64, 0.04});
		for(std::size_t k = 0; k < grid.size(); ++k)
		{
			const cmat at = expm_evolve(sx, a, grid[k], 1.0);
			const double oracle = hs_inner(a, at).real() / hs_inner(a, a).real();
			CHECK(c.lhs[k] == Approx(oracle).margin(1e-12));
		}
	}

	CHECK_THROWS_AS(alpha_bound_curve(random_hamiltonian(rng, 2), DensityMatrix::maximally_mixed(2), 0.0, times, 1.0),
	                std::invalid_argument);
}

TEST_CASE("alpha family bound holds for random mixed states", "[quantum-qsl][property]")
{
	Rng rng(67);
	for(int trial = 0; trial < 40; ++trial)
	{
		const Index d = 2 + trial % 10;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const auto times = uniform_times(4.0 * pi / h.spectral_norm(), 100);
		for(double alpha : {0.5, 2.0, 3.0})
			CHECK(alpha_bound_curve(h, rho, alpha, times, 1.0).min_slack_in_window() >= -1e-9);
	}
}

TEST_CASE("pure_bound_comparison", "[quantum-qsl]")
{
	const auto rows = pure_bound_comparison({0.0, pi / 4.0, pi / 2.0});
	REQUIRE(rows.size() == 3);
	CHECK(rows[0].mt == 1.0);
	CHECK(rows[0].hs == 1.0);
	CHECK(rows[0].difference == 0.0);
	CHECK(rows[1].mt == Approx(0.5).margin(1e-15));
	CHECK(rows[1].hs == Approx(0.4440158403).margin(1e-9));
	CHECK(rows[1].difference == Approx(0.0559841597).margin(1e-9));
	CHECK(rows[2].mt == Approx(0.0).margin(1e-15));
	CHECK(rows[2].hs == Approx(-0.6056998670).margin(1e-9));
	CHECK(rows[2].difference == Approx(0.6056998670).margin(1e-9));

	std::vector<double> xs;
	for(int k = 0; k <= 1000; ++k)
		xs.push_back(pi / 2.0 * k / 1000.0);
	for(const auto& r : pure_bound_comparison(xs))
		CHECK(r.difference >= -1e-12);

	CHECK_THROWS_AS(pure_bound_comparison({-0.1}), std::invalid_argument);
}

TEST_CASE("orthogonalization_bounds", "[quantum-qsl]")
{
	SECTION("two-level |+>: both bounds equal pi and are saturated")
	{
		const HamiltonianMatrix h(diag({0.0, 1.0}));
		const auto b = orthogonalization_bounds(h, ket_plus(), 1.0);
		CHECK(b.mt_time == Approx(pi).epsilon(1e-14));
		CHECK(b.ml_time == Approx(pi).epsilon(1e-14));
		CHECK(b.combined == Approx(pi).epsilon(1e-14));
		// |<psi|psi_t>|^2 = cos^2(t/2) first vanishes at t = pi.
		const auto rho = DensityMatrix::pure(ket_plus());
		CHECK(relative_purity(rho, evolve(h, rho, pi, 1.0)) == Approx(0.0).margin(1e-14));
		CHECK(relative_purity(rho, evolve(h, rho, 0.99 * pi, 1.0)) > 0.0);
	}

	SECTION("three-level superposition of |0> and |2>")
	{
		const HamiltonianMatrix h(diag({0.0, 1.0, 2.0}));
		cvec psi(3);
		psi << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
		const auto b = orthogonalization_bounds(h, psi, 1.0);
		CHECK(b.mt_time == Approx(pi / 2.0).epsilon(1e-14));
		CHECK(b.ml_time == Approx(pi / 2.0).epsilon(1e-14));
		CHECK(b.combined == std::max(b.mt_time, b.ml_time));
	}

	SECTION("combined is the max of the two")
	{
		Rng rng(71);
		for(int trial = 0; trial < 20; ++trial)
		{
			const auto h = random_hamiltonian(rng, 4);
			const auto b = orthogonalization_bounds(h, random_pure_state(rng, 4), 0.7);
			CHECK(b.combined == std::max(b.mt_time, b.ml_time));
		}
	}

	SECTION("eigenstates have no finite bound")
	{
		const HamiltonianMatrix h(diag({0.0, 1.0}));
		cvec e1(2);
		e1 << 0.0, 1.0;
		CHECK_THROWS_AS(orthogonalization_bounds(h, e1, 1.0), NumericalError);
		cvec unnormalized(2);
		unnormalized << 1.0, 1.0;
		CHECK_THROWS_AS(orthogonalization_bounds(h, unnormalized, 1.0), std::invalid_argument);
	}
}
