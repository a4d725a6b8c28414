// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "qsl/qsl.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

using namespace qsl;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
	bool pass = true;
	std::string detail;
};

class Timer
{
public:
	[[nodiscard]] double seconds() const
	{
		return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
	}

private:
	std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
	char buf[256];
	std::snprintf(buf, sizeof buf, f, a, b, c, d);
	return buf;
}

// 1. Relative-purity bound over random pairs.
Outcome quantum_bound()
{
	Timer timer;
	Rng rng(1001);
	double worst = std::numeric_limits<double>::infinity();
	for(int trial = 0; trial < 500; ++trial)
	{
		const Index d = 2 + trial % 15;
		const auto h = random_hamiltonian(rng, d);
		const auto rho = random_density_matrix(rng, d);
		const double rate = commutator_dispersion(h, rho, 1.0);
		const double t_max = std::min(4.0 * pi / h.spectral_norm(), 1.5 * pi / rate);
		worst = std::min(worst, qsl_bound_curve(h, rho, uniform_times(t_max, 200), 1.0).min_slack());
	}
	const double s = timer.seconds();
	return {worst >= -1e-9 && s <= 60.0, fmt("500 pairs, min slack %.3e (>= -1e-9), %.1f s (<= 60 s)", worst, s)};
}

// 2. Pure-state identity.
Outcome pure_identity()
{
	Timer timer;
	Rng rng(1002);
	double worst = 0.0;
	for(int trial = 0; trial < 200; ++trial)
	{
		const Index d = 2 + trial % 15;
		const auto h = random_hamiltonian(rng, d);
		const cvec psi = random_pure_state(rng, d);
		const cmat c = commutator(h, DensityMatrix::pure(psi));
		const double var = energy_variance(h, psi);
		const double n = h.spectral_norm();
		worst = std::max(worst, std::abs(-(c * c).trace().real() - 2.0 * var) / (n * n));
	}
	const double s = timer.seconds();
	return {worst <= 1e-10 && s <= 5.0, fmt("200 states, max |lhs - 2 dE^2| / ||H||^2 = %.3e (<= 1e-10), %.2f s", worst, s)};
}

// 3. Two-level closed form.
Outcome two_level()
{
	cmat hm = cmat::Zero(2, 2);
	hm(1, 1) = 1.0;
	cvec plus(2);
	plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
	const auto times = uniform_times(pi / std::sqrt(2.0), 401);
	const auto c = qsl_bound_curve(HamiltonianMatrix(hm), DensityMatrix::pure(plus), times, 1.0);
	double lhs_err = 0.0;
	double interior = std::numeric_limits<double>::infinity();
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		const double ct = std::cos(times[k] / 2.0);
		lhs_err = std::max(lhs_err, std::abs(c.lhs[k] - ct * ct));
		if(k > 0 && k + 1 < times.size())
			interior = std::min(interior, c.slack[k]);
	}
	const double rate_err = std::abs(c.dispersion - 1.0 / std::sqrt(2.0));
	return {lhs_err <= 1e-12 && rate_err <= 1e-12 && interior > 0.0,
	        fmt("lhs err %.2e, rate err %.2e (<= 1e-12), min slack on open interval %.3e (> 0)", lhs_err, rate_err,
	            interior)};
}

// 4. Saturating generator: Mandelstam-Tamm equality, relative-purity slack.
Outcome non_saturation()
{
	Rng rng(1004);
	double gap = 0.0;
	double slack = std::numeric_limits<double>::infinity();
	for(int trial = 0; trial < 50; ++trial)
	{
		cvec psi, phi;
		if(trial == 0)
		{
			psi = cvec::Zero(2);
			psi(0) = 1.0;
			phi = cvec::Constant(2, 1.0 / std::sqrt(2.0));
		}
		else
		{
			const Index d = 2 + trial % 10;
			psi = random_pure_state(rng, d);
			phi = random_pure_state(rng, d);
		}
		const double omega = trial == 0 ? 1.0 : 0.3 + 0.1 * trial;
		const double hbar = trial % 3 == 0 ? 1.0 : 0.4;
		const auto sat = saturating_hamiltonian(psi, phi, omega);
		gap = std::max(gap, mandelstam_tamm_gap(sat, uniform_times(sat.quarter_period(hbar), 101), hbar));
		const auto c = saturation_bound_curve(sat, {0.0, pi * hbar / (4.0 * omega)}, hbar);
		slack = std::min(slack, c.slack[1]);
	}
	return {gap <= 1e-10 && slack > 1e-6,
	        fmt("50 arcs, max ||<psi|psi_t>|^2 - cos^2| = %.2e (<= 1e-10), min slack at pi hbar/4w = %.4f (> 1e-6)", gap,
	            slack)};
}

// 5. Trace obstruction residual.
Outcome obstruction()
{
	cvec plus = cvec::Constant(2, 1.0 / std::sqrt(2.0));
	cvec zero = cvec::Zero(2);
	zero(0) = 1.0;
	const double r = commutator_form_residual(DensityMatrix::pure(plus), DensityMatrix::pure(zero)).value;
	const double err = std::abs(r - 1.0 / std::sqrt(3.0));
	Rng rng(1005);
	double min_random = std::numeric_limits<double>::infinity();
	double max_same = 0.0;
	bool flagged = true;
	for(int trial = 0; trial < 100; ++trial)
	{
		const Index d = 2 + trial % 15;
		const auto a = DensityMatrix::pure(random_pure_state(rng, d));
		const auto b = DensityMatrix::pure(random_pure_state(rng, d));
		min_random = std::min(min_random, commutator_form_residual(a, b).value);
		const auto same = commutator_form_residual(a, a);
		max_same = std::max(max_same, same.value);
		flagged = flagged && same.degenerate;
	}
	return {err <= 1e-10 && min_random > 1e-6 && max_same == 0.0 && flagged,
	        fmt("|+>/|0> residual err %.2e (<= 1e-10), min over 100 random pairs %.4f (> 1e-6), identical pairs %.1f",
	            err, min_random, max_same)};
}

// 6. Classical bound: rotating Gaussian and quartic flow.
Outcome classical_bound()
{
	Timer timer;
	const auto osc = PolynomialHamiltonian::harmonic();
	const PhaseSpaceGrid g = square_grid(10.0, 256);
	const auto f = gaussian_density(g, 1.0, 0.0, 1.0, 1.0);
	const auto times = uniform_times(2.0 * pi, 65);
	const auto rot = csl_bound_curve(osc, f, times, 20.0);
	double closed = 0.0;
	for(std::size_t k = 0; k < times.size(); ++k)
		closed = std::max(closed, std::abs(rot.lhs[k] - std::exp(-0.5 * (1.0 - std::cos(times[k])))));

	const auto quartic = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
	const PhaseSpaceGrid tall{-10.0, 10.0, -40.0, 40.0, 128, 512};
	const auto fq = gaussian_density(tall, 1.0, 0.0, 1.0, 1.0);
	const auto qc = csl_bound_curve(quartic, fq, uniform_times(2.0, 41), 20.0);
	const double s = timer.seconds();
	return {closed <= 1e-3 && rot.min_slack() >= -1e-3 && qc.min_slack() >= -1e-3 && s <= 120.0,
	        fmt("rotating: overlap err %.2e, min slack %.2e; quartic min slack %.2e (>= -1e-3); %.1f s", closed,
	            rot.min_slack(), qc.min_slack(), s)};
}

// 7. alpha family: evolve-then-power vs power-then-evolve; alpha = 1 identical.
Outcome alpha_family()
{
	const auto osc = PolynomialHamiltonian::harmonic();
	const PhaseSpaceGrid g = square_grid(10.0, 256);
	const auto f = gaussian_density(g, 1.0, 0.0, 1.0, 1.0);
	const auto times = uniform_times(2.0 * pi, 65);
	const auto a1 = alpha_csl_bound_curve(osc, f, 1.0, times, 20.0);
	const auto c1 = csl_bound_curve(osc, f, times, 20.0);
	const bool identical = a1.lhs == c1.lhs && a1.rhs == c1.rhs && a1.slack == c1.slack;

	double gap = 0.0;
	for(double alpha : {0.5, 2.0, 3.0})
		gap = std::max(gap, alpha_order_gap(osc, f, alpha, 2.0 * pi, detail::substeps(2.0 * pi, 20.0)));
	const auto quartic = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
	const PhaseSpaceGrid tall{-10.0, 10.0, -40.0, 40.0, 256, 1024};
	const auto fq = gaussian_density(tall, 1.0, 0.0, 1.0, 1.0);
	for(double alpha : {0.5, 2.0})
		gap = std::max(gap, alpha_order_gap(quartic, fq, alpha, 2.0, 40));
	return {gap <= 1e-4 && identical,
	        fmt("max relative order gap %.2e (<= 1e-4), alpha = 1 curve identical: ", gap) + (identical ? "yes" : "no")};
}

// 8. Trace-overlap identity and purity inequality at N = 256.
Outcome wigner_identity()
{
	const PositionGrid box{-9.0, 9.0, 256}; // +-8 lets the coherent tail reach the edge check
	const double hbar = 1.0;
	const auto quartic = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
	double ident = 0.0;
	double purity_excess = -1.0;
	double pure_gap = 0.0;
	const std::vector<PositionBasisState> states{coherent_state(box, 1.0, 0.5, hbar), oscillator_eigenstate(box, 1, hbar),
	                                             oscillator_eigenstate(box, 3, hbar), gibbs_oscillator_state(box, 1.5, hbar),
	                                             gaussian_mixed_state(box, -0.5, 0.3, 1.0, 0.8, hbar)};
	for(const auto& poly : {quartic, PolynomialHamiltonian::harmonic()})
	{
		const Propagator prop(quantize(poly, box, hbar), hbar);
		for(const auto& st : states)
		{
			const auto w0 = wigner_transform(st);
			purity_excess = std::max(purity_excess, w0.purity() - 1.0);
			const double mp = purity(st.density());
			if(std::abs(mp - 1.0) <= 1e-6)
				pure_gap = std::max(pure_gap, std::abs(w0.purity() - 1.0));
			for(double t : {0.3, 1.0, 2.5})
			{
				const PositionBasisState s(box, prop.evolve(st.density(), t), hbar);
				const auto wt = wigner_transform(s);
				purity_excess = std::max(purity_excess, wt.purity() - 1.0);
				ident = std::max(ident, std::abs(wigner_overlap(w0, wt) - hs_inner(st.matrix(), s.matrix()).real()));
			}
		}
	}
	return {ident <= 1e-6 && purity_excess <= 1e-6 && pure_gap <= 1e-6,
	        fmt("max |2 pi hbar int W0 Wt - Tr| = %.2e, max purity - 1 = %.2e, pure-state purity gap %.2e (<= 1e-6)", ident,
	            purity_excess, pure_gap)};
}

// 9. Wigner-side vs matrix-side bound curves.
Outcome wigner_bound()
{
	// dx = 0.05 keeps the hbar = 0.5 Gibbs state inside the momentum band
	const PositionGrid box{-10.0, 10.0, 400};
	const auto quartic = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
	const auto times = uniform_times(2.0, 21);
	double worst = 0.0;
	for(double hbar : {1.0, 0.5})
		for(const auto& st : {coherent_state(box, 1.0, 0.5, hbar), gibbs_oscillator_state(box, 1.5, hbar)})
		{
			const auto w = wigner_qsl_bound_curve(quartic, st, times);
			const auto m = matrix_qsl_bound_curve(quartic, st, times);
			worst = std::max(worst, std::abs(w.dispersion - m.dispersion));
			for(std::size_t k = 0; k < times.size(); ++k)
				worst = std::max({worst, std::abs(w.lhs[k] - m.lhs[k]), std::abs(w.rhs[k] - m.rhs[k])});
		}
	return {worst <= 1e-5, fmt("coherent and Gibbs, hbar in {1, 0.5}: max pointwise difference %.2e (<= 1e-5)", worst)};
}

// 10. hbar -> 0 convergence.
Outcome classical_limit()
{
	Timer timer;
	HbarSweepSetup s;
	s.envelope = {0.5, 0.0, 0.5, 0.5};
	s.hbars = {0.4, 0.2, 0.1, 0.05};
	s.position = {-5.0, 5.0, 512};
	s.classical = PhaseSpaceGrid{-6.0, 6.0, -12.0, 12.0, 192, 384};
	s.times = uniform_times(2.0, 21);

	s.hamiltonian = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
	const auto quartic = hbar_sweep(s);
	const auto slope = rate_gap_slope(quartic.rows);

	s.hamiltonian = PolynomialHamiltonian::harmonic();
	const auto quadratic = hbar_sweep(s);
	bool zero = true;
	for(const auto& r : quadratic.rows)
		zero = zero && r.rate_gap == 0.0;
	const bool decreasing = purity_strictly_decreasing(quartic.rows) && purity_strictly_decreasing(quadratic.rows);
	const double sec = timer.seconds();
	const double sl = slope ? *slope : std::numeric_limits<double>::quiet_NaN();
	return {slope && std::abs(sl - 2.0) <= 0.2 && zero && decreasing && sec <= 300.0,
	        fmt("rate-gap slope %.4f (2 +- 0.2), quadratic gap zero: ", sl) + (zero ? "yes" : "no") +
	            ", purity decreasing: " + (decreasing ? "yes" : "no") + fmt(", %.1f s (<= 300 s)", sec)};
}

} // namespace

int main()
{
	const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
	    {"quantum bound over random pairs", quantum_bound},
	    {"pure-state identity", pure_identity},
	    {"two-level closed form", two_level},
	    {"non-saturation under the saturating generator", non_saturation},
	    {"commutator-form obstruction", obstruction},
	    {"classical bound", classical_bound},
	    {"alpha family", alpha_family},
	    {"Wigner trace-overlap identity and purity", wigner_identity},
	    {"Wigner-side bound equivalence", wigner_bound},
	    {"classical limit hbar -> 0", classical_limit},
	};
	int failed = 0;
	for(std::size_t k = 0; k < criteria.size(); ++k)
	{
		Outcome o;
		try
		{
			o = criteria[k].second();
		}
		catch(const std::exception& e)
		{
			o = {false, std::string("error: ") + e.what()};
		}
		std::printf("criterion %2zu %s  %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
		std::fflush(stdout);
		failed += o.pass ? 0 : 1;
	}
	std::printf("%d of %zu criteria failed\n", failed, criteria.size());
	return failed == 0 ? 0 : 1;
}
