#pragma once

#include "hbar_sweep.hpp"
#include "random.hpp"
#include "saturation.hpp"

#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace qsl {

/// One named invariant. margin = tolerance - worst observed violation, so a
/// negative margin is a failure.
struct InvariantCheck
{
	std::string module;
	std::string name;
	double worst = 0.0;
	double tolerance = 0.0;

	[[nodiscard]] double margin() const { return tolerance - worst; }
	[[nodiscard]] bool passed() const { return std::isfinite(worst) && worst <= tolerance; }
};

struct VerifyReport
{
	std::uint64_t seed = 0;
	std::vector<InvariantCheck> checks;

	[[nodiscard]] bool all_passed() const
	{
		for(const auto& c : checks)
			if(!c.passed())
				return false;
		return true;
	}

	[[nodiscard]] std::string text() const
	{
		std::string out = "qsl verify seed=" + std::to_string(seed) + "\n";
		char buf[256];
		int failed = 0;
		for(const auto& c : checks)
		{
			std::snprintf(buf, sizeof buf, "%s  %-20s %-52s worst=%.3e tol=%.1e margin=%.3e\n",
			              c.passed() ? "PASS" : "FAIL", c.module.c_str(), c.name.c_str(), c.worst, c.tolerance,
			              c.margin());
			out += buf;
			failed += c.passed() ? 0 : 1;
		}
		std::snprintf(buf, sizeof buf, "%zu invariants, %d failed\n", checks.size(), failed);
		out += buf;
		return out;
	}
};

namespace detail {

/// Collects max-violation values for one check.
class Worst
{
public:
	void see(double v) { w_ = std::max(w_, std::isnan(v) ? std::numeric_limits<double>::infinity() : v); }
	[[nodiscard]] double value() const { return w_; }

private:
	double w_ = -std::numeric_limits<double>::infinity();
};

} // namespace detail

/// Runs every module's invariant suite on draws from the given seed. With
/// inject_failure set, one tolerance is corrupted to show the failure path.
[[nodiscard]] inline VerifyReport verify_all(std::uint64_t seed, bool inject_failure = false)
{
	VerifyReport rep;
	rep.seed = seed;
	Rng rng(seed);
	auto add = [&rep](const char* module, const char* name, double worst, double tol) {
		rep.checks.push_back({module, name, worst + 0.0, tol});
	};

	// ---- hs-core
	{
		detail::Worst herm, pos, trace, ident, tracel;
		for(int trial = 0; trial < 60; ++trial)
		{
			const Index d = 2 + trial % 15;
			const cmat a = complex_gaussian_matrix(rng, d, d);
			const cmat b = complex_gaussian_matrix(rng, d, d);
			herm.see(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) / (a.norm() * b.norm()));
			const auto h = random_hamiltonian(rng, d);
			const auto rho = random_density_matrix(rng, d);
			const cmat c = commutator(h, rho);
			tracel.see(std::abs(c.trace()));
			const cvec psi = random_pure_state(rng, d);
			const auto pure = DensityMatrix::pure(psi);
			const cmat cp = commutator(h, pure);
			const cvec hpsi = h.matrix() * psi;
			const double mean = psi.dot(hpsi).real();
			const double var = hpsi.squaredNorm() - mean * mean;
			const double n = h.spectral_norm();
			ident.see(std::abs(-(cp * cp).trace().real() - 2.0 * var) / (n * n));
			const auto rt = evolve(h, rho, 1.7, 1.0);
			trace.see(std::abs(rt.matrix().trace() - cplx(1.0, 0.0)));
			pos.see(std::max(0.0, -SpectralDecomposition(rt.matrix()).eigenvalues()(0)));
		}
		add("hs-core", "hs_inner conjugate symmetry (relative)", herm.value(), 1e-12);
		add("hs-core", "commutator is traceless", tracel.value(), 1e-12);
		add("hs-core", "pure-state identity -Tr[H,rho]^2 = 2 dE^2", ident.value(), 1e-10);
		add("hs-core", "evolution keeps unit trace", trace.value(), 1e-12);
		add("hs-core", "evolution keeps positivity", pos.value(), 1e-10);
	}

	// ---- quantum-qsl
	{
		detail::Worst bound, alpha, pure_alpha;
		for(int trial = 0; trial < 60; ++trial)
		{
			const Index d = 2 + trial % 15;
			const auto h = random_hamiltonian(rng, d);
			const auto rho = random_density_matrix(rng, d);
			const double rate = commutator_dispersion(h, rho, 1.0);
			const double t_max = std::min(4.0 * std::numbers::pi / h.spectral_norm(), 1.5 * std::numbers::pi / rate);
			const auto times = uniform_times(t_max, 100);
			bound.see(-qsl_bound_curve(h, rho, times, 1.0).min_slack_in_window());
			alpha.see(-alpha_bound_curve(h, rho, 2.0, times, 1.0).min_slack_in_window());
			const auto pure = DensityMatrix::pure(random_pure_state(rng, d));
			const auto c1 = qsl_bound_curve(h, pure, times, 1.0);
			const auto c3 = alpha_bound_curve(h, pure, 3.0, times, 1.0);
			for(std::size_t k = 0; k < times.size(); ++k)
				pure_alpha.see(std::abs(c1.lhs[k] - c3.lhs[k]));
		}
		add("quantum-qsl", "relative-purity bound (min slack in window)", bound.value(), inject_failure ? -1.0 : 1e-9);
		add("quantum-qsl", "alpha = 2 bound (min slack in window)", alpha.value(), 1e-9);
		add("quantum-qsl", "pure states are alpha-insensitive", pure_alpha.value(), 1e-10);
	}

	// ---- saturation
	{
		detail::Worst map, mt, nonsat, resid, inv;
		for(int trial = 0; trial < 40; ++trial)
		{
			const Index d = 2 + trial % 10;
			const double omega = 0.5 + 0.1 * trial;
			const auto sat = saturating_hamiltonian(random_pure_state(rng, d), random_pure_state(rng, d), omega);
			const cmat& h = sat.matrix();
			map.see(std::max((h * sat.psi() - omega * sat.psi_tilde()).norm(),
			                 (h * sat.psi_tilde() - omega * sat.psi()).norm()) /
			        omega);
			const double tq = sat.quarter_period(1.0);
			const auto times = uniform_times(tq, 51);
			mt.see(mandelstam_tamm_gap(sat, times, 1.0));
			const auto curve = saturation_bound_curve(sat, times, 1.0);
			for(std::size_t k = 1; k + 1 < times.size(); ++k)
				nonsat.see(-curve.slack[k]);

			const auto a = DensityMatrix::pure(random_pure_state(rng, d));
			const auto b = DensityMatrix::pure(random_pure_state(rng, d));
			// residual must exceed 1e-6: record 1e-6 - residual
			resid.see(1e-6 - commutator_form_residual(a, b).value);
			const auto r0 = random_density_matrix(rng, d);
			const auto rt = evolve(random_hamiltonian(rng, d), r0, 0.9, 1.0);
			const Propagator prop(random_hamiltonian(rng, d), 1.0);
			const cmat uu = prop.unitary(1.3);
			const double x = commutator_form_residual(r0, rt).value;
			const double y = commutator_form_residual(DensityMatrix::assume_valid(uu * r0.matrix() * uu.adjoint()),
			                                          DensityMatrix::assume_valid(uu * rt.matrix() * uu.adjoint()))
			                     .value;
			inv.see(std::abs(x - y) / std::max(1.0, x));
		}
		add("saturation", "mapping relations H psi = w psi~, H psi~ = w psi", map.value(), 1e-12);
		add("saturation", "|<psi|psi_t>|^2 = cos^2(w t / hbar)", mt.value(), 1e-10);
		add("saturation", "relative-purity slack > 0 inside the quarter period", nonsat.value(), 0.0);
		add("saturation", "obstruction residual > 1e-6 on distinct pure pairs", resid.value(), 0.0);
		add("saturation", "obstruction residual unitary invariance", inv.value(), 1e-8);
	}

	// ---- classical-liouville
	{
		const PolynomialHamiltonian osc = PolynomialHamiltonian::harmonic();
		const PhaseSpaceGrid g = square_grid(10.0, 96);
		const PhaseSpaceField rho0 = gaussian_density(g, 1.0, 0.0, 1.0, 1.0);
		const auto times = uniform_times(2.0 * std::numbers::pi, 17);
		const BoundCurve c = csl_bound_curve(osc, rho0, times, 20.0);
		// (rho0, rho_t)/(rho0, rho0) = exp(-a^2 (1 - cos t) / 2) for a unit Gaussian at (a, 0)
		detail::Worst closed;
		for(std::size_t k = 0; k < times.size(); ++k)
			closed.see(std::abs(c.lhs[k] - std::exp(-0.5 * (1.0 - std::cos(times[k])))));
		add("classical-liouville", "rotating Gaussian overlap vs closed form", closed.value(), 1e-3);
		add("classical-liouville", "classical bound (min slack)", -c.min_slack_in_window(), classical_slack_tolerance);

		std::uniform_real_distribution<double> u(-0.5, 0.5);
		const double a = u(rng), b = u(rng);
		const PhaseSpaceGrid gq = square_grid(8.0, 64);
		const auto f = gaussian_density(gq, a, b, 1.0, 1.0);
		const auto h = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
		const auto pb = poisson_bracket(h, f);
		add("classical-liouville", "(f, {H, f}) = 0", std::abs(l2_inner(f, pb)) / std::sqrt(l2_inner(pb, pb)), 1e-8);
	}

	// ---- wigner
	{
		const PositionGrid box{-8.0, 8.0, 256};
		const auto h = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
		std::uniform_real_distribution<double> u(-0.5, 0.5);
		const double q0 = u(rng), p0 = u(rng);
		const auto coh = coherent_state(box, q0, p0, 1.0);
		const auto gib = gibbs_oscillator_state(box, 2.0, 1.0);
		detail::Worst ident, pur, agree, anti, quad;
		const auto times = uniform_times(1.0, 5);
		for(const PositionBasisState* st : {&coh, &gib})
		{
			const auto w0 = wigner_transform(*st);
			const double p = w0.purity();
			pur.see(p - 1.0);
			const Propagator prop(quantize(h, box, 1.0), 1.0);
			for(double t : times)
			{
				const PositionBasisState s(box, prop.evolve(st->density(), t), 1.0);
				const double lhs = wigner_overlap(w0, wigner_transform(s));
				ident.see(std::abs(lhs - hs_inner(st->matrix(), s.matrix()).real()));
			}
			const auto wc = wigner_qsl_bound_curve(h, *st, times);
			const auto mc = matrix_qsl_bound_curve(h, *st, times);
			for(std::size_t k = 0; k < times.size(); ++k)
				agree.see(std::max(std::abs(wc.lhs[k] - mc.lhs[k]), std::abs(wc.rhs[k] - mc.rhs[k])));

			const auto terms = moyal_bracket_terms(PolynomialHamiltonian::harmonic(), w0.field(), 1.0);
			quad.see(std::max(terms.order_hbar2.max_abs(), terms.order_hbar4.max_abs()));
			const auto hf = sample_symbol(h, w0.grid());
			const auto fg = moyal_bracket_terms(hf, w0.field(), 1.0).sum();
			const auto gf = moyal_bracket_terms(w0.field(), hf, 1.0).sum();
			anti.see((fg.values() + gf.values()).cwiseAbs().maxCoeff() / std::max(1e-300, fg.max_abs()));
		}
		add("wigner", "2 pi hbar int W0 Wt = Tr(rho0 rho_t)", ident.value(), 1e-6);
		add("wigner", "purity 2 pi hbar int W^2 <= 1", pur.value(), 1e-6);
		add("wigner", "Wigner-side and matrix-side curves agree", agree.value(), 1e-5);
		add("wigner", "Moyal antisymmetry (relative)", anti.value(), 1e-12);
		add("wigner", "quadratic H: hbar^2 and hbar^4 terms vanish", quad.value(), 0.0);
	}

	// ---- hbar sweep (reduced)
	{
		HbarSweepSetup s;
		s.hamiltonian = PolynomialHamiltonian::parse("0.5 p^2 + 0.5 q^2 + 0.1 q^4");
		s.envelope = {0.5, 0.0, 0.5, 0.5};
		s.hbars = {0.4, 0.2, 0.1};
		s.position = {-5.0, 5.0, 256};
		s.classical = PhaseSpaceGrid{-6.0, 6.0, -12.0, 12.0, 96, 192};
		s.times = uniform_times(1.0, 5);
		const auto r = hbar_sweep(s);
		const auto slope = rate_gap_slope(r.rows);
		add("hbar-sweep", "rate gap slope within 2 +- 0.2", slope ? std::abs(*slope - 2.0) : 1e300, 0.2);
		add("hbar-sweep", "purity strictly decreasing", purity_strictly_decreasing(r.rows) ? 0.0 : 1.0, 0.0);
	}
	return rep;
}

} // namespace qsl
