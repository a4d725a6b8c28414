#pragma once

#include "quantum_qsl.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace qsl {

namespace tol {
inline constexpr double saturation_orthonormal = 1e-12;
inline constexpr double saturation_mapping = 1e-12;
inline constexpr double saturation_spectrum = 1e-10;
inline constexpr double unit_vector = 1e-10;
inline constexpr double obstruction_denominator = 1e-12;
} // namespace tol

/// Two-level generator H = omega (|psi><psi~| + |psi~><psi|) that rotates psi
/// along the great circle towards phi. On the plane spanned by psi and psi~ it
/// acts like omega sigma_y, so |<psi|psi_t>|^2 = cos^2(omega t / hbar).
class SaturatingHamiltonian
{
public:
	SaturatingHamiltonian(const cvec& psi, const cvec& phi, double omega) : omega_(omega), h_(cmat::Zero(1, 1))
	{
		detail::require(omega > 0.0 && std::isfinite(omega), "saturating_hamiltonian: omega must be positive");
		detail::require(psi.size() >= 2 && psi.size() == phi.size(), "saturating_hamiltonian: dimension mismatch");
		detail::require(psi.allFinite() && phi.allFinite(), "saturating_hamiltonian: non-finite entries");
		detail::require(std::abs(psi.norm() - 1.0) <= tol::unit_vector && std::abs(phi.norm() - 1.0) <= tol::unit_vector,
		                "saturating_hamiltonian: inputs must be unit vectors");
		psi_ = psi / psi.norm();
		const cvec u = phi / phi.norm();
		const cplx c = psi_.dot(u);
		if(1.0 - std::norm(c) <= tol::obstruction_denominator)
			throw std::invalid_argument("saturating_hamiltonian: zero-length arc (colinear states)");

		// i (phi - psi <psi|phi>) / sqrt(1 - |<phi|psi>|^2), projected twice for accuracy.
		cvec v = u - psi_ * c;
		v -= psi_ * psi_.dot(v);
		tilde_ = cplx(0.0, 1.0) * v / v.norm();

		h_ = HamiltonianMatrix(omega_ * (psi_ * tilde_.adjoint() + tilde_ * psi_.adjoint()));
		check();
	}

	[[nodiscard]] double omega() const { return omega_; }
	[[nodiscard]] const HamiltonianMatrix& hamiltonian() const { return h_; }
	[[nodiscard]] const cmat& matrix() const { return h_.matrix(); }
	[[nodiscard]] const cvec& psi() const { return psi_; }
	[[nodiscard]] const cvec& psi_tilde() const { return tilde_; }

	/// End of the first quarter period, where psi_t becomes orthogonal to psi.
	[[nodiscard]] double quarter_period(double hbar) const { return 0.5 * std::numbers::pi * hbar / omega_; }

private:
	void check() const
	{
		if(std::abs(psi_.dot(tilde_)) > tol::saturation_orthonormal ||
		   std::abs(tilde_.squaredNorm() - 1.0) > tol::saturation_orthonormal)
			throw NumericalError("saturating_hamiltonian: psi~ is not a unit vector orthogonal to psi");
		const cmat& h = h_.matrix();
		const double map = std::max((h * psi_ - omega_ * tilde_).norm(), (h * tilde_ - omega_ * psi_).norm());
		if(map > tol::saturation_mapping * std::max(1.0, omega_))
			throw NumericalError("saturating_hamiltonian: mapping relations H psi = omega psi~, H psi~ = omega psi fail");

		const rvec e = SpectralDecomposition(h).eigenvalues();
		const double budget = tol::saturation_spectrum * std::max(1.0, omega_);
		int nonzero = 0;
		for(Index k = 0; k < e.size(); ++k)
		{
			const double d = std::min({std::abs(e(k)), std::abs(e(k) - omega_), std::abs(e(k) + omega_)});
			if(d > budget)
				throw NumericalError("saturating_hamiltonian: eigenvalue outside {-omega, 0, omega}");
			if(std::abs(e(k)) > budget)
				++nonzero;
		}
		if(nonzero > 2)
			throw NumericalError("saturating_hamiltonian: rank exceeds 2");
	}

	double omega_;
	cvec psi_;
	cvec tilde_;
	HamiltonianMatrix h_;
};

[[nodiscard]] inline SaturatingHamiltonian saturating_hamiltonian(const cvec& psi, const cvec& phi, double omega = 1.0)
{
	return SaturatingHamiltonian(psi, phi, omega);
}

/// |<psi|psi_t>|^2 under the saturating generator.
[[nodiscard]] inline std::vector<double> survival_probability(const SaturatingHamiltonian& sat,
                                                              const std::vector<double>& times, double hbar)
{
	detail::require_time_grid(times, "survival_probability");
	const Propagator prop(sat.hamiltonian(), hbar);
	std::vector<double> out;
	out.reserve(times.size());
	for(double t : times)
		out.push_back(std::norm(sat.psi().dot(prop.unitary(t) * sat.psi())));
	return out;
}

/// Largest |survival - cos^2(omega t / hbar)| over the samples.
[[nodiscard]] inline double mandelstam_tamm_gap(const SaturatingHamiltonian& sat, const std::vector<double>& times,
                                                double hbar)
{
	const auto s = survival_probability(sat, times, hbar);
	double worst = 0.0;
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		const double c = std::cos(sat.omega() * times[k] / hbar);
		worst = std::max(worst, std::abs(s[k] - c * c));
	}
	return worst;
}

/// Relative-purity bound along the same evolution; its dispersion is
/// sqrt(2) omega / hbar.
[[nodiscard]] inline BoundCurve saturation_bound_curve(const SaturatingHamiltonian& sat, const std::vector<double>& times,
                                                       double hbar)
{
	return qsl_bound_curve(sat.hamiltonian(), DensityMatrix::pure(sat.psi()), times, hbar);
}

struct ObstructionResidual
{
	double value = 0.0;
	/// Set when rho_t and rho0 are Cauchy-Schwarz parallel and the residual is 0 by convention.
	bool degenerate = false;
};

/// |Tr| of the right-hand side a commutator-form generator would have to
/// produce: omega (||rho0||^2 - Tr(rho0 rho_t)) / sqrt(||rho0||^2 ||rho_t||^2 - Tr^2(rho0 rho_t)).
/// Tr [H, rho0] = 0 for every H, so a nonzero value rules all of them out.
/// Along a unitary orbit the value vanishes only at rho_t = rho0.
[[nodiscard]] inline ObstructionResidual commutator_form_residual(const DensityMatrix& rho0, const DensityMatrix& rhot,
                                                                  double omega = 1.0)
{
	detail::require_same_dim(rho0.matrix(), rhot.matrix(), "commutator_form_residual");
	detail::require(omega > 0.0, "commutator_form_residual: omega must be positive");
	const double p0 = purity(rho0);
	const double pt = purity(rhot);
	const double ov = hs_inner(rho0.matrix(), rhot.matrix()).real();
	const double gram = p0 * pt - ov * ov;
	if(gram <= 0.0 || std::sqrt(gram) <= tol::obstruction_denominator)
		return {0.0, true};
	const double tr0 = rho0.matrix().trace().real();
	return {omega * std::abs(p0 - ov * tr0) / std::sqrt(gram), false};
}

} // namespace qsl
