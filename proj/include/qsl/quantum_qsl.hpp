#pragma once

#include "bound_curve.hpp"
#include "hs_core.hpp"

#include <numbers>
#include <vector>

namespace qsl {

/// Exact propagation under a time-independent Hamiltonian, built once from
/// its spectral decomposition.
class Propagator
{
public:
	Propagator(const HamiltonianMatrix& h, double hbar) : spectrum_(h.matrix()), hbar_(hbar)
	{
		detail::require(hbar > 0.0, "Propagator: hbar must be positive");
	}

	[[nodiscard]] Index dim() const { return spectrum_.dim(); }
	[[nodiscard]] double hbar() const { return hbar_; }
	[[nodiscard]] const SpectralDecomposition& spectrum() const { return spectrum_; }

	/// U(t) = exp(-i H t / hbar).
	[[nodiscard]] cmat unitary(double t) const
	{
		const double h = hbar_;
		return spectrum_.apply([t, h](double e) { return std::exp(cplx(0.0, -e * t / h)); });
	}

	/// U(t) A U(t)^dagger.
	[[nodiscard]] cmat evolve(const cmat& a, double t) const
	{
		detail::require_same_dim(spectrum_.eigenvectors(), a, "Propagator::evolve");
		if(t == 0.0)
			return a;
		const cmat u = unitary(t);
		return u * a * u.adjoint();
	}

	[[nodiscard]] DensityMatrix evolve(const DensityMatrix& rho, double t) const
	{
		if(t == 0.0)
			return rho;
		return DensityMatrix::assume_valid(evolve(rho.matrix(), t));
	}

private:
	SpectralDecomposition spectrum_;
	double hbar_;
};

/// rho(t) = U(t) rho0 U(t)^dagger with U(t) = exp(-iHt/hbar).
[[nodiscard]] inline DensityMatrix evolve(const HamiltonianMatrix& h, const DensityMatrix& rho0, double t, double hbar)
{
	detail::require_same_dim(h.matrix(), rho0.matrix(), "evolve");
	detail::require(hbar > 0.0, "evolve: hbar must be positive");
	if(t == 0.0)
		return rho0;
	return Propagator(h, hbar).evolve(rho0, t);
}

namespace detail {

/// Tr(A A_t) / Tr(A^2) for all t via the eigenbasis of H:
///   sum_mn |A_mn|^2 cos((E_m - E_n) t / hbar) / sum_mn |A_mn|^2,
/// which equals Tr(A U A U^dagger) / Tr(A^2) for Hermitian A.
inline std::vector<double> hs_overlap_series(const Propagator& prop, const cmat& a, const std::vector<double>& times)
{
	const cmat ae = prop.spectrum().to_eigenbasis(a);
	const rvec& e = prop.spectrum().eigenvalues();
	const Index d = ae.rows();
	const Eigen::MatrixXd w = ae.cwiseAbs2();
	const double norm2 = w.sum();
	require(norm2 > 0.0, "bound curve: zero operator");

	std::vector<double> out(times.size());
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		const double t = times[k];
		if(t == 0.0)
		{
			out[k] = 1.0;
			continue;
		}
		double s = 0.0;
		for(Index n = 0; n < d; ++n)
			for(Index m = 0; m < d; ++m)
				s += w(m, n) * std::cos((e(m) - e(n)) * t / prop.hbar());
		out[k] = s / norm2;
	}
	return out;
}

inline BoundCurve hs_bound_curve(const HamiltonianMatrix& h, const cmat& a, const std::vector<double>& times, double hbar)
{
	require_same_dim(h.matrix(), a, "qsl_bound_curve");
	require(hbar > 0.0, "qsl_bound_curve: hbar must be positive");
	require_time_grid(times, "qsl_bound_curve");
	const Propagator prop(h, hbar);
	const double rate = detail::commutator_dispersion(h.matrix(), a, hbar);
	return finish_curve(times, hs_overlap_series(prop, a, times), rate);
}

} // namespace detail

/// Relative purity Tr(rho0 rho_t)/Tr(rho0^2) against cos(dispersion * t),
/// dispersion = sqrt(-Tr([H,rho0]^2) / Tr(rho0^2)) / hbar.
[[nodiscard]] inline BoundCurve qsl_bound_curve(const HamiltonianMatrix& h, const DensityMatrix& rho0,
                                                const std::vector<double>& times, double hbar)
{
	return detail::hs_bound_curve(h, rho0.matrix(), times, hbar);
}

/// Same bound with rho0 replaced by the unnormalized rho0^alpha.
[[nodiscard]] inline BoundCurve alpha_bound_curve(const HamiltonianMatrix& h, const DensityMatrix& rho0, double alpha,
                                                  const std::vector<double>& times, double hbar)
{
	detail::require(alpha > 0.0, "alpha_bound_curve: alpha must be positive");
	if(alpha == 1.0)
		return qsl_bound_curve(h, rho0, times, hbar);
	return detail::hs_bound_curve(h, matrix_power(rho0, alpha), times, hbar);
}

struct PureBoundRow
{
	double x;
	/// cos^2(x): Mandelstam-Tamm for pure states.
	double mt;
	/// cos(sqrt(2) x): relative-purity bound specialised to pure states.
	double hs;
	double difference;
};

/// Pointwise comparison of the two pure-state bounds, x = (Delta E) t / hbar.
[[nodiscard]] inline std::vector<PureBoundRow> pure_bound_comparison(const std::vector<double>& xs)
{
	std::vector<PureBoundRow> rows;
	rows.reserve(xs.size());
	for(double x : xs)
	{
		detail::require(x >= 0.0 && x <= std::numbers::pi / 2 + 1e-15, "pure_bound_comparison: x must lie in [0, pi/2]");
		const double c = std::cos(x);
		const double mt = c * c;
		const double hs = std::cos(std::numbers::sqrt2 * x);
		rows.push_back({x, mt, hs, mt - hs});
	}
	return rows;
}

[[nodiscard]] inline double energy_mean(const HamiltonianMatrix& h, const cvec& psi)
{
	return psi.dot(h.matrix() * psi).real();
}

/// <H^2> - <H>^2 for a normalized state.
[[nodiscard]] inline double energy_variance(const HamiltonianMatrix& h, const cvec& psi)
{
	const cvec hpsi = h.matrix() * psi;
	const double mean = psi.dot(hpsi).real();
	return std::max(0.0, hpsi.squaredNorm() - mean * mean);
}

/// Energy variance of a mixed state, Tr(H^2 rho) - Tr(H rho)^2.
[[nodiscard]] inline double energy_variance(const HamiltonianMatrix& h, const DensityMatrix& rho)
{
	const cmat hr = h.matrix() * rho.matrix();
	const double mean = hr.trace().real();
	return (h.matrix() * hr).trace().real() - mean * mean;
}

struct OrthogonalizationBounds
{
	double mt_time;
	double ml_time;
	double combined;
};

/// Lower bounds on the time to reach an orthogonal state: pi hbar / (2 Delta E)
/// and pi hbar / (2 (<E> - E0)).
[[nodiscard]] inline OrthogonalizationBounds orthogonalization_bounds(const HamiltonianMatrix& h, const cvec& psi,
                                                                      double hbar)
{
	detail::require(psi.size() == h.dim(), "orthogonalization_bounds: dimension mismatch");
	detail::require(std::abs(psi.norm() - 1.0) <= 1e-12, "orthogonalization_bounds: state is not normalized");
	detail::require(hbar > 0.0, "orthogonalization_bounds: hbar must be positive");

	const double e0 = SpectralDecomposition(h.matrix()).eigenvalues()(0);
	const double mean = energy_mean(h, psi);
	const double de = std::sqrt(energy_variance(h, psi));
	const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
	if(de <= 1e-12 * scale || mean - e0 <= 1e-12 * scale)
		throw NumericalError("stationary state, no orthogonalization");

	OrthogonalizationBounds b{};
	b.mt_time = std::numbers::pi * hbar / (2.0 * de);
	b.ml_time = std::numbers::pi * hbar / (2.0 * (mean - e0));
	b.combined = std::max(b.mt_time, b.ml_time);
	return b;
}

} // namespace qsl
