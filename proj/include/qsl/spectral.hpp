#pragma once

#include "phase_space.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <numbers>
#include <vector>

namespace qsl {

namespace detail {

/// Angular wavenumbers 2 pi m / L in FFT order (0, 1, ..., n/2 - 1, -n/2, ..., -1).
inline std::vector<double> fft_wavenumbers(Eigen::Index n, double length)
{
	std::vector<double> k(static_cast<std::size_t>(n));
	for(Eigen::Index m = 0; m < n; ++m)
	{
		const Eigen::Index s = m < (n + 1) / 2 ? m : m - n;
		k[static_cast<std::size_t>(m)] = 2.0 * std::numbers::pi * static_cast<double>(s) / length;
	}
	return k;
}

/// (i k)^order with the unpaired Nyquist mode removed for odd orders.
inline std::vector<std::complex<double>> derivative_symbol(Eigen::Index n, double length, int order)
{
	const auto k = fft_wavenumbers(n, length);
	std::vector<std::complex<double>> s(k.size());
	for(std::size_t m = 0; m < k.size(); ++m)
	{
		s[m] = std::pow(std::complex<double>(0.0, k[m]), order);
		if(order % 2 == 1 && n % 2 == 0 && static_cast<Eigen::Index>(m) == n / 2)
			s[m] = 0.0;
	}
	return s;
}

} // namespace detail

/// Fourier-spectral partial derivatives of a field. The field is treated as
/// periodic on both axes; for non-periodic grids the field must have decayed
/// to negligible values at the boundary, which the decay policy enforces.
class SpectralDifferentiator
{
public:
	explicit SpectralDifferentiator(const PhaseSpaceField& f) : grid_(f.grid())
	{
		const Eigen::Index nq = grid_.nq;
		const Eigen::Index np = grid_.np;
		spectrum_.resize(nq, np);
		std::vector<std::complex<double>> in, out;

		Eigen::FFT<double> fft;
		Eigen::MatrixXcd tmp(nq, np);
		in.resize(static_cast<std::size_t>(np));
		for(Eigen::Index i = 0; i < nq; ++i)
		{
			for(Eigen::Index j = 0; j < np; ++j)
				in[static_cast<std::size_t>(j)] = f(i, j);
			fft.fwd(out, in);
			for(Eigen::Index j = 0; j < np; ++j)
				tmp(i, j) = out[static_cast<std::size_t>(j)];
		}
		in.resize(static_cast<std::size_t>(nq));
		for(Eigen::Index j = 0; j < np; ++j)
		{
			for(Eigen::Index i = 0; i < nq; ++i)
				in[static_cast<std::size_t>(i)] = tmp(i, j);
			fft.fwd(out, in);
			for(Eigen::Index i = 0; i < nq; ++i)
				spectrum_(i, j) = out[static_cast<std::size_t>(i)];
		}
	}

	/// d^a/dq^a d^b/dp^b of the field, sampled on the same grid.
	[[nodiscard]] PhaseSpaceField derivative(int dq_order, int dp_order) const
	{
		detail::require(dq_order >= 0 && dp_order >= 0, "SpectralDifferentiator: negative order");
		const Eigen::Index nq = grid_.nq;
		const Eigen::Index np = grid_.np;
		const auto sq = detail::derivative_symbol(nq, grid_.q_max - grid_.q_min, dq_order);
		const auto sp = detail::derivative_symbol(np, grid_.p_max - grid_.p_min, dp_order);

		Eigen::FFT<double> fft;
		Eigen::MatrixXcd tmp(nq, np);
		std::vector<std::complex<double>> in, out;
		in.resize(static_cast<std::size_t>(nq));
		for(Eigen::Index j = 0; j < np; ++j)
		{
			for(Eigen::Index i = 0; i < nq; ++i)
				in[static_cast<std::size_t>(i)] = spectrum_(i, j) * sq[static_cast<std::size_t>(i)] *
				                                   sp[static_cast<std::size_t>(j)];
			fft.inv(out, in);
			for(Eigen::Index i = 0; i < nq; ++i)
				tmp(i, j) = out[static_cast<std::size_t>(i)];
		}
		Eigen::MatrixXd v(nq, np);
		in.resize(static_cast<std::size_t>(np));
		for(Eigen::Index i = 0; i < nq; ++i)
		{
			for(Eigen::Index j = 0; j < np; ++j)
				in[static_cast<std::size_t>(j)] = tmp(i, j);
			fft.inv(out, in);
			for(Eigen::Index j = 0; j < np; ++j)
				v(i, j) = out[static_cast<std::size_t>(j)].real();
		}
		return PhaseSpaceField(grid_, std::move(v));
	}

private:
	PhaseSpaceGrid grid_;
	Eigen::MatrixXcd spectrum_;
};

} // namespace qsl
