#pragma once

#include "liouville.hpp"
#include "wigner.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <vector>

namespace qsl {

/// Semiclassical convergence study: one fixed Gaussian phase-space envelope,
/// realized at each hbar as a displaced thermal oscillator state.
struct HbarSweepSetup
{
	PolynomialHamiltonian hamiltonian;
	GaussianEnvelope envelope;
	/// Strictly descending.
	std::vector<double> hbars;
	PositionGrid position{-8.0, 8.0, 256};
	PhaseSpaceGrid classical = square_grid(10.0, 256);
	std::vector<double> times;
	double steps_per_unit_time = 20.0;

	void validate() const
	{
		detail::require(!hbars.empty(), "hbar_sweep: no hbar values");
		for(std::size_t k = 0; k < hbars.size(); ++k)
		{
			detail::require(hbars[k] > 0.0 && std::isfinite(hbars[k]), "hbar_sweep: hbar values must be positive");
			if(k > 0)
				detail::require(hbars[k] < hbars[k - 1], "hbar_sweep: hbar values must be strictly descending");
		}
		detail::require(envelope.sigma_q > 0.0 && envelope.sigma_p > 0.0, "hbar_sweep: envelope widths must be positive");
		// Above 2 sigma_q sigma_p no state has this envelope as its Wigner function.
		detail::require(hbars.front() <= 2.0 * envelope.sigma_q * envelope.sigma_p,
		                "hbar_sweep: family has no state at the largest hbar (needs hbar <= 2 sigma_q sigma_p)");
		position.validate();
		classical.validate();
		detail::require_time_grid(times, "hbar_sweep");
	}
};

struct HbarSweepRow
{
	double hbar = 0.0;
	/// |moyal_rate - poisson_rate| on the same Wigner function.
	double rate_gap = 0.0;
	/// sup_t |quantum relative purity - classical relative purity|.
	double lhs_gap = 0.0;
	/// 2 pi hbar int W^2.
	double purity = 0.0;
};

struct HbarSweepResult
{
	std::vector<HbarSweepRow> rows;
	BoundCurve classical;
};

[[nodiscard]] inline HbarSweepResult hbar_sweep(const HbarSweepSetup& setup)
{
	setup.validate();
	HbarSweepResult out;
	out.classical = csl_bound_curve(setup.hamiltonian, setup.envelope.density(setup.classical), setup.times,
	                                setup.steps_per_unit_time);
	for(double hbar : setup.hbars)
	{
		const PositionBasisState st = setup.envelope.state(setup.position, hbar);
		const WignerField w = wigner_transform(st);
		const BoundCurve q = qsl_bound_curve(quantize(setup.hamiltonian, setup.position, hbar), st.density(),
		                                     setup.times, hbar);
		HbarSweepRow row;
		row.hbar = hbar;
		row.rate_gap = std::abs(moyal_rate(setup.hamiltonian, w) - poisson_rate(setup.hamiltonian, w));
		for(std::size_t k = 0; k < setup.times.size(); ++k)
			row.lhs_gap = std::max(row.lhs_gap, std::abs(q.lhs[k] - out.classical.lhs[k]));
		row.purity = w.purity();
		out.rows.push_back(row);
	}
	return out;
}

/// Least-squares slope of log y against log x. Empty when fewer than two
/// points or any value is not positive (e.g. an exactly zero gap).
[[nodiscard]] inline std::optional<double> fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
	detail::require(x.size() == y.size(), "fit_loglog_slope: size mismatch");
	if(x.size() < 2)
		return std::nullopt;
	double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
	for(std::size_t k = 0; k < x.size(); ++k)
	{
		if(!(x[k] > 0.0) || !(y[k] > 0.0))
			return std::nullopt;
		const double lx = std::log(x[k]);
		const double ly = std::log(y[k]);
		sx += lx;
		sy += ly;
		sxx += lx * lx;
		sxy += lx * ly;
	}
	const double n = static_cast<double>(x.size());
	const double den = n * sxx - sx * sx;
	if(den <= 0.0)
		return std::nullopt;
	return (n * sxy - sx * sy) / den;
}

[[nodiscard]] inline std::optional<double> rate_gap_slope(const std::vector<HbarSweepRow>& rows)
{
	std::vector<double> x, y;
	for(const auto& r : rows)
	{
		x.push_back(r.hbar);
		y.push_back(r.rate_gap);
	}
	return fit_loglog_slope(x, y);
}

/// Rows are in descending hbar, so purity must fall from row to row.
[[nodiscard]] inline bool purity_strictly_decreasing(const std::vector<HbarSweepRow>& rows)
{
	for(std::size_t k = 1; k < rows.size(); ++k)
		if(!(rows[k].purity < rows[k - 1].purity))
			return false;
	return true;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<HbarSweepRow>& rows)
{
	os << "hbar,rate_gap,lhs_gap,purity\n";
	char buf[128];
	for(const auto& r : rows)
	{
		std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", r.hbar, r.rate_gap, r.lhs_gap, r.purity);
		os << buf;
	}
}

} // namespace qsl
