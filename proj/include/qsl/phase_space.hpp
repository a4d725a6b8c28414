#pragma once

#include "error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace qsl {

/// Uniform cell-centred grid on [q_min, q_max] x [p_min, p_max]. Node (i, j)
/// sits at the centre of its cell, so sums times cell area are midpoint-rule
/// integrals.
struct PhaseSpaceGrid
{
	double q_min = -1.0;
	double q_max = 1.0;
	double p_min = -1.0;
	double p_max = 1.0;
	Eigen::Index nq = 8;
	Eigen::Index np = 8;
	bool periodic_q = false;
	bool periodic_p = false;

	void validate() const
	{
		detail::require(std::isfinite(q_min) && std::isfinite(q_max) && std::isfinite(p_min) && std::isfinite(p_max),
		                "PhaseSpaceGrid: non-finite bounds");
		detail::require(q_max > q_min, "PhaseSpaceGrid: q_max must exceed q_min");
		detail::require(p_max > p_min, "PhaseSpaceGrid: p_max must exceed p_min");
		detail::require(nq >= 8 && np >= 8, "PhaseSpaceGrid: need at least 8 points per axis");
	}

	[[nodiscard]] double dq() const { return (q_max - q_min) / static_cast<double>(nq); }
	[[nodiscard]] double dp() const { return (p_max - p_min) / static_cast<double>(np); }
	[[nodiscard]] double cell_area() const { return dq() * dp(); }
	[[nodiscard]] double q(Eigen::Index i) const { return q_min + (static_cast<double>(i) + 0.5) * dq(); }
	[[nodiscard]] double p(Eigen::Index j) const { return p_min + (static_cast<double>(j) + 0.5) * dp(); }

	friend bool operator==(const PhaseSpaceGrid&, const PhaseSpaceGrid&) = default;
};

/// Square grid [-half_width, half_width]^2 with n points per axis.
[[nodiscard]] inline PhaseSpaceGrid square_grid(double half_width, Eigen::Index n)
{
	PhaseSpaceGrid g{-half_width, half_width, -half_width, half_width, n, n, false, false};
	g.validate();
	return g;
}

/// Real field sampled on a PhaseSpaceGrid; values(i, j) at (q_i, p_j).
class PhaseSpaceField
{
public:
	PhaseSpaceField(PhaseSpaceGrid grid, Eigen::MatrixXd values) : grid_(grid), values_(std::move(values))
	{
		grid_.validate();
		detail::require(values_.rows() == grid_.nq && values_.cols() == grid_.np,
		                "PhaseSpaceField: value matrix does not match grid");
		detail::require(values_.allFinite(), "PhaseSpaceField: non-finite values");
	}

	explicit PhaseSpaceField(PhaseSpaceGrid grid) : PhaseSpaceField(grid, Eigen::MatrixXd::Zero(grid.nq, grid.np)) {}

	template <typename F>
	[[nodiscard]] static PhaseSpaceField sample(const PhaseSpaceGrid& grid, F&& f)
	{
		grid.validate();
		Eigen::MatrixXd v(grid.nq, grid.np);
		for(Eigen::Index j = 0; j < grid.np; ++j)
			for(Eigen::Index i = 0; i < grid.nq; ++i)
				v(i, j) = f(grid.q(i), grid.p(j));
		return PhaseSpaceField(grid, std::move(v));
	}

	[[nodiscard]] const PhaseSpaceGrid& grid() const { return grid_; }
	[[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
	[[nodiscard]] double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

	/// Midpoint-rule integral of the field.
	[[nodiscard]] double mass() const { return values_.sum() * grid_.cell_area(); }
	[[nodiscard]] double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

	/// Validates the probability-density invariants: nonnegative (to -1e-12)
	/// and unit quadrature mass (to 1e-8).
	void require_probability_density() const
	{
		detail::require(values_.minCoeff() >= -1e-12, "PhaseSpaceField: density has negative values");
		detail::require(std::abs(mass() - 1.0) <= 1e-8, "PhaseSpaceField: density mass is not 1");
	}

	/// q, p, value rows with a header line.
	void write_csv(std::ostream& os, const std::string& value_column = "value") const
	{
		os << "q,p," << value_column << "\n";
		char buf[96];
		for(Eigen::Index i = 0; i < grid_.nq; ++i)
			for(Eigen::Index j = 0; j < grid_.np; ++j)
			{
				std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", grid_.q(i), grid_.p(j), values_(i, j));
				os << buf;
			}
	}

private:
	PhaseSpaceGrid grid_;
	Eigen::MatrixXd values_;
};

namespace detail {

inline void require_same_grid(const PhaseSpaceField& a, const PhaseSpaceField& b, const char* what)
{
	require(a.grid() == b.grid(), std::string(what) + ": grid mismatch");
}

} // namespace detail

/// L2 phase-space inner product (midpoint rule).
[[nodiscard]] inline double l2_inner(const PhaseSpaceField& f, const PhaseSpaceField& g)
{
	detail::require_same_grid(f, g, "l2_inner");
	return f.values().cwiseProduct(g.values()).sum() * f.grid().cell_area();
}

/// Normalized Gaussian density with independent q and p widths.
[[nodiscard]] inline PhaseSpaceField gaussian_density(const PhaseSpaceGrid& grid, double q0, double p0, double sigma_q,
                                                      double sigma_p)
{
	detail::require(sigma_q > 0.0 && sigma_p > 0.0, "gaussian_density: widths must be positive");
	const double norm = 1.0 / (2.0 * std::numbers::pi * sigma_q * sigma_p);
	return PhaseSpaceField::sample(grid, [=](double q, double p) {
		const double a = (q - q0) / sigma_q;
		const double b = (p - p0) / sigma_p;
		return norm * std::exp(-0.5 * (a * a + b * b));
	});
}

} // namespace qsl
