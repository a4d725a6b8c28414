#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace qsl {

/// Sampled speed-limit inequality lhs(t) >= rhs(t) = cos(dispersion * t).
struct BoundCurve
{
	std::vector<double> times;
	std::vector<double> lhs;
	std::vector<double> rhs;
	std::vector<double> slack;
	/// Rate in the cosine argument, 1/time.
	double dispersion = 0.0;

	[[nodiscard]] std::size_t size() const { return times.size(); }

	[[nodiscard]] double min_slack() const
	{
		return slack.empty() ? std::numeric_limits<double>::infinity()
		                     : *std::min_element(slack.begin(), slack.end());
	}

	/// Largest time for which the inequality is a theorem: the Hilbert-Schmidt angle
	/// grows at most like dispersion * t, so cos bounds it up to an angle of pi, and
	/// lhs >= 0 covers the stretch where the cosine is negative. Past 3 pi / 2 the
	/// cosine climbs back towards 1 and the bound generally fails.
	[[nodiscard]] double validity_horizon() const
	{
		return dispersion > 0.0 ? 1.5 * std::numbers::pi / dispersion : std::numeric_limits<double>::infinity();
	}

	/// Minimum slack over samples with t <= validity_horizon().
	[[nodiscard]] double min_slack_in_window() const
	{
		const double horizon = validity_horizon();
		double m = std::numeric_limits<double>::infinity();
		for(std::size_t k = 0; k < times.size() && times[k] <= horizon; ++k)
			m = std::min(m, slack[k]);
		return m;
	}

	[[nodiscard]] bool holds(double tolerance) const { return min_slack_in_window() >= -tolerance; }
};

namespace detail {

inline void require_time_grid(const std::vector<double>& times, const char* what)
{
	require(!times.empty(), std::string(what) + ": empty time grid");
	require(times.front() == 0.0, std::string(what) + ": time grid must start at 0");
	for(std::size_t k = 1; k < times.size(); ++k)
		require(times[k] > times[k - 1], std::string(what) + ": time grid must be strictly ascending");
	for(double t : times)
		require(std::isfinite(t), std::string(what) + ": non-finite time");
}

/// Fills rhs and slack from lhs, times and dispersion.
inline BoundCurve finish_curve(std::vector<double> times, std::vector<double> lhs, double dispersion)
{
	BoundCurve c;
	c.dispersion = dispersion;
	c.rhs.resize(times.size());
	c.slack.resize(times.size());
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		c.rhs[k] = std::cos(dispersion * times[k]);
		c.slack[k] = lhs[k] - c.rhs[k];
	}
	c.times = std::move(times);
	c.lhs = std::move(lhs);
	return c;
}

} // namespace detail

/// n uniform samples over [0, t_max] (n >= 2).
[[nodiscard]] inline std::vector<double> uniform_times(double t_max, std::size_t n)
{
	detail::require(n >= 2, "uniform_times: need at least two samples");
	detail::require(t_max > 0.0, "uniform_times: t_max must be positive");
	std::vector<double> t(n);
	for(std::size_t k = 0; k < n; ++k)
		t[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
	return t;
}

} // namespace qsl
