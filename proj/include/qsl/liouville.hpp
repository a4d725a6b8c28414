#pragma once

#include "bound_curve.hpp"
#include "phase_space.hpp"
#include "polynomial.hpp"
#include "spectral.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace qsl {

/// Fields must fall below decay_tolerance * max|field| within decay_band
/// cells of every non-periodic boundary.
inline constexpr double decay_tolerance = 1e-12;
inline constexpr Eigen::Index decay_band = 5;

/// Default slack budget for classical bound curves (interpolation and
/// quadrature error).
inline constexpr double classical_slack_tolerance = 1e-3;

namespace detail {

/// Largest |value| inside the boundary band of the non-periodic axes,
/// relative to the field maximum.
inline double boundary_excess(const PhaseSpaceField& f)
{
	const auto& g = f.grid();
	const auto& v = f.values();
	const double peak = v.cwiseAbs().maxCoeff();
	if(peak == 0.0)
		return 0.0;
	double worst = 0.0;
	const Eigen::Index bq = std::min(decay_band, g.nq);
	const Eigen::Index bp = std::min(decay_band, g.np);
	if(!g.periodic_q)
	{
		worst = std::max(worst, v.topRows(bq).cwiseAbs().maxCoeff());
		worst = std::max(worst, v.bottomRows(bq).cwiseAbs().maxCoeff());
	}
	if(!g.periodic_p)
	{
		worst = std::max(worst, v.leftCols(bp).cwiseAbs().maxCoeff());
		worst = std::max(worst, v.rightCols(bp).cwiseAbs().maxCoeff());
	}
	return worst / peak;
}

inline void require_decayed(const PhaseSpaceField& f, const std::string& what)
{
	const double excess = boundary_excess(f);
	if(excess > decay_tolerance)
	{
		char buf[64];
		std::snprintf(buf, sizeof buf, "%.3g", excess);
		throw NumericalError("domain too small: " + what + " reaches a non-periodic boundary (relative value " + buf +
		                     ")");
	}
}

/// Lagrange cubic weights for nodes -1, 0, 1, 2 at fractional offset t.
inline void cubic_weights(double t, double w[4])
{
	w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
	w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
	w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
	w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

/// Tensor-product cubic Lagrange interpolation. Outside a non-periodic axis
/// the field is zero; periodic axes wrap.
class CubicInterpolator
{
public:
	explicit CubicInterpolator(const PhaseSpaceField& f) : f_(f) {}

	[[nodiscard]] double operator()(double q, double p) const
	{
		const auto& g = f_.grid();
		if(!std::isfinite(q) || !std::isfinite(p))
			return 0.0;
		const double sq = (q - g.q_min) / g.dq() - 0.5;
		const double sp = (p - g.p_min) / g.dp() - 0.5;
		if(!g.periodic_q && (sq < -2.0 || sq > static_cast<double>(g.nq) + 1.0))
			return 0.0;
		if(!g.periodic_p && (sp < -2.0 || sp > static_cast<double>(g.np) + 1.0))
			return 0.0;
		const double fq = std::floor(sq);
		const double fp = std::floor(sp);
		double wq[4], wp[4];
		cubic_weights(sq - fq, wq);
		cubic_weights(sp - fp, wp);
		const auto iq = static_cast<Eigen::Index>(fq) - 1;
		const auto ip = static_cast<Eigen::Index>(fp) - 1;

		double s = 0.0;
		for(int a = 0; a < 4; ++a)
		{
			Eigen::Index i = iq + a;
			if(g.periodic_q)
				i = wrap(i, g.nq);
			else if(i < 0 || i >= g.nq)
				continue;
			double row = 0.0;
			for(int b = 0; b < 4; ++b)
			{
				Eigen::Index j = ip + b;
				if(g.periodic_p)
					j = wrap(j, g.np);
				else if(j < 0 || j >= g.np)
					continue;
				row += wp[b] * f_(i, j);
			}
			s += wq[a] * row;
		}
		return s;
	}

private:
	static Eigen::Index wrap(Eigen::Index i, Eigen::Index n)
	{
		const Eigen::Index r = i % n;
		return r < 0 ? r + n : r;
	}

	const PhaseSpaceField& f_;
};

/// Hamilton's equations q' = dH/dp, p' = -dH/dq.
class HamiltonFlow
{
public:
	explicit HamiltonFlow(const PolynomialHamiltonian& h)
	{
		const PolynomialHamiltonian hq = h.derivative(1, 0);
		const PolynomialHamiltonian hp = h.derivative(0, 1);
		for(const auto& [m, c] : hq.terms())
			dhdq_.push_back({m.first, m.second, c});
		for(const auto& [m, c] : hp.terms())
			dhdp_.push_back({m.first, m.second, c});
	}

	/// One classical RK4 step of signed size dt.
	void rk4_step(double& q, double& p, double dt) const
	{
		double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
		rhs(q, p, k1q, k1p);
		rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, k2q, k2p);
		rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, k3q, k3p);
		rhs(q + dt * k3q, p + dt * k3p, k4q, k4p);
		q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
		p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
	}

private:
	struct Term
	{
		int a;
		int b;
		double c;
	};

	void rhs(double q, double p, double& dq, double& dp) const
	{
		double qp[PolynomialHamiltonian::max_degree], pp[PolynomialHamiltonian::max_degree];
		qp[0] = pp[0] = 1.0;
		for(int k = 1; k < PolynomialHamiltonian::max_degree; ++k)
		{
			qp[k] = qp[k - 1] * q;
			pp[k] = pp[k - 1] * p;
		}
		dq = 0.0;
		for(const Term& t : dhdp_)
			dq += t.c * qp[t.a] * pp[t.b];
		dp = 0.0;
		for(const Term& t : dhdq_)
			dp -= t.c * qp[t.a] * pp[t.b];
	}

	std::vector<Term> dhdq_;
	std::vector<Term> dhdp_;
};

} // namespace detail

/// Backward characteristics of every grid node: after advancing by total
/// time t, foot(i, j) = Phi_{-t}(q_i, p_j), so rho_t(node) = rho_0(foot).
class CharacteristicTracer
{
public:
	CharacteristicTracer(const PolynomialHamiltonian& h, const PhaseSpaceGrid& grid) : flow_(h), grid_(grid)
	{
		grid_.validate();
		const auto n = static_cast<std::size_t>(grid_.nq * grid_.np);
		q_.resize(n);
		p_.resize(n);
		for(Eigen::Index j = 0; j < grid_.np; ++j)
			for(Eigen::Index i = 0; i < grid_.nq; ++i)
			{
				q_[index(i, j)] = grid_.q(i);
				p_[index(i, j)] = grid_.p(j);
			}
	}

	[[nodiscard]] double elapsed() const { return elapsed_; }

	/// Advances the evolution time by dt using `steps` RK4 substeps along the
	/// backward flow (dt < 0 runs the dynamics in reverse).
	void advance(double dt, int steps)
	{
		detail::require(steps > 0, "CharacteristicTracer: steps must be positive");
		const double h = -dt / static_cast<double>(steps);
		for(std::size_t k = 0; k < q_.size(); ++k)
		{
			double q = q_[k];
			double p = p_[k];
			for(int s = 0; s < steps && std::isfinite(q) && std::isfinite(p); ++s)
				flow_.rk4_step(q, p, h);
			q_[k] = q;
			p_[k] = p;
		}
		elapsed_ += dt;
	}

	/// Field f transported by the flow: (f o Phi_{-t}) on the grid.
	[[nodiscard]] PhaseSpaceField pull_back(const PhaseSpaceField& f) const
	{
		detail::require(f.grid() == grid_, "CharacteristicTracer: grid mismatch");
		const detail::CubicInterpolator interp(f);
		Eigen::MatrixXd v(grid_.nq, grid_.np);
		for(Eigen::Index j = 0; j < grid_.np; ++j)
			for(Eigen::Index i = 0; i < grid_.nq; ++i)
				v(i, j) = interp(q_[index(i, j)], p_[index(i, j)]);
		return PhaseSpaceField(grid_, std::move(v));
	}

	/// Exact transport of an analytic function: f evaluated at the foot points.
	template <typename F>
	[[nodiscard]] PhaseSpaceField pull_back_function(F&& f) const
	{
		Eigen::MatrixXd v(grid_.nq, grid_.np);
		for(Eigen::Index j = 0; j < grid_.np; ++j)
			for(Eigen::Index i = 0; i < grid_.nq; ++i)
				v(i, j) = f(q_[index(i, j)], p_[index(i, j)]);
		return PhaseSpaceField(grid_, std::move(v));
	}

private:
	[[nodiscard]] std::size_t index(Eigen::Index i, Eigen::Index j) const
	{
		return static_cast<std::size_t>(j * grid_.nq + i);
	}

	detail::HamiltonFlow flow_;
	PhaseSpaceGrid grid_;
	std::vector<double> q_;
	std::vector<double> p_;
	double elapsed_ = 0.0;
};

namespace detail {

template <typename HDeriv, typename FDeriv>
PhaseSpaceField poisson_from_derivatives(const PhaseSpaceGrid& g, const HDeriv& hq, const HDeriv& hp, const FDeriv& fq,
                                         const FDeriv& fp)
{
	Eigen::MatrixXd v(g.nq, g.np);
	for(Eigen::Index j = 0; j < g.np; ++j)
		for(Eigen::Index i = 0; i < g.nq; ++i)
		{
			const double q = g.q(i);
			const double p = g.p(j);
			v(i, j) = hq(q, p) * fp(i, j) - hp(q, p) * fq(i, j);
		}
	return PhaseSpaceField(g, std::move(v));
}

} // namespace detail

/// {H, f} = dH/dq df/dp - dH/dp df/dq; H-derivatives exact, f-derivatives
/// spectral.
[[nodiscard]] inline PhaseSpaceField poisson_bracket(const PolynomialHamiltonian& h, const PhaseSpaceField& f)
{
	const SpectralDifferentiator d(f);
	const PhaseSpaceField fq = d.derivative(1, 0);
	const PhaseSpaceField fp = d.derivative(0, 1);
	return detail::poisson_from_derivatives(f.grid(), h.derivative(1, 0), h.derivative(0, 1), fq, fp);
}

struct LiouvillianDispersion
{
	/// sqrt(||{H, rho}||^2 / ||rho||^2), 1/time.
	double rate;
	/// |(rho, {H, rho})| / (||rho|| ||{H, rho}||); vanishes for real rho.
	double antisymmetry_residual;
};

[[nodiscard]] inline LiouvillianDispersion liouvillian_dispersion(const PolynomialHamiltonian& h,
                                                                  const PhaseSpaceField& rho0)
{
	const double norm2 = l2_inner(rho0, rho0);
	detail::require(norm2 > 0.0, "liouvillian_dispersion: zero-norm density");
	const PhaseSpaceField pb = poisson_bracket(h, rho0);
	const double pb2 = l2_inner(pb, pb);
	const double cross = l2_inner(rho0, pb);
	LiouvillianDispersion out{};
	out.rate = std::sqrt(pb2 / norm2);
	out.antisymmetry_residual = pb2 > 0.0 ? std::abs(cross) / std::sqrt(norm2 * pb2) : 0.0;
	return out;
}

/// Semi-Lagrangian Liouville transport: every node traces its characteristic
/// back over [0, t] with `steps` RK4 substeps and samples rho0 at the foot
/// point by bicubic interpolation. Any finite field may be transported.
[[nodiscard]] inline PhaseSpaceField liouville_evolve(const PolynomialHamiltonian& h, const PhaseSpaceField& rho0, double t,
                                                      int steps)
{
	detail::require(steps > 0, "liouville_evolve: steps must be positive");
	detail::require(std::isfinite(t), "liouville_evolve: non-finite time");
	detail::require_decayed(rho0, "initial field");
	if(t == 0.0)
		return rho0;
	CharacteristicTracer tracer(h, rho0.grid());
	tracer.advance(t, steps);
	PhaseSpaceField out = tracer.pull_back(rho0);
	detail::require_decayed(out, "evolved field");
	return out;
}

/// Pointwise f^alpha for f >= 0. Values in [-1e-12, 0) are clamped to 0.
[[nodiscard]] inline PhaseSpaceField pointwise_power(const PhaseSpaceField& f, double alpha)
{
	detail::require(alpha > 0.0, "pointwise_power: alpha must be positive");
	detail::require(f.values().minCoeff() >= -1e-12, "pointwise_power: field has negative values");
	Eigen::MatrixXd v = f.values().unaryExpr([alpha](double x) { return x <= 0.0 ? 0.0 : std::pow(x, alpha); });
	return PhaseSpaceField(f.grid(), std::move(v));
}

namespace detail {

/// Interpolation can undershoot slightly below zero; such values are
/// numerical, not physical, and are dropped before a pointwise power.
inline PhaseSpaceField clamp_nonnegative(const PhaseSpaceField& f)
{
	return PhaseSpaceField(f.grid(), f.values().cwiseMax(0.0));
}

inline int substeps(double dt, double steps_per_unit_time)
{
	return std::max(1, static_cast<int>(std::ceil(std::abs(dt) * steps_per_unit_time - 1e-9)));
}

/// Evolve-then-power curve. alpha == 1 uses the transported field untouched.
inline BoundCurve csl_curve(const PolynomialHamiltonian& h, const PhaseSpaceField& rho0, double alpha,
                            const std::vector<double>& times, double steps_per_unit_time)
{
	require_time_grid(times, "csl_bound_curve");
	require(steps_per_unit_time > 0.0, "csl_bound_curve: steps_per_unit_time must be positive");
	require_decayed(rho0, "initial density");

	const bool powered = alpha != 1.0;
	if(powered)
		require(rho0.values().minCoeff() >= -1e-12, "alpha_csl_bound_curve: density has negative values");
	const PhaseSpaceField a0 = powered ? pointwise_power(rho0, alpha) : rho0;
	const double norm2 = l2_inner(a0, a0);
	require(norm2 > 0.0, "csl_bound_curve: zero-norm density");
	const double rate = liouvillian_dispersion(h, a0).rate;

	CharacteristicTracer tracer(h, rho0.grid());
	std::vector<double> lhs(times.size());
	lhs[0] = 1.0;
	for(std::size_t k = 1; k < times.size(); ++k)
	{
		const double dt = times[k] - times[k - 1];
		tracer.advance(dt, substeps(dt, steps_per_unit_time));
		const PhaseSpaceField rhot = tracer.pull_back(rho0);
		require_decayed(rhot, "evolved density");
		const PhaseSpaceField at = powered ? pointwise_power(clamp_nonnegative(rhot), alpha) : rhot;
		lhs[k] = l2_inner(a0, at) / norm2;
	}
	return finish_curve(times, std::move(lhs), rate);
}

} // namespace detail

/// Classical relative purity (rho0, rho_t)/(rho0, rho0) against
/// cos((Delta L)_0 t).
[[nodiscard]] inline BoundCurve csl_bound_curve(const PolynomialHamiltonian& h, const PhaseSpaceField& rho0,
                                                const std::vector<double>& times, double steps_per_unit_time)
{
	return detail::csl_curve(h, rho0, 1.0, times, steps_per_unit_time);
}

/// The same bound for rho^alpha, which is also transported by the flow.
[[nodiscard]] inline BoundCurve alpha_csl_bound_curve(const PolynomialHamiltonian& h, const PhaseSpaceField& rho0,
                                                      double alpha, const std::vector<double>& times,
                                                      double steps_per_unit_time)
{
	detail::require(alpha > 0.0, "alpha_csl_bound_curve: alpha must be positive");
	return detail::csl_curve(h, rho0, alpha, times, steps_per_unit_time);
}

/// max |(rho_t)^alpha - transport(rho_0^alpha)| / max |(rho_t)^alpha|:
/// how far evolve-then-power and power-then-evolve disagree on the grid.
[[nodiscard]] inline double alpha_order_gap(const PolynomialHamiltonian& h, const PhaseSpaceField& rho0, double alpha,
                                            double t, int steps)
{
	const PhaseSpaceField a0 = pointwise_power(rho0, alpha);
	CharacteristicTracer tracer(h, rho0.grid());
	tracer.advance(t, steps);
	const PhaseSpaceField evolved_then_powered = pointwise_power(detail::clamp_nonnegative(tracer.pull_back(rho0)), alpha);
	const PhaseSpaceField powered_then_evolved = tracer.pull_back(a0);
	const double scale = evolved_then_powered.max_abs();
	detail::require(scale > 0.0, "alpha_order_gap: zero field");
	return (evolved_then_powered.values() - powered_then_evolved.values()).cwiseAbs().maxCoeff() / scale;
}

} // namespace qsl
