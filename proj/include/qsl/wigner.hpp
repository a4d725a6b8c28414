#pragma once

#include "bound_curve.hpp"
#include "hs_core.hpp"
#include "liouville.hpp"
#include "phase_space.hpp"
#include "polynomial.hpp"
#include "quantum_qsl.hpp"
#include "spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

namespace qsl {

/// Cell-centred position grid x_j = x_min + (j + 1/2) dx, j = 0..n-1.
struct PositionGrid
{
	double x_min = -1.0;
	double x_max = 1.0;
	Index n = 8;

	void validate() const
	{
		detail::require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min,
		                "PositionGrid: need finite x_min < x_max");
		detail::require(n >= 8 && n % 2 == 0, "PositionGrid: need an even number of points, at least 8");
	}

	[[nodiscard]] double length() const { return x_max - x_min; }
	[[nodiscard]] double dx() const { return length() / static_cast<double>(n); }
	[[nodiscard]] double x(Index j) const { return x_min + (static_cast<double>(j) + 0.5) * dx(); }

	friend bool operator==(const PositionGrid&, const PositionGrid&) = default;
};

/// Tolerances of the position-basis representation.
namespace tol {
inline constexpr double kernel_trace = 1e-10;
inline constexpr double kernel_decay = 1e-10;
inline constexpr double aliasing = 1e-10;
inline constexpr double wigner_imaginary = 1e-10;
inline constexpr double wigner_mass = 1e-6;
inline constexpr double wigner_purity = 1e-6;
} // namespace tol

/// Density matrix in the discretized position basis: matrix(a, b) =
/// rho(x_a, x_b) dx, so the matrix itself has unit trace.
class PositionBasisState
{
public:
	PositionBasisState(const PositionGrid& grid, const cmat& m, double hbar) : grid_(grid), hbar_(hbar), rho_(validated(grid, m, hbar)) {}

	PositionBasisState(const PositionGrid& grid, const DensityMatrix& rho, double hbar)
	    : PositionBasisState(grid, rho.matrix(), hbar)
	{
	}

	[[nodiscard]] const PositionGrid& grid() const { return grid_; }
	[[nodiscard]] double hbar() const { return hbar_; }
	[[nodiscard]] const DensityMatrix& density() const { return rho_; }
	[[nodiscard]] const cmat& matrix() const { return rho_.matrix(); }

	/// rho(x_a, x_b).
	[[nodiscard]] cplx kernel(Index a, Index b) const { return matrix()(a, b) / grid_.dx(); }

private:
	static DensityMatrix validated(const PositionGrid& grid, const cmat& m, double hbar)
	{
		grid.validate();
		detail::require(hbar > 0.0, "PositionBasisState: hbar must be positive");
		detail::require(m.rows() == grid.n && m.cols() == grid.n, "PositionBasisState: matrix size does not match grid");
		detail::require(m.allFinite(), "PositionBasisState: non-finite entries");
		detail::require(detail::hermiticity_defect(m) <= tol::hermitian, "PositionBasisState: kernel is not Hermitian");
		const cplx tr = m.trace();
		detail::require(std::abs(tr - cplx(1.0, 0.0)) <= tol::kernel_trace, "PositionBasisState: trace is not 1");

		const Index band = std::min<Index>(decay_band, grid.n / 2);
		double edge = 0.0;
		for(Index k = 0; k < band; ++k)
		{
			edge = std::max(edge, m.row(k).cwiseAbs().maxCoeff());
			edge = std::max(edge, m.row(grid.n - 1 - k).cwiseAbs().maxCoeff());
			edge = std::max(edge, m.col(k).cwiseAbs().maxCoeff());
			edge = std::max(edge, m.col(grid.n - 1 - k).cwiseAbs().maxCoeff());
		}
		if(edge / grid.dx() >= tol::kernel_decay)
			throw NumericalError("domain too small: position kernel does not decay at the grid edge");
		return DensityMatrix::assume_valid(detail::symmetrized(m) / tr.real());
	}

	PositionGrid grid_;
	double hbar_;
	DensityMatrix rho_;
};

/// Phase-space grid dual to a position grid: q nodes are the positions, p
/// nodes are m pi hbar / L for m = -n/2 .. n/2 - 1 (periodic in p).
[[nodiscard]] inline PhaseSpaceGrid wigner_phase_space_grid(const PositionGrid& grid, double hbar)
{
	grid.validate();
	detail::require(hbar > 0.0, "wigner_phase_space_grid: hbar must be positive");
	const double dp = std::numbers::pi * hbar / grid.length();
	const double half = static_cast<double>(grid.n / 2);
	PhaseSpaceGrid g{grid.x_min, grid.x_max, -(half + 0.5) * dp, (half - 0.5) * dp, grid.n, grid.n, false, true};
	g.validate();
	return g;
}

/// Wigner function with its hbar. Mass and purity invariants are checked on
/// construction.
class WignerField
{
public:
	WignerField(PhaseSpaceField f, double hbar) : field_(std::move(f)), hbar_(hbar)
	{
		detail::require(hbar > 0.0, "WignerField: hbar must be positive");
		if(std::abs(field_.mass() - 1.0) > tol::wigner_mass)
			throw NumericalError("WignerField: mass differs from 1");
		if(purity() > 1.0 + tol::wigner_purity)
			throw NumericalError("WignerField: 2 pi hbar int W^2 exceeds 1");
	}

	[[nodiscard]] const PhaseSpaceField& field() const { return field_; }
	[[nodiscard]] const PhaseSpaceGrid& grid() const { return field_.grid(); }
	[[nodiscard]] double hbar() const { return hbar_; }
	[[nodiscard]] double operator()(Index i, Index j) const { return field_(i, j); }

	/// 2 pi hbar int W^2 = Tr rho^2.
	[[nodiscard]] double purity() const { return 2.0 * std::numbers::pi * hbar_ * l2_inner(field_, field_); }

	void write_csv(std::ostream& os) const { field_.write_csv(os, "W"); }

private:
	PhaseSpaceField field_;
	double hbar_;
};

namespace detail {

/// (1 / pi hbar) sum_k A(i + k, i - k) exp(-2 pi i m k / n) on the dual grid.
/// Returns the real part and the largest imaginary residue.
inline std::pair<Eigen::MatrixXd, double> wigner_sum(const PositionGrid& grid, const cmat& a, double hbar)
{
	const Index n = grid.n;
	Eigen::FFT<double> fft;
	std::vector<cplx> in(static_cast<std::size_t>(n)), out;
	Eigen::MatrixXd w(n, n);
	double residue = 0.0;
	const double scale = 1.0 / (std::numbers::pi * hbar);
	for(Index i = 0; i < n; ++i)
	{
		for(Index k = -n / 2; k < n / 2; ++k)
		{
			const Index r = i + k;
			const Index c = i - k;
			in[static_cast<std::size_t>((k + n) % n)] = (r >= 0 && r < n && c >= 0 && c < n) ? a(r, c) : cplx(0.0);
		}
		fft.fwd(out, in);
		for(Index j = 0; j < n; ++j)
		{
			const cplx v = scale * out[static_cast<std::size_t>((j - n / 2 + n) % n)];
			w(i, j) = v.real();
			residue = std::max(residue, std::abs(v.imag()));
		}
	}
	return {std::move(w), residue};
}

/// Momentum density on the doubled set p = m pi hbar / L, m = -n .. n - 1
/// (the full Nyquist band), in FFT order of a 2n-point transform.
inline std::vector<double> momentum_density_full(const PositionBasisState& s)
{
	const Index n = s.grid().n;
	const Index n2 = 2 * n;
	const cmat& m = s.matrix();
	Eigen::FFT<double> fft;
	std::vector<cplx> in(static_cast<std::size_t>(n2)), out;
	cmat x(n2, n);
	for(Index b = 0; b < n; ++b)
	{
		std::fill(in.begin(), in.end(), cplx(0.0));
		for(Index a = 0; a < n; ++a)
			in[static_cast<std::size_t>(a)] = m(a, b);
		fft.fwd(out, in);
		for(Index k = 0; k < n2; ++k)
			x(k, b) = out[static_cast<std::size_t>(k)];
	}
	const double dx = s.grid().dx();
	const double norm = dx / (2.0 * std::numbers::pi * s.hbar());
	std::vector<double> p(static_cast<std::size_t>(n2));
	for(Index k = 0; k < n2; ++k)
	{
		const cplx step = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n2));
		cplx phase = 1.0;
		cplx acc = 0.0;
		for(Index b = 0; b < n; ++b)
		{
			acc += x(k, b) * phase;
			phase *= step;
		}
		p[static_cast<std::size_t>(k)] = norm * acc.real();
	}
	return p;
}

/// Fraction of momentum probability at |p| >= pi hbar / (2 dx), where the
/// discrete Wigner transform aliases.
inline double aliased_fraction(const PositionBasisState& s)
{
	const auto p = momentum_density_full(s);
	const Index n = s.grid().n;
	double total = 0.0;
	double outer = 0.0;
	for(Index k = 0; k < 2 * n; ++k)
	{
		const Index m = k < n ? k : k - 2 * n;
		const double v = std::abs(p[static_cast<std::size_t>(k)]);
		total += v;
		if(m >= n / 2 || m < -n / 2)
			outer += v;
	}
	return total > 0.0 ? outer / total : 0.0;
}

} // namespace detail

/// W(q, p) = (1 / 2 pi hbar) int dy rho(q + y/2, q - y/2) exp(-i p y / hbar),
/// one FFT over the relative coordinate per position.
[[nodiscard]] inline WignerField wigner_transform(const PositionBasisState& s)
{
	const double alias = detail::aliased_fraction(s);
	if(alias > tol::aliasing)
	{
		char buf[64];
		std::snprintf(buf, sizeof buf, "%.3g", alias);
		throw NumericalError(std::string("aliasing: momentum support exceeds the grid band (fraction ") + buf + ")");
	}
	auto [w, residue] = detail::wigner_sum(s.grid(), s.matrix(), s.hbar());
	if(residue > tol::wigner_imaginary * std::max(1.0, w.cwiseAbs().maxCoeff()))
		throw NumericalError("wigner_transform: imaginary residue above tolerance");
	return WignerField(PhaseSpaceField(wigner_phase_space_grid(s.grid(), s.hbar()), std::move(w)), s.hbar());
}

/// Weyl symbol a_W(q, p) = int dy A(q + y/2, q - y/2) exp(-i p y / hbar) of an
/// operator given as a matrix a(i, j) = A(x_i, x_j) dx. For A = rho this is
/// 2 pi hbar W. No band or decay check: the caller chooses the kernel.
[[nodiscard]] inline PhaseSpaceField weyl_symbol(const PositionGrid& grid, const cmat& a, double hbar)
{
	grid.validate();
	detail::require(hbar > 0.0, "weyl_symbol: hbar must be positive");
	detail::require(a.rows() == grid.n && a.cols() == grid.n, "weyl_symbol: matrix size does not match grid");
	auto [w, residue] = detail::wigner_sum(grid, a, hbar);
	(void)residue;
	return PhaseSpaceField(wigner_phase_space_grid(grid, hbar), 2.0 * std::numbers::pi * hbar * w);
}

/// Band-limited delta: the projector onto |p| < pi hbar / (2 dx), whose Weyl
/// symbol on the dual grid is exactly 1.
[[nodiscard]] inline cmat band_limited_delta(Index n)
{
	cmat d(n, n);
	for(Index a = 0; a < n; ++a)
		for(Index b = 0; b < n; ++b)
		{
			const Index k = a - b;
			d(a, b) = k == 0 ? 0.5 : std::sin(std::numbers::pi * static_cast<double>(k) / 2.0) / (std::numbers::pi * static_cast<double>(k));
		}
	return d;
}

/// 2 pi hbar int W0 Wt = Tr(rho0 rhot).
[[nodiscard]] inline double wigner_overlap(const WignerField& w0, const WignerField& wt)
{
	detail::require(w0.hbar() == wt.hbar(), "wigner_overlap: hbar mismatch");
	return 2.0 * std::numbers::pi * w0.hbar() * l2_inner(w0.field(), wt.field());
}

/// int W a_W = Tr(A rho).
[[nodiscard]] inline double expectation_via_wigner(const WignerField& w, const PhaseSpaceField& a_w)
{
	return l2_inner(w.field(), a_w);
}

/// Polynomial symbol sampled on a grid.
[[nodiscard]] inline PhaseSpaceField sample_symbol(const PolynomialHamiltonian& h, const PhaseSpaceGrid& grid)
{
	return PhaseSpaceField::sample(grid, [&h](double q, double p) { return h(q, p); });
}

/// int W dp = rho(x, x).
[[nodiscard]] inline rvec position_marginal(const WignerField& w)
{
	return w.field().values().rowwise().sum() * w.grid().dp();
}

/// int W dq.
[[nodiscard]] inline rvec momentum_marginal(const WignerField& w)
{
	return w.field().values().colwise().sum().transpose() * w.grid().dq();
}

/// Diagonal rho(x_i, x_i).
[[nodiscard]] inline rvec position_density(const PositionBasisState& s)
{
	return s.matrix().diagonal().real() / s.grid().dx();
}

/// Momentum density at the dual-grid momenta p_j = (j - n/2) pi hbar / L.
[[nodiscard]] inline rvec momentum_density(const PositionBasisState& s)
{
	const auto full = detail::momentum_density_full(s);
	const Index n = s.grid().n;
	rvec out(n);
	for(Index j = 0; j < n; ++j)
		out(j) = full[static_cast<std::size_t>((j - n / 2 + 2 * n) % (2 * n))];
	return out;
}

// ---- Moyal bracket --------------------------------------------------------

namespace detail {

inline double binomial(int n, int k)
{
	double c = 1.0;
	for(int i = 1; i <= k; ++i)
		c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
	return c;
}

/// Pi^n(f, g) = sum_j C(n, j) (-1)^j d_q^{n-j} d_p^j f * d_p^{n-j} d_q^j g,
/// with derivative providers df(a, b), dg(a, b) returning sampled values, or
/// an empty matrix when the derivative vanishes identically.
template <typename DF, typename DG>
PhaseSpaceField poisson_power_impl(int n, const PhaseSpaceGrid& grid, DF&& df, DG&& dg)
{
	require(n >= 0, "poisson_power: negative order");
	Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(grid.nq, grid.np);
	for(int j = 0; j <= n; ++j)
	{
		const Eigen::MatrixXd a = df(n - j, j);
		if(a.size() == 0)
			continue;
		const Eigen::MatrixXd b = dg(j, n - j);
		if(b.size() == 0)
			continue;
		const double c = binomial(n, j) * (j % 2 == 0 ? 1.0 : -1.0);
		sum += c * a.cwiseProduct(b);
	}
	return PhaseSpaceField(grid, std::move(sum));
}

inline auto polynomial_provider(const PolynomialHamiltonian& h, const PhaseSpaceGrid& grid)
{
	return [&h, &grid](int a, int b) -> Eigen::MatrixXd {
		const PolynomialHamiltonian d = h.derivative(a, b);
		if(d.is_zero())
			return {};
		return sample_symbol(d, grid).values();
	};
}

inline auto spectral_provider(const SpectralDifferentiator& d)
{
	return [&d](int a, int b) -> Eigen::MatrixXd { return d.derivative(a, b).values(); };
}

} // namespace detail

/// Order-n Poisson power of a polynomial and a sampled field.
[[nodiscard]] inline PhaseSpaceField poisson_power(int n, const PolynomialHamiltonian& h, const PhaseSpaceField& g)
{
	const SpectralDifferentiator dg(g);
	return detail::poisson_power_impl(n, g.grid(), detail::polynomial_provider(h, g.grid()), detail::spectral_provider(dg));
}

/// Order-n Poisson power of two sampled fields.
[[nodiscard]] inline PhaseSpaceField poisson_power(int n, const PhaseSpaceField& f, const PhaseSpaceField& g)
{
	detail::require_same_grid(f, g, "poisson_power");
	const SpectralDifferentiator df(f);
	const SpectralDifferentiator dg(g);
	return detail::poisson_power_impl(n, g.grid(), detail::spectral_provider(df), detail::spectral_provider(dg));
}

/// Terms of {{f, g}} = Pi^1 - (hbar^2/24) Pi^3 + (hbar^4/1920) Pi^5, each
/// with its coefficient applied.
struct MoyalTerms
{
	PhaseSpaceField poisson;
	PhaseSpaceField order_hbar2;
	PhaseSpaceField order_hbar4;

	[[nodiscard]] PhaseSpaceField sum() const
	{
		return PhaseSpaceField(poisson.grid(), poisson.values() + order_hbar2.values() + order_hbar4.values());
	}
};

namespace detail {

template <typename PowerFn>
MoyalTerms moyal_terms(PowerFn&& power, double hbar)
{
	require(hbar > 0.0, "moyal_bracket: hbar must be positive");
	const double h2 = hbar * hbar;
	PhaseSpaceField p1 = power(1);
	PhaseSpaceField p3 = power(3);
	PhaseSpaceField p5 = power(5);
	return {std::move(p1), PhaseSpaceField(p3.grid(), (-h2 / 24.0) * p3.values()),
	        PhaseSpaceField(p5.grid(), (h2 * h2 / 1920.0) * p5.values())};
}

} // namespace detail

/// Moyal series of a polynomial symbol against a field. For degree <= 6 the
/// series ends at the hbar^4 term, so the three terms are the whole bracket.
[[nodiscard]] inline MoyalTerms moyal_bracket_terms(const PolynomialHamiltonian& h, const PhaseSpaceField& w, double hbar)
{
	if(h.degree() > PolynomialHamiltonian::max_degree)
		throw std::invalid_argument("moyal_bracket: series not guaranteed finite for degree above 6");
	const SpectralDifferentiator dw(w);
	const auto dh = detail::polynomial_provider(h, w.grid());
	const auto dg = detail::spectral_provider(dw);
	return detail::moyal_terms([&](int n) { return detail::poisson_power_impl(n, w.grid(), dh, dg); }, hbar);
}

/// Series through hbar^4 for two sampled fields (truncated unless one of
/// them is a polynomial of degree <= 6).
[[nodiscard]] inline MoyalTerms moyal_bracket_terms(const PhaseSpaceField& f, const PhaseSpaceField& g, double hbar)
{
	detail::require_same_grid(f, g, "moyal_bracket");
	const SpectralDifferentiator df(f);
	const SpectralDifferentiator dg(g);
	const auto a = detail::spectral_provider(df);
	const auto b = detail::spectral_provider(dg);
	return detail::moyal_terms([&](int n) { return detail::poisson_power_impl(n, g.grid(), a, b); }, hbar);
}

[[nodiscard]] inline PhaseSpaceField moyal_bracket(const PolynomialHamiltonian& h, const WignerField& w)
{
	return moyal_bracket_terms(h, w.field(), w.hbar()).sum();
}

/// sqrt(int {{H, W}}^2 / int W^2): the Wigner-side dispersion rate.
[[nodiscard]] inline double moyal_rate(const PolynomialHamiltonian& h, const WignerField& w)
{
	const PhaseSpaceField mb = moyal_bracket(h, w);
	return std::sqrt(l2_inner(mb, mb) / l2_inner(w.field(), w.field()));
}

/// sqrt(int {H, W}^2 / int W^2): the classical rate evaluated on W.
[[nodiscard]] inline double poisson_rate(const PolynomialHamiltonian& h, const WignerField& w)
{
	const PhaseSpaceField pb = poisson_bracket(h, w.field());
	return std::sqrt(l2_inner(pb, pb) / l2_inner(w.field(), w.field()));
}

// ---- Quantization and states ----------------------------------------------

/// Matrix of H = T(p) + V(q) on the position grid: V diagonal, T applied by
/// Fourier multiplication with p_k = 2 pi hbar k / L.
[[nodiscard]] inline HamiltonianMatrix quantize(const PolynomialHamiltonian& h, const PositionGrid& grid, double hbar)
{
	grid.validate();
	detail::require(hbar > 0.0, "quantize: hbar must be positive");
	detail::require(h.is_separable(), "quantize: only separable Hamiltonians T(p) + V(q) are supported");
	const Index n = grid.n;
	PolynomialHamiltonian kinetic, potential;
	for(const auto& [m, c] : h.terms())
		(m.second > 0 ? kinetic : potential).add_term(m.first, m.second, c);

	cmat out = cmat::Zero(n, n);
	if(!kinetic.is_zero())
	{
		// T(a, b) = (1/n) sum_k T(p_k) exp(i p_k (x_a - x_b) / hbar) depends on a - b only.
		std::vector<cplx> row(static_cast<std::size_t>(2 * n - 1), cplx(0.0));
		for(Index k = -n / 2; k < n / 2; ++k)
		{
			const double pk = 2.0 * std::numbers::pi * hbar * static_cast<double>(k) / grid.length();
			const double tk = kinetic(0.0, pk);
			for(Index d = -(n - 1); d <= n - 1; ++d)
				row[static_cast<std::size_t>(d + n - 1)] +=
				    tk * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * d) / static_cast<double>(n));
		}
		for(Index a = 0; a < n; ++a)
			for(Index b = 0; b < n; ++b)
				out(a, b) = row[static_cast<std::size_t>(a - b + n - 1)] / static_cast<double>(n);
	}
	for(Index a = 0; a < n; ++a)
		out(a, a) += potential(grid.x(a), 0.0);
	return HamiltonianMatrix(detail::symmetrized(out));
}

namespace detail {

inline PositionBasisState pure_position_state(const PositionGrid& grid, cvec psi, double hbar)
{
	const double norm2 = psi.squaredNorm() * grid.dx();
	require(norm2 > 0.0, "pure state: zero wavefunction");
	psi *= std::sqrt(grid.dx() / norm2);
	return PositionBasisState(grid, cmat(psi * psi.adjoint()), hbar);
}

} // namespace detail

/// Eigenstate n of p^2/2 + omega^2 (q - q0)^2 / 2, boosted by momentum p0.
[[nodiscard]] inline cvec oscillator_wavefunction(const PositionGrid& grid, int level, double hbar, double omega = 1.0,
                                                  double q0 = 0.0, double p0 = 0.0)
{
	detail::require(level >= 0, "oscillator_eigenstate: negative level");
	detail::require(hbar > 0.0 && omega > 0.0, "oscillator_eigenstate: hbar and omega must be positive");
	const double s = std::sqrt(omega / hbar);
	const double c0 = std::pow(omega / (std::numbers::pi * hbar), 0.25);
	cvec psi(grid.n);
	for(Index j = 0; j < grid.n; ++j)
	{
		const double x = grid.x(j);
		const double xi = s * (x - q0);
		double prev = 0.0;
		double cur = c0 * std::exp(-0.5 * xi * xi);
		for(int k = 0; k < level; ++k)
		{
			const double next = std::sqrt(2.0 / (k + 1.0)) * xi * cur - std::sqrt(k / (k + 1.0)) * prev;
			prev = cur;
			cur = next;
		}
		psi(j) = cur * std::polar(1.0, p0 * x / hbar);
	}
	return psi;
}

[[nodiscard]] inline PositionBasisState oscillator_eigenstate(const PositionGrid& grid, int level, double hbar,
                                                             double omega = 1.0)
{
	return detail::pure_position_state(grid, oscillator_wavefunction(grid, level, hbar, omega), hbar);
}

/// Coherent state of the unit oscillator centred at (q0, p0).
[[nodiscard]] inline PositionBasisState coherent_state(const PositionGrid& grid, double q0, double p0, double hbar)
{
	return detail::pure_position_state(grid, oscillator_wavefunction(grid, 0, hbar, 1.0, q0, p0), hbar);
}

/// Gaussian state whose Wigner function is the product of normal densities
/// N(q0, sigma_q^2) N(p0, sigma_p^2). Needs sigma_q sigma_p >= hbar / 2; the
/// purity is hbar / (2 sigma_q sigma_p).
[[nodiscard]] inline PositionBasisState gaussian_mixed_state(const PositionGrid& grid, double q0, double p0,
                                                            double sigma_q, double sigma_p, double hbar)
{
	grid.validate();
	detail::require(sigma_q > 0.0 && sigma_p > 0.0 && hbar > 0.0, "gaussian_mixed_state: widths and hbar must be positive");
	detail::require(sigma_q * sigma_p >= 0.5 * hbar * (1.0 - 1e-12),
	                "gaussian_mixed_state: sigma_q sigma_p below hbar / 2 is not a state");
	const Index n = grid.n;
	const double dx = grid.dx();
	const double gn = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma_q);
	cmat m(n, n);
	for(Index a = 0; a < n; ++a)
		for(Index b = 0; b < n; ++b)
		{
			const double u = 0.5 * (grid.x(a) + grid.x(b)) - q0;
			const double y = grid.x(a) - grid.x(b);
			const double env = gn * std::exp(-0.5 * u * u / (sigma_q * sigma_q)) *
			                   std::exp(-0.5 * sigma_p * sigma_p * y * y / (hbar * hbar));
			m(a, b) = env * dx * std::polar(1.0, p0 * y / hbar);
		}
	m /= m.trace().real();
	return PositionBasisState(grid, m, hbar);
}

/// Thermal state exp(-beta H) / Z of H = p^2/2 + omega^2 q^2/2.
[[nodiscard]] inline PositionBasisState gibbs_oscillator_state(const PositionGrid& grid, double beta, double hbar,
                                                              double omega = 1.0)
{
	detail::require(beta > 0.0 && omega > 0.0, "gibbs_oscillator_state: beta and omega must be positive");
	const double coth = 1.0 / std::tanh(0.5 * beta * hbar * omega);
	const double sq = std::sqrt(0.5 * hbar / omega * coth);
	const double sp = std::sqrt(0.5 * hbar * omega * coth);
	return gaussian_mixed_state(grid, 0.0, 0.0, sq, sp, hbar);
}

/// Displaced thermal oscillator state with frequency omega = sigma_p / sigma_q
/// and temperature set by coth(beta hbar omega / 2) = 2 sigma_q sigma_p / hbar:
/// its Wigner function is the fixed Gaussian envelope at every hbar.
struct GaussianEnvelope
{
	double q0 = 0.0;
	double p0 = 0.0;
	double sigma_q = 1.0;
	double sigma_p = 1.0;

	[[nodiscard]] double omega() const { return sigma_p / sigma_q; }

	/// beta at which the thermal oscillator matches the envelope; infinite
	/// at the pure-state limit hbar = 2 sigma_q sigma_p.
	[[nodiscard]] double beta(double hbar) const
	{
		const double ratio = 2.0 * sigma_q * sigma_p / hbar;
		detail::require(ratio >= 1.0, "GaussianEnvelope: hbar exceeds 2 sigma_q sigma_p");
		if(ratio == 1.0)
			return std::numeric_limits<double>::infinity();
		return 2.0 / (hbar * omega()) * std::atanh(1.0 / ratio);
	}

	[[nodiscard]] PositionBasisState state(const PositionGrid& grid, double hbar) const
	{
		return gaussian_mixed_state(grid, q0, p0, sigma_q, sigma_p, hbar);
	}

	[[nodiscard]] PhaseSpaceField density(const PhaseSpaceGrid& grid) const
	{
		return gaussian_density(grid, q0, p0, sigma_q, sigma_p);
	}
};

// ---- Wigner-side bound ----------------------------------------------------

/// Relative purity int W0 Wt / int W0^2 against cos(moyal_rate t), with W_t
/// the transform of the exactly evolved state.
[[nodiscard]] inline BoundCurve wigner_qsl_bound_curve(const PolynomialHamiltonian& h, const PositionBasisState& rho0,
                                                       const std::vector<double>& times)
{
	detail::require_time_grid(times, "wigner_qsl_bound_curve");
	const double hbar = rho0.hbar();
	const WignerField w0 = wigner_transform(rho0);
	const double norm2 = l2_inner(w0.field(), w0.field());
	const double rate = moyal_rate(h, w0);
	const Propagator prop(quantize(h, rho0.grid(), hbar), hbar);
	std::vector<double> lhs(times.size());
	for(std::size_t k = 0; k < times.size(); ++k)
	{
		if(times[k] == 0.0)
		{
			lhs[k] = 1.0;
			continue;
		}
		const PositionBasisState st(rho0.grid(), prop.evolve(rho0.density(), times[k]), hbar);
		lhs[k] = l2_inner(w0.field(), wigner_transform(st).field()) / norm2;
	}
	return detail::finish_curve(times, std::move(lhs), rate);
}

/// Matrix-side curve for the same system.
[[nodiscard]] inline BoundCurve matrix_qsl_bound_curve(const PolynomialHamiltonian& h, const PositionBasisState& rho0,
                                                       const std::vector<double>& times)
{
	return qsl_bound_curve(quantize(h, rho0.grid(), rho0.hbar()), rho0.density(), times, rho0.hbar());
}

} // namespace qsl
