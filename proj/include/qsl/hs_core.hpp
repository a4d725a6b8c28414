#pragma once

#include "error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace qsl {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
} // namespace tol

namespace detail {

inline double max_abs(const cmat& m)
{
	return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |A - A^dagger| relative to max(1, max |A|).
inline double hermiticity_defect(const cmat& m)
{
	const double scale = std::max(1.0, max_abs(m));
	return max_abs(m - m.adjoint()) / scale;
}

inline cmat symmetrized(const cmat& m)
{
	return 0.5 * (m + m.adjoint());
}

inline void require_square(const cmat& m, const char* what)
{
	require(m.rows() > 0 && m.rows() == m.cols(), std::string(what) + ": matrix must be square and non-empty");
}

inline void require_same_dim(const cmat& a, const cmat& b, const char* what)
{
	require(a.rows() == b.rows() && a.cols() == b.cols(), std::string(what) + ": dimension mismatch");
}

} // namespace detail

/// Eigen-decomposition of a Hermitian matrix: A = U diag(lambda) U^dagger,
/// eigenvalues ascending.
class SpectralDecomposition
{
public:
	explicit SpectralDecomposition(const cmat& hermitian)
	{
		detail::require_square(hermitian, "SpectralDecomposition");
		const Eigen::SelfAdjointEigenSolver<cmat> es(detail::symmetrized(hermitian));
		if(es.info() != Eigen::Success)
			throw NumericalError("SpectralDecomposition: eigensolver did not converge");
		eigenvalues_ = es.eigenvalues();
		eigenvectors_ = es.eigenvectors();
	}

	[[nodiscard]] const rvec& eigenvalues() const { return eigenvalues_; }
	[[nodiscard]] const cmat& eigenvectors() const { return eigenvectors_; }
	[[nodiscard]] Index dim() const { return eigenvalues_.size(); }

	/// U f(lambda) U^dagger for a scalar function f.
	template <typename F>
	[[nodiscard]] cmat apply(F&& f) const
	{
		cmat scaled = eigenvectors_;
		for(Index k = 0; k < dim(); ++k)
			scaled.col(k) *= f(eigenvalues_(k));
		return scaled * eigenvectors_.adjoint();
	}

	[[nodiscard]] cmat reconstruct() const
	{
		return apply([](double x) { return cplx(x, 0.0); });
	}

	/// Express A in the eigenbasis: U^dagger A U.
	[[nodiscard]] cmat to_eigenbasis(const cmat& a) const
	{
		return eigenvectors_.adjoint() * a * eigenvectors_;
	}

private:
	rvec eigenvalues_;
	cmat eigenvectors_;
};

/// Hermitian generator of unitary dynamics. Stored symmetrized.
class HamiltonianMatrix
{
public:
	explicit HamiltonianMatrix(const cmat& m)
	{
		detail::require_square(m, "HamiltonianMatrix");
		detail::require(m.allFinite(), "HamiltonianMatrix: non-finite entries");
		detail::require(detail::hermiticity_defect(m) <= tol::hermitian,
		                "HamiltonianMatrix: matrix is not Hermitian");
		m_ = detail::symmetrized(m);
	}

	[[nodiscard]] Index dim() const { return m_.rows(); }
	[[nodiscard]] const cmat& matrix() const { return m_; }

	/// Largest |eigenvalue|.
	[[nodiscard]] double spectral_norm() const
	{
		return SpectralDecomposition(m_).eigenvalues().cwiseAbs().maxCoeff();
	}

private:
	cmat m_;
};

/// Positive semidefinite, unit-trace Hermitian matrix.
class DensityMatrix
{
public:
	explicit DensityMatrix(const cmat& m)
	{
		detail::require_square(m, "DensityMatrix");
		detail::require(m.allFinite(), "DensityMatrix: non-finite entries");
		detail::require(detail::hermiticity_defect(m) <= tol::hermitian, "DensityMatrix: matrix is not Hermitian");
		m_ = detail::symmetrized(m);
		detail::require(std::abs(m_.trace() - cplx(1.0, 0.0)) <= tol::trace, "DensityMatrix: trace is not 1");
		const double lmin = SpectralDecomposition(m_).eigenvalues()(0);
		detail::require(lmin >= -tol::psd, "DensityMatrix: matrix is not positive semidefinite");
	}

	/// Skips the O(d^3) positivity check. For matrices produced by
	/// transformations that preserve the invariants (unitary conjugation).
	[[nodiscard]] static DensityMatrix assume_valid(const cmat& m)
	{
		DensityMatrix out;
		out.m_ = detail::symmetrized(m);
		return out;
	}

	[[nodiscard]] static DensityMatrix pure(const cvec& psi)
	{
		detail::require(psi.size() > 0, "DensityMatrix::pure: empty state");
		const double n = psi.norm();
		detail::require(n > 0.0, "DensityMatrix::pure: zero vector");
		const cvec u = psi / n;
		return assume_valid(u * u.adjoint());
	}

	[[nodiscard]] static DensityMatrix maximally_mixed(Index d)
	{
		detail::require(d > 0, "DensityMatrix::maximally_mixed: dimension must be positive");
		return assume_valid(cmat::Identity(d, d) / static_cast<double>(d));
	}

	[[nodiscard]] Index dim() const { return m_.rows(); }
	[[nodiscard]] const cmat& matrix() const { return m_; }

private:
	DensityMatrix() = default;
	cmat m_;
};

/// Tr(A^dagger B).
[[nodiscard]] inline cplx hs_inner(const cmat& a, const cmat& b)
{
	detail::require_same_dim(a, b, "hs_inner");
	return (a.conjugate().cwiseProduct(b)).sum();
}

[[nodiscard]] inline double purity(const DensityMatrix& rho)
{
	return hs_inner(rho.matrix(), rho.matrix()).real();
}

/// Tr(rho0 rhot) / Tr(rho0^2).
[[nodiscard]] inline double relative_purity(const DensityMatrix& rho0, const DensityMatrix& rhot)
{
	detail::require_same_dim(rho0.matrix(), rhot.matrix(), "relative_purity");
	return hs_inner(rho0.matrix(), rhot.matrix()).real() / purity(rho0);
}

/// [H, A] = HA - AH.
[[nodiscard]] inline cmat commutator(const cmat& h, const cmat& a)
{
	detail::require_same_dim(h, a, "commutator");
	return h * a - a * h;
}

[[nodiscard]] inline cmat commutator(const HamiltonianMatrix& h, const DensityMatrix& rho)
{
	return commutator(h.matrix(), rho.matrix());
}

namespace detail {

/// (1/hbar) sqrt(-Tr([H,A]^2) / Tr(A^2)) for Hermitian A (not necessarily
/// unit trace). -Tr(C^2) = ||C||_F^2 for anti-Hermitian C.
inline double commutator_dispersion(const cmat& h, const cmat& a, double hbar)
{
	require(hbar > 0.0, "commutator_dispersion: hbar must be positive");
	const double num = commutator(h, a).squaredNorm();
	const double den = a.squaredNorm();
	require(den > 0.0, "commutator_dispersion: zero operator");
	return std::sqrt(num / den) / hbar;
}

} // namespace detail

/// Mandelstam-Tamm dispersion of the commutator superoperator in
/// Hilbert-Schmidt space, in units of 1/time.
[[nodiscard]] inline double commutator_dispersion(const HamiltonianMatrix& h, const DensityMatrix& rho, double hbar)
{
	detail::require_same_dim(h.matrix(), rho.matrix(), "commutator_dispersion");
	return detail::commutator_dispersion(h.matrix(), rho.matrix(), hbar);
}

namespace detail {

inline cmat psd_power(const cmat& a, double alpha)
{
	require(alpha > 0.0, "matrix_power: alpha must be positive");
	const SpectralDecomposition sd(a);
	if(sd.eigenvalues()(0) < -tol::psd)
		throw std::invalid_argument("matrix_power: matrix has a negative eigenvalue");
	// Eigenvalues at round-off level are zeros of a rank-deficient input.
	const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
	                     std::max(1.0, sd.eigenvalues().cwiseAbs().maxCoeff()) * static_cast<double>(sd.dim());
	return sd.apply([alpha, floor](double x) { return cplx(x <= floor ? 0.0 : std::pow(x, alpha), 0.0); });
}

} // namespace detail

/// rho^alpha through the spectral decomposition, with 0^alpha = 0.
/// The result is Hermitian PSD but in general not unit trace.
[[nodiscard]] inline cmat matrix_power(const DensityMatrix& rho, double alpha)
{
	if(alpha == 1.0)
		return rho.matrix();
	return detail::psd_power(rho.matrix(), alpha);
}

/// General Hermitian PSD input (e.g. an already powered rho).
[[nodiscard]] inline cmat matrix_power(const cmat& a, double alpha)
{
	detail::require_square(a, "matrix_power");
	if(alpha == 1.0)
		return detail::symmetrized(a);
	return detail::psd_power(a, alpha);
}

} // namespace qsl
