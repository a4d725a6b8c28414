#pragma once

#include "hs_core.hpp"

#include <random>

namespace qsl {

using Rng = std::mt19937_64;

inline cmat complex_gaussian_matrix(Rng& rng, Index rows, Index cols)
{
	std::normal_distribution<double> nd;
	cmat g(rows, cols);
	for(Index j = 0; j < cols; ++j)
		for(Index i = 0; i < rows; ++i)
		{
			const double re = nd(rng);
			const double im = nd(rng);
			g(i, j) = cplx(re, im);
		}
	return g;
}

/// GUE-like Hermitian matrix, entries O(1).
inline HamiltonianMatrix random_hamiltonian(Rng& rng, Index dim)
{
	const cmat g = complex_gaussian_matrix(rng, dim, dim);
	return HamiltonianMatrix(0.5 * (g + g.adjoint()));
}

/// Full-rank mixed state rho = G G^dagger / Tr(G G^dagger).
inline DensityMatrix random_density_matrix(Rng& rng, Index dim)
{
	const cmat g = complex_gaussian_matrix(rng, dim, dim);
	const cmat w = g * g.adjoint();
	return DensityMatrix::assume_valid(w / w.trace().real());
}

inline cvec random_pure_state(Rng& rng, Index dim)
{
	cvec psi = complex_gaussian_matrix(rng, dim, 1).col(0);
	return psi / psi.norm();
}

} // namespace qsl
