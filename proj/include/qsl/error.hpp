#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

/// Raised when a numerical setup cannot deliver a trustworthy answer
/// (domain too small, aliasing, stationary state, ...). Invalid arguments
/// are reported with std::invalid_argument instead.
class NumericalError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
	if(!cond)
		throw std::invalid_argument(what);
}

} // namespace detail
} // namespace qsl
