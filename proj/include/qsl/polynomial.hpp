#pragma once

#include "error.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>

namespace qsl {

/// Real polynomial H(q, p) = sum c_ab q^a p^b of total degree <= 6.
class PolynomialHamiltonian
{
public:
	static constexpr int max_degree = 6;
	using Monomial = std::pair<int, int>;

	PolynomialHamiltonian() = default;

	explicit PolynomialHamiltonian(const std::map<Monomial, double>& terms)
	{
		for(const auto& [m, c] : terms)
			add_term(m.first, m.second, c);
	}

	/// Adds c q^a p^b, merging with an existing monomial.
	PolynomialHamiltonian& add_term(int q_power, int p_power, double c)
	{
		detail::require(q_power >= 0 && p_power >= 0, "PolynomialHamiltonian: negative power");
		detail::require(q_power + p_power <= max_degree, "PolynomialHamiltonian: total degree exceeds 6");
		detail::require(std::isfinite(c), "PolynomialHamiltonian: non-finite coefficient");
		double& slot = terms_[{q_power, p_power}];
		slot += c;
		if(slot == 0.0)
			terms_.erase({q_power, p_power});
		return *this;
	}

	[[nodiscard]] const std::map<Monomial, double>& terms() const { return terms_; }
	[[nodiscard]] bool is_zero() const { return terms_.empty(); }

	[[nodiscard]] int degree() const
	{
		int d = 0;
		for(const auto& [m, c] : terms_)
			d = std::max(d, m.first + m.second);
		return d;
	}

	/// True when H = T(p) + V(q).
	[[nodiscard]] bool is_separable() const
	{
		for(const auto& [m, c] : terms_)
			if(m.first > 0 && m.second > 0)
				return false;
		return true;
	}

	/// d^a/dq^a d^b/dp^b H.
	[[nodiscard]] PolynomialHamiltonian derivative(int dq, int dp) const
	{
		PolynomialHamiltonian out;
		for(const auto& [m, c] : terms_)
		{
			if(m.first < dq || m.second < dp)
				continue;
			double f = c;
			for(int k = 0; k < dq; ++k)
				f *= m.first - k;
			for(int k = 0; k < dp; ++k)
				f *= m.second - k;
			out.add_term(m.first - dq, m.second - dp, f);
		}
		return out;
	}

	[[nodiscard]] double operator()(double q, double p) const
	{
		std::array<double, max_degree + 1> qp{}, pp{};
		qp[0] = pp[0] = 1.0;
		for(int k = 1; k <= max_degree; ++k)
		{
			qp[k] = qp[k - 1] * q;
			pp[k] = pp[k - 1] * p;
		}
		double s = 0.0;
		for(const auto& [m, c] : terms_)
			s += c * qp[m.first] * pp[m.second];
		return s;
	}

	[[nodiscard]] std::string to_string() const
	{
		if(terms_.empty())
			return "0";
		std::string s;
		char buf[64];
		for(const auto& [m, c] : terms_)
		{
			if(s.empty())
				std::snprintf(buf, sizeof buf, "%.17g", c);
			else
				std::snprintf(buf, sizeof buf, " %c %.17g", c < 0.0 ? '-' : '+', std::abs(c));
			s += buf;
			for(const auto& [var, power] : {std::pair{'q', m.first}, std::pair{'p', m.second}})
			{
				if(power == 0)
					continue;
				s += ' ';
				s += var;
				if(power > 1)
					s += "^" + std::to_string(power);
			}
		}
		return s;
	}

	/// (p^2 + omega^2 q^2) / 2.
	[[nodiscard]] static PolynomialHamiltonian harmonic(double omega = 1.0)
	{
		PolynomialHamiltonian h;
		h.add_term(0, 2, 0.5).add_term(2, 0, 0.5 * omega * omega);
		return h;
	}

	/// Parses expressions such as "0.5 p^2 + 0.5*q^2 - 0.1 q^4 + 2 q p".
	[[nodiscard]] static PolynomialHamiltonian parse(const std::string& text);

private:
	std::map<Monomial, double> terms_;
};

inline PolynomialHamiltonian PolynomialHamiltonian::parse(const std::string& text)
{
	PolynomialHamiltonian h;
	std::size_t i = 0;
	const std::size_t n = text.size();
	auto skip = [&] {
		while(i < n && std::isspace(static_cast<unsigned char>(text[i])))
			++i;
	};
	auto fail = [&](const std::string& why) {
		throw std::invalid_argument("cannot parse polynomial '" + text + "': " + why);
	};

	skip();
	if(i == n)
		fail("empty expression");
	bool first = true;
	while(true)
	{
		skip();
		if(i == n)
			break;
		double sign = 1.0;
		if(text[i] == '+' || text[i] == '-')
		{
			sign = text[i] == '-' ? -1.0 : 1.0;
			++i;
			skip();
		}
		else if(!first)
			fail("expected '+' or '-'");
		first = false;

		double coef = 1.0;
		bool have_number = false;
		if(i < n && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
		{
			std::size_t used = 0;
			coef = std::stod(text.substr(i), &used);
			i += used;
			have_number = true;
		}
		int qa = 0;
		int pb = 0;
		bool have_factor = false;
		while(true)
		{
			skip();
			if(i < n && text[i] == '*')
			{
				++i;
				skip();
			}
			if(i >= n || (text[i] != 'q' && text[i] != 'p'))
				break;
			const char var = text[i++];
			int power = 1;
			skip();
			if(i < n && text[i] == '^')
			{
				++i;
				skip();
				if(i >= n || !std::isdigit(static_cast<unsigned char>(text[i])))
					fail("expected exponent after '^'");
				power = 0;
				while(i < n && std::isdigit(static_cast<unsigned char>(text[i])))
					power = 10 * power + (text[i++] - '0');
			}
			(var == 'q' ? qa : pb) += power;
			have_factor = true;
		}
		if(!have_number && !have_factor)
			fail("empty term");
		h.add_term(qa, pb, sign * coef);
	}
	return h;
}

} // namespace qsl
