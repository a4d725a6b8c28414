#pragma once

#include "hbar_sweep.hpp"
#include "random.hpp"
#include "saturation.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qsl {

enum class Sector { quantum, classical, wigner, saturation, hbar_sweep };

inline const char* to_string(Sector s)
{
	switch(s)
	{
	case Sector::quantum: return "quantum";
	case Sector::classical: return "classical";
	case Sector::wigner: return "wigner";
	case Sector::saturation: return "saturation";
	case Sector::hbar_sweep: return "hbar_sweep";
	}
	return "?";
}

struct InitialState
{
	enum class Kind { pure_random, gibbs, two_level_plus, gaussian, coherent, basis };
	Kind kind = Kind::two_level_plus;
	std::optional<std::uint64_t> seed;
	Index dim = 0;
	double beta = 1.0;
	double q0 = 0.0;
	double p0 = 0.0;
	double sigma_q = 1.0;
	double sigma_p = 1.0;
	Index index = 0;
};

/// Either a polynomial symbol, an explicit matrix, or a random GUE-like
/// matrix of the given dimension drawn from the scenario seed.
struct SystemSpec
{
	std::optional<PolynomialHamiltonian> polynomial;
	std::optional<cmat> matrix;
	Index random_dim = 0;
};

struct ScenarioConfig
{
	std::string name = "scenario";
	Sector sector = Sector::quantum;
	SystemSpec system;
	InitialState initial_state;
	/// End point of the saturating arc.
	std::optional<InitialState> target;
	double hbar = 1.0;
	std::vector<double> alpha;
	/// Missing t_max is only allowed for saturation (defaults to the quarter period).
	std::optional<double> t_max;
	std::size_t samples = 101;
	std::optional<PhaseSpaceGrid> grid;
	std::optional<PositionGrid> position_grid;
	std::vector<double> hbars;
	double omega = 1.0;
	double steps_per_unit_time = 20.0;
	bool write_wigner = false;
	std::uint64_t seed = 0;
};

namespace scenario_tol {
inline constexpr double quantum = 1e-9;
inline constexpr double classical = 1e-3;
inline constexpr double wigner_bound = 1e-6;
inline constexpr double wigner_agreement = 1e-5;
inline constexpr double purity = 1e-6;
inline constexpr double saturation_gap = 1e-10;
} // namespace scenario_tol

// ---- Parsing ----------------------------------------------------------------

namespace detail {

inline void require_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where)
{
	require(node.IsMap(), where + ": expected a mapping");
	for(const auto& kv : node)
	{
		const auto key = kv.first.as<std::string>();
		require(allowed.count(key) == 1, where + ": unknown key '" + key + "'");
	}
}

template <typename T>
T yaml_get(const YAML::Node& node, const std::string& key, const std::string& where)
{
	const YAML::Node v = node[key];
	require(v.IsDefined() && !v.IsNull(), where + ": missing '" + key + "'");
	try
	{
		return v.as<T>();
	}
	catch(const YAML::Exception&)
	{
		throw std::invalid_argument(where + ": bad value for '" + key + "'");
	}
}

template <typename T>
T yaml_get(const YAML::Node& node, const std::string& key, const std::string& where, T fallback)
{
	if(!node[key].IsDefined() || node[key].IsNull())
		return fallback;
	return yaml_get<T>(node, key, where);
}

inline void require_positive(double v, const std::string& what)
{
	require(std::isfinite(v) && v > 0.0, what + " must be positive");
}

inline Sector parse_sector(const std::string& s)
{
	static const std::map<std::string, Sector> names{{"quantum", Sector::quantum},
	                                                 {"classical", Sector::classical},
	                                                 {"wigner", Sector::wigner},
	                                                 {"saturation", Sector::saturation},
	                                                 {"hbar_sweep", Sector::hbar_sweep}};
	const auto it = names.find(s);
	require(it != names.end(), "sector: unknown value '" + s + "'");
	return it->second;
}

inline cplx parse_entry(const YAML::Node& n)
{
	try
	{
		if(n.IsSequence())
		{
			require(n.size() == 2, "system.matrix: complex entries are [re, im]");
			return {n[0].as<double>(), n[1].as<double>()};
		}
		return {n.as<double>(), 0.0};
	}
	catch(const YAML::Exception&)
	{
		throw std::invalid_argument("system.matrix: entries must be numbers or [re, im] pairs");
	}
}

inline SystemSpec parse_system(const YAML::Node& node)
{
	SystemSpec s;
	if(node.IsScalar())
	{
		s.polynomial = PolynomialHamiltonian::parse(node.as<std::string>());
		return s;
	}
	require_keys(node, {"polynomial", "matrix", "random"}, "system");
	require(node.size() == 1, "system: give exactly one of polynomial, matrix, random");
	if(node["polynomial"])
		s.polynomial = PolynomialHamiltonian::parse(yaml_get<std::string>(node, "polynomial", "system"));
	else if(node["random"])
	{
		const int d = yaml_get<int>(node, "random", "system");
		require(d >= 1, "system.random: dimension must be positive");
		s.random_dim = d;
	}
	else
	{
		const YAML::Node m = node["matrix"];
		require(m.IsSequence() && m.size() > 0, "system.matrix: expected a list of rows");
		const auto d = static_cast<Index>(m.size());
		cmat h(d, d);
		for(Index i = 0; i < d; ++i)
		{
			const YAML::Node row = m[static_cast<std::size_t>(i)];
			require(row.IsSequence() && static_cast<Index>(row.size()) == d, "system.matrix: matrix must be square");
			for(Index j = 0; j < d; ++j)
				h(i, j) = parse_entry(row[static_cast<std::size_t>(j)]);
		}
		s.matrix = h;
	}
	return s;
}

inline InitialState parse_state(const YAML::Node& node, const std::string& where)
{
	InitialState st;
	if(node.IsScalar())
	{
		require(node.as<std::string>() == "two_level_plus", where + ": only two_level_plus may be given as a bare name");
		return st;
	}
	const auto type = yaml_get<std::string>(node, "type", where);
	using K = InitialState::Kind;
	if(type == "two_level_plus")
	{
		require_keys(node, {"type"}, where);
		st.kind = K::two_level_plus;
	}
	else if(type == "pure_random")
	{
		require_keys(node, {"type", "seed", "dim"}, where);
		st.kind = K::pure_random;
		st.dim = yaml_get<int>(node, "dim", where);
		if(node["seed"])
			st.seed = yaml_get<std::uint64_t>(node, "seed", where);
		require(st.dim >= 1, where + ": dim must be positive");
	}
	else if(type == "gibbs")
	{
		require_keys(node, {"type", "beta", "dim"}, where);
		st.kind = K::gibbs;
		st.beta = yaml_get<double>(node, "beta", where);
		st.dim = yaml_get<int>(node, "dim", where, 0);
		require_positive(st.beta, where + ".beta");
	}
	else if(type == "gaussian")
	{
		require_keys(node, {"type", "q0", "p0", "sigma_q", "sigma_p"}, where);
		st.kind = K::gaussian;
		st.q0 = yaml_get<double>(node, "q0", where);
		st.p0 = yaml_get<double>(node, "p0", where);
		st.sigma_q = yaml_get<double>(node, "sigma_q", where);
		st.sigma_p = yaml_get<double>(node, "sigma_p", where);
		require_positive(st.sigma_q, where + ".sigma_q");
		require_positive(st.sigma_p, where + ".sigma_p");
	}
	else if(type == "coherent")
	{
		require_keys(node, {"type", "q0", "p0"}, where);
		st.kind = K::coherent;
		st.q0 = yaml_get<double>(node, "q0", where);
		st.p0 = yaml_get<double>(node, "p0", where);
	}
	else if(type == "basis")
	{
		require_keys(node, {"type", "index", "dim"}, where);
		st.kind = K::basis;
		st.index = yaml_get<int>(node, "index", where);
		st.dim = yaml_get<int>(node, "dim", where);
		require(st.index >= 0 && st.index < st.dim, where + ": index out of range");
	}
	else
		throw std::invalid_argument(where + ": unknown type '" + type + "'");
	return st;
}

inline PhaseSpaceGrid parse_phase_grid(const YAML::Node& node)
{
	PhaseSpaceGrid g;
	if(node["half_width"])
	{
		require_keys(node, {"half_width", "n"}, "grid");
		g = square_grid(yaml_get<double>(node, "half_width", "grid"), yaml_get<int>(node, "n", "grid"));
	}
	else
	{
		require_keys(node, {"q_min", "q_max", "p_min", "p_max", "nq", "np"}, "grid");
		g.q_min = yaml_get<double>(node, "q_min", "grid");
		g.q_max = yaml_get<double>(node, "q_max", "grid");
		g.p_min = yaml_get<double>(node, "p_min", "grid");
		g.p_max = yaml_get<double>(node, "p_max", "grid");
		g.nq = yaml_get<int>(node, "nq", "grid");
		g.np = yaml_get<int>(node, "np", "grid");
	}
	g.validate();
	return g;
}

inline PositionGrid parse_position_grid(const YAML::Node& node)
{
	PositionGrid g;
	if(node["half_width"])
	{
		require_keys(node, {"half_width", "n"}, "position_grid");
		const double w = yaml_get<double>(node, "half_width", "position_grid");
		g = {-w, w, yaml_get<int>(node, "n", "position_grid")};
	}
	else
	{
		require_keys(node, {"x_min", "x_max", "n"}, "position_grid");
		g = {yaml_get<double>(node, "x_min", "position_grid"), yaml_get<double>(node, "x_max", "position_grid"),
		     yaml_get<int>(node, "n", "position_grid")};
	}
	g.validate();
	return g;
}

} // namespace detail

/// Parses and validates one scenario document.
[[nodiscard]] inline ScenarioConfig parse_scenario(const YAML::Node& root)
{
	using namespace detail;
	require_keys(root,
	             {"name", "sector", "system", "initial_state", "target", "hbar", "alpha", "time_grid", "grid",
	              "position_grid", "hbars", "omega", "steps_per_unit_time", "write_wigner", "seed"},
	             "config");
	ScenarioConfig c;
	c.name = yaml_get<std::string>(root, "name", "config", "scenario");
	c.sector = parse_sector(yaml_get<std::string>(root, "sector", "config"));
	if(root["system"])
		c.system = parse_system(root["system"]);
	require(root["initial_state"].IsDefined(), "config: missing 'initial_state'");
	c.initial_state = parse_state(root["initial_state"], "initial_state");
	if(root["target"])
		c.target = parse_state(root["target"], "target");
	c.hbar = yaml_get<double>(root, "hbar", "config", 1.0);
	require_positive(c.hbar, "hbar");
	if(root["alpha"])
	{
		const YAML::Node a = root["alpha"];
		c.alpha = a.IsSequence() ? yaml_get<std::vector<double>>(root, "alpha", "config")
		                         : std::vector<double>{yaml_get<double>(root, "alpha", "config")};
		for(double v : c.alpha)
			require_positive(v, "alpha");
	}
	if(root["time_grid"])
	{
		const YAML::Node tg = root["time_grid"];
		require_keys(tg, {"t_max", "samples"}, "time_grid");
		if(tg["t_max"])
		{
			c.t_max = yaml_get<double>(tg, "t_max", "time_grid");
			require_positive(*c.t_max, "time_grid.t_max");
		}
		const int n = yaml_get<int>(tg, "samples", "time_grid", 101);
		require(n >= 2, "time_grid.samples must be at least 2");
		c.samples = static_cast<std::size_t>(n);
	}
	if(root["grid"])
		c.grid = parse_phase_grid(root["grid"]);
	if(root["position_grid"])
		c.position_grid = parse_position_grid(root["position_grid"]);
	if(root["hbars"])
		c.hbars = yaml_get<std::vector<double>>(root, "hbars", "config");
	c.omega = yaml_get<double>(root, "omega", "config", 1.0);
	require_positive(c.omega, "omega");
	c.steps_per_unit_time = yaml_get<double>(root, "steps_per_unit_time", "config", 20.0);
	require_positive(c.steps_per_unit_time, "steps_per_unit_time");
	c.write_wigner = yaml_get<bool>(root, "write_wigner", "config", false);
	c.seed = yaml_get<std::uint64_t>(root, "seed", "config", 0);

	// Sector requirements.
	const bool poly = c.system.polynomial.has_value();
	switch(c.sector)
	{
	case Sector::quantum:
		require(poly ? c.position_grid.has_value() : (c.system.matrix || c.system.random_dim > 0),
		        "quantum sector: needs system.matrix, system.random, or a polynomial with position_grid");
		require(c.t_max.has_value(), "quantum sector: time_grid.t_max is required");
		break;
	case Sector::classical:
		require(poly && c.grid.has_value(), "classical sector: needs a polynomial system and grid");
		require(c.t_max.has_value(), "classical sector: time_grid.t_max is required");
		break;
	case Sector::wigner:
		require(poly && c.position_grid.has_value(), "wigner sector: needs a polynomial system and position_grid");
		require(c.t_max.has_value(), "wigner sector: time_grid.t_max is required");
		break;
	case Sector::saturation:
		require(c.target.has_value(), "saturation sector: needs a target state");
		break;
	case Sector::hbar_sweep:
		require(poly && c.grid && c.position_grid, "hbar_sweep sector: needs a polynomial system, grid and position_grid");
		require(!c.hbars.empty(), "hbar_sweep sector: needs hbars");
		require(c.initial_state.kind == InitialState::Kind::gaussian, "hbar_sweep sector: initial_state must be gaussian");
		require(c.t_max.has_value(), "hbar_sweep sector: time_grid.t_max is required");
		break;
	}
	return c;
}

[[nodiscard]] inline ScenarioConfig load_scenario(const std::filesystem::path& path)
{
	YAML::Node root;
	try
	{
		root = YAML::LoadFile(path.string());
	}
	catch(const YAML::Exception& e)
	{
		throw std::invalid_argument("cannot read config " + path.string() + ": " + e.what());
	}
	ScenarioConfig c = parse_scenario(root);
	if(!root["name"])
		c.name = path.stem().string();
	return c;
}

// ---- Output -----------------------------------------------------------------

inline std::string format_number(double v)
{
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.12g", v);
	return buf;
}

inline void write_bound_curve_csv(std::ostream& os, const BoundCurve& c)
{
	os << "time,lhs,rhs,slack\n";
	for(std::size_t k = 0; k < c.size(); ++k)
		os << format_number(c.times[k]) << ',' << format_number(c.lhs[k]) << ',' << format_number(c.rhs[k]) << ','
		   << format_number(c.slack[k]) << '\n';
}

/// Everything a run produces, kept in memory until written.
struct ScenarioResult
{
	std::vector<std::pair<std::string, std::string>> files;
	std::vector<std::pair<std::string, std::string>> summary;
	bool holds = true;

	void add(const std::string& key, double v) { summary.emplace_back(key, format_number(v)); }
	void add(const std::string& key, const std::string& v) { summary.emplace_back(key, v); }

	void add_curve(const std::string& file, const BoundCurve& c)
	{
		std::ostringstream os;
		write_bound_curve_csv(os, c);
		files.emplace_back(file, os.str());
	}

	[[nodiscard]] std::string summary_text() const
	{
		std::string s;
		for(const auto& [k, v] : summary)
			s += k + ": " + v + "\n";
		return s;
	}

	void write(const std::filesystem::path& dir) const
	{
		std::filesystem::create_directories(dir);
		for(const auto& [name, content] : files)
		{
			std::ofstream f(dir / name, std::ios::binary);
			if(!f)
				throw std::runtime_error("cannot write " + (dir / name).string());
			f << content;
		}
		std::ofstream f(dir / "summary.txt", std::ios::binary);
		if(!f)
			throw std::runtime_error("cannot write " + (dir / "summary.txt").string());
		f << summary_text();
	}
};

// ---- Running ----------------------------------------------------------------

namespace detail {

inline Rng seeded(std::uint64_t seed, std::uint64_t stream)
{
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
	                  static_cast<std::uint32_t>(stream)};
	return Rng(seq);
}

inline std::string alpha_label(double a)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%g", a);
	return buf;
}

inline HamiltonianMatrix scenario_matrix(const ScenarioConfig& c)
{
	if(c.system.matrix)
		return HamiltonianMatrix(*c.system.matrix);
	if(c.system.random_dim > 0)
	{
		Rng rng = seeded(c.seed, 1);
		return random_hamiltonian(rng, c.system.random_dim);
	}
	return quantize(*c.system.polynomial, *c.position_grid, c.hbar);
}

inline cvec pure_vector(const InitialState& s, std::uint64_t scenario_seed, Index dim, const char* where)
{
	using K = InitialState::Kind;
	const std::string w(where);
	switch(s.kind)
	{
	case K::two_level_plus:
	{
		require(dim == 2, w + ": two_level_plus needs a two-level system");
		cvec v(2);
		v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
		return v;
	}
	case K::pure_random:
	{
		require(s.dim == dim, w + ": pure_random dim does not match the system");
		Rng rng = seeded(s.seed.value_or(scenario_seed), 2);
		return random_pure_state(rng, dim);
	}
	case K::basis:
	{
		require(s.dim == dim, w + ": basis dim does not match the system");
		cvec v = cvec::Zero(dim);
		v(s.index) = 1.0;
		return v;
	}
	default: throw std::invalid_argument(w + ": state type is not a pure finite-dimensional state");
	}
}

inline PositionBasisState position_state(const InitialState& s, const PositionGrid& grid, double hbar)
{
	using K = InitialState::Kind;
	switch(s.kind)
	{
	case K::gaussian: return gaussian_mixed_state(grid, s.q0, s.p0, s.sigma_q, s.sigma_p, hbar);
	case K::coherent: return coherent_state(grid, s.q0, s.p0, hbar);
	case K::gibbs: return gibbs_oscillator_state(grid, s.beta, hbar);
	default: throw std::invalid_argument("initial_state: type is not a phase-space state");
	}
}

inline DensityMatrix quantum_state(const ScenarioConfig& c, const HamiltonianMatrix& h)
{
	using K = InitialState::Kind;
	const InitialState& s = c.initial_state;
	if(s.kind == K::gibbs && !c.system.polynomial)
	{
		require(s.dim == 0 || s.dim == h.dim(), "initial_state: gibbs dim does not match the system");
		const SpectralDecomposition sd(h.matrix());
		const double e0 = sd.eigenvalues()(0);
		const double beta = s.beta;
		const cmat w = sd.apply([beta, e0](double e) { return cplx(std::exp(-beta * (e - e0)), 0.0); });
		return DensityMatrix::assume_valid(w / w.trace().real());
	}
	if(c.system.polynomial)
		return position_state(s, *c.position_grid, c.hbar).density();
	return DensityMatrix::pure(pure_vector(s, c.seed, h.dim(), "initial_state"));
}

inline void summarize_curve(ScenarioResult& r, const std::string& prefix, const BoundCurve& c)
{
	r.add(prefix + "dispersion", c.dispersion);
	r.add(prefix + "validity_horizon", c.validity_horizon());
	r.add(prefix + "min_slack", c.min_slack_in_window());
	r.add(prefix + "min_slack_all_samples", c.min_slack());
}

inline void run_quantum(const ScenarioConfig& c, ScenarioResult& r)
{
	const HamiltonianMatrix h = scenario_matrix(c);
	const DensityMatrix rho0 = quantum_state(c, h);
	const auto times = uniform_times(*c.t_max, c.samples);
	const BoundCurve curve = qsl_bound_curve(h, rho0, times, c.hbar);
	r.add("dimension", static_cast<double>(h.dim()));
	r.add("purity", purity(rho0));
	summarize_curve(r, "", curve);
	r.add_curve("bound_curve.csv", curve);
	r.holds = curve.holds(scenario_tol::quantum);
	for(double a : c.alpha)
	{
		if(a == 1.0)
			continue;
		const BoundCurve ac = alpha_bound_curve(h, rho0, a, times, c.hbar);
		summarize_curve(r, "alpha_" + alpha_label(a) + "_", ac);
		r.add_curve("bound_curve_alpha_" + alpha_label(a) + ".csv", ac);
		r.holds = r.holds && ac.holds(scenario_tol::quantum);
	}
	r.add("tolerance", scenario_tol::quantum);
}

inline void run_classical(const ScenarioConfig& c, ScenarioResult& r)
{
	const auto& s = c.initial_state;
	require(s.kind == InitialState::Kind::gaussian, "classical sector: initial_state must be gaussian");
	const PolynomialHamiltonian& h = *c.system.polynomial;
	const PhaseSpaceField rho0 = gaussian_density(*c.grid, s.q0, s.p0, s.sigma_q, s.sigma_p);
	const auto times = uniform_times(*c.t_max, c.samples);
	const BoundCurve curve = csl_bound_curve(h, rho0, times, c.steps_per_unit_time);
	summarize_curve(r, "", curve);
	r.add_curve("bound_curve.csv", curve);
	r.holds = curve.holds(scenario_tol::classical);
	for(double a : c.alpha)
	{
		if(a == 1.0)
			continue;
		const BoundCurve ac = alpha_csl_bound_curve(h, rho0, a, times, c.steps_per_unit_time);
		const std::string p = "alpha_" + alpha_label(a) + "_";
		summarize_curve(r, p, ac);
		r.add(p + "order_gap",
		      alpha_order_gap(h, rho0, a, *c.t_max, substeps(*c.t_max, c.steps_per_unit_time)));
		r.add_curve("bound_curve_alpha_" + alpha_label(a) + ".csv", ac);
		r.holds = r.holds && ac.holds(scenario_tol::classical);
	}
	r.add("tolerance", scenario_tol::classical);
}

inline void run_wigner(const ScenarioConfig& c, ScenarioResult& r)
{
	const PolynomialHamiltonian& h = *c.system.polynomial;
	const PositionBasisState st = position_state(c.initial_state, *c.position_grid, c.hbar);
	const auto times = uniform_times(*c.t_max, c.samples);
	const BoundCurve w = wigner_qsl_bound_curve(h, st, times);
	const BoundCurve m = matrix_qsl_bound_curve(h, st, times);
	double agreement = std::abs(w.dispersion - m.dispersion);
	for(std::size_t k = 0; k < times.size(); ++k)
		agreement = std::max({agreement, std::abs(w.lhs[k] - m.lhs[k]), std::abs(w.rhs[k] - m.rhs[k])});
	const WignerField w0 = wigner_transform(st);
	r.add("purity", w0.purity());
	r.add("matrix_purity", purity(st.density()));
	summarize_curve(r, "", w);
	r.add("matrix_dispersion", m.dispersion);
	r.add("matrix_agreement", agreement);
	r.add_curve("bound_curve.csv", w);
	if(c.write_wigner)
	{
		std::ostringstream os;
		w0.write_csv(os);
		r.files.emplace_back("wigner_initial.csv", os.str());
	}
	r.holds = w.holds(scenario_tol::wigner_bound) && agreement <= scenario_tol::wigner_agreement &&
	          w0.purity() <= 1.0 + scenario_tol::purity;
	r.add("tolerance", scenario_tol::wigner_bound);
	r.add("agreement_tolerance", scenario_tol::wigner_agreement);
}

inline void run_saturation(const ScenarioConfig& c, ScenarioResult& r)
{
	Index dim = 2;
	for(const InitialState* s : {&c.initial_state, &*c.target})
		if(s->kind == InitialState::Kind::pure_random || s->kind == InitialState::Kind::basis)
			dim = s->dim;
	const cvec psi = pure_vector(c.initial_state, c.seed, dim, "initial_state");
	// A random target draws from its own stream so it differs from a random psi.
	InitialState tgt = *c.target;
	if(tgt.kind == InitialState::Kind::pure_random && !tgt.seed)
		tgt.seed = c.seed + 1;
	const cvec phi = pure_vector(tgt, c.seed, dim, "target");
	const SaturatingHamiltonian sat(psi, phi, c.omega);
	const double tq = sat.quarter_period(c.hbar);
	const auto times = uniform_times(c.t_max.value_or(tq), c.samples);
	const BoundCurve curve = saturation_bound_curve(sat, times, c.hbar);
	const double gap = mandelstam_tamm_gap(sat, times, c.hbar);

	double interior = std::numeric_limits<double>::infinity();
	for(std::size_t k = 0; k < times.size(); ++k)
		if(times[k] > 0.0 && times[k] < tq)
			interior = std::min(interior, curve.slack[k]);
	const double t_mid = 0.5 * tq;
	const BoundCurve mid = saturation_bound_curve(sat, {0.0, t_mid}, c.hbar);
	const DensityMatrix rho0 = DensityMatrix::pure(psi);
	const auto residual = commutator_form_residual(rho0, evolve(sat.hamiltonian(), rho0, t_mid, c.hbar), c.omega);

	r.add("omega", c.omega);
	r.add("quarter_period", tq);
	r.add("mandelstam_tamm_gap", gap);
	summarize_curve(r, "", curve);
	r.add("min_interior_slack", interior);
	r.add("slack_at_half_quarter_period", mid.slack[1]);
	r.add("commutator_form_residual", residual.value);
	r.add("residual_degenerate", residual.degenerate ? "yes" : "no");
	r.add_curve("bound_curve.csv", curve);
	r.holds = gap <= scenario_tol::saturation_gap && curve.holds(scenario_tol::quantum) && mid.slack[1] > 1e-6 &&
	          !(interior <= 0.0);
}

inline void run_hbar_sweep(const ScenarioConfig& c, ScenarioResult& r)
{
	const auto& s = c.initial_state;
	HbarSweepSetup setup;
	setup.hamiltonian = *c.system.polynomial;
	setup.envelope = {s.q0, s.p0, s.sigma_q, s.sigma_p};
	setup.hbars = c.hbars;
	setup.position = *c.position_grid;
	setup.classical = *c.grid;
	setup.times = uniform_times(*c.t_max, c.samples);
	setup.steps_per_unit_time = c.steps_per_unit_time;
	const HbarSweepResult res = hbar_sweep(setup);

	std::ostringstream os;
	write_convergence_csv(os, res.rows);
	r.files.emplace_back("convergence.csv", os.str());
	r.add_curve("bound_curve.csv", res.classical);

	const auto slope = rate_gap_slope(res.rows);
	bool all_zero = true;
	double max_purity = 0.0;
	for(const auto& row : res.rows)
	{
		all_zero = all_zero && row.rate_gap == 0.0;
		max_purity = std::max(max_purity, row.purity);
	}
	summarize_curve(r, "classical_", res.classical);
	r.add("rate_gap_slope", slope ? format_number(*slope) : std::string(all_zero ? "none (zero gap)" : "none"));
	r.add("rate_gap_all_zero", all_zero ? "yes" : "no");
	const bool decreasing = purity_strictly_decreasing(res.rows);
	r.add("purity_decreasing", decreasing ? "yes" : "no");
	r.holds = res.classical.holds(scenario_tol::classical) && decreasing && max_purity <= 1.0 + scenario_tol::purity;
	r.add("tolerance", scenario_tol::classical);
}

} // namespace detail

/// Runs a validated scenario entirely in memory. Numerical errors
/// (domain too small, aliasing, ...) propagate unchanged.
[[nodiscard]] inline ScenarioResult run_scenario(const ScenarioConfig& c)
{
	ScenarioResult r;
	r.add("scenario", c.name);
	r.add("sector", to_string(c.sector));
	r.add("hbar", c.hbar);
	switch(c.sector)
	{
	case Sector::quantum: detail::run_quantum(c, r); break;
	case Sector::classical: detail::run_classical(c, r); break;
	case Sector::wigner: detail::run_wigner(c, r); break;
	case Sector::saturation: detail::run_saturation(c, r); break;
	case Sector::hbar_sweep: detail::run_hbar_sweep(c, r); break;
	}
	r.add("verdict", r.holds ? "HOLDS" : "VIOLATED");
	return r;
}

} // namespace qsl
