// qsl: scenario runner and verification front end.
//
//   qsl run <config>... [--out DIR] [--jobs N]
//   qsl sweep-hbar <config> [--out DIR]
//   qsl verify [--seed S] [--inject-failure]
//
// Exit codes: 0 all bounds hold, 1 a bound is violated (or an invariant
// fails), 2 invalid config or numerical error.

#include "qsl/scenario.hpp"
#include "qsl/verify.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;

namespace {

enum Exit : int { ok = 0, violated = 1, failure = 2 };

struct Outcome
{
	int code = ok;
	std::string out;
	std::string err;
};

/// --out wins, then QSL_OUT, then ./qsl_out.
fs::path output_root(const std::string& flag)
{
	if(!flag.empty())
		return flag;
	if(const char* env = std::getenv("QSL_OUT"); env && *env)
		return env;
	return "qsl_out";
}

Outcome run_one(const fs::path& config, const fs::path& dir, bool require_sweep)
{
	Outcome o;
	try
	{
		const qsl::ScenarioConfig c = qsl::load_scenario(config);
		if(require_sweep && c.sector != qsl::Sector::hbar_sweep)
			throw std::invalid_argument("sweep-hbar: " + config.string() + " is not an hbar_sweep scenario");
		const qsl::ScenarioResult r = qsl::run_scenario(c);
		r.write(dir);
		o.out = r.summary_text() + "output: " + dir.string() + "\n";
		o.code = r.holds ? ok : violated;
	}
	catch(const std::invalid_argument& e)
	{
		o.err = "error: invalid config " + config.string() + ": " + e.what() + "\n";
		o.code = failure;
	}
	catch(const std::exception& e)
	{
		o.err = "error: " + config.string() + ": " + e.what() + "\n";
		o.code = failure;
	}
	return o;
}

int run_batch(const std::vector<std::string>& configs, const std::string& out_flag, unsigned jobs, bool require_sweep)
{
	const fs::path root = output_root(out_flag);
	// One config writes straight into the output directory; a batch gets a
	// subdirectory per config so parallel runs never share files.
	std::vector<fs::path> dirs;
	for(const auto& c : configs)
		dirs.push_back(configs.size() == 1 ? root : root / fs::path(c).stem());

	std::vector<Outcome> results(configs.size());
	std::atomic<std::size_t> next{0};
	auto worker = [&] {
		for(std::size_t k = next++; k < configs.size(); k = next++)
			results[k] = run_one(configs[k], dirs[k], require_sweep);
	};
	const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
	std::vector<std::thread> pool;
	for(unsigned t = 1; t < n; ++t)
		pool.emplace_back(worker);
	worker();
	for(auto& t : pool)
		t.join();

	int code = ok;
	for(const auto& r : results)
	{
		std::cout << r.out;
		std::cerr << r.err;
		code = std::max(code, r.code);
	}
	return code;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Speed-limit scenario runner"};
	app.require_subcommand(1);

	std::vector<std::string> run_configs;
	std::string out_dir;
	unsigned jobs = 1;
	auto* run = app.add_subcommand("run", "Run scenario configs and write CSV output");
	run->add_option("configs", run_configs, "Scenario YAML files")->required()->check(CLI::ExistingFile);
	run->add_option("--out", out_dir, "Output directory (default: $QSL_OUT or ./qsl_out)");
	run->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

	std::string sweep_config;
	auto* sweep = app.add_subcommand("sweep-hbar", "Run an hbar_sweep scenario and write convergence.csv");
	sweep->add_option("config", sweep_config, "Scenario YAML file")->required()->check(CLI::ExistingFile);
	sweep->add_option("--out", out_dir, "Output directory (default: $QSL_OUT or ./qsl_out)");

	std::uint64_t seed = 20240611;
	bool inject = false;
	auto* verify = app.add_subcommand("verify", "Run every module's invariant suite");
	verify->add_option("--seed", seed, "Random seed");
	verify->add_flag("--inject-failure", inject, "Corrupt one tolerance (negative control)");

	try
	{
		app.parse(argc, argv);
	}
	catch(const CLI::ParseError& e)
	{
		const int rc = app.exit(e);
		return rc == 0 ? ok : failure;
	}

	if(*run)
		return run_batch(run_configs, out_dir, jobs, false);
	if(*sweep)
		return run_batch({sweep_config}, out_dir, 1, true);

	try
	{
		const qsl::VerifyReport rep = qsl::verify_all(seed, inject);
		std::cout << rep.text();
		return rep.all_passed() ? ok : violated;
	}
	catch(const std::exception& e)
	{
		std::cerr << "error: verify: " << e.what() << "\n";
		return failure;
	}
}
