#include "swarmsim/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace swarm;

namespace {

invariant_level parse_level(std::string const& s)
{
	if (s == "off") return invariant_level::off;
	if (s == "basic") return invariant_level::basic;
	if (s == "full") return invariant_level::full;
	throw config_error("--assert: expected off, basic or full");
}

std::string read_file(std::string const& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) throw config_error("cannot open " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

std::string summary_path(std::string const& p)
{
	namespace fs = std::filesystem;
	return fs::is_directory(p) ? (fs::path(p) / "summary.json").string() : p;
}

void run_one(scenario const& s, invariant_level level, std::set<metric> const& metrics, std::string const& out)
{
	auto const r = simulate(s, level);
	auto const report = compute_report(r.trace, metrics, true);
	write_outputs(out, &r.trace, report);
	std::cout << "seed " << s.rng_seed << ": " << r.trace.events.size() << " events, end "
	          << format_double(trace_end(r.trace)) << " s, digest " << hex64(trace_digest(r.trace)) << " -> " << out
	          << '\n';
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"swarmsim: discrete-event BitTorrent swarm simulator"};
	app.require_subcommand(1);

	std::string scenario_file, out_dir = "out", level = "basic", metrics = "all", trace_file;
	std::optional<std::uint64_t> seed;
	std::size_t replicas = 1;
	bool serial = false;

	auto* run = app.add_subcommand("run", "simulate a scenario and write trace, summary and tables");
	run->add_option("-s,--scenario", scenario_file, "scenario file")->required()->check(CLI::ExistingFile);
	run->add_option("-o,--out", out_dir, "output directory");
	run->add_option("--seed", seed, "override the scenario's rng seed");
	run->add_option("--assert", level, "invariant checking: off, basic or full");
	run->add_option("--metrics", metrics, "comma separated metric names or 'all'");
	run->add_option("--replicas", replicas, "independent runs with seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
	run->add_flag("--serial", serial, "run replicas one after another");

	auto* replay = app.add_subcommand("replay", "recompute metrics from a trace file");
	replay->add_option("-t,--trace", trace_file, "trace file")->required()->check(CLI::ExistingFile);
	replay->add_option("-o,--out", out_dir, "output directory");
	replay->add_option("--metrics", metrics, "comma separated metric names or 'all'");

	std::string a, b, compare_out;
	auto* compare = app.add_subcommand("compare", "difference of two summaries (files or run directories)");
	compare->add_option("a", a, "first summary")->required();
	compare->add_option("b", b, "second summary")->required();
	compare->add_option("-o,--out", compare_out, "also write the comparison to this file");

	auto* validate = app.add_subcommand("validate", "check a scenario file without running it");
	validate->add_option("-s,--scenario", scenario_file, "scenario file")->required()->check(CLI::ExistingFile);

	CLI11_PARSE(app, argc, argv);

	try {
		if (run->parsed()) {
			scenario s = load_scenario(scenario_file);
			if (seed) s.rng_seed = *seed;
			auto const lvl = parse_level(level);
			auto const sel = parse_metric_list(metrics);
			if (replicas == 1) {
				run_one(s, lvl, sel, out_dir);
			}
			else {
				run_replicas(replicas, [&](std::size_t i) {
					scenario copy = s;
					copy.rng_seed = s.rng_seed + i;
					auto const r = simulate(copy, lvl);
					auto const report = compute_report(r.trace, sel);
					write_outputs((std::filesystem::path(out_dir) / ("seed_" + std::to_string(copy.rng_seed))).string(),
						&r.trace, report);
					return trace_digest(r.trace);
				}, !serial);
				std::cout << replicas << " replicas written under " << out_dir << '\n';
			}
		}
		else if (replay->parsed()) {
			auto const trace = read_trace_file(trace_file);
			auto const report = compute_report(trace, parse_metric_list(metrics), true);
			write_outputs(out_dir, nullptr, report);
			std::cout << "replayed " << trace.events.size() << " records -> " << out_dir << '\n';
		}
		else if (compare->parsed()) {
			auto const rows = compare_summaries(read_file(summary_path(a)), read_file(summary_path(b)));
			std::string const text = format_comparison(rows);
			std::cout << text;
			if (!compare_out.empty()) std::ofstream(compare_out) << text;
		}
		else if (validate->parsed()) {
			auto const s = load_scenario(scenario_file);
			std::cout << "ok: " << s.peer_count() << " peers, " << s.torrent.num_pieces << " pieces, hash "
			          << hex64(scenario_hash(s)) << '\n';
		}
	}
	catch (invariant_violation const& e) {
		std::cerr << "invariant violation: " << e.what() << '\n';
		return 2;
	}
	catch (std::exception const& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
