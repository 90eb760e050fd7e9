#include "swarmsim/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace swarm {

run_result simulate(scenario const& s, invariant_level checks)
{
	s.validate();
	engine_options opts = s.engine;
	opts.checks = checks;
	simulator sim(s.torrent, expand_peers(s), s.policy, opts, s.rng_seed);
	sim.run();

	run_result out;
	out.stats = sim.stats();
	out.trace.header.scenario_hash = scenario_hash(s);
	out.trace.header.rng_seed = s.rng_seed;
	out.trace.header.torrent = s.torrent;
	out.trace.header.observers = s.observers;
	out.trace.header.grid = s.grid;
	out.trace.events = sim.take_events();
	return out;
}

void write_outputs(std::string const& dir, trace_log const* trace, metrics_report const& report)
{
	namespace fs = std::filesystem;
	fs::create_directories(dir);
	auto write = [&](std::string const& name, std::string const& text) {
		std::ofstream out(fs::path(dir) / name, std::ios::binary);
		if (!out) throw config_error("cannot write " + (fs::path(dir) / name).string());
		out << text;
	};
	if (trace) write_trace_file((fs::path(dir) / "trace.txt").string(), *trace);
	write("summary.json", summary_json(report));
	for (auto const& t : report_tables(report)) write(t.name + ".csv", t.text);
}

namespace {

using json = nlohmann::ordered_json;

void flatten(json const& j, std::string const& prefix, std::map<std::string, double>& out)
{
	if (j.is_object()) {
		for (auto it = j.begin(); it != j.end(); ++it)
			flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
	}
	else if (j.is_array()) {
		for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
	}
	else if (j.is_number()) out[prefix] = j.get<double>();
	else if (j.is_boolean()) out[prefix] = j.get<bool>() ? 1.0 : 0.0;
}

json parse_summary(std::string const& text, char const* which)
{
	try {
		return json::parse(text);
	}
	catch (json::exception const& e) {
		throw config_error(std::string("summary ") + which + " is not valid JSON: " + e.what());
	}
}

} // namespace

std::vector<comparison_row> compare_summaries(std::string const& summary_a, std::string const& summary_b)
{
	json const a = parse_summary(summary_a, "A");
	json const b = parse_summary(summary_b, "B");
	for (char const* key : {"num_pieces", "piece_size", "block_size"}) {
		if (!a.contains(key) || !b.contains(key))
			throw config_error(std::string("summary lacks torrent geometry field ") + key);
		if (a[key] != b[key])
			throw config_error(std::string("refusing to compare: ") + key + " differs (" + a[key].dump() + " vs "
				+ b[key].dump() + "); the runs describe different torrents");
	}
	std::map<std::string, double> fa, fb;
	flatten(a, "", fa);
	flatten(b, "", fb);
	std::vector<comparison_row> rows;
	for (auto const& [k, va] : fa) {
		auto it = fb.find(k);
		if (it == fb.end()) continue;
		rows.push_back({k, va, it->second});
	}
	return rows;
}

std::string format_comparison(std::vector<comparison_row> const& rows)
{
	std::ostringstream o;
	o << "key,a,b,delta\n";
	for (auto const& r : rows)
		o << r.key << ',' << format_double(r.a) << ',' << format_double(r.b) << ',' << format_double(r.delta()) << '\n';
	return o.str();
}

std::vector<replica_summary> run_batch(scenario const& s, std::size_t replicas, invariant_level checks, bool parallel)
{
	return run_replicas(replicas, [&](std::size_t i) {
		scenario copy = s;
		copy.rng_seed = s.rng_seed + i;
		auto const r = simulate(copy, checks);
		return replica_summary{copy.rng_seed, trace_digest(r.trace), r.trace.events.size(), trace_end(r.trace)};
	}, parallel);
}

} // namespace swarm
