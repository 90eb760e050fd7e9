#include "swarmsim/metrics.hpp"

#include <json.hpp>

#include <array>
#include <sstream>

namespace swarm {

namespace {

constexpr std::array<std::string_view, 9> metric_names = {
	"entropy", "copies", "rarest", "state", "reciprocation", "unchoke", "fairness", "rotation", "peers"};

using json = nlohmann::ordered_json;

json opt(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json to_json(quantiles const& q)
{
	return json{{"p20", opt(q.p20)}, {"median", opt(q.median)}, {"p80", opt(q.p80)}};
}

std::string fmt(double v) { return format_double(v); }

std::string fmt(std::optional<sim_time> v) { return v ? format_double(*v) : std::string("-"); }

} // namespace

std::string_view to_string(metric m) { return metric_names[static_cast<std::size_t>(m)]; }

metric parse_metric(std::string_view s)
{
	for (std::size_t i = 0; i < metric_names.size(); ++i)
		if (metric_names[i] == s) return static_cast<metric>(i);
	throw config_error("unknown metric '" + std::string(s) + "'");
}

std::set<metric> all_metrics()
{
	std::set<metric> out;
	for (std::size_t i = 0; i < metric_names.size(); ++i) out.insert(static_cast<metric>(i));
	return out;
}

std::set<metric> parse_metric_list(std::string_view s)
{
	if (s == "all") return all_metrics();
	std::set<metric> out;
	while (!s.empty()) {
		auto const comma = s.find(',');
		auto const name = s.substr(0, comma);
		if (!name.empty()) out.insert(parse_metric(name));
		if (comma == std::string_view::npos) break;
		s.remove_prefix(comma + 1);
	}
	if (out.empty()) throw config_error("empty metric selection");
	return out;
}

metrics_report compute_report(trace_log const& trace, std::set<metric> const& selected, bool parallel)
{
	metrics_report r;
	r.header = trace.header;
	r.end = trace_end(trace);
	r.selected = selected;
	auto has = [&](metric m) { return selected.count(m) != 0; };

	if (has(metric::state)) r.state = classify_state(trace, trace.header.grid);
	if (has(metric::peers)) r.peers = peer_timelines(trace);

	auto const& obs = trace.header.observers;
	r.observers.resize(obs.size());
	auto one = [&](std::size_t i) {
		observer_report& o = r.observers[i];
		o.observer = obs[i];
		if (has(metric::entropy)) o.entropy = entropy_ratios(trace, o.observer);
		if (has(metric::copies) || has(metric::rarest))
			o.copies = copy_statistics(trace, o.observer, trace.header.grid);
		if (has(metric::reciprocation)) o.reciprocation = reciprocation_report(trace, o.observer);
		if (has(metric::unchoke)) o.unchoke = unchoke_interest_correlation(trace, o.observer);
		if (has(metric::fairness)) o.fairness = seed_fairness_report(trace, o.observer);
		if (has(metric::rotation)) o.rotation = seed_rotation_check(trace, o.observer);
	};

	if (parallel) {
		std::vector<std::string> errors(obs.size());
#pragma omp parallel for schedule(dynamic)
		for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(obs.size()); ++i) {
			try {
				one(std::size_t(i));
			}
			catch (std::exception const& e) {
				errors[std::size_t(i)] = e.what();
			}
		}
		for (auto const& e : errors)
			if (!e.empty()) throw config_error(e);
	}
	else {
		for (std::size_t i = 0; i < obs.size(); ++i) one(i);
	}
	return r;
}

std::string summary_json(metrics_report const& r)
{
	json j;
	j["format"] = r.header.version;
	j["scenario_hash"] = hex64(r.header.scenario_hash);
	j["rng_seed"] = r.header.rng_seed;
	j["num_pieces"] = r.header.torrent.num_pieces;
	j["piece_size"] = r.header.torrent.piece_size;
	j["block_size"] = r.header.torrent.block_size;
	j["grid"] = r.header.grid;
	j["end_time"] = r.end;
	json names = json::array();
	for (metric m : r.selected) names.push_back(std::string(to_string(m)));
	j["metrics"] = names;

	if (r.state) {
		json t = json::array();
		for (auto const& tr : r.state->transitions) t.push_back({tr.time, tr.transient ? "transient" : "steady"});
		j["state"] = {{"transient_duration", r.state->transient_duration}, {"monotone", r.state->monotone},
			{"transitions", t}};
	}
	if (r.peers) {
		std::size_t arrived = 0, completed = 0;
		std::int64_t up = 0, down = 0, discarded = 0;
		for (auto const& p : *r.peers) {
			if (p.arrival) ++arrived;
			if (p.seed_at && !p.initial_seed) ++completed;
			up += p.uploaded;
			down += p.downloaded;
			discarded += p.discarded;
		}
		j["peers"] = {{"arrived", arrived}, {"completed", completed}, {"uploaded", up}, {"downloaded", down},
			{"discarded", discarded}};
	}

	json observers = json::object();
	for (auto const& o : r.observers) {
		json jo = json::object();
		if (o.entropy) {
			jo["entropy"] = {{"pairs", o.entropy->rows.size()}, {"excluded_short", o.entropy->excluded_short},
				{"excluded_zero", o.entropy->excluded_zero}, {"local", to_json(o.entropy->local)},
				{"remote", to_json(o.entropy->remote)}};
		}
		if (o.copies && r.selected.count(metric::copies)) {
			std::size_t zero = 0;
			for (auto const& s : *o.copies)
				if (s.min == 0) ++zero;
			jo["copies"] = {{"samples", o.copies->size()}, {"samples_min_zero", zero}};
		}
		if (o.copies && r.selected.count(metric::rarest)) {
			json jr = {{"samples", o.copies->size()}};
			if (r.state) {
				std::vector<double> x, y;
				for (auto const& s : *o.copies) {
					if (!r.state->transient.contains(s.time)) continue;
					x.push_back(s.time);
					y.push_back(double(s.rarest));
				}
				jr["transient_slope"] = opt(linear_slope(x, y));
			}
			jo["rarest"] = jr;
		}
		if (o.reciprocation) {
			json b = json::array();
			for (auto const& bk : o.reciprocation->buckets)
				b.push_back({{"size", bk.size}, {"upload_fraction", bk.upload_fraction},
					{"download_fraction", bk.download_fraction}});
			jo["reciprocation"] = {{"counterparties", o.reciprocation->peers.size()},
				{"uploaded", o.reciprocation->total_uploaded}, {"downloaded", o.reciprocation->total_downloaded},
				{"rank_correlation", opt(o.reciprocation->rank_correlation)},
				{"short_of_peers", o.reciprocation->short_of_peers}, {"buckets", b}};
		}
		if (o.unchoke) {
			jo["unchoke"] = {{"leecher_points", o.unchoke->leecher.size()}, {"seed_points", o.unchoke->seed.size()},
				{"leecher_correlation", opt(o.unchoke->leecher_correlation)},
				{"seed_correlation", opt(o.unchoke->seed_correlation)}};
		}
		if (o.fairness) {
			json shares = json::object();
			for (auto const& p : o.fairness->peers) shares[std::to_string(p.remote)] = p.share;
			jo["fairness"] = {{"seed_start", opt(o.fairness->seed_start)}, {"cycles", o.fairness->cycles},
				{"served", o.fairness->total}, {"cv", opt(o.fairness->cv)}, {"shares", shares}};
		}
		if (o.rotation) {
			jo["rotation"] = {{"rounds", o.rotation->rounds}, {"displacements", o.rotation->displacements},
				{"mismatches", o.rotation->mismatches}};
		}
		observers[std::to_string(o.observer)] = jo;
	}
	j["observers"] = observers;
	return j.dump(2) + "\n";
}

std::vector<table> report_tables(metrics_report const& r)
{
	std::vector<table> out;
	auto emit = [&](std::string name, std::ostringstream const& ss) { out.push_back({std::move(name), ss.str()}); };

	if (r.peers) {
		std::ostringstream ss;
		ss << "id,behavior,arrival,departure,seed_at,uploaded,downloaded,discarded,pieces\n";
		for (auto const& p : *r.peers) {
			if (!p.arrival) continue;
			std::string_view kind = p.behavior_code >= 0 && p.behavior_code <= 2
				? to_string(static_cast<behavior>(p.behavior_code)) : std::string_view("unknown");
			ss << p.id << ',' << kind << ',' << fmt(p.arrival) << ',' << fmt(p.departure) << ',' << fmt(p.seed_at)
			   << ',' << p.uploaded << ',' << p.downloaded << ',' << p.discarded << ',' << p.pieces << '\n';
		}
		emit("peers", ss);
	}
	if (r.state) {
		std::ostringstream ss;
		ss << "time,state\n";
		for (auto const& [t, tr] : r.state->samples) ss << fmt(t) << ',' << (tr ? "transient" : "steady") << '\n';
		emit("state", ss);
		std::ostringstream tt;
		tt << "time,state\n";
		for (auto const& tr : r.state->transitions)
			tt << fmt(tr.time) << ',' << (tr.transient ? "transient" : "steady") << '\n';
		emit("state_transitions", tt);
	}
	for (auto const& o : r.observers) {
		std::string const suffix = "_" + std::to_string(o.observer);
		if (o.entropy) {
			std::ostringstream ss;
			ss << "remote,local_interested,remote_interested,window,local_ratio,remote_ratio\n";
			for (auto const& row : o.entropy->rows)
				ss << row.remote << ',' << fmt(row.local_interested) << ',' << fmt(row.remote_interested) << ','
				   << fmt(row.window) << ',' << fmt(row.local_ratio()) << ',' << fmt(row.remote_ratio()) << '\n';
			emit("entropy" + suffix, ss);
		}
		if (o.copies && r.selected.count(metric::copies)) {
			std::ostringstream ss;
			ss << "time,members,min,mean,max\n";
			for (auto const& s : *o.copies)
				ss << fmt(s.time) << ',' << s.members << ',' << s.min << ',' << fmt(s.mean) << ',' << s.max << '\n';
			emit("copies" + suffix, ss);
		}
		if (o.copies && r.selected.count(metric::rarest)) {
			std::ostringstream ss;
			ss << "time,size,min_count\n";
			for (auto const& s : *o.copies) ss << fmt(s.time) << ',' << s.rarest << ',' << s.rarest_min << '\n';
			emit("rarest" + suffix, ss);
		}
		if (o.reciprocation) {
			std::ostringstream ss;
			ss << "rank,remote,uploaded,downloaded\n";
			std::size_t rank = 1;
			for (auto const& p : o.reciprocation->peers)
				ss << rank++ << ',' << p.remote << ',' << p.uploaded << ',' << p.downloaded << '\n';
			emit("reciprocation" + suffix, ss);
			std::ostringstream bs;
			bs << "bucket,size,upload_fraction,download_fraction\n";
			std::size_t i = 1;
			for (auto const& b : o.reciprocation->buckets)
				bs << i++ << ',' << b.size << ',' << fmt(b.upload_fraction) << ',' << fmt(b.download_fraction) << '\n';
			emit("reciprocation_buckets" + suffix, bs);
		}
		if (o.unchoke) {
			std::ostringstream ss;
			ss << "mode,remote,unchokes,interested\n";
			for (auto const& p : o.unchoke->leecher)
				ss << "leecher," << p.remote << ',' << p.unchokes << ',' << fmt(p.interested) << '\n';
			for (auto const& p : o.unchoke->seed)
				ss << "seed," << p.remote << ',' << p.unchokes << ',' << fmt(p.interested) << '\n';
			emit("unchoke" + suffix, ss);
		}
		if (o.fairness) {
			std::ostringstream ss;
			ss << "remote,bytes,interested,normalized,share\n";
			for (auto const& p : o.fairness->peers)
				ss << p.remote << ',' << p.bytes << ',' << fmt(p.interested) << ',' << fmt(p.normalized) << ','
				   << fmt(p.share) << '\n';
			emit("seed_fairness" + suffix, ss);
		}
	}
	return out;
}

} // namespace swarm
