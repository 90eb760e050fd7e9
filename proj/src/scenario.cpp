#include "swarmsim/scenario.hpp"

#include "swarmsim/trace.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace swarm {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s)
{
	auto const b = s.find_first_not_of(" \t\r\n");
	if (b == std::string::npos) return {};
	auto const e = s.find_last_not_of(" \t\r\n");
	return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string const& s, char sep)
{
	std::vector<std::string> out;
	std::stringstream ss(s);
	std::string item;
	while (std::getline(ss, item, sep)) {
		item = trim(item);
		if (!item.empty()) out.push_back(item);
	}
	return out;
}

double parse_number(std::string const& text, std::string const& field)
{
	std::size_t used = 0;
	double v = 0.0;
	try {
		v = std::stod(text, &used);
	}
	catch (std::exception const&) {
		throw config_error(field + ": '" + text + "' is not a number");
	}
	if (used != text.size() || !std::isfinite(v)) throw config_error(field + ": '" + text + "' is not a number");
	return v;
}

std::uint64_t parse_count(std::string const& text, std::string const& field)
{
	double const v = parse_number(text, field);
	if (v < 0 || v != std::floor(v)) throw config_error(field + ": '" + text + "' is not a non-negative integer");
	return static_cast<std::uint64_t>(v);
}

bool parse_bool(std::string const& text, std::string const& field)
{
	if (text == "true" || text == "yes" || text == "1") return true;
	if (text == "false" || text == "no" || text == "0") return false;
	throw config_error(field + ": '" + text + "' is not a boolean");
}

// Reads one section, refusing keys it does not know.
class section_reader {
public:
	section_reader(pt::ptree const& tree, std::string name)
		: tree_(tree)
		, name_(std::move(name))
	{}

	std::optional<std::string> get(std::string const& key)
	{
		seen_.insert(key);
		auto const v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
		if (!v) return std::nullopt;
		return trim(*v);
	}

	std::string field(std::string const& key) const { return name_ + "." + key; }

	void finish() const
	{
		for (auto const& [k, v] : tree_)
			if (!seen_.count(k)) throw config_error(field(k) + ": unknown key");
	}

private:
	pt::ptree const& tree_;
	std::string name_;
	std::set<std::string> seen_;
};

arrival_spec parse_arrival(section_reader& r, std::size_t count)
{
	arrival_spec a;
	std::string const kind = r.get("arrival").value_or("flash");
	if (auto v = r.get("start")) a.start = parse_number(*v, r.field("start"));
	auto rate = r.get("rate");
	auto interval = r.get("interval");
	auto times = r.get("times");
	if (kind == "flash") a.kind = arrival_kind::flash;
	else if (kind == "poisson") {
		a.kind = arrival_kind::poisson;
		if (!rate) throw config_error(r.field("rate") + ": required for poisson arrivals");
		a.rate = parse_number(*rate, r.field("rate"));
		if (!(a.rate > 0)) throw config_error(r.field("rate") + ": must be positive");
	}
	else if (kind == "stagger") {
		a.kind = arrival_kind::stagger;
		if (!interval) throw config_error(r.field("interval") + ": required for staggered arrivals");
		a.interval = parse_number(*interval, r.field("interval"));
		if (a.interval < 0) throw config_error(r.field("interval") + ": must not be negative");
	}
	else if (kind == "scripted") {
		a.kind = arrival_kind::scripted;
		if (!times) throw config_error(r.field("times") + ": required for scripted arrivals");
		for (auto const& t : split(*times, ',')) a.times.push_back(parse_number(t, r.field("times")));
		if (a.times.size() != count)
			throw config_error(r.field("times") + ": " + std::to_string(a.times.size()) + " times for "
				+ std::to_string(count) + " peers");
		if (!std::is_sorted(a.times.begin(), a.times.end()))
			throw config_error(r.field("times") + ": arrival times must be in order");
	}
	else throw config_error(r.field("arrival") + ": unknown arrival process '" + kind + "'");
	if (a.start < 0) throw config_error(r.field("start") + ": must not be negative");
	return a;
}

departure_spec parse_departure(std::string const& text, std::string const& field)
{
	departure_spec d;
	if (text == "stay") return d;
	if (text == "leave-on-completion") {
		d.kind = departure_spec_kind::leave_on_completion;
		return d;
	}
	auto const colon = text.find(':');
	std::string const head = text.substr(0, colon);
	if (colon != std::string::npos && (head == "leave-at" || head == "leave-after")) {
		d.kind = head == "leave-at" ? departure_spec_kind::leave_at : departure_spec_kind::leave_after;
		d.at = parse_number(trim(text.substr(colon + 1)), field);
		if (d.at < 0) throw config_error(field + ": departure time must not be negative");
		return d;
	}
	throw config_error(field + ": unknown departure policy '" + text + "'");
}

std::string_view arrival_name(arrival_kind k)
{
	switch (k) {
	case arrival_kind::flash: return "flash";
	case arrival_kind::poisson: return "poisson";
	case arrival_kind::stagger: return "stagger";
	case arrival_kind::scripted: return "scripted";
	}
	return "?";
}

} // namespace

double parse_quantity(std::string const& raw, std::string const& field)
{
	std::string text = trim(raw);
	if (text == "unlimited") return unlimited_rate;
	if (text.empty()) throw config_error(field + ": empty value");
	double scale = 1.0;
	char const last = text.back();
	if (last == 'k' || last == 'K') scale = 1024.0;
	else if (last == 'M') scale = 1024.0 * 1024.0;
	if (scale != 1.0) text.pop_back();
	return parse_number(text, field) * scale;
}

std::size_t scenario::peer_count() const
{
	std::size_t n = 0;
	for (auto const& g : groups) n += g.count;
	return n;
}

void scenario::validate() const
{
	try {
		torrent.validate();
	}
	catch (config_error const& e) {
		throw config_error(std::string("torrent: ") + e.what());
	}
	try {
		policy.validate();
	}
	catch (config_error const& e) {
		throw config_error(std::string("policy: ") + e.what());
	}
	if (!(engine.duration > 0.0)) throw config_error("run.duration: must be positive");
	if (engine.pipeline_depth == 0) throw config_error("algorithm.pipeline_depth: must be at least 1");
	if (!(engine.estimator_window > 0.0)) throw config_error("algorithm.estimator_window: must be positive");
	if (!(engine.announce_interval > 0.0)) throw config_error("policy.announce_interval: must be positive");
	if (!(grid > 0.0)) throw config_error("metrics.grid: must be positive");
	if (groups.empty()) throw config_error("scenario: no [group.*] sections");

	std::size_t seeds = 0;
	for (auto const& g : groups) {
		std::string const f = "group." + g.name;
		if (g.count == 0) throw config_error(f + ".count: must be positive");
		if (g.kind == behavior::initial_seed) seeds += g.count;
		if (!(g.upload >= 0.0) || !std::isfinite(g.upload)) throw config_error(f + ".upload: must be a finite rate");
		if (g.upload_max && !(*g.upload_max >= g.upload)) throw config_error(f + ".upload_max: below upload");
		if (!(g.download > 0.0)) throw config_error(f + ".download: must be positive");
		if (!(g.free_rider_fraction >= 0.0 && g.free_rider_fraction <= 1.0))
			throw config_error(f + ".free_rider_fraction: must be in [0, 1]");
		if (g.kind == behavior::initial_seed && g.free_rider_fraction > 0.0)
			throw config_error(f + ".free_rider_fraction: initial seeds cannot free ride");
	}
	if (seeds == 0 && !allow_no_seed)
		throw config_error("scenario: no initial-seed group (set run.allow_no_seed = true to intend this)");
	std::size_t const n = peer_count();
	for (peer_id o : observers)
		if (o >= n)
			throw config_error("run.observers: peer " + std::to_string(o) + " does not exist (" + std::to_string(n)
				+ " peers)");
}

scenario parse_scenario(std::string const& text, std::string const& origin)
{
	pt::ptree tree;
	std::istringstream in(text);
	try {
		pt::read_ini(in, tree);
	}
	catch (pt::ini_parser_error const& e) {
		throw config_error(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
	}

	scenario s;
	std::set<std::string> known = {"torrent", "run", "algorithm", "policy", "metrics"};
	for (auto const& [name, sec] : tree) {
		if (sec.empty() && !sec.data().empty()) throw config_error(name + ": key outside any section");
		if (name.rfind("group.", 0) != 0 && !known.count(name)) throw config_error(name + ": unknown section");
	}

	auto section = [&](std::string const& name) -> pt::ptree const& {
		static pt::ptree const empty;
		auto it = tree.find(name);
		return it == tree.not_found() ? empty : it->second;
	};

	{
		section_reader r(section("torrent"), "torrent");
		auto pieces = r.get("num_pieces");
		if (!pieces) throw config_error("torrent.num_pieces: required");
		s.torrent.num_pieces = static_cast<std::uint32_t>(parse_count(*pieces, r.field("num_pieces")));
		if (auto v = r.get("piece_size"))
			s.torrent.piece_size = static_cast<std::int64_t>(parse_quantity(*v, r.field("piece_size")));
		if (auto v = r.get("block_size"))
			s.torrent.block_size = static_cast<std::int64_t>(parse_quantity(*v, r.field("block_size")));
		r.finish();
	}
	{
		section_reader r(section("run"), "run");
		if (auto v = r.get("name")) s.name = *v;
		if (auto v = r.get("seed")) s.rng_seed = parse_count(*v, r.field("seed"));
		if (auto v = r.get("duration")) s.engine.duration = parse_number(*v, r.field("duration"));
		if (auto v = r.get("stop_when_complete")) s.engine.stop_when_complete = parse_bool(*v, r.field("stop_when_complete"));
		if (auto v = r.get("allow_no_seed")) s.allow_no_seed = parse_bool(*v, r.field("allow_no_seed"));
		if (auto v = r.get("observers"))
			for (auto const& o : split(*v, ','))
				s.observers.push_back(static_cast<peer_id>(parse_count(o, r.field("observers"))));
		r.finish();
	}
	{
		section_reader r(section("algorithm"), "algorithm");
		if (auto v = r.get("seed_choke")) {
			if (*v == "new") s.engine.seed_choke = choke_mode::seed_new;
			else if (*v == "old") s.engine.seed_choke = choke_mode::seed_old;
			else throw config_error(r.field("seed_choke") + ": expected new or old, got '" + *v + "'");
		}
		if (auto v = r.get("pipeline_depth")) s.engine.pipeline_depth = parse_count(*v, r.field("pipeline_depth"));
		if (auto v = r.get("estimator_window"))
			s.engine.estimator_window = parse_number(*v, r.field("estimator_window"));
		r.finish();
	}
	{
		section_reader r(section("policy"), "policy");
		if (auto v = r.get("max_peer_set")) s.policy.max_peer_set = parse_count(*v, r.field("max_peer_set"));
		if (auto v = r.get("min_threshold")) s.policy.min_threshold = parse_count(*v, r.field("min_threshold"));
		if (auto v = r.get("max_initiated")) s.policy.max_initiated = parse_count(*v, r.field("max_initiated"));
		if (auto v = r.get("bootstrap_size")) s.policy.bootstrap_size = parse_count(*v, r.field("bootstrap_size"));
		if (auto v = r.get("announce_interval"))
			s.engine.announce_interval = parse_number(*v, r.field("announce_interval"));
		r.finish();
	}
	{
		section_reader r(section("metrics"), "metrics");
		if (auto v = r.get("grid")) s.grid = parse_number(*v, r.field("grid"));
		r.finish();
	}

	for (auto const& [name, sec] : tree) {
		if (name.rfind("group.", 0) != 0) continue;
		section_reader r(sec, name);
		group_spec g;
		g.name = name.substr(6);
		if (g.name.empty()) throw config_error(name + ": group needs a name");
		auto count = r.get("count");
		if (!count) throw config_error(r.field("count") + ": required");
		g.count = parse_count(*count, r.field("count"));
		if (auto v = r.get("behavior")) {
			try {
				g.kind = parse_behavior(*v);
			}
			catch (config_error const& e) {
				throw config_error(r.field("behavior") + ": " + e.what());
			}
		}
		if (auto v = r.get("upload")) g.upload = parse_quantity(*v, r.field("upload"));
		if (auto v = r.get("upload_max")) g.upload_max = parse_quantity(*v, r.field("upload_max"));
		if (auto v = r.get("download")) g.download = parse_quantity(*v, r.field("download"));
		if (auto v = r.get("free_rider_fraction"))
			g.free_rider_fraction = parse_number(*v, r.field("free_rider_fraction"));
		g.arrival = parse_arrival(r, g.count);
		if (auto v = r.get("departure")) g.departure = parse_departure(*v, r.field("departure"));
		r.finish();
		s.groups.push_back(std::move(g));
	}

	s.validate();
	return s;
}

scenario load_scenario(std::string const& path)
{
	std::ifstream in(path);
	if (!in) throw config_error("cannot open scenario file " + path);
	std::ostringstream ss;
	ss << in.rdbuf();
	return parse_scenario(ss.str(), path);
}

std::string canonical_text(scenario const& s)
{
	std::ostringstream o;
	auto d = [](double v) { return format_double(v); };
	o << "name=" << s.name << '\n'
	  << "torrent=" << s.torrent.num_pieces << ',' << s.torrent.piece_size << ',' << s.torrent.block_size << '\n'
	  << "policy=" << s.policy.max_peer_set << ',' << s.policy.min_threshold << ',' << s.policy.max_initiated << ','
	  << s.policy.bootstrap_size << '\n'
	  << "engine=" << to_string(s.engine.seed_choke) << ',' << s.engine.pipeline_depth << ','
	  << d(s.engine.estimator_window) << ',' << d(s.engine.round_period) << ',' << d(s.engine.announce_interval)
	  << ',' << d(s.engine.duration) << ',' << s.engine.stop_when_complete << '\n'
	  << "seed=" << s.rng_seed << '\n'
	  << "allow_no_seed=" << s.allow_no_seed << '\n'
	  << "grid=" << d(s.grid) << '\n'
	  << "observers=";
	for (peer_id p : s.observers) o << p << ',';
	o << '\n';
	for (auto const& g : s.groups) {
		o << "group=" << g.name << ',' << g.count << ',' << to_string(g.kind) << ',' << d(g.upload) << ','
		  << (g.upload_max ? d(*g.upload_max) : std::string("-")) << ',' << d(g.download) << ','
		  << d(g.free_rider_fraction) << ',' << arrival_name(g.arrival.kind) << ',' << d(g.arrival.start) << ','
		  << d(g.arrival.rate) << ',' << d(g.arrival.interval) << ",[";
		for (double t : g.arrival.times) o << d(t) << ';';
		o << "]," << int(g.departure.kind) << ',' << d(g.departure.at) << '\n';
	}
	return o.str();
}

std::uint64_t scenario_hash(scenario const& s) { return fnv1a64(canonical_text(s)); }

std::vector<peer_profile> expand_peers(scenario const& s)
{
	// separate stream from the simulation so adding a group does not
	// perturb the run's own draws more than necessary
	rng_type rng(s.rng_seed ^ 0x9e3779b97f4a7c15ULL);
	std::vector<peer_profile> out;
	out.reserve(s.peer_count());
	for (auto const& g : s.groups) {
		std::size_t const first = out.size();
		sim_time t = g.arrival.start;
		std::exponential_distribution<double> gap(g.arrival.kind == arrival_kind::poisson ? g.arrival.rate : 1.0);
		for (std::size_t i = 0; i < g.count; ++i) {
			peer_profile p;
			p.id = static_cast<peer_id>(out.size());
			p.kind = g.kind;
			p.upload_capacity = g.upload;
			if (g.upload_max) p.upload_capacity = std::uniform_real_distribution<double>(g.upload, *g.upload_max)(rng);
			p.download_capacity = g.download;
			switch (g.arrival.kind) {
			case arrival_kind::flash: p.arrival_time = g.arrival.start; break;
			case arrival_kind::poisson:
				t += gap(rng);
				p.arrival_time = t;
				break;
			case arrival_kind::stagger: p.arrival_time = g.arrival.start + double(i) * g.arrival.interval; break;
			case arrival_kind::scripted: p.arrival_time = g.arrival.start + g.arrival.times[i]; break;
			}
			switch (g.departure.kind) {
			case departure_spec_kind::stay: break;
			case departure_spec_kind::leave_on_completion:
				p.departure.kind = departure_kind::leave_on_completion;
				break;
			case departure_spec_kind::leave_at:
				p.departure = {departure_kind::leave_at_time, std::max(g.departure.at, p.arrival_time)};
				break;
			case departure_spec_kind::leave_after:
				p.departure = {departure_kind::leave_at_time, p.arrival_time + g.departure.at};
				break;
			}
			out.push_back(p);
		}
		auto const riders = static_cast<std::size_t>(std::llround(g.free_rider_fraction * double(g.count)));
		if (riders > 0) {
			std::vector<std::size_t> idx(g.count);
			for (std::size_t i = 0; i < g.count; ++i) idx[i] = first + i;
			std::shuffle(idx.begin(), idx.end(), rng);
			for (std::size_t i = 0; i < riders; ++i) out[idx[i]].kind = behavior::free_rider;
		}
	}
	return out;
}

} // namespace swarm
