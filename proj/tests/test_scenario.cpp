#include "doctest.h"

#include "swarmsim/scenario.hpp"

#include <filesystem>

using namespace swarm;

namespace {

std::string const base = "[run]\nseed = 4\nduration = 500\nobservers = 0,2\n"
						 "[torrent]\nnum_pieces = 10\n"
						 "[group.seed]\ncount = 1\nbehavior = initial-seed\nupload = 40k\n"
						 "[group.l]\ncount = 4\nupload = 20k\narrival = stagger\ninterval = 2\n";

std::string error_of(std::string const& text)
{
	try {
		parse_scenario(text);
	}
	catch (config_error const& e) {
		return e.what();
	}
	return "";
}

std::string replace(std::string s, std::string const& from, std::string const& to)
{
	auto const at = s.find(from);
	REQUIRE(at != std::string::npos);
	return s.replace(at, from.size(), to);
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("quantities")
{
	CHECK(parse_quantity("20k", "f") == 20 * 1024);
	CHECK(parse_quantity("4M", "f") == 4 * 1024 * 1024);
	CHECK(parse_quantity("1.5", "f") == 1.5);
	CHECK(parse_quantity("unlimited", "f") == unlimited_rate);
	CHECK_THROWS_AS(parse_quantity("20q", "f"), config_error);
}

TEST_CASE("a well-formed scenario parses and expands")
{
	auto const s = parse_scenario(base);
	CHECK(s.peer_count() == 5);
	CHECK(s.engine.duration == 500);
	auto const peers = expand_peers(s);
	REQUIRE(peers.size() == 5);
	CHECK(peers[0].kind == behavior::initial_seed);
	CHECK(peers[0].upload_capacity == 40 * 1024);
	CHECK(peers[3].arrival_time == 4.0);
	for (std::size_t i = 0; i < peers.size(); ++i) CHECK(peers[i].id == i);
}

TEST_CASE("errors name the offending field")
{
	CHECK(error_of(replace(base, "duration = 500", "duration = 0")).find("run.duration") != std::string::npos);
	CHECK(error_of(replace(base, "observers = 0,2", "observers = 0,9")).find("run.observers") != std::string::npos);
	CHECK(error_of(replace(base, "upload = 20k", "upload = fast")).find("group.l.upload") != std::string::npos);
	CHECK(error_of(replace(base, "interval = 2", "intervall = 2")).find("group.l.") != std::string::npos);
	CHECK(error_of(base + "[bogus]\nx = 1\n").find("bogus: unknown section") != std::string::npos);
	CHECK(error_of(replace(base, "behavior = initial-seed", "behavior = normal")).find("initial-seed") != std::string::npos);
	CHECK(error_of(replace(base, "num_pieces = 10", "num_pieces = 0")).find("torrent") != std::string::npos);
	CHECK(error_of(base + "departure = leave-soon\n").find("group.l.departure") != std::string::npos);
	CHECK(error_of(replace(base, "arrival = stagger\ninterval = 2", "arrival = poisson")).find("group.l.rate") != std::string::npos);
	CHECK(error_of(replace(base, "[run]\n", "[run]\nallow_no_seed = true\n")).empty());
}

TEST_CASE("the hash changes exactly when a field changes")
{
	auto const a = parse_scenario(base);
	CHECK(scenario_hash(a) == scenario_hash(parse_scenario(base)));
	// comments and layout do not matter
	CHECK(scenario_hash(a) == scenario_hash(parse_scenario("; note\n" + replace(base, "seed = 4", "seed   =   4"))));
	for (auto const& [from, to] : std::vector<std::pair<std::string, std::string>>{
			 {"seed = 4", "seed = 5"},
			 {"duration = 500", "duration = 501"},
			 {"num_pieces = 10", "num_pieces = 11"},
			 {"upload = 40k", "upload = 41k"},
			 {"interval = 2", "interval = 3"},
			 {"count = 4", "count = 5"},
			 {"observers = 0,2", "observers = 0"}}) {
		auto const b = parse_scenario(replace(base, from, to));
		CHECK(scenario_hash(b) != scenario_hash(a));
		CHECK(canonical_text(b) != canonical_text(a));
	}
}

TEST_CASE("expansion is deterministic in the scenario seed")
{
	auto const s = parse_scenario(replace(base, "arrival = stagger\ninterval = 2",
		"arrival = poisson\nrate = 0.1\nupload_max = 80k\nfree_rider_fraction = 0.5"));
	CHECK(expand_peers(s) == expand_peers(s));
	auto t = s;
	t.rng_seed = 99;
	CHECK_FALSE(expand_peers(t) == expand_peers(s));
	std::size_t riders = 0;
	for (auto const& p : expand_peers(s)) riders += p.kind == behavior::free_rider;
	CHECK(riders == 2);
}

TEST_CASE("every library scenario loads")
{
	std::size_t n = 0;
	for (auto const& entry : std::filesystem::directory_iterator(SWARMSIM_SCENARIO_DIR)) {
		if (entry.path().extension() != ".ini") continue;
		CHECK_NOTHROW(load_scenario(entry.path().string()));
		++n;
	}
	CHECK(n >= 8);
}

} // TEST_SUITE
