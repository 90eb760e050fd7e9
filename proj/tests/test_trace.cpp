#include "doctest.h"

#include "swarmsim/harness.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/trace.hpp"

#include <sstream>

using namespace swarm;

namespace {

trace_log sample_log()
{
	trace_log log;
	log.header.scenario_hash = 0xdeadbeef01ULL;
	log.header.rng_seed = 42;
	log.header.torrent.num_pieces = 3;
	log.header.observers = {0, 2};
	log.header.grid = 2.5;
	log.events = {
		{0.0, trace_kind::arrive, 0, no_peer, -1, 2, 20480},
		{0.1, trace_kind::arrive, 1, no_peer, -1, 0, 20480},
		{0.1, trace_kind::connect, 1, 0, -1, -1, 0},
		{1.0 / 3.0, trace_kind::block, 0, 1, 2, 7, 16384},
		{12.75, trace_kind::abort, 0, 1, 1, 3, 5000},
		{13.0, trace_kind::end, no_peer, no_peer, -1, -1, 0},
	};
	return log;
}

std::string error_of(std::string const& text)
{
	std::istringstream in(text);
	try {
		read_trace(in);
	}
	catch (config_error const& e) {
		return e.what();
	}
	return "";
}

} // namespace

TEST_SUITE("trace") {

TEST_CASE("round trip is exact")
{
	auto const log = sample_log();
	std::string const text = serialize_trace(log);
	std::istringstream in(text);
	auto const back = read_trace(in);
	CHECK(back == log);
	CHECK(serialize_trace(back) == text);
	CHECK(trace_digest(back) == trace_digest(log));
}

TEST_CASE("doubles print in shortest round-trip form")
{
	for (double v : {0.0, 0.1, 1.0 / 3.0, 1e-300, 123456789.125, 2.5e17}) {
		std::string const s = format_double(v);
		CHECK(std::stod(s) == v);
	}
	CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("every event kind has a stable name")
{
	for (int k = 0; k <= int(trace_kind::end); ++k) {
		auto const kind = trace_kind(k);
		CHECK(parse_trace_kind(to_string(kind)) == kind);
	}
	CHECK_THROWS_AS(parse_trace_kind("bogus"), config_error);
}

TEST_CASE("malformed input is reported with its line number")
{
	std::string const good = serialize_trace(sample_log());
	CHECK(error_of(good).empty());

	std::string unordered = good;
	unordered.replace(unordered.find("12.75 abort"), 5, "0.001");
	CHECK(error_of(unordered).find("trace line 14") != std::string::npos);
	CHECK(error_of(unordered).find("backwards") != std::string::npos);

	std::string truncated = good.substr(0, good.find("13 end"));
	CHECK(error_of(truncated).find("missing end record") != std::string::npos);

	std::string bad_kind = good;
	bad_kind.replace(bad_kind.find("connect"), 7, "connekt");
	CHECK(error_of(bad_kind).find("trace line 12") != std::string::npos);

	std::string short_row = good;
	short_row.replace(short_row.find("0.1 connect 1 0 - - 0"), 21, "0.1 connect 1 0 -");
	CHECK(error_of(short_row).find("expected 7 fields") != std::string::npos);

	CHECK(error_of("0 arrive 0 - - 2 0\n").find("trace line 1") != std::string::npos);
	CHECK(error_of("# swarmsim-trace v9\n").find("unsupported trace version") != std::string::npos);
}

TEST_CASE("simulated traces survive the file round trip")
{
	auto const s = parse_scenario("[run]\nseed = 3\n[torrent]\nnum_pieces = 6\npiece_size = 32k\n"
								  "[group.s]\ncount = 1\nbehavior = initial-seed\n[group.l]\ncount = 5\n");
	auto const r = simulate(s);
	std::string const text = serialize_trace(r.trace);
	std::istringstream in(text);
	CHECK(read_trace(in) == r.trace);
}

} // TEST_SUITE
