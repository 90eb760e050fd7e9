#include "doctest.h"

#include "swarmsim/harness.hpp"
#include "swarmsim/scenario.hpp"

using namespace swarm;

namespace {

scenario small(std::uint64_t seed)
{
	return parse_scenario("[run]\nseed = " + std::to_string(seed)
		+ "\nobservers = 0,1\n[torrent]\nnum_pieces = 8\npiece_size = 32k\n"
		  "[group.s]\ncount = 1\nbehavior = initial-seed\n"
		  "[group.l]\ncount = 6\nupload = 10k\nupload_max = 40k\narrival = poisson\nrate = 0.3\n");
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("parallel batch equals the serial batch")
{
	auto const s = small(100);
	auto const serial = run_batch(s, 6, invariant_level::basic, false);
	auto const parallel = run_batch(s, 6, invariant_level::basic, true);
	REQUIRE(serial.size() == 6);
	for (std::size_t i = 0; i < serial.size(); ++i) {
		CHECK(serial[i].seed == 100 + i);
		CHECK(serial[i].digest == parallel[i].digest);
		CHECK(serial[i].events == parallel[i].events);
	}
	CHECK(serial[0].digest != serial[1].digest);
}

TEST_CASE("replica errors propagate")
{
	auto job = [](std::size_t i) -> int {
		if (i == 3) throw config_error("boom");
		return int(i);
	};
	CHECK_THROWS_AS(run_replicas(5, job, true), config_error);
	CHECK_THROWS_AS(run_replicas(5, job, false), config_error);
}

TEST_CASE("identical reports compare with zero deltas")
{
	auto const r = simulate(small(1));
	std::string const json = summary_json(compute_report(r.trace, all_metrics()));
	auto const rows = compare_summaries(json, json);
	CHECK_FALSE(rows.empty());
	for (auto const& row : rows) CHECK(row.delta() == 0.0);
	CHECK(format_comparison(rows).rfind("key,a,b,delta\n", 0) == 0);
}

TEST_CASE("different runs show nonzero deltas")
{
	auto const a = summary_json(compute_report(simulate(small(1)).trace, all_metrics()));
	auto const b = summary_json(compute_report(simulate(small(2)).trace, all_metrics()));
	bool any = false;
	for (auto const& row : compare_summaries(a, b)) any = any || row.delta() != 0.0;
	CHECK(any);
}

TEST_CASE("compare refuses different geometry")
{
	auto const a = summary_json(compute_report(simulate(small(1)).trace, all_metrics()));
	auto s = small(1);
	s.torrent.num_pieces = 9;
	auto const b = summary_json(compute_report(simulate(s).trace, all_metrics()));
	CHECK_THROWS_AS(compare_summaries(a, b), config_error);
	CHECK_THROWS_AS(compare_summaries(a, "{not json"), config_error);
}

} // TEST_SUITE
