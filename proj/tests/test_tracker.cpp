#include "doctest.h"

#include "swarmsim/tracker.hpp"

using namespace swarm;

TEST_SUITE("tracker") {

TEST_CASE("bootstrap list is min(50, registry - 1) distinct peers")
{
	tracker_state t;
	peer_set_policy const policy;
	rng_type rng(1);
	for (peer_id p = 0; p < 20; ++p) t.add(p);
	auto const small = announce(t, 3, policy, rng);
	CHECK(small.size() == 19);
	CHECK(std::set<peer_id>(small.begin(), small.end()).count(3) == 0);

	for (peer_id p = 20; p < 200; ++p) t.add(p);
	auto const big = announce(t, 3, policy, rng);
	CHECK(big.size() == 50);
	CHECK(std::set<peer_id>(big.begin(), big.end()).size() == 50);
}

TEST_CASE("announce skips excluded peers and draws uniformly")
{
	tracker_state t;
	for (peer_id p = 0; p < 10; ++p) t.add(p);
	rng_type rng(2);
	std::set<peer_id> const exclude{1, 2};
	std::vector<int> hits(10, 0);
	int const n = 9000;
	for (int i = 0; i < n; ++i)
		for (peer_id p : t.announce(0, 1, rng, exclude)) ++hits[p];
	CHECK(hits[0] == 0);
	CHECK(hits[1] == 0);
	CHECK(hits[2] == 0);
	for (peer_id p = 3; p < 10; ++p) CHECK(std::abs(hits[p] - n / 7.0) < 5 * std::sqrt(n * (1.0 / 7) * (6.0 / 7)));
}

TEST_CASE("peer set caps")
{
	peer_set_policy const policy;
	CHECK(needs_reannounce({19, 0}, policy));
	CHECK_FALSE(needs_reannounce({20, 0}, policy));
	CHECK(accepts_inbound({79, 40}, policy));
	CHECK_FALSE(accepts_inbound({80, 10}, policy));
	CHECK_FALSE(may_initiate({30, 40}, policy));
	CHECK(may_initiate({30, 39}, policy));
}

TEST_CASE("initiation stops at the initiated cap and skips refusals")
{
	peer_set_policy policy;
	policy.max_initiated = 3;
	peer_set_status status{0, 0};
	std::vector<peer_id> const candidates{1, 2, 3, 4, 5, 6};
	auto const made = initiate_connections(candidates, status, policy, [](peer_id p) { return p != 2; });
	CHECK(made == std::vector<peer_id>{1, 3, 4});
	CHECK(status.initiated == 3);
	CHECK(status.size == 3);
}

TEST_CASE("maintenance only acts below the threshold")
{
	tracker_state t;
	for (peer_id p = 0; p < 30; ++p) t.add(p);
	peer_set_policy const policy;
	rng_type rng(3);
	auto const idle = maintain_peer_set(0, {25, 5}, policy, t, rng, {}, [](peer_id) { return true; });
	CHECK_FALSE(idle.reannounced);
	std::set<peer_id> const connected{1, 2, 3};
	auto const act = maintain_peer_set(0, {3, 3}, policy, t, rng, connected, [](peer_id) { return true; });
	CHECK(act.reannounced);
	CHECK(act.connected_to.size() == 26);
	for (peer_id p : act.connected_to) CHECK(connected.count(p) == 0);
}

TEST_CASE("policy validation")
{
	peer_set_policy p;
	p.min_threshold = 60;
	CHECK_THROWS_AS(p.validate(), config_error);
	p = {};
	p.max_initiated = 0;
	CHECK_THROWS_AS(p.validate(), config_error);
	CHECK_NOTHROW(peer_set_policy{}.validate());
}

} // TEST_SUITE
