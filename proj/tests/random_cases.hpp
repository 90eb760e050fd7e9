#pragma once

// Random small decision problems checked against the oracles. Shared by
// the unit suite and the acceptance run.

#include "oracles.hpp"

#include "swarmsim/choke.hpp"
#include "swarmsim/piece_selection.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

namespace cases {

using namespace swarm;

struct tally {
	std::size_t decisions = 0;
	std::size_t mismatches = 0;

	void check(bool ok)
	{
		++decisions;
		if (!ok) ++mismatches;
	}
};

inline bitfield random_bitfield(std::size_t n, double density, rng_type& rng)
{
	std::bernoulli_distribution bit(density);
	bitfield b(n);
	for (piece_index p = 0; p < n; ++p)
		if (bit(rng)) b.set(p);
	return b;
}

// One piece selection on a random swarm of at most 10 peers and 20 pieces.
inline void piece_case(rng_type& rng, tally& t)
{
	std::size_t const pieces = 1 + uniform_index(rng, 20);
	std::size_t const remotes_n = 1 + uniform_index(rng, 9);
	std::uniform_real_distribution<double> dens(0.0, 1.0);

	bitfield local = random_bitfield(pieces, dens(rng) * 0.8, rng);
	std::vector<bitfield> remotes;
	for (std::size_t i = 0; i < remotes_n; ++i) remotes.push_back(random_bitfield(pieces, dens(rng), rng));

	availability_counter counter(pieces);
	for (auto const& r : remotes) counter.peer_joined(r);
	auto const counts = oracle::recount(remotes, pieces);

	// a few partial pieces with random progress
	std::vector<partial_piece> partials;
	std::set<piece_index> partial_ids;
	std::uint32_t const blocks = 1 + std::uint32_t(uniform_index(rng, 4));
	std::bernoulli_distribution coin(0.5);
	for (piece_index p = 0; p < pieces; ++p) {
		if (local.has(p) || !std::bernoulli_distribution(0.15)(rng)) continue;
		partial_piece pp(p, blocks);
		for (block_index b = 0; b < blocks; ++b) {
			if (coin(rng)) {
				pp.received[b] = true;
				++pp.received_count;
			}
			else if (coin(rng)) {
				pp.pending[b].push_back(99);
			}
		}
		if (pp.complete()) continue;
		partials.push_back(pp);
		partial_ids.insert(p);
	}
	std::shuffle(partials.begin(), partials.end(), rng);

	bitfield const& remote = remotes[uniform_index(rng, remotes.size())];
	auto const got = select_piece(local, counter, remote, partials, rng);

	// strict priority: the first listed partial the remote can still serve
	std::optional<piece_index> priority;
	for (auto const& pp : partials) {
		if (!remote.has(pp.piece)) continue;
		bool open = false;
		for (block_index b = 0; b < blocks; ++b)
			if (!pp.received[b] && pp.pending[b].empty()) open = true;
		if (open) {
			priority = pp.piece;
			break;
		}
	}
	if (priority) {
		t.check(got == priority);
		return;
	}

	std::set<piece_index> fresh;
	for (piece_index p = 0; p < pieces; ++p)
		if (remote.has(p) && !local.has(p) && !partial_ids.count(p)) fresh.insert(p);
	if (fresh.empty()) {
		t.check(!got);
		return;
	}
	if (!got) {
		t.check(false);
		return;
	}
	if (local.count() < random_first_threshold) {
		t.check(fresh.count(*got) == 1);
		return;
	}
	t.check(oracle::rarest_candidates(local, counts, remote, partial_ids).count(*got) == 1);
}

inline std::vector<choke_candidate> random_candidates(rng_type& rng)
{
	std::size_t const n = uniform_index(rng, 11);
	std::bernoulli_distribution coin(0.6);
	std::vector<choke_candidate> out;
	for (std::size_t i = 0; i < n; ++i) {
		choke_candidate c;
		c.id = peer_id(3 * i + uniform_index(rng, 3));
		c.interested = coin(rng);
		c.unchoked = std::bernoulli_distribution(0.4)(rng);
		// small value sets so ties are common
		c.download_rate = 1024.0 * double(uniform_index(rng, 5));
		c.upload_rate = 1024.0 * double(uniform_index(rng, 5));
		if (coin(rng)) c.last_unchoke = 10.0 * double(uniform_index(rng, 6));
		c.joined_at = double(uniform_index(rng, 3));
		out.push_back(c);
	}
	return out;
}

inline choke_scheduler random_scheduler(choke_mode mode, std::vector<choke_candidate> const& peers, rng_type& rng)
{
	choke_scheduler s;
	s.mode = mode;
	s.round_index = std::uint32_t(uniform_index(rng, 12));
	if (!peers.empty() && std::bernoulli_distribution(0.5)(rng))
		s.current_optimistic = peers[uniform_index(rng, peers.size())].id;
	return s;
}

inline bool slot_bound_holds(choke_decision const& d, std::vector<choke_candidate> const& peers)
{
	std::size_t active = 0;
	for (auto const& c : peers)
		if (c.interested && std::binary_search(d.unchoked.begin(), d.unchoked.end(), c.id)) ++active;
	return active <= max_active_peers;
}

inline void leecher_case(rng_type& rng, tally& t)
{
	auto const peers = random_candidates(rng);
	auto s = random_scheduler(choke_mode::leecher, peers, rng);
	auto const d = leecher_round(s, peers, rng);
	std::set<peer_id> const ru(d.regular.begin(), d.regular.end());
	bool ok = ru == oracle::leecher_regular(peers) && slot_bound_holds(d, peers) && d.random.size() <= 1;
	for (peer_id ou : d.random) ok = ok && !ru.count(ou);
	t.check(ok);
}

inline void seed_old_case(rng_type& rng, tally& t)
{
	auto const peers = random_candidates(rng);
	auto s = random_scheduler(choke_mode::seed_old, peers, rng);
	auto const d = seed_round_old(s, peers, rng);
	std::set<peer_id> const ru(d.regular.begin(), d.regular.end());
	t.check(ru == oracle::seed_old_regular(peers) && slot_bound_holds(d, peers));
}

inline void seed_new_case(rng_type& rng, tally& t)
{
	auto const peers = random_candidates(rng);
	auto s = random_scheduler(choke_mode::seed_new, peers, rng);
	std::uint32_t const phase = s.phase();
	auto const d = seed_round_new(s, peers, rng);
	std::set<peer_id> const kept(d.regular.begin(), d.regular.end());
	bool ok = kept == oracle::seed_new_kept(peers, phase) && slot_bound_holds(d, peers);
	// random picks come from the choked and interested
	for (peer_id r : d.random)
		for (auto const& c : peers)
			if (c.id == r) ok = ok && c.interested && !c.unchoked;
	t.check(ok);
}

} // namespace cases
