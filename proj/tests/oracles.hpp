#pragma once

// Brute-force reference answers for the decision code. Deliberately naive:
// counting dominators instead of sorting, full rescans instead of
// incremental state.

#include "swarmsim/choke.hpp"
#include "swarmsim/piece_selection.hpp"
#include "swarmsim/swarm_model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

using namespace swarm;

inline std::vector<std::uint32_t> recount(std::vector<bitfield> const& remotes, std::size_t num_pieces)
{
	std::vector<std::uint32_t> counts(num_pieces, 0);
	for (auto const& b : remotes)
		for (piece_index p = 0; p < num_pieces; ++p)
			if (b.has(p)) ++counts[p];
	return counts;
}

inline bool interested(bitfield const& local, bitfield const& remote)
{
	for (piece_index p = 0; p < local.size(); ++p)
		if (remote.has(p) && !local.has(p)) return true;
	return false;
}

// Pieces a rarest-first pick from `remote` may legally return: held by the
// remote, lacked locally, not already partial, with the least availability
// among those.
inline std::set<piece_index> rarest_candidates(bitfield const& local, std::vector<std::uint32_t> const& counts,
	bitfield const& remote, std::set<piece_index> const& partial)
{
	std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
	for (piece_index p = 0; p < local.size(); ++p)
		if (remote.has(p) && !local.has(p) && !partial.count(p)) best = std::min(best, counts[p]);
	std::set<piece_index> out;
	for (piece_index p = 0; p < local.size(); ++p)
		if (remote.has(p) && !local.has(p) && !partial.count(p) && counts[p] == best) out.insert(p);
	return out;
}

// a outranks b under the declared tie-break (earlier join, lower id)
inline bool tie_before(choke_candidate const& a, choke_candidate const& b)
{
	if (a.joined_at != b.joined_at) return a.joined_at < b.joined_at;
	return a.id < b.id;
}

template <class Key>
std::set<peer_id> top_k(std::vector<choke_candidate> const& pool, std::size_t k, Key key)
{
	std::set<peer_id> out;
	for (auto const& c : pool) {
		std::size_t ahead = 0;
		for (auto const& o : pool) {
			if (o.id == c.id) continue;
			double const ko = key(o), kc = key(c);
			if (ko > kc || (ko == kc && tie_before(o, c))) ++ahead;
		}
		if (ahead < k) out.insert(c.id);
	}
	return out;
}

// The three interested peers with the best download rate.
inline std::set<peer_id> leecher_regular(std::vector<choke_candidate> const& peers)
{
	std::vector<choke_candidate> pool;
	for (auto const& c : peers)
		if (c.interested) pool.push_back(c);
	return top_k(pool, regular_unchoke_slots, [](choke_candidate const& c) { return c.download_rate; });
}

inline std::set<peer_id> seed_old_regular(std::vector<choke_candidate> const& peers)
{
	std::vector<choke_candidate> pool;
	for (auto const& c : peers)
		if (c.interested) pool.push_back(c);
	return top_k(pool, regular_unchoke_slots, [](choke_candidate const& c) { return c.upload_rate; });
}

// Kept set of a seed-new round: the most recently unchoked of the
// unchoked-and-interested peers, three in draw phases (four when nobody is
// left to draw), four in the third phase.
inline std::set<peer_id> seed_new_kept(std::vector<choke_candidate> const& peers, std::uint32_t phase)
{
	std::vector<choke_candidate> active;
	bool any_choked = false;
	for (auto const& c : peers) {
		if (!c.interested) continue;
		if (c.unchoked) active.push_back(c);
		else any_choked = true;
	}
	std::size_t const k = (phase < 2 && any_choked) ? regular_unchoke_slots : max_active_peers;
	return top_k(active, k, [](choke_candidate const& c) {
		return c.last_unchoke.value_or(-std::numeric_limits<double>::infinity());
	});
}

} // namespace oracle
