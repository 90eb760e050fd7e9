#include "swarmsim/tracker.hpp"

#include <algorithm>

namespace swarm {

void peer_set_policy::validate() const
{
	if (!(min_threshold < bootstrap_size))
		throw config_error("policy.min_threshold must be below policy.bootstrap_size");
	if (!(bootstrap_size <= max_peer_set))
		throw config_error("policy.bootstrap_size must not exceed policy.max_peer_set");
	if (max_initiated == 0 || max_initiated > max_peer_set)
		throw config_error("policy.max_initiated must be in [1, max_peer_set]");
}

std::vector<peer_id> tracker_state::announce(peer_id requester, std::size_t want, rng_type& rng,
	std::set<peer_id> const& exclude) const
{
	std::vector<peer_id> pool;
	pool.reserve(registry_.size());
	for (peer_id p : registry_)
		if (p != requester && !exclude.count(p)) pool.push_back(p);

	std::size_t const n = std::min(want, pool.size());
	// partial Fisher-Yates
	for (std::size_t i = 0; i < n; ++i) {
		std::size_t const j = i + uniform_index(rng, pool.size() - i);
		std::swap(pool[i], pool[j]);
	}
	pool.resize(n);
	return pool;
}

std::vector<peer_id> announce(tracker_state const& tracker, peer_id requester,
	peer_set_policy const& policy, rng_type& rng, std::set<peer_id> const& exclude)
{
	return tracker.announce(requester, policy.bootstrap_size, rng, exclude);
}

bool needs_reannounce(peer_set_status s, peer_set_policy const& policy)
{
	return s.size < policy.min_threshold;
}

bool accepts_inbound(peer_set_status s, peer_set_policy const& policy)
{
	return s.size < policy.max_peer_set;
}

bool may_initiate(peer_set_status s, peer_set_policy const& policy)
{
	return s.initiated < policy.max_initiated && s.size < policy.max_peer_set;
}

} // namespace swarm
