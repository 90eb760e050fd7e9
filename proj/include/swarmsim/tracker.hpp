#pragma once

#include "swarmsim/core.hpp"

#include <set>
#include <vector>

namespace swarm {

struct peer_set_policy {
	std::size_t max_peer_set = 80;
	std::size_t min_threshold = 20;
	std::size_t max_initiated = 40;
	std::size_t bootstrap_size = 50;

	void validate() const;

	bool operator==(peer_set_policy const&) const = default;
};

class tracker_state {
public:
	sim_time announce_interval = 1800.0;

	void add(peer_id p) { registry_.insert(p); }
	void remove(peer_id p) { registry_.erase(p); }
	bool contains(peer_id p) const { return registry_.count(p) != 0; }
	std::set<peer_id> const& registry() const { return registry_; }

	// Up to `want` registered peers drawn uniformly without replacement,
	// never the requester and never anything in `exclude`.
	std::vector<peer_id> announce(peer_id requester, std::size_t want, rng_type& rng,
		std::set<peer_id> const& exclude = {}) const;

private:
	std::set<peer_id> registry_;
};

// Bootstrap list for a peer: min(bootstrap_size, |registry| - 1) peers.
std::vector<peer_id> announce(tracker_state const& tracker, peer_id requester,
	peer_set_policy const& policy, rng_type& rng, std::set<peer_id> const& exclude = {});

struct peer_set_status {
	std::size_t size = 0;
	std::size_t initiated = 0;
};

bool needs_reannounce(peer_set_status s, peer_set_policy const& policy);
bool accepts_inbound(peer_set_status s, peer_set_policy const& policy);
bool may_initiate(peer_set_status s, peer_set_policy const& policy);

struct peer_set_actions {
	bool reannounced = false;
	// connections actually made, in order
	std::vector<peer_id> connected_to;
};

// Initiates connections to `candidates` in order while the initiated and
// total caps allow. `try_connect(p)` returns false when `p` refuses.
template <class TryConnect>
std::vector<peer_id> initiate_connections(std::vector<peer_id> const& candidates, peer_set_status& status,
	peer_set_policy const& policy, TryConnect&& try_connect)
{
	std::vector<peer_id> made;
	for (peer_id p : candidates) {
		if (!may_initiate(status, policy)) break;
		if (!try_connect(p)) continue;
		made.push_back(p);
		++status.initiated;
		++status.size;
	}
	return made;
}

// Below the refill threshold: ask the tracker again (skipping peers already
// connected) and initiate what the caps allow.
template <class TryConnect>
peer_set_actions maintain_peer_set(peer_id self, peer_set_status status, peer_set_policy const& policy,
	tracker_state const& tracker, rng_type& rng, std::set<peer_id> const& connected, TryConnect&& try_connect)
{
	peer_set_actions out;
	if (!needs_reannounce(status, policy)) return out;
	out.reannounced = true;
	out.connected_to = initiate_connections(announce(tracker, self, policy, rng, connected), status, policy,
		try_connect);
	return out;
}

} // namespace swarm
