#pragma once

#include "swarmsim/core.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace swarm {

enum class choke_mode : std::uint8_t { leecher = 0, seed_new = 1, seed_old = 2 };

std::string_view to_string(choke_mode m);

inline constexpr std::size_t regular_unchoke_slots = 3;
inline constexpr std::size_t max_active_peers = 4;
inline constexpr std::uint32_t optimistic_every_rounds = 3;

// What a choke round needs to know about one remote peer.
struct choke_candidate {
	peer_id id = 0;
	bool interested = false; // remote is interested in us
	bool unchoked = false;   // we currently unchoke it
	rate_bps download_rate = 0.0; // remote -> local
	rate_bps upload_rate = 0.0;   // local -> remote
	std::optional<sim_time> last_unchoke;
	sim_time joined_at = 0.0;
};

struct choke_decision {
	// full unchoked set after the round, ascending id
	std::vector<peer_id> unchoked;
	// transitions relative to the candidates' `unchoked` flags
	std::vector<peer_id> to_unchoke;
	std::vector<peer_id> to_choke;

	// leecher / seed-old: RU peers in rank order. seed-new: SKU peers.
	std::vector<peer_id> regular;
	// leecher / seed-old: the OU peer (at most one). seed-new: SRU peers.
	std::vector<peer_id> random;

	std::uint32_t round_index = 0;
	choke_mode mode = choke_mode::leecher;
};

struct choke_scheduler {
	choke_mode mode = choke_mode::leecher;
	sim_time round_period = 10.0;
	std::uint32_t round_index = 0;
	std::optional<peer_id> current_optimistic;
	std::vector<peer_id> unchoked_set;

	std::uint32_t phase() const { return round_index % optimistic_every_rounds; }
	bool optimistic_round() const { return round_index % optimistic_every_rounds == 0; }
};

// Ordering used by the leecher round: faster first, then earlier join, then
// lower id.
bool ranks_before_by_download(choke_candidate const& a, choke_candidate const& b);
bool ranks_before_by_upload(choke_candidate const& a, choke_candidate const& b);
// Most recently unchoked first; never-unchoked peers are the oldest.
bool ranks_before_by_recency(choke_candidate const& a, choke_candidate const& b);

// Each round function advances scheduler.round_index and updates
// current_optimistic / unchoked_set.
choke_decision leecher_round(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng);
choke_decision seed_round_new(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng);
choke_decision seed_round_old(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng);

// Dispatches on scheduler.mode.
choke_decision run_choke_round(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng);

} // namespace swarm
