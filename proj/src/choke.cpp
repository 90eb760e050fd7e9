#include "swarmsim/choke.hpp"

#include <algorithm>
#include <limits>

namespace swarm {

std::string_view to_string(choke_mode m)
{
	switch (m) {
	case choke_mode::leecher: return "leecher";
	case choke_mode::seed_new: return "seed-new";
	case choke_mode::seed_old: return "seed-old";
	}
	return "?";
}

namespace {

bool stable_tiebreak(choke_candidate const& a, choke_candidate const& b)
{
	if (a.joined_at != b.joined_at) return a.joined_at < b.joined_at;
	return a.id < b.id;
}

sim_time recency_key(choke_candidate const& c)
{
	return c.last_unchoke.value_or(-std::numeric_limits<double>::infinity());
}

void finish(choke_decision& d, choke_scheduler& scheduler, std::span<choke_candidate const> peers)
{
	d.unchoked = d.regular;
	d.unchoked.insert(d.unchoked.end(), d.random.begin(), d.random.end());
	std::sort(d.unchoked.begin(), d.unchoked.end());
	for (auto const& c : peers) {
		bool const keep = std::binary_search(d.unchoked.begin(), d.unchoked.end(), c.id);
		if (keep && !c.unchoked) d.to_unchoke.push_back(c.id);
		if (!keep && c.unchoked) d.to_choke.push_back(c.id);
	}
	std::sort(d.to_unchoke.begin(), d.to_unchoke.end());
	std::sort(d.to_choke.begin(), d.to_choke.end());
	d.round_index = scheduler.round_index;
	d.mode = scheduler.mode;
	scheduler.unchoked_set = d.unchoked;
	++scheduler.round_index;
}

// Shared by the leecher round and the legacy seed round: three regular
// slots by rate plus one optimistic slot rotated every third round.
template <class Rank>
choke_decision rate_based_round(choke_scheduler& scheduler, std::span<choke_candidate const> peers,
	rng_type& rng, Rank rank)
{
	std::vector<choke_candidate> interested;
	for (auto const& c : peers)
		if (c.interested) interested.push_back(c);
	std::sort(interested.begin(), interested.end(), rank);

	choke_decision d;
	std::size_t const n_regular = std::min(regular_unchoke_slots, interested.size());
	for (std::size_t i = 0; i < n_regular; ++i) d.regular.push_back(interested[i].id);

	std::vector<peer_id> pool;
	for (std::size_t i = n_regular; i < interested.size(); ++i) pool.push_back(interested[i].id);
	std::sort(pool.begin(), pool.end());

	std::optional<peer_id> ou;
	if (!scheduler.optimistic_round() && scheduler.current_optimistic
		&& std::binary_search(pool.begin(), pool.end(), *scheduler.current_optimistic))
		ou = scheduler.current_optimistic;
	if (!ou && !pool.empty()) ou = pool[uniform_index(rng, pool.size())];

	scheduler.current_optimistic = ou;
	if (ou) d.random.push_back(*ou);
	finish(d, scheduler, peers);
	return d;
}

} // namespace

bool ranks_before_by_download(choke_candidate const& a, choke_candidate const& b)
{
	if (a.download_rate != b.download_rate) return a.download_rate > b.download_rate;
	return stable_tiebreak(a, b);
}

bool ranks_before_by_upload(choke_candidate const& a, choke_candidate const& b)
{
	if (a.upload_rate != b.upload_rate) return a.upload_rate > b.upload_rate;
	return stable_tiebreak(a, b);
}

bool ranks_before_by_recency(choke_candidate const& a, choke_candidate const& b)
{
	sim_time const ka = recency_key(a);
	sim_time const kb = recency_key(b);
	if (ka != kb) return ka > kb;
	return stable_tiebreak(a, b);
}

choke_decision leecher_round(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng)
{
	return rate_based_round(scheduler, peers, rng, ranks_before_by_download);
}

choke_decision seed_round_old(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng)
{
	return rate_based_round(scheduler, peers, rng, ranks_before_by_upload);
}

choke_decision seed_round_new(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng)
{
	std::vector<choke_candidate> active;
	std::vector<peer_id> pool;
	for (auto const& c : peers) {
		if (!c.interested) continue;
		if (c.unchoked) active.push_back(c);
		else pool.push_back(c.id);
	}
	std::sort(active.begin(), active.end(), ranks_before_by_recency);
	std::sort(pool.begin(), pool.end());

	bool const draw_phase = scheduler.phase() < 2;
	std::size_t keep = draw_phase ? regular_unchoke_slots : max_active_peers;
	// nobody to draw: keep the fourth by recency instead
	if (draw_phase && pool.empty()) keep = max_active_peers;
	keep = std::min(keep, active.size());

	choke_decision d;
	for (std::size_t i = 0; i < keep; ++i) d.regular.push_back(active[i].id);

	// one SRU in the first two phases; any slot still empty is filled the
	// same way so a seed with few unchoked peers ramps up immediately
	std::size_t wanted = max_active_peers - keep;
	if (!draw_phase && keep == max_active_peers) wanted = 0;
	while (wanted > 0 && !pool.empty()) {
		std::size_t const i = uniform_index(rng, pool.size());
		d.random.push_back(pool[i]);
		pool.erase(pool.begin() + std::ptrdiff_t(i));
		--wanted;
	}

	scheduler.current_optimistic.reset();
	finish(d, scheduler, peers);
	return d;
}

choke_decision run_choke_round(choke_scheduler& scheduler, std::span<choke_candidate const> peers, rng_type& rng)
{
	switch (scheduler.mode) {
	case choke_mode::leecher: return leecher_round(scheduler, peers, rng);
	case choke_mode::seed_new: return seed_round_new(scheduler, peers, rng);
	case choke_mode::seed_old: return seed_round_old(scheduler, peers, rng);
	}
	throw invariant_violation("unknown choke mode");
}

} // namespace swarm
