#pragma once

#include "swarmsim/choke.hpp"
#include "swarmsim/core.hpp"
#include "swarmsim/piece_selection.hpp"
#include "swarmsim/swarm_model.hpp"
#include "swarmsim/trace.hpp"
#include "swarmsim/tracker.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <vector>

namespace swarm {

enum class invariant_level : std::uint8_t { off, basic, full };

struct engine_options {
	choke_mode seed_choke = choke_mode::seed_new;
	std::size_t pipeline_depth = 5;
	sim_time estimator_window = 20.0;
	sim_time round_period = 10.0;
	sim_time announce_interval = 1800.0;
	sim_time duration = 3600.0;
	// stop early once nobody is left downloading and nobody else will arrive
	bool stop_when_complete = true;
	invariant_level checks = invariant_level::basic;
};

struct transfer_endpoints {
	peer_id from = 0;
	peer_id to = 0;
};

// Fluid bandwidth split. Each sender's capacity is shared equally by its
// transfers; receivers over their download cap scale their inbound
// transfers proportionally; senders feeding a capped receiver then hand the
// capacity they freed to their other transfers, bounded by those
// receivers' remaining headroom. Capacities are indexed by peer id.
std::vector<rate_bps> allocate_rates(std::span<transfer_endpoints const> transfers,
	std::span<rate_bps const> upload_capacity, std::span<rate_bps const> download_capacity);

struct transfer {
	std::uint64_t id = 0;
	peer_id from = 0;
	peer_id to = 0;
	block_ref block;
	double bytes_remaining = 0.0;
	rate_bps current_rate = 0.0;
	sim_time last_update = 0.0;
	std::uint64_t version = 0;
};

// Requests a downloader has queued at this uploader, served FIFO. The front
// one is in flight when `active` is set.
struct upload_queue {
	std::deque<block_ref> requests;
	std::optional<std::uint64_t> active;
};

struct peer_state {
	peer_profile profile;
	bool present = false;
	bool departed = false;
	peer_mode mode = peer_mode::leecher;
	bitfield have;
	availability_counter availability;
	piece_picker picker;
	choke_scheduler choker;
	std::map<peer_id, connection_state> connections;
	// keyed by downloader
	std::map<peer_id, upload_queue> uploads;
	std::size_t initiated = 0;

	std::int64_t bytes_downloaded = 0;
	std::int64_t bytes_uploaded = 0;
	std::int64_t bytes_discarded = 0;
	std::optional<sim_time> completed_at;
	std::optional<sim_time> departed_at;
};

struct engine_stats {
	std::uint64_t events = 0;
	std::uint64_t rate_recomputations = 0;
	std::uint64_t choke_rounds = 0;
	// worst observed (allocated / capacity) over all recomputations
	double max_upload_utilisation = 0.0;
	double max_download_utilisation = 0.0;
	std::size_t max_active_slots = 0;
	std::size_t max_peer_set = 0;
	std::size_t max_initiated = 0;
};

class simulator {
public:
	simulator(torrent_config torrent, std::vector<peer_profile> peers, peer_set_policy policy,
		engine_options options, std::uint64_t rng_seed);

	// Runs to the configured duration or global completion.
	void run();

	// Called after every dispatched event, once rates are up to date.
	void set_event_hook(std::function<void(simulator const&)> hook) { hook_ = std::move(hook); }

	sim_time now() const { return now_; }
	bool finished() const { return finished_; }
	torrent_config const& torrent() const { return torrent_; }
	engine_options const& options() const { return options_; }
	peer_set_policy const& policy() const { return policy_; }
	std::size_t num_peers() const { return peers_.size(); }
	peer_state const& peer(peer_id id) const { return peers_.at(id); }
	std::map<std::uint64_t, transfer> const& transfers() const { return transfers_; }
	tracker_state const& tracker() const { return tracker_; }
	engine_stats const& stats() const { return stats_; }
	std::vector<trace_event> const& events() const { return events_; }
	std::vector<trace_event> take_events() { return std::move(events_); }

	// Brute-force consistency check of all incremental state.
	void check_full_invariants() const;

private:
	enum class event_type : std::uint8_t { arrival, departure, choke_round, transfer_complete, announce };

	struct queued_event {
		sim_time time;
		std::uint64_t seq;
		event_type type;
		peer_id peer;
		std::uint64_t ref;
		std::uint64_t version;

		bool operator>(queued_event const& o) const
		{
			if (time != o.time) return time > o.time;
			return seq > o.seq;
		}
	};

	void schedule(sim_time at, event_type type, peer_id peer, std::uint64_t ref = 0, std::uint64_t version = 0);
	void dispatch(queued_event const& ev);
	void emit(trace_kind kind, peer_id subject, peer_id object = no_peer, std::int64_t piece = -1,
		std::int64_t block = -1, std::int64_t bytes = 0);

	void on_arrival(peer_id p);
	void on_departure(peer_id p);
	void on_choke_round(peer_id p);
	void on_transfer_complete(std::uint64_t id, std::uint64_t version);
	void on_announce(peer_id p);

	bool can_connect(peer_id from, peer_id to) const;
	void connect(peer_id initiator, peer_id acceptor);
	void disconnect(peer_id closer, peer_id other);
	void maintain(peer_id p);

	void update_interest(peer_id local, peer_id remote);
	void unchoke(peer_id uploader, peer_id downloader);
	void choke(peer_id uploader, peer_id downloader);
	void drop_requests(peer_id downloader, peer_id uploader, trace_kind why);
	void top_up(peer_id downloader, peer_id uploader);
	void top_up_all(peer_id downloader);
	void start_next_transfer(peer_id uploader, peer_id downloader);
	double abort_transfer(std::uint64_t id);
	void piece_completed(peer_id p, piece_index piece);
	void become_seed(peer_id p);

	void recompute_rates();
	void check_slot_bound(peer_id p) const;

	torrent_config torrent_;
	peer_set_policy policy_;
	engine_options options_;
	rng_type rng_;

	std::vector<peer_state> peers_;
	tracker_state tracker_;
	std::map<std::uint64_t, transfer> transfers_;
	std::uint64_t next_transfer_id_ = 0;
	bool rates_dirty_ = false;

	std::priority_queue<queued_event, std::vector<queued_event>, std::greater<>> queue_;
	std::uint64_t next_seq_ = 0;
	sim_time now_ = 0.0;
	bool finished_ = false;
	std::size_t pending_arrivals_ = 0;
	std::size_t leechers_present_ = 0;

	std::vector<trace_event> events_;
	engine_stats stats_;
	std::function<void(simulator const&)> hook_;
};

} // namespace swarm
