#pragma once

#include "swarmsim/core.hpp"
#include "swarmsim/rate_estimator.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace swarm {

struct torrent_config {
	std::uint32_t num_pieces = 0;
	std::int64_t piece_size = 256 * 1024;
	std::int64_t block_size = 16 * 1024;

	std::uint32_t blocks_per_piece() const
	{
		return static_cast<std::uint32_t>(piece_size / block_size);
	}
	std::int64_t content_size() const { return piece_size * num_pieces; }

	// throws config_error naming the offending field
	void validate() const;

	bool operator==(torrent_config const&) const = default;
};

// Completed pieces of one peer. Bits are only ever set.
class bitfield {
public:
	bitfield() = default;
	explicit bitfield(std::size_t num_pieces, bool full = false);

	bool has(piece_index p) const { return have_[p]; }

	// Returns false if the piece was already set.
	bool set(piece_index p);

	std::size_t size() const { return have_.size(); }
	std::size_t count() const { return count_; }
	bool complete() const { return count_ == have_.size(); }
	bool empty() const { return count_ == 0; }

	bool operator==(bitfield const&) const = default;

private:
	std::vector<bool> have_;
	std::size_t count_ = 0;
};

// True iff `remote` holds a piece `local` lacks. Throws config_error on a
// length mismatch.
bool compute_interest(bitfield const& local, bitfield const& remote);

// Number of pieces `remote` holds that `local` lacks.
std::size_t count_wanted(bitfield const& local, bitfield const& remote);

enum class behavior : std::uint8_t { normal = 0, free_rider = 1, initial_seed = 2 };

std::string_view to_string(behavior b);
behavior parse_behavior(std::string_view s);

enum class departure_kind : std::uint8_t { stay_as_seed, leave_on_completion, leave_at_time };

struct departure_policy {
	departure_kind kind = departure_kind::stay_as_seed;
	sim_time at = 0.0; // only for leave_at_time

	bool operator==(departure_policy const&) const = default;
};

struct peer_profile {
	peer_id id = 0;
	rate_bps upload_capacity = 20 * 1024;
	rate_bps download_capacity = unlimited_rate;
	sim_time arrival_time = 0.0;
	departure_policy departure;
	behavior kind = behavior::normal;

	// free riders never upload regardless of the configured capacity
	rate_bps effective_upload() const
	{
		return kind == behavior::free_rider ? 0.0 : upload_capacity;
	}

	void validate() const;

	bool operator==(peer_profile const&) const = default;
};

enum class peer_mode : std::uint8_t { leecher, seed };

// Per-piece copy counts over a peer set, not counting the owning peer.
class availability_counter {
public:
	availability_counter() = default;
	explicit availability_counter(std::size_t num_pieces);

	void peer_joined(bitfield const& b);
	// throws invariant_violation on underflow
	void peer_left(bitfield const& b);
	void have(piece_index p);

	std::uint32_t count(piece_index p) const { return counts_[p]; }
	std::span<std::uint32_t const> counts() const { return counts_; }
	std::size_t size() const { return counts_.size(); }

	bool operator==(availability_counter const&) const = default;

private:
	std::vector<std::uint32_t> counts_;
};

// The local side's view of one connection.
struct connection_state {
	bool am_choking = true;
	bool am_interested = false;
	bool peer_choking = true;
	bool peer_interested = false;

	// remote -> local
	rate_estimator download;
	// local -> remote
	rate_estimator upload;

	std::optional<sim_time> last_unchoke_time;
	sim_time joined_peer_set_at = 0.0;

	// pieces the remote has that we lack; interest is wanted > 0
	std::size_t wanted = 0;
	bool initiated_by_us = false;

	connection_state() = default;
	connection_state(sim_time joined, sim_time estimator_window)
		: download(estimator_window)
		, upload(estimator_window)
		, joined_peer_set_at(joined)
	{}
};

} // namespace swarm
