#pragma once

#include "swarmsim/core.hpp"
#include "swarmsim/swarm_model.hpp"

#include <compare>
#include <optional>
#include <span>
#include <vector>

namespace swarm {

// Pieces below this many completed ones are picked at random.
inline constexpr std::size_t random_first_threshold = 4;

struct block_ref {
	piece_index piece = 0;
	block_index block = 0;

	auto operator<=>(block_ref const&) const = default;
};

// Pieces the local peer lacks whose count equals the minimum count over
// all lacked pieces present in the peer set (count > 0).
struct rarest_pieces_set {
	std::uint32_t min_count = 0;
	std::vector<piece_index> members;
};

rarest_pieces_set rarest_pieces(bitfield const& local, availability_counter const& counter);

// A piece with at least one block requested but not all blocks received.
struct partial_piece {
	partial_piece(piece_index p, std::uint32_t num_blocks);

	piece_index piece;
	std::vector<bool> received;
	// peers holding a pending request for each block
	std::vector<std::vector<peer_id>> pending;
	std::uint32_t received_count = 0;

	bool requested(block_index b) const { return received[b] || !pending[b].empty(); }
	bool has_unrequested() const;
	bool complete() const { return received_count == received.size(); }
};

struct end_game_state {
	bool active = false;
};

// Piece to request next from `remote`. Strict priority first (oldest partial
// with an unrequested block the remote holds), then random first below four
// completed pieces, then rarest first restricted to the remote's pieces.
std::optional<piece_index> select_piece(bitfield const& local, availability_counter const& counter,
	bitfield const& remote, std::span<partial_piece const> partials, rng_type& rng);

// Outside end game: lowest unrequested block. In end game: lowest block not
// yet received that `requester` does not already have pending.
std::optional<block_index> next_block(partial_piece const& partial, end_game_state const& end_game,
	peer_id requester);

// Per-peer download bookkeeping: partial pieces, request ownership and
// end game activation.
class piece_picker {
public:
	piece_picker() = default;
	piece_picker(torrent_config const& torrent, bitfield const& initial);

	// Chooses and records a request to `remote`. Returns nothing when there
	// is no block worth asking this peer for.
	std::optional<block_ref> pick(bitfield const& local, availability_counter const& counter,
		peer_id remote, bitfield const& remote_have, rng_type& rng);

	struct receive_result {
		bool piece_complete = false;
		// peers whose duplicate request for this block must be cancelled
		std::vector<peer_id> cancel;
	};
	receive_result on_block_received(block_ref b, peer_id from);

	// A pending request is gone (choke, cancel, departure).
	void on_request_dropped(block_ref b, peer_id from);

	// Switches end game on once every missing block is received or
	// requested. Returns true only on the activating call.
	bool check_end_game();

	bool end_game() const { return end_game_.active; }
	end_game_state const& end_game_status() const { return end_game_; }
	std::size_t unrequested_blocks() const { return unrequested_; }
	std::span<partial_piece const> partials() const { return partials_; }
	partial_piece const* find(piece_index p) const;
	bool is_pending(block_ref b, peer_id from) const;

private:
	partial_piece* find_mutable(piece_index p);
	void mark_requested(partial_piece& pp, block_index b, peer_id remote);

	std::uint32_t blocks_per_piece_ = 0;
	std::size_t missing_pieces_ = 0;
	std::size_t unrequested_ = 0;
	end_game_state end_game_;
	// oldest first
	std::vector<partial_piece> partials_;
};

} // namespace swarm
