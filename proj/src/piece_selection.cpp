#include "swarmsim/piece_selection.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace swarm {

rarest_pieces_set rarest_pieces(bitfield const& local, availability_counter const& counter)
{
	rarest_pieces_set out;
	std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
	for (piece_index p = 0; p < counter.size(); ++p) {
		if (local.has(p)) continue;
		std::uint32_t const c = counter.count(p);
		if (c == 0) continue;
		if (c < m) {
			m = c;
			out.members.clear();
		}
		if (c == m) out.members.push_back(p);
	}
	out.min_count = out.members.empty() ? 0 : m;
	return out;
}

partial_piece::partial_piece(piece_index p, std::uint32_t num_blocks)
	: piece(p)
	, received(num_blocks, false)
	, pending(num_blocks)
{}

bool partial_piece::has_unrequested() const
{
	for (block_index b = 0; b < received.size(); ++b)
		if (!requested(b)) return true;
	return false;
}

std::optional<piece_index> select_piece(bitfield const& local, availability_counter const& counter,
	bitfield const& remote, std::span<partial_piece const> partials, rng_type& rng)
{
	if (local.size() != remote.size() || counter.size() != local.size())
		throw config_error("select_piece: bitfield length mismatch");

	// strict priority
	for (auto const& pp : partials)
		if (remote.has(pp.piece) && pp.has_unrequested()) return pp.piece;

	auto is_partial = [&](piece_index p) {
		return std::any_of(partials.begin(), partials.end(),
			[p](partial_piece const& pp) { return pp.piece == p; });
	};

	std::vector<piece_index> candidates;
	for (piece_index p = 0; p < local.size(); ++p)
		if (remote.has(p) && !local.has(p) && !is_partial(p)) candidates.push_back(p);
	if (candidates.empty()) return std::nullopt;

	if (local.count() < random_first_threshold)
		return candidates[uniform_index(rng, candidates.size())];

	rarest_pieces_set const rarest = rarest_pieces(local, counter);
	std::vector<piece_index> pick_from;
	std::set_intersection(rarest.members.begin(), rarest.members.end(),
		candidates.begin(), candidates.end(), std::back_inserter(pick_from));

	if (pick_from.empty()) {
		// nothing globally rarest here: take this peer's rarest offering
		std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
		for (piece_index p : candidates) m = std::min(m, counter.count(p));
		for (piece_index p : candidates)
			if (counter.count(p) == m) pick_from.push_back(p);
	}
	return pick_from[uniform_index(rng, pick_from.size())];
}

std::optional<block_index> next_block(partial_piece const& partial, end_game_state const& end_game,
	peer_id requester)
{
	for (block_index b = 0; b < partial.received.size(); ++b) {
		if (!end_game.active) {
			if (!partial.requested(b)) return b;
			continue;
		}
		if (partial.received[b]) continue;
		auto const& pend = partial.pending[b];
		if (std::find(pend.begin(), pend.end(), requester) == pend.end()) return b;
	}
	return std::nullopt;
}

piece_picker::piece_picker(torrent_config const& torrent, bitfield const& initial)
	: blocks_per_piece_(torrent.blocks_per_piece())
	, missing_pieces_(initial.size() - initial.count())
	, unrequested_(missing_pieces_ * blocks_per_piece_)
{}

partial_piece const* piece_picker::find(piece_index p) const
{
	for (auto const& pp : partials_)
		if (pp.piece == p) return &pp;
	return nullptr;
}

partial_piece* piece_picker::find_mutable(piece_index p)
{
	for (auto& pp : partials_)
		if (pp.piece == p) return &pp;
	return nullptr;
}

bool piece_picker::is_pending(block_ref b, peer_id from) const
{
	partial_piece const* pp = find(b.piece);
	if (!pp) return false;
	auto const& pend = pp->pending[b.block];
	return std::find(pend.begin(), pend.end(), from) != pend.end();
}

void piece_picker::mark_requested(partial_piece& pp, block_index b, peer_id remote)
{
	if (pp.received[b])
		throw invariant_violation("request for already received block " + std::to_string(pp.piece)
			+ ":" + std::to_string(b));
	if (!end_game_.active && !pp.pending[b].empty())
		throw invariant_violation("second request for block outside end game");
	if (pp.pending[b].empty()) --unrequested_;
	pp.pending[b].push_back(remote);
}

std::optional<block_ref> piece_picker::pick(bitfield const& local, availability_counter const& counter,
	peer_id remote, bitfield const& remote_have, rng_type& rng)
{
	if (end_game_.active) {
		for (auto& pp : partials_) {
			if (!remote_have.has(pp.piece)) continue;
			if (auto b = next_block(pp, end_game_, remote)) {
				mark_requested(pp, *b, remote);
				return block_ref{pp.piece, *b};
			}
		}
		return std::nullopt;
	}

	auto const piece = select_piece(local, counter, remote_have, partials_, rng);
	if (!piece) return std::nullopt;
	partial_piece* pp = find_mutable(*piece);
	if (!pp) {
		partials_.emplace_back(*piece, blocks_per_piece_);
		pp = &partials_.back();
	}
	auto const b = next_block(*pp, end_game_, remote);
	if (!b) throw invariant_violation("selected piece has no requestable block");
	mark_requested(*pp, *b, remote);
	return block_ref{*piece, *b};
}

piece_picker::receive_result piece_picker::on_block_received(block_ref b, peer_id from)
{
	partial_piece* pp = find_mutable(b.piece);
	if (!pp || pp->received[b.block])
		throw invariant_violation("block " + std::to_string(b.piece) + ":" + std::to_string(b.block)
			+ " received twice or never requested");
	auto& pend = pp->pending[b.block];
	auto it = std::find(pend.begin(), pend.end(), from);
	if (it == pend.end())
		throw invariant_violation("block received from a peer it was not requested from");
	pend.erase(it);

	receive_result out;
	out.cancel = std::move(pend);
	pend.clear();
	pp->received[b.block] = true;
	++pp->received_count;

	if (pp->complete()) {
		out.piece_complete = true;
		--missing_pieces_;
		partials_.erase(partials_.begin() + (pp - partials_.data()));
	}
	return out;
}

void piece_picker::on_request_dropped(block_ref b, peer_id from)
{
	partial_piece* pp = find_mutable(b.piece);
	if (!pp) return;
	auto& pend = pp->pending[b.block];
	auto it = std::find(pend.begin(), pend.end(), from);
	if (it == pend.end()) return;
	pend.erase(it);
	if (pend.empty() && !pp->received[b.block]) ++unrequested_;
}

bool piece_picker::check_end_game()
{
	if (end_game_.active || missing_pieces_ == 0 || unrequested_ != 0) return false;
	end_game_.active = true;
	return true;
}

} // namespace swarm
