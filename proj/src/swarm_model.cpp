#include "swarmsim/swarm_model.hpp"

#include <cmath>
#include <string>

namespace swarm {

void torrent_config::validate() const
{
	if (num_pieces < 1)
		throw config_error("torrent.num_pieces must be >= 1");
	if (block_size <= 0)
		throw config_error("torrent.block_size must be positive");
	if (piece_size < block_size)
		throw config_error("torrent.piece_size must be at least torrent.block_size");
	if (piece_size % block_size != 0)
		throw config_error("torrent.piece_size must be a multiple of torrent.block_size");
}

bitfield::bitfield(std::size_t num_pieces, bool full)
	: have_(num_pieces, full)
	, count_(full ? num_pieces : 0)
{}

bool bitfield::set(piece_index p)
{
	if (have_[p]) return false;
	have_[p] = true;
	++count_;
	return true;
}

bool compute_interest(bitfield const& local, bitfield const& remote)
{
	if (local.size() != remote.size())
		throw config_error("bitfield length mismatch");
	for (std::size_t p = 0; p < local.size(); ++p)
		if (remote.has(piece_index(p)) && !local.has(piece_index(p))) return true;
	return false;
}

std::size_t count_wanted(bitfield const& local, bitfield const& remote)
{
	if (local.size() != remote.size())
		throw config_error("bitfield length mismatch");
	std::size_t n = 0;
	for (std::size_t p = 0; p < local.size(); ++p)
		if (remote.has(piece_index(p)) && !local.has(piece_index(p))) ++n;
	return n;
}

std::string_view to_string(behavior b)
{
	switch (b) {
	case behavior::normal: return "normal";
	case behavior::free_rider: return "free-rider";
	case behavior::initial_seed: return "initial-seed";
	}
	return "?";
}

behavior parse_behavior(std::string_view s)
{
	if (s == "normal") return behavior::normal;
	if (s == "free-rider") return behavior::free_rider;
	if (s == "initial-seed") return behavior::initial_seed;
	throw config_error("unknown behavior '" + std::string(s) + "'");
}

void peer_profile::validate() const
{
	std::string const who = "peer " + std::to_string(id);
	if (!(upload_capacity >= 0.0) || std::isinf(upload_capacity))
		throw config_error(who + ": upload capacity must be finite and >= 0");
	if (!(download_capacity > 0.0))
		throw config_error(who + ": download capacity must be positive");
	if (!(arrival_time >= 0.0))
		throw config_error(who + ": arrival time must be >= 0");
	if (departure.kind == departure_kind::leave_at_time && departure.at < arrival_time)
		throw config_error(who + ": departure precedes arrival");
}

availability_counter::availability_counter(std::size_t num_pieces)
	: counts_(num_pieces, 0)
{}

void availability_counter::peer_joined(bitfield const& b)
{
	if (b.size() != counts_.size())
		throw config_error("availability: bitfield length mismatch");
	for (std::size_t p = 0; p < counts_.size(); ++p)
		if (b.has(piece_index(p))) ++counts_[p];
}

void availability_counter::peer_left(bitfield const& b)
{
	if (b.size() != counts_.size())
		throw config_error("availability: bitfield length mismatch");
	for (std::size_t p = 0; p < counts_.size(); ++p) {
		if (!b.has(piece_index(p))) continue;
		if (counts_[p] == 0)
			throw invariant_violation("availability underflow on piece " + std::to_string(p));
		--counts_[p];
	}
}

void availability_counter::have(piece_index p)
{
	++counts_[p];
}

} // namespace swarm
