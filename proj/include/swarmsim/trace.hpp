#pragma once

#include "swarmsim/core.hpp"
#include "swarmsim/swarm_model.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

inline constexpr int trace_format_version = 1;

enum class trace_kind : std::uint8_t {
	arrive,         // subject; block = behavior code; bytes = upload capacity (B/s)
	depart,         // subject
	connect,        // subject initiated to object
	disconnect,     // subject closed to object
	interested,     // subject became interested in object
	not_interested, // subject lost interest in object
	unchoke,        // subject unchokes object
	choke,          // subject chokes object
	round,          // subject ran a choke round; piece = round index; block = choke_mode
	regular_unchoke,   // RU (leecher / seed-old) chosen by subject; piece = round index
	optimistic_unchoke,// OU; piece = round index
	seed_kept,      // SKU; piece = round index
	seed_random,    // SRU; piece = round index
	block,          // subject sent a whole block to object
	abort,          // subject -> object transfer dropped on choke; bytes = discarded
	cancel,         // subject cancelled its request at object (end game); bytes = discarded
	piece,          // subject completed piece
	end_game,       // subject entered end game mode
	seed,           // subject holds every piece
	end,            // last record of a run
};

std::string_view to_string(trace_kind k);
trace_kind parse_trace_kind(std::string_view s);

struct trace_event {
	sim_time time = 0.0;
	trace_kind kind = trace_kind::end;
	peer_id subject = no_peer;
	peer_id object = no_peer;
	std::int64_t piece = -1;
	std::int64_t block = -1;
	std::int64_t bytes = 0;

	bool operator==(trace_event const&) const = default;
};

struct trace_header {
	int version = trace_format_version;
	std::uint64_t scenario_hash = 0;
	std::uint64_t rng_seed = 0;
	torrent_config torrent;
	std::vector<peer_id> observers;
	sim_time grid = 10.0;

	bool operator==(trace_header const&) const = default;
};

struct trace_log {
	trace_header header;
	std::vector<trace_event> events;

	bool operator==(trace_log const&) const = default;
};

// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

void write_trace(std::ostream& out, trace_log const& log);
std::string serialize_trace(trace_log const& log);

// Throws config_error("trace line N: ...") on malformed, truncated or
// unordered input.
trace_log read_trace(std::istream& in);
trace_log read_trace_file(std::string const& path);
void write_trace_file(std::string const& path, trace_log const& log);

// FNV-1a 64 over bytes.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::uint64_t trace_digest(trace_log const& log);

} // namespace swarm
