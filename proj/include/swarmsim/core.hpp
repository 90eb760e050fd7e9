#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace swarm {

using peer_id = std::uint32_t;
using piece_index = std::uint32_t;
using block_index = std::uint32_t;

// seconds of simulated time
using sim_time = double;

// bytes per second
using rate_bps = double;

inline constexpr rate_bps unlimited_rate = std::numeric_limits<double>::infinity();
inline constexpr peer_id no_peer = std::numeric_limits<peer_id>::max();

// One engine for a whole run. mt19937_64 output is fixed by the standard.
using rng_type = std::mt19937_64;

// Bad input: scenario fields, mismatched geometry, malformed files.
class config_error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Internal bookkeeping went wrong. Always a bug in the simulator.
class invariant_violation : public std::logic_error {
public:
	using std::logic_error::logic_error;
};

// uniform draw from [0, n)
inline std::size_t uniform_index(rng_type& rng, std::size_t n)
{
	std::uniform_int_distribution<std::size_t> dist(0, n - 1);
	return dist(rng);
}

} // namespace swarm
