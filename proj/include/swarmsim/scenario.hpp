#pragma once

#include "swarmsim/core.hpp"
#include "swarmsim/engine.hpp"
#include "swarmsim/swarm_model.hpp"
#include "swarmsim/tracker.hpp"

#include <string>
#include <vector>

namespace swarm {

enum class arrival_kind : std::uint8_t { flash, poisson, stagger, scripted };

struct arrival_spec {
	arrival_kind kind = arrival_kind::flash;
	sim_time start = 0.0;
	double rate = 0.0;       // poisson, arrivals per second
	sim_time interval = 0.0; // stagger
	std::vector<sim_time> times; // scripted, non-decreasing

	bool operator==(arrival_spec const&) const = default;
};

enum class departure_spec_kind : std::uint8_t { stay, leave_on_completion, leave_at, leave_after };

struct departure_spec {
	departure_spec_kind kind = departure_spec_kind::stay;
	sim_time at = 0.0; // absolute for leave_at, relative to arrival for leave_after

	bool operator==(departure_spec const&) const = default;
};

// A block of identical (or uniformly varied) peers.
struct group_spec {
	std::string name;
	std::size_t count = 0;
	behavior kind = behavior::normal;
	rate_bps upload = 20 * 1024;
	// when set, uploads are drawn uniformly from [upload, upload_max]
	std::optional<rate_bps> upload_max;
	rate_bps download = unlimited_rate;
	// this share of the group (rounded) turns into free riders
	double free_rider_fraction = 0.0;
	arrival_spec arrival;
	departure_spec departure;

	bool operator==(group_spec const&) const = default;
};

struct scenario {
	std::string name;
	torrent_config torrent;
	peer_set_policy policy;
	engine_options engine;
	std::uint64_t rng_seed = 1;
	bool allow_no_seed = false;
	std::vector<peer_id> observers;
	sim_time grid = 10.0;
	std::vector<group_spec> groups;

	std::size_t peer_count() const;

	// throws config_error naming the offending field
	void validate() const;

	bool operator==(scenario const&) const = default;
};

// INI-style text: [torrent], [run], [algorithm], [policy], [metrics] and one
// [group.<name>] section per peer group. `origin` only labels errors.
scenario parse_scenario(std::string const& text, std::string const& origin = "scenario");
scenario load_scenario(std::string const& path);

// Canonical text of every field; equal scenarios give equal text.
std::string canonical_text(scenario const& s);
std::uint64_t scenario_hash(scenario const& s);

// Concrete peers, ids assigned in group order. Deterministic in the
// scenario seed.
std::vector<peer_profile> expand_peers(scenario const& s);

// "20k" = 20 * 1024, "4M", plain numbers, or "unlimited".
double parse_quantity(std::string const& text, std::string const& field);

} // namespace swarm
