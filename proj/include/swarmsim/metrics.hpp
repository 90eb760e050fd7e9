#pragma once

#include "swarmsim/core.hpp"
#include "swarmsim/trace.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

struct interval {
	sim_time begin = 0.0;
	sim_time end = 0.0;

	bool operator==(interval const&) const = default;
};

// Sorted, disjoint, non-empty half-open intervals.
class interval_set {
public:
	interval_set() = default;
	interval_set(std::initializer_list<interval> list);

	// Intervals may be added in any order; empty ones are ignored.
	void add(sim_time begin, sim_time end);

	sim_time length() const;
	bool contains(sim_time t) const;
	bool empty() const { return parts_.empty(); }
	std::vector<interval> const& parts() const { return parts_; }

	interval_set intersect(interval_set const& other) const;
	interval_set clip(sim_time begin, sim_time end) const;

	bool operator==(interval_set const&) const = default;

private:
	std::vector<interval> parts_;
};

// Nearest-rank percentile, p in (0, 100]. Empty input gives nothing.
std::optional<double> percentile(std::vector<double> values, double p);

// Spearman rank correlation with midranks for ties. Nothing when fewer than
// two points or when either side is constant.
std::optional<double> spearman(std::vector<double> const& x, std::vector<double> const& y);

// Least-squares slope of y over x. Nothing for fewer than two distinct x.
std::optional<double> linear_slope(std::vector<double> const& x, std::vector<double> const& y);

struct quantiles {
	std::optional<double> p20;
	std::optional<double> median;
	std::optional<double> p80;
};
quantiles summarize(std::vector<double> const& values);

// Membership and flag history of one remote, seen from an observer.
struct pair_history {
	peer_id remote = no_peer;
	interval_set membership;
	interval_set local_interested;  // observer interested in remote
	interval_set remote_interested; // remote interested in observer
	interval_set local_unchoking;   // observer unchokes remote
	interval_set remote_unchoking;  // remote unchokes observer
	// first connect time, for tie-breaking
	std::optional<sim_time> first_joined;
};

struct peer_timeline {
	peer_id id = no_peer;
	std::int64_t behavior_code = -1;
	bool initial_seed = false;
	std::optional<sim_time> arrival;
	std::optional<sim_time> departure;
	std::optional<sim_time> seed_at; // arrival for initial seeds
	std::int64_t uploaded = 0;
	std::int64_t downloaded = 0;
	std::int64_t discarded = 0;
	std::size_t pieces = 0;

	// [arrival, seed_at or departure or end)
	interval_set leecher_state(sim_time end) const;
	// [seed_at, departure or end)
	interval_set seed_state(sim_time end) const;
};

// Per-peer lifecycle and byte totals for every peer seen in the trace.
std::vector<peer_timeline> peer_timelines(trace_log const& trace);
sim_time trace_end(trace_log const& trace);

// One entry per remote that was ever in the observer's peer set.
std::vector<pair_history> pair_histories(trace_log const& trace, peer_id observer);

struct entropy_row {
	peer_id remote = no_peer;
	sim_time local_interested = 0.0;  // a
	sim_time remote_interested = 0.0; // c
	sim_time window = 0.0;            // b = d

	double local_ratio() const { return local_interested / window; }
	double remote_ratio() const { return remote_interested / window; }
};

struct entropy_result {
	peer_id observer = no_peer;
	std::vector<entropy_row> rows;
	std::size_t excluded_short = 0; // window shorter than the filter
	std::size_t excluded_zero = 0;  // window of length zero
	quantiles local;
	quantiles remote;
};

inline constexpr sim_time entropy_min_window = 10.0;

entropy_result entropy_ratios(trace_log const& trace, peer_id observer);

struct copy_sample {
	sim_time time = 0.0;
	std::size_t members = 0;
	std::uint32_t min = 0;
	double mean = 0.0;
	std::uint32_t max = 0;
	// rarest set: pieces the observer lacks whose count is the minimum over
	// all lacked pieces (zero included)
	std::size_t rarest = 0;
	std::uint32_t rarest_min = 0;
};

// Samples at multiples of the grid while the observer is present. Counts
// cover the observer's remote peer set, not the observer itself.
std::vector<copy_sample> copy_statistics(trace_log const& trace, peer_id observer, sim_time grid);

struct state_transition {
	sim_time time = 0.0;
	bool transient = false;

	bool operator==(state_transition const&) const = default;
};

struct state_result {
	sim_time start = 0.0;
	sim_time end = 0.0;
	// first entry is the initial state
	std::vector<state_transition> transitions;
	sim_time transient_duration = 0.0;
	// never steady followed by transient
	bool monotone = true;
	interval_set transient;

	std::vector<std::pair<sim_time, bool>> samples;
};

// Transient while some piece is held by a present initial seed and by no
// other present peer.
state_result classify_state(trace_log const& trace, sim_time grid);

struct reciprocation_peer {
	peer_id remote = no_peer;
	std::int64_t uploaded = 0;
	std::int64_t downloaded = 0;
};

struct reciprocation_bucket {
	std::size_t size = 0;
	double upload_fraction = 0.0;
	double download_fraction = 0.0;
};

inline constexpr std::size_t reciprocation_bucket_size = 5;
inline constexpr std::size_t reciprocation_buckets = 6;

struct reciprocation_result {
	peer_id observer = no_peer;
	// by uploaded bytes descending, then id
	std::vector<reciprocation_peer> peers;
	std::vector<reciprocation_bucket> buckets;
	std::int64_t total_uploaded = 0;
	std::int64_t total_downloaded = 0;
	std::optional<double> rank_correlation;
	bool short_of_peers = false; // fewer than 30 counterparties
};

// Counts bytes exchanged while the observer is a leecher; downloads from
// remotes in seed state are left out.
reciprocation_result reciprocation_report(trace_log const& trace, peer_id observer);

struct unchoke_point {
	peer_id remote = no_peer;
	std::size_t unchokes = 0;
	sim_time interested = 0.0;
};

struct unchoke_result {
	peer_id observer = no_peer;
	std::vector<unchoke_point> leecher;
	std::vector<unchoke_point> seed; // only remotes unchoked at least once
	std::optional<double> leecher_correlation;
	std::optional<double> seed_correlation;
};

unchoke_result unchoke_interest_correlation(trace_log const& trace, peer_id observer);

struct fairness_peer {
	peer_id remote = no_peer;
	std::int64_t bytes = 0;
	sim_time interested = 0.0;
	double normalized = 0.0; // bytes per interested second
	double share = 0.0;      // of bytes served in the window
};

inline constexpr sim_time seed_cycle = 30.0;

struct fairness_result {
	peer_id observer = no_peer;
	std::optional<sim_time> seed_start;
	sim_time window_end = 0.0;
	std::size_t cycles = 0;
	std::int64_t total = 0;
	std::vector<fairness_peer> peers;
	std::optional<double> cv;
};

// Over whole 30 s cycles of the observer's seed state.
fairness_result seed_fairness_report(trace_log const& trace, peer_id observer);

// Replays seed-new rounds of the observer and checks the kept set is the
// most recently unchoked peers, i.e. every random unchoke displaced the
// oldest kept ones.
struct rotation_result {
	peer_id observer = no_peer;
	std::size_t rounds = 0;
	std::size_t displacements = 0;
	std::size_t mismatches = 0;
};

rotation_result seed_rotation_check(trace_log const& trace, peer_id observer);

enum class metric : std::uint8_t { entropy, copies, rarest, state, reciprocation, unchoke, fairness, rotation, peers };

std::string_view to_string(metric m);
metric parse_metric(std::string_view s);
std::set<metric> all_metrics();
// comma separated names, or "all"
std::set<metric> parse_metric_list(std::string_view s);

struct observer_report {
	peer_id observer = no_peer;
	std::optional<entropy_result> entropy;
	std::optional<std::vector<copy_sample>> copies;
	std::optional<reciprocation_result> reciprocation;
	std::optional<unchoke_result> unchoke;
	std::optional<fairness_result> fairness;
	std::optional<rotation_result> rotation;
};

struct metrics_report {
	trace_header header;
	sim_time end = 0.0;
	std::set<metric> selected;
	std::optional<state_result> state;
	std::optional<std::vector<peer_timeline>> peers;
	std::vector<observer_report> observers;
};

// Observers and grid come from the trace header. `parallel` computes the
// observers concurrently; the result is identical either way.
metrics_report compute_report(trace_log const& trace, std::set<metric> const& selected, bool parallel = false);

// Structured summary (JSON text) and the plot-ready tables.
std::string summary_json(metrics_report const& report);

struct table {
	std::string name;
	std::string text;
};
std::vector<table> report_tables(metrics_report const& report);

} // namespace swarm
