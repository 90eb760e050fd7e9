#pragma once

#include "swarmsim/engine.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/scenario.hpp"
#include "swarmsim/trace.hpp"

#include <exception>
#include <set>
#include <string>
#include <vector>

namespace swarm {

struct run_result {
	trace_log trace;
	engine_stats stats;
};

// Runs one scenario to completion and returns its trace.
run_result simulate(scenario const& s, invariant_level checks = invariant_level::basic);

// Writes trace.txt, summary.json and one CSV per table into `dir`.
void write_outputs(std::string const& dir, trace_log const* trace, metrics_report const& report);

// Side-by-side listing of every numeric field two summaries share, with
// deltas. Refuses summaries of different torrent geometry.
struct comparison_row {
	std::string key;
	double a = 0.0;
	double b = 0.0;
	double delta() const { return b - a; }
};
std::vector<comparison_row> compare_summaries(std::string const& summary_a, std::string const& summary_b);
std::string format_comparison(std::vector<comparison_row> const& rows);

// Runs `job(i)` for i in [0, n). The parallel version spreads jobs over
// OpenMP threads; results land at their own index so order never depends on
// scheduling.
template <class Job>
auto run_replicas(std::size_t n, Job&& job, bool parallel) -> std::vector<decltype(job(std::size_t{}))>
{
	using result = decltype(job(std::size_t{}));
	std::vector<result> out(n);
	if (!parallel) {
		for (std::size_t i = 0; i < n; ++i) out[i] = job(i);
		return out;
	}
	std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
	for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) {
		try {
			out[std::size_t(i)] = job(std::size_t(i));
		}
		catch (...) {
			errors[std::size_t(i)] = std::current_exception();
		}
	}
	for (auto const& e : errors)
		if (e) std::rethrow_exception(e);
	return out;
}

struct replica_summary {
	std::uint64_t seed = 0;
	std::uint64_t digest = 0;
	std::size_t events = 0;
	sim_time end = 0.0;
};

// Seeds base_seed, base_seed + 1, ...
std::vector<replica_summary> run_batch(scenario const& s, std::size_t replicas, invariant_level checks, bool parallel);

} // namespace swarm
