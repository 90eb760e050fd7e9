#pragma once

#include "swarmsim/core.hpp"

#include <deque>

namespace swarm {

// Sliding-window byte rate: bytes seen in (now - window, now] divided by
// the window length.
class rate_estimator {
public:
	static constexpr sim_time default_window = 20.0;

	explicit rate_estimator(sim_time window = default_window);

	// `at` must not go backwards between calls.
	void update(std::int64_t bytes, sim_time at);

	// Evicts samples that fell out of the window as seen from `now`.
	rate_bps estimate(sim_time now);

	sim_time window() const { return window_; }
	std::int64_t total_bytes() const { return total_; }

private:
	void evict(sim_time now);

	struct sample {
		sim_time at;
		std::int64_t bytes;
	};

	sim_time window_;
	std::deque<sample> samples_;
	std::int64_t in_window_ = 0;
	std::int64_t total_ = 0;
	sim_time last_at_ = -std::numeric_limits<double>::infinity();
};

} // namespace swarm
