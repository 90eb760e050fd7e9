#include "swarmsim/rate_estimator.hpp"

namespace swarm {

rate_estimator::rate_estimator(sim_time window)
	: window_(window)
{
	if (!(window > 0.0))
		throw config_error("rate estimator window must be positive");
}

void rate_estimator::update(std::int64_t bytes, sim_time at)
{
	if (bytes < 0)
		throw config_error("rate estimator: negative byte count");
	if (at < last_at_)
		throw invariant_violation("rate estimator: sample time went backwards");
	last_at_ = at;
	samples_.push_back({at, bytes});
	in_window_ += bytes;
	total_ += bytes;
	evict(at);
}

void rate_estimator::evict(sim_time now)
{
	while (!samples_.empty() && samples_.front().at <= now - window_) {
		in_window_ -= samples_.front().bytes;
		samples_.pop_front();
	}
}

rate_bps rate_estimator::estimate(sim_time now)
{
	evict(now);
	return static_cast<double>(in_window_) / window_;
}

} // namespace swarm
