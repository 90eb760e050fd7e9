// Serial vs OpenMP replica batch and per-observer metrics.
// usage: batch_bench [scenario.ini] [replicas]

#include "swarmsim/harness.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/scenario.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

using namespace swarm;

namespace {

template <class F>
double seconds(F&& f)
{
	auto const t0 = std::chrono::steady_clock::now();
	f();
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv)
{
	std::string const path = argc > 1 ? argv[1] : std::string(SWARMSIM_SCENARIO_DIR) + "/torrent20_scaled.ini";
	std::size_t const replicas = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 8;

	try {
		auto const s = load_scenario(path);
		std::printf("scenario %s, %zu replicas, %d threads\n", path.c_str(), replicas, omp_get_max_threads());

		std::vector<replica_summary> a, b;
		double const ts = seconds([&] { a = run_batch(s, replicas, invariant_level::off, false); });
		double const tp = seconds([&] { b = run_batch(s, replicas, invariant_level::off, true); });
		bool same = a.size() == b.size();
		std::size_t events = 0;
		for (std::size_t i = 0; same && i < a.size(); ++i) {
			same = a[i].digest == b[i].digest;
			events += a[i].events;
		}
		std::printf("batch  serial %.3f s  parallel %.3f s  speedup %.2f  %.0f events/s  digests %s\n", ts, tp,
			ts / tp, double(events) / ts, same ? "identical" : "DIFFER");

		auto const trace = simulate(s, invariant_level::off).trace;
		auto const all = all_metrics();
		metrics_report rs, rp;
		double const ms = seconds([&] { rs = compute_report(trace, all, false); });
		double const mp = seconds([&] { rp = compute_report(trace, all, true); });
		bool const equal = summary_json(rs) == summary_json(rp);
		std::printf("metrics serial %.3f s  parallel %.3f s  speedup %.2f  reports %s\n", ms, mp, ms / mp,
			equal ? "identical" : "DIFFER");
		return same && equal ? 0 : 1;
	}
	catch (std::exception const& e) {
		std::fprintf(stderr, "batch_bench: %s\n", e.what());
		return 1;
	}
}
