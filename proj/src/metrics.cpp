#include "swarmsim/metrics.hpp"

#include "swarmsim/choke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace swarm {

// --- intervals -----------------------------------------------------------

interval_set::interval_set(std::initializer_list<interval> list)
{
	for (auto const& i : list) add(i.begin, i.end);
}

void interval_set::add(sim_time begin, sim_time end)
{
	if (!(end > begin)) return;
	if (parts_.empty() || begin > parts_.back().end) {
		parts_.push_back({begin, end});
		return;
	}
	if (begin >= parts_.back().begin) {
		parts_.back().end = std::max(parts_.back().end, end);
		return;
	}
	parts_.push_back({begin, end});
	std::sort(parts_.begin(), parts_.end(), [](interval const& a, interval const& b) { return a.begin < b.begin; });
	std::vector<interval> merged;
	for (auto const& i : parts_) {
		if (!merged.empty() && i.begin <= merged.back().end) merged.back().end = std::max(merged.back().end, i.end);
		else merged.push_back(i);
	}
	parts_ = std::move(merged);
}

sim_time interval_set::length() const
{
	sim_time total = 0.0;
	for (auto const& i : parts_) total += i.end - i.begin;
	return total;
}

bool interval_set::contains(sim_time t) const
{
	auto it = std::upper_bound(parts_.begin(), parts_.end(), t,
		[](sim_time v, interval const& i) { return v < i.begin; });
	if (it == parts_.begin()) return false;
	--it;
	return t < it->end;
}

interval_set interval_set::intersect(interval_set const& other) const
{
	interval_set out;
	std::size_t i = 0, j = 0;
	while (i < parts_.size() && j < other.parts_.size()) {
		sim_time const b = std::max(parts_[i].begin, other.parts_[j].begin);
		sim_time const e = std::min(parts_[i].end, other.parts_[j].end);
		if (e > b) out.parts_.push_back({b, e});
		if (parts_[i].end < other.parts_[j].end) ++i;
		else ++j;
	}
	return out;
}

interval_set interval_set::clip(sim_time begin, sim_time end) const
{
	interval_set window;
	window.add(begin, end);
	return intersect(window);
}

// --- statistics ----------------------------------------------------------

std::optional<double> percentile(std::vector<double> values, double p)
{
	if (values.empty()) return std::nullopt;
	if (!(p > 0.0 && p <= 100.0)) throw config_error("percentile must be in (0, 100]");
	std::sort(values.begin(), values.end());
	auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * double(values.size())));
	rank = std::clamp<std::size_t>(rank, 1, values.size());
	return values[rank - 1];
}

quantiles summarize(std::vector<double> const& values)
{
	return {percentile(values, 20), percentile(values, 50), percentile(values, 80)};
}

namespace {

std::vector<double> midranks(std::vector<double> const& v)
{
	std::vector<std::size_t> order(v.size());
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
	std::vector<double> rank(v.size());
	for (std::size_t i = 0; i < order.size();) {
		std::size_t j = i;
		while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
		double const r = (double(i) + double(j)) / 2.0 + 1.0;
		for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
		i = j + 1;
	}
	return rank;
}

std::optional<double> pearson(std::vector<double> const& x, std::vector<double> const& y)
{
	std::size_t const n = x.size();
	if (n < 2) return std::nullopt;
	double const mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
	double const my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		sxy += (x[i] - mx) * (y[i] - my);
		sxx += (x[i] - mx) * (x[i] - mx);
		syy += (y[i] - my) * (y[i] - my);
	}
	if (sxx == 0.0 || syy == 0.0) return std::nullopt;
	return sxy / std::sqrt(sxx * syy);
}

} // namespace

std::optional<double> spearman(std::vector<double> const& x, std::vector<double> const& y)
{
	if (x.size() != y.size()) throw config_error("spearman: sample sizes differ");
	return pearson(midranks(x), midranks(y));
}

std::optional<double> linear_slope(std::vector<double> const& x, std::vector<double> const& y)
{
	if (x.size() != y.size()) throw config_error("linear_slope: sample sizes differ");
	std::size_t const n = x.size();
	if (n < 2) return std::nullopt;
	double const mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
	double const my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
	double sxy = 0.0, sxx = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		sxy += (x[i] - mx) * (y[i] - my);
		sxx += (x[i] - mx) * (x[i] - mx);
	}
	if (sxx == 0.0) return std::nullopt;
	return sxy / sxx;
}

// --- reconstruction ------------------------------------------------------

namespace {

constexpr std::int64_t initial_seed_code = static_cast<std::int64_t>(behavior::initial_seed);

bool involves(trace_event const& e, peer_id p) { return e.subject == p || e.object == p; }

peer_id other_end(trace_event const& e, peer_id p) { return e.subject == p ? e.object : e.subject; }

std::size_t peer_count(trace_log const& trace)
{
	std::size_t n = 0;
	for (auto const& e : trace.events) {
		if (e.subject != no_peer) n = std::max<std::size_t>(n, e.subject + 1);
		if (e.object != no_peer) n = std::max<std::size_t>(n, e.object + 1);
	}
	for (peer_id o : trace.header.observers) n = std::max<std::size_t>(n, o + 1);
	return n;
}

// Bitfields of every peer, replayed event by event.
class piece_holdings {
public:
	piece_holdings(std::size_t peers, std::size_t pieces)
		: have_(peers, std::vector<bool>(pieces, false))
		, pieces_(pieces)
	{}

	void apply(trace_event const& e)
	{
		if (e.kind == trace_kind::arrive && e.block == initial_seed_code)
			std::fill(have_[e.subject].begin(), have_[e.subject].end(), true);
		else if (e.kind == trace_kind::piece)
			have_[e.subject][static_cast<std::size_t>(e.piece)] = true;
	}

	std::vector<bool> const& of(peer_id p) const { return have_[p]; }
	std::size_t pieces() const { return pieces_; }

private:
	std::vector<std::vector<bool>> have_;
	std::size_t pieces_;
};

struct open_flags {
	std::optional<sim_time> member, local_int, remote_int, local_unchoke, remote_unchoke;
};

void open(std::optional<sim_time>& slot, sim_time t)
{
	if (!slot) slot = t;
}

void close(std::optional<sim_time>& slot, interval_set& into, sim_time t)
{
	if (slot) into.add(*slot, t);
	slot.reset();
}

} // namespace

sim_time trace_end(trace_log const& trace)
{
	return trace.events.empty() ? 0.0 : trace.events.back().time;
}

interval_set peer_timeline::leecher_state(sim_time end) const
{
	interval_set out;
	if (!arrival || initial_seed) return out;
	sim_time stop = end;
	if (seed_at) stop = std::min(stop, *seed_at);
	if (departure) stop = std::min(stop, *departure);
	out.add(*arrival, stop);
	return out;
}

interval_set peer_timeline::seed_state(sim_time end) const
{
	interval_set out;
	if (!seed_at) return out;
	out.add(*seed_at, departure ? *departure : end);
	return out;
}

std::vector<peer_timeline> peer_timelines(trace_log const& trace)
{
	std::vector<peer_timeline> out(peer_count(trace));
	for (std::size_t i = 0; i < out.size(); ++i) out[i].id = peer_id(i);
	for (auto const& e : trace.events) {
		switch (e.kind) {
		case trace_kind::arrive: {
			auto& p = out[e.subject];
			p.arrival = e.time;
			p.behavior_code = e.block;
			if (e.block == initial_seed_code) {
				p.initial_seed = true;
				p.seed_at = e.time;
				p.pieces = trace.header.torrent.num_pieces;
			}
			break;
		}
		case trace_kind::depart: out[e.subject].departure = e.time; break;
		case trace_kind::seed: out[e.subject].seed_at = e.time; break;
		case trace_kind::piece: ++out[e.subject].pieces; break;
		case trace_kind::block:
			out[e.subject].uploaded += e.bytes;
			out[e.object].downloaded += e.bytes;
			break;
		case trace_kind::abort: out[e.subject].discarded += e.bytes; break;
		case trace_kind::cancel: out[e.object].discarded += e.bytes; break;
		default: break;
		}
	}
	return out;
}

std::vector<pair_history> pair_histories(trace_log const& trace, peer_id observer)
{
	std::map<peer_id, std::pair<pair_history, open_flags>> state;
	auto get = [&](peer_id r) -> std::pair<pair_history, open_flags>& {
		auto& s = state[r];
		s.first.remote = r;
		return s;
	};

	for (auto const& e : trace.events) {
		if (!involves(e, observer) || e.object == no_peer) continue;
		peer_id const r = other_end(e, observer);
		bool const outgoing = e.subject == observer;
		sim_time const t = e.time;
		switch (e.kind) {
		case trace_kind::connect: {
			auto& [h, f] = get(r);
			open(f.member, t);
			if (!h.first_joined) h.first_joined = t;
			break;
		}
		case trace_kind::disconnect: {
			auto& [h, f] = get(r);
			close(f.member, h.membership, t);
			close(f.local_int, h.local_interested, t);
			close(f.remote_int, h.remote_interested, t);
			close(f.local_unchoke, h.local_unchoking, t);
			close(f.remote_unchoke, h.remote_unchoking, t);
			break;
		}
		case trace_kind::interested: {
			auto& f = get(r).second;
			open(outgoing ? f.local_int : f.remote_int, t);
			break;
		}
		case trace_kind::not_interested: {
			auto& [h, f] = get(r);
			if (outgoing) close(f.local_int, h.local_interested, t);
			else close(f.remote_int, h.remote_interested, t);
			break;
		}
		case trace_kind::unchoke: {
			auto& f = get(r).second;
			open(outgoing ? f.local_unchoke : f.remote_unchoke, t);
			break;
		}
		case trace_kind::choke: {
			auto& [h, f] = get(r);
			if (outgoing) close(f.local_unchoke, h.local_unchoking, t);
			else close(f.remote_unchoke, h.remote_unchoking, t);
			break;
		}
		default: break;
		}
	}

	sim_time const end = trace_end(trace);
	std::vector<pair_history> out;
	for (auto& [r, s] : state) {
		auto& [h, f] = s;
		close(f.member, h.membership, end);
		close(f.local_int, h.local_interested, end);
		close(f.remote_int, h.remote_interested, end);
		close(f.local_unchoke, h.local_unchoking, end);
		close(f.remote_unchoke, h.remote_unchoking, end);
		out.push_back(std::move(h));
	}
	return out;
}

// --- entropy -------------------------------------------------------------

entropy_result entropy_ratios(trace_log const& trace, peer_id observer)
{
	entropy_result out;
	out.observer = observer;
	sim_time const end = trace_end(trace);
	auto const peers = peer_timelines(trace);
	if (observer >= peers.size()) return out;
	interval_set const local_leecher = peers[observer].leecher_state(end);

	std::vector<double> local, remote;
	for (auto const& h : pair_histories(trace, observer)) {
		auto const& rp = peers[h.remote];
		if (rp.initial_seed) continue;
		interval_set const window = h.membership.intersect(local_leecher).intersect(rp.leecher_state(end));
		sim_time const b = window.length();
		if (b == 0.0) {
			++out.excluded_zero;
			continue;
		}
		if (b < entropy_min_window) {
			++out.excluded_short;
			continue;
		}
		entropy_row row;
		row.remote = h.remote;
		row.window = b;
		row.local_interested = h.local_interested.intersect(window).length();
		row.remote_interested = h.remote_interested.intersect(window).length();
		out.rows.push_back(row);
		local.push_back(row.local_ratio());
		remote.push_back(row.remote_ratio());
	}
	out.local = summarize(local);
	out.remote = summarize(remote);
	return out;
}

// --- copies --------------------------------------------------------------

std::vector<copy_sample> copy_statistics(trace_log const& trace, peer_id observer, sim_time grid)
{
	if (!(grid > 0.0)) throw config_error("grid must be positive");
	std::size_t const n_pieces = trace.header.torrent.num_pieces;
	piece_holdings holdings(peer_count(trace), n_pieces);
	std::vector<std::uint32_t> counts(n_pieces, 0);
	std::set<peer_id> members;
	bool present = false;

	std::vector<copy_sample> out;
	std::uint64_t k = 0;
	auto sample_until = [&](sim_time limit, bool inclusive) {
		for (;; ++k) {
			sim_time const g = double(k) * grid;
			if (inclusive ? g > limit : g >= limit) break;
			if (!present) continue;
			copy_sample s;
			s.time = g;
			s.members = members.size();
			if (n_pieces > 0) {
				auto const [mn, mx] = std::minmax_element(counts.begin(), counts.end());
				s.min = *mn;
				s.max = *mx;
				s.mean = double(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0})) / double(n_pieces);
			}
			// rarest set: pieces the observer lacks at their minimum count
			auto const& mine = holdings.of(observer);
			std::uint32_t low = std::numeric_limits<std::uint32_t>::max();
			for (std::size_t i = 0; i < n_pieces; ++i) {
				if (mine[i]) continue;
				if (counts[i] < low) {
					low = counts[i];
					s.rarest = 0;
				}
				if (counts[i] == low) ++s.rarest;
			}
			s.rarest_min = s.rarest > 0 ? low : 0;
			out.push_back(s);
		}
	};
	auto add_bits = [&](peer_id p, int sign) {
		auto const& bits = holdings.of(p);
		for (std::size_t i = 0; i < n_pieces; ++i)
			if (bits[i]) counts[i] = std::uint32_t(std::int64_t(counts[i]) + sign);
	};

	for (auto const& e : trace.events) {
		sample_until(e.time, false);
		holdings.apply(e);
		if (e.kind == trace_kind::arrive && e.subject == observer) present = true;
		else if (e.kind == trace_kind::depart && e.subject == observer) present = false;
		else if (e.kind == trace_kind::connect && involves(e, observer)) {
			peer_id const r = other_end(e, observer);
			members.insert(r);
			add_bits(r, +1);
		}
		else if (e.kind == trace_kind::disconnect && involves(e, observer)) {
			peer_id const r = other_end(e, observer);
			if (members.erase(r)) add_bits(r, -1);
		}
		else if (e.kind == trace_kind::piece && members.count(e.subject))
			++counts[static_cast<std::size_t>(e.piece)];
	}
	sample_until(trace_end(trace), true);
	return out;
}

// --- state ---------------------------------------------------------------

state_result classify_state(trace_log const& trace, sim_time grid)
{
	if (!(grid > 0.0)) throw config_error("grid must be positive");
	std::size_t const n_pieces = trace.header.torrent.num_pieces;
	std::size_t const n_peers = peer_count(trace);
	std::vector<bool> initial(n_peers, false), present(n_peers, false);
	std::vector<std::vector<piece_index>> held(n_peers);
	std::vector<std::uint32_t> holders(n_pieces, 0);
	std::size_t missing = n_pieces;
	std::size_t seeds_present = 0;

	state_result out;
	if (trace.events.empty()) return out;
	out.start = trace.events.front().time;
	out.end = trace_end(trace);

	auto transient_now = [&] { return seeds_present > 0 && missing > 0; };

	std::optional<sim_time> transient_since;
	std::uint64_t k = 0;
	auto sample_until = [&](sim_time limit, bool inclusive, bool state) {
		for (;; ++k) {
			sim_time const g = double(k) * grid;
			if (inclusive ? g > limit : g >= limit) break;
			if (g >= out.start) out.samples.emplace_back(g, state);
		}
	};

	auto const& ev = trace.events;
	for (std::size_t i = 0; i < ev.size();) {
		sim_time const t = ev[i].time;
		if (!out.transitions.empty()) sample_until(t, false, out.transitions.back().transient);
		for (; i < ev.size() && ev[i].time == t; ++i) {
			auto const& e = ev[i];
			if (e.kind == trace_kind::arrive) {
				present[e.subject] = true;
				if (e.block == initial_seed_code) {
					initial[e.subject] = true;
					++seeds_present;
				}
			}
			else if (e.kind == trace_kind::depart) {
				present[e.subject] = false;
				if (initial[e.subject]) --seeds_present;
				else
					for (piece_index p : held[e.subject])
						if (--holders[p] == 0) ++missing;
			}
			else if (e.kind == trace_kind::piece && !initial[e.subject]) {
				auto const p = static_cast<piece_index>(e.piece);
				held[e.subject].push_back(p);
				if (holders[p]++ == 0) --missing;
			}
		}
		bool const now = transient_now();
		if (out.transitions.empty() || out.transitions.back().transient != now) {
			if (!out.transitions.empty() && now) out.monotone = false;
			out.transitions.push_back({t, now});
			if (now) transient_since = t;
			else if (transient_since) {
				out.transient.add(*transient_since, t);
				transient_since.reset();
			}
		}
	}
	if (transient_since) out.transient.add(*transient_since, out.end);
	sample_until(out.end, true, out.transitions.back().transient);
	out.transient_duration = out.transient.length();
	return out;
}

// --- reciprocation -------------------------------------------------------

reciprocation_result reciprocation_report(trace_log const& trace, peer_id observer)
{
	reciprocation_result out;
	out.observer = observer;
	std::vector<bool> seed(peer_count(trace), false);
	bool leecher = false;
	std::map<peer_id, reciprocation_peer> by_peer;

	for (auto const& e : trace.events) {
		switch (e.kind) {
		case trace_kind::arrive:
			if (e.block == initial_seed_code) seed[e.subject] = true;
			if (e.subject == observer) leecher = !seed[e.subject];
			break;
		case trace_kind::seed:
			seed[e.subject] = true;
			if (e.subject == observer) leecher = false;
			break;
		case trace_kind::depart:
			if (e.subject == observer) leecher = false;
			break;
		case trace_kind::block:
			if (!leecher) break;
			if (e.subject == observer) {
				auto& p = by_peer[e.object];
				p.remote = e.object;
				p.uploaded += e.bytes;
			}
			else if (e.object == observer && !seed[e.subject]) {
				auto& p = by_peer[e.subject];
				p.remote = e.subject;
				p.downloaded += e.bytes;
			}
			break;
		default: break;
		}
	}

	for (auto const& [id, p] : by_peer) {
		out.peers.push_back(p);
		out.total_uploaded += p.uploaded;
		out.total_downloaded += p.downloaded;
	}
	std::stable_sort(out.peers.begin(), out.peers.end(), [](reciprocation_peer const& a, reciprocation_peer const& b) {
		return a.uploaded > b.uploaded;
	});
	out.short_of_peers = out.peers.size() < reciprocation_bucket_size * reciprocation_buckets;

	for (std::size_t b = 0; b < reciprocation_buckets; ++b) {
		std::size_t const first = b * reciprocation_bucket_size;
		if (first >= out.peers.size()) break;
		std::size_t const last = std::min(out.peers.size(), first + reciprocation_bucket_size);
		std::int64_t up = 0, down = 0;
		for (std::size_t i = first; i < last; ++i) {
			up += out.peers[i].uploaded;
			down += out.peers[i].downloaded;
		}
		reciprocation_bucket bucket;
		bucket.size = last - first;
		bucket.upload_fraction = out.total_uploaded > 0 ? double(up) / double(out.total_uploaded) : 0.0;
		bucket.download_fraction = out.total_downloaded > 0 ? double(down) / double(out.total_downloaded) : 0.0;
		out.buckets.push_back(bucket);
	}

	std::vector<double> up, down;
	for (auto const& p : out.peers) {
		up.push_back(double(p.uploaded));
		down.push_back(double(p.downloaded));
	}
	out.rank_correlation = spearman(up, down);
	return out;
}

// --- unchoke / interest --------------------------------------------------

unchoke_result unchoke_interest_correlation(trace_log const& trace, peer_id observer)
{
	unchoke_result out;
	out.observer = observer;
	sim_time const end = trace_end(trace);
	auto const peers = peer_timelines(trace);
	if (observer >= peers.size()) return out;

	std::map<peer_id, std::size_t> leecher_unchokes, seed_unchokes;
	bool seed = false;
	for (auto const& e : trace.events) {
		if (e.subject != observer) continue;
		if (e.kind == trace_kind::arrive) seed = e.block == initial_seed_code;
		else if (e.kind == trace_kind::seed) seed = true;
		else if (e.kind == trace_kind::unchoke) ++(seed ? seed_unchokes : leecher_unchokes)[e.object];
	}

	interval_set const leecher_state = peers[observer].leecher_state(end);
	interval_set const seed_state = peers[observer].seed_state(end);
	std::vector<double> lx, ly, sx, sy;
	for (auto const& h : pair_histories(trace, observer)) {
		auto const lu = leecher_unchokes.find(h.remote);
		bool const member_as_leecher = !h.membership.intersect(leecher_state).empty();
		if (member_as_leecher || lu != leecher_unchokes.end()) {
			unchoke_point pt{h.remote, lu == leecher_unchokes.end() ? 0 : lu->second,
				h.remote_interested.intersect(leecher_state).length()};
			out.leecher.push_back(pt);
			lx.push_back(double(pt.unchokes));
			ly.push_back(pt.interested);
		}
		auto const su = seed_unchokes.find(h.remote);
		if (su != seed_unchokes.end()) {
			unchoke_point pt{h.remote, su->second, h.remote_interested.intersect(seed_state).length()};
			out.seed.push_back(pt);
			sx.push_back(double(pt.unchokes));
			sy.push_back(pt.interested);
		}
	}
	out.leecher_correlation = spearman(lx, ly);
	out.seed_correlation = spearman(sx, sy);
	return out;
}

// --- seed fairness -------------------------------------------------------

fairness_result seed_fairness_report(trace_log const& trace, peer_id observer)
{
	fairness_result out;
	out.observer = observer;
	sim_time const end = trace_end(trace);
	auto const peers = peer_timelines(trace);
	if (observer >= peers.size() || !peers[observer].seed_at) return out;

	auto const& me = peers[observer];
	sim_time const start = *me.seed_at;
	sim_time const stop = me.departure ? *me.departure : end;
	out.seed_start = start;
	out.cycles = static_cast<std::size_t>(std::floor((stop - start) / seed_cycle));
	out.window_end = start + double(out.cycles) * seed_cycle;
	if (out.cycles == 0) return out;

	std::map<peer_id, std::int64_t> bytes;
	for (auto const& e : trace.events) {
		if (e.kind != trace_kind::block || e.subject != observer) continue;
		if (e.time <= start || e.time > out.window_end) continue;
		bytes[e.object] += e.bytes;
		out.total += e.bytes;
	}

	std::vector<double> normalized;
	for (auto const& h : pair_histories(trace, observer)) {
		sim_time const interested = h.remote_interested.clip(start, out.window_end).length();
		auto const it = bytes.find(h.remote);
		std::int64_t const b = it == bytes.end() ? 0 : it->second;
		if (interested == 0.0 && b == 0) continue;
		fairness_peer fp;
		fp.remote = h.remote;
		fp.bytes = b;
		fp.interested = interested;
		fp.normalized = interested > 0.0 ? double(b) / interested : 0.0;
		fp.share = out.total > 0 ? double(b) / double(out.total) : 0.0;
		out.peers.push_back(fp);
		if (interested > 0.0) normalized.push_back(fp.normalized);
	}
	if (!normalized.empty()) {
		double const mean = std::accumulate(normalized.begin(), normalized.end(), 0.0) / double(normalized.size());
		double var = 0.0;
		for (double v : normalized) var += (v - mean) * (v - mean);
		var /= double(normalized.size());
		if (mean > 0.0) out.cv = std::sqrt(var) / mean;
	}
	return out;
}

// --- seed-new rotation ---------------------------------------------------

rotation_result seed_rotation_check(trace_log const& trace, peer_id observer)
{
	rotation_result out;
	out.observer = observer;

	struct remote_view {
		bool member = false;
		bool unchoked = false;
		bool interested = false;
		sim_time joined = 0.0;
		std::optional<sim_time> last_unchoke;
	};
	std::map<peer_id, remote_view> view;
	std::vector<peer_id> expected;
	std::size_t matched = 0;
	bool in_round = false;

	auto finish_round = [&] {
		if (in_round && matched != expected.size()) ++out.mismatches;
		in_round = false;
	};

	for (auto const& e : trace.events) {
		if (!involves(e, observer)) continue;
		bool const outgoing = e.subject == observer;
		peer_id const r = other_end(e, observer);

		if (outgoing && e.kind == trace_kind::seed_kept) {
			if (!in_round || matched >= expected.size() || expected[matched] != e.object) {
				++out.mismatches;
				in_round = false;
			}
			else ++matched;
			continue;
		}
		if (outgoing && e.kind == trace_kind::seed_random) continue;
		finish_round();

		switch (e.kind) {
		case trace_kind::connect: {
			auto& v = view[r];
			v = remote_view{};
			v.member = true;
			v.joined = e.time;
			break;
		}
		case trace_kind::disconnect: view.erase(r); break;
		case trace_kind::interested:
			if (!outgoing) view[r].interested = true;
			break;
		case trace_kind::not_interested:
			if (!outgoing) view[r].interested = false;
			break;
		case trace_kind::unchoke:
			if (outgoing) {
				view[r].unchoked = true;
				view[r].last_unchoke = e.time;
			}
			break;
		case trace_kind::choke:
			if (outgoing) view[r].unchoked = false;
			break;
		case trace_kind::round: {
			if (!outgoing || e.block != static_cast<std::int64_t>(choke_mode::seed_new)) break;
			struct ranked {
				peer_id id;
				std::optional<sim_time> last;
				sim_time joined;
			};
			std::vector<ranked> active;
			bool pool = false;
			for (auto const& [id, v] : view) {
				if (!v.member || !v.interested) continue;
				if (v.unchoked) active.push_back({id, v.last_unchoke, v.joined});
				else pool = true;
			}
			std::sort(active.begin(), active.end(), [](ranked const& a, ranked const& b) {
				sim_time const la = a.last ? *a.last : -INFINITY;
				sim_time const lb = b.last ? *b.last : -INFINITY;
				if (la != lb) return la > lb;
				if (a.joined != b.joined) return a.joined < b.joined;
				return a.id < b.id;
			});
			bool const draw_phase = e.piece % optimistic_every_rounds < 2;
			std::size_t keep = draw_phase && pool ? regular_unchoke_slots : max_active_peers;
			keep = std::min(keep, active.size());
			expected.clear();
			for (std::size_t i = 0; i < keep; ++i) expected.push_back(active[i].id);
			matched = 0;
			in_round = true;
			++out.rounds;
			out.displacements += active.size() - keep;
			break;
		}
		default: break;
		}
	}
	finish_round();
	return out;
}

} // namespace swarm
