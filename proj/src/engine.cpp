#include "swarmsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace swarm {

namespace {

constexpr double rate_slack = 1e-9;

std::string event_name(int t)
{
	static char const* names[] = {"arrival", "departure", "choke-round", "transfer-complete", "announce"};
	return names[t];
}

} // namespace

std::vector<rate_bps> allocate_rates(std::span<transfer_endpoints const> transfers,
	std::span<rate_bps const> upload_capacity, std::span<rate_bps const> download_capacity)
{
	std::size_t const n = upload_capacity.size();
	std::vector<std::size_t> out_count(n, 0);
	for (auto const& t : transfers) ++out_count[t.from];

	std::vector<rate_bps> rate(transfers.size());
	for (std::size_t i = 0; i < transfers.size(); ++i)
		rate[i] = upload_capacity[transfers[i].from] / double(out_count[transfers[i].from]);

	std::vector<rate_bps> inbound(n, 0.0);
	for (std::size_t i = 0; i < transfers.size(); ++i) inbound[transfers[i].to] += rate[i];

	std::vector<bool> capped(n, false);
	bool any_capped = false;
	for (std::size_t p = 0; p < n; ++p) {
		if (inbound[p] > download_capacity[p]) {
			capped[p] = true;
			any_capped = true;
		}
	}
	if (!any_capped) return rate;

	for (std::size_t i = 0; i < transfers.size(); ++i) {
		peer_id const to = transfers[i].to;
		if (capped[to]) rate[i] *= download_capacity[to] / inbound[to];
	}

	// one redistribution pass, senders in id order
	std::vector<rate_bps> used(n, 0.0);
	std::vector<bool> feeds_capped(n, false);
	std::fill(inbound.begin(), inbound.end(), 0.0);
	for (std::size_t i = 0; i < transfers.size(); ++i) {
		used[transfers[i].from] += rate[i];
		inbound[transfers[i].to] += rate[i];
		if (capped[transfers[i].to]) feeds_capped[transfers[i].from] = true;
	}
	std::vector<std::vector<std::size_t>> by_sender(n);
	for (std::size_t i = 0; i < transfers.size(); ++i) by_sender[transfers[i].from].push_back(i);

	for (std::size_t s = 0; s < n; ++s) {
		if (!feeds_capped[s]) continue;
		double const freed = upload_capacity[s] - used[s];
		if (!(freed > 0.0)) continue;
		std::vector<std::size_t> open;
		for (std::size_t i : by_sender[s])
			if (!capped[transfers[i].to]) open.push_back(i);
		if (open.empty()) continue;
		double const share = freed / double(open.size());
		for (std::size_t i : open) {
			peer_id const to = transfers[i].to;
			double const headroom = std::max(0.0, download_capacity[to] - inbound[to]);
			double const extra = std::min(share, headroom);
			rate[i] += extra;
			inbound[to] += extra;
		}
	}
	return rate;
}

simulator::simulator(torrent_config torrent, std::vector<peer_profile> peers, peer_set_policy policy,
	engine_options options, std::uint64_t rng_seed)
	: torrent_(torrent)
	, policy_(policy)
	, options_(options)
	, rng_(rng_seed)
{
	torrent_.validate();
	policy_.validate();
	if (!(options_.duration > 0.0)) throw config_error("duration must be positive");
	if (options_.pipeline_depth == 0) throw config_error("pipeline depth must be at least 1");
	if (!(options_.round_period > 0.0)) throw config_error("round period must be positive");
	if (options_.seed_choke == choke_mode::leecher)
		throw config_error("seed choke algorithm must be seed-new or seed-old");
	tracker_.announce_interval = options_.announce_interval;

	peers_.resize(peers.size());
	for (std::size_t i = 0; i < peers.size(); ++i) {
		auto const& prof = peers[i];
		if (prof.id != i) throw config_error("peer ids must be 0..n-1 in order");
		prof.validate();
		peer_state& ps = peers_[i];
		ps.profile = prof;
		bool const seed = prof.kind == behavior::initial_seed;
		ps.have = bitfield(torrent_.num_pieces, seed);
		ps.mode = seed ? peer_mode::seed : peer_mode::leecher;
		ps.availability = availability_counter(torrent_.num_pieces);
		ps.picker = piece_picker(torrent_, ps.have);
		ps.choker.mode = seed ? options_.seed_choke : choke_mode::leecher;
		ps.choker.round_period = options_.round_period;
		if (prof.arrival_time <= options_.duration) {
			schedule(prof.arrival_time, event_type::arrival, prof.id);
			++pending_arrivals_;
		}
	}
}

void simulator::schedule(sim_time at, event_type type, peer_id peer, std::uint64_t ref, std::uint64_t version)
{
	queue_.push(queued_event{at, next_seq_++, type, peer, ref, version});
}

void simulator::emit(trace_kind kind, peer_id subject, peer_id object, std::int64_t piece, std::int64_t block,
	std::int64_t bytes)
{
	events_.push_back(trace_event{now_, kind, subject, object, piece, block, bytes});
}

void simulator::run()
{
	while (!finished_ && !queue_.empty()) {
		queued_event const ev = queue_.top();
		if (ev.time > options_.duration) break;
		queue_.pop();
		now_ = ev.time;
		try {
			dispatch(ev);
			if (rates_dirty_) recompute_rates();
			if (options_.checks == invariant_level::full) check_full_invariants();
		}
		catch (invariant_violation const& e) {
			std::ostringstream ss;
			ss << "at t=" << format_double(now_) << " during " << event_name(int(ev.type)) << " of peer "
			   << ev.peer << ": " << e.what();
			throw invariant_violation(ss.str());
		}
		++stats_.events;
		if (hook_) hook_(*this);
		if (options_.stop_when_complete && pending_arrivals_ == 0 && leechers_present_ == 0) finished_ = true;
	}
	if (!finished_) now_ = options_.duration;
	finished_ = true;
	emit(trace_kind::end, no_peer);
}

void simulator::dispatch(queued_event const& ev)
{
	switch (ev.type) {
	case event_type::arrival: on_arrival(ev.peer); break;
	case event_type::departure: on_departure(ev.peer); break;
	case event_type::choke_round: on_choke_round(ev.peer); break;
	case event_type::transfer_complete: on_transfer_complete(ev.ref, ev.version); break;
	case event_type::announce: on_announce(ev.peer); break;
	}
}

// --- peer set ------------------------------------------------------------

bool simulator::can_connect(peer_id from, peer_id to) const
{
	if (from == to) return false;
	peer_state const& a = peers_[from];
	peer_state const& b = peers_[to];
	if (!a.present || !b.present) return false;
	if (a.connections.count(to)) return false;
	if (!accepts_inbound({b.connections.size(), b.initiated}, policy_)) return false;
	if (a.mode == peer_mode::seed && b.mode == peer_mode::seed) return false;
	return true;
}

void simulator::connect(peer_id initiator, peer_id acceptor)
{
	peer_state& a = peers_[initiator];
	peer_state& b = peers_[acceptor];

	auto& ca = a.connections.emplace(acceptor, connection_state(now_, options_.estimator_window)).first->second;
	auto& cb = b.connections.emplace(initiator, connection_state(now_, options_.estimator_window)).first->second;
	ca.initiated_by_us = true;
	++a.initiated;
	ca.wanted = count_wanted(a.have, b.have);
	cb.wanted = count_wanted(b.have, a.have);
	a.availability.peer_joined(b.have);
	b.availability.peer_joined(a.have);

	stats_.max_peer_set = std::max({stats_.max_peer_set, a.connections.size(), b.connections.size()});
	stats_.max_initiated = std::max(stats_.max_initiated, a.initiated);

	emit(trace_kind::connect, initiator, acceptor);
	update_interest(initiator, acceptor);
	update_interest(acceptor, initiator);
}

void simulator::disconnect(peer_id closer, peer_id other)
{
	peer_state& a = peers_[closer];
	peer_state& b = peers_[other];
	if (!a.connections.count(other)) return;

	drop_requests(closer, other, trace_kind::abort);
	drop_requests(other, closer, trace_kind::abort);
	a.uploads.erase(other);
	b.uploads.erase(closer);

	a.availability.peer_left(b.have);
	b.availability.peer_left(a.have);
	if (a.connections.at(other).initiated_by_us) --a.initiated;
	if (b.connections.at(closer).initiated_by_us) --b.initiated;
	a.connections.erase(other);
	b.connections.erase(closer);
	emit(trace_kind::disconnect, closer, other);
}

void simulator::maintain(peer_id p)
{
	peer_state& ps = peers_[p];
	if (!ps.present) return;
	std::set<peer_id> connected;
	for (auto const& [id, c] : ps.connections) connected.insert(id);
	maintain_peer_set(p, {ps.connections.size(), ps.initiated}, policy_, tracker_, rng_, connected,
		[&](peer_id to) {
			if (!can_connect(p, to)) return false;
			connect(p, to);
			return true;
		});
}

// --- interest, choke -----------------------------------------------------

void simulator::update_interest(peer_id local, peer_id remote)
{
	peer_state& l = peers_[local];
	connection_state& c = l.connections.at(remote);
	bool const want = l.mode == peer_mode::leecher && c.wanted > 0;
	if (want != c.am_interested) {
		c.am_interested = want;
		peers_[remote].connections.at(local).peer_interested = want;
		emit(want ? trace_kind::interested : trace_kind::not_interested, local, remote);
	}
	if (want && !c.peer_choking) top_up(local, remote);
}

void simulator::unchoke(peer_id uploader, peer_id downloader)
{
	connection_state& up = peers_[uploader].connections.at(downloader);
	connection_state& down = peers_[downloader].connections.at(uploader);
	up.am_choking = false;
	down.peer_choking = false;
	up.last_unchoke_time = now_;
	emit(trace_kind::unchoke, uploader, downloader);
	if (down.am_interested) top_up(downloader, uploader);
}

void simulator::choke(peer_id uploader, peer_id downloader)
{
	connection_state& up = peers_[uploader].connections.at(downloader);
	connection_state& down = peers_[downloader].connections.at(uploader);
	up.am_choking = true;
	down.peer_choking = true;
	emit(trace_kind::choke, uploader, downloader);
	drop_requests(downloader, uploader, trace_kind::abort);
	top_up_all(downloader);
}

double simulator::abort_transfer(std::uint64_t id)
{
	auto it = transfers_.find(id);
	if (it == transfers_.end()) throw invariant_violation("abort of unknown transfer");
	transfer& t = it->second;
	double const remaining = std::max(0.0, t.bytes_remaining - t.current_rate * (now_ - t.last_update));
	double const discarded = double(torrent_.block_size) - remaining;
	peers_[t.from].bytes_discarded += std::llround(discarded);
	transfers_.erase(it);
	rates_dirty_ = true;
	return discarded;
}

void simulator::drop_requests(peer_id downloader, peer_id uploader, trace_kind why)
{
	peer_state& u = peers_[uploader];
	auto it = u.uploads.find(downloader);
	if (it == u.uploads.end()) return;
	upload_queue& q = it->second;
	peer_state& d = peers_[downloader];
	if (q.active) {
		double const discarded = abort_transfer(*q.active);
		block_ref const b = q.requests.front();
		emit(why, uploader, downloader, b.piece, b.block, std::llround(discarded));
		q.active.reset();
	}
	for (block_ref const& b : q.requests) d.picker.on_request_dropped(b, uploader);
	q.requests.clear();
}

void simulator::top_up(peer_id downloader, peer_id uploader)
{
	peer_state& d = peers_[downloader];
	peer_state& u = peers_[uploader];
	if (!d.present || !u.present || d.mode == peer_mode::seed) return;
	auto cit = d.connections.find(uploader);
	if (cit == d.connections.end()) return;
	connection_state const& c = cit->second;
	if (c.peer_choking || !c.am_interested) return;

	upload_queue& q = u.uploads[downloader];
	while (d.picker.end_game() || q.requests.size() < options_.pipeline_depth) {
		auto const b = d.picker.pick(d.have, d.availability, uploader, u.have, rng_);
		if (!b) break;
		q.requests.push_back(*b);
	}
	if (!q.active && !q.requests.empty()) start_next_transfer(uploader, downloader);

	if (d.picker.check_end_game()) {
		emit(trace_kind::end_game, downloader);
		top_up_all(downloader);
	}
}

void simulator::top_up_all(peer_id downloader)
{
	peer_state& d = peers_[downloader];
	if (!d.present || d.mode == peer_mode::seed) return;
	std::vector<peer_id> ids;
	for (auto const& [id, c] : d.connections)
		if (!c.peer_choking && c.am_interested) ids.push_back(id);
	for (peer_id id : ids) top_up(downloader, id);
}

void simulator::start_next_transfer(peer_id uploader, peer_id downloader)
{
	upload_queue& q = peers_[uploader].uploads[downloader];
	if (q.active || q.requests.empty()) return;
	transfer t;
	t.id = next_transfer_id_++;
	t.from = uploader;
	t.to = downloader;
	t.block = q.requests.front();
	t.bytes_remaining = double(torrent_.block_size);
	t.current_rate = 0.0;
	t.last_update = now_;
	q.active = t.id;
	transfers_.emplace(t.id, t);
	rates_dirty_ = true;
}

// --- transfers -----------------------------------------------------------

void simulator::on_transfer_complete(std::uint64_t id, std::uint64_t version)
{
	auto it = transfers_.find(id);
	if (it == transfers_.end() || it->second.version != version) return; // superseded
	transfer const t = it->second;
	transfers_.erase(it);
	rates_dirty_ = true;

	peer_state& u = peers_[t.from];
	peer_state& d = peers_[t.to];
	upload_queue& q = u.uploads.at(t.to);
	if (!q.active || *q.active != id || q.requests.front() != t.block)
		throw invariant_violation("completed transfer is not at the head of its queue");
	q.requests.pop_front();
	q.active.reset();

	std::int64_t const bytes = torrent_.block_size;
	u.bytes_uploaded += bytes;
	d.bytes_downloaded += bytes;
	d.connections.at(t.from).download.update(bytes, now_);
	u.connections.at(t.to).upload.update(bytes, now_);
	emit(trace_kind::block, t.from, t.to, t.block.piece, t.block.block, bytes);

	auto const res = d.picker.on_block_received(t.block, t.from);
	for (peer_id other : res.cancel) {
		upload_queue& oq = peers_[other].uploads.at(t.to);
		auto qit = std::find(oq.requests.begin(), oq.requests.end(), t.block);
		if (qit == oq.requests.end()) throw invariant_violation("end game cancel for a request not queued");
		double discarded = 0.0;
		if (qit == oq.requests.begin() && oq.active) {
			discarded = abort_transfer(*oq.active);
			oq.active.reset();
		}
		oq.requests.erase(qit);
		emit(trace_kind::cancel, t.to, other, t.block.piece, t.block.block, std::llround(discarded));
		start_next_transfer(other, t.to);
	}

	start_next_transfer(t.from, t.to);
	if (res.piece_complete) piece_completed(t.to, t.block.piece);

	top_up(t.to, t.from);
	for (peer_id other : res.cancel) top_up(t.to, other);
}

void simulator::piece_completed(peer_id p, piece_index piece)
{
	peer_state& ps = peers_[p];
	if (!ps.have.set(piece)) throw invariant_violation("piece " + std::to_string(piece) + " completed twice");
	emit(trace_kind::piece, p, no_peer, piece);

	std::vector<peer_id> remotes;
	for (auto const& [id, c] : ps.connections) remotes.push_back(id);
	for (peer_id r : remotes) {
		peer_state& rs = peers_[r];
		rs.availability.have(piece);
		connection_state& theirs = rs.connections.at(p);
		connection_state& mine = ps.connections.at(r);
		if (!rs.have.has(piece)) ++theirs.wanted;
		else --mine.wanted;
		update_interest(p, r);
		update_interest(r, p);
	}

	if (ps.have.complete()) become_seed(p);
}

void simulator::become_seed(peer_id p)
{
	peer_state& ps = peers_[p];
	ps.mode = peer_mode::seed;
	ps.completed_at = now_;
	--leechers_present_;
	if (options_.checks != invariant_level::off && ps.bytes_downloaded != torrent_.content_size())
		throw invariant_violation("peer " + std::to_string(p) + " became a seed after "
			+ std::to_string(ps.bytes_downloaded) + " bytes");
	emit(trace_kind::seed, p);

	ps.choker.mode = options_.seed_choke;
	ps.choker.current_optimistic.reset();
	for (auto& [id, c] : ps.connections) update_interest(p, id);

	std::vector<peer_id> seeds;
	for (auto const& [id, c] : ps.connections)
		if (peers_[id].mode == peer_mode::seed) seeds.push_back(id);
	for (peer_id s : seeds) disconnect(p, s);
	for (peer_id s : seeds) maintain(s);
	if (!seeds.empty()) maintain(p);

	if (ps.profile.departure.kind == departure_kind::leave_on_completion)
		schedule(now_, event_type::departure, p);
}

// --- lifecycle -----------------------------------------------------------

void simulator::on_arrival(peer_id p)
{
	peer_state& ps = peers_[p];
	--pending_arrivals_;
	ps.present = true;
	if (ps.mode == peer_mode::leecher) ++leechers_present_;
	emit(trace_kind::arrive, p, no_peer, -1, static_cast<std::int64_t>(ps.profile.kind),
		std::llround(ps.profile.upload_capacity));

	peer_set_status status{ps.connections.size(), ps.initiated};
	auto const list = announce(tracker_, p, policy_, rng_);
	tracker_.add(p);
	initiate_connections(list, status, policy_, [&](peer_id to) {
		if (!can_connect(p, to)) return false;
		connect(p, to);
		return true;
	});

	std::uniform_real_distribution<double> offset(0.0, options_.round_period);
	schedule(now_ + offset(rng_), event_type::choke_round, p);
	schedule(now_ + tracker_.announce_interval, event_type::announce, p);
	if (ps.profile.departure.kind == departure_kind::leave_at_time)
		schedule(ps.profile.departure.at, event_type::departure, p);
}

void simulator::on_departure(peer_id p)
{
	peer_state& ps = peers_[p];
	if (!ps.present) return;
	emit(trace_kind::depart, p);
	std::vector<peer_id> remotes;
	for (auto const& [id, c] : ps.connections) remotes.push_back(id);
	for (peer_id r : remotes) disconnect(p, r);
	tracker_.remove(p);
	ps.present = false;
	ps.departed = true;
	ps.departed_at = now_;
	if (ps.mode == peer_mode::leecher) --leechers_present_;
	for (peer_id r : remotes) {
		maintain(r);
		top_up_all(r);
	}
}

void simulator::on_announce(peer_id p)
{
	if (!peers_[p].present) return;
	maintain(p);
	schedule(now_ + tracker_.announce_interval, event_type::announce, p);
}

void simulator::on_choke_round(peer_id p)
{
	peer_state& ps = peers_[p];
	if (!ps.present) return;
	schedule(now_ + options_.round_period, event_type::choke_round, p);
	if (ps.profile.kind == behavior::free_rider) return;

	std::vector<choke_candidate> cands;
	cands.reserve(ps.connections.size());
	for (auto& [id, c] : ps.connections) {
		choke_candidate cc;
		cc.id = id;
		cc.interested = c.peer_interested;
		cc.unchoked = !c.am_choking;
		cc.download_rate = c.download.estimate(now_);
		cc.upload_rate = c.upload.estimate(now_);
		cc.last_unchoke = c.last_unchoke_time;
		cc.joined_at = c.joined_peer_set_at;
		cands.push_back(cc);
	}
	choke_decision const d = run_choke_round(ps.choker, cands, rng_);
	++stats_.choke_rounds;

	emit(trace_kind::round, p, no_peer, d.round_index, static_cast<std::int64_t>(d.mode));
	bool const seed_new = d.mode == choke_mode::seed_new;
	for (peer_id r : d.regular)
		emit(seed_new ? trace_kind::seed_kept : trace_kind::regular_unchoke, p, r, d.round_index);
	for (peer_id r : d.random)
		emit(seed_new ? trace_kind::seed_random : trace_kind::optimistic_unchoke, p, r, d.round_index);

	for (peer_id r : d.to_choke) choke(p, r);
	for (peer_id r : d.to_unchoke) unchoke(p, r);

	stats_.max_active_slots = std::max(stats_.max_active_slots, d.unchoked.size());
	if (options_.checks != invariant_level::off) check_slot_bound(p);
}

void simulator::check_slot_bound(peer_id p) const
{
	peer_state const& ps = peers_[p];
	std::size_t active = 0;
	for (auto const& [id, c] : ps.connections)
		if (!c.am_choking && c.peer_interested) ++active;
	if (active > max_active_peers)
		throw invariant_violation("peer " + std::to_string(p) + " has " + std::to_string(active)
			+ " unchoked and interested peers");
}

// --- rates ---------------------------------------------------------------

void simulator::recompute_rates()
{
	rates_dirty_ = false;
	++stats_.rate_recomputations;

	std::vector<transfer_endpoints> ends;
	ends.reserve(transfers_.size());
	for (auto const& [id, t] : transfers_) ends.push_back({t.from, t.to});

	std::vector<rate_bps> up(peers_.size()), down(peers_.size());
	for (std::size_t i = 0; i < peers_.size(); ++i) {
		up[i] = peers_[i].profile.effective_upload();
		down[i] = peers_[i].profile.download_capacity;
	}
	std::vector<rate_bps> const rates = allocate_rates(ends, up, down);

	if (options_.checks != invariant_level::off) {
		std::vector<double> out_sum(peers_.size(), 0.0), in_sum(peers_.size(), 0.0);
		for (std::size_t i = 0; i < ends.size(); ++i) {
			out_sum[ends[i].from] += rates[i];
			in_sum[ends[i].to] += rates[i];
		}
		for (std::size_t p = 0; p < peers_.size(); ++p) {
			if (out_sum[p] > up[p] * (1.0 + rate_slack) + rate_slack)
				throw invariant_violation("upload capacity exceeded by peer " + std::to_string(p));
			if (in_sum[p] > down[p] * (1.0 + rate_slack) + rate_slack)
				throw invariant_violation("download capacity exceeded by peer " + std::to_string(p));
			if (up[p] > 0.0) stats_.max_upload_utilisation = std::max(stats_.max_upload_utilisation, out_sum[p] / up[p]);
			if (std::isfinite(down[p]))
				stats_.max_download_utilisation = std::max(stats_.max_download_utilisation, in_sum[p] / down[p]);
		}
	}

	std::size_t i = 0;
	for (auto& [id, t] : transfers_) {
		rate_bps const r = rates[i++];
		if (r == t.current_rate && t.version != 0) continue;
		t.bytes_remaining = std::max(0.0, t.bytes_remaining - t.current_rate * (now_ - t.last_update));
		t.last_update = now_;
		t.current_rate = r;
		++t.version;
		if (r > 0.0) schedule(now_ + t.bytes_remaining / r, event_type::transfer_complete, t.from, t.id, t.version);
	}
}

// --- checking ------------------------------------------------------------

void simulator::check_full_invariants() const
{
	for (std::size_t p = 0; p < peers_.size(); ++p) {
		peer_state const& ps = peers_[p];
		if (!ps.present) {
			if (!ps.connections.empty()) throw invariant_violation("absent peer keeps connections");
			continue;
		}
		if (ps.connections.size() > policy_.max_peer_set)
			throw invariant_violation("peer set above cap for peer " + std::to_string(p));
		if (ps.initiated > policy_.max_initiated)
			throw invariant_violation("initiated connections above cap for peer " + std::to_string(p));
		if ((ps.mode == peer_mode::seed) != ps.have.complete())
			throw invariant_violation("mode does not match bitfield for peer " + std::to_string(p));

		availability_counter recount(torrent_.num_pieces);
		std::size_t initiated = 0;
		for (auto const& [id, c] : ps.connections) {
			peer_state const& rs = peers_[id];
			auto back = rs.connections.find(peer_id(p));
			if (back == rs.connections.end()) throw invariant_violation("asymmetric peer sets");
			recount.peer_joined(rs.have);
			if (c.initiated_by_us) ++initiated;
			if (c.initiated_by_us == back->second.initiated_by_us)
				throw invariant_violation("connection initiator recorded on both or neither side");
			bool const expect = ps.mode == peer_mode::leecher && compute_interest(ps.have, rs.have);
			if (c.am_interested != expect)
				throw invariant_violation("stale interest flag " + std::to_string(p) + "->" + std::to_string(id));
			if (c.wanted != count_wanted(ps.have, rs.have))
				throw invariant_violation("stale wanted count " + std::to_string(p) + "->" + std::to_string(id));
			if (back->second.peer_interested != c.am_interested || back->second.peer_choking != c.am_choking)
				throw invariant_violation("mirrored flags disagree");
		}
		if (initiated != ps.initiated) throw invariant_violation("initiated counter drift");
		if (recount != ps.availability)
			throw invariant_violation("availability counter drift for peer " + std::to_string(p));
		for (auto const& [down, q] : ps.uploads) {
			if (q.requests.size() > 0 && ps.connections.at(down).am_choking)
				throw invariant_violation("requests queued at a choking uploader");
			if (q.active && q.requests.empty()) throw invariant_violation("active transfer without request");
		}
		if (!ps.picker.end_game())
			for (auto const& pp : ps.picker.partials())
				for (auto const& pend : pp.pending)
					if (pend.size() > 1) throw invariant_violation("duplicate request outside end game");
	}
}

} // namespace swarm
