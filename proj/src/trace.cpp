#include "swarmsim/trace.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace swarm {

namespace {

constexpr std::array<std::string_view, 20> kind_names = {
	"arrive", "depart", "connect", "disconnect", "interested", "not_interested", "unchoke", "choke",
	"round", "ru", "ou", "sku", "sru", "block", "abort", "cancel", "piece", "end_game", "seed", "end",
};

std::vector<std::string_view> split_ws(std::string_view line)
{
	std::vector<std::string_view> out;
	std::size_t i = 0;
	while (i < line.size()) {
		while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
		std::size_t j = i;
		while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
		if (j > i) out.push_back(line.substr(i, j - i));
		i = j;
	}
	return out;
}

template <class T>
bool parse_number(std::string_view s, T& out)
{
	auto const* end = s.data() + s.size();
	auto [ptr, ec] = std::from_chars(s.data(), end, out);
	return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail(std::size_t line, std::string const& what)
{
	throw config_error("trace line " + std::to_string(line) + ": " + what);
}

} // namespace

std::string_view to_string(trace_kind k)
{
	return kind_names[static_cast<std::size_t>(k)];
}

trace_kind parse_trace_kind(std::string_view s)
{
	for (std::size_t i = 0; i < kind_names.size(); ++i)
		if (kind_names[i] == s) return static_cast<trace_kind>(i);
	throw config_error("unknown trace event kind '" + std::string(s) + "'");
}

std::string format_double(double v)
{
	std::array<char, 64> buf;
	auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
	if (ec != std::errc()) throw invariant_violation("format_double failed");
	return std::string(buf.data(), ptr);
}

void write_trace(std::ostream& out, trace_log const& log)
{
	auto const& h = log.header;
	out << "# swarmsim-trace v" << h.version << '\n';
	out << "# scenario_hash " << hex64(h.scenario_hash) << '\n';
	out << "# rng_seed " << h.rng_seed << '\n';
	out << "# num_pieces " << h.torrent.num_pieces << '\n';
	out << "# piece_size " << h.torrent.piece_size << '\n';
	out << "# block_size " << h.torrent.block_size << '\n';
	out << "# observers";
	for (std::size_t i = 0; i < h.observers.size(); ++i) out << (i ? "," : " ") << h.observers[i];
	out << '\n';
	out << "# grid " << format_double(h.grid) << '\n';
	out << "# columns time kind subject object piece block bytes\n";

	std::string line;
	for (auto const& e : log.events) {
		line.clear();
		line += format_double(e.time);
		line += ' ';
		line += to_string(e.kind);
		line += ' ';
		line += e.subject == no_peer ? std::string("-") : std::to_string(e.subject);
		line += ' ';
		line += e.object == no_peer ? std::string("-") : std::to_string(e.object);
		line += ' ';
		line += e.piece < 0 ? std::string("-") : std::to_string(e.piece);
		line += ' ';
		line += e.block < 0 ? std::string("-") : std::to_string(e.block);
		line += ' ';
		line += std::to_string(e.bytes);
		line += '\n';
		out << line;
	}
}

std::string serialize_trace(trace_log const& log)
{
	std::ostringstream ss;
	write_trace(ss, log);
	return ss.str();
}

trace_log read_trace(std::istream& in)
{
	trace_log log;
	std::string raw;
	std::size_t lineno = 0;
	bool saw_magic = false;
	bool saw_columns = false;

	while (std::getline(in, raw)) {
		++lineno;
		std::string_view line = raw;
		if (line.empty()) fail(lineno, "empty line");

		if (line.front() == '#') {
			if (saw_columns) fail(lineno, "header line after records started");
			auto const f = split_ws(line.substr(1));
			if (f.empty()) fail(lineno, "empty header line");
			auto& h = log.header;
			if (f[0] == "swarmsim-trace") {
				if (f.size() != 2 || f[1].size() < 2 || f[1][0] != 'v' || !parse_number(f[1].substr(1), h.version))
					fail(lineno, "bad format marker");
				if (h.version != trace_format_version)
					fail(lineno, "unsupported trace version " + std::to_string(h.version));
				saw_magic = true;
				continue;
			}
			if (!saw_magic) fail(lineno, "missing swarmsim-trace marker");
			bool ok = true;
			if (f[0] == "scenario_hash") {
				ok = f.size() == 2;
				if (ok) {
					auto const* end = f[1].data() + f[1].size();
					auto [ptr, ec] = std::from_chars(f[1].data(), end, h.scenario_hash, 16);
					ok = ec == std::errc() && ptr == end;
				}
			}
			else if (f[0] == "rng_seed") ok = f.size() == 2 && parse_number(f[1], h.rng_seed);
			else if (f[0] == "num_pieces") ok = f.size() == 2 && parse_number(f[1], h.torrent.num_pieces);
			else if (f[0] == "piece_size") ok = f.size() == 2 && parse_number(f[1], h.torrent.piece_size);
			else if (f[0] == "block_size") ok = f.size() == 2 && parse_number(f[1], h.torrent.block_size);
			else if (f[0] == "grid") ok = f.size() == 2 && parse_number(f[1], h.grid);
			else if (f[0] == "observers") {
				h.observers.clear();
				if (f.size() == 2) {
					std::string_view rest = f[1];
					while (ok && !rest.empty()) {
						auto comma = rest.find(',');
						peer_id id = 0;
						ok = parse_number(rest.substr(0, comma), id);
						h.observers.push_back(id);
						rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
					}
				}
				else ok = f.size() == 1;
			}
			else if (f[0] == "columns") {
				saw_columns = true;
				try {
					h.torrent.validate();
				}
				catch (config_error const& e) {
					fail(lineno, e.what());
				}
			}
			else ok = false;
			if (!ok) fail(lineno, "malformed header '" + std::string(f[0]) + "'");
			continue;
		}

		if (!saw_columns) fail(lineno, "record before header");
		auto const f = split_ws(line);
		if (f.size() != 7) fail(lineno, "expected 7 fields, got " + std::to_string(f.size()));

		trace_event e;
		if (!parse_number(f[0], e.time) || !std::isfinite(e.time)) fail(lineno, "bad time");
		try {
			e.kind = parse_trace_kind(f[1]);
		}
		catch (config_error const& err) {
			fail(lineno, err.what());
		}
		auto peer_field = [&](std::string_view s, peer_id& out) {
			if (s == "-") return;
			if (!parse_number(s, out) || out == no_peer) fail(lineno, "bad peer id '" + std::string(s) + "'");
		};
		auto index_field = [&](std::string_view s, std::int64_t& out) {
			if (s == "-") return;
			if (!parse_number(s, out) || out < 0) fail(lineno, "bad index '" + std::string(s) + "'");
		};
		peer_field(f[2], e.subject);
		peer_field(f[3], e.object);
		index_field(f[4], e.piece);
		index_field(f[5], e.block);
		if (!parse_number(f[6], e.bytes)) fail(lineno, "bad byte count");

		if (!log.events.empty() && e.time < log.events.back().time) fail(lineno, "time goes backwards");
		if (!log.events.empty() && log.events.back().kind == trace_kind::end)
			fail(lineno, "record after end");
		log.events.push_back(e);
	}

	if (!saw_columns) fail(lineno + 1, "truncated header");
	if (log.events.empty() || log.events.back().kind != trace_kind::end)
		fail(lineno + 1, "truncated trace: missing end record");
	return log;
}

trace_log read_trace_file(std::string const& path)
{
	std::ifstream in(path);
	if (!in) throw config_error("cannot open trace file " + path);
	return read_trace(in);
}

void write_trace_file(std::string const& path, trace_log const& log)
{
	std::ofstream out(path);
	if (!out) throw config_error("cannot write trace file " + path);
	write_trace(out, log);
	if (!out) throw config_error("error writing trace file " + path);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h)
{
	for (unsigned char c : data) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	return h;
}

std::string hex64(std::uint64_t v)
{
	std::array<char, 17> buf{};
	auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + 16, v, 16);
	std::string s(buf.data(), ptr);
	return std::string(16 - s.size(), '0') + s;
}

std::uint64_t trace_digest(trace_log const& log)
{
	return fnv1a64(serialize_trace(log));
}

} // namespace swarm
