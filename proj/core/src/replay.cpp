#include "evoman/replay.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "evoman/errors.hpp"

namespace evoman::replay {
namespace {

std::uint64_t parse_u64(const std::string& text, int base, const std::string& what) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw ParseError("replay: bad value for " + what + ": '" + text + "'");
    return v;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string next(const char* expecting) {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(std::string("replay truncated: expected ") + expecting);
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    /// Reads "key value" and returns value.
    std::string field(const char* key) {
        const std::string line = next(key);
        std::istringstream is(line);
        std::string k;
        std::string v;
        if (!(is >> k >> v) || k != key) {
            throw ParseError("replay line " + std::to_string(line_no_) + ": expected '" + key + " <value>'");
        }
        return v;
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    int line_no_ = 0;
};

}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write(std::ostream& out, const ReplayLog& log) {
    out << "# evoman-replay config_hash=" << hex64(log.config_hash) << " master_seed=" << log.master_seed << '\n';
    out << "format_version " << replay_format_version << '\n';
    out << "stage " << log.stage_id << '\n';
    out << "archetype " << log.archetype_id << '\n';
    out << "archetype_table " << hex64(log.archetype_table_hash) << '\n';
    out << "seed " << log.seed << '\n';
    out << "tick_limit " << log.tick_limit << '\n';
    out << "ticks " << log.ticks.size() << '\n';
    for (const auto& [p, e] : log.ticks) out << p.encode() << ' ' << e.encode() << '\n';
    out << "end\n";
}

ReplayLog read(std::istream& in) {
    LineReader r(in);
    ReplayLog log;

    const std::string header = r.next("header");
    const std::string prefix = "# evoman-replay";
    if (header.rfind(prefix, 0) != 0) throw ParseError("not an evoman replay file");
    std::istringstream hs(header.substr(prefix.size()));
    for (std::string kv; hs >> kv;) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "config_hash") log.config_hash = parse_u64(value, 16, key);
        if (key == "master_seed") log.master_seed = parse_u64(value, 10, key);
    }

    const auto version = parse_u64(r.field("format_version"), 10, "format_version");
    if (version != replay_format_version) {
        throw ParseError("unsupported replay format_version " + std::to_string(version) + " (this build reads version " +
                         std::to_string(replay_format_version) + ")");
    }
    log.stage_id = static_cast<int>(parse_u64(r.field("stage"), 10, "stage"));
    log.archetype_id = static_cast<int>(parse_u64(r.field("archetype"), 10, "archetype"));
    log.archetype_table_hash = parse_u64(r.field("archetype_table"), 16, "archetype_table");
    log.seed = parse_u64(r.field("seed"), 10, "seed");
    log.tick_limit = static_cast<int>(parse_u64(r.field("tick_limit"), 10, "tick_limit"));
    const auto n = parse_u64(r.field("ticks"), 10, "ticks");
    if (n > static_cast<std::uint64_t>(log.tick_limit)) throw ParseError("replay has more ticks than its tick_limit");

    log.ticks.reserve(n);
    for (std::uint64_t t = 0; t < n; ++t) {
        const std::string line = r.next("action record");
        std::istringstream is(line);
        std::string p;
        std::string e;
        if (!(is >> p >> e)) throw ParseError("replay line " + std::to_string(r.line_no()) + ": malformed action record");
        log.ticks.emplace_back(ActionSet::decode(p), ActionSet::decode(e));
    }
    if (r.next("end marker") != "end") throw ParseError("replay missing end marker");
    return log;
}

void save(const std::filesystem::path& file, const ReplayLog& log) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write replay " + file.string());
    write(out, log);
}

ReplayLog load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open replay " + file.string());
    return read(in);
}

}  // namespace evoman::replay
