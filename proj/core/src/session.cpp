#include "evoman/session.hpp"

#include <algorithm>

#include "evoman/enemies.hpp"
#include "evoman/errors.hpp"

namespace evoman::session {
namespace {

using nlohmann::json;

json rect_json(const Rect& r) { return json::array({r.min.x, r.min.y, r.max.x, r.max.y}); }

Rect rect_from(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ParseError("rect must be [x0, y0, x1, y1]");
    return {{j[0].get<double>(), j[1].get<double>()}, {j[2].get<double>(), j[3].get<double>()}};
}

json character_json(const CharacterView& c) {
    return {{"rect", rect_json(c.body)},
            {"energy", c.energy},
            {"facing", c.facing == Facing::left ? "left" : "right"},
            {"attacking", c.attacking},
            {"immune", c.immune}};
}

CharacterView character_from(const json& j) {
    CharacterView c;
    c.body = rect_from(j.at("rect"));
    c.energy = j.at("energy").get<double>();
    c.facing = j.at("facing") == "left" ? Facing::left : Facing::right;
    c.attacking = j.at("attacking").get<bool>();
    c.immune = j.at("immune").get<bool>();
    return c;
}

CharacterView view_of(const engine::CharacterState& c) { return {c.body, c.energy, c.facing, c.attacking, c.immune}; }

engine::Winner winner_from(const std::string& s) {
    if (s == "player") return engine::Winner::player;
    if (s == "enemy") return engine::Winner::enemy;
    if (s == "timeout") return engine::Winner::timeout;
    throw ParseError("unknown winner '" + s + "'");
}

Mode mode_from(const std::string& s) {
    for (Mode m : {Mode::human_vs_static, Mode::human_vs_ai, Mode::ai_vs_static, Mode::ai_vs_ai, Mode::spectate_replay}) {
        if (s == to_string(m)) return m;
    }
    throw SessionError("unknown mode '" + s + "'");
}

std::unique_ptr<eval::Controller> genome_controller(const std::string& path, const char* side) {
    try {
        return eval::make_controller(nn::load_genome(path));
    } catch (const std::exception& e) {
        throw SessionError(std::string("invalid ") + side + " genome '" + path + "': " + e.what());
    }
}

json with_header(json j, const char* type) {
    j["type"] = type;
    j["format_version"] = protocol_version;
    return j;
}

}  // namespace

const char* to_string(Mode m) {
    switch (m) {
        case Mode::human_vs_static: return "human_vs_static";
        case Mode::human_vs_ai: return "human_vs_ai";
        case Mode::ai_vs_static: return "ai_vs_static";
        case Mode::ai_vs_ai: return "ai_vs_ai";
        case Mode::spectate_replay: return "spectate_replay";
    }
    return "?";
}

const char* to_string(Pace p) { return p == Pace::realtime_30tps ? "realtime_30tps" : "headless"; }

void SessionConfig::validate() const {
    if (human_player() && pace != Pace::realtime_30tps) throw SessionError("human modes require pace realtime_30tps");
    if (ai_player() && player_genome.empty()) throw SessionError("mode " + std::string(to_string(mode)) + " needs player_genome");
    if (ai_enemy() && enemy_genome.empty()) throw SessionError("mode " + std::string(to_string(mode)) + " needs enemy_genome");
    if (mode == Mode::spectate_replay && replay.empty()) throw SessionError("spectate_replay needs a replay file");
    if (mode != Mode::spectate_replay && (enemy_archetype < 1 || enemy_archetype > 8)) {
        throw SessionError("enemy_archetype must be in 1-8");
    }
    if (tick_limit < 1) throw SessionError("tick_limit must be positive");
}

json to_json(const SessionConfig& c) {
    json j{{"mode", to_string(c.mode)},
           {"enemy_archetype", c.enemy_archetype},
           {"seed", c.seed},
           {"pace", to_string(c.pace)},
           {"tick_limit", c.tick_limit}};
    if (!c.player_genome.empty()) j["player_genome"] = c.player_genome;
    if (!c.enemy_genome.empty()) j["enemy_genome"] = c.enemy_genome;
    if (!c.replay.empty()) j["replay"] = c.replay;
    return j;
}

SessionConfig session_config_from_json(const json& j) {
    if (!j.is_object()) throw SessionError("open needs a config object");
    SessionConfig c;
    try {
        c.mode = mode_from(j.at("mode").get<std::string>());
        c.enemy_archetype = j.value("enemy_archetype", c.enemy_archetype);
        c.player_genome = j.value("player_genome", std::string{});
        c.enemy_genome = j.value("enemy_genome", std::string{});
        c.replay = j.value("replay", std::string{});
        c.seed = j.value("seed", std::uint64_t{0});
        c.tick_limit = j.value("tick_limit", c.tick_limit);
        const auto pace = j.value("pace", std::string("headless"));
        if (pace == "realtime_30tps") {
            c.pace = Pace::realtime_30tps;
        } else if (pace == "headless") {
            c.pace = Pace::headless;
        } else {
            throw SessionError("unknown pace '" + pace + "'");
        }
    } catch (const json::exception& e) {
        throw SessionError(std::string("malformed session config: ") + e.what());
    }
    return c;
}

FrameMessage make_frame(const std::string& session, const engine::GameState& s) {
    FrameMessage f;
    f.session = session;
    f.tick = s.tick;
    f.player = view_of(s.player);
    f.enemy = view_of(s.enemy);
    for (const auto& p : s.player_projectiles) {
        if (p.active) f.projectiles.push_back({Side::player, p.body});
    }
    for (const auto& p : s.enemy_projectiles) {
        if (p.active) f.projectiles.push_back({Side::enemy, p.body});
    }
    f.winner = engine::is_terminal(s);
    f.terminal = f.winner.has_value();
    return f;
}

json to_json(const FrameMessage& f) {
    json projectiles = json::array();
    for (const auto& p : f.projectiles) projectiles.push_back({{"owner", to_string(p.owner)}, {"rect", rect_json(p.body)}});
    return with_header({{"session", f.session},
                        {"tick", f.tick},
                        {"player", character_json(f.player)},
                        {"enemy", character_json(f.enemy)},
                        {"projectiles", std::move(projectiles)},
                        {"terminal", f.terminal},
                        {"winner", f.winner ? json(engine::to_string(*f.winner)) : json(nullptr)}},
                       "frame");
}

FrameMessage frame_from_json(const json& j) {
    if (j.value("type", "") != "frame") throw ParseError("not a frame message");
    if (j.value("format_version", 0) != protocol_version) throw ParseError("unsupported frame format_version");
    FrameMessage f;
    f.session = j.at("session").get<std::string>();
    f.tick = j.at("tick").get<int>();
    f.player = character_from(j.at("player"));
    f.enemy = character_from(j.at("enemy"));
    for (const auto& p : j.at("projectiles")) {
        f.projectiles.push_back({p.at("owner") == "enemy" ? Side::enemy : Side::player, rect_from(p.at("rect"))});
    }
    f.terminal = j.at("terminal").get<bool>();
    if (!j.at("winner").is_null()) f.winner = winner_from(j.at("winner").get<std::string>());
    return f;
}

json to_json(const InputMessage& m) {
    json j{{"session", m.session},
           {"tick", m.tick},
           {"left", m.actions.left},
           {"right", m.actions.right},
           {"jump", m.actions.jump},
           {"release", m.actions.release},
           {"shoot", m.actions.shoot}};
    for (std::size_t n = 0; n < enemy_weapon_count; ++n) {
        if (m.actions.shoot_n[n]) j["shoot" + std::to_string(n + 1)] = true;
    }
    return with_header(std::move(j), "input");
}

InputMessage input_from_json(const json& j) {
    InputMessage m;
    try {
        m.session = j.at("session").get<std::string>();
        m.tick = j.value("tick", 0);
        m.actions.left = j.value("left", false);
        m.actions.right = j.value("right", false);
        m.actions.jump = j.value("jump", false);
        m.actions.release = j.value("release", false);
        m.actions.shoot = j.value("shoot", false);
        for (std::size_t n = 0; n < enemy_weapon_count; ++n) m.actions.shoot_n[n] = j.value("shoot" + std::to_string(n + 1), false);
    } catch (const json::exception& e) {
        throw SessionError(std::string("malformed input: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------------------------

Session::Session(std::string id, SessionConfig config) : id_(std::move(id)), config_(std::move(config)) {
    config_.validate();
    if (config_.mode == Mode::spectate_replay) {
        replay::ReplayLog recorded;
        try {
            recorded = replay::load(config_.replay);
        } catch (const std::exception& e) {
            throw SessionError("cannot load replay '" + config_.replay + "': " + e.what());
        }
        if (recorded.archetype_table_hash != 0 && recorded.archetype_table_hash != eval::archetype_table_hash()) {
            throw SessionError("replay was recorded with a different archetype table");
        }
        config_.enemy_archetype = recorded.archetype_id;
        config_.seed = recorded.seed;
        config_.tick_limit = recorded.tick_limit;
        std::vector<ActionSet> pa;
        std::vector<ActionSet> ea;
        for (const auto& [p, e] : recorded.ticks) {
            pa.push_back(p);
            ea.push_back(e);
        }
        player_ = std::make_unique<eval::ScriptedInputController>(std::move(pa));
        enemy_ = std::make_unique<eval::ScriptedInputController>(std::move(ea));
        log_.stage_id = recorded.stage_id;
    } else {
        log_.stage_id = config_.enemy_archetype;
        if (config_.ai_player()) player_ = genome_controller(config_.player_genome, "player");
        if (config_.ai_enemy()) {
            enemy_ = genome_controller(config_.enemy_genome, "enemy");
        } else {
            enemy_ = std::make_unique<eval::ScriptedController>();
        }
    }
    state_ = engine::initial_state(builtin_stage(log_.stage_id), enemies::builtin_archetype(config_.enemy_archetype), config_.seed,
                                   config_.tick_limit);
    log_.archetype_id = config_.enemy_archetype;
    log_.seed = config_.seed;
    log_.tick_limit = config_.tick_limit;
    log_.archetype_table_hash = eval::archetype_table_hash();
    log_.master_seed = config_.seed;
}

void Session::submit_input(const InputMessage& msg) {
    if (!config_.human_player()) throw SessionError("session " + id_ + " has no human-controlled side");
    if (msg.actions.any_weapon()) throw SessionError("shootN actions are enemy-only");
    if (finished()) throw SessionError("session " + id_ + " has ended");
    pending_ = msg.actions;
}

FrameMessage Session::frame() const { return make_frame(id_, state_); }

FrameMessage Session::advance() {
    if (finished()) throw SessionError("session " + id_ + " has ended");
    ActionSet pa;
    ActionSet ea;
    if (player_) {
        try {
            pa = player_->decide(state_, Side::player);
        } catch (const nn::NonFiniteOutput&) {
            winner_ = engine::Winner::enemy;
            return frame();
        }
        pa.shoot_n = {};
    } else {
        pa = pending_.value_or(ActionSet{});
    }
    pending_.reset();
    try {
        ea = enemy_->decide(state_, Side::enemy);
    } catch (const nn::NonFiniteOutput&) {
        winner_ = engine::Winner::player;
        return frame();
    }
    winner_ = engine::advance(state_, pa, ea);
    log_.ticks.emplace_back(pa, ea);
    player_trace_.push_back(state_.player.energy);
    enemy_trace_.push_back(state_.enemy.energy);
    return frame();
}

eval::MatchReport Session::report() const {
    if (!winner_) throw ContractViolation("session still running");
    auto r = eval::summarize(state_, *winner_, player_trace_, enemy_trace_);
    r.replay = log_;
    return r;
}

// ---------------------------------------------------------------------------------------------

std::string SessionManager::open(const SessionConfig& config) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "s" + std::to_string(next_id_++);
    }
    auto entry = std::make_shared<Entry>(Session(id, config));
    std::lock_guard lock(mutex_);
    sessions_.emplace(id, std::move(entry));
    return id;
}

void SessionManager::submit_input(const InputMessage& msg) {
    with_session(msg.session, [&](Session& s) { s.submit_input(msg); });
}

void SessionManager::close(const std::string& id) {
    std::lock_guard lock(mutex_);
    sessions_.erase(id);
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionError("unknown session '" + id + "'");
    return it->second;
}

// ---------------------------------------------------------------------------------------------

json error_message(const std::string& reason, const std::string& session) {
    json j{{"reason", reason}};
    if (!session.empty()) j["session"] = session;
    return with_header(std::move(j), "error");
}

json end_message(const Session& s) {
    const auto r = s.report();
    return with_header({{"session", s.id()},
                        {"winner", engine::to_string(r.winner)},
                        {"player_energy", r.player.self_energy},
                        {"enemy_energy", r.enemy.self_energy},
                        {"duration", r.player.duration}},
                       "end");
}

Connection::~Connection() {
    for (const auto& id : owned_) manager_.close(id);
}

std::vector<std::string> Connection::on_line(const std::string& line, Clock::time_point now) {
    std::vector<std::string> out;
    const json msg = json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        out.push_back(error_message("malformed message").dump());
        return out;
    }
    const auto type = msg["type"].get<std::string>();
    if (msg.contains("format_version") && msg["format_version"] != protocol_version) {
        out.push_back(error_message("unsupported format_version; server speaks " + std::to_string(protocol_version)).dump());
        return out;
    }

    if (type == "hello") {
        json modes = json::array();
        for (Mode m : {Mode::human_vs_static, Mode::human_vs_ai, Mode::ai_vs_static, Mode::ai_vs_ai, Mode::spectate_replay}) {
            modes.push_back(to_string(m));
        }
        out.push_back(with_header({{"server", "evoman"}, {"modes", modes}, {"tps", realtime_tps}}, "hello").dump());
    } else if (type == "open") {
        std::string id;
        try {
            id = manager_.open(session_config_from_json(msg.value("config", json::object())));
        } catch (const SessionError& e) {
            out.push_back(error_message(e.what()).dump());
            return out;
        }
        owned_.push_back(id);
        manager_.with_session(id, [&](Session& s) {
            json platforms = json::array();
            for (const auto& p : s.state().stage.platforms) platforms.push_back(rect_json(p));
            out.push_back(with_header({{"session", id},
                                       {"config", to_json(s.config())},
                                       {"arena", rect_json(s.state().stage.arena)},
                                       {"platforms", std::move(platforms)}},
                                      "opened")
                              .dump());
            out.push_back(to_json(s.frame()).dump());
        });
        const bool headless = manager_.with_session(id, [](Session& s) { return s.config().pace == Pace::headless; });
        Live live{id, now, 0};
        if (headless) {
            emit_until(live, Clock::time_point::max(), out);
        } else {
            live_.push_back(live);
        }
    } else if (type == "input") {
        try {
            manager_.submit_input(input_from_json(msg));
        } catch (const SessionError& e) {
            out.push_back(error_message(e.what(), msg.value("session", "")).dump());
        }
    } else {
        out.push_back(error_message("unknown message type '" + type + "'").dump());
    }
    return out;
}

void Connection::emit_until(Live& live, Clock::time_point now, std::vector<std::string>& out) {
    const bool ended = manager_.with_session(live.id, [&](Session& s) {
        const auto tick_length = std::chrono::duration<double>(1.0 / realtime_tps);
        while (!s.finished()) {
            if (now != Clock::time_point::max()) {
                const auto due = live.start + std::chrono::duration_cast<Clock::duration>(tick_length * (live.ticks_done + 1));
                if (due > now) break;
            }
            out.push_back(to_json(s.advance()).dump());
            ++live.ticks_done;
        }
        if (s.finished()) out.push_back(end_message(s).dump());
        return s.finished();
    });
    if (ended) {
        manager_.close(live.id);
        std::erase(owned_, live.id);
    }
}

std::vector<std::string> Connection::pump(Clock::time_point now) {
    std::vector<std::string> out;
    for (auto& live : live_) emit_until(live, now, out);
    std::erase_if(live_, [&](const Live& l) { return std::find(owned_.begin(), owned_.end(), l.id) == owned_.end(); });
    return out;
}

std::optional<Connection::Clock::time_point> Connection::next_deadline() const {
    std::optional<Clock::time_point> best;
    const auto tick_length = std::chrono::duration<double>(1.0 / realtime_tps);
    for (const auto& l : live_) {
        const auto due = l.start + std::chrono::duration_cast<Clock::duration>(tick_length * (l.ticks_done + 1));
        if (!best || due < *best) best = due;
    }
    return best;
}

}  // namespace evoman::session
