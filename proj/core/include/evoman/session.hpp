#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evoman/evaluation.hpp"
#include "evoman/replay.hpp"

namespace evoman::session {

inline constexpr int protocol_version = 1;
inline constexpr double realtime_tps = 30.0;

enum class Mode { human_vs_static, human_vs_ai, ai_vs_static, ai_vs_ai, spectate_replay };
enum class Pace { realtime_30tps, headless };

const char* to_string(Mode m);
const char* to_string(Pace p);

/// Rejected session request or input; the message is sent to the client as the reason.
class SessionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    Mode mode = Mode::ai_vs_static;
    int enemy_archetype = 1;
    std::string player_genome;
    std::string enemy_genome;
    /// Replay file for spectate_replay.
    std::string replay;
    std::uint64_t seed = 0;
    Pace pace = Pace::headless;
    int tick_limit = engine::default_tick_limit;

    bool human_player() const { return mode == Mode::human_vs_static || mode == Mode::human_vs_ai; }
    bool ai_player() const { return mode == Mode::ai_vs_static || mode == Mode::ai_vs_ai; }
    bool ai_enemy() const { return mode == Mode::human_vs_ai || mode == Mode::ai_vs_ai; }

    /// Throws SessionError.
    void validate() const;

    friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

nlohmann::json to_json(const SessionConfig& c);
SessionConfig session_config_from_json(const nlohmann::json& j);

struct CharacterView {
    Rect body;
    double energy = 0.0;
    Facing facing = Facing::right;
    bool attacking = false;
    bool immune = false;

    friend bool operator==(const CharacterView&, const CharacterView&) = default;
};

struct ProjectileView {
    Side owner = Side::player;
    Rect body;

    friend bool operator==(const ProjectileView&, const ProjectileView&) = default;
};

struct FrameMessage {
    std::string session;
    int tick = 0;
    CharacterView player;
    CharacterView enemy;
    std::vector<ProjectileView> projectiles;
    bool terminal = false;
    std::optional<engine::Winner> winner;

    friend bool operator==(const FrameMessage&, const FrameMessage&) = default;
};

FrameMessage make_frame(const std::string& session, const engine::GameState& state);
nlohmann::json to_json(const FrameMessage& f);
FrameMessage frame_from_json(const nlohmann::json& j);

struct InputMessage {
    std::string session;
    int tick = 0;
    ActionSet actions;
};

nlohmann::json to_json(const InputMessage& m);
InputMessage input_from_json(const nlohmann::json& j);

/// One live match. Not thread-safe; SessionManager serializes access.
class Session {
public:
    Session(std::string id, SessionConfig config);

    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return config_; }
    const engine::GameState& state() const { return state_; }
    bool finished() const { return winner_.has_value(); }
    std::optional<engine::Winner> winner() const { return winner_; }

    /// Stores the input for the next tick, replacing any earlier one (latest wins).
    void submit_input(const InputMessage& msg);

    /// Frame of the current state (tick 0 before the first advance).
    FrameMessage frame() const;
    /// Advances one tick with the pending input (idle if none) and returns the new frame.
    FrameMessage advance();

    /// Actions applied so far, in the engine's replay format.
    const replay::ReplayLog& log() const { return log_; }
    eval::MatchReport report() const;

private:
    std::string id_;
    SessionConfig config_;
    engine::GameState state_;
    std::unique_ptr<eval::Controller> player_;
    std::unique_ptr<eval::Controller> enemy_;
    std::optional<ActionSet> pending_;
    std::optional<engine::Winner> winner_;
    replay::ReplayLog log_;
    std::vector<double> player_trace_;
    std::vector<double> enemy_trace_;
};

/// Owns all live sessions; safe to call from several connection threads.
class SessionManager {
public:
    /// Throws SessionError for an invalid config or genome.
    std::string open(const SessionConfig& config);
    void submit_input(const InputMessage& msg);
    void close(const std::string& id);
    std::size_t size() const;

    /// Runs `fn(session)` under the session's lock. Throws SessionError for unknown ids.
    template <typename F>
    auto with_session(const std::string& id, F&& fn) {
        auto entry = find(id);
        std::lock_guard lock(entry->mutex);
        return fn(entry->session);
    }

private:
    struct Entry {
        explicit Entry(Session s) : session(std::move(s)) {}
        std::mutex mutex;
        Session session;
    };
    std::shared_ptr<Entry> find(const std::string& id) const;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::uint64_t next_id_ = 1;
};

/// Transport-agnostic handling of one client connection's newline-delimited JSON messages.
/// The transport feeds received lines to on_line() and calls pump() regularly; both return
/// the lines to send back, in order.
class Connection {
public:
    using Clock = std::chrono::steady_clock;

    explicit Connection(SessionManager& manager) : manager_(manager) {}
    ~Connection();

    std::vector<std::string> on_line(const std::string& line, Clock::time_point now = Clock::now());
    /// Advances realtime sessions whose tick boundaries have passed.
    std::vector<std::string> pump(Clock::time_point now = Clock::now());
    /// Earliest time pump() has work to do, if any realtime session is live.
    std::optional<Clock::time_point> next_deadline() const;

private:
    struct Live {
        std::string id;
        Clock::time_point start;
        int ticks_done = 0;
    };

    void emit_until(Live& live, Clock::time_point now, std::vector<std::string>& out);

    SessionManager& manager_;
    std::vector<Live> live_;
    std::vector<std::string> owned_;
};

nlohmann::json error_message(const std::string& reason, const std::string& session = {});
nlohmann::json end_message(const Session& s);

}  // namespace evoman::session
