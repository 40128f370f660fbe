#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "evoman/evaluation.hpp"
#include "evoman/neurocontroller.hpp"
#include "evoman/replay.hpp"
#include "evoman/session.hpp"
#include "support.hpp"

namespace evoman::session {
namespace {

using nlohmann::json;
using evoman::testing::TempDir;

std::string write_genome(const TempDir& dir, std::uint64_t seed = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0, 1);
    std::vector<double> w(nn::fixed_genome_length);
    for (auto& x : w) x = d(rng);
    const auto path = dir.path() / ("g" + std::to_string(seed) + ".json");
    nn::save_genome(path, nn::neat_from_layer(w, 68, 5));
    return path.string();
}

SessionConfig ai_config(const std::string& genome, std::uint64_t seed = 4) {
    SessionConfig c;
    c.mode = Mode::ai_vs_static;
    c.enemy_archetype = 3;
    c.player_genome = genome;
    c.seed = seed;
    c.pace = Pace::headless;
    return c;
}

SessionConfig human_config(int tick_limit = 3000) {
    SessionConfig c;
    c.mode = Mode::human_vs_static;
    c.enemy_archetype = 5;
    c.pace = Pace::realtime_30tps;
    c.seed = 8;
    c.tick_limit = tick_limit;
    return c;
}

InputMessage input(const std::string& id, ActionSet a) { return {id, 0, a}; }

TEST(SessionConfig, ValidationRules) {
    auto c = human_config();
    EXPECT_NO_THROW(c.validate());
    c.pace = Pace::headless;
    EXPECT_THROW(c.validate(), SessionError);
    c = ai_config("");
    EXPECT_THROW(c.validate(), SessionError);
    c = ai_config("x.json");
    c.mode = Mode::ai_vs_ai;
    EXPECT_THROW(c.validate(), SessionError);  // enemy genome missing
    c = ai_config("x.json");
    c.enemy_archetype = 11;
    EXPECT_THROW(c.validate(), SessionError);
    c = SessionConfig{};
    c.mode = Mode::spectate_replay;
    EXPECT_THROW(c.validate(), SessionError);
}

TEST(SessionConfig, JsonRoundTrip) {
    auto c = ai_config("p.json", 77);
    c.mode = Mode::ai_vs_ai;
    c.enemy_genome = "e.json";
    c.tick_limit = 900;
    EXPECT_EQ(session_config_from_json(to_json(c)), c);
    EXPECT_THROW(session_config_from_json(json{{"mode", "chess"}}), SessionError);
}

TEST(SessionManager, InvalidGenomeIsRejectedWithAReason) {
    SessionManager m;
    try {
        m.open(ai_config("/nonexistent/genome.json"));
        FAIL();
    } catch (const SessionError& e) {
        EXPECT_NE(std::string(e.what()).find("genome"), std::string::npos) << e.what();
    }
    TempDir dir("badgenome");
    std::ofstream(dir.path() / "short.json") << R"({"format_version":1,"kind":"fixed","weights":[1,2,3]})";
    EXPECT_THROW(m.open(ai_config((dir.path() / "short.json").string())), SessionError);
    EXPECT_EQ(m.size(), 0u);
}

TEST(SessionManager, IdsAreUniqueAndSessionsClose) {
    SessionManager m;
    const auto a = m.open(human_config());
    const auto b = m.open(human_config());
    EXPECT_NE(a, b);
    EXPECT_EQ(m.size(), 2u);
    m.close(a);
    EXPECT_EQ(m.size(), 1u);
    EXPECT_THROW(m.submit_input(input(a, {})), SessionError);
}

TEST(Session, HumanInputsLatestWins) {
    Session s("h", human_config());
    ActionSet left, right;
    left.left = true;
    right.right = true;
    const double x0 = s.state().player.body.min.x;
    s.submit_input(input("h", left));
    s.submit_input(input("h", right));
    s.advance();
    EXPECT_GT(s.state().player.body.min.x, x0);
    EXPECT_EQ(s.log().ticks.back().first, right);
}

TEST(Session, MissingInputMeansIdle) {
    Session s("h", human_config(120));
    ActionSet jump;
    jump.jump = true;
    s.submit_input(input("h", jump));
    s.advance();
    while (!s.finished()) s.advance();
    for (std::size_t t = 1; t < s.log().ticks.size(); ++t) EXPECT_EQ(s.log().ticks[t].first, ActionSet{});
}

TEST(Session, RejectedInputs) {
    Session h("h", human_config());
    ActionSet weapon;
    weapon.shoot_n[1] = true;
    EXPECT_THROW(h.submit_input(input("h", weapon)), SessionError);

    TempDir dir("reject");
    Session ai("a", ai_config(write_genome(dir)));
    EXPECT_THROW(ai.submit_input(input("a", {})), SessionError);
}

TEST(Session, HumanInputLogReproducesTheMatch) {
    Session s("h", human_config(400));
    std::mt19937_64 rng(5);
    while (!s.finished()) {
        if (rng() % 3) s.submit_input(input("h", evoman::testing::random_player_actions(rng)));
        s.advance();
    }
    const auto original = s.report();
    const auto again = eval::resimulate(s.log());
    EXPECT_EQ(again.player, original.player);
    EXPECT_EQ(again.enemy, original.enemy);
    EXPECT_THROW(s.advance(), SessionError);
}

std::vector<FrameMessage> play_out(Session& s) {
    std::vector<FrameMessage> frames{s.frame()};
    while (!s.finished()) frames.push_back(s.advance());
    return frames;
}

TEST(Session, HeadlessStreamsAreReproducibleAndOrdered) {
    TempDir dir("headless");
    const auto g = write_genome(dir);
    Session a("x", ai_config(g));
    Session b("x", ai_config(g));
    const auto fa = play_out(a);
    const auto fb = play_out(b);
    EXPECT_EQ(fa, fb);
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(fa[i].tick, static_cast<int>(i));
    EXPECT_TRUE(fa.back().terminal);
    EXPECT_TRUE(fa.back().winner.has_value());
    for (std::size_t i = 0; i + 1 < fa.size(); ++i) EXPECT_FALSE(fa[i].terminal);
}

TEST(Session, SpectatorSeesTheIdenticalMatch) {
    TempDir dir("spectate");
    Session live("x", ai_config(write_genome(dir)));
    const auto frames = play_out(live);
    const auto file = dir.path() / "m.replay";
    replay::save(file, live.log());

    SessionConfig spec;
    spec.mode = Mode::spectate_replay;
    spec.replay = file.string();
    spec.pace = Pace::headless;
    Session watch("x", spec);
    EXPECT_EQ(play_out(watch), frames);
}

TEST(Protocol, FrameAndInputJsonRoundTrip) {
    TempDir dir("wire");
    Session s("s9", ai_config(write_genome(dir)));
    for (int i = 0; i < 60; ++i) s.advance();
    const auto f = s.frame();
    const auto j = to_json(f);
    EXPECT_EQ(j.at("type"), "frame");
    EXPECT_EQ(j.at("format_version"), protocol_version);
    EXPECT_EQ(frame_from_json(json::parse(j.dump())), f);

    ActionSet a;
    a.jump = a.shoot = true;
    const InputMessage m{"s9", 12, a};
    const auto back = input_from_json(json::parse(to_json(m).dump()));
    EXPECT_EQ(back.session, "s9");
    EXPECT_EQ(back.tick, 12);
    EXPECT_EQ(back.actions, a);
}

std::vector<json> parse_all(const std::vector<std::string>& lines) {
    std::vector<json> out;
    for (const auto& l : lines) out.push_back(json::parse(l));
    return out;
}

TEST(Connection, HeadlessOpenStreamsEverythingAtOnce) {
    TempDir dir("conn");
    SessionManager m;
    Connection c(m);
    const auto hello = parse_all(c.on_line(R"({"type":"hello","format_version":1})"));
    ASSERT_EQ(hello.size(), 1u);
    EXPECT_EQ(hello[0]["type"], "hello");

    const json open{{"type", "open"}, {"format_version", 1}, {"config", to_json(ai_config(write_genome(dir)))}};
    const auto msgs = parse_all(c.on_line(open.dump()));
    ASSERT_GE(msgs.size(), 3u);
    EXPECT_EQ(msgs.front()["type"], "opened");
    EXPECT_EQ(msgs.back()["type"], "end");
    for (std::size_t i = 1; i + 1 < msgs.size(); ++i) {
        EXPECT_EQ(msgs[i]["type"], "frame");
        EXPECT_EQ(msgs[i]["tick"], static_cast<int>(i - 1));
    }
    for (const auto& msg : msgs) EXPECT_EQ(msg["format_version"], 1);
    EXPECT_EQ(m.size(), 0u);  // finished sessions are closed
}

TEST(Connection, ErrorsComeBackAsMessages) {
    SessionManager m;
    Connection c(m);
    auto first = [&](const std::string& line) { return json::parse(c.on_line(line).at(0)); };
    EXPECT_EQ(first("{not json")["type"], "error");
    EXPECT_EQ(first(R"({"type":"teleport"})")["type"], "error");
    EXPECT_EQ(first(R"({"type":"hello","format_version":2})")["type"], "error");
    const auto bad = first(json{{"type", "open"}, {"config", to_json(ai_config(""))}}.dump());
    EXPECT_EQ(bad["type"], "error");
    EXPECT_FALSE(bad["reason"].get<std::string>().empty());
}

TEST(Connection, RealtimePacingFollowsTheClock) {
    SessionManager m;
    Connection c(m);
    const auto t0 = Connection::Clock::time_point{} + std::chrono::hours(1);
    const json open{{"type", "open"}, {"config", to_json(human_config())}};
    const auto opened = parse_all(c.on_line(open.dump(), t0));
    ASSERT_EQ(opened.size(), 2u);  // opened + tick 0
    const std::string id = opened[0]["session"];

    EXPECT_TRUE(c.pump(t0 + std::chrono::milliseconds(20)).empty());
    EXPECT_EQ(c.next_deadline(), t0 + std::chrono::duration_cast<Connection::Clock::duration>(std::chrono::duration<double>(1.0 / 30)));

    // input sent mid-window applies at the next boundary
    ActionSet right;
    right.right = true;
    EXPECT_TRUE(c.on_line(to_json(InputMessage{id, 1, right}).dump(), t0 + std::chrono::milliseconds(25)).empty());
    const auto one = parse_all(c.pump(t0 + std::chrono::milliseconds(34)));
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0]["tick"], 1);

    const auto second = parse_all(c.pump(t0 + std::chrono::seconds(1) + std::chrono::milliseconds(1)));
    EXPECT_EQ(second.size(), 29u);
    EXPECT_EQ(second.back()["tick"], 30);
    const auto rejected = parse_all(c.on_line(to_json(InputMessage{id, 31, ActionSet{.shoot_n = {true}}}).dump(), t0));
    ASSERT_EQ(rejected.size(), 1u);
    EXPECT_EQ(rejected[0]["type"], "error");
}

}  // namespace
}  // namespace evoman::session
