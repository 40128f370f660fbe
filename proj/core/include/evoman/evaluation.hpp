#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evoman/engine.hpp"
#include "evoman/neurocontroller.hpp"
#include "evoman/replay.hpp"
#include "evoman/rng.hpp"

namespace evoman::eval {

enum class Outcome { self, opponent, timeout };
const char* to_string(Outcome o);

/// One side's view of a finished match.
struct MatchResult {
    double self_energy = 0.0;
    double opponent_energy = 0.0;
    int duration = 0;
    /// Own energy after each tick's hit resolution; length == duration.
    std::vector<double> self_energy_trace;
    Outcome winner = Outcome::timeout;
    /// The match was stopped because this or the other side's controller misbehaved.
    bool aborted = false;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct FitnessWeights {
    double gamma = 1.0;
    double beta = 2.0;
    double alpha = 2.0;

    static constexpr FitnessWeights player_default() { return {1.0, 2.0, 2.0}; }
    static constexpr FitnessWeights enemy_default() { return {1.0, 2.0, 3.0}; }

    friend bool operator==(const FitnessWeights&, const FitnessWeights&) = default;
};

/// (100 - e)^γ - (100 - p)^β - (Σ(100 - p_i) / t)^α, with e the opponent's and p the own
/// final energy. Throws ContractViolation for an empty trace.
double match_fitness(const MatchResult& r, const FitnessWeights& w);

/// Chooses the actions of one side every tick.
class Controller {
public:
    virtual ~Controller() = default;
    virtual ActionSet decide(const engine::GameState& state, Side side) = 0;
};

class IdleController final : public Controller {
public:
    ActionSet decide(const engine::GameState&, Side) override { return {}; }
};

/// Presses each of the five basic actions with probability 1/2 every tick.
class RandomController final : public Controller {
public:
    explicit RandomController(std::uint64_t seed) : rng_(seed) {}
    ActionSet decide(const engine::GameState& state, Side side) override;

private:
    Rng rng_;
};

/// The archetype's rule-based policy (Static Enemy mode).
class ScriptedController final : public Controller {
public:
    ActionSet decide(const engine::GameState& state, Side side) override;
};

class FixedNetworkController final : public Controller {
public:
    explicit FixedNetworkController(nn::FixedGenome genome);
    ActionSet decide(const engine::GameState& state, Side side) override;

private:
    nn::FixedGenome genome_;
};

class NeatNetworkController final : public Controller {
public:
    explicit NeatNetworkController(const nn::NeatGenome& genome);
    ActionSet decide(const engine::GameState& state, Side side) override;

private:
    nn::Phenotype phenotype_;
};

/// Plays back a fixed action list, then idles.
class ScriptedInputController final : public Controller {
public:
    explicit ScriptedInputController(std::vector<ActionSet> actions) : actions_(std::move(actions)) {}
    ActionSet decide(const engine::GameState& state, Side side) override;

private:
    std::vector<ActionSet> actions_;
};

/// Network controller for a stored genome; validates it first (InvalidGenome on failure).
std::unique_ptr<Controller> make_controller(const nn::Genome& genome);

struct MatchSetup {
    int stage_id = 1;
    ArchetypePtr archetype;
    std::uint64_t seed = 0;
    int tick_limit = engine::default_tick_limit;
    bool record = false;
};

struct MatchReport {
    MatchResult player;
    MatchResult enemy;
    engine::Winner winner = engine::Winner::timeout;
    std::optional<replay::ReplayLog> replay;
    std::string abort_reason;
};

/// Both sides' results for a finished match from its final state and per-tick energy traces.
MatchReport summarize(const engine::GameState& final_state, engine::Winner winner, std::vector<double> player_trace,
                      std::vector<double> enemy_trace);

/// Called with the initial state and after every tick.
using StateObserver = std::function<void(const engine::GameState&)>;

/// sense -> decide -> step until a terminal state. A controller throwing NonFiniteOutput
/// aborts the match as a loss for that side.
MatchReport run_match(Controller& player, Controller& enemy, const MatchSetup& setup, const StateObserver& observer = {});

/// Re-simulates a replay log through the engine (the replay decoder). Throws ParseError
/// when the log's archetype table hash does not match the built-in table.
MatchReport resimulate(const replay::ReplayLog& log, const StateObserver& observer = {});

/// Hash of the built-in archetype document, stored in replays.
std::uint64_t archetype_table_hash();

/// Opponent indices: the fittest member followed by `sample_size - 1` distinct uniform draws
/// from the rest. Populations no larger than `sample_size` are returned whole.
std::vector<std::size_t> draw_opponent_sample(std::span<const double> opponent_fitness, std::size_t sample_size, Rng& rng);

/// Mean of `evaluate(opponent)` over the sample.
double generalization_fitness(std::span<const std::size_t> sample, const std::function<double(std::size_t)>& evaluate);

/// Runs fn(0..n-1), splitting the range over `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace evoman::eval
