#include "evoman/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "evoman/enemies.hpp"
#include "evoman/errors.hpp"
#include "evoman/sensors.hpp"

namespace evoman::eval {
namespace {

Outcome outcome_for(engine::Winner w, Side side) {
    if (w == engine::Winner::timeout) return Outcome::timeout;
    const bool player_won = w == engine::Winner::player;
    return player_won == (side == Side::player) ? Outcome::self : Outcome::opponent;
}

class ResultBuilder {
public:
    void record(const engine::GameState& s) {
        player_trace_.push_back(s.player.energy);
        enemy_trace_.push_back(s.enemy.energy);
    }

    void adopt(std::vector<double> player, std::vector<double> enemy) {
        player_trace_ = std::move(player);
        enemy_trace_ = std::move(enemy);
    }

    MatchReport finish(const engine::GameState& s, engine::Winner w) {
        MatchReport r;
        r.winner = w;
        r.player = make(Side::player, s, w, std::move(player_trace_));
        r.enemy = make(Side::enemy, s, w, std::move(enemy_trace_));
        return r;
    }

private:
    static MatchResult make(Side side, const engine::GameState& s, engine::Winner w, std::vector<double> trace) {
        MatchResult m;
        m.self_energy = engine::character(s, side).energy;
        m.opponent_energy = engine::character(s, opponent_of(side)).energy;
        m.duration = static_cast<int>(trace.size());
        m.self_energy_trace = std::move(trace);
        m.winner = outcome_for(w, side);
        return m;
    }

    std::vector<double> player_trace_;
    std::vector<double> enemy_trace_;
};

/// Forfeit: the offending side ends with zero energy and loses.
void forfeit(MatchReport& r, Side loser) {
    MatchResult& l = loser == Side::player ? r.player : r.enemy;
    MatchResult& w = loser == Side::player ? r.enemy : r.player;
    if (l.self_energy_trace.empty()) {
        l.self_energy_trace.push_back(0.0);
        w.self_energy_trace.push_back(w.self_energy);
        l.duration = w.duration = 1;
    }
    l.self_energy_trace.back() = 0.0;
    l.self_energy = 0.0;
    w.opponent_energy = 0.0;
    l.winner = Outcome::opponent;
    w.winner = Outcome::self;
    l.aborted = w.aborted = true;
    r.winner = loser == Side::player ? engine::Winner::enemy : engine::Winner::player;
}

}  // namespace

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::self: return "self";
        case Outcome::opponent: return "opponent";
        case Outcome::timeout: return "timeout";
    }
    return "?";
}

double match_fitness(const MatchResult& r, const FitnessWeights& w) {
    if (r.self_energy_trace.empty() || r.duration <= 0) throw ContractViolation("fitness of a match with no ticks");
    double damage = 0.0;
    for (double p : r.self_energy_trace) damage += engine::max_energy - p;
    const double t = static_cast<double>(r.duration);
    return std::pow(engine::max_energy - r.opponent_energy, w.gamma) - std::pow(engine::max_energy - r.self_energy, w.beta) -
           std::pow(damage / t, w.alpha);
}

ActionSet RandomController::decide(const engine::GameState&, Side) {
    ActionSet a;
    const auto bits = rng_();
    a.left = bits & 1u;
    a.right = bits & 2u;
    a.jump = bits & 4u;
    a.release = bits & 8u;
    a.shoot = bits & 16u;
    return a;
}

ActionSet ScriptedController::decide(const engine::GameState& state, Side side) {
    if (side != Side::enemy) throw ContractViolation("scripted archetypes only control the enemy");
    return enemies::enemy_policy(state, *state.archetype);
}

FixedNetworkController::FixedNetworkController(nn::FixedGenome genome) : genome_(std::move(genome)) {
    nn::validate_controller(genome_);
}

ActionSet FixedNetworkController::decide(const engine::GameState& state, Side side) {
    return nn::activate_fixed(genome_, sensors::sense(state, side));
}

NeatNetworkController::NeatNetworkController(const nn::NeatGenome& genome) : phenotype_(nn::Phenotype::decode(genome)) {
    if (phenotype_.input_count() != nn::input_count || phenotype_.output_count() != nn::output_count) {
        throw InvalidGenome("controller genomes need 68 inputs and 5 outputs");
    }
}

ActionSet NeatNetworkController::decide(const engine::GameState& state, Side side) {
    std::array<double, nn::output_count> out{};
    phenotype_.evaluate(sensors::sense(state, side), out);
    return nn::to_actions(out);
}

ActionSet ScriptedInputController::decide(const engine::GameState& state, Side) {
    const auto t = static_cast<std::size_t>(state.tick);
    return t < actions_.size() ? actions_[t] : ActionSet{};
}

std::unique_ptr<Controller> make_controller(const nn::Genome& genome) {
    if (const auto* f = std::get_if<nn::FixedGenome>(&genome)) return std::make_unique<FixedNetworkController>(*f);
    const auto& g = std::get<nn::NeatGenome>(genome);
    nn::validate(g);
    return std::make_unique<NeatNetworkController>(g);
}

MatchReport summarize(const engine::GameState& s, engine::Winner w, std::vector<double> player_trace,
                      std::vector<double> enemy_trace) {
    ResultBuilder b;
    b.adopt(std::move(player_trace), std::move(enemy_trace));
    return b.finish(s, w);
}

std::uint64_t archetype_table_hash() {
    static const std::uint64_t h = fnv1a(enemies::builtin_archetype_document());
    return h;
}

MatchReport run_match(Controller& player, Controller& enemy, const MatchSetup& setup, const StateObserver& observer) {
    engine::GameState state =
        engine::initial_state(builtin_stage(setup.stage_id), setup.archetype, setup.seed, setup.tick_limit);
    if (observer) observer(state);

    std::optional<replay::ReplayLog> log;
    if (setup.record) {
        log.emplace();
        log->stage_id = setup.stage_id;
        log->archetype_id = setup.archetype->id;
        log->seed = setup.seed;
        log->tick_limit = setup.tick_limit;
        log->archetype_table_hash = archetype_table_hash();
    }

    ResultBuilder builder;
    std::optional<Side> offender;
    std::string reason;
    std::optional<engine::Winner> terminal;
    while (!terminal) {
        ActionSet pa;
        ActionSet ea;
        try {
            pa = player.decide(state, Side::player);
        } catch (const nn::NonFiniteOutput& e) {
            offender = Side::player;
            reason = e.what();
            break;
        }
        try {
            ea = enemy.decide(state, Side::enemy);
        } catch (const nn::NonFiniteOutput& e) {
            offender = Side::enemy;
            reason = e.what();
            break;
        }
        // Evolved controllers only expose the five basic actions.
        pa.shoot_n = {};
        terminal = engine::advance(state, pa, ea);
        builder.record(state);
        if (log) log->ticks.emplace_back(pa, ea);
        if (observer) observer(state);
    }

    MatchReport report = builder.finish(state, terminal.value_or(engine::Winner::timeout));
    report.replay = std::move(log);
    if (offender) {
        forfeit(report, *offender);
        report.abort_reason = std::string(to_string(*offender)) + " controller: " + reason;
    }
    return report;
}

MatchReport resimulate(const replay::ReplayLog& log, const StateObserver& observer) {
    if (log.archetype_table_hash != 0 && log.archetype_table_hash != archetype_table_hash()) {
        throw ParseError("replay was recorded with a different archetype table (" + replay::hex64(log.archetype_table_hash) +
                         " vs " + replay::hex64(archetype_table_hash()) + ")");
    }
    engine::GameState state =
        engine::initial_state(builtin_stage(log.stage_id), enemies::builtin_archetype(log.archetype_id), log.seed, log.tick_limit);
    if (observer) observer(state);

    ResultBuilder builder;
    std::optional<engine::Winner> terminal;
    for (const auto& [pa, ea] : log.ticks) {
        if (terminal) throw ParseError("replay continues after the match ended");
        terminal = engine::advance(state, pa, ea);
        builder.record(state);
        if (observer) observer(state);
    }
    if (!terminal) throw ParseError("replay ends before the match is decided");
    MatchReport report = builder.finish(state, *terminal);
    report.replay = log;
    return report;
}

std::vector<std::size_t> draw_opponent_sample(std::span<const double> fitness, std::size_t sample_size, Rng& rng) {
    std::vector<std::size_t> all(fitness.size());
    std::iota(all.begin(), all.end(), 0);
    if (fitness.size() <= sample_size) return all;

    const auto best = static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    std::vector<std::size_t> rest;
    for (std::size_t i : all) {
        if (i != best) rest.push_back(i);
    }
    std::vector<std::size_t> sample{best};
    // Partial Fisher-Yates over the remaining members.
    for (std::size_t k = 0; k + 1 < sample_size; ++k) {
        const std::size_t j = std::uniform_int_distribution<std::size_t>(k, rest.size() - 1)(rng);
        std::swap(rest[k], rest[j]);
        sample.push_back(rest[k]);
    }
    return sample;
}

double generalization_fitness(std::span<const std::size_t> sample, const std::function<double(std::size_t)>& evaluate) {
    if (sample.empty()) throw ContractViolation("generalization fitness needs at least one opponent");
    double sum = 0.0;
    for (std::size_t o : sample) sum += evaluate(o);
    return sum / static_cast<double>(sample.size());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace evoman::eval
