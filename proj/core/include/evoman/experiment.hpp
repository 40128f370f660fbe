#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evoman/campaign.hpp"

namespace evoman::experiment {

inline constexpr int config_format_version = 1;
/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "EVOMAN_OUTPUT_DIR";

enum class CampaignKind { baseline, coevolution, single_match };
const char* to_string(CampaignKind k);

/// One side of a single_match campaign.
struct MatchSide {
    enum class Kind { genome, scripted, random, idle };
    Kind kind = Kind::idle;
    std::filesystem::path genome;

    friend bool operator==(const MatchSide&, const MatchSide&) = default;
};

struct ExperimentConfig {
    CampaignKind campaign = CampaignKind::baseline;
    campaign::Algorithm algorithm = campaign::Algorithm::neat;
    std::vector<int> enemies;
    std::vector<std::uint64_t> seeds;
    /// Baseline generations per (enemy, seed) run.
    int generations = 50;
    int tick_limit = engine::default_tick_limit;
    std::size_t threads = 0;
    /// Empty: $EVOMAN_OUTPUT_DIR, else ./evoman-output.
    std::filesystem::path output_dir;

    std::optional<ga::GaConfig> ga;
    std::optional<neat::NeatConfig> neat;
    eval::FitnessWeights player_weights = eval::FitnessWeights::player_default();
    eval::FitnessWeights enemy_weights = eval::FitnessWeights::enemy_default();
    campaign::CoevolutionSchedule schedule;
    std::size_t sample_size = 5;

    MatchSide match_player{MatchSide::Kind::idle, {}};
    MatchSide match_enemy{MatchSide::Kind::scripted, {}};

    /// Throws ConfigError naming the offending field.
    void validate() const;
    campaign::AlgorithmConfig algorithm_config() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses a YAML experiment file. Errors carry `<source>:<line>:` prefixes.
ExperimentConfig parse_config(const std::string& yaml, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& file);
/// Canonical YAML text; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ExperimentConfig& config);
/// Provenance hash of the canonical text (output_dir and threads excluded).
std::uint64_t config_hash(const ExperimentConfig& config);

std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

struct RunOptions {
    /// Stop after this many generations in total (simulates an interrupted run).
    std::optional<int> stop_after_generations;
    std::function<void(const std::string&)> log;
};

struct RunSummary {
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> csv_files;
    std::vector<std::filesystem::path> genome_files;
    std::vector<std::filesystem::path> replay_files;
    /// False when stopped early by RunOptions::stop_after_generations.
    bool complete = true;
};

/// Runs every (enemy, seed) job of the campaign, resuming from checkpoints left by an
/// interrupted run with the same config hash.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Name stem shared by a job's CSV, genome, replay and checkpoint files.
std::string job_stem(const ExperimentConfig& config, int enemy_id, std::uint64_t seed);

/// `# config_hash=<hex> master_seed=<seed>` provenance line.
std::string provenance_line(std::uint64_t config_hash, const std::string& master_seed);

struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    const std::string& at(std::size_t row, const std::string& column) const;
};

/// Minimal reader for the CSV files written here (no quoting).
CsvTable read_csv(const std::filesystem::path& file);

}  // namespace evoman::experiment
