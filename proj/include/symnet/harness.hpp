#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "symnet/expr.hpp"
#include "symnet/network.hpp"
#include "symnet/symfun.hpp"
#include "symnet/trainer.hpp"

namespace symnet {

// misclassification rate against f on sample_count fresh uniform inputs
double estimate_true_error(const TwoLayerNetwork& net, const SymmetricFunction& f,
                           std::size_t sample_count, Rng& rng);

// misclassification rate on the dataset itself; 0 for an empty dataset
double train_error(const TwoLayerNetwork& net, const Dataset& ds);

// fraction of random pairs (x, shuffle(x)) that get the same prediction;
// both elements of a pair share a Hamming weight by construction
double weight_class_agreement(const TwoLayerNetwork& net, int n, std::size_t pairs,
                              Rng& rng);

enum class TargetKind { parity, majority, random_symmetric, explicit_support };
enum class InitKind { symmetric, random };
enum class CorruptionKind { none, label_flip, input_shift };

// One training arm of an experiment. Parameter expressions are evaluated
// once n is known, with R = n^(3/2); the step size is evaluated first so
// the confidence expression may refer to h.
struct RunSpec {
    std::string name;
    TargetKind target = TargetKind::random_symmetric;
    std::vector<int> explicit_support;
    InitKind init = InitKind::symmetric;
    double random_scale = 1.0;
    bool frozen_hidden = false;
    ParamExpr sample_size;
    ParamExpr step_size;
    ParamExpr confidence;
    CorruptionKind corruption = CorruptionKind::none;
    double corruption_param = 0.0;
    std::uint64_t max_epochs = 1'000'000;
    // 0 derives a cap from the initial-margin certificate for symmetric
    // init (10x the guaranteed update bound); random init falls back to
    // the trainer default
    std::uint64_t max_updates = 0;
    std::uint64_t epoch_record_cadence = 0;
    std::uint64_t true_error_cadence = 0;  // 0: only the final estimate
    int monitor_probe_size = 32;
    std::size_t monitor_train_cap = 0;
    bool enforce_stability_bounds = false;
};

struct ExperimentConfig {
    std::string preset = "custom";
    int n = 0;
    int seeds = 10;
    std::vector<RunSpec> arms;
    std::string note;
};

struct RunSummary {
    std::string arm;
    int seed_index = 0;
    StopReason stop = StopReason::max_epochs;
    std::uint64_t epochs = 0;
    std::uint64_t updates = 0;
    double final_train_error = 0.0;
    double final_true_error = 0.0;
    std::string error;  // nonempty when the run aborted
};

struct ArmAggregate {
    std::string arm;
    double mean_train = 0.0, min_train = 0.0, max_train = 0.0;
    double mean_true = 0.0, min_true = 0.0, max_true = 0.0;
    double mean_updates = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::uint64_t base_seed = 0;
    // arm-major: summaries[a * seeds + s]
    std::vector<RunSummary> summaries;
    std::vector<TrainTrace> traces;

    bool has_errors() const;
    std::vector<ArmAggregate> aggregates() const;  // over clean runs only
};

std::vector<std::string> preset_names();
// desk-scale presets fig1a..fig7; throws on unknown ids
ExperimentConfig figure_preset(const std::string& id);

ExperimentConfig config_from_json(std::istream& in);
void config_to_json(const ExperimentConfig& cfg, std::ostream& out);

// Runs every (arm, seed) pair, each on its own seeded stream, so results do
// not depend on jobs. Aborted runs carry their message in the summary
// instead of unwinding the whole experiment.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                int jobs = 1);

// out_dir/<preset>/<seed>/trace.csv (trace-<arm>.csv when several arms),
// out_dir/<preset>/summary.csv and out_dir/<preset>/figure.svg
void write_experiment_csv(const ExperimentResult& result,
                          const std::filesystem::path& out_dir);
void write_experiment_svg(const ExperimentResult& result,
                          const std::filesystem::path& svg_path);

const char* to_string(TargetKind kind);
const char* to_string(InitKind kind);
const char* to_string(CorruptionKind kind);

}  // namespace symnet
