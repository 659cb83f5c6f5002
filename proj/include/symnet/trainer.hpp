#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "symnet/network.hpp"
#include "symnet/rng.hpp"
#include "symnet/symfun.hpp"

namespace symnet {

// max(0, confidence - label * score)
double hinge_loss(double score, int label, double confidence);

enum class UpdateOutcome { skipped, applied };

// One hinge-gated SGD step on a single sample. When the sample's score is
// within the confidence gate, every parameter moves by step_size times its
// gradient taken at the current parameters: the hidden layer sees the
// current output weights, the output layer sees the activations from the
// current hidden layer. frozen_hidden skips the hidden-layer part.
UpdateOutcome sgd_update(TwoLayerNetwork& net, std::span<const double> x, int label,
                         double step_size, double confidence,
                         bool frozen_hidden = false);

struct TrainConfig {
    double step_size = 0.0;
    double confidence = 0.0;
    std::uint64_t max_updates = 100'000'000;
    std::uint64_t max_epochs = 1'000'000;
    bool shuffle_each_epoch = true;
    bool frozen_hidden = false;

    // fresh uniform inputs added to the training inputs for the monitors
    int monitor_probe_size = 0;
    // cap on how many training inputs join the probe set; 0 means all
    std::size_t monitor_train_cap = 0;
    // applied updates between monitor evaluations; 0 picks max_updates / 1000
    std::uint64_t monitor_cadence = 0;
    // epochs between trace rows; 0 picks max_epochs / 2000 (at least 1)
    std::uint64_t epoch_record_cadence = 0;
    // abort with MonitorViolation when a monitored quantity exceeds its bound
    bool enforce_stability_bounds = false;
    // keep the sequence of applied sample indices
    bool record_updates = false;
    // epochs between true-error estimates in the trace; 0 disables them
    std::uint64_t true_error_cadence = 0;
    std::function<double(const TwoLayerNetwork&)> true_error_fn;
};

enum class StopReason { zero_loss_epoch, max_updates, max_epochs };

struct EpochRecord {
    std::uint64_t epoch = 0;    // 1-based
    std::uint64_t updates = 0;  // cumulative applied updates
    double train_error = 0.0;
    double true_error = 0.0;  // NaN when not estimated this epoch
    double output_norm = 0.0;
    double max_drift = 0.0;
    double drift_bound = 0.0;
};

struct MonitorRecord {
    std::uint64_t t = 0;  // applied updates so far
    double output_norm = 0.0;
    double output_norm_bound = 0.0;
    double max_drift = 0.0;
    double drift_bound = 0.0;
    double embed_norm_max = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;
    std::vector<MonitorRecord> monitors;
    StopReason stop = StopReason::max_epochs;
    std::uint64_t total_updates = 0;
    std::uint64_t epochs_run = 0;
    double final_train_error = 0.0;
    double probe_embed_norm0 = 0.0;  // lifted radius of the probe set at t=0
    double probe_input_norm = 0.0;   // max input norm over the probe set
    double norm_scale = 0.0;         // R used in the bounds
    std::vector<std::uint32_t> update_sequence;
};

struct MonitorViolation : std::runtime_error {
    MonitorViolation(const std::string& what, std::uint64_t t_)
        : std::runtime_error(what), t(t_) {}
    std::uint64_t t = 0;
};

struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, std::uint64_t t_)
        : std::runtime_error(what), t(t_) {}
    std::uint64_t t = 0;
};

// Epoch SGD on the hinge gate. Stops at the first epoch that applies no
// update (every sample cleared the gate), or at the update or epoch cap.
// Monitors compare the output-weight norm against 2*sqrt(3)*R*step*sqrt(t)
// and the hidden embedding drift against 2*sqrt(6)*Rx^2*step^2*R*t^(3/2),
// where R = max(initial lifted probe radius, sqrt(confidence/step)) and Rx
// is the largest input norm in the probe set.
TrainTrace train(TwoLayerNetwork& net, const Dataset& ds, const TrainConfig& cfg,
                 Rng& rng);

// Largest distance between current and reference hidden activations over the
// probe inputs (count rows of net.input_dim each).
double embedding_drift(const TwoLayerNetwork& net, const Embedding& at_start,
                       std::span<const double> probe_inputs, std::size_t count);

// header: epoch,updates,train_error,true_error,M_norm,max_drift,drift_bound
// (true_error left empty when it was not estimated that epoch)
void write_csv(const TrainTrace& trace, std::ostream& out);

const char* to_string(StopReason reason);

}  // namespace symnet
