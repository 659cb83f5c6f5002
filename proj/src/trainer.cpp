#include "symnet/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "symnet/kernels.hpp"

namespace symnet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// gate + step shared by the public sgd_update and the training loop; v must
// have hidden_width slots and receives the activations either way
UpdateOutcome gated_step(TwoLayerNetwork& net, const double* x, int label,
                         double step, double confidence, bool frozen, double* v,
                         double& score_out) {
    const auto& ops = kernels::active();
    auto rows = static_cast<std::size_t>(net.hidden_width);
    auto cols = static_cast<std::size_t>(net.input_dim);
    ops.dense_relu(net.hidden_weights.data(), net.hidden_bias.data(), x, rows, cols, v);
    double s = ops.dot(net.output_weights.data(), v, rows) + net.output_bias;
    score_out = s;
    if (!(label * s <= confidence)) return UpdateOutcome::skipped;
    if (!frozen) {
        // hidden layer moves by the gradient through the current output
        // weights; only units that fired (v > 0) have a gradient
        for (std::size_t r = 0; r < rows; ++r) {
            if (v[r] <= 0.0) continue;
            double alpha = label * step * net.output_weights[r];
            if (alpha == 0.0) continue;
            ops.axpy(alpha, x, net.hidden_weights.data() + r * cols, cols);
            net.hidden_bias[r] += alpha;
        }
    }
    ops.axpy(label * step, v, net.output_weights.data(), rows);
    net.output_bias += label * step;
    return UpdateOutcome::applied;
}

void check_train_args(const TwoLayerNetwork& net, int n, double step, double confidence) {
    if (net.activation != Activation::relu)
        throw std::invalid_argument("train: relu activation required");
    if (net.input_dim != n)
        throw std::invalid_argument("train: input dimension mismatch");
    if (step <= 0.0) throw std::invalid_argument("train: step_size must be positive");
    if (confidence < 0.0)
        throw std::invalid_argument("train: confidence must be nonnegative");
}

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

double hinge_loss(double score, int label, double confidence) {
    double loss = confidence - label * score;
    return loss > 0.0 ? loss : 0.0;
}

UpdateOutcome sgd_update(TwoLayerNetwork& net, std::span<const double> x, int label,
                         double step_size, double confidence, bool frozen_hidden) {
    check_train_args(net, static_cast<int>(x.size()), step_size, confidence);
    if (label != 1 && label != -1)
        throw std::invalid_argument("sgd_update: label must be +/-1");
    std::vector<double> v(static_cast<std::size_t>(net.hidden_width));
    double score = 0.0;
    return gated_step(net, x.data(), label, step_size, confidence, frozen_hidden,
                      v.data(), score);
}

double embedding_drift(const TwoLayerNetwork& net, const Embedding& at_start,
                       std::span<const double> probe_inputs, std::size_t count) {
    if (at_start.count != count)
        throw std::invalid_argument("embedding_drift: probe count mismatch");
    if (at_start.dim != net.hidden_width + 1)
        throw std::invalid_argument("embedding_drift: embedding width mismatch");
    const auto& ops = kernels::active();
    auto rows = static_cast<std::size_t>(net.hidden_width);
    auto cols = static_cast<std::size_t>(net.input_dim);
    std::vector<double> v(rows);
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        ops.dense_relu(net.hidden_weights.data(), net.hidden_bias.data(),
                       probe_inputs.data() + i * cols, rows, cols, v.data());
        // the constant lift coordinate never moves, so compare hidden coords
        double d = ops.dist_sq(v.data(), at_start.point(i).data(), rows);
        if (d > worst) worst = d;
    }
    return std::sqrt(worst);
}

TrainTrace train(TwoLayerNetwork& net, const Dataset& ds, const TrainConfig& cfg,
                 Rng& rng) {
    check_train_args(net, ds.n, cfg.step_size, cfg.confidence);
    const auto& ops = kernels::active();
    const auto rows = static_cast<std::size_t>(net.hidden_width);
    const auto cols = static_cast<std::size_t>(net.input_dim);
    const std::size_t m = ds.count;
    const double h = cfg.step_size;
    const double beta = cfg.confidence;

    // probe set: training inputs (possibly capped) plus fresh uniform ones
    std::size_t probe_train =
        cfg.monitor_train_cap == 0 ? m : std::min(m, cfg.monitor_train_cap);
    std::size_t probe_count = probe_train + static_cast<std::size_t>(cfg.monitor_probe_size);
    std::vector<double> probe_inputs(probe_count * cols);
    std::copy_n(ds.inputs.begin(), probe_train * cols, probe_inputs.begin());
    for (std::size_t i = probe_train; i < probe_count; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            probe_inputs[i * cols + j] = rng.bernoulli(0.5) ? 1.0 : 0.0;

    TrainTrace trace;
    Embedding probe0 = embed(net, probe_inputs, probe_count);
    trace.probe_embed_norm0 = probe0.max_norm();
    for (std::size_t i = 0; i < probe_count; ++i) {
        double sq = ops.sum_sq(probe_inputs.data() + i * cols, cols);
        trace.probe_input_norm = std::max(trace.probe_input_norm, std::sqrt(sq));
    }
    trace.norm_scale =
        std::max(trace.probe_embed_norm0, beta > 0.0 ? std::sqrt(beta / h) : 0.0);

    const double norm_factor = 2.0 * std::sqrt(3.0) * trace.norm_scale * h;
    const double drift_factor = 2.0 * std::sqrt(6.0) * trace.probe_input_norm *
                                trace.probe_input_norm * h * h * trace.norm_scale;

    // frozen-hidden training is exactly the confidence-gated perceptron on
    // the lifted embedding, with (output_weights, output_bias) packed into
    // one vector; keeping the arithmetic identical to run_modified_perceptron
    // is intentional
    const bool frozen = cfg.frozen_hidden;
    Embedding lifted;
    std::vector<double> packed;
    if (frozen) {
        lifted = embed(net, ds);
        packed = net.output_weights;
        packed.push_back(net.output_bias);
    }
    auto sync_packed = [&] {
        if (!frozen) return;
        std::copy_n(packed.begin(), rows, net.output_weights.begin());
        net.output_bias = packed[rows];
    };

    std::vector<double> v(rows);
    std::uint64_t monitor_cadence = cfg.monitor_cadence;
    if (monitor_cadence == 0) monitor_cadence = std::max<std::uint64_t>(1, cfg.max_updates / 1000);
    std::uint64_t epoch_cadence = cfg.epoch_record_cadence;
    if (epoch_cadence == 0) epoch_cadence = std::max<std::uint64_t>(1, cfg.max_epochs / 2000);

    std::uint64_t t = 0;

    // measured quantities against their envelopes at update count t
    auto eval_monitor = [&](MonitorRecord& rec) {
        rec.t = t;
        sync_packed();
        rec.output_norm = std::sqrt(ops.sum_sq(net.output_weights.data(), rows));
        rec.output_norm_bound = norm_factor * std::sqrt(static_cast<double>(t));
        if (frozen) {
            rec.max_drift = 0.0;
            rec.embed_norm_max = trace.probe_embed_norm0;
        } else {
            double worst = 0.0;
            double norm_max_sq = 0.0;
            for (std::size_t i = 0; i < probe_count; ++i) {
                ops.dense_relu(net.hidden_weights.data(), net.hidden_bias.data(),
                               probe_inputs.data() + i * cols, rows, cols, v.data());
                double d = ops.dist_sq(v.data(), probe0.point(i).data(), rows);
                worst = std::max(worst, d);
                norm_max_sq = std::max(norm_max_sq, ops.sum_sq(v.data(), rows) + 1.0);
            }
            rec.max_drift = std::sqrt(worst);
            rec.embed_norm_max = std::sqrt(norm_max_sq);
        }
        rec.drift_bound = drift_factor * std::pow(static_cast<double>(t), 1.5);
        if (!std::isfinite(rec.output_norm) || !std::isfinite(rec.max_drift))
            throw DivergenceError("train: non-finite weights after " +
                                      std::to_string(t) + " updates",
                                  t);
    };

    auto check_monitor = [&] {
        MonitorRecord rec;
        eval_monitor(rec);
        trace.monitors.push_back(rec);
        if (!cfg.enforce_stability_bounds) return;
        if (rec.output_norm > rec.output_norm_bound)
            throw MonitorViolation("train: output norm " + fmt(rec.output_norm) +
                                       " exceeds bound " + fmt(rec.output_norm_bound) +
                                       " at t=" + std::to_string(t),
                                   t);
        if (rec.max_drift > rec.drift_bound)
            throw MonitorViolation("train: embedding drift " + fmt(rec.max_drift) +
                                       " exceeds bound " + fmt(rec.drift_bound) +
                                       " at t=" + std::to_string(t),
                                   t);
    };

    auto current_train_error = [&]() -> double {
        if (m == 0) return 0.0;
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double s;
            if (frozen) {
                auto p = lifted.point(i);
                s = ops.dot(packed.data(), p.data(), p.size());
            } else {
                ops.dense_relu(net.hidden_weights.data(), net.hidden_bias.data(),
                               ds.inputs.data() + i * cols, rows, cols, v.data());
                s = ops.dot(net.output_weights.data(), v.data(), rows) + net.output_bias;
            }
            if ((s > 0.0 ? 1 : -1) != ds.labels[i]) ++wrong;
        }
        return static_cast<double>(wrong) / static_cast<double>(m);
    };

    std::vector<std::uint32_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = static_cast<std::uint32_t>(i);

    bool hit_update_cap = cfg.max_updates == 0;
    std::uint64_t epoch = 0;
    bool zero_loss = false;

    while (!hit_update_cap && epoch < cfg.max_epochs) {
        ++epoch;
        if (cfg.shuffle_each_epoch && m > 1) {
            for (std::size_t i = m - 1; i > 0; --i)
                std::swap(order[i], order[rng.below(i + 1)]);
        }
        std::uint64_t applied = 0;
        for (std::uint32_t idx : order) {
            const double* x = ds.inputs.data() + static_cast<std::size_t>(idx) * cols;
            int y = ds.labels[idx];
            UpdateOutcome outcome;
            if (frozen) {
                auto p = lifted.point(idx);
                double s = y * ops.dot(packed.data(), p.data(), p.size());
                if (!std::isfinite(s))
                    throw DivergenceError("train: non-finite score after " +
                                              std::to_string(t) + " updates",
                                          t);
                if (s <= beta) {
                    ops.axpy(y * h, p.data(), packed.data(), p.size());
                    outcome = UpdateOutcome::applied;
                } else {
                    outcome = UpdateOutcome::skipped;
                }
            } else {
                double s = 0.0;
                outcome = gated_step(net, x, y, h, beta, false, v.data(), s);
                if (!std::isfinite(s))
                    throw DivergenceError("train: non-finite score after " +
                                              std::to_string(t) + " updates",
                                          t);
            }
            if (outcome == UpdateOutcome::applied) {
                ++t;
                ++applied;
                if (cfg.record_updates) trace.update_sequence.push_back(idx);
                if (t % monitor_cadence == 0) check_monitor();
                if (t >= cfg.max_updates) {
                    hit_update_cap = true;
                    break;
                }
            }
        }
        zero_loss = !hit_update_cap && applied == 0;
        bool stopping = hit_update_cap || zero_loss || epoch >= cfg.max_epochs;
        if (epoch == 1 || epoch % epoch_cadence == 0 || stopping) {
            EpochRecord rec;
            rec.epoch = epoch;
            rec.updates = t;
            rec.train_error = current_train_error();
            rec.true_error = kNan;
            if (cfg.true_error_fn && cfg.true_error_cadence > 0 &&
                (epoch % cfg.true_error_cadence == 0 || stopping)) {
                sync_packed();
                rec.true_error = cfg.true_error_fn(net);
            }
            MonitorRecord mon;
            eval_monitor(mon);
            rec.output_norm = mon.output_norm;
            rec.max_drift = mon.max_drift;
            rec.drift_bound = mon.drift_bound;
            trace.epochs.push_back(rec);
            trace.final_train_error = rec.train_error;
        }
        if (stopping) break;
    }

    // make sure the last state is monitored even off cadence
    if (t > 0 && (trace.monitors.empty() || trace.monitors.back().t != t))
        check_monitor();

    sync_packed();
    trace.total_updates = t;
    trace.epochs_run = epoch;
    if (trace.epochs.empty()) trace.final_train_error = current_train_error();
    trace.stop = hit_update_cap  ? StopReason::max_updates
                 : zero_loss    ? StopReason::zero_loss_epoch
                                : StopReason::max_epochs;
    return trace;
}

void write_csv(const TrainTrace& trace, std::ostream& out) {
    out << "epoch,updates,train_error,true_error,M_norm,max_drift,drift_bound\n";
    for (const EpochRecord& rec : trace.epochs) {
        out << rec.epoch << ',' << rec.updates << ',' << fmt(rec.train_error) << ',';
        if (!std::isnan(rec.true_error)) out << fmt(rec.true_error);
        out << ',' << fmt(rec.output_norm) << ',' << fmt(rec.max_drift) << ','
            << fmt(rec.drift_bound) << '\n';
    }
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::zero_loss_epoch: return "zero_loss_epoch";
        case StopReason::max_updates: return "max_updates";
        case StopReason::max_epochs: return "max_epochs";
    }
    return "unknown";
}

}  // namespace symnet
