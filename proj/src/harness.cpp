#include "symnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "symnet/kernels.hpp"
#include "symnet/perceptron.hpp"

namespace symnet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kTrueErrorSamples = 10'000;

}  // namespace

double estimate_true_error(const TwoLayerNetwork& net, const SymmetricFunction& f,
                           std::size_t sample_count, Rng& rng) {
    if (net.input_dim != f.n)
        throw std::invalid_argument("estimate_true_error: dimension mismatch");
    if (sample_count == 0)
        throw std::invalid_argument("estimate_true_error: sample_count must be positive");
    std::vector<double> x(static_cast<std::size_t>(f.n));
    std::vector<double> v(static_cast<std::size_t>(net.hidden_width));
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        int weight = 0;
        for (int j = 0; j < f.n; ++j) {
            bool one = rng.bernoulli(0.5);
            x[static_cast<std::size_t>(j)] = one ? 1.0 : 0.0;
            weight += one ? 1 : 0;
        }
        double s = forward(net, x, v);
        if ((s > 0.0 ? 1 : -1) != f.label_of_weight(weight)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(sample_count);
}

double train_error(const TwoLayerNetwork& net, const Dataset& ds) {
    if (ds.count == 0) return 0.0;
    if (ds.n != net.input_dim)
        throw std::invalid_argument("train_error: dimension mismatch");
    std::vector<double> v(static_cast<std::size_t>(net.hidden_width));
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < ds.count; ++i) {
        double s = forward(net, ds.input(i), v);
        if ((s > 0.0 ? 1 : -1) != ds.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.count);
}

double weight_class_agreement(const TwoLayerNetwork& net, int n, std::size_t pairs,
                              Rng& rng) {
    if (net.input_dim != n)
        throw std::invalid_argument("weight_class_agreement: dimension mismatch");
    if (pairs == 0)
        throw std::invalid_argument("weight_class_agreement: pairs must be positive");
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    std::vector<double> v(static_cast<std::size_t>(net.hidden_width));
    std::size_t same = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        for (int j = 0; j < n; ++j)
            x[static_cast<std::size_t>(j)] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        y = x;
        // a uniform coordinate shuffle keeps the Hamming weight
        for (std::size_t j = y.size(); j > 1; --j)
            std::swap(y[j - 1], y[rng.below(j)]);
        double sx = forward(net, x, v);
        double sy = forward(net, y, v);
        if ((sx > 0.0) == (sy > 0.0)) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(pairs);
}

const char* to_string(TargetKind kind) {
    switch (kind) {
        case TargetKind::parity: return "parity";
        case TargetKind::majority: return "majority";
        case TargetKind::random_symmetric: return "random_symmetric";
        case TargetKind::explicit_support: return "support";
    }
    return "unknown";
}

const char* to_string(InitKind kind) {
    return kind == InitKind::symmetric ? "symmetric" : "random";
}

const char* to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::none: return "none";
        case CorruptionKind::label_flip: return "label_flip";
        case CorruptionKind::input_shift: return "input_shift";
    }
    return "unknown";
}

namespace {

TargetKind target_from_string(const std::string& s) {
    if (s == "parity") return TargetKind::parity;
    if (s == "majority") return TargetKind::majority;
    if (s == "random_symmetric") return TargetKind::random_symmetric;
    if (s == "support") return TargetKind::explicit_support;
    throw std::invalid_argument("unknown target '" + s + "'");
}

InitKind init_from_string(const std::string& s) {
    if (s == "symmetric") return InitKind::symmetric;
    if (s == "random") return InitKind::random;
    throw std::invalid_argument("unknown init '" + s + "'");
}

CorruptionKind corruption_from_string(const std::string& s) {
    if (s == "none") return CorruptionKind::none;
    if (s == "label_flip") return CorruptionKind::label_flip;
    if (s == "input_shift") return CorruptionKind::input_shift;
    throw std::invalid_argument("unknown corruption '" + s + "'");
}

RunSpec base_arm(const std::string& name) {
    RunSpec spec;
    spec.name = name;
    spec.sample_size = ParamExpr::parse("n");
    spec.step_size = ParamExpr::parse("n^-6");
    spec.confidence = ParamExpr::parse("n^3*h");
    return spec;
}

ExperimentConfig preset_fig1(int n, int seeds, const char* id) {
    ExperimentConfig cfg;
    cfg.preset = id;
    cfg.n = n;
    cfg.seeds = seeds;
    RunSpec frozen = base_arm("frozen");
    frozen.frozen_hidden = true;
    frozen.enforce_stability_bounds = true;
    frozen.max_epochs = n >= 60 ? 4'000'000 : 400'000;
    frozen.epoch_record_cadence = n >= 60 ? 2000 : 500;
    frozen.true_error_cadence = n >= 60 ? 400'000 : 50'000;
    RunSpec full = frozen;
    full.name = "full";
    full.frozen_hidden = false;
    cfg.arms = {frozen, full};
    return cfg;
}

ExperimentConfig preset_fig2() {
    ExperimentConfig cfg;
    cfg.preset = "fig2";
    cfg.n = 30;
    cfg.seeds = 10;
    for (int k = 2; k <= 4; ++k) {
        RunSpec arm = base_arm("h-n" + std::to_string(k));
        arm.step_size = ParamExpr::parse("n^-" + std::to_string(k));
        arm.max_epochs = 150'000;
        arm.epoch_record_cadence = 150;
        arm.true_error_cadence = 15'000;
        arm.max_updates = 5'000'000;
        cfg.arms.push_back(arm);
    }
    return cfg;
}

ExperimentConfig preset_fig3() {
    ExperimentConfig cfg;
    cfg.preset = "fig3";
    cfg.n = 30;
    cfg.seeds = 10;
    RunSpec arm = base_arm("beta0");
    arm.confidence = ParamExpr::parse("0");
    arm.enforce_stability_bounds = true;
    arm.max_epochs = 400'000;
    arm.epoch_record_cadence = 500;
    arm.true_error_cadence = 50'000;
    cfg.arms.push_back(arm);
    return cfg;
}

ExperimentConfig preset_fig45(const char* id, TargetKind target) {
    ExperimentConfig cfg;
    cfg.preset = id;
    cfg.n = 20;
    cfg.seeds = 10;
    const std::uint64_t epochs[] = {400'000, 60'000, 8'000, 800};
    for (int k = 1; k <= 4; ++k) {
        RunSpec sym = base_arm("sym-n" + std::to_string(k));
        sym.target = target;
        sym.sample_size = ParamExpr::parse(k == 1 ? "n" : "n^" + std::to_string(k));
        sym.max_epochs = epochs[k - 1];
        sym.epoch_record_cadence = std::max<std::uint64_t>(1, epochs[k - 1] / 1000);
        sym.true_error_cadence = std::max<std::uint64_t>(1, epochs[k - 1] / 100);
        sym.monitor_train_cap = 256;
        cfg.arms.push_back(sym);

        RunSpec rnd = sym;
        rnd.name = "rand-n" + std::to_string(k);
        rnd.init = InitKind::random;
        rnd.step_size = ParamExpr::parse("n^-2");
        rnd.max_updates = 5'000'000;
        cfg.arms.push_back(rnd);
    }
    return cfg;
}

ExperimentConfig preset_fig67(const char* id, CorruptionKind corruption) {
    ExperimentConfig cfg;
    cfg.preset = id;
    cfg.n = 30;
    cfg.seeds = 10;
    RunSpec arm = base_arm(corruption == CorruptionKind::label_flip ? "flip10" : "shift10");
    arm.sample_size = ParamExpr::parse("10*n");
    arm.corruption = corruption;
    arm.corruption_param = 0.1;
    arm.max_epochs = corruption == CorruptionKind::label_flip ? 60'000 : 200'000;
    arm.max_updates =
        corruption == CorruptionKind::label_flip ? 1'500'000 : 10'000'000;
    arm.epoch_record_cadence = arm.max_epochs / 1000;
    arm.true_error_cadence = arm.max_epochs / 100;
    cfg.arms.push_back(arm);
    return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

ExperimentConfig figure_preset(const std::string& id) {
    if (id == "fig1a") return preset_fig1(30, 10, "fig1a");
    if (id == "fig1b") {
        ExperimentConfig cfg = preset_fig1(60, 1, "fig1b");
        cfg.note = "slow: the full arm takes hours at n=60";
        return cfg;
    }
    if (id == "fig2") return preset_fig2();
    if (id == "fig3") return preset_fig3();
    if (id == "fig4") return preset_fig45("fig4", TargetKind::parity);
    if (id == "fig5") return preset_fig45("fig5", TargetKind::random_symmetric);
    if (id == "fig6") return preset_fig67("fig6", CorruptionKind::label_flip);
    if (id == "fig7") return preset_fig67("fig7", CorruptionKind::input_shift);
    throw std::invalid_argument("unknown preset '" + id + "'");
}

ExperimentConfig config_from_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    ExperimentConfig cfg;
    cfg.preset = j.value("preset", std::string("custom"));
    cfg.n = j.at("n").get<int>();
    cfg.seeds = j.value("seeds", 10);
    cfg.note = j.value("note", std::string());
    if (!j.contains("arms") || !j["arms"].is_array() || j["arms"].empty())
        throw std::invalid_argument("config: at least one arm required");
    for (const auto& a : j["arms"]) {
        RunSpec spec;
        spec.name = a.at("name").get<std::string>();
        spec.target = target_from_string(a.value("target", std::string("random_symmetric")));
        if (a.contains("support"))
            spec.explicit_support = a["support"].get<std::vector<int>>();
        spec.init = init_from_string(a.value("init", std::string("symmetric")));
        spec.random_scale = a.value("random_scale", 1.0);
        spec.frozen_hidden = a.value("frozen_hidden", false);
        spec.sample_size = ParamExpr::parse(a.value("m", std::string("n")));
        spec.step_size = ParamExpr::parse(a.value("h", std::string("n^-6")));
        spec.confidence = ParamExpr::parse(a.value("beta", std::string("n^3*h")));
        spec.corruption = corruption_from_string(a.value("corruption", std::string("none")));
        spec.corruption_param = a.value("corruption_param", 0.0);
        spec.max_epochs = a.value("max_epochs", std::uint64_t{1'000'000});
        spec.max_updates = a.value("max_updates", std::uint64_t{0});
        spec.epoch_record_cadence = a.value("epoch_record_cadence", std::uint64_t{0});
        spec.true_error_cadence = a.value("true_error_cadence", std::uint64_t{0});
        spec.monitor_probe_size = a.value("monitor_probe_size", 32);
        spec.monitor_train_cap = a.value("monitor_train_cap", std::size_t{0});
        spec.enforce_stability_bounds = a.value("enforce_stability_bounds", false);
        cfg.arms.push_back(std::move(spec));
    }
    return cfg;
}

void config_to_json(const ExperimentConfig& cfg, std::ostream& out) {
    nlohmann::json j;
    j["preset"] = cfg.preset;
    j["n"] = cfg.n;
    j["seeds"] = cfg.seeds;
    j["note"] = cfg.note;
    j["arms"] = nlohmann::json::array();
    for (const RunSpec& spec : cfg.arms) {
        nlohmann::json a;
        a["name"] = spec.name;
        a["target"] = to_string(spec.target);
        if (spec.target == TargetKind::explicit_support)
            a["support"] = spec.explicit_support;
        a["init"] = to_string(spec.init);
        a["random_scale"] = spec.random_scale;
        a["frozen_hidden"] = spec.frozen_hidden;
        a["m"] = spec.sample_size.text();
        a["h"] = spec.step_size.text();
        a["beta"] = spec.confidence.text();
        a["corruption"] = to_string(spec.corruption);
        a["corruption_param"] = spec.corruption_param;
        a["max_epochs"] = spec.max_epochs;
        a["max_updates"] = spec.max_updates;
        a["epoch_record_cadence"] = spec.epoch_record_cadence;
        a["true_error_cadence"] = spec.true_error_cadence;
        a["monitor_probe_size"] = spec.monitor_probe_size;
        a["monitor_train_cap"] = spec.monitor_train_cap;
        a["enforce_stability_bounds"] = spec.enforce_stability_bounds;
        j["arms"].push_back(a);
    }
    out << j.dump(2) << '\n';
}

namespace {

SymmetricFunction make_target(const RunSpec& spec, int n, Rng& rng) {
    switch (spec.target) {
        case TargetKind::parity: return SymmetricFunction::parity(n);
        case TargetKind::majority: return SymmetricFunction::majority(n);
        case TargetKind::random_symmetric: return SymmetricFunction::random(n, rng);
        case TargetKind::explicit_support:
            return SymmetricFunction::from_support(n, spec.explicit_support);
    }
    throw std::logic_error("make_target: bad kind");
}

struct RunOutput {
    RunSummary summary;
    TrainTrace trace;
};

RunOutput run_single(int n, const RunSpec& spec, Rng task, int seed_index) {
    Rng rng_target = task.fork(1);
    Rng rng_data = task.fork(2);
    Rng rng_init = task.fork(3);
    Rng rng_train = task.fork(4);
    Rng rng_eval = task.fork(5);

    RunOutput out;
    out.summary.arm = spec.name;
    out.summary.seed_index = seed_index;
    out.summary.final_train_error = kNan;
    out.summary.final_true_error = kNan;

    try {
        SymmetricFunction f = make_target(spec, n, rng_target);
        double radius = std::pow(static_cast<double>(n), 1.5);
        double h = spec.step_size.eval(n, kNan, radius);
        double beta = spec.confidence.eval(n, h, radius);
        double m_raw = spec.sample_size.eval(n, h, radius);
        if (!(m_raw >= 1.0))
            throw std::invalid_argument("arm '" + spec.name + "': sample size below 1");
        auto m = static_cast<std::size_t>(std::llround(m_raw));

        Dataset ds = sample_dataset(f, m, rng_data);
        if (spec.corruption == CorruptionKind::label_flip)
            ds = flip_labels(ds, spec.corruption_param, rng_data);
        else if (spec.corruption == CorruptionKind::input_shift)
            ds = perturb_inputs(ds, spec.corruption_param, rng_data);

        TwoLayerNetwork net = spec.init == InitKind::symmetric
                                  ? symmetric_init(n)
                                  : random_init(n, 4 * n + 2, spec.random_scale, rng_init);

        TrainConfig tc;
        tc.step_size = h;
        tc.confidence = beta;
        tc.max_epochs = spec.max_epochs;
        tc.frozen_hidden = spec.frozen_hidden;
        tc.monitor_probe_size = spec.monitor_probe_size;
        tc.monitor_train_cap = spec.monitor_train_cap;
        tc.epoch_record_cadence = spec.epoch_record_cadence;
        tc.enforce_stability_bounds = spec.enforce_stability_bounds;
        tc.true_error_cadence = spec.true_error_cadence;
        if (spec.true_error_cadence > 0)
            tc.true_error_fn = [&](const TwoLayerNetwork& current) {
                return estimate_true_error(current, f, kTrueErrorSamples, rng_eval);
            };
        tc.max_updates = spec.max_updates;
        if (tc.max_updates == 0) {
            if (spec.init == InitKind::symmetric) {
                // cap at 10x the certified update bound for this target
                SeparatorCertificate cert = initial_margin_certificate(n, f);
                Embedding classes = initial_embedding_classes(n);
                double r_used = std::max(classes.max_norm(),
                                         beta > 0.0 ? std::sqrt(beta / h) : 0.0);
                PerceptronBounds pb =
                    perceptron_bounds(cert.margin_lb, r_used, h, beta);
                tc.max_updates = 10 * static_cast<std::uint64_t>(std::ceil(pb.update_bound));
            } else {
                tc.max_updates = TrainConfig{}.max_updates;
            }
        }

        out.trace = train(net, ds, tc, rng_train);
        out.summary.stop = out.trace.stop;
        out.summary.epochs = out.trace.epochs_run;
        out.summary.updates = out.trace.total_updates;
        out.summary.final_train_error = out.trace.final_train_error;
        out.summary.final_true_error =
            estimate_true_error(net, f, kTrueErrorSamples, rng_eval);
    } catch (const std::exception& e) {
        out.summary.error = e.what();
    }
    return out;
}

}  // namespace

bool ExperimentResult::has_errors() const {
    for (const RunSummary& s : summaries)
        if (!s.error.empty()) return true;
    return false;
}

std::vector<ArmAggregate> ExperimentResult::aggregates() const {
    std::vector<ArmAggregate> aggs;
    auto seeds = static_cast<std::size_t>(config.seeds);
    for (std::size_t a = 0; a < config.arms.size(); ++a) {
        ArmAggregate agg;
        agg.arm = config.arms[a].name;
        double sum_train = 0.0, sum_true = 0.0, sum_updates = 0.0;
        std::size_t clean = 0;
        agg.min_train = agg.min_true = std::numeric_limits<double>::infinity();
        agg.max_train = agg.max_true = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < seeds; ++s) {
            const RunSummary& run = summaries[a * seeds + s];
            if (!run.error.empty()) continue;
            ++clean;
            sum_train += run.final_train_error;
            sum_true += run.final_true_error;
            sum_updates += static_cast<double>(run.updates);
            agg.min_train = std::min(agg.min_train, run.final_train_error);
            agg.max_train = std::max(agg.max_train, run.final_train_error);
            agg.min_true = std::min(agg.min_true, run.final_true_error);
            agg.max_true = std::max(agg.max_true, run.final_true_error);
        }
        if (clean == 0) {
            agg.mean_train = agg.min_train = agg.max_train = kNan;
            agg.mean_true = agg.min_true = agg.max_true = kNan;
            agg.mean_updates = kNan;
        } else {
            agg.mean_train = sum_train / static_cast<double>(clean);
            agg.mean_true = sum_true / static_cast<double>(clean);
            agg.mean_updates = sum_updates / static_cast<double>(clean);
        }
        aggs.push_back(agg);
    }
    return aggs;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::uint64_t base_seed,
                                int jobs) {
    if (cfg.n <= 0) throw std::invalid_argument("experiment: n must be positive");
    if (cfg.seeds <= 0) throw std::invalid_argument("experiment: seeds must be positive");
    if (cfg.arms.empty()) throw std::invalid_argument("experiment: no arms");
    for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        if (cfg.arms[a].name.empty())
            throw std::invalid_argument("experiment: arm names must be nonempty");
        for (std::size_t b = a + 1; b < cfg.arms.size(); ++b)
            if (cfg.arms[a].name == cfg.arms[b].name)
                throw std::invalid_argument("experiment: duplicate arm name '" +
                                            cfg.arms[a].name + "'");
    }

    ExperimentResult result;
    result.config = cfg;
    result.base_seed = base_seed;
    std::size_t tasks = cfg.arms.size() * static_cast<std::size_t>(cfg.seeds);
    result.summaries.resize(tasks);
    result.traces.resize(tasks);

    Rng base(base_seed);
    auto run_task = [&](std::size_t k) {
        std::size_t a = k / static_cast<std::size_t>(cfg.seeds);
        std::size_t s = k % static_cast<std::size_t>(cfg.seeds);
        // streams are keyed by the seed index alone, so every arm of a seed
        // sees the same target, dataset, and init draws and differs only in
        // its training parameters
        RunOutput out = run_single(cfg.n, cfg.arms[a], base.fork(s), static_cast<int>(s));
        result.summaries[k] = std::move(out.summary);
        result.traces[k] = std::move(out.trace);
    };

    int jobs_eff = std::clamp<int>(jobs, 1, static_cast<int>(tasks));
    if (jobs_eff <= 1) {
        for (std::size_t k = 0; k < tasks; ++k) run_task(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs_eff));
        for (int w = 0; w < jobs_eff; ++w)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t k = next.fetch_add(1);
                    if (k >= tasks) break;
                    run_task(k);
                }
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

}  // namespace symnet
