#include "symnet/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symnet/expr.hpp"
#include "symnet/harness.hpp"
#include "symnet/kernels.hpp"
#include "symnet/network.hpp"
#include "symnet/perceptron.hpp"
#include "symnet/reprbuild.hpp"
#include "symnet/trainer.hpp"

namespace symnet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct TargetOpts {
    std::string kind = "parity";
    std::vector<int> support;
};

void add_target_options(CLI::App* sub, TargetOpts& opts) {
    sub->add_option("--target", opts.kind,
                    "target function: parity, majority, random, or support")
        ->check(CLI::IsMember({"parity", "majority", "random", "support"}));
    sub->add_option("--support", opts.support,
                    "weights mapped to +1 (implies --target support)");
}

SymmetricFunction resolve_target(const TargetOpts& opts, int n, Rng rng) {
    std::string kind = opts.kind;
    if (!opts.support.empty()) kind = "support";
    if (kind == "parity") return SymmetricFunction::parity(n);
    if (kind == "majority") return SymmetricFunction::majority(n);
    if (kind == "support") return SymmetricFunction::from_support(n, opts.support);
    return SymmetricFunction::random(n, rng);
}

std::string support_string(const SymmetricFunction& f) {
    std::string s;
    for (int w : f.support()) {
        if (!s.empty()) s += ',';
        s += std::to_string(w);
    }
    return s.empty() ? "(empty)" : s;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

int run_repr_verify(int n, const TargetOpts& target, const std::string& family,
                    const std::string& load_path, const std::string& out_path,
                    std::uint64_t seed) {
    SymmetricFunction f = resolve_target(target, n, Rng(seed).fork(1));
    TwoLayerNetwork net;
    if (!load_path.empty()) {
        std::ifstream in(load_path);
        if (!in) throw std::runtime_error("cannot read " + load_path);
        net = load_network(in);
    } else {
        net = family == "sigmoid" ? build_sigmoid_net(f) : build_relu_net(f);
    }
    CheckReport report = verify_representation(net, f);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        write_csv(report, out);
    }
    std::size_t failed = 0;
    for (const CheckRow& row : report.rows)
        if (!row.pass) ++failed;
    std::cout << "n " << n << "\nsupport " << support_string(f) << "\nclasses "
              << report.rows.size() << "\nclass_failures " << failed
              << "\nexhaustive_points " << report.exhaustive_points
              << "\nexhaustive_failures " << report.exhaustive_failures << "\nresult "
              << (report.passed ? "pass" : "fail") << '\n';
    return report.passed ? 0 : 1;
}

int run_init_dump(int n, const std::string& out_path) {
    TwoLayerNetwork net = symmetric_init(n);
    std::ofstream file;
    save_network(net, open_or_stdout(file, out_path));
    return 0;
}

int run_certify(int n, const TargetOpts& target, const std::string& step_expr,
                const std::string& beta_expr, const std::string& out_path,
                std::uint64_t seed) {
    SymmetricFunction f = resolve_target(target, n, Rng(seed).fork(1));
    SeparatorCertificate cert = initial_margin_certificate(n, f);
    std::ofstream file;
    std::ostream& out = open_or_stdout(file, out_path);
    out << "n " << n << '\n';
    out << "support " << support_string(f) << '\n';
    out << "classes " << n + 1 << '\n';
    out << "separator_norm " << fmt(cert.norm) << '\n';
    out << "margin_lb " << fmt(cert.margin_lb) << '\n';
    if (!step_expr.empty()) {
        Embedding classes = initial_embedding_classes(n);
        double radius = classes.max_norm();
        double h = ParamExpr::parse(step_expr).eval(n, kNan, radius);
        double beta = ParamExpr::parse(beta_expr).eval(n, h, radius);
        PerceptronBounds b = perceptron_bounds(cert.margin_lb, radius, h, beta);
        out << "point_radius " << fmt(radius) << '\n';
        out << "step " << fmt(h) << '\n';
        out << "confidence " << fmt(beta) << '\n';
        out << "update_bound " << fmt(b.update_bound) << '\n';
        out << "margin_bound " << fmt(b.margin_lb) << '\n';
    }
    return 0;
}

int run_perceptron(int n, const TargetOpts& target, const std::string& step_expr,
                   const std::string& beta_expr, std::uint64_t max_updates,
                   const std::string& out_path, std::uint64_t seed) {
    SymmetricFunction f = resolve_target(target, n, Rng(seed).fork(1));
    Embedding classes = initial_embedding_classes(n);
    LabeledPointSet ps = LabeledPointSet::from_embedding(classes, f);
    SeparatorCertificate cert = initial_margin_certificate(n, f);

    PerceptronConfig cfg;
    cfg.step_size = ParamExpr::parse(step_expr).eval(n, kNan, ps.max_norm);
    cfg.confidence = ParamExpr::parse(beta_expr).eval(n, cfg.step_size, ps.max_norm);
    cfg.max_updates = max_updates;
    cfg.gamma_hint = cert.margin_lb;
    PerceptronResult res = run_modified_perceptron(ps, cfg);

    bool ok = res.converged &&
              static_cast<double>(res.updates) <= std::ceil(res.bound_updates) &&
              res.achieved_margin >= res.bound_margin * (1.0 - 1e-12);
    std::ofstream file;
    std::ostream& out = open_or_stdout(file, out_path);
    out << "n " << n << "\nsupport " << support_string(f) << "\nmargin_lb "
        << fmt(cert.margin_lb) << "\npoint_radius " << fmt(ps.max_norm) << '\n';
    write_text(res, out);
    out << "bound_respected " << (ok ? 1 : 0) << '\n';
    return ok ? 0 : 1;
}

struct TrainOpts {
    int n = 0;
    TargetOpts target;
    std::string m_expr = "n";
    std::string init = "symmetric";
    double scale = 1.0;
    bool frozen = false;
    std::string step_expr = "n^-6";
    std::string beta_expr = "n^3*h";
    std::uint64_t max_epochs = 1'000'000;
    std::uint64_t max_updates = 100'000'000;
    bool no_shuffle = false;
    double flip = 0.0;
    double shift = 0.0;
    int probe = 32;
    std::size_t probe_cap = 0;
    bool enforce = false;
    std::uint64_t true_cadence = 0;
    std::size_t eval_samples = 10'000;
    std::string trace_path;
    std::string net_path;
};

int run_train(const TrainOpts& o, std::uint64_t seed, std::uint64_t log_cadence) {
    Rng base(seed);
    Rng rng_target = base.fork(1);
    Rng rng_data = base.fork(2);
    Rng rng_init = base.fork(3);
    Rng rng_train = base.fork(4);
    Rng rng_eval = base.fork(5);

    SymmetricFunction f = resolve_target(o.target, o.n, rng_target);
    double radius = std::pow(static_cast<double>(o.n), 1.5);
    TrainConfig tc;
    tc.step_size = ParamExpr::parse(o.step_expr).eval(o.n, kNan, radius);
    tc.confidence = ParamExpr::parse(o.beta_expr).eval(o.n, tc.step_size, radius);
    double m_raw = ParamExpr::parse(o.m_expr).eval(o.n, tc.step_size, radius);
    if (!(m_raw >= 1.0)) throw std::invalid_argument("train: sample size below 1");

    Dataset ds = sample_dataset(f, static_cast<std::size_t>(std::llround(m_raw)),
                                rng_data);
    if (o.flip > 0.0) ds = flip_labels(ds, o.flip, rng_data);
    if (o.shift > 0.0) ds = perturb_inputs(ds, o.shift, rng_data);

    TwoLayerNetwork net = o.init == "random"
                              ? random_init(o.n, 4 * o.n + 2, o.scale, rng_init)
                              : symmetric_init(o.n);
    tc.max_epochs = o.max_epochs;
    tc.max_updates = o.max_updates;
    tc.shuffle_each_epoch = !o.no_shuffle;
    tc.frozen_hidden = o.frozen;
    tc.monitor_probe_size = o.probe;
    tc.monitor_train_cap = o.probe_cap;
    tc.epoch_record_cadence = log_cadence;
    tc.enforce_stability_bounds = o.enforce;
    tc.true_error_cadence = o.true_cadence;
    if (o.true_cadence > 0)
        tc.true_error_fn = [&](const TwoLayerNetwork& current) {
            return estimate_true_error(current, f, 10'000, rng_eval);
        };

    TrainTrace trace = train(net, ds, tc, rng_train);

    std::cout << "support " << support_string(f) << '\n';
    std::cout << "stop " << to_string(trace.stop) << '\n';
    std::cout << "epochs " << trace.epochs_run << '\n';
    std::cout << "updates " << trace.total_updates << '\n';
    std::cout << "train_error " << fmt(trace.final_train_error) << '\n';
    if (o.eval_samples > 0)
        std::cout << "true_error "
                  << fmt(estimate_true_error(net, f, o.eval_samples, rng_eval)) << '\n';
    if (!trace.monitors.empty()) {
        const MonitorRecord& last = trace.monitors.back();
        std::cout << "output_norm " << fmt(last.output_norm) << " (bound "
                  << fmt(last.output_norm_bound) << ")\n";
        std::cout << "max_drift " << fmt(last.max_drift) << " (bound "
                  << fmt(last.drift_bound) << ")\n";
    }
    if (!o.trace_path.empty()) {
        std::ofstream out(o.trace_path);
        if (!out) throw std::runtime_error("cannot write " + o.trace_path);
        write_csv(trace, out);
    }
    if (!o.net_path.empty()) {
        std::ofstream out(o.net_path);
        if (!out) throw std::runtime_error("cannot write " + o.net_path);
        save_network(net, out);
    }
    return 0;
}

int run_experiment_cmd(const std::string& preset, const std::string& config_path,
                       const std::string& out_dir, int seeds_override,
                       std::uint64_t seed, int jobs, std::uint64_t log_cadence,
                       bool dump_config) {
    ExperimentConfig cfg;
    if (!preset.empty()) {
        cfg = figure_preset(preset);
    } else {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read " + config_path);
        cfg = config_from_json(in);
    }
    if (seeds_override > 0) cfg.seeds = seeds_override;
    if (log_cadence > 0)
        for (RunSpec& arm : cfg.arms) arm.epoch_record_cadence = log_cadence;
    if (dump_config) {
        config_to_json(cfg, std::cout);
        return 0;
    }

    ExperimentResult result = run_experiment(cfg, seed, jobs);
    write_experiment_csv(result, out_dir);

    std::cout << "preset " << cfg.preset << " n=" << cfg.n << " seeds=" << cfg.seeds
              << " base_seed=" << seed << '\n';
    for (const ArmAggregate& agg : result.aggregates())
        std::cout << "arm " << agg.arm << ": mean_train=" << fmt(agg.mean_train)
                  << " mean_true=" << fmt(agg.mean_true)
                  << " mean_updates=" << fmt(agg.mean_updates) << '\n';
    for (const RunSummary& run : result.summaries)
        if (!run.error.empty())
            std::cerr << "error: arm " << run.arm << " seed " << run.seed_index << ": "
                      << run.error << '\n';
    std::cout << "written " << (std::filesystem::path(out_dir) / cfg.preset).string()
              << '\n';
    return result.has_errors() ? 1 : 0;
}

int run_list_presets() {
    for (const std::string& id : preset_names()) {
        ExperimentConfig cfg = figure_preset(id);
        std::cout << id << ": n=" << cfg.n << " seeds=" << cfg.seeds;
        if (!cfg.note.empty()) std::cout << " [" << cfg.note << "]";
        std::cout << '\n';
        for (const RunSpec& arm : cfg.arms) {
            std::cout << "  " << arm.name << ": target=" << to_string(arm.target)
                      << " init=" << to_string(arm.init)
                      << (arm.frozen_hidden ? " frozen" : "") << " m=" << arm.sample_size.text()
                      << " h=" << arm.step_size.text() << " beta=" << arm.confidence.text();
            if (arm.corruption != CorruptionKind::none)
                std::cout << " corruption=" << to_string(arm.corruption) << '('
                          << fmt(arm.corruption_param) << ')';
            std::cout << " max_epochs=" << arm.max_epochs;
            if (arm.max_updates > 0) std::cout << " max_updates=" << arm.max_updates;
            if (arm.enforce_stability_bounds) std::cout << " enforced-bounds";
            std::cout << '\n';
        }
    }
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"networks for symmetric boolean functions: exact constructions, "
                 "a confidence-gated perceptron with certified bounds, and a "
                 "training harness with stability monitors"};
    app.fallthrough();
    app.require_subcommand(1);

    std::uint64_t seed = 12345;
    int jobs = 1;
    std::uint64_t log_cadence = 0;
    std::string kernels = "auto";
    app.add_option("--seed", seed, "base seed for all randomness");
    app.add_option("--jobs", jobs, "worker threads for experiments")
        ->check(CLI::PositiveNumber);
    app.add_option("--log-cadence", log_cadence,
                   "epochs between trace rows (0 keeps per-run defaults)");
    app.add_option("--kernels", kernels, "kernel backend: auto, scalar, avx2, neon");

    int n = 0;
    TargetOpts target;
    std::string family = "relu", load_path, out_path;
    CLI::App* repr = app.add_subcommand(
        "repr-verify", "build an exact network for a symmetric function and check "
                       "its sign on every weight class");
    repr->add_option("--n", n, "input dimension")->required();
    add_target_options(repr, target);
    repr->add_option("--family", family, "construction: relu or sigmoid")
        ->check(CLI::IsMember({"relu", "sigmoid"}));
    repr->add_option("--load", load_path, "verify this saved network instead");
    repr->add_option("--out", out_path, "write the per-class report csv here");

    int dump_n = 0;
    std::string dump_out;
    CLI::App* dump = app.add_subcommand(
        "init-dump", "write the weight-counting initial network as text");
    dump->add_option("--n", dump_n, "input dimension")->required();
    dump->add_option("--out", dump_out, "output file (default stdout)");

    int cert_n = 0;
    TargetOpts cert_target;
    std::string cert_step, cert_beta = "R^2*h", cert_out;
    CLI::App* cert = app.add_subcommand(
        "certify", "compute the guaranteed linear margin of the initial embedding "
                   "for a target function");
    cert->add_option("--n", cert_n, "input dimension")->required();
    add_target_options(cert, cert_target);
    cert->add_option("--step", cert_step,
                     "step size expression; adds update/margin bounds to the output");
    cert->add_option("--beta", cert_beta, "confidence expression (R = point radius)");
    cert->add_option("--out", cert_out, "output file (default stdout)");

    int perc_n = 0;
    TargetOpts perc_target;
    std::string perc_step = "1", perc_beta = "R^2*h", perc_out;
    std::uint64_t perc_max = 0;
    CLI::App* perc = app.add_subcommand(
        "perceptron", "run the confidence-gated perceptron on the initial "
                      "weight-class embedding and check it against its bounds");
    perc->add_option("--n", perc_n, "input dimension")->required();
    add_target_options(perc, perc_target);
    perc->add_option("--step", perc_step, "step size expression");
    perc->add_option("--beta", perc_beta, "confidence expression (R = point radius)");
    perc->add_option("--max-updates", perc_max, "update cap (0: 10x the bound)");
    perc->add_option("--out", perc_out, "output file (default stdout)");

    TrainOpts train_opts;
    CLI::App* tr = app.add_subcommand(
        "train", "train a one-hidden-layer relu network with hinge-gated SGD");
    tr->add_option("--n", train_opts.n, "input dimension")->required();
    add_target_options(tr, train_opts.target);
    tr->add_option("--m", train_opts.m_expr, "sample size expression");
    tr->add_option("--init", train_opts.init, "initialization: symmetric or random")
        ->check(CLI::IsMember({"symmetric", "random"}));
    tr->add_option("--scale", train_opts.scale, "gaussian init scale");
    tr->add_flag("--frozen", train_opts.frozen, "train only the output layer");
    tr->add_option("--step", train_opts.step_expr, "step size expression");
    tr->add_option("--beta", train_opts.beta_expr, "confidence expression");
    tr->add_option("--epochs", train_opts.max_epochs, "epoch cap");
    tr->add_option("--max-updates", train_opts.max_updates, "update cap");
    tr->add_flag("--no-shuffle", train_opts.no_shuffle, "keep dataset order each epoch");
    tr->add_option("--flip", train_opts.flip, "label flip probability");
    tr->add_option("--shift", train_opts.shift, "input perturbation radius");
    tr->add_option("--probe", train_opts.probe, "fresh monitor probe inputs");
    tr->add_option("--probe-cap", train_opts.probe_cap,
                   "cap on training inputs in the probe set (0: all)");
    tr->add_flag("--enforce", train_opts.enforce,
                 "abort when a stability bound is exceeded");
    tr->add_option("--true-cadence", train_opts.true_cadence,
                   "epochs between true-error estimates (0: final only)");
    tr->add_option("--eval-samples", train_opts.eval_samples,
                   "samples for the final true-error estimate (0: skip)");
    tr->add_option("--trace", train_opts.trace_path, "write the trace csv here");
    tr->add_option("--save-net", train_opts.net_path, "write the trained network here");

    std::string exp_preset, exp_config, exp_out = "results";
    int exp_seeds = 0;
    bool exp_dump = false;
    CLI::App* exp = app.add_subcommand(
        "experiment", "run a preset or json-configured batch of training runs");
    auto* preset_opt = exp->add_option("--preset", exp_preset, "preset id (see list-presets)");
    auto* config_opt = exp->add_option("--config", exp_config, "json experiment config");
    preset_opt->excludes(config_opt);
    exp->add_option("--out", exp_out, "output directory root");
    exp->add_option("--seeds", exp_seeds, "override the preset seed count");
    exp->add_flag("--dump-config", exp_dump,
                  "print the resolved config as json and exit");

    CLI::App* lp = app.add_subcommand("list-presets", "describe the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!kernels::select(kernels)) {
        std::cerr << "unknown or unavailable kernel backend '" << kernels << "'\n";
        return 2;
    }

    try {
        if (*repr) return run_repr_verify(n, target, family, load_path, out_path, seed);
        if (*dump) return run_init_dump(dump_n, dump_out);
        if (*cert)
            return run_certify(cert_n, cert_target, cert_step, cert_beta, cert_out, seed);
        if (*perc)
            return run_perceptron(perc_n, perc_target, perc_step, perc_beta, perc_max,
                                  perc_out, seed);
        if (*tr) return run_train(train_opts, seed, log_cadence);
        if (*exp) {
            if (exp_preset.empty() && exp_config.empty())
                throw std::invalid_argument("experiment: --preset or --config required");
            return run_experiment_cmd(exp_preset, exp_config, exp_out, exp_seeds, seed,
                                      jobs, log_cadence, exp_dump);
        }
        if (*lp) return run_list_presets();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace symnet
