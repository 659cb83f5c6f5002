#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "symnet/harness.hpp"
#include "symnet/reprbuild.hpp"
#include "testutil.hpp"

using namespace symnet;
using symnet::testutil::TempDir;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.preset = "tiny";
    cfg.n = 8;
    cfg.seeds = 2;
    RunSpec frozen;
    frozen.name = "frozen";
    frozen.target = TargetKind::random_symmetric;
    frozen.frozen_hidden = true;
    frozen.sample_size = ParamExpr::parse("4*n");
    frozen.step_size = ParamExpr::parse("n^-4");
    frozen.confidence = ParamExpr::parse("n^3*h");
    frozen.max_epochs = 50'000;
    frozen.monitor_probe_size = 4;
    RunSpec full = frozen;
    full.name = "full";
    full.frozen_hidden = false;
    cfg.arms = {frozen, full};
    return cfg;
}

}  // namespace

TEST_CASE("true error of exact and inverted representations") {
    Rng rng(61);
    auto f = SymmetricFunction::random(10, rng);
    auto net = build_relu_net(f);
    Rng eval1(62);
    CHECK(estimate_true_error(net, f, 2000, eval1) == 0.0);

    // flipping the output layer makes every prediction wrong
    for (auto& w : net.output_weights) w = -w;
    net.output_bias = -net.output_bias;
    Rng eval2(62);
    CHECK(estimate_true_error(net, f, 2000, eval2) == 1.0);
}

TEST_CASE("true error of the zero net is the positive mass") {
    // even-weight support on n = 10 puts exactly half the cube mass on +1;
    // the zero-output net always answers -1
    std::vector<int> evens = {0, 2, 4, 6, 8, 10};
    auto f = SymmetricFunction::from_support(10, evens);
    auto net = symmetric_init(10);
    Rng rng(63);
    double err = estimate_true_error(net, f, 20'000, rng);
    CHECK(std::abs(err - 0.5) < 0.02);
}

TEST_CASE("train error counts dataset mistakes") {
    Rng rng(64);
    auto f = SymmetricFunction::majority(9);
    auto ds = sample_dataset(f, 50, rng);
    auto net = build_relu_net(f);
    CHECK(train_error(net, ds) == 0.0);
    ds.labels[7] = -ds.labels[7];
    CHECK(train_error(net, ds) == doctest::Approx(1.0 / 50.0));
}

TEST_CASE("weight class agreement is 1 for weight-symmetric nets") {
    Rng rng(65);
    auto f = SymmetricFunction::random(12, rng);
    auto net = build_relu_net(f);
    Rng pr(66);
    CHECK(weight_class_agreement(net, 12, 500, pr) == 1.0);

    // a net reading a single coordinate cannot be permutation invariant
    TwoLayerNetwork lop;
    lop.input_dim = 12;
    lop.hidden_width = 1;
    lop.hidden_weights.assign(12, 0.0);
    lop.hidden_weights[0] = 1.0;
    lop.hidden_bias = {0.0};
    lop.output_weights = {1.0};
    lop.output_bias = -0.5;
    Rng pr2(67);
    CHECK(weight_class_agreement(lop, 12, 500, pr2) < 0.9);
}

TEST_CASE("every preset parses into a runnable config") {
    auto names = preset_names();
    REQUIRE(names.size() == 8);
    for (const auto& id : names) {
        auto cfg = figure_preset(id);
        CHECK(cfg.preset == id);
        CHECK(cfg.n >= 2);
        CHECK(cfg.seeds >= 1);
        REQUIRE(!cfg.arms.empty());
        for (const auto& arm : cfg.arms) {
            CHECK(!arm.name.empty());
            // expressions must evaluate once n is known
            double h = arm.step_size.eval(cfg.n, std::nan(""), std::pow(cfg.n, 1.5));
            CHECK(h > 0.0);
            CHECK(arm.sample_size.eval(cfg.n, h, std::pow(cfg.n, 1.5)) >= 1.0);
        }
    }
    CHECK_THROWS_AS(figure_preset("fig99"), std::invalid_argument);
}

TEST_CASE("config json round trip") {
    auto cfg = figure_preset("fig4");
    std::stringstream first;
    config_to_json(cfg, first);
    std::stringstream copy(first.str());
    auto back = config_from_json(copy);
    std::stringstream second;
    config_to_json(back, second);
    CHECK(first.str() == second.str());
    CHECK(back.n == cfg.n);
    CHECK(back.arms.size() == cfg.arms.size());
    CHECK(back.arms[0].name == cfg.arms[0].name);
}

TEST_CASE("config json rejects bad input") {
    {
        std::stringstream ss("{\"n\": 8}");  // no arms
        CHECK_THROWS(config_from_json(ss));
    }
    {
        std::stringstream ss("not json at all");
        CHECK_THROWS(config_from_json(ss));
    }
    {
        std::stringstream ss(
            "{\"preset\":\"x\",\"n\":8,\"seeds\":1,\"arms\":[{\"name\":\"a\","
            "\"target\":\"no-such-target\",\"m\":\"n\",\"h\":\"n^-2\",\"beta\":\"0\"}]}");
        CHECK_THROWS_AS(config_from_json(ss), std::invalid_argument);
    }
}

TEST_CASE("experiment runs are deterministic and job-count independent") {
    auto cfg = tiny_config();
    auto r1 = run_experiment(cfg, 555, 1);
    auto r2 = run_experiment(cfg, 555, 2);

    REQUIRE(r1.summaries.size() == 4);  // 2 arms x 2 seeds
    REQUIRE(r2.summaries.size() == 4);
    CHECK_FALSE(r1.has_errors());
    for (std::size_t i = 0; i < r1.summaries.size(); ++i) {
        CHECK(r1.summaries[i].arm == r2.summaries[i].arm);
        CHECK(r1.summaries[i].seed_index == r2.summaries[i].seed_index);
        CHECK(r1.summaries[i].updates == r2.summaries[i].updates);
        CHECK(r1.summaries[i].final_train_error == r2.summaries[i].final_train_error);
        CHECK(r1.summaries[i].final_true_error == r2.summaries[i].final_true_error);
    }

    // a different base seed gives a different world
    auto r3 = run_experiment(cfg, 556, 1);
    bool something_changed = false;
    for (std::size_t i = 0; i < r1.summaries.size(); ++i)
        something_changed =
            something_changed || (r1.summaries[i].updates != r3.summaries[i].updates);
    CHECK(something_changed);
}

TEST_CASE("arms of one seed share their target and data streams") {
    // both arms are gated the same way at t = 0, so if they saw different
    // datasets their update counts would drift apart almost surely; instead
    // only the training dynamics may differ
    auto cfg = tiny_config();
    auto res = run_experiment(cfg, 999, 1);
    REQUIRE(res.summaries.size() == 4);
    auto agg = res.aggregates();
    REQUIRE(agg.size() == 2);
    // in the lazy-step regime the frozen and full arms move nearly together;
    // identical worlds keep their true errors close seed by seed
    for (int s = 0; s < 2; ++s) {
        const auto& frozen = res.summaries[0 * 2 + s];
        const auto& full = res.summaries[1 * 2 + s];
        CHECK(std::abs(frozen.final_true_error - full.final_true_error) < 0.05);
    }
}

TEST_CASE("aborted runs land in the summary error field") {
    auto cfg = tiny_config();
    cfg.arms.resize(1);
    cfg.arms[0].corruption = CorruptionKind::label_flip;
    cfg.arms[0].corruption_param = 1.5;  // invalid flip probability
    auto res = run_experiment(cfg, 321, 1);
    REQUIRE(res.summaries.size() == 2);
    CHECK(res.has_errors());
    for (const auto& s : res.summaries) {
        CHECK(!s.error.empty());
        CHECK(std::isnan(s.final_true_error));
    }
    auto agg = res.aggregates();
    REQUIRE(agg.size() == 1);
    CHECK(std::isnan(agg[0].mean_true));  // no clean run to average
}

TEST_CASE("experiment validation") {
    auto cfg = tiny_config();
    cfg.n = 0;
    CHECK_THROWS_AS(run_experiment(cfg, 1, 1), std::invalid_argument);
    cfg = tiny_config();
    cfg.seeds = 0;
    CHECK_THROWS_AS(run_experiment(cfg, 1, 1), std::invalid_argument);
    cfg = tiny_config();
    cfg.arms[1].name = cfg.arms[0].name;  // duplicate arm names
    CHECK_THROWS_AS(run_experiment(cfg, 1, 1), std::invalid_argument);
}

TEST_CASE("experiment output layout on disk") {
    TempDir tmp;
    auto cfg = tiny_config();
    cfg.seeds = 1;
    auto res = run_experiment(cfg, 777, 1);
    write_experiment_csv(res, tmp.path);

    auto root = tmp.path / "tiny";
    CHECK(std::filesystem::exists(root / "0" / "trace-frozen.csv"));
    CHECK(std::filesystem::exists(root / "0" / "trace-full.csv"));
    CHECK(std::filesystem::exists(root / "summary.csv"));
    CHECK(std::filesystem::exists(root / "figure.svg"));

    std::ifstream sum(root / "summary.csv");
    std::string line;
    std::getline(sum, line);
    CHECK(line.rfind("#", 0) == 0);
    std::getline(sum, line);
    CHECK(line == "arm,seed,stop,epochs,updates,final_train_error,final_true_error,error");

    std::ifstream trace(root / "0" / "trace-frozen.csv");
    std::getline(trace, line);
    CHECK(line == "epoch,updates,train_error,true_error,M_norm,max_drift,drift_bound");

    std::ifstream svg(root / "figure.svg");
    std::string all((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    CHECK(all.find("<svg") != std::string::npos);
    CHECK(all.find("polyline") != std::string::npos);
    CHECK(all.find("tiny") != std::string::npos);

    // single-arm experiments drop the arm suffix
    TempDir tmp2;
    auto cfg1 = tiny_config();
    cfg1.seeds = 1;
    cfg1.arms.resize(1);
    auto res1 = run_experiment(cfg1, 777, 1);
    write_experiment_csv(res1, tmp2.path);
    CHECK(std::filesystem::exists(tmp2.path / "tiny" / "0" / "trace.csv"));
}

TEST_CASE("two-arm figures hold four polylines and serialize byte-identically") {
    TempDir tmp;
    auto cfg = tiny_config();
    cfg.seeds = 1;
    for (auto& arm : cfg.arms) {
        arm.epoch_record_cadence = 1;
        arm.true_error_cadence = 5;  // both curves get points
    }
    auto res = run_experiment(cfg, 808, 1);
    REQUIRE_FALSE(res.has_errors());

    auto p1 = tmp.file("fig1.svg");
    auto p2 = tmp.file("fig2.svg");
    write_experiment_svg(res, p1);
    write_experiment_svg(res, p2);

    std::ifstream in1(p1), in2(p2);
    std::string s1((std::istreambuf_iterator<char>(in1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);

    std::size_t polylines = 0;
    for (std::size_t pos = s1.find("<polyline"); pos != std::string::npos;
         pos = s1.find("<polyline", pos + 1))
        ++polylines;
    CHECK(polylines == 4);  // train and true per arm
}
