#include <cmath>
#include <sstream>

#include "doctest.h"
#include "symnet/kernels.hpp"
#include "symnet/perceptron.hpp"
#include "symnet/trainer.hpp"
#include "testutil.hpp"

using namespace symnet;
using symnet::testutil::bits_of;

namespace {

// 1-in 1-out relu net with a single hidden unit
TwoLayerNetwork tiny_net(double w, double b, double m, double out_b) {
    TwoLayerNetwork net;
    net.input_dim = 1;
    net.hidden_width = 1;
    net.hidden_weights = {w};
    net.hidden_bias = {b};
    net.output_weights = {m};
    net.output_bias = out_b;
    return net;
}

Dataset one_point(int n, std::vector<double> x, int label) {
    Dataset ds;
    ds.n = n;
    ds.count = 1;
    ds.inputs = std::move(x);
    ds.labels = {label};
    return ds;
}

bool nets_equal_bits(const TwoLayerNetwork& a, const TwoLayerNetwork& b) {
    if (a.hidden_weights.size() != b.hidden_weights.size()) return false;
    for (std::size_t i = 0; i < a.hidden_weights.size(); ++i)
        if (bits_of(a.hidden_weights[i]) != bits_of(b.hidden_weights[i])) return false;
    for (std::size_t i = 0; i < a.hidden_bias.size(); ++i)
        if (bits_of(a.hidden_bias[i]) != bits_of(b.hidden_bias[i])) return false;
    for (std::size_t i = 0; i < a.output_weights.size(); ++i)
        if (bits_of(a.output_weights[i]) != bits_of(b.output_weights[i])) return false;
    return bits_of(a.output_bias) == bits_of(b.output_bias);
}

}  // namespace

TEST_CASE("hinge loss") {
    CHECK(hinge_loss(0.2, 1, 1.0) == 0.8);
    CHECK(hinge_loss(0.2, -1, 1.0) == 1.2);
    CHECK(hinge_loss(5.0, 1, 1.0) == 0.0);
    CHECK(hinge_loss(1.0, 1, 1.0) == 0.0);  // gate boundary has zero loss
}

TEST_CASE("single gated step moves every layer by its gradient") {
    auto net = tiny_net(1.0, 0.0, 0.5, 0.0);
    double x[] = {1.0};
    auto out = sgd_update(net, x, 1, 0.1, 1.0);
    CHECK(out == UpdateOutcome::applied);
    // score was 0.5, inside the gate; hidden sees the old output weight
    CHECK(net.hidden_weights[0] == 1.05);
    CHECK(net.hidden_bias[0] == 0.05);
    CHECK(net.output_weights[0] == 0.6);
    CHECK(net.output_bias == 0.1);
}

TEST_CASE("a confident score skips the update") {
    auto net = tiny_net(1.0, 0.0, 3.0, 0.0);
    double x[] = {1.0};
    auto out = sgd_update(net, x, 1, 0.1, 1.0);  // score 3 > gate 1
    CHECK(out == UpdateOutcome::skipped);
    CHECK(net.hidden_weights[0] == 1.0);
    CHECK(net.output_weights[0] == 3.0);
    CHECK(net.output_bias == 0.0);
}

TEST_CASE("units that did not fire keep their hidden weights") {
    // pre-activation is exactly zero, so the relu gradient is zero too
    auto net = tiny_net(1.0, -1.0, 0.5, 0.0);
    double x[] = {1.0};
    auto out = sgd_update(net, x, 1, 0.1, 1.0);
    CHECK(out == UpdateOutcome::applied);
    CHECK(net.hidden_weights[0] == 1.0);
    CHECK(net.hidden_bias[0] == -1.0);
    CHECK(net.output_weights[0] == 0.5);  // v = 0 contributes nothing
    CHECK(net.output_bias == 0.1);
}

TEST_CASE("frozen_hidden pins the first layer") {
    auto net = tiny_net(1.0, 0.0, 0.5, 0.0);
    double x[] = {1.0};
    sgd_update(net, x, 1, 0.1, 1.0, true);
    CHECK(net.hidden_weights[0] == 1.0);
    CHECK(net.hidden_bias[0] == 0.0);
    CHECK(net.output_weights[0] == 0.6);
    CHECK(net.output_bias == 0.1);
}

TEST_CASE("sgd_update validates its arguments") {
    auto net = tiny_net(1.0, 0.0, 0.5, 0.0);
    double x[] = {1.0};
    CHECK_THROWS_AS(sgd_update(net, x, 0, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sgd_update(net, x, 1, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sgd_update(net, x, 1, 0.1, -1.0), std::invalid_argument);
    net.activation = Activation::sigmoid;
    CHECK_THROWS_AS(sgd_update(net, x, 1, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("training a separable sample to a zero-loss epoch") {
    Rng rng(41);
    const int n = 8;
    auto f = SymmetricFunction::majority(n);
    auto ds = sample_dataset(f, 60, rng);
    auto net = symmetric_init(n);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.confidence = 0.0;
    cfg.max_updates = 1'000'000;
    cfg.max_epochs = 20'000;
    cfg.monitor_probe_size = 8;

    Rng train_rng(42);
    auto trace = train(net, ds, cfg, train_rng);
    CHECK(trace.stop == StopReason::zero_loss_epoch);
    CHECK(trace.final_train_error == 0.0);
    CHECK(trace.total_updates > 0);
    CHECK(trace.epochs_run >= 1);
    CHECK(trace.epochs.back().updates == trace.total_updates);
    CHECK(trace.epochs.back().train_error == 0.0);
    CHECK(trace.norm_scale >= trace.probe_embed_norm0);

    // every sample now clears the gate strictly
    for (std::size_t i = 0; i < ds.count; ++i)
        CHECK(ds.labels[i] * score(net, ds.input(i)) > 0.0);
}

TEST_CASE("training runs replay exactly") {
    Rng rng(43);
    auto f = SymmetricFunction::parity(6);
    auto ds = sample_dataset(f, 40, rng);

    TrainConfig cfg;
    cfg.step_size = 0.05;
    cfg.confidence = 0.1;
    cfg.max_epochs = 5'000;
    cfg.monitor_probe_size = 4;
    cfg.record_updates = true;

    auto net1 = symmetric_init(6);
    Rng r1(99);
    auto t1 = train(net1, ds, cfg, r1);

    auto net2 = symmetric_init(6);
    Rng r2(99);
    auto t2 = train(net2, ds, cfg, r2);

    CHECK(t1.total_updates == t2.total_updates);
    CHECK(t1.update_sequence == t2.update_sequence);
    CHECK(nets_equal_bits(net1, net2));
}

TEST_CASE("frozen-hidden training is the lifted perceptron, bit for bit") {
    Rng rng(44);
    const int n = 6;
    auto f = SymmetricFunction::random(n, rng);
    auto ds = sample_dataset(f, 40, rng);
    auto init = symmetric_init(n);

    // half-integer data plus unit step keeps all arithmetic exact, so the
    // two code paths have no rounding slack to hide behind
    auto lifted = embed(init, ds);
    auto ps = LabeledPointSet::from_embedding(lifted, ds.labels);
    PerceptronConfig pc;
    pc.step_size = 1.0;
    pc.confidence = std::ceil(ps.max_norm * ps.max_norm);
    pc.max_updates = 10'000'000;
    pc.record_updates = true;
    auto pres = run_modified_perceptron(ps, pc);
    REQUIRE(pres.converged);

    auto net = init;
    TrainConfig tc;
    tc.step_size = 1.0;
    tc.confidence = pc.confidence;
    tc.max_updates = 10'000'000;
    tc.max_epochs = 1'000'000;
    tc.shuffle_each_epoch = false;  // cyclic order, like the perceptron
    tc.frozen_hidden = true;
    tc.record_updates = true;
    Rng train_rng(7);
    auto trace = train(net, ds, tc, train_rng);

    CHECK(trace.stop == StopReason::zero_loss_epoch);
    CHECK(trace.total_updates == pres.updates);
    CHECK(trace.update_sequence == pres.update_sequence);
    REQUIRE(pres.w.size() == net.output_weights.size() + 1);
    for (std::size_t i = 0; i < net.output_weights.size(); ++i)
        CHECK(bits_of(net.output_weights[i]) == bits_of(pres.w[i]));
    CHECK(bits_of(net.output_bias) == bits_of(pres.w.back()));
    CHECK(nets_equal_bits(init, symmetric_init(n)));  // hidden untouched

    // and the trajectory does not depend on the kernel backend
    for (const std::string& name : kernels::available()) {
        REQUIRE(kernels::select(name));
        auto net_b = symmetric_init(n);
        Rng rb(7);
        auto tb = train(net_b, ds, tc, rb);
        CHECK(tb.update_sequence == trace.update_sequence);
        CHECK(nets_equal_bits(net_b, net));
    }
    REQUIRE(kernels::select("auto"));
}

TEST_CASE("update cap and epoch cap stop reasons") {
    Rng rng(45);
    auto f = SymmetricFunction::parity(5);
    auto ds = sample_dataset(f, 10, rng);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.confidence = 1e9;  // unreachable gate, every visit updates
    cfg.max_updates = 7;
    Rng r1(1);
    auto net1 = symmetric_init(5);
    auto t1 = train(net1, ds, cfg, r1);
    CHECK(t1.stop == StopReason::max_updates);
    CHECK(t1.total_updates == 7);

    cfg.max_updates = 1'000'000;
    cfg.max_epochs = 3;
    Rng r2(1);
    auto net2 = symmetric_init(5);
    auto t2 = train(net2, ds, cfg, r2);
    CHECK(t2.stop == StopReason::max_epochs);
    CHECK(t2.epochs_run == 3);
    CHECK(t2.total_updates == 30);

    cfg.max_epochs = 0;
    Rng r3(1);
    auto net3 = symmetric_init(5);
    auto t3 = train(net3, ds, cfg, r3);
    CHECK(t3.stop == StopReason::max_epochs);
    CHECK(t3.epochs_run == 0);
    CHECK(t3.total_updates == 0);
}

TEST_CASE("epoch rows land on the recording cadence") {
    Rng rng(46);
    auto f = SymmetricFunction::parity(4);
    auto ds = sample_dataset(f, 6, rng);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.confidence = 1e9;  // never converges, pure cadence test
    cfg.max_updates = 1'000'000;
    cfg.max_epochs = 10;
    cfg.epoch_record_cadence = 4;
    Rng r(2);
    auto net = symmetric_init(4);
    auto trace = train(net, ds, cfg, r);
    REQUIRE(trace.epochs.size() == 4);
    CHECK(trace.epochs[0].epoch == 1);
    CHECK(trace.epochs[1].epoch == 4);
    CHECK(trace.epochs[2].epoch == 8);
    CHECK(trace.epochs[3].epoch == 10);
}

TEST_CASE("true error hook runs on its own cadence and at the end") {
    Rng rng(47);
    auto f = SymmetricFunction::majority(6);
    auto ds = sample_dataset(f, 30, rng);

    TrainConfig cfg;
    cfg.step_size = 0.02;
    cfg.max_epochs = 10'000;
    cfg.epoch_record_cadence = 1;
    cfg.true_error_cadence = 2;
    int calls = 0;
    cfg.true_error_fn = [&](const TwoLayerNetwork&) {
        ++calls;
        return 0.25;
    };
    Rng r(3);
    auto net = symmetric_init(6);
    auto trace = train(net, ds, cfg, r);
    REQUIRE(calls > 0);
    CHECK(!std::isnan(trace.epochs.back().true_error));
    CHECK(trace.epochs.back().true_error == 0.25);
    if (trace.epochs.size() > 1 && trace.epochs.front().epoch == 1)
        CHECK(std::isnan(trace.epochs.front().true_error));
}

TEST_CASE("monitor rows track update counts and stay finite") {
    Rng rng(48);
    auto f = SymmetricFunction::majority(7);
    auto ds = sample_dataset(f, 40, rng);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.max_epochs = 20'000;
    cfg.monitor_probe_size = 8;
    cfg.monitor_cadence = 50;
    Rng r(4);
    auto net = symmetric_init(7);
    auto trace = train(net, ds, cfg, r);
    REQUIRE(!trace.monitors.empty());
    CHECK(trace.monitors.back().t == trace.total_updates);
    for (const auto& rec : trace.monitors) {
        if (rec.t % 50 != 0) CHECK(rec.t == trace.total_updates);
        CHECK(std::isfinite(rec.output_norm));
        CHECK(rec.output_norm_bound >= 0.0);
        CHECK(rec.max_drift >= 0.0);
    }
}

TEST_CASE("an inflated output layer trips the enforced norm bound") {
    auto net = symmetric_init(4);
    net.output_weights[0] = 1e6;
    auto ds = one_point(4, {1.0, 1.0, 1.0, 1.0}, -1);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.confidence = 0.0;
    cfg.max_epochs = 10;
    cfg.monitor_cadence = 1;
    cfg.enforce_stability_bounds = true;
    Rng r(5);
    CHECK_THROWS_AS(train(net, ds, cfg, r), MonitorViolation);
}

TEST_CASE("non-finite scores raise a divergence error") {
    auto net = symmetric_init(2);
    for (auto& w : net.hidden_weights) w = 1e308;
    auto ds = one_point(2, {1.0, 1.0}, 1);

    TrainConfig cfg;
    cfg.step_size = 0.01;
    cfg.max_epochs = 10;
    Rng r(6);
    CHECK_THROWS_AS(train(net, ds, cfg, r), DivergenceError);
}

TEST_CASE("embedding drift is measured exactly") {
    auto net = symmetric_init(3);
    std::vector<double> probe = {1.0, 0.0, 0.0};
    auto at_start = embed(net, probe, 1);
    CHECK(embedding_drift(net, at_start, probe, 1) == 0.0);
    net.hidden_bias[0] += 0.25;  // unit relu(|x|) now reads 1.25 at |x| = 1
    CHECK(embedding_drift(net, at_start, probe, 1) == 0.25);
}

TEST_CASE("trace csv layout") {
    TrainTrace trace;
    EpochRecord a;
    a.epoch = 1;
    a.updates = 12;
    a.train_error = 0.5;
    a.true_error = std::numeric_limits<double>::quiet_NaN();
    a.output_norm = 0.25;
    a.max_drift = 0.0;
    a.drift_bound = 1.5;
    EpochRecord b = a;
    b.epoch = 2;
    b.true_error = 0.125;
    trace.epochs = {a, b};

    std::stringstream ss;
    write_csv(trace, ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "epoch,updates,train_error,true_error,M_norm,max_drift,drift_bound");
    std::getline(ss, line);
    CHECK(line == "1,12,0.5,,0.25,0,1.5");
    std::getline(ss, line);
    CHECK(line == "2,12,0.5,0.125,0.25,0,1.5");

    CHECK(std::string(to_string(StopReason::zero_loss_epoch)) == "zero_loss_epoch");
    CHECK(std::string(to_string(StopReason::max_updates)) == "max_updates");
    CHECK(std::string(to_string(StopReason::max_epochs)) == "max_epochs");
}
