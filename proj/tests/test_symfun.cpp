#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "symnet/symfun.hpp"

using namespace symnet;

TEST_CASE("support round trip and labels") {
    int sup[] = {0, 2, 5};
    auto f = SymmetricFunction::from_support(5, sup);
    CHECK(f.n == 5);
    CHECK(f.support() == std::vector<int>{0, 2, 5});
    CHECK(f.support_size() == 3);
    CHECK(f.label_of_weight(0) == 1);
    CHECK(f.label_of_weight(1) == -1);
    CHECK(f.label_of_weight(2) == 1);
    CHECK(f.label_of_weight(5) == 1);

    std::uint8_t bits[] = {1, 0, 1, 0, 0};
    CHECK(hamming_weight(bits) == 2);
    CHECK(f.eval(bits) == 1);
}

TEST_CASE("parity and strict majority") {
    auto p = SymmetricFunction::parity(6);
    for (int w = 0; w <= 6; ++w) CHECK(p.label_of_weight(w) == ((w % 2) ? 1 : -1));

    auto m = SymmetricFunction::majority(6);
    CHECK(m.label_of_weight(3) == -1);  // tie goes negative
    CHECK(m.label_of_weight(4) == 1);

    auto modd = SymmetricFunction::majority(7);
    CHECK(modd.label_of_weight(3) == -1);
    CHECK(modd.label_of_weight(4) == 1);
}

TEST_CASE("random supports differ across streams and replay within one") {
    Rng a(9), b(9), c(10);
    auto fa = SymmetricFunction::random(12, a);
    auto fb = SymmetricFunction::random(12, b);
    CHECK(fa.in_support == fb.in_support);

    bool any_diff = false;
    for (int i = 0; i < 8; ++i) {
        auto fc = SymmetricFunction::random(12, c);
        any_diff = any_diff || (fc.in_support != fa.in_support);
    }
    CHECK(any_diff);
}

TEST_CASE("sampled datasets carry consistent labels") {
    Rng rng(77);
    auto f = SymmetricFunction::majority(9);
    auto ds = sample_dataset(f, 64, rng);
    REQUIRE(ds.count == 64);
    REQUIRE(ds.labels.size() == 64);
    CHECK(ds.provenance.kind == ProvenanceKind::clean);
    for (std::size_t i = 0; i < ds.count; ++i) {
        auto x = ds.input(i);
        int w = 0;
        for (double v : x) {
            REQUIRE((v == 0.0 || v == 1.0));
            w += (v == 1.0);
        }
        CHECK(ds.labels[i] == f.label_of_weight(w));
    }
}

TEST_CASE("label flips hit about the requested fraction") {
    Rng rng(78);
    auto f = SymmetricFunction::parity(10);
    auto ds = sample_dataset(f, 4000, rng);
    auto noisy = flip_labels(ds, 0.1, rng);
    REQUIRE(noisy.count == ds.count);
    CHECK(noisy.provenance.kind == ProvenanceKind::label_flipped);
    CHECK(noisy.provenance.param == 0.1);
    int flipped = 0;
    for (std::size_t i = 0; i < ds.count; ++i) flipped += (noisy.labels[i] != ds.labels[i]);
    CHECK(flipped > 300);
    CHECK(flipped < 500);
    CHECK(noisy.inputs == ds.inputs);

    CHECK_THROWS_AS(flip_labels(ds, 1.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(flip_labels(ds, -0.1, rng), std::invalid_argument);
}

TEST_CASE("input perturbation stays within its radius and keeps labels") {
    Rng rng(79);
    auto f = SymmetricFunction::parity(8);
    auto ds = sample_dataset(f, 200, rng);
    auto shifted = perturb_inputs(ds, 0.25, rng);
    CHECK(shifted.provenance.kind == ProvenanceKind::input_perturbed);
    CHECK(shifted.labels == ds.labels);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < ds.inputs.size(); ++i)
        max_dev = std::max(max_dev, std::abs(shifted.inputs[i] - ds.inputs[i]));
    CHECK(max_dev <= 0.25);
    CHECK(max_dev > 0.0);
}

TEST_CASE("dataset csv round trip") {
    Rng rng(80);
    auto f = SymmetricFunction::random(6, rng);
    auto ds = sample_dataset(f, 25, rng);

    std::stringstream ss;
    write_csv(ds, ss);
    std::string text = ss.str();
    CHECK(text.rfind("x_0,x_1,x_2,x_3,x_4,x_5,label\n", 0) == 0);

    auto back = read_dataset_csv(ss);
    CHECK(back.n == ds.n);
    CHECK(back.count == ds.count);
    CHECK(back.inputs == ds.inputs);
    CHECK(back.labels == ds.labels);
}

TEST_CASE("csv reader rejects malformed rows") {
    {
        std::stringstream ss("x_0,x_1,label\n1,0,1\n1,1\n");
        CHECK_THROWS_AS(read_dataset_csv(ss), std::runtime_error);
    }
    {
        std::stringstream ss("x_0,x_1,label\n1,0,2\n");
        CHECK_THROWS_AS(read_dataset_csv(ss), std::runtime_error);
    }
    {
        std::stringstream ss("x_0,x_1,label\n1,zebra,1\n");
        CHECK_THROWS_AS(read_dataset_csv(ss), std::runtime_error);
    }
    {
        // accepts an explicit plus sign on labels
        std::stringstream ss("x_0,x_1,label\n1,0,+1\n0,1,-1\n");
        auto ds = read_dataset_csv(ss);
        CHECK(ds.labels == std::vector<int>{1, -1});
    }
}
