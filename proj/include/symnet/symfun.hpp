#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "symnet/rng.hpp"

namespace symnet {

int hamming_weight(std::span<const std::uint8_t> bits);

// A +/-1 valued function on {0,1}^n that depends only on the Hamming weight
// of its input. The support lists the weights that map to +1; weight 0 is an
// admissible support element like any other.
struct SymmetricFunction {
    int n = 0;
    std::vector<std::uint8_t> in_support;  // size n+1, 0/1 mask over weights

    static SymmetricFunction from_support(int n, std::span<const int> support);
    static SymmetricFunction parity(int n);
    // strict majority: +1 iff weight > n/2, so ties at even n go to -1
    static SymmetricFunction majority(int n);
    // each weight joins the support independently with probability 1/2
    static SymmetricFunction random(int n, Rng& rng);

    int label_of_weight(int weight) const;
    int eval(std::span<const std::uint8_t> bits) const;

    std::vector<int> support() const;
    int support_size() const;
};

enum class ProvenanceKind { clean, label_flipped, input_perturbed };

struct Provenance {
    ProvenanceKind kind = ProvenanceKind::clean;
    double param = 0.0;  // flip probability or perturbation radius
};

// Labeled sample set. Inputs are stored as reals so the perturbed variants
// share the type; clean datasets hold exact 0.0/1.0 entries.
struct Dataset {
    int n = 0;
    std::size_t count = 0;
    std::vector<double> inputs;  // count x n, row-major
    std::vector<int> labels;     // +1 / -1
    Provenance provenance;

    std::span<const double> input(std::size_t i) const {
        return {inputs.data() + i * static_cast<std::size_t>(n),
                static_cast<std::size_t>(n)};
    }
};

std::vector<std::uint8_t> random_bits(int n, Rng& rng);

// m inputs drawn uniformly from {0,1}^n, labeled by f
Dataset sample_dataset(const SymmetricFunction& f, std::size_t m, Rng& rng);

// flip each label independently with probability p
Dataset flip_labels(const Dataset& ds, double p, Rng& rng);

// add independent uniform [-radius, radius] noise to every coordinate
Dataset perturb_inputs(const Dataset& ds, double radius, Rng& rng);

// columns x_0..x_{n-1}, then label; bits are written as bare 0/1
void write_csv(const Dataset& ds, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace symnet
