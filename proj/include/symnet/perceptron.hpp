#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "symnet/network.hpp"
#include "symnet/symfun.hpp"

namespace symnet {

// Finite set of labeled points for linear separation.
struct LabeledPointSet {
    int dim = 0;
    std::size_t count = 0;
    std::vector<double> points;  // count x dim
    std::vector<int> labels;     // +1 / -1
    double max_norm = 0.0;

    static LabeledPointSet from_embedding(const Embedding& e, std::span<const int> labels);
    // labels taken from f via the embedding's weight tags
    static LabeledPointSet from_embedding(const Embedding& e, const SymmetricFunction& f);

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
};

// min_i labels[i] * (w . p_i) / |w|; throws when w is the zero vector
double margin_of(std::span<const double> w, const LabeledPointSet& ps);

struct PerceptronBounds {
    double update_bound = 0.0;
    double margin_lb = 0.0;
};

// Guarantees for the confidence-gated perceptron on a set that some unit
// vector separates with margin gamma: at most
// (2*confidence*step + (R*step)^2) / (gamma*step)^2 updates, and the final
// margin is at least gamma*confidence*step / (2*confidence*step + (R*step)^2).
PerceptronBounds perceptron_bounds(double gamma, double R, double step,
                                   double confidence);

struct PerceptronConfig {
    double step_size = 1.0;
    double confidence = 0.0;  // update whenever label * (w . p) <= confidence
    // 0 derives the cap from gamma_hint (10x the update bound) or falls back
    // to kDefaultUpdateCap
    std::uint64_t max_updates = 0;
    double gamma_hint = 0.0;  // certified margin, used for bound reporting
    bool record_updates = false;
};

inline constexpr std::uint64_t kDefaultUpdateCap = 50'000'000;

struct PerceptronResult {
    std::vector<double> w;
    std::uint64_t updates = 0;
    bool converged = false;
    double achieved_margin = 0.0;  // 0 while w is still the zero vector
    double bound_updates = 0.0;    // 0 when no gamma_hint was given
    double bound_margin = 0.0;
    double wall_time_ms = 0.0;
    std::vector<std::uint32_t> update_sequence;  // point indices, when recorded
};

// Cyclic perceptron from w = 0 that updates w += label * step * p whenever
// label * (w . p) <= confidence, and stops after a full violation-free pass.
PerceptronResult run_modified_perceptron(const LabeledPointSet& ps,
                                         const PerceptronConfig& cfg);

void write_text(const PerceptronResult& r, std::ostream& out);

struct SeparatorCertificate {
    int n = 0;
    std::vector<double> separator;  // output weights then bias, dim 4n+3
    double norm = 0.0;
    double margin_lb = 0.0;
};

// Separator for f over the initial weight-class embedding, taken from the
// exact relu construction; its score is +/-0.5 or better on every class, so
// margin_lb = 0.5 / |separator|.
SeparatorCertificate initial_margin_certificate(int n, const SymmetricFunction& f);

}  // namespace symnet
