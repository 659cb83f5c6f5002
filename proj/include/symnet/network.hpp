#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "symnet/rng.hpp"
#include "symnet/symfun.hpp"

namespace symnet {

enum class Activation { relu, sigmoid };

// One hidden layer, one scalar output:
//   score(x) = output_weights . act(hidden_weights x + hidden_bias) + output_bias
struct TwoLayerNetwork {
    int input_dim = 0;
    int hidden_width = 0;
    std::vector<double> hidden_weights;  // hidden_width x input_dim, row-major
    std::vector<double> hidden_bias;     // hidden_width
    std::vector<double> output_weights;  // hidden_width
    double output_bias = 0.0;
    Activation activation = Activation::relu;
};

// The weight-counting hidden layer of width 4n+2: rows alternate sign
// (+1...,-1...) and biases step by 0.5, so consecutive unit pairs compute
// relu(|x| - c) and relu(c - |x|) for c = 0, 0.5, 1, ..., n. Output layer
// starts at zero.
TwoLayerNetwork symmetric_init(int n);

// row index of the relu(|x| - c) unit in symmetric_init; c on the half grid
int plus_unit_index(double c);
// row index of the relu(c - |x|) unit
int minus_unit_index(double c);
// threshold of a symmetric_init row
double unit_threshold(int row);

// iid Gaussian entries with sd = scale / sqrt(n) everywhere; scale > 0
TwoLayerNetwork random_init(int n, int hidden_width, double scale, Rng& rng);

// hidden activations into v (hidden_width slots), returns the score
double forward(const TwoLayerNetwork& net, std::span<const double> x, std::span<double> v);
double score(const TwoLayerNetwork& net, std::span<const double> x);
// +1 when the score is strictly positive, else -1
int predict(const TwoLayerNetwork& net, std::span<const double> x);

// Hidden activations with a trailing constant-1 coordinate, so the output
// layer (output_weights, output_bias) acts as a single linear separator.
struct Embedding {
    int dim = 0;  // hidden_width + 1
    std::size_t count = 0;
    std::vector<double> points;   // count x dim
    std::vector<int> weight_tag;  // source Hamming weight per point, may be empty

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dim),
                static_cast<std::size_t>(dim)};
    }
    double max_norm() const;
};

Embedding embed(const TwoLayerNetwork& net, std::span<const double> inputs,
                std::size_t count);
Embedding embed(const TwoLayerNetwork& net, const Dataset& ds);

// The n+1 distinct embedded points of symmetric_init(n) over {0,1}^n, one
// representative per Hamming weight, tagged with that weight.
Embedding initial_embedding_classes(int n);

// text format with hex floats; save/load round-trips bit for bit
void save_network(const TwoLayerNetwork& net, std::ostream& out);
TwoLayerNetwork load_network(std::istream& in);

}  // namespace symnet
