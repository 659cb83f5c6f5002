#include "symnet/network.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "symnet/kernels.hpp"

namespace symnet {

namespace {

void check_dims(const TwoLayerNetwork& net, std::size_t x_size) {
    if (x_size != static_cast<std::size_t>(net.input_dim))
        throw std::invalid_argument("forward: input has wrong dimension");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string hex_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

}  // namespace

TwoLayerNetwork symmetric_init(int n) {
    if (n <= 0) throw std::invalid_argument("symmetric_init: n must be positive");
    TwoLayerNetwork net;
    net.input_dim = n;
    net.hidden_width = 4 * n + 2;
    net.activation = Activation::relu;
    net.hidden_weights.resize(static_cast<std::size_t>(net.hidden_width) *
                              static_cast<std::size_t>(n));
    net.hidden_bias.resize(static_cast<std::size_t>(net.hidden_width));
    net.output_weights.assign(static_cast<std::size_t>(net.hidden_width), 0.0);
    net.output_bias = 0.0;
    for (int r = 0; r < net.hidden_width; ++r) {
        double sign = (r % 2 == 0) ? 1.0 : -1.0;
        for (int j = 0; j < n; ++j)
            net.hidden_weights[static_cast<std::size_t>(r) * n + j] = sign;
        // row pair 2j, 2j+1 computes relu(|x| - j/2), relu(j/2 - |x|)
        net.hidden_bias[static_cast<std::size_t>(r)] = -sign * 0.5 * (r / 2);
    }
    return net;
}

int plus_unit_index(double c) {
    double doubled = 2.0 * c;
    auto j = static_cast<long long>(std::llround(doubled));
    if (j < 0 || static_cast<double>(j) != doubled)
        throw std::invalid_argument("plus_unit_index: threshold off the half grid");
    return static_cast<int>(2 * j);
}

int minus_unit_index(double c) { return plus_unit_index(c) + 1; }

double unit_threshold(int row) {
    if (row < 0) throw std::invalid_argument("unit_threshold: negative row");
    return 0.5 * (row / 2);
}

TwoLayerNetwork random_init(int n, int hidden_width, double scale, Rng& rng) {
    if (n <= 0) throw std::invalid_argument("random_init: n must be positive");
    if (hidden_width <= 0)
        throw std::invalid_argument("random_init: hidden_width must be positive");
    if (scale <= 0.0) throw std::invalid_argument("random_init: scale must be positive");
    double sd = scale / std::sqrt(static_cast<double>(n));
    TwoLayerNetwork net;
    net.input_dim = n;
    net.hidden_width = hidden_width;
    net.activation = Activation::relu;
    net.hidden_weights.resize(static_cast<std::size_t>(hidden_width) *
                              static_cast<std::size_t>(n));
    net.hidden_bias.resize(static_cast<std::size_t>(hidden_width));
    net.output_weights.resize(static_cast<std::size_t>(hidden_width));
    for (auto& w : net.hidden_weights) w = sd * rng.normal();
    for (auto& b : net.hidden_bias) b = sd * rng.normal();
    for (auto& m : net.output_weights) m = sd * rng.normal();
    net.output_bias = sd * rng.normal();
    return net;
}

double forward(const TwoLayerNetwork& net, std::span<const double> x,
               std::span<double> v) {
    check_dims(net, x.size());
    if (v.size() != static_cast<std::size_t>(net.hidden_width))
        throw std::invalid_argument("forward: activation buffer has wrong size");
    const auto& ops = kernels::active();
    auto rows = static_cast<std::size_t>(net.hidden_width);
    auto cols = static_cast<std::size_t>(net.input_dim);
    if (net.activation == Activation::relu) {
        ops.dense_relu(net.hidden_weights.data(), net.hidden_bias.data(), x.data(),
                       rows, cols, v.data());
    } else {
        ops.dense_pre(net.hidden_weights.data(), net.hidden_bias.data(), x.data(),
                      rows, cols, v.data());
        for (auto& z : v) z = sigmoid(z);
    }
    return ops.dot(net.output_weights.data(), v.data(), rows) + net.output_bias;
}

double score(const TwoLayerNetwork& net, std::span<const double> x) {
    std::vector<double> v(static_cast<std::size_t>(net.hidden_width));
    return forward(net, x, v);
}

int predict(const TwoLayerNetwork& net, std::span<const double> x) {
    return score(net, x) > 0.0 ? 1 : -1;
}

double Embedding::max_norm() const {
    const auto& ops = kernels::active();
    double best = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        auto p = point(i);
        double sq = ops.sum_sq(p.data(), p.size());
        if (sq > best) best = sq;
    }
    return std::sqrt(best);
}

Embedding embed(const TwoLayerNetwork& net, std::span<const double> inputs,
                std::size_t count) {
    Embedding e;
    e.dim = net.hidden_width + 1;
    e.count = count;
    e.points.resize(count * static_cast<std::size_t>(e.dim));
    auto cols = static_cast<std::size_t>(net.input_dim);
    for (std::size_t i = 0; i < count; ++i) {
        double* row = e.points.data() + i * static_cast<std::size_t>(e.dim);
        forward(net, {inputs.data() + i * cols, cols},
                {row, static_cast<std::size_t>(net.hidden_width)});
        row[net.hidden_width] = 1.0;
    }
    return e;
}

Embedding embed(const TwoLayerNetwork& net, const Dataset& ds) {
    if (ds.n != net.input_dim)
        throw std::invalid_argument("embed: dataset dimension mismatch");
    return embed(net, ds.inputs, ds.count);
}

Embedding initial_embedding_classes(int n) {
    TwoLayerNetwork net = symmetric_init(n);
    std::vector<double> reps(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n),
                             0.0);
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j < k; ++j)
            reps[static_cast<std::size_t>(k) * n + j] = 1.0;
    Embedding e = embed(net, reps, static_cast<std::size_t>(n) + 1);
    e.weight_tag.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) e.weight_tag[static_cast<std::size_t>(k)] = k;
    return e;
}

void save_network(const TwoLayerNetwork& net, std::ostream& out) {
    out << "symnet-network-v1\n";
    out << "input_dim " << net.input_dim << '\n';
    out << "hidden_width " << net.hidden_width << '\n';
    out << "activation " << (net.activation == Activation::relu ? "relu" : "sigmoid")
        << '\n';
    out << "hidden_weights\n";
    for (int r = 0; r < net.hidden_width; ++r) {
        std::string line;
        for (int j = 0; j < net.input_dim; ++j) {
            if (j) line += ' ';
            line += hex_double(
                net.hidden_weights[static_cast<std::size_t>(r) * net.input_dim + j]);
        }
        out << line << '\n';
    }
    out << "hidden_bias\n";
    for (int r = 0; r < net.hidden_width; ++r)
        out << (r ? " " : "") << hex_double(net.hidden_bias[static_cast<std::size_t>(r)]);
    out << '\n';
    out << "output_weights\n";
    for (int r = 0; r < net.hidden_width; ++r)
        out << (r ? " " : "")
            << hex_double(net.output_weights[static_cast<std::size_t>(r)]);
    out << '\n';
    out << "output_bias\n" << hex_double(net.output_bias) << '\n';
    out << "end\n";
}

namespace {

std::string next_token(std::istream& in) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("network file: unexpected end");
    return tok;
}

void expect_token(std::istream& in, const char* want) {
    std::string tok = next_token(in);
    if (tok != want)
        throw std::runtime_error(std::string("network file: expected '") + want +
                                 "', got '" + tok + "'");
}

int read_int(std::istream& in) {
    std::string tok = next_token(in);
    int value = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw std::runtime_error("network file: bad integer '" + tok + "'");
    return value;
}

double read_hex_double(std::istream& in) {
    std::string tok = next_token(in);
    double value = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value,
                               std::chars_format::hex);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
        // to_chars writes inf/nan in the plain format
        auto res2 = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (res2.ec != std::errc{} || res2.ptr != tok.data() + tok.size())
            throw std::runtime_error("network file: bad value '" + tok + "'");
    }
    return value;
}

}  // namespace

TwoLayerNetwork load_network(std::istream& in) {
    expect_token(in, "symnet-network-v1");
    TwoLayerNetwork net;
    expect_token(in, "input_dim");
    net.input_dim = read_int(in);
    expect_token(in, "hidden_width");
    net.hidden_width = read_int(in);
    if (net.input_dim <= 0 || net.hidden_width <= 0)
        throw std::runtime_error("network file: dimensions must be positive");
    expect_token(in, "activation");
    std::string act = next_token(in);
    if (act == "relu")
        net.activation = Activation::relu;
    else if (act == "sigmoid")
        net.activation = Activation::sigmoid;
    else
        throw std::runtime_error("network file: unknown activation '" + act + "'");
    expect_token(in, "hidden_weights");
    net.hidden_weights.resize(static_cast<std::size_t>(net.hidden_width) *
                              static_cast<std::size_t>(net.input_dim));
    for (auto& w : net.hidden_weights) w = read_hex_double(in);
    expect_token(in, "hidden_bias");
    net.hidden_bias.resize(static_cast<std::size_t>(net.hidden_width));
    for (auto& b : net.hidden_bias) b = read_hex_double(in);
    expect_token(in, "output_weights");
    net.output_weights.resize(static_cast<std::size_t>(net.hidden_width));
    for (auto& m : net.output_weights) m = read_hex_double(in);
    expect_token(in, "output_bias");
    net.output_bias = read_hex_double(in);
    expect_token(in, "end");
    return net;
}

}  // namespace symnet
