#include "symnet/reprbuild.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace symnet {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kSteepness = 5.0;

}  // namespace

double sigmoid_indicator(double center, double weight) {
    return sigmoid(kSteepness * (weight - center + 0.5)) +
           sigmoid(kSteepness * (center + 0.5 - weight)) - 1.0;
}

double relu_tent(double center, double weight) {
    double d = weight - center;
    return -(d > 0.0 ? d : 0.0) - (d < 0.0 ? -d : 0.0);
}

std::vector<IndicatorAtom> sigmoid_atoms(const SymmetricFunction& f) {
    std::vector<IndicatorAtom> atoms;
    for (int i : f.support())
        atoms.push_back({IndicatorAtom::Kind::sigmoid_pair, static_cast<double>(i), 1});
    return atoms;
}

std::vector<IndicatorAtom> relu_atoms(const SymmetricFunction& f) {
    std::vector<IndicatorAtom> atoms;
    std::vector<int> s = f.support();
    if (s.empty() || static_cast<int>(s.size()) == f.n + 1) return atoms;
    for (int i : s)
        atoms.push_back({IndicatorAtom::Kind::relu_pair, static_cast<double>(i), 1});
    // a subtracted tent at each midpoint flattens the bridge between
    // consecutive support weights; midpoints land on the half grid
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        atoms.push_back({IndicatorAtom::Kind::relu_pair, 0.5 * (s[k] + s[k + 1]), -1});
    return atoms;
}

TwoLayerNetwork build_sigmoid_net(const SymmetricFunction& f) {
    if (f.n <= 0) throw std::invalid_argument("build_sigmoid_net: n must be positive");
    int n = f.n;
    TwoLayerNetwork net;
    net.input_dim = n;
    net.hidden_width = 2 * n + 2;
    net.activation = Activation::sigmoid;
    net.hidden_weights.resize(static_cast<std::size_t>(net.hidden_width) *
                              static_cast<std::size_t>(n));
    net.hidden_bias.resize(static_cast<std::size_t>(net.hidden_width));
    net.output_weights.assign(static_cast<std::size_t>(net.hidden_width), 0.0);
    for (int i = 0; i <= n; ++i) {
        // pair 2i, 2i+1 computes sigmoid(5(|x| - i + 0.5)), sigmoid(5(i + 0.5 - |x|))
        for (int j = 0; j < n; ++j) {
            net.hidden_weights[static_cast<std::size_t>(2 * i) * n + j] = kSteepness;
            net.hidden_weights[static_cast<std::size_t>(2 * i + 1) * n + j] = -kSteepness;
        }
        net.hidden_bias[static_cast<std::size_t>(2 * i)] = kSteepness * (0.5 - i);
        net.hidden_bias[static_cast<std::size_t>(2 * i + 1)] = kSteepness * (i + 0.5);
    }
    for (const IndicatorAtom& atom : sigmoid_atoms(f)) {
        auto i = static_cast<int>(atom.center);
        net.output_weights[static_cast<std::size_t>(2 * i)] = 1.0;
        net.output_weights[static_cast<std::size_t>(2 * i + 1)] = 1.0;
    }
    // each selected pair contributes its window value plus a constant 1
    net.output_bias = -0.5 - f.support_size();
    return net;
}

TwoLayerNetwork build_relu_net(const SymmetricFunction& f) {
    if (f.n <= 0) throw std::invalid_argument("build_relu_net: n must be positive");
    TwoLayerNetwork net = symmetric_init(f.n);
    std::vector<int> s = f.support();
    if (s.empty()) {
        net.output_bias = -0.5;
        return net;
    }
    if (static_cast<int>(s.size()) == f.n + 1) {
        net.output_bias = 0.5;
        return net;
    }
    for (const IndicatorAtom& atom : relu_atoms(f)) {
        // a tent with coefficient c is -c on both of its relu units
        net.output_weights[static_cast<std::size_t>(plus_unit_index(atom.center))] =
            -static_cast<double>(atom.coefficient);
        net.output_weights[static_cast<std::size_t>(minus_unit_index(atom.center))] =
            -static_cast<double>(atom.coefficient);
    }
    net.output_bias = 0.5 * (s.back() - s.front()) + 0.5;
    return net;
}

namespace {

bool half_integer(double v) {
    // the magnitude cap keeps every doubled product below 2^40 and the
    // accumulator far from int64 overflow even for absurd loaded nets
    double d = 2.0 * v;
    return std::abs(d) < 0x1p20 && d == std::floor(d);
}

// Exact score of a half-integer relu net on a 0/1 input, scaled by 4 and
// carried in int64. Used to cross-check the floating-point forward pass.
bool exact_quad_score(const TwoLayerNetwork& net, const std::uint8_t* bits,
                      std::int64_t& out) {
    if (net.activation != Activation::relu) return false;
    for (double w : net.hidden_weights)
        if (!half_integer(w)) return false;
    for (double b : net.hidden_bias)
        if (!half_integer(b)) return false;
    for (double m : net.output_weights)
        if (!half_integer(m)) return false;
    if (!half_integer(net.output_bias)) return false;

    std::int64_t acc = 0;
    auto n = static_cast<std::size_t>(net.input_dim);
    for (int r = 0; r < net.hidden_width; ++r) {
        std::int64_t pre2 = static_cast<std::int64_t>(
            2.0 * net.hidden_bias[static_cast<std::size_t>(r)]);
        const double* row = net.hidden_weights.data() + static_cast<std::size_t>(r) * n;
        for (std::size_t j = 0; j < n; ++j)
            if (bits[j]) pre2 += static_cast<std::int64_t>(2.0 * row[j]);
        if (pre2 > 0)
            acc += static_cast<std::int64_t>(
                       2.0 * net.output_weights[static_cast<std::size_t>(r)]) *
                   pre2;
    }
    out = acc + 2 * static_cast<std::int64_t>(2.0 * net.output_bias);
    return true;
}

}  // namespace

CheckReport verify_representation(const TwoLayerNetwork& net, const SymmetricFunction& f) {
    if (net.input_dim != f.n)
        throw std::invalid_argument("verify_representation: dimension mismatch");
    int n = f.n;
    CheckReport report;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            x[static_cast<std::size_t>(k - 1)] = 1.0;
            bits[static_cast<std::size_t>(k - 1)] = 1;
        }
        double s = score(net, x);
        std::int64_t quad = 0;
        if (exact_quad_score(net, bits.data(), quad) && s != static_cast<double>(quad) / 4.0)
            throw std::logic_error(
                "verify_representation: float score disagrees with exact arithmetic");
        CheckRow row;
        row.weight = k;
        row.score = s;
        row.expected = f.label_of_weight(k);
        row.pass = ((s > 0.0 ? 1 : -1) == row.expected);
        if (!row.pass) report.passed = false;
        report.rows.push_back(row);
    }

    if (n <= 12) {
        std::vector<double> probe(static_cast<std::size_t>(n));
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            for (int j = 0; j < n; ++j)
                probe[static_cast<std::size_t>(j)] = (mask >> j) & 1u ? 1.0 : 0.0;
            int expected = f.label_of_weight(std::popcount(mask));
            double s = score(net, probe);
            ++report.exhaustive_points;
            if ((s > 0.0 ? 1 : -1) != expected) {
                ++report.exhaustive_failures;
                report.passed = false;
            }
        }
    }
    return report;
}

void write_csv(const CheckReport& report, std::ostream& out) {
    out << "weight,score,expected,pass\n";
    char buf[32];
    for (const CheckRow& row : report.rows) {
        auto res = std::to_chars(buf, buf + sizeof buf, row.score);
        out << row.weight << ',' << std::string_view(buf, res.ptr - buf) << ','
            << row.expected << ',' << (row.pass ? 1 : 0) << '\n';
    }
}

}  // namespace symnet
