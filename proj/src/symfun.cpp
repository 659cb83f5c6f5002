#include "symnet/symfun.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace symnet {

namespace {

void append_double(std::string& out, double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw std::runtime_error("dataset csv: bad number on line " +
                                 std::to_string(line_no));
    return value;
}

}  // namespace

int hamming_weight(std::span<const std::uint8_t> bits) {
    int w = 0;
    for (std::uint8_t b : bits) w += b ? 1 : 0;
    return w;
}

SymmetricFunction SymmetricFunction::from_support(int n, std::span<const int> support) {
    if (n < 0) throw std::invalid_argument("from_support: n must be nonnegative");
    SymmetricFunction f;
    f.n = n;
    f.in_support.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int s : support) {
        if (s < 0 || s > n)
            throw std::invalid_argument("from_support: weight " + std::to_string(s) +
                                        " outside [0, " + std::to_string(n) + "]");
        f.in_support[static_cast<std::size_t>(s)] = 1;
    }
    return f;
}

SymmetricFunction SymmetricFunction::parity(int n) {
    if (n < 0) throw std::invalid_argument("parity: n must be nonnegative");
    SymmetricFunction f;
    f.n = n;
    f.in_support.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int w = 1; w <= n; w += 2) f.in_support[static_cast<std::size_t>(w)] = 1;
    return f;
}

SymmetricFunction SymmetricFunction::majority(int n) {
    if (n < 0) throw std::invalid_argument("majority: n must be nonnegative");
    SymmetricFunction f;
    f.n = n;
    f.in_support.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int w = 0; w <= n; ++w)
        if (2 * w > n) f.in_support[static_cast<std::size_t>(w)] = 1;
    return f;
}

SymmetricFunction SymmetricFunction::random(int n, Rng& rng) {
    if (n < 0) throw std::invalid_argument("random: n must be nonnegative");
    SymmetricFunction f;
    f.n = n;
    f.in_support.resize(static_cast<std::size_t>(n) + 1);
    for (auto& bit : f.in_support) bit = rng.bernoulli(0.5) ? 1 : 0;
    return f;
}

int SymmetricFunction::label_of_weight(int weight) const {
    if (weight < 0 || weight > n)
        throw std::invalid_argument("label_of_weight: weight out of range");
    return in_support[static_cast<std::size_t>(weight)] ? 1 : -1;
}

int SymmetricFunction::eval(std::span<const std::uint8_t> bits) const {
    if (bits.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("eval: input has wrong dimension");
    return label_of_weight(hamming_weight(bits));
}

std::vector<int> SymmetricFunction::support() const {
    std::vector<int> s;
    for (int w = 0; w <= n; ++w)
        if (in_support[static_cast<std::size_t>(w)]) s.push_back(w);
    return s;
}

int SymmetricFunction::support_size() const {
    int c = 0;
    for (auto b : in_support) c += b ? 1 : 0;
    return c;
}

std::vector<std::uint8_t> random_bits(int n, Rng& rng) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = rng.bernoulli(0.5) ? 1 : 0;
    return bits;
}

Dataset sample_dataset(const SymmetricFunction& f, std::size_t m, Rng& rng) {
    Dataset ds;
    ds.n = f.n;
    ds.count = m;
    ds.inputs.resize(m * static_cast<std::size_t>(f.n));
    ds.labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        int weight = 0;
        for (int j = 0; j < f.n; ++j) {
            bool one = rng.bernoulli(0.5);
            ds.inputs[i * static_cast<std::size_t>(f.n) + static_cast<std::size_t>(j)] =
                one ? 1.0 : 0.0;
            weight += one ? 1 : 0;
        }
        ds.labels[i] = f.label_of_weight(weight);
    }
    return ds;
}

Dataset flip_labels(const Dataset& ds, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("flip_labels: p must lie in [0, 1]");
    Dataset out = ds;
    for (auto& label : out.labels)
        if (rng.bernoulli(p)) label = -label;
    out.provenance = {ProvenanceKind::label_flipped, p};
    return out;
}

Dataset perturb_inputs(const Dataset& ds, double radius, Rng& rng) {
    if (radius < 0.0)
        throw std::invalid_argument("perturb_inputs: radius must be nonnegative");
    Dataset out = ds;
    for (auto& value : out.inputs) value += rng.uniform(-radius, radius);
    out.provenance = {ProvenanceKind::input_perturbed, radius};
    return out;
}

void write_csv(const Dataset& ds, std::ostream& out) {
    std::string line;
    for (int j = 0; j < ds.n; ++j) {
        line += "x_";
        line += std::to_string(j);
        line += ',';
    }
    line += "label\n";
    out << line;
    for (std::size_t i = 0; i < ds.count; ++i) {
        line.clear();
        auto row = ds.input(i);
        for (double v : row) {
            append_double(line, v);
            line += ',';
        }
        line += ds.labels[i] > 0 ? "1" : "-1";
        line += '\n';
        out << line;
    }
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    int n = 0;
    {
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string_view field(line.data() + pos,
                                   (comma == std::string::npos ? line.size() : comma) - pos);
            if (field == "label") {
                if (comma != std::string::npos)
                    throw std::runtime_error("dataset csv: label must be the last column");
                break;
            }
            if (field.substr(0, 2) != "x_")
                throw std::runtime_error("dataset csv: unexpected column name");
            ++n;
            if (comma == std::string::npos)
                throw std::runtime_error("dataset csv: missing label column");
            pos = comma + 1;
        }
    }

    Dataset ds;
    ds.n = n;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t pos = 0;
        for (int j = 0; j < n; ++j) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos)
                throw std::runtime_error("dataset csv: too few fields on line " +
                                         std::to_string(line_no));
            ds.inputs.push_back(parse_double({line.data() + pos, comma - pos}, line_no));
            pos = comma + 1;
        }
        std::string_view label_field(line.data() + pos, line.size() - pos);
        if (label_field == "1" || label_field == "+1")
            ds.labels.push_back(1);
        else if (label_field == "-1")
            ds.labels.push_back(-1);
        else
            throw std::runtime_error("dataset csv: label must be +1 or -1 on line " +
                                     std::to_string(line_no));
        ++ds.count;
    }
    return ds;
}

}  // namespace symnet
