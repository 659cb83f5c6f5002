#include "symnet/perceptron.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "symnet/kernels.hpp"
#include "symnet/reprbuild.hpp"

namespace symnet {

LabeledPointSet LabeledPointSet::from_embedding(const Embedding& e,
                                                std::span<const int> labels) {
    if (labels.size() != e.count)
        throw std::invalid_argument("from_embedding: label count mismatch");
    LabeledPointSet ps;
    ps.dim = e.dim;
    ps.count = e.count;
    ps.points = e.points;
    ps.labels.assign(labels.begin(), labels.end());
    for (int y : ps.labels)
        if (y != 1 && y != -1)
            throw std::invalid_argument("from_embedding: labels must be +/-1");
    ps.max_norm = e.max_norm();
    return ps;
}

LabeledPointSet LabeledPointSet::from_embedding(const Embedding& e,
                                                const SymmetricFunction& f) {
    if (e.weight_tag.size() != e.count)
        throw std::invalid_argument("from_embedding: embedding has no weight tags");
    std::vector<int> labels(e.count);
    for (std::size_t i = 0; i < e.count; ++i)
        labels[i] = f.label_of_weight(e.weight_tag[i]);
    return from_embedding(e, labels);
}

double margin_of(std::span<const double> w, const LabeledPointSet& ps) {
    if (w.size() != static_cast<std::size_t>(ps.dim))
        throw std::invalid_argument("margin_of: dimension mismatch");
    const auto& ops = kernels::active();
    double norm = std::sqrt(ops.sum_sq(w.data(), w.size()));
    if (norm == 0.0) throw std::invalid_argument("margin_of: zero vector");
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ps.count; ++i) {
        auto p = ps.point(i);
        double s = ps.labels[i] * ops.dot(w.data(), p.data(), p.size());
        if (s < worst) worst = s;
    }
    return worst / norm;
}

PerceptronBounds perceptron_bounds(double gamma, double R, double step,
                                   double confidence) {
    if (gamma <= 0.0 || R <= 0.0 || step <= 0.0 || confidence < 0.0)
        throw std::invalid_argument("perceptron_bounds: bad arguments");
    double growth = 2.0 * confidence * step + (R * step) * (R * step);
    PerceptronBounds b;
    b.update_bound = growth / ((gamma * step) * (gamma * step));
    b.margin_lb = gamma * confidence * step / growth;
    return b;
}

PerceptronResult run_modified_perceptron(const LabeledPointSet& ps,
                                         const PerceptronConfig& cfg) {
    if (cfg.step_size <= 0.0)
        throw std::invalid_argument("perceptron: step_size must be positive");
    if (cfg.confidence < 0.0)
        throw std::invalid_argument("perceptron: confidence must be nonnegative");
    const auto& ops = kernels::active();

    PerceptronResult res;
    res.w.assign(static_cast<std::size_t>(ps.dim), 0.0);
    if (cfg.gamma_hint > 0.0) {
        PerceptronBounds b =
            perceptron_bounds(cfg.gamma_hint, ps.max_norm, cfg.step_size, cfg.confidence);
        res.bound_updates = b.update_bound;
        res.bound_margin = b.margin_lb;
    }

    std::uint64_t cap = cfg.max_updates;
    if (cap == 0)
        cap = res.bound_updates > 0.0
                  ? 10 * static_cast<std::uint64_t>(std::ceil(res.bound_updates))
                  : kDefaultUpdateCap;

    auto start = std::chrono::steady_clock::now();
    if (ps.count > 0) {
        std::size_t clean_streak = 0;
        std::size_t i = 0;
        while (clean_streak < ps.count) {
            auto p = ps.point(i);
            double s = ps.labels[i] * ops.dot(res.w.data(), p.data(), p.size());
            if (s <= cfg.confidence) {
                ops.axpy(ps.labels[i] * cfg.step_size, p.data(), res.w.data(), p.size());
                ++res.updates;
                clean_streak = 0;
                if (cfg.record_updates)
                    res.update_sequence.push_back(static_cast<std::uint32_t>(i));
                if (res.updates >= cap) break;
            } else {
                ++clean_streak;
            }
            i = (i + 1) % ps.count;
        }
        res.converged = clean_streak >= ps.count;
    } else {
        res.converged = true;
    }
    auto stop = std::chrono::steady_clock::now();
    res.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    if (res.updates > 0) res.achieved_margin = margin_of(res.w, ps);
    return res;
}

void write_text(const PerceptronResult& r, std::ostream& out) {
    char buf[32];
    auto fmt = [&buf](double v) {
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    out << "updates " << r.updates << '\n';
    out << "converged " << (r.converged ? 1 : 0) << '\n';
    out << "achieved_margin " << fmt(r.achieved_margin) << '\n';
    out << "bound_updates " << fmt(r.bound_updates) << '\n';
    out << "bound_margin " << fmt(r.bound_margin) << '\n';
    out << "wall_time_ms " << fmt(r.wall_time_ms) << '\n';
}

SeparatorCertificate initial_margin_certificate(int n, const SymmetricFunction& f) {
    if (f.n != n) throw std::invalid_argument("certificate: dimension mismatch");
    TwoLayerNetwork net = build_relu_net(f);
    Embedding classes = initial_embedding_classes(n);
    const auto& ops = kernels::active();

    SeparatorCertificate cert;
    cert.n = n;
    cert.separator = net.output_weights;
    cert.separator.push_back(net.output_bias);
    for (std::size_t k = 0; k < classes.count; ++k) {
        auto p = classes.point(k);
        double s = ops.dot(cert.separator.data(), p.data(), p.size());
        int label = f.label_of_weight(classes.weight_tag[k]);
        // the construction scores exactly +0.5 on support classes and at
        // most -0.5 elsewhere; anything weaker means the hidden layers of
        // build_relu_net and symmetric_init fell out of alignment
        if (label * s < 0.5)
            throw std::logic_error("certificate: class margin below 0.5");
    }
    cert.norm = std::sqrt(ops.sum_sq(cert.separator.data(), cert.separator.size()));
    cert.margin_lb = 0.5 / cert.norm;
    return cert;
}

}  // namespace symnet
