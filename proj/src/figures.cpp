#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "symnet/harness.hpp"

namespace symnet {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trace_filename(const ExperimentConfig& cfg, const std::string& arm) {
    return cfg.arms.size() == 1 ? "trace.csv" : "trace-" + arm + ".csv";
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_experiment_csv(const ExperimentResult& result,
                          const std::filesystem::path& out_dir) {
    const ExperimentConfig& cfg = result.config;
    std::filesystem::path root = out_dir / cfg.preset;
    auto seeds = static_cast<std::size_t>(cfg.seeds);

    for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        for (std::size_t s = 0; s < seeds; ++s) {
            std::filesystem::path dir = root / std::to_string(s);
            std::filesystem::create_directories(dir);
            std::filesystem::path file = dir / trace_filename(cfg, cfg.arms[a].name);
            std::ofstream out(file);
            if (!out) throw std::runtime_error("cannot write " + file.string());
            write_csv(result.traces[a * seeds + s], out);
        }
    }

    std::filesystem::create_directories(root);
    std::filesystem::path summary_path = root / "summary.csv";
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot write " + summary_path.string());
    out << "# aggregate rows (seed mean/min/max) summarize the per-seed finals\n";
    out << "arm,seed,stop,epochs,updates,final_train_error,final_true_error,error\n";
    for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        for (std::size_t s = 0; s < seeds; ++s) {
            const RunSummary& run = result.summaries[a * seeds + s];
            out << run.arm << ',' << run.seed_index << ',';
            if (run.error.empty()) {
                out << to_string(run.stop) << ',' << run.epochs << ',' << run.updates
                    << ',' << fmt(run.final_train_error) << ','
                    << fmt(run.final_true_error) << ",\n";
            } else {
                std::string msg = run.error;
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                out << ",,,,," << msg << '\n';
            }
        }
    }
    for (const ArmAggregate& agg : result.aggregates()) {
        out << agg.arm << ",mean,,," << fmt(agg.mean_updates) << ','
            << fmt(agg.mean_train) << ',' << fmt(agg.mean_true) << ",\n";
        out << agg.arm << ",min,,,," << fmt(agg.min_train) << ',' << fmt(agg.min_true)
            << ",\n";
        out << agg.arm << ",max,,,," << fmt(agg.max_train) << ',' << fmt(agg.max_true)
            << ",\n";
    }
    write_experiment_svg(result, root / "figure.svg");
}

void write_experiment_svg(const ExperimentResult& result,
                          const std::filesystem::path& svg_path) {
    const ExperimentConfig& cfg = result.config;
    auto seeds = static_cast<std::size_t>(cfg.seeds);

    // seed-0 traces only; the summary csv carries the spread across seeds
    double max_epoch = 1.0;
    for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        const TrainTrace& trace = result.traces[a * seeds];
        if (!trace.epochs.empty())
            max_epoch = std::max(max_epoch,
                                 static_cast<double>(trace.epochs.back().epoch));
    }

    const double left = 70.0, top = 30.0, width = 560.0, height = 460.0;
    auto sx = [&](double epoch) { return left + width * (epoch / max_epoch); };
    auto sy = [&](double err) { return top + height * (1.0 - err); };

    std::ofstream out(svg_path);
    if (!out) throw std::runtime_error("cannot write " + svg_path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"540\" "
           "viewBox=\"0 0 880 540\">\n";
    out << "<!-- preset=" << cfg.preset << " n=" << cfg.n
        << " base_seed=" << result.base_seed << " seed=0 -->\n";
    out << "<rect width=\"880\" height=\"540\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\""
        << fmt(left) << "\" y2=\"" << fmt(top + height)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + height) << "\" x2=\""
        << fmt(left + width) << "\" y2=\"" << fmt(top + height)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double err = 0.25 * i;
        out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(err))
            << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(sy(err))
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(left - 10) << "\" y=\"" << fmt(sy(err) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(err) << "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        double epoch = std::floor(max_epoch * i / 5.0);
        out << "<line x1=\"" << fmt(sx(epoch)) << "\" y1=\"" << fmt(top + height)
            << "\" x2=\"" << fmt(sx(epoch)) << "\" y2=\"" << fmt(top + height + 5)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(sx(epoch)) << "\" y=\"" << fmt(top + height + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(epoch)
            << "</text>\n";
    }
    out << "<text x=\"" << fmt(left + width / 2) << "\" y=\"530\" font-size=\"13\" "
           "text-anchor=\"middle\">epoch</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(top + height / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt(top + height / 2) << ")\">error</text>\n";
    out << "<text x=\"" << fmt(left + width / 2) << "\" y=\"20\" font-size=\"14\" "
           "text-anchor=\"middle\">"
        << cfg.preset << " (n=" << cfg.n << ", seed 0)</text>\n";

    for (std::size_t a = 0; a < cfg.arms.size(); ++a) {
        const TrainTrace& trace = result.traces[a * seeds];
        const char* color = kPalette[a % (sizeof kPalette / sizeof kPalette[0])];
        std::string train_pts, true_pts;
        for (const EpochRecord& rec : trace.epochs) {
            train_pts += fmt(sx(static_cast<double>(rec.epoch)));
            train_pts += ',';
            train_pts += fmt(sy(std::clamp(rec.train_error, 0.0, 1.0)));
            train_pts += ' ';
            if (!std::isnan(rec.true_error)) {
                true_pts += fmt(sx(static_cast<double>(rec.epoch)));
                true_pts += ',';
                true_pts += fmt(sy(std::clamp(rec.true_error, 0.0, 1.0)));
                true_pts += ' ';
            }
        }
        if (!train_pts.empty())
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" points=\"" << train_pts << "\"/>\n";
        if (!true_pts.empty())
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\" points=\""
                << true_pts << "\"/>\n";

        double ly = 40.0 + 34.0 * static_cast<double>(a);
        out << "<line x1=\"650\" y1=\"" << fmt(ly) << "\" x2=\"678\" y2=\"" << fmt(ly)
            << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"684\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">"
            << cfg.arms[a].name << " train</text>\n";
        out << "<line x1=\"650\" y1=\"" << fmt(ly + 16) << "\" x2=\"678\" y2=\""
            << fmt(ly + 16) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n";
        out << "<text x=\"684\" y=\"" << fmt(ly + 20) << "\" font-size=\"12\">"
            << cfg.arms[a].name << " true</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace symnet
