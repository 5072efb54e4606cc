#include "ikgate/report.hpp"

#include "ikgate/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ikgate {

using nlohmann::ordered_json;

EvalReport build_eval_report(std::string name, int prefix_tokens, const std::vector<IKScore>& scores,
                             const std::vector<LabeledQuery>& labels, const std::vector<RoutingInput>& routing,
                             const std::vector<double>& grid, const std::optional<StageCosts>& costs) {
    EvalReport r;
    r.name = std::move(name);
    r.prefix_tokens = prefix_tokens;
    r.n = scores.size();
    r.acc = ik_accuracy(scores, labels);
    try {
        r.auc = ik_auc(scores, labels);
    } catch (const UndefinedAucError&) {
        r.auc.reset();
    }
    r.sweep = threshold_sweep(routing, grid);
    r.norag = r.sweep.norag_quality;
    r.rag = r.sweep.rag_quality;
    auto half = routed_quality(routing, Theta::of(0.5));
    r.at_0p5 = {Theta::of(0.5), half.mean_quality, half.retrieval_fraction, routing.size()};
    r.best = r.sweep.best;
    if (costs) {
        const bool prefix_used = prefix_tokens > 0;
        r.latency_at_0p5 = expected_latency(*costs, prefix_used, r.at_0p5.retrieval_fraction);
        r.latency_at_best = expected_latency(*costs, prefix_used, r.best.retrieval_fraction);
    }
    return r;
}

namespace {
ordered_json theta_json(const Theta& t) {
    if (t.kind() == Theta::Kind::Value) return t.value();
    return t.label();
}
}  // namespace

ordered_json to_json(const EvalReport& r) {
    ordered_json j;
    j["name"] = r.name;
    j["prefix_tokens"] = r.prefix_tokens;
    j["n"] = r.n;
    j["acc"] = r.acc;
    if (r.auc) {
        j["auc"] = *r.auc;
    } else {
        j["auc"] = nullptr;
        j["auc_undefined"] = true;
    }
    j["norag"] = r.norag;
    j["rag"] = r.rag;
    j["at_0p5"] = {{"quality", r.at_0p5.mean_quality}, {"retr", r.at_0p5.retrieval_fraction}};
    j["best"] = {{"quality", r.best.mean_quality},
                 {"retr", r.best.retrieval_fraction},
                 {"theta", theta_json(r.best.theta)}};
    if (r.latency_at_0p5) {
        j["latency"] = {{"at_0p5", to_json(*r.latency_at_0p5)}, {"at_best", to_json(*r.latency_at_best)}};
    }
    return j;
}

std::string eval_csv_header() {
    return "name,prefix_tokens,n,acc,auc,norag,rag,at_0p5_quality,at_0p5_retr,best_quality,best_retr,best_theta";
}

std::string eval_csv_fields(const EvalReport& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", r.name, r.prefix_tokens, r.n, r.acc,
                       r.auc ? fmt::format("{}", *r.auc) : std::string("undefined"), r.norag, r.rag,
                       r.at_0p5.mean_quality, r.at_0p5.retrieval_fraction, r.best.mean_quality,
                       r.best.retrieval_fraction, r.best.theta.label());
}

void write_sweep_csv(std::ostream& out, const SweepReport& sweep) {
    out << "theta,mean_quality,retrieval_fraction,n\n";
    for (const auto& row : sweep.rows) {
        out << fmt::format("{},{},{},{}\n", row.theta.label(), row.mean_quality, row.retrieval_fraction, row.n);
    }
}

void write_curve_csv(std::ostream& out, const SweepReport& sweep) {
    out << "retrieval_pct,quality,theta,norag_quality,rag_quality\n";
    for (const auto& row : sweep.rows) {
        out << fmt::format("{},{},{},{},{}\n", 100.0 * row.retrieval_fraction, row.mean_quality, row.theta.label(),
                           sweep.norag_quality, sweep.rag_quality);
    }
}

void write_histogram_csv(std::ostream& out, const IKHistogram& h) {
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.bins.size(); ++b) {
        out << fmt::format("{},{},{}\n", b / 20.0, (b + 1) / 20.0, h.bins[b]);
    }
}

ordered_json to_json(const IKHistogram& h) {
    ordered_json j;
    j["n"] = h.n;
    j["bins"] = h.bins;
    j["low_mass"] = h.low_mass;
    j["high_mass"] = h.high_mass;
    j["pattern"] = to_string(h.pattern);
    return j;
}

namespace {

constexpr double kW = 480, kH = 320, kPad = 48;

std::string svg_open(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n"
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n"
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        kW, kH, kW / 2, title, kPad, kH - kPad, kW - kPad / 2, kH - kPad, kPad, kH - kPad, kPad, kPad / 2);
}

double sx(double x01) { return kPad + x01 * (kW - 1.5 * kPad); }
double sy(double y01) { return kH - kPad - y01 * (kH - 1.5 * kPad); }

}  // namespace

std::string render_curve_svg(const SweepReport& sweep, const std::string& title) {
    std::string svg = svg_open(title);
    auto rows = sweep.rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.retrieval_fraction < b.retrieval_fraction; });
    std::string points;
    for (const auto& r : rows) points += fmt::format("{:.1f},{:.1f} ", sx(r.retrieval_fraction), sy(r.mean_quality));
    svg += fmt::format("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n", points);
    svg += fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" stroke=\"red\" stroke-dasharray=\"4\"/>\n",
                       sx(0), sx(1), sy(sweep.norag_quality));
    svg += fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" stroke=\"orange\" stroke-dasharray=\"4\"/>\n",
                       sx(0), sx(1), sy(sweep.rag_quality));
    svg += fmt::format("<line x1=\"{0:.1f}\" x2=\"{0:.1f}\" y1=\"{1}\" y2=\"{2}\" stroke=\"blue\" stroke-dasharray=\"2\"/>\n",
                       sx(0.5), sy(0), sy(1));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">% retrieval</text>\n", kW / 2, kH - 12);
    svg += fmt::format("<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">quality</text>\n",
                       kH / 2, kH / 2);
    svg += "</svg>\n";
    return svg;
}

std::string render_histogram_svg(const IKHistogram& h, const std::string& title) {
    std::string svg = svg_open(title);
    const std::size_t peak = std::max<std::size_t>(1, *std::max_element(h.bins.begin(), h.bins.end()));
    const double bar_w = (sx(1) - sx(0)) / static_cast<double>(h.bins.size());
    for (std::size_t b = 0; b < h.bins.size(); ++b) {
        const double top = sy(static_cast<double>(h.bins[b]) / static_cast<double>(peak));
        svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"steelblue\"/>\n",
                           sx(0) + b * bar_w + 1, top, bar_w - 2, sy(0) - top);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">IK score ({})</text>\n", kW / 2, kH - 12,
                       to_string(h.pattern));
    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

}  // namespace ikgate
