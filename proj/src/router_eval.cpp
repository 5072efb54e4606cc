#include "ikgate/router_eval.hpp"

#include "ikgate/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ikgate {

Mode route(double ik, double theta) { return ik < theta ? Mode::Rag : Mode::NoRag; }

Theta Theta::of(double value) {
    if (!(value >= 0.0 && value <= 1.0)) throw RangeError("threshold must lie in [0,1]");
    return Theta(Kind::Value, value);
}

double Theta::cut() const {
    switch (kind_) {
        case Kind::Never: return -std::numeric_limits<double>::infinity();
        case Kind::Always: return std::numeric_limits<double>::infinity();
        case Kind::Value: break;
    }
    return value_;
}

std::string Theta::label() const {
    switch (kind_) {
        case Kind::Never: return "never";
        case Kind::Always: return "always";
        case Kind::Value: break;
    }
    return fmt::format("{}", value_);
}

bool Theta::operator<(const Theta& other) const {
    if (kind_ != other.kind_) return static_cast<int>(kind_) < static_cast<int>(other.kind_);
    return value_ < other.value_;
}

namespace {

void check_aligned(const std::vector<IKScore>& scores, const std::vector<LabeledQuery>& labels) {
    if (scores.size() != labels.size()) throw RangeError("scores and labels differ in length");
    if (scores.empty()) throw RangeError("no scores to evaluate");
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].query_id != labels[i].query_id) {
            throw RangeError("id mismatch at position " + std::to_string(i) + ": '" + scores[i].query_id +
                             "' vs '" + labels[i].query_id + "'");
        }
    }
}

}  // namespace

double ik_accuracy(const std::vector<IKScore>& scores, const std::vector<LabeledQuery>& labels) {
    check_aligned(scores, labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        hits += (scores[i].ik >= 0.5) == (labels[i].label == Label::Yes);
    }
    return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double ik_auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw RangeError("scores and labels differ in length");
    std::vector<unsigned char> positive(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!std::isfinite(scores[i])) throw RangeError("AUC scores must be finite");
        positive[i] = labels[i] == Label::Yes;
    }
    double auc = kernels::auc_midrank(scores, positive);
    if (std::isnan(auc)) throw UndefinedAucError("AUC is undefined: labels contain a single class");
    return auc;
}

double ik_auc(const std::vector<IKScore>& scores, const std::vector<LabeledQuery>& labels) {
    check_aligned(scores, labels);
    std::vector<double> s;
    std::vector<Label> l;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        s.push_back(scores[i].ik);
        l.push_back(labels[i].label);
    }
    return ik_auc(s, l);
}

std::vector<RoutedQuery> route_all(std::span<const RoutingInput> inputs, const Theta& theta) {
    std::vector<RoutedQuery> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) {
        RoutedQuery q{in.query_id, in.ik, route(in.ik, theta.cut()), in.eval_norag, in.eval_rag, 0.0};
        q.eval_selected = q.mode_chosen == Mode::Rag ? in.eval_rag : in.eval_norag;
        out.push_back(std::move(q));
    }
    return out;
}

namespace {

struct Columns {
    std::vector<double> ik, norag, rag;
    explicit Columns(std::span<const RoutingInput> inputs) {
        for (const auto& in : inputs) {
            ik.push_back(in.ik);
            norag.push_back(in.eval_norag);
            rag.push_back(in.eval_rag);
        }
    }
    kernels::RoutingColumns view() const { return {ik, norag, rag}; }
};

}  // namespace

QualityPoint routed_quality(std::span<const RoutingInput> inputs, const Theta& theta) {
    if (inputs.empty()) throw RangeError("routed_quality needs at least one query");
    Columns cols(inputs);
    const double cut = theta.cut();
    kernels::RowStats row;
    kernels::sweep_serial(cols.view(), std::span<const double>(&cut, 1), std::span<kernels::RowStats>(&row, 1));
    return {row.mean_quality, row.retrieval_fraction};
}

std::vector<double> default_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
    return grid;
}

SweepReport threshold_sweep(std::span<const RoutingInput> inputs, std::vector<double> grid) {
    if (inputs.empty()) throw RangeError("threshold_sweep needs at least one query");
    if (grid.empty()) throw RangeError("threshold grid is empty");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<Theta> thetas{Theta::never()};
    for (double g : grid) thetas.push_back(Theta::of(g));
    thetas.push_back(Theta::always());
    std::vector<double> cuts;
    for (const auto& t : thetas) cuts.push_back(t.cut());

    Columns cols(inputs);
    std::vector<kernels::RowStats> stats(cuts.size());
    kernels::sweep_parallel(cols.view(), cuts, stats);

    SweepReport report;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        report.rows.push_back({thetas[i], stats[i].mean_quality, stats[i].retrieval_fraction, inputs.size()});
    }
    report.norag_quality = report.rows.front().mean_quality;
    report.rag_quality = report.rows.back().mean_quality;

    constexpr double kTie = 1e-12;
    report.best = report.rows.front();
    for (const auto& row : report.rows) {
        if (row.mean_quality > report.best.mean_quality + kTie) {
            report.best = row;
        } else if (std::abs(row.mean_quality - report.best.mean_quality) <= kTie &&
                   row.retrieval_fraction < report.best.retrieval_fraction) {
            report.best = row;
        }
    }
    return report;
}

std::string to_string(HistogramPattern p) {
    switch (p) {
        case HistogramPattern::HighKnowledge: return "high_knowledge";
        case HistogramPattern::LowKnowledge: return "low_knowledge";
        case HistogramPattern::UShaped: return "u_shaped";
        case HistogramPattern::Flat: return "flat";
    }
    return "flat";
}

IKHistogram characterize(std::span<const double> ik) {
    if (ik.size() < 20) throw RangeError("characterize needs at least 20 scores, got " + std::to_string(ik.size()));
    IKHistogram h;
    h.n = ik.size();
    kernels::histogram_parallel(ik, h.bins);
    std::size_t low = 0, high = 0;
    for (double v : ik) {
        low += v < 0.2;
        high += v > 0.8;
    }
    h.low_mass = static_cast<double>(low) / static_cast<double>(h.n);
    h.high_mass = static_cast<double>(high) / static_cast<double>(h.n);
    if (h.low_mass >= 0.25 && h.high_mass >= 0.25) {
        h.pattern = HistogramPattern::UShaped;
    } else if (h.high_mass >= 0.5) {
        h.pattern = HistogramPattern::HighKnowledge;
    } else if (h.low_mass >= 0.5) {
        h.pattern = HistogramPattern::LowKnowledge;
    } else {
        h.pattern = HistogramPattern::Flat;
    }
    return h;
}

IKHistogram characterize(const std::vector<IKScore>& scores) {
    std::vector<double> ik;
    ik.reserve(scores.size());
    for (const auto& s : scores) ik.push_back(s.ik);
    return characterize(ik);
}

}  // namespace ikgate
