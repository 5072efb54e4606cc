#pragma once

#include "ikgate/ik_scorer.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/teacher.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ikgate {

/// Retrieve on low confidence: RAG iff ik < theta; ties answer closed-book.
Mode route(double ik, double theta);

/// A routing threshold, or one of the two sentinels that bracket every grid.
class Theta {
public:
    enum class Kind { Never, Value, Always };

    static Theta never() { return Theta(Kind::Never, 0.0); }
    static Theta always() { return Theta(Kind::Always, 1.0); }
    static Theta of(double value);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    /// Cut used by routing: -inf for never, +inf for always.
    double cut() const;
    /// "never", "always" or the shortest round-trip decimal of the value.
    std::string label() const;

    bool operator==(const Theta&) const = default;
    bool operator<(const Theta& other) const;

private:
    Theta(Kind kind, double value) : kind_(kind), value_(value) {}
    Kind kind_;
    double value_;
};

struct LabeledQuery {
    std::string query_id;
    Label label = Label::No;
};

/// Fraction of queries where (ik >= 0.5) agrees with label == Yes. Inputs are
/// aligned by position and must carry the same ids.
double ik_accuracy(const std::vector<IKScore>& scores, const std::vector<LabeledQuery>& labels);

/// Mann-Whitney AUC with ties counted half, via midranks. Throws
/// UndefinedAucError when all labels agree.
double ik_auc(const std::vector<IKScore>& scores, const std::vector<LabeledQuery>& labels);
double ik_auc(std::span<const double> scores, std::span<const Label> labels);

struct RoutingInput {
    std::string query_id;
    double ik = 0.5;
    double eval_norag = 0.0;
    double eval_rag = 0.0;
};

struct RoutedQuery {
    std::string query_id;
    double ik = 0.5;
    Mode mode_chosen = Mode::NoRag;
    double eval_norag = 0.0;
    double eval_rag = 0.0;
    double eval_selected = 0.0;
};

std::vector<RoutedQuery> route_all(std::span<const RoutingInput> inputs, const Theta& theta);

struct QualityPoint {
    double mean_quality = 0.0;
    double retrieval_fraction = 0.0;
};

QualityPoint routed_quality(std::span<const RoutingInput> inputs, const Theta& theta);

struct SweepRow {
    Theta theta = Theta::never();
    double mean_quality = 0.0;
    double retrieval_fraction = 0.0;
    std::size_t n = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // never, sorted grid, always
    SweepRow best;
    double norag_quality = 0.0;
    double rag_quality = 0.0;
};

/// 0, 0.05, ..., 1.0
std::vector<double> default_grid();

/// One row per distinct grid value plus both sentinels. Best row: highest
/// quality, then lowest retrieval fraction, then lowest theta.
SweepReport threshold_sweep(std::span<const RoutingInput> inputs, std::vector<double> grid);

enum class HistogramPattern { HighKnowledge, LowKnowledge, UShaped, Flat };
std::string to_string(HistogramPattern p);

struct IKHistogram {
    static constexpr std::size_t kBins = 20;
    std::array<std::size_t, kBins> bins{};
    std::size_t n = 0;
    double low_mass = 0.0;   // ik < 0.2
    double high_mass = 0.0;  // ik > 0.8
    HistogramPattern pattern = HistogramPattern::Flat;
};

/// Throws RangeError for fewer than 20 scores.
IKHistogram characterize(std::span<const double> ik);
IKHistogram characterize(const std::vector<IKScore>& scores);

}  // namespace ikgate
