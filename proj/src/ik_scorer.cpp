#include "ikgate/ik_scorer.hpp"

#include "ikgate/concurrency.hpp"
#include "ikgate/prompts.hpp"

#include <boost/algorithm/string/case_conv.hpp>
#include <boost/algorithm/string/trim.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

namespace ikgate {

using nlohmann::json;
using nlohmann::ordered_json;

double ik_from_logits(double yes_logit, double no_logit) {
    if (!std::isfinite(yes_logit) || !std::isfinite(no_logit)) throw RangeError("IK logits must be finite");
    return 1.0 / (1.0 + std::exp(no_logit - yes_logit));
}

YesNoLogits extract_yes_no(const FirstTokenLogits& candidates) {
    if (candidates.candidates.empty()) throw MissingClassError("Yes", "no first-token candidates");
    std::optional<double> yes, no;
    for (const auto& c : candidates.candidates) {
        auto text = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(c.token));
        if (text == "yes") yes = std::max(yes.value_or(-std::numeric_limits<double>::infinity()), c.logprob);
        if (text == "no") no = std::max(no.value_or(-std::numeric_limits<double>::infinity()), c.logprob);
    }
    if (!yes || !no) {
        std::string missing = !yes ? "Yes" : "No";
        std::string msg = "class '" + missing + "' not among top-" + std::to_string(candidates.candidates.size()) +
                          " candidates for '" + candidates.query_id + "':";
        for (const auto& c : candidates.candidates) msg += " [" + c.token + "]=" + std::to_string(c.logprob);
        throw MissingClassError(missing, msg);
    }
    return {*yes, *no};
}

// ---------------------------------------------------------------------------
// Backends

RemoteEndpointBackend::RemoteEndpointBackend(std::string base_url, std::chrono::milliseconds timeout,
                                             int retry_limit, std::size_t max_parallel)
    : timeout_(timeout), retry_limit_(retry_limit), max_parallel_(std::max<std::size_t>(1, max_parallel)) {
    std::tie(origin_, path_prefix_) = split_base_url(base_url);
}

YesNoLogits RemoteEndpointBackend::logits(const ScoreInput& input) {
    const std::string body = json{{"question", input.question}, {"answer_prefix", input.answer_prefix}}.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= retry_limit_; ++attempt) {
        note_network_call();
        httplib::Client client(origin_);
        auto s = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
        auto us = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - s);
        client.set_connection_timeout(s.count(), us.count());
        client.set_read_timeout(s.count(), us.count());
        auto res = client.Post(path_prefix_ + "/score", body, "application/json");
        if (!res) {
            last_error = "HTTP request failed: " + httplib::to_string(res.error());
        } else if (res->status >= 500 || res->status == 429) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
        } else if (res->status != 200) {
            throw BackendError(input.query_id, "HTTP " + std::to_string(res->status) + ": " + res->body);
        } else {
            try {
                auto j = json::parse(res->body);
                return {j.at("yes_logit").get<double>(), j.at("no_logit").get<double>()};
            } catch (const json::exception& e) {
                throw BackendError(input.query_id, std::string("malformed /score response: ") + e.what());
            }
        }
        if (attempt < retry_limit_) std::this_thread::sleep_for(std::chrono::milliseconds(50) * (1 << attempt));
    }
    throw BackendError(input.query_id, last_error);
}

ChatLogprobAdapter::ChatLogprobAdapter(std::shared_ptr<InferenceClient> client) : client_(std::move(client)) {}

YesNoLogits ChatLogprobAdapter::logits(const ScoreInput& input) {
    auto top = client_->first_token_logits(render_scorer_prompt(input.question, input.answer_prefix), input.query_id);
    return extract_yes_no(top);
}

YesNoLogits CalibratedStub::logits(const ScoreInput& input) {
    auto it = table_.find(input.query_id);
    if (it == table_.end()) throw BackendError(input.query_id, "calibrated stub has no score for this query");
    return it->second;
}

void CalibratedStub::set_logits(const std::string& query_id, double yes_logit, double no_logit) {
    table_[query_id] = {yes_logit, no_logit};
}

void CalibratedStub::set_ik(const std::string& query_id, double ik) {
    if (!(ik > 0.0 && ik < 1.0)) throw RangeError("ik must lie in (0,1)");
    set_logits(query_id, std::log(ik), std::log1p(-ik));
}

double binormal_max_accuracy(double target_auc, double positive_rate) {
    const boost::math::normal phi;
    const double pos = positive_rate;
    const double neg = 1.0 - positive_rate;
    const double gap = std::sqrt(2.0) * boost::math::quantile(phi, target_auc);
    if (gap <= 0.0 || pos <= 0.0 || neg <= 0.0) return std::max(pos, neg);
    const double t = gap / 2.0 + std::log(neg / pos) / gap;
    return pos * boost::math::cdf(boost::math::complement(phi, t - gap)) + neg * boost::math::cdf(phi, t);
}

std::shared_ptr<CalibratedStub> calibrated_stub(double target_acc, double target_auc,
                                                const std::vector<std::pair<std::string, Label>>& labels,
                                                std::uint64_t seed) {
    if (!(target_acc >= 0.5 && target_acc < 1.0)) throw RangeError("target_acc must lie in [0.5, 1)");
    if (!(target_auc >= 0.5 && target_auc < 1.0)) throw RangeError("target_auc must lie in [0.5, 1)");
    const std::size_t n = labels.size();
    const auto n_pos = static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [](const auto& l) { return l.second == Label::Yes; }));
    if (n_pos == 0 || n_pos == n) throw RangeError("calibrated stub needs both Yes and No labels");

    // Accuracy reachable by moving the boundary spans [min class rate, binormal max].
    // Targets within the measurement tolerance of that range are snapped to it.
    constexpr double kTolerance = 0.02;
    const double pos_rate = static_cast<double>(n_pos) / static_cast<double>(n);
    const double lo = std::min(pos_rate, 1.0 - pos_rate);
    const double hi = binormal_max_accuracy(target_auc, pos_rate);
    if (target_acc > hi + kTolerance || target_acc < lo - kTolerance) {
        throw InfeasibleTargetError("accuracy " + std::to_string(target_acc) + " is out of reach at AUC " +
                                    std::to_string(target_auc) + " with " + std::to_string(pos_rate) +
                                    " positives (reachable: " + std::to_string(lo) + " .. " + std::to_string(hi) +
                                    ")");
    }

    const double gap = std::sqrt(2.0) * boost::math::quantile(boost::math::normal(), target_auc);
    boost::random::mt19937_64 rng(seed);
    boost::random::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) score[i] = unit(rng) + (labels[i].second == Label::Yes ? gap : 0.0);

    // Boundary search over the sorted sample: cut k predicts No for the k lowest scores.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
    std::size_t correct = n_pos;  // k = 0: everything predicted Yes
    std::size_t best_k = 0;
    double best_err = std::abs(static_cast<double>(correct) / n - target_acc);
    double best_rate_gap = std::abs(1.0 - pos_rate);
    for (std::size_t k = 1; k <= n; ++k) {
        correct += labels[order[k - 1]].second == Label::Yes ? -1 : 1;
        const double err = std::abs(static_cast<double>(correct) / n - target_acc);
        const double rate_gap = std::abs(static_cast<double>(n - k) / n - pos_rate);
        if (err < best_err - 1e-12 || (err <= best_err + 1e-12 && rate_gap < best_rate_gap)) {
            best_err = err;
            best_rate_gap = rate_gap;
            best_k = k;
        }
    }
    double boundary;
    if (best_k == 0) {
        boundary = score[order.front()] - 1.0;
    } else if (best_k == n) {
        boundary = score[order.back()] + 1.0;
    } else {
        boundary = 0.5 * (score[order[best_k - 1]] + score[order[best_k]]);
    }

    auto stub = std::make_shared<CalibratedStub>();
    for (std::size_t i = 0; i < n; ++i) stub->set_logits(labels[i].first, score[i] - boundary, 0.0);
    return stub;
}

// ---------------------------------------------------------------------------
// Scorer

Scorer::Scorer(std::shared_ptr<ScorerBackend> backend) : backend_(std::move(backend)) {
    if (!backend_) throw ConfigError("scorer needs a backend");
}

IKScore Scorer::score(const ScoreInput& input, int prefix_tokens) {
    auto key = std::make_pair(input.query_id, render_scorer_prompt(input.question, input.answer_prefix));
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    ++backend_calls_;
    auto l = backend_->logits(input);
    IKScore s{input.query_id, ik_from_logits(l.yes, l.no), l.yes, l.no, prefix_tokens};
    std::lock_guard lock(mutex_);
    return cache_.emplace(std::move(key), s).first->second;
}

IKScore Scorer::score_query(const QueryRecord& query, const std::string& answer_prefix, int prefix_tokens) {
    return score({query.id, query.question, answer_prefix}, prefix_tokens);
}

Scorer::BatchScores Scorer::score_all(const std::vector<ScoreInput>& inputs, int prefix_tokens) {
    BatchScores out;
    out.scores.resize(inputs.size());
    std::vector<std::string> errors(inputs.size());
    bounded_parallel_for(inputs.size(), backend_->max_parallel(), [&](std::size_t i) {
        try {
            out.scores[i] = score(inputs[i], prefix_tokens);
        } catch (const std::exception& e) {
            errors[i] = inputs[i].query_id + ": " + e.what();
        }
    });
    for (auto& e : errors) {
        if (!e.empty()) out.errors.push_back(std::move(e));
    }
    return out;
}

ordered_json to_json(const IKScore& s) {
    ordered_json j;
    j["id"] = s.query_id;
    j["ik"] = s.ik;
    j["yes_logit"] = s.yes_logit;
    j["no_logit"] = s.no_logit;
    j["prefix_tokens"] = s.prefix_tokens;
    return j;
}

IKScore ik_score_from_json(const json& j) {
    return {j.at("id").get<std::string>(), j.at("ik").get<double>(), j.at("yes_logit").get<double>(),
            j.at("no_logit").get<double>(), j.at("prefix_tokens").get<int>()};
}

void save_scores(const std::filesystem::path& path, const std::vector<IKScore>& scores) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& s : scores) out << to_json(s).dump() << '\n';
}

std::vector<IKScore> load_scores(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::vector<IKScore> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(ik_score_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

}  // namespace ikgate
