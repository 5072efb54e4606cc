#include "ikgate/cli/pipeline.hpp"

#include "ikgate/hashing.hpp"
#include "ikgate/ik_scorer.hpp"
#include "ikgate/router_eval.hpp"
#include "ikgate/stub_backend.hpp"
#include "ikgate/tokenizer.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ikgate::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(AblationAxis axis) {
    switch (axis) {
        case AblationAxis::PrefixLength: return "prefix_length";
        case AblationAxis::TrainsetSize: return "trainset_size";
        case AblationAxis::Teacher: return "teacher";
    }
    return "?";
}

AblationAxis ablation_axis_from_string(const std::string& s) {
    if (s == "prefix_length") return AblationAxis::PrefixLength;
    if (s == "trainset_size") return AblationAxis::TrainsetSize;
    if (s == "teacher") return AblationAxis::Teacher;
    throw ConfigError("unknown ablation axis '" + s + "' (prefix_length, trainset_size, teacher)");
}

namespace {

std::string hash_fields(std::initializer_list<std::string> fields) {
    FieldHasher h;
    for (const auto& f : fields) h.add(f);
    return h.hex();
}

std::string size_label(std::size_t size) { return size == 0 ? "all" : std::to_string(size); }

void save_generations(const fs::path& path, const std::vector<Generation>& gens) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& g : gens) out << to_json(g).dump() << '\n';
}

std::map<std::string, Generation> load_generations(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::map<std::string, Generation> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            auto g = generation_from_json(json::parse(line));
            out.emplace(g.query_id, std::move(g));
        } catch (const json::exception& e) {
            throw ParseError(n, e.what());
        }
    }
    return out;
}

std::map<std::string, TeacherVerdict> verdicts_by_id(const fs::path& path) {
    std::map<std::string, TeacherVerdict> out;
    for (auto& v : load_verdicts(path)) out.emplace(v.query_id, std::move(v));
    return out;
}

std::string teacher_id_for(const std::string& kind) { return kind == "llm_judge" ? "llm-judge" : kind; }

std::string summarize_ids(const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 5; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 5) s += fmt::format(", ... ({} total)", ids.size());
    return s;
}

}  // namespace

Pipeline::Pipeline(RunConfig config, fs::path out_dir, std::string tool_version, std::string config_hash)
    : config_(std::move(config)),
      out_(std::move(out_dir)),
      artifacts_(out_ / "artifacts"),
      reports_(out_ / "reports"),
      tool_version_(std::move(tool_version)),
      manifest_((fs::create_directories(out_), out_ / "manifest.json"), tool_version_) {
    fs::create_directories(artifacts_);
    fs::create_directories(reports_);
    if (!config_hash.empty()) {
        manifest_.set_config_hash(config_hash);
        manifest_.save();
    }
}

Pipeline::~Pipeline() = default;

void Pipeline::problem(std::string message) {
    fmt::print(stderr, "problem: {}\n", message);
    problems_.push_back(std::move(message));
}

template <class Produce>
Pipeline::Artifact Pipeline::run_stage(const std::string& key, const std::string& fingerprint,
                                       const std::string& ext, Produce&& produce) {
    const auto memo_key = key + "/" + fingerprint;
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    const auto path = artifacts_ / (key + "-" + fingerprint.substr(0, 12) + ext);
    if (manifest_.is_complete(key, fingerprint) && fs::exists(path)) {
        skipped_.push_back(key);
        fmt::print(stderr, "stage {}: up to date\n", key);
    } else {
        fmt::print(stderr, "stage {}: running\n", key);
        const bool complete = produce(path);
        ran_.push_back(key);
        if (complete) {
            manifest_.record(key, fingerprint, {path});
            manifest_.save();
        }
    }
    Artifact a{path, sha256_file(path)};
    memo_.emplace(memo_key, a);
    return a;
}

// --- inputs -----------------------------------------------------------------

const std::vector<QueryRecord>& Pipeline::records(std::size_t ds) {
    auto it = records_.find(ds);
    if (it != records_.end()) return it->second;
    const auto& d = config_.datasets.at(ds);
    dataset_hash_[ds] = sha256_file(d.path);
    return records_.emplace(ds, load_dataset(d.path, d.format)).first->second;
}

const DatasetSplit& Pipeline::split() {
    if (!split_) split_ = split_dataset(records(0), config_.validation_size, config_.seed);
    return *split_;
}

std::vector<QueryRecord> Pipeline::eval_records(std::size_t ds) {
    return ds == 0 ? split().validation : records(ds);
}

Pipeline::Artifact Pipeline::split_artifact() {
    records(0);
    const auto fp = hash_fields({"split", dataset_hash_[0], std::to_string(config_.validation_size),
                                 std::to_string(config_.seed)});
    return run_stage("split-" + config_.datasets[0].name, fp, ".json", [&](const fs::path& path) {
        save_split(path, split());
        return true;
    });
}

// --- backends ---------------------------------------------------------------

std::string Pipeline::backend_fingerprint(const BackendSpec& spec) const {
    const auto& c = spec.client;
    return hash_fields({spec.kind, c.model_id, spec.kind == "http" ? c.base_url : std::string(),
                        std::to_string(c.top_logprobs)});
}

namespace {
std::shared_ptr<InferenceClient> make_client(const BackendSpec& spec, StubResponder stub, const fs::path& cache) {
    auto config = spec.client;
    std::shared_ptr<ChatTransport> transport;
    if (spec.kind == "stub") {
        transport = std::make_shared<StubChatTransport>(std::move(stub), config.model_id);
    } else {
        const char* key = spec.api_key_env.empty() ? nullptr : std::getenv(spec.api_key_env.c_str());
        transport = std::make_shared<HttpChatTransport>(config.base_url, config.timeout, key ? key : "");
        if (config.cache_dir.empty()) config.cache_dir = cache;
    }
    return std::make_shared<InferenceClient>(std::move(config), std::move(transport));
}
}  // namespace

std::shared_ptr<InferenceClient> Pipeline::generator() {
    if (!generator_) {
        std::vector<QueryRecord> all;
        for (std::size_t i = 0; i < config_.datasets.size(); ++i) {
            const auto& r = records(i);
            all.insert(all.end(), r.begin(), r.end());
        }
        generator_ = make_client(config_.generator, toy_generator_responder(all), out_ / "cache" / "generator");
    }
    return generator_;
}

std::shared_ptr<InferenceClient> Pipeline::judge() {
    if (!judge_) judge_ = make_client(config_.judge, toy_judge_responder(), out_ / "cache" / "judge");
    return judge_;
}

std::unique_ptr<Teacher> Pipeline::make_teacher(const std::string& kind) {
    if (kind == "match") return std::make_unique<StringMetricTeacher>(StringMetric::Match, config_.teacher.cutoff);
    if (kind == "recall") return std::make_unique<StringMetricTeacher>(StringMetric::Recall, config_.teacher.cutoff);
    if (kind == "llm_judge") return std::make_unique<LlmJudgeTeacher>(judge(), config_.teacher.cutoff, "llm-judge");
    throw ConfigError("unknown teacher '" + kind + "'");
}

// --- stages -----------------------------------------------------------------

Pipeline::Artifact Pipeline::generations(std::size_t ds, Mode mode) {
    const auto& name = config_.datasets[ds].name;
    const auto queries = (mode == Mode::NoRag) ? records(ds) : eval_records(ds);
    const auto scope = (mode == Mode::Rag && ds == 0) ? split_artifact().hash : std::string("all");
    const auto fp = hash_fields({"gen", to_string(mode), dataset_hash_[ds], scope,
                                 backend_fingerprint(config_.generator), std::to_string(config_.max_tokens)});
    const auto key = "gen-" + to_string(mode) + "-" + name;
    return run_stage(key, fp, ".jsonl", [&](const fs::path& path) {
        std::vector<GenerationRequest> requests;
        std::vector<std::string> bad;
        for (const auto& q : queries) {
            try {
                requests.push_back(make_generation_request(q, mode, config_.max_tokens));
            } catch (const Error& e) {
                bad.push_back(q.id);
                problem(fmt::format("{}: {}: {}", key, q.id, e.what()));
            }
        }
        auto batch = generator()->batch_run(requests);
        if (!requests.empty() && batch.succeeded() == 0) {
            throw BackendUnreachable(fmt::format("{}: every generation failed; first error: {}", key,
                                                 batch.failures.front().message));
        }
        for (const auto& f : batch.failures) problem(fmt::format("{}: {}: {}", key, f.query_id, f.message));
        std::vector<Generation> gens;
        for (auto& r : batch.results) {
            if (r) gens.push_back(std::move(*r));
        }
        save_generations(path, gens);
        return batch.failures.empty() && bad.empty();
    });
}

Pipeline::Artifact Pipeline::verdicts(std::size_t ds, Mode mode, const std::string& teacher_kind) {
    const auto gens_art = generations(ds, mode);
    const auto& name = config_.datasets[ds].name;
    const auto judge_fp = teacher_kind == "llm_judge" ? backend_fingerprint(config_.judge) : std::string();
    const auto fp = hash_fields({"verdicts", gens_art.hash, teacher_kind, fmt::format("{}", config_.teacher.cutoff),
                                 judge_fp});
    const auto key = "verdicts-" + to_string(mode) + "-" + teacher_kind + "-" + name;
    return run_stage(key, fp, ".jsonl", [&](const fs::path& path) {
        const auto gens = load_generations(gens_art.path);
        const auto queries = (mode == Mode::NoRag) ? records(ds) : eval_records(ds);
        std::vector<QueryRecord> judged;
        std::vector<Generation> answers;
        for (const auto& q : queries) {
            auto it = gens.find(q.id);
            if (it == gens.end()) continue;  // already reported by the generation stage
            judged.push_back(q);
            answers.push_back(it->second);
        }
        auto teacher = make_teacher(teacher_kind);
        auto run = judge_all(*teacher, judged, answers);
        std::vector<TeacherVerdict> out;
        for (auto& v : run.verdicts) {
            if (v) out.push_back(std::move(*v));
        }
        if (!judged.empty() && out.empty() && !run.errors.empty()) {
            throw BackendUnreachable(fmt::format("{}: every judgement failed; first error: {}", key,
                                                 run.errors.front()));
        }
        for (const auto& id : run.flagged) problem(fmt::format("{}: {}: unreadable judge reply", key, id));
        for (const auto& e : run.errors) problem(fmt::format("{}: {}", key, e));
        save_verdicts(path, out);
        return run.flagged.empty() && run.errors.empty() && gens.size() == queries.size();
    });
}

Pipeline::Artifact Pipeline::trainset(const std::string& teacher_kind, int prefix_tokens, std::size_t size) {
    const auto gens_art = generations(0, Mode::NoRag);
    const auto verdict_art = verdicts(0, Mode::NoRag, teacher_kind);
    const auto split_hash = size ? split_artifact().hash : std::string("all");
    const auto fp = hash_fields({"trainset", gens_art.hash, verdict_art.hash, split_hash,
                                 std::to_string(prefix_tokens), std::to_string(size), default_tokenizer().name()});
    auto key = fmt::format("trainset-{}-p{}", teacher_kind, prefix_tokens);
    if (size) key += "-n" + std::to_string(size);
    return run_stage(key, fp, ".jsonl", [&](const fs::path& path) {
        std::vector<QueryRecord> queries;
        if (size == 0) {
            queries = records(0);
        } else {
            queries = subset_train(split(), SubsetSpec{{size}, config_.seed}).front().second;
        }
        const auto gens = load_generations(gens_art.path);
        const auto verdict_map = verdicts_by_id(verdict_art.path);
        std::vector<QueryRecord> usable;
        std::vector<Generation> gen_list;
        std::vector<TeacherVerdict> verdict_list;
        std::vector<std::string> missing;
        for (const auto& q : queries) {
            auto g = gens.find(q.id);
            auto v = verdict_map.find(q.id);
            if (g == gens.end() || v == verdict_map.end()) {
                missing.push_back(q.id);
                continue;
            }
            usable.push_back(q);
            gen_list.push_back(g->second);
            verdict_list.push_back(v->second);
        }
        if (!missing.empty()) {
            problem(fmt::format("{}: {} queries lack a generation or verdict: {}", key, missing.size(),
                                summarize_ids(missing)));
        }
        auto recs = export_trainset(usable, gen_list, verdict_list, prefix_tokens, default_tokenizer());
        TrainsetMeta meta;
        meta.tokenizer = default_tokenizer().name();
        meta.teacher_id = teacher_id_for(teacher_kind);
        meta.cutoff = config_.teacher.cutoff;
        meta.source_dataset = config_.datasets[0].name;
        meta.prefix_tokens = prefix_tokens;
        write_trainset(path, meta, recs);
        return missing.empty();
    });
}

namespace {
const StubTarget* find_target(const std::vector<StubTarget>& targets, const std::string& dataset, const Cell& c) {
    for (const auto& t : targets) {
        if (t.prefix_tokens && *t.prefix_tokens != c.prefix_tokens) continue;
        if (t.dataset && *t.dataset != dataset) continue;
        if (t.train_size && *t.train_size != c.train_size) continue;
        if (t.teacher && *t.teacher != c.teacher) continue;
        return &t;
    }
    return nullptr;
}
}  // namespace

Pipeline::Artifact Pipeline::scores(const Cell& cell) {
    const auto& name = config_.datasets[cell.dataset].name;
    const auto slug = cell_slug(cell);
    const auto gens_art = generations(cell.dataset, Mode::NoRag);
    const auto scope = cell.dataset == 0 ? split_artifact().hash : std::string("all");
    const auto& sc = config_.scorer;

    std::string scorer_fp;
    std::optional<Artifact> label_art;
    const StubTarget* target = nullptr;
    if (sc.kind == "calibrated_stub") {
        target = find_target(sc.targets, name, cell);
        if (!target) throw ConfigError("config.scorer.targets: no target matches cell " + slug);
        label_art = verdicts(cell.dataset, Mode::NoRag, cell.teacher);
        scorer_fp = hash_fields({sc.kind, fmt::format("{}", target->acc), fmt::format("{}", target->auc),
                                 label_art->hash, std::to_string(config_.seed)});
    } else if (sc.kind == "remote_endpoint") {
        scorer_fp = hash_fields({sc.kind, sc.url});
    } else {
        scorer_fp = hash_fields({sc.kind, backend_fingerprint(sc.chat)});
    }
    const auto fp = hash_fields({"scores", slug, gens_art.hash, scope, scorer_fp});
    return run_stage("scores-" + slug, fp, ".jsonl", [&](const fs::path& path) {
        const auto queries = eval_records(cell.dataset);
        const auto gens = load_generations(gens_art.path);
        std::vector<ScoreInput> inputs;
        std::vector<std::string> missing;
        for (const auto& q : queries) {
            auto g = gens.find(q.id);
            if (g == gens.end()) {
                missing.push_back(q.id);
                continue;
            }
            inputs.push_back({q.id, q.question,
                              default_tokenizer().truncate(g->second.answer, static_cast<std::size_t>(cell.prefix_tokens))});
        }
        if (!missing.empty()) {
            problem(fmt::format("scores-{}: {} queries lack a closed-book answer: {}", slug, missing.size(),
                                summarize_ids(missing)));
        }

        std::shared_ptr<ScorerBackend> backend;
        if (sc.kind == "calibrated_stub") {
            const auto verdict_map = verdicts_by_id(label_art->path);
            std::vector<std::pair<std::string, Label>> labels;
            for (const auto& in : inputs) {
                auto v = verdict_map.find(in.query_id);
                if (v != verdict_map.end()) labels.emplace_back(in.query_id, v->second.label);
            }
            const auto seed_hex = hash_fields({std::to_string(config_.seed), slug}).substr(0, 16);
            backend = calibrated_stub(target->acc, target->auc, labels, std::stoull(seed_hex, nullptr, 16));
        } else if (sc.kind == "remote_endpoint") {
            backend = std::make_shared<RemoteEndpointBackend>(sc.url, sc.timeout, sc.retry_limit, sc.max_parallel);
        } else {
            backend = std::make_shared<ChatLogprobAdapter>(make_client(sc.chat, fixed_responder("Yes", {{"Yes", -0.4}, {"No", -1.1}}),
                                                                              out_ / "cache" / "scorer"));
        }
        Scorer scorer(backend);
        auto batch = scorer.score_all(inputs, cell.prefix_tokens);
        std::vector<IKScore> out;
        for (auto& s : batch.scores) {
            if (s) out.push_back(std::move(*s));
        }
        if (!inputs.empty() && out.empty()) {
            throw BackendUnreachable(fmt::format("scores-{}: every request failed; first error: {}", slug,
                                                 batch.errors.front()));
        }
        for (const auto& e : batch.errors) problem(fmt::format("scores-{}: {}", slug, e));
        save_scores(path, out);
        return missing.empty() && batch.errors.empty();
    });
}

std::string Pipeline::cell_slug(const Cell& cell) const {
    return fmt::format("{}-p{}-n{}-{}", config_.datasets.at(cell.dataset).name, cell.prefix_tokens,
                       size_label(cell.train_size), cell.teacher);
}

// --- reports ----------------------------------------------------------------

std::optional<EvalReport> Pipeline::evaluate_cell(const Cell& cell, const std::string& slug) {
    const auto& eval_teacher = config_.teacher.kind;
    const auto score_art = scores(cell);
    const auto norag = verdicts_by_id(verdicts(cell.dataset, Mode::NoRag, eval_teacher).path);
    const auto rag = verdicts_by_id(verdicts(cell.dataset, Mode::Rag, eval_teacher).path);
    std::map<std::string, IKScore> score_map;
    for (auto& s : load_scores(score_art.path)) score_map.emplace(s.query_id, std::move(s));

    std::vector<IKScore> scores;
    std::vector<LabeledQuery> labels;
    std::vector<RoutingInput> routing;
    std::map<std::string, std::vector<std::string>> missing;
    for (const auto& q : eval_records(cell.dataset)) {
        auto s = score_map.find(q.id);
        auto n = norag.find(q.id);
        auto r = rag.find(q.id);
        if (s == score_map.end()) missing["ik"].push_back(q.id);
        if (n == norag.end()) missing["eval_norag"].push_back(q.id);
        if (r == rag.end()) missing["eval_rag"].push_back(q.id);
        if (s == score_map.end() || n == norag.end() || r == rag.end()) continue;
        scores.push_back(s->second);
        labels.push_back({q.id, n->second.label});
        routing.push_back({q.id, s->second.ik, n->second.label == Label::Yes ? 1.0 : 0.0,
                           r->second.label == Label::Yes ? 1.0 : 0.0});
    }
    for (const auto& [column, ids] : missing) {
        problem(fmt::format("report {}: column {} missing for {} queries: {}", slug, column, ids.size(),
                            summarize_ids(ids)));
    }
    if (routing.empty()) {
        problem("report " + slug + ": no complete rows");
        return std::nullopt;
    }

    auto report = build_eval_report(config_.datasets[cell.dataset].name, cell.prefix_tokens, scores, labels, routing,
                                    config_.sweep_grid, config_.latency);
    const auto dir = reports_ / "cells" / slug;
    auto j = to_json(report);
    std::ostringstream sweep, curve;
    write_sweep_csv(sweep, report.sweep);
    write_curve_csv(curve, report.sweep);
    write_text_file(dir / "sweep.csv", sweep.str());
    write_text_file(dir / "curve.csv", curve.str());
    write_text_file(dir / "curve.svg", render_curve_svg(report.sweep, slug));
    if (scores.size() >= IKHistogram::kBins) {
        const auto hist = characterize(scores);
        std::ostringstream h;
        write_histogram_csv(h, hist);
        write_text_file(dir / "histogram.csv", h.str());
        write_text_file(dir / "histogram.svg", render_histogram_svg(hist, slug));
        j["histogram"] = to_json(hist);
    } else {
        j["histogram"] = nullptr;
    }
    write_text_file(dir / "report.json", j.dump(2) + "\n");
    return report;
}

std::vector<fs::path> Pipeline::build_trainsets() {
    std::vector<fs::path> out;
    split_artifact();
    for (int p : config_.prefix_tokens) out.push_back(trainset(config_.teacher.kind, p, 0).path);
    for (auto size : config_.subset_sizes) {
        if (size == 0) continue;
        for (int p : config_.prefix_tokens) out.push_back(trainset(config_.teacher.kind, p, size).path);
    }
    return out;
}

std::vector<fs::path> Pipeline::score() {
    std::vector<fs::path> out;
    for (std::size_t ds = 0; ds < config_.datasets.size(); ++ds) {
        for (int p : config_.prefix_tokens) out.push_back(scores(Cell{ds, p, 0, config_.teacher.kind}).path);
    }
    return out;
}

namespace {
std::string incomplete_fields(const std::string& name, int prefix_tokens) {
    return fmt::format("{},{},,,,,,,,,,", name, prefix_tokens);
}
}  // namespace

std::vector<CellResult> Pipeline::evaluate() {
    std::vector<CellResult> results;
    std::string table = eval_csv_header() + ",status\n";
    ordered_json rows = ordered_json::array();
    for (std::size_t ds = 0; ds < config_.datasets.size(); ++ds) {
        for (int p : config_.prefix_tokens) {
            Cell cell{ds, p, 0, config_.teacher.kind};
            const auto slug = cell_slug(cell);
            auto report = evaluate_cell(cell, slug);
            if (report) {
                table += eval_csv_fields(*report) + ",ok\n";
                rows.push_back(to_json(*report));
            } else {
                table += incomplete_fields(config_.datasets[ds].name, p) + ",incomplete\n";
                rows.push_back({{"name", config_.datasets[ds].name}, {"prefix_tokens", p}, {"status", "incomplete"}});
            }
            results.push_back({cell, slug, std::move(report)});
        }
    }
    write_text_file(reports_ / "eval_table.csv", table);
    ordered_json doc;
    doc["teacher"] = teacher_id_for(config_.teacher.kind);
    doc["train_dataset"] = config_.datasets[0].name;
    doc["rows"] = std::move(rows);
    write_text_file(reports_ / "eval_report.json", doc.dump(2) + "\n");
    return results;
}

fs::path Pipeline::ablate(AblationAxis axis) {
    struct Row {
        std::string value;
        Cell cell;
    };
    std::vector<Row> rows;
    const auto& teacher = config_.teacher.kind;
    switch (axis) {
        case AblationAxis::PrefixLength:
            for (int p : config_.ablation.prefix_tokens) rows.push_back({std::to_string(p), Cell{0, p, 0, teacher}});
            break;
        case AblationAxis::TrainsetSize:
            if (config_.ablation.subset_sizes.empty())
                throw ConfigError("config.ablation.subset_sizes is required for the trainset_size axis");
            for (auto size : config_.ablation.subset_sizes) {
                for (int p : config_.ablation.size_prefix_tokens)
                    rows.push_back({size_label(size), Cell{0, p, size, teacher}});
            }
            break;
        case AblationAxis::Teacher: {
            const int p = *std::max_element(config_.prefix_tokens.begin(), config_.prefix_tokens.end());
            for (const auto& t : config_.ablation.teachers) rows.push_back({teacher_id_for(t), Cell{0, p, 0, t}});
            break;
        }
    }

    const auto column = axis == AblationAxis::PrefixLength   ? "prefix"
                        : axis == AblationAxis::TrainsetSize ? "train_size"
                                                             : "teacher";
    std::string table = std::string(column) + "," + eval_csv_header() + ",status\n";
    for (const auto& row : rows) {
        const auto slug = cell_slug(row.cell);
        std::optional<EvalReport> report;
        try {
            trainset(row.cell.teacher, row.cell.prefix_tokens, row.cell.train_size);
            report = evaluate_cell(row.cell, slug);
        } catch (const BackendUnreachable&) {
            throw;
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            problem(fmt::format("ablation cell {}: {}", slug, e.what()));
        }
        if (report) {
            table += row.value + "," + eval_csv_fields(*report) + ",ok\n";
        } else {
            table += row.value + "," + incomplete_fields(config_.datasets[0].name, row.cell.prefix_tokens) +
                     ",incomplete\n";
        }
    }
    const auto path = reports_ / ("ablation-" + to_string(axis) + ".csv");
    write_text_file(path, table);
    return path;
}

}  // namespace ikgate::cli
