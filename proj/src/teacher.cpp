#include "ikgate/teacher.hpp"

#include "ikgate/concurrency.hpp"
#include "ikgate/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <unordered_map>

namespace ikgate {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Label label) { return label == Label::Yes ? "Yes" : "No"; }

Label label_from_string(std::string_view s) {
    if (s == "Yes") return Label::Yes;
    if (s == "No") return Label::No;
    throw ParseError(0, "label must be \"Yes\" or \"No\", got '" + std::string(s) + "'");
}

Label binarize(double raw_score, double cutoff) { return raw_score >= cutoff ? Label::Yes : Label::No; }

TeacherVerdict make_verdict(std::string query_id, std::string teacher_id, double raw_score, double cutoff) {
    if (!(raw_score >= 0.0 && raw_score <= 1.0)) throw RangeError("raw teacher score outside [0,1]");
    return {std::move(query_id), std::move(teacher_id), raw_score, binarize(raw_score, cutoff)};
}

// ---------------------------------------------------------------------------
// String metrics

std::vector<std::string> normalized_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && cur != "a" && cur != "an" && cur != "the") tokens.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (c < 0x80 && std::ispunct(c)) continue;
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        }
    }
    flush();
    return tokens;
}

std::string normalize_answer(std::string_view text) {
    std::string out;
    for (const auto& t : normalized_tokens(text)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

double match_metric(std::string_view answer, const std::vector<std::string>& golds) {
    const std::string padded = " " + normalize_answer(answer) + " ";
    for (const auto& g : golds) {
        auto ng = normalize_answer(g);
        if (ng.empty()) continue;
        if (padded.find(" " + ng + " ") != std::string::npos) return 1.0;
    }
    return 0.0;
}

double recall_metric(std::string_view answer, const std::vector<std::string>& golds) {
    std::unordered_map<std::string, int> available;
    for (auto& t : normalized_tokens(answer)) ++available[t];
    double best = 0.0;
    bool any = false;
    for (const auto& g : golds) {
        auto gold_tokens = normalized_tokens(g);
        if (gold_tokens.empty()) continue;
        any = true;
        auto pool = available;
        int hit = 0;
        for (const auto& t : gold_tokens) {
            auto it = pool.find(t);
            if (it != pool.end() && it->second > 0) {
                --it->second;
                ++hit;
            }
        }
        best = std::max(best, static_cast<double>(hit) / static_cast<double>(gold_tokens.size()));
    }
    if (!any) throw RangeError("every gold answer normalizes to zero tokens");
    return best;
}

// ---------------------------------------------------------------------------
// Judge

std::string JudgePrompt::render() const {
    std::string golds;
    for (std::size_t i = 0; i < gold_answers.size(); ++i) {
        if (i) golds += " | ";
        golds += gold_answers[i];
    }
    if (template_id != judge_prompt_template().id) throw ConfigError("unknown judge template " + template_id);
    const std::pair<std::string_view, std::string_view> values[] = {
        {"question", question}, {"gold_answers", golds}, {"candidate_answer", candidate_answer}};
    return render_template(judge_prompt_template().text, values);
}

std::optional<double> parse_judge_score(std::string_view reply) {
    static const std::regex number(R"((^|[^0-9.])(-?[0-9]+(\.[0-9]+)?|-?\.[0-9]+))");
    std::string text(reply);
    std::smatch m;
    if (std::regex_search(text, m, number)) {
        double v = std::stod(m[2].str());
        if (v >= 0.0 && v <= 1.0) return v;
        return std::nullopt;
    }
    auto words = normalized_tokens(reply);
    if (!words.empty()) {
        if (words.front() == "yes" || words.front() == "correct") return 1.0;
        if (words.front() == "no" || words.front() == "incorrect") return 0.0;
    }
    return std::nullopt;
}

TeacherVerdict judge_llm(const QueryRecord& query, const Generation& generation, InferenceClient& judge,
                         double cutoff, const std::string& teacher_id) {
    if (generation.query_id != query.id) {
        throw RangeError("generation for '" + generation.query_id + "' judged against query '" + query.id + "'");
    }
    JudgePrompt prompt{query.question, generation.answer, query.golds};
    GenerationRequest req;
    req.query_id = query.id;
    req.prompt = prompt.render();
    req.max_tokens = 8;
    auto reply = judge.generate(req);
    if (auto score = parse_judge_score(reply.answer)) return make_verdict(query.id, teacher_id, *score, cutoff);

    req.prompt += reply.answer + "\n" + judge_reprompt_template().text;
    auto second = judge.generate(req);
    if (auto score = parse_judge_score(second.answer)) return make_verdict(query.id, teacher_id, *score, cutoff);
    throw JudgeParseError(query.id, second.answer);
}

StringMetricTeacher::StringMetricTeacher(StringMetric metric, double cutoff) : metric_(metric), cutoff_(cutoff) {}

std::string StringMetricTeacher::id() const { return metric_ == StringMetric::Match ? "match" : "recall"; }

TeacherVerdict StringMetricTeacher::judge(const QueryRecord& query, const Generation& generation) {
    double raw = metric_ == StringMetric::Match ? match_metric(generation.answer, query.golds)
                                                : recall_metric(generation.answer, query.golds);
    return make_verdict(query.id, id(), raw, cutoff_);
}

LlmJudgeTeacher::LlmJudgeTeacher(std::shared_ptr<InferenceClient> judge, double cutoff, std::string id)
    : judge_(std::move(judge)), cutoff_(cutoff), id_(std::move(id)) {}

TeacherVerdict LlmJudgeTeacher::judge(const QueryRecord& query, const Generation& generation) {
    return judge_llm(query, generation, *judge_, cutoff_, id_);
}

JudgeRun judge_all(Teacher& teacher, const std::vector<QueryRecord>& queries,
                   const std::vector<Generation>& generations) {
    if (queries.size() != generations.size()) throw RangeError("queries and generations differ in length");
    JudgeRun run;
    run.verdicts.resize(queries.size());
    std::vector<int> status(queries.size(), 0);  // 1 flagged, 2 error
    std::vector<std::string> messages(queries.size());
    bounded_parallel_for(queries.size(), teacher.max_parallel(), [&](std::size_t i) {
        try {
            run.verdicts[i] = teacher.judge(queries[i], generations[i]);
        } catch (const JudgeParseError&) {
            status[i] = 1;
        } catch (const std::exception& e) {
            status[i] = 2;
            messages[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (status[i] == 1) run.flagged.push_back(queries[i].id);
        if (status[i] == 2) run.errors.push_back(queries[i].id + ": " + messages[i]);
    }
    return run;
}

void save_verdicts(const std::filesystem::path& path, const std::vector<TeacherVerdict>& verdicts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& v : verdicts) {
        ordered_json j;
        j["id"] = v.query_id;
        j["teacher_id"] = v.teacher_id;
        j["raw_score"] = v.raw_score;
        j["label"] = to_string(v.label);
        out << j.dump() << '\n';
    }
}

std::vector<TeacherVerdict> load_verdicts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::vector<TeacherVerdict> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = json::parse(line);
            out.push_back({j.at("id").get<std::string>(), j.at("teacher_id").get<std::string>(),
                           j.at("raw_score").get<double>(), label_from_string(j.at("label").get<std::string>())});
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trainset export

bool is_allowed_prefix(int prefix_tokens) {
    return std::find(kAllowedPrefixTokens.begin(), kAllowedPrefixTokens.end(), prefix_tokens) !=
           kAllowedPrefixTokens.end();
}

TrainsetExportError::TrainsetExportError(std::vector<std::string> problems)
    : Error([&] {
          std::string msg = std::to_string(problems.size()) + " trainset export problem(s):";
          for (std::size_t i = 0; i < problems.size() && i < 10; ++i) msg += "\n  " + problems[i];
          return msg;
      }()),
      problems_(std::move(problems)) {}

std::vector<TrainRecord> export_trainset(const std::vector<QueryRecord>& queries,
                                         const std::vector<Generation>& norag_generations,
                                         const std::vector<TeacherVerdict>& verdicts, int prefix_tokens,
                                         const Tokenizer& tokenizer) {
    if (!is_allowed_prefix(prefix_tokens)) {
        throw RangeError("prefix_tokens must be one of 0,4,8,16,32,64,128; got " + std::to_string(prefix_tokens));
    }
    std::unordered_map<std::string, const Generation*> gen_by_id;
    for (const auto& g : norag_generations) {
        if (g.mode == Mode::NoRag) gen_by_id[g.query_id] = &g;
    }
    std::unordered_map<std::string, const TeacherVerdict*> verdict_by_id;
    for (const auto& v : verdicts) verdict_by_id[v.query_id] = &v;

    std::vector<std::string> problems;
    std::vector<TrainRecord> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        auto g = gen_by_id.find(q.id);
        auto v = verdict_by_id.find(q.id);
        if (g == gen_by_id.end()) problems.push_back(q.id + ": missing NORAG generation");
        if (v == verdict_by_id.end()) problems.push_back(q.id + ": missing teacher verdict");
        if (g == gen_by_id.end() || v == verdict_by_id.end()) continue;
        TrainRecord r;
        r.query_id = q.id;
        r.question = q.question;
        r.prefix_tokens = prefix_tokens;
        r.answer_prefix = tokenizer.truncate(g->second->answer, static_cast<std::size_t>(prefix_tokens));
        r.label = v->second->label;
        out.push_back(std::move(r));
    }
    if (!problems.empty()) throw TrainsetExportError(std::move(problems));
    return out;
}

void write_trainset(const std::filesystem::path& path, const TrainsetMeta& meta,
                    const std::vector<TrainRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    ordered_json m;
    m["tokenizer"] = meta.tokenizer;
    m["teacher_id"] = meta.teacher_id;
    m["cutoff"] = meta.cutoff;
    m["source_dataset"] = meta.source_dataset;
    m["prefix_tokens"] = meta.prefix_tokens;
    m["prompt_template"] = meta.prompt_template;
    out << ordered_json{{"_meta", m}}.dump() << '\n';
    for (const auto& r : records) {
        ordered_json j;
        j["id"] = r.query_id;
        j["question"] = r.question;
        j["answer_prefix"] = r.answer_prefix;
        j["prefix_tokens"] = r.prefix_tokens;
        j["label"] = to_string(r.label);
        out << j.dump() << '\n';
    }
}

std::pair<TrainsetMeta, std::vector<TrainRecord>> read_trainset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    TrainsetMeta meta;
    std::vector<TrainRecord> records;
    bool have_meta = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = json::parse(line);
            if (!have_meta) {
                if (!j.contains("_meta")) throw ParseError(line_no, "first line must be the _meta header");
                const auto& m = j["_meta"];
                meta.tokenizer = m.at("tokenizer").get<std::string>();
                meta.teacher_id = m.at("teacher_id").get<std::string>();
                meta.cutoff = m.at("cutoff").get<double>();
                meta.source_dataset = m.at("source_dataset").get<std::string>();
                meta.prefix_tokens = m.value("prefix_tokens", 0);
                meta.prompt_template = m.value("prompt_template", "scorer-v1");
                have_meta = true;
                continue;
            }
            TrainRecord r;
            r.query_id = j.at("id").get<std::string>();
            r.question = j.at("question").get<std::string>();
            r.answer_prefix = j.at("answer_prefix").get<std::string>();
            r.prefix_tokens = j.at("prefix_tokens").get<int>();
            r.label = label_from_string(j.at("label").get<std::string>());
            records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!have_meta) throw ParseError(0, "trainset has no _meta header");
    return {meta, records};
}

}  // namespace ikgate
