#include "ikgate/cli/commands.hpp"
#include "ikgate/cli/config.hpp"
#include "ikgate/cli/pipeline.hpp"
#include "ikgate/inference_client.hpp"
#include "ikgate/report.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <map>
#include <random>
#include <sstream>

using namespace ikgate;
using namespace ikgate::cli;
using namespace testutil;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path toy_config() { return fs::path(source_dir()) / "configs" / "offline_toy.json"; }

int run(std::vector<std::string> args) { return run_cli(args); }

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

/// Closed-book answers are right for a fraction `correct` of the records.
void make_dataset(const fs::path& path, std::size_t n, double correct, std::uint64_t seed,
                  std::size_t without_context = 0) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution right(correct);
    std::ofstream out(path);
    for (std::size_t i = 0; i < n; ++i) {
        const auto gold = "Gold" + std::to_string(i);
        json r;
        r["id"] = "g" + std::to_string(i);
        r["question"] = "Which token is number " + std::to_string(i) + "?";
        r["golds"] = {gold};
        r["toy_answer"] = right(rng) ? "It is " + gold + " ." : "It is Wrong" + std::to_string(i) + " .";
        if (i >= without_context) r["contexts"] = {"It is " + gold + " ."};
        out << r.dump() << '\n';
    }
}

json base_config(const fs::path& data, std::size_t validation) {
    json c;
    c["datasets"] = {{{"name", "gen"}, {"path", data.string()}}};
    c["validation_size"] = validation;
    c["seed"] = 11;
    c["generator"] = {{"kind", "stub"}, {"model_id", "toy-generator"}};
    c["judge"] = {{"kind", "stub"}, {"model_id", "toy-judge"}};
    c["teacher"] = {{"kind", "match"}, {"cutoff", 0.5}};
    c["scorer"] = {{"kind", "calibrated_stub"}, {"targets", {{{"acc", 0.82}, {"auc", 0.89}}}}};
    c["prefix_tokens"] = {0, 32};
    return c;
}

fs::path save_config(const TempDir& dir, const json& c) {
    const auto path = dir / "config.json";
    write_file(path, c.dump(2));
    return path;
}

}  // namespace

TEST(Cli, OfflineEndToEndIsReproducibleAndNeverTouchesTheNetwork) {
    TempDir a, b;
    const auto before = network_call_count();
    for (const auto* dir : {&a, &b}) {
        const auto out = dir->path().string();
        for (std::vector<std::string> verb : {std::vector<std::string>{"build-trainset"}, {"score"}, {"evaluate"},
                                              {"ablate", "--axis", "prefix_length"}}) {
            std::vector<std::string> args{"--offline", "--config", toy_config().string(), "--out", out, "--seed", "7"};
            args.insert(args.end(), verb.begin(), verb.end());
            ASSERT_EQ(run(args), kExitOk) << verb[0];
        }
    }
    EXPECT_EQ(network_call_count(), before);
    const auto ra = tree(a.path() / "reports"), rb = tree(b.path() / "reports");
    EXPECT_FALSE(ra.empty());
    EXPECT_EQ(ra, rb);
    EXPECT_EQ(tree(a.path() / "artifacts"), tree(b.path() / "artifacts"));

    const auto table = lines(read_file(a.path() / "reports" / "eval_table.csv"));
    ASSERT_EQ(table.size(), 3u);
    EXPECT_EQ(table[0], eval_csv_header() + ",status");
    const auto ablation = lines(read_file(a.path() / "reports" / "ablation-prefix_length.csv"));
    ASSERT_EQ(ablation.size(), 3u);
    EXPECT_EQ(ablation[1].substr(0, 2), "0,");
    EXPECT_EQ(ablation[2].substr(0, 3), "32,");
}

TEST(Cli, TrainsetFilesCarryMetaHeaderAndEveryRecord) {
    TempDir out;
    ASSERT_EQ(run({"--offline", "--config", toy_config().string(), "--out", out.path().string(), "build-trainset"}),
              kExitOk);
    std::size_t full = 0;
    for (const auto& [name, text] : tree(out.path() / "artifacts")) {
        if (name.rfind("trainset-", 0) != 0) continue;
        auto l = lines(text);
        auto meta = json::parse(l.at(0)).at("_meta");
        EXPECT_EQ(meta.at("teacher_id"), "match");
        EXPECT_EQ(meta.at("tokenizer"), "whitespace");
        if (l.size() == 201u) ++full;
        for (std::size_t i = 1; i < l.size(); ++i) {
            auto r = json::parse(l[i]);
            ASSERT_TRUE(r.contains("question") && r.contains("answer_prefix") && r.contains("label"));
            ASSERT_TRUE(r["label"] == "Yes" || r["label"] == "No");
        }
    }
    EXPECT_EQ(full, 2u);
}

TEST(Cli, RerunSkipsFinishedStagesAndRecomputesOnlyDownstream) {
    TempDir out;
    auto config = load_run_config(toy_config());
    {
        Pipeline p(config, out.path(), "test", "h");
        p.evaluate();
        EXPECT_FALSE(p.stages_run().empty());
        EXPECT_TRUE(p.problems().empty());
    }
    {
        Pipeline p(config, out.path(), "test", "h");
        p.evaluate();
        EXPECT_TRUE(p.stages_run().empty());
    }
    fs::path scores;
    for (const auto& e : fs::directory_iterator(out.path() / "artifacts")) {
        if (e.path().filename().string().rfind("scores-toy_nq-p32", 0) == 0) scores = e.path();
    }
    ASSERT_FALSE(scores.empty());
    const auto before = read_file(scores);
    fs::remove(scores);
    Pipeline p(config, out.path(), "test", "h");
    p.evaluate();
    ASSERT_EQ(p.stages_run().size(), 1u);
    EXPECT_EQ(p.stages_run()[0].rfind("scores-toy_nq-p32", 0), 0u);
    EXPECT_EQ(read_file(scores), before);
}

TEST(Cli, ChangedSeedInvalidatesStages) {
    TempDir out;
    auto config = load_run_config(toy_config());
    Pipeline(config, out.path(), "test", "h").score();
    config.seed = 8;
    Pipeline p(config, out.path(), "test", "h2");
    p.score();
    EXPECT_FALSE(p.stages_run().empty());
}

TEST(Cli, SixDatasetConfigGivesOneRowPerDataset) {
    TempDir out;
    const auto cfg = fs::path(source_dir()) / "configs" / "six_datasets.json";
    ASSERT_EQ(run({"--offline", "--config", cfg.string(), "--out", out.path().string(), "evaluate"}), kExitOk);
    auto table = lines(read_file(out.path() / "reports" / "eval_table.csv"));
    ASSERT_EQ(table.size(), 7u);
    for (std::size_t i = 1; i < table.size(); ++i) EXPECT_NE(table[i].find(",ok"), std::string::npos) << table[i];
    auto doc = json::parse(read_file(out.path() / "reports" / "eval_report.json"));
    EXPECT_EQ(doc.at("train_dataset"), "toy_nq");
    EXPECT_EQ(doc.at("rows").size(), 6u);
}

TEST(Cli, AblationTableShapes) {
    TempDir dir;
    make_dataset(dir / "data.jsonl", 400, 0.6, 1);
    auto c = base_config(dir / "data.jsonl", 200);
    c["ablation"] = {{"subset_sizes", {5, 10, 20, 40, "all"}},
                     {"size_prefix_tokens", {0, 32}},
                     {"teachers", {"match", "recall", "llm_judge"}}};
    const auto cfg = save_config(dir, c);
    const auto out = (dir / "out").string();
    ASSERT_EQ(run({"--offline", "--config", cfg.string(), "--out", out, "ablate", "--axis", "prefix_length"}), kExitOk);
    ASSERT_EQ(run({"--offline", "--config", cfg.string(), "--out", out, "ablate", "--axis", "trainset_size"}), kExitOk);
    ASSERT_EQ(run({"--offline", "--config", cfg.string(), "--out", out, "ablate", "--axis", "teacher"}), kExitOk);

    auto prefix = lines(read_file(fs::path(out) / "reports" / "ablation-prefix_length.csv"));
    ASSERT_EQ(prefix.size(), 8u);
    EXPECT_EQ(prefix[0].substr(0, 7), "prefix,");
    EXPECT_EQ(prefix[7].substr(0, 4), "128,");
    auto sizes = lines(read_file(fs::path(out) / "reports" / "ablation-trainset_size.csv"));
    ASSERT_EQ(sizes.size(), 11u);
    EXPECT_EQ(sizes[1].substr(0, 2), "5,");
    EXPECT_EQ(sizes[10].substr(0, 4), "all,");
    auto teachers = lines(read_file(fs::path(out) / "reports" / "ablation-teacher.csv"));
    ASSERT_EQ(teachers.size(), 4u);
    EXPECT_EQ(teachers[3].substr(0, 10), "llm-judge,");
    for (const auto* t : {&prefix, &sizes, &teachers}) {
        for (std::size_t i = 1; i < t->size(); ++i) EXPECT_NE((*t)[i].find(",ok"), std::string::npos) << (*t)[i];
    }
}

TEST(Cli, ReportedAccuracyAndAucTrackTheStubTargets) {
    TempDir dir;
    make_dataset(dir / "data.jsonl", 3000, 0.65, 2);
    auto c = base_config(dir / "data.jsonl", 2000);
    c["prefix_tokens"] = {32};
    const auto cfg = save_config(dir, c);
    ASSERT_EQ(run({"--offline", "--config", cfg.string(), "--out", (dir / "out").string(), "evaluate"}), kExitOk);
    auto doc = json::parse(read_file(dir / "out" / "reports" / "eval_report.json"));
    const auto& row = doc.at("rows").at(0);
    EXPECT_EQ(row.at("n"), 2000);
    EXPECT_NEAR(row.at("acc").get<double>(), 0.82, 0.02);
    EXPECT_NEAR(row.at("auc").get<double>(), 0.89, 0.02);
}

TEST(Cli, SingleClassLabelsReportUndefinedAuc) {
    std::vector<IKScore> s{{"a", 0.9, 0, 0, 0}, {"b", 0.2, 0, 0, 0}};
    std::vector<LabeledQuery> l{{"a", Label::Yes}, {"b", Label::Yes}};
    std::vector<RoutingInput> r{{"a", 0.9, 1, 1}, {"b", 0.2, 1, 1}};
    auto report = build_eval_report("x", 0, s, l, r, default_grid());
    EXPECT_FALSE(report.auc.has_value());
    EXPECT_NE(eval_csv_fields(report).find("undefined"), std::string::npos);
    EXPECT_EQ(to_json(report).at("auc_undefined"), true);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({"--version"}), kExitOk);
    EXPECT_EQ(run({}), kExitUsage);
    EXPECT_EQ(run({"frobnicate"}), kExitUsage);
    EXPECT_EQ(run({"evaluate"}), kExitUsage);
    EXPECT_EQ(run({"ablate", "--axis", "colour"}), kExitUsage);

    TempDir dir;
    write_file(dir / "bad.json", R"({"datasets": [], "seed": 1})");
    EXPECT_EQ(run({"--config", (dir / "bad.json").string(), "evaluate"}), kExitUsage);

    // Ten records have no documents: their RAG answers fail, the report is still written.
    make_dataset(dir / "data.jsonl", 60, 0.6, 3, 10);
    auto c = base_config(dir / "data.jsonl", 30);
    c["prefix_tokens"] = {32};
    auto cfg = save_config(dir, c);
    EXPECT_EQ(run({"--offline", "--config", cfg.string(), "--out", (dir / "p").string(), "evaluate"}), kExitPartial);
    EXPECT_TRUE(fs::exists(dir / "p" / "reports" / "eval_table.csv"));

    c["generator"] = {{"kind", "http"}, {"base_url", "http://127.0.0.1:9"}, {"model_id", "m"},
                      {"retry_limit", 0}, {"timeout_ms", 500}};
    cfg = save_config(dir, c);
    EXPECT_EQ(run({"--config", cfg.string(), "--out", (dir / "u").string(), "build-trainset"}), kExitBackend);
    EXPECT_EQ(run({"--offline", "--config", cfg.string(), "--out", (dir / "o").string(), "build-trainset"}),
              kExitUsage);
}

TEST(Cli, LatencyAndCharacterizeVerbs) {
    EXPECT_EQ(run({"latency", "--preset", "a100_vllm", "--p", "0.36"}), kExitOk);
    EXPECT_EQ(run({"latency", "--preset", "nope", "--p", "0.36"}), kExitUsage);
    EXPECT_EQ(run({"latency", "--preset", "a100_vllm", "--p", "1.5"}), kExitUsage);
    EXPECT_EQ(run({"latency", "--preset", "a100_vllm"}), kExitUsage);

    TempDir dir;
    std::string scores;
    for (int i = 0; i < 40; ++i) {
        json s{{"id", "q" + std::to_string(i)}, {"ik", i < 20 ? 0.05 : 0.95}, {"yes_logit", 0.0},
               {"no_logit", 0.0}, {"prefix_tokens", 0}};
        scores += s.dump() + "\n";
    }
    write_file(dir / "scores.jsonl", scores);
    EXPECT_EQ(run({"--out", (dir / "h").string(), "characterize", "--scores", (dir / "scores.jsonl").string()}),
              kExitOk);
    auto h = json::parse(read_file(dir / "h" / "histogram.json"));
    EXPECT_EQ(h.at("pattern"), "u_shaped");
    EXPECT_TRUE(fs::exists(dir / "h" / "histogram.svg"));
}
