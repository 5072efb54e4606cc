#include "ikgate/error.hpp"
#include "ikgate/stub_backend.hpp"
#include "ikgate/teacher.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ikgate;

namespace {

QueryRecord query(std::string id, std::string question, std::vector<std::string> golds) {
    QueryRecord q;
    q.id = std::move(id);
    q.question = std::move(question);
    q.golds = std::move(golds);
    return q;
}

Generation gen(std::string id, std::string answer) {
    Generation g;
    g.query_id = std::move(id);
    g.answer = std::move(answer);
    g.token_count = static_cast<int>(default_tokenizer().count(g.answer));
    return g;
}

std::shared_ptr<InferenceClient> stub_client(StubResponder r, std::shared_ptr<StubChatTransport>* out = nullptr) {
    auto t = std::make_shared<StubChatTransport>(std::move(r), "judge");
    if (out) *out = t;
    BackendConfig c;
    c.model_id = "judge";
    c.backoff_base = std::chrono::milliseconds(0);
    return std::make_shared<InferenceClient>(c, t);
}

}  // namespace

TEST(Metrics, Normalization) {
    EXPECT_EQ(normalize_answer("  The  Capital, of France!  "), "capital of france");
    EXPECT_EQ(normalize_answer("An apple a day"), "apple day");
}

TEST(Metrics, Match) {
    EXPECT_EQ(match_metric("The capital is Paris.", {"Paris"}), 1.0);
    EXPECT_EQ(match_metric("", {"Paris"}), 0.0);
    EXPECT_EQ(match_metric("paris", {"Paris"}), 1.0);
    EXPECT_EQ(match_metric("It is Lyon", {"Paris", "Lyon"}), 1.0);
    EXPECT_EQ(match_metric("Parisian food", {"Paris"}), 0.0);
    EXPECT_EQ(match_metric("anything", {"the", "Paris"}), 0.0);
}

TEST(Metrics, Recall) {
    EXPECT_DOUBLE_EQ(recall_metric("Barack Obama was president", {"Barack Obama"}), 1.0);
    EXPECT_DOUBLE_EQ(recall_metric("Obama", {"Barack Obama"}), 0.5);
    EXPECT_DOUBLE_EQ(recall_metric("New York", {"New York"}), 1.0);
    EXPECT_DOUBLE_EQ(recall_metric("york", {"new new york"}), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(recall_metric("Obama", {"the", "Barack Obama"}), 0.5);
    EXPECT_THROW(recall_metric("x", {"the", "!!"}), RangeError);
}

TEST(Metrics, MatchImpliesRecall) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"The answer is New York City.", "new york"}, {"it was 1969", "1969"}, {"Mount Everest, Nepal", "Everest"}};
    for (const auto& [a, g] : cases) {
        ASSERT_EQ(match_metric(a, {g}), 1.0) << a;
        EXPECT_EQ(recall_metric(a, {g}), 1.0) << a;
    }
}

TEST(Verdicts, BinarizationAtCutoff) {
    EXPECT_EQ(make_verdict("q", "t", 0.5, 0.5).label, Label::Yes);
    EXPECT_EQ(make_verdict("q", "t", 0.4999, 0.5).label, Label::No);
    EXPECT_THROW(make_verdict("q", "t", 1.2, 0.5), RangeError);
}

TEST(Judge, ParsesReplies) {
    EXPECT_EQ(parse_judge_score("1"), 1.0);
    EXPECT_EQ(parse_judge_score("0"), 0.0);
    EXPECT_EQ(parse_judge_score("Score: 0.8"), 0.8);
    EXPECT_EQ(parse_judge_score("Yes, correct."), 1.0);
    EXPECT_EQ(parse_judge_score("incorrect"), 0.0);
    EXPECT_FALSE(parse_judge_score("Score: 7"));
    EXPECT_FALSE(parse_judge_score("maybe"));
}

TEST(Judge, PromptHoldsEveryFieldOnce) {
    JudgePrompt p{"Who painted it?", "Leonardo", {"da Vinci", "Leonardo da Vinci"}};
    auto text = p.render();
    for (const char* s : {"Who painted it?", "Candidate answer: Leonardo", "da Vinci | Leonardo da Vinci"}) {
        EXPECT_NE(text.find(s), std::string::npos) << s;
    }
}

TEST(Judge, VerdictFromStubReplies) {
    auto q = query("q1", "Capital of France?", {"Paris"});
    auto yes = stub_client(fixed_responder("Score: 0.8"));
    auto v = judge_llm(q, gen("q1", "Paris"), *yes, 0.5);
    EXPECT_EQ(v.raw_score, 0.8);
    EXPECT_EQ(v.label, Label::Yes);
    auto no = stub_client(fixed_responder("0"));
    EXPECT_EQ(judge_llm(q, gen("q1", "Lyon"), *no, 0.5).label, Label::No);
}

TEST(Judge, RepromptsOnceThenFlags) {
    int calls = 0;
    std::shared_ptr<StubChatTransport> t;
    auto client = stub_client(
        [&](const std::string&) {
            ++calls;
            return StubReply{calls == 1 ? "hmm" : "1", {}};
        },
        &t);
    auto q = query("q1", "Q?", {"x"});
    EXPECT_EQ(judge_llm(q, gen("q1", "x"), *client, 0.5).raw_score, 1.0);
    EXPECT_EQ(calls, 2);

    auto bad = stub_client(fixed_responder("I cannot say"));
    LlmJudgeTeacher teacher(bad);
    auto run = judge_all(teacher, {q, query("q2", "R?", {"y"})}, {gen("q1", "x"), gen("q2", "y")});
    EXPECT_EQ(run.flagged, (std::vector<std::string>{"q1", "q2"}));
    EXPECT_FALSE(run.verdicts[0]);
}

TEST(Judge, ToyJudgeAgreesWithMetrics) {
    auto client = stub_client(toy_judge_responder());
    LlmJudgeTeacher teacher(client);
    auto q = query("q", "Who?", {"Barack Obama"});
    EXPECT_EQ(teacher.judge(q, gen("q", "It was Barack Obama.")).label, Label::Yes);
    EXPECT_EQ(teacher.judge(q, gen("q", "Obama")).label, Label::Yes);
    EXPECT_EQ(teacher.judge(q, gen("q", "George Bush")).label, Label::No);
}

TEST(Trainset, ExportPrefixes) {
    std::vector<QueryRecord> qs{query("a", "Qa?", {"x"}), query("b", "Qb?", {"y"})};
    std::string long_answer;
    for (int i = 0; i < 100; ++i) long_answer += "w" + std::to_string(i) + " ";
    std::vector<Generation> gens{gen("b", "short answer"), gen("a", long_answer)};
    std::vector<TeacherVerdict> vs{make_verdict("a", "match", 1, 0.5), make_verdict("b", "match", 0, 0.5)};

    auto zero = export_trainset(qs, gens, vs, 0, default_tokenizer());
    ASSERT_EQ(zero.size(), 2u);
    EXPECT_EQ(zero[0].query_id, "a");
    EXPECT_EQ(zero[0].answer_prefix, "");
    EXPECT_EQ(zero[0].label, Label::Yes);
    EXPECT_EQ(zero[1].label, Label::No);

    auto p32 = export_trainset(qs, gens, vs, 32, default_tokenizer());
    EXPECT_EQ(default_tokenizer().count(p32[0].answer_prefix), 32u);
    auto p128 = export_trainset(qs, gens, vs, 128, default_tokenizer());
    EXPECT_EQ(p128[1].answer_prefix, "short answer");
    EXPECT_THROW(export_trainset(qs, gens, vs, 5, default_tokenizer()), RangeError);
}

TEST(Trainset, MissingInputsAreItemized) {
    std::vector<QueryRecord> qs{query("a", "Qa?", {"x"}), query("b", "Qb?", {"y"}), query("c", "Qc?", {"z"})};
    std::vector<Generation> gens{gen("a", "x")};
    std::vector<TeacherVerdict> vs{make_verdict("a", "match", 1, 0.5), make_verdict("b", "match", 1, 0.5)};
    try {
        export_trainset(qs, gens, vs, 0, default_tokenizer());
        FAIL();
    } catch (const TrainsetExportError& e) {
        EXPECT_EQ(e.problems().size(), 3u);  // b: generation; c: generation and verdict
    }
}

TEST(Trainset, FileContract) {
    testutil::TempDir dir;
    TrainsetMeta meta{"whitespace", "match", 0.5, "toy_nq", 4};
    std::vector<TrainRecord> recs{{"a", "Qa?", "The answer is", 4, Label::Yes}, {"b", "Qb?", "I", 4, Label::No}};
    write_trainset(dir / "t.jsonl", meta, recs);
    auto text = testutil::read_file(dir / "t.jsonl");
    auto first = nlohmann::json::parse(text.substr(0, text.find('\n')));
    ASSERT_TRUE(first.contains("_meta"));
    EXPECT_EQ(first["_meta"]["tokenizer"], "whitespace");
    EXPECT_EQ(first["_meta"]["teacher_id"], "match");
    EXPECT_EQ(first["_meta"]["cutoff"], 0.5);
    EXPECT_EQ(first["_meta"]["source_dataset"], "toy_nq");
    const auto nl = text.find('\n');
    auto second = nlohmann::json::parse(text.substr(nl + 1, text.find('\n', nl + 1) - nl - 1));
    EXPECT_EQ(second, nlohmann::json::parse(
                          R"({"id":"a","question":"Qa?","answer_prefix":"The answer is","prefix_tokens":4,"label":"Yes"})"));
    auto [m, r] = read_trainset(dir / "t.jsonl");
    EXPECT_EQ(m, meta);
    EXPECT_EQ(r, recs);
}

TEST(Trainset, VerdictFilesRoundTripAndAreDeterministic) {
    testutil::TempDir dir;
    StringMetricTeacher t(StringMetric::Recall);
    std::vector<QueryRecord> qs{query("a", "Q?", {"Barack Obama"}), query("b", "R?", {"Paris"})};
    std::vector<Generation> gs{gen("a", "Obama"), gen("b", "Lyon")};
    auto r1 = judge_all(t, qs, gs), r2 = judge_all(t, qs, gs);
    std::vector<TeacherVerdict> v1, v2;
    for (auto& v : r1.verdicts) v1.push_back(*v);
    for (auto& v : r2.verdicts) v2.push_back(*v);
    save_verdicts(dir / "1.jsonl", v1);
    save_verdicts(dir / "2.jsonl", v2);
    EXPECT_EQ(testutil::read_file(dir / "1.jsonl"), testutil::read_file(dir / "2.jsonl"));
    EXPECT_EQ(load_verdicts(dir / "1.jsonl"), v1);
    EXPECT_EQ(v1[0].raw_score, 0.5);
    EXPECT_EQ(v1[0].label, Label::Yes);
}
