#include "ikgate/cli/commands.hpp"

#include "ikgate/cli/config.hpp"
#include "ikgate/cli/manifest.hpp"
#include "ikgate/cli/pipeline.hpp"
#include "ikgate/hashing.hpp"
#include "ikgate/ik_scorer.hpp"
#include "ikgate/latency_model.hpp"
#include "ikgate/report.hpp"
#include "ikgate/router_eval.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ikgate::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool offline = false;
};

struct RunSetup {
    RunConfig config;
    fs::path out;
    std::string config_hash;
};

RunSetup prepare(const GlobalOptions& g) {
    if (g.config.empty()) throw ConfigError("--config is required for this command");
    RunSetup s;
    s.config = load_run_config(g.config);
    if (g.seed) s.config.seed = *g.seed;
    if (g.offline) require_offline_backends(s.config);
    s.out = !g.out.empty() ? fs::path(g.out) : !s.config.out_dir.empty() ? s.config.out_dir : fs::path("out");
    FieldHasher h;
    h.add(sha256_file(g.config)).add(static_cast<long long>(s.config.seed));
    s.config_hash = h.hex();
    return s;
}

int finish(const Pipeline& p) {
    if (!p.problems().empty()) {
        fmt::print(stderr, "{} problem(s); reports were written but the run is incomplete\n", p.problems().size());
        return kExitPartial;
    }
    return kExitOk;
}

void print_paths(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << '\n';
}

int cmd_latency(const GlobalOptions& g, const std::string& preset, const std::string& presets_file,
                std::optional<double> p, const std::string& report, const std::string& at, bool prefix) {
    StageCosts costs;
    if (!preset.empty()) {
        auto presets = presets_file.empty() ? builtin_latency_presets() : load_latency_presets(presets_file);
        auto it = presets.find(preset);
        if (it == presets.end()) throw ConfigError("unknown latency preset '" + preset + "'");
        costs = it->second;
    } else if (!g.config.empty()) {
        auto config = load_run_config(g.config);
        if (config.latency) costs = *config.latency;
    }
    costs.validate();
    if (!report.empty()) {
        std::ifstream in(report, std::ios::binary);
        if (!in) throw ConfigError("cannot open report " + report);
        const auto j = json::parse(in);
        if (at != "best" && at != "0.5") throw ConfigError("--at must be \"best\" or \"0.5\"");
        const auto& point = at == "best" ? j.at("best") : j.at("at_0p5");
        p = point.at("retr").get<double>();
        prefix = j.at("prefix_tokens").get<int>() > 0;
    }
    if (!p) throw ConfigError("latency needs --p or --report");
    nlohmann::ordered_json out;
    out["costs"] = to_json(costs);
    out["prefix_used"] = prefix;
    out["estimate"] = to_json(expected_latency(costs, prefix, *p));
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_characterize(const GlobalOptions& g, const std::string& scores_path) {
    const auto scores = load_scores(scores_path);
    const auto hist = characterize(scores);
    std::cout << to_json(hist).dump(2) << '\n';
    if (!g.out.empty()) {
        const fs::path dir(g.out);
        std::ostringstream csv;
        write_histogram_csv(csv, hist);
        write_text_file(dir / "histogram.csv", csv.str());
        write_text_file(dir / "histogram.json", to_json(hist).dump(2) + "\n");
        write_text_file(dir / "histogram.svg", render_histogram_svg(hist, fs::path(scores_path).stem().string()));
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Selective retrieval gated by an IK (I Know) score", "ikgate"};
    app.set_version_flag("--version", std::string(IKGATE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Run configuration file");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Override the configured seed");
    app.add_flag("--offline", g.offline, "Stub backends only; any network attempt fails");

    auto* build = app.add_subcommand("build-trainset", "Generate, judge and export trainsets");
    auto* score = app.add_subcommand("score", "Compute IK scores for the evaluation sets");
    auto* evaluate = app.add_subcommand("evaluate", "Write evaluation reports, sweeps and histograms");

    auto* ablate = app.add_subcommand("ablate", "Write an ablation table");
    std::string axis = "prefix_length";
    ablate->add_option("--axis", axis, "prefix_length, trainset_size or teacher")
        ->check(CLI::IsMember({"prefix_length", "trainset_size", "teacher"}));

    auto* latency = app.add_subcommand("latency", "Expected per-question latency");
    std::string preset, presets_file, report, at = "best";
    std::optional<double> p;
    bool prefix = true;
    latency->add_option("--preset", preset, "Latency preset name");
    latency->add_option("--presets-file", presets_file, "JSON file of presets");
    latency->add_option("--p", p, "Retrieval fraction in [0,1]");
    latency->add_option("--report", report, "Cell report.json to read the retrieval fraction from");
    latency->add_option("--at", at, "Operating point of --report: best or 0.5");
    latency->add_flag("--prefix,!--no-prefix", prefix, "Count the prefix generation stage");

    auto* characterize_cmd = app.add_subcommand("characterize", "Histogram of IK scores");
    std::string scores_path;
    characterize_cmd->add_option("--scores", scores_path, "Scores JSONL file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const bool was_offline = is_offline();
    if (g.offline) set_offline(true);
    struct Restore {
        bool previous;
        ~Restore() { set_offline(previous); }
    } restore{was_offline};

    try {
        if (*latency) return cmd_latency(g, preset, presets_file, p, report, at, prefix);
        if (*characterize_cmd) return cmd_characterize(g, scores_path);

        auto setup = prepare(g);
        Pipeline pipeline(setup.config, setup.out, IKGATE_VERSION, setup.config_hash);
        if (*build) {
            print_paths(pipeline.build_trainsets());
        } else if (*score) {
            print_paths(pipeline.score());
        } else if (*evaluate) {
            pipeline.evaluate();
            std::ifstream table(setup.out / "reports" / "eval_table.csv");
            std::cout << table.rdbuf();
        } else if (*ablate) {
            const auto path = pipeline.ablate(ablation_axis_from_string(axis));
            std::ifstream table(path);
            std::cout << table.rdbuf();
        }
        return finish(pipeline);
    } catch (const OfflineViolation& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitBackend;
    } catch (const BackendUnreachable& e) {
        fmt::print(stderr, "error: backend unreachable: {}\n", e.what());
        return kExitBackend;
    } catch (const TransportError& e) {
        fmt::print(stderr, "error: backend unreachable: {}\n", e.what());
        return kExitBackend;
    } catch (const CapabilityError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitBackend;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitUsage;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace ikgate::cli
