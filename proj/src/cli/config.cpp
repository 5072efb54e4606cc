#include "ikgate/cli/config.hpp"

#include "ikgate/error.hpp"
#include "ikgate/router_eval.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace ikgate::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return j[key];
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

BackendSpec parse_backend(const json& j, const std::string& where, const fs::path& base) {
    check_keys(j,
               {"kind", "base_url", "model_id", "max_parallel_requests", "retry_limit", "timeout_ms",
                "backoff_ms", "cache_dir", "context_window_tokens", "top_logprobs", "audit_log", "api_key_env"},
               where);
    BackendSpec b;
    b.kind = get_or<std::string>(j, "kind", "stub", where);
    if (b.kind != "stub" && b.kind != "http") throw ConfigError(where + ".kind must be \"stub\" or \"http\"");
    auto& c = b.client;
    c.base_url = get_or<std::string>(j, "base_url", "", where);
    if (b.kind == "http" && c.base_url.empty()) throw ConfigError(where + ".base_url is required for http backends");
    c.model_id = get_or<std::string>(j, "model_id", b.kind == "stub" ? "stub" : "", where);
    if (c.model_id.empty()) throw ConfigError(where + ".model_id is required");
    c.max_parallel_requests = get_or<std::size_t>(j, "max_parallel_requests", 4, where);
    if (c.max_parallel_requests < 1) throw ConfigError(where + ".max_parallel_requests must be >= 1");
    c.retry_limit = get_or<int>(j, "retry_limit", 3, where);
    c.timeout = std::chrono::milliseconds(get_or<long>(j, "timeout_ms", 30000, where));
    c.backoff_base = std::chrono::milliseconds(get_or<long>(j, "backoff_ms", 200, where));
    if (j.contains("cache_dir")) c.cache_dir = resolve(base, j["cache_dir"].get<std::string>());
    c.context_window_tokens = get_or<std::size_t>(j, "context_window_tokens", 8192, where);
    c.top_logprobs = get_or<int>(j, "top_logprobs", 5, where);
    if (j.contains("audit_log")) c.audit_log = resolve(base, j["audit_log"].get<std::string>());
    b.api_key_env = get_or<std::string>(j, "api_key_env", "", where);
    return b;
}

std::size_t parse_size(const json& v, const std::string& where) {
    if (v.is_string() && v.get<std::string>() == "all") return 0;
    if (v.is_number_unsigned() && v.get<std::size_t>() > 0) return v.get<std::size_t>();
    throw ConfigError(where + ": sizes must be positive integers or \"all\"");
}

std::vector<int> parse_prefixes(const json& v, const std::string& where) {
    std::vector<int> out;
    if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty list");
    for (const auto& p : v) {
        if (!p.is_number_integer() || !is_allowed_prefix(p.get<int>()))
            throw ConfigError(where + ": prefix lengths must be one of 0,4,8,16,32,64,128");
        out.push_back(p.get<int>());
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
    check_keys(j,
               {"datasets", "validation_size", "seed", "generator", "judge", "teacher", "scorer", "max_tokens",
                "prefix_tokens", "subset_sizes", "sweep_grid", "latency", "ablation", "out_dir"},
               "config");
    RunConfig c;
    const auto& datasets = require(j, "datasets", "config");
    if (!datasets.is_array() || datasets.empty()) throw ConfigError("config.datasets: expected a non-empty list");
    std::set<std::string> names;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto where = "config.datasets[" + std::to_string(i) + "]";
        check_keys(datasets[i], {"name", "path", "format"}, where);
        DatasetConfig d;
        d.path = resolve(base_dir, require(datasets[i], "path", where).get<std::string>());
        d.name = get_or<std::string>(datasets[i], "name", d.path.stem().string(), where);
        auto fmt = get_or<std::string>(datasets[i], "format", "", where);
        d.format = fmt.empty() ? format_from_path(d.path) : (fmt == "csv" ? DatasetFormat::Csv : DatasetFormat::Jsonl);
        if (!fmt.empty() && fmt != "csv" && fmt != "jsonl") throw ConfigError(where + ".format must be jsonl or csv");
        if (!fs::exists(d.path)) throw ConfigError(where + ".path does not exist: " + d.path.string());
        if (!names.insert(d.name).second) throw ConfigError(where + ".name is not unique: " + d.name);
        c.datasets.push_back(std::move(d));
    }
    c.validation_size = require(j, "validation_size", "config").get<std::size_t>();
    c.seed = get_or<std::uint64_t>(j, "seed", 0, "config");
    c.generator = parse_backend(j.value("generator", json::object()), "config.generator", base_dir);
    c.judge = parse_backend(j.value("judge", json::object()), "config.judge", base_dir);

    const auto teacher = j.value("teacher", json::object());
    check_keys(teacher, {"kind", "cutoff"}, "config.teacher");
    c.teacher.kind = get_or<std::string>(teacher, "kind", "match", "config.teacher");
    if (c.teacher.kind != "match" && c.teacher.kind != "recall" && c.teacher.kind != "llm_judge")
        throw ConfigError("config.teacher.kind must be match, recall or llm_judge");
    c.teacher.cutoff = get_or<double>(teacher, "cutoff", 0.5, "config.teacher");

    const auto scorer = j.value("scorer", json::object());
    check_keys(scorer, {"kind", "url", "chat", "targets", "max_parallel", "retry_limit", "timeout_ms"}, "config.scorer");
    c.scorer.kind = get_or<std::string>(scorer, "kind", "calibrated_stub", "config.scorer");
    if (c.scorer.kind != "calibrated_stub" && c.scorer.kind != "remote_endpoint" &&
        c.scorer.kind != "chat_logprob_adapter")
        throw ConfigError("config.scorer.kind must be calibrated_stub, remote_endpoint or chat_logprob_adapter");
    c.scorer.url = get_or<std::string>(scorer, "url", "", "config.scorer");
    if (c.scorer.kind == "remote_endpoint" && c.scorer.url.empty())
        throw ConfigError("config.scorer.url is required for remote_endpoint");
    if (scorer.contains("chat")) c.scorer.chat = parse_backend(scorer["chat"], "config.scorer.chat", base_dir);
    c.scorer.max_parallel = get_or<std::size_t>(scorer, "max_parallel", 4, "config.scorer");
    c.scorer.retry_limit = get_or<int>(scorer, "retry_limit", 3, "config.scorer");
    c.scorer.timeout = std::chrono::milliseconds(get_or<long>(scorer, "timeout_ms", 30000, "config.scorer"));
    if (scorer.contains("targets")) {
        const auto& targets = scorer["targets"];
        if (!targets.is_array()) throw ConfigError("config.scorer.targets: expected a list");
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto where = "config.scorer.targets[" + std::to_string(i) + "]";
            const auto& t = targets[i];
            check_keys(t, {"prefix_tokens", "dataset", "train_size", "teacher", "acc", "auc"}, where);
            StubTarget st;
            if (t.contains("prefix_tokens")) st.prefix_tokens = t["prefix_tokens"].get<int>();
            if (t.contains("dataset")) st.dataset = t["dataset"].get<std::string>();
            if (t.contains("train_size")) st.train_size = parse_size(t["train_size"], where + ".train_size");
            if (t.contains("teacher")) st.teacher = t["teacher"].get<std::string>();
            st.acc = require(t, "acc", where).get<double>();
            st.auc = require(t, "auc", where).get<double>();
            c.scorer.targets.push_back(st);
        }
    }
    if (c.scorer.kind == "calibrated_stub" && c.scorer.targets.empty())
        throw ConfigError("config.scorer.targets is required for calibrated_stub");

    c.max_tokens = get_or<int>(j, "max_tokens", 128, "config");
    if (c.max_tokens < 1) throw ConfigError("config.max_tokens must be >= 1");
    if (j.contains("prefix_tokens")) c.prefix_tokens = parse_prefixes(j["prefix_tokens"], "config.prefix_tokens");
    if (j.contains("subset_sizes")) {
        for (const auto& s : j["subset_sizes"]) c.subset_sizes.push_back(parse_size(s, "config.subset_sizes"));
    }

    c.sweep_grid = default_grid();
    if (j.contains("sweep_grid")) {
        const auto& g = j["sweep_grid"];
        if (g.is_array()) {
            c.sweep_grid = g.get<std::vector<double>>();
        } else if (g.is_object() && g.contains("step")) {
            const double step = g["step"].get<double>();
            if (!(step > 0.0 && step <= 1.0)) throw ConfigError("config.sweep_grid.step must lie in (0,1]");
            c.sweep_grid.clear();
            const auto steps = static_cast<int>(std::floor(1.0 / step + 1e-9));
            for (int i = 0; i <= steps; ++i) c.sweep_grid.push_back(std::min(1.0, i * step));
        } else {
            throw ConfigError("config.sweep_grid: expected a list or {\"step\": x}");
        }
        for (double t : c.sweep_grid) {
            if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("config.sweep_grid values must lie in [0,1]");
        }
        if (c.sweep_grid.empty()) throw ConfigError("config.sweep_grid is empty");
    }

    if (j.contains("latency")) {
        const auto& l = j["latency"];
        if (l.contains("preset")) {
            auto presets = l.contains("presets_file")
                               ? load_latency_presets(resolve(base_dir, l["presets_file"].get<std::string>()))
                               : builtin_latency_presets();
            auto it = presets.find(l["preset"].get<std::string>());
            if (it == presets.end()) throw ConfigError("config.latency.preset: unknown preset");
            c.latency = it->second;
        } else {
            c.latency = stage_costs_from_json(l);
        }
    }

    if (j.contains("ablation")) {
        const auto& a = j["ablation"];
        check_keys(a, {"prefix_tokens", "subset_sizes", "size_prefix_tokens", "teachers"}, "config.ablation");
        if (a.contains("prefix_tokens")) c.ablation.prefix_tokens = parse_prefixes(a["prefix_tokens"], "config.ablation.prefix_tokens");
        if (a.contains("size_prefix_tokens"))
            c.ablation.size_prefix_tokens = parse_prefixes(a["size_prefix_tokens"], "config.ablation.size_prefix_tokens");
        if (a.contains("subset_sizes")) {
            c.ablation.subset_sizes.clear();
            for (const auto& s : a["subset_sizes"]) c.ablation.subset_sizes.push_back(parse_size(s, "config.ablation.subset_sizes"));
        }
        if (a.contains("teachers")) {
            c.ablation.teachers = a["teachers"].get<std::vector<std::string>>();
            for (const auto& t : c.ablation.teachers) {
                if (t != "match" && t != "recall" && t != "llm_judge")
                    throw ConfigError("config.ablation.teachers: unknown teacher '" + t + "'");
            }
        }
    }
    if (c.ablation.subset_sizes.empty()) c.ablation.subset_sizes = c.subset_sizes;

    if (j.contains("out_dir")) c.out_dir = resolve(base_dir, j["out_dir"].get<std::string>());
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);  // comments allowed
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j, fs::absolute(path).parent_path());
}

void require_offline_backends(const RunConfig& config) {
    if (config.generator.kind != "stub") throw ConfigError("--offline: generator backend must be \"stub\"");
    if (config.judge.kind != "stub") throw ConfigError("--offline: judge backend must be \"stub\"");
    if (config.scorer.kind == "remote_endpoint") throw ConfigError("--offline: scorer must not be a remote endpoint");
    if (config.scorer.kind == "chat_logprob_adapter" && config.scorer.chat.kind != "stub")
        throw ConfigError("--offline: scorer chat backend must be \"stub\"");
}

}  // namespace ikgate::cli
