#include "ikgate/dataset_io.hpp"

#include "ikgate/error.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ikgate {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_pipe(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '|') {
            out.push_back(boost::algorithm::trim_copy(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(boost::algorithm::trim_copy(cur));
    std::erase_if(out, [](const std::string& g) { return g.empty(); });
    return out;
}

// RFC 4180 row splitter. Quoted fields may not span lines.
std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<QueryRecord> load_jsonl(std::istream& in) {
    std::vector<QueryRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (boost::algorithm::trim_copy(line).empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        records.push_back(record_from_json(j, line_no));
    }
    return records;
}

std::vector<QueryRecord> load_csv(std::istream& in) {
    std::vector<QueryRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    strip_cr(line);
    auto header = split_csv_row(line, 1);
    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[boost::algorithm::trim_copy(header[i])] = i;
    for (const char* required : {"id", "question", "golds"}) {
        if (!col.count(required)) throw ParseError(1, std::string("missing column '") + required + "'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (boost::algorithm::trim_copy(line).empty()) continue;
        auto fields = split_csv_row(line, line_no);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        QueryRecord r;
        r.id = fields[col["id"]];
        r.question = fields[col["question"]];
        r.golds = split_pipe(fields[col["golds"]]);
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto& name = header[i];
            if (name != "id" && name != "question" && name != "golds") r.extra[name] = fields[i];
        }
        if (r.id.empty()) throw ParseError(line_no, "missing field 'id'");
        if (boost::algorithm::trim_copy(r.question).empty()) throw ParseError(line_no, "missing field 'question'");
        if (r.golds.empty()) throw ParseError(line_no, "field 'golds' is empty");
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

DatasetFormat format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv" ? DatasetFormat::Csv : DatasetFormat::Jsonl;
}

QueryRecord record_from_json(const ordered_json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError(line, "record is not a JSON object");
    for (const char* key : {"id", "question", "golds"}) {
        if (!j.contains(key)) throw ParseError(line, std::string("missing field '") + key + "'");
    }
    QueryRecord r;
    if (!j["id"].is_string()) throw ParseError(line, "field 'id' must be a string");
    if (!j["question"].is_string()) throw ParseError(line, "field 'question' must be a string");
    r.id = j["id"].get<std::string>();
    r.question = j["question"].get<std::string>();
    const auto& golds = j["golds"];
    if (!golds.is_array()) throw ParseError(line, "field 'golds' must be an array");
    for (const auto& g : golds) {
        if (!g.is_string()) throw ParseError(line, "field 'golds' must hold strings");
        r.golds.push_back(g.get<std::string>());
    }
    if (r.id.empty()) throw ParseError(line, "field 'id' is empty");
    if (boost::algorithm::trim_copy(r.question).empty()) throw ParseError(line, "field 'question' is empty");
    if (r.golds.empty()) throw ParseError(line, "field 'golds' is empty");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "id" && it.key() != "question" && it.key() != "golds") r.extra[it.key()] = it.value();
    }
    return r;
}

ordered_json to_json(const QueryRecord& record) {
    ordered_json j;
    j["id"] = record.id;
    j["question"] = record.question;
    j["golds"] = record.golds;
    for (auto it = record.extra.begin(); it != record.extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

void validate_records(const std::vector<QueryRecord>& records) {
    if (records.empty()) throw EmptyDatasetError("dataset has no records");
    std::set<std::string> seen;
    std::vector<std::string> dups;
    for (const auto& r : records) {
        if (r.golds.empty()) throw ParseError(0, "record '" + r.id + "' has no gold answers");
        if (boost::algorithm::trim_copy(r.question).empty())
            throw ParseError(0, "record '" + r.id + "' has an empty question");
        if (!seen.insert(r.id).second && std::find(dups.begin(), dups.end(), r.id) == dups.end())
            dups.push_back(r.id);
    }
    if (!dups.empty()) throw DuplicateIdError(std::move(dups));
}

std::vector<QueryRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open dataset " + path.string());
    auto records = format == DatasetFormat::Csv ? load_csv(in) : load_jsonl(in);
    validate_records(records);
    return records;
}

std::vector<QueryRecord> load_dataset(const std::filesystem::path& path) {
    return load_dataset(path, format_from_path(path));
}

void save_dataset(const std::filesystem::path& path, const std::vector<QueryRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    boost::random::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return perm;
}

DatasetSplit split_dataset(const std::vector<QueryRecord>& records, std::size_t validation_size,
                           std::uint64_t seed) {
    if (validation_size == 0 || validation_size >= records.size()) {
        throw RangeError("validation_size must be in (0, " + std::to_string(records.size()) + "), got " +
                         std::to_string(validation_size));
    }
    DatasetSplit split;
    split.seed = seed;
    split.permutation = seeded_permutation(records.size(), seed);
    std::vector<char> in_validation(records.size(), 0);
    for (std::size_t i = 0; i < validation_size; ++i) in_validation[split.permutation[i]] = 1;
    for (std::size_t i = 0; i < records.size(); ++i) {
        (in_validation[i] ? split.validation : split.train).push_back(records[i]);
    }
    return split;
}

void save_split(const std::filesystem::path& path, const DatasetSplit& split) {
    ordered_json j;
    j["seed"] = split.seed;
    j["permutation"] = split.permutation;
    auto ids = [](const std::vector<QueryRecord>& rs) {
        std::vector<std::string> out;
        for (const auto& r : rs) out.push_back(r.id);
        return out;
    };
    j["train"] = ids(split.train);
    j["validation"] = ids(split.validation);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(1) << '\n';
}

std::vector<std::pair<std::size_t, std::vector<QueryRecord>>> subset_train(const DatasetSplit& split,
                                                                          const SubsetSpec& spec) {
    for (auto size : spec.sizes) {
        if (size == 0) throw RangeError("subset size must be positive");
        if (size > split.train.size()) {
            throw RangeError("subset size " + std::to_string(size) + " exceeds train size " +
                             std::to_string(split.train.size()));
        }
    }
    auto perm = seeded_permutation(split.train.size(), spec.seed);
    std::vector<std::pair<std::size_t, std::vector<QueryRecord>>> out;
    for (auto size : spec.sizes) {
        std::vector<QueryRecord> subset;
        subset.reserve(size);
        for (std::size_t i = 0; i < size; ++i) subset.push_back(split.train[perm[i]]);
        out.emplace_back(size, std::move(subset));
    }
    return out;
}

}  // namespace ikgate
