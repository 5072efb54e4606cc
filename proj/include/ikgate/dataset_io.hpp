#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ikgate {

/// A QA item. `extra` holds any keys beyond id/question/golds so that
/// save(load(file)) does not drop them.
struct QueryRecord {
    std::string id;
    std::string question;
    std::vector<std::string> golds;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool operator==(const QueryRecord&) const = default;
};

enum class DatasetFormat { Jsonl, Csv };

DatasetFormat format_from_path(const std::filesystem::path& path);

/// Reads a dataset in file order. Throws ParseError (with the 1-based line),
/// DuplicateIdError or EmptyDatasetError.
std::vector<QueryRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format);
std::vector<QueryRecord> load_dataset(const std::filesystem::path& path);

/// Writes canonical JSON-lines: {"id","question","golds", ...extra}.
void save_dataset(const std::filesystem::path& path, const std::vector<QueryRecord>& records);

nlohmann::ordered_json to_json(const QueryRecord& record);
/// `line` only feeds error messages.
QueryRecord record_from_json(const nlohmann::ordered_json& j, std::size_t line = 0);

/// Checks the per-record and per-dataset invariants.
void validate_records(const std::vector<QueryRecord>& records);

struct DatasetSplit {
    std::vector<QueryRecord> train;
    std::vector<QueryRecord> validation;
    std::uint64_t seed = 0;
    /// Seeded permutation of the input indices; the first `validation.size()`
    /// entries went to validation.
    std::vector<std::size_t> permutation;
};

/// Samples `validation_size` records with a seeded permutation. Both parts keep
/// the original file order.
DatasetSplit split_dataset(const std::vector<QueryRecord>& records, std::size_t validation_size,
                           std::uint64_t seed);

void save_split(const std::filesystem::path& path, const DatasetSplit& split);

struct SubsetSpec {
    std::vector<std::size_t> sizes;
    std::uint64_t seed = 0;
};

/// Nested training subsets: every subset is a prefix of one seeded shuffle of
/// `split.train`, so smaller subsets are contained in larger ones.
std::vector<std::pair<std::size_t, std::vector<QueryRecord>>> subset_train(const DatasetSplit& split,
                                                                          const SubsetSpec& spec);

/// Seeded Fisher-Yates permutation of [0, n). Portable across standard libraries.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace ikgate
