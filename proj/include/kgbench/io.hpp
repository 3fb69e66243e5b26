#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kgbench/core.hpp"
#include "kgbench/eval.hpp"
#include "kgbench/models.hpp"
#include "kgbench/sampler.hpp"
#include "kgbench/training.hpp"

namespace kgbench {

namespace fs = std::filesystem;

// head<TAB>relation<TAB>tail per line, in file order. A final newline is
// optional; blank lines, empty fields and lines without exactly three fields
// throw MalformedLine naming the 1-based line number.
std::vector<RawTriple> parse_triples_tsv(std::string_view text);
std::vector<RawTriple> read_triples_tsv(const fs::path& path);

void write_triples_tsv(const fs::path& path, std::span<const RawTriple> triples);
void write_triples_tsv(const fs::path& path, const Vocabulary& vocab, std::span<const Triple> triples);

// label<TAB>id per line. Ids must cover 0..n-1 exactly once; the result is
// indexed by id.
std::vector<std::string> read_dictionary(const fs::path& path);
void write_dictionary(const fs::path& path, std::span<const std::string> labels);

struct DatasetLayout {
  std::string train = "train.tsv";
  std::string dev = "dev.tsv";
  std::string test = "test.tsv";
  std::string entity_dict = "entity2id.tsv";
  std::string relation_dict = "relation2id.tsv";
};

// Loads a split directory. When both dictionaries are present every label
// must appear in them; otherwise ids are assigned in first-appearance order
// over train, dev, test. Missing dev/test files count as empty splits.
Dataset load_dataset(const fs::path& dir, const DatasetLayout& layout = {});

// Writes the three splits and both dictionaries.
void save_dataset(const Dataset& d, const fs::path& dir, const DatasetLayout& layout = {});
void write_dictionaries(const Vocabulary& vocab, const fs::path& dir, const DatasetLayout& layout = {});

// Checkpoint layout, all integers little-endian:
//   "KGE1" | u32 tag length | tag | u64 entities | u64 relations |
//   u64 entity dim | u64 relation dim | u32 norm | u32 scalar width (4 or 8) |
//   tensors in model_slots(kind) order, each row-major.
inline constexpr std::string_view kCheckpointMagic = "KGE1";

template <typename Real>
void write_checkpoint(const ModelParams<Real>& params, const fs::path& path);

using AnyParams = std::variant<ModelParams<float>, ModelParams<double>>;

// Throws BadMagic, LengthMismatch (file size differs from what the header
// declares) or NonFiniteValue.
AnyParams read_checkpoint(const fs::path& path);

// Like read_checkpoint, converting the scalars to Real when widths differ.
template <typename Real>
ModelParams<Real> read_checkpoint_as(const fs::path& path);

// {"hits1":..,"hits3":..,"hits10":..,"mr":..,"mrr":..,"protocol":..,"sides":..,"n_test":..}
// plus one hitsK key per extra cutoff. Throws EmptyReport.
nlohmann::json report_to_json(const EvalReport& report);
void write_report(const EvalReport& report, const fs::path& path);

// Flat keys named after the TrainConfig fields; unknown keys throw InvalidConfig.
TrainConfig apply_train_config(TrainConfig base, const nlohmann::json& doc);
nlohmann::json train_config_to_json(const TrainConfig& cfg);

// Same for SamplerConfig; relation_allowlist holds labels resolved through
// `vocab` (UnknownLabel when absent).
SamplerConfig apply_sampler_config(SamplerConfig base, const nlohmann::json& doc, const Vocabulary& vocab);

nlohmann::json read_json(const fs::path& path);
void write_json(const nlohmann::json& doc, const fs::path& path);
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

}  // namespace kgbench
