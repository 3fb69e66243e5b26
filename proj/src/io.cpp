#include "kgbench/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "kgbench/error.hpp"
#include "kgbench/log.hpp"

namespace kgbench {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::string contents(size, '\0');
  if (size > 0 && !in.read(contents.data(), static_cast<std::streamsize>(size))) {
    throw Error(ErrorCode::Io, "cannot read " + path.string());
  }
  return contents;
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

namespace {

// Calls fn(line_number, line) for each line; a final newline is optional and
// a trailing '\r' is kept as part of the line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto end = text.find('\n', pos);
    const auto stop = end == std::string_view::npos ? text.size() : end;
    fn(line_no, text.substr(pos, stop - pos));
    pos = stop + 1;
  }
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw MalformedLineError(line_no, what);
}

// Splits on tabs into exactly `n` non-empty fields.
template <std::size_t N>
std::array<std::string_view, N> split_fields(std::string_view line, std::size_t line_no) {
  if (line.empty()) malformed(line_no, "blank line");
  std::array<std::string_view, N> fields;
  std::size_t count = 0;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    const auto field = line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos);
    if (count < N) fields[count] = field;
    ++count;
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  if (count != N) malformed(line_no, "expected " + std::to_string(N) + " tab-separated fields, got " + std::to_string(count));
  for (const auto& f : fields) {
    if (f.empty()) malformed(line_no, "empty field");
  }
  return fields;
}

}  // namespace

std::vector<RawTriple> parse_triples_tsv(std::string_view text) {
  std::vector<RawTriple> out;
  out.reserve(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1);
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto f = split_fields<3>(line, line_no);
    out.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2])});
  });
  return out;
}

std::vector<RawTriple> read_triples_tsv(const fs::path& path) {
  try {
    return parse_triples_tsv(read_file(path));
  } catch (const MalformedLineError& e) {
    throw MalformedLineError(e.line(), e.detail(), path.string());
  }
}

void write_triples_tsv(const fs::path& path, std::span<const RawTriple> triples) {
  std::string text;
  for (const auto& t : triples) {
    text.append(t[0]).push_back('\t');
    text.append(t[1]).push_back('\t');
    text.append(t[2]).push_back('\n');
  }
  write_file(path, text);
}

void write_triples_tsv(const fs::path& path, const Vocabulary& vocab, std::span<const Triple> triples) {
  std::string text;
  for (const auto& t : triples) {
    text.append(vocab.entity_label(t.head)).push_back('\t');
    text.append(vocab.relation_label(t.relation)).push_back('\t');
    text.append(vocab.entity_label(t.tail)).push_back('\n');
  }
  write_file(path, text);
}

std::vector<std::string> read_dictionary(const fs::path& path) try {
  const auto text = read_file(path);
  std::vector<std::pair<std::uint64_t, std::string>> rows;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto f = split_fields<2>(line, line_no);
    std::uint64_t id = 0;
    for (char c : f[1]) {
      if (c < '0' || c > '9' || id > (std::uint64_t{1} << 32)) malformed(line_no, "id is not a small non-negative integer");
      id = id * 10 + static_cast<std::uint64_t>(c - '0');
    }
    rows.emplace_back(id, std::string(f[0]));
  });
  std::vector<std::string> labels(rows.size());
  std::vector<bool> seen(rows.size(), false);
  std::unordered_set<std::string> label_set;
  for (auto& [id, label] : rows) {
    if (id >= rows.size() || seen[id]) {
      throw Error(ErrorCode::InvalidId, path.string() + ": ids must cover 0.." + std::to_string(rows.size() - 1) +
                                            " exactly once (bad id " + std::to_string(id) + ")");
    }
    if (!label_set.insert(label).second) throw Error(ErrorCode::DuplicateLabel, path.string() + ": '" + label + "'");
    seen[id] = true;
    labels[id] = std::move(label);
  }
  return labels;
} catch (const MalformedLineError& e) {
  throw MalformedLineError(e.line(), e.detail(), path.string());
}

void write_dictionary(const fs::path& path, std::span<const std::string> labels) {
  std::string text;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    text.append(labels[i]).push_back('\t');
    text.append(std::to_string(i)).push_back('\n');
  }
  write_file(path, text);
}

Dataset load_dataset(const fs::path& dir, const DatasetLayout& layout) {
  const auto train_path = dir / layout.train;
  if (!fs::exists(train_path)) throw Error(ErrorCode::Io, "missing " + train_path.string());
  auto read_optional = [&](const std::string& name) {
    const auto path = dir / name;
    return fs::exists(path) ? read_triples_tsv(path) : std::vector<RawTriple>{};
  };
  const auto raw_train = read_triples_tsv(train_path);
  const auto raw_dev = read_optional(layout.dev);
  const auto raw_test = read_optional(layout.test);

  const bool have_dicts = fs::exists(dir / layout.entity_dict) && fs::exists(dir / layout.relation_dict);
  Vocabulary vocab;
  VocabPolicy policy = VocabPolicy::Grow;
  if (have_dicts) {
    vocab = Vocabulary::from_labels(read_dictionary(dir / layout.entity_dict), read_dictionary(dir / layout.relation_dict));
    policy = VocabPolicy::Frozen;
  } else {
    log::info("no dictionaries in {}; assigning ids in first-appearance order", dir.string());
  }

  std::vector<Triple> splits[3];
  const std::vector<RawTriple>* raws[3] = {&raw_train, &raw_dev, &raw_test};
  for (int i = 0; i < 3; ++i) {
    if (raws[i]->empty()) continue;
    auto encoded = encode_triples(*raws[i], policy, std::move(vocab));
    vocab = std::move(encoded.vocabulary);
    splits[i] = std::move(encoded.triples);
  }
  Dataset d(std::move(vocab), std::move(splits[0]), std::move(splits[1]), std::move(splits[2]));
  const auto& dup = d.duplicates_removed();
  if (dup.train + dup.dev + dup.test > 0) {
    log::warn("removed duplicate triples: train {}, dev {}, test {}", dup.train, dup.dev, dup.test);
  }
  const auto unseen = unseen_heldout(d);
  if (unseen.dev_triples + unseen.test_triples > 0) {
    log::warn("held-out triples with an entity absent from train: dev {}, test {}", unseen.dev_triples,
              unseen.test_triples);
  }
  return d;
}

void write_dictionaries(const Vocabulary& vocab, const fs::path& dir, const DatasetLayout& layout) {
  write_dictionary(dir / layout.entity_dict, vocab.entity_labels());
  write_dictionary(dir / layout.relation_dict, vocab.relation_labels());
}

void save_dataset(const Dataset& d, const fs::path& dir, const DatasetLayout& layout) {
  const auto& vocab = d.vocabulary();
  write_triples_tsv(dir / layout.train, vocab, d.train());
  write_triples_tsv(dir / layout.dev, vocab, d.dev());
  write_triples_tsv(dir / layout.test, vocab, d.test());
  write_dictionaries(vocab, dir, layout);
}

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

struct Header {
  ModelKind kind;
  std::uint64_t num_entities, num_relations, entity_dim, relation_dim;
  std::uint32_t norm, width;
  std::size_t payload_offset;
};

Header read_header(const std::string& bytes, const fs::path& path) {
  auto need = [&](std::size_t end) {
    if (bytes.size() < end) throw Error(ErrorCode::LengthMismatch, path.string() + ": truncated header");
  };
  if (bytes.size() < 4 || std::string_view(bytes.data(), 4) != kCheckpointMagic) {
    throw Error(ErrorCode::BadMagic, path.string() + " is not a KGE1 checkpoint");
  }
  need(8);
  const auto tag_len = get_le<std::uint32_t>(bytes.data() + 4);
  need(8 + std::size_t{tag_len} + 40);
  Header h{};
  h.kind = parse_model_tag(std::string_view(bytes.data() + 8, tag_len));
  const char* p = bytes.data() + 8 + tag_len;
  h.num_entities = get_le<std::uint64_t>(p);
  h.num_relations = get_le<std::uint64_t>(p + 8);
  h.entity_dim = get_le<std::uint64_t>(p + 16);
  h.relation_dim = get_le<std::uint64_t>(p + 24);
  h.norm = get_le<std::uint32_t>(p + 32);
  h.width = get_le<std::uint32_t>(p + 36);
  h.payload_offset = 8 + tag_len + 40;
  if (h.width != 4 && h.width != 8) {
    throw Error(ErrorCode::BadMagic, path.string() + ": scalar width " + std::to_string(h.width) + " is neither 4 nor 8");
  }
  return h;
}

template <typename Real>
ModelParams<Real> read_payload(const std::string& bytes, const Header& h, const fs::path& path) {
  auto params = make_params<Real>(h.kind, h.num_entities, h.num_relations, {h.entity_dim, h.relation_dim},
                                  static_cast<int>(h.norm));
  std::size_t expected = h.payload_offset;
  for (Slot slot : model_slots(h.kind)) expected += params.tensor(slot).size() * sizeof(Real);
  if (bytes.size() != expected) {
    throw Error(ErrorCode::LengthMismatch, path.string() + ": header declares " + std::to_string(expected) +
                                               " bytes, file has " + std::to_string(bytes.size()));
  }
  const char* p = bytes.data() + h.payload_offset;
  for (Slot slot : model_slots(h.kind)) {
    for (Real& v : params.tensor(slot).values()) {
      v = get_le<Real>(p);
      p += sizeof(Real);
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, path.string() + ": non-finite value in " + std::string(slot_name(slot)));
      }
    }
  }
  return params;
}

template <typename To, typename From>
ModelParams<To> convert(const ModelParams<From>& in) {
  auto out = make_params<To>(in.kind, in.num_entities, in.num_relations, in.dims, in.norm);
  for (Slot slot : model_slots(in.kind)) {
    const auto src = in.tensor(slot).values();
    auto dst = out.tensor(slot).values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<To>(src[i]);
  }
  return out;
}

}  // namespace

template <typename Real>
void write_checkpoint(const ModelParams<Real>& params, const fs::path& path) {
  check_shapes(params);
  std::string bytes(kCheckpointMagic);
  const auto tag = model_tag(params.kind);
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(tag.size()));
  bytes.append(tag);
  put_le<std::uint64_t>(bytes, params.num_entities);
  put_le<std::uint64_t>(bytes, params.num_relations);
  put_le<std::uint64_t>(bytes, params.dims.entity_dim);
  put_le<std::uint64_t>(bytes, params.dims.relation_dim);
  put_le<std::uint32_t>(bytes, static_cast<std::uint32_t>(params.norm));
  put_le<std::uint32_t>(bytes, sizeof(Real));
  for (Slot slot : model_slots(params.kind)) {
    for (Real v : params.tensor(slot).values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "refusing to write a non-finite value in " + std::string(slot_name(slot)));
      }
      put_le<Real>(bytes, v);
    }
  }
  write_file(path, bytes);
}

AnyParams read_checkpoint(const fs::path& path) {
  const auto bytes = read_file(path);
  const auto header = read_header(bytes, path);
  if (header.width == 4) return read_payload<float>(bytes, header, path);
  return read_payload<double>(bytes, header, path);
}

template <typename Real>
ModelParams<Real> read_checkpoint_as(const fs::path& path) {
  auto any = read_checkpoint(path);
  if (auto* same = std::get_if<ModelParams<Real>>(&any)) return std::move(*same);
  return std::visit([](const auto& p) { return convert<Real>(p); }, any);
}

template void write_checkpoint<float>(const ModelParams<float>&, const fs::path&);
template void write_checkpoint<double>(const ModelParams<double>&, const fs::path&);
template ModelParams<float> read_checkpoint_as<float>(const fs::path&);
template ModelParams<double> read_checkpoint_as<double>(const fs::path&);

nlohmann::json report_to_json(const EvalReport& report) {
  if (report.num_ranks() == 0) throw Error(ErrorCode::EmptyReport, "report has no ranks");
  nlohmann::json doc = nlohmann::json::object();
  for (int k : {1, 3, 10}) doc["hits" + std::to_string(k)] = nullptr;
  for (const auto& [k, value] : report.hits) doc["hits" + std::to_string(k)] = value;
  for (int k : {1, 3, 10}) {
    if (doc["hits" + std::to_string(k)].is_null()) doc.erase("hits" + std::to_string(k));
  }
  doc["mr"] = report.mr;
  doc["mrr"] = report.mrr;
  doc["protocol"] = std::string(to_string(report.protocol));
  doc["sides"] = std::string(to_string(report.sides));
  doc["n_test"] = report.n_test;
  return doc;
}

void write_report(const EvalReport& report, const fs::path& path) { write_json(report_to_json(report), path); }

nlohmann::json read_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::json& doc, const fs::path& path) { write_file(path, doc.dump(2) + "\n"); }

namespace {

template <typename T>
T json_value(const nlohmann::json& value, const std::string& key) {
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
        throw Error(ErrorCode::InvalidConfig, key + " must be a non-negative integer");
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw Error(ErrorCode::InvalidConfig, key + " must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw Error(ErrorCode::InvalidConfig, key + " must be a number");
    } else {
      if (!value.is_string()) throw Error(ErrorCode::InvalidConfig, key + " must be a string");
    }
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, key + ": " + e.what());
  }
}

}  // namespace

TrainConfig apply_train_config(TrainConfig cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "train config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    auto optional_size = [&](std::optional<std::size_t>& field) {
      if (value.is_null()) {
        field.reset();
      } else {
        field = json_value<std::size_t>(value, key);
      }
    };
    if (key == "model") cfg.model = parse_model_tag(json_value<std::string>(value, key));
    else if (key == "num_batches") {
      optional_size(cfg.num_batches);
      if (cfg.num_batches) cfg.batch_size.reset();
    } else if (key == "batch_size") {
      optional_size(cfg.batch_size);
      if (cfg.batch_size) cfg.num_batches.reset();
    }
    else if (key == "epochs") cfg.epochs = json_value<std::size_t>(value, key);
    else if (key == "learning_rate") cfg.learning_rate = json_value<double>(value, key);
    else if (key == "entity_dim") cfg.entity_dim = json_value<std::size_t>(value, key);
    else if (key == "relation_dim") cfg.relation_dim = json_value<std::size_t>(value, key);
    else if (key == "optimizer") cfg.optimizer = parse_optimizer(json_value<std::string>(value, key));
    else if (key == "loss") cfg.loss = parse_loss(json_value<std::string>(value, key));
    else if (key == "margin") cfg.margin = json_value<double>(value, key);
    else if (key == "reg_lambda") cfg.reg_lambda = json_value<double>(value, key);
    else if (key == "label_smoothing") cfg.label_smoothing = json_value<double>(value, key);
    else if (key == "input_dropout") cfg.input_dropout = json_value<double>(value, key);
    else if (key == "hidden_dropout1") cfg.hidden_dropout1 = json_value<double>(value, key);
    else if (key == "hidden_dropout2") cfg.hidden_dropout2 = json_value<double>(value, key);
    else if (key == "negatives") cfg.negatives = json_value<std::size_t>(value, key);
    else if (key == "corruption") cfg.corruption = parse_corruption(json_value<std::string>(value, key));
    else if (key == "seed") cfg.seed = json_value<std::uint64_t>(value, key);
    else if (key == "norm") cfg.norm = json_value<int>(value, key);
    else if (key == "workers") cfg.workers = json_value<std::size_t>(value, key);
    else throw Error(ErrorCode::InvalidConfig, "unknown train config key '" + key + "'");
  }
  return cfg;
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  nlohmann::json doc;
  doc["model"] = std::string(model_tag(cfg.model));
  doc["num_batches"] = cfg.num_batches ? nlohmann::json(*cfg.num_batches) : nlohmann::json(nullptr);
  doc["batch_size"] = cfg.batch_size ? nlohmann::json(*cfg.batch_size) : nlohmann::json(nullptr);
  doc["epochs"] = cfg.epochs;
  doc["learning_rate"] = cfg.learning_rate;
  doc["entity_dim"] = cfg.entity_dim;
  doc["relation_dim"] = cfg.relation_dim;
  doc["optimizer"] = std::string(to_string(cfg.optimizer));
  doc["loss"] = std::string(to_string(cfg.loss));
  doc["margin"] = cfg.margin;
  doc["reg_lambda"] = cfg.reg_lambda;
  doc["label_smoothing"] = cfg.label_smoothing;
  doc["input_dropout"] = cfg.input_dropout;
  doc["hidden_dropout1"] = cfg.hidden_dropout1;
  doc["hidden_dropout2"] = cfg.hidden_dropout2;
  doc["negatives"] = cfg.negatives;
  doc["corruption"] = std::string(to_string(cfg.corruption));
  doc["seed"] = cfg.seed;
  doc["norm"] = cfg.norm;
  doc["workers"] = cfg.workers;
  return doc;
}

SamplerConfig apply_sampler_config(SamplerConfig cfg, const nlohmann::json& doc, const Vocabulary& vocab) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "sampler config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "relation_allowlist") {
      if (!value.is_array()) throw Error(ErrorCode::InvalidConfig, "relation_allowlist must be an array of labels");
      cfg.relation_allowlist.clear();
      for (const auto& item : value) {
        const auto label = json_value<std::string>(item, key);
        const auto id = vocab.find_relation(label);
        if (!id) throw Error(ErrorCode::UnknownLabel, "allowlisted relation '" + label + "' does not occur in the input");
        cfg.relation_allowlist.push_back(*id);
      }
    }
    else if (key == "min_relation_frequency") cfg.min_relation_frequency = json_value<std::size_t>(value, key);
    else if (key == "head_quantile") cfg.head_quantile = json_value<double>(value, key);
    else if (key == "alpha_head") cfg.alpha_head = json_value<double>(value, key);
    else if (key == "alpha_tail") cfg.alpha_tail = json_value<double>(value, key);
    else if (key == "alpha") cfg.alpha = json_value<double>(value, key);
    else if (key == "dev_size") cfg.dev_size = json_value<std::size_t>(value, key);
    else if (key == "test_size") cfg.test_size = json_value<std::size_t>(value, key);
    else if (key == "seed") cfg.seed = json_value<std::uint64_t>(value, key);
    else throw Error(ErrorCode::InvalidConfig, "unknown sampler config key '" + key + "'");
  }
  return cfg;
}

}  // namespace kgbench
