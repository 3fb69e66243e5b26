#include "kgbench/cli.hpp"

#include <fmt/core.h>

#include <charconv>
#include <cstdlib>
#include <ostream>
#include <variant>

#include "CLI11.hpp"
#include "kgbench/error.hpp"
#include "kgbench/eval.hpp"
#include "kgbench/io.hpp"
#include "kgbench/log.hpp"
#include "kgbench/ontology.hpp"
#include "kgbench/sampler.hpp"
#include "kgbench/training.hpp"

namespace kgbench::cli {
namespace {

struct BuildArgs {
  std::string triples;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, alpha_head, alpha_tail, head_quantile;
  std::optional<std::size_t> dev_size, test_size, min_frequency;
  std::vector<std::string> allow;
};

struct ValidateArgs {
  std::string schema;
  std::string data;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string model;
  std::string preset;
  std::string config;
  std::string out;
  std::string loss_csv;
  std::string precision = "float";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs, dim, num_batches, batch_size;
  std::optional<double> lr;
  std::size_t log_every = 10;
};

struct EvalArgs {
  std::string data;
  std::string ckpt;
  std::string protocol = "filtered";
  std::string sides = "both";
  std::string relation;
  std::vector<int> hits = {1, 3, 10};
  std::string out;
};

// Released OpenBG500 files carry a dataset prefix; everything else uses the
// plain layout written by `build`.
Dataset load_data_dir(const std::string& dir) {
  DatasetLayout layout;
  const fs::path root = dir;
  if (!fs::exists(root / layout.train) && fs::exists(root / "OpenBG500_train.tsv")) {
    layout.train = "OpenBG500_train.tsv";
    layout.dev = "OpenBG500_dev.tsv";
    layout.test = "OpenBG500_test.tsv";
  }
  return load_dataset(root, layout);
}

int run_build(const BuildArgs& a, std::ostream& out) {
  const auto raw = read_triples_tsv(a.triples);
  const auto encoded = encode_triples(raw, VocabPolicy::Grow);
  SamplerConfig cfg;
  if (!a.config.empty()) cfg = apply_sampler_config(cfg, read_json(a.config), encoded.vocabulary);
  if (a.seed) cfg.seed = *a.seed;
  if (a.alpha) cfg.alpha = *a.alpha;
  if (a.alpha_head) cfg.alpha_head = *a.alpha_head;
  if (a.alpha_tail) cfg.alpha_tail = *a.alpha_tail;
  if (a.head_quantile) cfg.head_quantile = *a.head_quantile;
  if (a.dev_size) cfg.dev_size = *a.dev_size;
  if (a.test_size) cfg.test_size = *a.test_size;
  if (a.min_frequency) cfg.min_relation_frequency = *a.min_frequency;
  if (!a.allow.empty()) {
    nlohmann::json allow = nlohmann::json::object();
    allow["relation_allowlist"] = a.allow;
    cfg = apply_sampler_config(cfg, allow, encoded.vocabulary);
  }

  const auto result = build_benchmark(encoded.triples, encoded.vocabulary, cfg);
  const fs::path dir = a.out;
  save_dataset(result.dataset, dir);

  const auto& vocab = result.dataset.vocabulary();
  std::string csv = "relation,count\n";
  for (const auto& [r, count] : result.histogram) csv += fmt::format("{},{}\n", vocab.relation_label(r), count);
  write_file(dir / "relation_histogram.csv", csv);

  const auto stats = dataset_stats(result.dataset);
  nlohmann::json audit{
      {"seed", cfg.seed},
      {"input_triples", encoded.triples.size()},
      {"relations_kept", result.relations.size()},
      {"head_relations", result.groups.head.size()},
      {"tail_relations", result.groups.tail.size()},
      {"head_entities", result.heads.size()},
      {"filtered_triples", result.filtered_triples},
      {"sampled_triples", result.sampled_triples},
      {"entities", stats.num_entities},
      {"relations", stats.num_relations},
      {"train", stats.num_train},
      {"dev", stats.num_dev},
      {"test", stats.num_test},
      {"disjoint", result.audit.disjoint},
      {"heldout_covered", result.audit.heldout_covered},
      {"unseen_dev", result.audit.unseen_dev},
      {"unseen_test", result.audit.unseen_test},
  };
  write_json(audit, dir / "audit.json");
  out << fmt::format("entities {} relations {} train {} dev {} test {}\n", stats.num_entities, stats.num_relations,
                     stats.num_train, stats.num_dev, stats.num_test);
  if (!result.audit.passed()) {
    log::write(log::Level::Error, "split audit failed; see audit.json");
    return kExitFailure;
  }
  return kExitOk;
}

int run_validate(const ValidateArgs& a, std::ostream& out) {
  const auto dataset = load_data_dir(a.data);
  Vocabulary vocab = dataset.vocabulary();
  const auto schema = parse_schema(read_json(a.schema), vocab, &dataset);

  auto report = check_taxonomy(schema);
  report.append(check_domain_range(dataset, schema));
  auto doc = to_json(report, vocab);
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& component : equivalence_closure(equivalence_pairs(dataset))) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto e : component) labels.push_back(vocab.entity_label(e));
    classes.push_back(std::move(labels));
  }
  doc["equivalence_classes"] = std::move(classes);

  if (a.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_json(doc, a.out);
  }
  if (!report.conforms()) {
    log::write(log::Level::Error, fmt::format("{} violation(s) found", report.violations.size()));
    return kExitFailure;
  }
  return kExitOk;
}

template <typename Real>
void train_and_save(const Dataset& dataset, const TrainConfig& cfg, const TrainArgs& a, std::ostream& out) {
  const std::size_t every = std::max<std::size_t>(1, a.log_every);
  std::string csv = "epoch,loss\n";
  if (a.loss_csv.empty()) out << csv;
  auto result = train<Real>(dataset, cfg, [&](std::size_t epoch, double loss) {
    const auto line = fmt::format("{},{:.9g}\n", epoch + 1, loss);
    if (a.loss_csv.empty()) {
      out << line << std::flush;
    } else {
      csv += line;
    }
    if ((epoch + 1) % every == 0 || epoch + 1 == cfg.epochs) log::info("epoch {}/{} loss {:.6f}", epoch + 1, cfg.epochs, loss);
  });
  const fs::path ckpt = a.out;
  write_checkpoint(result.params, ckpt);
  if (!a.loss_csv.empty()) write_file(a.loss_csv, csv);
  write_json(train_config_to_json(cfg), fs::path(ckpt).concat(".config.json"));
  // Dictionaries go next to the checkpoint so it can be read without the
  // data directory, unless that would touch the input files.
  const auto dir = ckpt.has_parent_path() ? ckpt.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::equivalent(dir, a.data, ec)) write_dictionaries(dataset.vocabulary(), dir);
}

int run_train(const TrainArgs& a, std::size_t workers, std::ostream& out) {
  const auto model = parse_model_tag(a.model);
  TrainConfig cfg = a.preset.empty() ? default_config(model) : preset(model, a.preset);
  if (!a.config.empty()) cfg = apply_train_config(cfg, read_json(a.config));
  cfg.model = model;
  if (a.seed) cfg.seed = *a.seed;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.dim) cfg.entity_dim = cfg.relation_dim = *a.dim;
  if (a.num_batches) {
    cfg.num_batches = a.num_batches;
    cfg.batch_size.reset();
  }
  if (a.batch_size) {
    cfg.batch_size = a.batch_size;
    cfg.num_batches.reset();
  }
  cfg.workers = workers;
  cfg.validate();

  const auto dataset = load_data_dir(a.data);
  const auto stats = dataset_stats(dataset);
  log::info("training {} on {} entities, {} relations, {} triples", model_tag(model), stats.num_entities,
            stats.num_relations, stats.num_train);
  if (a.precision == "double") {
    train_and_save<double>(dataset, cfg, a, out);
  } else {
    train_and_save<float>(dataset, cfg, a, out);
  }
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::size_t workers, std::ostream& out) {
  EvalConfig cfg;
  cfg.protocol = parse_protocol(a.protocol);
  cfg.sides = parse_sides(a.sides);
  cfg.hits = a.hits;
  cfg.workers = workers;
  cfg.validate();

  const auto dataset = load_data_dir(a.data);
  if (!a.relation.empty()) {
    const auto r = dataset.vocabulary().find_relation(a.relation);
    if (!r) throw Error(ErrorCode::UnknownLabel, "relation '" + a.relation + "' is not in the dataset");
    cfg.relation = *r;
  }
  const auto params = read_checkpoint(a.ckpt);
  const auto report = std::visit([&](const auto& p) { return evaluate(dataset, p, cfg); }, params);
  const auto doc = report_to_json(report);
  if (a.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_report(report, a.out);
  }
  return kExitOk;
}

int run_presets(bool as_json, std::ostream& out) {
  const auto presets = all_presets();
  if (as_json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : presets) {
      auto cfg = train_config_to_json(p.config);
      cfg["dataset"] = p.dataset;
      doc.push_back(std::move(cfg));
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << fmt::format("{:<12} {:<9} {:>8} {:>10} {:>7} {:>8} {:>5} {:<9} {}\n", "dataset", "model", "batches",
                     "batch_size", "epochs", "lr", "dim", "optimizer", "loss");
  for (const auto& p : presets) {
    const auto& c = p.config;
    out << fmt::format("{:<12} {:<9} {:>8} {:>10} {:>7} {:>8} {:>5} {:<9} {}\n", p.dataset, model_tag(p.model),
                       c.num_batches ? std::to_string(*c.num_batches) : "-",
                       c.batch_size ? std::to_string(*c.batch_size) : "-", c.epochs, c.learning_rate, c.entity_dim,
                       to_string(c.optimizer), to_string(c.loss));
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-graph benchmark builder, validator, trainer and evaluator"};
  app.name("kgbench");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  std::size_t workers = 1;
  bool quiet = false;
  bool verbose = false;
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads (env KGBENCH_WORKERS); 1 is the deterministic reference")
                          ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", quiet, "Only warnings and errors on stderr");
  app.add_flag("-v,--verbose", verbose, "Debug output on stderr");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Sample a benchmark from a full triple file");
  build_cmd->add_option("--full,--triples", build.triples, "Full KG as head<TAB>relation<TAB>tail")->required();
  build_cmd->add_option("--out", build.out, "Output directory")->required();
  build_cmd->add_option("--config", build.config, "Sampler config JSON");
  build_cmd->add_option("--seed", build.seed, "Sampling seed (default 42)");
  build_cmd->add_option("--alpha", build.alpha, "Triple sampling rate");
  build_cmd->add_option("--alpha-head", build.alpha_head, "Head-entity rate for head-relations");
  build_cmd->add_option("--alpha-tail", build.alpha_tail, "Head-entity rate for tail-relations");
  build_cmd->add_option("--head-quantile", build.head_quantile, "Relation frequency quantile q");
  build_cmd->add_option("--dev-size", build.dev_size, "Dev triples");
  build_cmd->add_option("--test-size", build.test_size, "Test triples");
  build_cmd->add_option("--min-frequency", build.min_frequency, "Minimum relation frequency");
  build_cmd->add_option("--allow", build.allow, "Relation allowlist (repeatable)");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a dataset against an ontology schema");
  validate_cmd->add_option("--schema", validate.schema, "Schema JSON")->required();
  validate_cmd->add_option("--data", validate.data, "Dataset directory")->required();
  validate_cmd->add_option("--out", validate.out, "Report JSON (default: stdout)");

  TrainArgs trainer;
  auto* train_cmd = app.add_subcommand("train", "Train an embedding model");
  train_cmd->add_option("--data", trainer.data, "Dataset directory")->required();
  train_cmd->add_option("--model", trainer.model, "transe|transh|transd|distmult|complex|tucker")->required();
  train_cmd->add_option("--out", trainer.out, "Checkpoint path")->required();
  train_cmd->add_option("--loss-csv", trainer.loss_csv, "Per-epoch loss CSV (default: stdout)");
  train_cmd->add_option("--preset", trainer.preset, "openbg-img|openbg500|openbg500-l");
  train_cmd->add_option("--config", trainer.config, "Train config JSON applied over the defaults");
  train_cmd->add_option("--seed", trainer.seed, "Training seed (default 42)");
  train_cmd->add_option("--epochs", trainer.epochs);
  train_cmd->add_option("--lr", trainer.lr);
  train_cmd->add_option("--dim", trainer.dim, "Entity and relation dimension");
  train_cmd->add_option("--num-batches", trainer.num_batches);
  train_cmd->add_option("--batch-size", trainer.batch_size);
  train_cmd->add_option("--precision", trainer.precision)->check(CLI::IsMember({"float", "double"}));
  train_cmd->add_option("--log-every", trainer.log_every, "Epochs between progress lines");

  EvalArgs evaluation;
  auto* eval_cmd = app.add_subcommand("eval", "Rank test triples and report Hits@K, MR, MRR");
  eval_cmd->add_option("--data", evaluation.data, "Dataset directory")->required();
  eval_cmd->add_option("--ckpt", evaluation.ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--protocol", evaluation.protocol)->check(CLI::IsMember({"raw", "filtered"}));
  eval_cmd->add_option("--sides", evaluation.sides)->check(CLI::IsMember({"tail", "both"}));
  eval_cmd->add_option("--relation", evaluation.relation, "Only test triples with this relation");
  eval_cmd->add_option("--hits", evaluation.hits, "Hits@K cutoffs")->delimiter(',');
  eval_cmd->add_option("--out", evaluation.out, "Report JSON (default: stdout)");

  bool presets_json = false;
  auto* presets_cmd = app.add_subcommand("presets", "List published hyperparameter presets");
  presets_cmd->add_flag("--json", presets_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  // Read by hand: CLI11 silently drops environment values that fail a check.
  if (const char* env = std::getenv("KGBENCH_WORKERS"); env != nullptr && workers_opt->count() == 0) {
    const std::string_view text(env);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), workers);
    if (ec != std::errc{} || end != text.data() + text.size() || workers == 0) {
      err << "kgbench: KGBENCH_WORKERS must be a positive integer, got '" << text << "'\n";
      return kExitUsage;
    }
  }

  log::set_level(quiet ? log::Level::Warn : verbose ? log::Level::Debug : log::Level::Info);
  try {
    if (build_cmd->parsed()) return run_build(build, out);
    if (validate_cmd->parsed()) return run_validate(validate, out);
    if (train_cmd->parsed()) return run_train(trainer, workers, out);
    if (eval_cmd->parsed()) return run_eval(evaluation, workers, out);
    if (presets_cmd->parsed()) return run_presets(presets_json, out);
  } catch (const Error& e) {
    err << "kgbench: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "kgbench: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace kgbench::cli
