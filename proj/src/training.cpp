#include "kgbench/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "kgbench/error.hpp"
#include "kgbench/log.hpp"
#include "parallel.hpp"

namespace kgbench {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::SGD ? "sgd" : "adagrad"; }

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::MarginRanking: return "margin";
    case LossKind::Logistic: return "logistic";
    case LossKind::BCE1toN: return "bce1ton";
  }
  return "?";
}

std::string_view to_string(CorruptionScheme scheme) {
  return scheme == CorruptionScheme::UniformHeadOrTail ? "uniform" : "bernoulli";
}

OptimizerKind parse_optimizer(std::string_view text) {
  if (text == "sgd") return OptimizerKind::SGD;
  if (text == "adagrad") return OptimizerKind::AdaGrad;
  throw Error(ErrorCode::InvalidConfig, "unknown optimizer '" + std::string(text) + "'");
}

LossKind parse_loss(std::string_view text) {
  for (auto k : {LossKind::MarginRanking, LossKind::Logistic, LossKind::BCE1toN}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown loss '" + std::string(text) + "'");
}

CorruptionScheme parse_corruption(std::string_view text) {
  if (text == "uniform") return CorruptionScheme::UniformHeadOrTail;
  if (text == "bernoulli") return CorruptionScheme::Bernoulli;
  throw Error(ErrorCode::InvalidConfig, "unknown corruption scheme '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (num_batches.has_value() == batch_size.has_value()) fail("set exactly one of num_batches and batch_size");
  if ((num_batches && *num_batches == 0) || (batch_size && *batch_size == 0)) fail("batch counts must be positive");
  // lr == 0 is allowed: it freezes the parameters.
  if (!std::isfinite(learning_rate) || learning_rate < 0) fail("learning_rate must be finite and >= 0");
  if (entity_dim == 0 || relation_dim == 0) fail("dimensions must be positive");
  if (!(margin >= 0)) fail("margin must be >= 0");
  if (!(reg_lambda >= 0)) fail("reg_lambda must be >= 0");
  if (!(label_smoothing >= 0 && label_smoothing < 1)) fail("label_smoothing must lie in [0, 1)");
  for (double p : {input_dropout, hidden_dropout1, hidden_dropout2}) {
    if (!(p >= 0 && p < 1)) fail("dropout rates must lie in [0, 1)");
  }
  if (negatives == 0) fail("negatives must be >= 1");
  if (norm != 1 && norm != 2) fail("norm must be 1 or 2");
  if (workers == 0) fail("workers must be >= 1");
}

TrainConfig default_config(ModelKind model) {
  TrainConfig cfg;
  cfg.model = model;
  cfg.num_batches = 100;
  switch (model) {
    case ModelKind::TransE:
    case ModelKind::TransH:
    case ModelKind::TransD:
      cfg.loss = LossKind::MarginRanking;
      cfg.optimizer = OptimizerKind::SGD;
      break;
    case ModelKind::DistMult:
    case ModelKind::ComplEx:
      cfg.loss = LossKind::Logistic;
      cfg.optimizer = OptimizerKind::AdaGrad;
      break;
    case ModelKind::TuckER:
      cfg.loss = LossKind::BCE1toN;
      cfg.optimizer = OptimizerKind::AdaGrad;
      break;
  }
  return cfg;
}

namespace {

struct PresetRow {
  const char* dataset;
  ModelKind model;
  std::size_t num_batches;  // 0 when the row gives a batch size
  std::size_t batch_size;
  std::size_t epochs;
  double learning_rate;
};

// Published baseline hyperparameters; embedding dimension is 200 throughout.
constexpr PresetRow kPresets[] = {
    {"openbg-img", ModelKind::TransE, 100, 0, 1000, 0.5},
    {"openbg-img", ModelKind::TransH, 100, 0, 1000, 0.5},
    {"openbg-img", ModelKind::TransD, 100, 0, 1000, 1.0},
    {"openbg-img", ModelKind::DistMult, 100, 0, 1000, 0.5},
    {"openbg-img", ModelKind::ComplEx, 100, 0, 1000, 0.5},
    {"openbg-img", ModelKind::TuckER, 0, 200, 500, 5e-4},
    {"openbg500", ModelKind::TransE, 100, 0, 1000, 0.5},
    {"openbg500", ModelKind::TransH, 100, 0, 1000, 0.5},
    {"openbg500", ModelKind::TransD, 100, 0, 1000, 1.0},
    {"openbg500", ModelKind::DistMult, 100, 0, 1000, 0.5},
    {"openbg500", ModelKind::ComplEx, 100, 0, 1000, 0.5},
    {"openbg500", ModelKind::TuckER, 0, 200, 500, 5e-4},
    {"openbg500-l", ModelKind::TransE, 500, 0, 100, 0.5},
    {"openbg500-l", ModelKind::TransH, 1000, 0, 1000, 0.5},
    {"openbg500-l", ModelKind::TransD, 1000, 0, 1000, 1.0},
    {"openbg500-l", ModelKind::DistMult, 500, 0, 200, 0.5},
    {"openbg500-l", ModelKind::ComplEx, 1500, 0, 200, 0.5},
};

TrainConfig from_row(const PresetRow& row) {
  TrainConfig cfg = default_config(row.model);
  cfg.num_batches.reset();
  if (row.num_batches > 0) {
    cfg.num_batches = row.num_batches;
  } else {
    cfg.batch_size = row.batch_size;
  }
  cfg.epochs = row.epochs;
  cfg.learning_rate = row.learning_rate;
  cfg.entity_dim = cfg.relation_dim = 200;
  return cfg;
}

}  // namespace

TrainConfig preset(ModelKind model, std::string_view dataset_tag) {
  for (const auto& row : kPresets) {
    if (row.model == model && dataset_tag == row.dataset) return from_row(row);
  }
  throw Error(ErrorCode::UnknownPreset,
              "no preset for (" + std::string(model_tag(model)) + ", " + std::string(dataset_tag) + ")");
}

std::vector<PresetEntry> all_presets() {
  std::vector<PresetEntry> out;
  for (const auto& row : kPresets) out.push_back({row.dataset, row.model, from_row(row)});
  return out;
}

BernoulliTable::BernoulliTable(std::span<const Triple> train, std::size_t num_relations)
    : head_prob_(num_relations, 0.5) {
  std::vector<std::set<std::uint32_t>> heads(num_relations), tails(num_relations);
  std::vector<std::size_t> counts(num_relations, 0);
  for (const auto& t : train) {
    heads[t.relation.value].insert(t.head.value);
    tails[t.relation.value].insert(t.tail.value);
    ++counts[t.relation.value];
  }
  for (std::size_t r = 0; r < num_relations; ++r) {
    if (counts[r] == 0) continue;
    const double tph = static_cast<double>(counts[r]) / static_cast<double>(heads[r].size());
    const double hpt = static_cast<double>(counts[r]) / static_cast<double>(tails[r].size());
    head_prob_[r] = tph / (tph + hpt);
  }
}

double BernoulliTable::head_probability(RelationId r) const {
  return r.value < head_prob_.size() ? head_prob_[r.value] : 0.5;
}

NegativeSampler::NegativeSampler(const TripleIndex& known, std::size_t num_entities, CorruptionScheme scheme,
                                 BernoulliTable bernoulli)
    : known_(&known), num_entities_(num_entities), scheme_(scheme), bernoulli_(std::move(bernoulli)) {}

Triple NegativeSampler::corrupt(const Triple& t, Side side, CounterRng& rng) const {
  if (num_entities_ < 2) throw Error(ErrorCode::ExhaustedCandidates, "need at least two entities to corrupt a triple");
  const std::uint32_t original = side == Side::Head ? t.head.value : t.tail.value;
  Triple candidate = t;
  for (int attempt = 0; attempt < kRetryCap; ++attempt) {
    // Draw from the other |E| - 1 entities so the positive is never returned.
    auto e = static_cast<std::uint32_t>(rng.below(num_entities_ - 1));
    if (e >= original) ++e;
    (side == Side::Head ? candidate.head : candidate.tail) = EntityId{e};
    if (!known_->contains(candidate)) return candidate;
  }
  ++collisions_;
  return candidate;
}

std::vector<Triple> NegativeSampler::sample(const Triple& t, std::size_t k, CounterRng& rng) const {
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be >= 1");
  std::vector<Triple> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double p_head =
        scheme_ == CorruptionScheme::Bernoulli ? bernoulli_.head_probability(t.relation) : 0.5;
    const Side side = rng.bernoulli(p_head) ? Side::Head : Side::Tail;
    out.push_back(corrupt(t, side, rng));
  }
  return out;
}

std::vector<Triple> sample_negatives(const Triple& t, std::size_t k, CorruptionScheme scheme, const TripleIndex& known,
                                     std::size_t num_entities, CounterRng& rng, const BernoulliTable& bernoulli) {
  NegativeSampler sampler(known, num_entities, scheme, bernoulli);
  auto out = sampler.sample(t, k, rng);
  if (sampler.collisions() > 0) log::warn("{} negatives collide with known triples", sampler.collisions());
  return out;
}

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename Real>
struct Contribution {
  double loss = 0;
  SparseGradient<Real> grads;
};

// Inverted-dropout mask: 0 or 1/(1-p) per entry.
template <typename Real>
std::vector<Real> dropout_mask(std::size_t n, double p, CounterRng& rng) {
  std::vector<Real> mask(n, Real{1});
  if (p <= 0) return mask;
  const Real keep = static_cast<Real>(1.0 / (1.0 - p));
  for (auto& m : mask) m = rng.uniform() < p ? Real{0} : keep;
  return mask;
}

std::vector<double> smoothed_labels(std::size_t num_entities, std::span<const EntityId> positives, double eps) {
  std::vector<double> labels(num_entities, 1.0 / static_cast<double>(num_entities));
  for (auto e : positives) labels[e.value] += 1.0 - eps;
  return labels;
}

// One TuckER 1-N query with dropout. `side` is the side being predicted.
template <typename Real>
void tucker_query(const ModelParams<Real>& params, const Triple& t, Side side, std::span<const double> labels,
                  const TrainConfig& cfg, CounterRng& rng, Contribution<Real>& out) {
  const std::size_t de = params.dims.entity_dim;
  const std::size_t dr = params.dims.relation_dim;
  const std::size_t n = params.num_entities;
  const auto w = params.core.values();
  const auto r = params.relation.row(t.relation.value);
  const EntityId given = side == Side::Tail ? t.head : t.tail;
  const auto e_given = params.entity.row(given.value);

  const auto mask0 = dropout_mask<Real>(de, cfg.input_dropout, rng);
  const auto mask1 = dropout_mask<Real>(de * de, cfg.hidden_dropout1, rng);
  const auto mask2 = dropout_mask<Real>(de, cfg.hidden_dropout2, rng);

  // M[i][k] = sum_j W_ijk r_j, then dropout.
  std::vector<Real> m(de * de, Real{0});
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t j = 0; j < dr; ++j) {
      const Real* slice = w.data() + (i * dr + j) * de;
      for (std::size_t k = 0; k < de; ++k) m[i * de + k] += r[j] * slice[k];
    }
  }
  std::vector<Real> md(de * de);
  for (std::size_t i = 0; i < de * de; ++i) md[i] = m[i] * mask1[i];
  std::vector<Real> in(de);
  for (std::size_t i = 0; i < de; ++i) in[i] = e_given[i] * mask0[i];

  // Tail query: x_k = sum_i in_i Md_ik. Head query: x_i = sum_k Md_ik in_k.
  std::vector<Real> x(de, Real{0});
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t k = 0; k < de; ++k) {
      if (side == Side::Tail) {
        x[k] += in[i] * md[i * de + k];
      } else {
        x[i] += md[i * de + k] * in[k];
      }
    }
  }
  std::vector<Real> xd(de);
  for (std::size_t k = 0; k < de; ++k) xd[k] = x[k] * mask2[k];

  std::vector<Real> gx(de, Real{0});
  for (std::size_t e = 0; e < n; ++e) {
    const auto row = params.entity.row(e);
    double s = 0;
    for (std::size_t k = 0; k < de; ++k) s += static_cast<double>(xd[k]) * row[k];
    out.loss += softplus(s) - labels[e] * s;
    const auto c = static_cast<Real>(sigmoid(s) - labels[e]);
    out.grads.add({Slot::Entity, static_cast<std::uint32_t>(e)}, xd, c);
    for (std::size_t k = 0; k < de; ++k) gx[k] += c * row[k];
  }
  for (std::size_t k = 0; k < de; ++k) gx[k] *= mask2[k];

  std::vector<Real> gin(de, Real{0});
  std::vector<Real> gm(de * de);
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t k = 0; k < de; ++k) {
      if (side == Side::Tail) {
        gin[i] += md[i * de + k] * gx[k];
        gm[i * de + k] = in[i] * gx[k] * mask1[i * de + k];
      } else {
        gin[k] += md[i * de + k] * gx[i];
        gm[i * de + k] = gx[i] * in[k] * mask1[i * de + k];
      }
    }
  }
  for (std::size_t i = 0; i < de; ++i) gin[i] *= mask0[i];
  out.grads.add({Slot::Entity, given.value}, gin);

  std::vector<Real> gr(dr, Real{0});
  auto gw = out.grads.row({Slot::Core, 0}, w.size());
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t j = 0; j < dr; ++j) {
      const std::size_t base = (i * dr + j) * de;
      Real acc = 0;
      for (std::size_t k = 0; k < de; ++k) {
        acc += w[base + k] * gm[i * de + k];
        gw[base + k] += gm[i * de + k] * r[j];
      }
      gr[j] += acc;
    }
  }
  out.grads.add({Slot::Relation, t.relation.value}, gr);
}

// Generic 1-N query through score_candidates / accumulate_score_grad.
template <typename Real>
void generic_query(const ModelParams<Real>& params, const Triple& t, Side side, std::span<const double> labels,
                   Contribution<Real>& out) {
  std::vector<Real> scores(params.num_entities);
  score_candidates<Real>(params, t, side, scores);
  Triple candidate = t;
  for (std::size_t e = 0; e < params.num_entities; ++e) {
    const double s = scores[e];
    out.loss += softplus(s) - labels[e] * s;
    (side == Side::Tail ? candidate.tail : candidate.head) = EntityId{static_cast<std::uint32_t>(e)};
    accumulate_score_grad(params, candidate, static_cast<Real>(sigmoid(s) - labels[e]), out.grads);
  }
}

template <typename Real>
Contribution<Real> positive_contribution(std::size_t i, std::span<const Triple> positives,
                                         std::span<const Triple> negatives, const ModelParams<Real>& params,
                                         const TrainConfig& cfg, const LossContext& ctx) {
  Contribution<Real> out;
  const Triple& pos = positives[i];
  switch (cfg.loss) {
    case LossKind::MarginRanking: {
      const double fp = score(params, pos);
      for (std::size_t j = 0; j < cfg.negatives; ++j) {
        const Triple& neg = negatives[i * cfg.negatives + j];
        const double term = cfg.margin - fp + static_cast<double>(score(params, neg));
        if (term > 0) {
          out.loss += term;
          accumulate_score_grad(params, pos, Real{-1}, out.grads);
          accumulate_score_grad(params, neg, Real{1}, out.grads);
        }
      }
      break;
    }
    case LossKind::Logistic: {
      const double fp = score(params, pos);
      out.loss += softplus(-fp);
      accumulate_score_grad(params, pos, static_cast<Real>(-sigmoid(-fp)), out.grads);
      for (std::size_t j = 0; j < cfg.negatives; ++j) {
        const Triple& neg = negatives[i * cfg.negatives + j];
        const double fn = score(params, neg);
        out.loss += softplus(fn);
        accumulate_score_grad(params, neg, static_cast<Real>(sigmoid(fn)), out.grads);
      }
      break;
    }
    case LossKind::BCE1toN: {
      const auto tail_labels =
          smoothed_labels(params.num_entities, ctx.known->tails(pos.head, pos.relation), cfg.label_smoothing);
      const auto head_labels =
          smoothed_labels(params.num_entities, ctx.known->heads(pos.relation, pos.tail), cfg.label_smoothing);
      if (params.kind == ModelKind::TuckER) {
        CounterRng rng(mix64(ctx.seed ^ mix64(ctx.step)), Stage::Dropout, static_cast<std::uint32_t>(i));
        tucker_query(params, pos, Side::Tail, tail_labels, cfg, rng, out);
        tucker_query(params, pos, Side::Head, head_labels, cfg, rng, out);
      } else {
        generic_query(params, pos, Side::Tail, tail_labels, out);
        generic_query(params, pos, Side::Head, head_labels, out);
      }
      break;
    }
  }
  return out;
}

}  // namespace

template <typename Real>
LossResult<Real> loss_and_grads(std::span<const Triple> positives, std::span<const Triple> negatives,
                                const ModelParams<Real>& params, const TrainConfig& cfg, const LossContext& ctx) {
  if (cfg.loss == LossKind::BCE1toN) {
    if (ctx.known == nullptr) throw Error(ErrorCode::InvalidConfig, "BCE1toN needs a known-triple index");
  } else if (negatives.size() != positives.size() * cfg.negatives) {
    throw Error(ErrorCode::DimMismatch, "expected " + std::to_string(cfg.negatives) + " negatives per positive");
  }

  // Per-positive contributions merged in index order: identical for any worker
  // count. Waves bound how many contributions are alive at once.
  LossResult<Real> result;
  const std::size_t wave = std::max<std::size_t>(1, ctx.workers) * 4;
  std::vector<Contribution<Real>> parts;
  for (std::size_t begin = 0; begin < positives.size(); begin += wave) {
    const std::size_t count = std::min(wave, positives.size() - begin);
    parts.assign(count, {});
    detail::parallel_for(count, ctx.workers, [&](std::size_t i) {
      parts[i] = positive_contribution(begin + i, positives, negatives, params, cfg, ctx);
    });
    for (const auto& part : parts) {
      result.loss += part.loss;
      result.grads.merge(part.grads);
    }
  }

  if (cfg.loss == LossKind::Logistic && cfg.reg_lambda > 0) {
    std::set<RowKey> rows;
    for (const auto& t : positives) {
      for (const auto& key : touched_rows(params.kind, t)) rows.insert(key);
    }
    for (const auto& t : negatives) {
      for (const auto& key : touched_rows(params.kind, t)) rows.insert(key);
    }
    for (const auto& key : rows) {
      const auto row = params.tensor(key.slot).row(key.row);
      double sq = 0;
      for (auto v : row) sq += static_cast<double>(v) * v;
      result.loss += cfg.reg_lambda * sq;
      result.grads.add(key, row, static_cast<Real>(2 * cfg.reg_lambda));
    }
  }
  return result;
}

template <typename Real>
OptimizerState<Real> OptimizerState<Real>::for_params(const ModelParams<Real>& params, OptimizerKind kind) {
  OptimizerState state;
  if (kind == OptimizerKind::AdaGrad) {
    for (Slot slot : model_slots(params.kind)) {
      const auto& m = params.tensor(slot);
      state.accumulators.emplace_back(slot, Matrix<Real>(m.rows(), m.cols()));
    }
  }
  return state;
}

template <typename Real>
Matrix<Real>* OptimizerState<Real>::accumulator(Slot slot) {
  for (auto& [s, m] : accumulators) {
    if (s == slot) return &m;
  }
  return nullptr;
}

template <typename Real>
void optimizer_step(ModelParams<Real>& params, const SparseGradient<Real>& grads, OptimizerState<Real>& state,
                    const TrainConfig& cfg) {
  for (const auto& [key, g] : grads.rows()) {
    for (auto v : g) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteGradient,
                    "non-finite gradient in " + std::string(slot_name(key.slot)) + " row " + std::to_string(key.row));
      }
    }
  }
  const auto lr = static_cast<Real>(cfg.learning_rate);
  // A zero rate must leave parameters bit-identical, so skip the re-projection too.
  const bool frozen = cfg.learning_rate == 0;
  std::vector<RowKey> touched;
  touched.reserve(grads.size());
  for (const auto& [key, g] : grads.rows()) {
    auto& tensor = params.tensor(key.slot);
    if (key.row >= tensor.rows() || g.size() != tensor.cols()) {
      throw Error(ErrorCode::DimMismatch, "gradient row does not match parameter tensor " +
                                              std::string(slot_name(key.slot)));
    }
    auto theta = tensor.row(key.row);
    if (cfg.optimizer == OptimizerKind::SGD) {
      if (frozen) continue;
      for (std::size_t i = 0; i < g.size(); ++i) theta[i] -= lr * g[i];
    } else {
      auto* acc_tensor = state.accumulator(key.slot);
      if (acc_tensor == nullptr) {
        state.accumulators.emplace_back(key.slot, Matrix<Real>(tensor.rows(), tensor.cols()));
        acc_tensor = &state.accumulators.back().second;
      }
      auto acc = acc_tensor->row(key.row);
      for (std::size_t i = 0; i < g.size(); ++i) {
        acc[i] += g[i] * g[i];
        if (!frozen) theta[i] -= lr * g[i] / (std::sqrt(acc[i]) + static_cast<Real>(kAdaGradEpsilon));
      }
    }
    touched.push_back(key);
  }
  if (!frozen) project_constraints(params, touched);
}

std::size_t effective_batch_size(const TrainConfig& cfg, std::size_t num_train) {
  if (cfg.batch_size) return *cfg.batch_size;
  const std::size_t nb = cfg.num_batches.value_or(1);
  return std::max<std::size_t>(1, (num_train + nb - 1) / nb);
}

template <typename Real>
TrainResult<Real> train(const Dataset& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  const auto& vocab = dataset.vocabulary();
  TrainResult<Real> result{init_params<Real>(cfg.model, vocab.num_entities(), vocab.num_relations(),
                                             {cfg.entity_dim, cfg.relation_dim}, cfg.seed, cfg.norm),
                           {},
                           0};
  const auto train_split = dataset.train();
  if (cfg.epochs == 0) return result;
  if (train_split.empty()) throw Error(ErrorCode::EmptyInput, "training split is empty");

  const TripleIndex known(train_split);
  NegativeSampler sampler(known, vocab.num_entities(), cfg.corruption,
                          cfg.corruption == CorruptionScheme::Bernoulli
                              ? BernoulliTable(train_split, vocab.num_relations())
                              : BernoulliTable{});
  auto state = OptimizerState<Real>::for_params(result.params, cfg.optimizer);

  const std::size_t n = train_split.size();
  const std::size_t batch = effective_batch_size(cfg, n);
  std::vector<Triple> order(train_split.begin(), train_split.end());
  std::vector<Triple> negatives;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    CounterRng shuffle_rng(cfg.seed, Stage::Shuffle, static_cast<std::uint32_t>(epoch));
    shuffle_rng.shuffle(std::span<Triple>(order));
    sampler.reset_collisions();

    double epoch_loss = 0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const auto positives = std::span<const Triple>(order).subspan(begin, std::min(batch, n - begin));
      negatives.clear();
      if (cfg.loss != LossKind::BCE1toN) {
        CounterRng neg_rng(cfg.seed, Stage::Negatives, static_cast<std::uint32_t>(result.steps));
        for (const auto& pos : positives) {
          for (const auto& neg : sampler.sample(pos, cfg.negatives, neg_rng)) negatives.push_back(neg);
        }
      }
      const LossContext ctx{&known, cfg.seed, result.steps, cfg.workers};
      auto step = loss_and_grads<Real>(positives, negatives, result.params, cfg, ctx);
      epoch_loss += step.loss;
      optimizer_step(result.params, step.grads, state, cfg);
      ++result.steps;
    }
    if (sampler.collisions() > 0) {
      log::warn("epoch {}: {} negatives accepted after {} retries", epoch, sampler.collisions(),
                NegativeSampler::kRetryCap);
    }
    const double mean = epoch_loss / static_cast<double>(n);
    result.loss_curve.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

#define KGBENCH_INSTANTIATE_TRAINING(Real)                                                                           \
  template LossResult<Real> loss_and_grads<Real>(std::span<const Triple>, std::span<const Triple>,                  \
                                                 const ModelParams<Real>&, const TrainConfig&, const LossContext&); \
  template struct OptimizerState<Real>;                                                                              \
  template void optimizer_step<Real>(ModelParams<Real>&, const SparseGradient<Real>&, OptimizerState<Real>&,        \
                                     const TrainConfig&);                                                            \
  template TrainResult<Real> train<Real>(const Dataset&, const TrainConfig&, const EpochCallback&);

KGBENCH_INSTANTIATE_TRAINING(float)
KGBENCH_INSTANTIATE_TRAINING(double)

}  // namespace kgbench
