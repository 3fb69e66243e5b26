#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgbench/core.hpp"
#include "kgbench/models.hpp"
#include "kgbench/rng.hpp"

namespace kgbench {

enum class OptimizerKind { SGD, AdaGrad };
enum class LossKind { MarginRanking, Logistic, BCE1toN };
enum class CorruptionScheme { UniformHeadOrTail, Bernoulli };

std::string_view to_string(OptimizerKind kind);
std::string_view to_string(LossKind kind);
std::string_view to_string(CorruptionScheme scheme);
OptimizerKind parse_optimizer(std::string_view text);
LossKind parse_loss(std::string_view text);
CorruptionScheme parse_corruption(std::string_view text);

struct TrainConfig {
  ModelKind model = ModelKind::TransE;
  // Exactly one of these is set. num_batches means batches per epoch.
  std::optional<std::size_t> num_batches;
  std::optional<std::size_t> batch_size;
  std::size_t epochs = 1000;
  double learning_rate = 0.5;
  std::size_t entity_dim = 200;
  std::size_t relation_dim = 200;
  OptimizerKind optimizer = OptimizerKind::SGD;
  LossKind loss = LossKind::MarginRanking;
  double margin = 1.0;
  double reg_lambda = 1e-5;
  double label_smoothing = 0.1;
  double input_dropout = 0.3;
  double hidden_dropout1 = 0.4;
  double hidden_dropout2 = 0.5;
  std::size_t negatives = 1;
  CorruptionScheme corruption = CorruptionScheme::UniformHeadOrTail;
  std::uint64_t seed = 42;
  int norm = 2;
  std::size_t workers = 1;

  // Throws InvalidConfig.
  void validate() const;
};

// Defaults for a model: loss pairing, optimizer and regularisation conventions.
TrainConfig default_config(ModelKind model);

// Published hyperparameters for (model, dataset); dataset tags are
// openbg-img, openbg500 and openbg500-l. Throws UnknownPreset.
TrainConfig preset(ModelKind model, std::string_view dataset_tag);

struct PresetEntry {
  std::string dataset;
  ModelKind model;
  TrainConfig config;
};
std::vector<PresetEntry> all_presets();

// Per-relation probability of corrupting the head: tph / (tph + hpt).
class BernoulliTable {
 public:
  BernoulliTable() = default;
  BernoulliTable(std::span<const Triple> train, std::size_t num_relations);
  double head_probability(RelationId r) const;

 private:
  std::vector<double> head_prob_;
};

// Draws corrupted triples that are absent from a known-triple index.
class NegativeSampler {
 public:
  static constexpr int kRetryCap = 100;

  NegativeSampler(const TripleIndex& known, std::size_t num_entities, CorruptionScheme scheme,
                  BernoulliTable bernoulli = {});

  // Replaces one side of `t` with a different entity; retries up to kRetryCap
  // times to avoid known triples, then accepts the collision. Throws
  // ExhaustedCandidates when fewer than two entities exist.
  Triple corrupt(const Triple& t, Side side, CounterRng& rng) const;

  // Throws InvalidK for k == 0.
  std::vector<Triple> sample(const Triple& t, std::size_t k, CounterRng& rng) const;

  std::size_t collisions() const { return collisions_; }
  void reset_collisions() { collisions_ = 0; }

 private:
  const TripleIndex* known_;
  std::size_t num_entities_;
  CorruptionScheme scheme_;
  BernoulliTable bernoulli_;
  mutable std::size_t collisions_ = 0;
};

std::vector<Triple> sample_negatives(const Triple& t, std::size_t k, CorruptionScheme scheme, const TripleIndex& known,
                                     std::size_t num_entities, CounterRng& rng, const BernoulliTable& bernoulli = {});

// Inputs beyond the batch itself. `known` supplies 1-N labels for BCE1toN;
// (seed, step) key the dropout masks so a call is a pure function.
struct LossContext {
  const TripleIndex* known = nullptr;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::size_t workers = 1;
};

template <typename Real>
struct LossResult {
  double loss = 0;
  SparseGradient<Real> grads;
};

// Loss over a batch and its gradient w.r.t. every touched row. negatives holds
// cfg.negatives entries per positive, grouped by positive (ignored by BCE1toN).
//   MarginRanking: sum max(0, margin - f(pos) + f(neg))
//   Logistic:      sum softplus(-f(pos)) + sum softplus(f(neg)) + reg_lambda * sum_rows |row|^2
//   BCE1toN:       per positive, a tail query (h, r, ?) and a head query (?, r, t),
//                  each summing sigmoid cross-entropy over all entities with
//                  labels (1 - eps) y + 1/|E|.
template <typename Real>
LossResult<Real> loss_and_grads(std::span<const Triple> positives, std::span<const Triple> negatives,
                                const ModelParams<Real>& params, const TrainConfig& cfg, const LossContext& ctx);

template <typename Real>
struct OptimizerState {
  // AdaGrad squared-gradient sums, same shape as the parameter tensors.
  std::vector<std::pair<Slot, Matrix<Real>>> accumulators;

  static OptimizerState for_params(const ModelParams<Real>& params, OptimizerKind kind);
  Matrix<Real>* accumulator(Slot slot);
};

inline constexpr double kAdaGradEpsilon = 1e-8;

// Applies one SGD or AdaGrad update and re-projects the touched rows. Throws
// NonFiniteGradient before touching anything if a gradient value is NaN/Inf.
template <typename Real>
void optimizer_step(ModelParams<Real>& params, const SparseGradient<Real>& grads, OptimizerState<Real>& state,
                    const TrainConfig& cfg);

std::size_t effective_batch_size(const TrainConfig& cfg, std::size_t num_train);

template <typename Real>
struct TrainResult {
  ModelParams<Real> params;
  // Mean loss per training triple, one entry per epoch.
  std::vector<double> loss_curve;
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

template <typename Real>
TrainResult<Real> train(const Dataset& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace kgbench
