#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "kgbench/error.hpp"
#include "kgbench/training.hpp"
#include "support/synthetic.hpp"

namespace kgbench {
namespace {

using kgbench::testing::fill_uniform;
using kgbench::testing::gradient_relative_error;

Triple T(std::uint32_t h, std::uint32_t r, std::uint32_t t) { return {EntityId{h}, RelationId{r}, EntityId{t}}; }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kgbench::Error thrown";
  return ErrorCode::Io;
}

template <typename Real>
bool bitwise_equal(const ModelParams<Real>& a, const ModelParams<Real>& b) {
  for (Slot slot : model_slots(a.kind)) {
    const auto va = a.tensor(slot).values();
    const auto vb = b.tensor(slot).values();
    if (va.size() != vb.size() || std::memcmp(va.data(), vb.data(), va.size_bytes()) != 0) return false;
  }
  return true;
}

TEST(Presets, PublishedValues) {
  const auto transe = preset(ModelKind::TransE, "openbg500");
  EXPECT_EQ(transe.num_batches, std::optional<std::size_t>(100));
  EXPECT_FALSE(transe.batch_size.has_value());
  EXPECT_EQ(transe.epochs, 1000u);
  EXPECT_EQ(transe.learning_rate, 0.5);
  EXPECT_EQ(transe.entity_dim, 200u);
  EXPECT_EQ(transe.optimizer, OptimizerKind::SGD);

  const auto transd = preset(ModelKind::TransD, "openbg500-l");
  EXPECT_EQ(transd.num_batches, std::optional<std::size_t>(1000));
  EXPECT_EQ(transd.epochs, 1000u);
  EXPECT_EQ(transd.learning_rate, 1.0);
  EXPECT_EQ(transd.entity_dim, 200u);
  EXPECT_EQ(transd.optimizer, OptimizerKind::SGD);

  const auto tucker = preset(ModelKind::TuckER, "openbg-img");
  EXPECT_EQ(tucker.batch_size, std::optional<std::size_t>(200));
  EXPECT_FALSE(tucker.num_batches.has_value());
  EXPECT_EQ(tucker.epochs, 500u);
  EXPECT_EQ(tucker.learning_rate, 5e-4);
  EXPECT_EQ(tucker.entity_dim, 200u);
}

TEST(Presets, BilinearModelsUseAdaGrad) {
  EXPECT_EQ(preset(ModelKind::DistMult, "openbg500").optimizer, OptimizerKind::AdaGrad);
  EXPECT_EQ(preset(ModelKind::ComplEx, "openbg-img").optimizer, OptimizerKind::AdaGrad);
  const auto complex_l = preset(ModelKind::ComplEx, "openbg500-l");
  EXPECT_EQ(complex_l.num_batches, std::optional<std::size_t>(1500));
  EXPECT_EQ(complex_l.epochs, 200u);
}

TEST(Presets, UnknownPairs) {
  EXPECT_EQ(code_of([] { preset(ModelKind::TuckER, "openbg500-l"); }), ErrorCode::UnknownPreset);
  EXPECT_EQ(code_of([] { preset(ModelKind::TransE, "fb15k"); }), ErrorCode::UnknownPreset);
  EXPECT_EQ(all_presets().size(), 17u);
  for (const auto& entry : all_presets()) EXPECT_NO_THROW(entry.config.validate());
}

TEST(Negatives, TailCorruptionEnumeratesTheOtherEntities) {
  // entities a=0, b=1, c=2; positive (a, r, b)
  TripleIndex known(std::vector<Triple>{T(0, 0, 1)});
  const NegativeSampler sampler(known, 3, CorruptionScheme::UniformHeadOrTail);
  CounterRng rng(1, Stage::Test, 0);
  std::set<Triple> seen;
  for (int i = 0; i < 200; ++i) seen.insert(sampler.corrupt(T(0, 0, 1), Side::Tail, rng));
  EXPECT_EQ(seen, (std::set<Triple>{T(0, 0, 0), T(0, 0, 2)}));

  known.insert(T(0, 0, 2));
  seen.clear();
  for (int i = 0; i < 200; ++i) seen.insert(sampler.corrupt(T(0, 0, 1), Side::Tail, rng));
  EXPECT_EQ(seen, (std::set<Triple>{T(0, 0, 0)}));
  EXPECT_EQ(sampler.collisions(), 0u);
}

TEST(Negatives, ZeroKIsRejected) {
  const TripleIndex known;
  CounterRng rng(1, Stage::Test, 0);
  EXPECT_EQ(code_of([&] { sample_negatives(T(0, 0, 1), 0, CorruptionScheme::UniformHeadOrTail, known, 3, rng); }),
            ErrorCode::InvalidK);
}

TEST(Negatives, SingleEntityCannotBeCorrupted) {
  const TripleIndex known;
  CounterRng rng(1, Stage::Test, 0);
  EXPECT_EQ(code_of([&] { sample_negatives(T(0, 0, 0), 1, CorruptionScheme::UniformHeadOrTail, known, 1, rng); }),
            ErrorCode::ExhaustedCandidates);
}

TEST(Negatives, AllCandidatesKnownFallsBackAfterRetries) {
  const TripleIndex known(std::vector<Triple>{T(0, 0, 1), T(0, 0, 0), T(1, 0, 1)});
  const NegativeSampler sampler(known, 2, CorruptionScheme::UniformHeadOrTail);
  CounterRng rng(1, Stage::Test, 0);
  const auto neg = sampler.corrupt(T(0, 0, 1), Side::Tail, rng);
  EXPECT_EQ(neg, T(0, 0, 0));
  EXPECT_EQ(sampler.collisions(), 1u);
}

TEST(Negatives, UniformSchemeSplitsSidesEvenly) {
  const TripleIndex known(std::vector<Triple>{T(0, 0, 1)});
  CounterRng rng(5, Stage::Test, 0);
  const auto negatives = sample_negatives(T(0, 0, 1), 10000, CorruptionScheme::UniformHeadOrTail, known, 3, rng);
  std::size_t heads = 0;
  for (const auto& n : negatives) {
    EXPECT_NE(n, T(0, 0, 1));
    EXPECT_EQ(n.relation, RelationId{0});
    const bool head_changed = n.head != EntityId{0};
    const bool tail_changed = n.tail != EntityId{1};
    EXPECT_NE(head_changed, tail_changed);
    heads += head_changed;
  }
  // Binomial(10000, 1/2): sd 50.
  EXPECT_NEAR(static_cast<double>(heads), 5000.0, 3 * 50.0);
}

TEST(Negatives, BernoulliFavoursTheManySide) {
  // One head with ten tails: tph = 10, hpt = 1, so heads are corrupted 10/11 of the time.
  std::vector<Triple> train;
  for (std::uint32_t t = 1; t <= 10; ++t) train.push_back(T(0, 0, t));
  const BernoulliTable table(train, 1);
  EXPECT_DOUBLE_EQ(table.head_probability(RelationId{0}), 10.0 / 11.0);
  EXPECT_EQ(table.head_probability(RelationId{5}), 0.5);

  const TripleIndex known(train);
  CounterRng rng(9, Stage::Test, 0);
  const auto negatives = sample_negatives(T(0, 0, 1), 11000, CorruptionScheme::Bernoulli, known, 20, rng, table);
  std::size_t heads = 0;
  for (const auto& n : negatives) heads += n.head != EntityId{0};
  const double sd = std::sqrt(11000.0 * (10.0 / 11) * (1.0 / 11));
  EXPECT_NEAR(static_cast<double>(heads), 10000.0, 4 * sd);
}

TEST(Negatives, NeverThePositiveNeverTheRelation) {
  const auto d = kgbench::testing::random_kg(3, 30, 4, 300);
  const TripleIndex known(d.train());
  CounterRng rng(2, Stage::Test, 0);
  for (const auto& t : d.train()) {
    for (const auto& n : sample_negatives(t, 5, CorruptionScheme::UniformHeadOrTail, known, 30, rng)) {
      EXPECT_NE(n, t);
      EXPECT_EQ(n.relation, t.relation);
      EXPECT_TRUE(n.head == t.head || n.tail == t.tail);
      EXPECT_FALSE(known.contains(n));
    }
  }
}

// DistMult with d = 1: entity values 1 (e0), 5 (e1), 1 (e2); relation value 1.
ModelParams<double> scalar_distmult() {
  auto p = make_params<double>(ModelKind::DistMult, 3, 1, {1, 1});
  p.entity(0, 0) = 1;
  p.entity(1, 0) = 5;
  p.entity(2, 0) = 1;
  p.relation(0, 0) = 1;
  return p;
}

TEST(Loss, SatisfiedMarginIsInactive) {
  const auto p = scalar_distmult();
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.loss = LossKind::MarginRanking;
  cfg.margin = 1;
  const std::vector<Triple> pos = {T(0, 0, 1)}, neg = {T(0, 0, 2)};  // f = 5 vs 1
  const auto result = loss_and_grads<double>(pos, neg, p, cfg, {});
  EXPECT_EQ(result.loss, 0.0);
  EXPECT_TRUE(result.grads.empty());
}

TEST(Loss, MarginBoundary) {
  const auto p = scalar_distmult();
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.loss = LossKind::MarginRanking;
  cfg.margin = 1;
  const std::vector<Triple> pos = {T(0, 0, 2)}, neg = {T(2, 0, 0)};  // f = 1 vs 1
  EXPECT_EQ(loss_and_grads<double>(pos, neg, p, cfg, {}).loss, 1.0);
}

TEST(Loss, LogisticClosedForm) {
  const auto p = scalar_distmult();
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.reg_lambda = 0.01;
  const std::vector<Triple> pos = {T(0, 0, 1)}, neg = {T(0, 0, 2)};
  // softplus(-5) + softplus(1) + 0.01 * (1 + 25 + 1 + 1)
  const double expected = std::log1p(std::exp(-5.0)) + std::log1p(std::exp(1.0)) + 0.01 * 28;
  EXPECT_NEAR(loss_and_grads<double>(pos, neg, p, cfg, {}).loss, expected, 1e-12);
}

TEST(Loss, WrongNegativeCountIsRejected) {
  const auto p = scalar_distmult();
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.negatives = 2;
  const std::vector<Triple> pos = {T(0, 0, 1)}, neg = {T(0, 0, 2)};
  EXPECT_EQ(code_of([&] { loss_and_grads<double>(pos, neg, p, cfg, {}); }), ErrorCode::DimMismatch);
}

struct LossCase {
  ModelKind model;
  LossKind loss;
};

TEST(Loss, GradientsMatchFiniteDifferences) {
  const auto d = kgbench::testing::random_kg(6, 7, 2, 30, 0.0);
  const TripleIndex known(d.train());
  const std::vector<LossCase> cases = {
      {ModelKind::TransE, LossKind::MarginRanking},   {ModelKind::TransH, LossKind::MarginRanking},
      {ModelKind::TransD, LossKind::MarginRanking},   {ModelKind::DistMult, LossKind::MarginRanking},
      {ModelKind::DistMult, LossKind::Logistic},      {ModelKind::ComplEx, LossKind::Logistic},
      {ModelKind::TransE, LossKind::Logistic},        {ModelKind::TuckER, LossKind::BCE1toN},
      {ModelKind::DistMult, LossKind::BCE1toN},       {ModelKind::ComplEx, LossKind::BCE1toN},
      {ModelKind::TuckER, LossKind::Logistic},
  };
  for (const auto& c : cases) {
    TrainConfig cfg = default_config(c.model);
    cfg.loss = c.loss;
    cfg.negatives = 2;
    cfg.margin = 3.0;  // keeps the hinge active at these scales
    cfg.reg_lambda = 0.05;
    const ModelDims dims = c.model == ModelKind::TuckER || c.model == ModelKind::TransD ? ModelDims{4, 3} : ModelDims{4, 4};
    for (std::uint64_t point = 0; point < 5; ++point) {
      auto p = make_params<double>(c.model, 7, 2, dims);
      fill_uniform(p, 40 + point, -0.5, 0.5);
      const std::vector<Triple> pos(d.train().begin(), d.train().begin() + 3);
      CounterRng rng(point, Stage::Test, 0);
      std::vector<Triple> neg;
      for (const auto& t : pos) {
        for (const auto& n : sample_negatives(t, cfg.negatives, cfg.corruption, known, 7, rng)) neg.push_back(n);
      }
      const LossContext ctx{&known, 11, point, 1};
      const auto result = loss_and_grads<double>(pos, neg, p, cfg, ctx);
      const double err = gradient_relative_error(
          p, result.grads, [&] { return loss_and_grads<double>(pos, neg, p, cfg, ctx).loss; });
      EXPECT_LT(err, 1e-5) << model_tag(c.model) << " " << to_string(c.loss) << " point " << point;
    }
  }
}

TEST(Loss, WorkerCountDoesNotChangeTheResult) {
  const auto d = kgbench::testing::random_kg(8, 20, 3, 120, 0.0);
  const TripleIndex known(d.train());
  for (ModelKind kind : kAllModels) {
    TrainConfig cfg = default_config(kind);
    const ModelDims dims = kind == ModelKind::TuckER ? ModelDims{6, 4} : ModelDims{6, 6};
    auto p = make_params<float>(kind, 20, 3, dims);
    fill_uniform(p, 2);
    CounterRng rng(1, Stage::Test, 0);
    std::vector<Triple> neg;
    for (const auto& t : d.train()) {
      for (const auto& n : sample_negatives(t, 1, cfg.corruption, known, 20, rng)) neg.push_back(n);
    }
    const auto one = loss_and_grads<float>(d.train(), neg, p, cfg, {&known, 3, 0, 1});
    const auto four = loss_and_grads<float>(d.train(), neg, p, cfg, {&known, 3, 0, 4});
    EXPECT_EQ(one.loss, four.loss) << model_tag(kind);
    EXPECT_EQ(one.grads.rows(), four.grads.rows()) << model_tag(kind);
  }
}

TEST(Optimizer, SgdOneStep) {
  auto p = make_params<double>(ModelKind::DistMult, 1, 1, {1, 1});
  p.entity(0, 0) = 1;
  SparseGradient<double> g;
  g.add({Slot::Entity, 0}, std::vector<double>{2.0});
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.optimizer = OptimizerKind::SGD;
  cfg.learning_rate = 0.1;
  auto state = OptimizerState<double>::for_params(p, cfg.optimizer);
  optimizer_step(p, g, state, cfg);
  EXPECT_DOUBLE_EQ(p.entity(0, 0), 0.8);
  EXPECT_TRUE(state.accumulators.empty());
}

TEST(Optimizer, AdaGradOneStep) {
  auto p = make_params<double>(ModelKind::DistMult, 1, 1, {1, 1});
  SparseGradient<double> g;
  g.add({Slot::Entity, 0}, std::vector<double>{3.0});
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.learning_rate = 1.0;
  auto state = OptimizerState<double>::for_params(p, OptimizerKind::AdaGrad);
  optimizer_step(p, g, state, cfg);
  EXPECT_EQ((*state.accumulator(Slot::Entity))(0, 0), 9.0);
  EXPECT_DOUBLE_EQ(p.entity(0, 0), -3.0 / (3.0 + 1e-8));
  EXPECT_NEAR(p.entity(0, 0), -1.0, 1e-8);
}

TEST(Optimizer, NonFiniteGradientLeavesParamsUntouched) {
  auto p = make_params<double>(ModelKind::DistMult, 2, 1, {2, 2});
  p.entity(0, 0) = 0.5;
  SparseGradient<double> g;
  g.add({Slot::Entity, 0}, std::vector<double>{1.0, 1.0});
  g.add({Slot::Entity, 1}, std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 0.0});
  TrainConfig cfg = default_config(ModelKind::DistMult);
  auto state = OptimizerState<double>::for_params(p, cfg.optimizer);
  EXPECT_EQ(code_of([&] { optimizer_step(p, g, state, cfg); }), ErrorCode::NonFiniteGradient);
  EXPECT_EQ(p.entity(0, 0), 0.5);
  EXPECT_EQ((*state.accumulator(Slot::Entity))(0, 0), 0.0);
}

TEST(Optimizer, StepProjectsTouchedRows) {
  auto p = make_params<double>(ModelKind::TransE, 1, 1, {2, 2});
  SparseGradient<double> g;
  g.add({Slot::Entity, 0}, std::vector<double>{-3.0, -4.0});
  TrainConfig cfg = default_config(ModelKind::TransE);
  cfg.learning_rate = 1.0;
  auto state = OptimizerState<double>::for_params(p, cfg.optimizer);
  optimizer_step(p, g, state, cfg);
  EXPECT_DOUBLE_EQ(p.entity(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(p.entity(0, 1), 0.8);
}

TEST(Optimizer, AdaGradAccumulatorsNeverDecrease) {
  const auto d = kgbench::testing::random_kg(12, 25, 3, 200, 0.0);
  const TripleIndex known(d.train());
  TrainConfig cfg = default_config(ModelKind::ComplEx);
  cfg.learning_rate = 0.1;
  auto p = init_params<double>(ModelKind::ComplEx, 25, 3, {8, 8}, 1);
  auto state = OptimizerState<double>::for_params(p, cfg.optimizer);
  CounterRng rng(1, Stage::Test, 0);
  auto previous = state.accumulators;
  for (int step = 0; step < 30; ++step) {
    const auto pos = d.train().subspan(static_cast<std::size_t>(step % 10) * 10, 10);
    std::vector<Triple> neg;
    for (const auto& t : pos) neg.push_back(sample_negatives(t, 1, cfg.corruption, known, 25, rng)[0]);
    const auto result = loss_and_grads<double>(pos, neg, p, cfg, {&known, 0, 0, 1});
    optimizer_step(p, result.grads, state, cfg);
    for (std::size_t s = 0; s < state.accumulators.size(); ++s) {
      const auto now = state.accumulators[s].second.values();
      const auto before = previous[s].second.values();
      for (std::size_t i = 0; i < now.size(); ++i) {
        ASSERT_GE(now[i], before[i]);
        ASSERT_GE(now[i], 0.0);
      }
    }
    previous = state.accumulators;
  }
}

TEST(Train, ZeroEpochsReturnsTheInitialisation) {
  const auto d = kgbench::testing::random_kg(1, 40, 3, 200);
  for (ModelKind kind : kAllModels) {
    TrainConfig cfg = default_config(kind);
    cfg.epochs = 0;
    cfg.entity_dim = cfg.relation_dim = 8;
    const auto result = train<float>(d, cfg);
    EXPECT_TRUE(bitwise_equal(result.params, init_params<float>(kind, 40, 3, {8, 8}, cfg.seed)));
    EXPECT_TRUE(result.loss_curve.empty());
    EXPECT_EQ(result.steps, 0u);
  }
}

TEST(Train, NumBatchesFixesTheBatchSize) {
  TrainConfig cfg;
  cfg.num_batches = 100;
  EXPECT_EQ(effective_batch_size(cfg, 1000), 10u);
  EXPECT_EQ(effective_batch_size(cfg, 1001), 11u);
  EXPECT_EQ(effective_batch_size(cfg, 50), 1u);
  cfg.num_batches.reset();
  cfg.batch_size = 64;
  EXPECT_EQ(effective_batch_size(cfg, 1000), 64u);

  const auto d = kgbench::testing::random_kg(2, 200, 5, 1000, 0.0);
  ASSERT_EQ(d.train().size(), 999u);
  std::vector<Triple> triples(d.train().begin(), d.train().end());
  triples.push_back(d.test()[0]);
  const Dataset full(d.vocabulary(), triples, {}, {});
  TrainConfig small = default_config(ModelKind::TransE);
  small.entity_dim = small.relation_dim = 4;
  small.epochs = 2;
  const auto result = train<float>(full, small);
  EXPECT_EQ(result.steps, 200u);
  EXPECT_EQ(result.loss_curve.size(), 2u);
}

TEST(Train, ZeroLearningRateFreezesParameters) {
  const auto d = kgbench::testing::random_kg(4, 30, 3, 200);
  for (ModelKind kind : kAllModels) {
    TrainConfig cfg = default_config(kind);
    cfg.learning_rate = 0;
    cfg.epochs = 3;
    cfg.entity_dim = cfg.relation_dim = 6;
    cfg.num_batches = 10;
    const auto result = train<double>(d, cfg);
    EXPECT_TRUE(bitwise_equal(result.params, init_params<double>(kind, 30, 3, {6, 6}, cfg.seed))) << model_tag(kind);
  }
}

TEST(Train, ZeroLearningRateGivesAConstantLossCurveForDeterministicLosses) {
  // 1-N loss without dropout draws no randomness, so every epoch sees the same total.
  const auto d = kgbench::testing::random_kg(4, 30, 3, 200);
  TrainConfig cfg = default_config(ModelKind::TuckER);
  cfg.learning_rate = 0;
  cfg.epochs = 4;
  cfg.entity_dim = cfg.relation_dim = 5;
  cfg.input_dropout = cfg.hidden_dropout1 = cfg.hidden_dropout2 = 0;
  const auto result = train<double>(d, cfg);
  ASSERT_EQ(result.loss_curve.size(), 4u);
  for (double loss : result.loss_curve) EXPECT_NEAR(loss, result.loss_curve[0], 1e-12 * result.loss_curve[0]);
}

TEST(Train, FixedSeedIsBitwiseReproducible) {
  const auto d = kgbench::testing::random_kg(5, 50, 4, 400);
  for (ModelKind kind : kAllModels) {
    TrainConfig cfg = default_config(kind);
    cfg.epochs = 3;
    cfg.entity_dim = cfg.relation_dim = 8;
    cfg.num_batches = 8;
    const auto a = train<float>(d, cfg);
    const auto b = train<float>(d, cfg);
    EXPECT_TRUE(bitwise_equal(a.params, b.params)) << model_tag(kind);
    EXPECT_EQ(a.loss_curve, b.loss_curve);
    cfg.workers = 3;
    const auto c = train<float>(d, cfg);
    EXPECT_TRUE(bitwise_equal(a.params, c.params)) << model_tag(kind) << " with 3 workers";
    EXPECT_EQ(a.loss_curve, c.loss_curve);
    cfg.workers = 1;
    cfg.seed = 7;
    EXPECT_FALSE(bitwise_equal(a.params, train<float>(d, cfg).params)) << model_tag(kind);
  }
}

TEST(Train, EpochCallbackSeesEveryEpoch) {
  const auto d = kgbench::testing::random_kg(5, 30, 2, 100);
  TrainConfig cfg = default_config(ModelKind::DistMult);
  cfg.epochs = 5;
  cfg.entity_dim = cfg.relation_dim = 4;
  std::vector<std::pair<std::size_t, double>> seen;
  const auto result = train<float>(d, cfg, [&](std::size_t epoch, double loss) { seen.emplace_back(epoch, loss); });
  ASSERT_EQ(seen.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(seen[i].first, i);
    EXPECT_EQ(seen[i].second, result.loss_curve[i]);
  }
}

TEST(Train, BlockKgLossKeepsFallingAfterWarmup) {
  const auto kg = kgbench::testing::block_kg(1);
  TrainConfig cfg = default_config(ModelKind::TransE);
  cfg.entity_dim = cfg.relation_dim = 50;
  cfg.num_batches = 20;
  cfg.epochs = 200;
  // Small steps keep the model in its descending phase for all 200 epochs; near the loss floor
  // the per-epoch mean is dominated by negative-sampling noise.
  cfg.learning_rate = 3e-4;
  cfg.margin = 1.0;
  cfg.negatives = 5;
  const auto result = train<float>(kg.dataset, cfg);
  const auto& curve = result.loss_curve;
  ASSERT_EQ(curve.size(), 200u);
  for (std::size_t start = 50; start + 20 < curve.size(); ++start) {
    EXPECT_LE(curve[start + 20], curve[start]) << "window starting at epoch " << start;
  }
  EXPECT_LT(curve.back(), curve.front());
}

TEST(Config, ValidateRejectsBadValues) {
  auto expect_invalid = [](TrainConfig cfg) { EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig); };
  TrainConfig ok = default_config(ModelKind::TransE);
  EXPECT_NO_THROW(ok.validate());
  auto both = ok;
  both.batch_size = 10;
  expect_invalid(both);
  auto neither = ok;
  neither.num_batches.reset();
  expect_invalid(neither);
  auto lr = ok;
  lr.learning_rate = -0.1;
  expect_invalid(lr);
  auto margin = ok;
  margin.margin = -1;
  expect_invalid(margin);
  auto eps = ok;
  eps.label_smoothing = 1.0;
  expect_invalid(eps);
  auto negatives = ok;
  negatives.negatives = 0;
  expect_invalid(negatives);
  auto dropout = ok;
  dropout.hidden_dropout2 = 1.0;
  expect_invalid(dropout);
}

TEST(Config, DefaultLossPairings) {
  EXPECT_EQ(default_config(ModelKind::TransH).loss, LossKind::MarginRanking);
  EXPECT_EQ(default_config(ModelKind::ComplEx).loss, LossKind::Logistic);
  const auto tucker = default_config(ModelKind::TuckER);
  EXPECT_EQ(tucker.loss, LossKind::BCE1toN);
  EXPECT_EQ(tucker.label_smoothing, 0.1);
  EXPECT_EQ(tucker.input_dropout, 0.3);
  EXPECT_EQ(tucker.hidden_dropout1, 0.4);
  EXPECT_EQ(tucker.hidden_dropout2, 0.5);
  EXPECT_EQ(default_config(ModelKind::TransE).margin, 1.0);
  EXPECT_EQ(default_config(ModelKind::DistMult).reg_lambda, 1e-5);
  EXPECT_EQ(default_config(ModelKind::DistMult).negatives, 1u);
}

}  // namespace
}  // namespace kgbench
