#include "kgbench/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kgbench/error.hpp"
#include "parallel.hpp"

namespace kgbench {

std::string_view to_string(Protocol protocol) { return protocol == Protocol::Raw ? "raw" : "filtered"; }
std::string_view to_string(Sides sides) { return sides == Sides::TailOnly ? "tail" : "both"; }

Protocol parse_protocol(std::string_view text) {
  if (text == "raw") return Protocol::Raw;
  if (text == "filtered") return Protocol::Filtered;
  throw Error(ErrorCode::InvalidConfig, "unknown protocol '" + std::string(text) + "'");
}

Sides parse_sides(std::string_view text) {
  if (text == "tail") return Sides::TailOnly;
  if (text == "both") return Sides::HeadAndTail;
  throw Error(ErrorCode::InvalidConfig, "unknown sides '" + std::string(text) + "'");
}

void EvalConfig::validate() const {
  if (hits.empty()) throw Error(ErrorCode::InvalidConfig, "at least one hits cutoff is required");
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i] < 1) throw Error(ErrorCode::InvalidConfig, "hits cutoffs must be >= 1");
    if (i > 0 && hits[i] <= hits[i - 1]) throw Error(ErrorCode::InvalidConfig, "hits cutoffs must be ascending");
  }
  if (workers == 0) throw Error(ErrorCode::InvalidConfig, "workers must be >= 1");
}

double EvalReport::hits_at(int k) const {
  for (const auto& [cutoff, value] : hits) {
    if (cutoff == k) return value;
  }
  throw Error(ErrorCode::InvalidConfig, "report has no hits@" + std::to_string(k));
}

EvalReport aggregate_ranks(std::vector<double> tail_ranks, std::vector<double> head_ranks, const EvalConfig& cfg,
                           std::size_t n_test) {
  cfg.validate();
  const std::size_t n = tail_ranks.size() + head_ranks.size();
  if (n == 0) throw Error(ErrorCode::EmptyReport, "no ranks to aggregate");

  EvalReport report;
  report.protocol = cfg.protocol;
  report.sides = cfg.sides;
  report.n_test = n_test;

  std::vector<std::size_t> hit_counts(cfg.hits.size(), 0);
  double rank_sum = 0;
  double reciprocal_sum = 0;
  for (const auto* list : {&tail_ranks, &head_ranks}) {
    for (double rank : *list) {
      rank_sum += rank;
      reciprocal_sum += 1.0 / rank;
      for (std::size_t i = 0; i < cfg.hits.size(); ++i) {
        if (rank <= cfg.hits[i]) ++hit_counts[i];
      }
    }
  }
  const auto total = static_cast<double>(n);
  for (std::size_t i = 0; i < cfg.hits.size(); ++i) {
    report.hits.emplace_back(cfg.hits[i], static_cast<double>(hit_counts[i]) / total);
  }
  report.mr = rank_sum / total;
  report.mrr = reciprocal_sum / total;
  report.tail_ranks = std::move(tail_ranks);
  report.head_ranks = std::move(head_ranks);
  check_report_invariants(report);
  return report;
}

void check_report_invariants(const EvalReport& report) {
  constexpr double kSlack = 1e-12;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvariantViolated, what); };
  for (std::size_t i = 1; i < report.hits.size(); ++i) {
    if (report.hits[i].second < report.hits[i - 1].second) fail("hits@K decreases in K");
  }
  if (report.mr < 1.0) fail("MR < 1");
  if (!report.hits.empty() && report.hits.front().first == 1 && report.mrr + kSlack < report.hits.front().second) {
    fail("MRR < hits@1");
  }
  if (report.mrr + kSlack < 1.0 / report.mr) fail("MRR < 1/MR");
}

double rank_from_scores(std::span<const double> scores, const Triple& t, Side side, Protocol protocol,
                        const TripleIndex* filter) {
  const EntityId target = side == Side::Tail ? t.tail : t.head;
  if (target.value >= scores.size()) throw Error(ErrorCode::UnseenEntity, "target entity has no score");
  std::span<const EntityId> known;
  if (protocol == Protocol::Filtered && filter != nullptr) {
    known = side == Side::Tail ? filter->tails(t.head, t.relation) : filter->heads(t.relation, t.tail);
  }
  const double target_score = scores[target.value];
  std::size_t better = 0;
  std::size_t ties = 0;
  auto next_known = known.begin();
  for (std::uint32_t e = 0; e < scores.size(); ++e) {
    while (next_known != known.end() && next_known->value < e) ++next_known;
    if (e == target.value) continue;
    if (next_known != known.end() && next_known->value == e) continue;
    if (scores[e] > target_score) {
      ++better;
    } else if (scores[e] == target_score) {
      ++ties;
    }
  }
  return 1.0 + static_cast<double>(better) + static_cast<double>(ties) / 2.0;
}

namespace {

template <typename Real>
void check_seen(const ModelParams<Real>& params, const Triple& t) {
  if (t.head.value >= params.num_entities || t.tail.value >= params.num_entities) {
    throw Error(ErrorCode::UnseenEntity, "entity id has no trained row");
  }
  if (t.relation.value >= params.num_relations) {
    throw Error(ErrorCode::UnseenEntity, "relation id has no trained row");
  }
}

template <typename Real>
double rank_with_buffer(const ModelParams<Real>& params, const Triple& t, Side side, Protocol protocol,
                        const TripleIndex* filter, std::vector<Real>& raw, std::vector<double>& scores) {
  check_seen(params, t);
  raw.resize(params.num_entities);
  scores.resize(params.num_entities);
  score_candidates<Real>(params, t, side, raw);
  std::copy(raw.begin(), raw.end(), scores.begin());
  return rank_from_scores(scores, t, side, protocol, filter);
}

}  // namespace

template <typename Real>
double rank_one(const ModelParams<Real>& params, const Triple& t, Side side, Protocol protocol,
                const TripleIndex* filter) {
  std::vector<Real> raw;
  std::vector<double> scores;
  return rank_with_buffer(params, t, side, protocol, filter, raw, scores);
}

template <typename Real>
EvalReport evaluate(const Dataset& dataset, const ModelParams<Real>& params, const EvalConfig& cfg) {
  cfg.validate();
  check_shapes(params);
  if (params.num_entities != dataset.vocabulary().num_entities() ||
      params.num_relations != dataset.vocabulary().num_relations()) {
    throw Error(ErrorCode::DimMismatch, "parameters and dataset vocabulary disagree on entity/relation counts");
  }
  std::vector<Triple> queries;
  for (const auto& t : dataset.test()) {
    if (!cfg.relation || t.relation == *cfg.relation) queries.push_back(t);
  }
  if (queries.empty()) throw Error(ErrorCode::EmptyTestSet, "no test triples to evaluate");

  std::optional<TripleIndex> filter;
  if (cfg.protocol == Protocol::Filtered) filter = TripleIndex::all_splits(dataset);
  const TripleIndex* filter_ptr = filter ? &*filter : nullptr;

  const bool both = cfg.sides == Sides::HeadAndTail;
  std::vector<double> tail_ranks(queries.size());
  std::vector<double> head_ranks(both ? queries.size() : 0);
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, queries.size()));
  const std::size_t chunk = (queries.size() + workers - 1) / workers;
  detail::parallel_for(workers, workers, [&](std::size_t w) {
    std::vector<Real> raw;
    std::vector<double> scores;
    const std::size_t end = std::min(queries.size(), (w + 1) * chunk);
    for (std::size_t i = w * chunk; i < end; ++i) {
      tail_ranks[i] = rank_with_buffer(params, queries[i], Side::Tail, cfg.protocol, filter_ptr, raw, scores);
      if (both) head_ranks[i] = rank_with_buffer(params, queries[i], Side::Head, cfg.protocol, filter_ptr, raw, scores);
    }
  });
  return aggregate_ranks(std::move(tail_ranks), std::move(head_ranks), cfg, queries.size());
}

template <typename Real>
std::vector<Prediction> category_predict(const ModelParams<Real>& params, EntityId item, RelationId relation,
                                         std::size_t k, const TripleIndex* filter) {
  const Triple query{item, relation, item};
  check_seen(params, query);
  if (k == 0) return {};
  std::vector<Real> scores(params.num_entities);
  score_candidates<Real>(params, query, Side::Tail, scores);
  const auto known = filter ? filter->tails(item, relation) : std::span<const EntityId>{};

  std::vector<Prediction> candidates;
  candidates.reserve(params.num_entities);
  for (std::uint32_t e = 0; e < params.num_entities; ++e) {
    if (std::binary_search(known.begin(), known.end(), EntityId{e})) continue;
    candidates.push_back({EntityId{e}, static_cast<double>(scores[e])});
  }
  auto better = [](const Prediction& a, const Prediction& b) {
    return a.score != b.score ? a.score > b.score : a.entity < b.entity;
  };
  if (k < candidates.size()) {
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(), better);
    candidates.resize(k);
  } else {
    std::sort(candidates.begin(), candidates.end(), better);
  }
  return candidates;
}

#define KGBENCH_INSTANTIATE_EVAL(Real)                                                                           \
  template double rank_one<Real>(const ModelParams<Real>&, const Triple&, Side, Protocol, const TripleIndex*);   \
  template EvalReport evaluate<Real>(const Dataset&, const ModelParams<Real>&, const EvalConfig&);               \
  template std::vector<Prediction> category_predict<Real>(const ModelParams<Real>&, EntityId, RelationId,        \
                                                          std::size_t, const TripleIndex*);

KGBENCH_INSTANTIATE_EVAL(float)
KGBENCH_INSTANTIATE_EVAL(double)

}  // namespace kgbench
