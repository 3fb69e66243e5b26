#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "kgbench/core.hpp"
#include "kgbench/models.hpp"

namespace kgbench {

enum class Protocol { Raw, Filtered };
enum class Sides { TailOnly, HeadAndTail };

std::string_view to_string(Protocol protocol);
std::string_view to_string(Sides sides);
Protocol parse_protocol(std::string_view text);
Sides parse_sides(std::string_view text);

struct EvalConfig {
  Protocol protocol = Protocol::Filtered;
  Sides sides = Sides::HeadAndTail;
  std::vector<int> hits = {1, 3, 10};
  // Category-prediction mode: only test triples with this relation.
  std::optional<RelationId> relation;
  std::size_t workers = 1;

  // Throws InvalidConfig unless cutoffs are ascending and >= 1.
  void validate() const;
};

struct EvalReport {
  std::vector<double> tail_ranks;
  std::vector<double> head_ranks;
  std::vector<std::pair<int, double>> hits;
  double mr = 0;
  double mrr = 0;
  Protocol protocol = Protocol::Filtered;
  Sides sides = Sides::HeadAndTail;
  std::size_t n_test = 0;

  double hits_at(int k) const;
  std::size_t num_ranks() const { return tail_ranks.size() + head_ranks.size(); }
};

// Pools both rank lists: hits@K = fraction of ranks <= K, MR = mean rank,
// MRR = mean reciprocal rank. Throws EmptyReport when there are no ranks.
EvalReport aggregate_ranks(std::vector<double> tail_ranks, std::vector<double> head_ranks, const EvalConfig& cfg,
                           std::size_t n_test);

// Throws InvariantViolated unless hits@K is non-decreasing, MRR >= hits@1,
// MRR >= 1/MR and MR >= 1.
void check_report_invariants(const EvalReport& report);

// Mean-tie rank of the true entity on `side`: 1 + #better + #tied / 2.
// Under Filtered, candidates forming a triple in `filter` (other than t) are
// skipped. Throws UnseenEntity when t has no trained row.
template <typename Real>
double rank_one(const ModelParams<Real>& params, const Triple& t, Side side, Protocol protocol,
                const TripleIndex* filter);

// Same, from precomputed candidate scores (one per entity).
double rank_from_scores(std::span<const double> scores, const Triple& t, Side side, Protocol protocol,
                        const TripleIndex* filter);

// Ranks every test triple (optionally restricted to one relation). The filter
// index is train + dev + test. Throws EmptyTestSet.
template <typename Real>
EvalReport evaluate(const Dataset& dataset, const ModelParams<Real>& params, const EvalConfig& cfg);

struct Prediction {
  EntityId entity;
  double score;
  bool operator==(const Prediction&) const = default;
};

// k best tails for (item, relation, ?) by descending score, ties by id. With a
// filter index, tails already known for (item, relation) are skipped.
template <typename Real>
std::vector<Prediction> category_predict(const ModelParams<Real>& params, EntityId item, RelationId relation,
                                         std::size_t k, const TripleIndex* filter);

}  // namespace kgbench
