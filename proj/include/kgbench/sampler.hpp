#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kgbench/core.hpp"

namespace kgbench {

struct SamplerConfig {
  // Non-empty allowlist overrides the frequency threshold.
  std::vector<RelationId> relation_allowlist;
  std::size_t min_relation_frequency = 1;
  // Relations ranked in the top (1 - q) fraction by frequency are head-relations.
  double head_quantile = 0.8;
  double alpha_head = 0.5;
  double alpha_tail = 0.1;
  double alpha = 0.5;
  std::size_t dev_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 42;

  // Range checks plus alpha_head > alpha_tail; throws InvalidConfig.
  void validate() const;
};

// Sorted, duplicate-free id sets.
using RelationSet = std::vector<RelationId>;
using EntitySet = std::vector<EntityId>;

std::vector<std::size_t> relation_frequencies(std::span<const Triple> triples, std::size_t num_relations);

// Stage 1: relations passing the allowlist or frequency threshold. Throws EmptyResult.
RelationSet refine_relations(std::span<const Triple> full, const SamplerConfig& cfg);

struct RelationGroups {
  RelationSet head;
  RelationSet tail;
};

// Splits `rels` by frequency rank: the ceil((1 - q) * |rels|) most frequent
// (ties by id) are head-relations, the rest tail-relations.
RelationGroups split_relation_groups(std::span<const Triple> full, const RelationSet& rels, double head_quantile);

// Stage 2: independent Bernoulli samples of the head entities of the two
// relation groups (rates alpha_head / alpha_tail), merged as a set union.
EntitySet filter_head_entities(std::span<const Triple> full, const RelationSet& rels, const SamplerConfig& cfg);

// Stage 3: triples with head in `heads` and relation in `rels`, each kept when
// its keyed uniform draw is < alpha. Preserves input order.
std::vector<Triple> sample_triples(std::span<const Triple> full, const EntitySet& heads, const RelationSet& rels,
                                   const SamplerConfig& cfg);

// Dev/test drawn without replacement in a seeded random order; a triple whose
// removal would leave one of its entities or its relation absent from train
// stays in train. The result is re-encoded with a compact vocabulary (first
// appearance over train, dev, test). Throws InfeasibleSplit.
Dataset split_dataset(std::span<const Triple> triples, const Vocabulary& source, const SamplerConfig& cfg);

// Descending by count, ties by relation id.
std::vector<std::pair<RelationId, std::size_t>> relation_histogram(std::span<const Triple> triples);

struct SplitAudit {
  bool disjoint = false;
  bool heldout_covered = false;
  std::size_t unseen_dev = 0;
  std::size_t unseen_test = 0;
  bool passed() const { return disjoint && heldout_covered; }
};

SplitAudit audit_split(const Dataset& d);

struct BuildResult {
  Dataset dataset;
  std::vector<std::pair<RelationId, std::size_t>> histogram;  // over all splits, dataset ids
  RelationSet relations;                                      // source ids
  RelationGroups groups;
  EntitySet heads;
  std::size_t filtered_triples = 0;  // |T(E^N, R^N)|
  std::size_t sampled_triples = 0;
  SplitAudit audit;
};

BuildResult build_benchmark(std::span<const Triple> full, const Vocabulary& source, const SamplerConfig& cfg);

}  // namespace kgbench
