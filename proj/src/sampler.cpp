#include "kgbench/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "kgbench/error.hpp"
#include "kgbench/log.hpp"
#include "kgbench/rng.hpp"

namespace kgbench {
namespace {

void check_rate(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, std::string(name) + " must lie in [0, 1]");
  }
}

void check_stage_rates(const SamplerConfig& cfg) {
  check_rate(cfg.alpha_head, "alpha_head");
  check_rate(cfg.alpha_tail, "alpha_tail");
  check_rate(cfg.alpha, "alpha");
  if (!(cfg.head_quantile > 0.0 && cfg.head_quantile < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "head_quantile must lie in (0, 1)");
  }
}

bool contains(const RelationSet& set, RelationId r) { return std::binary_search(set.begin(), set.end(), r); }

}  // namespace

void SamplerConfig::validate() const {
  check_stage_rates(*this);
  if (!(alpha_head > alpha_tail)) throw Error(ErrorCode::InvalidConfig, "alpha_head must exceed alpha_tail");
}

std::vector<std::size_t> relation_frequencies(std::span<const Triple> triples, std::size_t num_relations) {
  std::vector<std::size_t> freq(num_relations, 0);
  for (const auto& t : triples) {
    if (t.relation.value >= freq.size()) freq.resize(t.relation.value + 1, 0);
    ++freq[t.relation.value];
  }
  return freq;
}

RelationSet refine_relations(std::span<const Triple> full, const SamplerConfig& cfg) {
  if (full.empty()) throw Error(ErrorCode::EmptyInput, "no triples to refine");
  RelationSet out;
  if (!cfg.relation_allowlist.empty()) {
    out = cfg.relation_allowlist;
  } else {
    const auto freq = relation_frequencies(full, 0);
    for (std::size_t r = 0; r < freq.size(); ++r) {
      if (freq[r] > 0 && freq[r] >= cfg.min_relation_frequency) out.push_back(RelationId{static_cast<std::uint32_t>(r)});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw Error(ErrorCode::EmptyResult, "no relation passes the refinement rule");
  return out;
}

RelationGroups split_relation_groups(std::span<const Triple> full, const RelationSet& rels, double head_quantile) {
  const auto freq = relation_frequencies(full, 0);
  auto frequency = [&](RelationId r) { return r.value < freq.size() ? freq[r.value] : std::size_t{0}; };
  RelationSet ranked = rels;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](RelationId a, RelationId b) { return frequency(a) > frequency(b); });
  // Small epsilon keeps e.g. (1 - 0.8) * 500 from rounding up to 101.
  const double share = (1.0 - head_quantile) * static_cast<double>(ranked.size());
  const auto n_head = std::min(ranked.size(), static_cast<std::size_t>(std::ceil(share - 1e-9)));
  RelationGroups groups;
  groups.head.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n_head));
  groups.tail.assign(ranked.begin() + static_cast<std::ptrdiff_t>(n_head), ranked.end());
  std::sort(groups.head.begin(), groups.head.end());
  std::sort(groups.tail.begin(), groups.tail.end());
  return groups;
}

EntitySet filter_head_entities(std::span<const Triple> full, const RelationSet& rels, const SamplerConfig& cfg) {
  check_stage_rates(cfg);
  const auto groups = split_relation_groups(full, rels, cfg.head_quantile);
  EntitySet head_group, tail_group;
  for (const auto& t : full) {
    if (contains(groups.head, t.relation)) head_group.push_back(t.head);
    if (contains(groups.tail, t.relation)) tail_group.push_back(t.head);
  }
  auto sample = [&](EntitySet& set, double rate, Stage stage) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    std::erase_if(set, [&](EntityId e) { return !(uniform_at(cfg.seed, stage, e.value) < rate); });
  };
  sample(head_group, cfg.alpha_head, Stage::HeadRelationEntities);
  sample(tail_group, cfg.alpha_tail, Stage::TailRelationEntities);

  EntitySet out;
  std::set_union(head_group.begin(), head_group.end(), tail_group.begin(), tail_group.end(), std::back_inserter(out));
  return out;
}

std::vector<Triple> sample_triples(std::span<const Triple> full, const EntitySet& heads, const RelationSet& rels,
                                   const SamplerConfig& cfg) {
  check_rate(cfg.alpha, "alpha");
  std::vector<Triple> out;
  for (const auto& t : full) {
    if (!std::binary_search(heads.begin(), heads.end(), t.head) || !contains(rels, t.relation)) continue;
    if (uniform_at(cfg.seed, Stage::TripleSample, t.head.value, t.relation.value, t.tail.value) < cfg.alpha) {
      out.push_back(t);
    }
  }
  return out;
}

Dataset split_dataset(std::span<const Triple> triples, const Vocabulary& source, const SamplerConfig& cfg) {
  std::vector<Triple> unique;
  {
    std::unordered_set<Triple, TripleHash> seen;
    for (const auto& t : triples) {
      if (seen.insert(t).second) unique.push_back(t);
    }
  }
  if (unique.empty()) throw Error(ErrorCode::EmptyInput, "no triples to split");
  const std::size_t held_out = cfg.dev_size + cfg.test_size;
  if (held_out >= unique.size()) {
    throw Error(ErrorCode::InfeasibleSplit, "dev + test (" + std::to_string(held_out) + ") must be below the " +
                                                std::to_string(unique.size()) + " available triples");
  }

  // Random order keyed by the triple itself, so input order does not matter.
  std::vector<std::pair<double, std::size_t>> order(unique.size());
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const auto& t = unique[i];
    order[i] = {uniform_at(cfg.seed, Stage::SplitOrder, t.head.value, t.relation.value, t.tail.value), i};
  }
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : unique[a.second] < unique[b.second];
  });

  std::unordered_map<std::uint32_t, std::size_t> entity_count;
  std::unordered_map<std::uint32_t, std::size_t> relation_count;
  for (const auto& t : unique) {
    ++entity_count[t.head.value];
    ++entity_count[t.tail.value];
    ++relation_count[t.relation.value];
  }

  enum class Split : std::uint8_t { Train, Dev, Test };
  std::vector<Split> assignment(unique.size(), Split::Train);
  std::size_t assigned = 0;
  std::size_t kept_in_train = 0;
  for (const auto& [u, i] : order) {
    if (assigned == held_out) break;
    const auto& t = unique[i];
    const std::size_t head_after = entity_count[t.head.value] - (t.head == t.tail ? 2 : 1);
    const std::size_t tail_after = entity_count[t.tail.value] - (t.head == t.tail ? 2 : 1);
    if (head_after == 0 || tail_after == 0 || relation_count[t.relation.value] == 1) {
      ++kept_in_train;
      continue;
    }
    --entity_count[t.head.value];
    --entity_count[t.tail.value];
    --relation_count[t.relation.value];
    assignment[i] = assigned < cfg.dev_size ? Split::Dev : Split::Test;
    ++assigned;
  }
  if (assigned < held_out) {
    throw Error(ErrorCode::InfeasibleSplit, "only " + std::to_string(assigned) + " of " + std::to_string(held_out) +
                                                " held-out triples keep every entity and relation in train");
  }
  if (kept_in_train > 0) log::info("split: {} candidate held-out triples kept in train for coverage", kept_in_train);

  std::vector<Triple> parts[3];
  for (std::size_t i = 0; i < unique.size(); ++i) parts[static_cast<int>(assignment[i])].push_back(unique[i]);

  Vocabulary vocab;
  for (auto& part : parts) {
    for (auto& t : part) {
      const EntityId h = vocab.intern_entity(source.entity_label(t.head));
      const RelationId r = vocab.intern_relation(source.relation_label(t.relation));
      const EntityId tl = vocab.intern_entity(source.entity_label(t.tail));
      t = {h, r, tl};
    }
  }
  return Dataset(std::move(vocab), std::move(parts[0]), std::move(parts[1]), std::move(parts[2]));
}

std::vector<std::pair<RelationId, std::size_t>> relation_histogram(std::span<const Triple> triples) {
  const auto freq = relation_frequencies(triples, 0);
  std::vector<std::pair<RelationId, std::size_t>> out;
  for (std::size_t r = 0; r < freq.size(); ++r) {
    if (freq[r] > 0) out.emplace_back(RelationId{static_cast<std::uint32_t>(r)}, freq[r]);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

SplitAudit audit_split(const Dataset& d) {
  SplitAudit audit;
  std::unordered_set<Triple, TripleHash> train(d.train().begin(), d.train().end());
  std::unordered_set<Triple, TripleHash> dev(d.dev().begin(), d.dev().end());
  audit.disjoint = std::none_of(d.dev().begin(), d.dev().end(), [&](const Triple& t) { return train.contains(t); }) &&
                   std::none_of(d.test().begin(), d.test().end(),
                                [&](const Triple& t) { return train.contains(t) || dev.contains(t); });
  const auto unseen = unseen_heldout(d);
  audit.unseen_dev = unseen.dev_triples;
  audit.unseen_test = unseen.test_triples;
  audit.heldout_covered = unseen.dev_triples == 0 && unseen.test_triples == 0;
  return audit;
}

BuildResult build_benchmark(std::span<const Triple> full, const Vocabulary& source, const SamplerConfig& cfg) {
  cfg.validate();
  auto relations = refine_relations(full, cfg);
  auto groups = split_relation_groups(full, relations, cfg.head_quantile);
  auto heads = filter_head_entities(full, relations, cfg);

  std::size_t filtered = 0;
  for (const auto& t : full) {
    if (std::binary_search(heads.begin(), heads.end(), t.head) && contains(relations, t.relation)) ++filtered;
  }
  const auto sampled = sample_triples(full, heads, relations, cfg);
  Dataset dataset = split_dataset(sampled, source, cfg);

  std::vector<Triple> all(dataset.train().begin(), dataset.train().end());
  all.insert(all.end(), dataset.dev().begin(), dataset.dev().end());
  all.insert(all.end(), dataset.test().begin(), dataset.test().end());
  auto histogram = relation_histogram(all);
  auto audit = audit_split(dataset);
  return BuildResult{std::move(dataset), std::move(histogram), std::move(relations), std::move(groups),
                     std::move(heads),   filtered,             sampled.size(),       audit};
}

}  // namespace kgbench
