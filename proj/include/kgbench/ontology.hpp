#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kgbench/core.hpp"

namespace kgbench {

enum class Rule { CycleDetected, PropertyCycleDetected, DomainViolation, RangeViolation };

std::string_view to_string(Rule rule);

struct Violation {
  Rule rule;
  std::optional<Triple> triple;
  std::optional<EntityId> node;
  std::optional<RelationId> relation;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Taxonomy level (roots are level 1) -> node count.
  std::map<std::size_t, std::size_t> level_histogram;
  std::map<RelationKind, std::size_t> relation_kind_counts;

  bool conforms() const { return violations.empty(); }
  void append(ValidationReport other);
};

// Cycles in the subClassOf/broader taxonomy (one violation per node on a
// cycle) and in the subPropertyOf hierarchy. Levels use the longest path to a
// root; nodes on or below a cycle get no level.
ValidationReport check_taxonomy(const OntologySchema& schema);

// One DomainViolation / RangeViolation per offending triple side; counts
// triples per relation kind. Throws UndeclaredRelation.
ValidationReport check_domain_range(const Dataset& d, const OntologySchema& schema);

// Connected components of the symmetric-transitive closure, each sorted, ordered
// by smallest member. Ids that appear in no pair are omitted.
std::vector<std::vector<EntityId>> equivalence_closure(std::span<const std::pair<EntityId, EntityId>> pairs);

// Pairs from triples whose relation is (a prefixed) equivalentClass.
std::vector<std::pair<EntityId, EntityId>> equivalence_pairs(const Dataset& d);

// Parses a schema document. Labels the vocabulary lacks are interned into
// `vocab` (appended after the dataset's ids). With "taxonomy_from_triples" set,
// subClassOf/broader triples of `d` become taxonomy edges.
OntologySchema parse_schema(const nlohmann::json& doc, Vocabulary& vocab, const Dataset* d = nullptr);

nlohmann::json to_json(const ValidationReport& report, const Vocabulary& vocab);

}  // namespace kgbench
