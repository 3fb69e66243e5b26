#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kgbench {

struct EntityId {
  std::uint32_t value = 0;
  auto operator<=>(const EntityId&) const = default;
};

struct RelationId {
  std::uint32_t value = 0;
  auto operator<=>(const RelationId&) const = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t x = (std::uint64_t{t.head.value} << 32) | t.tail.value;
    x ^= std::uint64_t{t.relation.value} * 0x9e3779b97f4a7c15ULL;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

using RawTriple = std::array<std::string, 3>;

enum class Side { Head, Tail };

// Dense label <-> id dictionaries for entities and relations.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Builds from ordered label lists; throws DuplicateLabel when a label repeats.
  static Vocabulary from_labels(std::vector<std::string> entities, std::vector<std::string> relations);

  EntityId intern_entity(const std::string& label);
  RelationId intern_relation(const std::string& label);

  std::optional<EntityId> find_entity(const std::string& label) const;
  std::optional<RelationId> find_relation(const std::string& label) const;

  const std::string& entity_label(EntityId id) const;
  const std::string& relation_label(RelationId id) const;

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }

  bool contains(const Triple& t) const {
    return t.head.value < entities_.size() && t.tail.value < entities_.size() &&
           t.relation.value < relations_.size();
  }

  const std::vector<std::string>& entity_labels() const { return entities_; }
  const std::vector<std::string>& relation_labels() const { return relations_; }

  bool operator==(const Vocabulary& other) const {
    return entities_ == other.entities_ && relations_ == other.relations_;
  }

 private:
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, std::uint32_t> entity_index_;
  std::unordered_map<std::string, std::uint32_t> relation_index_;
};

enum class VocabPolicy { Grow, Frozen };

struct EncodedTriples {
  Vocabulary vocabulary;
  std::vector<Triple> triples;
};

// Under Grow, unseen labels get the next dense id in first-appearance order
// (continuing from `vocab`). Under Frozen every label must already exist.
EncodedTriples encode_triples(std::span<const RawTriple> raw, VocabPolicy policy, Vocabulary vocab = {});

RawTriple decode_triple(const Vocabulary& vocab, const Triple& t);

struct DatasetStats {
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  std::size_t num_train = 0;
  std::size_t num_dev = 0;
  std::size_t num_test = 0;
  bool operator==(const DatasetStats&) const = default;
};

// Vocabulary plus train/dev/test splits. Construction deduplicates each split,
// validates ids and rejects overlapping splits; the object is immutable after.
class Dataset {
 public:
  struct DuplicateCounts {
    std::size_t train = 0;
    std::size_t dev = 0;
    std::size_t test = 0;
  };

  Dataset(Vocabulary vocab, std::vector<Triple> train, std::vector<Triple> dev, std::vector<Triple> test);

  const Vocabulary& vocabulary() const { return vocab_; }
  std::span<const Triple> train() const { return train_; }
  std::span<const Triple> dev() const { return dev_; }
  std::span<const Triple> test() const { return test_; }
  const DuplicateCounts& duplicates_removed() const { return duplicates_; }

 private:
  Vocabulary vocab_;
  std::vector<Triple> train_;
  std::vector<Triple> dev_;
  std::vector<Triple> test_;
  DuplicateCounts duplicates_;
};

DatasetStats dataset_stats(const Dataset& d);

// Dev/test triples referencing an entity or relation that never occurs in train.
struct UnseenReport {
  std::size_t dev_triples = 0;
  std::size_t test_triples = 0;
};
UnseenReport unseen_heldout(const Dataset& d);

// Set of known triples with (head, relation) -> tails and (relation, tail) -> heads lookups.
class TripleIndex {
 public:
  TripleIndex() = default;
  explicit TripleIndex(std::span<const Triple> triples) { insert(triples); }

  static TripleIndex all_splits(const Dataset& d);

  void insert(const Triple& t);
  void insert(std::span<const Triple> triples) {
    for (const auto& t : triples) insert(t);
  }

  bool contains(const Triple& t) const { return triples_.contains(t); }
  std::size_t size() const { return triples_.size(); }

  // Sorted ascending.
  std::span<const EntityId> tails(EntityId head, RelationId relation) const;
  std::span<const EntityId> heads(RelationId relation, EntityId tail) const;

 private:
  static std::uint64_t key(EntityId e, RelationId r) {
    return (std::uint64_t{e.value} << 32) | r.value;
  }

  std::unordered_set<Triple, TripleHash> triples_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_;
};

enum class NodeKind : std::uint8_t { Class = 0, Concept = 1, Instance = 2, Literal = 3 };
enum class RelationKind : std::uint8_t { Object = 0, Data = 1, Meta = 2 };

std::string_view to_string(NodeKind kind);
std::string_view to_string(RelationKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<RelationKind> parse_relation_kind(std::string_view text);

inline constexpr std::array<std::string_view, 6> kMetaPropertyLabels = {
    "subClassOf", "broader", "type", "equivalentClass", "subPropertyOf", "equivalentPropertyOf"};

// Strips a namespace prefix ("rdfs:subClassOf" -> "subClassOf").
std::string_view local_name(std::string_view label);
bool is_meta_property_label(std::string_view label);

class NodeKindSet {
 public:
  constexpr NodeKindSet() = default;
  constexpr NodeKindSet(std::initializer_list<NodeKind> kinds) {
    for (auto k : kinds) insert(k);
  }
  constexpr void insert(NodeKind k) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  constexpr bool contains(NodeKind k) const { return (bits_ >> static_cast<unsigned>(k)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const NodeKindSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct RelationDecl {
  std::string label;
  RelationKind kind = RelationKind::Object;
  NodeKindSet domain;
  NodeKindSet range;
};

struct TaxonomyEdge {
  EntityId child;
  EntityId parent;
  auto operator<=>(const TaxonomyEdge&) const = default;
};

struct PropertyEdge {
  RelationId child;
  RelationId parent;
  auto operator<=>(const PropertyEdge&) const = default;
};

// Node typing, relation declarations and taxonomy edges. Construction checks
// declarations (non-empty domain/range, Meta only for the six meta labels);
// taxonomy acyclicity is what the ontology checks report on.
class OntologySchema {
 public:
  OntologySchema(std::map<EntityId, NodeKind> node_kinds, std::map<RelationId, RelationDecl> relations,
                 std::vector<TaxonomyEdge> taxonomy, std::vector<PropertyEdge> property_edges = {});

  std::optional<NodeKind> node_kind(EntityId e) const;
  const RelationDecl* relation(RelationId r) const;

  const std::map<EntityId, NodeKind>& node_kinds() const { return node_kinds_; }
  const std::map<RelationId, RelationDecl>& relations() const { return relations_; }
  std::span<const TaxonomyEdge> taxonomy() const { return taxonomy_; }
  std::span<const PropertyEdge> property_edges() const { return property_edges_; }

 private:
  std::map<EntityId, NodeKind> node_kinds_;
  std::map<RelationId, RelationDecl> relations_;
  std::vector<TaxonomyEdge> taxonomy_;
  std::vector<PropertyEdge> property_edges_;
};

}  // namespace kgbench

template <>
struct std::hash<kgbench::EntityId> {
  std::size_t operator()(kgbench::EntityId e) const noexcept { return std::hash<std::uint32_t>{}(e.value); }
};

template <>
struct std::hash<kgbench::RelationId> {
  std::size_t operator()(kgbench::RelationId r) const noexcept { return std::hash<std::uint32_t>{}(r.value); }
};
