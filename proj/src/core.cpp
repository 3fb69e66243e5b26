#include "kgbench/core.hpp"

#include <algorithm>

#include "kgbench/error.hpp"
#include "kgbench/log.hpp"

namespace kgbench {

Vocabulary Vocabulary::from_labels(std::vector<std::string> entities, std::vector<std::string> relations) {
  Vocabulary vocab;
  for (auto& label : entities) {
    if (vocab.entity_index_.contains(label)) {
      throw Error(ErrorCode::DuplicateLabel, "entity label '" + label + "' appears twice");
    }
    vocab.entity_index_.emplace(label, static_cast<std::uint32_t>(vocab.entities_.size()));
    vocab.entities_.push_back(std::move(label));
  }
  for (auto& label : relations) {
    if (vocab.relation_index_.contains(label)) {
      throw Error(ErrorCode::DuplicateLabel, "relation label '" + label + "' appears twice");
    }
    vocab.relation_index_.emplace(label, static_cast<std::uint32_t>(vocab.relations_.size()));
    vocab.relations_.push_back(std::move(label));
  }
  return vocab;
}

EntityId Vocabulary::intern_entity(const std::string& label) {
  auto [it, inserted] = entity_index_.try_emplace(label, static_cast<std::uint32_t>(entities_.size()));
  if (inserted) entities_.push_back(label);
  return EntityId{it->second};
}

RelationId Vocabulary::intern_relation(const std::string& label) {
  auto [it, inserted] = relation_index_.try_emplace(label, static_cast<std::uint32_t>(relations_.size()));
  if (inserted) relations_.push_back(label);
  return RelationId{it->second};
}

std::optional<EntityId> Vocabulary::find_entity(const std::string& label) const {
  auto it = entity_index_.find(label);
  if (it == entity_index_.end()) return std::nullopt;
  return EntityId{it->second};
}

std::optional<RelationId> Vocabulary::find_relation(const std::string& label) const {
  auto it = relation_index_.find(label);
  if (it == relation_index_.end()) return std::nullopt;
  return RelationId{it->second};
}

const std::string& Vocabulary::entity_label(EntityId id) const {
  if (id.value >= entities_.size()) {
    throw Error(ErrorCode::InvalidId, "entity id " + std::to_string(id.value) + " out of range");
  }
  return entities_[id.value];
}

const std::string& Vocabulary::relation_label(RelationId id) const {
  if (id.value >= relations_.size()) {
    throw Error(ErrorCode::InvalidId, "relation id " + std::to_string(id.value) + " out of range");
  }
  return relations_[id.value];
}

EncodedTriples encode_triples(std::span<const RawTriple> raw, VocabPolicy policy, Vocabulary vocab) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "no triples to encode");

  EncodedTriples out;
  out.triples.reserve(raw.size());
  if (policy == VocabPolicy::Grow) {
    for (const auto& [h, r, t] : raw) {
      // Interning order fixes ids: head, relation, tail for each line in turn.
      const EntityId head = vocab.intern_entity(h);
      const RelationId rel = vocab.intern_relation(r);
      const EntityId tail = vocab.intern_entity(t);
      out.triples.push_back({head, rel, tail});
    }
  } else {
    for (const auto& [h, r, t] : raw) {
      const auto head = vocab.find_entity(h);
      const auto rel = vocab.find_relation(r);
      const auto tail = vocab.find_entity(t);
      if (!head) throw Error(ErrorCode::UnknownLabel, "entity '" + h + "'");
      if (!rel) throw Error(ErrorCode::UnknownLabel, "relation '" + r + "'");
      if (!tail) throw Error(ErrorCode::UnknownLabel, "entity '" + t + "'");
      out.triples.push_back({*head, *rel, *tail});
    }
  }
  out.vocabulary = std::move(vocab);
  return out;
}

RawTriple decode_triple(const Vocabulary& vocab, const Triple& t) {
  return {vocab.entity_label(t.head), vocab.relation_label(t.relation), vocab.entity_label(t.tail)};
}

namespace {

std::size_t dedup_in_place(std::vector<Triple>& split) {
  std::unordered_set<Triple, TripleHash> seen;
  seen.reserve(split.size());
  const auto before = split.size();
  std::erase_if(split, [&](const Triple& t) { return !seen.insert(t).second; });
  return before - split.size();
}

void validate_ids(const Vocabulary& vocab, std::span<const Triple> split, const char* name) {
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (!vocab.contains(split[i])) {
      throw Error(ErrorCode::InvalidId, std::string(name) + " triple #" + std::to_string(i) +
                                            " references an id outside the vocabulary");
    }
  }
}

}  // namespace

Dataset::Dataset(Vocabulary vocab, std::vector<Triple> train, std::vector<Triple> dev, std::vector<Triple> test)
    : vocab_(std::move(vocab)), train_(std::move(train)), dev_(std::move(dev)), test_(std::move(test)) {
  validate_ids(vocab_, train_, "train");
  validate_ids(vocab_, dev_, "dev");
  validate_ids(vocab_, test_, "test");

  duplicates_.train = dedup_in_place(train_);
  duplicates_.dev = dedup_in_place(dev_);
  duplicates_.test = dedup_in_place(test_);
  const auto total_dups = duplicates_.train + duplicates_.dev + duplicates_.test;
  if (total_dups > 0) {
    log::info("removed duplicate triples: train {}, dev {}, test {}", duplicates_.train, duplicates_.dev,
              duplicates_.test);
  }

  std::unordered_set<Triple, TripleHash> train_set(train_.begin(), train_.end());
  std::unordered_set<Triple, TripleHash> dev_set(dev_.begin(), dev_.end());
  for (const auto& t : dev_) {
    if (train_set.contains(t)) throw Error(ErrorCode::OverlappingSplits, "a dev triple also occurs in train");
  }
  for (const auto& t : test_) {
    if (train_set.contains(t)) throw Error(ErrorCode::OverlappingSplits, "a test triple also occurs in train");
    if (dev_set.contains(t)) throw Error(ErrorCode::OverlappingSplits, "a test triple also occurs in dev");
  }
}

DatasetStats dataset_stats(const Dataset& d) {
  return {d.vocabulary().num_entities(), d.vocabulary().num_relations(), d.train().size(), d.dev().size(),
          d.test().size()};
}

UnseenReport unseen_heldout(const Dataset& d) {
  std::vector<bool> entity_seen(d.vocabulary().num_entities(), false);
  std::vector<bool> relation_seen(d.vocabulary().num_relations(), false);
  for (const auto& t : d.train()) {
    entity_seen[t.head.value] = entity_seen[t.tail.value] = true;
    relation_seen[t.relation.value] = true;
  }
  auto unseen = [&](const Triple& t) {
    return !entity_seen[t.head.value] || !entity_seen[t.tail.value] || !relation_seen[t.relation.value];
  };
  UnseenReport report;
  report.dev_triples = static_cast<std::size_t>(std::count_if(d.dev().begin(), d.dev().end(), unseen));
  report.test_triples = static_cast<std::size_t>(std::count_if(d.test().begin(), d.test().end(), unseen));
  return report;
}

TripleIndex TripleIndex::all_splits(const Dataset& d) {
  TripleIndex index;
  index.insert(d.train());
  index.insert(d.dev());
  index.insert(d.test());
  return index;
}

void TripleIndex::insert(const Triple& t) {
  if (!triples_.insert(t).second) return;
  auto sorted_insert = [](std::vector<EntityId>& list, EntityId e) {
    list.insert(std::lower_bound(list.begin(), list.end(), e), e);
  };
  sorted_insert(tails_[key(t.head, t.relation)], t.tail);
  sorted_insert(heads_[key(t.tail, t.relation)], t.head);
}

std::span<const EntityId> TripleIndex::tails(EntityId head, RelationId relation) const {
  auto it = tails_.find(key(head, relation));
  if (it == tails_.end()) return {};
  return it->second;
}

std::span<const EntityId> TripleIndex::heads(RelationId relation, EntityId tail) const {
  auto it = heads_.find(key(tail, relation));
  if (it == heads_.end()) return {};
  return it->second;
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Class: return "Class";
    case NodeKind::Concept: return "Concept";
    case NodeKind::Instance: return "Instance";
    case NodeKind::Literal: return "Literal";
  }
  return "?";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Object: return "object";
    case RelationKind::Data: return "data";
    case RelationKind::Meta: return "meta";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (auto k : {NodeKind::Class, NodeKind::Concept, NodeKind::Instance, NodeKind::Literal}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view text) {
  for (auto k : {RelationKind::Object, RelationKind::Data, RelationKind::Meta}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string_view local_name(std::string_view label) {
  const auto cut = label.find_last_of(":#/");
  return cut == std::string_view::npos ? label : label.substr(cut + 1);
}

bool is_meta_property_label(std::string_view label) {
  const auto name = local_name(label);
  return std::find(kMetaPropertyLabels.begin(), kMetaPropertyLabels.end(), name) != kMetaPropertyLabels.end();
}

OntologySchema::OntologySchema(std::map<EntityId, NodeKind> node_kinds, std::map<RelationId, RelationDecl> relations,
                               std::vector<TaxonomyEdge> taxonomy, std::vector<PropertyEdge> property_edges)
    : node_kinds_(std::move(node_kinds)),
      relations_(std::move(relations)),
      taxonomy_(std::move(taxonomy)),
      property_edges_(std::move(property_edges)) {
  for (const auto& [id, decl] : relations_) {
    if (decl.domain.empty() || decl.range.empty()) {
      throw Error(ErrorCode::InvalidSchema, "relation '" + decl.label + "' has an empty domain or range");
    }
    if (decl.kind == RelationKind::Meta && !is_meta_property_label(decl.label)) {
      throw Error(ErrorCode::InvalidSchema, "relation '" + decl.label + "' is not a meta-property label");
    }
  }
}

std::optional<NodeKind> OntologySchema::node_kind(EntityId e) const {
  auto it = node_kinds_.find(e);
  if (it == node_kinds_.end()) return std::nullopt;
  return it->second;
}

const RelationDecl* OntologySchema::relation(RelationId r) const {
  auto it = relations_.find(r);
  return it == relations_.end() ? nullptr : &it->second;
}

}  // namespace kgbench
