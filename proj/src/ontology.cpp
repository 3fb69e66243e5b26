#include "kgbench/ontology.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "kgbench/error.hpp"

namespace kgbench {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::CycleDetected: return "CycleDetected";
    case Rule::PropertyCycleDetected: return "PropertyCycleDetected";
    case Rule::DomainViolation: return "DomainViolation";
    case Rule::RangeViolation: return "RangeViolation";
  }
  return "?";
}

void ValidationReport::append(ValidationReport other) {
  for (auto& v : other.violations) violations.push_back(std::move(v));
  for (const auto& [level, count] : other.level_histogram) level_histogram[level] += count;
  for (const auto& [kind, count] : other.relation_kind_counts) relation_kind_counts[kind] += count;
}

namespace {

// Nodes that lie on a directed cycle (SCC of size > 1, or a self-loop).
// Iterative Tarjan so deep taxonomies do not exhaust the stack.
std::vector<bool> nodes_on_cycles(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false), cyclic(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (node, next edge)
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      if (edge < adj[v].size()) {
        const std::size_t w = adj[v][edge++];
        if (w == v) cyclic[v] = true;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != done);
        if (component.size() > 1) {
          for (auto c : component) cyclic[c] = true;
        }
      }
    }
  }
  return cyclic;
}

template <typename Id>
struct DenseGraph {
  std::vector<Id> nodes;  // sorted
  std::vector<std::vector<std::size_t>> parents;

  std::size_t index_of(Id id) const {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), id) - nodes.begin());
  }
};

template <typename Id, typename Edge>
DenseGraph<Id> build_graph(std::span<const Edge> edges, std::vector<Id> extra_nodes) {
  DenseGraph<Id> g;
  g.nodes = std::move(extra_nodes);
  for (const auto& e : edges) {
    g.nodes.push_back(e.child);
    g.nodes.push_back(e.parent);
  }
  std::sort(g.nodes.begin(), g.nodes.end());
  g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
  g.parents.resize(g.nodes.size());
  for (const auto& e : edges) g.parents[g.index_of(e.child)].push_back(g.index_of(e.parent));
  for (auto& p : g.parents) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return g;
}

}  // namespace

ValidationReport check_taxonomy(const OntologySchema& schema) {
  ValidationReport report;

  std::vector<EntityId> typed_nodes;
  for (const auto& [id, kind] : schema.node_kinds()) {
    if (kind == NodeKind::Class || kind == NodeKind::Concept) typed_nodes.push_back(id);
  }
  const auto g = build_graph<EntityId, TaxonomyEdge>(schema.taxonomy(), std::move(typed_nodes));
  const std::size_t n = g.nodes.size();
  const auto cyclic = nodes_on_cycles(g.parents);
  for (std::size_t i = 0; i < n; ++i) {
    if (cyclic[i]) {
      report.violations.push_back({Rule::CycleDetected, std::nullopt, g.nodes[i], std::nullopt,
                                   "taxonomy node lies on a subClassOf/broader cycle"});
    }
  }

  // Longest path to a root: Kahn's order from roots down to children.
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<std::size_t> pending(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    pending[c] = g.parents[c].size();
    for (auto p : g.parents[c]) children[p].push_back(c);
  }
  std::vector<std::size_t> level(n, 0), queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) {
      level[i] = 1;
      queue.push_back(i);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto v = queue[head];
    ++report.level_histogram[level[v]];
    for (auto c : children[v]) {
      level[c] = std::max(level[c], level[v] + 1);
      if (--pending[c] == 0) queue.push_back(c);
    }
  }

  const auto pg = build_graph<RelationId, PropertyEdge>(schema.property_edges(), {});
  const auto property_cyclic = nodes_on_cycles(pg.parents);
  for (std::size_t i = 0; i < pg.nodes.size(); ++i) {
    if (property_cyclic[i]) {
      report.violations.push_back({Rule::PropertyCycleDetected, std::nullopt, std::nullopt, pg.nodes[i],
                                   "property lies on a subPropertyOf cycle"});
    }
  }
  return report;
}

ValidationReport check_domain_range(const Dataset& d, const OntologySchema& schema) {
  ValidationReport report;
  const auto& vocab = d.vocabulary();
  auto describe = [&](std::optional<NodeKind> kind) {
    return kind ? std::string(to_string(*kind)) : std::string("untyped");
  };
  for (auto split : {d.train(), d.dev(), d.test()}) {
    for (const auto& t : split) {
      const auto* decl = schema.relation(t.relation);
      if (decl == nullptr) {
        throw Error(ErrorCode::UndeclaredRelation, "relation '" + vocab.relation_label(t.relation) + "'");
      }
      ++report.relation_kind_counts[decl->kind];
      const auto head_kind = schema.node_kind(t.head);
      const auto tail_kind = schema.node_kind(t.tail);
      if (!head_kind || !decl->domain.contains(*head_kind)) {
        report.violations.push_back({Rule::DomainViolation, t, t.head, t.relation,
                                     "head '" + vocab.entity_label(t.head) + "' is " + describe(head_kind) +
                                         ", outside the domain of " + decl->label});
      }
      if (!tail_kind || !decl->range.contains(*tail_kind)) {
        report.violations.push_back({Rule::RangeViolation, t, t.tail, t.relation,
                                     "tail '" + vocab.entity_label(t.tail) + "' is " + describe(tail_kind) +
                                         ", outside the range of " + decl->label});
      }
    }
  }
  return report;
}

std::vector<std::vector<EntityId>> equivalence_closure(std::span<const std::pair<EntityId, EntityId>> pairs) {
  std::vector<EntityId> ids;
  for (const auto& [a, b] : pairs) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&](EntityId e) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), e) - ids.begin());
  };

  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [a, b] : pairs) {
    const auto ra = find(index_of(a));
    const auto rb = find(index_of(b));
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::map<std::size_t, std::vector<EntityId>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[find(i)].push_back(ids[i]);
  // ids is sorted and every root is its component's smallest index, so map
  // order is already "by smallest member".
  std::vector<std::vector<EntityId>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

std::vector<std::pair<EntityId, EntityId>> equivalence_pairs(const Dataset& d) {
  std::vector<std::pair<EntityId, EntityId>> out;
  const auto& vocab = d.vocabulary();
  for (auto split : {d.train(), d.dev(), d.test()}) {
    for (const auto& t : split) {
      if (local_name(vocab.relation_label(t.relation)) == "equivalentClass") out.emplace_back(t.head, t.tail);
    }
  }
  return out;
}

namespace {

NodeKindSet parse_kind_set(const nlohmann::json& list, const std::string& where) {
  NodeKindSet set;
  if (!list.is_array()) throw Error(ErrorCode::InvalidSchema, where + " must be an array of node kinds");
  for (const auto& item : list) {
    const auto kind = item.is_string() ? parse_node_kind(item.get<std::string>()) : std::nullopt;
    if (!kind) throw Error(ErrorCode::InvalidSchema, where + " has an unknown node kind " + item.dump());
    set.insert(*kind);
  }
  return set;
}

std::pair<std::string, std::string> parse_pair(const nlohmann::json& item, const char* where) {
  if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
    throw Error(ErrorCode::InvalidSchema, std::string(where) + " entries must be [child, parent] label pairs");
  }
  return {item[0].get<std::string>(), item[1].get<std::string>()};
}

}  // namespace

OntologySchema parse_schema(const nlohmann::json& doc, Vocabulary& vocab, const Dataset* d) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidSchema, "schema document must be a JSON object");

  const auto node_doc = doc.value("nodes", nlohmann::json::object());
  const auto relation_doc = doc.value("relations", nlohmann::json::object());
  const auto taxonomy_doc = doc.value("taxonomy", nlohmann::json::array());
  const auto property_doc = doc.value("property_hierarchy", nlohmann::json::array());
  std::map<EntityId, NodeKind> nodes;
  for (const auto& [label, kind_json] : node_doc.items()) {
    const auto kind = kind_json.is_string() ? parse_node_kind(kind_json.get<std::string>()) : std::nullopt;
    if (!kind) throw Error(ErrorCode::InvalidSchema, "node '" + label + "' has an unknown kind");
    nodes[vocab.intern_entity(label)] = *kind;
  }

  std::map<RelationId, RelationDecl> relations;
  for (const auto& [label, decl_json] : relation_doc.items()) {
    if (!decl_json.is_object()) throw Error(ErrorCode::InvalidSchema, "relation '" + label + "' must be an object");
    RelationDecl decl;
    decl.label = label;
    const auto kind = parse_relation_kind(decl_json.value("kind", std::string("object")));
    if (!kind) throw Error(ErrorCode::InvalidSchema, "relation '" + label + "' has an unknown kind");
    decl.kind = *kind;
    decl.domain = parse_kind_set(decl_json.value("domain", nlohmann::json::array()), "domain of " + label);
    decl.range = parse_kind_set(decl_json.value("range", nlohmann::json::array()), "range of " + label);
    relations[vocab.intern_relation(label)] = decl;
  }

  std::vector<TaxonomyEdge> taxonomy;
  for (const auto& item : taxonomy_doc) {
    const auto [child, parent] = parse_pair(item, "taxonomy");
    taxonomy.push_back({vocab.intern_entity(child), vocab.intern_entity(parent)});
  }
  if (doc.value("taxonomy_from_triples", false) && d != nullptr) {
    const auto& dv = d->vocabulary();
    for (auto split : {d->train(), d->dev(), d->test()}) {
      for (const auto& t : split) {
        const auto name = local_name(dv.relation_label(t.relation));
        if (name == "subClassOf" || name == "broader") taxonomy.push_back({t.head, t.tail});
      }
    }
  }

  std::vector<PropertyEdge> property_edges;
  for (const auto& item : property_doc) {
    const auto [child, parent] = parse_pair(item, "property_hierarchy");
    property_edges.push_back({vocab.intern_relation(child), vocab.intern_relation(parent)});
  }
  return OntologySchema(std::move(nodes), std::move(relations), std::move(taxonomy), std::move(property_edges));
}

nlohmann::json to_json(const ValidationReport& report, const Vocabulary& vocab) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    nlohmann::json item{{"rule", to_string(v.rule)}, {"message", v.message}};
    if (v.triple) {
      const auto raw = decode_triple(vocab, *v.triple);
      item["triple"] = {raw[0], raw[1], raw[2]};
    }
    if (v.node && v.node->value < vocab.num_entities()) item["node"] = vocab.entity_label(*v.node);
    if (v.relation && v.relation->value < vocab.num_relations()) item["relation"] = vocab.relation_label(*v.relation);
    violations.push_back(std::move(item));
  }
  nlohmann::json levels = nlohmann::json::object();
  for (const auto& [level, count] : report.level_histogram) levels[std::to_string(level)] = count;
  nlohmann::json kinds = nlohmann::json::object();
  for (const auto& [kind, count] : report.relation_kind_counts) kinds[std::string(to_string(kind))] = count;
  return {{"conforms", report.conforms()},
          {"violations", std::move(violations)},
          {"taxonomy_levels", std::move(levels)},
          {"relation_kind_counts", std::move(kinds)}};
}

}  // namespace kgbench
