#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "kgbench/core.hpp"
#include "kgbench/tensor.hpp"

namespace kgbench {

enum class ModelKind { TransE, TransH, TransD, DistMult, ComplEx, TuckER };

// Lowercase tags used on the command line and in checkpoint headers.
std::string_view model_tag(ModelKind kind);
ModelKind parse_model_tag(std::string_view tag);
inline constexpr std::array<ModelKind, 6> kAllModels = {ModelKind::TransE,   ModelKind::TransH,  ModelKind::TransD,
                                                        ModelKind::DistMult, ModelKind::ComplEx, ModelKind::TuckER};

// Parameter tensors. Shapes: Entity/EntityProj/EntityImag are |E| x d_e;
// Relation/Normal/RelationProj/RelationImag are |R| x d_r; Core is a single
// row holding the d_e x d_r x d_e TuckER core, index (i*d_r + j)*d_e + k.
enum class Slot : std::uint8_t { Entity, Relation, Normal, EntityProj, RelationProj, EntityImag, RelationImag, Core };

std::string_view slot_name(Slot slot);

// Tensor order for a model: the fixed checkpoint payload order.
std::span<const Slot> model_slots(ModelKind kind);

struct ModelDims {
  std::size_t entity_dim = 200;
  std::size_t relation_dim = 200;
};

template <typename Real>
struct ModelParams {
  ModelKind kind = ModelKind::TransE;
  // TransE distance norm, 1 or 2. Ignored by the other models.
  int norm = 2;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  ModelDims dims;

  Matrix<Real> entity;
  Matrix<Real> relation;
  Matrix<Real> normal;
  Matrix<Real> entity_proj;
  Matrix<Real> relation_proj;
  Matrix<Real> entity_imag;
  Matrix<Real> relation_imag;
  Matrix<Real> core;

  Matrix<Real>& tensor(Slot slot);
  const Matrix<Real>& tensor(Slot slot) const;
};

// Allocates zero tensors of the right shapes. Throws DimMismatch when the
// model needs d_e == d_r and they differ, or InvalidConfig for zero sizes.
template <typename Real>
ModelParams<Real> make_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations, ModelDims dims,
                              int norm = 2);

// Throws DimMismatch unless every tensor has the shape `make_params` would give.
template <typename Real>
void check_shapes(const ModelParams<Real>& params);

// Uniform in [-6/sqrt(d), 6/sqrt(d)] per embedding row (d = row width), TuckER
// core uniform in [-1, 1] / d_r; translational entity rows and TransH normals
// are scaled to unit norm once.
template <typename Real>
ModelParams<Real> init_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations, ModelDims dims,
                              std::uint64_t seed, int norm = 2);

struct RowKey {
  Slot slot;
  std::uint32_t row;
  auto operator<=>(const RowKey&) const = default;
};

// Gradient restricted to the parameter rows a computation touched. Ordered by
// RowKey so iteration (and therefore any reduction over it) is deterministic.
template <typename Real>
class SparseGradient {
 public:
  std::span<Real> row(RowKey key, std::size_t width) {
    auto& values = rows_[key];
    if (values.empty()) values.assign(width, Real{0});
    return values;
  }

  void add(RowKey key, std::span<const Real> values, Real scale = Real{1}) {
    auto target = row(key, values.size());
    for (std::size_t i = 0; i < values.size(); ++i) target[i] += scale * values[i];
  }

  void merge(const SparseGradient& other, Real scale = Real{1}) {
    for (const auto& [key, values] : other.rows_) add(key, values, scale);
  }

  std::span<const Real> find(RowKey key) const {
    auto it = rows_.find(key);
    if (it == rows_.end()) return {};
    return it->second;
  }

  const std::map<RowKey, std::vector<Real>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

 private:
  std::map<RowKey, std::vector<Real>> rows_;
};

// Plausibility f(h, r, t); higher is more plausible for every model.
template <typename Real>
Real score(const ModelParams<Real>& params, const Triple& t);

// Adds scale * df/dtheta for every row referenced by `t` into `out`.
template <typename Real>
void accumulate_score_grad(const ModelParams<Real>& params, const Triple& t, Real scale, SparseGradient<Real>& out);

template <typename Real>
SparseGradient<Real> grad(const ModelParams<Real>& params, const Triple& t) {
  SparseGradient<Real> out;
  accumulate_score_grad(params, t, Real{1}, out);
  return out;
}

// Scores every entity substituted on `side` of `t`; out.size() == num_entities.
template <typename Real>
void score_candidates(const ModelParams<Real>& params, const Triple& t, Side side, std::span<Real> out);

// Rows a triple reads, in RowKey order.
std::vector<RowKey> touched_rows(ModelKind kind, const Triple& t);

// Entity rows of TransE/H/D scaled into the unit ball; TransH normals rescaled
// to unit length. No-op for the bilinear models.
template <typename Real>
void project_constraints(ModelParams<Real>& params, std::span<const RowKey> touched);

// TuckER helpers: x_k = sum_ij W_ijk a_i b_j and y_i = sum_jk W_ijk b_j c_k.
template <typename Real>
void tucker_contract_head_relation(const ModelParams<Real>& params, std::span<const Real> head,
                                   std::span<const Real> relation, std::span<Real> out);
template <typename Real>
void tucker_contract_relation_tail(const ModelParams<Real>& params, std::span<const Real> relation,
                                   std::span<const Real> tail, std::span<Real> out);

}  // namespace kgbench
