#include "kgbench/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kgbench/error.hpp"
#include "kgbench/rng.hpp"

namespace kgbench {

std::string_view model_tag(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransE: return "transe";
    case ModelKind::TransH: return "transh";
    case ModelKind::TransD: return "transd";
    case ModelKind::DistMult: return "distmult";
    case ModelKind::ComplEx: return "complex";
    case ModelKind::TuckER: return "tucker";
  }
  return "?";
}

ModelKind parse_model_tag(std::string_view tag) {
  for (auto kind : kAllModels) {
    if (model_tag(kind) == tag) return kind;
  }
  throw Error(ErrorCode::UnknownModel, "unknown model tag '" + std::string(tag) + "'");
}

std::string_view slot_name(Slot slot) {
  switch (slot) {
    case Slot::Entity: return "entity";
    case Slot::Relation: return "relation";
    case Slot::Normal: return "normal";
    case Slot::EntityProj: return "entity_proj";
    case Slot::RelationProj: return "relation_proj";
    case Slot::EntityImag: return "entity_imag";
    case Slot::RelationImag: return "relation_imag";
    case Slot::Core: return "core";
  }
  return "?";
}

std::span<const Slot> model_slots(ModelKind kind) {
  static constexpr Slot kBasic[] = {Slot::Entity, Slot::Relation};
  static constexpr Slot kTransH[] = {Slot::Entity, Slot::Relation, Slot::Normal};
  static constexpr Slot kTransD[] = {Slot::Entity, Slot::Relation, Slot::EntityProj, Slot::RelationProj};
  static constexpr Slot kComplEx[] = {Slot::Entity, Slot::Relation, Slot::EntityImag, Slot::RelationImag};
  static constexpr Slot kTuckER[] = {Slot::Entity, Slot::Relation, Slot::Core};
  switch (kind) {
    case ModelKind::TransE:
    case ModelKind::DistMult: return kBasic;
    case ModelKind::TransH: return kTransH;
    case ModelKind::TransD: return kTransD;
    case ModelKind::ComplEx: return kComplEx;
    case ModelKind::TuckER: return kTuckER;
  }
  return {};
}

template <typename Real>
Matrix<Real>& ModelParams<Real>::tensor(Slot slot) {
  return const_cast<Matrix<Real>&>(std::as_const(*this).tensor(slot));
}

template <typename Real>
const Matrix<Real>& ModelParams<Real>::tensor(Slot slot) const {
  switch (slot) {
    case Slot::Entity: return entity;
    case Slot::Relation: return relation;
    case Slot::Normal: return normal;
    case Slot::EntityProj: return entity_proj;
    case Slot::RelationProj: return relation_proj;
    case Slot::EntityImag: return entity_imag;
    case Slot::RelationImag: return relation_imag;
    case Slot::Core: return core;
  }
  return entity;
}

namespace {

bool needs_equal_dims(ModelKind kind) { return kind != ModelKind::TransD && kind != ModelKind::TuckER; }

struct Shape {
  std::size_t rows;
  std::size_t cols;
};

Shape slot_shape(Slot slot, std::size_t num_entities, std::size_t num_relations, ModelDims dims) {
  switch (slot) {
    case Slot::Entity:
    case Slot::EntityProj:
    case Slot::EntityImag: return {num_entities, dims.entity_dim};
    case Slot::Relation:
    case Slot::Normal:
    case Slot::RelationProj:
    case Slot::RelationImag: return {num_relations, dims.relation_dim};
    case Slot::Core: return {1, dims.entity_dim * dims.relation_dim * dims.entity_dim};
  }
  return {0, 0};
}

bool is_translational(ModelKind kind) {
  return kind == ModelKind::TransE || kind == ModelKind::TransH || kind == ModelKind::TransD;
}

template <typename Real>
Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

template <typename Real>
Real l2_norm(std::span<const Real> a) {
  return std::sqrt(dot(a, a));
}

template <typename Real>
void check_triple(const ModelParams<Real>& params, const Triple& t) {
  if (t.head.value >= params.num_entities || t.tail.value >= params.num_entities ||
      t.relation.value >= params.num_relations) {
    throw Error(ErrorCode::InvalidId, "triple references a row outside the parameter tensors");
  }
}

// TransD projection: x_perp = I x + (x_p . x) r_p, with I the d_r x d_e identity.
template <typename Real>
void transd_project(std::span<const Real> x, std::span<const Real> x_proj, std::span<const Real> r_proj,
                    std::span<Real> out) {
  const Real coef = dot(x_proj, x);
  const std::size_t shared = std::min(x.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (i < shared ? x[i] : Real{0}) + coef * r_proj[i];
}

}  // namespace

template <typename Real>
ModelParams<Real> make_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations, ModelDims dims,
                              int norm) {
  if (num_entities == 0 || num_relations == 0 || dims.entity_dim == 0 || dims.relation_dim == 0) {
    throw Error(ErrorCode::InvalidConfig, "entity/relation counts and dimensions must be positive");
  }
  if (needs_equal_dims(kind) && dims.entity_dim != dims.relation_dim) {
    throw Error(ErrorCode::DimMismatch, std::string(model_tag(kind)) + " needs entity_dim == relation_dim");
  }
  if (norm != 1 && norm != 2) throw Error(ErrorCode::InvalidConfig, "norm must be 1 or 2");
  ModelParams<Real> params;
  params.kind = kind;
  params.norm = norm;
  params.num_entities = num_entities;
  params.num_relations = num_relations;
  params.dims = dims;
  for (Slot slot : model_slots(kind)) {
    const auto shape = slot_shape(slot, num_entities, num_relations, dims);
    params.tensor(slot) = Matrix<Real>(shape.rows, shape.cols);
  }
  return params;
}

template <typename Real>
void check_shapes(const ModelParams<Real>& params) {
  if (needs_equal_dims(params.kind) && params.dims.entity_dim != params.dims.relation_dim) {
    throw Error(ErrorCode::DimMismatch, std::string(model_tag(params.kind)) + " needs entity_dim == relation_dim");
  }
  for (Slot slot : model_slots(params.kind)) {
    const auto shape = slot_shape(slot, params.num_entities, params.num_relations, params.dims);
    const auto& m = params.tensor(slot);
    if (m.rows() != shape.rows || m.cols() != shape.cols) {
      throw Error(ErrorCode::DimMismatch, "tensor '" + std::string(slot_name(slot)) + "' has shape " +
                                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                              ", expected " + std::to_string(shape.rows) + "x" +
                                              std::to_string(shape.cols));
    }
  }
}

template <typename Real>
ModelParams<Real> init_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations, ModelDims dims,
                              std::uint64_t seed, int norm) {
  auto params = make_params<Real>(kind, num_entities, num_relations, dims, norm);
  for (Slot slot : model_slots(kind)) {
    auto& m = params.tensor(slot);
    CounterRng rng(seed, Stage::Init, static_cast<std::uint32_t>(slot));
    const double bound = slot == Slot::Core ? 1.0 / static_cast<double>(dims.relation_dim)
                                            : 6.0 / std::sqrt(static_cast<double>(m.cols()));
    for (auto& v : m.values()) v = static_cast<Real>((2.0 * rng.uniform() - 1.0) * bound);
  }
  auto normalize_rows = [](Matrix<Real>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      auto row = m.row(i);
      const Real n = l2_norm<Real>(row);
      if (n > 0) {
        for (auto& v : row) v /= n;
      }
    }
  };
  if (is_translational(kind)) normalize_rows(params.entity);
  if (kind == ModelKind::TransH) normalize_rows(params.normal);
  return params;
}

template <typename Real>
void tucker_contract_head_relation(const ModelParams<Real>& params, std::span<const Real> head,
                                   std::span<const Real> relation, std::span<Real> out) {
  const std::size_t de = params.dims.entity_dim;
  const std::size_t dr = params.dims.relation_dim;
  const auto w = params.core.values();
  std::fill(out.begin(), out.end(), Real{0});
  for (std::size_t i = 0; i < de; ++i) {
    for (std::size_t j = 0; j < dr; ++j) {
      const Real coef = head[i] * relation[j];
      const Real* slice = w.data() + (i * dr + j) * de;
      for (std::size_t k = 0; k < de; ++k) out[k] += coef * slice[k];
    }
  }
}

template <typename Real>
void tucker_contract_relation_tail(const ModelParams<Real>& params, std::span<const Real> relation,
                                   std::span<const Real> tail, std::span<Real> out) {
  const std::size_t de = params.dims.entity_dim;
  const std::size_t dr = params.dims.relation_dim;
  const auto w = params.core.values();
  for (std::size_t i = 0; i < de; ++i) {
    Real sum = 0;
    for (std::size_t j = 0; j < dr; ++j) {
      const Real* slice = w.data() + (i * dr + j) * de;
      sum += relation[j] * dot<Real>({slice, de}, tail);
    }
    out[i] = sum;
  }
}

template <typename Real>
Real score(const ModelParams<Real>& params, const Triple& t) {
  check_triple(params, t);
  const auto h = params.entity.row(t.head.value);
  const auto r = params.relation.row(t.relation.value);
  const auto tl = params.entity.row(t.tail.value);
  switch (params.kind) {
    case ModelKind::TransE: {
      Real sum = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const Real v = h[i] + r[i] - tl[i];
        sum += params.norm == 1 ? std::abs(v) : v * v;
      }
      return params.norm == 1 ? -sum : -std::sqrt(sum);
    }
    case ModelKind::TransH: {
      const auto w = params.normal.row(t.relation.value);
      Real s = 0;
      for (std::size_t i = 0; i < h.size(); ++i) s += w[i] * (h[i] - tl[i]);
      Real sum = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const Real v = (h[i] - tl[i]) - s * w[i] + r[i];
        sum += v * v;
      }
      return -sum;
    }
    case ModelKind::TransD: {
      const auto rp = params.relation_proj.row(t.relation.value);
      std::vector<Real> hp(r.size()), tp(r.size());
      transd_project<Real>(h, params.entity_proj.row(t.head.value), rp, hp);
      transd_project<Real>(tl, params.entity_proj.row(t.tail.value), rp, tp);
      Real sum = 0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Real v = hp[i] + r[i] - tp[i];
        sum += v * v;
      }
      return -sum;
    }
    case ModelKind::DistMult: {
      Real sum = 0;
      for (std::size_t i = 0; i < h.size(); ++i) sum += h[i] * r[i] * tl[i];
      return sum;
    }
    case ModelKind::ComplEx: {
      const auto hi = params.entity_imag.row(t.head.value);
      const auto ri = params.relation_imag.row(t.relation.value);
      const auto ti = params.entity_imag.row(t.tail.value);
      Real sum = 0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        sum += h[i] * r[i] * tl[i] + hi[i] * r[i] * ti[i] + h[i] * ri[i] * ti[i] - hi[i] * ri[i] * tl[i];
      }
      return sum;
    }
    case ModelKind::TuckER: {
      std::vector<Real> x(params.dims.entity_dim);
      tucker_contract_head_relation<Real>(params, h, r, x);
      return dot<Real>(x, tl);
    }
  }
  return 0;
}

template <typename Real>
void accumulate_score_grad(const ModelParams<Real>& params, const Triple& t, Real scale, SparseGradient<Real>& out) {
  check_triple(params, t);
  const auto h = params.entity.row(t.head.value);
  const auto r = params.relation.row(t.relation.value);
  const auto tl = params.entity.row(t.tail.value);
  const RowKey head_key{Slot::Entity, t.head.value};
  const RowKey tail_key{Slot::Entity, t.tail.value};
  const RowKey rel_key{Slot::Relation, t.relation.value};
  const std::size_t de = params.dims.entity_dim;
  const std::size_t dr = params.dims.relation_dim;

  switch (params.kind) {
    case ModelKind::TransE: {
      std::vector<Real> g(de);
      if (params.norm == 1) {
        for (std::size_t i = 0; i < de; ++i) {
          const Real v = h[i] + r[i] - tl[i];
          g[i] = v > 0 ? Real{-1} : (v < 0 ? Real{1} : Real{0});
        }
      } else {
        Real sum = 0;
        for (std::size_t i = 0; i < de; ++i) {
          g[i] = h[i] + r[i] - tl[i];
          sum += g[i] * g[i];
        }
        const Real n = std::sqrt(sum);
        for (auto& v : g) v = n > 0 ? -v / n : Real{0};
      }
      out.add(head_key, g, scale);
      out.add(rel_key, g, scale);
      out.add(tail_key, g, -scale);
      return;
    }
    case ModelKind::TransH: {
      const auto w = params.normal.row(t.relation.value);
      std::vector<Real> u(de), g(de), du(de), dw(de);
      Real s = 0;
      for (std::size_t i = 0; i < de; ++i) {
        u[i] = h[i] - tl[i];
        s += w[i] * u[i];
      }
      Real gw = 0;
      for (std::size_t i = 0; i < de; ++i) {
        g[i] = -2 * (u[i] - s * w[i] + r[i]);
        gw += g[i] * w[i];
      }
      for (std::size_t i = 0; i < de; ++i) {
        du[i] = g[i] - w[i] * gw;
        dw[i] = -gw * u[i] - s * g[i];
      }
      out.add(head_key, du, scale);
      out.add(tail_key, du, -scale);
      out.add(rel_key, g, scale);
      out.add({Slot::Normal, t.relation.value}, dw, scale);
      return;
    }
    case ModelKind::TransD: {
      const auto hproj = params.entity_proj.row(t.head.value);
      const auto tproj = params.entity_proj.row(t.tail.value);
      const auto rp = params.relation_proj.row(t.relation.value);
      std::vector<Real> hp(dr), tp(dr), g(dr);
      transd_project<Real>(h, hproj, rp, hp);
      transd_project<Real>(tl, tproj, rp, tp);
      for (std::size_t i = 0; i < dr; ++i) g[i] = -2 * (hp[i] + r[i] - tp[i]);
      const Real a = dot<Real>(rp, g);
      const Real hcoef = dot<Real>(hproj, h);
      const Real tcoef = dot<Real>(tproj, tl);
      const std::size_t shared = std::min(de, dr);

      std::vector<Real> dh(de), dt(de), dhp(de), dtp(de), drp(dr);
      for (std::size_t i = 0; i < de; ++i) {
        const Real gi = i < shared ? g[i] : Real{0};
        dh[i] = gi + a * hproj[i];
        dt[i] = -(gi + a * tproj[i]);
        dhp[i] = a * h[i];
        dtp[i] = -a * tl[i];
      }
      for (std::size_t i = 0; i < dr; ++i) drp[i] = (hcoef - tcoef) * g[i];
      out.add(head_key, dh, scale);
      out.add(tail_key, dt, scale);
      out.add(rel_key, g, scale);
      out.add({Slot::EntityProj, t.head.value}, dhp, scale);
      out.add({Slot::EntityProj, t.tail.value}, dtp, scale);
      out.add({Slot::RelationProj, t.relation.value}, drp, scale);
      return;
    }
    case ModelKind::DistMult: {
      std::vector<Real> dh(de), dr_(de), dt(de);
      for (std::size_t i = 0; i < de; ++i) {
        dh[i] = r[i] * tl[i];
        dr_[i] = h[i] * tl[i];
        dt[i] = h[i] * r[i];
      }
      out.add(head_key, dh, scale);
      out.add(rel_key, dr_, scale);
      out.add(tail_key, dt, scale);
      return;
    }
    case ModelKind::ComplEx: {
      const auto hi = params.entity_imag.row(t.head.value);
      const auto ri = params.relation_imag.row(t.relation.value);
      const auto ti = params.entity_imag.row(t.tail.value);
      std::vector<Real> dhr(de), dhi(de), drr(de), dri(de), dtr(de), dti(de);
      for (std::size_t i = 0; i < de; ++i) {
        dhr[i] = r[i] * tl[i] + ri[i] * ti[i];
        dhi[i] = r[i] * ti[i] - ri[i] * tl[i];
        drr[i] = h[i] * tl[i] + hi[i] * ti[i];
        dri[i] = h[i] * ti[i] - hi[i] * tl[i];
        dtr[i] = h[i] * r[i] - hi[i] * ri[i];
        dti[i] = hi[i] * r[i] + h[i] * ri[i];
      }
      out.add(head_key, dhr, scale);
      out.add({Slot::EntityImag, t.head.value}, dhi, scale);
      out.add(rel_key, drr, scale);
      out.add({Slot::RelationImag, t.relation.value}, dri, scale);
      out.add(tail_key, dtr, scale);
      out.add({Slot::EntityImag, t.tail.value}, dti, scale);
      return;
    }
    case ModelKind::TuckER: {
      std::vector<Real> dh(de), dt(de), drel(dr, Real{0});
      tucker_contract_relation_tail<Real>(params, r, tl, dh);
      tucker_contract_head_relation<Real>(params, h, r, dt);
      const auto w = params.core.values();
      auto dw = out.row({Slot::Core, 0}, w.size());
      for (std::size_t i = 0; i < de; ++i) {
        for (std::size_t j = 0; j < dr; ++j) {
          const std::size_t base = (i * dr + j) * de;
          drel[j] += h[i] * dot<Real>({w.data() + base, de}, tl);
          const Real coef = scale * h[i] * r[j];
          for (std::size_t k = 0; k < de; ++k) dw[base + k] += coef * tl[k];
        }
      }
      out.add(head_key, dh, scale);
      out.add(rel_key, drel, scale);
      out.add(tail_key, dt, scale);
      return;
    }
  }
}

template <typename Real>
void score_candidates(const ModelParams<Real>& params, const Triple& t, Side side, std::span<Real> out) {
  check_triple(params, t);
  if (out.size() != params.num_entities) {
    throw Error(ErrorCode::DimMismatch, "candidate buffer must hold one score per entity");
  }
  if (params.kind == ModelKind::TuckER) {
    const std::size_t de = params.dims.entity_dim;
    std::vector<Real> x(de);
    const auto r = params.relation.row(t.relation.value);
    if (side == Side::Tail) {
      tucker_contract_head_relation<Real>(params, params.entity.row(t.head.value), r, x);
    } else {
      tucker_contract_relation_tail<Real>(params, r, params.entity.row(t.tail.value), x);
    }
    for (std::size_t e = 0; e < params.num_entities; ++e) out[e] = dot<Real>(x, params.entity.row(e));
    return;
  }
  Triple candidate = t;
  for (std::size_t e = 0; e < params.num_entities; ++e) {
    (side == Side::Tail ? candidate.tail : candidate.head) = EntityId{static_cast<std::uint32_t>(e)};
    out[e] = score(params, candidate);
  }
}

std::vector<RowKey> touched_rows(ModelKind kind, const Triple& t) {
  std::vector<RowKey> rows;
  for (Slot slot : model_slots(kind)) {
    switch (slot) {
      case Slot::Entity:
      case Slot::EntityProj:
      case Slot::EntityImag:
        rows.push_back({slot, t.head.value});
        if (t.tail != t.head) rows.push_back({slot, t.tail.value});
        break;
      case Slot::Relation:
      case Slot::Normal:
      case Slot::RelationProj:
      case Slot::RelationImag: rows.push_back({slot, t.relation.value}); break;
      case Slot::Core: rows.push_back({slot, 0}); break;
    }
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

template <typename Real>
void project_constraints(ModelParams<Real>& params, std::span<const RowKey> touched) {
  if (!is_translational(params.kind)) return;
  for (const auto& key : touched) {
    const bool ball = key.slot == Slot::Entity ||
                      (params.kind == ModelKind::TransD && (key.slot == Slot::EntityProj || key.slot == Slot::RelationProj));
    if (ball) {
      auto row = params.tensor(key.slot).row(key.row);
      const Real n = l2_norm<Real>(row);
      if (n > 1) {
        for (auto& v : row) v /= n;
      }
    } else if (key.slot == Slot::Normal && params.kind == ModelKind::TransH) {
      auto row = params.normal.row(key.row);
      const Real n = l2_norm<Real>(row);
      if (n > 0) {
        for (auto& v : row) v /= n;
      }
    }
  }
}

#define KGBENCH_INSTANTIATE_MODELS(Real)                                                                              \
  template struct ModelParams<Real>;                                                                                  \
  template ModelParams<Real> make_params<Real>(ModelKind, std::size_t, std::size_t, ModelDims, int);                  \
  template void check_shapes<Real>(const ModelParams<Real>&);                                                         \
  template ModelParams<Real> init_params<Real>(ModelKind, std::size_t, std::size_t, ModelDims, std::uint64_t, int);   \
  template Real score<Real>(const ModelParams<Real>&, const Triple&);                                                 \
  template void accumulate_score_grad<Real>(const ModelParams<Real>&, const Triple&, Real, SparseGradient<Real>&);    \
  template void score_candidates<Real>(const ModelParams<Real>&, const Triple&, Side, std::span<Real>);               \
  template void project_constraints<Real>(ModelParams<Real>&, std::span<const RowKey>);                               \
  template void tucker_contract_head_relation<Real>(const ModelParams<Real>&, std::span<const Real>,                  \
                                                    std::span<const Real>, std::span<Real>);                          \
  template void tucker_contract_relation_tail<Real>(const ModelParams<Real>&, std::span<const Real>,                  \
                                                    std::span<const Real>, std::span<Real>);

KGBENCH_INSTANTIATE_MODELS(float)
KGBENCH_INSTANTIATE_MODELS(double)

}  // namespace kgbench
