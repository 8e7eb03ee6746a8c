// SPDX-License-Identifier: Apache-2.0

#include "phsg/sg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace phsg {
namespace {

// Accumulator for projected entries, keyed (row, col). std::map keeps the
// assembly order deterministic.
using CoordMap = std::map<std::pair<Index, Index>, double>;

SparseMatrix coord_to_sparse(const CoordMap& vals, Index rows, Index cols,
                             double droptol) {
  double max_abs = 0.0;
  for (const auto& [key, v] : vals) {
    (void)key;
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double cut = droptol * max_abs;
  std::vector<Triplet> triplets;
  triplets.reserve(vals.size());
  for (const auto& [key, v] : vals) {
    if (std::abs(v) <= cut) continue;
    triplets.emplace_back(key.first, key.second, v);
  }
  SparseMatrix out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

// Partition of the basis by the value of the multi-indices outside a
// dependence set: two basis functions can pair with a nonzero expectation
// against a function of dims `deps` only if they agree on every other
// dimension. `local` maps each basis position to an id for its restriction
// to `deps`.
struct DependenceGroups {
  std::vector<std::vector<int>> groups;       // basis positions per group
  std::vector<int> local_id;                  // per basis position
  std::vector<MultiIndex> local_indices;      // restricted sub-indices
};

DependenceGroups make_groups(const ChaosBasis& basis,
                             const std::vector<int>& deps) {
  DependenceGroups out;
  out.local_id.resize(static_cast<std::size_t>(basis.size()), -1);
  std::map<MultiIndex, std::vector<int>> by_rest;
  std::map<MultiIndex, int> local_ids;
  for (int i = 0; i < basis.size(); ++i) {
    const MultiIndex& alpha = basis.indices[static_cast<std::size_t>(i)];
    MultiIndex rest = alpha;
    MultiIndex sub(deps.size(), 0);
    for (std::size_t t = 0; t < deps.size(); ++t) {
      sub[t] = rest[static_cast<std::size_t>(deps[t])];
      rest[static_cast<std::size_t>(deps[t])] = 0;
    }
    by_rest[rest].push_back(i);
    auto [it, inserted] =
        local_ids.try_emplace(sub, static_cast<int>(local_ids.size()));
    if (inserted) out.local_indices.push_back(sub);
    out.local_id[static_cast<std::size_t>(i)] = it->second;
  }
  out.groups.reserve(by_rest.size());
  for (auto& [rest, members] : by_rest) {
    (void)rest;
    out.groups.push_back(std::move(members));
  }
  return out;
}

// Pairing integrals of one scalar entry against the restricted basis:
// I(b1, b2) = E[ a(mu) prod_t phi_{b1_t}(xi_t) phi_{b2_t}(xi_t) ], a tensor
// quadrature over the dependence dimensions only.
Matrix pairing_integrals(const ScalarEntry& entry, const ParameterBox& box,
                         const DependenceGroups& dg, int d,
                         const std::vector<int>& points) {
  const auto& deps = entry.deps;
  const std::size_t nd = deps.size();
  const int nb = static_cast<int>(dg.local_indices.size());

  std::vector<std::vector<double>> nodes(nd);
  std::vector<std::vector<double>> weights(nd);
  std::size_t total = 1;
  for (std::size_t t = 0; t < nd; ++t) {
    gauss_legendre(points[t], nodes[t], weights[t]);
    total *= static_cast<std::size_t>(points[t]);
  }

  const Vector center = box.center();
  const Vector half = box.half_width();

  // Per-dimension Legendre value tables at the local nodes.
  std::vector<Matrix> leg(nd);
  for (std::size_t t = 0; t < nd; ++t) {
    leg[t].resize(static_cast<Index>(nodes[t].size()), d + 1);
    std::vector<double> row(static_cast<std::size_t>(d) + 1);
    for (std::size_t a = 0; a < nodes[t].size(); ++a) {
      normalized_legendre_row(d, nodes[t][a], row.data());
      for (int k = 0; k <= d; ++k) {
        leg[t](static_cast<Index>(a), k) = row[static_cast<std::size_t>(k)];
      }
    }
  }

  Matrix I = Matrix::Zero(nb, nb);
  Vector mu = center;
  Vector pb(nb);
  std::vector<std::size_t> digit(nd, 0);
  for (std::size_t node = 0; node < total; ++node) {
    // Mixed-radix decode, last dependence dimension fastest.
    std::size_t rem = node;
    for (std::size_t t = nd; t-- > 0;) {
      digit[t] = rem % static_cast<std::size_t>(points[t]);
      rem /= static_cast<std::size_t>(points[t]);
    }
    double w = 1.0;
    for (std::size_t t = 0; t < nd; ++t) {
      const double xi = nodes[t][digit[t]];
      w *= weights[t][digit[t]];
      const Index dim = static_cast<Index>(deps[t]);
      mu[dim] = center[dim] + half[dim] * xi;
    }
    const double a = entry.f(mu);
    if (a == 0.0) continue;
    for (int b = 0; b < nb; ++b) {
      double value = 1.0;
      const MultiIndex& beta = dg.local_indices[static_cast<std::size_t>(b)];
      for (std::size_t t = 0; t < nd; ++t) {
        const int deg = static_cast<int>(beta[t]);
        if (deg > 0) value *= leg[t](static_cast<Index>(digit[t]), deg);
      }
      pb[b] = value;
    }
    I.selfadjointView<Eigen::Lower>().rankUpdate(pb, w * a);
  }
  return Matrix(I.selfadjointView<Eigen::Lower>());
}

// Per-dimension Gauss orders: exact for known polynomial degrees, otherwise
// at least `quad_points` (and always enough for the basis-pair factor).
std::vector<int> entry_points(const ScalarEntry& entry, int d,
                              const SGOptions& opts) {
  std::vector<int> points(entry.deps.size());
  for (std::size_t t = 0; t < entry.deps.size(); ++t) {
    const int deg = entry.degrees[t];
    if (deg >= 0) {
      points[t] = (deg + 2 * d + 2) / 2;  // ceil((deg + 2d + 1) / 2)
    } else {
      points[t] = std::max(opts.quad_points, d + 1);
    }
    points[t] += opts.extra_points;
  }
  return points;
}

void project_entrywise(const EntrywiseMatrix& ew, const ChaosBasis& basis,
                       const ParameterBox& box, const SGOptions& opts,
                       CoordMap& vals) {
  const Index n = ew.rows();
  const Index m = ew.cols();
  const int s = basis.size();
  const Vector center = box.center();

  std::map<std::vector<int>, DependenceGroups> group_cache;
  for (const auto& [key, entry] : ew.entries()) {
    const auto [k, l] = key;
    if (entry.deps.empty()) {
      // Constant entry: E[c Phi_i Phi_j] = c delta_ij.
      const double c = entry.f(center);
      if (c == 0.0) continue;
      for (int i = 0; i < s; ++i) {
        vals[{static_cast<Index>(i) * n + k, static_cast<Index>(i) * m + l}] +=
            c;
      }
      continue;
    }

    auto git = group_cache.find(entry.deps);
    if (git == group_cache.end()) {
      git = group_cache.emplace(entry.deps, make_groups(basis, entry.deps))
                .first;
    }
    const DependenceGroups& dg = git->second;
    const Matrix I =
        pairing_integrals(entry, box, dg, basis.d, entry_points(entry, basis.d, opts));

    for (const auto& group : dg.groups) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        const int i = group[a];
        const int bi = dg.local_id[static_cast<std::size_t>(i)];
        for (std::size_t b = a; b < group.size(); ++b) {
          const int j = group[b];
          const int bj = dg.local_id[static_cast<std::size_t>(j)];
          const double v = I(bi, bj);
          if (v == 0.0) continue;
          vals[{static_cast<Index>(i) * n + k, static_cast<Index>(j) * m + l}] +=
              v;
          if (i != j) {
            vals[{static_cast<Index>(j) * n + k,
                  static_cast<Index>(i) * m + l}] += v;
          }
        }
      }
    }
  }
}

void project_black_box(const ParametricMatrix& A, const ChaosBasis& basis,
                       const ParameterBox& box, const SGOptions& opts,
                       CoordMap& vals) {
  const Index n = A.rows();
  const Index m = A.cols();
  const int s = basis.size();
  const QuadratureRule rule = QuadratureRule::tensor_gauss(
      box, opts.quad_points + opts.extra_points, opts.node_cap);
  const std::size_t total = rule.count();
  constexpr std::size_t kChunk = 1024;

  std::map<std::pair<Index, Index>, Matrix> blocks;
  Matrix Z(s, static_cast<Index>(kChunk));
  Matrix vals_chunk(n * m, static_cast<Index>(kChunk));
  Vector w_chunk(static_cast<Index>(kChunk));
  Vector mu;
  Matrix Zs;

  for (std::size_t start = 0; start < total; start += kChunk) {
    const Index c_count = static_cast<Index>(std::min(kChunk, total - start));
    for (Index c = 0; c < c_count; ++c) {
      double w = 0.0;
      rule.node(start + static_cast<std::size_t>(c), mu, w);
      w_chunk[c] = w;
      Z.col(c) = basis.eval(box, mu);
      Matrix Amu = A.eval(mu);
      vals_chunk.col(c) =
          Eigen::Map<const Vector>(Amu.data(), n * m);  // column-major vec
    }
    for (Index k = 0; k < n; ++k) {
      for (Index l = 0; l < m; ++l) {
        const Index e = l * n + k;
        const auto row = vals_chunk.row(e).head(c_count);
        if ((row.array() == 0.0).all() && blocks.find({k, l}) == blocks.end()) {
          continue;
        }
        auto [it, inserted] = blocks.try_emplace(std::make_pair(k, l));
        if (inserted) it->second = Matrix::Zero(s, s);
        const Vector coef =
            (row.transpose().array() * w_chunk.head(c_count).array()).matrix();
        Zs = Z.leftCols(c_count) * coef.asDiagonal();
        it->second.noalias() += Zs * Z.leftCols(c_count).transpose();
      }
    }
  }

  for (const auto& [key, block] : blocks) {
    const auto [k, l] = key;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const double v = block(i, j);
        if (v == 0.0) continue;
        vals[{static_cast<Index>(i) * n + k, static_cast<Index>(j) * m + l}] +=
            v;
      }
    }
  }
}

}  // namespace

SparseMatrix sg_project(const ParametricMatrix& A, const ChaosBasis& basis,
                        const ParameterBox& box, const SGOptions& opts) {
  if (A.dims() != box.dims() || basis.q != box.dims()) {
    throw ConfigError("sg_project: parameter dimension mismatch");
  }
  CoordMap vals;
  if (A.is_entrywise()) {
    project_entrywise(A.as_entrywise(), basis, box, opts, vals);
  } else {
    project_black_box(A, basis, box, opts, vals);
  }
  return coord_to_sparse(vals, A.rows() * basis.size(), A.cols() * basis.size(),
                         opts.droptol);
}

SGSystem assemble_sg(const ParametricStandardPH& sys, const ChaosBasis& basis,
                     const SGOptions& opts) {
  SGSystem sg;
  sg.basis = basis;
  sg.box = sys.box;
  sg.n = sys.n;
  sg.m = sys.m;
  sg.E = sg_project(sys.E, basis, sys.box, opts);
  sg.J = sg_project(sys.J, basis, sys.box, opts);
  sg.R = sg_project(sys.R, basis, sys.box, opts);
  sg.B = sg_project(sys.B, basis, sys.box, opts);
  sg.P = sg_project(sys.P, basis, sys.box, opts);
  sg.S = sg_project(sys.S, basis, sys.box, opts);
  sg.N = sg_project(sys.N, basis, sys.box, opts);
  return sg;
}

LTISystem assemble_sg_general(const ParametricPHSystem& sys,
                              const ChaosBasis& basis, const SGOptions& opts) {
  ParametricLTI lti = to_lti(sys);
  LTISystem out;
  out.E = Matrix(sg_project(lti.E, basis, sys.box, opts));
  out.A = Matrix(sg_project(lti.A, basis, sys.box, opts));
  out.B = Matrix(sg_project(lti.B, basis, sys.box, opts));
  out.C = Matrix(sg_project(lti.C, basis, sys.box, opts));
  out.D = Matrix(sg_project(lti.D, basis, sys.box, opts));
  return out;
}

double sg_hamiltonian(const SGSystem& sg, const Vector& v) {
  if (v.size() != sg.ns()) {
    throw ConfigError("sg_hamiltonian: coefficient vector has wrong length");
  }
  return 0.5 * v.dot(sg.E * v);
}

Vector expected_hamiltonian_oracle(const ParametricStandardPH& sys,
                                   const ChaosBasis& basis, const Matrix& V,
                                   const QuadratureRule& rule) {
  const int s = basis.size();
  const Index n = sys.n;
  const Index nv = V.cols();
  if (V.rows() != n * s) {
    throw ConfigError("expected_hamiltonian_oracle: wrong coefficient length");
  }
  if (rule.dims() != basis.q) {
    throw ConfigError("expected_hamiltonian_oracle: rule dimension mismatch");
  }

  // Stacked coefficients: U((l * nv + c), i) = V(i*n + l, c), so that
  // X = U * z holds the expanded states of all vectors at one node.
  Matrix U(n * nv, s);
  for (int i = 0; i < s; ++i) {
    for (Index l = 0; l < n; ++l) {
      for (Index c = 0; c < nv; ++c) {
        U(l * nv + c, i) = V(static_cast<Index>(i) * n + l, c);
      }
    }
  }

  // Sparse-exponent term lists for the energy weight E(mu).
  struct EnergyTerm {
    Index row, col;
    double coeff;
    std::vector<std::pair<int, int>> powers;  // (dim, exponent)
  };
  std::vector<EnergyTerm> terms;
  struct EnergyEntry {
    Index row, col;
    ScalarFn f;
  };
  std::vector<EnergyEntry> entries;
  const bool poly_path = sys.E.is_polynomial();
  const bool entry_path = !poly_path && sys.E.is_entrywise();
  if (poly_path) {
    const PolyMatrix& p = sys.E.polynomial();
    for (Index k = 0; k < n; ++k) {
      for (Index l = 0; l < n; ++l) {
        for (const auto& [kappa, coeff] : p.entry_terms(k, l)) {
          EnergyTerm t;
          t.row = k;
          t.col = l;
          t.coeff = coeff;
          for (std::size_t dim = 0; dim < kappa.size(); ++dim) {
            if (kappa[dim] > 0) {
              t.powers.emplace_back(static_cast<int>(dim),
                                    static_cast<int>(kappa[dim]));
            }
          }
          terms.push_back(std::move(t));
        }
      }
    }
  } else if (entry_path) {
    const EntrywiseMatrix ew = sys.E.as_entrywise();
    for (const auto& [key, entry] : ew.entries()) {
      entries.push_back({key.first, key.second, entry.f});
    }
  }

  // Per-dimension Legendre tables at the 1-D nodes.
  const int d = basis.d;
  std::vector<Matrix> leg(static_cast<std::size_t>(rule.dims()));
  for (int t = 0; t < rule.dims(); ++t) {
    const auto& nodes = rule.nodes_1d[static_cast<std::size_t>(t)];
    Matrix& tab = leg[static_cast<std::size_t>(t)];
    tab.resize(static_cast<Index>(nodes.size()), d + 1);
    std::vector<double> row(static_cast<std::size_t>(d) + 1);
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      normalized_legendre_row(d, nodes[a], row.data());
      for (int k = 0; k <= d; ++k) {
        tab(static_cast<Index>(a), k) = row[static_cast<std::size_t>(k)];
      }
    }
  }
  // Sparse supports of the basis multi-indices.
  std::vector<std::vector<std::pair<int, int>>> support(
      static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    for (std::size_t dim = 0; dim < basis.indices[static_cast<std::size_t>(i)].size();
         ++dim) {
      const int deg =
          static_cast<int>(basis.indices[static_cast<std::size_t>(i)][dim]);
      if (deg > 0) {
        support[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(dim),
                                                          deg);
      }
    }
  }

  const std::size_t total = rule.count();
  constexpr std::size_t kChunk = 1024;
  const int q = rule.dims();
  const Vector center = rule.box.center();
  const Vector half = rule.box.half_width();

  std::vector<CompensatedSum> acc(static_cast<std::size_t>(nv));
  Matrix Z(s, static_cast<Index>(kChunk));
  Matrix X;
  Vector w_chunk(static_cast<Index>(kChunk));
  Matrix mu_chunk(q, static_cast<Index>(kChunk));
  std::vector<std::size_t> digit(static_cast<std::size_t>(q), 0);
  std::vector<double> chunk_sum(static_cast<std::size_t>(nv));
  Vector mu(q);
  Matrix Emu;

  for (std::size_t start = 0; start < total; start += kChunk) {
    const Index c_count = static_cast<Index>(std::min(kChunk, total - start));
    for (Index c = 0; c < c_count; ++c) {
      std::size_t rem = start + static_cast<std::size_t>(c);
      double w = 1.0;
      for (int t = q; t-- > 0;) {
        const auto& nd = rule.nodes_1d[static_cast<std::size_t>(t)];
        digit[static_cast<std::size_t>(t)] = rem % nd.size();
        rem /= nd.size();
      }
      for (int t = 0; t < q; ++t) {
        const std::size_t a = digit[static_cast<std::size_t>(t)];
        w *= rule.weights_1d[static_cast<std::size_t>(t)][a];
        mu_chunk(t, c) =
            center[t] +
            half[t] * rule.nodes_1d[static_cast<std::size_t>(t)][a];
      }
      w_chunk[c] = w;
      for (int i = 0; i < s; ++i) {
        double value = 1.0;
        for (const auto& [dim, deg] : support[static_cast<std::size_t>(i)]) {
          const std::size_t a = digit[static_cast<std::size_t>(dim)];
          value *= leg[static_cast<std::size_t>(dim)](static_cast<Index>(a), deg);
        }
        Z(i, c) = value;
      }
    }

    X.noalias() = U * Z.leftCols(c_count);

    std::fill(chunk_sum.begin(), chunk_sum.end(), 0.0);
    for (Index c = 0; c < c_count; ++c) {
      const double w = w_chunk[c];
      if (poly_path) {
        for (const auto& t : terms) {
          double val = t.coeff;
          for (const auto& [dim, expo] : t.powers) {
            const double m = mu_chunk(dim, c);
            for (int p = 0; p < expo; ++p) val *= m;
          }
          const double wv = 0.5 * w * val;
          const auto xr = X.col(c).segment(t.row * nv, nv);
          const auto xc = X.col(c).segment(t.col * nv, nv);
          for (Index v = 0; v < nv; ++v) {
            chunk_sum[static_cast<std::size_t>(v)] += wv * xr[v] * xc[v];
          }
        }
      } else if (entry_path) {
        mu = mu_chunk.col(c);
        for (const auto& e : entries) {
          const double wv = 0.5 * w * e.f(mu);
          const auto xr = X.col(c).segment(e.row * nv, nv);
          const auto xc = X.col(c).segment(e.col * nv, nv);
          for (Index v = 0; v < nv; ++v) {
            chunk_sum[static_cast<std::size_t>(v)] += wv * xr[v] * xc[v];
          }
        }
      } else {
        mu = mu_chunk.col(c);
        Emu = sys.E.eval(mu);
        for (Index v = 0; v < nv; ++v) {
          Vector x(n);
          for (Index l = 0; l < n; ++l) x[l] = X(l * nv + v, c);
          chunk_sum[static_cast<std::size_t>(v)] +=
              0.5 * w * x.dot(Emu * x);
        }
      }
    }
    for (Index v = 0; v < nv; ++v) {
      acc[static_cast<std::size_t>(v)].add(chunk_sum[static_cast<std::size_t>(v)]);
    }
  }

  Vector out(nv);
  for (Index v = 0; v < nv; ++v) {
    out[v] = acc[static_cast<std::size_t>(v)].value();
  }
  return out;
}

double expected_hamiltonian_oracle(const ParametricStandardPH& sys,
                                   const ChaosBasis& basis, const Vector& v,
                                   const QuadratureRule& rule) {
  return expected_hamiltonian_oracle(sys, basis, Matrix(v), rule)[0];
}

SparseMatrix higher_mode_matrix(const ParametricStandardPH& sys,
                                const ChaosBasis& basis, int k,
                                const SGOptions& opts) {
  if (k < 1 || k > basis.size()) {
    throw ConfigError("higher_mode_matrix: mode index out of range");
  }
  if (k == 1) {
    // Phi_1 = 1: identical assembly to the system's energy block.
    return sg_project(sys.E, basis, sys.box, opts);
  }
  const MultiIndex alpha = basis.indices[static_cast<std::size_t>(k - 1)];
  const ParameterBox box = sys.box;

  if (sys.E.is_entrywise()) {
    EntrywiseMatrix base = sys.E.as_entrywise();
    EntrywiseMatrix scaled(base.rows(), base.cols(), base.dims());
    for (const auto& [key, entry] : base.entries()) {
      ScalarEntry e;
      // Dependence set: union of the entry's dims and supp(alpha).
      std::vector<int> supp;
      for (std::size_t dim = 0; dim < alpha.size(); ++dim) {
        if (alpha[dim] > 0) supp.push_back(static_cast<int>(dim));
      }
      std::vector<int> deps = entry.deps;
      for (int dim : supp) {
        if (!std::binary_search(deps.begin(), deps.end(), dim)) {
          deps.push_back(dim);
        }
      }
      std::sort(deps.begin(), deps.end());
      e.deps = deps;
      for (int dim : deps) {
        const bool in_entry = std::binary_search(entry.deps.begin(),
                                                 entry.deps.end(), dim);
        const int base_deg = in_entry ? entry.degree_in(dim) : 0;
        const int mode_deg = static_cast<int>(alpha[static_cast<std::size_t>(dim)]);
        e.degrees.push_back(base_deg == kNonPolynomial ? kNonPolynomial
                                                       : base_deg + mode_deg);
      }
      e.f = [f = entry.f, alpha, box](const Vector& mu) {
        double value = f(mu);
        const Vector xi = box.to_unit(mu);
        for (std::size_t dim = 0; dim < alpha.size(); ++dim) {
          if (alpha[dim] > 0) {
            value *= normalized_legendre(static_cast<int>(alpha[dim]),
                                         xi[static_cast<Index>(dim)]);
          }
        }
        return value;
      };
      scaled.set(key.first, key.second, std::move(e));
    }
    return sg_project(ParametricMatrix(scaled), basis, box, opts);
  }

  // Black-box energy matrix: scale the callback and widen the rule enough
  // for the extra basis factor.
  SGOptions mode_opts = opts;
  mode_opts.quad_points = opts.quad_points + (basis.d + 2) / 2;
  ParametricMatrix scaled(
      sys.E.rows(), sys.E.cols(), sys.E.dims(),
      [E = sys.E, alpha, box](const Vector& mu) -> Matrix {
        double value = 1.0;
        const Vector xi = box.to_unit(mu);
        for (std::size_t dim = 0; dim < alpha.size(); ++dim) {
          if (alpha[dim] > 0) {
            value *= normalized_legendre(static_cast<int>(alpha[dim]),
                                         xi[static_cast<Index>(dim)]);
          }
        }
        return Matrix(value * E.eval(mu));
      });
  return sg_project(scaled, basis, box, mode_opts);
}

namespace {

SparseMatrix sparse_corner(const SparseMatrix& M, Index rows, Index cols) {
  std::vector<Triplet> triplets;
  for (int outer = 0; outer < M.outerSize(); ++outer) {
    for (SparseMatrix::InnerIterator it(M, outer); it; ++it) {
      if (it.row() < rows && it.col() < cols) {
        triplets.emplace_back(it.row(), it.col(), it.value());
      }
    }
  }
  SparseMatrix out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

}  // namespace

SGSystem SGSystem::truncate_degree(int d_small) const {
  if (d_small < 0 || d_small > basis.d) {
    throw ConfigError("truncate_degree: degree out of range");
  }
  SGSystem out;
  out.basis = ChaosBasis::make(basis.q, d_small);
  out.box = box;
  out.n = n;
  out.m = m;
  const Index ns2 = n * out.basis.size();
  const Index ms2 = m * out.basis.size();
  out.E = sparse_corner(E, ns2, ns2);
  out.J = sparse_corner(J, ns2, ns2);
  out.R = sparse_corner(R, ns2, ns2);
  out.B = sparse_corner(B, ns2, ms2);
  out.P = sparse_corner(P, ns2, ms2);
  out.S = sparse_corner(S, ms2, ms2);
  out.N = sparse_corner(N, ms2, ms2);
  return out;
}

ValidationReport SGSystem::validate(double tol) const {
  StandardPHSystem dense;
  dense.n = ns();
  dense.m = ms();
  dense.E = Matrix(E);
  dense.J = Matrix(J);
  dense.R = Matrix(R);
  dense.B = Matrix(B);
  dense.P = Matrix(P);
  dense.S = Matrix(S);
  dense.N = Matrix(N);
  return validate_standard(dense, tol);
}

LTISystem io_restrict(const SGSystem& sg, IOMode mode) {
  LTISystem full;
  full.E = Matrix(sg.E);
  full.A = Matrix(sg.J - sg.R);
  full.B = Matrix(sg.B - sg.P);
  full.C = Matrix(SparseMatrix((sg.B + sg.P).transpose()));
  full.D = Matrix(sg.S + sg.N);
  return io_restrict(full, sg.m, sg.s(), mode);
}

LTISystem io_restrict(const LTISystem& sg_lti, Index m, int s, IOMode mode) {
  const Index ms = m * s;
  if (sg_lti.B.cols() != ms || sg_lti.C.rows() != ms) {
    throw ConfigError("io_restrict: port dimensions do not match m * s");
  }
  LTISystem out;
  out.E = sg_lti.E;
  out.A = sg_lti.A;
  switch (mode) {
    case IOMode::MIMO:
      out.B = sg_lti.B;
      out.C = sg_lti.C;
      out.D = sg_lti.D;
      break;
    case IOMode::SIMO:
      out.B = sg_lti.B.leftCols(m);
      out.C = sg_lti.C;
      out.D = sg_lti.D.leftCols(m);
      break;
    case IOMode::SISO:
      out.B = sg_lti.B.leftCols(m);
      out.C = sg_lti.C.topRows(m);
      out.D = sg_lti.D.topLeftCorner(m, m);
      break;
  }
  return out;
}

std::function<Vector(double)> lift_input(std::function<Vector(double)> u,
                                         int s, Index m) {
  return [u = std::move(u), s, m](double t) {
    Vector out = Vector::Zero(m * s);
    out.head(m) = u(t);
    return out;
  };
}

double sparsity_ratio(const SparseMatrix& M) {
  const double total =
      static_cast<double>(M.rows()) * static_cast<double>(M.cols());
  if (total == 0.0) return 0.0;
  return static_cast<double>(M.nonZeros()) / total;
}

IOMode parse_io_mode(const std::string& text) {
  std::string lower;
  lower.reserve(text.size());
  for (char ch : text) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  if (lower == "mimo") return IOMode::MIMO;
  if (lower == "simo") return IOMode::SIMO;
  if (lower == "siso") return IOMode::SISO;
  throw ConfigError("unknown I/O mode: " + text);
}

}  // namespace phsg
