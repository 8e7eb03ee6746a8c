// SPDX-License-Identifier: Apache-2.0

#include "phsg/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace phsg {
namespace {

// Merge two sorted dependence lists with per-dimension degree combination.
// `combine(a, b)` receives the degrees from each side (or `missing` for a
// dimension only one side depends on, passed as the other argument).
template <typename Combine>
void merge_deps(const ScalarEntry& a, const ScalarEntry& b, Combine combine,
                std::vector<int>& deps, std::vector<int>& degrees) {
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.deps.size() || ib < b.deps.size()) {
    int dim = 0;
    int da = 0;
    int db = 0;
    if (ib == b.deps.size() ||
        (ia < a.deps.size() && a.deps[ia] < b.deps[ib])) {
      dim = a.deps[ia];
      da = a.degrees[ia];
      ++ia;
    } else if (ia == a.deps.size() || b.deps[ib] < a.deps[ia]) {
      dim = b.deps[ib];
      db = b.degrees[ib];
      ++ib;
    } else {
      dim = a.deps[ia];
      da = a.degrees[ia];
      db = b.degrees[ib];
      ++ia;
      ++ib;
    }
    deps.push_back(dim);
    degrees.push_back(combine(da, db));
  }
}

int combine_product_degrees(int da, int db) {
  if (da == kNonPolynomial || db == kNonPolynomial) return kNonPolynomial;
  return da + db;
}

int combine_sum_degrees(int da, int db) {
  if (da == kNonPolynomial || db == kNonPolynomial) return kNonPolynomial;
  return std::max(da, db);
}

}  // namespace

int ScalarEntry::degree_in(int dim) const {
  auto it = std::lower_bound(deps.begin(), deps.end(), dim);
  if (it == deps.end() || *it != dim) return 0;
  return degrees[static_cast<std::size_t>(it - deps.begin())];
}

ScalarEntry ScalarEntry::constant(double value) {
  ScalarEntry e;
  e.f = [value](const Vector&) { return value; };
  return e;
}

ScalarEntry ScalarEntry::from_terms(
    const std::vector<std::pair<MultiIndex, double>>& terms) {
  ScalarEntry e;
  std::map<int, int> degree_by_dim;
  for (const auto& [kappa, coeff] : terms) {
    (void)coeff;
    for (std::size_t dim = 0; dim < kappa.size(); ++dim) {
      if (kappa[dim] > 0) {
        int& deg = degree_by_dim[static_cast<int>(dim)];
        deg = std::max(deg, static_cast<int>(kappa[dim]));
      }
    }
  }
  for (const auto& [dim, deg] : degree_by_dim) {
    e.deps.push_back(dim);
    e.degrees.push_back(deg);
  }
  e.f = [terms](const Vector& mu) {
    double value = 0.0;
    for (const auto& [kappa, coeff] : terms) {
      double monom = coeff;
      for (std::size_t dim = 0; dim < kappa.size(); ++dim) {
        for (int p = 0; p < static_cast<int>(kappa[dim]); ++p) {
          monom *= mu[static_cast<Index>(dim)];
        }
      }
      value += monom;
    }
    return value;
  };
  return e;
}

ScalarEntry ScalarEntry::product(const ScalarEntry& a, const ScalarEntry& b) {
  ScalarEntry e;
  merge_deps(a, b, combine_product_degrees, e.deps, e.degrees);
  e.f = [fa = a.f, fb = b.f](const Vector& mu) { return fa(mu) * fb(mu); };
  return e;
}

ScalarEntry ScalarEntry::sum(const ScalarEntry& a, const ScalarEntry& b) {
  ScalarEntry e;
  merge_deps(a, b, combine_sum_degrees, e.deps, e.degrees);
  e.f = [fa = a.f, fb = b.f](const Vector& mu) { return fa(mu) + fb(mu); };
  return e;
}

ScalarEntry ScalarEntry::scaled(const ScalarEntry& a, double factor) {
  ScalarEntry e = a;
  e.f = [fa = a.f, factor](const Vector& mu) { return factor * fa(mu); };
  return e;
}

ScalarEntry ScalarEntry::sqrt_of(const ScalarEntry& a) {
  ScalarEntry e;
  e.deps = a.deps;
  e.degrees.assign(a.deps.size(), kNonPolynomial);
  e.f = [fa = a.f](const Vector& mu) { return std::sqrt(fa(mu)); };
  return e;
}

ScalarEntry ScalarEntry::quotient(const ScalarEntry& a, const ScalarEntry& b) {
  ScalarEntry e;
  merge_deps(a, b, [](int, int) { return kNonPolynomial; }, e.deps, e.degrees);
  // Degrees in dimensions only `a` touches polynomially are still lost above;
  // refine: a-only dimensions keep a's degree (b is constant there).
  for (std::size_t i = 0; i < e.deps.size(); ++i) {
    int dim = e.deps[i];
    bool b_has =
        std::binary_search(b.deps.begin(), b.deps.end(), dim);
    if (!b_has) e.degrees[i] = a.degree_in(dim);
  }
  e.f = [fa = a.f, fb = b.f](const Vector& mu) { return fa(mu) / fb(mu); };
  return e;
}

void EntrywiseMatrix::set(Index k, Index l, ScalarEntry entry) {
  if (k < 0 || k >= rows_ || l < 0 || l >= cols_) {
    throw ConfigError("EntrywiseMatrix::set: index out of range");
  }
  entries_[{k, l}] = std::move(entry);
}

Matrix EntrywiseMatrix::eval(const Vector& mu) const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (const auto& [key, entry] : entries_) {
    out(key.first, key.second) = entry.f(mu);
  }
  return out;
}

EntrywiseMatrix EntrywiseMatrix::transpose() const {
  EntrywiseMatrix out(cols_, rows_, q_);
  for (const auto& [key, entry] : entries_) {
    out.entries_[{key.second, key.first}] = entry;
  }
  return out;
}

EntrywiseMatrix EntrywiseMatrix::operator+(const EntrywiseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) {
    throw ConfigError("EntrywiseMatrix: dimension mismatch in +");
  }
  EntrywiseMatrix out(rows_, cols_, q_);
  out.entries_ = entries_;
  for (const auto& [key, entry] : o.entries_) {
    auto it = out.entries_.find(key);
    if (it == out.entries_.end()) {
      out.entries_[key] = entry;
    } else {
      it->second = ScalarEntry::sum(it->second, entry);
    }
  }
  return out;
}

EntrywiseMatrix EntrywiseMatrix::operator-(const EntrywiseMatrix& o) const {
  EntrywiseMatrix neg(o.rows_, o.cols_, o.q_);
  for (const auto& [key, entry] : o.entries_) {
    neg.entries_[key] = ScalarEntry::scaled(entry, -1.0);
  }
  return *this + neg;
}

EntrywiseMatrix EntrywiseMatrix::operator*(const EntrywiseMatrix& o) const {
  if (cols_ != o.rows_) {
    throw ConfigError("EntrywiseMatrix: dimension mismatch in *");
  }
  EntrywiseMatrix out(rows_, o.cols_, q_);
  for (const auto& [ka, ea] : entries_) {
    for (const auto& [kb, eb] : o.entries_) {
      if (ka.second != kb.first) continue;
      ScalarEntry prod = ScalarEntry::product(ea, eb);
      auto key = std::make_pair(ka.first, kb.second);
      auto it = out.entries_.find(key);
      if (it == out.entries_.end()) {
        out.entries_[key] = std::move(prod);
      } else {
        it->second = ScalarEntry::sum(it->second, prod);
      }
    }
  }
  return out;
}

bool EntrywiseMatrix::is_diagonal() const {
  for (const auto& [key, entry] : entries_) {
    (void)entry;
    if (key.first != key.second) return false;
  }
  return true;
}

EntrywiseMatrix EntrywiseMatrix::from_poly(const PolyMatrix& p) {
  EntrywiseMatrix out(p.rows(), p.cols(), p.dims());
  for (Index k = 0; k < p.rows(); ++k) {
    for (Index l = 0; l < p.cols(); ++l) {
      auto terms = p.entry_terms(k, l);
      if (terms.empty()) continue;
      out.set(k, l, ScalarEntry::from_terms(terms));
    }
  }
  return out;
}

ParametricMatrix::ParametricMatrix(PolyMatrix poly)
    : rows_(poly.rows()), cols_(poly.cols()), q_(poly.dims()),
      poly_(std::move(poly)) {}

ParametricMatrix::ParametricMatrix(EntrywiseMatrix entries)
    : rows_(entries.rows()), cols_(entries.cols()), q_(entries.dims()),
      entries_(std::move(entries)) {}

ParametricMatrix::ParametricMatrix(Index rows, Index cols, int q, MatrixFn fn)
    : rows_(rows), cols_(cols), q_(q), fn_(std::move(fn)) {}

ParametricMatrix ParametricMatrix::constant(Matrix value, int q) {
  return ParametricMatrix(PolyMatrix::constant(std::move(value), q));
}

const PolyMatrix& ParametricMatrix::polynomial() const {
  if (!poly_) {
    throw ConfigError("ParametricMatrix: not in polynomial form");
  }
  return *poly_;
}

EntrywiseMatrix ParametricMatrix::as_entrywise() const {
  if (entries_) return *entries_;
  if (poly_) return EntrywiseMatrix::from_poly(*poly_);
  throw ConfigError("ParametricMatrix: black-box matrix has no entrywise form");
}

Matrix ParametricMatrix::eval(const Vector& mu) const {
  if (poly_) return poly_->eval(mu);
  if (entries_) return entries_->eval(mu);
  if (!fn_) return Matrix::Zero(rows_, cols_);
  Matrix out = fn_(mu);
  if (out.rows() != rows_ || out.cols() != cols_) {
    throw NumericalError("ParametricMatrix: callback returned wrong shape");
  }
  return out;
}

bool ParametricMatrix::is_diagonal() const {
  if (poly_) {
    for (const auto& [kappa, coeff] : poly_->terms()) {
      (void)kappa;
      for (Index k = 0; k < coeff.rows(); ++k) {
        for (Index l = 0; l < coeff.cols(); ++l) {
          if (k != l && coeff(k, l) != 0.0) return false;
        }
      }
    }
    return true;
  }
  if (entries_) return entries_->is_diagonal();
  return false;
}

ParametricMatrix ParametricMatrix::transpose() const {
  if (poly_) return ParametricMatrix(poly_->transpose());
  if (entries_) return ParametricMatrix(entries_->transpose());
  MatrixFn fn = fn_;
  return ParametricMatrix(cols_, rows_, q_, [fn](const Vector& mu) {
    return Matrix(fn(mu).transpose());
  });
}

ParametricMatrix ParametricMatrix::operator+(const ParametricMatrix& o) const {
  if (poly_ && o.poly_) return ParametricMatrix(*poly_ + *o.poly_);
  if (is_entrywise() && o.is_entrywise()) {
    return ParametricMatrix(as_entrywise() + o.as_entrywise());
  }
  auto lhs = *this;
  auto rhs = o;
  return ParametricMatrix(rows_, cols_, q_, [lhs, rhs](const Vector& mu) {
    return Matrix(lhs.eval(mu) + rhs.eval(mu));
  });
}

ParametricMatrix ParametricMatrix::operator-(const ParametricMatrix& o) const {
  if (poly_ && o.poly_) return ParametricMatrix(*poly_ - *o.poly_);
  if (is_entrywise() && o.is_entrywise()) {
    return ParametricMatrix(as_entrywise() - o.as_entrywise());
  }
  auto lhs = *this;
  auto rhs = o;
  return ParametricMatrix(rows_, cols_, q_, [lhs, rhs](const Vector& mu) {
    return Matrix(lhs.eval(mu) - rhs.eval(mu));
  });
}

ParametricMatrix ParametricMatrix::operator*(const ParametricMatrix& o) const {
  if (poly_ && o.poly_) return ParametricMatrix(*poly_ * *o.poly_);
  if (is_entrywise() && o.is_entrywise()) {
    return ParametricMatrix(as_entrywise() * o.as_entrywise());
  }
  auto lhs = *this;
  auto rhs = o;
  return ParametricMatrix(rows_, o.cols_, q_, [lhs, rhs](const Vector& mu) {
    return Matrix(lhs.eval(mu) * rhs.eval(mu));
  });
}

PHSystem ParametricPHSystem::eval(const Vector& mu) const {
  if (!box.contains(mu)) {
    throw ConfigError("ParametricPHSystem::eval: parameter outside box");
  }
  PHSystem sys;
  sys.n = n;
  sys.m = m;
  sys.E = E.eval(mu);
  sys.J = J.eval(mu);
  sys.R = R.eval(mu);
  sys.Q = Q.eval(mu);
  sys.B = B.eval(mu);
  sys.P = P.eval(mu);
  sys.S = S.eval(mu);
  sys.N = N.eval(mu);
  return sys;
}

StandardPHSystem ParametricStandardPH::eval(const Vector& mu) const {
  if (!box.contains(mu)) {
    throw ConfigError("ParametricStandardPH::eval: parameter outside box");
  }
  StandardPHSystem sys;
  sys.n = n;
  sys.m = m;
  sys.E = E.eval(mu);
  sys.J = J.eval(mu);
  sys.R = R.eval(mu);
  sys.B = B.eval(mu);
  sys.P = P.eval(mu);
  sys.S = S.eval(mu);
  sys.N = N.eval(mu);
  return sys;
}

LTISystem ParametricLTI::eval(const Vector& mu) const {
  if (!box.contains(mu)) {
    throw ConfigError("ParametricLTI::eval: parameter outside box");
  }
  LTISystem sys;
  sys.E = E.eval(mu);
  sys.A = A.eval(mu);
  sys.B = B.eval(mu);
  sys.C = C.eval(mu);
  sys.D = D.eval(mu);
  return sys;
}

namespace {

// Entrywise basis transform for diagonal Q = diag(q_1..q_n): with
// t_k = sqrt(q_k),
//   (T^T X T)_{kl}      = t_k t_l X_{kl}   (= q_k X_{kk} on the diagonal),
//   (T^T E T^{-T})_{kl} = t_k X_{kl} / t_l (= X_{kk} on the diagonal),
//   (T^T B)_{kj}        = t_k B_{kj}.
// Diagonal special cases keep exact polynomial degree metadata.
struct DiagonalTransform {
  std::vector<ScalarEntry> q_diag;  // q_k
  std::vector<ScalarEntry> t;       // sqrt(q_k)

  EntrywiseMatrix congruence(const EntrywiseMatrix& x) const {
    EntrywiseMatrix out(x.rows(), x.cols(), x.dims());
    for (const auto& [key, entry] : x.entries()) {
      auto [k, l] = key;
      if (k == l) {
        out.set(k, l, ScalarEntry::product(q_diag[static_cast<std::size_t>(k)],
                                           entry));
      } else {
        out.set(k, l,
                ScalarEntry::product(
                    ScalarEntry::product(t[static_cast<std::size_t>(k)], entry),
                    t[static_cast<std::size_t>(l)]));
      }
    }
    return out;
  }

  EntrywiseMatrix mixed(const EntrywiseMatrix& x) const {
    EntrywiseMatrix out(x.rows(), x.cols(), x.dims());
    for (const auto& [key, entry] : x.entries()) {
      auto [k, l] = key;
      if (k == l) {
        out.set(k, l, entry);
      } else {
        out.set(k, l,
                ScalarEntry::quotient(
                    ScalarEntry::product(t[static_cast<std::size_t>(k)], entry),
                    t[static_cast<std::size_t>(l)]));
      }
    }
    return out;
  }

  EntrywiseMatrix left(const EntrywiseMatrix& x) const {
    EntrywiseMatrix out(x.rows(), x.cols(), x.dims());
    for (const auto& [key, entry] : x.entries()) {
      auto [k, l] = key;
      out.set(k, l,
              ScalarEntry::product(t[static_cast<std::size_t>(k)], entry));
    }
    return out;
  }
};

ParametricMatrix transform_slot_callback(const ParametricPHSystem& sys,
                                         Factorization method, int which,
                                         Index rows, Index cols) {
  // which: 0=E, 1=J, 2=R, 3=B, 4=P
  auto box = sys.box;
  auto fn = [sys, method, which](const Vector& mu) -> Matrix {
    auto [std_sys, T] = basis_transform(sys.eval(mu), method);
    (void)T;
    switch (which) {
      case 0: return std_sys.E;
      case 1: return std_sys.J;
      case 2: return std_sys.R;
      case 3: return std_sys.B;
      default: return std_sys.P;
    }
  };
  return ParametricMatrix(rows, cols, static_cast<int>(box.dims()), fn);
}

}  // namespace

ParametricStandardPH basis_transform(const ParametricPHSystem& sys,
                                     Factorization method) {
  ParametricStandardPH out;
  out.box = sys.box;
  out.n = sys.n;
  out.m = sys.m;
  out.S = sys.S;
  out.N = sys.N;

  const bool diag_path = sys.Q.is_diagonal() && sys.Q.is_entrywise() &&
                         sys.E.is_entrywise() && sys.J.is_entrywise() &&
                         sys.R.is_entrywise() && sys.B.is_entrywise() &&
                         sys.P.is_entrywise();
  if (!diag_path) {
    out.E = transform_slot_callback(sys, method, 0, sys.n, sys.n);
    out.J = transform_slot_callback(sys, method, 1, sys.n, sys.n);
    out.R = transform_slot_callback(sys, method, 2, sys.n, sys.n);
    out.B = transform_slot_callback(sys, method, 3, sys.n, sys.m);
    out.P = transform_slot_callback(sys, method, 4, sys.n, sys.m);
    return out;
  }

  EntrywiseMatrix q = sys.Q.as_entrywise();
  DiagonalTransform tr;
  tr.q_diag.resize(static_cast<std::size_t>(sys.n));
  tr.t.resize(static_cast<std::size_t>(sys.n));
  for (Index k = 0; k < sys.n; ++k) {
    auto it = q.entries().find({k, k});
    if (it == q.entries().end()) {
      throw ConfigError("basis_transform: diagonal Q has a zero diagonal entry");
    }
    tr.q_diag[static_cast<std::size_t>(k)] = it->second;
    tr.t[static_cast<std::size_t>(k)] = ScalarEntry::sqrt_of(it->second);
  }

  out.E = ParametricMatrix(tr.mixed(sys.E.as_entrywise()));
  out.J = ParametricMatrix(tr.congruence(sys.J.as_entrywise()));
  out.R = ParametricMatrix(tr.congruence(sys.R.as_entrywise()));
  out.B = ParametricMatrix(tr.left(sys.B.as_entrywise()));
  out.P = ParametricMatrix(tr.left(sys.P.as_entrywise()));
  return out;
}

ParametricStandardPH image_transform(const ParametricPHSystem& sys) {
  ParametricStandardPH out;
  out.box = sys.box;
  out.n = sys.n;
  out.m = sys.m;
  auto qt = sys.Q.transpose();
  out.E = qt * sys.E;
  out.J = qt * sys.J * sys.Q;
  out.R = qt * sys.R * sys.Q;
  out.B = qt * sys.B;
  out.P = qt * sys.P;
  out.S = sys.S;
  out.N = sys.N;
  return out;
}

ParametricLTI to_lti(const ParametricPHSystem& sys) {
  ParametricLTI out;
  out.box = sys.box;
  out.E = sys.E;
  out.A = (sys.J - sys.R) * sys.Q;
  out.B = sys.B - sys.P;
  out.C = (sys.B + sys.P).transpose() * sys.Q;
  out.D = sys.S + sys.N;
  return out;
}

ParametricLTI to_lti(const ParametricStandardPH& sys) {
  ParametricLTI out;
  out.box = sys.box;
  out.E = sys.E;
  out.A = sys.J - sys.R;
  out.B = sys.B - sys.P;
  out.C = (sys.B + sys.P).transpose();
  out.D = sys.S + sys.N;
  return out;
}

}  // namespace phsg
