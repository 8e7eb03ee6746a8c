// SPDX-License-Identifier: Apache-2.0
//
// Parameter-dependent matrices and pH systems over a parameter box.
//
// A parametric matrix comes in one of three representations:
//  * polynomial   - exact matrix-valued polynomial (PolyMatrix),
//  * entrywise    - per-entry scalar callbacks annotated with the parameter
//                   dimensions each entry depends on and, where known, the
//                   polynomial degree per dimension,
//  * callback     - opaque matrix-valued function (black box).
//
// The annotations drive the Galerkin assembly: polynomial degrees select
// exact quadrature orders, dependence sets restrict quadrature to the few
// dimensions an entry actually uses, and only true black boxes require a
// full tensor rule over all dimensions.

#pragma once

#include "phsg/chaos.hpp"
#include "phsg/ph_system.hpp"
#include "phsg/poly_matrix.hpp"
#include "phsg/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace phsg {

using MatrixFn = std::function<Matrix(const Vector&)>;
using ScalarFn = std::function<double(const Vector&)>;

/// Degree marker for "depends on this dimension, but not polynomially".
inline constexpr int kNonPolynomial = -1;

/// Scalar parametric function with dependence metadata. The callback always
/// receives the full parameter vector; `deps` lists the dimensions the value
/// actually depends on (sorted), and `degrees[i]` is the polynomial degree in
/// dimension deps[i], or kNonPolynomial when unknown/non-polynomial.
struct ScalarEntry {
  std::vector<int> deps;
  std::vector<int> degrees;
  ScalarFn f;

  [[nodiscard]] bool is_constant() const { return deps.empty(); }
  [[nodiscard]] int degree_in(int dim) const;

  static ScalarEntry constant(double value);
  static ScalarEntry from_terms(
      const std::vector<std::pair<MultiIndex, double>>& terms);
  static ScalarEntry product(const ScalarEntry& a, const ScalarEntry& b);
  static ScalarEntry sum(const ScalarEntry& a, const ScalarEntry& b);
  static ScalarEntry scaled(const ScalarEntry& a, double factor);
  /// sqrt(a) (degrees become non-polynomial unless a is constant).
  static ScalarEntry sqrt_of(const ScalarEntry& a);
  /// a / b with b nonzero on the box.
  static ScalarEntry quotient(const ScalarEntry& a, const ScalarEntry& b);
};

/// Sparse map of scalar entries.
class EntrywiseMatrix {
 public:
  EntrywiseMatrix() = default;
  EntrywiseMatrix(Index rows, Index cols, int q)
      : rows_(rows), cols_(cols), q_(q) {}

  [[nodiscard]] Index rows() const { return rows_; }
  [[nodiscard]] Index cols() const { return cols_; }
  [[nodiscard]] int dims() const { return q_; }

  void set(Index k, Index l, ScalarEntry entry);
  [[nodiscard]] const std::map<std::pair<Index, Index>, ScalarEntry>& entries()
      const {
    return entries_;
  }

  [[nodiscard]] Matrix eval(const Vector& mu) const;
  [[nodiscard]] EntrywiseMatrix transpose() const;
  [[nodiscard]] EntrywiseMatrix operator+(const EntrywiseMatrix& o) const;
  [[nodiscard]] EntrywiseMatrix operator-(const EntrywiseMatrix& o) const;
  [[nodiscard]] EntrywiseMatrix operator*(const EntrywiseMatrix& o) const;

  [[nodiscard]] bool is_diagonal() const;

  static EntrywiseMatrix from_poly(const PolyMatrix& p);

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  int q_ = 0;
  std::map<std::pair<Index, Index>, ScalarEntry> entries_;
};

class ParametricMatrix {
 public:
  ParametricMatrix() = default;
  ParametricMatrix(PolyMatrix poly);           // NOLINT
  ParametricMatrix(EntrywiseMatrix entries);   // NOLINT
  ParametricMatrix(Index rows, Index cols, int q, MatrixFn fn);

  static ParametricMatrix constant(Matrix value, int q);

  [[nodiscard]] Index rows() const { return rows_; }
  [[nodiscard]] Index cols() const { return cols_; }
  [[nodiscard]] int dims() const { return q_; }

  [[nodiscard]] bool is_polynomial() const { return poly_.has_value(); }
  [[nodiscard]] bool is_entrywise() const {
    return poly_.has_value() || entries_.has_value();
  }
  [[nodiscard]] bool is_black_box() const {
    return !poly_ && !entries_;
  }

  [[nodiscard]] const PolyMatrix& polynomial() const;
  /// Entrywise view (polynomials are converted on the fly).
  [[nodiscard]] EntrywiseMatrix as_entrywise() const;

  [[nodiscard]] Matrix eval(const Vector& mu) const;
  [[nodiscard]] bool is_diagonal() const;

  [[nodiscard]] ParametricMatrix transpose() const;
  [[nodiscard]] ParametricMatrix operator+(const ParametricMatrix& o) const;
  [[nodiscard]] ParametricMatrix operator-(const ParametricMatrix& o) const;
  [[nodiscard]] ParametricMatrix operator*(const ParametricMatrix& o) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  int q_ = 0;
  std::optional<PolyMatrix> poly_;
  std::optional<EntrywiseMatrix> entries_;
  MatrixFn fn_;
};

/// Parameter-dependent pH system (general Q).
struct ParametricPHSystem {
  ParameterBox box;
  Index n = 0;
  Index m = 0;
  ParametricMatrix E, J, R, Q, B, P, S, N;

  [[nodiscard]] PHSystem eval(const Vector& mu) const;
};

/// Parameter-dependent pH system in standard form (Q = I).
struct ParametricStandardPH {
  ParameterBox box;
  Index n = 0;
  Index m = 0;
  ParametricMatrix E, J, R, B, P, S, N;

  [[nodiscard]] StandardPHSystem eval(const Vector& mu) const;
};

/// Parameter-dependent descriptor LTI system.
struct ParametricLTI {
  ParameterBox box;
  ParametricMatrix E, A, B, C, D;

  [[nodiscard]] LTISystem eval(const Vector& mu) const;
};

/// Basis transformation x~ = T(mu)^T x with Q = T T^T. For diagonal Q the
/// transformed entries are tracked entrywise (t_k X_kl t_l etc.), keeping
/// dependence metadata tight; for non-diagonal Q every slot becomes a
/// black-box callback that refactorizes Q(mu) per evaluation. Cholesky and
/// square-root factors coincide for diagonal Q.
ParametricStandardPH basis_transform(const ParametricPHSystem& sys,
                                     Factorization method = Factorization::Sqrt);

/// Image-space transformation; representation-preserving (polynomial in,
/// polynomial out).
ParametricStandardPH image_transform(const ParametricPHSystem& sys);

/// Drop the pH structure: A = (J-R)Q, B = B-P, C = (B+P)^T Q, D = S+N.
ParametricLTI to_lti(const ParametricPHSystem& sys);
ParametricLTI to_lti(const ParametricStandardPH& sys);

}  // namespace phsg
