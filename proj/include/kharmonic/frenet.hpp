#pragma once

// Frame fields along a unit-speed curve, written in its Frenet frame e_1..e_n,
// and the differential operators acting on them.

#include <vector>

#include "kharmonic/diffpoly.hpp"

namespace kharmonic {

/// V = sum_i coeffs[i] * e_{i+1}. Curvatures kappa_i with i >= dim are treated as 0.
class FrameField {
 public:
  explicit FrameField(int dim);
  FrameField(int dim, std::vector<DiffPoly> coeffs);

  /// The unit field e_i (1-based).
  static FrameField basis(int dim, int i);

  int dim() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<DiffPoly>& coeffs() const { return coeffs_; }
  /// Coefficient of e_i, 1-based.
  const DiffPoly& operator[](int i) const { return coeffs_.at(static_cast<std::size_t>(i - 1)); }
  DiffPoly& operator[](int i) { return coeffs_.at(static_cast<std::size_t>(i - 1)); }
  bool is_zero() const;

  FrameField operator-() const;
  FrameField& operator+=(const FrameField& other);
  FrameField& operator-=(const FrameField& other);
  friend FrameField operator+(FrameField a, const FrameField& b) { return a += b; }
  friend FrameField operator-(FrameField a, const FrameField& b) { return a -= b; }
  friend FrameField operator*(const DiffPoly& f, const FrameField& v);

  friend bool operator==(const FrameField&, const FrameField&) = default;

 private:
  std::vector<DiffPoly> coeffs_;
};

/// Orthonormal-frame inner product sum_i c_i d_i.
DiffPoly inner(const FrameField& v, const FrameField& w);

/// Tension field of an arclength curve, kappa_1 e_2. Requires n >= 2.
FrameField tension(int n);

/// nabla_{gamma'} V via the Leibniz rule and the Frenet equations.
FrameField covariant_derivative(const FrameField& v);

/// (nabla nabla)^j V.
FrameField second_derivative_power(const FrameField& v, int j);

/// Rough Laplacian along the curve: -nabla nabla V.
FrameField rough_laplacian(const FrameField& v);

/// Curvature term R^N(V, gamma') gamma' in constant curvature K: K (V - <V,e_1> e_1).
FrameField curvature_operator(const FrameField& v);

/// tau_k = Lap^{k-1} tau - R(Lap^{k-2} tau), k >= 2.
FrameField tau_k(int k, int n);

/// Connection matrix A with nabla e_i = sum_j A(j,i) e_j, entries as DiffPoly.
std::vector<std::vector<DiffPoly>> connection_matrix(int n);

}  // namespace kharmonic
