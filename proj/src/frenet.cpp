#include "kharmonic/frenet.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace kharmonic {

FrameField::FrameField(int dim) {
  if (dim < 2) throw std::invalid_argument("frame dimension must be >= 2, got " + std::to_string(dim));
  coeffs_.resize(static_cast<std::size_t>(dim));
}

FrameField::FrameField(int dim, std::vector<DiffPoly> coeffs) : coeffs_(std::move(coeffs)) {
  if (dim < 2) throw std::invalid_argument("frame dimension must be >= 2, got " + std::to_string(dim));
  if (static_cast<int>(coeffs_.size()) != dim) {
    throw std::invalid_argument("frame field has " + std::to_string(coeffs_.size()) +
                                " coefficients, expected " + std::to_string(dim));
  }
}

FrameField FrameField::basis(int dim, int i) {
  FrameField v(dim);
  v[i] = DiffPoly(1L);
  return v;
}

bool FrameField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const DiffPoly& c) { return c.is_zero(); });
}

FrameField FrameField::operator-() const {
  FrameField out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

FrameField& FrameField::operator+=(const FrameField& other) {
  if (other.dim() != dim()) throw std::invalid_argument("frame field dimension mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FrameField& FrameField::operator-=(const FrameField& other) {
  if (other.dim() != dim()) throw std::invalid_argument("frame field dimension mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FrameField operator*(const DiffPoly& f, const FrameField& v) {
  FrameField out = v;
  for (auto& c : out.coeffs_) c = f * c;
  return out;
}

DiffPoly inner(const FrameField& v, const FrameField& w) {
  if (v.dim() != w.dim()) throw std::invalid_argument("frame field dimension mismatch");
  DiffPoly sum;
  for (int i = 1; i <= v.dim(); ++i) sum += v[i] * w[i];
  return sum;
}

FrameField tension(int n) {
  FrameField t(n);
  t[2] = DiffPoly::kappa(1);
  return t;
}

FrameField covariant_derivative(const FrameField& v) {
  const int n = v.dim();
  FrameField out(n);
  for (int i = 1; i <= n; ++i) {
    const DiffPoly& c = v[i];
    if (c.is_zero()) continue;
    out[i] += differentiate(c);
    // nabla e_i = -kappa_{i-1} e_{i-1} + kappa_i e_{i+1}
    if (i > 1) out[i - 1] -= c * DiffPoly::kappa(i - 1);
    if (i < n) out[i + 1] += c * DiffPoly::kappa(i);
  }
  return out;
}

FrameField second_derivative_power(const FrameField& v, int j) {
  if (j < 0) throw std::invalid_argument("negative power");
  FrameField out = v;
  for (int i = 0; i < j; ++i) out = covariant_derivative(covariant_derivative(out));
  return out;
}

FrameField rough_laplacian(const FrameField& v) { return -covariant_derivative(covariant_derivative(v)); }

FrameField curvature_operator(const FrameField& v) {
  FrameField out(v.dim());
  const DiffPoly k = DiffPoly::curvature_constant();
  for (int i = 2; i <= v.dim(); ++i) out[i] = k * v[i];
  return out;
}

FrameField tau_k(int k, int n) {
  if (k < 2) throw std::invalid_argument("tau_k requires k >= 2 (k = 1 is the tension field), got " + std::to_string(k));
  FrameField lap = tension(n);
  for (int i = 0; i < k - 2; ++i) lap = rough_laplacian(lap);
  return rough_laplacian(lap) - curvature_operator(lap);
}

std::vector<std::vector<DiffPoly>> connection_matrix(int n) {
  std::vector<std::vector<DiffPoly>> a(static_cast<std::size_t>(n), std::vector<DiffPoly>(static_cast<std::size_t>(n)));
  for (int i = 1; i <= n; ++i) {
    const FrameField d = covariant_derivative(FrameField::basis(n, i));
    for (int j = 1; j <= n; ++j) a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)] = d[j];
  }
  return a;
}

}  // namespace kharmonic
