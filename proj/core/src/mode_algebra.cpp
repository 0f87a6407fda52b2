#include "oamnet/mode_algebra.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace oamnet {

namespace {

void check_order(int order, int order_cap, const char* what) {
  if (order > order_cap) {
    throw std::out_of_range(std::string(what) + ": order " + std::to_string(order) +
                            " exceeds cap " + std::to_string(order_cap));
  }
}

void check_nonnegative(int value, const char* name) {
  if (value < 0) {
    throw std::invalid_argument(std::string(name) + " must be nonnegative, got " +
                                std::to_string(value));
  }
}

}  // namespace

Complex unit_imaginary_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

ModeIndices indices_from_nm(int n, int m) {
  check_nonnegative(n, "n");
  check_nonnegative(m, "m");
  return ModeIndices{n, m, n - m, n < m ? n : m};
}

ModeIndices indices_from_lp(int ell, int p) {
  check_nonnegative(p, "p");
  const int n = ell >= 0 ? p + ell : p;
  const int m = ell >= 0 ? p : p - ell;
  return ModeIndices{n, m, ell, p};
}

Complex inner(const ModeVector& a, const ModeVector& b) {
  if (a.order != b.order) {
    throw std::invalid_argument("inner: mode orders differ");
  }
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
    acc += std::conj(a.amplitudes[k]) * b.amplitudes[k];
  }
  return acc;
}

double norm(const ModeVector& v) {
  double acc = 0.0;
  for (const Complex& c : v.amplitudes) acc += std::norm(c);
  return std::sqrt(acc);
}

std::vector<long long> expansion_polynomial(int n, int m) {
  check_nonnegative(n, "n");
  check_nonnegative(m, "m");
  std::vector<long long> coeff{1};
  coeff.reserve(static_cast<std::size_t>(n + m) + 1);
  // multiply by (1 - t) n times, then by (1 + t) m times
  for (int i = 0; i < n; ++i) {
    coeff.push_back(0);
    for (std::size_t k = coeff.size() - 1; k > 0; --k) coeff[k] -= coeff[k - 1];
  }
  for (int j = 0; j < m; ++j) {
    coeff.push_back(0);
    for (std::size_t k = coeff.size() - 1; k > 0; --k) coeff[k] += coeff[k - 1];
  }
  return coeff;
}

ModeVector lg_coefficients(int n, int m, int order_cap) {
  check_nonnegative(n, "n");
  check_nonnegative(m, "m");
  const int order = n + m;
  check_order(order, order_cap, "lg_coefficients");

  const auto poly = expansion_polynomial(n, m);
  // The derivative term d^k/dt^k [...] at 0 equals k! * poly[k]; the leading
  // 1/k! in the coefficient formula cancels it, leaving poly[k] times the
  // square-root weight. The weight is staged through lgamma in long double,
  // keeping every amplitude well inside the 1e-12 tolerances.
  const long double ln2 = 0.6931471805599453094172321214581766L;
  ModeVector out;
  out.order = order;
  out.amplitudes.resize(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    const long double logw = 0.5L * (std::lgamma(static_cast<long double>(order - k + 1)) +
                                     std::lgamma(static_cast<long double>(k + 1)) -
                                     static_cast<long double>(order) * ln2 -
                                     std::lgamma(static_cast<long double>(n + 1)) -
                                     std::lgamma(static_cast<long double>(m + 1)));
    const long double magnitude =
        std::exp(logw) * static_cast<long double>(poly[static_cast<std::size_t>(k)]);
    out.amplitudes[static_cast<std::size_t>(k)] =
        unit_imaginary_power(k) * static_cast<double>(magnitude);
  }
  return out;
}

ModeVector lg_mode(int ell, int p, int order_cap) {
  const ModeIndices idx = indices_from_lp(ell, p);
  return lg_coefficients(idx.n, idx.m, order_cap);
}

UnitaryMatrix UnitaryMatrix::identity(int dimension) {
  UnitaryMatrix u(dimension);
  for (int i = 0; i < dimension; ++i) u.at(i, i) = Complex{1.0, 0.0};
  return u;
}

UnitaryMatrix UnitaryMatrix::adjoint() const {
  UnitaryMatrix out(dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) out.at(c, r) = std::conj(at(r, c));
  return out;
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  if (dim != rhs.dim) throw std::invalid_argument("matrix dimensions differ");
  UnitaryMatrix out(dim);
  for (int r = 0; r < dim; ++r) {
    for (int k = 0; k < dim; ++k) {
      const Complex a = at(r, k);
      if (a == Complex{0.0, 0.0}) continue;
      for (int c = 0; c < dim; ++c) out.at(r, c) += a * rhs.at(k, c);
    }
  }
  return out;
}

std::vector<Complex> UnitaryMatrix::apply(const std::vector<Complex>& v) const {
  if (static_cast<int>(v.size()) != dim) {
    throw std::invalid_argument("vector length does not match matrix dimension");
  }
  std::vector<Complex> out(v.size());
  for (int r = 0; r < dim; ++r) {
    Complex acc{0.0, 0.0};
    for (int c = 0; c < dim; ++c) acc += at(r, c) * v[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc;
  }
  return out;
}

double UnitaryMatrix::max_abs_diff(const UnitaryMatrix& other) const {
  if (dim != other.dim) throw std::invalid_argument("matrix dimensions differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    worst = std::max(worst, std::abs(entries[i] - other.entries[i]));
  }
  return worst;
}

double UnitaryMatrix::unitarity_defect() const {
  return ((*this) * adjoint()).max_abs_diff(identity(dim));
}

std::vector<int> admissible_ells(int order) {
  std::vector<int> ells;
  ells.reserve(static_cast<std::size_t>(order) + 1);
  for (int ell = -order; ell <= order; ell += 2) ells.push_back(ell);
  return ells;
}

UnitaryMatrix rotation_matrix(int order, double alpha, int order_cap) {
  check_nonnegative(order, "order");
  check_order(order, order_cap, "rotation_matrix");
  UnitaryMatrix u(order + 1);
  for (const int ell : admissible_ells(order)) {
    const ModeVector v = lg_mode(ell, (order - std::abs(ell)) / 2, order_cap);
    const Complex phase = std::exp(Complex{0.0, -static_cast<double>(ell) * alpha});
    for (int r = 0; r <= order; ++r) {
      const Complex vr = phase * v.amplitudes[static_cast<std::size_t>(r)];
      for (int c = 0; c <= order; ++c) {
        u.at(r, c) += vr * std::conj(v.amplitudes[static_cast<std::size_t>(c)]);
      }
    }
  }
  return u;
}

ModeVector apply_rotation(const ModeVector& mode, double alpha, int order_cap) {
  const UnitaryMatrix u = rotation_matrix(mode.order, alpha, order_cap);
  ModeVector out;
  out.order = mode.order;
  out.amplitudes = u.apply(mode.amplitudes);
  return out;
}

}  // namespace oamnet
