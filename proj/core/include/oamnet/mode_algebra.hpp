#pragma once

#include <complex>
#include <vector>

namespace oamnet {

using Complex = std::complex<double>;

/// Factorials in the expansion coefficients are staged through lgamma;
/// beyond this order the guarantees on the 1e-12 tolerances would erode,
/// so higher orders are rejected outright.
inline constexpr int kDefaultOrderCap = 30;

/// Index bookkeeping for one transverse mode. The azimuthal index ell is
/// kept signed (ell = n - m) so that counter-rotating modes of the same
/// order stay distinguishable; p = min(n, m) and N = n + m = 2p + |ell|.
struct ModeIndices {
  int n = 0;
  int m = 0;
  int ell = 0;
  int p = 0;

  bool operator==(const ModeIndices&) const = default;
};

ModeIndices indices_from_nm(int n, int m);
ModeIndices indices_from_lp(int ell, int p);

/// Order-N transverse mode as N+1 complex amplitudes; amplitude k is the
/// component along HG_{N-k,k}.
struct ModeVector {
  int order = 0;
  std::vector<Complex> amplitudes;
};

/// <a|b> with the conjugate on the left argument.
Complex inner(const ModeVector& a, const ModeVector& b);
double norm(const ModeVector& v);

/// Integer coefficients of (1-t)^n (1+t)^m, ascending powers of t.
/// Built by exact integer convolution; the k-th derivative at t=0 is
/// k! times entry k.
std::vector<long long> expansion_polynomial(int n, int m);

/// LG_{n,m} expanded over the order-(n+m) HG basis:
///   amplitude_k = i^k * sqrt((N-k)! k! / (2^N n! m!)) * c_k,
/// where c_k is the t^k coefficient of (1-t)^n (1+t)^m. Unit norm.
/// Throws std::out_of_range when n+m exceeds order_cap.
ModeVector lg_coefficients(int n, int m, int order_cap = kDefaultOrderCap);

/// Same, addressed by signed ell and radial index p.
ModeVector lg_mode(int ell, int p, int order_cap = kDefaultOrderCap);

/// Small dense complex matrix, row-major. Only what the beam-rotation
/// algebra needs: product, adjoint, identity, vector application.
struct UnitaryMatrix {
  int dim = 0;
  std::vector<Complex> entries;

  UnitaryMatrix() = default;
  explicit UnitaryMatrix(int dimension)
      : dim(dimension), entries(static_cast<std::size_t>(dimension) * dimension) {}

  Complex& at(int r, int c) { return entries[static_cast<std::size_t>(r) * dim + c]; }
  const Complex& at(int r, int c) const {
    return entries[static_cast<std::size_t>(r) * dim + c];
  }

  static UnitaryMatrix identity(int dimension);
  UnitaryMatrix adjoint() const;
  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;
  std::vector<Complex> apply(const std::vector<Complex>& v) const;

  /// Largest entrywise |a - b|.
  double max_abs_diff(const UnitaryMatrix& other) const;
  /// Largest entrywise deviation of U * U^dagger from the identity.
  double unitarity_defect() const;
};

/// Signed ell values admissible at a given order: {-N, -N+2, ..., N}.
std::vector<int> admissible_ells(int order);

/// The (N+1)x(N+1) beam-rotation unitary, built spectrally:
///   sum over admissible ell of exp(-i ell alpha) |v_ell><v_ell|
/// with v_ell the LG vector of that ell at order N. LG modes are thus
/// eigenvectors with eigenphase -ell*alpha by construction.
UnitaryMatrix rotation_matrix(int order, double alpha, int order_cap = kDefaultOrderCap);

/// Rotate a mode by alpha. A pure LG input with signed ell comes back as
/// exp(-i ell alpha) times itself.
ModeVector apply_rotation(const ModeVector& mode, double alpha,
                          int order_cap = kDefaultOrderCap);

/// i^k for k >= 0.
Complex unit_imaginary_power(int k);

}  // namespace oamnet
