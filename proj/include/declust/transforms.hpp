#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace declust {

enum class BasisVariant { Fourier, Daubechies8 };

// Orthonormal basis selector. n must be a power of two: at least 2 for the
// trigonometric basis, at least 16 for periodized Daubechies-8 (which needs
// room for its 16-tap filters).
struct BasisKind {
  BasisVariant variant;
  std::size_t n;

  static BasisKind fourier(std::size_t n);
  static BasisKind daubechies8(std::size_t n);
};

bool operator==(const BasisKind& a, const BasisKind& b);

// Coefficients of one signal in a basis. Index ordering (0-based):
//   Fourier: j=0 is the DC coefficient, j=2k-1 / j=2k are the cosine / sine
//   pair at frequency k (k = 1..n/2-1), j=n-1 is the Nyquist coefficient,
//   so the index is monotone in frequency.
//   Daubechies8: j=0 is the coarsest scaling coefficient, followed by detail
//   levels coarse to fine (level of length 2^l occupies [2^l, 2^{l+1})).
struct CoefficientVector {
  Eigen::VectorXd values;
  BasisKind basis;
};

// n x M matrix of per-column coefficients in a shared basis.
struct CoefficientMatrix {
  Eigen::MatrixXd values;
  BasisKind basis;
};

// Frequency index k(j) of the Fourier ordering above (k=0 for DC, n/2 for
// Nyquist).
std::size_t frequency_of_index(std::size_t j, std::size_t n);

CoefficientVector analyze(const Eigen::VectorXd& signal, const BasisKind& basis);
Eigen::VectorXd synthesize(const CoefficientVector& coeffs);

CoefficientMatrix analyze_columns(const Eigen::MatrixXd& X, const BasisKind& basis);
Eigen::MatrixXd synthesize_columns(const CoefficientMatrix& G);

// Daubechies-8 filter pair. lowpass sums to sqrt(2); highpass[i] is the
// quadrature mirror (-1)^i lowpass[15-i].
namespace db8 {
extern const std::array<double, 16> lowpass;
const std::array<double, 16>& highpass();
}  // namespace db8

}  // namespace declust
