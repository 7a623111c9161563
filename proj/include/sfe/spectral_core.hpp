#pragma once

// Uniform periodic grids on the box C = [0, 2pi)^d, forward/inverse Fourier
// transforms, and diagonal application/inversion of constant-coefficient
// operators through their symbols.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace sfe {

inline constexpr double two_pi = 6.283185307179586476925286766559;

using Complex = std::complex<double>;
using RealField = std::vector<double>;
using Spectrum = std::vector<Complex>;

// Uniform periodic grid: N nodes per axis at x_m = m * dx, dx = 2pi/N.
struct Grid {
  int d = 1;  // 1 or 2
  int N = 0;  // per axis, even power of two, >= 4

  Grid(int dim, int n);

  double dx() const { return two_pi / N; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(N);
    return s;
  }
  // Row-major flattening; axis 0 is the slow index.
  std::size_t index(int ix, int iy = 0) const {
    return d == 1 ? static_cast<std::size_t>(ix)
                  : static_cast<std::size_t>(ix) * N + iy;
  }
  double coord(int i) const { return i * dx(); }
  // FFT storage order m -> integer wavenumber in [-N/2, N/2).
  int wavenumber(int m) const { return m < N / 2 ? m : m - N; }

  bool operator==(const Grid&) const = default;
};

// Constant-coefficient operator represented by its Fourier multiplier.
struct OperatorSymbol {
  enum class Kind { Laplacian, Helmholtz, ShiftedLaplacian, Derivative };

  Kind kind = Kind::Laplacian;
  double alpha = 0.0;            // Helmholtz: I - alpha * Laplacian
  double sigma = 0.0;            // ShiftedLaplacian: -Laplacian - sigma
  std::array<int, 2> order{0, 0};  // Derivative: d^order0_x d^order1_y

  static OperatorSymbol laplacian();
  static OperatorSymbol helmholtz(double alpha);
  static OperatorSymbol shifted_laplacian(double sigma);
  static OperatorSymbol derivative(std::array<int, 2> order);

  // Multiplier at integer wave vector j. `nyquist` flags per axis whether j
  // sits on the unpaired -N/2 mode; odd derivative orders vanish there.
  Complex at(std::array<int, 2> j, int d, std::array<bool, 2> nyquist) const;
};

// Samples of a real field or its Fourier coefficients on one grid.
struct GridField {
  enum class Rep { Values, Coefficients };

  Grid grid;
  Rep rep = Rep::Values;
  RealField values;  // when rep == Values
  Spectrum coeffs;   // when rep == Coefficients

  static GridField from_values(const Grid& g, RealField v);
  static GridField from_coefficients(const Grid& g, Spectrum c);
};

// Coefficients normalized as c_j = N^{-d} sum_m f(x_m) exp(-i j.x_m).
Spectrum to_coefficients(const Grid& g, const RealField& values);
GridField to_coefficients(const GridField& f);

// Inverse transform; rejects coefficient arrays whose conjugate symmetry is
// broken beyond 1e-12 * max|c| and discards the round-off imaginary residue.
RealField to_values(const Grid& g, const Spectrum& coeffs);
GridField to_values(const GridField& f);

// Termwise product c_j <- symbol(j) * c_j.
void apply_symbol_inplace(const Grid& g, Spectrum& coeffs, const OperatorSymbol& op);
GridField apply_symbol(const GridField& f, const OperatorSymbol& op);

// Zero-mean inverse of the Laplacian: c_j / (-|j|^2) for j != 0, c_0 = 0.
void invert_zero_mean_laplacian_inplace(const Grid& g, Spectrum& coeffs);
GridField invert_zero_mean_laplacian(const GridField& f);

// Inverse of I - alpha * Laplacian, alpha > 0: c_j / (1 + alpha |j|^2).
void invert_helmholtz_inplace(const Grid& g, Spectrum& coeffs, double alpha);
GridField invert_helmholtz(const GridField& f, double alpha);

// Inverse of -Laplacian - sigma: c_j / (|j|^2 - sigma). The caller must have
// validated that sigma is bounded away from every attainable |j|^2.
void invert_shifted_laplacian_inplace(const Grid& g, Spectrum& coeffs, double sigma);

double mean_value(const Grid& g, const RealField& values);

}  // namespace sfe
