#include "sfe/spectral_core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace sfe {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW plans are created and executed under one lock: plan creation is not
// thread-safe, and the shared in/out buffers must not be aliased by two
// callers. ESTIMATE planning keeps the chosen algorithm deterministic.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  void execute(const Grid& g, int sign, const Complex* in, Complex* out) {
    std::lock_guard<std::mutex> lock(mu_);
    Entry& e = entry(g, sign);
    std::memcpy(e.buf, static_cast<const void*>(in),
                g.size() * sizeof(fftw_complex));
    fftw_execute(e.plan);
    std::memcpy(static_cast<void*>(out), e.buf,
                g.size() * sizeof(fftw_complex));
  }

 private:
  struct Entry {
    fftw_plan plan = nullptr;
    fftw_complex* buf = nullptr;
  };

  Entry& entry(const Grid& g, int sign) {
    auto key = std::tuple(g.d, g.N, sign);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    Entry e;
    e.buf = fftw_alloc_complex(g.size());
    if (g.d == 1) {
      e.plan = fftw_plan_dft_1d(g.N, e.buf, e.buf, sign, FFTW_ESTIMATE);
    } else {
      e.plan = fftw_plan_dft_2d(g.N, g.N, e.buf, e.buf, sign, FFTW_ESTIMATE);
    }
    return entries_.emplace(key, e).first->second;
  }

  std::mutex mu_;
  std::map<std::tuple<int, int, int>, Entry> entries_;
};

std::size_t conj_index(const Grid& g, std::size_t idx) {
  if (g.d == 1) {
    return idx == 0 ? 0 : g.size() - idx;
  }
  int mx = static_cast<int>(idx) / g.N;
  int my = static_cast<int>(idx) % g.N;
  int cx = mx == 0 ? 0 : g.N - mx;
  int cy = my == 0 ? 0 : g.N - my;
  return static_cast<std::size_t>(cx) * g.N + cy;
}

double sq_norm(std::array<int, 2> j, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += static_cast<double>(j[a]) * j[a];
  return s;
}

Complex i_pow(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

template <typename Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  if (g.d == 1) {
    for (int m = 0; m < g.N; ++m) {
      fn(static_cast<std::size_t>(m), std::array<int, 2>{g.wavenumber(m), 0},
         std::array<bool, 2>{m == g.N / 2, false});
    }
  } else {
    std::size_t idx = 0;
    for (int mx = 0; mx < g.N; ++mx) {
      for (int my = 0; my < g.N; ++my, ++idx) {
        fn(idx, std::array<int, 2>{g.wavenumber(mx), g.wavenumber(my)},
           std::array<bool, 2>{mx == g.N / 2, my == g.N / 2});
      }
    }
  }
}

}  // namespace

Grid::Grid(int dim, int n) : d(dim), N(n) {
  if (d != 1 && d != 2) throw std::invalid_argument("Grid: d must be 1 or 2");
  if (N < 4 || !power_of_two(N))
    throw std::invalid_argument("Grid: N must be a power of two >= 4");
}

OperatorSymbol OperatorSymbol::laplacian() { return {}; }

OperatorSymbol OperatorSymbol::helmholtz(double alpha) {
  if (alpha <= 0.0)
    throw std::invalid_argument("helmholtz: alpha must be positive");
  OperatorSymbol s;
  s.kind = Kind::Helmholtz;
  s.alpha = alpha;
  return s;
}

OperatorSymbol OperatorSymbol::shifted_laplacian(double sigma) {
  OperatorSymbol s;
  s.kind = Kind::ShiftedLaplacian;
  s.sigma = sigma;
  return s;
}

OperatorSymbol OperatorSymbol::derivative(std::array<int, 2> order) {
  OperatorSymbol s;
  s.kind = Kind::Derivative;
  s.order = order;
  return s;
}

Complex OperatorSymbol::at(std::array<int, 2> j, int d,
                           std::array<bool, 2> nyquist) const {
  switch (kind) {
    case Kind::Laplacian:
      return {-sq_norm(j, d), 0.0};
    case Kind::Helmholtz:
      return {1.0 + alpha * sq_norm(j, d), 0.0};
    case Kind::ShiftedLaplacian:
      return {sq_norm(j, d) - sigma, 0.0};
    case Kind::Derivative: {
      Complex m{1.0, 0.0};
      for (int a = 0; a < d; ++a) {
        if (order[a] == 0) continue;
        if (nyquist[a] && order[a] % 2 == 1) return {0.0, 0.0};
        m *= i_pow(order[a]) * std::pow(static_cast<double>(j[a]), order[a]);
      }
      return m;
    }
  }
  return {0.0, 0.0};
}

GridField GridField::from_values(const Grid& g, RealField v) {
  if (v.size() != g.size())
    throw std::invalid_argument("GridField: value size mismatch");
  GridField f{g, Rep::Values, std::move(v), {}};
  return f;
}

GridField GridField::from_coefficients(const Grid& g, Spectrum c) {
  if (c.size() != g.size())
    throw std::invalid_argument("GridField: coefficient size mismatch");
  GridField f{g, Rep::Coefficients, {}, std::move(c)};
  return f;
}

Spectrum to_coefficients(const Grid& g, const RealField& values) {
  if (values.size() != g.size())
    throw std::invalid_argument("to_coefficients: size mismatch");
  Spectrum in(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) in[i] = values[i];
  Spectrum out(g.size());
  PlanCache::instance().execute(g, FFTW_FORWARD, in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (Complex& c : out) c *= scale;
  return out;
}

GridField to_coefficients(const GridField& f) {
  if (f.rep == GridField::Rep::Coefficients) return f;
  return GridField::from_coefficients(f.grid, to_coefficients(f.grid, f.values));
}

RealField to_values(const Grid& g, const Spectrum& coeffs) {
  if (coeffs.size() != g.size())
    throw std::invalid_argument("to_values: size mismatch");
  double cmax = 0.0;
  for (const Complex& c : coeffs) cmax = std::max(cmax, std::abs(c));
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Complex other = std::conj(coeffs[conj_index(g, i)]);
    worst = std::max(worst, std::abs(coeffs[i] - other));
  }
  if (worst > 1e-12 * std::max(cmax, 1e-300))
    throw std::invalid_argument("to_values: conjugate symmetry violated");
  Spectrum out(g.size());
  PlanCache::instance().execute(g, FFTW_BACKWARD, coeffs.data(), out.data());
  RealField values(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
  return values;
}

GridField to_values(const GridField& f) {
  if (f.rep == GridField::Rep::Values) return f;
  return GridField::from_values(f.grid, to_values(f.grid, f.coeffs));
}

void apply_symbol_inplace(const Grid& g, Spectrum& coeffs,
                          const OperatorSymbol& op) {
  for_each_mode(g, [&](std::size_t idx, std::array<int, 2> j,
                       std::array<bool, 2> nyq) {
    coeffs[idx] *= op.at(j, g.d, nyq);
  });
}

GridField apply_symbol(const GridField& f, const OperatorSymbol& op) {
  GridField c = to_coefficients(f);
  apply_symbol_inplace(c.grid, c.coeffs, op);
  return c;
}

void invert_zero_mean_laplacian_inplace(const Grid& g, Spectrum& coeffs) {
  for_each_mode(g, [&](std::size_t idx, std::array<int, 2> j,
                       std::array<bool, 2>) {
    const double n2 = sq_norm(j, g.d);
    coeffs[idx] = n2 == 0.0 ? Complex{0.0, 0.0} : coeffs[idx] / (-n2);
  });
}

GridField invert_zero_mean_laplacian(const GridField& f) {
  GridField c = to_coefficients(f);
  invert_zero_mean_laplacian_inplace(c.grid, c.coeffs);
  return c;
}

void invert_helmholtz_inplace(const Grid& g, Spectrum& coeffs, double alpha) {
  if (alpha <= 0.0)
    throw std::invalid_argument("invert_helmholtz: alpha must be positive");
  for_each_mode(g, [&](std::size_t idx, std::array<int, 2> j,
                       std::array<bool, 2>) {
    coeffs[idx] /= 1.0 + alpha * sq_norm(j, g.d);
  });
}

GridField invert_helmholtz(const GridField& f, double alpha) {
  GridField c = to_coefficients(f);
  invert_helmholtz_inplace(c.grid, c.coeffs, alpha);
  return c;
}

void invert_shifted_laplacian_inplace(const Grid& g, Spectrum& coeffs,
                                      double sigma) {
  for_each_mode(g, [&](std::size_t idx, std::array<int, 2> j,
                       std::array<bool, 2>) {
    coeffs[idx] /= sq_norm(j, g.d) - sigma;
  });
}

double mean_value(const Grid& g, const RealField& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(g.size());
}

}  // namespace sfe
