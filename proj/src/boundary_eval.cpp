#include "sfe/boundary_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace sfe {

namespace {

// exp(i j(m) x) for every FFT storage slot m along one axis.
std::vector<Complex> axis_phases(const Grid& g, double x) {
  std::vector<Complex> ph(g.N);
  for (int m = 0; m < g.N; ++m)
    ph[m] = std::polar(1.0, g.wavenumber(m) * x);
  return ph;
}

Complex eval_one_node(const Grid& g, const Spectrum& coeffs, const Point& s) {
  if (g.d == 1) {
    const auto px = axis_phases(g, s[0]);
    Complex acc{0.0, 0.0};
    for (int m = 0; m < g.N; ++m) acc += coeffs[m] * px[m];
    return acc;
  }
  const auto px = axis_phases(g, s[0]);
  const auto py = axis_phases(g, s[1]);
  Complex acc{0.0, 0.0};
  for (int mx = 0; mx < g.N; ++mx) {
    Complex row{0.0, 0.0};
    const Complex* c = coeffs.data() + static_cast<std::size_t>(mx) * g.N;
    for (int my = 0; my < g.N; ++my) row += c[my] * py[my];
    acc += px[mx] * row;
  }
  return acc;
}

int binomial(int n, int k) {
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - i + 1) / i;
  return r;
}

}  // namespace

std::vector<double> eval_at_nodes(const Grid& g, const Spectrum& coeffs,
                                  const std::vector<Point>& nodes) {
  std::vector<double> out(nodes.size());
  const int n = static_cast<int>(nodes.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    out[i] = eval_one_node(g, coeffs, nodes[i]).real();
  return out;
}

std::vector<double> eval_at_nodes_serial(const Grid& g, const Spectrum& coeffs,
                                         const std::vector<Point>& nodes) {
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Complex acc{0.0, 0.0};
    if (g.d == 1) {
      for (int m = 0; m < g.N; ++m)
        acc += coeffs[m] * std::polar(1.0, g.wavenumber(m) * nodes[i][0]);
    } else {
      std::size_t idx = 0;
      for (int mx = 0; mx < g.N; ++mx) {
        for (int my = 0; my < g.N; ++my, ++idx) {
          const double phase = g.wavenumber(mx) * nodes[i][0] +
                               g.wavenumber(my) * nodes[i][1];
          acc += coeffs[idx] * std::polar(1.0, phase);
        }
      }
    }
    out[i] = acc.real();
  }
  return out;
}

TraceBlock normal_derivative_traces(const GridField& f,
                                    const BoundaryDiscretization& bd, int k) {
  if (k < 0) throw std::invalid_argument("normal_derivative_traces: k >= 0");
  const GridField cf = to_coefficients(f);
  const Grid& g = cf.grid;
  TraceBlock tb{k, bd.n_b, std::vector<double>((k + 1) * bd.n_b, 0.0)};

  if (g.d == 1) {
    for (int l = 0; l <= k; ++l) {
      Spectrum dc = cf.coeffs;
      apply_symbol_inplace(g, dc, OperatorSymbol::derivative({l, 0}));
      const auto vals = eval_at_nodes(g, dc, bd.nodes);
      for (int i = 0; i < bd.n_b; ++i)
        tb.data[l * bd.n_b + i] = std::pow(bd.normals[i][0], l) * vals[i];
    }
    return tb;
  }

  // (n . grad)^l = sum_p C(l,p) nx^p ny^(l-p) d^p_x d^(l-p)_y.
  for (int l = 0; l <= k; ++l) {
    for (int p = 0; p <= l; ++p) {
      Spectrum dc = cf.coeffs;
      apply_symbol_inplace(g, dc, OperatorSymbol::derivative({p, l - p}));
      const auto vals = eval_at_nodes(g, dc, bd.nodes);
      const double w = binomial(l, p);
      for (int i = 0; i < bd.n_b; ++i) {
        const double nx = bd.normals[i][0];
        const double ny = bd.normals[i][1];
        tb.data[l * bd.n_b + i] +=
            w * std::pow(nx, p) * std::pow(ny, l - p) * vals[i];
      }
    }
  }
  return tb;
}

std::vector<Complex> mode_trace_closed_form(std::array<int, 2> j, int d,
                                            const BoundaryDiscretization& bd,
                                            int k) {
  std::vector<Complex> col((k + 1) * bd.n_b);
  for (int i = 0; i < bd.n_b; ++i) {
    double jdotn = j[0] * bd.normals[i][0];
    double jdots = j[0] * bd.nodes[i][0];
    if (d == 2) {
      jdotn += j[1] * bd.normals[i][1];
      jdots += j[1] * bd.nodes[i][1];
    }
    const Complex phase = std::polar(1.0, jdots);
    Complex factor{1.0, 0.0};
    for (int l = 0; l <= k; ++l) {
      col[l * bd.n_b + i] = factor * phase;
      factor *= Complex{0.0, jdotn};
    }
  }
  return col;
}

}  // namespace sfe
