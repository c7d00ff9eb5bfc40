#include "etnet/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "etnet/error.hpp"

namespace etnet {

double column_integral(std::span<const double> column, double ds) {
  if (column.empty()) return 0.0;
  double sum = 0.5 * (column.front() + column.back());
  for (std::size_t i = 1; i + 1 < column.size(); ++i) sum += column[i];
  return column.size() == 1 ? 0.0 : sum * ds;
}

ScalarField age_integral(const DensityField& f, std::optional<std::span<const double>> weights) {
  const auto& ages = f.ages();
  if (weights && weights->size() != ages.size())
    throw DimensionError("age weights have " + std::to_string(weights->size()) + " entries, grid has " +
                         std::to_string(ages.size()) + " age nodes");
  ScalarField out(f.space());
  for (std::size_t ix = 0; ix < f.space().size(); ++ix) {
    auto col = f.column(ix);
    double sum = 0.0;
    for (std::size_t is = 0; is < col.size(); ++is) {
      const double v = weights ? col[is] * (*weights)[is] : col[is];
      sum += ages.weight(is) * v;
    }
    out[ix] = sum;
  }
  return out;
}

double spatial_integral(const ScalarField& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i];
  return sum * f.grid().dx();
}

ScalarField kernel_apply(const ConnectivityKernel& w, const ScalarField& n) {
  if (!(w.grid() == n.grid())) throw DimensionError("kernel and activity live on different grids");
  const std::size_t nx = n.size();
  const double dx = n.grid().dx();
  ScalarField out(n.grid());
  for (std::size_t ix = 0; ix < nx; ++ix) {
    auto row = w.row(ix);
    double sum = 0.0;
    for (std::size_t iy = 0; iy < nx; ++iy) sum += row[iy] * n[iy];
    out[ix] = sum * dx;
  }
  return out;
}

double kernel_mean(const ConnectivityKernel& w) {
  double sum = 0.0;
  for (double v : w.values()) sum += v;
  const double dx = w.grid().dx();
  const double len = w.grid().length();
  return sum * dx * dx / (len * len);
}

double kernel_mean_deviation(const ConnectivityKernel& w) {
  const double mean = kernel_mean(w);
  double dev = 0.0;
  for (double v : w.values()) dev = std::max(dev, std::abs(v - mean));
  return dev;
}

double mean_deviation(const ScalarField& f) {
  const double mean = spatial_integral(f) / f.grid().length();
  double dev = 0.0;
  for (double v : f.values()) dev = std::max(dev, std::abs(v - mean));
  return dev;
}

ScalarDistances norms(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("scalar fields live on different grids");
  ScalarDistances d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = std::abs(a[i] - b[i]);
    d.l1 += e;
    d.linf = std::max(d.linf, e);
  }
  d.l1 *= a.grid().dx();
  return d;
}

DensityDistances norms(const DensityField& a, const DensityField& b) {
  if (!(a.ages() == b.ages()) || !(a.space() == b.space()))
    throw DimensionError("density fields live on different grids");
  DensityDistances d;
  const auto& ages = a.ages();
  for (std::size_t ix = 0; ix < a.space().size(); ++ix) {
    auto ca = a.column(ix);
    auto cb = b.column(ix);
    double col = 0.0;
    for (std::size_t is = 0; is < ca.size(); ++is) {
      const double e = std::abs(ca[is] - cb[is]);
      col += ages.weight(is) * e;
      d.linf = std::max(d.linf, e);
    }
    d.l1_sx += col;
    d.linf_x_l1_s = std::max(d.linf_x_l1_s, col);
  }
  d.l1_sx *= a.space().dx();
  return d;
}

KernelDistances norms(const ConnectivityKernel& a, const ConnectivityKernel& b) {
  if (!(a.grid() == b.grid())) throw DimensionError("kernels live on different grids");
  KernelDistances d;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double e = std::abs(va[i] - vb[i]);
    d.l1 += e;
    d.linf = std::max(d.linf, e);
  }
  d.l1 *= a.grid().dx() * a.grid().dx();
  return d;
}

}  // namespace etnet
