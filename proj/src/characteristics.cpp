#include "etnet/characteristics.hpp"

#include <cmath>
#include <memory>

#include "etnet/error.hpp"

namespace etnet {

StimulationPath StimulationPath::frozen(const ScalarField& S, double t) {
  StimulationPath p;
  p.piece_length = t > 0.0 ? t : 1.0;
  p.levels = {S};
  return p;
}

const ScalarField& StimulationPath::at_piece(std::size_t k) const {
  if (levels.empty()) throw PreconditionError("stimulation path has no pieces");
  return levels[std::min(k, levels.size() - 1)];
}

// The boundary value solves the Volterra equation
//   N(tau) = A(tau) + int_0^tau p(a) e^{-Lambda(a)} N(tau - a) da,
//   A(tau) = int n0(u) p(u + tau) e^{-(Lambda(u + tau) - Lambda(u))} du.
// Both integrals are evaluated by product integration: the smooth factor (n0 e^{Lambda} in A,
// N in the convolution) is interpolated linearly and the exponential factor is integrated
// exactly. The convolution is then marched forward in time, its diagonal term solved implicitly.
ColumnSolution solve_column(const std::function<double(double)>& n0, double support, double S,
                            const FiringRateModel& model, double t, double h_req) {
  if (!(t >= 0.0)) throw PreconditionError("oracle time must be nonnegative");
  if (!(h_req > 0.0)) throw PreconditionError("oracle time step must be positive");
  const std::size_t J = t > 0.0 ? static_cast<std::size_t>(std::ceil(t / h_req - 1e-9)) : 0;
  const double h = J > 0 ? t / static_cast<double>(J) : h_req;
  const std::size_t U = static_cast<std::size_t>(std::ceil(support / h));
  if (model.p_inf() * (static_cast<double>(U + J + 1) * h) > 600.0)
    throw PreconditionError("oracle horizon too long: survival factor underflows");

  auto Lam = [&](double a) { return model.cumulative(a, S); };
  std::vector<double> E(U + J + 2);
  for (std::size_t k = 0; k < E.size(); ++k) E[k] = std::exp(-Lam(static_cast<double>(k) * h));
  std::vector<double> g(U + 1);
  for (std::size_t m = 0; m <= U; ++m) g[m] = n0(static_cast<double>(m) * h) / E[m];

  std::vector<double> N(J + 1);
  const double d1 = 1.0 - E[1];
  for (std::size_t j = 0; j <= J; ++j) {
    double A = 0.0;
    for (std::size_t m = 0; m < U; ++m) A += 0.5 * (g[m] + g[m + 1]) * (E[m + j] - E[m + j + 1]);
    if (j == 0) {
      N[0] = A;
      continue;
    }
    double B = 0.5 * d1 * N[j - 1];
    for (std::size_t m = 1; m < j; ++m) B += (E[m] - E[m + 1]) * 0.5 * (N[j - m] + N[j - m - 1]);
    N[j] = (A + B) / (1.0 - 0.5 * d1);
  }

  ColumnSolution sol;
  sol.h = h;
  sol.N = std::move(N);
  auto Nv = std::make_shared<std::vector<double>>(sol.N);
  sol.density = [n0, Nv, h, t, S, model](double s) {
    if (s >= t) {
      const double u = s - t;
      return n0(u) * std::exp(-(model.cumulative(s, S) - model.cumulative(u, S)));
    }
    const double tau = (t - s) / h;  // N at time t - s
    const std::size_t j = std::min(static_cast<std::size_t>(tau), Nv->size() - 1);
    const double f = tau - static_cast<double>(j);
    const double Nval = j + 1 < Nv->size() ? (1.0 - f) * (*Nv)[j] + f * (*Nv)[j + 1] : (*Nv)[j];
    return Nval * std::exp(-model.cumulative(s, S));
  };
  return sol;
}

namespace {

DensityField run_oracle(const std::function<std::function<double(double)>(std::size_t)>& column_datum,
                        double support, const AgeGrid& ages, const SpatialGrid& space,
                        const StimulationPath& path, const FiringRateModel& model, double t,
                        const OracleOptions& opts) {
  if (!(path.piece_length > 0.0)) throw PreconditionError("stimulation path needs a positive piece length");
  const double pieces_real = t / path.piece_length;
  const auto pieces = static_cast<std::size_t>(std::llround(pieces_real));
  if (t > 0.0 && std::abs(pieces_real - static_cast<double>(pieces)) > 1e-9 * std::max(1.0, pieces_real))
    throw PreconditionError("oracle time must be a multiple of the stimulation piece length");
  for (const auto& lvl : path.levels)
    if (!(lvl.grid() == space)) throw DimensionError("stimulation path is on a different spatial grid");

  DensityField out(ages, space);
  for (std::size_t ix = 0; ix < space.size(); ++ix) {
    std::function<double(double)> datum = column_datum(ix);
    double supp = support;
    for (std::size_t k = 0; k < pieces; ++k) {
      ColumnSolution sol = solve_column(datum, supp, path.at_piece(k)[ix], model, path.piece_length,
                                        opts.time_step);
      datum = sol.density;
      supp += path.piece_length;
    }
    for (std::size_t is = 0; is < ages.size(); ++is) out(is, ix) = datum(ages.node(is));
  }
  return out;
}

}  // namespace

DensityField characteristics_oracle(const InitialDensity& n0, const AgeGrid& ages, const SpatialGrid& space,
                                    const StimulationPath& path, const FiringRateModel& model, double t,
                                    const OracleOptions& opts) {
  auto datum = [&](std::size_t ix) {
    const double x = space.node(ix);
    return std::function<double(double)>([n0, x](double s) { return n0(s, x); });
  };
  return run_oracle(datum, ages.s_max(), ages, space, path, model, t, opts);
}

DensityField characteristics_oracle(const DensityField& n0, const StimulationPath& path,
                                    const FiringRateModel& model, double t, const OracleOptions& opts) {
  auto datum = [&](std::size_t ix) {
    auto col = std::make_shared<std::vector<double>>(n0.column(ix).begin(), n0.column(ix).end());
    const double ds = n0.ages().ds();
    return std::function<double(double)>([col, ds](double s) {
      if (s < 0.0) return 0.0;
      const double r = s / ds;
      const auto i = static_cast<std::size_t>(r);
      if (i + 1 >= col->size()) return i + 1 == col->size() && r == static_cast<double>(i) ? (*col)[i] : 0.0;
      const double f = r - static_cast<double>(i);
      return (1.0 - f) * (*col)[i] + f * (*col)[i + 1];
    });
  };
  return run_oracle(datum, n0.ages().s_max(), n0.ages(), n0.space(), path, model, t, opts);
}

}  // namespace etnet
