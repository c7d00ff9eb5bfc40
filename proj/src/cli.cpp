#include "etnet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "etnet/config.hpp"
#include "etnet/diagnostics.hpp"
#include "etnet/error.hpp"
#include "etnet/limit_solver.hpp"
#include "etnet/output.hpp"
#include "etnet/quadrature.hpp"
#include "etnet/stationary.hpp"

namespace etnet {

namespace {

struct Options {
  std::string preset;
  std::string config;
  std::string out;
  std::optional<double> t_end;
  std::optional<double> epsilon;
  std::optional<double> save_every;
  std::optional<std::string> picard;
  std::optional<double> tol;
  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  std::vector<double> k_list{1.0, 10.0, 100.0};
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "built-in experiment (see `presets`)");
  cmd->add_option("--config", o.config, "experiment file with key = value lines");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--epsilon", o.epsilon, "time-scale ratio in (0, 1]");
  cmd->add_option("--save-every", o.save_every, "recording cadence in time");
  cmd->add_option("--picard", o.picard, "S coupling per step")->check(CLI::IsMember({"lagged", "iterate"}));
  cmd->add_option("--tol", o.tol, "Picard / fixed-point tolerance");
}

ExperimentConfig resolve(const Options& o) {
  if (o.preset.empty() == o.config.empty()) throw ConfigError("give exactly one of --preset or --config");
  ExperimentConfig c = o.config.empty() ? preset_config(o.preset) : load_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.t_end) c.t_end = *o.t_end;
  if (o.epsilon) {
    c.epsilon = *o.epsilon;
  }
  if (o.save_every) c.save_every = *o.save_every;
  if (o.picard) c.coupling = *o.picard == "iterate" ? Coupling::iterate : Coupling::lagged;
  if (o.tol) c.tol = *o.tol;
  c.validate();
  return c;
}

void grid_meta(OutputWriter& w, const ExperimentConfig& c, const std::string& command) {
  w.meta("command", command);
  w.meta("name", c.name);
  w.meta("nx", std::to_string(c.nx));
  w.meta("x_range", "0 1");
  w.meta("ns", std::to_string(c.ns));
  w.meta("s_max", format_real(c.s_max));
  w.meta("ds", format_real(c.ages().ds()));
  w.meta("dt", format_real(c.effective_dt()));
  w.meta("t_end", format_real(c.t_end));
  w.meta("save_every", format_real(c.save_every));
  w.meta("epsilon", format_real(c.epsilon));
}

// Series gathered through the observer so a failed run still leaves its prefix on disk.
struct Collected {
  std::vector<double> times;
  std::vector<ScalarField> N, S, mass;
  std::vector<ConnectivityKernel> w;
};

void write_series(OutputWriter& out, const Collected& r, bool with_mass) {
  if (r.times.empty()) return;
  out.write("N.csv", series_csv(r.times, r.N), "activity N(t, x), one column per position");
  out.write("S.csv", series_csv(r.times, r.S), "stimulation S(t, x), one column per position");
  if (with_mass) out.write("mass.csv", series_csv(r.times, r.mass), "mass profile int n ds per position");
  out.write("N_heatmap.dat", heatmap_data(r.times, r.N), "gnuplot data t x N");
  out.write("S_heatmap.dat", heatmap_data(r.times, r.S), "gnuplot data t x S");
  out.write("N_heatmap.gp", heatmap_script("N_heatmap.dat", "N", "N_heatmap.png"), "gnuplot script for N");
  out.write("S_heatmap.gp", heatmap_script("S_heatmap.dat", "S", "S_heatmap.png"), "gnuplot script for S");
  if (r.w.size() != r.times.size()) return;

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.times.size(); ++i)
    rows.push_back({r.times[i], kernel_mean_deviation(r.w[i]), mean_deviation(r.N[i]), mean_deviation(r.S[i])});
  out.write("deviation.csv", table_csv({"t", "w_dev", "N_dev", "S_dev"}, rows),
            "sup-norm deviations from the spatial means of w, N and S");
  out.write("deviation.gp", trace_script("deviation.csv", 2, "|w - <w>|_inf", "deviation.png"),
            "gnuplot script for the kernel deviation trace");

  // Kernel grid at t = 0 and quarters of the run.
  std::vector<double> ts;
  std::vector<ConnectivityKernel> ws;
  const double T = r.times.back();
  for (int q = 0; q <= 4; ++q) {
    const double target = T * q / 4.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
      if (std::abs(r.times[i] - target) < std::abs(r.times[best] - target)) best = i;
    if (!ts.empty() && ts.back() == r.times[best]) continue;
    ts.push_back(r.times[best]);
    ws.push_back(r.w[best]);
  }
  out.write("w_snapshots.csv", kernel_snapshots_csv(ts, ws), "kernel snapshots (t, x, y, w) at quarters of the run");
  out.write("w_final.csv", kernel_csv(r.w.back()), "kernel (x, y, w) at the last recorded time");
  out.write("w_final.gp", kernel_script("w_final.csv", "w_final.png"), "gnuplot script for the final kernel");
}

void add_certificates(Summary& s, const ExperimentConfig& c) {
  const DensityField n0 = c.initial_density();
  double n0_sup = 0.0;
  for (double v : n0.values()) n0_sup = std::max(n0_sup, v);
  RegimeSetup setup{c.rate.build(), c.rule, c.mass_profile(), c.input.evaluate(c.space()), c.initial_kernel().max_abs(),
                    n0_sup};
  s.section("certificates");
  for (const auto& cert : regime_certificates(setup)) {
    s.add(cert.name + ".lhs", cert.lhs);
    s.add(cert.name + ".holds", cert.holds);
    if (!cert.holds) s.add(cert.name + ".note", "outside proved regime");
  }
  if (auto warn = normalization_warning(c.rule, c.rate.p_inf * c.mass_profile().max_abs())) s.add("warning", *warn);
}

StationaryProblem stationary_problem(const ExperimentConfig& c) {
  return StationaryProblem{c.rule, SurvivalFunction::scheme(c.rate.build(), c.ages()), c.mass_profile(),
                           c.input.evaluate(c.space())};
}

int cmd_run(const ExperimentConfig& c, bool force_limit, std::ostream& out) {
  const bool limit = force_limit || c.system == SystemKind::limit;
  OutputWriter writer(c.output_dir());
  grid_meta(writer, c, limit ? "limit" : "run");
  writer.write("config.txt", serialize_config(c), "resolved experiment configuration");
  Collected col;
  auto observer = [&](const RunSample& s) {
    col.times.push_back(s.t);
    col.N.push_back(s.activity);
    col.S.push_back(s.stimulation);
    col.w.push_back(s.kernel);
    col.mass.push_back(s.density ? age_integral(*s.density) : ScalarField(s.activity.grid(), 0.0));
  };
  Summary sum;
  sum.section("run");
  sum.add("name", c.name);
  sum.add("system", limit ? "limit" : "full");
  try {
    RunRecord rec;
    if (limit) {
      LimitConfig lc = c.limit_config();
      lc.record_kernels = false;
      rec = limit_run(c.initial_kernel(), c.limit_problem(), lc, c.t_end, observer);
    } else {
      SolverConfig sc = c.solver();
      sc.record_kernels = false;
      rec = nonlinear_run(c.initial_density(), c.initial_kernel(), c.problem(), sc, c.t_end, observer);
    }
    sum.add("dt", rec.dt);
    sum.add("t_end", col.times.back());
    sum.add("records", static_cast<double>(col.times.size()));
    sum.add("coupling_iterations", static_cast<double>(rec.coupling_iterations));

    sum.section("final");
    const ScalarField& N = col.N.back();
    const ScalarField& S = col.S.back();
    sum.add("N_max", N.max());
    sum.add("N_min", N.min());
    sum.add("S_max", S.max());
    sum.add("S_min", S.min());
    sum.add("w_dev_initial", kernel_mean_deviation(col.w.front()));
    sum.add("w_dev_final", kernel_mean_deviation(col.w.back()));
    sum.add("N_dev_final", mean_deviation(N));
    if (!limit) {
      const ScalarField g = c.mass_profile();
      double mass_err = 0.0;
      for (const auto& m : col.mass)
        for (std::size_t i = 0; i < m.size(); ++i) mass_err = std::max(mass_err, std::abs(m[i] - g[i]));
      sum.add("mass_error_max", mass_err);
    }

    const StationaryProblem sp = stationary_problem(c);
    const StationaryState st = solve_stationary(sp, S, StationaryOptions{1e-12, 20000, 1.0});
    sum.section("stationary");
    sum.add("converged", st.converged);
    sum.add("residual", st.residual);
    sum.add("S_distance_final", norms(S, st.S_star).linf);
    std::vector<double> d;
    for (const auto& n : col.N) d.push_back(norms(n, st.N_star).linf);
    try {
      const DecayFit fit = fit_decay(col.times, d);
      sum.add("decay_rate", fit.lambda_hat);
      sum.add("decay_r_squared", fit.r_squared);
      sum.add("decay_window", format_real(fit.t_begin) + " " + format_real(fit.t_end));
    } catch (const PreconditionError& e) {
      sum.add("decay_rate", "unavailable");
    }
    add_certificates(sum, c);
    write_series(writer, col, !limit);
    writer.write("summary.txt", sum.str(), "structured summary");
    writer.finish(true);
  } catch (const Error& e) {
    write_series(writer, col, !limit);
    sum.section("failure");
    sum.add("error", e.what());
    writer.write("summary.txt", sum.str(), "structured summary");
    writer.finish(false, e.what());
    throw;
  }
  out << "wrote " << writer.files().size() << " files to " << writer.dir().string() << "\n";
  return 0;
}

int cmd_stationary(const ExperimentConfig& c, std::ostream& out) {
  OutputWriter writer(c.output_dir());
  grid_meta(writer, c, "stationary");
  writer.write("config.txt", serialize_config(c), "resolved experiment configuration");
  const StationaryProblem sp = stationary_problem(c);
  const auto states = solve_stationary_multistart(sp, StationaryOptions{std::min(c.tol, 1e-12), 20000, 1.0});
  Summary sum;
  sum.section("stationary");
  sum.add("name", c.name);
  sum.add("fixed_points", static_cast<double>(states.size()));
  const ContractionCertificate cert = stationary_certificate(sp);
  sum.add("certificate.bound", cert.bound);
  sum.add("certificate.holds", cert.holds);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& st = states[k];
    sum.add("residual." + std::to_string(k), st.residual);
    sum.add("iterations." + std::to_string(k), static_cast<double>(st.iterations));
    for (std::size_t i = 0; i < st.S_star.size(); ++i)
      rows.push_back({static_cast<double>(k), st.S_star.grid().node(i), st.S_star[i], st.N_star[i]});
  }
  if (c.input.kind == InputModel::Kind::constant && c.density.kind != DensitySpec::Kind::gaussian) {
    const double root = scalar_stationary(c.rule, c.input.amplitude * c.input.scale, sp.F);
    sum.add("scalar_root", root);
  }
  writer.write("S_star.csv", table_csv({"branch", "x", "S", "N"}, rows), "stationary S and N per fixed point");
  if (!states.empty()) writer.write("w_star.csv", kernel_csv(states.front().w_star), "stationary kernel (x, y, w)");
  add_certificates(sum, c);
  writer.write("summary.txt", sum.str(), "structured summary");
  writer.finish(!states.empty(), states.empty() ? "no converged fixed point" : "");
  out << "fixed points: " << states.size();
  if (!states.empty()) out << ", residual " << format_real(states.front().residual);
  out << "\n";
  return states.empty() ? 1 : 0;
}

int cmd_doeblin(const ExperimentConfig& c, std::ostream& out) {
  OutputWriter writer(c.output_dir());
  grid_meta(writer, c, "doeblin");
  const DensityField n0 = c.initial_density();
  const ScalarField S = c.input.evaluate(c.space());
  const DoeblinReport r = doeblin_check(n0, S, c.rate.build());
  Summary sum;
  sum.section("doeblin");
  sum.add("alpha", r.alpha);
  sum.add("lambda_theory", r.lambda_theory);
  sum.add("t0", r.t0);
  sum.add("s_star", r.s_star);
  sum.add("p_star", r.p_star);
  sum.add("minorization_margin", r.minorization_margin);
  sum.add("tolerance", r.tolerance);
  sum.add("degenerate", r.degenerate);
  sum.add("passed", r.passed);
  writer.write("summary.txt", sum.str(), "structured summary");
  writer.finish(true);
  out << "alpha " << format_real(r.alpha) << ", margin " << format_real(r.minorization_margin)
      << (r.passed ? " (pass)" : " (FAIL)") << "\n";
  return r.passed ? 0 : 1;
}

int cmd_epsilon(ExperimentConfig c, const Options& o, std::ostream& out) {
  const double T = o.t_end ? *o.t_end : 2.0;
  OutputWriter writer(c.output_dir());
  grid_meta(writer, c, "epsilon-study");
  LimitConfig lc = c.limit_config();
  lc.dt = 1e-3;
  const EpsilonStudy study =
      epsilon_study(o.eps_list, c.initial_density(), c.initial_kernel(), c.problem(), c.solver(), T, lc);
  std::vector<std::vector<double>> rows;
  for (const auto& r : study.rows) rows.push_back({r.epsilon, r.dist_N, r.dist_n, r.dist_S});
  writer.write("epsilon_study.csv", table_csv({"epsilon", "dist_N", "dist_n", "dist_S"}, rows),
               "L1 distances in time and space to the limit system");
  Summary sum;
  sum.section("epsilon_study");
  sum.add("T", T);
  sum.add("order_N", study.order_N);
  sum.add("order_n", study.order_n);
  for (std::size_t i = 1; i < study.rows.size(); ++i)
    sum.add("ratio_N." + std::to_string(i), study.rows[i].dist_N / study.rows[i - 1].dist_N);
  writer.write("summary.txt", sum.str(), "structured summary");
  writer.finish(true);
  for (const auto& r : study.rows)
    out << "eps " << format_real(r.epsilon) << "  dist_N " << format_real(r.dist_N) << "\n";
  return 0;
}

int cmd_large_input(const ExperimentConfig& c, const Options& o, std::ostream& out) {
  const double T = o.t_end ? *o.t_end : 1.0;
  OutputWriter writer(c.output_dir());
  grid_meta(writer, c, "large-input");
  SolverConfig sc = c.solver();
  sc.age_domain_guard = false;  // finite horizon: thresholds beyond s_max simply never fire
  const std::vector<double> samples{0.25 * T, 0.5 * T, 0.75 * T, T};
  const LargeInputResult res =
      large_input_run(o.k_list, c.initial_density(), c.initial_kernel(), c.problem(), sc, samples);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < res.k_values.size(); ++i)
    for (std::size_t j = 0; j < samples.size(); ++j)
      rows.push_back({res.k_values[i], samples[j], res.distance[i][j], res.activity_sup[i][j]});
  writer.write("large_input.csv", table_csv({"k", "t", "distance", "N_sup"}, rows),
               "L1 distance to the infinite-input linear solution");
  Summary sum;
  sum.section("large_input");
  for (std::size_t i = 0; i < res.k_values.size(); ++i)
    sum.add("distance_at_T.k=" + format_real(res.k_values[i]), res.distance[i].back());
  writer.write("summary.txt", sum.str(), "structured summary");
  writer.finish(true);
  for (std::size_t i = 0; i < res.k_values.size(); ++i)
    out << "k " << format_real(res.k_values[i]) << "  distance " << format_real(res.distance[i].back()) << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solver suite for an elapsed-time neural network with learning", "etnet"};
  app.require_subcommand(1);
  Options o;
  auto* run = app.add_subcommand("run", "integrate the system of the selected experiment");
  auto* limit = app.add_subcommand("limit", "integrate the slow-learning limit system");
  auto* stationary = app.add_subcommand("stationary", "stationary states by fixed-point iteration");
  auto* doeblin = app.add_subcommand("doeblin", "Doeblin minorization check with S frozen at I");
  auto* eps = app.add_subcommand("epsilon-study", "distance of the eps-rescaled system to the limit system");
  auto* large = app.add_subcommand("large-input", "runs with input k*I against the infinite-input problem");
  auto* list = app.add_subcommand("presets", "list built-in experiments");
  auto* version = app.add_subcommand("version", "print the version");
  for (auto* cmd : {run, limit, stationary, doeblin, eps, large}) add_common(cmd, o);
  eps->add_option("--eps", o.eps_list, "decreasing epsilon values")->delimiter(',');
  large->add_option("--k", o.k_list, "input scales")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out, o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& p : presets()) out << p.name << "  " << p.description << "\n";
      return 0;
    }
    if (version->parsed()) {
      out << "etnet " << kVersion << "\n";
      return 0;
    }
    ExperimentConfig c = resolve(o);
    // one default directory per subcommand so their outputs and MANIFESTs never mix
    if (c.out.empty()) c.out = "out/" + c.name + "/" + app.get_subcommands().front()->get_name();
    if (run->parsed()) return cmd_run(c, false, out);
    if (limit->parsed()) return cmd_run(c, true, out);
    if (stationary->parsed()) return cmd_stationary(c, out);
    if (doeblin->parsed()) return cmd_doeblin(c, out);
    if (eps->parsed()) return cmd_epsilon(c, o, out);
    if (large->parsed()) return cmd_large_input(c, o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace etnet
