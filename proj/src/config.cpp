#include "etnet/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "etnet/error.hpp"

namespace etnet {

namespace {

constexpr double kGaussianNorm = 0.9225620128255848;  // sqrt(pi) * erf(1/2)

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& v, int line, const std::string& key) {
  const char* begin = v.c_str();
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || std::isnan(d))
    throw ConfigError("expected a real number, got '" + v + "'", line, key);
  return d;
}

long long to_int(const std::string& v, int line, const std::string& key) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("expected an integer, got '" + v + "'", line, key);
  return out;
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + v + "'", line, key);
}

template <class E>
E to_enum(const std::string& v, const std::map<std::string, E>& names, int line, const std::string& key) {
  const auto it = names.find(v);
  if (it != names.end()) return it->second;
  std::string allowed;
  for (const auto& [n, _] : names) allowed += (allowed.empty() ? "" : ", ") + n;
  throw ConfigError("unknown value '" + v + "' (allowed: " + allowed + ")", line, key);
}

template <class E>
std::string enum_name(E e, const std::map<std::string, E>& names) {
  for (const auto& [n, v] : names)
    if (v == e) return n;
  return "?";
}

const std::map<std::string, SystemKind> kSystems{{"full", SystemKind::full}, {"limit", SystemKind::limit}};
const std::map<std::string, RateKind> kRates{{"step", RateKind::step}, {"smooth", RateKind::smooth}};
const std::map<std::string, SigmaMap::Kind> kSigmas{
    {"identity", SigmaMap::Kind::identity}, {"clamped", SigmaMap::Kind::clamped}, {"constant", SigmaMap::Kind::constant}};
const std::map<std::string, LearningRule::Kind> kRules{{"hebbian", LearningRule::Kind::hebbian},
                                                       {"gaussian_sigmoid", LearningRule::Kind::gaussian_sigmoid}};
const std::map<std::string, InputModel::Kind> kInputs{{"constant", InputModel::Kind::constant},
                                                      {"sin_squared", InputModel::Kind::sin_squared},
                                                      {"table", InputModel::Kind::table}};
const std::map<std::string, DensitySpec::Kind> kDensities{{"shifted_exponential", DensitySpec::Kind::shifted_exponential},
                                                          {"gaussian", DensitySpec::Kind::gaussian},
                                                          {"exponential", DensitySpec::Kind::exponential}};
const std::map<std::string, KernelSpec::Kind> kKernels{{"gaussian", KernelSpec::Kind::gaussian},
                                                       {"constant", KernelSpec::Kind::constant}};
const std::map<std::string, Coupling> kCouplings{{"lagged", Coupling::lagged}, {"iterate", Coupling::iterate}};

}  // namespace

FiringRateModel RateSpec::build() const {
  SigmaMap map;
  switch (sigma) {
    case SigmaMap::Kind::identity: map = SigmaMap::identity(); break;
    case SigmaMap::Kind::clamped: map = SigmaMap::clamped(sigma_max); break;
    case SigmaMap::Kind::constant: map = SigmaMap::constant(sigma_value); break;
  }
  return kind == RateKind::step ? FiringRateModel::step(p_inf, map) : FiringRateModel::smooth(p_inf, map, theta);
}

double ExperimentConfig::effective_dt() const { return dt ? *dt : 0.5 * epsilon * s_max / static_cast<double>(ns); }

SolverConfig ExperimentConfig::solver() const {
  SolverConfig c;
  c.dt = effective_dt();
  c.epsilon = epsilon;
  c.coupling = coupling;
  c.tol = tol;
  c.max_iters = max_iters;
  c.damping = damping;
  c.cfl_guard = cfl_guard;
  c.save_every = save_every;
  return c;
}

Problem ExperimentConfig::problem() const { return Problem{rate.build(), rule, input.evaluate(space())}; }

LimitProblem ExperimentConfig::limit_problem() const {
  return LimitProblem{rule, SurvivalFunction::scheme(rate.build(), ages()), mass_profile(), input.evaluate(space())};
}

LimitConfig ExperimentConfig::limit_config() const {
  LimitConfig c;
  c.dt = effective_dt();
  c.tol = std::min(tol, 1e-12);
  c.max_iters = std::max(max_iters, 2000);
  c.save_every = save_every;
  return c;
}

ScalarField ExperimentConfig::mass_profile() const {
  if (density.kind == DensitySpec::Kind::gaussian)
    return ScalarField::sample(space(), [](double x) { return std::exp(-(x - 0.5) * (x - 0.5)) / kGaussianNorm; });
  return ScalarField(space(), 1.0);
}

DensityField ExperimentConfig::initial_density() const {
  std::function<double(double, double)> f;
  switch (density.kind) {
    case DensitySpec::Kind::shifted_exponential:
      f = [](double s, double x) { return (x + 1.0) * std::exp(-s * (x + 1.0)); };
      break;
    case DensitySpec::Kind::gaussian:
      f = [](double s, double x) { return std::exp(-s - (x - 0.5) * (x - 0.5)) / kGaussianNorm; };
      break;
    case DensitySpec::Kind::exponential:
      f = [](double s, double) { return std::exp(-s); };
      break;
  }
  DensityField n = DensityField::sample(ages(), space(), f);
  normalize_mass(n, mass_profile());
  return n;
}

ConnectivityKernel ExperimentConfig::initial_kernel() const {
  const double a = kernel.amplitude, w = kernel.width;
  if (kernel.kind == KernelSpec::Kind::constant) return ConnectivityKernel(space(), a);
  return ConnectivityKernel::sample(space(), [a, w](double x, double y) { return a * std::exp(-w * (x - y) * (x - y)); });
}

void ExperimentConfig::validate() const {
  if (nx == 0) throw ConfigError("must be a positive integer", 0, "nx");
  if (ns < 2) throw ConfigError("must be at least 2", 0, "ns");
  if (!(s_max > 0.0)) throw ConfigError("must be positive", 0, "s_max");
  if (dt && !(*dt > 0.0)) throw ConfigError("must be positive", 0, "dt");
  if (!(t_end > 0.0)) throw ConfigError("must be positive", 0, "t_end");
  if (!(save_every >= 0.0)) throw ConfigError("must be nonnegative", 0, "save_every");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("must lie in (0, 1]", 0, "epsilon");
  if (!(rate.p_inf > 0.0)) throw ConfigError("must be positive", 0, "rate.p_inf");
  if (rate.kind == RateKind::smooth && !(rate.theta > 0.0)) throw ConfigError("must be positive", 0, "rate.theta");
  if (rate.sigma == SigmaMap::Kind::clamped && !(rate.sigma_max >= 0.0))
    throw ConfigError("must be nonnegative", 0, "rate.sigma_max");
  if (rate.sigma == SigmaMap::Kind::constant && !(rate.sigma_value >= 0.0))
    throw ConfigError("must be nonnegative", 0, "rate.sigma_value");
  if (!(rule.gamma >= 0.0)) throw ConfigError("must be nonnegative", 0, "rule.gamma");
  if (!(input.scale >= 0.0)) throw ConfigError("must be nonnegative", 0, "input.scale");
  if (input.kind == InputModel::Kind::table && input.table.size() != nx)
    throw ConfigError("needs exactly nx = " + std::to_string(nx) + " values", 0, "input.table");
  if (!(kernel.amplitude >= 0.0)) throw ConfigError("must be nonnegative", 0, "kernel.amplitude");
  if (!(tol > 0.0)) throw ConfigError("must be positive", 0, "solver.tol");
  if (max_iters <= 0) throw ConfigError("must be positive", 0, "solver.max_iters");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("must lie in (0, 1]", 0, "solver.damping");

  const FiringRateModel model = rate.build();
  if (system == SystemKind::full) {
    try {
      check_cfl(solver(), ages(), model);
    } catch (const CflError& e) {
      throw ConfigError(e.what(), 0, "dt");
    }
  }
  try {
    const Problem p = problem();
    check_age_domain(ages(), model, stimulation_bound(p, initial_kernel().max_abs(), mass_profile().max_abs()));
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what(), 0, "s_max");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string v = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    if (!seen.insert(key).second) throw ConfigError("duplicate key", line, key);
    if (v.empty()) throw ConfigError("missing value", line, key);

    auto real = [&] { return to_real(v, line, key); };
    auto positive_int = [&] {
      const long long i = to_int(v, line, key);
      if (i <= 0) throw ConfigError("must be a positive integer", line, key);
      return i;
    };
    if (key == "name") c.name = v;
    else if (key == "system") c.system = to_enum(v, kSystems, line, key);
    else if (key == "nx") c.nx = static_cast<std::size_t>(positive_int());
    else if (key == "ns") c.ns = static_cast<std::size_t>(positive_int());
    else if (key == "s_max") c.s_max = real();
    else if (key == "dt") c.dt = v == "auto" ? std::nullopt : std::optional<double>(real());
    else if (key == "t_end") c.t_end = real();
    else if (key == "save_every") c.save_every = real();
    else if (key == "epsilon") c.epsilon = real();
    else if (key == "rate.kind") c.rate.kind = to_enum(v, kRates, line, key);
    else if (key == "rate.p_inf") c.rate.p_inf = real();
    else if (key == "rate.sigma") c.rate.sigma = to_enum(v, kSigmas, line, key);
    else if (key == "rate.sigma_max") c.rate.sigma_max = real();
    else if (key == "rate.sigma_value") c.rate.sigma_value = real();
    else if (key == "rate.theta") c.rate.theta = real();
    else if (key == "rule.kind") c.rule.kind = to_enum(v, kRules, line, key);
    else if (key == "rule.gamma") c.rule.gamma = real();
    else if (key == "input.kind") c.input.kind = to_enum(v, kInputs, line, key);
    else if (key == "input.amplitude") c.input.amplitude = real();
    else if (key == "input.scale") c.input.scale = real();
    else if (key == "input.table") {
      c.input.table.clear();
      std::istringstream items(v);
      std::string item;
      while (std::getline(items, item, ',')) c.input.table.push_back(to_real(trim(item), line, key));
    } else if (key == "density.kind") c.density.kind = to_enum(v, kDensities, line, key);
    else if (key == "kernel.kind") c.kernel.kind = to_enum(v, kKernels, line, key);
    else if (key == "kernel.amplitude") c.kernel.amplitude = real();
    else if (key == "kernel.width") c.kernel.width = real();
    else if (key == "solver.coupling") c.coupling = to_enum(v, kCouplings, line, key);
    else if (key == "solver.tol") c.tol = real();
    else if (key == "solver.max_iters") c.max_iters = static_cast<int>(positive_int());
    else if (key == "solver.damping") c.damping = real();
    else if (key == "solver.cfl_guard") c.cfl_guard = to_bool(v, line, key);
    else if (key == "out") c.out = v;
    else throw ConfigError("unknown key", line, key);
  }
  for (const char* required : {"rule.gamma", "input.amplitude"})
    if (!seen.count(required)) throw ConfigError("missing required field", 0, required);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "name = " << c.name << "\n";
  o << "system = " << enum_name(c.system, kSystems) << "\n";
  o << "nx = " << c.nx << "\n";
  o << "ns = " << c.ns << "\n";
  o << "s_max = " << fmt(c.s_max) << "\n";
  o << "dt = " << (c.dt ? fmt(*c.dt) : std::string("auto")) << "\n";
  o << "t_end = " << fmt(c.t_end) << "\n";
  o << "save_every = " << fmt(c.save_every) << "\n";
  o << "epsilon = " << fmt(c.epsilon) << "\n";
  o << "rate.kind = " << enum_name(c.rate.kind, kRates) << "\n";
  o << "rate.p_inf = " << fmt(c.rate.p_inf) << "\n";
  o << "rate.sigma = " << enum_name(c.rate.sigma, kSigmas) << "\n";
  o << "rate.sigma_max = " << fmt(c.rate.sigma_max) << "\n";
  o << "rate.sigma_value = " << fmt(c.rate.sigma_value) << "\n";
  o << "rate.theta = " << fmt(c.rate.theta) << "\n";
  o << "rule.kind = " << enum_name(c.rule.kind, kRules) << "\n";
  o << "rule.gamma = " << fmt(c.rule.gamma) << "\n";
  o << "input.kind = " << enum_name(c.input.kind, kInputs) << "\n";
  o << "input.amplitude = " << fmt(c.input.amplitude) << "\n";
  o << "input.scale = " << fmt(c.input.scale) << "\n";
  if (!c.input.table.empty()) {
    o << "input.table = ";
    for (std::size_t i = 0; i < c.input.table.size(); ++i) o << (i ? ", " : "") << fmt(c.input.table[i]);
    o << "\n";
  }
  o << "density.kind = " << enum_name(c.density.kind, kDensities) << "\n";
  o << "kernel.kind = " << enum_name(c.kernel.kind, kKernels) << "\n";
  o << "kernel.amplitude = " << fmt(c.kernel.amplitude) << "\n";
  o << "kernel.width = " << fmt(c.kernel.width) << "\n";
  o << "solver.coupling = " << enum_name(c.coupling, kCouplings) << "\n";
  o << "solver.tol = " << fmt(c.tol) << "\n";
  o << "solver.max_iters = " << c.max_iters << "\n";
  o << "solver.damping = " << fmt(c.damping) << "\n";
  o << "solver.cfl_guard = " << (c.cfl_guard ? "true" : "false") << "\n";
  if (!c.out.empty()) o << "out = " << c.out << "\n";
  return o.str();
}

namespace {

ExperimentConfig make_preset(const std::string& name, bool limit, double gamma, double amplitude, bool inhomogeneous) {
  ExperimentConfig c;
  c.name = name;
  c.system = limit ? SystemKind::limit : SystemKind::full;
  c.rule = {inhomogeneous ? LearningRule::Kind::gaussian_sigmoid : LearningRule::Kind::hebbian, gamma};
  c.input.kind = inhomogeneous ? InputModel::Kind::sin_squared : InputModel::Kind::constant;
  c.input.amplitude = amplitude;
  c.density.kind = inhomogeneous ? DensitySpec::Kind::gaussian : DensitySpec::Kind::shifted_exponential;
  return c;
}

std::vector<Preset> build_presets() {
  struct Case {
    const char* tag;
    double gamma, amplitude;
    bool inhomogeneous;
    const char* input;
  };
  const Case cases[] = {{"g1i1c", 1, 1, false, "I = 1"},
                        {"g15i1c", 15, 1, false, "I = 1"},
                        {"g35i5c", 35, 5, false, "I = 5"},
                        {"g1i1v", 1, 1, true, "I = sin^2(2 pi x)"},
                        {"g10i1v", 10, 1, true, "I = sin^2(2 pi x)"},
                        {"g20i5v", 20, 5, true, "I = 5 sin^2(2 pi x)"}};
  std::vector<Preset> out;
  for (bool limit : {false, true}) {
    for (const auto& k : cases) {
      const std::string name = std::string(limit ? "L" : "") + k.tag;
      ExperimentConfig c = make_preset(name, limit, k.gamma, k.amplitude, k.inhomogeneous);
      if (name.ends_with("g35i5c")) {
        c.s_max = 48.0;
        c.ns = 1920;
        c.t_end = 75.0;  // weakly damped oscillation, needs the longer horizon
      }
      if (name.ends_with("g20i5v")) {
        c.s_max = 32.0;
        c.ns = 1280;
        c.t_end = 75.0;
      }
      std::ostringstream d;
      d << (limit ? "limit system, " : "full system, ") << (k.inhomogeneous ? "Gaussian-sigmoid" : "Hebbian")
        << " learning, gamma = " << k.gamma << ", " << k.input << ", t_end = " << c.t_end;
      out.push_back({name, d.str(), c});
    }
  }
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

ExperimentConfig preset_config(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p.config;
  throw ConfigError("unknown preset '" + name + "'", 0, "preset");
}

}  // namespace etnet
