#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "polyloop/errors.hpp"
#include "polyloop/holonomy.hpp"
#include "polyloop/suite.hpp"

namespace fs = std::filesystem;
using namespace polyloop;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::uint64_t seed = 20240611;
  int trials = 0;
  std::string only;
  std::string out;
  std::string config;
  std::string group = "U";
  int dim = 3;
  double cut = 0.0;
  std::string model = "sphere";
  double theta = kPi / 3.0;
  int winding = 1;
  double theta_amp = 0.0;
  double phi_amp = 0.0;
  double r = 2.0;
  int modes = 8;
  std::string demo;
  std::map<std::string, double> tolerances;
};

void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
    if (!os.flush()) throw ConfigError("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x)) throw ConfigError("bad number for " + key + ": " + v);
  return x;
}

// Pulls --tol.<metric> VALUE and --tol.<metric>=VALUE out of argv before CLI11 sees it.
std::vector<std::string> extract_tolerances(int argc, char** argv, std::map<std::string, double>& tol) {
  std::vector<std::string> rest;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--tol.", 0) != 0) {
      rest.push_back(a);
      continue;
    }
    std::string key = a.substr(6), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= argc) throw ConfigError("missing value for " + a);
      value = argv[++i];
    }
    if (key.empty()) throw ConfigError("empty tolerance name");
    tol[key] = parse_double(key, value);
  }
  return rest;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Fills settings from the config file wherever the flag was not given.
void apply_config(Settings& s, const CLI::App& app, const std::map<std::string, std::string>& kv) {
  auto given = [&app](const std::string& flag) {
    for (const auto* sub : app.get_subcommands())
      if (const auto* o = sub->get_option_no_throw("--" + flag); o && o->count() > 0) return true;
    const auto* o = app.get_option_no_throw("--" + flag);
    return o && o->count() > 0;
  };
  for (const auto& [key, value] : kv) {
    if (key.rfind("tol.", 0) == 0) {
      s.tolerances.try_emplace(key.substr(4), parse_double(key, value));
      continue;
    }
    if (given(key)) continue;
    auto as_int = [&] {
      const double x = parse_double(key, value);
      if (x != std::floor(x)) throw ConfigError("expected integer for " + key);
      return static_cast<long long>(x);
    };
    if (key == "seed") s.seed = static_cast<std::uint64_t>(as_int());
    else if (key == "trials") s.trials = static_cast<int>(as_int());
    else if (key == "only") s.only = value;
    else if (key == "out") s.out = value;
    else if (key == "group") s.group = value;
    else if (key == "dim") s.dim = static_cast<int>(as_int());
    else if (key == "cut") s.cut = parse_double(key, value);
    else if (key == "model") s.model = value;
    else if (key == "theta") s.theta = parse_double(key, value);
    else if (key == "winding") s.winding = static_cast<int>(as_int());
    else if (key == "theta-amp") s.theta_amp = parse_double(key, value);
    else if (key == "phi-amp") s.phi_amp = parse_double(key, value);
    else if (key == "r") s.r = parse_double(key, value);
    else if (key == "modes") s.modes = static_cast<int>(as_int());
    else throw ConfigError("unknown config key " + key);
  }
}

std::string format_metric(const Metric& m) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << "    " << (m.pass() ? "ok   " : "FAIL ") << m.name << " = " << m.value
     << (m.direction == Metric::Direction::below ? " < " : " > ") << m.threshold;
  return os.str();
}

int cmd_verify(const Settings& s) {
  SuiteConfig cfg;
  cfg.seed = s.seed;
  cfg.trials = s.trials;
  cfg.tolerances = s.tolerances;
  if (!s.only.empty()) cfg.only = s.only;
  for (const auto& [name, _] : cfg.tolerances) {
    bool known = false;
    for (const auto& p : property_registry()) known = known || name.rfind(p.name + ".", 0) == 0;
    if (!known) throw ConfigError("tolerance for unknown metric " + name);
  }
  bool all_pass = false;
  const auto report = run_suite(cfg, all_pass, [](const PropertyResult& r) {
    std::cout << (r.pass() ? "PASS " : "FAIL ") << r.name << "  trials=" << r.trials << " rejected=" << r.rejections
              << '\n';
    for (const auto& m : r.metrics)
      if (!m.pass()) std::cout << format_metric(m) << '\n';
    for (const auto& f : r.failures) std::cout << "    " << f << '\n';
    if (!r.error.empty()) std::cout << "    error: " << r.error << '\n';
    std::cout.flush();
  });
  if (report["property_count"].get<int>() == 0) throw ConfigError("no property matches --only " + s.only);
  if (!s.out.empty()) write_atomic(s.out, report.dump(2) + "\n");
  std::cout << (all_pass ? "verify: all " : "verify: FAILED, ") << report["property_count"] << " properties"
            << (all_pass ? " pass" : "") << '\n';
  return all_pass ? kExitPass : kExitFail;
}

int cmd_section(const Settings& s) {
  SweepOptions o;
  o.group = parse_group(s.group);
  if (s.dim < 2 || s.dim > 12) throw ConfigError("--dim must lie in [2, 12]");
  if (s.cut < 0.0 || s.cut > 1.0) throw ConfigError("--cut must lie in [0, 1]");
  o.dim = s.dim;
  o.trials = s.trials > 0 ? s.trials : 200;
  o.cut_fraction = s.cut;
  Rng rng(s.seed);
  const auto report = run_section_sweep(o, rng);
  SweepThresholds t;
  auto tol = [&s](const char* key, double& field) {
    if (auto it = s.tolerances.find(key); it != s.tolerances.end()) field = it->second;
  };
  tol("endpoint", t.endpoint);
  tol("group", t.group);
  tol("det", t.det);
  tol("poly", t.poly);
  nlohmann::json j = report;
  j["schema"] = 1;
  j["seed"] = s.seed;
  j["pass"] = sweep_passes(report, t);
  const std::string text = j.dump(2) + "\n";
  if (s.out.empty())
    std::cout << text;
  else
    write_atomic(s.out, text);
  return j["pass"].get<bool>() ? kExitPass : kExitFail;
}

int cmd_holonomy(const Settings& s) {
  const ModelKind kind = parse_model(s.model);
  if (s.modes < 0 || s.modes > 256) throw ConfigError("--modes must lie in [0, 256]");
  if (!(s.r > 1.0)) throw ConfigError("--r must exceed 1");
  BaseLoop loop = BaseLoop::latitude(s.theta, s.winding);
  loop.theta_amp = s.theta_amp;
  loop.phi_amp = s.phi_amp;
  loop.torus_winding = {s.winding, 0};
  const ConnectionModel model(kind);
  const auto data = monodromy(model, loop);
  const auto basis = eigen_sections(data, s.modes);
  const Matrix gram = cos_gram(basis, s.r);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();

  nlohmann::json j;
  j["schema"] = 1;
  j["model"] = to_string(kind);
  j["loop_params"] = loop_params_json(kind, loop);
  j["holonomy"] = matrix_to_json(data.holonomy);
  j["exponents"] = data.exponents;
  j["gram_error"] = gram_error(basis);
  j["checks"] = {{"r", s.r},
                 {"modes", s.modes},
                 {"doubling_error", data.doubling_error},
                 {"periodicity_error", basis.periodicity_error},
                 {"d_hat_residual", d_hat_residual(model, loop, basis)},
                 {"cos_gram_min_eigenvalue", min_eig},
                 {"cos_gram_positive_definite", min_eig > 0.0}};

  std::ostringstream csv;
  csv << "p,j,eigenvalue,weight\n" << std::setprecision(17);
  const double log_r = std::log(s.r);
  for (const auto& [p, jj] : basis.labels) {
    const double lambda = p - basis.exponents[jj];
    csv << p << ',' << jj << ',' << lambda << ',' << std::cosh(lambda * log_r) << '\n';
  }

  const fs::path dir = s.out.empty() ? fs::path(".") : fs::path(s.out);
  write_atomic(dir / "holonomy.json", j.dump(2) + "\n");
  write_atomic(dir / "spectra.csv", csv.str());
  std::cout << "holonomy: model " << to_string(kind) << ", exponents";
  for (double e : data.exponents) std::cout << ' ' << e;
  std::cout << ", gram_error " << j["gram_error"].get<double>() << ", cos gram "
            << (min_eig > 0.0 ? "positive definite" : "NOT positive definite") << '\n';
  return kExitPass;
}

struct DemoLine {
  std::string name;
  double value;
  double threshold;
  bool below;
  bool pass() const { return below ? value < threshold : value > threshold; }
};

int report_demo(const std::string& title, const std::vector<DemoLine>& lines) {
  bool ok = true;
  std::cout << title << '\n' << std::setprecision(4) << std::scientific;
  for (const auto& l : lines) {
    std::cout << "  " << (l.pass() ? "PASS " : "FAIL ") << l.name << " = " << l.value << (l.below ? " < " : " > ")
              << l.threshold << '\n';
    ok = ok && l.pass();
  }
  return ok ? kExitPass : kExitFail;
}

SectionFunction mode_mix(Eigen::Index n) {
  return [n](double t) {
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j)
      v(j) = std::polar(1.0 / (1 + j), kTwoPi * (static_cast<double>(j) - 1.0) * t) + 0.5 * std::cos(kTwoPi * 3 * t);
    return v;
  };
}

int cmd_demo(const Settings& s) {
  const ConnectionModel sphere(ModelKind::sphere);
  BaseLoop loop = BaseLoop::latitude(s.theta, s.winding);
  loop.theta_amp = s.theta_amp;
  loop.phi_amp = s.phi_amp;
  if (s.demo == "condiff") {
    Reparam rot;
    rot.shift = 0.3;
    Reparam wobble;
    wobble.amplitude = 0.1;
    const auto alpha = mode_mix(2);
    return report_demo("condiff: covariant derivative under reparametrisation",
                       {{"identity", condiff_residual(sphere, loop, Reparam{}, alpha), 1e-8, true},
                        {"rotation", condiff_residual(sphere, loop, rot, alpha), 1e-4, true},
                        {"wobble", condiff_residual(sphere, loop, wobble, alpha), 1e-4, true}});
  }
  if (s.demo == "reparam") {
    Reparam rot;
    rot.shift = 0.3;
    Reparam refl;
    refl.orientation = -1;
    refl.shift = 0.2;
    Reparam wobble;
    wobble.amplitude = 0.1;
    const int bound = std::min(s.modes, 8);
    return report_demo("reparam: action of circle reparametrisations on the polynomial basis",
                       {{"rotation", reparam_actions(sphere, loop, rot, bound).standard_residual, 1e-8, true},
                        {"reflection", reparam_actions(sphere, loop, refl, bound).standard_residual, 1e-8, true},
                        {"generic", reparam_actions(sphere, loop, wobble, bound).standard_residual, 1e-3, false}});
  }
  if (s.demo == "counterexample") {
    const auto bent = [](double t) { return t + 0.3 * std::sin(kTwoPi * t); };
    const auto a = subbundle_counterexample([](double t) { return t; }, MatrixLoop::constant(Matrix::Identity(1, 1)));
    const auto b = subbundle_counterexample(bent, MatrixLoop::constant(Matrix::Identity(1, 1)));
    const auto c = subbundle_counterexample(bent, MatrixLoop::monomial(2, Matrix::Identity(1, 1)));
    return report_demo("counterexample: exp(2 pi i gamma) beta along a non-linear gamma",
                       {{"linear gamma", a.residual, 1e-10, true},
                        {"bent gamma, beta = 1", b.residual, 1e-3, false},
                        {"bent gamma, beta = z^2", c.residual, 1e-3, false}});
  }
  if (s.demo == "subbundle") {
    const auto whole = eigen_sections(monodromy(ConnectionModel(ModelKind::torus_sphere), loop), 3);
    const auto torus = eigen_sections(monodromy(ConnectionModel(ModelKind::torus), loop), 3);
    const auto sph = eigen_sections(monodromy(sphere, loop), 3);
    // Each summand basis, padded into the sum, must lie in the span of the whole basis.
    double worst = 0.0, cross = 0.0;
    const auto grid = whole.sections.front().cols();
    Matrix w(4 * grid, whole.size());
    for (Eigen::Index k = 0; k < whole.size(); ++k) w.col(k) = whole.sections[k].reshaped() / std::sqrt(double(grid));
    auto check = [&](const FiberBasis& b, bool top) {
      for (const auto& sec : b.sections) {
        Matrix e = Matrix::Zero(4, grid);
        (top ? e.topRows(2) : e.bottomRows(2)) = sec;
        const Vector v = e.reshaped() / std::sqrt(double(grid));
        worst = std::max(worst, (v - w * (w.adjoint() * v)).norm());
      }
    };
    check(torus, true);
    check(sph, false);
    for (const auto& a : torus.sections)
      for (const auto& b : sph.sections) {
        Matrix ea = Matrix::Zero(4, grid), eb = Matrix::Zero(4, grid);
        ea.topRows(2) = a;
        eb.bottomRows(2) = b;
        cross = std::max(cross, std::abs(l2_pairing(ea, eb)));
      }
    return report_demo("subbundle: polynomial sections of a direct sum",
                       {{"summand span defect", worst, 1e-8, true}, {"cross gram", cross, 1e-8, true}});
  }
  throw ConfigError("unknown demo " + s.demo);
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  std::vector<std::string> args;
  try {
    args = extract_tolerances(argc, argv, s.tolerances);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  CLI::App app{"Polynomial loop groups, local sections and holonomy bundles", "polyloop"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", s.seed, "Suite seed");
  app.add_option("--config", s.config, "Flat key=value file; flags take precedence");
  app.add_option("--out", s.out, "Output file (verify, section) or directory (holonomy)");

  auto* verify = app.add_subcommand("verify", "Run every property suite");
  verify->add_option("--trials", s.trials, "Trials per property (0 keeps the defaults)")->check(CLI::NonNegativeNumber);
  verify->add_option("--only", s.only, "Run properties whose name starts with this prefix");

  auto* section = app.add_subcommand("section", "Random sweep of local sections");
  section->add_option("--group", s.group, "U, SU or SO");
  section->add_option("--dim", s.dim, "Matrix size");
  section->add_option("--trials", s.trials, "Number of trials")->check(CLI::NonNegativeNumber);
  section->add_option("--cut", s.cut, "Fraction of U/SU targets placed on the branch cut");

  auto* hol = app.add_subcommand("holonomy", "Holonomy, Floquet exponents and spectra for one loop");
  hol->add_option("--model", s.model, "torus, sphere, su2 or torus+sphere");
  hol->add_option("--theta", s.theta, "Polar angle of the sphere loop");
  hol->add_option("--winding", s.winding, "Winding number");
  hol->add_option("--theta-amp", s.theta_amp, "Amplitude of the polar oscillation");
  hol->add_option("--phi-amp", s.phi_amp, "Amplitude of the azimuthal oscillation");
  hol->add_option("--r", s.r, "Weight radius r > 1");
  hol->add_option("--modes", s.modes, "Mode bound P");

  auto* demo = app.add_subcommand("demo", "Reparametrisation demonstrations");
  demo->add_option("name", s.demo, "condiff, reparam, counterexample or subbundle")->required();
  demo->add_option("--theta", s.theta, "Polar angle of the sphere loop");
  demo->add_option("--winding", s.winding, "Winding number");
  demo->add_option("--theta-amp", s.theta_amp, "Amplitude of the polar oscillation");
  demo->add_option("--phi-amp", s.phi_amp, "Amplitude of the azimuthal oscillation");
  demo->add_option("--modes", s.modes, "Mode bound P");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!s.config.empty()) apply_config(s, app, read_config(s.config));
    if (*verify) return cmd_verify(s);
    if (*section) return cmd_section(s);
    if (*hol) return cmd_holonomy(s);
    return cmd_demo(s);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return kExitFail;
  } catch (const RejectedInput& e) {
    std::cerr << "rejected input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
