// Command-line front end: each subcommand resolves its parameters from an
// optional JSON config file overridden by flags, runs one experiment from the
// library modules, writes a header-documented CSV plus a JSON run manifest
// (inputs, versions, wall time), and prints its headline scalar on stdout.
//
// Exit codes: 0 success, 2 schema violation (bad flags, malformed config,
// unknown keys, parameter preconditions), 3 numerical failure.  Real-valued
// parameters accept plain radians/SI numbers or rational multiples of pi
// written like "7pi/6".  Worker counts default to $QWGP_WORKERS; outputs are
// byte-identical for identical configs regardless of the worker count.

#include <CLI11.hpp>
#include <json.hpp>

#include <qwgp/cavity.hpp>
#include <qwgp/geophase.hpp>
#include <qwgp/numkit.hpp>
#include <qwgp/stargeo.hpp>
#include <qwgp/topo.hpp>
#include <qwgp/walks.hpp>

#include <chrono>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using qwgp::numkit::ComplexMatrix;
using cplx = std::complex<double>;
using State = qwgp::geophase::State;

constexpr const char* kToolVersion = "1.0.0";
constexpr double kPi = 3.141592653589793238462643383279502884;

// Config/flag problems; mapped to exit code 2.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_plain(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw SchemaError(what + ": cannot parse '" + s + "' as a number");
  }
  if (used != s.size())
    throw SchemaError(what + ": trailing characters in '" + s + "'");
  return v;
}

// A real number, or a rational multiple of pi: "pi", "-3pi/8", "2pi", "pi/4".
double parse_real(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  if (s.empty()) throw SchemaError(what + ": empty value");
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_plain(s, what);
  const std::string pre = trim(s.substr(0, pos));
  const std::string post = trim(s.substr(pos + 2));
  double coef = 1.0;
  if (pre == "-")
    coef = -1.0;
  else if (!pre.empty() && pre != "+")
    coef = parse_plain(pre, what);
  double den = 1.0;
  if (!post.empty()) {
    if (post.front() != '/')
      throw SchemaError(what + ": expected 'pi/<denominator>' in '" + s + "'");
    den = parse_plain(trim(post.substr(1)), what);
    if (den == 0.0) throw SchemaError(what + ": zero denominator in '" + s + "'");
  }
  return coef * kPi / den;
}

long parse_integer(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw SchemaError(what + ": cannot parse '" + s + "' as an integer");
  }
  if (used != s.size())
    throw SchemaError(what + ": trailing characters in '" + s + "'");
  return v;
}

bool parse_bool(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw SchemaError(what + ": expected true/false, got '" + s + "'");
}

std::vector<double> parse_real_list(const std::string& raw, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, what));
  if (out.empty()) throw SchemaError(what + ": empty list");
  return out;
}

// One subcommand's parameter block: declared keys with defaults, filled from
// the JSON config file (unknown keys rejected), then overridden by any flag
// the user actually passed.
class Params {
 public:
  explicit Params(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_,
                     "JSON config file; explicit flags override its keys");
    add("output", "", "output CSV path (default: <command>.csv)");
    add("workers", "", "worker threads (default: $QWGP_WORKERS, else 1)");
  }

  void add(const std::string& name, const std::string& def, const std::string& help) {
    defaults_[name] = def;
    auto& slot = raw_[name];
    opts_[name] = cmd_->add_option("--" + name, slot, help);
  }

  // Resolution order: declared default < config file < explicit flag.
  void resolve() {
    resolved_ = defaults_;
    if (!config_path_.empty()) apply_config();
    for (const auto& [name, opt] : opts_)
      if (opt->count() > 0) resolved_[name] = raw_.at(name);
  }

  bool has(const std::string& name) const { return !resolved_.at(name).empty(); }
  std::string str(const std::string& name) const { return resolved_.at(name); }
  double real(const std::string& name) const { return parse_real(resolved_.at(name), name); }
  long integer(const std::string& name) const { return parse_integer(resolved_.at(name), name); }
  bool truth(const std::string& name) const { return parse_bool(resolved_.at(name), name); }
  std::vector<double> list(const std::string& name) const {
    return parse_real_list(resolved_.at(name), name);
  }

  int workers() const {
    std::string w = resolved_.at("workers");
    if (w.empty()) {
      const char* env = std::getenv("QWGP_WORKERS");
      w = (env != nullptr) ? env : "1";
    }
    const long v = parse_integer(w, "workers");
    if (v < 1 || v > 256) throw SchemaError("workers: must lie in [1, 256]");
    return static_cast<int>(v);
  }

  std::string output(const std::string& command) const {
    const std::string& o = resolved_.at("output");
    return o.empty() ? command + ".csv" : o;
  }

  // Resolved key/value block for the manifest (keys emitted in sorted order),
  // with the effective output path and worker count filled in.
  json inputs() const {
    json j = json::object();
    for (const auto& [k, v] : resolved_) j[k] = v;
    j["output"] = output(command());
    j["workers"] = workers();
    return j;
  }

  std::string command() const { return cmd_->get_name(); }

 private:
  void apply_config() {
    std::ifstream f(config_path_);
    if (!f) throw SchemaError("cannot open config file: " + config_path_);
    json j;
    try {
      f >> j;
    } catch (const std::exception& e) {
      throw SchemaError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw SchemaError("config root must be a JSON object");
    for (const auto& [key, val] : j.items()) {
      if (key == "command") {
        if (!val.is_string() || val.get<std::string>() != cmd_->get_name())
          throw SchemaError("config names command '" + val.dump() +
                            "' but subcommand is '" + cmd_->get_name() + "'");
        continue;
      }
      auto it = resolved_.find(key);
      if (it == resolved_.end()) throw SchemaError("unknown config key: " + key);
      it->second = value_text(key, val);
    }
  }

  static std::string value_text(const std::string& key, const json& val) {
    if (val.is_string()) return val.get<std::string>();
    if (val.is_boolean()) return val.get<bool>() ? "true" : "false";
    if (val.is_number()) return val.dump();
    if (val.is_array()) {
      std::string joined;
      for (const auto& item : val) {
        if (!item.is_number() && !item.is_string())
          throw SchemaError("config key '" + key + "': list entries must be numbers");
        if (!joined.empty()) joined += ',';
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      return joined;
    }
    throw SchemaError("config key '" + key + "': unsupported value type");
  }

  CLI::App* cmd_;
  std::string config_path_;
  std::map<std::string, std::string> defaults_, raw_, resolved_;
  std::map<std::string, CLI::Option*> opts_;
};

// Writes the CSV through `body`, then the manifest next to it.
class RunOutput {
 public:
  RunOutput(const Params& ps)
      : command_(ps.command()),
        csv_path_(ps.output(ps.command())),
        inputs_(ps.inputs()),
        t0_(std::chrono::steady_clock::now()) {}

  template <typename Body>
  void write_csv(Body&& body) {
    std::ofstream os(csv_path_, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + csv_path_);
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + csv_path_);
  }

  json& results() { return results_; }

  void write_manifest() const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    json m;
    m["command"] = command_;
    m["inputs"] = inputs_;
    m["outputs"] = json::array({csv_path_});
    m["results"] = results_;
    m["versions"] = {{"tool", kToolVersion},
                     {"compiler", __VERSION__},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    m["wall_time_s"] = wall;
    const std::string path = manifest_path();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open manifest file: " + path);
    os << m.dump(2) << '\n';
  }

  std::string manifest_path() const {
    std::string base = csv_path_;
    const std::string ext = ".csv";
    if (base.size() > ext.size() && base.substr(base.size() - ext.size()) == ext)
      base.resize(base.size() - ext.size());
    return base + ".manifest.json";
  }

 private:
  std::string command_, csv_path_;
  json inputs_;
  json results_ = json::object();
  std::chrono::steady_clock::time_point t0_;
};

void print_value(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  std::cout << os.str() << '\n';
}

std::string signed_int(int v) {
  return (v > 0 ? "+" : "") + std::to_string(v);
}

// ---------------------------------------------------------------------------
// Shared state builders.
// ---------------------------------------------------------------------------

qwgp::walks::Variant parse_variant(const std::string& s) {
  using V = qwgp::walks::Variant;
  if (s == "dtqw1d") return V::dtqw1d;
  if (s == "ssqw1d") return V::ssqw1d;
  if (s == "electric1d") return V::electric1d;
  if (s == "dtqw2d") return V::dtqw2d;
  if (s == "coin4d2d") return V::coin4d2d;
  throw SchemaError("variant: unknown walk variant '" + s + "'");
}

qwgp::walks::Coin4D parse_coin(const std::string& s) {
  using C = qwgp::walks::Coin4D;
  if (s == "hadamard") return C::hadamard;
  if (s == "grover") return C::grover;
  if (s == "fourier") return C::fourier;
  throw SchemaError("coin: unknown coin '" + s + "'");
}

std::vector<cplx> start_amplitudes(int coin_dim, const std::string& which) {
  const double isq = 1.0 / std::sqrt(2.0);
  if (coin_dim == 2) {
    if (which == "up") return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
    if (which == "symmetric") return {cplx(isq, 0.0), cplx(0.0, isq)};
    if (which == "plus") return {cplx(isq, 0.0), cplx(isq, 0.0)};
  } else {
    if (which == "up") return {cplx(1.0, 0.0), 0.0, 0.0, 0.0};
    if (which == "symmetric")
      return {cplx(0.5, 0.0), cplx(0.0, 0.5), cplx(0.0, 0.5), cplx(-0.5, 0.0)};
    if (which == "plus") return {cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 0.0)};
  }
  throw SchemaError("start: unknown initial coin state '" + which + "'");
}

State bloch_state(double theta, double phi) {
  return {cplx(std::cos(theta / 2.0), 0.0),
          std::exp(cplx(0.0, phi)) * std::sin(theta / 2.0)};
}

std::array<double, 3> bloch_vec(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

State basis_state(std::size_t dim, std::size_t idx) {
  State v(dim, cplx(0.0, 0.0));
  v[idx] = 1.0;
  return v;
}

// Top basis vector tilted toward e1 by the overlap angle: cos(theta) e0 +
// sin(theta) e1.
State tilted_state(std::size_t dim, double theta) {
  State v(dim, cplx(0.0, 0.0));
  v[0] = std::cos(theta);
  v[1] = std::sin(theta);
  return v;
}

// Rotationally degenerate far endpoint with overlap xi against e0: amplitudes
// sqrt(binom(m, r)) alpha^(m-r) beta^r with alpha = xi^(1/m).
State degenerate_profile(std::size_t dim, double xi) {
  const std::size_t m = dim - 1;
  const double alpha = std::pow(xi, 1.0 / double(m));
  const double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  State v(dim);
  double binom = 1.0;
  for (std::size_t r = 0; r <= m; ++r) {
    v[r] = std::sqrt(binom) * std::pow(alpha, double(m - r)) * std::pow(beta, double(r));
    binom *= double(m - r) / double(r + 1);
  }
  return v;
}

ComplexMatrix precession_u(double omega, double t) {
  ComplexMatrix u(2, 2);
  u(0, 0) = std::exp(cplx(0.0, -omega * t / 2.0));
  u(1, 1) = std::exp(cplx(0.0, omega * t / 2.0));
  return u;
}

ComplexMatrix bloch_density(double r, double theta) {
  ComplexMatrix rho(2, 2);
  rho(0, 0) = 0.5 * (1.0 + r * std::cos(theta));
  rho(1, 1) = 0.5 * (1.0 - r * std::cos(theta));
  rho(0, 1) = 0.5 * r * std::sin(theta);
  rho(1, 0) = 0.5 * r * std::sin(theta);
  return rho;
}

// Free precession at rate `eta` with pure dephasing at rate `lam`:
// populations frozen, coherence decaying as exp(-i eta t - lam t), sampled
// over one full precession cycle.
qwgp::geophase::DensityTrajectory dephasing_trajectory(double theta0, double eta,
                                                       double lam, std::size_t n) {
  std::vector<double> times(n);
  std::vector<ComplexMatrix> rhos;
  rhos.reserve(n);
  const double tmax = 2.0 * kPi / eta;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = tmax * double(i) / double(n - 1);
    times[i] = t;
    ComplexMatrix rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + std::cos(theta0));
    rho(1, 1) = 0.5 * (1.0 - std::cos(theta0));
    rho(0, 1) = 0.5 * std::sin(theta0) * std::exp(cplx(-lam * t, -eta * t));
    rho(1, 0) = std::conj(rho(0, 1));
    rhos.push_back(rho);
  }
  return qwgp::geophase::DensityTrajectory::build(times, rhos);
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

void run_walk(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = parse_variant(ps.str("variant"));
  spec.theta1 = ps.real("theta1");
  spec.theta2 = ps.real("theta2");
  spec.gamma = ps.real("gamma");
  spec.gamma_x = ps.real("gamma-x");
  spec.gamma_y = ps.real("gamma-y");
  spec.phi = ps.real("phi");
  spec.coin4d = parse_coin(ps.str("coin"));
  if (spec.is_2d()) {
    spec.Nx = static_cast<int>(ps.integer("nx"));
    spec.Ny = static_cast<int>(ps.integer("ny"));
  } else {
    spec.N = static_cast<int>(ps.integer("n"));
  }
  const int steps = static_cast<int>(ps.integer("steps"));
  auto state = qwgp::walks::localized_state(
      spec, start_amplitudes(spec.coin_dim(), ps.str("start")));

  qwgp::walks::EvolveOptions opt;
  opt.record_distributions = ps.truth("record");
  const auto res = qwgp::walks::evolve(spec, std::move(state), steps, opt);
  const double var = qwgp::walks::variance(res.site_prob);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::walks::write_evolution_csv(os, res); });
  out.results()["final_norm"] = res.P.back();
  out.results()["final_variance"] = var;
  out.write_manifest();
  print_value(var);
}

void run_bands(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = parse_variant(ps.str("variant"));
  spec.theta1 = ps.real("theta1");
  spec.theta2 = ps.real("theta2");
  spec.gamma = ps.real("gamma");
  spec.gamma_x = ps.real("gamma-x");
  spec.gamma_y = ps.real("gamma-y");
  spec.phi = ps.real("phi");
  spec.coin4d = parse_coin(ps.str("coin"));
  spec.N = 2;
  spec.Nx = spec.Ny = 2;
  const int kcount = static_cast<int>(ps.integer("kcount"));
  const auto grid =
      qwgp::walks::band_grid(spec, kcount, static_cast<unsigned>(ps.workers()));

  double max_im = 0.0;
  for (const cplx& e : grid.E) max_im = std::max(max_im, std::abs(e.imag()));

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::walks::write_band_csv(os, grid); });
  out.results()["max_im_E"] = max_im;
  out.write_manifest();
  print_value(max_im);
}

void run_winding(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = qwgp::walks::Variant::ssqw1d;
  spec.theta1 = ps.real("theta1");
  spec.theta2 = ps.real("theta2");
  spec.N = 2;
  const int kcount = static_cast<int>(ps.integer("kcount"));
  qwgp::topo::WindingOptions opt;
  opt.biorthogonal = ps.truth("biorthogonal");
  const std::vector<double> gammas =
      ps.has("gamma-list") ? ps.list("gamma-list")
                           : std::vector<double>{ps.real("gamma")};

  std::vector<qwgp::topo::PhasePoint> rows;
  json values = json::array();
  for (const double g : gammas) {
    spec.gamma = g;
    const auto grid = qwgp::topo::chiral_band_grid(
        spec, kcount, static_cast<unsigned>(ps.workers()));
    const auto res = qwgp::topo::winding_momentum(grid, qwgp::topo::pauli_x(), opt);
    rows.push_back({spec.theta1, spec.theta2, g, res.value[0]});
    values.push_back(res.value[0]);
  }

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::topo::write_phase_csv(os, rows); });
  out.results()["winding"] = values;
  out.write_manifest();
  for (const auto& r : rows) print_value(r.invariant);
}

void run_chern(const Params& ps) {
  const double t1 = ps.real("theta1"), t2 = ps.real("theta2");
  const double gx = ps.real("gamma-x"), gy = ps.real("gamma-y");
  const int grid = static_cast<int>(ps.integer("grid"));
  const std::string map = ps.str("map");

  qwgp::topo::ChernResult res;
  if (map == "triangular") {
    res = qwgp::topo::chern_triangular(t1, t2, gx, gy, grid);
  } else if (map == "walk") {
    qwgp::walks::WalkSpec spec;
    spec.variant = qwgp::walks::Variant::dtqw2d;
    spec.theta1 = t1;
    spec.theta2 = t2;
    spec.gamma_x = gx;
    spec.gamma_y = gy;
    spec.Nx = spec.Ny = 2;
    res = qwgp::topo::chern_walk_2d(spec, grid);
  } else {
    throw SchemaError("map: expected 'triangular' or 'walk', got '" + map + "'");
  }

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "band,chern,flux\n";
    for (std::size_t b = 0; b < res.value.size(); ++b)
      os << b << ',' << res.value[b] << ',' << res.flux[b] << '\n';
  });
  out.results()["chern"] = res.value;
  out.write_manifest();
  std::cout << signed_int(res.value[0]) << '\n';
}

void run_realspace_winding(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = qwgp::walks::Variant::ssqw1d;
  spec.theta1 = ps.real("theta1");
  spec.theta2 = ps.real("theta2");
  spec.N = static_cast<int>(ps.integer("n"));
  const double pm = ps.real("pm");
  const int steps = static_cast<int>(ps.integer("steps"));
  const auto res = qwgp::topo::winding_realspace(spec, pm, steps);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "step,running_value\n";
    for (std::size_t t = 0; t < res.partial.size(); ++t)
      os << (t + 1) << ',' << res.partial[t] << '\n';
  });
  out.results()["mean_displacement"] = res.mean_displacement;
  out.results()["detected_weight"] = res.detected_weight;
  out.write_manifest();
  print_value(res.mean_displacement);
}

void run_edge1d(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = qwgp::walks::Variant::ssqw1d;
  spec.N = static_cast<int>(ps.integer("n"));
  spec.theta1 = ps.real("theta1");
  spec.theta2_map = qwgp::walks::domain_wall_map(
      spec.N, static_cast<int>(ps.integer("wall")), ps.real("theta2-inner"),
      ps.real("theta2-outer"));
  spec.gamma = ps.real("gamma");
  const auto res = qwgp::topo::edge_spectrum_1d(spec);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::topo::write_edge_csv(os, res); });
  out.results()["midgap"] = res.midgap.size();
  out.results()["localized_midgap"] = res.localized_midgap.size();
  out.write_manifest();
  print_value(static_cast<double>(res.localized_midgap.size()));
}

void run_edge2d(const Params& ps) {
  qwgp::topo::TriangularEdgeSpec es;
  es.Ny = static_cast<int>(ps.integer("ny"));
  es.wall = static_cast<int>(ps.integer("wall"));
  es.theta1_inner = ps.real("theta1-inner");
  es.theta2_inner = ps.real("theta2-inner");
  es.theta1_outer = ps.real("theta1-outer");
  es.theta2_outer = ps.real("theta2-outer");
  es.gamma_x = ps.real("gamma-x");
  es.gamma_y = ps.real("gamma-y");
  es.kx_count = static_cast<int>(ps.integer("kx-count"));
  const auto res = qwgp::topo::edge_bands_2d(es);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::topo::write_edge_csv(os, res); });
  out.results()["principal_midgap"] = res.principal_midgap;
  out.results()["principal_localized"] = res.principal_localized;
  out.results()["pi_midgap"] = res.pi_midgap;
  out.results()["pi_localized"] = res.pi_localized;
  out.results()["isolation_ok"] = res.isolation_ok;
  out.write_manifest();
  print_value(static_cast<double>(res.principal_localized));
}

void run_ssh(const Params& ps) {
  const double v = ps.real("v"), w = ps.real("w");
  const int cells = static_cast<int>(ps.integer("cells"));
  const int kcount = static_cast<int>(ps.integer("kcount"));
  const auto res = qwgp::topo::ssh_reference(v, w, cells, ps.truth("open"), kcount);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "index,energy\n";
    for (std::size_t i = 0; i < res.spectrum.size(); ++i)
      os << i << ',' << res.spectrum[i] << '\n';
  });
  out.results()["zero_modes"] = res.zero_modes;
  out.write_manifest();
  print_value(static_cast<double>(res.zero_modes));
}

void run_gamma_c(const Params& ps) {
  const double t1 = ps.real("theta1"), t2 = ps.real("theta2");
  const auto gc = qwgp::walks::gamma_critical(t1, t2);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "theta1,theta2,re_gamma_c,im_gamma_c,is_complex\n";
    os << t1 << ',' << t2 << ',' << gc.value.real() << ',' << gc.value.imag() << ','
       << (gc.is_complex ? 1 : 0) << '\n';
  });
  out.results()["gamma_c_re"] = gc.value.real();
  out.results()["gamma_c_im"] = gc.value.imag();
  out.results()["is_complex"] = gc.is_complex;
  out.write_manifest();
  if (gc.is_complex) {
    std::ostringstream os;
    os.precision(12);
    os << gc.value.real() << (gc.value.imag() < 0.0 ? "-" : "+")
       << std::abs(gc.value.imag()) << "i";
    std::cout << os.str() << '\n';
  } else {
    print_value(gc.value.real());
  }
}

void run_pt_check(const Params& ps) {
  qwgp::walks::WalkSpec spec;
  spec.variant = parse_variant(ps.str("variant"));
  spec.theta1 = ps.real("theta1");
  spec.theta2 = ps.real("theta2");
  spec.gamma = ps.real("gamma");
  spec.gamma_x = ps.real("gamma-x");
  spec.gamma_y = ps.real("gamma-y");
  spec.N = 2;
  spec.Nx = spec.Ny = 2;
  const int kcount = static_cast<int>(ps.integer("kcount"));
  const auto res = qwgp::walks::pt_check(spec, kcount);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "theta1,theta2,gamma,symmetric,max_violation\n";
    os << spec.theta1 << ',' << spec.theta2 << ',' << spec.gamma << ','
       << (res.symmetric ? 1 : 0) << ',' << res.max_violation << '\n';
  });
  out.results()["symmetric"] = res.symmetric;
  out.results()["max_violation"] = res.max_violation;
  out.write_manifest();
  std::cout << (res.symmetric ? "symmetric" : "asymmetric") << '\n';
  print_value(res.max_violation);
}

void run_geodesic(const Params& ps) {
  const std::size_t dim = static_cast<std::size_t>(ps.integer("dim"));
  if (dim < 2) throw SchemaError("dim: need at least a two-level system");
  const double theta = ps.real("theta");
  const std::size_t samples = static_cast<std::size_t>(ps.integer("samples"));
  const State a = basis_state(dim, 0);
  const State b = tilted_state(dim, theta);
  const auto curve = qwgp::stargeo::geodesic(a, b, samples);
  const double gp = qwgp::geophase::gp_curve(curve);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::stargeo::write_curve_csv(os, curve); });
  out.results()["geometric_phase"] = gp;
  out.write_manifest();
  print_value(gp);
}

void run_stars(const Params& ps) {
  const std::size_t dim = static_cast<std::size_t>(ps.integer("dim"));
  if (dim < 2) throw SchemaError("dim: need at least a two-level system");
  const double theta = ps.real("theta");
  const std::size_t samples = static_cast<std::size_t>(ps.integer("samples"));
  const State a = basis_state(dim, 0);
  const State b = degenerate_profile(dim, std::cos(theta));
  const auto dec = qwgp::stargeo::geodesic_decompose(a, b, samples);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "s";
    for (std::size_t k = 0; k < dec.curves.size(); ++k)
      os << ",star" << k << "_x,star" << k << "_y,star" << k << "_z";
    os << '\n';
    for (std::size_t i = 0; i < dec.curves.front().s.size(); ++i) {
      os << dec.curves.front().s[i];
      for (const auto& c : dec.curves)
        os << ',' << c.points[i][0] << ',' << c.points[i][1] << ',' << c.points[i][2];
      os << '\n';
    }
  });
  out.results()["radii"] = dec.radii;
  out.results()["mirror_pairs"] = dec.pairing.size();
  out.write_manifest();
  print_value(dec.radii.front());
}

void run_npc(const Params& ps) {
  const double theta = ps.real("theta");
  const std::size_t samples = static_cast<std::size_t>(ps.integer("samples"));
  if (samples < 5) throw SchemaError("samples: need at least 5");
  if (!(theta > 0.0) || theta >= kPi / 2.0)
    throw SchemaError("theta: the worked profile needs theta in (0, pi/2)");

  // Opening-angle/relative-phase profiles of the mirror star pair that
  // reproduce the planar curve (g cos s, g sin s, sqrt(1-g^2)) with
  // g(s) = cos(s(s-theta)) after the planar block rotation.
  const double alpha = std::sqrt(std::cos(theta));
  const double beta = std::sqrt(1.0 - alpha * alpha);
  const double pa = std::sqrt(2.0) * alpha * beta / std::sin(theta);
  const double pb = beta * beta / std::sin(theta);
  std::vector<double> s(samples), eta(samples), gamma(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double si = theta * double(i) / double(samples - 1);
    const double g = std::cos(si * (si - theta));
    const double root = std::sqrt(std::max(0.0, 1.0 - g * g));
    const double A = g * std::cos(si);
    const double B = pb * root - pa * g * std::sin(si);
    const double C = pa * root + pb * g * std::sin(si);
    s[i] = si;
    eta[i] = std::acos(std::clamp((A - C) / (A + C), -1.0, 1.0));
    gamma[i] = (C < 1e-14) ? 0.0
                           : std::acos(std::clamp(
                                 -B / (std::sqrt(2.0) * std::sqrt(A * C)), -1.0, 1.0));
  }
  gamma.front() = 0.0;
  gamma.back() = 0.0;

  const auto curve = qwgp::stargeo::npc_from_dual_curves(s, eta, gamma);
  const auto chk = qwgp::stargeo::npc_check(
      curve, static_cast<std::size_t>(ps.integer("points")));
  const double gp = qwgp::geophase::gp_curve(curve);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::stargeo::write_curve_csv(os, curve); });
  out.results()["is_npc"] = chk.is_npc;
  out.results()["min_re"] = chk.min_re;
  out.results()["max_abs_im"] = chk.max_abs_im;
  out.results()["geometric_phase"] = gp;
  out.write_manifest();
  std::cout << (chk.is_npc ? "npc" : "not-npc") << '\n';
  print_value(gp);
}

void run_gp(const Params& ps) {
  const std::string kind = ps.str("curve");
  const std::size_t samples = static_cast<std::size_t>(ps.integer("samples"));
  qwgp::geophase::PureCurve curve;
  double phase = 0.0;

  if (kind == "geodesic") {
    const std::size_t dim = static_cast<std::size_t>(ps.integer("dim"));
    if (dim < 2) throw SchemaError("dim: need at least a two-level system");
    curve = qwgp::stargeo::geodesic(basis_state(dim, 0),
                                    tilted_state(dim, ps.real("theta")), samples);
    phase = qwgp::geophase::gp_curve(curve);
  } else if (kind == "circle") {
    if (ps.integer("dim") != 2)
      throw SchemaError("dim: the colatitude circuit is a two-level curve");
    const double theta = ps.real("theta");
    curve.s.resize(samples);
    curve.states.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      const double phi = 2.0 * kPi * double(i) / double(samples - 1);
      curve.s[i] = phi;
      curve.states[i] = bloch_state(theta, phi);
    }
    phase = qwgp::geophase::gp_curve(curve);
  } else if (kind == "triple") {
    if (ps.integer("dim") != 2)
      throw SchemaError("dim: the eigenstate triple is a two-level circuit");
    const State xp = bloch_state(kPi / 2.0, 0.0);
    const State yp = bloch_state(kPi / 2.0, kPi / 2.0);
    const State zp = bloch_state(0.0, 0.0);
    phase = qwgp::geophase::gp_discrete({xp, yp, zp});
    curve.s = {0.0, 1.0, 2.0};
    curve.states = {xp, yp, zp};
  } else {
    throw SchemaError("curve: expected geodesic, circle, or triple; got '" + kind + "'");
  }

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::stargeo::write_curve_csv(os, curve); });
  out.results()["phase"] = phase;
  out.write_manifest();
  print_value(phase);
}

void run_gp_mixed(const Params& ps) {
  const std::string mode = ps.str("mode");
  const std::size_t samples = static_cast<std::size_t>(ps.integer("samples"));
  RunOutput out(ps);
  double headline = 0.0;

  if (mode == "unitary") {
    const double omega = ps.real("omega");
    const double theta = ps.real("theta");
    const std::vector<double> rs =
        ps.has("r-list") ? ps.list("r-list") : std::vector<double>{ps.real("r")};
    std::vector<double> times(samples);
    std::vector<ComplexMatrix> us;
    us.reserve(samples);
    const double tmax = 2.0 * kPi / omega;
    for (std::size_t i = 0; i < samples; ++i) {
      times[i] = tmax * double(i) / double(samples - 1);
      us.push_back(precession_u(omega, times[i]));
    }
    json phases = json::array();
    std::vector<std::array<double, 3>> rows;
    for (const double r : rs) {
      const auto res = qwgp::geophase::gp_mixed_unitary(bloch_density(r, theta), times, us);
      rows.push_back({r, theta, res.phase});
      phases.push_back(res.phase);
      headline = res.phase;
    }
    out.write_csv([&](std::ostream& os) {
      os.precision(15);
      os << "r,theta,phase\n";
      for (const auto& row : rows) os << row[0] << ',' << row[1] << ',' << row[2] << '\n';
    });
    out.results()["phase"] = phases;
  } else if (mode == "dephasing") {
    const double theta = ps.real("theta");
    const double eta = ps.real("eta");
    const double lam = ps.real("lambda");
    const auto traj = dephasing_trajectory(theta, eta, lam, samples);
    const double phase = qwgp::geophase::gp_mixed_nonunitary(traj);
    headline = phase;
    out.write_csv([&](std::ostream& os) {
      os.precision(15);
      os << "theta,eta,lambda,phase\n";
      os << theta << ',' << eta << ',' << lam << ',' << phase << '\n';
    });
    out.results()["phase"] = phase;
  } else {
    throw SchemaError("mode: expected 'unitary' or 'dephasing', got '" + mode + "'");
  }
  out.write_manifest();
  print_value(headline);
}

void run_uhlmann(const Params& ps) {
  const double nx = ps.real("nx"), nz = ps.real("nz");
  const double tau = ps.real("tau");
  const std::vector<double> rs =
      ps.has("r-list") ? ps.list("r-list") : std::vector<double>{ps.real("r")};

  std::vector<qwgp::geophase::UhlmannResult> rows;
  rows.reserve(rs.size());
  for (const double r : rs) rows.push_back(qwgp::geophase::uhlmann_phase_qubit(r, nx, nz, tau));

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "r,nx,nz,tau,phase,pole_continued\n";
    for (std::size_t i = 0; i < rs.size(); ++i)
      os << rs[i] << ',' << nx << ',' << nz << ',' << tau << ',' << rows[i].phase
         << ',' << (rows[i].pole_continued ? 1 : 0) << '\n';
  });
  json phases = json::array();
  for (const auto& r : rows) phases.push_back(r.phase);
  out.results()["phase"] = phases;
  out.write_manifest();
  for (const auto& r : rows) print_value(r.phase);
}

void run_weakvalue(const Params& ps) {
  const double pre_t = ps.real("pre-theta"), pre_p = ps.real("pre-phi");
  const double post_t = ps.real("post-theta"), post_p = ps.real("post-phi");
  const double ax_t = ps.real("axis-theta"), ax_p = ps.real("axis-phi");

  const State pre = bloch_state(pre_t, pre_p);
  const State post = bloch_state(post_t, post_p);
  const auto n = bloch_vec(ax_t, ax_p);
  ComplexMatrix proj(2, 2);
  proj(0, 0) = 0.5 * (1.0 + n[2]);
  proj(1, 1) = 0.5 * (1.0 - n[2]);
  proj(0, 1) = 0.5 * cplx(n[0], -n[1]);
  proj(1, 0) = 0.5 * cplx(n[0], n[1]);

  const cplx z = qwgp::geophase::weak_value(pre, post, proj);
  const double solid = qwgp::geophase::strackee_solid_angle(
      bloch_vec(pre_t, pre_p), bloch_vec(post_t, post_p), n);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) {
    os.precision(15);
    os << "re_weak,im_weak,arg_weak,solid_angle\n";
    os << z.real() << ',' << z.imag() << ',' << std::arg(z) << ',' << solid << '\n';
  });
  out.results()["re"] = z.real();
  out.results()["im"] = z.imag();
  out.results()["arg"] = std::arg(z);
  out.results()["solid_angle"] = solid;
  out.write_manifest();
  print_value(std::arg(z));
}

void run_cavity(const Params& ps) {
  qwgp::cavity::CavityParams base;
  base.Omega0 = ps.real("omega0");
  base.omega = ps.real("omega");
  base.R = ps.real("radius");
  base.V = ps.real("volume");
  base.Q = ps.real("quality");
  base.eta = ps.real("coupling");
  base.theta = ps.real("theta");
  base.n = ps.real("cycles");

  std::vector<double> omega_cs;
  const std::string oc = ps.str("omega-c");
  if (oc == "auto")
    omega_cs = {base.omega_plus()};
  else
    omega_cs = parse_real_list(oc, "omega-c");
  base.omega_c = omega_cs.front();

  const auto rows = qwgp::cavity::cavity_sweep(base, omega_cs);

  RunOutput out(ps);
  out.write_csv([&](std::ostream& os) { qwgp::cavity::write_cavity_csv(os, rows); });
  out.results()["phi_inertial"] = rows.front().phi_inertial;
  out.results()["phi_noninertial"] = rows.front().phi_noninertial;
  out.write_manifest();
  print_value(rows.front().phi_inertial + rows.front().phi_noninertial);
}

// ---------------------------------------------------------------------------
// Registration.
// ---------------------------------------------------------------------------

using Runner = void (*)(const Params&);

std::shared_ptr<Params> register_command(CLI::App& app, const std::string& name,
                                         const std::string& desc, Runner runner) {
  CLI::App* cmd = app.add_subcommand(name, desc);
  auto ps = std::make_shared<Params>(cmd);
  cmd->callback([ps, runner]() {
    ps->resolve();
    runner(*ps);
  });
  return ps;
}

void register_all(CLI::App& app) {
  {
    auto ps = register_command(app, "walk", "evolve a walker and export P(t) and the final distribution", run_walk);
    ps->add("variant", "dtqw1d", "walk variant: dtqw1d|ssqw1d|electric1d|dtqw2d|coin4d2d");
    ps->add("theta1", "pi/2", "first coin angle");
    ps->add("theta2", "0", "second coin angle (split-step/2D)");
    ps->add("gamma", "0", "gain/loss exponent (split-step)");
    ps->add("gamma-x", "0", "2D gain/loss exponent, x step");
    ps->add("gamma-y", "0", "2D gain/loss exponent, y step");
    ps->add("phi", "0", "per-site phase gradient (electric walk)");
    ps->add("coin", "hadamard", "4-component coin: hadamard|grover|fourier");
    ps->add("n", "256", "1D lattice size");
    ps->add("nx", "64", "2D lattice width");
    ps->add("ny", "64", "2D lattice height");
    ps->add("steps", "100", "number of steps");
    ps->add("start", "symmetric", "initial coin state: up|symmetric|plus");
    ps->add("record", "false", "record the site distribution after every step");
  }
  {
    auto ps = register_command(app, "bands", "quasi-energy bands over the Brillouin zone", run_bands);
    ps->add("variant", "ssqw1d", "walk variant");
    ps->add("theta1", "-3pi/8", "first coin angle");
    ps->add("theta2", "pi/8", "second coin angle");
    ps->add("gamma", "0", "gain/loss exponent");
    ps->add("gamma-x", "0", "2D gain/loss exponent, x step");
    ps->add("gamma-y", "0", "2D gain/loss exponent, y step");
    ps->add("phi", "0", "per-site phase gradient (electric walk)");
    ps->add("coin", "hadamard", "4-component coin choice");
    ps->add("kcount", "201", "momentum samples per axis");
  }
  {
    auto ps = register_command(app, "winding", "chiral winding number of the split-step walk", run_winding);
    ps->add("theta1", "-3pi/8", "first coin angle");
    ps->add("theta2", "pi/8", "second coin angle");
    ps->add("gamma", "0", "gain/loss exponent");
    ps->add("gamma-list", "", "comma-separated gain/loss sweep (overrides gamma)");
    ps->add("kcount", "2001", "momentum samples");
    ps->add("biorthogonal", "false", "pair left/right eigenvectors");
  }
  {
    auto ps = register_command(app, "chern", "Chern number of a two-dimensional map", run_chern);
    ps->add("theta1", "7pi/6", "first coin angle");
    ps->add("theta2", "7pi/6", "second coin angle");
    ps->add("gamma-x", "0", "gain/loss exponent, x step");
    ps->add("gamma-y", "0", "gain/loss exponent, y step");
    ps->add("grid", "96", "plaquette grid size per axis");
    ps->add("map", "triangular", "momentum map: triangular|walk");
  }
  {
    auto ps = register_command(app, "realspace-winding", "winding number from displacement statistics", run_realspace_winding);
    ps->add("theta1", "-3pi/8", "first coin angle");
    ps->add("theta2", "pi/8", "second coin angle");
    ps->add("n", "51", "ring size");
    ps->add("pm", "1", "detection efficiency in (0, 1]");
    ps->add("steps", "200", "measurement rounds");
  }
  {
    auto ps = register_command(app, "edge1d", "domain-wall spectrum of the 1D split-step walk", run_edge1d);
    ps->add("n", "201", "chain length");
    ps->add("wall", "50", "half-width of the inner domain");
    ps->add("theta1", "-3pi/8", "uniform first coin angle");
    ps->add("theta2-inner", "pi/4", "second coin angle inside the wall");
    ps->add("theta2-outer", "5pi/8", "second coin angle outside the wall");
    ps->add("gamma", "0", "gain/loss exponent");
  }
  {
    auto ps = register_command(app, "edge2d", "strip spectrum of the triangular-lattice walk", run_edge2d);
    ps->add("ny", "101", "strip height");
    ps->add("wall", "25", "inner-domain half-width");
    ps->add("theta1-inner", "7pi/6", "inner first coin angle");
    ps->add("theta2-inner", "7pi/6", "inner second coin angle");
    ps->add("theta1-outer", "3pi/2", "outer first coin angle");
    ps->add("theta2-outer", "pi", "outer second coin angle");
    ps->add("gamma-x", "0", "gain/loss exponent, x step");
    ps->add("gamma-y", "0", "gain/loss exponent, y step");
    ps->add("kx-count", "41", "momentum samples along the strip");
  }
  {
    auto ps = register_command(app, "ssh", "alternating-hopping chain reference spectrum", run_ssh);
    ps->add("v", "0.5", "intra-cell hopping");
    ps->add("w", "1", "inter-cell hopping");
    ps->add("cells", "100", "number of unit cells");
    ps->add("open", "true", "open (true) or periodic (false) chain");
    ps->add("kcount", "512", "momentum samples for the band track");
  }
  {
    auto ps = register_command(app, "gamma-c", "critical gain/loss strength of the split-step walk", run_gamma_c);
    ps->add("theta1", "-3pi/8", "first coin angle");
    ps->add("theta2", "pi/4", "second coin angle");
  }
  {
    auto ps = register_command(app, "pt-check", "antiunitary symmetry check of the momentum blocks", run_pt_check);
    ps->add("variant", "ssqw1d", "walk variant");
    ps->add("theta1", "-3pi/8", "first coin angle");
    ps->add("theta2", "pi/8", "second coin angle");
    ps->add("gamma", "0", "gain/loss exponent");
    ps->add("gamma-x", "0", "2D gain/loss exponent, x step");
    ps->add("gamma-y", "0", "2D gain/loss exponent, y step");
    ps->add("kcount", "401", "momentum samples");
  }
  {
    auto ps = register_command(app, "geodesic", "shortest curve between two rays and its phase", run_geodesic);
    ps->add("dim", "3", "Hilbert-space dimension");
    ps->add("theta", "pi/3", "overlap angle between the endpoints");
    ps->add("samples", "201", "curve samples");
  }
  {
    auto ps = register_command(app, "stars", "star trajectories along the degenerate geodesic", run_stars);
    ps->add("dim", "3", "Hilbert-space dimension (dim-1 stars)");
    ps->add("theta", "pi/3", "endpoint overlap angle, in (0, pi/2)");
    ps->add("samples", "201", "curve samples");
  }
  {
    auto ps = register_command(app, "npc", "synthesize a null-phase curve and verify it", run_npc);
    ps->add("theta", "pi/3", "endpoint overlap angle, in (0, pi/2)");
    ps->add("samples", "401", "curve samples");
    ps->add("points", "20", "triple-check sample points");
  }
  {
    auto ps = register_command(app, "gp", "geometric phase of a standard curve", run_gp);
    ps->add("curve", "geodesic", "curve type: geodesic|circle|triple");
    ps->add("dim", "2", "Hilbert-space dimension");
    ps->add("theta", "pi/3", "overlap angle (geodesic) or colatitude (circle)");
    ps->add("samples", "20001", "curve samples");
  }
  {
    auto ps = register_command(app, "gp-mixed", "mixed-state geometric phase", run_gp_mixed);
    ps->add("mode", "unitary", "trajectory: unitary|dephasing");
    ps->add("r", "0.5", "Bloch vector length");
    ps->add("r-list", "", "comma-separated purity sweep (unitary mode)");
    ps->add("theta", "pi/4", "initial polar angle");
    ps->add("omega", "1", "precession rate (unitary mode)");
    ps->add("eta", "1", "precession rate (dephasing mode)");
    ps->add("lambda", "0.01", "dephasing rate");
    ps->add("samples", "20001", "trajectory samples");
  }
  {
    auto ps = register_command(app, "uhlmann", "Uhlmann holonomy phase of a rotating qubit", run_uhlmann);
    ps->add("r", "0.5", "Bloch vector length");
    ps->add("r-list", "", "comma-separated purity sweep");
    ps->add("nx", "0", "rotation axis x component");
    ps->add("nz", "1", "rotation axis z component");
    ps->add("tau", "2pi", "rotation angle");
  }
  {
    auto ps = register_command(app, "weakvalue", "projector weak value between two rays", run_weakvalue);
    ps->add("pre-theta", "pi/2", "preselection polar angle");
    ps->add("pre-phi", "0", "preselection azimuth");
    ps->add("post-theta", "pi/2", "postselection polar angle");
    ps->add("post-phi", "pi/2", "postselection azimuth");
    ps->add("axis-theta", "0", "projector axis polar angle");
    ps->add("axis-phi", "0", "projector axis azimuth");
  }
  {
    auto ps = register_command(app, "cavity", "orbit-induced decay rates and open-system phase", run_cavity);
    ps->add("omega0", "1e7", "emitter level gap (rad/s)");
    ps->add("omega", "5e9", "orbital angular frequency (rad/s)");
    ps->add("radius", "1e-6", "orbit radius (m)");
    ps->add("volume", "1e-7", "quantization volume (m^3)");
    ps->add("quality", "1e7", "resonator quality factor");
    ps->add("coupling", "1e-6", "dipole coupling constant (rad^2/s)");
    ps->add("theta", "pi/2", "initial polar angle");
    ps->add("cycles", "1e4", "quasi-cycle count");
    ps->add("omega-c", "auto", "resonator frequency list, or 'auto' for the upper sideband");
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  CLI::App app{"quantum-walk and geometric-phase toolkit"};
  app.set_version_flag("--version", std::string("qwgp ") + kToolVersion);
  app.require_subcommand(1);
  register_all(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
