#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "convspec/compare.hpp"
#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/large_interval.hpp"
#include "convspec/nystrom.hpp"
#include "convspec/small_interval.hpp"

namespace {

using json = nlohmann::json;
using namespace convspec;

constexpr int kOk = 0;
constexpr int kNumerical = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string kernel = "power32";
  double a = 10;
  std::string backend = "nystrom";
  std::string ref_backend = "nystrom";
  std::optional<double> ref_a;
  int n_max = 10;
  int nystrom_n = 100;
  int basis_m = 0;
  int quad_order = 0;
  std::string out;
  std::string format = "csv";
  std::string parity = "even";
  double kappa_min = 1e-3;
  double kappa_max = 0.5;
  int samples = 400;
  std::string config;
};

/// Binds each flag; values from a config file fill only flags left unset.
struct Cli {
  RunConfig cfg;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void common(CLI::App* app) {
    opts.emplace_back("kernel", app->add_option("--kernel", cfg.kernel, "power32 | gaussian | cauchy:h=<x>"));
    opts.emplace_back("a", app->add_option("--a", cfg.a, "interval half-length"));
    opts.emplace_back("n_max", app->add_option("--n-max", cfg.n_max, "number of eigenpairs (both parities)"));
    opts.emplace_back("nystrom_n", app->add_option("--nystrom-n", cfg.nystrom_n, "Nystrom quadrature size"));
    opts.emplace_back("basis_m", app->add_option("--basis-m", cfg.basis_m, "Legendre basis size (small backend)"));
    opts.emplace_back("quad_order", app->add_option("--quad-order", cfg.quad_order, "L2 / Rayleigh quadrature order"));
    opts.emplace_back("out", app->add_option("--out", cfg.out, "output path (default stdout)"));
    opts.emplace_back("format", app->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"})));
    app->add_option("--config", cfg.config, "JSON config file; flags win");
  }

  void apply_config(const CLI::App* sub) {
    if (cfg.config.empty()) return;
    std::ifstream in(cfg.config);
    if (!in) throw UsageError("cannot open config file " + cfg.config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    try {
      auto set = [&](const char* key, auto& field) {
        for (const auto& [name, opt] : opts)
          if (name == key && opt->count() > 0) return;
        if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
      };
      set("kernel", cfg.kernel);
      set("a", cfg.a);
      set("backend", cfg.backend);
      set("n_max", cfg.n_max);
      set("nystrom_n", cfg.nystrom_n);
      set("basis_m", cfg.basis_m);
      set("quad_order", cfg.quad_order);
      set("out", cfg.out);
      set("format", cfg.format);
      set("parity", cfg.parity);
      set("kappa_min", cfg.kappa_min);
      set("kappa_max", cfg.kappa_max);
      set("samples", cfg.samples);
      if (j.contains("reference")) {
        const auto& r = j.at("reference");
        if (r.contains("backend")) set_if_unset(sub, "--ref-backend", cfg.ref_backend, r.at("backend").get<std::string>());
        if (r.contains("a")) cfg.ref_a = r.at("a").get<double>();
      }
    } catch (const json::exception& e) {
      throw UsageError(std::string("config file: ") + e.what());
    }
  }

  static void set_if_unset(const CLI::App* sub, const std::string& flag, std::string& field, const std::string& v) {
    const auto* opt = sub->get_option_no_throw(flag);
    if (!opt || opt->count() == 0) field = v;
  }
};

void check_common(const RunConfig& c) {
  if (!(c.a > 0) || !std::isfinite(c.a)) throw UsageError("--a must be positive");
  if (c.n_max < 1) throw UsageError("--n-max must be at least 1");
  if (c.nystrom_n < 4) throw UsageError("--nystrom-n must be at least 4");
  if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");
}

Kernel kernel_of(const RunConfig& c) {
  try {
    return parse_kernel_spec(c.kernel);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::string sci3(double v) { return compare::format_sci3(v); }

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes to --out or stdout.
void emit(const RunConfig& c, const std::string& text, const std::string& suffix = "") {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(c.out + suffix, std::ios::binary);
  if (!os) throw UsageError("cannot write " + c.out + suffix);
  os << text;
}

compare::Spectrum run_backend(const std::string& backend, const Kernel& k, const RunConfig& c) {
  if (backend == "nystrom") return compare::from_nystrom(nystrom::solve(k, c.a, c.nystrom_n, c.n_max));
  if (backend == "large") {
    std::vector<large::AsymptoticEigenfunction> fs;
    const int ne = (c.n_max + 1) / 2, no = c.n_max / 2;
    for (const auto& r : large::solve_characteristic(k, c.a, Parity::even, ne)) fs.emplace_back(k, c.a, r);
    if (no > 0)
      for (const auto& r : large::solve_characteristic(k, c.a, Parity::odd, no)) fs.emplace_back(k, c.a, r);
    return compare::from_large(fs);
  }
  if (backend == "small") {
    const int quad = c.quad_order > 0 ? c.quad_order : 200;
    return compare::from_small(small::solve(k, c.a, c.n_max, c.basis_m, quad));
  }
  throw UsageError("unknown backend " + backend + " (nystrom | large | small)");
}

int cmd_validate(const RunConfig& c) {
  const Kernel k = kernel_of(c);
  const auto rep = validate_assumptions(k);
  std::ostringstream os;
  if (c.format == "json") {
    json j;
    j["kernel"] = k.name;
    j["pass"] = rep.all_pass();
    for (const auto& ch : rep.checks)
      j["checks"].push_back({{"id", ch.id}, {"grid", ch.grid}, {"max_violation", ch.max_violation},
                             {"tolerance", ch.tolerance}, {"pass", ch.pass}});
    os << j.dump(2) << '\n';
  } else {
    os << "check,grid,max_violation,tolerance,pass\n";
    for (const auto& ch : rep.checks)
      os << ch.id << ",\"" << ch.grid << "\"," << sci3(ch.max_violation) << ',' << sci3(ch.tolerance) << ','
         << (ch.pass ? "pass" : "fail") << '\n';
  }
  emit(c, os.str());
  return rep.all_pass() ? kOk : kNumerical;
}

int cmd_solve(const RunConfig& c) {
  const Kernel k = kernel_of(c);
  const auto s = run_backend(c.backend, k, c);
  constexpr int grid = 1001;
  std::vector<double> xs(grid);
  for (int i = 0; i < grid; ++i) xs[i] = -c.a + 2 * c.a * i / (grid - 1);
  std::vector<std::vector<double>> ys;
  for (const auto& m : s.modes) {
    std::vector<double> y(grid);
    for (int i = 0; i < grid; ++i) y[i] = m.f(xs[i]);
    ys.push_back(std::move(y));
  }
  const bool has_kappa = c.backend == "large";

  if (c.format == "json") {
    json j;
    j["kernel"] = k.name;
    j["a"] = c.a;
    j["backend"] = c.backend;
    j["lambda_scale"] = "lambda: eigenvalue of f -> int_{-a}^{a} K(x - t) f(t) dt; eta = lambda / a";
    j["grid"] = xs;
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
      const auto& m = s.modes[i];
      json e{{"n", m.n}, {"global", m.global}, {"parity", to_string(m.parity)}, {"lambda", m.lambda},
             {"eta", m.lambda / c.a}, {"samples", ys[i]}};
      if (has_kappa) e["kappa"] = m.kappa;
      j["modes"].push_back(e);
    }
    emit(c, j.dump(1) + "\n");
    return kOk;
  }

  std::ostringstream spec, smp;
  spec << "n,global,parity,lambda,eta" << (has_kappa ? ",kappa" : "") << '\n';
  for (const auto& m : s.modes) {
    spec << m.n << ',' << m.global << ',' << to_string(m.parity) << ',' << full(m.lambda) << ',' << full(m.lambda / c.a);
    if (has_kappa) spec << ',' << full(m.kappa);
    spec << '\n';
  }
  smp << "x";
  for (const auto& m : s.modes) smp << ',' << (m.parity == Parity::even ? 'e' : 'o') << m.n;
  smp << '\n';
  for (int i = 0; i < grid; ++i) {
    smp << full(xs[i]);
    for (const auto& y : ys) smp << ',' << full(y[i]);
    smp << '\n';
  }
  if (c.out.empty()) {
    std::cout << spec.str() << '\n' << smp.str();
  } else {
    emit(c, spec.str());
    emit(c, smp.str(), ".samples.csv");
  }
  return kOk;
}

int cmd_compare(const RunConfig& c) {
  if (c.ref_a && std::abs(*c.ref_a - c.a) > 1e-12 * std::max(1.0, c.a))
    throw UsageError("reference and test configurations use different a");
  if (c.backend == c.ref_backend) std::cerr << "warning: comparing a backend with itself\n";
  const Kernel k = kernel_of(c);
  const auto ref = run_backend(c.ref_backend, k, c);
  const auto test = run_backend(c.backend, k, c);
  const int quad = c.quad_order > 0 ? c.quad_order : 400;
  const auto rep = compare::build_report(ref, test, k.name, quad);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream os;
  if (c.format == "json") {
    json j{{"a", rep.a}, {"kernel", rep.kernel}, {"reference", rep.backend_ref}, {"test", rep.backend_test},
           {"quad_order", rep.quad_order}};
    j["rows"] = json::array();
    for (const auto& r : rep.rows)
      j["rows"].push_back({{"n", r.n}, {"parity", to_string(r.parity)}, {"lambda_ref", r.lambda_ref},
                           {"lambda_test", r.lambda_test}, {"rel_err", r.rel_err}, {"l2_err", r.l2_err}});
    os << j.dump(1) << '\n';
  } else {
    compare::write_csv(os, rep);
  }
  emit(c, os.str());
  return kOk;
}

int cmd_chardata(const RunConfig& c) {
  if (!(c.kappa_min > 0) || !(c.kappa_max > c.kappa_min)) throw UsageError("need 0 < --kappa-min < --kappa-max");
  if (c.samples < 2) throw UsageError("--samples must be at least 2");
  Parity par;
  try {
    par = parse_parity(c.parity);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const Kernel k = kernel_of(c);
  using std::numbers::pi;

  struct Point {
    std::string kind;
    int m;
    double kappa, value;
  };
  std::vector<Point> pts;
  for (int i = 0; i < c.samples; ++i) {
    const double kap = c.kappa_min + (c.kappa_max - c.kappa_min) * i / (c.samples - 1);
    pts.push_back({"curve", 0, kap, large::char_lhs(k, c.a, kap)});
  }
  const double off = par == Parity::even ? 0.0 : 0.5;
  const double lo = large::char_lhs(k, c.a, c.kappa_min), hi = large::char_lhs(k, c.a, c.kappa_max);
  for (int m = static_cast<int>(std::floor(lo / pi - off)); m + off <= hi / pi; ++m) {
    pts.push_back({"level", m, 0.0, pi * (m + off)});
    if (m < 0) continue;
    const auto r = large::solve_branch(k, c.a, par, m);
    if (r.kappa >= c.kappa_min && r.kappa <= c.kappa_max) pts.push_back({"root", m, r.kappa, pi * (m + off)});
  }
  const auto ny = nystrom::solve(k, c.a, c.nystrom_n, c.n_max);
  for (std::size_t l = 0; l < ny.size(); ++l) {
    if (ny.parity[l] != par || ny.below_noise_floor[l]) continue;
    const double kap = khat_inverse(k, ny.lambda[l]);
    if (kap >= c.kappa_min && kap <= c.kappa_max) pts.push_back({"reference", 0, kap, large::char_lhs(k, c.a, kap)});
  }

  std::ostringstream os;
  if (c.format == "json") {
    json j{{"kernel", k.name}, {"a", c.a}, {"parity", to_string(par)}};
    j["points"] = json::array();
    for (const auto& p : pts) j["points"].push_back({{"kind", p.kind}, {"m", p.m}, {"kappa", p.kappa}, {"value", p.value}});
    os << j.dump(1) << '\n';
  } else {
    os << "kind,m,kappa,value\n";
    for (const auto& p : pts) os << p.kind << ',' << p.m << ',' << full(p.kappa) << ',' << full(p.value) << '\n';
  }
  emit(c, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of truncated convolution operators on [-a, a]"};
  app.require_subcommand(1);
  Cli cli;

  auto* v = app.add_subcommand("validate", "check kernel assumptions");
  auto* s = app.add_subcommand("solve", "eigenpairs by one backend");
  auto* cmp = app.add_subcommand("compare", "reference vs test backend table");
  auto* ch = app.add_subcommand("chardata", "characteristic-equation plot data");
  for (auto* sub : {v, s, cmp, ch}) cli.common(sub);
  for (auto* sub : {s, cmp})
    cli.opts.emplace_back("backend", sub->add_option("--backend", cli.cfg.backend, "nystrom | large | small"));
  cmp->add_option("--ref-backend", cli.cfg.ref_backend, "reference backend (default nystrom)");
  cli.opts.emplace_back("parity", ch->add_option("--parity", cli.cfg.parity, "even | odd"));
  cli.opts.emplace_back("kappa_min", ch->add_option("--kappa-min", cli.cfg.kappa_min));
  cli.opts.emplace_back("kappa_max", ch->add_option("--kappa-max", cli.cfg.kappa_max));
  cli.opts.emplace_back("samples", ch->add_option("--samples", cli.cfg.samples, "curve samples"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    cli.apply_config(sub);
    check_common(cli.cfg);
    if (sub == v) return cmd_validate(cli.cfg);
    if (sub == s) return cmd_solve(cli.cfg);
    if (sub == cmp) return cmd_compare(cli.cfg);
    return cmd_chardata(cli.cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
