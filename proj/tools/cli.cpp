#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitsea/airy.hpp"
#include "splitsea/csv.hpp"
#include "splitsea/dpp_sampler.hpp"
#include "splitsea/edge_distribution.hpp"
#include "splitsea/errors.hpp"
#include "splitsea/kernel.hpp"
#include "splitsea/parallel.hpp"
#include "splitsea/potential.hpp"
#include "splitsea/schur_oracle.hpp"
#include "splitsea/svg.hpp"
#include "splitsea/unitary_mc.hpp"

namespace splitsea::cli {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string &text, const std::string &what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size())
      throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error &) {
    throw ConfigError("cannot read " + what + " from '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string &text, const std::string &what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty())
      out.push_back(to_double(item, what));
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

// "a:b" or "a:b:step".
Range parse_range(const std::string &text, const std::string &what, bool need_step) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':'))
    parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3 || (need_step && parts.size() != 3))
    throw ConfigError(what + " must look like " + (need_step ? "lo:hi:step" : "lo:hi"));
  Range r{to_double(parts[0], what), to_double(parts[1], what), 0.0};
  if (parts.size() == 3)
    r.step = to_double(parts[2], what);
  if (r.hi < r.lo)
    throw ConfigError(what + ": upper end below lower end");
  if (parts.size() == 3 && !(r.step > 0.0))
    throw ConfigError(what + ": step must be positive");
  return r;
}

std::vector<double> range_points(const Range &r) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((r.hi - r.lo) / r.step + 1e-9));
  for (long i = 0; i <= n; ++i)
    out.push_back(r.lo + static_cast<double>(i) * r.step);
  return out;
}

HoppingCoefficients make_coeffs(const std::string &gamma, double theta = 1.0) {
  std::vector<double> g = parse_list(gamma, "--gamma");
  if (g.empty())
    throw ConfigError("--gamma needs at least one coefficient");
  if (!(theta >= 0.0))
    throw ConfigError("--theta must be nonnegative");
  HoppingCoefficients c(std::move(g), theta);
  if (c.is_degenerate())
    throw ConfigError("--gamma has no nonzero coefficient");
  return c;
}

Site half_integer(double v, const std::string &what) {
  const double f = v - std::floor(v);
  if (std::abs(f - 0.5) > 1e-9)
    throw ConfigError(what + " must be a half-integer (e.g. 0.5, -2.5)");
  return Site{static_cast<std::int64_t>(std::floor(v))};
}

// Primary artifact: a file if a path was given, otherwise `fallback`.
class Sink {
public:
  Sink(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw ConfigError("cannot open " + path + " for writing");
      stream_ = file_.get();
    }
  }
  std::ostream &operator*() { return *stream_; }

private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream *stream_;
};

void write_table(const std::string &path, std::ostream &out, const CsvTable &t) {
  Sink sink(path, out);
  write_csv(*sink, t);
}

void write_json(const std::string &path, std::ostream &out, const json &j) {
  Sink sink(path, out);
  *sink << j.dump(2) << '\n';
}

json profile_json(const HoppingCoefficients &c) {
  const EdgeProfile p = edge_profile(c);
  json j;
  j["gammas"] = c.gammas();
  j["b"] = p.b;
  j["b_tilde"] = p.b_tilde;
  json maxi = json::array();
  for (const Maximizer &m : p.maximizers)
    maxi.push_back({{"chi_b", m.chi_b}, {"m", m.m}, {"d", m.d}, {"endpoint", m.at_endpoint()}});
  j["maximizers"] = maxi;
  j["n_cuts"] = p.n_cuts;
  const int m = p.leading().m;
  j["regime"] = {{"edge_order", m},
                 {"fluctuation_exponent", 1.0 / (2.0 * m + 1.0)},
                 {"density_exponent", 1.0 / (2.0 * m)},
                 {"oscillating_edge", !p.leading().at_endpoint()},
                 {"limit_law", "F_" + std::to_string(2 * m + 1) +
                                   (p.n_cuts > 1 ? "^" + std::to_string(p.n_cuts) : "")}};
  return j;
}

struct Params {
  std::string gamma;
  double theta = 1.0;
  std::string output;
  bool as_json = false;
  // density
  double xmin = NAN, xmax = NAN;
  int steps = 200;
  // kernel
  double k = 0.5, l = 0.5, eps = 0.05;
  std::string window;
  // oracle / cdf
  int ell = 1, cap = 22;
  std::string ell_range;
  // airy
  int m = 1, power = 1;
  std::string s_range = "-6:4:0.1";
  // converge
  std::string thetas;
  std::string power_text = "auto";
  std::string csv_path, svg_path;
  // sample / mc
  std::uint64_t n = 5000, seed = 7, sweeps = 200000;
  double x = NAN, burn_in = 0.2;
  int bins = 72, points = 720;
  // figures
  double gamma2 = NAN;
  std::string outdir = ".", prefix = "figure";
};

void cmd_analyze(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma);
  const json j = profile_json(c);
  if (p.as_json) {
    write_json(p.output, out, j);
    return;
  }
  Sink sink(p.output, out);
  std::ostream &o = *sink;
  o << "b        " << format_double(j["b"].get<double>()) << '\n';
  o << "b_tilde  " << format_double(j["b_tilde"].get<double>()) << '\n';
  o << "n_cuts   " << j["n_cuts"].get<int>() << '\n';
  for (const auto &mx : j["maximizers"])
    o << "maximizer chi_b=" << format_double(mx["chi_b"].get<double>()) << " m=" << mx["m"].get<int>()
      << " d=" << format_double(mx["d"].get<double>()) << (mx["endpoint"].get<bool>() ? " (endpoint)" : "")
      << '\n';
  o << "limit    " << j["regime"]["limit_law"].get<std::string>() << '\n';
}

void cmd_density(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma);
  const Extrema ex = global_extrema(c);
  const double lo = std::isnan(p.xmin) ? -ex.b_tilde - 0.5 : p.xmin;
  const double hi = std::isnan(p.xmax) ? ex.b + 0.5 : p.xmax;
  if (p.steps < 1 || hi < lo)
    throw ConfigError("density: need xmin <= xmax and steps >= 1");
  CsvTable t;
  t.header = {"x", "rho", "Omega"};
  t.rows.resize(static_cast<std::size_t>(p.steps) + 1);
  parallel_for(t.rows.size(), [&](std::size_t i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / p.steps;
    t.rows[i] = {x, limit_density(c, x), limit_shape(c, x)};
  });
  write_table(p.output, out, t);
}

void cmd_kernel(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  const Site k = half_integer(p.k, "--k"), l = half_integer(p.l, "--l");
  const double value = kernel_eval(CoefficientBand(c), k, l);
  const QuadratureKernelValue q = kernel_eval_quadrature(c, k, l, p.eps);
  json j{{"k", k.value()}, {"l", l.value()}, {"theta", p.theta}, {"value", value},
         {"oracle_value", q.value}, {"diff", std::abs(value - q.value)}, {"oracle_nodes", q.nodes}};
  write_json(p.output, out, j);
}

void cmd_kernel_profile(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  const Range r = parse_range(p.window, "--window", false);
  const Site first = half_integer(r.lo, "--window start"), last = half_integer(r.hi, "--window end");
  const std::vector<double> diag = kernel_diagonal(CoefficientBand(c), first, last - first + 1);
  CsvTable t;
  t.header = {"k", "Kkk"};
  for (std::size_t i = 0; i < diag.size(); ++i)
    t.rows.push_back({(first + static_cast<std::int64_t>(i)).value(), diag[i]});
  write_table(p.output, out, t);
}

void cmd_oracle_cdf(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  if (p.cap < 0 || p.cap > 40)
    throw ConfigError("--cap must be in 0..40");
  const PartialSum s = brute_cdf_first_part(c, p.ell, p.cap);
  json j{{"ell", p.ell}, {"theta", p.theta}, {"value", s.value}, {"cap", s.cap},
         {"residual_bound", s.residual_bound}, {"toeplitz", toeplitz_cdf(c, p.ell)}};
  write_json(p.output, out, j);
}

void cmd_airy(const Params &p, std::ostream &out) {
  const AiryOrder order(p.m);
  if (p.power < 1)
    throw ConfigError("--power must be at least 1");
  const std::vector<double> s = range_points(parse_range(p.s_range, "--s", true));
  CsvTable t;
  t.header = {"s", "F"};
  t.rows.resize(s.size());
  parallel_for(s.size(), [&](std::size_t i) { t.rows[i] = {s[i], limiting_cdf(order, p.power, s[i])}; });
  write_table(p.output, out, t);
}

void cmd_cdf(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  std::int64_t lo = 0, hi = 0;
  if (p.ell_range.empty()) {
    const EdgeProfile prof = edge_profile(c);
    const double scale = prof.edge_scale(p.theta);
    lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(prof.b * p.theta - 6.0 * scale)));
    hi = static_cast<std::int64_t>(std::ceil(prof.b * p.theta + 4.0 * scale));
  } else {
    const Range r = parse_range(p.ell_range, "--ell-range", false);
    lo = std::llround(r.lo);
    hi = std::llround(r.hi);
  }
  const CdfTable table = cdf_table(c, lo, hi);
  CsvTable t;
  t.header = {"ell", "p", "s"};
  for (const CdfRow &row : table.rows)
    t.rows.push_back({static_cast<double>(row.ell), row.p, table.scaled(row.ell)});
  write_table(p.output, out, t);
}

void cmd_converge(const Params &p, std::ostream &out) {
  const HoppingCoefficients base = make_coeffs(p.gamma);
  const std::vector<double> thetas = parse_list(p.thetas, "--thetas");
  if (thetas.empty())
    throw ConfigError("--thetas needs at least one value");
  int power = 0;
  if (p.power_text != "auto") {
    power = static_cast<int>(to_double(p.power_text, "--power"));
    if (power < 1)
      throw ConfigError("--power must be 'auto' or a positive integer");
  }
  const Range s = parse_range(p.s_range, "--s-range", false);
  const ConvergenceReport r = scaled_convergence_study(base.gammas(), thetas, s.lo, s.hi, power);
  json j;
  j["gammas"] = base.gammas();
  j["m"] = r.m;
  j["power"] = r.power;
  j["limit_law"] = "F_" + std::to_string(2 * r.m + 1) + (r.power > 1 ? "^" + std::to_string(r.power) : "");
  json dist = json::object(), lattice = json::object();
  bool decreasing = true;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    dist[format_double(r.points[i].theta)] = r.points[i].sup_step;
    lattice[format_double(r.points[i].theta)] = r.points[i].sup_lattice;
    if (i > 0 && !(r.points[i].sup_step < r.points[i - 1].sup_step))
      decreasing = false;
  }
  j["sup_distance"] = dist;
  j["sup_distance_lattice"] = lattice;
  j["strictly_decreasing"] = decreasing;
  write_json(p.output, out, j);

  if (!p.csv_path.empty()) {
    CsvTable t;
    t.header = {"theta", "s", "cdf", "limit"};
    for (const auto &pt : r.points)
      for (std::size_t i = 0; i < pt.s.size(); ++i)
        t.rows.push_back({pt.theta, pt.s[i], pt.cdf[i], pt.limit[i]});
    write_csv(p.csv_path, t);
  }
  if (!p.svg_path.empty()) {
    static const char *colours[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    SvgPanel panel;
    panel.title = "scaled edge law vs " + j["limit_law"].get<std::string>();
    panel.x_label = "s";
    panel.y_label = "P";
    SvgSeries limit{"limit", {}, {}, "#000000"};
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto &pt = r.points[i];
      SvgSeries series{"theta=" + format_double(pt.theta), {}, {}, colours[i % 5]};
      for (std::size_t q = 0; q < pt.s.size(); ++q) {
        // Step curve: flat between lattice images.
        if (q > 0) {
          series.x.push_back(pt.s[q]);
          series.y.push_back(pt.cdf[q - 1]);
        }
        series.x.push_back(pt.s[q]);
        series.y.push_back(pt.cdf[q]);
      }
      panel.series.push_back(std::move(series));
    }
    const auto &last = r.points.back();
    limit.x = last.s;
    limit.y = last.limit;
    panel.series.push_back(std::move(limit));
    write_svg(p.svg_path, {panel});
  }
}

void cmd_sample(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  if (p.n < 1)
    throw ConfigError("-n must be positive");
  const WindowedKernel wk = windowed_kernel(c);
  const EdgeLawReport law = empirical_edge_law(c, p.n, p.seed);
  json j{{"n", p.n},
         {"seed", p.seed},
         {"theta", p.theta},
         {"window", {wk.window().lo.value(), wk.window().hi.value()}},
         {"leakage", wk.leakage()},
         {"m", law.m},
         {"n_cuts", law.n_cuts},
         {"ks_exact", law.ks_exact},
         {"ks_limit", std::isnan(law.ks_limit) ? json(nullptr) : json(law.ks_limit)},
         {"ks_critical_1pct", 1.63 / std::sqrt(static_cast<double>(p.n))}};
  write_json(p.output, out, j);
  if (!p.csv_path.empty()) {
    CsvTable t;
    t.header = {"sample", "k_max", "s"};
    for (std::size_t i = 0; i < law.k_max.size(); ++i)
      t.rows.push_back({static_cast<double>(i), law.k_max[i].value(), i < law.scaled.size() ? law.scaled[i] : NAN});
    write_csv(p.csv_path, t);
  }
}

void cmd_unitary_density(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma);
  if (std::isnan(p.x))
    throw ConfigError("--x is required");
  if (p.points < 8)
    throw ConfigError("--points must be at least 8");
  const DensityCurve curve = density_curve(c, p.x, static_cast<std::size_t>(p.points));
  CsvTable t;
  t.header = {"alpha", "rho"};
  for (std::size_t i = 0; i < curve.alphas.size(); ++i)
    t.rows.push_back({curve.alphas[i], curve.rho[i]});
  write_table(p.output, out, t);
}

void cmd_unitary_mc(const Params &p, std::ostream &out) {
  const HoppingCoefficients c = make_coeffs(p.gamma, p.theta);
  if (p.ell < 1)
    throw ConfigError("--ell must be positive");
  if (p.bins < 4)
    throw ConfigError("--bins must be at least 4");
  if (!(p.burn_in >= 0.0 && p.burn_in < 1.0))
    throw ConfigError("--burn-in must be in [0, 1)");
  ChainOptions opts;
  opts.sweeps = p.sweeps;
  opts.seed = p.seed;
  opts.burn_in_fraction = p.burn_in;
  const AngleHistogram hist = unitary_histogram(c, p.ell, opts, static_cast<std::size_t>(p.bins));
  const double chi = edge_profile(c).leading().chi_b;
  json j{{"ell", p.ell},
         {"theta", p.theta},
         {"x", p.theta > 0.0 ? json(static_cast<double>(p.ell) / p.theta) : json(nullptr)},
         {"sweeps", p.sweeps},
         {"seed", p.seed},
         {"acceptance_rate", hist.chain.acceptance_rate},
         {"step", hist.chain.step},
         {"chi_b", chi},
         {"dip_ratio", dip_ratio(hist, chi)}};
  write_json(p.output, out, j);
  if (!p.csv_path.empty()) {
    CsvTable t;
    t.header = {"alpha", "density"};
    for (std::size_t i = 0; i < hist.centres.size(); ++i)
      t.rows.push_back({hist.centres[i], hist.density[i]});
    write_csv(p.csv_path, t);
  }
}

void cmd_figures(const Params &p, std::ostream &out) {
  if (std::isnan(p.gamma2))
    throw ConfigError("--gamma2 is required");
  if (p.points < 8)
    throw ConfigError("--points must be at least 8");
  const HoppingCoefficients c({1.0, p.gamma2});
  const Extrema ex = global_extrema(c);
  std::filesystem::create_directories(p.outdir);
  const std::filesystem::path dir(p.outdir);
  const auto n = static_cast<std::size_t>(p.points);

  CsvTable disp;
  disp.header = {"phi", "D"};
  for (std::size_t i = 0; i <= n; ++i) {
    const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    disp.rows.push_back({phi, eval_dispersion(c, phi)});
  }
  CsvTable dens;
  dens.header = {"x", "rho"};
  const double lo = -ex.b_tilde - 0.5, hi = ex.b + 0.5;
  dens.rows.resize(n + 1);
  parallel_for(n + 1, [&](std::size_t i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    dens.rows[i] = {x, limit_density(c, x)};
  });
  const DensityCurve curve = density_curve(c, ex.b, n + 1);
  CsvTable eig;
  eig.header = {"alpha", "rho"};
  for (std::size_t i = 0; i < curve.alphas.size(); ++i)
    eig.rows.push_back({curve.alphas[i], curve.rho[i]});
  eig.rows.push_back({std::numbers::pi, curve.rho.front()});

  const std::string tag = p.prefix;
  const auto f_disp = (dir / (tag + "_dispersion.csv")).string();
  const auto f_dens = (dir / (tag + "_density.csv")).string();
  const auto f_eig = (dir / (tag + "_eigenvalues.csv")).string();
  const auto f_svg = (dir / (tag + ".svg")).string();
  write_csv(f_disp, disp);
  write_csv(f_dens, dens);
  write_csv(f_eig, eig);

  auto series = [](const CsvTable &t, const std::string &label) {
    SvgSeries s{label, {}, {}, "#1f77b4"};
    for (const auto &row : t.rows) {
      s.x.push_back(row[0]);
      s.y.push_back(row[1]);
    }
    return s;
  };
  const std::string g2 = format_double(p.gamma2);
  std::vector<SvgPanel> panels{
      {"D(phi), gamma2 = " + g2, "phi", "D", {series(disp, "D")}},
      {"limit density, gamma2 = " + g2, "x", "rho", {series(dens, "rho")}},
      {"eigenvalue density at x = b, gamma2 = " + g2, "alpha", "rho", {series(eig, "rho")}}};
  write_svg(f_svg, panels);

  json j{{"gamma2", p.gamma2},
         {"b", ex.b},
         {"b_tilde", ex.b_tilde},
         {"files", {f_disp, f_dens, f_eig, f_svg}}};
  write_json(p.output, out, j);
}

// Index just past the subcommand path in args (args[0] is the program).
std::size_t subcommand_end(const std::vector<std::string> &args, const CLI::App &app) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string &a = args[i];
    if (a == "--threads" || a == "--config") {
      ++i;
      continue;
    }
    if (!a.empty() && a[0] == '-')
      continue;
    const CLI::App *sub = nullptr;
    try {
      sub = app.get_subcommand(a);
    } catch (const CLI::OptionNotFound &) {
      return args.size();
    }
    if (a == "oracle" && i + 1 < args.size()) {
      try {
        (void)sub->get_subcommand(args[i + 1]);
        return i + 2;
      } catch (const CLI::OptionNotFound &) {
      }
    }
    return i + 1;
  }
  return args.size();
}

std::string find_config(const std::vector<std::string> &args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0)
      return args[i].substr(9);
  }
  return "";
}

} // namespace

std::vector<std::string> config_tokens(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    while (!key.empty() && key[0] == '-')
      key.erase(0, 1);
    if (key == "config")
      throw ConfigError(path + ": config files cannot include other config files");
    out.push_back("--" + key + "=" + trim(t.substr(eq + 1)));
  }
  return out;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Lattice fermions with split Fermi seas: kernels, edge laws, sampling"};
  app.name("splitsea");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  Params p;
  std::size_t threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "Worker threads (SPLITSEA_THREADS overrides)");
  app.add_option("--config", config_path, "File of key=value lines; flags override it");

  std::function<void(const Params &, std::ostream &)> action;
  auto sub = [&](CLI::App *parent, const std::string &name, const std::string &help,
                 void (*fn)(const Params &, std::ostream &)) {
    CLI::App *s = parent->add_subcommand(name, help);
    s->fallthrough();
    s->callback([&action, fn] { action = fn; });
    s->add_option("-o,--output", p.output, "Write the primary artifact here instead of stdout");
    return s;
  };
  auto gamma_opt = [&](CLI::App *s) { s->add_option("--gamma", p.gamma, "Comma-separated gamma_1,...,gamma_R")->required(); };
  auto theta_opt = [&](CLI::App *s) { s->add_option("--theta", p.theta, "Coupling theta")->required(); };

  CLI::App *s = sub(&app, "analyze", "Edge profile and regime of a dispersion", cmd_analyze);
  gamma_opt(s);
  s->add_flag("--json", p.as_json, "Emit JSON");

  s = sub(&app, "density", "Limit density and limit shape on an x grid (CSV x,rho,Omega)", cmd_density);
  gamma_opt(s);
  s->add_option("--xmin", p.xmin);
  s->add_option("--xmax", p.xmax);
  s->add_option("--steps", p.steps);

  s = sub(&app, "kernel", "One kernel entry by series and by contour quadrature (JSON)", cmd_kernel);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("--k", p.k, "Half-integer site")->required();
  s->add_option("--l", p.l, "Half-integer site")->required();
  s->add_option("--eps", p.eps, "Contour radius offset");

  s = sub(&app, "kernel-profile", "Kernel diagonal over a window of sites (CSV k,Kkk)", cmd_kernel_profile);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("--window", p.window, "First:last half-integer site")->required();

  CLI::App *oracle = app.add_subcommand("oracle", "Brute-force Schur measure sums");
  oracle->fallthrough();
  oracle->require_subcommand(1);
  s = sub(oracle, "cdf", "P(lambda_1 <= ell) summed over partitions (JSON)", cmd_oracle_cdf);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("--ell", p.ell)->required();
  s->add_option("--cap", p.cap, "Largest partition size summed");

  s = sub(&app, "airy", "Limiting edge law F_{2m+1}^power on an s grid (CSV s,F)", cmd_airy);
  s->add_option("--m", p.m, "Airy order 1..4");
  s->add_option("--s", p.s_range, "lo:hi:step");
  s->add_option("--power", p.power);

  s = sub(&app, "cdf", "Exact law of the top particle (CSV ell,p,s)", cmd_cdf);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("--ell-range", p.ell_range, "lo:hi (default: 6 edge scales below to 4 above b theta)");

  s = sub(&app, "converge", "Distance of the rescaled law to its limit per theta (JSON)", cmd_converge);
  gamma_opt(s);
  s->add_option("--thetas", p.thetas, "Comma-separated thetas")->required();
  s->add_option("--power", p.power_text, "'auto' (cut count) or an integer");
  s->add_option("--s-range", p.s_range, "lo:hi");
  s->add_option("--csv", p.csv_path, "Scaled CDFs at the lattice points");
  s->add_option("--svg", p.svg_path, "Overlay plot");

  s = sub(&app, "sample", "Exact samples of the top particle (JSON summary)", cmd_sample);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("-n", p.n, "Number of samples");
  s->add_option("--seed", p.seed);
  s->add_option("--csv", p.csv_path, "k_max of each sample");

  s = sub(&app, "unitary-density", "Supercritical eigenvalue density (CSV alpha,rho)", cmd_unitary_density);
  gamma_opt(s);
  s->add_option("--x", p.x, "x = ell/theta, at least b")->required();
  s->add_option("--points", p.points);

  s = sub(&app, "unitary-mc", "Metropolis chain for the eigenvalue angles (JSON)", cmd_unitary_mc);
  gamma_opt(s);
  theta_opt(s);
  s->add_option("--ell", p.ell, "Matrix size")->required();
  s->add_option("--sweeps", p.sweeps);
  s->add_option("--seed", p.seed);
  s->add_option("--bins", p.bins);
  s->add_option("--burn-in", p.burn_in, "Discarded fraction of sweeps");
  s->add_option("--csv", p.csv_path, "Angle histogram");

  s = sub(&app, "figures", "Dispersion, density and eigenvalue curves for gamma = (1, gamma2)", cmd_figures);
  s->add_option("--gamma2", p.gamma2)->required();
  s->add_option("--outdir", p.outdir);
  s->add_option("--prefix", p.prefix);
  s->add_option("--points", p.points);

  try {
    std::vector<std::string> args(argv, argv + argc);
    if (args.empty())
      args.push_back("splitsea");
    const std::string cfg = find_config(args);
    if (!cfg.empty()) {
      const std::vector<std::string> extra = config_tokens(cfg);
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(subcommand_end(args, app)), extra.begin(),
                  extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
      out << (e.get_name() == "CallForAllHelp" ? app.help("", CLI::AppFormatMode::All) : app.help());
      return kOk;
    } catch (const CLI::ParseError &e) {
      if (e.get_exit_code() == 0) {
        // Help on a subcommand.
        for (const CLI::App *sc : app.get_subcommands())
          out << sc->help();
        return kOk;
      }
      err << "error: " << e.what() << '\n';
      return kConfigError;
    }

    if (const char *env = std::getenv("SPLITSEA_THREADS"); env && std::atol(env) > 0)
      set_thread_count(static_cast<std::size_t>(std::atol(env)));
    else if (threads > 0)
      set_thread_count(threads);

    if (!action) {
      err << "error: no subcommand\n";
      return kConfigError;
    }
    action(p, out);
    return kOk;
  } catch (const ConfigError &e) {
    err << "error: ConfigError: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError &e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument &e) {
    err << "error: ConfigError: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace splitsea::cli
