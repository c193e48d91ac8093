#include "orlicz/cli.hpp"

#include "orlicz/csv.hpp"
#include "orlicz/geometry.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/seminorm.hpp"
#include "orlicz/theorems.hpp"
#include "orlicz/young.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace orlicz::cli {

namespace {

// Problems with flags, config keys, or referenced inputs; exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: " + what + ": not a number: '" + t + "'");
  }
  if (pos != t.size())
    throw ConfigError("config: " + what + ": trailing junk in '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

// All knobs of a run, with their documented defaults. A config file fills
// them first; command-line flags override.
struct Config {
  std::string domain_expr;              // e.g. "box(0,1)+box(2,4)"
  std::vector<std::string> pieces;      // repeated `piece = ...` keys
  std::string young = "tp";             // tp | tp_log | tp_over_log |
                                        // double_phase | table
  double p = 2.0;
  double q = 2.0;
  std::string table_path;               // two-column CSV for young=table
  std::string kernel = "fractional";    // fractional | tempered
  double s = 0.5;
  int dim = 1;                          // when no domain fixes it
  int case_id = 1;
  std::string grid_path;
  std::string corpus_text;              // comma-separated CSV paths
  std::string eps_text;                 // comma-separated eps values
  int resolution = 64;
  int base_resolution = 16;
  int levels = 3;
  int diag_depth = 3;
  double truncation_radius = 0.0;       // 0: automatic
  double tolerance = 1e-6;
  int threads = 1;
  std::string out = ".";

  std::string config_path;              // as given, empty when none
  std::vector<std::string> raw_config;  // verbatim file lines
};

void apply_config_line(Config& cfg, const std::string& key,
                       const std::string& value,
                       const std::string& subcommand) {
  std::string k = key;
  for (char& c : k)
    if (c == '-') c = '_';
  if (k == "domain") cfg.domain_expr = value;
  else if (k == "piece") cfg.pieces.push_back(value);
  else if (k == "young") cfg.young = value;
  else if (k == "p") cfg.p = parse_number(value, "p");
  else if (k == "q") cfg.q = parse_number(value, "q");
  else if (k == "table") cfg.table_path = value;
  else if (k == "kernel") cfg.kernel = value;
  else if (k == "s") cfg.s = parse_number(value, "s");
  else if (k == "dim") cfg.dim = (int)parse_number(value, "dim");
  else if (k == "case") cfg.case_id = (int)parse_number(value, "case");
  else if (k == "grid") cfg.grid_path = value;
  else if (k == "corpus") cfg.corpus_text = value;
  else if (k == "eps") cfg.eps_text = value;
  else if (k == "resolution") cfg.resolution = (int)parse_number(value, "resolution");
  else if (k == "base_resolution")
    cfg.base_resolution = (int)parse_number(value, "base_resolution");
  else if (k == "levels") cfg.levels = (int)parse_number(value, "levels");
  else if (k == "diag_depth")
    cfg.diag_depth = (int)parse_number(value, "diag_depth");
  else if (k == "truncation_radius")
    cfg.truncation_radius = parse_number(value, "truncation_radius");
  else if (k == "tolerance") cfg.tolerance = parse_number(value, "tolerance");
  else if (k == "threads") cfg.threads = (int)parse_number(value, "threads");
  else if (k == "out") cfg.out = value;
  else if (k == "subcommand") {
    if (!subcommand.empty() && value != subcommand)
      throw ConfigError("config: file names subcommand '" + value +
                        "' but '" + subcommand + "' was invoked");
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void load_config_file(Config& cfg, const std::string& path,
                      const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  cfg.config_path = path;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    cfg.raw_config.push_back(line);
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value, got '" + t + "'");
    apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)),
                      subcommand);
  }
}

// "box(0,0,1,1)" or "ball(0,0,1)"; box takes lo then hi coordinates.
geometry::Piece parse_piece(const std::string& text, int* dim_inout) {
  const std::string t = trim(text);
  const size_t open = t.find('(');
  if (open == std::string::npos || t.back() != ')')
    throw ConfigError("config: malformed piece '" + t + "'");
  const std::string name = trim(t.substr(0, open));
  const auto args = split(t.substr(open + 1, t.size() - open - 2), ',');
  std::vector<double> v;
  for (const auto& a : args) v.push_back(parse_number(a, "piece " + name));

  auto fix_dim = [&](int d) {
    if (*dim_inout == 0) *dim_inout = d;
    if (*dim_inout != d)
      throw ConfigError("config: pieces disagree on dimension");
    if (d < 1 || d > 3)
      throw ConfigError("config: piece dimension must be 1, 2, or 3");
  };

  if (name == "box") {
    if (v.size() < 2 || v.size() % 2 != 0)
      throw ConfigError("config: box needs lo and hi coordinates");
    const int d = static_cast<int>(v.size() / 2);
    fix_dim(d);
    Vector lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = v[static_cast<size_t>(k)];
      hi[k] = v[static_cast<size_t>(k) + static_cast<size_t>(d)];
      if (!(lo[k] < hi[k]))
        throw ConfigError("config: box needs lo < hi per axis in '" + t + "'");
    }
    return geometry::Box{lo, hi};
  }
  if (name == "ball") {
    if (v.size() < 2)
      throw ConfigError("config: ball needs center coordinates and radius");
    const int d = static_cast<int>(v.size()) - 1;
    fix_dim(d);
    Vector c(d);
    for (int k = 0; k < d; ++k) c[k] = v[static_cast<size_t>(k)];
    const double r = v.back();
    if (!(r > 0.0))
      throw ConfigError("config: ball needs a positive radius in '" + t + "'");
    return geometry::Ball{c, r};
  }
  throw ConfigError("config: unknown piece type '" + name + "'");
}

std::optional<geometry::Domain> parse_domain(const Config& cfg) {
  std::vector<std::string> texts;
  if (!cfg.domain_expr.empty()) {
    texts = split(cfg.domain_expr, '+');
  } else {
    texts = cfg.pieces;
  }
  if (texts.empty()) return std::nullopt;
  int dim = 0;
  std::vector<geometry::Piece> pieces;
  for (const auto& t : texts) pieces.push_back(parse_piece(t, &dim));
  return geometry::Domain(dim, pieces);
}

geometry::Domain require_domain(const Config& cfg) {
  auto D = parse_domain(cfg);
  if (!D)
    throw ConfigError(
        "config: a domain is required (--domain or piece entries)");
  return *D;
}

young::YoungFunction make_young(const Config& cfg) {
  if (cfg.young == "tp") return young::power(cfg.p);
  if (cfg.young == "tp_log") return young::power_log(cfg.p);
  if (cfg.young == "tp_over_log") return young::power_over_log(cfg.p);
  if (cfg.young == "double_phase") return young::double_phase(cfg.q, cfg.p);
  if (cfg.young == "table") {
    if (cfg.table_path.empty())
      throw ConfigError("config: young=table needs --table FILE");
    csv::Table t;
    try {
      t = csv::read_table(cfg.table_path);
    } catch (const Error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (t.header.size() != 2)
      throw ConfigError("config: table file must have two columns (t, G)");
    std::vector<double> ts, gs;
    for (const auto& row : t.rows) {
      ts.push_back(row[0]);
      gs.push_back(row[1]);
    }
    return young::from_table(ts, gs);
  }
  throw ConfigError("config: unknown young function '" + cfg.young + "'");
}

young::KernelSpec make_kernel(const Config& cfg, int dim) {
  if (!(cfg.s > 0.0) || !(cfg.s < 1.0))
    throw ConfigError("config: s must lie in (0,1)");
  if (cfg.kernel == "fractional")
    return young::KernelSpec::make_fractional(cfg.s, dim);
  if (cfg.kernel == "tempered") {
    const double s = cfg.s;
    return young::KernelSpec::general(
        [s](double r) { return std::pow(r, s); },
        [dim, s](double r) {
          return std::pow(r, double(dim)) * std::pow(1.0 + r, s);
        });
  }
  throw ConfigError("config: unknown kernel '" + cfg.kernel + "'");
}

quadrature::CubatureSpec make_spec(const Config& cfg) {
  quadrature::CubatureSpec spec;
  spec.base_resolution = cfg.base_resolution;
  spec.refinement_levels = cfg.levels;
  spec.diagonal_split_depth = cfg.diag_depth;
  spec.truncation_radius = cfg.truncation_radius;
  spec.tolerance = cfg.tolerance;
  spec.threads = cfg.threads;
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

geometry::GridFunction load_grid(
    const Config& cfg, const std::optional<geometry::Domain>& support) {
  if (cfg.grid_path.empty())
    throw ConfigError("config: a grid CSV is required (--grid FILE)");
  try {
    return csv::read_grid(cfg.grid_path, support);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> effective_config(
    const Config& cfg, const std::string& subcommand) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("subcommand", subcommand);
  kv.emplace_back("domain", cfg.domain_expr);
  for (const auto& p : cfg.pieces) kv.emplace_back("piece", p);
  kv.emplace_back("young", cfg.young);
  kv.emplace_back("p", csv::format_double(cfg.p));
  kv.emplace_back("q", csv::format_double(cfg.q));
  kv.emplace_back("table", cfg.table_path);
  kv.emplace_back("kernel", cfg.kernel);
  kv.emplace_back("s", csv::format_double(cfg.s));
  kv.emplace_back("dim", std::to_string(cfg.dim));
  kv.emplace_back("case", std::to_string(cfg.case_id));
  kv.emplace_back("grid", cfg.grid_path);
  kv.emplace_back("corpus", cfg.corpus_text);
  kv.emplace_back("eps", cfg.eps_text);
  kv.emplace_back("resolution", std::to_string(cfg.resolution));
  kv.emplace_back("base_resolution", std::to_string(cfg.base_resolution));
  kv.emplace_back("levels", std::to_string(cfg.levels));
  kv.emplace_back("diag_depth", std::to_string(cfg.diag_depth));
  kv.emplace_back("truncation_radius",
                  csv::format_double(cfg.truncation_radius));
  kv.emplace_back("tolerance", csv::format_double(cfg.tolerance));
  kv.emplace_back("threads", std::to_string(cfg.threads));
  kv.emplace_back("out", cfg.out);
  return kv;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct Reporter {
  std::filesystem::path dir;
  Config cfg;
  std::string subcommand;

  void ensure_dir() const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      throw ConfigError("config: cannot create output directory " +
                        dir.string());
  }

  void write(const csv::Table& report, const csv::Table& curves,
             const std::vector<std::string>& summary) const {
    ensure_dir();
    csv::emit_curves(report, (dir / "report.csv").string());
    csv::emit_curves(curves, (dir / "curves.csv").string());

    std::ofstream txt(dir / "report.txt", std::ios::binary);
    if (!txt)
      throw Error("report: cannot open " + (dir / "report.txt").string());
    txt << "# generated: " << now_utc() << "\n";
    txt << "[configuration]\n";
    for (const auto& [k, v] : effective_config(cfg, subcommand))
      txt << k << " = " << v << "\n";
    if (!cfg.config_path.empty()) {
      txt << "[config file " << cfg.config_path << "]\n";
      for (const auto& line : cfg.raw_config) txt << line << "\n";
    }
    txt << "[summary]\n";
    for (const auto& line : summary) {
      txt << line << "\n";
      std::cout << line << "\n";
    }
    txt.flush();
    if (!txt)
      throw Error("report: write failed for " + (dir / "report.txt").string());
  }
};

std::string flag(bool b) { return b ? "yes" : "no"; }

int run_young_inspect(const Config& cfg, const Reporter& rep) {
  const auto Y = make_young(cfg);
  young::validate(Y);
  const Array grid = young::default_t_grid();
  const auto [pm, pp] = young::exponent_bounds(Y, grid);
  const double d2 = young::delta2_constant(Y, grid);
  const double d2_bound = std::pow(2.0, Y.p_plus);
  double legendre_max = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    legendre_max =
        std::max(legendre_max, young::legendre_identity_residual(Y, grid[i]));

  csv::Table report;
  report.header = {"p_minus",         "p_plus",       "p_minus_sampled",
                   "p_plus_sampled",  "delta2",       "delta2_bound",
                   "legendre_residual_max"};
  report.rows = {{Y.p_minus, Y.p_plus, pm, pp, d2, d2_bound, legendre_max}};

  csv::Table curves;
  curves.header = {"t", "G", "g"};
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    curves.rows.push_back({grid[i], Y.G(grid[i]), Y.g(grid[i])});

  rep.write(report, curves,
            {"young function: " + Y.name,
             "p- = " + csv::format_double(Y.p_minus) +
                 " (sampled " + csv::format_double(pm) + ")",
             "p+ = " + csv::format_double(Y.p_plus) +
                 " (sampled " + csv::format_double(pp) + ")",
             "doubling constant = " + csv::format_double(d2) +
                 " (bound " + csv::format_double(d2_bound) + ")",
             "max Legendre residual = " + csv::format_double(legendre_max)});
  return 0;
}

int run_kernel_check(const Config& cfg, const Reporter& rep) {
  const auto Y = make_young(cfg);
  const auto D = parse_domain(cfg);
  const int dim = D ? D->dim() : cfg.dim;
  const auto K = make_kernel(cfg, dim);
  const auto checks = young::kernel_conditions_check(K, Y.p_minus, dim);

  csv::Table report;
  report.header = {"monotone_positive", "lower_bound",  "integrable",
                   "integral_near_zero", "integral_tail", "tail_convergent"};
  report.rows = {{double(checks.monotone_positive), double(checks.lower_bound),
                  double(checks.integrable), checks.integral_near_zero,
                  checks.integral_tail, double(checks.tail_convergent)}};

  csv::Table curves;
  curves.header = {"r", "M", "Nker"};
  const Array rs = log_space(1e-3, 1e3, 61);
  for (Eigen::Index i = 0; i < rs.size(); ++i)
    curves.rows.push_back({rs[i], K.M(rs[i]), K.Nker(rs[i])});

  rep.write(report, curves,
            {"kernel: " + cfg.kernel + " (s = " + csv::format_double(cfg.s) +
                 ", dim " + std::to_string(dim) + ")",
             "monotone and positive: " + flag(checks.monotone_positive),
             "lower bound M(r) >= min(1, r): " + flag(checks.lower_bound),
             "growth integrals finite: " + flag(checks.integrable) +
                 " (near zero " + csv::format_double(checks.integral_near_zero) +
                 ", tail " + csv::format_double(checks.integral_tail) + ")",
             "tail convergent: " + flag(checks.tail_convergent)});
  return 0;
}

int run_rearrange(const Config& cfg, const Reporter& rep) {
  const auto D = parse_domain(cfg);
  const auto u = load_grid(cfg, D);
  const auto r = geometry::schwarz_rearrange(u);
  csv::write_grid(r, (rep.dir / "rearranged.csv").string());

  Eigen::Index positives = 0;
  double support_radius = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r.values()[i] > 0.0) {
      ++positives;
      support_radius = std::max(support_radius, r.center(i).norm());
    }

  csv::Table report;
  report.header = {"cells_per_axis", "positive_cells", "max_value",
                   "support_radius"};
  report.rows = {{double(r.cells_per_axis()), double(positives),
                  positives > 0 ? r.values().maxCoeff() : 0.0,
                  support_radius}};

  csv::Table curves;
  curves.header = {"radius", "value"};
  std::vector<std::pair<double, double>> profile;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r.values()[i] > 0.0)
      profile.emplace_back(r.center(i).norm(), r.values()[i]);
  std::sort(profile.begin(), profile.end());
  for (const auto& [rad, val] : profile) curves.rows.push_back({rad, val});

  rep.write(report, curves,
            {"rearranged " + std::to_string(u.size()) + " cells, " +
                 std::to_string(positives) + " positive",
             "support radius = " + csv::format_double(support_radius),
             "output: rearranged.csv"});
  return 0;
}

int run_seminorm(const Config& cfg, const Reporter& rep) {
  const auto D = require_domain(cfg);
  const auto u = load_grid(cfg, D);
  const auto Y = make_young(cfg);
  const auto K = make_kernel(cfg, D.dim());
  const auto spec = make_spec(cfg);

  const auto dom = seminorm::seminorm_domain(u, D, Y, K, spec);
  const auto cross = seminorm::cross_term(u, D, Y, K, spec);
  const auto full = seminorm::seminorm_fullspace(u, Y, K, spec);

  csv::Table report;
  report.header = {"value",      "error_bound", "resolution",
                   "R_t",        "cross_value", "cross_error",
                   "fullspace_value", "fullspace_error"};
  report.rows = {{dom.value, dom.error_bound, double(u.cells_per_axis()),
                  cross.truncation_radius, cross.value, cross.error_bound,
                  full.total.value, full.total.error_bound}};

  csv::Table curves;
  curves.header = {"resolution", "domain_value", "fullspace_value"};
  const size_t levels = std::min(dom.level_values.size(),
                                 full.total.level_values.size());
  for (size_t l = 0; l < levels; ++l)
    curves.rows.push_back({double(dom.level_resolutions[l]),
                           dom.level_values[l], full.total.level_values[l]});

  rep.write(report, curves,
            {"domain seminorm = " + csv::format_double(dom.value) + " +- " +
                 csv::format_double(dom.error_bound),
             "cross term = " + csv::format_double(cross.value) + " +- " +
                 csv::format_double(cross.error_bound) +
                 " (R_t = " + csv::format_double(cross.truncation_radius) + ")",
             "full-space seminorm = " + csv::format_double(full.total.value) +
                 " +- " + csv::format_double(full.total.error_bound)});
  return 0;
}

int run_counterexample(const Config& cfg, const Reporter& rep) {
  const auto D = require_domain(cfg);
  const auto Y = make_young(cfg);
  const auto K = make_kernel(cfg, D.dim());
  const auto spec = make_spec(cfg);
  std::vector<double> eps;
  for (const auto& e : split(cfg.eps_text, ','))
    eps.push_back(parse_number(e, "eps"));

  const auto result =
      theorems::verify_counterexample(D, Y, K, eps, cfg.resolution, spec);

  csv::Table report;
  report.header = {"eps", "lhs", "lhs_error", "rhs", "rhs_error",
                   "margin", "combined_error", "verdict",
                   "cross_domain", "cross_domain_error",
                   "cross_ball", "cross_ball_error"};
  csv::Table curves;
  curves.header = {"eps", "lhs", "rhs", "margin"};
  for (const auto& row : result.rows) {
    report.rows.push_back({row.eps, row.lhs.value, row.lhs.error_bound,
                           row.rhs.value, row.rhs.error_bound, row.margin,
                           row.combined_error, double(row.pass),
                           row.cross_domain.value,
                           row.cross_domain.error_bound,
                           row.cross_ball.value,
                           row.cross_ball.error_bound});
    curves.rows.push_back({row.eps, row.lhs.value, row.rhs.value, row.margin});
  }

  std::vector<std::string> summary;
  const auto& f = result.frame;
  std::string anchor = "(";
  for (int k = 0; k < f.domain.dim(); ++k)
    anchor += (k ? "," : "") + csv::format_double(f.bump.center[k]);
  anchor += ")";
  summary.push_back("anchor " + anchor + ", profile radius " +
                    csv::format_double(f.bump.outer_radius) +
                    ", matched ball radius " +
                    csv::format_double(f.ball.radius));
  summary.push_back("exterior mass at anchor = " +
                    csv::format_double(result.tail_domain.value) +
                    " vs ball " + csv::format_double(result.tail_ball.value) +
                    " (strict: " + flag(result.tail_strict) + ")");
  summary.push_back("decomposition residual = " +
                    csv::format_double(result.decomposition_residual) +
                    " within budget " +
                    csv::format_double(result.decomposition_budget) +
                    ": " + flag(result.decomposition_residual <=
                                result.decomposition_budget));
  if (result.pass_epsilon) {
    summary.push_back("PASS at eps = " +
                      csv::format_double(*result.pass_epsilon));
  } else {
    summary.push_back("NoPass: no scanned eps cleared the margin test");
  }
  rep.write(report, curves, summary);
  return result.pass_epsilon ? 0 : 2;
}

int run_compare(const Config& cfg, const Reporter& rep) {
  const auto D = require_domain(cfg);
  const auto Y = make_young(cfg);
  const auto K = make_kernel(cfg, D.dim());
  const auto spec = make_spec(cfg);

  std::vector<geometry::GridFunction> corpus;
  const auto paths = split(cfg.corpus_text, ',');
  if (paths.empty()) {
    corpus = theorems::comparison_corpus(D, cfg.resolution);
  } else {
    for (const auto& path : paths) {
      try {
        corpus.push_back(csv::read_grid(path, D));
      } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }

  const auto result =
      theorems::verify_comparison(D, Y, K, cfg.case_id, corpus, spec);

  csv::Table report;
  report.header = {"member", "rho", "hardy_ratio",
                   "fullspace", "fullspace_error",
                   "fullspace_rearranged", "fullspace_rearranged_error",
                   "domain", "domain_error",
                   "domain_rearranged", "domain_rearranged_error",
                   "rearrangement_ok", "restriction_ok"};
  csv::Table curves;
  curves.header = {"member", "rho", "hardy_ratio"};
  for (size_t i = 0; i < result.rows.size(); ++i) {
    const auto& row = result.rows[i];
    report.rows.push_back(
        {double(i), row.rho, row.hardy_ratio, row.fullspace_u.value,
         row.fullspace_u.error_bound, row.fullspace_star.value,
         row.fullspace_star.error_bound, row.domain_u.value,
         row.domain_u.error_bound, row.domain_star.value,
         row.domain_star.error_bound, double(row.rearrangement_ok),
         double(row.restriction_ok)});
    curves.rows.push_back({double(i), row.rho, row.hardy_ratio});
  }

  rep.write(report, curves,
            {"growth-case gate satisfied for case " +
                 std::to_string(cfg.case_id),
             "corpus size = " + std::to_string(result.rows.size()),
             "max rho = " + csv::format_double(result.max_rho) +
                 " (empirical lower bound for the comparison constant)",
             "max boundary/domain ratio = " +
                 csv::format_double(result.max_hardy_ratio),
             "directional checks: " + flag(result.all_ok)});
  return 0;
}

int run_classify(const Config& cfg, const Reporter& rep) {
  const auto Y = make_young(cfg);
  const auto D = parse_domain(cfg);
  const int dim = D ? D->dim() : cfg.dim;
  if (!(cfg.s > 0.0) || !(cfg.s < 1.0))
    throw ConfigError("config: s must lie in (0,1)");
  const auto decision =
      young::classify_growth_case(Y, cfg.s, dim, cfg.case_id);

  auto verdict_num = [](young::Verdict v) {
    if (v == young::Verdict::True) return 1.0;
    if (v == young::Verdict::False) return 0.0;
    return -1.0;
  };
  auto verdict_name = [](young::Verdict v) {
    if (v == young::Verdict::True) return "true";
    if (v == young::Verdict::False) return "false";
    return "inconclusive";
  };

  csv::Table report;
  report.header = {"probe", "verdict", "first", "last", "monotone"};
  for (size_t i = 0; i < decision.probes.size(); ++i) {
    const auto& probe = decision.probes[i];
    report.rows.push_back({double(i), verdict_num(probe.verdict), probe.first,
                           probe.last, double(probe.monotone)});
  }

  csv::Table curves;
  curves.header = {"lambda", "beta"};
  const Array lambdas = young::default_lambda_probe();
  const Array ts = young::default_t_grid();
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    curves.rows.push_back({lambdas[i], young::beta(Y, cfg.s, lambdas[i], ts)});

  std::vector<std::string> summary;
  summary.push_back("case " + std::to_string(cfg.case_id) + " verdict: " +
                    verdict_name(decision.verdict));
  for (const auto& probe : decision.probes)
    summary.push_back("probe " + probe.quantity + ": " +
                      verdict_name(probe.verdict) + " (first " +
                      csv::format_double(probe.first) + ", last " +
                      csv::format_double(probe.last) + ", monotone " +
                      flag(probe.monotone) + ")");
  rep.write(report, curves, summary);
  return decision.verdict == young::Verdict::Inconclusive ? 3 : 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  try {
    // The config file seeds the defaults, so it must load before the flag
    // parser is built.
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
      else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }

    CLI::App app{
        "Orlicz fractional seminorm toolkit: rearrangement comparisons, "
        "seminorm quadrature, and growth-function diagnostics"};
    app.require_subcommand(1);
    app.add_option("--config",
                   "line-oriented key = value file seeding the flags")
        ->option_text("FILE");

    Config cfg;
    // Subcommand names visible to the config loader for the consistency
    // check of a `subcommand =` line.
    std::string chosen;
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "young" || arg == "kernel" || arg == "rearrange" ||
          arg == "seminorm" || arg == "counterexample" || arg == "compare" ||
          arg == "classify") {
        chosen = arg;
        break;
      }
    }
    if (!config_path.empty()) load_config_file(cfg, config_path, chosen);

    auto add_shared = [&cfg](CLI::App* cmd) {
      cmd->add_option("--config", "line-oriented key = value file seeding "
                                  "these flags")
          ->option_text("FILE");
      cmd->add_option("--domain", cfg.domain_expr,
                      "piece list like \"box(0,1)+box(2,4)\" or "
                      "\"ball(0,0,1)\"")
          ->capture_default_str();
      cmd->add_option("--young", cfg.young,
                      "tp | tp_log | tp_over_log | double_phase | table")
          ->capture_default_str();
      cmd->add_option("--p", cfg.p, "growth exponent")->capture_default_str();
      cmd->add_option("--q", cfg.q, "second exponent (double_phase)")
          ->capture_default_str();
      cmd->add_option("--table", cfg.table_path,
                      "two-column CSV of (t, G) for young=table");
      cmd->add_option("--kernel", cfg.kernel, "fractional | tempered")
          ->capture_default_str();
      cmd->add_option("--s", cfg.s, "order in (0,1)")->capture_default_str();
      cmd->add_option("--dim", cfg.dim, "dimension when no domain fixes it")
          ->capture_default_str();
      cmd->add_option("--case", cfg.case_id, "growth case id (1, 2, or 3)")
          ->capture_default_str();
      cmd->add_option("--grid", cfg.grid_path, "grid-function CSV input");
      cmd->add_option("--corpus", cfg.corpus_text,
                      "comma-separated grid CSV paths");
      cmd->add_option("--eps", cfg.eps_text,
                      "comma-separated eps values (default: auto scan)");
      cmd->add_option("--resolution", cfg.resolution, "cells per axis")
          ->capture_default_str();
      cmd->add_option("--levels", cfg.levels, "refinement levels")
          ->capture_default_str();
      cmd->add_option("--diag-depth", cfg.diag_depth,
                      "diagonal subdivision depth")
          ->capture_default_str();
      cmd->add_option("--truncation-radius", cfg.truncation_radius,
                      "exterior truncation radius (0: automatic)")
          ->capture_default_str();
      cmd->add_option("--tolerance", cfg.tolerance, "target tolerance")
          ->capture_default_str();
      cmd->add_option("--threads", cfg.threads, "worker cap")
          ->capture_default_str();
      cmd->add_option("--out", cfg.out, "output directory")
          ->capture_default_str();
    };

    auto* young_cmd =
        app.add_subcommand("young", "Young-function diagnostics");
    young_cmd->require_subcommand(1);
    auto* young_inspect = young_cmd->add_subcommand(
        "inspect", "exponents, doubling, Legendre residual");
    add_shared(young_inspect);

    auto* kernel_cmd =
        app.add_subcommand("kernel", "kernel-pair diagnostics");
    kernel_cmd->require_subcommand(1);
    auto* kernel_check = kernel_cmd->add_subcommand(
        "check", "monotonicity, lower bound, growth integrals");
    add_shared(kernel_check);

    auto* rearrange_cmd = app.add_subcommand(
        "rearrange", "symmetric-decreasing rearrangement of a grid CSV");
    add_shared(rearrange_cmd);

    auto* seminorm_cmd = app.add_subcommand(
        "seminorm", "domain, cross, and full-space seminorms of a grid CSV");
    add_shared(seminorm_cmd);

    auto* counter_cmd = app.add_subcommand(
        "counterexample",
        "eps scan comparing a planted bump against its rearranged partner");
    add_shared(counter_cmd);

    auto* compare_cmd = app.add_subcommand(
        "compare", "rearrangement ratio survey over a corpus");
    add_shared(compare_cmd);

    auto* classify_cmd = app.add_subcommand(
        "classify", "growth-case decision for a Young function");
    add_shared(classify_cmd);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "config: " << e.what() << "\n";
      std::cerr << app.help() << "\n";
      return 1;
    }

    Reporter rep;
    rep.cfg = cfg;
    rep.dir = cfg.out;
    rep.ensure_dir();

    if (young_inspect->parsed()) {
      rep.subcommand = "young inspect";
      return run_young_inspect(cfg, rep);
    }
    if (kernel_check->parsed()) {
      rep.subcommand = "kernel check";
      return run_kernel_check(cfg, rep);
    }
    if (rearrange_cmd->parsed()) {
      rep.subcommand = "rearrange";
      return run_rearrange(cfg, rep);
    }
    if (seminorm_cmd->parsed()) {
      rep.subcommand = "seminorm";
      return run_seminorm(cfg, rep);
    }
    if (counter_cmd->parsed()) {
      rep.subcommand = "counterexample";
      return run_counterexample(cfg, rep);
    }
    if (compare_cmd->parsed()) {
      rep.subcommand = "compare";
      return run_compare(cfg, rep);
    }
    if (classify_cmd->parsed()) {
      rep.subcommand = "classify";
      return run_classify(cfg, rep);
    }
    std::cerr << "config: no subcommand selected\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const theorems::CaseHypothesisError& e) {
    std::cerr << "classification gate: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace orlicz::cli
