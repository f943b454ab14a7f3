#pragma once

// Run configuration, subcommand dispatch and artifact emission for the ifsq
// command-line tool.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ifsq/code_space.hpp"
#include "ifsq/dimension.hpp"
#include "ifsq/error.hpp"
#include "ifsq/fractal_transform.hpp"
#include "ifsq/ifs.hpp"
#include "ifsq/measure.hpp"
#include "ifsq/quantization.hpp"
#include "ifsq/verify.hpp"

namespace ifsq::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kSuccess = 0, kValidation = 1, kNumerical = 2, kBudget = 3 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numerical:
    case ErrorKind::address_failure:
      return kNumerical;
    case ErrorKind::resource:
      return kBudget;
    default:
      return kValidation;
  }
}

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{
      "solve-moran", "qdim-exponent", "attractor", "tops",   "transform-graph", "chaos-game",
      "quantize",    "estimate-qdim", "box-dim",   "report", "verify"};
  return names;
}

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  std::size_t threads = 1;
  /// Turns failed report verdicts into a numerical-failure exit.
  bool strict = false;
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::invalid_input, "config " + path + ": " + what);
}

// A JSON object together with its path, for field-level error messages.
class Section {
 public:
  Section(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) config_fail(path_, "expected an object");
  }

  const std::string& path() const noexcept { return path_; }
  std::string at_path(std::string_view key) const { return path_ + "." + std::string(key); }

  void only(std::initializer_list<std::string_view> keys) const {
    for (const auto& item : j_->items()) {
      bool known = false;
      for (std::string_view k : keys) known = known || item.key() == k;
      if (!known) config_fail(at_path(item.key()), "unknown field");
    }
  }

  bool has(std::string_view key) const { return j_->contains(std::string(key)); }

  const json& raw(std::string_view key) const {
    const auto it = j_->find(std::string(key));
    if (it == j_->end()) config_fail(at_path(key), "missing required field");
    return *it;
  }

  Section object(std::string_view key) const { return {raw(key), at_path(key)}; }

  double number(std::string_view key, std::optional<double> fallback = {}) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = raw(key);
    if (!v.is_number()) config_fail(at_path(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(std::string_view key, std::optional<std::size_t> fallback = {}) const {
    if (!has(key) && fallback) return *fallback;
    return as_count(raw(key), at_path(key));
  }

  std::string text(std::string_view key, std::optional<std::string> fallback = {}) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = raw(key);
    if (!v.is_string()) config_fail(at_path(key), "expected a string");
    return v.get<std::string>();
  }

  bool flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) config_fail(at_path(key), "expected a boolean");
    return v.get<bool>();
  }

  std::vector<double> numbers(std::string_view key) const {
    return as_numbers(raw(key), at_path(key));
  }

  std::vector<std::size_t> counts(std::string_view key) const {
    const json& v = raw(key);
    if (!v.is_array()) config_fail(at_path(key), "expected an array");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_count(v[i], at_path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      config_fail(path, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  static std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) config_fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) config_fail(path + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json* j_;
  std::string path_;
};

// Re-throws library input errors with the config path prepended.
template <class F>
auto at_field(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::resource || e.kind() == ErrorKind::numerical) throw;
    throw Error(e.kind(), "config " + path + ": " + e.message());
  }
}

inline Separation parse_separation(const std::string& s, const std::string& path) {
  if (s == "none") return Separation::none;
  if (s == "osc" || s == "OSC") return Separation::osc;
  if (s == "sosc" || s == "SOSC") return Separation::sosc;
  if (s == "ssc" || s == "SSC") return Separation::ssc;
  config_fail(path, "separation must be one of none, osc, sosc, ssc");
}

inline std::optional<IFSystem> builtin_system(const std::string& name,
                                              std::optional<std::vector<double>> probs) {
  auto p = [&](std::vector<double> def) { return probs ? *probs : def; };
  if (name == "binary") return builtin::binary(p({0.5, 0.5}));
  if (name == "cantor3") return builtin::cantor3(p({0.5, 0.5}));
  if (name == "third-two-thirds") return builtin::third_two_thirds(p({0.5, 0.5}));
  if (name == "perturbed-cantor") return builtin::perturbed_cantor(p({0.5, 0.5}));
  return std::nullopt;
}

inline Eigen::MatrixXd parse_matrix(const json& v, const std::string& path) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) config_fail(path, "expected a number or a matrix");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::vector<double> row = Section::as_numbers(v[i], path + "[" + std::to_string(i) + "]");
    if (i == 0) cols = row.size();
    if (row.size() != cols || cols != rows) config_fail(path, "matrix must be square");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = v[i][k].get<double>();
  }
  return m;
}

inline Eigen::VectorXd parse_vector(const json& v, const std::string& path) {
  if (v.is_number()) return Eigen::VectorXd::Constant(1, v.get<double>());
  const std::vector<double> xs = Section::as_numbers(v, path);
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<long>(xs.size()));
}

}  // namespace detail

/// A validated configuration document plus run options.
class Run {
 public:
  Run(json config, RunOptions options) : config_(std::move(config)), opt_(std::move(options)) {
    const detail::Section root(config_, "$");
    root.only({"schema_version", "seed", "systems", "budgets", "solve_moran", "qdim_exponent",
               "attractor", "tops", "transform_graph", "chaos_game", "quantize", "estimate_qdim",
               "box_dim", "report", "verify"});
    if (root.count("schema_version") != static_cast<std::size_t>(kSchemaVersion)) {
      detail::config_fail("$.schema_version", "unsupported schema version");
    }
    if (!opt_.seed && root.has("seed")) opt_.seed = root.count("seed");
    if (root.has("budgets")) {
      const detail::Section b = root.object("budgets");
      b.only({"max_points", "max_samples"});
      max_points_ = b.count("max_points", max_points_);
      max_samples_ = b.count("max_samples", max_samples_);
    }
    if (root.has("systems")) {
      const detail::Section sys = root.object("systems");
      for (const auto& item : config_.at("systems").items()) {
        const IFSystem s = parse_system(item.value(), sys.at_path(item.key()), item.key());
        // Builtins keep their own name otherwise; reports should show the key.
        systems_.emplace(item.key(), IFSystem(s.maps(), s.probs(), s.declared_separation(),
                                              s.hull(), item.key()));
      }
    }
  }

  /// Runs the subcommand; artifacts are written only if it succeeds.
  int execute(const std::string& name, std::ostream& log) {
    artifacts_.clear();
    int status = kSuccess;
    if (name == "solve-moran") {
      status = solve_moran_cmd();
    } else if (name == "qdim-exponent") {
      status = qdim_exponent_cmd();
    } else if (name == "attractor") {
      status = attractor_cmd();
    } else if (name == "tops") {
      status = tops_cmd();
    } else if (name == "transform-graph") {
      status = transform_graph_cmd();
    } else if (name == "chaos-game") {
      status = chaos_game_cmd();
    } else if (name == "quantize") {
      status = quantize_cmd();
    } else if (name == "estimate-qdim") {
      status = estimate_qdim_cmd();
    } else if (name == "box-dim") {
      status = box_dim_cmd();
    } else if (name == "report") {
      status = report_cmd();
    } else if (name == "verify") {
      status = verify_cmd(log);
    } else {
      throw Error(ErrorKind::invalid_input, "unknown subcommand '" + name + "'");
    }
    write_artifacts();
    for (const auto& line : summary_) log << line << '\n';
    return status;
  }

  const std::vector<std::pair<std::string, std::string>>& artifacts() const { return artifacts_; }

 private:
  // ---- configuration helpers -------------------------------------------

  detail::Section section(const char* key) const {
    const detail::Section root(config_, "$");
    return root.object(key);
  }

  std::uint64_t require_seed(const std::string& what) const {
    if (!opt_.seed) {
      detail::config_fail("$.seed", "a seed is required for " + what + " (use --seed or \"seed\")");
    }
    return *opt_.seed;
  }

  IFSystem parse_system(const json& v, const std::string& path, const std::string& name) const {
    if (v.is_string()) return resolve_system(v.get<std::string>(), path);
    const detail::Section s(v, path);
    std::optional<std::vector<double>> probs;
    if (s.has("probs")) probs = s.numbers("probs");
    if (s.has("builtin")) {
      s.only({"builtin", "probs"});
      const std::string b = s.text("builtin");
      if (b == "countable-example") {
        detail::config_fail(s.at_path("builtin"),
                            "countable-example is a measure; use it as a measure kind");
      }
      auto sys = detail::at_field(path, [&] { return detail::builtin_system(b, probs); });
      if (!sys) detail::config_fail(s.at_path("builtin"), "unknown builtin '" + b + "'");
      return *sys;
    }
    s.only({"maps", "probs", "separation", "hull"});
    const json& maps = s.raw("maps");
    if (!maps.is_array()) detail::config_fail(s.at_path("maps"), "expected an array");
    std::vector<ContractionMap> out;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const std::string mp = s.at_path("maps") + "[" + std::to_string(i) + "]";
      const detail::Section m(maps[i], mp);
      if (m.has("ratio")) {
        m.only({"ratio", "offset"});
        const Eigen::VectorXd off = detail::parse_vector(m.raw("offset"), m.at_path("offset"));
        const double ratio = m.number("ratio");
        out.push_back(detail::at_field(mp, [&] {
          return ContractionMap::similarity(ratio, Point(off.data(), off.data() + off.size()));
        }));
      } else {
        m.only({"linear", "offset"});
        Eigen::MatrixXd lin = detail::parse_matrix(m.raw("linear"), m.at_path("linear"));
        Eigen::VectorXd off = detail::parse_vector(m.raw("offset"), m.at_path("offset"));
        if (off.size() != lin.rows()) detail::config_fail(mp, "offset length differs from matrix");
        out.push_back(detail::at_field(mp, [&] { return ContractionMap::affine(lin, off); }));
      }
    }
    const Separation sep =
        detail::parse_separation(s.text("separation", "none"), s.at_path("separation"));
    std::optional<Box> hull;
    if (s.has("hull")) {
      const detail::Section h = s.object("hull");
      h.only({"lower", "upper"});
      const auto lo = h.numbers("lower");
      const auto hi = h.numbers("upper");
      hull = detail::at_field(h.path(), [&] { return Box(lo, hi); });
    }
    return detail::at_field(path, [&] {
      return IFSystem(std::move(out), std::move(probs), sep, std::move(hull), name);
    });
  }

  IFSystem resolve_system(const std::string& name, const std::string& path) const {
    if (const auto it = systems_.find(name); it != systems_.end()) return it->second;
    if (name == "countable-example") {
      detail::config_fail(path, "countable-example is a measure; use it as a measure kind");
    }
    if (auto sys = detail::builtin_system(name, std::nullopt)) return *sys;
    detail::config_fail(path, "unknown system '" + name + "'");
  }

  IFSystem system_field(const detail::Section& s, const char* key) const {
    const json& v = s.raw(key);
    if (v.is_string()) return resolve_system(v.get<std::string>(), s.at_path(key));
    return parse_system(v, s.at_path(key), key);
  }

  EmpiricalMeasure measure_field(const detail::Section& parent, const char* key) const {
    const detail::Section s = parent.object(key);
    const std::string kind = s.text("kind");
    if (kind == "chaos-game") {
      s.only({"kind", "system", "samples", "burn_in", "stream"});
      return chaos_measure(s);
    }
    if (kind == "countable-example") {
      s.only({"kind", "atoms"});
      const std::size_t atoms = s.count("atoms", 2000);
      return detail::at_field(s.path(), [&] { return countable_example_measure(atoms).measure; });
    }
    if (kind == "cylinders") {
      s.only({"kind", "system", "depth"});
      const IFSystem sys = system_field(s, "system");
      const std::size_t depth = s.count("depth");
      check_points(sys, depth, s.at_path("depth"));
      return detail::at_field(s.path(), [&] { return cylinder_measure(sys, depth); });
    }
    detail::config_fail(s.at_path("kind"),
                        "measure kind must be chaos-game, countable-example or cylinders");
  }

  // Reads system, samples, burn_in and stream from a chaos-game section.
  EmpiricalMeasure chaos_measure(const detail::Section& s) const {
    const IFSystem sys = system_field(s, "system");
    const std::size_t n = s.count("samples");
    check_samples(n, s.at_path("samples"));
    const std::uint64_t seed = require_seed("a chaos-game measure");
    return detail::at_field(s.path(), [&] {
      return chaos_game(sys, n, s.count("burn_in", kDefaultBurnIn), seed, s.count("stream", 0));
    });
  }

  void check_samples(std::size_t n, const std::string& path) const {
    if (n > max_samples_) {
      throw Error(ErrorKind::resource, "config " + path + ": " + std::to_string(n) +
                                           " samples exceed the budget of " +
                                           std::to_string(max_samples_));
    }
  }

  void check_points(const IFSystem& sys, std::size_t depth, const std::string& path) const {
    const double total =
        std::pow(static_cast<double>(sys.size()), static_cast<double>(depth));
    if (total > static_cast<double>(max_points_)) {
      throw Error(ErrorKind::resource, "config " + path + ": depth " + std::to_string(depth) +
                                           " gives more than " + std::to_string(max_points_) +
                                           " points");
    }
  }

  PointCloud attractor_of(const IFSystem& sys, std::size_t depth, const std::string& path) const {
    check_points(sys, depth, path);
    return detail::at_field(path, [&] {
      return attractor_sample(sys, depth, sys.map(0).fixed_point(sys.default_seed()),
                              max_points_);
    });
  }

  struct GraphSpec {
    IFSystem from;
    IFSystem to;
    std::size_t input_depth;
    std::size_t depth;
    std::optional<double> tol;
  };

  GraphSpec graph_spec(const detail::Section& s) const {
    std::optional<double> tol;
    if (s.has("tol")) tol = s.number("tol");
    return {system_field(s, "from"), system_field(s, "to"), s.count("input_depth", 12),
            s.count("depth", verify::kGraphCodeDepth), tol};
  }

  GraphSample graph_of(const GraphSpec& g, const std::string& path) const {
    const PointCloud xs = attractor_of(g.from, g.input_depth, path + ".input_depth");
    return detail::at_field(path,
                            [&] { return graph_sample(g.from, g.to, xs, g.depth, g.tol, opt_.threads); });
  }

  std::vector<double> scales_field(const detail::Section& parent, const char* key) const {
    const json& v = parent.raw(key);
    if (v.is_array()) return detail::Section::as_numbers(v, parent.at_path(key));
    const detail::Section s(v, parent.at_path(key));
    s.only({"start", "count"});
    return dyadic_scales(s.number("start"), s.count("count"));
  }

  QuantizerKind solver_field(const detail::Section& s) const {
    const std::string solver = s.text("solver", "lloyd");
    if (solver == "lloyd") return QuantizerKind::lloyd;
    if (solver == "exact") return QuantizerKind::exact_1d;
    detail::config_fail(s.at_path("solver"), "solver must be lloyd or exact");
  }

  LloydOptions lloyd_field(const detail::Section& s) const {
    LloydOptions o;
    o.max_iters = s.count("max_iters", o.max_iters);
    o.restarts = s.count("restarts", o.restarts);
    o.rel_tol = s.number("rel_tol", o.rel_tol);
    o.threads = opt_.threads;
    return o;
  }

  // ---- artifacts ---------------------------------------------------------

  void add_artifact(std::string file, std::string content) {
    artifacts_.emplace_back(std::move(file), std::move(content));
  }

  static std::string cloud_csv(const PointCloud& c, const std::vector<double>* weights = nullptr) {
    std::string out;
    for (std::size_t k = 0; k < c.dimension; ++k) out += (k ? ",x" : "x") + std::to_string(k + 1);
    if (weights) out += ",weight";
    out += '\n';
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t k = 0; k < c.dimension; ++k) {
        if (k) out += ',';
        out += format_double(c.points[i][k]);
      }
      if (weights) out += "," + format_double((*weights)[i]);
      out += '\n';
    }
    return out;
  }

  void write_artifacts() {
    std::filesystem::create_directories(opt_.out);
    std::vector<std::filesystem::path> written;
    try {
      for (const auto& [file, content] : artifacts_) {
        const std::filesystem::path target = opt_.out / file;
        const std::filesystem::path tmp = opt_.out / (file + ".partial");
        {
          std::ofstream f(tmp, std::ios::binary);
          f << content;
          if (!f) throw Error(ErrorKind::resource, "could not write " + tmp.string());
        }
        std::filesystem::rename(tmp, target);
        written.push_back(target);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) std::filesystem::remove(p, ec);
      for (const auto& [file, content] : artifacts_) {
        std::filesystem::remove(opt_.out / (file + ".partial"), ec);
      }
      throw;
    }
  }

  // ---- subcommands -------------------------------------------------------

  int solve_moran_cmd() {
    const detail::Section s = section("solve_moran");
    s.only({"ratios"});
    const auto ratios = s.numbers("ratios");
    const double v = detail::at_field(s.path(), [&] { return solve_moran(ratios); });
    add_artifact("moran.csv", "s," + format_double(v) + "\n");
    summary_.push_back("s = " + format_double(v));
    return kSuccess;
  }

  int qdim_exponent_cmd() {
    const detail::Section s = section("qdim_exponent");
    s.only({"probs", "ratios", "r"});
    const auto probs = s.numbers("probs");
    const auto ratios = s.numbers("ratios");
    const double r = s.number("r");
    const double v =
        detail::at_field(s.path(), [&] { return solve_qdim_exponent(probs, ratios, r); });
    add_artifact("qdim_exponent.csv", "l_r," + format_double(v) + "\n");
    summary_.push_back("l_r = " + format_double(v));
    return kSuccess;
  }

  int attractor_cmd() {
    const detail::Section s = section("attractor");
    s.only({"system", "depth"});
    const IFSystem sys = system_field(s, "system");
    const PointCloud cloud = attractor_of(sys, s.count("depth"), s.at_path("depth"));
    add_artifact("attractor.csv", cloud_csv(cloud));
    summary_.push_back(std::to_string(cloud.size()) + " attractor points");
    return kSuccess;
  }

  int tops_cmd() {
    const detail::Section s = section("tops");
    s.only({"system", "points", "depth", "tol"});
    const IFSystem sys = system_field(s, "system");
    const std::size_t depth = s.count("depth");
    std::optional<double> tol;
    if (s.has("tol")) tol = s.number("tol");
    const json& pts = s.raw("points");
    if (!pts.is_array()) detail::config_fail(s.at_path("points"), "expected an array of points");
    const TopsSolver solver = detail::at_field(s.path(), [&] { return TopsSolver(sys, {tol}); });
    std::string out;
    for (std::size_t k = 0; k < sys.dimension(); ++k) out += "x" + std::to_string(k + 1) + ",";
    out += "code,certified,snapped_steps\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string pp = s.at_path("points") + "[" + std::to_string(i) + "]";
      const Point x = pts[i].is_number() ? Point{pts[i].get<double>()}
                                         : detail::Section::as_numbers(pts[i], pp);
      const TopsResult t = detail::at_field(pp, [&] { return solver(x, depth); });
      for (double v : x) out += format_double(v) + ",";
      out += t.code.word.to_string() + "," + (t.certified ? "true" : "false") + "," +
             std::to_string(t.snapped_steps) + "\n";
    }
    add_artifact("tops.csv", out);
    summary_.push_back(std::to_string(pts.size()) + " addresses computed");
    return kSuccess;
  }

  int transform_graph_cmd() {
    const detail::Section s = section("transform_graph");
    s.only({"from", "to", "input_depth", "depth", "tol"});
    const GraphSample g = graph_of(graph_spec(s), s.path());
    add_artifact("graph.csv", cloud_csv(g.graph));
    summary_.push_back(std::to_string(g.graph.size()) + " graph points, " +
                       std::to_string(g.failures.size()) + " address failures");
    return g.failures.empty() ? kSuccess : kNumerical;
  }

  int chaos_game_cmd() {
    const detail::Section s = section("chaos_game");
    s.only({"system", "samples", "burn_in", "stream"});
    const EmpiricalMeasure m = chaos_measure(s);
    add_artifact("measure.csv", cloud_csv(m.cloud(), &m.weights));
    summary_.push_back(std::to_string(m.size()) + " samples");
    return kSuccess;
  }

  int quantize_cmd() {
    const detail::Section s = section("quantize");
    s.only({"measure", "n", "r", "solver", "max_iters", "restarts", "rel_tol"});
    const EmpiricalMeasure m = measure_field(s, "measure");
    const std::size_t n = s.count("n");
    const double r = s.number("r");
    Quantizer q;
    if (solver_field(s) == QuantizerKind::exact_1d) {
      q = detail::at_field(s.path(), [&] { return exact_quantize_1d(m, n, r); });
    } else {
      const std::uint64_t seed = require_seed("Lloyd quantization");
      const LloydOptions lo = lloyd_field(s);
      q = detail::at_field(s.path(), [&] { return lloyd_quantize(m, n, r, seed, lo); });
    }
    add_artifact("centers.csv", cloud_csv({m.dimension, q.centers}));
    json info = {{"n", n},
                 {"r", r},
                 {"distortion", q.distortion},
                 {"error", std::pow(q.distortion, 1.0 / r)},
                 {"mesh", quantizer_mesh(m, q.centers)},
                 {"converged", q.converged},
                 {"iterations", q.iterations},
                 {"restart", q.restart},
                 {"history", q.history}};
    add_artifact("quantizer.json", info.dump(2) + "\n");
    summary_.push_back("distortion = " + format_double(q.distortion));
    return kSuccess;
  }

  int estimate_qdim_cmd() {
    const detail::Section s = section("estimate_qdim");
    s.only({"measure", "r", "n_grid", "solver", "discard_first", "max_iters", "restarts",
            "rel_tol"});
    const EmpiricalMeasure m = measure_field(s, "measure");
    QDimOptions o;
    o.solver = solver_field(s);
    o.discard_first = s.flag("discard_first", true);
    o.lloyd = lloyd_field(s);
    const std::uint64_t seed = o.solver == QuantizerKind::lloyd ? require_seed("Lloyd quantization")
                                                                : 0;
    const double r = s.number("r");
    const auto grid = s.counts("n_grid");
    const QDimFit fit = detail::at_field(s.path(), [&] { return estimate_qdim(m, r, grid, seed, o); });
    std::string csv = "n,e_n,log_n,neg_log_e_n\n";
    for (std::size_t k = 0; k < fit.n_grid.size(); ++k) {
      csv += std::to_string(fit.n_grid[k]) + "," + format_double(fit.errors[k]) + "," +
             format_double(std::log(static_cast<double>(fit.n_grid[k]))) + "," +
             format_double(-std::log(fit.errors[k])) + "\n";
    }
    add_artifact("qdim_fit.csv", csv);
    add_artifact("qdim_slope.csv", "slope," + format_double(fit.slope) + "\nr_squared," +
                                       format_double(fit.r_squared) + "\n");
    summary_.push_back("slope = " + format_double(fit.slope) +
                       " (r^2 = " + format_double(fit.r_squared) + ")");
    return kSuccess;
  }

  PointCloud cloud_field(const detail::Section& parent, const char* key) const {
    const detail::Section s = parent.object(key);
    const std::string kind = s.text("kind");
    if (kind == "attractor") {
      s.only({"kind", "system", "depth"});
      return attractor_of(system_field(s, "system"), s.count("depth"), s.at_path("depth"));
    }
    if (kind == "graph") {
      s.only({"kind", "from", "to", "input_depth", "depth", "tol"});
      const GraphSample g = graph_of(graph_spec(s), s.path());
      if (!g.failures.empty()) {
        throw Error(ErrorKind::address_failure,
                    std::to_string(g.failures.size()) + " graph points failed to address");
      }
      return g.graph;
    }
    if (kind == "chaos-game") {
      s.only({"kind", "system", "samples", "burn_in", "stream"});
      return chaos_measure(s).cloud();
    }
    detail::config_fail(s.at_path("kind"), "cloud kind must be attractor, graph or chaos-game");
  }

  int box_dim_cmd() {
    const detail::Section s = section("box_dim");
    s.only({"cloud", "scales"});
    const PointCloud cloud = cloud_field(s, "cloud");
    const auto scales = scales_field(s, "scales");
    const BoxCountFit fit =
        detail::at_field(s.path(), [&] { return box_dimension_estimate(cloud, scales); });
    std::string csv = "delta,count,neg_log_delta,log_count\n";
    for (std::size_t k = 0; k < fit.scales.size(); ++k) {
      csv += format_double(fit.scales[k]) + "," + std::to_string(fit.counts[k]) + "," +
             format_double(-std::log(fit.scales[k])) + "," +
             format_double(std::log(static_cast<double>(fit.counts[k]))) + "\n";
    }
    add_artifact("box_counts.csv", csv);
    add_artifact("box_fit.csv", "slope," + format_double(fit.slope) + "\nr_squared," +
                                    format_double(fit.r_squared) + "\n");
    summary_.push_back("box slope = " + format_double(fit.slope));
    return kSuccess;
  }

  int report_cmd() {
    const detail::Section s = section("report");
    s.only({"systems", "r", "empirical", "attractor_box", "graph"});
    const double r = s.number("r", 2.0);
    json out = {{"schema_version", kSchemaVersion}, {"r", r}, {"systems", json::array()}};
    bool verdicts_ok = true;

    const json& names = s.raw("systems");
    if (!names.is_array()) detail::config_fail(s.at_path("systems"), "expected an array");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string path = s.at_path("systems") + "[" + std::to_string(i) + "]";
      const IFSystem sys = names[i].is_string() ? resolve_system(names[i].get<std::string>(), path)
                                                : parse_system(names[i], path, "system" + std::to_string(i));
      const DimensionReport rep = detail::at_field(path, [&] { return dimension_report(sys, r); });
      json bounds = {{"moran_lower", rep.moran_lower}, {"moran_upper", rep.moran_upper}};
      if (rep.qdim_lower) {
        bounds["qdim_lower"] = *rep.qdim_lower;
        bounds["qdim_upper"] = *rep.qdim_upper;
      }
      json estimates = json::object();
      if (s.has("attractor_box")) {
        const detail::Section b = s.object("attractor_box");
        b.only({"depth", "scales"});
        const PointCloud cloud = attractor_of(sys, b.count("depth"), b.at_path("depth"));
        const auto scales = scales_field(b, "scales");
        const BoxCountFit fit =
            detail::at_field(b.path(), [&] { return box_dimension_estimate(cloud, scales); });
        estimates["box_dimension"] = fit.slope;
        estimates["box_r_squared"] = fit.r_squared;
      }
      if (s.has("empirical") && sys.probs()) {
        const detail::Section e = s.object("empirical");
        e.only({"samples", "n_grid", "tolerance"});
        const std::size_t n = e.count("samples");
        check_samples(n, e.at_path("samples"));
        const std::uint64_t seed = require_seed("empirical quantization estimates");
        const auto grid = e.counts("n_grid");
        QDimOptions o;
        o.lloyd.threads = opt_.threads;
        const QDimFit fit = detail::at_field(e.path(), [&] {
          return estimate_qdim(chaos_game(sys, n, kDefaultBurnIn, seed), r, grid, seed, o);
        });
        const double tol = e.number("tolerance", 0.08);
        const bool inside = fit.slope >= *rep.qdim_lower - tol && fit.slope <= *rep.qdim_upper + tol;
        verdicts_ok = verdicts_ok && inside;
        estimates["quantization_dimension"] = fit.slope;
        estimates["quantization_r_squared"] = fit.r_squared;
        estimates["quantization_within_bounds"] = inside;
      }
      out["systems"].push_back({{"name", rep.system},
                                {"separation", to_string(rep.separation)},
                                {"bounds", bounds},
                                {"estimates", estimates}});
    }

    if (s.has("graph")) {
      const detail::Section g = s.object("graph");
      g.only({"from", "to", "input_depth", "depth", "tol", "scales", "tolerance"});
      const GraphSpec spec = graph_spec(g);
      const ExponentBounds b =
          detail::at_field(g.path(), [&] { return graph_dim_bounds(spec.from, spec.to); });
      const GraphSample gs = graph_of(spec, g.path());
      const auto scales = g.has("scales") ? scales_field(g, "scales") : dyadic_scales(0.25, 5);
      const BoxCountFit fit =
          detail::at_field(g.path(), [&] { return box_dimension_estimate(gs.graph, scales); });
      const double tol = g.number("tolerance", 0.08);
      const bool inside = gs.failures.empty() && fit.slope >= b.lower - tol &&
                          fit.slope <= b.upper + tol;
      verdicts_ok = verdicts_ok && inside;
      out["graph"] = {{"from", spec.from.name()},
                      {"to", spec.to.name()},
                      {"bounds", {{"s1", b.lower}, {"s2", b.upper}}},
                      {"estimates", {{"box_dimension", fit.slope}, {"box_r_squared", fit.r_squared}}},
                      {"address_failures", gs.failures.size()},
                      {"tolerance", tol},
                      {"contained", inside}};
      summary_.push_back("graph box estimate " + format_double(fit.slope) + " vs [" +
                         format_double(b.lower) + ", " + format_double(b.upper) + "]: " +
                         (inside ? "contained" : "NOT contained"));
    }
    out["verdicts_ok"] = verdicts_ok;
    add_artifact("report.json", out.dump(2) + "\n");
    summary_.push_back(std::string("report written, verdicts ") + (verdicts_ok ? "ok" : "failed"));
    return verdicts_ok || !opt_.strict ? kSuccess : kNumerical;
  }

  int verify_cmd(std::ostream& log) {
    std::vector<int> only;
    if (config_.contains("verify")) {
      const detail::Section s = section("verify");
      s.only({"criteria"});
      if (s.has("criteria")) {
        for (std::size_t id : s.counts("criteria")) only.push_back(static_cast<int>(id));
      }
    }
    verify::Options o;
    if (opt_.seed) o.seed = *opt_.seed;
    o.threads = opt_.threads;
    std::string csv = "id,name,passed,seconds,detail\n";
    int failed = 0;
    for (const auto& c : verify::all_criteria()) {
      if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
      const verify::CriterionResult res = verify::run_criterion(c, o);
      log << verify::format_line(res) << '\n';
      csv += std::to_string(res.id) + "," + res.name + "," + (res.passed ? "true" : "false") +
             "," + format_double(res.seconds) + ",\"" + res.detail + "\"\n";
      if (!res.passed) ++failed;
    }
    add_artifact("verify.csv", csv);
    summary_.push_back(std::to_string(failed) + " criteria failed");
    return failed == 0 ? kSuccess : kNumerical;
  }

  json config_;
  RunOptions opt_;
  std::map<std::string, IFSystem> systems_;
  std::size_t max_points_ = kDefaultPointBudget;
  std::size_t max_samples_ = kMaxChaosSamples;
  std::vector<std::pair<std::string, std::string>> artifacts_;
  std::vector<std::string> summary_;
};

/// Parses, validates and runs; returns the process exit code and reports
/// errors on `err`. Nothing is written unless the command succeeds.
inline int run_subcommand(const std::string& name, const json& config, const RunOptions& options,
                          std::ostream& log, std::ostream& err) {
  try {
    if (std::find(subcommands().begin(), subcommands().end(), name) == subcommands().end()) {
      throw Error(ErrorKind::invalid_input, "unknown subcommand '" + name + "'");
    }
    Run run(config, options);
    return run.execute(name, log);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kBudget;
  }
}

inline json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, "config " + path.string() + ": " + e.what());
  }
}

}  // namespace ifsq::harness
