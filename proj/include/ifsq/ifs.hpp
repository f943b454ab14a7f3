#pragma once

// Contraction maps with certified bi-Lipschitz constants, iterated function
// systems, attractor approximation and the product/refinement constructions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifsq/code_space.hpp"
#include "ifsq/detail/parallel.hpp"
#include "ifsq/error.hpp"
#include "ifsq/geometry.hpp"

namespace ifsq {

enum class MapKind { similarity, affine, general };

inline const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::similarity: return "similarity";
    case MapKind::affine: return "affine";
    case MapKind::general: return "general";
  }
  return "general";
}

using MapFn = std::function<Point(const Point&)>;

/// x -> linear * x + offset.
struct AffinePart {
  Eigen::MatrixXd linear;
  Eigen::VectorXd offset;
};

/// A contraction f with s|x-y| <= |f(x)-f(y)| <= c|x-y|, 0 < s <= c < 1.
class ContractionMap {
 public:
  /// Lipschitz constants are the extreme singular values of `linear`.
  static ContractionMap affine(Eigen::MatrixXd linear, Eigen::VectorXd offset) {
    detail::require_input(linear.rows() == linear.cols() && linear.rows() == offset.size() &&
                              linear.rows() > 0,
                          "affine map needs a square matrix matching the offset");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(linear);
    const auto& sv = svd.singularValues();
    return from_affine({std::move(linear), std::move(offset)}, sv.minCoeff(), sv.maxCoeff());
  }

  static ContractionMap affine_1d(double slope, double offset) {
    Eigen::MatrixXd a(1, 1);
    a(0, 0) = slope;
    Eigen::VectorXd b(1);
    b(0) = offset;
    return affine(std::move(a), std::move(b));
  }

  /// x -> ratio * x + offset in any dimension.
  static ContractionMap similarity(double ratio, Point offset) {
    const auto d = static_cast<Eigen::Index>(offset.size());
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(offset.data(), d);
    return affine(ratio * Eigen::MatrixXd::Identity(d, d), std::move(b));
  }

  /// A black-box map; the caller certifies the Lipschitz constants.
  static ContractionMap general(std::size_t dimension, MapFn forward, std::optional<MapFn> inverse,
                                double lower_lip, double upper_lip) {
    ContractionMap m;
    m.dimension_ = dimension;
    m.forward_ = std::move(forward);
    if (inverse) m.inverse_ = std::move(*inverse);
    m.lower_ = lower_lip;
    m.upper_ = upper_lip;
    m.kind_ = MapKind::general;
    m.check_constants();
    return m;
  }

  Point operator()(const Point& x) const {
    if (affine_) {
      Point y(dimension_);
      Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(dimension_)) =
          affine_->linear *
              Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(dimension_)) +
          affine_->offset;
      return y;
    }
    return forward_(x);
  }

  bool has_inverse() const noexcept { return affine_ != nullptr || static_cast<bool>(inverse_); }

  Point inverse(const Point& y) const {
    if (affine_) {
      const auto d = static_cast<Eigen::Index>(dimension_);
      Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(y.data(), d) - affine_->offset;
      Point x(dimension_);
      Eigen::Map<Eigen::VectorXd>(x.data(), d) = affine_->linear.partialPivLu().solve(rhs);
      return x;
    }
    detail::require(static_cast<bool>(inverse_), ErrorKind::unsupported_input,
                    "map has no inverse");
    return inverse_(y);
  }

  /// Fixed point: exact linear solve for affine maps, iteration otherwise.
  Point fixed_point(const Point& start) const {
    if (affine_) {
      const auto d = static_cast<Eigen::Index>(dimension_);
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) - affine_->linear;
      Point x(dimension_);
      Eigen::Map<Eigen::VectorXd>(x.data(), d) = m.partialPivLu().solve(affine_->offset);
      return x;
    }
    Point x = start;
    for (int it = 0; it < 10000; ++it) {
      Point next = (*this)(x);
      const double step = euclidean_distance(next, x);
      x = std::move(next);
      if (step <= 1e-17) break;
    }
    return x;
  }

  /// this o inner. Constants multiply.
  ContractionMap compose(const ContractionMap& inner) const {
    detail::require_input(inner.dimension_ == dimension_, "composition dimension mismatch");
    ContractionMap m;
    m.dimension_ = dimension_;
    m.lower_ = lower_ * inner.lower_;
    m.upper_ = upper_ * inner.upper_;
    if (affine_ && inner.affine_) {
      m.affine_ = std::make_shared<AffinePart>(
          AffinePart{affine_->linear * inner.affine_->linear,
                     affine_->linear * inner.affine_->offset + affine_->offset});
      m.kind_ = (kind_ == MapKind::similarity && inner.kind_ == MapKind::similarity)
                    ? MapKind::similarity
                    : MapKind::affine;
    } else {
      const ContractionMap outer = *this;
      const ContractionMap in = inner;
      m.forward_ = [outer, in](const Point& x) { return outer(in(x)); };
      if (has_inverse() && inner.has_inverse()) {
        m.inverse_ = [outer, in](const Point& y) { return in.inverse(outer.inverse(y)); };
      }
      m.kind_ = MapKind::general;
    }
    return m;
  }

  /// (x, y) -> (a(x), b(y)). Constants are min/max of the factors, valid for
  /// both the max metric and the Euclidean product norm.
  static ContractionMap product(const ContractionMap& a, const ContractionMap& b) {
    ContractionMap m;
    m.dimension_ = a.dimension_ + b.dimension_;
    m.lower_ = std::min(a.lower_, b.lower_);
    m.upper_ = std::max(a.upper_, b.upper_);
    const auto da = static_cast<Eigen::Index>(a.dimension_);
    const auto db = static_cast<Eigen::Index>(b.dimension_);
    if (a.affine_ && b.affine_) {
      Eigen::MatrixXd lin = Eigen::MatrixXd::Zero(da + db, da + db);
      lin.topLeftCorner(da, da) = a.affine_->linear;
      lin.bottomRightCorner(db, db) = b.affine_->linear;
      Eigen::VectorXd off(da + db);
      off << a.affine_->offset, b.affine_->offset;
      m.affine_ = std::make_shared<AffinePart>(AffinePart{std::move(lin), std::move(off)});
      m.kind_ = (a.kind_ == MapKind::similarity && b.kind_ == MapKind::similarity &&
                 std::abs(a.upper_ - b.upper_) <= 1e-12)
                    ? MapKind::similarity
                    : MapKind::affine;
    } else {
      const std::size_t split = a.dimension_;
      auto split_apply = [split](const ContractionMap& fa, const ContractionMap& fb, bool inv) {
        return [fa, fb, split, inv](const Point& z) {
          Point x(z.begin(), z.begin() + static_cast<long>(split));
          Point y(z.begin() + static_cast<long>(split), z.end());
          Point fx = inv ? fa.inverse(x) : fa(x);
          Point fy = inv ? fb.inverse(y) : fb(y);
          fx.insert(fx.end(), fy.begin(), fy.end());
          return fx;
        };
      };
      m.forward_ = split_apply(a, b, false);
      if (a.has_inverse() && b.has_inverse()) m.inverse_ = split_apply(a, b, true);
      m.kind_ = (a.kind_ == MapKind::similarity && b.kind_ == MapKind::similarity &&
                 std::abs(a.upper_ - b.upper_) <= 1e-12)
                    ? MapKind::similarity
                    : MapKind::general;
    }
    return m;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  double lower_lip() const noexcept { return lower_; }
  double upper_lip() const noexcept { return upper_; }
  MapKind kind() const noexcept { return kind_; }
  const AffinePart* affine_part() const noexcept { return affine_.get(); }

  /// Max |inverse(forward(x)) - x| over the given samples.
  double inverse_defect(std::span<const Point> samples) const {
    double worst = 0.0;
    for (const Point& x : samples) worst = std::max(worst, euclidean_distance(inverse((*this)(x)), x));
    return worst;
  }

 private:
  ContractionMap() = default;

  static ContractionMap from_affine(AffinePart part, double lower, double upper) {
    ContractionMap m;
    m.dimension_ = static_cast<std::size_t>(part.linear.rows());
    m.lower_ = lower;
    m.upper_ = upper;
    m.kind_ = std::abs(upper - lower) <= 1e-12 * std::max(1.0, upper) ? MapKind::similarity
                                                                       : MapKind::affine;
    if (m.kind_ == MapKind::similarity) m.lower_ = m.upper_;
    m.affine_ = std::make_shared<AffinePart>(std::move(part));
    m.check_constants();
    return m;
  }

  void check_constants() const {
    detail::require_input(lower_ > 0.0 && lower_ <= upper_ && upper_ < 1.0,
                          "Lipschitz constants must satisfy 0 < lower <= upper < 1 (got " +
                              std::to_string(lower_) + ", " + std::to_string(upper_) + ")");
  }

  std::size_t dimension_ = 1;
  MapFn forward_;
  MapFn inverse_;
  std::shared_ptr<const AffinePart> affine_;
  double lower_ = 0.5;
  double upper_ = 0.5;
  MapKind kind_ = MapKind::general;
};

enum class Separation { none, osc, sosc, ssc };

inline const char* to_string(Separation s) {
  switch (s) {
    case Separation::none: return "none";
    case Separation::osc: return "OSC";
    case Separation::sosc: return "SOSC";
    case Separation::ssc: return "SSC";
  }
  return "none";
}

/// Metric under which stored product constants are certified.
enum class ProductMetric { euclidean, max };

/// An IFS, optionally weighted, with a user-declared separation condition and
/// an optional bounding box of the attractor.
class IFSystem {
 public:
  IFSystem(std::vector<ContractionMap> maps, std::optional<std::vector<double>> probs = {},
           Separation separation = Separation::none, std::optional<Box> hull = {},
           std::string name = {})
      : maps_(std::move(maps)),
        probs_(std::move(probs)),
        separation_(separation),
        hull_(std::move(hull)),
        name_(std::move(name)) {
    detail::require_input(maps_.size() >= 2, "an IFS needs at least 2 maps");
    dimension_ = maps_.front().dimension();
    for (const auto& m : maps_) {
      detail::require_input(m.dimension() == dimension_, "maps have different dimensions");
    }
    if (probs_) {
      detail::require_input(probs_->size() == maps_.size(),
                            "probability vector length differs from map count");
      validate_probability_vector(*probs_);
    }
    if (hull_) {
      detail::require_input(hull_->dimension() == dimension_, "hull dimension mismatch");
      for (const auto& m : maps_) {
        for (const Point& corner : hull_->corners()) {
          detail::require_input(hull_->contains(m(corner), 1e-9),
                                "a map sends a hull corner outside the hull");
        }
      }
    }
  }

  const std::vector<ContractionMap>& maps() const noexcept { return maps_; }
  const ContractionMap& map(std::size_t i) const { return maps_.at(i); }
  std::size_t size() const noexcept { return maps_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::optional<std::vector<double>>& probs() const noexcept { return probs_; }
  Separation declared_separation() const noexcept { return separation_; }
  const std::optional<Box>& hull() const noexcept { return hull_; }
  const std::string& name() const noexcept { return name_; }
  ProductMetric metric() const noexcept { return metric_; }

  IFSystem& set_metric(ProductMetric m) {
    metric_ = m;
    return *this;
  }

  const std::vector<double>& require_probs() const {
    detail::require_input(probs_.has_value(), "system '" + name_ + "' carries no probabilities");
    return *probs_;
  }

  std::vector<double> lower_lips() const {
    std::vector<double> out;
    for (const auto& m : maps_) out.push_back(m.lower_lip());
    return out;
  }

  std::vector<double> upper_lips() const {
    std::vector<double> out;
    for (const auto& m : maps_) out.push_back(m.upper_lip());
    return out;
  }

  double max_upper_lip() const {
    double c = 0.0;
    for (const auto& m : maps_) c = std::max(c, m.upper_lip());
    return c;
  }

  bool all_affine() const {
    return std::all_of(maps_.begin(), maps_.end(),
                       [](const ContractionMap& m) { return m.affine_part() != nullptr; });
  }

  bool all_similarities() const {
    return std::all_of(maps_.begin(), maps_.end(),
                       [](const ContractionMap& m) { return m.kind() == MapKind::similarity; });
  }

  /// A point inside the hull (its center), or the origin without a hull.
  Point default_seed() const { return hull_ ? hull_->center() : Point(dimension_, 0.0); }

 private:
  std::vector<ContractionMap> maps_;
  std::size_t dimension_ = 1;
  std::optional<std::vector<double>> probs_;
  Separation separation_ = Separation::none;
  std::optional<Box> hull_;
  std::string name_;
  ProductMetric metric_ = ProductMetric::euclidean;
};

/// f_{w1} o f_{w2} o ... o f_{wk}(x).
inline Point apply_word(const IFSystem& ifs, const Word& w, const Point& x) {
  detail::require_input(static_cast<std::size_t>(w.alphabet_size()) == ifs.size(),
                        "word alphabet differs from map count");
  detail::require_input(x.size() == ifs.dimension(), "point dimension mismatch");
  Point y = x;
  for (std::size_t k = w.size(); k-- > 0;) y = ifs.map(static_cast<std::size_t>(w[k] - 1))(y);
  return y;
}

struct AddressPoint {
  Point point;
  /// Distance bound to the true image of the infinite code; empty without a hull.
  std::optional<double> error_bound;
};

/// Evaluates the address map at finite depth. The bound is the product of the
/// upper constants along the word times diam(hull), which never exceeds
/// (max upper)^K * diam(hull).
inline AddressPoint address_point(const IFSystem& ifs, const CodePrefix& code, const Point& x0) {
  if (ifs.hull()) {
    detail::require_input(ifs.hull()->contains(x0, 1e-9), "seed point lies outside the hull");
  }
  AddressPoint out{apply_word(ifs, code.word, x0), std::nullopt};
  if (ifs.hull()) out.error_bound = word_product(code.word, ifs.upper_lips()) * ifs.hull()->diameter();
  return out;
}

/// The image of the code's constant tail: fixed point of the tail map.
inline Point tail_fixed_point(const IFSystem& ifs, const CodePrefix& code) {
  return ifs.map(static_cast<std::size_t>(code.tail_symbol() - 1)).fixed_point(ifs.default_seed());
}

inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

/// { f_w(seed) : |w| = depth } in lexicographic word order.
inline PointCloud attractor_sample(const IFSystem& ifs, std::size_t depth, const Point& seed,
                                   std::size_t budget = kDefaultPointBudget) {
  detail::require_input(depth >= 1, "depth must be at least 1");
  detail::require_input(seed.size() == ifs.dimension(), "seed dimension mismatch");
  const double total = std::pow(static_cast<double>(ifs.size()), static_cast<double>(depth));
  detail::require(total <= static_cast<double>(budget), ErrorKind::resource,
                  "attractor sample of " + std::to_string(total) + " points exceeds cap " +
                      std::to_string(budget));
  std::vector<Point> level{seed};
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<Point> next;
    next.reserve(level.size() * ifs.size());
    for (const auto& f : ifs.maps()) {
      for (const Point& y : level) next.push_back(f(y));
    }
    level = std::move(next);
  }
  return {ifs.dimension(), std::move(level)};
}

namespace detail {

inline double directed_hausdorff(const PointCloud& from, const PointCloud& to,
                                 std::size_t threads) {
  std::vector<double> nearest(from.size());
  parallel_for(from.size(), threads, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : to.points) best = std::min(best, squared_distance(from.points[i], q));
    nearest[i] = best;
  });
  return std::sqrt(*std::max_element(nearest.begin(), nearest.end()));
}

}  // namespace detail

/// Euclidean Hausdorff distance between two finite clouds.
inline double hausdorff_distance(const PointCloud& a, const PointCloud& b, std::size_t threads = 1) {
  detail::require_input(!a.empty() && !b.empty(), "Hausdorff distance of an empty cloud");
  detail::require_input(a.dimension == b.dimension, "cloud dimension mismatch");
  return std::max(detail::directed_hausdorff(a, b, threads),
                  detail::directed_hausdorff(b, a, threads));
}

/// h_i(x, y) = (f_i(x), g_i(y)) under the max metric.
inline IFSystem diagonal_product(const IFSystem& f, const IFSystem& g) {
  detail::require_input(f.size() == g.size(), "diagonal product needs equal map counts");
  std::vector<ContractionMap> maps;
  for (std::size_t i = 0; i < f.size(); ++i) {
    maps.push_back(ContractionMap::product(f.map(i), g.map(i)));
  }
  std::optional<Box> hull;
  if (f.hull() && g.hull()) hull = f.hull()->times(*g.hull());
  IFSystem h(std::move(maps), f.probs(), f.declared_separation(), std::move(hull),
             f.name() + "(x)" + g.name());
  h.set_metric(ProductMetric::max);
  return h;
}

/// Psi_ij(x, y) = (f_i(x), g_j(y)) with weights p_i q_j, (i, j) lexicographic.
inline IFSystem full_product(const IFSystem& f, const IFSystem& g) {
  detail::require_input(f.probs() && g.probs(), "full product needs two weighted systems");
  std::vector<ContractionMap> maps;
  std::vector<double> probs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      maps.push_back(ContractionMap::product(f.map(i), g.map(j)));
      probs.push_back((*f.probs())[i] * (*g.probs())[j]);
    }
  }
  // Rounding of the products can push the sum a few ulps off 1.
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  std::optional<Box> hull;
  if (f.hull() && g.hull()) hull = f.hull()->times(*g.hull());
  const Separation sep = std::min(f.declared_separation(), g.declared_separation());
  return IFSystem(std::move(maps), std::move(probs), sep, std::move(hull),
                  f.name() + "x" + g.name());
}

/// The system { f_i o f_sigma : |i| = m } with weights p_i. When `sigma` is a
/// strong-open-set witness the refined system is declared SSC.
inline IFSystem refine_ifs(const IFSystem& ifs, const Word& sigma, std::size_t m,
                           bool sigma_is_sosc_witness = false,
                           std::size_t budget = kDefaultPointBudget) {
  const auto& probs = ifs.require_probs();
  detail::require_input(m >= 1, "refinement depth must be at least 1");
  const double total = std::pow(static_cast<double>(ifs.size()), static_cast<double>(m));
  detail::require(total <= static_cast<double>(budget), ErrorKind::resource,
                  "refinement with " + std::to_string(total) + " maps exceeds cap " +
                      std::to_string(budget));
  const int n = static_cast<int>(ifs.size());

  auto word_map = [&](const Word& w) -> std::optional<ContractionMap> {
    std::optional<ContractionMap> out;
    for (int s : w.symbols()) {
      const ContractionMap& f = ifs.map(static_cast<std::size_t>(s - 1));
      out = out ? out->compose(f) : f;
    }
    return out;
  };

  const std::optional<ContractionMap> f_sigma = word_map(sigma);
  std::vector<ContractionMap> maps;
  std::vector<double> weights;
  for (const Word& w : all_words(n, m)) {
    ContractionMap g = *word_map(w);
    if (f_sigma) g = g.compose(*f_sigma);
    maps.push_back(std::move(g));
    weights.push_back(word_product(w, probs));
  }
  double sum = 0.0;
  for (double p : weights) sum += p;
  for (double& p : weights) p /= sum;
  const Separation sep = sigma_is_sosc_witness ? Separation::ssc : ifs.declared_separation();
  return IFSystem(std::move(maps), std::move(weights), sep, ifs.hull(),
                  ifs.name() + "/refined");
}

enum class IntervalSeparation { ssc, osc_touching, overlapping };

inline const char* to_string(IntervalSeparation s) {
  switch (s) {
    case IntervalSeparation::ssc: return "SSC";
    case IntervalSeparation::osc_touching: return "OSC-touching";
    case IntervalSeparation::overlapping: return "overlapping";
  }
  return "overlapping";
}

/// Image intervals f_i(hull) of a 1-D affine system.
inline std::vector<std::pair<double, double>> image_intervals(const IFSystem& ifs) {
  detail::require(ifs.dimension() == 1 && ifs.all_affine() && ifs.hull().has_value(),
                  ErrorKind::unsupported_input, "needs a 1-D affine system with a hull");
  std::vector<std::pair<double, double>> out;
  const double a = ifs.hull()->lower[0];
  const double b = ifs.hull()->upper[0];
  for (const auto& f : ifs.maps()) {
    const double fa = f({a})[0];
    const double fb = f({b})[0];
    out.emplace_back(std::min(fa, fb), std::max(fa, fb));
  }
  return out;
}

/// Classifies the image intervals of the hull: pairwise disjoint, touching at
/// endpoints only, or overlapping.
inline IntervalSeparation check_interval_separation(const IFSystem& ifs, double tol = 1e-12) {
  auto images = image_intervals(ifs);
  std::sort(images.begin(), images.end());
  bool touching = false;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      const double overlap = std::min(images[i].second, images[j].second) -
                             std::max(images[i].first, images[j].first);
      if (overlap > tol) return IntervalSeparation::overlapping;
      if (overlap >= -tol) touching = true;
    }
  }
  return touching ? IntervalSeparation::osc_touching : IntervalSeparation::ssc;
}

namespace builtin {

/// {x/2, x/2 + 1/2} on [0, 1].
inline IFSystem binary(std::vector<double> probs = {0.5, 0.5}) {
  return IFSystem({ContractionMap::affine_1d(0.5, 0.0), ContractionMap::affine_1d(0.5, 0.5)},
                  std::move(probs), Separation::osc, Box::interval(0.0, 1.0), "binary");
}

/// Middle-third Cantor system {x/3, x/3 + 2/3} on [0, 1].
inline IFSystem cantor3(std::vector<double> probs = {0.5, 0.5}) {
  return IFSystem(
      {ContractionMap::affine_1d(1.0 / 3.0, 0.0), ContractionMap::affine_1d(1.0 / 3.0, 2.0 / 3.0)},
      std::move(probs), Separation::ssc, Box::interval(0.0, 1.0), "cantor3");
}

/// {y/3, 2y/3 + 1/3} on [0, 1]; images touch at 1/3.
inline IFSystem third_two_thirds(std::vector<double> probs = {0.5, 0.5}) {
  return IFSystem({ContractionMap::affine_1d(1.0 / 3.0, 0.0),
                   ContractionMap::affine_1d(2.0 / 3.0, 1.0 / 3.0)},
                  std::move(probs), Separation::osc, Box::interval(0.0, 1.0), "third-two-thirds");
}

// x -> offset + 0.33 x + a sin(2 pi x), a = 0.03 / (2 pi); derivative in [0.30, 0.36].
inline ContractionMap perturbed_map(double offset) {
  constexpr double kSlope = 0.33;
  constexpr double kAmp = 0.03 / (2.0 * std::numbers::pi);
  auto f = [offset](double x) {
    return offset + kSlope * x + kAmp * std::sin(2.0 * std::numbers::pi * x);
  };
  MapFn forward = [f](const Point& x) { return Point{f(x[0])}; };
  MapFn inverse = [f, offset](const Point& y) {
    double lo = (y[0] - offset - kAmp) / kSlope;
    double hi = (y[0] - offset + kAmp) / kSlope;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) < y[0] ? lo : hi) = mid;
    }
    return Point{0.5 * (lo + hi)};
  };
  return ContractionMap::general(1, std::move(forward), std::move(inverse), 0.30, 0.36);
}

/// Two increasing bi-Lipschitz maps of [0, 1] with certified s = 0.30,
/// c = 0.36 and disjoint images [0, 0.33] and [0.67, 1].
inline IFSystem perturbed_cantor(std::vector<double> probs = {0.5, 0.5}) {
  return IFSystem({perturbed_map(0.0), perturbed_map(0.67)}, std::move(probs),
                  Separation::ssc, Box::interval(0.0, 1.0), "perturbed-cantor");
}

}  // namespace builtin
}  // namespace ifsq
