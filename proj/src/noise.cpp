#include "blowup/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace blowup {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

BrownianPath::BrownianPath(std::uint64_t seed, double horizon, int max_depth)
    : seed_(seed), horizon_(horizon), max_depth_(max_depth) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("BrownianPath: horizon must be positive and finite");
  }
  if (max_depth < 1 || max_depth > kMaxSupportedDepth) {
    throw std::invalid_argument("BrownianPath: max_depth out of range");
  }
  node_sd_[0] = std::sqrt(horizon);
  for (int d = 1; d <= max_depth_; ++d) {
    node_sd_[d] = std::sqrt(std::ldexp(horizon, -(d + 1)));
  }
}

double BrownianPath::gaussian(int component, int depth, std::uint64_t index) const {
  // Components use disjoint key spaces (top bits), so their streams never
  // share a hash input.
  const std::uint64_t key = (static_cast<std::uint64_t>(component) << 62) ^ (index << 6) ^
                            static_cast<std::uint64_t>(depth);
  const std::uint64_t h = mix64(seed_ ^ mix64(key));
  const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  return inverse_normal_cdf(u);
}

double BrownianPath::midpoint(int component, int depth, std::uint64_t index, double left,
                              double right) const {
  return 0.5 * (left + right) + node_sd_[depth] * gaussian(component, depth, index);
}

// Brings the cursor's bracket at `depth` to [position, position + 1].
void BrownianPath::descend(int component, int depth, std::uint64_t position,
                           Cursor& cursor) const {
  if (cursor.owner_ != this || cursor.component_ != component) {
    cursor.owner_ = this;
    cursor.component_ = component;
    cursor.valid_depth_ = -1;
  }
  if (cursor.valid_depth_ < 0) {
    cursor.index_[0] = 0;
    cursor.left_[0] = 0.0;
    cursor.right_[0] = node_sd_[0] * gaussian(component, 0, 1);
    cursor.valid_depth_ = 0;
  }
  int d = std::min(cursor.valid_depth_, depth);
  while (d > 0 && cursor.index_[d] != (position >> (depth - d))) --d;
  for (; d < depth; ++d) {
    const std::uint64_t a = cursor.index_[d];
    const double mid =
        midpoint(component, d + 1, 2 * a + 1, cursor.left_[d], cursor.right_[d]);
    const bool right_half = ((position >> (depth - d - 1)) & 1ULL) != 0;
    cursor.index_[d + 1] = 2 * a + (right_half ? 1 : 0);
    cursor.left_[d + 1] = right_half ? mid : cursor.left_[d];
    cursor.right_[d + 1] = right_half ? cursor.right_[d] : mid;
  }
  cursor.valid_depth_ = depth;
}

double BrownianPath::sample(int component, double t) const {
  Cursor cursor;
  return sample(component, t, cursor);
}

double BrownianPath::sample(int component, double t, Cursor& cursor) const {
  if (component != 1 && component != 2) {
    throw std::invalid_argument("BrownianPath: component must be 1 or 2");
  }
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::out_of_range("BrownianPath: t = " + std::to_string(t) + " outside [0, " +
                            std::to_string(horizon_) + "]");
  }
  if (t == 0.0) return 0.0;
  const std::uint64_t cells = 1ULL << max_depth_;
  const double s = std::ldexp(t / horizon_, max_depth_);
  std::uint64_t k = static_cast<std::uint64_t>(s);
  if (k >= cells) k = cells - 1;
  const double frac = s - static_cast<double>(k);
  descend(component, max_depth_, k, cursor);
  const double left = cursor.left_[max_depth_];
  const double right = cursor.right_[max_depth_];
  if (frac == 0.0) return left;
  if (frac == 1.0) return right;
  return left + frac * (right - left);
}

double BrownianPath::node(int component, int depth, std::uint64_t index) const {
  if (depth < 0 || depth > max_depth_) {
    throw std::out_of_range("BrownianPath::node: depth out of range");
  }
  const std::uint64_t cells = 1ULL << depth;
  if (index > cells) throw std::out_of_range("BrownianPath::node: index out of range");
  if (index == 0) return 0.0;
  Cursor cursor;
  if (index == cells) {
    descend(component, depth, cells - 1, cursor);
    return cursor.right_[depth];
  }
  descend(component, depth, index, cursor);
  return cursor.left_[depth];
}

std::vector<double> BrownianPath::grid_values(int component, int depth, double t_end) const {
  if (depth < 0 || depth > max_depth_) {
    throw std::out_of_range("BrownianPath::grid_values: depth out of range");
  }
  if (!(t_end >= 0.0 && t_end <= horizon_)) {
    throw std::out_of_range("BrownianPath::grid_values: t_end outside [0, horizon]");
  }
  const std::uint64_t last =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(std::ldexp(t_end / horizon_, depth)),
                              1ULL << depth);
  // Level-by-level refinement over the needed prefix only.
  std::vector<double> level{0.0, node_sd_[0] * gaussian(component, 0, 1)};
  for (int d = 1; d <= depth; ++d) {
    const std::uint64_t needed =
        std::min<std::uint64_t>((last >> (depth - d)) + 1, 1ULL << d);
    std::vector<double> next(needed + 1);
    for (std::uint64_t i = 0; i <= needed; ++i) {
      if (i % 2 == 0) {
        next[i] = level[i / 2];
      } else {
        next[i] = midpoint(component, d, i, level[i / 2], level[i / 2 + 1]);
      }
    }
    level = std::move(next);
  }
  level.resize(last + 1);
  return level;
}

TabulatedPath::TabulatedPath(Series first, Series second)
    : series_{std::move(first), std::move(second)} {
  for (const Series& s : series_) {
    if (s.times.empty() || s.times.size() != s.values.size()) {
      throw std::invalid_argument("TabulatedPath: series must be non-empty and aligned");
    }
    if (s.times.front() != 0.0 || s.values.front() != 0.0) {
      throw std::invalid_argument("TabulatedPath: series must start at (0, 0)");
    }
    for (std::size_t i = 1; i < s.times.size(); ++i) {
      if (!(s.times[i] > s.times[i - 1])) {
        throw std::invalid_argument("TabulatedPath: times must be strictly increasing");
      }
      if (!std::isfinite(s.values[i])) {
        throw std::invalid_argument("TabulatedPath: non-finite value");
      }
    }
  }
}

namespace {

TabulatedPath::Series read_series(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  TabulatedPath::Series s;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t, w;
    if (!(fields >> t >> w)) {
      if (first) {
        first = false;
        continue;
      }
      throw std::runtime_error("malformed row in " + file.string() + ": " + line);
    }
    first = false;
    s.times.push_back(t);
    s.values.push_back(w);
  }
  return s;
}

}  // namespace

TabulatedPath TabulatedPath::from_csv(const std::filesystem::path& first,
                                      const std::filesystem::path& second) {
  return TabulatedPath(read_series(first), read_series(second));
}

double TabulatedPath::sample(int component, double t) const {
  if (component != 1 && component != 2) {
    throw std::invalid_argument("TabulatedPath: component must be 1 or 2");
  }
  const Series& s = series_[component - 1];
  if (!(t >= 0.0 && t <= horizon())) {
    throw std::out_of_range("TabulatedPath: t outside [0, horizon]");
  }
  const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
  if (it == s.times.end()) return s.values.back();
  const std::size_t i = static_cast<std::size_t>(it - s.times.begin());
  const double t0 = s.times[i - 1];
  const double w = (t - t0) / (s.times[i] - t0);
  return s.values[i - 1] + w * (s.values[i] - s.values[i - 1]);
}

double TabulatedPath::horizon() const {
  return std::min(series_[0].times.back(), series_[1].times.back());
}

double sample(const NoisePath& path, int component, double t) {
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ZeroPath>) {
          if (component != 1 && component != 2) {
            throw std::invalid_argument("component must be 1 or 2");
          }
          if (!(t >= 0.0)) throw std::out_of_range("ZeroPath: t must be >= 0");
          return 0.0;
        } else {
          return p.sample(component, t);
        }
      },
      path);
}

double horizon(const NoisePath& path) {
  return std::visit(
      [](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ZeroPath>) {
          return std::numeric_limits<double>::infinity();
        } else {
          return p.horizon();
        }
      },
      path);
}

double running_sup_abs(const NoisePath& path, int component, double t_end, int depth) {
  if (!(t_end >= 0.0 && t_end <= horizon(path))) {
    throw std::out_of_range("running_sup_abs: t_end outside [0, horizon]");
  }
  if (depth < 0) throw std::invalid_argument("running_sup_abs: depth must be >= 0");
  if (const auto* bp = std::get_if<BrownianPath>(&path)) {
    double sup = 0.0;
    for (double w : bp->grid_values(component, depth, t_end)) sup = std::max(sup, std::abs(w));
    return sup;
  }
  if (const auto* tp = std::get_if<TabulatedPath>(&path)) {
    const double h = tp->horizon();
    const auto last = static_cast<std::uint64_t>(std::ldexp(t_end / h, depth));
    double sup = 0.0;
    for (std::uint64_t k = 0; k <= last; ++k) {
      sup = std::max(sup, std::abs(tp->sample(component, std::min(h, std::ldexp(h * k, -depth)))));
    }
    return sup;
  }
  return 0.0;
}

BrownianPath fork_replicate(std::uint64_t master_seed, std::uint64_t replicate_index,
                            double horizon, int max_depth) {
  const std::uint64_t seed = mix64(master_seed ^ mix64(replicate_index ^ 0x5851f42d4c957f2dULL));
  return BrownianPath(seed, horizon, max_depth);
}

double NoiseSampler::operator()(int component, double t) {
  if (const auto* bp = std::get_if<BrownianPath>(path_)) {
    if (component != 1 && component != 2) {
      throw std::invalid_argument("component must be 1 or 2");
    }
    return bp->sample(component, t, cursors_[component - 1]);
  }
  return sample(*path_, component, t);
}

}  // namespace blowup
