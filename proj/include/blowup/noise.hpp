#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace blowup {

/// One realization of a two-component Brownian motion on [0, horizon].
///
/// Values live on the dyadic grid horizon * k / 2^d, d <= max_depth, and are
/// built by the midpoint bridge: a node at depth d is the mean of its two
/// neighbours at depth d - 1 plus sqrt(horizon / 2^(d+1)) times a standard
/// normal drawn from a counter hash of (seed, component, depth, index). No
/// node is ever stored, so any query order returns identical bits and the
/// object is immutable. Off-grid times are linearly interpolated between the
/// two enclosing max-depth nodes; the bias is O(horizon * 2^-max_depth).
class BrownianPath {
 public:
  static constexpr int kDefaultMaxDepth = 32;
  static constexpr int kMaxSupportedDepth = 52;

  /// Descent stack reused between nearby queries. Purely a cache: results do
  /// not depend on its contents.
  class Cursor {
   public:
    Cursor() = default;

   private:
    friend class BrownianPath;
    int valid_depth_ = -1;
    const BrownianPath* owner_ = nullptr;
    int component_ = 0;
    std::array<std::uint64_t, kMaxSupportedDepth + 1> index_{};
    std::array<double, kMaxSupportedDepth + 1> left_{};
    std::array<double, kMaxSupportedDepth + 1> right_{};
  };

  BrownianPath(std::uint64_t seed, double horizon, int max_depth = kDefaultMaxDepth);

  /// W^(component)(t), component in {1, 2}. Throws std::out_of_range when t is
  /// outside [0, horizon].
  [[nodiscard]] double sample(int component, double t) const;
  [[nodiscard]] double sample(int component, double t, Cursor& cursor) const;

  /// Exact grid value at horizon * index / 2^depth.
  [[nodiscard]] double node(int component, int depth, std::uint64_t index) const;

  /// All grid values at `depth` with time <= t_end, in time order.
  [[nodiscard]] std::vector<double> grid_values(int component, int depth, double t_end) const;

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] int max_depth() const { return max_depth_; }

 private:
  [[nodiscard]] double gaussian(int component, int depth, std::uint64_t index) const;
  [[nodiscard]] double midpoint(int component, int depth, std::uint64_t index, double left,
                                double right) const;
  void descend(int component, int depth, std::uint64_t position, Cursor& cursor) const;

  std::uint64_t seed_;
  double horizon_;
  int max_depth_;
  std::array<double, kMaxSupportedDepth + 1> node_sd_{};
};

/// The zero path: deterministic ODE mode.
struct ZeroPath {};

/// User-supplied (time, value) samples per component, linearly interpolated.
class TabulatedPath {
 public:
  struct Series {
    std::vector<double> times;
    std::vector<double> values;
  };

  /// Each series must start at (0, 0) with strictly increasing times.
  TabulatedPath(Series first, Series second);

  /// Reads one two-column `time,value` CSV per component; a non-numeric first
  /// line is treated as a header.
  static TabulatedPath from_csv(const std::filesystem::path& first,
                                const std::filesystem::path& second);

  [[nodiscard]] double sample(int component, double t) const;
  [[nodiscard]] double horizon() const;

 private:
  std::array<Series, 2> series_;
};

using NoisePath = std::variant<BrownianPath, ZeroPath, TabulatedPath>;

[[nodiscard]] double sample(const NoisePath& path, int component, double t);

/// Largest admissible query time (infinity for ZeroPath).
[[nodiscard]] double horizon(const NoisePath& path);

/// max |W^(component)(t)| over grid points horizon * k / 2^depth in
/// [0, t_end]. Never exceeds the true supremum; non-decreasing in depth.
/// For ZeroPath the grid is irrelevant and the result is 0.
[[nodiscard]] double running_sup_abs(const NoisePath& path, int component, double t_end,
                                     int depth);

/// Path for replicate `replicate_index`, seeded by a counter-based mix of
/// (master_seed, replicate_index).
[[nodiscard]] BrownianPath fork_replicate(std::uint64_t master_seed,
                                          std::uint64_t replicate_index, double horizon,
                                          int max_depth = BrownianPath::kDefaultMaxDepth);

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x);

/// Inverse standard normal CDF (Wichura AS241, ~1e-16 relative accuracy).
[[nodiscard]] double inverse_normal_cdf(double p);

/// Sequential sampler used by the integrator. Keeps one descent cursor per
/// component; not shareable between threads.
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoisePath& path) : path_(&path) {}

  double operator()(int component, double t);

 private:
  const NoisePath* path_;
  std::array<BrownianPath::Cursor, 2> cursors_{};
};

}  // namespace blowup
