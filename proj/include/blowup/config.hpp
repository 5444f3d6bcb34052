#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "blowup/drift.hpp"
#include "blowup/experiments.hpp"
#include "blowup/noise.hpp"

namespace blowup {

/// Flat key-value configuration shared by every CLI subcommand.
///
/// Grammar, one entry per line:
///
///     line    := blank | '#' comment | key '=' value
///     coeff   := 'coeff' '=' j k re im        (repeatable)
///     x0_grid := 'x0_grid' '=' number+        (whitespace or comma separated)
///     z0      := 'z0' '=' x y
///     t_mid   := 't_mid' '=' number+        (flow restart times)
///
/// Whitespace around keys and values is ignored; a trailing '#' starts a
/// comment. Unknown keys and repeated scalar keys are errors.
struct Config {
  ModelParams model;
  double alpha = 0.2;
  double c = 1.0;
  std::optional<double> x0;
  std::vector<double> x0_grid;

  IntegratorOverrides integrator;

  // Noise: "brownian" (default), "zero", or "tabulated" (two CSV files).
  std::string noise = "brownian";
  std::filesystem::path noise_csv1;
  std::filesystem::path noise_csv2;
  int max_depth = BrownianPath::kDefaultMaxDepth;
  std::uint64_t seed = 0;

  // Flow experiments.
  int m = 65;
  double tol = 1e-10;
  int max_iter = 200;
  bool widened = false;
  int replicates = 100;
  int threads = 0;
  int sup_depth = kDefaultSupDepth;
  double time_factor = 1.02;

  // Single trajectories, flow composition, long run.
  std::optional<State> z0;
  std::optional<double> y0;
  std::vector<double> t_mid;  // restart times; empty means evenly spaced
  double flow_tol = 1e-6;
  double t_long = 1000.0;
  double burn_in = 100.0;
  double stride = 0.1;
  double histogram_range = 10.0;

  /// Cone at `x0`. Throws std::invalid_argument if x0 is not set.
  [[nodiscard]] ConeParams cone() const;
  /// Noise path on [0, horizon] per the `noise` key; Brownian paths use `seed`.
  [[nodiscard]] NoisePath make_path(double horizon) const;
  [[nodiscard]] ExperimentConfig experiment() const;
};

/// Throws std::invalid_argument with the offending line number.
[[nodiscard]] Config parse_config(std::istream& in);
[[nodiscard]] Config load_config(const std::filesystem::path& file);

}  // namespace blowup
