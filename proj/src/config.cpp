#include "blowup/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace blowup {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_values(std::string v) {
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

long long to_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: " + s);
  }
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an unsigned integer: " + s);
  }
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: " + s);
}

std::string one(const std::vector<std::string>& vals) {
  if (vals.size() != 1) throw std::invalid_argument("expected exactly one value");
  return vals.front();
}

}  // namespace

Config parse_config(std::istream& in) {
  Config cfg;
  using Setter = std::function<void(const std::vector<std::string>&)>;
  const auto real = [](double& dst) {
    return Setter([&dst](const auto& v) { dst = to_double(one(v)); });
  };
  const auto opt_real = [](std::optional<double>& dst) {
    return Setter([&dst](const auto& v) { dst = to_double(one(v)); });
  };
  const auto integer = [](int& dst) {
    return Setter([&dst](const auto& v) { dst = static_cast<int>(to_int(one(v))); });
  };

  const std::map<std::string, Setter> setters{
      {"n", integer(cfg.model.n)},
      {"sigma", real(cfg.model.sigma)},
      {"alpha", real(cfg.alpha)},
      {"c", real(cfg.c)},
      {"x0", opt_real(cfg.x0)},
      {"x0_grid",
       [&](const auto& v) {
         cfg.x0_grid.clear();
         for (const auto& s : v) cfg.x0_grid.push_back(to_double(s));
       }},
      {"h_max", opt_real(cfg.integrator.h_max)},
      {"eta", opt_real(cfg.integrator.eta)},
      {"r_blow", opt_real(cfg.integrator.r_blow)},
      {"t_end", opt_real(cfg.integrator.t_end)},
      {"record_stride", integer(cfg.integrator.record_stride)},
      {"noise", [&](const auto& v) { cfg.noise = one(v); }},
      {"noise_csv1", [&](const auto& v) { cfg.noise_csv1 = one(v); }},
      {"noise_csv2", [&](const auto& v) { cfg.noise_csv2 = one(v); }},
      {"max_depth", integer(cfg.max_depth)},
      {"seed", [&](const auto& v) { cfg.seed = to_u64(one(v)); }},
      {"m", integer(cfg.m)},
      {"tol", real(cfg.tol)},
      {"max_iter", integer(cfg.max_iter)},
      {"widened", [&](const auto& v) { cfg.widened = to_bool(one(v)); }},
      {"replicates", integer(cfg.replicates)},
      {"threads", integer(cfg.threads)},
      {"sup_depth", integer(cfg.sup_depth)},
      {"time_factor", real(cfg.time_factor)},
      {"z0",
       [&](const auto& v) {
         if (v.size() != 2) throw std::invalid_argument("z0 expects two numbers");
         cfg.z0 = State{to_double(v[0]), to_double(v[1])};
       }},
      {"y0", opt_real(cfg.y0)},
      {"t_mid",
       [&](const auto& v) {
         cfg.t_mid.clear();
         for (const auto& s : v) cfg.t_mid.push_back(to_double(s));
       }},
      {"flow_tol", real(cfg.flow_tol)},
      {"t_long", real(cfg.t_long)},
      {"burn_in", real(cfg.burn_in)},
      {"stride", real(cfg.stride)},
      {"histogram_range", real(cfg.histogram_range)},
  };

  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto fail = [&](const std::string& why) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + why);
    };
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::vector<std::string> vals = split_values(line.substr(eq + 1));
    if (vals.empty()) fail("missing value for '" + key + "'");
    try {
      if (key == "coeff") {
        if (vals.size() != 4) fail("coeff expects 'j k re im'");
        const Monomial mono{static_cast<int>(to_int(vals[0])), static_cast<int>(to_int(vals[1]))};
        if (cfg.model.f_coeffs.count(mono)) fail("duplicate coeff for this (j, k)");
        cfg.model.f_coeffs[mono] = {to_double(vals[2]), to_double(vals[3])};
        continue;
      }
      const auto it = setters.find(key);
      if (it == setters.end()) fail("unknown key '" + key + "'");
      if (!seen.insert(key).second) fail("repeated key '" + key + "'");
      it->second(vals);
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      if (msg.rfind("config line", 0) == 0) throw;
      fail(key + ": " + msg);
    } catch (const std::out_of_range&) {
      fail(key + ": value out of range");
    }
  }
  cfg.model.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  return parse_config(in);
}

ConeParams Config::cone() const {
  if (!x0) throw std::invalid_argument("config: x0 is required");
  return ConeParams::make(model, alpha, c, *x0);
}

NoisePath Config::make_path(double horizon) const {
  if (noise == "brownian") return BrownianPath(seed, horizon, max_depth);
  if (noise == "zero") return ZeroPath{};
  if (noise == "tabulated") {
    if (noise_csv1.empty() || noise_csv2.empty()) {
      throw std::invalid_argument("config: tabulated noise needs noise_csv1 and noise_csv2");
    }
    return TabulatedPath::from_csv(noise_csv1, noise_csv2);
  }
  throw std::invalid_argument("config: unknown noise '" + noise + "'");
}

ExperimentConfig Config::experiment() const {
  ExperimentConfig e;
  e.model = model;
  e.alpha = alpha;
  e.c = c;
  e.x0_grid = x0_grid;
  if (e.x0_grid.empty() && x0) e.x0_grid = {*x0};
  e.replicates = replicates;
  e.master_seed = seed;
  e.integrator = integrator;
  e.m = m;
  e.tol = tol;
  e.max_iter = max_iter;
  e.sup_depth = sup_depth;
  e.threads = threads;
  e.time_factor = time_factor;
  return e;
}

}  // namespace blowup
