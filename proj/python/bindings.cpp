#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "blowup/config.hpp"
#include "blowup/drift.hpp"
#include "blowup/experiments.hpp"
#include "blowup/flow.hpp"
#include "blowup/integrator.hpp"
#include "blowup/io.hpp"
#include "blowup/noise.hpp"

namespace py = pybind11;
using namespace blowup;

namespace {

py::object to_python(const io::json& j) {
  switch (j.type()) {
    case io::json::value_t::null: return py::none();
    case io::json::value_t::boolean: return py::bool_(j.get<bool>());
    case io::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case io::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case io::json::value_t::number_float: return py::float_(j.get<double>());
    case io::json::value_t::string: return py::str(j.get<std::string>());
    case io::json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case io::json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
    default: throw std::runtime_error("unsupported JSON value");
  }
}

ModelParams make_model(int n, double sigma, const std::map<Monomial, std::complex<double>>& coeffs) {
  ModelParams p;
  p.n = n;
  p.sigma = sigma;
  p.f_coeffs = coeffs;
  p.validate();
  return p;
}

// None selects the zero path; an integer seeds a Brownian path on [0, horizon].
NoisePath make_path(std::optional<std::uint64_t> seed, double horizon) {
  if (!seed) return ZeroPath{};
  return BrownianPath(*seed, horizon);
}

py::tuple vec(Vec2 v) { return py::make_tuple(v.x, v.y); }

py::dict trajectory_dict(const TrajectoryRecord& rec, const IntegratorOptions& opts,
                         std::optional<std::uint64_t> seed) {
  py::dict d = to_python(io::trajectory_sidecar(rec, opts, seed));
  const auto n = static_cast<py::ssize_t>(rec.samples.size());
  py::array_t<double> t(n), x(n), y(n);
  auto tt = t.mutable_unchecked<1>();
  auto xx = x.mutable_unchecked<1>();
  auto yy = y.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const Sample& s = rec.samples[static_cast<std::size_t>(i)];
    tt(i) = s.t;
    xx(i) = s.z.x;
    yy(i) = s.z.y;
  }
  d["t"] = t;
  d["x"] = x;
  d["y"] = y;
  return d;
}

IntegratorOptions cone_options(const ConeParams& cone, std::optional<double> eta,
                               std::optional<double> r_blow, std::optional<double> t_end) {
  IntegratorOverrides ov;
  ov.eta = eta;
  ov.r_blow = r_blow;
  ov.t_end = t_end;
  return ov.resolve(cone);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Explosive planar SDE core";
  m.attr("schema_version") = kSchemaVersion;

  py::class_<ModelParams>(m, "Model")
      .def(py::init(&make_model), py::arg("n"), py::arg("sigma") = 0.0,
           py::arg("coeffs") = std::map<Monomial, std::complex<double>>{})
      .def_readonly("n", &ModelParams::n)
      .def_readonly("sigma", &ModelParams::sigma)
      .def_readonly("coeffs", &ModelParams::f_coeffs)
      .def("coeff_l1", &ModelParams::coeff_l1);

  py::class_<ConeParams>(m, "Cone")
      .def(py::init(&ConeParams::make), py::arg("model"), py::arg("alpha"), py::arg("c"),
           py::arg("x0"))
      .def_readonly("n", &ConeParams::n)
      .def_readonly("alpha", &ConeParams::alpha)
      .def_readonly("x_star", &ConeParams::x_star)
      .def_readonly("c", &ConeParams::c)
      .def_readonly("x0", &ConeParams::x0)
      .def_readonly("x1", &ConeParams::x1)
      .def_readonly("epsilon", &ConeParams::epsilon)
      .def_readonly("T", &ConeParams::T)
      .def_readonly("C", &ConeParams::C)
      .def_readonly("a_n", &ConeParams::a_n)
      .def_readonly("b_n", &ConeParams::b_n)
      .def("segment_half_width", &ConeParams::segment_half_width)
      .def("contains", [](const ConeParams& c, double x, double y) { return in_cone(c, {x, y}); })
      .def("gronwall_floor", &gronwall_floor);

  m.def("drift_binomial",
        [](const ModelParams& p, double x, double y) { return vec(drift_binomial(p, {x, y})); });
  m.def("drift_polar",
        [](const ModelParams& p, double x, double y) { return vec(drift_polar(p, {x, y})); });
  m.def("epsilon_of", &epsilon_of, py::arg("n"), py::arg("alpha"));
  m.def("sine_constants", [](int n) {
    const SineConstants s = sine_constants(n);
    return py::make_tuple(s.b_n, s.a_n);
  });

  m.def("brownian_sample",
        [](std::uint64_t seed, double horizon, int component, const std::vector<double>& times) {
          const BrownianPath p(seed, horizon);
          BrownianPath::Cursor cur;
          std::vector<double> out;
          out.reserve(times.size());
          for (double t : times) out.push_back(p.sample(component, t, cur));
          return out;
        },
        py::arg("seed"), py::arg("horizon"), py::arg("component"), py::arg("times"));

  m.def("simulate",
        [](const ModelParams& p, const ConeParams& cone, double y0, std::optional<std::uint64_t> seed,
           bool stop_on_exit, std::optional<double> eta, std::optional<double> r_blow,
           std::optional<double> t_end) {
          IntegratorOptions o = cone_options(cone, eta, r_blow, t_end);
          o.stop_on_exit = stop_on_exit;
          const NoisePath path = make_path(seed, o.t_end);
          py::gil_scoped_release release;
          const TrajectoryRecord rec = simulate(p, cone, path, {cone.x0, y0}, o);
          py::gil_scoped_acquire acquire;
          return trajectory_dict(rec, o, seed);
        },
        py::arg("model"), py::arg("cone"), py::arg("y0") = 0.0, py::arg("seed") = py::none(),
        py::arg("stop_on_exit") = false, py::arg("eta") = py::none(),
        py::arg("r_blow") = py::none(), py::arg("t_end") = py::none());

  m.def("scan",
        [](const ModelParams& p, const ConeParams& cone, std::optional<std::uint64_t> seed, int m_pts,
           bool widened) {
          const IntegratorOptions o = default_options(cone);
          const NoisePath path = make_path(seed, o.t_end);
          SegmentClassification s;
          {
            py::gil_scoped_release release;
            s = scan_segment(p, cone, path, m_pts, o, widened);
          }
          return to_python(io::to_json(s));
        },
        py::arg("model"), py::arg("cone"), py::arg("seed") = py::none(), py::arg("m") = 65,
        py::arg("widened") = false);

  m.def("bisect",
        [](const ModelParams& p, const ConeParams& cone, std::optional<std::uint64_t> seed,
           double tol, int max_iter) {
          const IntegratorOptions o = default_options(cone);
          const NoisePath path = make_path(seed, o.t_end);
          BisectionResult r;
          {
            py::gil_scoped_release release;
            r = bisect_exploding_point(p, cone, path, tol, max_iter, o);
          }
          io::json j = io::to_json(r);
          j["trapping"] = io::to_json(verify_trapping(r.record, cone, o.eta));
          j["flags"] = io::to_json(check_events(r.record, path, cone, p.sigma));
          return to_python(j);
        },
        py::arg("model"), py::arg("cone"), py::arg("seed") = py::none(), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 200);

  m.def("montecarlo",
        [](const ModelParams& p, std::vector<double> x0_grid, int replicates,
           std::uint64_t seed, double alpha, double c, int threads) {
          ExperimentConfig cfg;
          cfg.model = p;
          cfg.x0_grid = std::move(x0_grid);
          cfg.replicates = replicates;
          cfg.master_seed = seed;
          cfg.alpha = alpha;
          cfg.c = c;
          cfg.threads = threads;
          MonteCarloReport rep;
          {
            py::gil_scoped_release release;
            rep = run_montecarlo(cfg);
          }
          return to_python(io::to_json(rep));
        },
        py::arg("model"), py::arg("x0_grid"), py::arg("replicates"), py::arg("seed") = 0,
        py::arg("alpha") = 0.2, py::arg("c") = 1.0, py::arg("threads") = 0);

  m.def("flowcheck",
        [](const ModelParams& p, double x, double y, std::uint64_t seed, double t_end) {
          IntegratorOverrides ov;
          const IntegratorOptions o = ov.resolve({x, y}, t_end);
          const NoisePath path = BrownianPath(seed, t_end);
          FlowCheckReport r;
          {
            py::gil_scoped_release release;
            r = check_flow_property(p, path, {x, y}, default_restart_times(t_end), t_end, 1e-6, o);
          }
          return to_python(io::to_json(r));
        },
        py::arg("model"), py::arg("x"), py::arg("y"), py::arg("seed"), py::arg("t_end") = 1.0);

  m.def("longrun",
        [](const ModelParams& p, double x, double y, std::uint64_t seed, double t_long,
           double burn_in, double stride) {
          IntegratorOverrides ov;
          const IntegratorOptions o = ov.resolve({x, y}, t_long);
          const NoisePath path = BrownianPath(seed, t_long);
          LongrunSummary s;
          {
            py::gil_scoped_release release;
            s = run_onepoint_longrun(p, path, {x, y}, t_long, burn_in, stride, o, 10.0);
          }
          return to_python(io::to_json(s));
        },
        py::arg("model"), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("seed") = 0,
        py::arg("t_long") = 1000.0, py::arg("burn_in") = 100.0, py::arg("stride") = 0.1);

  m.def("load_config", [](const std::string& file) {
    const Config c = load_config(file);
    py::dict d;
    d["model"] = c.model;
    d["alpha"] = c.alpha;
    d["c"] = c.c;
    d["x0"] = c.x0;
    d["x0_grid"] = c.x0_grid;
    d["seed"] = c.seed;
    d["replicates"] = c.replicates;
    return d;
  });
}
