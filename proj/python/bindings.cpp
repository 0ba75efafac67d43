#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "reflectolab/errors.hpp"
#include "reflectolab/experiments.hpp"
#include "reflectolab/run_config.hpp"
#include "reflectolab/sder.hpp"
#include "reflectolab/skorokhod.hpp"
#include "reflectolab/variation.hpp"

namespace py = pybind11;
using namespace reflectolab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

// Accepts shape (n,) as a scalar path or (n, J) as a J-dimensional path.
Path to_path(const Array& times, const Array& values) {
  if (times.ndim() != 1) throw DomainError("times must be one-dimensional");
  const std::size_t n = static_cast<std::size_t>(times.shape(0));
  std::size_t dim = 1;
  if (values.ndim() == 2)
    dim = static_cast<std::size_t>(values.shape(1));
  else if (values.ndim() != 1)
    throw DomainError("values must have shape (n,) or (n, J)");
  if (static_cast<std::size_t>(values.shape(0)) != n) throw DomainError("times and values differ in length");
  return Path(to_vector(times), to_vector(values), dim);
}

Array values_of(const Path& p) {
  Array out(p.dim() == 1 ? std::vector<py::ssize_t>{static_cast<py::ssize_t>(p.size())}
                         : std::vector<py::ssize_t>{static_cast<py::ssize_t>(p.size()),
                                                    static_cast<py::ssize_t>(p.dim())});
  std::copy(p.values().begin(), p.values().end(), out.mutable_data());
  return out;
}

Array array_of(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::tuple reflection(const Reflection& r) { return py::make_tuple(values_of(r.constrained), values_of(r.push)); }

EspSpec make_esp(const std::string& kind, const std::vector<double>& params) {
  if (kind == "half-line") return HalfLine{};
  if (kind == "gps") return GpsWeights(params);
  if (kind == "valley") {
    if (params.size() != 4) throw DomainError("valley needs (alpha_l, alpha_r, c_l, c_r)");
    return ValleyDomain(params[0], params[1], params[2], params[3]);
  }
  throw DomainError("unknown esp kind '" + kind + "'");
}

py::dict ladder_dict(const EnsembleLadder& l) {
  py::dict d;
  d["levels"] = l.levels;
  d["mesh"] = l.mesh;
  d["medians"] = l.medians();
  d["per_path"] = l.per_path;
  return d;
}

}  // namespace

PYBIND11_MODULE(_reflectolab, m) {
  m.doc() = "Reflected diffusions via extended Skorokhod maps";
  m.attr("__version__") = REFLECTOLAB_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsolvableStep>(m, "UnsolvableStep", PyExc_RuntimeError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<BoundViolation>(m, "BoundViolation", PyExc_RuntimeError);

  m.def("uniform_grid", [](double horizon, std::size_t steps) { return array_of(uniform_grid(horizon, steps)); },
        py::arg("horizon"), py::arg("steps"));

  m.def("sm_one_dim", [](const Array& t, const Array& psi) { return reflection(sm_one_dim(to_path(t, psi))); },
        py::arg("times"), py::arg("psi"), "One-dimensional Skorokhod map; returns (phi, eta).");

  m.def(
      "xi_map",
      [](const Array& t, const Array& psi, const Array& ell, const Array& r, bool reference) {
        const auto p = to_path(t, psi), l = to_path(t, ell), u = to_path(t, r);
        return values_of(reference ? xi_map_reference(p, l, u) : xi_map(p, l, u));
      },
      py::arg("times"), py::arg("psi"), py::arg("ell"), py::arg("r"), py::arg("reference") = false);

  m.def(
      "valley_esm",
      [](const Array& t, const Array& psi, std::vector<double> params) {
        const auto esp = make_esp("valley", params);
        return reflection(valley_esm(to_path(t, psi), std::get<ValleyDomain>(esp)));
      },
      py::arg("times"), py::arg("psi"), py::arg("domain"));

  m.def("gps_directions", [](std::vector<double> alpha) { return gps_directions(GpsWeights(std::move(alpha))); },
        py::arg("alpha"));

  m.def(
      "gps_step",
      [](std::vector<double> z_prev, std::vector<double> delta, std::vector<double> alpha) {
        const auto s = GpsStepSolver(GpsWeights(std::move(alpha))).solve(z_prev, delta);
        py::dict d;
        d["z_next"] = s.z_next;
        d["eta_incr"] = s.eta_incr;
        d["beta"] = s.beta;
        d["gamma"] = s.gamma;
        return d;
      },
      py::arg("z_prev"), py::arg("delta"), py::arg("alpha"));

  m.def(
      "gps_esm_discrete",
      [](const Array& t, const Array& psi, std::vector<double> alpha) {
        return reflection(gps_esm_discrete(to_path(t, psi), GpsWeights(std::move(alpha))));
      },
      py::arg("times"), py::arg("psi"), py::arg("alpha"));

  m.def(
      "gps_esm_2d_exact",
      [](const Array& t, const Array& psi, std::vector<double> alpha) {
        return reflection(gps_esm_2d_exact(to_path(t, psi), GpsWeights(std::move(alpha))));
      },
      py::arg("times"), py::arg("psi"), py::arg("alpha") = std::vector<double>{0.5, 0.5});

  m.def(
      "simulate",
      [](const std::string& esp, std::vector<double> params, std::vector<double> initial, double horizon,
         std::size_t steps, std::uint64_t seed) {
        const auto e = make_esp(esp, params);
        const SderSpec spec{e, Coefficients::driftless_identity(esp_dim(e)), std::move(initial)};
        PathBundle b = [&] {
          py::gil_scoped_release release;
          return euler_sder(spec, {horizon, steps, seed});
        }();
        py::dict d;
        d["t"] = array_of(b.Z.times());
        d["B"] = values_of(b.B);
        d["X"] = values_of(b.X);
        d["Z"] = values_of(b.Z);
        d["Y"] = values_of(b.Y);
        return d;
      },
      py::arg("esp"), py::arg("params") = std::vector<double>{}, py::arg("initial"), py::arg("horizon") = 1.0,
      py::arg("steps") = 1024, py::arg("seed") = 0,
      "Driftless identity-dispersion Euler scheme; esp is 'half-line', 'gps' (params = weights) or "
      "'valley' (params = alpha_l, alpha_r, c_l, c_r).");

  m.def(
      "p_variation_sum",
      [](const Array& t, const Array& values, const Array& partition, double p) {
        const auto pts = to_vector(partition);
        return p_variation_sum(to_path(t, values), pts, p);
      },
      py::arg("times"), py::arg("values"), py::arg("partition"), py::arg("p"));

  m.def(
      "variation_ladder",
      [](const Array& t, const Array& values, int min_level, int max_level, double p) {
        const auto path = to_path(t, values);
        const PartitionLadder ladder(path.times().back() - path.times().front(), min_level, max_level);
        return variation_ladder(path, ladder, p).sums();
      },
      py::arg("times"), py::arg("values"), py::arg("min_level"), py::arg("max_level"), py::arg("p"));

  m.def(
      "hitting_probability",
      [](double eps, std::size_t n_paths, std::size_t steps, std::uint64_t seed, std::size_t workers) {
        HittingConfig c;
        c.eps = eps;
        c.n_paths = n_paths;
        c.steps = steps;
        c.seed = seed;
        c.workers = workers;
        HittingResult r = [&] {
          py::gil_scoped_release release;
          return hitting_probability_experiment(c);
        }();
        py::dict d;
        d["estimate"] = r.summary.estimate;
        d["std_error"] = r.summary.std_error;
        d["n_paths"] = r.summary.n_paths;
        d["target"] = r.target;
        d["capped_fraction"] = r.capped_fraction;
        return d;
      },
      py::arg("eps") = 0.25, py::arg("n_paths") = 2000, py::arg("steps") = 4096, py::arg("seed") = 1,
      py::arg("workers") = 0);

  m.def(
      "blowup",
      [](std::size_t n_paths, int grid_exponent, int min_level, int max_level, std::uint64_t seed) {
        BlowupConfig c;
        c.n_paths = n_paths;
        c.grid_exponent = grid_exponent;
        c.min_level = min_level;
        c.max_level = max_level;
        c.seed = seed;
        BlowupResult r = [&] {
          py::gil_scoped_release release;
          return variation_blowup_experiment(c);
        }();
        py::dict d;
        d["origin_tv"] = ladder_dict(r.origin_tv);
        d["origin_qv"] = ladder_dict(r.origin_qv);
        d["comparison_tv"] = ladder_dict(r.comparison_tv);
        return d;
      },
      py::arg("n_paths") = 50, py::arg("grid_exponent") = 14, py::arg("min_level") = 6, py::arg("max_level") = 12,
      py::arg("seed") = 2);

  m.def(
      "xi_oracle_check",
      [](std::size_t length, std::size_t cases, std::uint64_t seed) {
        const auto r = xi_oracle_check(length, cases, seed, 1);
        return r.max_abs_diff;
      },
      py::arg("length") = 256, py::arg("cases") = 20, py::arg("seed") = 1);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = run_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
