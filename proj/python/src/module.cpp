// Python bindings. Structured values cross the boundary as JSON text; the
// kahlerdyn package turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kahlerdyn/cohomology.hpp"
#include "kahlerdyn/entropy.hpp"
#include "kahlerdyn/error.hpp"
#include "kahlerdyn/runner.hpp"

namespace py = pybind11;
using namespace kahlerdyn;

namespace {

TorusSpec parse_torus(const std::string& text) { return torus_from_json(Json::parse(text), "torus"); }

std::string degrees(const std::string& torus) {
  auto prof = dynamical_degrees(build_torus_cohomology(parse_torus(torus)));
  return Json{{"degrees", prof.degrees}, {"entropy", prof.entropy}, {"multiplicity", prof.multiplicity}}.dump();
}

std::string lyapunov(const std::string& torus) {
  auto ly = lyapunov_exponents(parse_torus(torus));
  return Json{{"exponents", ly.exponents}, {"sum", ly.sum}, {"hyperbolic", ly.hyperbolic}}.dump();
}

std::string brin_katok(const std::string& torus, int n, double epsilon, long long samples, std::uint64_t seed,
                       const std::string& method) {
  std::string out;
  {
    py::gil_scoped_release release;
    auto e = brin_katok_estimate(parse_torus(torus), n, epsilon, {}, samples, seed, method, 1);
    out = Json{{"h_value", e.h_value}, {"raw_value", e.raw_value}, {"n_used", e.n_used},
               {"method", e.method},   {"error_bar", e.error_bar}}
              .dump();
  }
  return out;
}

std::string validate(const std::string& config, const std::string& base_dir) {
  return validate_config(Json::parse(config), base_dir).dump();
}

std::string run(const std::string& config, const std::string& base_dir, bool persist) {
  Json cfg = validate_config(Json::parse(config), base_dir);
  py::gil_scoped_release release;
  ExperimentReport rep = run_experiment(cfg);
  Json out = rep.to_json(true);
  if (persist) out["run_dir"] = persist_report(rep);
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "kahlerdyn core";
  static py::exception<Error> error(m, "KahlerdynError", PyExc_RuntimeError);
  static py::exception<UsageError> usage(m, "UsageError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const UsageError& e) {
      py::set_error(usage, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(usage, e.what());
    }
  });
  m.attr("schema_version") = kSchemaVersion;
  m.def("kinds", &experiment_kinds);
  m.def("degrees", &degrees, py::arg("torus"));
  m.def("lyapunov", &lyapunov, py::arg("torus"));
  m.def("brin_katok", &brin_katok, py::arg("torus"), py::arg("n"), py::arg("epsilon"), py::arg("samples") = 100000,
        py::arg("seed") = 1, py::arg("method") = "auto");
  m.def("validate_config", &validate, py::arg("config"), py::arg("base_dir") = ".");
  m.def("run_config", &run, py::arg("config"), py::arg("base_dir") = ".", py::arg("persist") = false);
}
