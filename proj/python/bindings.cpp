#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "icol/audit.hpp"
#include "icol/errors.hpp"
#include "icol/experiment.hpp"
#include "icol/output.hpp"
#include "icol/panel_io.hpp"
#include "icol/wagering.hpp"

namespace py = pybind11;
using namespace icol;

namespace {

std::vector<AlgorithmSpec> specs_from(const std::vector<std::string>& names) {
  std::vector<AlgorithmSpec> out;
  for (const auto& n : names) out.push_back(AlgorithmSpec::parse(n));
  return out;
}

std::vector<Outcome> outcomes_from(const std::vector<int>& raw) {
  std::vector<Outcome> out;
  out.reserve(raw.size());
  for (int r : raw) out.push_back(outcome_from_int(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_icol, m) {
  m.doc() = "Incentive-compatible online learning";

  py::register_exception<Error>(m, "IcolError", PyExc_ValueError);

  py::class_<ForecastPanel>(m, "ForecastPanel")
      .def(py::init([](const std::vector<std::vector<double>>& reports,
                       const std::vector<int>& outcomes, std::vector<std::string> ids) {
             const std::size_t k = reports.empty() ? 0 : reports.front().size();
             std::vector<double> flat;
             for (const auto& row : reports) {
               if (row.size() != k) throw DimensionError("ragged report rows");
               flat.insert(flat.end(), row.begin(), row.end());
             }
             return ForecastPanel(k, std::move(flat), outcomes_from(outcomes), std::move(ids));
           }),
           py::arg("reports"), py::arg("outcomes"), py::arg("expert_ids") = std::vector<std::string>{})
      .def_property_readonly("num_experts", &ForecastPanel::num_experts)
      .def_property_readonly("horizon", &ForecastPanel::horizon)
      .def_property_readonly("expert_ids", &ForecastPanel::expert_ids)
      .def("report", &ForecastPanel::report)
      .def("outcome", [](const ForecastPanel& p, std::size_t t) {
        return static_cast<int>(outcome_value(p.outcome(t)));
      });

  py::class_<TraceEnsemble>(m, "TraceEnsemble")
      .def_property_readonly("label", [](const TraceEnsemble& e) { return e.metadata.label; })
      .def_property_readonly("invalid_rounds",
                             [](const TraceEnsemble& e) { return e.metadata.invalid_rounds; })
      .def_readonly("mean", &TraceEnsemble::mean)
      .def_readonly("p20", &TraceEnsemble::p20)
      .def_readonly("p80", &TraceEnsemble::p80)
      .def_readonly("per_trace", &TraceEnsemble::per_trace)
      .def("to_json", &to_json, py::arg("include_per_trace") = false);

  m.def("wsu_update",
        [](const std::vector<double>& pi, const std::vector<double>& losses, double eta) {
          return wsu_update(WeightVector(pi), losses, eta).vector();
        },
        py::arg("pi"), py::arg("losses"), py::arg("eta"));

  m.def("wswm_payoffs",
        [](const std::vector<double>& reports, const std::vector<double>& wagers, int outcome) {
          return wswm_payoffs(WagerProfile(reports, WeightVector(wagers), outcome_from_int(outcome)),
                              LossFunction::quadratic());
        },
        py::arg("reports"), py::arg("wagers"), py::arg("outcome"));

  m.def("ingest_panel",
        [](const std::filesystem::path& path) { return ingest_panel(path).panel; },
        py::arg("path"));

  m.def("run_benchmark",
        [](const ForecastPanel& panel, const std::vector<std::string>& algorithms,
           std::size_t repetitions, std::uint64_t seed) {
          BenchmarkOptions options;
          options.repetitions = repetitions;
          options.seed = seed;
          const std::vector<ForecastPanel> panels = {panel};
          const auto specs = specs_from(algorithms);
          return run_benchmark(panels, specs, options);
        },
        py::arg("panel"), py::arg("algorithms"), py::arg("repetitions") = 1,
        py::arg("seed") = 0);

  m.def("run_monte_carlo",
        [](std::size_t num_experts, std::size_t horizon, std::size_t repetitions,
           std::uint64_t seed, const std::vector<std::string>& algorithms) {
          SimulationSpec spec;
          spec.num_experts = num_experts;
          spec.horizon = horizon;
          spec.repetitions = repetitions;
          spec.seed = seed;
          const auto specs = specs_from(algorithms);
          return run_monte_carlo(spec, specs, {});
        },
        py::arg("num_experts"), py::arg("horizon"), py::arg("repetitions"), py::arg("seed"),
        py::arg("algorithms"));

  m.def("builtin_audits", [] {
    py::list out;
    for (const auto& a : builtin_audits(AuditConfig{})) {
      py::dict d;
      d["name"] = a.name;
      d["verdict"] = std::string(to_string(a.report.verdict));
      d["truthful_value"] = a.report.truthful_value;
      d["best_deviation_value"] = a.report.best_deviation_value;
      d["best_deviation_reports"] = a.report.best_deviation_reports;
      d["gap"] = a.report.gap;
      out.append(d);
    }
    return out;
  });

  m.def("render_svg",
        [](const std::vector<TraceEnsemble>& ensembles, int width, int height) {
          SvgOptions options;
          options.width = width;
          options.height = height;
          return render_svg(ensembles, options);
        },
        py::arg("ensembles"), py::arg("width") = 800, py::arg("height") = 500);
}
