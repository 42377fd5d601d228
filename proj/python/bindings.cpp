#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quantclt/analytic.hpp"
#include "quantclt/config.hpp"
#include "quantclt/empirical.hpp"
#include "quantclt/harness.hpp"
#include "quantclt/process.hpp"
#include "quantclt/report.hpp"
#include "quantclt/version.hpp"

namespace py = pybind11;
using namespace quantclt;

namespace {

py::dict report_to_dict(const Report& report) {
  py::dict out;
  out["experiment"] = report.experiment;
  out["passed"] = report.passed();
  out["csv"] = report_to_csv(report);
  out["notes"] = report.notes;
  py::list rows;
  for (const auto& row : report.rows) {
    py::dict item;
    item["experiment"] = row.experiment;
    item["pair_s"] = row.pair_s;
    item["pair_beta"] = row.pair_beta;
    item["pair_t"] = row.pair_t;
    item["pair_alpha"] = row.pair_alpha;
    item["n"] = row.n;
    item["R"] = row.R;
    item["estimate"] = row.estimate;
    item["se"] = row.se;
    item["analytic"] = row.analytic;
    item["z"] = row.z;
    item["verdict"] = row.verdict;
    rows.append(item);
  }
  out["rows"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "empirical quantile process simulation and verification toolkit";
  m.attr("__version__") = QUANTCLT_VERSION;

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<std::vector<double>>(), py::arg("points"))
      .def_static("regular", &TimeGrid::regular, py::arg("T"), py::arg("m"))
      .def_readonly("points", &TimeGrid::points)
      .def("index_of", &TimeGrid::index_of)
      .def("__len__", &TimeGrid::size);

  py::class_<TimeGrid2D>(m, "TimeGrid2D")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("points_x"),
           py::arg("points_y"))
      .def_readonly("points_x", &TimeGrid2D::points_x)
      .def_readonly("points_y", &TimeGrid2D::points_y);

  py::class_<LevelGrid>(m, "LevelGrid")
      .def(py::init<std::vector<double>>(), py::arg("levels"))
      .def(py::init<std::vector<double>, double, double>(), py::arg("levels"), py::arg("a"),
           py::arg("b"))
      .def_readonly("levels", &LevelGrid::levels)
      .def_readonly("a", &LevelGrid::a)
      .def_readonly("b", &LevelGrid::b)
      .def("__len__", &LevelGrid::size);

  py::class_<ScalarSampler>(m, "ScalarSampler")
      .def_static("constant", &ScalarSampler::constant, py::arg("value"))
      .def_static("normal", &ScalarSampler::normal, py::arg("mu"), py::arg("sigma"))
      .def_static("uniform", &ScalarSampler::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("exponential", &ScalarSampler::exponential, py::arg("rate"))
      .def_static("laplace", &ScalarSampler::laplace, py::arg("mu"), py::arg("scale"))
      .def_static("cauchy", &ScalarSampler::cauchy, py::arg("loc"), py::arg("scale"))
      .def("describe", &ScalarSampler::describe);

  py::class_<ProcessSpec>(m, "ProcessSpec")
      .def_static("fbm", &ProcessSpec::fbm, py::arg("gamma"))
      .def_static("brownian_motion", &ProcessSpec::brownian_motion)
      .def_static("brownian_sheet_2d", &ProcessSpec::brownian_sheet_2d)
      .def_static("sym_stable", &ProcessSpec::sym_stable, py::arg("r"), py::arg("c"))
      .def_static("compound_poisson", &ProcessSpec::compound_poisson, py::arg("lam"),
                  py::arg("jump_dist"))
      .def_static("shifted", &ProcessSpec::shifted, py::arg("base"), py::arg("z_dist"))
      .def("describe", &ProcessSpec::describe)
      .def("zero_at_zero", &ProcessSpec::zero_at_zero);

  py::class_<PathBatch>(m, "PathBatch")
      .def_property_readonly("values", [](const PathBatch& b) { return b.values; })
      .def_property_readonly("n", &PathBatch::n)
      .def_property_readonly("num_points", &PathBatch::num_points);

  m.def("generate", &generate, py::arg("spec"), py::arg("grid"), py::arg("n"), py::arg("seed"),
        py::arg("replication") = 0,
        "n i.i.d. paths of the process on the grid; bit-reproducible from the seed");
  m.def("gen_fbm", &gen_fbm, py::arg("grid"), py::arg("gamma"), py::arg("n"), py::arg("seed"),
        py::arg("replication") = 0);
  m.def("gen_brownian_sheet", &gen_brownian_sheet, py::arg("grid"), py::arg("n"), py::arg("seed"),
        py::arg("replication") = 0);
  m.def("gen_sym_stable", &gen_sym_stable, py::arg("grid"), py::arg("r"), py::arg("c"),
        py::arg("n"), py::arg("seed"), py::arg("replication") = 0);
  m.def("gen_compound_poisson", &gen_compound_poisson, py::arg("grid"), py::arg("lam"),
        py::arg("jump_dist"), py::arg("n"), py::arg("seed"), py::arg("replication") = 0);
  m.def("add_shift", &add_shift, py::arg("batch"), py::arg("z_dist"), py::arg("seed"));

  // empirical
  m.def("empirical_cdf", &empirical_cdf, py::arg("batch"), py::arg("t_index"), py::arg("x"));
  m.def("empirical_quantile", &empirical_quantile, py::arg("batch"), py::arg("t_index"),
        py::arg("alpha"));
  m.def("quantile_rank", &quantile_rank, py::arg("n"), py::arg("alpha"));
  m.def(
      "order_statistics",
      [](const std::vector<double>& values) {
        std::vector<std::pair<double, int>> out;
        for (const auto& os : order_statistics(values)) out.emplace_back(os.value, os.index);
        return out;
      },
      py::arg("values"), "sorted (value, original_index) pairs, ties by original index");

  py::class_<QuantileField>(m, "QuantileField")
      .def_property_readonly("tau_n", [](const QuantileField& f) { return f.tau_n; })
      .def_property_readonly("w_n", [](const QuantileField& f) { return f.w_n; })
      .def_readonly("n", &QuantileField::n);

  m.def("quantile_field", &quantile_field, py::arg("batch"), py::arg("levels"),
        py::arg("true_tau"));
  m.def("sup_statistic", &sup_statistic, py::arg("field"), py::arg("t_range"),
        py::arg("level_range"));
  m.def("vervaat_identity_check",
        [](const PathBatch& batch, std::size_t t_index, const std::function<double(double)>& F,
           const std::function<double(double)>& Finv, const std::vector<double>& probes) {
          return vervaat_identity_check(batch, t_index, F, Finv, probes);
        },
        py::arg("batch"), py::arg("t_index"), py::arg("cdf"), py::arg("quantile"),
        py::arg("probe_levels"));

  // analytic
  auto analytic = m.def_submodule("analytic", "densities, quantiles and limit covariances");
  analytic.def("normal_cdf", &quantclt::analytic::normal_cdf);
  analytic.def("normal_quantile", &quantclt::analytic::normal_quantile);
  analytic.def("bivariate_normal_cdf", &quantclt::analytic::bivariate_normal_cdf, py::arg("h"),
               py::arg("k"), py::arg("rho"));
  analytic.def("stable_density", &quantclt::analytic::stable_density, py::arg("r"), py::arg("c"),
               py::arg("t"), py::arg("x"));
  analytic.def("stable_cdf", &quantclt::analytic::stable_cdf, py::arg("r"), py::arg("c"),
               py::arg("t"), py::arg("x"));
  analytic.def("stable_quantile", &quantclt::analytic::stable_quantile, py::arg("r"), py::arg("c"),
               py::arg("t"), py::arg("alpha"));
  analytic.def("joint_prob_stable", &quantclt::analytic::joint_prob_stable, py::arg("r"),
               py::arg("c"), py::arg("s"), py::arg("t"), py::arg("a"), py::arg("b"));
  analytic.def("limit_cov_quantile_stable",
               py::overload_cast<double, double, double, double, double, double>(
                   &quantclt::analytic::limit_cov_quantile_stable),
               py::arg("r"), py::arg("c"), py::arg("s"), py::arg("beta"), py::arg("t"),
               py::arg("alpha"));
  analytic.def("limit_cov_quantile_fbm", &quantclt::analytic::limit_cov_quantile_fbm,
               py::arg("gamma"), py::arg("s"), py::arg("beta"), py::arg("t"), py::arg("alpha"));
  analytic.def("limit_cov_empirical_G",
               py::overload_cast<double, double, double>(&quantclt::analytic::limit_cov_empirical_G),
               py::arg("F_sx"), py::arg("F_ty"), py::arg("joint_prob"));
  analytic.def("dist_d", py::overload_cast<double, double, double>(&quantclt::analytic::dist_d),
               py::arg("F_sx"), py::arg("F_ty"), py::arg("joint_prob"));
  analytic.def("convolved_density_empirical",
               [](const std::vector<double>& samples, const std::function<double(double)>& g,
                  double x) { return quantclt::analytic::convolved_density_empirical(samples, g, x); },
               py::arg("base_samples"), py::arg("z_density"), py::arg("x"));
  analytic.def("convolved_density_gaussian",
               [](double sigma, const std::function<double(double)>& g, double x) {
                 return quantclt::analytic::convolved_density_gaussian(sigma, g, x);
               },
               py::arg("base_sigma"), py::arg("z_density"), py::arg("x"));

  py::class_<quantclt::analytic::TailBoundConstants>(analytic, "TailBoundConstants")
      .def_readonly("r", &quantclt::analytic::TailBoundConstants::r)
      .def_readonly("alpha_star", &quantclt::analytic::TailBoundConstants::alpha_star)
      .def_readonly("c_r", &quantclt::analytic::TailBoundConstants::c_r)
      .def_readonly("lambda_r", &quantclt::analytic::TailBoundConstants::lambda_r)
      .def_readonly("n0", &quantclt::analytic::TailBoundConstants::n0)
      .def_readonly("threshold_C", &quantclt::analytic::TailBoundConstants::threshold_C)
      .def("bound", &quantclt::analytic::TailBoundConstants::bound, py::arg("u"), py::arg("n"));
  analytic.def("tail_bound_constants", &quantclt::analytic::tail_bound_constants, py::arg("r"),
               py::arg("c"), py::arg("alpha_star"), py::arg("c_r") = 1.0);

  // harness
  m.def(
      "run_experiment_toml",
      [](const std::string& text, const std::vector<std::string>& overrides) {
        const ExperimentConfig cfg = config_from_toml(text, overrides);
        return report_to_dict(run_experiment(cfg));
      },
      py::arg("toml_text"), py::arg("overrides") = std::vector<std::string>{},
      "parse a TOML experiment config, run it, and return rows/CSV/verdicts");
}
