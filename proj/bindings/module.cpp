#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "qsc/cli.hpp"
#include "qsc/kernel.hpp"
#include "qsc/linalg.hpp"
#include "qsc/opspace.hpp"
#include "qsc/semigroup.hpp"
#include "qsc/stepfun.hpp"
#include "qsc/verify.hpp"

namespace py = pybind11;
using namespace qsc;

namespace {

// Reports cross the language boundary as JSON text; the Python package
// parses them into dicts.
std::string verify_json(const Report& report) { return report_to_json(report); }

std::pair<int, std::string> run_config_json(const std::string& text,
                                            std::optional<std::uint64_t> seed) {
  const cli::Json j = cli::Json::parse(text);
  const cli::Config config = cli::parse_config(j);
  const cli::RunOutcome outcome = cli::run_config(config, seed, 1);
  return {outcome.exit_code, outcome.report.dump(2)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Finite-dimensional laboratory for quantum stochastic cocycles: "
      "operator spaces, associated semigroup families, cocycle kernels, and "
      "property verifiers.";

  py::register_exception<Error>(m, "QscError");

  // numerics
  m.def("chi", &chi, py::arg("u"), py::arg("v"),
        "(|u|^2 + |v|^2)/2 - <u, v>, linear in the second argument.");
  m.def("gram_matrix", &gram_matrix, py::arg("xs"), py::arg("t"),
        "PSD matrix [exp(-t chi(x_i, x_j))].");
  m.def("op_norm", &op_norm, py::arg("m"));
  m.def("max_abs", &max_abs, py::arg("m"));
  m.def(
      "min_herm_eig",
      [](const CMatrix& a) { return min_herm_eig(a); }, py::arg("m"));
  m.def(
      "psd_sqrt", [](const CMatrix& a) { return psd_sqrt(a); }, py::arg("m"));

  py::class_<BlockFactorResult>(m, "BlockFactorResult")
      .def_readonly("psd", &BlockFactorResult::psd)
      .def_readonly("min_eigenvalue", &BlockFactorResult::min_eigenvalue)
      .def_readonly("contraction", &BlockFactorResult::contraction);
  m.def(
      "block_psd_factor",
      [](const CMatrix& a, const CMatrix& b, const CMatrix& d) {
        return block_psd_factor(a, b, d);
      },
      py::arg("a"), py::arg("b"), py::arg("d"),
      "Factors [[a, b], [b*, d]]: a contraction R with b = a^{1/2} R d^{1/2} "
      "when PSD, a negative-eigenvalue witness otherwise.");

  // step functions
  py::class_<StepFunction>(m, "StepFunction")
      .def(py::init<int, std::vector<double>, std::vector<CVector>>(),
           py::arg("d"), py::arg("breakpoints"), py::arg("values"))
      .def_static("constant", &StepFunction::constant, py::arg("value"))
      .def_static("zero", &StepFunction::zero, py::arg("d"))
      .def_static("indicator", &StepFunction::indicator, py::arg("value"),
                  py::arg("upto"))
      .def_property_readonly("d", &StepFunction::dim)
      .def_property_readonly("breakpoints", &StepFunction::breakpoints)
      .def_property_readonly("values", &StepFunction::values)
      .def("at", &StepFunction::at, py::arg("s"))
      .def("__eq__", [](const StepFunction& a, const StepFunction& b) {
        return a == b;
      });
  m.def("chi_path", &chi_path, py::arg("f"), py::arg("g"), py::arg("t"));
  m.def("exp_gram", &exp_gram, py::arg("fs"), py::arg("t"));
  m.def("l2_inner", &l2_inner, py::arg("f"), py::arg("g"), py::arg("t"));

  // operator spaces and maps
  py::class_<OperatorSpace>(m, "OperatorSpace")
      .def(py::init<std::vector<CMatrix>>(), py::arg("basis"))
      .def_static("full_algebra", &OperatorSpace::full_algebra, py::arg("m"))
      .def_static("scalar", &OperatorSpace::scalar)
      .def_static("ket_space", &OperatorSpace::ket_space, py::arg("m"))
      .def_static("mat_space", &OperatorSpace::mat_space, py::arg("v"),
                  py::arg("n"))
      .def_property_readonly("m_out", &OperatorSpace::m_out)
      .def_property_readonly("m_in", &OperatorSpace::m_in)
      .def_property_readonly("dim", &OperatorSpace::dim)
      .def_property_readonly("basis", &OperatorSpace::basis)
      .def_property_readonly("is_adjoint_closed",
                             &OperatorSpace::is_adjoint_closed)
      .def_property_readonly("is_system", &OperatorSpace::is_system)
      .def_property_readonly("is_full_algebra", &OperatorSpace::is_full_algebra)
      .def("coords", &OperatorSpace::coords, py::arg("m"))
      .def("residual", &OperatorSpace::residual, py::arg("m"))
      .def(
          "contains",
          [](const OperatorSpace& v, const CMatrix& a) {
            return v.contains(a);
          },
          py::arg("m"))
      .def("reconstruct", &OperatorSpace::reconstruct, py::arg("coords"));

  py::class_<SuperMap>(m, "SuperMap")
      .def_static("identity", &SuperMap::identity, py::arg("v"))
      .def_property_readonly("coord_matrix", &SuperMap::coord_matrix)
      .def_property_readonly("domain", &SuperMap::domain)
      .def_property_readonly("codomain", &SuperMap::codomain)
      .def(
          "apply",
          [](const SuperMap& t, const CMatrix& a) { return t.apply(a); },
          py::arg("m"));
  m.def("schur_action_defect", &schur_action_defect, py::arg("theta"),
        py::arg("n"));

  // semigroup families
  py::class_<Generator>(m, "Generator")
      .def(py::init<OperatorSpace, CMatrix>(), py::arg("space"),
           py::arg("coord"))
      .def_readonly("space", &Generator::space)
      .def_readonly("coord", &Generator::coord);
  m.def("evolve", &evolve, py::arg("generator"), py::arg("t"));

  py::class_<NoisePoints>(m, "NoisePoints")
      .def(py::init<std::vector<CVector>>(), py::arg("points"))
      .def_property_readonly("d", &NoisePoints::d)
      .def("__len__", &NoisePoints::size)
      .def("__getitem__", &NoisePoints::operator[], py::arg("i"))
      .def("index_of", &NoisePoints::index_of, py::arg("x"));

  py::class_<AssociatedFamily>(m, "AssociatedFamily")
      .def(py::init<OperatorSpace, NoisePoints,
                    std::vector<std::vector<CMatrix>>>(),
           py::arg("space"), py::arg("points"), py::arg("gens"))
      .def_property_readonly("space", &AssociatedFamily::space)
      .def_property_readonly("points", &AssociatedFamily::points)
      .def("gen_coord", &AssociatedFamily::gen_coord, py::arg("i"),
           py::arg("j"))
      .def("component", &AssociatedFamily::component, py::arg("i"),
           py::arg("j"), py::arg("t"));

  py::class_<OperatorFamily>(m, "OperatorFamily")
      .def(py::init<int, NoisePoints, std::vector<std::vector<CMatrix>>>(),
           py::arg("hilbert_dim"), py::arg("points"), py::arg("gens"))
      .def_property_readonly("hilbert_dim", &OperatorFamily::hilbert_dim)
      .def_property_readonly("points", &OperatorFamily::points)
      .def("gen", &OperatorFamily::gen, py::arg("i"), py::arg("j"))
      .def("component", &OperatorFamily::component, py::arg("i"), py::arg("j"),
           py::arg("t"));

  m.def("schur_tuple", &schur_tuple, py::arg("family"), py::arg("xs"),
        py::arg("t"));
  m.def("global_semigroup", &global_semigroup, py::arg("family"),
        py::arg("gamma"), py::arg("t"));
  m.def("global_generator", &global_generator, py::arg("family"),
        py::arg("gamma"));
  m.def("tilde_family", &tilde_family, py::arg("family"));
  m.def("trivial_family", &trivial_family, py::arg("space"), py::arg("points"));
  m.def("product_family", &product_family, py::arg("generator"),
        py::arg("points"));
  m.def("contraction_scaled", &contraction_scaled, py::arg("family"),
        py::arg("c"));

  py::class_<CounterexampleFamily>(m, "CounterexampleFamily")
      .def_readonly("generator", &CounterexampleFamily::generator)
      .def_readonly("points", &CounterexampleFamily::points)
      .def_readonly("scale", &CounterexampleFamily::scale);
  m.def("counterexample_family", &counterexample_family,
        py::arg("scale") = 0.5);
  m.def("weyl_scalar_family", &weyl_scalar_family, py::arg("c"),
        py::arg("points"));

  // coherent spans and kernels
  py::class_<CoherentTerm>(m, "CoherentTerm")
      .def(py::init([](const CVector& u, const StepFunction& f) {
             return CoherentTerm{u, f};
           }),
           py::arg("u"), py::arg("f"))
      .def_readonly("u", &CoherentTerm::u)
      .def_readonly("f", &CoherentTerm::f);
  py::class_<CoherentSpanElement>(m, "CoherentSpanElement")
      .def(py::init<std::vector<CoherentTerm>>(), py::arg("terms"))
      .def_property_readonly("terms", &CoherentSpanElement::terms)
      .def("__len__", &CoherentSpanElement::size);
  m.def("span_pairing", &span_pairing, py::arg("xi"), py::arg("eta"),
        py::arg("t"));
  m.def("span_norm_sq", &span_norm_sq, py::arg("xi"), py::arg("t"));
  m.def("weyl_apply", &weyl_apply, py::arg("c"), py::arg("t"), py::arg("xi"));

  py::class_<CocycleKernel>(m, "CocycleKernel")
      .def(py::init<AssociatedFamily>(), py::arg("family"))
      .def_property_readonly("space", &CocycleKernel::space)
      .def("eval", &CocycleKernel::eval, py::arg("f"), py::arg("g"),
           py::arg("t"), py::arg("a"))
      .def("eval_coord", &CocycleKernel::eval_coord, py::arg("f"), py::arg("g"),
           py::arg("t"));
  m.def("cocycle_identity_defect", &cocycle_identity_defect, py::arg("kernel"),
        py::arg("f"), py::arg("g"), py::arg("r"), py::arg("t"), py::arg("a"));
  m.def("weyl_gram_identity_defect", &weyl_gram_identity_defect, py::arg("xs"),
        py::arg("lam"), py::arg("t"));

  // verifiers
  py::class_<SampleSpec>(m, "SampleSpec")
      .def(py::init<>())
      .def_readwrite("n_max", &SampleSpec::n_max)
      .def_readwrite("t_grid", &SampleSpec::t_grid)
      .def_readwrite("trials", &SampleSpec::trials)
      .def_readwrite("seed", &SampleSpec::seed);

  m.def(
      "verify_prop_PP",
      [](const AssociatedFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_prop_PP(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});
  m.def(
      "verify_theorem_Q",
      [](const AssociatedFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_theorem_Q(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});
  m.def(
      "verify_theorem_R",
      [](const Generator& global, const NoisePoints& points,
         const SampleSpec& spec) {
        return verify_json(verify_theorem_R(global, points, spec));
      },
      py::arg("global_generator"), py::arg("points"),
      py::arg("spec") = SampleSpec{});
  m.def(
      "verify_global_rank_one",
      [](const Generator& global, const NoisePoints& points,
         const CVector& zeta, const SampleSpec& spec) {
        return verify_json(verify_global_rank_one(global, points, zeta, spec));
      },
      py::arg("global_generator"), py::arg("points"), py::arg("zeta"),
      py::arg("spec") = SampleSpec{});
  m.def(
      "verify_cstar_interval",
      [](const AssociatedFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_cstar_interval(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});
  m.def(
      "verify_theorem_S",
      [](const AssociatedFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_theorem_S(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});
  m.def(
      "verify_theorem_W",
      [](const OperatorFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_theorem_W(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});
  m.def(
      "verify_left_contraction",
      [](const OperatorFamily& fam, const SampleSpec& spec) {
        return verify_json(verify_left_contraction(fam, spec));
      },
      py::arg("family"), py::arg("spec") = SampleSpec{});

  // config-driven runs
  m.def("suite_registry", [] { return cli::suite_registry(); });
  m.def("run_config_json", &run_config_json, py::arg("config_text"),
        py::arg("seed") = std::nullopt,
        "Parses a JSON config, runs its suites, and returns (exit_code, "
        "report_json).");
}
