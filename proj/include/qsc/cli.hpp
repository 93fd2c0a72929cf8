#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsc/kernel.hpp"
#include "qsc/verify.hpp"

namespace qsc::cli {

// Insertion-ordered so that serialisation is stable across runs.
using Json = nlohmann::ordered_json;

// Complex numbers serialise as [re, im]; vectors as lists of those;
// matrices as row-major nested lists.  Parsers throw DomainError("Config")
// whose message starts with the JSON pointer of the offending node.
Json complex_to_json(const Complex& z);
Json cvector_to_json(const CVector& v);
Json cmatrix_to_json(const CMatrix& m);
Complex parse_complex(const Json& j, const std::string& at);
CVector parse_cvector(const Json& j, const std::string& at);
CMatrix parse_cmatrix(const Json& j, const std::string& at);

// {"breakpoints": [...], "values": [vector, ...]} with one more value than
// breakpoints; the last value is the tail.
Json stepfun_to_json(const StepFunction& f);
StepFunction parse_stepfun(const Json& j, int d, const std::string& at);

// kind full takes m; kinds system, space, and cstar take an explicit basis.
struct SpaceConfig {
  std::string kind = "full";
  int m = 0;
  std::vector<CMatrix> basis;
};

// One family recipe.  scale and base serve kind scaled (and scale alone the
// counterexample), amplitude serves kind weyl, generator kind product, and
// generators kind explicit; zeta is an optional rank-one weight vector.
struct FamilyConfig {
  std::string kind = "trivial";
  double scale = 0.5;
  CVector amplitude;
  CMatrix generator;
  std::vector<std::vector<CMatrix>> generators;
  std::shared_ptr<FamilyConfig> base;
  std::optional<CVector> zeta;
};

struct Config {
  std::string version = "1";
  std::optional<SpaceConfig> space;
  std::optional<std::vector<CVector>> noise;
  FamilyConfig family;
  std::vector<std::string> suites;
  SampleSpec sample;
  Tolerances tolerances;
  std::string output = "qsc-report.json";
};

// Schema-validating parse; round-trips with config_to_json.
Config parse_config(const Json& j);
Json config_to_json(const Config& c);

// The closed list of runnable suite names; unknown names are config errors.
const std::vector<std::string>& suite_registry();

// A realised family: which handles exist depends on the recipe kind.  The
// counterexample carries only a global generator; weyl carries an operator
// family, its amplitude, and a scalar associated family; the rest carry an
// associated family.
struct BuiltFamily {
  std::optional<AssociatedFamily> assoc;
  std::optional<OperatorFamily> op;
  std::optional<Generator> global;
  std::optional<NoisePoints> points;
  std::optional<CVector> amplitude;
  CVector zeta;
};

BuiltFamily build_family(const Config& c);

// Runs one registry suite against the realised family; throws
// DomainError("Config") when the family lacks the handle the suite needs.
Report run_suite(const std::string& name, const BuiltFamily& fam,
                 const SampleSpec& spec);

struct RunOutcome {
  int exit_code = 0;
  Json report;
  std::string summary;
};

// Runs every configured suite.  Exit code 0 when all pass, 1 on any
// conclusive failure, 3 when the only blemish is an inconclusive suite.
RunOutcome run_config(const Config& c, std::optional<std::uint64_t> seed,
                      int threads = 1);

// Bundled demonstrations; names: trivial, product-dephasing,
// counterexample, weyl, violator.  Throws DomainError("UnknownDemo").
const std::vector<std::string>& demo_names();
Config demo_config(const std::string& name);
int run_demo(const std::string& name, std::ostream& out);

struct KernelEvalResult {
  CMatrix value;
  std::vector<double> partition;
};

// Evaluates k^{f,g}_t(a) through the configured family and reports the
// time partition used; extra_cuts refine the partition without changing
// the value.
KernelEvalResult kernel_eval(const Config& c, const StepFunction& f,
                             const StepFunction& g, double t, const CMatrix& a,
                             const std::vector<double>& extra_cuts = {});
Json kernel_eval_to_json(const KernelEvalResult& r);

}  // namespace qsc::cli
