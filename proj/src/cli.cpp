#include "qsc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <utility>

#include "qsc/linalg.hpp"

namespace qsc::cli {
namespace {

[[noreturn]] void fail(const std::string& at, const std::string& msg) {
  throw DomainError("Config", at + ": " + msg);
}

std::string item(const std::string& at, int i) {
  return at + "/" + std::to_string(i);
}

std::string key(const std::string& at, const char* name) {
  return at + "/" + name;
}

const Json& field(const Json& j, const char* name, const std::string& at) {
  auto it = j.find(name);
  if (it == j.end()) fail(at, std::string("missing field '") + name + "'");
  return *it;
}

void check_object(const Json& j, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& at) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* name : allowed) {
      if (it.key() == name) known = true;
    }
    if (!known) fail(key(at, it.key().c_str()), "unknown field");
  }
}

double number_at(const Json& j, const std::string& at) {
  if (!j.is_number()) fail(at, "expected a number");
  return j.get<double>();
}

int int_at(const Json& j, const std::string& at, int lo) {
  if (!j.is_number_integer()) fail(at, "expected an integer");
  const long long v = j.get<long long>();
  if (v < lo) fail(at, "must be >= " + std::to_string(lo));
  return static_cast<int>(v);
}

std::string string_at(const Json& j, const std::string& at) {
  if (!j.is_string()) fail(at, "expected a string");
  return j.get<std::string>();
}

std::vector<int> identity_labels(int n) {
  std::vector<int> gamma(static_cast<std::size_t>(n));
  std::iota(gamma.begin(), gamma.end(), 0);
  return gamma;
}

}  // namespace

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Json cvector_to_json(const CVector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(complex_to_json(v[i]));
  return j;
}

Json cmatrix_to_json(const CMatrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_to_json(m(r, c)));
    }
    j.push_back(std::move(row));
  }
  return j;
}

Complex parse_complex(const Json& j, const std::string& at) {
  if (!j.is_array() || j.size() != 2) fail(at, "expected [re, im]");
  return Complex(number_at(j[0], item(at, 0)), number_at(j[1], item(at, 1)));
}

CVector parse_cvector(const Json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected a list of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        parse_complex(j[i], item(at, static_cast<int>(i)));
  }
  return v;
}

CMatrix parse_cmatrix(const Json& j, const std::string& at) {
  if (!j.is_array() || j.empty()) fail(at, "expected a non-empty list of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) fail(item(at, 0), "expected a non-empty row");
  CMatrix m(static_cast<Eigen::Index>(j.size()),
            static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_at = item(at, static_cast<int>(r));
    if (!j[r].is_array() || j[r].size() != cols) {
      fail(row_at, "expected a row of length " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_complex(j[r][c], item(row_at, static_cast<int>(c)));
    }
  }
  return m;
}

Json stepfun_to_json(const StepFunction& f) {
  Json j;
  j["breakpoints"] = f.breakpoints();
  Json vals = Json::array();
  for (const CVector& v : f.values()) vals.push_back(cvector_to_json(v));
  j["values"] = std::move(vals);
  return j;
}

StepFunction parse_stepfun(const Json& j, int d, const std::string& at) {
  check_object(j, at);
  check_keys(j, {"breakpoints", "values"}, at);
  const Json& jb = field(j, "breakpoints", at);
  const Json& jv = field(j, "values", at);
  if (!jb.is_array()) fail(key(at, "breakpoints"), "expected a list of times");
  if (!jv.is_array()) fail(key(at, "values"), "expected a list of vectors");
  std::vector<double> breakpoints;
  for (std::size_t i = 0; i < jb.size(); ++i) {
    breakpoints.push_back(
        number_at(jb[i], item(key(at, "breakpoints"), static_cast<int>(i))));
  }
  if (jv.size() != jb.size() + 1) {
    fail(key(at, "values"), "expected one more value than breakpoints");
  }
  std::vector<CVector> values;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string vat = item(key(at, "values"), static_cast<int>(i));
    CVector v = parse_cvector(jv[i], vat);
    if (v.size() != d) {
      fail(vat, "expected a vector of dimension " + std::to_string(d));
    }
    values.push_back(std::move(v));
  }
  try {
    return StepFunction(d, std::move(breakpoints), std::move(values));
  } catch (const Error& e) {
    fail(at, std::string("invalid step function: ") + e.what());
  }
}

namespace {

SpaceConfig parse_space(const Json& j, const std::string& at) {
  check_object(j, at);
  check_keys(j, {"kind", "m", "basis"}, at);
  SpaceConfig sc;
  sc.kind = string_at(field(j, "kind", at), key(at, "kind"));
  if (sc.kind != "full" && sc.kind != "system" && sc.kind != "space" &&
      sc.kind != "cstar") {
    fail(key(at, "kind"), "expected one of full, system, space, cstar");
  }
  if (sc.kind == "full") {
    sc.m = int_at(field(j, "m", at), key(at, "m"), 1);
    if (j.contains("basis")) fail(key(at, "basis"), "kind full takes no basis");
  } else {
    const Json& jb = field(j, "basis", at);
    if (!jb.is_array() || jb.empty()) {
      fail(key(at, "basis"), "expected a non-empty list of matrices");
    }
    for (std::size_t i = 0; i < jb.size(); ++i) {
      sc.basis.push_back(
          parse_cmatrix(jb[i], item(key(at, "basis"), static_cast<int>(i))));
    }
    if (j.contains("m")) fail(key(at, "m"), "only kind full takes m");
  }
  return sc;
}

FamilyConfig parse_family(const Json& j, const std::string& at) {
  check_object(j, at);
  check_keys(j, {"kind", "scale", "amplitude", "generator", "generators",
                 "base", "zeta"},
             at);
  FamilyConfig fc;
  fc.kind = string_at(field(j, "kind", at), key(at, "kind"));
  const bool known = fc.kind == "trivial" || fc.kind == "product" ||
                     fc.kind == "scaled" || fc.kind == "counterexample" ||
                     fc.kind == "weyl" || fc.kind == "explicit";
  if (!known) {
    fail(key(at, "kind"),
         "expected one of trivial, product, scaled, counterexample, weyl, "
         "explicit");
  }
  auto reject = [&](const char* name, const char* wanted) {
    if (j.contains(name)) {
      fail(key(at, name),
           std::string("only kind ") + wanted + " takes this field");
    }
  };
  if (fc.kind == "product") {
    fc.generator = parse_cmatrix(field(j, "generator", at), key(at, "generator"));
  } else {
    reject("generator", "product");
  }
  if (fc.kind == "scaled" || fc.kind == "counterexample") {
    if (fc.kind == "scaled" || j.contains("scale")) {
      fc.scale = number_at(field(j, "scale", at), key(at, "scale"));
    }
  } else {
    reject("scale", "scaled or counterexample");
  }
  if (fc.kind == "scaled") {
    fc.base = std::make_shared<FamilyConfig>(
        parse_family(field(j, "base", at), key(at, "base")));
    if (fc.base->kind == "counterexample") {
      fail(key(at, "base"), "the counterexample recipe cannot be scaled");
    }
    if (fc.base->zeta) fail(key(at, "base"), "zeta belongs on the outer family");
  } else {
    reject("base", "scaled");
  }
  if (fc.kind == "weyl") {
    fc.amplitude = parse_cvector(field(j, "amplitude", at), key(at, "amplitude"));
    if (fc.amplitude.size() == 0) fail(key(at, "amplitude"), "must be non-empty");
  } else {
    reject("amplitude", "weyl");
  }
  if (fc.kind == "explicit") {
    const Json& jg = field(j, "generators", at);
    const std::string gat = key(at, "generators");
    if (!jg.is_array() || jg.empty()) {
      fail(gat, "expected a non-empty square grid of matrices");
    }
    for (std::size_t r = 0; r < jg.size(); ++r) {
      const std::string rat = item(gat, static_cast<int>(r));
      if (!jg[r].is_array() || jg[r].size() != jg.size()) {
        fail(rat, "expected a row of length " + std::to_string(jg.size()));
      }
      std::vector<CMatrix> row;
      for (std::size_t c = 0; c < jg[r].size(); ++c) {
        row.push_back(parse_cmatrix(jg[r][c], item(rat, static_cast<int>(c))));
      }
      fc.generators.push_back(std::move(row));
    }
  } else {
    reject("generators", "explicit");
  }
  if (j.contains("zeta")) {
    fc.zeta = parse_cvector(*j.find("zeta"), key(at, "zeta"));
  }
  return fc;
}

SampleSpec parse_sample(const Json& j, const std::string& at) {
  check_object(j, at);
  check_keys(j, {"n_max", "t_grid", "trials", "seed"}, at);
  SampleSpec spec;
  if (j.contains("n_max")) {
    spec.n_max = int_at(*j.find("n_max"), key(at, "n_max"), 1);
  }
  if (j.contains("t_grid")) {
    const Json& jt = *j.find("t_grid");
    const std::string tat = key(at, "t_grid");
    if (!jt.is_array() || jt.empty()) fail(tat, "expected a non-empty list");
    spec.t_grid.clear();
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const double t = number_at(jt[i], item(tat, static_cast<int>(i)));
      if (t < 0) fail(item(tat, static_cast<int>(i)), "times must be >= 0");
      spec.t_grid.push_back(t);
    }
  }
  if (j.contains("trials")) {
    spec.trials = int_at(*j.find("trials"), key(at, "trials"), 1);
  }
  if (j.contains("seed")) {
    const Json& js = *j.find("seed");
    if (!js.is_number_unsigned() && !js.is_number_integer()) {
      fail(key(at, "seed"), "expected a nonnegative integer");
    }
    if (js.is_number_integer() && js.get<long long>() < 0) {
      fail(key(at, "seed"), "expected a nonnegative integer");
    }
    spec.seed = js.get<std::uint64_t>();
  }
  return spec;
}

Tolerances parse_tolerances(const Json& j, const std::string& at) {
  check_object(j, at);
  check_keys(j, {"eig_tol", "eq_tol", "pinv_tol"}, at);
  Tolerances tol;
  auto read = [&](const char* name, double& slot) {
    if (!j.contains(name)) return;
    slot = number_at(*j.find(name), key(at, name));
    if (slot <= 0) fail(key(at, name), "must be > 0");
  };
  read("eig_tol", tol.eig_tol);
  read("eq_tol", tol.eq_tol);
  read("pinv_tol", tol.pinv_tol);
  return tol;
}

Json family_to_json(const FamilyConfig& fc) {
  Json j;
  j["kind"] = fc.kind;
  if (fc.kind == "product") j["generator"] = cmatrix_to_json(fc.generator);
  if (fc.kind == "scaled" || fc.kind == "counterexample") j["scale"] = fc.scale;
  if (fc.kind == "scaled" && fc.base) j["base"] = family_to_json(*fc.base);
  if (fc.kind == "weyl") j["amplitude"] = cvector_to_json(fc.amplitude);
  if (fc.kind == "explicit") {
    Json grid = Json::array();
    for (const auto& row : fc.generators) {
      Json jr = Json::array();
      for (const CMatrix& m : row) jr.push_back(cmatrix_to_json(m));
      grid.push_back(std::move(jr));
    }
    j["generators"] = std::move(grid);
  }
  if (fc.zeta) j["zeta"] = cvector_to_json(*fc.zeta);
  return j;
}

}  // namespace

Config parse_config(const Json& j) {
  check_object(j, "/");
  check_keys(j, {"version", "space", "noise", "family", "suites", "sample",
                 "tolerances", "output"},
             "");
  Config c;
  c.version = string_at(field(j, "version", ""), "/version");
  if (c.version != "1") fail("/version", "unsupported version '" + c.version + "'");
  if (j.contains("space")) c.space = parse_space(*j.find("space"), "/space");
  if (j.contains("noise")) {
    const Json& jn = *j.find("noise");
    check_object(jn, "/noise");
    check_keys(jn, {"d", "T"}, "/noise");
    const int d = int_at(field(jn, "d", "/noise"), "/noise/d", 1);
    const Json& jt = field(jn, "T", "/noise");
    if (!jt.is_array() || jt.empty()) {
      fail("/noise/T", "expected a non-empty list of vectors");
    }
    std::vector<CVector> values;
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const std::string vat = item("/noise/T", static_cast<int>(i));
      CVector v = parse_cvector(jt[i], vat);
      if (v.size() != d) {
        fail(vat, "expected a vector of dimension " + std::to_string(d));
      }
      values.push_back(std::move(v));
    }
    if (values[0].norm() > 1e-12) {
      fail("/noise/T/0", "the first noise value must be zero");
    }
    c.noise = std::move(values);
  }
  c.family = parse_family(field(j, "family", ""), "/family");
  const Json& js = field(j, "suites", "");
  if (!js.is_array()) fail("/suites", "expected a list of suite names");
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string sat = item("/suites", static_cast<int>(i));
    const std::string name = string_at(js[i], sat);
    const auto& reg = suite_registry();
    if (std::find(reg.begin(), reg.end(), name) == reg.end()) {
      fail(sat, "unknown suite '" + name + "'");
    }
    c.suites.push_back(name);
  }
  if (j.contains("sample")) c.sample = parse_sample(*j.find("sample"), "/sample");
  if (j.contains("tolerances")) {
    c.tolerances = parse_tolerances(*j.find("tolerances"), "/tolerances");
  }
  if (j.contains("output")) {
    c.output = string_at(*j.find("output"), "/output");
    if (c.output.empty()) fail("/output", "must be a non-empty path");
  }
  return c;
}

Json config_to_json(const Config& c) {
  Json j;
  j["version"] = c.version;
  if (c.space) {
    Json sp;
    sp["kind"] = c.space->kind;
    if (c.space->kind == "full") {
      sp["m"] = c.space->m;
    } else {
      Json basis = Json::array();
      for (const CMatrix& b : c.space->basis) basis.push_back(cmatrix_to_json(b));
      sp["basis"] = std::move(basis);
    }
    j["space"] = std::move(sp);
  }
  if (c.noise) {
    Json noise;
    noise["d"] = static_cast<int>((*c.noise)[0].size());
    Json vals = Json::array();
    for (const CVector& v : *c.noise) vals.push_back(cvector_to_json(v));
    noise["T"] = std::move(vals);
    j["noise"] = std::move(noise);
  }
  j["family"] = family_to_json(c.family);
  j["suites"] = c.suites;
  Json sample;
  sample["n_max"] = c.sample.n_max;
  sample["t_grid"] = c.sample.t_grid;
  sample["trials"] = c.sample.trials;
  sample["seed"] = c.sample.seed;
  j["sample"] = std::move(sample);
  Json tol;
  tol["eig_tol"] = c.tolerances.eig_tol;
  tol["eq_tol"] = c.tolerances.eq_tol;
  tol["pinv_tol"] = c.tolerances.pinv_tol;
  j["tolerances"] = std::move(tol);
  j["output"] = c.output;
  return j;
}

const std::vector<std::string>& suite_registry() {
  static const std::vector<std::string> names = {
      "prop_PP",
      "theorem_Q",
      "theorem_R",
      "global_rank_one",
      "cstar_interval",
      "theorem_S",
      "theorem_W",
      "left_contraction",
      "dichotomy_unital",
      "dichotomy_injective",
      "dichotomy_completely_isometric",
      "dichotomy_isometric",
      "dichotomy_coisometric",
  };
  return names;
}

namespace {

OperatorSpace build_space(const SpaceConfig& sc, const Tolerances& tol) {
  if (sc.kind == "full") return OperatorSpace::full_algebra(sc.m);
  OperatorSpace v = [&] {
    try {
      return OperatorSpace(sc.basis, tol);
    } catch (const Error& e) {
      fail("/space/basis", e.what());
    }
  }();
  if (sc.kind == "system" && !v.is_system()) {
    fail("/space", "the basis does not span an operator system");
  }
  if (sc.kind == "cstar" && !v.is_adjoint_closed()) {
    fail("/space", "the basis is not adjoint-closed");
  }
  return v;
}

AssociatedFamily build_assoc(const FamilyConfig& fc, const std::string& at,
                             const std::optional<OperatorSpace>& space,
                             const NoisePoints& points) {
  auto need_space = [&]() -> const OperatorSpace& {
    if (!space) fail("/space", "required for family kind '" + fc.kind + "'");
    return *space;
  };
  if (fc.kind == "trivial") return trivial_family(need_space(), points);
  if (fc.kind == "product") {
    const OperatorSpace& v = need_space();
    if (fc.generator.rows() != v.dim() || fc.generator.cols() != v.dim()) {
      fail(key(at, "generator"), "expected a " + std::to_string(v.dim()) +
                                     " x " + std::to_string(v.dim()) +
                                     " coordinate matrix");
    }
    return product_family(Generator{v, fc.generator}, points);
  }
  if (fc.kind == "scaled") {
    return contraction_scaled(build_assoc(*fc.base, key(at, "base"), space, points),
                              fc.scale);
  }
  if (fc.kind == "weyl") {
    if (fc.amplitude.size() != points.d()) {
      fail(key(at, "amplitude"), "expected a vector of dimension " +
                                     std::to_string(points.d()));
    }
    const OperatorFamily op = weyl_scalar_family(fc.amplitude, points);
    std::vector<std::vector<CMatrix>> gens(
        static_cast<std::size_t>(points.size()),
        std::vector<CMatrix>(static_cast<std::size_t>(points.size())));
    for (int i = 0; i < points.size(); ++i) {
      for (int j = 0; j < points.size(); ++j) {
        gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            op.gen(i, j);
      }
    }
    return AssociatedFamily(OperatorSpace::scalar(), points, std::move(gens));
  }
  if (fc.kind == "explicit") {
    const OperatorSpace& v = need_space();
    const std::string gat = key(at, "generators");
    if (static_cast<int>(fc.generators.size()) != points.size()) {
      fail(gat, "expected a " + std::to_string(points.size()) + " x " +
                    std::to_string(points.size()) + " grid, one generator per "
                    "pair of noise values");
    }
    for (std::size_t r = 0; r < fc.generators.size(); ++r) {
      for (std::size_t c = 0; c < fc.generators[r].size(); ++c) {
        const CMatrix& g = fc.generators[r][c];
        if (g.rows() != v.dim() || g.cols() != v.dim()) {
          fail(item(item(gat, static_cast<int>(r)), static_cast<int>(c)),
               "expected a " + std::to_string(v.dim()) + " x " +
                   std::to_string(v.dim()) + " coordinate matrix");
        }
      }
    }
    return AssociatedFamily(v, points, fc.generators);
  }
  fail(key(at, "kind"), "no associated family for kind '" + fc.kind + "'");
}

}  // namespace

BuiltFamily build_family(const Config& c) {
  BuiltFamily out;
  if (c.family.kind == "counterexample") {
    CounterexampleFamily cex = counterexample_family(c.family.scale);
    out.points = cex.points;
    out.global = std::move(cex.generator);
  } else {
    if (!c.noise) {
      fail("/noise", "required for family kind '" + c.family.kind + "'");
    }
    try {
      out.points = NoisePoints(*c.noise);
    } catch (const Error& e) {
      fail("/noise/T", e.what());
    }
    std::optional<OperatorSpace> space;
    if (c.space) space = build_space(*c.space, c.tolerances);
    out.assoc = build_assoc(c.family, "/family", space, *out.points);
    if (c.family.kind == "weyl") {
      out.amplitude = c.family.amplitude;
      out.op = weyl_scalar_family(c.family.amplitude, *out.points);
    }
  }
  const int n = out.points->size();
  if (c.family.zeta) {
    if (c.family.zeta->size() != n) {
      fail("/family/zeta",
           "expected a vector of dimension " + std::to_string(n));
    }
    out.zeta = *c.family.zeta;
  } else {
    out.zeta = CVector::Ones(n);
  }
  return out;
}

namespace {

// The scan verifiers name themselves generically; the registry name states
// which property was scanned.
Report relabelled(Report r, const std::string& name) {
  r.verifier = name;
  return r;
}

}  // namespace

Report run_suite(const std::string& name, const BuiltFamily& fam,
                 const SampleSpec& spec) {
  auto need_assoc = [&]() -> const AssociatedFamily& {
    if (!fam.assoc) {
      fail("/suites", "suite '" + name +
                          "' needs an associated family, which this recipe "
                          "does not provide");
    }
    return *fam.assoc;
  };
  auto need_op = [&]() -> const OperatorFamily& {
    if (!fam.op) {
      fail("/suites", "suite '" + name +
                          "' needs an operator family (family kind weyl)");
    }
    return *fam.op;
  };
  auto need_amplitude = [&]() -> const CVector& {
    if (!fam.amplitude) {
      fail("/suites", "suite '" + name +
                          "' needs a Weyl amplitude (family kind weyl)");
    }
    return *fam.amplitude;
  };
  auto global = [&]() -> Generator {
    if (fam.global) return *fam.global;
    return global_generator(need_assoc(), identity_labels(fam.points->size()));
  };
  if (name == "prop_PP") return verify_prop_PP(need_assoc(), spec);
  if (name == "theorem_Q") return verify_theorem_Q(need_assoc(), spec);
  if (name == "theorem_R") return verify_theorem_R(global(), *fam.points, spec);
  if (name == "global_rank_one") {
    return verify_global_rank_one(global(), *fam.points, fam.zeta, spec);
  }
  if (name == "cstar_interval") return verify_cstar_interval(need_assoc(), spec);
  if (name == "theorem_S") return verify_theorem_S(need_assoc(), spec);
  if (name == "theorem_W") return verify_theorem_W(need_op(), spec);
  if (name == "left_contraction") {
    return verify_left_contraction(need_op(), spec);
  }
  if (name == "dichotomy_unital") {
    return relabelled(dichotomy_scan(CocycleKernel(need_assoc()),
                                     ScanProperty::Unital, spec),
                      name);
  }
  if (name == "dichotomy_completely_isometric") {
    return relabelled(dichotomy_scan(CocycleKernel(need_assoc()),
                                     ScanProperty::CompletelyIsometric, spec),
                      name);
  }
  if (name == "dichotomy_injective") {
    if (fam.assoc) {
      return relabelled(dichotomy_scan(CocycleKernel(*fam.assoc),
                                       ScanProperty::Injective, spec),
                        name);
    }
    return relabelled(dichotomy_scan_weyl(need_amplitude(), *fam.points,
                                          ScanProperty::Injective, spec),
                      name);
  }
  if (name == "dichotomy_isometric") {
    return relabelled(dichotomy_scan_weyl(need_amplitude(), *fam.points,
                                          ScanProperty::Isometric, spec),
                      name);
  }
  if (name == "dichotomy_coisometric") {
    return relabelled(dichotomy_scan_weyl(need_amplitude(), *fam.points,
                                          ScanProperty::Coisometric, spec),
                      name);
  }
  fail("/suites", "unknown suite '" + name + "'");
}

namespace {

int exit_code_for(const std::vector<Report>& reports) {
  bool inconclusive = false;
  for (const Report& r : reports) {
    if (r.conclusion == Conclusion::Fail) return 1;
    if (r.conclusion == Conclusion::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

std::string short_number(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << std::scientific << x;
  return s.str();
}

std::string summary_text(const std::vector<Report>& reports, int code) {
  std::ostringstream s;
  for (const Report& r : reports) {
    s << "suite " << r.verifier << ": " << conclusion_name(r.conclusion)
      << "\n";
    for (const Check& c : r.checks) {
      if (c.verdict.passed && !c.inconclusive) continue;
      s << "  " << c.label << ": "
        << (c.inconclusive ? "inconclusive" : "failed") << ", worst violation "
        << short_number(c.verdict.worst_violation);
      if (!c.verdict.witness.empty()) s << ", witness: " << c.verdict.witness;
      s << "\n";
    }
  }
  s << "overall: " << (code == 0 ? "pass" : code == 1 ? "fail" : "inconclusive")
    << "\n";
  return s.str();
}

}  // namespace

RunOutcome run_config(const Config& c, std::optional<std::uint64_t> seed,
                      int threads) {
  if (threads < 1) fail("/threads", "must be >= 1");
  SampleSpec spec = c.sample;
  if (seed) spec.seed = *seed;
  const BuiltFamily fam = build_family(c);
  std::vector<Report> reports;
  for (const std::string& name : c.suites) {
    reports.push_back(run_suite(name, fam, spec));
  }
  RunOutcome out;
  out.exit_code = exit_code_for(reports);
  Config effective = c;
  effective.sample.seed = spec.seed;
  out.report["version"] = "1";
  out.report["seed"] = spec.seed;
  out.report["threads"] = threads;
  out.report["config"] = config_to_json(effective);
  Json suites = Json::array();
  for (const Report& r : reports) suites.push_back(Json::parse(report_to_json(r)));
  out.report["suites"] = std::move(suites);
  out.summary = summary_text(reports, out.exit_code);
  return out;
}

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {
      "trivial", "product-dephasing", "counterexample", "weyl", "violator"};
  return names;
}

namespace {

SampleSpec demo_sample() {
  SampleSpec spec;
  spec.n_max = 3;
  spec.t_grid = {0.25, 0.5, 1.0, 2.0};
  spec.trials = 80;
  spec.seed = 2026;
  return spec;
}

std::vector<CVector> scalar_noise(std::initializer_list<Complex> xs) {
  std::vector<CVector> out;
  for (const Complex& x : xs) {
    CVector v(1);
    v[0] = x;
    out.push_back(v);
  }
  return out;
}

std::string matrix_line(const CMatrix& m) {
  std::ostringstream s;
  s << std::setprecision(6) << "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s << "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex z = m(r, c);
      if (std::abs(z.imag()) < 1e-12) {
        s << z.real();
      } else {
        s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
          << "i";
      }
      if (c + 1 < m.cols()) s << ", ";
    }
    s << "]";
    if (r + 1 < m.rows()) s << ", ";
  }
  s << "]";
  return s.str();
}

}  // namespace

Config demo_config(const std::string& name) {
  Config c;
  c.sample = demo_sample();
  c.output = "qsc-" + name + "-report.json";
  if (name == "trivial") {
    c.space = SpaceConfig{"full", 2, {}};
    c.noise = scalar_noise({Complex(0, 0), Complex(1, 0), Complex(0, 1)});
    c.family.kind = "trivial";
    c.suites = {"prop_PP", "theorem_Q"};
    return c;
  }
  if (name == "product-dephasing") {
    c.space = SpaceConfig{"full", 2, {}};
    c.noise = scalar_noise({Complex(0, 0), Complex(1, 0), Complex(0, 1)});
    c.family.kind = "product";
    CVector diag(4);
    diag << Complex(0, 0), Complex(-2, 0), Complex(-2, 0), Complex(0, 0);
    c.family.generator = diag.asDiagonal();
    c.suites = {"prop_PP", "theorem_Q", "theorem_R"};
    return c;
  }
  if (name == "counterexample") {
    c.family.kind = "counterexample";
    c.family.scale = 0.5;
    c.suites = {"theorem_R"};
    return c;
  }
  if (name == "weyl") {
    c.noise = scalar_noise({Complex(0, 0), Complex(1, 0), Complex(0, 1)});
    c.family.kind = "weyl";
    CVector amp(1);
    amp[0] = Complex(0.6, 0.8);
    c.family.amplitude = amp;
    c.suites = {"left_contraction", "dichotomy_isometric",
                "dichotomy_coisometric"};
    return c;
  }
  if (name == "violator") {
    c.space = SpaceConfig{"full", 2, {}};
    c.noise = scalar_noise({Complex(0, 0), Complex(1, 0), Complex(0, 1)});
    c.family.kind = "scaled";
    c.family.scale = -1.0;
    c.family.base = std::make_shared<FamilyConfig>();
    c.family.base->kind = "trivial";
    c.suites = {"prop_PP", "theorem_S"};
    return c;
  }
  throw DomainError("UnknownDemo", "no demo named '" + name +
                                       "'; expected one of trivial, "
                                       "product-dephasing, counterexample, "
                                       "weyl, violator");
}

int run_demo(const std::string& name, std::ostream& out) {
  const Config c = demo_config(name);
  if (name == "counterexample") {
    const CounterexampleFamily cex = counterexample_family(c.family.scale);
    out << "non-Schur-action generator at scale " << c.family.scale
        << ": semigroup applied to the all-ones 2x2 matrix\n";
    for (double t : {0.5, 1.0, 2.0}) {
      const CMatrix p = evolve(cex.generator, t).apply(
          CMatrix::Ones(2, 2));
      out << "  t=" << t << ": " << matrix_line(p)
          << "  (off-diagonal e^(-t/2) = " << std::setprecision(6)
          << std::exp(-c.family.scale * t) << ")\n";
    }
    out << "the off-diagonal decay matches the expectation semigroup of a "
           "Schur-action family, yet no such family exists: the "
           "matrix-unit normalisation fails at the pair (0,0).\n";
  }
  if (name == "weyl") {
    const double half_sq = 0.5 * std::norm(Complex(0.6, 0.8));
    const OperatorFamily op = weyl_scalar_family(c.family.amplitude,
                                                 NoisePoints(*c.noise));
    out << "Weyl cocycle vacuum expectation |T_t| against the closed form "
           "e^(-t|c|^2/2), c = 0.6+0.8i:\n";
    for (double t : c.sample.t_grid) {
      const double computed = std::abs(op.component(0, 0, t)(0, 0));
      out << "  t=" << t << ": computed " << std::setprecision(6) << computed
          << ", closed form " << std::exp(-half_sq * t) << "\n";
    }
  }
  if (name == "violator") {
    out << "deliberate violator: every component multiplied by e^(+t), "
           "breaking the grammian bound; the suites below must fail.\n";
  }
  if (name == "product-dephasing") {
    out << "dephasing product recipe: unital CP semigroup with off-diagonal "
           "decay e^(-2t), multiplied by the scalar grammian factor.\n";
  }
  RunOutcome r = run_config(c, std::nullopt, 1);
  if (name == "trivial") {
    out << "identity recipe: every component is e^(-t chi(x,y)) id, so the "
           "grammian domination is an equality and the kernel is unital.\n";
    for (const Json& suite : r.report["suites"]) {
      for (const Json& check : suite["checks"]) {
        const std::string label = check["label"].get<std::string>();
        if (label == "unitality forces grammian equality") {
          out << "  equality defect over samples: "
              << short_number(check["worst_violation"].get<double>()) << "\n";
        }
        if (label == "unitality iff grammian equality") {
          out << "  kernel cross-check: " << check["witness"].get<std::string>()
              << "\n";
        }
      }
    }
  }
  out << r.summary;
  return r.exit_code;
}

KernelEvalResult kernel_eval(const Config& c, const StepFunction& f,
                             const StepFunction& g, double t, const CMatrix& a,
                             const std::vector<double>& extra_cuts) {
  const BuiltFamily fam = build_family(c);
  if (!fam.assoc) {
    fail("/family", "kernel evaluation needs an associated family, which this "
                    "recipe does not provide");
  }
  const CocycleKernel kernel(*fam.assoc);
  KernelEvalResult out;
  std::vector<double> cuts;
  for (const StepFunction* h : {&f, &g}) {
    for (double b : h->breakpoints()) {
      if (b < t - kTimeTieTol) cuts.push_back(b);
    }
  }
  for (double b : extra_cuts) {
    if (b > kTimeTieTol && b < t - kTimeTieTol) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  out.partition.push_back(0.0);
  for (double b : cuts) {
    if (out.partition.empty() ||
        b - out.partition.back() > kTimeTieTol) {
      out.partition.push_back(b);
    }
  }
  if (t > kTimeTieTol) out.partition.push_back(t);
  if (extra_cuts.empty()) {
    out.value = kernel.eval(f, g, t, a);
  } else {
    const OperatorSpace& v = kernel.space();
    const CMatrix coord = kernel.eval_coord_on_partition(f, g, t, cuts);
    out.value = v.reconstruct(coord * v.coords(a));
  }
  return out;
}

Json kernel_eval_to_json(const KernelEvalResult& r) {
  Json j;
  j["value"] = cmatrix_to_json(r.value);
  j["partition"] = r.partition;
  return j;
}

}  // namespace qsc::cli
