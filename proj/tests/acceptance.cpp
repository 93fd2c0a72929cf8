// Acceptance gate: one pass/fail line per criterion, exit code counts the
// failures.  Each criterion re-derives its expected values independently of
// the library paths it exercises.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsc/cli.hpp"
#include "qsc/kernel.hpp"
#include "qsc/linalg.hpp"
#include "qsc/opspace.hpp"
#include "qsc/semigroup.hpp"
#include "qsc/verify.hpp"

using namespace qsc;

namespace {

std::string g_qsc_path;

CVector scalar_point(Complex z) {
  CVector v(1);
  v[0] = z;
  return v;
}

NoisePoints three_points() {
  return NoisePoints({scalar_point(0.0), scalar_point(1.0),
                      scalar_point(Complex(0.0, 1.0))});
}

Generator dephasing_generator() {
  CMatrix coord = CMatrix::Zero(4, 4);
  coord(1, 1) = -2.0;
  coord(2, 2) = -2.0;
  return Generator{OperatorSpace::full_algebra(2), coord};
}

const Check* find_check(const Report& r, const std::string& label) {
  for (const Check& c : r.checks) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

// Collects failure messages; empty result means the criterion passed.
class Gate {
 public:
  void require(bool ok, const std::string& msg) {
    if (!ok) failures_ << (failures_.str().empty() ? "" : "; ") << msg;
  }
  void require_le(double value, double bound, const std::string& what) {
    if (!(value <= bound)) {
      std::ostringstream s;
      s << what << " = " << value << " exceeds " << bound;
      require(false, s.str());
    }
  }
  void require_ge(double value, double bound, const std::string& what) {
    if (!(value >= bound)) {
      std::ostringstream s;
      s << what << " = " << value << " below " << bound;
      require(false, s.str());
    }
  }
  std::string result() const { return failures_.str(); }

 private:
  std::ostringstream failures_;
};

// Criterion 1: the closed form of the non-Schur-action semigroup, its
// Schur-action defect, and the failing matrix-unit normalisation; the scale
// parameterization is pinned by the c = 1 variant.
std::string criterion_counterexample() {
  Gate gate;
  const CounterexampleFamily half = counterexample_family(0.5);
  const CMatrix ones = CMatrix::Ones(2, 2);
  for (double t : {0.5, 1.0, 2.0}) {
    CMatrix expected = CMatrix::Ones(2, 2);
    expected(0, 1) = std::exp(-0.5 * t);
    expected(1, 0) = expected(0, 1);
    const CMatrix got = evolve(half.generator, t).apply(ones);
    gate.require_le(max_abs(got - expected), 1e-10,
                    "closed form defect at t=" + std::to_string(t));
  }
  const CMatrix at_one = evolve(half.generator, 1.0).apply(ones);
  gate.require_le(std::abs(at_one(0, 1) - Complex(0.6065306597, 0.0)), 1e-9,
                  "off-diagonal against 0.6065306597");

  gate.require_ge(schur_action_defect(evolve(half.generator, 1.0), 2), 0.1,
                  "schur action defect at t=1");

  CMatrix e00 = CMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  const CMatrix normalised = evolve(half.generator, 1.0).apply(e00);
  gate.require_ge(op_norm(normalised - e00), 0.2,
                  "matrix unit normalisation violation at (0,0), t=1");

  const CounterexampleFamily unit = counterexample_family(1.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const CMatrix got = evolve(unit.generator, t).apply(ones);
    gate.require_le(std::abs(got(0, 1) - std::exp(-t)), 1e-10,
                    "scale-1 off-diagonal e^(-t) at t=" + std::to_string(t));
  }
  return gate.result();
}

// Criterion 2: hypotheses and kernel conclusions for the dephasing product
// family, plus the shift cocycle identity at tight tolerance.
std::string criterion_kernel_round_trip() {
  Gate gate;
  const AssociatedFamily fam =
      product_family(dephasing_generator(), three_points());
  SampleSpec spec;
  spec.n_max = 4;
  spec.trials = 200;
  spec.seed = 5;
  const Report report = verify_theorem_Q(fam, spec);
  gate.require(report.conclusion == Conclusion::Pass,
               "theorem_Q conclusion is not pass");
  for (const char* label :
       {"tuple positivity hypothesis", "grammian domination hypothesis",
        "kernel complete positivity", "kernel contractivity",
        "unitality iff grammian equality"}) {
    const Check* c = find_check(report, label);
    gate.require(c != nullptr && c->verdict.passed && !c->inconclusive,
                 std::string("check '") + label + "' did not pass");
  }

  const CocycleKernel kernel(fam);
  Rng rng(401);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const StepFunction f = sample_step(fam.points(), 2.0, 3, rng);
    const StepFunction g = sample_step(fam.points(), 2.0, 3, rng);
    const double r = rng.uniform(0.1, 1.0);
    const double t = rng.uniform(0.1, 1.0);
    const CMatrix a = rng.cmatrix(2, 2);
    worst = std::max(worst,
                     cocycle_identity_defect(kernel, f, g, r, t, a));
  }
  gate.require_le(worst, 1e-10, "cocycle identity defect over 200 draws");
  return gate.result();
}

// Criterion 3: compressing I (x) lambda (x) I through Weyl columns matches
// the Schur product with the exponential Grammian, and the Weyl operators
// satisfy the CCR in Weyl form on coherent spans.
std::string criterion_weyl_gram() {
  Gate gate;
  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(1, 4);
    const int d = rng.uniform_int(1, 2);
    std::vector<CVector> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.cvector(d));
    const CMatrix g = rng.cmatrix(n, n);
    const CMatrix lambda = g * g.adjoint() / static_cast<double>(n);
    const double t = rng.uniform(0.1, 2.0);
    worst = std::max(worst, weyl_gram_identity_defect(xs, lambda, t));
  }
  gate.require_le(worst, 1e-10, "weyl gram identity defect over 100 draws");

  double ccr_worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.uniform_int(1, 2);
    const int terms = rng.uniform_int(1, 3);
    std::vector<CoherentTerm> base;
    for (int i = 0; i < terms; ++i) {
      std::vector<double> cuts = {rng.uniform(0.2, 1.0)};
      base.push_back(CoherentTerm{
          rng.cvector(2),
          StepFunction(d, cuts, {rng.cvector(d), rng.cvector(d)})});
    }
    const CoherentSpanElement xi(base);
    const CVector c1 = rng.cvector(d);
    const CVector c2 = rng.cvector(d);
    const double t = rng.uniform(0.2, 1.5);
    const CoherentSpanElement lhs = weyl_apply(c2, t, weyl_apply(c1, t, xi));
    const CoherentSpanElement sum = weyl_apply(c1 + c2, t, xi);
    const Complex phase =
        std::exp(Complex(0.0, -t * (c2.dot(c1)).imag()));
    for (int i = 0; i < lhs.size(); ++i) {
      const CoherentTerm& a = lhs.terms()[static_cast<std::size_t>(i)];
      const CoherentTerm& b = sum.terms()[static_cast<std::size_t>(i)];
      ccr_worst = std::max(ccr_worst, (a.u - phase * b.u).norm());
      for (double s = 0.05; s < t + 1.5; s += 0.17) {
        ccr_worst = std::max(ccr_worst, (a.f.at(s) - b.f.at(s)).norm());
      }
    }
  }
  gate.require_le(ccr_worst, 1e-12, "CCR residual over 50 draws");
  return gate.result();
}

// Criterion 4: factoring PSD 2x2-block matrices yields a contraction that
// reconstructs the corner; non-PSD inputs yield a negative-eigenvalue
// witness.
std::string criterion_block_factor() {
  Gate gate;
  Rng rng(901);
  double worst_norm = 0.0;
  double worst_recon = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.uniform_int(1, 4);
    const int l = rng.uniform_int(1, 4);
    const int rank = rng.uniform_int(1, k + l);
    const CMatrix g = rng.cmatrix(k + l, rank);
    const CMatrix big = g * g.adjoint();
    const CMatrix a = big.topLeftCorner(k, k);
    const CMatrix b = big.topRightCorner(k, l);
    const CMatrix d = big.bottomRightCorner(l, l);
    const BlockFactorResult res = block_psd_factor(a, b, d);
    if (!res.psd) {
      gate.require(false, "PSD block rejected at trial " +
                              std::to_string(trial));
      continue;
    }
    worst_norm = std::max(worst_norm, op_norm(res.contraction));
    worst_recon = std::max(
        worst_recon,
        op_norm(b - psd_sqrt(a) * res.contraction * psd_sqrt(d)));
  }
  gate.require_le(worst_norm, 1.0 + 1e-8, "factor operator norm");
  gate.require_le(worst_recon, 1e-8, "reconstruction residual");

  for (int trial = 0; trial < 200; ++trial) {
    const int k = rng.uniform_int(1, 4);
    const int l = rng.uniform_int(1, 4);
    const CMatrix g = rng.cmatrix(k + l, k + l);
    CMatrix herm = (g + g.adjoint()) / 2.0;
    const double shift = min_herm_eig(herm) + rng.uniform(0.1, 1.0);
    herm -= shift * CMatrix::Identity(k + l, k + l);
    const BlockFactorResult res =
        block_psd_factor(herm.topLeftCorner(k, k), herm.topRightCorner(k, l),
                         herm.bottomRightCorner(l, l));
    gate.require(!res.psd, "non-PSD block accepted at trial " +
                               std::to_string(trial));
    if (!res.psd) {
      gate.require(res.min_eigenvalue < 0.0,
                   "missing negative-eigenvalue witness at trial " +
                       std::to_string(trial));
    }
  }
  return gate.result();
}

// Criterion 5: the kneaded norm bound and tilde-positivity verdicts agree on
// families of known contraction status, and the deliberate expansions fail
// with witnesses.
std::string criterion_contraction_agreement() {
  Gate gate;
  const NoisePoints pts = three_points();
  const OperatorSpace scalar = OperatorSpace::scalar();
  const OperatorSpace full2 = OperatorSpace::full_algebra(2);
  struct Entry {
    std::string name;
    AssociatedFamily fam;
    bool contractive;
  };
  const std::vector<Entry> entries = {
      {"scalar identity", trivial_family(scalar, pts), true},
      {"scalar shrunk", contraction_scaled(trivial_family(scalar, pts), 0.5),
       true},
      {"scalar expanded", contraction_scaled(trivial_family(scalar, pts), -0.4),
       false},
      {"mat2 identity", trivial_family(full2, pts), true},
      {"mat2 dephasing", product_family(dephasing_generator(), pts), true},
      {"mat2 expanded", contraction_scaled(trivial_family(full2, pts), -1.0),
       false},
  };
  SampleSpec spec;
  spec.n_max = 3;
  spec.trials = 200;
  spec.seed = 23;
  for (const Entry& entry : entries) {
    const Report report = verify_theorem_S(entry.fam, spec);
    const Check* agree = find_check(report, "criteria agree per trial");
    gate.require(agree != nullptr && agree->verdict.passed,
                 entry.name + ": criteria verdicts disagree");
    if (entry.contractive) {
      gate.require(report.conclusion == Conclusion::Pass,
                   entry.name + ": expected pass");
    } else {
      gate.require(report.conclusion == Conclusion::Fail,
                   entry.name + ": expected fail");
      bool witnessed = false;
      for (const Check& c : report.checks) {
        if (!c.verdict.passed && !c.verdict.witness.empty()) witnessed = true;
      }
      gate.require(witnessed, entry.name + ": failure lacks a witness");
    }
  }
  return gate.result();
}

// Criterion 6: the commuting e^{-ct} gram operator family against the
// operator interval and left kneaded bound, and a random non-commuting
// family against the commutativity hypothesis.
std::string criterion_operator_family() {
  Gate gate;
  const NoisePoints pts = three_points();
  auto scaled_gram_family = [&](double c) {
    std::vector<std::vector<CMatrix>> gens(3, std::vector<CMatrix>(3));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CMatrix g(1, 1);
        g(0, 0) = -c - chi(pts[i], pts[j]);
        gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g;
      }
    }
    return OperatorFamily(1, pts, gens);
  };
  SampleSpec spec;
  spec.trials = 120;
  spec.seed = 31;
  for (double c : {0.0, 0.5}) {
    const OperatorFamily fam = scaled_gram_family(c);
    gate.require(verify_theorem_W(fam, spec).conclusion == Conclusion::Pass,
                 "theorem_W expected pass at c=" + std::to_string(c));
    gate.require(
        verify_left_contraction(fam, spec).conclusion == Conclusion::Pass,
        "left contraction expected pass at c=" + std::to_string(c));
  }
  const OperatorFamily growing = scaled_gram_family(-0.5);
  const Report w = verify_theorem_W(growing, spec);
  gate.require(w.conclusion == Conclusion::Fail,
               "theorem_W expected fail at c=-0.5");
  const Check* interval = find_check(w, "operator interval");
  gate.require(interval != nullptr && !interval->verdict.passed &&
                   !interval->verdict.witness.empty(),
               "upper bound failure lacks a witness");
  const Report left = verify_left_contraction(growing, spec);
  gate.require(left.conclusion == Conclusion::Fail,
               "left contraction expected fail at c=-0.5");

  Rng rng(55);
  std::vector<std::vector<CMatrix>> gens(2, std::vector<CMatrix>(2));
  const NoisePoints two({scalar_point(0.0), scalar_point(1.0)});
  for (auto& row : gens) {
    for (auto& g : row) g = rng.cmatrix(2, 2);
  }
  const Report noncomm =
      verify_theorem_W(OperatorFamily(2, two, gens), spec);
  const Check* comm = find_check(noncomm, "components commute");
  gate.require(comm != nullptr && !comm->verdict.passed,
               "random family unexpectedly commutes");
  if (comm != nullptr && !comm->verdict.passed) {
    gate.require_ge(comm->verdict.worst_violation, 1e-3,
                    "commutator norm witness");
    gate.require(!comm->verdict.witness.empty(),
                 "commutativity failure lacks a witness");
  }
  return gate.result();
}

// Criterion 7: the entrywise product of PSD matrices stays PSD, and the
// exponential Grammian is multiplicative in t entrywise.
std::string criterion_schur_positivity() {
  Gate gate;
  Rng rng(613);
  double worst_eig = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.uniform_int(2, 6);
    const CMatrix g = rng.cmatrix(n, n);
    const CMatrix h = rng.cmatrix(n, n);
    const CMatrix prod =
        (g * g.adjoint()).cwiseProduct(h * h.adjoint());
    worst_eig = std::min(worst_eig, min_herm_eig(prod));
  }
  gate.require_ge(worst_eig, -1e-10, "schur product minimum eigenvalue");

  double worst_mult = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 5);
    const int d = rng.uniform_int(1, 2);
    std::vector<CVector> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.cvector(d));
    const double s = rng.uniform(0.05, 1.0);
    const double t = rng.uniform(0.05, 1.0);
    worst_mult = std::max(
        worst_mult,
        max_abs(gram_matrix(xs, s + t) -
                gram_matrix(xs, s).cwiseProduct(gram_matrix(xs, t))));
  }
  gate.require_le(worst_mult, 1e-14, "gram multiplicativity defect");
  return gate.result();
}

// Criterion 8: every scanned property of the bundled families is
// all-or-nothing across the time grid.
std::string criterion_dichotomy() {
  Gate gate;
  SampleSpec spec;
  spec.n_max = 3;
  spec.t_grid = {0.1, 0.25, 0.5, 1.0, 2.0};
  spec.trials = 60;
  spec.seed = 17;
  const std::vector<std::pair<std::string, std::vector<std::string>>> plan = {
      {"trivial",
       {"dichotomy_unital", "dichotomy_injective",
        "dichotomy_completely_isometric"}},
      {"product-dephasing",
       {"dichotomy_unital", "dichotomy_injective",
        "dichotomy_completely_isometric"}},
      {"weyl",
       {"dichotomy_isometric", "dichotomy_coisometric",
        "dichotomy_injective"}},
      {"violator",
       {"dichotomy_unital", "dichotomy_injective",
        "dichotomy_completely_isometric"}},
  };
  for (const auto& [demo, suites] : plan) {
    const cli::BuiltFamily fam = cli::build_family(cli::demo_config(demo));
    for (const std::string& suite : suites) {
      const Report report = cli::run_suite(suite, fam, spec);
      if (report.conclusion != Conclusion::Pass) {
        std::string witness;
        for (const Check& c : report.checks) {
          if (!c.verdict.passed) witness = c.verdict.witness;
        }
        gate.require(false, demo + "/" + suite + " mixed pattern: " + witness);
      }
    }
  }
  return gate.result();
}

// Criterion 9: rerunning the binary on the same config and seed reproduces
// the report byte for byte.
std::string criterion_determinism() {
  Gate gate;
  if (g_qsc_path.empty()) {
    gate.require(false, "path to the qsc binary was not provided");
    return gate.result();
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qsc-acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "version": "1",
      "space": {"kind": "full", "m": 2},
      "noise": {"d": 1, "T": [[[0,0]], [[1,0]], [[0,1]]]},
      "family": {"kind": "trivial"},
      "suites": ["prop_PP", "theorem_S"],
      "sample": {"n_max": 2, "t_grid": [0.5, 1.0], "trials": 40, "seed": 12}
    })";
  }
  auto run_once = [&](const std::string& out_name) -> int {
    const std::string cmd = g_qsc_path + " run --config " + cfg.string() +
                            " --out " + (dir / out_name).string() +
                            " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int rc1 = run_once("rep1.json");
  const int rc2 = run_once("rep2.json");
  gate.require(rc1 == 0, "first run exited with " + std::to_string(rc1));
  gate.require(rc2 == 0, "second run exited with " + std::to_string(rc2));
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::string rep1 = slurp(dir / "rep1.json");
  const std::string rep2 = slurp(dir / "rep2.json");
  gate.require(!rep1.empty(), "first report is empty");
  gate.require(rep1 == rep2, "reports differ between identical runs");
  return gate.result();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_qsc_path = argv[1];
  const std::vector<std::pair<std::string, std::function<std::string()>>>
      criteria = {
          {"counterexample closed form and failing normalisation",
           criterion_counterexample},
          {"kernel construction round trip", criterion_kernel_round_trip},
          {"weyl gram identity and CCR", criterion_weyl_gram},
          {"block factorization", criterion_block_factor},
          {"contractivity criteria agreement", criterion_contraction_agreement},
          {"operator family criteria", criterion_operator_family},
          {"schur positivity and gram multiplicativity",
           criterion_schur_positivity},
          {"dichotomy scans", criterion_dichotomy},
          {"report determinism", criterion_determinism},
      };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string message;
    try {
      message = criteria[i].second();
    } catch (const std::exception& e) {
      message = std::string("exception: ") + e.what();
    }
    if (message.empty()) {
      std::cout << "criterion " << (i + 1) << " (" << criteria[i].first
                << "): pass\n";
    } else {
      ++failures;
      std::cout << "criterion " << (i + 1) << " (" << criteria[i].first
                << "): FAIL - " << message << "\n";
    }
  }
  return failures;
}
