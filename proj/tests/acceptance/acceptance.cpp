// Acceptance criteria 1-12, each at its pinned tolerance and time budget.
// Metric values come from the property registry; the thresholds below are
// applied here, independently of the registry defaults.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "polyloop/suite.hpp"

using namespace polyloop;

namespace {

struct Pin {
  std::string metric;
  double threshold;
  bool below = true;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> properties;
  std::vector<Pin> pins;
  double seconds;
  int min_trials = 0;  ///< per property, 0 skips the check
};

const Metric* find_metric(const std::vector<PropertyResult>& results, const std::string& name) {
  for (const auto& r : results)
    for (const auto& m : r.metrics)
      if (m.name == name) return &m;
  return nullptr;
}

const Property* find_property(const std::string& name) {
  for (const auto& p : property_registry())
    if (p.name == name) return &p;
  return nullptr;
}

bool run(const Criterion& c, const SuiteConfig& cfg) {
  std::vector<PropertyResult> results;
  std::vector<std::string> notes;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& name : c.properties) {
    const Property* p = find_property(name);
    if (!p) {
      notes.push_back("missing property " + name);
      continue;
    }
    results.push_back(run_property(*p, cfg));
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  bool ok = notes.empty();
  for (const auto& r : results) {
    if (!r.error.empty()) notes.push_back(r.name + ": " + r.error);
    for (const auto& f : r.failures) notes.push_back(r.name + ": " + f);
    if (c.min_trials > 0 && r.trials - r.rejections < c.min_trials)
      notes.push_back(r.name + ": only " + std::to_string(r.trials - r.rejections) + " accepted trials");
  }
  ok = ok && notes.empty();

  std::string detail;
  char buf[256];
  for (const auto& pin : c.pins) {
    const Metric* m = find_metric(results, pin.metric);
    if (!m) {
      ok = false;
      detail += " " + pin.metric + "=missing";
      continue;
    }
    const bool pass = pin.below ? m->value < pin.threshold : m->value > pin.threshold;
    ok = ok && pass;
    std::snprintf(buf, sizeof buf, " %s=%.3g%s%.0e%s", pin.metric.c_str(), m->value, pin.below ? "<" : ">", pin.threshold,
                  pass ? "" : "!");
    detail += buf;
  }
  const bool in_time = elapsed < c.seconds;
  ok = ok && in_time;
  std::printf("[%s] criterion %2d  %-44s %7.2f s (limit %g s)%s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), elapsed,
              c.seconds, in_time ? "" : " TOO SLOW");
  std::printf("       %s\n", detail.c_str());
  for (const auto& n : notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "cosh inequality", {"seq.cosh_inequality"},
       {{"seq.cosh_inequality.upper_violation", 1e-12}, {"seq.cosh_inequality.lower_violation", 1e-12}}, 1.0},
      {2, "cos_r isomorphism, 500 vectors, P = 64", {"seq.cos_r_isomorphism"},
       {{"seq.cos_r_isomorphism.roundtrip_err", 1e-12},
        {"seq.cos_r_isomorphism.lower_bound_violation", 1e-12},
        {"seq.cos_r_isomorphism.upper_bound_violation", 1e-12}},
       5.0, 500},
      {3, "HS closed form against brute force", {"seq.hs_closed_form"}, {{"seq.hs_closed_form.abs_err", 1e-8}}, 30.0},
      {4, "exp-matched pairs give polynomial loops", {"spectral.eta_pair_loop"},
       {{"spectral.eta_pair_loop.poly_residual", 1e-8}}, 60.0, 600},
      {5, "central log commutes with every log", {"spectral.central_log"},
       {{"spectral.central_log.commutator", 1e-9}, {"spectral.central_log.exp_err", 1e-9}}, 30.0, 100},
      {6, "local sections of U, SU, SO", {"sections.U", "sections.SU", "sections.SO"},
       {{"sections.U.endpoint_err", 1e-9},
        {"sections.U.group_residual", 1e-9},
        {"sections.U.poly_residual", 1e-8},
        {"sections.SU.endpoint_err", 1e-9},
        {"sections.SU.group_residual", 1e-9},
        {"sections.SU.det_deviation", 1e-10},
        {"sections.SU.poly_residual", 1e-8},
        {"sections.SO.endpoint_err", 1e-9},
        {"sections.SO.group_residual", 1e-9},
        {"sections.SO.poly_residual", 1e-8}},
       180.0, 200},
      {7, "unitary structures", {"spectral.exp_pi_j", "spectral.structure_pairs", "spectral.unitary_structure", "spectral.log0_decompose"},
       {{"spectral.exp_pi_j.exp_pi_j_err", 1e-9},
        {"spectral.structure_pairs.poly_residual", 1e-8},
        {"spectral.unitary_structure.j_squared_err", 1e-9},
        {"spectral.unitary_structure.j_of_j_err", 1e-9},
        {"spectral.unitary_structure.shift_invariance_err", 1e-9},
        {"spectral.log0_decompose.exp_err", 1e-9},
        {"spectral.log0_decompose.log0_split_err", 1e-9}},
       30.0, 50},
      {8, "transport identities and step doubling", {"holonomy.transport"},
       {{"holonomy.transport.composition_err", 1e-8},
        {"holonomy.transport.period_shift_err", 1e-8},
        {"holonomy.transport.doubling_err", 1e-8}},
       120.0, 50},
      {9, "sphere latitude holonomy", {"holonomy.latitude"},
       {{"holonomy.latitude.angle_err", 1e-6}, {"holonomy.latitude.exponent_err", 1e-6}}, 30.0},
      {10, "fibre basis", {"holonomy.fibre_basis"},
       {{"holonomy.fibre_basis.gram_err", 1e-8},
        {"holonomy.fibre_basis.d_hat_residual", 1e-6},
        {"holonomy.fibre_basis.torus_fourier_err", 1e-15}},
       60.0},
      {11, "cos inner product", {"holonomy.cos_inner_product"},
       {{"holonomy.cos_inner_product.torus_pairing_err", 1e-10},
        {"holonomy.cos_inner_product.min_gram_eigenvalue", 0.0, false}},
       10.0},
      {12, "reparametrisation behaviours", {"holonomy.reparam", "holonomy.condiff", "holonomy.counterexample"},
       {{"holonomy.reparam.rigid_residual", 1e-8},
        {"holonomy.reparam.generic_residual", 1e-3, false},
        {"holonomy.condiff.identity_residual", 1e-4},
        {"holonomy.condiff.rotation_residual", 1e-4},
        {"holonomy.condiff.wobble_residual", 1e-4},
        {"holonomy.counterexample.beta_one_residual", 1e-3, false},
        {"holonomy.counterexample.beta_z2_residual", 1e-3, false}},
       60.0},
  };
  const SuiteConfig cfg;
  int failed = 0;
  for (const auto& c : criteria) failed += run(c, cfg) ? 0 : 1;
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
