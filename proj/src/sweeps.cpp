#include <cmath>
#include <sstream>

#include "polyloop/errors.hpp"
#include "polyloop/suite.hpp"

namespace polyloop {

namespace {

// Unitary with a prescribed eigenvalue -e^{i centre} (on the cut of log_s),
// the other eigenvalues random, optionally adjusted to determinant 1.
Matrix unitary_on_cut(Rng& rng, Eigen::Index n, double centre, bool special) {
  Vector d(n);
  d(0) = -std::polar(1.0, centre);
  for (Eigen::Index j = 1; j < n; ++j) d(j) = std::polar(1.0, rng.uniform(-kPi, kPi));
  if (special) {
    const cplx det = d.prod();
    d(n - 1) /= det;
  }
  const Matrix v = rng.unitary(n);
  return v * d.asDiagonal() * v.adjoint();
}

std::string describe(int trial, const SectionCheck& c) {
  std::ostringstream os;
  os << "trial " << trial << ": endpoint " << c.endpoint_err << ", group " << c.group_residual << ", det "
     << c.det_deviation << ", poly " << c.poly_residual;
  return os.str();
}

}  // namespace

SweepReport run_section_sweep(const SweepOptions& o, Rng& rng) {
  SweepReport report;
  report.group = o.group;
  report.dim = o.dim;
  const SweepThresholds limits;
  for (int trial = 0; trial < o.trials; ++trial) {
    ++report.trials;
    const double centre = rng.uniform(-kPi, kPi);
    const bool on_cut = o.group != Group::SO && rng.uniform() < o.cut_fraction;
    try {
      std::optional<PathElement> path;
      Matrix target;
      switch (o.group) {
        case Group::U: {
          target = on_cut ? unitary_on_cut(rng, o.dim, centre, false) : rng.unitary(o.dim);
          path = un_section(centre, target);
          break;
        }
        case Group::SU: {
          target = on_cut ? unitary_on_cut(rng, o.dim, centre, true) : rng.special_unitary(o.dim);
          path = su_section(centre, target, rng.unit_vector(o.dim));
          break;
        }
        case Group::SO: {
          const RealMatrix g = rng.special_orthogonal(o.dim);
          const double step = rng.uniform(0.0, 0.3);
          const RealMatrix h = (g.cast<cplx>() * rng.real_skew(o.dim, step).exp()).real();
          const double r = rng.uniform(-0.9, 0.9);
          target = h.cast<cplx>();
          path = so_section(r, g, h);
          break;
        }
      }
      const auto check = check_section(*path, target, o.grid);
      report.max_endpoint_err = std::max(report.max_endpoint_err, check.endpoint_err);
      report.max_poly_residual = std::max(report.max_poly_residual, check.poly_residual);
      report.max_group_residual = std::max(report.max_group_residual, check.group_residual);
      if (o.group != Group::U) report.max_det_deviation = std::max(report.max_det_deviation, check.det_deviation);
      const bool det_bad = o.group != Group::U && !(check.det_deviation < limits.det);
      if (!(check.endpoint_err < limits.endpoint) || !(check.group_residual < limits.group) || det_bad ||
          !(check.poly_residual < limits.poly))
        report.failures.push_back(describe(trial, check));
    } catch (const RejectedInput&) {
      ++report.rejections;
    }
  }
  return report;
}

bool sweep_passes(const SweepReport& r, const SweepThresholds& t) {
  return r.failures.empty() && r.max_endpoint_err < t.endpoint && r.max_group_residual < t.group &&
         r.max_poly_residual < t.poly && (r.group == Group::U || r.max_det_deviation < t.det) &&
         r.trials > r.rejections;
}

}  // namespace polyloop
