#include "kk/sweep.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "kk/error.hpp"

namespace kk::sweep {

PointResult evaluate_point(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                           const basegeo::GaugeField& gauge, const std::vector<double>& point,
                           const SweepOptions& options) {
  PointResult res;
  res.point = point;
  try {
    const auto geom = basegeo::compute_geometry(spec, coframe, gauge, point, options.geometry);
    res.closed = kkcurv::ricci_closed_form(geom, spec);
    res.eym = kkcurv::eym_residuals(geom, spec);
    if (options.direct) {
      const auto conn = kkcurv::assemble_omega(geom, spec);
      const auto curv = kkcurv::curvature_direct(conn);
      res.direct_ricci = curv.ricci;
      res.direct_scalar = curv.scalar;
      res.cross = kkcurv::cross_check(curv, res.closed);
      res.metricity = kkcurv::metricity_residual(conn);
      res.torsion = kkcurv::torsion_residual(conn);
    }
  } catch (const DegenerateCoframeError& e) {
    res.status = PointStatus::InvariantViolation;
    res.error = e.what();
  } catch (const DomainError& e) {
    res.status = PointStatus::NumericFailure;
    res.error = e.what();
  }
  return res;
}

std::vector<PointResult> sweep_serial(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                                      const basegeo::GaugeField& gauge,
                                      const std::vector<std::vector<double>>& points, const SweepOptions& options) {
  std::vector<PointResult> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(evaluate_point(spec, coframe, gauge, p, options));
  return out;
}

std::vector<PointResult> sweep_parallel(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                                        const basegeo::GaugeField& gauge,
                                        const std::vector<std::vector<double>>& points, const SweepOptions& options,
                                        int jobs) {
  const auto count = static_cast<std::ptrdiff_t>(points.size());
  std::vector<PointResult> out(points.size());
  // Anything other than the per-point errors handled in evaluate_point is
  // rethrown on the calling thread.
  std::vector<std::exception_ptr> errors(points.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, jobs))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[i] = evaluate_point(spec, coframe, gauge, points[i], options);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SweepSummary summarize(const std::vector<PointResult>& results) {
  std::vector<std::size_t> order(results.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return results[a].point < results[b].point; });
  SweepSummary s;
  s.points = static_cast<int>(results.size());
  for (std::size_t i : order) {
    const auto& r = results[i];
    if (r.status != PointStatus::Ok) {
      ++s.failures;
      continue;
    }
    s.max_einstein_norm = std::max(s.max_einstein_norm, r.eym.einstein_norm);
    s.max_ym_norm = std::max(s.max_ym_norm, r.eym.ym_norm);
    s.max_cross_check = std::max(s.max_cross_check, r.cross.max());
    s.max_metricity = std::max(s.max_metricity, r.metricity);
    s.max_torsion = std::max(s.max_torsion, r.torsion);
    s.sum_scalar += r.closed.scalar;
  }
  return s;
}

}  // namespace kk::sweep
