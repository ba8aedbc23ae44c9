#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kk/basegeo.hpp"
#include "kk/kkcurv.hpp"
#include "kk/liealg.hpp"

namespace kk::sweep {

enum class PointStatus { Ok, InvariantViolation, NumericFailure };

/// Everything computed at one chart point. When status != Ok only `point`
/// and `error` are meaningful.
struct PointResult {
  std::vector<double> point;
  PointStatus status = PointStatus::Ok;
  std::string error;

  kkcurv::ClosedFormRicci closed;
  Eigen::MatrixXd direct_ricci;
  double direct_scalar = 0.0;
  kkcurv::CrossCheck cross;
  kkcurv::EYMResidual eym;
  double metricity = 0.0;
  double torsion = 0.0;
};

struct SweepOptions {
  basegeo::GeometryOptions geometry;
  bool direct = true;  // also run the direct curvature and the cross-check
};

PointResult evaluate_point(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                           const basegeo::GaugeField& gauge, const std::vector<double>& point,
                           const SweepOptions& options);

// Reference implementation: one point after another.
std::vector<PointResult> sweep_serial(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                                      const basegeo::GaugeField& gauge,
                                      const std::vector<std::vector<double>>& points, const SweepOptions& options);

// OpenMP map over the points with `jobs` threads. Results are stored by
// point index, so the output equals sweep_serial bit for bit.
std::vector<PointResult> sweep_parallel(const liealg::LieAlgebraSpec& spec, const basegeo::CoframeField& coframe,
                                        const basegeo::GaugeField& gauge,
                                        const std::vector<std::vector<double>>& points, const SweepOptions& options,
                                        int jobs);

struct SweepSummary {
  int points = 0;
  int failures = 0;
  double max_einstein_norm = 0.0;
  double max_ym_norm = 0.0;
  double max_cross_check = 0.0;
  double max_metricity = 0.0;
  double max_torsion = 0.0;
  double sum_scalar = 0.0;  // Σ R(ω) over successful points
};

/// Reduces in lexicographic point order, independent of evaluation order.
SweepSummary summarize(const std::vector<PointResult>& results);

}  // namespace kk::sweep
