#pragma once

#include <array>
#include <string>
#include <vector>

#include "ladder/metrics.hpp"

namespace ladder {

enum class AxisScale { Linear, Log };
enum class SweepMethod { Analytic, Exact, Markov, Oracle };
const char* to_string(SweepMethod m);

// Recognized parameters: "sigma_t/gamma_c", "gamma_t/sigma_t", "ratio" (locks
// both ratios to the axis value), "delta_t/gamma_t", "gamma_t".
struct SweepAxis {
  std::string parameter;
  AxisScale scale = AxisScale::Linear;
  double min = 0, max = 1;
  std::size_t points = 2;

  void validate() const;
  std::vector<double> values() const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  GateOperatingPoint baseline;
  SweepMethod method = SweepMethod::Analytic;
  GateOptions numeric;  // grid and backend options for numerical methods
  unsigned threads = 0;

  void validate() const;
};

struct SweepPoint {
  std::vector<double> coords;
  GateOperatingPoint point;
  double fidelity = 0;           // dominant-term form (closed form for analytic)
  double fidelity_coherent = 0;  // four-term average
  double phase = 0;              // principal value
  double phase_unwrapped = 0;    // lag convention, continuous along the last axis
  std::array<cplx, 4> overlaps{};
  double error_estimate = 0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<std::vector<double>> grids;
  std::vector<SweepPoint> points;  // row-major, last axis fastest
  std::string method;
  std::string started, finished;   // UTC ISO-8601

  const SweepPoint& at(std::size_t i, std::size_t j) const { return points[i * grids.at(1).size() + j]; }
};

// Operating point for one set of axis values applied to the baseline.
GateOperatingPoint apply_axes(const GateOperatingPoint& base, const std::vector<SweepAxis>& axes,
                              const std::vector<double>& coords);

SweepResult run_sweep(const SweepSpec& spec);

// Default contour grid: both ratios log-spaced over [10, 1e3] at delta_t = 0.
SweepSpec fidelity_contour_spec(std::size_t points = 20, SweepMethod method = SweepMethod::Analytic);
SweepResult fidelity_contour(const SweepSpec& spec);

// Default detuning sweep: delta_t/gamma_t over [0, 4] with both ratios locked.
SweepSpec detuning_sweep_spec(double ratio = 1e3, std::size_t points = 81,
                              SweepMethod method = SweepMethod::Analytic);
SweepResult detuning_sweep(const SweepSpec& spec);

// Maps a principal phase sequence to a continuous curve. The first value is
// placed in [-pi, pi) (lag branch) and each step is the wrapped increment.
std::vector<double> unwrap_lag(const std::vector<double>& principal);

struct NoSolution : InvalidParameter {
  double lo, hi;  // achievable phase interval
  NoSolution(const std::string& what, double lo_, double hi_) : InvalidParameter(what), lo(lo_), hi(hi_) {}
};

struct TuneResult {
  double delta_t = 0;
  double phase = 0;     // lag-branch phase at the solution
  double fidelity = 0;
  std::size_t iterations = 0;
};

// Lag-branch phase of the closed form: principal arg mapped to [-pi, pi).
double phase_lag(const GateOperatingPoint& p);

// Solves phase_lag(p with delta_t) = phi_target for delta_t >= 0.
TuneResult tune_detuning(double phi_target, const GateOperatingPoint& p);

}  // namespace ladder
