#pragma once

#include <vector>

#include "ladder/model.hpp"

namespace ladder {

// Scattering window [t_start, t_end] in which incoming envelopes start below
// `level` of their peak and the emitter has decayed to `level` at the end.
struct TimeWindow {
  double t_start, t_end;
};
TimeWindow default_time_window(const AmplitudeGrid& f_in, const EmitterParams& e,
                               double level = 1e-4);

// ---------------------------------------------------------------------------
// Discrete-mode integration of the ansatz coefficients f(k1,k2,t), g(k2,t),
// s(t) with the grid quadrature standing in for the mode integrals.

struct StepControl {
  bool adaptive = true;        // Dormand-Prince 5(4) with error control
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double fixed_step = 0.0;     // used when !adaptive (classical RK4)
  std::size_t samples = 101;   // stored trajectory samples (>= 2)
  bool store_fields = true;    // keep f and g at every sample
  double norm_tolerance = 1e-3;
  double residual_tolerance = 1e-3;
};

struct SystemTrajectory {
  std::vector<double> times;
  std::vector<AmplitudeGrid> f_grids;       // empty unless store_fields
  std::vector<std::vector<cplx>> g_vectors; // empty unless store_fields
  std::vector<cplx> s_values;
  std::vector<double> p_field, p_e1, p_e2;  // populations at each sample
  AmplitudeGrid final_f;                    // f at t_end
  std::vector<cplx> final_g;
  double max_norm_drift = 0;
  std::size_t rhs_evaluations = 0;
};

SystemTrajectory evolve(const AmplitudeGrid& f_in, const EmitterParams& e, double t_start,
                        double t_end, const StepControl& control = {});

// Terminal f with the interaction-picture phases already cancelled in the
// ansatz. Throws IncompleteScattering if g or s have not decayed.
AmplitudeGrid extract_output(const SystemTrajectory& traj, double residual_tolerance = 1e-3);

struct PopulationSample {
  double t, p_field, p_e1, p_e2;
};
std::vector<PopulationSample> population_trace(const SystemTrajectory& traj);

// ---------------------------------------------------------------------------
// Time-of-arrival integration. The flat-coupling mode integrals are taken
// exactly, so each photon meets the emitter at one instant; the emitter
// amplitudes are integrated in time, driven by the Fourier-transformed
// input, and the outgoing field is transformed back onto the grid.

struct ArrivalOptions {
  double dt = 0.0;               // 0: automatic
  double t_start = 0.0, t_end = 0.0;  // both 0: default_time_window
  double rank_tol = 1e-12;       // relative singular-value cutoff of the input
  std::size_t max_rank = 16;
  std::size_t samples = 201;     // population-trace samples
  double residual_tolerance = 1e-3;
  bool check_residuals = true;
  std::size_t max_fft = std::size_t(1) << 24;
  unsigned threads = 0;
};

struct ArrivalResult {
  AmplitudeGrid output;
  std::vector<double> times;
  std::vector<double> p_field, p_e1, p_e2;
  double max_norm_drift = 0;
  double residual_g = 0, residual_s = 0;
  double rank_discarded = 0;   // squared weight of discarded singular values
  std::size_t rank = 0;
  double dt = 0;
  std::size_t steps = 0;
  double t_start = 0, t_end = 0;
};

ArrivalResult evolve_arrival(const AmplitudeGrid& f_in, const EmitterParams& e,
                             const ArrivalOptions& opt = {});

}  // namespace ladder
