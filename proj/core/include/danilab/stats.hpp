#pragma once

// Monte Carlo averages of lattice observables along expanded curve pieces
// a_t [z(s)] u(phi(s)) x, with s drawn from a reproducible sampler.

#include <cstdint>
#include <string>
#include <vector>

#include "danilab/curve.hpp"
#include "danilab/lattice.hpp"
#include "danilab/types.hpp"

namespace danilab {

enum class Scheme { uniform_iid, stratified_grid };

struct Sampler {
  std::uint64_t seed = 1;
  std::int64_t count = 1000;
  Scheme scheme = Scheme::uniform_iid;

  // Sample i on [a, b]; a pure function of (seed, i, scheme).
  double point(std::int64_t i, double a, double b) const;
};

struct Observable {
  enum class Kind { siegel_count, kmu_indicator, lambda1 };

  static Observable siegel_count(Vector halfwidths);
  static Observable kmu_indicator(double mu);
  static Observable lambda1();

  Kind kind = Kind::lambda1;
  Vector halfwidths;
  double mu = 0.0;

  std::string name() const;
  double operator()(const LatticeBasis& x) const;
};

struct ObservableRecord {
  double t = 0.0;
  std::string observable;
  double mean = 0.0;
  // Sample standard deviation over sqrt(M).
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// Average of obs over a_t [z(s)] u(phi(s)) basepoint for the sampled s.
ObservableRecord curve_average(const MatrixPolyCurve& curve, double t, const Observable& obs,
                               const LatticeBasis& basepoint, bool normalize,
                               const Sampler& sampler, int threads = 1);

ObservableRecord siegel_average(const MatrixPolyCurve& curve, double t, const Vector& halfwidths,
                                const LatticeBasis& basepoint, bool normalize,
                                const Sampler& sampler, int threads = 1);

// Basepoint Z^{2n}, raw measure.
ObservableRecord kmu_fraction(const MatrixPolyCurve& curve, double t, double mu,
                              const Sampler& sampler, int threads = 1);

struct NondivergencePoint {
  double t = 0.0;
  double fraction = 0.0;
  double std_error = 0.0;
};

// Per t, the fraction of samples whose sup-norm lambda_1 is below eps.
std::vector<NondivergencePoint> nondivergence_profile(const MatrixPolyCurve& curve,
                                                      const std::vector<double>& t_list,
                                                      double eps, const Sampler& sampler,
                                                      int threads = 1);

// |mean obs(x_s) - mean obs(u(r I) x_s)| with x_s = a_t z(s) u(phi(s)) Z^{2n}.
double w_invariance_gap(const MatrixPolyCurve& curve, double t, double r, const Observable& obs,
                        const Sampler& sampler, int threads = 1);

struct ConvergenceGap {
  // |raw mean - normalized mean| at t1 and at t2.
  double gap_t1 = 0.0;
  double gap_t2 = 0.0;
  // |mean(t2) - mean(t1)| per mode.
  double drift_raw = 0.0;
  double drift_normalized = 0.0;
};

ConvergenceGap convergence_gap(const MatrixPolyCurve& curve, double t1, double t2,
                               const Observable& obs, const Sampler& sampler, int threads = 1);

}  // namespace danilab
