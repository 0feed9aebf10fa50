#include "danilab/stats.hpp"

#include <cmath>
#include <sstream>

#include "danilab/errors.hpp"
#include "danilab/flow.hpp"
#include "danilab/parallel.hpp"
#include "danilab/random.hpp"

namespace danilab {

double Sampler::point(std::int64_t i, double a, double b) const {
  const double u = counter_uniform(seed, static_cast<std::uint64_t>(i));
  if (scheme == Scheme::stratified_grid) {
    return a + (b - a) * (static_cast<double>(i) + u) / static_cast<double>(count);
  }
  return a + (b - a) * u;
}

Observable Observable::siegel_count(Vector halfwidths) {
  Observable o;
  o.kind = Kind::siegel_count;
  o.halfwidths = std::move(halfwidths);
  return o;
}

Observable Observable::kmu_indicator(double mu) {
  if (!(mu > 0 && mu < 1)) throw DomainError("mu must lie in (0,1)");
  Observable o;
  o.kind = Kind::kmu_indicator;
  o.mu = mu;
  return o;
}

Observable Observable::lambda1() { return Observable{}; }

std::string Observable::name() const {
  switch (kind) {
    case Kind::siegel_count: return "siegel_count";
    case Kind::kmu_indicator: return "kmu_indicator";
    case Kind::lambda1: return "lambda1";
  }
  return "";
}

double Observable::operator()(const LatticeBasis& x) const {
  switch (kind) {
    case Kind::siegel_count: return static_cast<double>(count_in_box(x, halfwidths));
    case Kind::kmu_indicator: return in_K_mu(x, mu) ? 1.0 : 0.0;
    case Kind::lambda1: return shortest_supnorm(x).length;
  }
  return 0.0;
}

namespace {

void check_sampler(const Sampler& sampler) {
  if (sampler.count < 2) throw DomainError("sampler count must be at least 2");
}

struct Moments {
  double mean;
  double std_error;
};

Moments moments(const std::vector<double>& values) {
  const auto m = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / m;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(sq) / (m - 1);
  return {mean, std::sqrt(var / m)};
}

template <typename F>
std::vector<double> sample_values(const Sampler& sampler, int threads, F&& f) {
  std::vector<double> values(static_cast<std::size_t>(sampler.count));
  parallel_for(values.size(), threads, [&](std::size_t i) { values[i] = f(static_cast<std::int64_t>(i)); });
  return values;
}

}  // namespace

ObservableRecord curve_average(const MatrixPolyCurve& curve, double t, const Observable& obs,
                               const LatticeBasis& basepoint, bool normalize,
                               const Sampler& sampler, int threads) {
  check_sampler(sampler);
  const auto values = sample_values(sampler, threads, [&](std::int64_t i) {
    const double s = sampler.point(i, curve.a(), curve.b());
    return obs(orbit_point(curve, s, t, basepoint, normalize));
  });
  const Moments mom = moments(values);
  return ObservableRecord{t, obs.name(), mom.mean, mom.std_error, sampler.count, sampler.seed};
}

ObservableRecord siegel_average(const MatrixPolyCurve& curve, double t, const Vector& halfwidths,
                                const LatticeBasis& basepoint, bool normalize,
                                const Sampler& sampler, int threads) {
  return curve_average(curve, t, Observable::siegel_count(halfwidths), basepoint, normalize,
                       sampler, threads);
}

ObservableRecord kmu_fraction(const MatrixPolyCurve& curve, double t, double mu,
                              const Sampler& sampler, int threads) {
  return curve_average(curve, t, Observable::kmu_indicator(mu), LatticeBasis::identity(2 * curve.n()),
                       false, sampler, threads);
}

std::vector<NondivergencePoint> nondivergence_profile(const MatrixPolyCurve& curve,
                                                      const std::vector<double>& t_list,
                                                      double eps, const Sampler& sampler,
                                                      int threads) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  check_sampler(sampler);
  const LatticeBasis base = LatticeBasis::identity(2 * curve.n());
  std::vector<NondivergencePoint> out;
  for (double t : t_list) {
    const auto values = sample_values(sampler, threads, [&](std::int64_t i) {
      const double s = sampler.point(i, curve.a(), curve.b());
      return shortest_supnorm(orbit_point(curve, s, t, base, false)).length < eps ? 1.0 : 0.0;
    });
    const Moments mom = moments(values);
    out.push_back({t, mom.mean, mom.std_error});
  }
  return out;
}

double w_invariance_gap(const MatrixPolyCurve& curve, double t, double r, const Observable& obs,
                        const Sampler& sampler, int threads) {
  check_sampler(sampler);
  const int n = curve.n();
  const LatticeBasis base = LatticeBasis::identity(2 * n);
  const Matrix w = u_embed(r * Matrix::Identity(n, n)).matrix();
  std::vector<double> diffs(static_cast<std::size_t>(sampler.count));
  parallel_for(diffs.size(), threads, [&](std::size_t i) {
    const double s = sampler.point(static_cast<std::int64_t>(i), curve.a(), curve.b());
    const LatticeBasis x = orbit_point(curve, s, t, base, true);
    diffs[i] = obs(x) - obs(LatticeBasis::unchecked(w * x.cols()));
  });
  return std::abs(pairwise_sum(diffs) / static_cast<double>(diffs.size()));
}

ConvergenceGap convergence_gap(const MatrixPolyCurve& curve, double t1, double t2,
                               const Observable& obs, const Sampler& sampler, int threads) {
  if (!(t1 < t2)) throw DomainError("convergence_gap needs t1 < t2");
  const LatticeBasis base = LatticeBasis::identity(2 * curve.n());
  const double raw1 = curve_average(curve, t1, obs, base, false, sampler, threads).mean;
  const double raw2 = curve_average(curve, t2, obs, base, false, sampler, threads).mean;
  const double nrm1 = curve_average(curve, t1, obs, base, true, sampler, threads).mean;
  const double nrm2 = curve_average(curve, t2, obs, base, true, sampler, threads).mean;
  return ConvergenceGap{std::abs(raw1 - nrm1), std::abs(raw2 - nrm2), std::abs(raw2 - raw1),
                        std::abs(nrm2 - nrm1)};
}

}  // namespace danilab
