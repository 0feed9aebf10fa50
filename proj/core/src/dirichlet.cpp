#include "danilab/dirichlet.hpp"

#include <cmath>
#include <iomanip>

#include "danilab/errors.hpp"
#include "danilab/flow.hpp"
#include "danilab/lattice.hpp"
#include "danilab/parallel.hpp"

namespace danilab {

namespace {

void check_common(std::size_t rows, std::size_t cols, std::int64_t N) {
  if (rows != cols || rows == 0) throw DomainError("Phi must be a nonempty square matrix");
  if (N < 1) throw DomainError("N must be a positive integer");
}

// Visits sign-canonical p in lexicographic order over [-P, P]^n until
// visit returns true.
template <typename Visit>
bool for_each_canonical_p(int n, std::int64_t P, Visit&& visit) {
  if (P < 1) return false;
  IntVector p = IntVector::Constant(n, -P);
  while (true) {
    bool lead_positive = false;
    for (int i = 0; i < n; ++i) {
      if (p(i) != 0) {
        lead_positive = p(i) > 0;
        break;
      }
    }
    if (lead_positive && visit(p)) return true;
    int pos = n - 1;
    while (pos >= 0 && p(pos) == P) {
      p(pos) = -P;
      --pos;
    }
    if (pos < 0) return false;
    ++p(pos);
  }
}

// Lexicographically first q in the product of integer ranges [lo_i, hi_i],
// skipping q = 0 when forbid_zero is set.
std::optional<IntVector> first_q(const std::vector<std::int64_t>& lo,
                                 const std::vector<std::int64_t>& hi, bool forbid_zero) {
  const auto n = static_cast<int>(lo.size());
  IntVector q(n);
  for (int i = 0; i < n; ++i) {
    if (lo[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) return std::nullopt;
    q(i) = lo[static_cast<std::size_t>(i)];
  }
  while (true) {
    if (!(forbid_zero && q.isZero())) return q;
    int pos = n - 1;
    while (pos >= 0 && q(pos) == hi[static_cast<std::size_t>(pos)]) {
      q(pos) = lo[static_cast<std::size_t>(pos)];
      --pos;
    }
    if (pos < 0) return std::nullopt;
    ++q(pos);
  }
}

}  // namespace

DirichletQuery::DirichletQuery(Matrix phi_, std::int64_t N_, double mu_, Convention convention_)
    : phi(std::move(phi_)), N(N_), mu(mu_), convention(convention_) {
  check_common(static_cast<std::size_t>(phi.rows()), static_cast<std::size_t>(phi.cols()), N);
  if (!(mu > 0 && mu <= 1)) throw DomainError("mu must lie in (0,1]");
}

ExactDirichletQuery::ExactDirichletQuery(RationalMatrix phi_, std::int64_t N_, Rational mu_,
                                         Convention convention_)
    : phi(std::move(phi_)), N(N_), mu(std::move(mu_)), convention(convention_) {
  check_common(phi.rows(), phi.cols(), N);
  if (!(mu > 0 && mu <= 1)) throw DomainError("mu must lie in (0,1]");
}

std::optional<Witness> solvable(const DirichletQuery& query) {
  const auto n = static_cast<int>(query.phi.rows());
  const double Nd = static_cast<double>(query.N);
  const double radius = query.mu / Nd;
  // Largest integer strictly below mu N.
  const auto P = static_cast<std::int64_t>(std::ceil(query.mu * Nd)) - 1;
  const bool forbid_zero = query.convention == Convention::both_nonzero;

  std::optional<Witness> found;
  std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for_each_canonical_p(n, P, [&](const IntVector& p) {
    const Vector x = query.phi * p.cast<double>();
    for (int i = 0; i < n; ++i) {
      // Integers q with |x - q| < radius, judged on the rounded residual
      // itself rather than on the rounded interval ends.
      auto a = static_cast<std::int64_t>(std::floor(x(i) - radius));
      auto b = static_cast<std::int64_t>(std::ceil(x(i) + radius));
      while (a <= b && !(std::abs(x(i) - static_cast<double>(a)) < radius)) ++a;
      while (b >= a && !(std::abs(x(i) - static_cast<double>(b)) < radius)) --b;
      lo[static_cast<std::size_t>(i)] = a;
      hi[static_cast<std::size_t>(i)] = b;
    }
    if (auto q = first_q(lo, hi, forbid_zero)) {
      found = Witness{p, *q};
      return true;
    }
    return false;
  });
  return found;
}

std::optional<Witness> solvable(const ExactDirichletQuery& query) {
  const auto n = static_cast<int>(query.phi.rows());
  const Rational radius = query.mu / query.N;
  const auto P = static_cast<std::int64_t>(ceil(query.mu * query.N)) - 1;
  const bool forbid_zero = query.convention == Convention::both_nonzero;

  std::optional<Witness> found;
  std::vector<std::int64_t> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  for_each_canonical_p(n, P, [&](const IntVector& p) {
    const std::vector<Rational> x = apply(query.phi, p);
    for (std::size_t i = 0; i < x.size(); ++i) {
      lo[i] = static_cast<std::int64_t>(floor(x[i] - radius)) + 1;
      hi[i] = static_cast<std::int64_t>(ceil(x[i] + radius)) - 1;
    }
    if (auto q = first_q(lo, hi, forbid_zero)) {
      found = Witness{p, *q};
      return true;
    }
    return false;
  });
  return found;
}

namespace {

void require_lattice_convention(Convention c) {
  if (c != Convention::lattice_p_nonzero) {
    throw DomainError("correspondence_check requires the lattice_p_nonzero convention");
  }
}

}  // namespace

CorrespondenceRecord correspondence_check(const DirichletQuery& query) {
  require_lattice_convention(query.convention);
  const auto n = static_cast<int>(query.phi.rows());
  const Matrix cols = a_diag(std::log(static_cast<double>(query.N)), n).matrix() *
                      u_embed(query.phi).matrix();
  CorrespondenceRecord rec;
  rec.insoluble = !solvable(query).has_value();
  // mu = 1 is allowed here, so test the open ball directly.
  rec.in_kmu = shortest_supnorm(LatticeBasis::unchecked(cols)).length >= query.mu;
  rec.agree = rec.insoluble == rec.in_kmu;
  return rec;
}

CorrespondenceRecord correspondence_check(const ExactDirichletQuery& query) {
  require_lattice_convention(query.convention);
  CorrespondenceRecord rec;
  rec.insoluble = !solvable(query).has_value();
  rec.in_kmu = !exact::vector_in_open_box(exact::dani_lattice(query.phi, query.N), query.mu);
  rec.agree = rec.insoluble == rec.in_kmu;
  return rec;
}

std::size_t ScanTable::count(std::size_t i) const {
  std::size_t c = 0;
  for (std::size_t j = 0; j < N_set.size(); ++j) c += at(i, j) ? 1 : 0;
  return c;
}

ScanTable improvability_scan(const MatrixPolyCurve& curve, double mu,
                             const std::vector<double>& s_grid,
                             const std::vector<std::int64_t>& N_set, Convention convention,
                             const std::vector<int>& thresholds, int threads) {
  if (s_grid.empty() || N_set.empty()) throw DomainError("scan grids must be nonempty");
  if (!(mu > 0 && mu <= 1)) throw DomainError("mu must lie in (0,1]");
  for (double s : s_grid) curve.eval(s);

  ScanTable table;
  table.s_grid = s_grid;
  table.N_set = N_set;
  table.insoluble.assign(s_grid.size() * N_set.size(), 0);
  parallel_for(table.insoluble.size(), threads, [&](std::size_t cell) {
    const std::size_t i = cell / N_set.size();
    const std::size_t j = cell % N_set.size();
    const DirichletQuery q(curve.eval(s_grid[i]), N_set[j], mu, convention);
    table.insoluble[cell] = solvable(q).has_value() ? 0 : 1;
  });

  for (int k : thresholds) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < s_grid.size(); ++i) hits += table.count(i) >= static_cast<std::size_t>(k) ? 1 : 0;
    table.fraction_with_at_least_k[k] = static_cast<double>(hits) / static_cast<double>(s_grid.size());
  }
  return table;
}

void write_scan_csv(std::ostream& out, const ScanTable& table) {
  out << "s,N,insoluble\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < table.s_grid.size(); ++i) {
    for (std::size_t j = 0; j < table.N_set.size(); ++j) {
      out << table.s_grid[i] << ',' << table.N_set[j] << ',' << (table.at(i, j) ? 1 : 0) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace danilab
