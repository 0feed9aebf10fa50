#pragma once

// The mu-tightened Dirichlet system
//   ||Phi p - q||_inf < mu / N,   0 < ||p||_inf < mu N
// by direct enumeration, its lattice counterpart, and scans along curves.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "danilab/curve.hpp"
#include "danilab/exact.hpp"
#include "danilab/types.hpp"

namespace danilab {

// both_nonzero requires q != 0 as well; lattice_p_nonzero leaves q
// free, which is the form the lattice argument needs.
enum class Convention { both_nonzero, lattice_p_nonzero };

struct DirichletQuery {
  // DomainError unless 0 < mu <= 1, N >= 1 and phi is square.
  DirichletQuery(Matrix phi, std::int64_t N, double mu,
                 Convention convention = Convention::lattice_p_nonzero);

  Matrix phi;
  std::int64_t N;
  double mu;
  Convention convention;
};

struct ExactDirichletQuery {
  ExactDirichletQuery(RationalMatrix phi, std::int64_t N, Rational mu,
                      Convention convention = Convention::lattice_p_nonzero);

  RationalMatrix phi;
  std::int64_t N;
  Rational mu;
  Convention convention;
};

struct Witness {
  IntVector p;
  IntVector q;
};

// First witness over p in lexicographic order, restricted to p whose first
// nonzero entry is positive (the system is symmetric under (p,q) -> -(p,q)).
std::optional<Witness> solvable(const DirichletQuery& query);
std::optional<Witness> solvable(const ExactDirichletQuery& query);

struct CorrespondenceRecord {
  bool insoluble = false;
  bool in_kmu = false;
  bool agree = false;
};

// Compares insolubility with the absence of nonzero points of
// a_{log N} u(Phi) Z^{2n} in the open sup-norm ball of radius mu.
// DomainError unless the query uses lattice_p_nonzero.
CorrespondenceRecord correspondence_check(const DirichletQuery& query);
CorrespondenceRecord correspondence_check(const ExactDirichletQuery& query);

struct ScanTable {
  std::vector<double> s_grid;
  std::vector<std::int64_t> N_set;
  // Row-major over (s, N): insoluble[i * N_set.size() + j].
  std::vector<char> insoluble;
  std::map<int, double> fraction_with_at_least_k;

  bool at(std::size_t i, std::size_t j) const { return insoluble[i * N_set.size() + j] != 0; }
  // Number of insoluble N for grid point i.
  std::size_t count(std::size_t i) const;
};

ScanTable improvability_scan(const MatrixPolyCurve& curve, double mu,
                             const std::vector<double>& s_grid,
                             const std::vector<std::int64_t>& N_set, Convention convention,
                             const std::vector<int>& thresholds = {1, 3, 10}, int threads = 1);

// Columns s, N, insoluble (0/1), with a header row.
void write_scan_csv(std::ostream& out, const ScanTable& table);

}  // namespace danilab
