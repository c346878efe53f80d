#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "icagg/copulas.hpp"
#include "icagg/margins.hpp"

namespace icagg {

// Column-wise ranks of a sample, 1-based: entry (j,i) is the number of rows
// k with column-i value <= the value in row j. Tie-free input makes every
// column a permutation of 1..n.
struct RankMatrix {
  std::size_t n = 0;
  int d = 0;
  std::vector<std::int32_t> ranks;  // row-major

  std::int32_t at(std::size_t row, int col) const {
    return ranks[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(col)];
  }
};

// Synthetic joint sample: marginal order statistics rearranged by the rank
// matrix of a dependence sample, so row j holds the R(j,i)-th smallest value
// of margin i.
struct SyntheticSample {
  std::size_t n = 0;
  int d = 0;
  std::vector<double> matrix;  // row-major
  RankMatrix source_ranks;
  std::vector<EmpiricalDistribution> margins;

  double at(std::size_t row, int col) const {
    return matrix[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(col)];
  }
  std::span<const double> row(std::size_t r) const {
    return {matrix.data() + r * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d)};
  }
};

// Argsort-of-argsort ranks; throws std::invalid_argument when a column
// contains ties.
RankMatrix compute_ranks(const CopulaSample& sample);

// Rearranges each margin's order statistics by the given ranks. All margin
// samples must share the rank matrix's row count.
SyntheticSample iman_conover(const std::vector<std::vector<double>>& margin_samples,
                             const RankMatrix& ranks);

// Empirical copula at u: fraction of rows whose scaled ranks are
// componentwise <= u.
double empirical_copula_eval(const RankMatrix& ranks, std::span<const double> u);

// Joint empirical CDF of the synthetic sample at x.
double joint_ecdf_eval(const SyntheticSample& s, std::span<const double> x);

// True iff every rank column is a permutation of 1..n.
bool verify_latin_hypercube(const SyntheticSample& s);
bool verify_latin_hypercube(const RankMatrix& ranks);

// CSV with header "x1,...,xd".
void write_csv(const SyntheticSample& s, std::ostream& out);

}  // namespace icagg
