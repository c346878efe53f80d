#include "icagg/reorder.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "icagg/errors.hpp"
#include "icagg/io.hpp"

namespace icagg {

RankMatrix compute_ranks(const CopulaSample& sample) {
  const std::size_t n = sample.n;
  const int d = sample.d;
  if (n == 0) throw std::invalid_argument("empty sample");
  RankMatrix rm;
  rm.n = n;
  rm.d = d;
  rm.ranks.assign(n * static_cast<std::size_t>(d), 0);
  std::vector<std::size_t> order(n);
  for (int col = 0; col < d; ++col) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return sample.at(a, col) < sample.at(b, col);
    });
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (sample.at(order[k], col) == sample.at(order[k + 1], col)) {
        throw std::invalid_argument("ties detected in column " +
                                    std::to_string(col));
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      rm.ranks[order[k] * static_cast<std::size_t>(d) +
               static_cast<std::size_t>(col)] = static_cast<std::int32_t>(k + 1);
    }
  }
  return rm;
}

SyntheticSample iman_conover(
    const std::vector<std::vector<double>>& margin_samples,
    const RankMatrix& ranks) {
  const std::size_t n = ranks.n;
  const int d = ranks.d;
  if (static_cast<int>(margin_samples.size()) != d) {
    throw std::invalid_argument("margin count does not match rank matrix width");
  }
  SyntheticSample s;
  s.n = n;
  s.d = d;
  s.source_ranks = ranks;
  s.matrix.assign(n * static_cast<std::size_t>(d), 0.0);
  s.margins.reserve(static_cast<std::size_t>(d));
  for (int col = 0; col < d; ++col) {
    const auto& m = margin_samples[static_cast<std::size_t>(col)];
    if (m.size() != n) {
      throw std::invalid_argument("margin " + std::to_string(col) +
                                  " has length " + std::to_string(m.size()) +
                                  ", expected " + std::to_string(n));
    }
    s.margins.emplace_back(m);  // sorts and validates
    const auto& sorted = s.margins.back().values();
    for (std::size_t row = 0; row < n; ++row) {
      s.matrix[row * static_cast<std::size_t>(d) + static_cast<std::size_t>(col)] =
          sorted[static_cast<std::size_t>(ranks.at(row, col)) - 1];
    }
  }
  return s;
}

double empirical_copula_eval(const RankMatrix& ranks,
                             std::span<const double> u) {
  if (static_cast<int>(u.size()) != ranks.d) {
    throw std::invalid_argument("point dimension does not match rank matrix");
  }
  const double n = static_cast<double>(ranks.n);
  std::size_t count = 0;
  for (std::size_t row = 0; row < ranks.n; ++row) {
    bool in = true;
    for (int col = 0; col < ranks.d && in; ++col) {
      in = static_cast<double>(ranks.at(row, col)) / n <= u[static_cast<std::size_t>(col)];
    }
    count += in;
  }
  return static_cast<double>(count) / n;
}

double joint_ecdf_eval(const SyntheticSample& s, std::span<const double> x) {
  if (static_cast<int>(x.size()) != s.d) {
    throw std::invalid_argument("point dimension does not match sample");
  }
  std::size_t count = 0;
  for (std::size_t row = 0; row < s.n; ++row) {
    bool in = true;
    for (int col = 0; col < s.d && in; ++col) {
      in = s.at(row, col) <= x[static_cast<std::size_t>(col)];
    }
    count += in;
  }
  return static_cast<double>(count) / static_cast<double>(s.n);
}

bool verify_latin_hypercube(const RankMatrix& ranks) {
  std::vector<bool> seen(ranks.n);
  for (int col = 0; col < ranks.d; ++col) {
    std::fill(seen.begin(), seen.end(), false);
    for (std::size_t row = 0; row < ranks.n; ++row) {
      const std::int32_t r = ranks.at(row, col);
      if (r < 1 || static_cast<std::size_t>(r) > ranks.n ||
          seen[static_cast<std::size_t>(r) - 1]) {
        return false;
      }
      seen[static_cast<std::size_t>(r) - 1] = true;
    }
  }
  return true;
}

bool verify_latin_hypercube(const SyntheticSample& s) {
  return verify_latin_hypercube(s.source_ranks);
}

void write_csv(const SyntheticSample& s, std::ostream& out) {
  for (int col = 0; col < s.d; ++col) {
    out << (col ? ",x" : "x") << (col + 1);
  }
  out << "\n";
  for (std::size_t row = 0; row < s.n; ++row) {
    for (int col = 0; col < s.d; ++col) {
      if (col) out << ",";
      out << format_double(s.at(row, col));
    }
    out << "\n";
  }
}

}  // namespace icagg
