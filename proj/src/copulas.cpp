#include "icagg/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "icagg/errors.hpp"
#include "icagg/io.hpp"
#include "icagg/normal.hpp"
#include "icagg/rng.hpp"

namespace icagg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double x) {
  if (x > 40.0) return x;
  return std::log1p(std::exp(x));
}

double parse_number(const std::string& s, const std::string& config) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric argument '" + s + "' in copula config '" +
                      config + "'");
  }
}

// Lower-triangular Cholesky factor; throws ConfigError unless the matrix is
// symmetric with unit diagonal and positive definite.
std::vector<std::vector<double>> cholesky_corr(
    const std::vector<std::vector<double>>& m) {
  const std::size_t d = m.size();
  for (const auto& row : m) {
    if (row.size() != d) throw ConfigError("correlation matrix must be square");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(m[i][i] - 1.0) > 1e-10) {
      throw ConfigError("correlation matrix must have unit diagonal");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(m[i][j] - m[j][i]) > 1e-10) {
        throw ConfigError("correlation matrix must be symmetric");
      }
    }
  }
  std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 1e-12) {
          throw ConfigError("correlation matrix is not positive definite");
        }
        l[i][j] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

// Solve (L L^T) x = b in place of the quadratic form b^T Sigma^{-1} b.
double quad_form_inv(const std::vector<std::vector<double>>& l,
                     std::span<const double> b) {
  const std::size_t d = l.size();
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  // b^T Sigma^{-1} b = |L^{-1} b|^2
  double q = 0.0;
  for (double v : y) q += v * v;
  return q;
}

void check_interior(std::span<const double> u) {
  for (double v : u) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error("density requires a strictly interior point");
    }
  }
}

// Parameter grid on [eps, 1-eps] that is geometrically dense near both ends.
std::vector<double> edge_dense_grid(double eps, int m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m));
  const int half = m / 2;
  const double la = std::log(eps), lb = std::log(0.5);
  for (int k = 0; k < half; ++k) {
    double t = std::exp(la + (lb - la) * k / static_cast<double>(half - 1));
    out.push_back(t);
    out.push_back(1.0 - t);
  }
  return out;
}

struct ArgMax {
  double value = -kInf;
  double u1 = 0.5;
  double u2 = 0.5;
  void consider(double v, double a, double b) {
    if (v > value) {
      value = v;
      u1 = a;
      u2 = b;
    }
  }
};

}  // namespace

CopulaModel CopulaModel::independence(int d) {
  if (d < 2) throw ConfigError("independence copula requires dimension >= 2");
  CopulaModel m;
  m.kind_ = CopulaKind::Independence;
  m.d_ = d;
  m.config_ = "indep:" + std::to_string(d);
  return m;
}

CopulaModel CopulaModel::clayton(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ConfigError("clayton copula requires theta > 0");
  }
  CopulaModel m;
  m.kind_ = CopulaKind::ClaytonBivariate;
  m.d_ = 2;
  m.theta_ = theta;
  m.config_ = "clayton:" + format_double(theta);
  return m;
}

CopulaModel CopulaModel::gauss(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) {
    throw ConfigError("gauss copula requires rho in (-1,1)");
  }
  CopulaModel m;
  m.kind_ = CopulaKind::GaussBivariate;
  m.d_ = 2;
  m.rho_ = rho;
  m.config_ = "gauss:" + format_double(rho);
  return m;
}

CopulaModel CopulaModel::gauss_multi(std::vector<std::vector<double>> corr) {
  CopulaModel m;
  m.kind_ = CopulaKind::GaussMulti;
  m.chol_ = cholesky_corr(corr);
  m.corr_ = std::move(corr);
  m.d_ = static_cast<int>(m.corr_.size());
  if (m.d_ < 2) throw ConfigError("correlation matrix must be at least 2x2");
  m.log_det_ = 0.0;
  for (int i = 0; i < m.d_; ++i) {
    m.log_det_ += 2.0 * std::log(m.chol_[static_cast<std::size_t>(i)]
                                        [static_cast<std::size_t>(i)]);
  }
  m.config_ = "gaussmulti:" + std::to_string(m.d_) + "d";
  return m;
}

CopulaModel CopulaModel::parse(const std::string& config) {
  auto colon = config.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("copula config must look like 'kind:args', got '" +
                      config + "'");
  }
  const std::string name = config.substr(0, colon);
  const std::string args = config.substr(colon + 1);
  if (name == "indep") {
    double d = parse_number(args, config);
    if (d != std::floor(d) || d < 2 || d > 64) {
      throw ConfigError("independence dimension must be an integer >= 2");
    }
    return independence(static_cast<int>(d));
  }
  if (name == "clayton") return clayton(parse_number(args, config));
  if (name == "gauss") return gauss(parse_number(args, config));
  if (name == "gaussmulti") {
    auto m = gauss_multi(read_matrix_csv(args));
    m.config_ = config;
    return m;
  }
  throw ConfigError("unknown copula kind '" + name + "'");
}

double CopulaModel::theta() const {
  if (kind_ != CopulaKind::ClaytonBivariate) {
    throw std::domain_error("theta is defined for the clayton copula only");
  }
  return theta_;
}

double CopulaModel::rho() const {
  if (kind_ == CopulaKind::GaussBivariate) return rho_;
  if (kind_ == CopulaKind::GaussMulti && d_ == 2) return corr_[0][1];
  throw std::domain_error("rho is defined for the bivariate gauss copula only");
}

const std::vector<std::vector<double>>& CopulaModel::correlation() const {
  if (kind_ != CopulaKind::GaussMulti) {
    throw std::domain_error("correlation matrix is defined for gaussmulti only");
  }
  return corr_;
}

double CopulaModel::log_density(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != d_) {
    throw std::invalid_argument("point dimension does not match the copula");
  }
  check_interior(u);
  switch (kind_) {
    case CopulaKind::Independence:
      return 0.0;
    case CopulaKind::ClaytonBivariate: {
      const double lu1 = std::log(u[0]), lu2 = std::log(u[1]);
      const double a = -theta_ * lu1, b = -theta_ * lu2;
      const double m = std::max(a, b);
      const double log_s =
          m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
      return std::log1p(theta_) + (-2.0 - 1.0 / theta_) * log_s +
             (-theta_ - 1.0) * (lu1 + lu2);
    }
    case CopulaKind::GaussBivariate: {
      const double q1 = normal_quantile(u[0]);
      const double q2 = normal_quantile(u[1]);
      const double r2 = 1.0 - rho_ * rho_;
      return -0.5 * std::log(r2) +
             (rho_ * q1 * q2 - 0.5 * rho_ * rho_ * (q1 * q1 + q2 * q2)) / r2;
    }
    case CopulaKind::GaussMulti: {
      std::vector<double> q(u.size());
      double qq = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        q[i] = normal_quantile(u[i]);
        qq += q[i] * q[i];
      }
      return -0.5 * log_det_ + 0.5 * (qq - quad_form_inv(chol_, q));
    }
  }
  return 0.0;
}

double CopulaModel::density(std::span<const double> u) const {
  return std::exp(log_density(u));
}

bool CopulaModel::has_ridge() const {
  if (kind_ == CopulaKind::ClaytonBivariate) return true;
  if (kind_ == CopulaKind::GaussBivariate) return rho_ != 0.0;
  if (kind_ == CopulaKind::GaussMulti && d_ == 2) return corr_[0][1] != 0.0;
  return false;
}

double CopulaModel::ridge(double u2) const {
  if (!has_ridge()) throw std::domain_error("no ridge");
  if (!(u2 > 0.0 && u2 < 1.0)) {
    throw std::domain_error("ridge requires u2 strictly inside (0,1)");
  }
  if (kind_ == CopulaKind::ClaytonBivariate) {
    // argmax over u1 of the density at fixed u2, capped at 1.
    const double bracket = std::expm1(-theta_ * std::log(u2));  // u2^-theta - 1
    const double log_arg = std::log1p(1.0 / theta_) + std::log(bracket);
    return std::min(1.0, std::exp(-log_arg / theta_));
  }
  return normal_cdf(normal_quantile(u2) / rho());
}

double CopulaModel::log_k_epsilon(double eps) const {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::domain_error("k_epsilon requires eps in (0, 1/2)");
  }
  if (kind_ == CopulaKind::Independence) return 0.0;
  if (d_ != 2) {
    throw std::invalid_argument(
        "density sup search is implemented for bivariate copulas");
  }

  auto ld = [&](double a, double b) {
    const double u[2] = {a, b};
    return log_density(std::span<const double>(u, 2));
  };
  const double lo = eps, hi = 1.0 - eps;
  ArgMax best;

  // Coarse uniform grid.
  const int g = 256;
  for (int i = 0; i < g; ++i) {
    const double a = lo + (hi - lo) * i / static_cast<double>(g - 1);
    for (int j = 0; j < g; ++j) {
      const double b = lo + (hi - lo) * j / static_cast<double>(g - 1);
      best.consider(ld(a, b), a, b);
    }
  }
  // Edges and ridge, geometrically dense near the corners where the density
  // can blow up.
  const auto params = edge_dense_grid(eps, 2048);
  for (double t : params) {
    best.consider(ld(lo, t), lo, t);
    best.consider(ld(hi, t), hi, t);
    best.consider(ld(t, lo), t, lo);
    best.consider(ld(t, hi), t, hi);
    if (has_ridge()) {
      const double r = std::clamp(ridge(t), lo, hi);
      best.consider(ld(r, t), r, t);
    }
  }
  // Two local refinement passes around the incumbent maximum.
  double w = (hi - lo) / static_cast<double>(g - 1);
  for (int pass = 0; pass < 2; ++pass) {
    const ArgMax center = best;
    const int r = 16;
    for (int i = -r; i <= r; ++i) {
      const double a = std::clamp(center.u1 + w * i / r, lo, hi);
      for (int j = -r; j <= r; ++j) {
        const double b = std::clamp(center.u2 + w * j / r, lo, hi);
        best.consider(ld(a, b), a, b);
      }
    }
    w /= r;
  }
  return best.value;
}

double CopulaModel::k_epsilon(double eps) const {
  return std::exp(log_k_epsilon(eps));
}

GrowthFit CopulaModel::fit_density_growth(
    const std::vector<double>& eps_list) const {
  if (eps_list.size() < 2) {
    throw std::invalid_argument("growth fit needs at least two eps values");
  }
  std::vector<double> xs, ys;
  for (double e : eps_list) {
    xs.push_back(std::log(1.0 / e));
    ys.push_back(log_k_epsilon(e));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  GrowthFit fit;
  fit.exponent = sxy / sxx;
  fit.log_c = my - fit.exponent * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double pred = fit.log_c + fit.exponent * xs[i];
      ss_res += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

TailIntegralReport CopulaModel::entropy_integral() const {
  TailIntegralReport rep;
  if (kind_ == CopulaKind::Independence) {
    rep.finite = true;
    return rep;
  }
  const double eps_min = 1e-4;
  auto integrand = [&](double eps) {
    return std::sqrt(std::max(0.0, log_k_epsilon(eps * eps)));
  };
  // Substitute eps = exp(-x) so the quadrature resolves the small-eps end.
  const double x0 = std::log(2.0), x1 = std::log(1.0 / eps_min);
  const int intervals = 128;  // Simpson, even count
  const double h = (x1 - x0) / intervals;
  double acc = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double x = x0 + h * k;
    const double g = integrand(std::exp(-x)) * std::exp(-x);
    const double wgt = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += wgt * g;
  }
  rep.value = acc * h / 3.0;

  rep.growth = fit_density_growth({1e-4, 1e-6, 1e-8});
  // Tail on (0, eps_min) from the fitted model log K(eps) = c + k log(1/eps):
  // integrand bounded by sqrt(c + 2k log(1/eps)), integrable for any
  // polynomial growth rate.
  const double c = rep.growth.log_c, k2 = 2.0 * rep.growth.exponent;
  auto tail_f = [&](double y) {
    const double v = c + k2 * (std::log(1.0 / eps_min) + y);
    return std::sqrt(std::max(0.0, v)) * eps_min * std::exp(-y);
  };
  const int m = 4000;
  const double ymax = 80.0, hy = ymax / m;
  double tail = 0.5 * (tail_f(0.0) + tail_f(ymax));
  for (int k = 1; k < m; ++k) tail += tail_f(hy * k);
  rep.tail_bound = tail * hy;
  rep.finite = rep.growth.r_squared >= 0.9 && rep.growth.exponent < 1e3;
  return rep;
}

CopulaSample sample(const CopulaModel& model, std::size_t n,
                    std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  const int d = model.dimension();
  CopulaSample s;
  s.n = n;
  s.d = d;
  s.seed = seed;
  s.data.assign(n * static_cast<std::size_t>(d), 0.0);
  Rng rng(seed);

  const double top = std::nextafter(1.0, 0.0);
  auto clamp_unit = [&](double v) {
    return std::min(std::max(v, 1e-308), top);
  };

  switch (model.kind()) {
    case CopulaKind::Independence: {
      for (double& v : s.data) v = rng.uniform01();
      break;
    }
    case CopulaKind::ClaytonBivariate: {
      // Frailty construction: U_i = (1 + E_i / W)^{-1/theta} with
      // W ~ Gamma(1/theta), evaluated in log space so very small or very
      // large theta cannot underflow.
      const double theta = model.theta();
      for (std::size_t i = 0; i < n; ++i) {
        const double log_w = rng.gamma_log(1.0 / theta);
        for (int j = 0; j < 2; ++j) {
          const double log_e = std::log(rng.exponential(1.0));
          s.data[i * 2 + j] =
              clamp_unit(std::exp(-softplus(log_e - log_w) / theta));
        }
      }
      break;
    }
    case CopulaKind::GaussBivariate: {
      const double rho = model.rho();
      const double w = std::sqrt(1.0 - rho * rho);
      for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal();
        const double z2 = rho * z1 + w * rng.normal();
        s.data[i * 2] = clamp_unit(normal_cdf(z1));
        s.data[i * 2 + 1] = clamp_unit(normal_cdf(z2));
      }
      break;
    }
    case CopulaKind::GaussMulti: {
      std::vector<double> z(static_cast<std::size_t>(d));
      // Re-factor once; the model validated the matrix at construction.
      auto chol = cholesky_corr(model.correlation());
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : z) v = rng.normal();
        for (int r = d - 1; r >= 0; --r) {
          double acc = 0.0;
          for (int c = 0; c <= r; ++c) {
            acc += chol[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                   z[static_cast<std::size_t>(c)];
          }
          s.data[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)] =
              clamp_unit(normal_cdf(acc));
        }
      }
      break;
    }
  }

  // Break intra-column ties: later rows move down by single ulps until every
  // column is strictly ordered somewhere.
  std::vector<std::size_t> order(n);
  for (int col = 0; col < d; ++col) {
    for (int attempt = 0;; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      auto value = [&](std::size_t row) {
        return s.data[row * static_cast<std::size_t>(d) +
                      static_cast<std::size_t>(col)];
      };
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return value(a) < value(b) || (value(a) == value(b) && a < b);
      });
      bool tie = false;
      for (std::size_t i = 0; i + 1 < n;) {
        std::size_t j = i;
        while (j + 1 < n && value(order[j + 1]) == value(order[i])) ++j;
        if (j > i) {
          tie = true;
          double v = value(order[i]);
          for (std::size_t k = i + 1; k <= j; ++k) {
            v = std::nextafter(v, 0.0);
            s.data[order[k] * static_cast<std::size_t>(d) +
                   static_cast<std::size_t>(col)] = v;
          }
        }
        i = j + 1;
      }
      if (!tie) break;
      if (attempt >= 8) throw std::runtime_error("could not break column ties");
    }
  }
  return s;
}

}  // namespace icagg
