#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace horomass {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rank-3 symmetric-in-nothing derivative stack: t[k](i,j) = d_k T_ij.
struct Ten3 {
  std::vector<Mat> m;

  Ten3() = default;
  explicit Ten3(int n) : m(n, Mat::Zero(n, n)) {}
  Mat& operator[](int k) { return m[k]; }
  const Mat& operator[](int k) const { return m[k]; }
  int dim() const { return static_cast<int>(m.size()); }

  Ten3& operator+=(const Ten3& o) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += o.m[k];
    return *this;
  }
};

// Rank-4 stack: t(k,l)(i,j) = d_k d_l T_ij, symmetric in (k,l).
struct Ten4 {
  int n = 0;
  std::vector<Mat> m;  // flattened [k*n + l]

  Ten4() = default;
  explicit Ten4(int n_) : n(n_), m(n_ * n_, Mat::Zero(n_, n_)) {}
  Mat& operator()(int k, int l) { return m[k * n + l]; }
  const Mat& operator()(int k, int l) const { return m[k * n + l]; }

  Ten4& operator+=(const Ten4& o) {
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += o.m[i];
    return *this;
  }
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct SingularMetric : Error { using Error::Error; };
struct DegenerateLevelSet : Error { using Error::Error; };
struct SmallnessViolated : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct ExtrapolationUnstable : Error { using Error::Error; };
struct TailDominates : Error { using Error::Error; };
struct IncompatibleRule : Error { using Error::Error; };
struct InvalidExponent : Error { using Error::Error; };
struct UnsupportedSurface : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFinite(std::string("non-finite value in ") + what);
}

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw NonFinite(std::string("non-finite vector in ") + what);
}

// Area of the unit sphere S^k in R^{k+1}.
inline double unit_sphere_area(int k) {
  const double p = 0.5 * (k + 1);
  return 2.0 * std::pow(M_PI, p) / std::tgamma(p);
}

// Summation over a fixed binary tree determined solely by the array length.
// The reduction order never depends on how the terms were produced, which
// keeps parallel integrators bit-identical across worker counts.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[lo];
  if (n == 2) return v[lo] + v[lo + 1];
  const std::size_t half = n / 2;
  return pairwise_sum(v, lo, half) + pairwise_sum(v, lo + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

inline int default_workers() {
  if (const char* env = std::getenv("HOROMASS_THREADS")) {
    const int k = std::atoi(env);
    if (k >= 1) return k;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc > 8 ? 8 : hc);
}

// Chunked parallel loop. fn(i) must write only to slot i of preallocated
// storage; the caller reduces afterwards (pairwise) for determinism.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int workers = 0) {
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < count; i += nw) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Least-squares slope of y against x; used for power-law fits in log-log form.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidExponent("fit_slope needs >= 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw InvalidExponent("degenerate abscissae in fit_slope");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace horomass
