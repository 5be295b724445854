#ifndef DEARANK_COMMON_HPP
#define DEARANK_COMMON_HPP

#include <cstdint>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace dearank {

// Bad or inconsistent user input (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure of a solver or estimator (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// The observed rankings do not pin down a unique maximum-likelihood solution.
// `component` is a certificate: a group of units that is never outranked by
// anyone outside of it.
class IdentifiabilityError : public std::runtime_error {
 public:
  IdentifiabilityError(const std::string& msg, std::vector<int> component)
      : std::runtime_error(msg), component(std::move(component)) {}
  std::vector<int> component;
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic RNG used everywhere randomness is needed. Uniforms are built
// from raw 64-bit draws so the stream does not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
    for (int i = 0; i < 4; ++i) s_[i] = next_seed();
  }

  // Independent stream for a worker identified by `index`; parallel and
  // serial schedules that use child streams produce identical results.
  static Rng child(std::uint64_t master, std::uint64_t index) {
    return Rng(splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1))));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t next_seed() { return state_ = splitmix64(state_); }
  std::uint64_t state_;
  std::uint64_t s_[4];
};

// Runs fn(i) for i in [0, n). Work is split statically over `threads`
// workers; fn must only write to per-index slots so the schedule cannot
// change the result.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::int64_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// log(exp(a) + exp(b)) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Two-sided p-value from a normal z statistic.
inline double normal_two_sided_p(double z) {
  if (!std::isfinite(z)) return std::isnan(z) ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

namespace stats {

// Linear-interpolation quantile (the convention used by the summary tables):
// for sorted x of size n and p in [0,1], h = (n-1)p and the value is
// x[floor(h)] + (h - floor(h)) * (x[floor(h)+1] - x[floor(h)]).
double quantile(std::vector<double> values, double p);

// Pearson correlation; NaN when either argument has zero variance.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace stats

// Fixed numeric formatting for file output ("%.12g"): enough digits to
// round-trip the values we care about while keeping reruns byte-identical.
std::string format_num(double v);

// FNV-1a over a byte string, used for config/content hashing in manifests.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dearank

#endif  // DEARANK_COMMON_HPP
