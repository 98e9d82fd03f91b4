#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ioc/errors.hpp"

namespace ioc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Deterministic sampling request: a per-coordinate box, a sample count and a
// 64-bit seed. Identical specs always produce identical samples.
struct SamplingSpec {
  std::vector<Interval> box;
  long count = 0;
  std::uint64_t seed = 0;

  static SamplingSpec cube(int dim, double lo, double hi, long count,
                           std::uint64_t seed) {
    if (dim < 1) {
      throw DimensionError("sampling dimension must be >= 1");
    }
    SamplingSpec spec;
    spec.box.assign(static_cast<std::size_t>(dim), Interval{lo, hi});
    spec.count = count;
    spec.seed = seed;
    spec.validate();
    return spec;
  }

  void validate() const {
    if (count < 1) {
      throw ConfigError("sampling count must be >= 1");
    }
    if (box.empty()) {
      throw ConfigError("sampling box must be non-empty");
    }
    for (const Interval& iv : box) {
      if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw ConfigError("sampling box interval [" + std::to_string(iv.lo) +
                          ", " + std::to_string(iv.hi) + "] is empty or invalid");
      }
    }
  }

  int dim() const { return static_cast<int>(box.size()); }
};

// Counter-based pseudo-random generator (splitmix64 output function applied
// to seed + counter * golden gamma). Stateless per draw, so sample i is a
// pure function of (seed, i) and batches can be evaluated in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(seed_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  // Sample index i of a box-uniform batch; consumes counters i*dim..i*dim+dim-1.
  Eigen::VectorXd sample_box(const std::vector<Interval>& box,
                             std::uint64_t index) const {
    const auto dim = static_cast<Eigen::Index>(box.size());
    Eigen::VectorXd x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const Interval& iv = box[static_cast<std::size_t>(j)];
      x[j] = uniform(index * static_cast<std::uint64_t>(dim) +
                         static_cast<std::uint64_t>(j),
                     iv.lo, iv.hi);
    }
    return x;
  }

  // Standard normal vector via Box-Muller; sample index i consumes counters
  // i*2*dim..(i+1)*2*dim-1.
  Eigen::VectorXd standard_normal(int dim, std::uint64_t index) const {
    Eigen::VectorXd z(dim);
    const std::uint64_t base = index * 2ULL * static_cast<std::uint64_t>(dim);
    for (int j = 0; j < dim; ++j) {
      const double u1 = 1.0 - uniform01(base + 2ULL * j);      // (0, 1]
      const double u2 = uniform01(base + 2ULL * j + 1);
      z[j] = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    }
    return z;
  }

  // Uniform direction on the unit sphere.
  Eigen::VectorXd unit_direction(int dim, std::uint64_t index) const {
    for (std::uint64_t attempt = 0;; ++attempt) {
      Eigen::VectorXd z = standard_normal(dim, index * 8 + attempt);
      const double norm = z.norm();
      if (norm > 1e-8) {
        return z / norm;
      }
      if (attempt > 4) {
        return Eigen::VectorXd::Unit(dim, 0);
      }
    }
  }

  // Independent stream for a named sub-purpose.
  CounterRng fork(std::uint64_t stream) const {
    return CounterRng(mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Sampled evidence for the squared-norm growth bound
// ||f(x)||_P^2 <= L ||x||_P^2: l_hat is the maximum sampled ratio and thus a
// lower bound on the smallest admissible L.
struct LipschitzEstimate {
  double l_hat = 0.0;
  long samples = 0;
  std::vector<Interval> box;
  Eigen::VectorXd worst_state;
};

}  // namespace ioc
