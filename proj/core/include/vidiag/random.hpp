#ifndef VIDIAG_RANDOM_HPP
#define VIDIAG_RANDOM_HPP

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace vidiag {

using Rng = std::mt19937_64;

/// Seed for an independent stream, derived from a root seed and a stream
/// index by two rounds of splitmix64. Used for per-replication and
/// per-chain streams so results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::uint64_t index) {
  return Rng(derive_seed(root, index));
}

Eigen::VectorXd standard_normal_vector(Rng& rng, Eigen::Index n);

double standard_normal(Rng& rng);

/// Uniform draw on the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace vidiag

#endif
