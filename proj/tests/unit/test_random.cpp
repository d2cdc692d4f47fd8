#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "vidiag/parallel.hpp"
#include "vidiag/random.hpp"

using namespace vidiag;

TEST_CASE("derive_seed separates streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t root = 0; root < 20; ++root) {
    for (std::uint64_t i = 0; i < 200; ++i) seen.insert(derive_seed(root, i));
  }
  CHECK(seen.size() == 4000);
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
  Rng a = make_rng(1, 2), b = make_rng(1, 2);
  CHECK(a() == b());
}

TEST_CASE("uniform_open stays inside (0, 1)") {
  Rng rng = make_rng(2, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform_open(rng);
    CHECK_UNARY(u > 0.0 && u < 1.0);
  }
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, [](std::size_t i) {
                    if (i == 17) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("worker_count honours VIDIAG_THREADS") {
  ::setenv("VIDIAG_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  ::setenv("VIDIAG_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("VIDIAG_THREADS");
  CHECK(worker_count() >= 1);
}
