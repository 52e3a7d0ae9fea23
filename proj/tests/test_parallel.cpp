#include <atomic>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "matherkit/parallel.hpp"

using namespace matherkit;

TEST_CASE("worker count follows the environment") {
  setenv("MATHERKIT_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("MATHERKIT_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  setenv("MATHERKIT_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("MATHERKIT_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("parallel_for visits every index once") {
  for (const char* threads : {"1", "2", "5"}) {
    setenv("MATHERKIT_THREADS", threads, 1);
    std::vector<std::atomic<int>> hits(1001);
    parallel_for(0, hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    // Nested calls run serially inside workers.
    std::vector<int> nested(64, 0);
    parallel_for(0, 8, [&](std::size_t i) {
      parallel_for(0, 8, [&](std::size_t j) { nested[i * 8 + j] += 1; });
    });
    for (int v : nested) CHECK(v == 1);
    parallel_for(5, 5, [&](std::size_t) { FAIL("empty range"); });
  }
  unsetenv("MATHERKIT_THREADS");
}

TEST_CASE("exceptions propagate out of the workers") {
  setenv("MATHERKIT_THREADS", "4", 1);
  CHECK_THROWS_AS(parallel_for(0, 100,
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  unsetenv("MATHERKIT_THREADS");
}
