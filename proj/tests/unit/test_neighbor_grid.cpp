#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <random>
#include <stdexcept>
#include <vector>

#include "sfm/neighbor_grid.hpp"
#include "sfm/worker_pool.hpp"

using namespace sfm;

TEST_CASE("grid queries match a brute-force scan") {
  std::mt19937_64 gen(17);
  for (double extent : {5.0, 40.0, 400.0}) {
    std::uniform_real_distribution<double> u(-extent, extent);
    std::vector<Vec2> pts(600);
    std::vector<std::uint8_t> active(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      pts[k] = {u(gen), u(gen)};
      active[k] = gen() % 7 != 0;
    }
    NeighborGrid grid(3.0);
    grid.rebuild(pts, active);
    std::vector<std::size_t> got;
    for (std::size_t i = 0; i < pts.size(); i += 7) {
      for (double radius : {0.5, 3.0, 7.5}) {
        grid.query(pts[i], radius, i, got);
        std::vector<std::size_t> want;
        for (std::size_t j = 0; j < pts.size(); ++j)
          if (j != i && active[j] && norm_squared(pts[j] - pts[i]) <= radius * radius) want.push_back(j);
        REQUIRE(got == want);
      }
    }
  }
}

TEST_CASE("grid handles empty and clustered inputs") {
  NeighborGrid grid(1.0);
  grid.rebuild({}, {});
  std::vector<std::size_t> out{42};
  grid.query({0.0, 0.0}, 5.0, 0, out);
  CHECK(out.empty());

  std::vector<Vec2> same(10, Vec2{1.0, 1.0});
  std::vector<std::uint8_t> on(10, 1);
  grid.rebuild(same, on);
  grid.query({1.0, 1.0}, 0.0, 3, out);
  CHECK(out.size() == 9);
  CHECK(std::is_sorted(out.begin(), out.end()));

  // Widely separated points must not allocate a cell per square metre.
  std::vector<Vec2> far{{0.0, 0.0}, {1e6, 1e6}};
  std::vector<std::uint8_t> both(2, 1);
  grid.rebuild(far, both);
  grid.query({0.0, 0.0}, 1.0, 0, out);
  CHECK(out.empty());
  grid.query({1e6, 1e6}, 1.0, 99, out);
  CHECK(out == std::vector<std::size_t>{1});
}

TEST_CASE("worker pool covers every index exactly once") {
  for (std::size_t workers : {1u, 2u, 4u}) {
    WorkerPool pool(workers);
    CHECK(pool.size() == workers);
    for (std::size_t n : {0u, 1u, 3u, 1000u}) {
      std::vector<int> hits(n, 0);
      pool.parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST_CASE("worker pool rethrows failures") {
  WorkerPool pool(4);
  CHECK_THROWS_AS(pool.parallel_for(100,
                                    [](std::size_t b, std::size_t) {
                                      if (b > 0) throw std::runtime_error("boom");
                                    }),
                  std::runtime_error);
  // Still usable afterwards.
  std::atomic<int> total{0};
  pool.parallel_for(10, [&](std::size_t b, std::size_t e) { total += static_cast<int>(e - b); });
  CHECK(total == 10);
}

TEST_CASE("indexed runner") {
  std::vector<int> out(50, 0);
  run_indexed(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(run_indexed(5, 2, [](std::size_t i) { if (i == 3) throw std::invalid_argument("x"); }),
                  std::invalid_argument);
}
