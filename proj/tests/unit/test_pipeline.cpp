#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vmdkit/error.hpp"
#include "vmdkit/pipeline.hpp"

using namespace vmdkit;
using namespace vmdkit::pipeline;

namespace {

// Splits a series into its first half-sum and the remainder; enough to check wiring.
Decomposer split_decomposer(std::size_t* calls) {
  return {2, [calls](std::span<const double> x) {
            ++*calls;
            std::vector<RealVec> out(2, RealVec(x.size()));
            for (std::size_t i = 0; i < x.size(); ++i) {
              out[0][i] = 0.25 * x[i];
              out[1][i] = 0.75 * x[i];
            }
            return out;
          }};
}

}  // namespace

TEST_CASE("raw windows line up with their targets") {
  std::vector<RealVec> series{testing::random_signal(100, 1), testing::random_signal(100, 2)};
  FeatureConfig cfg;
  cfg.window = 4;
  cfg.horizon = 3;
  cfg.context = 10;
  const auto set = build_windows(series, cfg);
  REQUIRE(!set.windows.empty());
  CHECK(set.channels == 1);
  CHECK(set.windows.front().start == 6);
  CHECK(set.windows.size() == 100 - 3 - 4 - 6 + 1);
  const auto& w = set.windows[5];
  const auto& n1 = set.norms[1];
  CHECK(w.at(1, 0, 2) * n1.std + n1.mean == doctest::Approx(series[1][w.start + 2]));
  const auto y = set.denormalize(set.targets[5]);
  CHECK(y(1, 0) == doctest::Approx(series[1][w.start + 4]));
}

TEST_CASE("causal features only see the trailing context") {
  std::vector<RealVec> series{testing::random_signal(64, 3)};
  std::size_t calls = 0;
  const auto dec = split_decomposer(&calls);
  FeatureConfig cfg;
  cfg.mode = FeatureMode::Causal;
  cfg.window = 4;
  cfg.horizon = 2;
  cfg.context = 16;
  cfg.time_of_day = true;
  cfg.period = 8;
  const auto set = build_windows(series, cfg, &dec);
  CHECK(set.channels == 4);
  CHECK(calls == set.windows.size());
  const auto& w = set.windows[3];
  CHECK(w.at(0, 0, 1) + w.at(0, 1, 1) == doctest::Approx((series[0][w.start + 1] - set.norms[0].mean) / set.norms[0].std));
  CHECK(w.at(0, 3, 0) == doctest::Approx(std::cos(2 * 3.141592653589793 * static_cast<double>(w.start % 8) / 8)));
}

TEST_CASE("decomposed modes require a decomposer and enough samples") {
  std::vector<RealVec> series{testing::random_signal(40, 3)};
  FeatureConfig cfg;
  cfg.mode = FeatureMode::Full;
  CHECK_THROWS_AS(build_windows(series, cfg), InvalidConfig);
  cfg.mode = FeatureMode::Raw;
  CHECK_THROWS_AS(build_windows(series, cfg), InvalidInput);
}
