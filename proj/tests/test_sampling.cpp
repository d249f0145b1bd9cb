#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sasdp/sampling.hpp"
#include "sasdp/validation.hpp"

using namespace sasdp;

namespace {
constexpr std::uint64_t kSeed = 8;
}

TEST_CASE("philox 2x64-10 known-answer vectors") {
  // reference vectors from the Random123 distribution
  const auto zero = sasdp::detail::philox2x64_block(0, 0, 0);
  CHECK(zero[0] == 0xca00a0459843d731ULL);
  CHECK(zero[1] == 0x66c24222c9a845b5ULL);
  const auto ones = sasdp::detail::philox2x64_block(~0ULL, ~0ULL, ~0ULL);
  CHECK(ones[0] == 0x65b021d60cd8310fULL);
  CHECK(ones[1] == 0x4d02f3222f86df20ULL);
  const auto pi = sasdp::detail::philox2x64_block(0xa4093822299f31d0ULL,
                                                  0x243f6a8885a308d3ULL,
                                                  0x13198a2e03707344ULL);
  CHECK(pi[0] == 0x0a5e742c2997341cULL);
  CHECK(pi[1] == 0xb0f883d38000de5dULL);
}

TEST_CASE("streams are deterministic and substreams distinct") {
  RandomStream a(123, 5), b(123, 5), c(123, 6), d(124, 5);
  std::vector<std::uint64_t> wa, wb;
  for (int i = 0; i < 64; ++i) {
    wa.push_back(a.next_u64());
    wb.push_back(b.next_u64());
  }
  CHECK(wa == wb);
  bool differs_sub = false, differs_seed = false;
  for (int i = 0; i < 64; ++i) {
    differs_sub = differs_sub || c.next_u64() != wa[static_cast<std::size_t>(i)];
    differs_seed = differs_seed || d.next_u64() != wa[static_cast<std::size_t>(i)];
  }
  CHECK(differs_sub);
  CHECK(differs_seed);
}

TEST_CASE("uniforms are strictly inside (0, 1)") {
  RandomStream s(kSeed, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.next_uniform_open01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sas sampler replays bitwise under a fixed seed") {
  RandomStream a(kSeed, 3), b(kSeed, 3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_standard_sas(1.5, a) == sample_standard_sas(1.5, b));
  }
}

TEST_CASE("alpha = 1 branch is tan of a uniform angle") {
  RandomStream s(kSeed, 11), replay(kSeed, 11);
  for (int i = 0; i < 1000; ++i) {
    const double got = sample_standard_sas(1.0, s);
    const double u = replay.next_uniform_open01();
    replay.next_uniform_open01();  // the exponential draw, unused on this branch
    CHECK(got == std::tan(M_PI * (u - 0.5)));
  }
}

TEST_CASE("sampler matches the gaussian closed form at alpha = 2") {
  RandomStream s(kSeed, 21);
  std::vector<double> xs(10000);
  for (auto& v : xs) v = sample_standard_sas(2.0, s);
  // variance of the standardized law is 2
  const auto ks = ks_statistic(std::move(xs), [](double x) {
    return 0.5 * std::erfc(-x / 2.0);
  });
  CHECK(ks.pass);
}

TEST_CASE("sampler matches the numerical cdf at alpha = 1.5") {
  RandomStream s(kSeed, 22);
  std::vector<double> xs(10000);
  for (auto& v : xs) v = sample_standard_sas(1.5, s);
  const auto ks = ks_statistic(std::move(xs), [](double x) {
    return cdf(x, {1.5, 1.0, 0.0});
  });
  CHECK(ks.pass);
}

TEST_CASE("location-scale sampling") {
  SECTION("tiny scale concentrates at mu") {
    RandomStream s(kSeed, 31);
    std::vector<double> xs(100000);
    for (auto& v : xs) v = sample({1.5, 1e-6, 3.0}, s);
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    CHECK(std::abs(xs[xs.size() / 2] - 3.0) < 5e-6);
  }
  SECTION("alpha = 2 sample mean concentrates") {
    RandomStream s(kSeed, 32);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) sum += sample({2.0, 1.0, 0.0}, s);
    CHECK(std::abs(sum / 1e5) < 0.02);
  }
  SECTION("seed replay") {
    RandomStream a(7, 1), b(7, 1);
    for (int i = 0; i < 100; ++i) CHECK(sample({1.3, 2.0, -1.0}, a) == sample({1.3, 2.0, -1.0}, b));
  }
}

TEST_CASE("sample_vector") {
  SECTION("m = 1 equals a single draw") {
    RandomStream a(kSeed, 41), b(kSeed, 41);
    const auto v = sample_vector(1, {1.5, 1.0, 0.0}, a);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == sample({1.5, 1.0, 0.0}, b));
  }
  SECTION("vector equals sequential scalar draws") {
    RandomStream a(kSeed, 42), b(kSeed, 42);
    const auto v = sample_vector(50, {1.5, 1.0, 0.0}, a);
    REQUIRE(v.size() == 50);
    for (double x : v) CHECK(x == sample({1.5, 1.0, 0.0}, b));
  }
  SECTION("consecutive coordinates are uncorrelated") {
    RandomStream s(kSeed, 43);
    const auto v = sample_vector(10000, {2.0, 1.0, 0.0}, s);  // finite variance case
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      num += (v[i] - mean) * (v[i + 1] - mean);
      den += (v[i] - mean) * (v[i] - mean);
    }
    CHECK(std::abs(num / den) < 4.0 / std::sqrt(static_cast<double>(v.size())));
  }
  SECTION("m = 0 rejected") {
    RandomStream s(kSeed, 44);
    CHECK_THROWS_AS(sample_vector(0, {1.5, 1.0, 0.0}, s), std::invalid_argument);
  }
}

TEST_CASE("laplace and gaussian baselines") {
  SECTION("laplace KS against the closed-form cdf") {
    RandomStream s(kSeed, 51);
    std::vector<double> xs(10000);
    for (auto& v : xs) v = sample_laplace(1.0, s);
    const auto ks = ks_statistic(std::move(xs), [](double x) {
      return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    });
    CHECK(ks.pass);
  }
  SECTION("gaussian sample variance") {
    RandomStream s(kSeed, 52);
    double ss = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double v = sample_gaussian(1.0, s);
      ss += v * v;
    }
    CHECK(std::abs(ss / 1e5 - 1.0) < 0.02);
  }
  SECTION("determinism") {
    RandomStream a(9, 9), b(9, 9);
    for (int i = 0; i < 100; ++i) {
      CHECK(sample_laplace(2.0, a) == sample_laplace(2.0, b));
      CHECK(sample_gaussian(0.5, a) == sample_gaussian(0.5, b));
    }
  }
  SECTION("invalid scales") {
    RandomStream s(1, 1);
    CHECK_THROWS_AS(sample_laplace(0.0, s), std::invalid_argument);
    CHECK_THROWS_AS(sample_gaussian(-1.0, s), std::invalid_argument);
  }
}

TEST_CASE("ks statistic") {
  SECTION("single-sample step function") {
    const auto r = ks_statistic({0.0}, [](double) { return 0.5; });
    CHECK(r.statistic == 0.5);
    CHECK(r.n == 1);
  }
  SECTION("empty input rejected") {
    CHECK_THROWS_AS(ks_statistic({}, [](double) { return 0.5; }), std::invalid_argument);
  }
  SECTION("gross mismatch fails") {
    RandomStream s(kSeed, 61);
    std::vector<double> xs(1000);
    for (auto& v : xs) v = sample_gaussian(1.0, s) + 10.0;
    const auto r = ks_statistic(std::move(xs), [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
    CHECK_FALSE(r.pass);
  }
  SECTION("pass rate over seeded repetitions") {
    int passes = 0;
    for (int rep = 0; rep < 100; ++rep) {
      RandomStream s(kSeed, 700 + static_cast<std::uint64_t>(rep));
      std::vector<double> xs(1000);
      for (auto& v : xs) v = s.next_uniform_open01();
      if (ks_statistic(std::move(xs), [](double x) { return std::clamp(x, 0.0, 1.0); }).pass) {
        ++passes;
      }
    }
    CHECK(passes >= 95);
  }
  SECTION("critical value formula") {
    RandomStream s(kSeed, 62);
    std::vector<double> xs(100);
    for (auto& v : xs) v = s.next_uniform_open01();
    const auto r = ks_statistic(std::move(xs), [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(r.critical_value_99 == Catch::Approx(0.163).epsilon(1e-12));
  }
}

TEST_CASE("strict stability of centered sums") {
  // a X1 + b X2 follows the aggregated scale (a^alpha + b^alpha)^(1/alpha)
  for (double alpha : {1.0, 1.5, 2.0}) {
    const CdfTable table(alpha);
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}}) {
      const double scale = std::pow(std::pow(a, alpha) + std::pow(b, alpha), 1.0 / alpha);
      RandomStream s(kSeed, 800 + static_cast<std::uint64_t>(10 * alpha + a));
      std::vector<double> xs(10000);
      for (auto& v : xs) {
        v = a * sample_standard_sas(alpha, s) + b * sample_standard_sas(alpha, s);
      }
      const auto ks = ks_statistic(std::move(xs), [&](double x) { return table(x / scale); });
      CAPTURE(alpha, a, b);
      CHECK(ks.pass);
    }
  }
}

TEST_CASE("invalid alpha rejected by the sampler") {
  RandomStream s(1, 0);
  CHECK_THROWS_AS(sample_standard_sas(0.0, s), std::invalid_argument);
  CHECK_THROWS_AS(sample_standard_sas(2.5, s), std::invalid_argument);
}
