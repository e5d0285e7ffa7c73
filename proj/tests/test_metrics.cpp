#include <doctest.h>

#include <random>

#include "relight/metrics.hpp"

using namespace relight;

TEST_CASE("psnr reference values") {
    const SrgbImage zero(16, 16, 3, 0.f);
    const SrgbImage half(16, 16, 3, 0.5f);
    const SrgbImage one(16, 16, 3, 1.f);
    CHECK(psnr(zero, zero) == 99.0);
    CHECK(psnr(zero, half) == doctest::Approx(6.0206).epsilon(1e-3));
    CHECK(psnr(zero, one) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("psnr is symmetric and validates shape") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<float> uni(0.f, 1.f);
    SrgbImage a(12, 12, 3), b(12, 12, 3);
    for (float& v : a.data) v = uni(rng);
    for (float& v : b.data) v = uni(rng);
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK_THROWS_AS(psnr(a, SrgbImage(12, 11, 3)), Error);
}

TEST_CASE("ssim reference behavior") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<float> uni(0.f, 1.f);
    SrgbImage a(24, 24, 3);
    for (float& v : a.data) v = uni(rng);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));

    SrgbImage neg = a;
    for (float& v : neg.data) v = 1.f - v;
    CHECK(ssim(a, neg) < 0.5);

    // Constant vs different constant: structure terms cancel, value < 1.
    const SrgbImage ca(16, 16, 3, 0.3f), cb(16, 16, 3, 0.6f);
    CHECK(ssim(ca, cb) < 1.0);
    CHECK(ssim(ca, cb) > 0.0);

    SrgbImage b(24, 24, 3);
    for (float& v : b.data) v = uni(rng);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-9));
    CHECK_THROWS_AS(ssim(SrgbImage(8, 8, 3), SrgbImage(8, 8, 3)), Error);
}

TEST_CASE("vqa ratio formula and guards") {
    CHECK(vqa_ratio(1.0, 1.0) == 0.5);
    CHECK(vqa_ratio(1.0, 0.0) == 1.0);
    CHECK(vqa_ratio(0.528, 0.208) == doctest::Approx(0.7174).epsilon(1e-3));
    CHECK_THROWS_AS(vqa_ratio(0.0, 0.0), Error);
    CHECK_THROWS_AS(vqa_ratio(-1.0, 2.0), Error);
}

TEST_CASE("vqa ratio complement symmetry") {
    std::mt19937 rng(16);
    std::uniform_real_distribution<double> uni(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double p = uni(rng), n = uni(rng);
        if (p + n <= 0.0) continue;
        CHECK(vqa_ratio(p, n) + vqa_ratio(n, p) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}
