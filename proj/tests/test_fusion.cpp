#include <doctest.h>

#include <cmath>
#include <random>

#include "relight/fusion.hpp"
#include "relight/radiometry.hpp"
#include "test_support.hpp"

using namespace relight;

namespace {

// 2x1 so outputs can be wrapped as (2:1) equirect maps by the fusion stage.
BracketEntry gray_entry(float value, float ev, int w = 2, int h = 1) {
    BracketEntry e;
    e.ev = ev;
    e.image = SrgbImage(w, h, 3, value);
    return e;
}

BracketSequence oracle_sequence(const LinearImage& hdr,
                                std::initializer_list<float> evs) {
    BracketSequence seq;
    for (float ev : evs) {
        BracketEntry e;
        e.ev = ev;
        e.image = simulate_underexposure(hdr, ev);
        seq.entries.push_back(std::move(e));
    }
    return seq;
}

}  // namespace

TEST_CASE("normalized luminance of bracket entries") {
    const FusionParams p;
    CHECK(normalized_luminance(gray_entry(1.f, 0.f), p).at(0, 0, 0) ==
          doctest::Approx(1.0).epsilon(1e-5));
    CHECK(normalized_luminance(gray_entry(0.5f, 0.f), p).at(0, 0, 0) ==
          doctest::Approx(0.189465).epsilon(1e-5));
    CHECK(normalized_luminance(gray_entry(0.f, 0.f), p).at(0, 0, 0) == 0.f);
}

TEST_CASE("scale_to_irradiance applies the exposure factor") {
    ScalarRaster lum(1, 1, 1);
    lum.at(0, 0, 0) = 0.5f;
    CHECK(scale_to_irradiance(lum, 0.f).at(0, 0, 0) == 0.5f);
    lum.at(0, 0, 0) = 0.189465f;
    CHECK(scale_to_irradiance(lum, -3.f).at(0, 0, 0) ==
          doctest::Approx(1.515718).epsilon(1e-5));
    lum.at(0, 0, 0) = 0.f;
    CHECK(scale_to_irradiance(lum, -5.f).at(0, 0, 0) == 0.f);
}

TEST_CASE("iterative merge keeps the base where unsaturated") {
    const FusionParams p;
    BracketSequence seq;
    seq.entries.push_back(gray_entry(0.1f, -3.f));
    seq.entries.push_back(gray_entry(0.6f, 0.f));
    const float base_lum = std::pow(0.6f, 2.4f);  // well below threshold
    CHECK(iterative_merge(seq, p).at(0, 0, 0) ==
          doctest::Approx(base_lum).epsilon(1e-4));
}

TEST_CASE("iterative merge replaces saturated base with darker estimate") {
    const FusionParams p;
    BracketSequence seq;
    seq.entries.push_back(gray_entry(0.5f, -3.f));
    seq.entries.push_back(gray_entry(1.f, 0.f));
    CHECK(iterative_merge(seq, p).at(0, 0, 0) ==
          doctest::Approx(1.515718).epsilon(1e-5));
}

TEST_CASE("all-saturated pixel settles at the darkest clipped floor") {
    const FusionParams p;
    BracketSequence seq;
    seq.entries.push_back(gray_entry(1.f, -6.f));
    seq.entries.push_back(gray_entry(1.f, -3.f));
    seq.entries.push_back(gray_entry(1.f, 0.f));
    CHECK(iterative_merge(seq, p).at(0, 0, 0) ==
          doctest::Approx(64.0).epsilon(1e-5));
}

TEST_CASE("single-entry merge degenerates to its own estimate") {
    const FusionParams p;
    BracketSequence seq;
    seq.entries.push_back(gray_entry(0.5f, 0.f));
    CHECK(iterative_merge(seq, p).at(0, 0, 0) ==
          doctest::Approx(0.189465).epsilon(1e-5));
}

TEST_CASE("reattach_chromaticity cases") {
    const FusionParams p;

    // Unsaturated base: ratio collapses, HDR = I^gamma.
    const BracketEntry base = gray_entry(0.6f, 0.f);
    const ScalarRaster merged = iterative_merge(
        [&] {
            BracketSequence s;
            s.entries.push_back(base);
            return s;
        }(),
        p);
    const FusedHdr plain = reattach_chromaticity(merged, base, p);
    CHECK(plain.map.image.rgb(0, 0).x ==
          doctest::Approx(std::pow(0.6f, 2.4f)).epsilon(1e-5));

    // Saturated white pixel with boosted merged luminance.
    ScalarRaster boosted(2, 1, 1);
    boosted.at(0, 0, 0) = 1.515718f;
    boosted.at(1, 0, 0) = 1.515718f;
    const FusedHdr sat = reattach_chromaticity(boosted, gray_entry(1.f, 0.f), p);
    CHECK(sat.map.image.rgb(0, 0).x == doctest::Approx(1.515718).epsilon(1e-4));
    CHECK(sat.map.image.rgb(0, 0).y == doctest::Approx(1.515718).epsilon(1e-4));
    CHECK(sat.map.image.rgb(0, 0).z == doctest::Approx(1.515718).epsilon(1e-4));

    // Black pixel guarded against division blowup.
    ScalarRaster zero(2, 1, 1);
    const FusedHdr black = reattach_chromaticity(zero, gray_entry(0.f, 0.f), p);
    CHECK(black.map.image.rgb(0, 0).x == 0.f);
    CHECK(std::isfinite(black.map.image.rgb(0, 0).x));
}

TEST_CASE("single bracket fuse equals plain linearization") {
    BracketSequence seq;
    SrgbImage img(4, 2, 3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> uni(0.f, 1.f);
    for (float& v : img.data) v = uni(rng);
    seq.entries.push_back({img, 0.f});
    const FusedHdr fused = fuse_brackets(seq);
    const LinearImage ref = srgb_to_linear(img);
    for (std::size_t i = 0; i < ref.data.size(); ++i)
        CHECK(fused.map.image.data[i] ==
              doctest::Approx(ref.data[i]).epsilon(1e-5));
}

TEST_CASE("oracle fusion recovers luminance where recoverable") {
    // Near-gray HDR ramp peaking near 56x the base clip level.
    LinearImage hdr = testsupport::analytic_equirect(64, 32, [](const Vec3& d) {
        const float t = 0.5f + 0.5f * d.y;
        const float base = 0.05f + 55.f * t * t;
        return Vec3{base * 1.02f, base, base * 0.98f};
    });
    const FusedHdr fused =
        fuse_brackets(oracle_sequence(hdr, {-6.f, -3.f, 0.f}), {});
    const ScalarRaster truth = luminance(hdr);
    const ScalarRaster got = luminance(fused.map.image);
    for (std::size_t i = 0; i < truth.data.size(); ++i) {
        // Every pixel stays below the EV-6 clip, so all are recoverable.
        const float rel = std::fabs(got.data[i] - truth.data[i]) /
                          std::max(truth.data[i], 1e-6f);
        CHECK(rel <= 0.02f);
    }
    CHECK(fused.dynamic_range_stops >= 5.5f);
}

TEST_CASE("fused output is a chromaticity-preserving scale of the base") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<float> uni(0.05f, 1.f);
    BracketSequence seq;
    for (float ev : {-3.f, 0.f}) {
        BracketEntry e;
        e.ev = ev;
        e.image = SrgbImage(8, 4, 3);
        for (float& v : e.image.data) v = uni(rng);
        seq.entries.push_back(std::move(e));
    }
    const FusedHdr fused = fuse_brackets(seq);
    const LinearImage base_lin = srgb_to_linear(seq.base().image);
    for (std::size_t px = 0; px < base_lin.pixel_count(); ++px) {
        const Vec3 h = fused.map.image.rgb(static_cast<int>(px % 8),
                                           static_cast<int>(px / 8));
        const Vec3 b = base_lin.rgb(static_cast<int>(px % 8),
                                    static_cast<int>(px / 8));
        const float r0 = h.x / b.x, r1 = h.y / b.y, r2 = h.z / b.z;
        CHECK(r1 == doctest::Approx(r0).epsilon(1e-5));
        CHECK(r2 == doctest::Approx(r0).epsilon(1e-5));
    }
}

TEST_CASE("fusion never darkens below the base estimate") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<float> uni(0.f, 1.f);
    BracketSequence seq;
    for (float ev : {-6.f, -3.f, 0.f}) {
        BracketEntry e;
        e.ev = ev;
        e.image = SrgbImage(8, 4, 3);
        for (float& v : e.image.data) v = uni(rng) * (ev == 0.f ? 1.f : 0.6f);
        seq.entries.push_back(std::move(e));
    }
    const FusedHdr fused = fuse_brackets(seq);
    const ScalarRaster fused_lum = luminance(fused.map.image);
    const ScalarRaster base_lum = luminance(srgb_to_linear(seq.base().image));
    for (std::size_t i = 0; i < fused_lum.data.size(); ++i)
        CHECK(fused_lum.data[i] >= base_lum.data[i] - 1e-6f);
}

TEST_CASE("blend is continuous across the saturation threshold") {
    const FusionParams p;
    // Sweep the base bracket's gray level through the blend window while a
    // darker bracket offers a very different estimate; the output must move
    // smoothly, never jumping.
    const float dark_gray = 0.5f;  // EV-3 estimate 1.5157
    float prev = -1.f;
    float max_step = 0.f, total = 0.f;
    const float g_lo = std::pow(0.80f, 1.f / 2.4f);
    const float g_hi = std::pow(0.99f, 1.f / 2.4f);
    const int steps = 2000;
    for (int i = 0; i <= steps; ++i) {
        const float g = g_lo + (g_hi - g_lo) * i / steps;
        BracketSequence seq;
        seq.entries.push_back(gray_entry(dark_gray, -3.f));
        seq.entries.push_back(gray_entry(g, 0.f));
        const float out = iterative_merge(seq, p).at(0, 0, 0);
        if (prev >= 0.f) {
            max_step = std::max(max_step, std::fabs(out - prev));
            total += std::fabs(out - prev);
        }
        prev = out;
    }
    CHECK(total > 0.4f);       // the transition actually happens
    CHECK(max_step < 0.01f);   // ... without any hard-threshold jump
}

TEST_CASE("bracket sequence validation") {
    BracketSequence seq;
    CHECK_THROWS_AS(seq.validate(), Error);
    seq.entries.push_back(gray_entry(0.5f, 0.f));
    CHECK_NOTHROW(seq.validate());
    seq.entries.push_back(gray_entry(0.5f, -1.f));  // not ascending
    CHECK_THROWS_AS(seq.validate(), Error);
    seq.entries[1].ev = 1.f;
    seq.entries[1].image = SrgbImage(2, 2, 3);  // dimension mismatch
    CHECK_THROWS_AS(seq.validate(), Error);
}

TEST_CASE("fusion params validation") {
    FusionParams p;
    CHECK_NOTHROW(p.validate());
    p.saturation_threshold = 1.2f;
    CHECK_THROWS_AS(p.validate(), Error);
    p.saturation_threshold = 0.9f;
    p.blend_halfwidth = 0.2f;  // >= min(thr, 1 - thr)
    CHECK_THROWS_AS(p.validate(), Error);
}
