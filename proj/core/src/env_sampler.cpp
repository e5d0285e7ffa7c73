#include "relight/env_sampler.hpp"

#include <algorithm>
#include <cmath>

namespace relight {

namespace {
constexpr float kPi = 3.14159265358979323846f;
constexpr float kTwoPi = 2.f * kPi;
constexpr float kInv4Pi = 1.f / (4.f * kPi);

// Discrete sample from a piecewise-constant CDF over n cells. Returns the
// cell index; `frac` is the continuous remainder in [0,1) within the cell.
int sample_cdf(const float* cdf, int n, float u, float& frac) {
    const float* it = std::upper_bound(cdf + 1, cdf + n + 1, u);
    int i = std::clamp(static_cast<int>(it - cdf) - 1, 0, n - 1);
    const float lo = cdf[i], hi = cdf[i + 1];
    frac = hi > lo ? (u - lo) / (hi - lo) : 0.f;
    return i;
}

}  // namespace

EnvSampler::EnvSampler(const EquirectEnvMap& env, const LuminanceWeights& weights) {
    const LinearImage& img = env.image;
    width_ = img.width;
    height_ = img.height;
    if (width_ <= 0 || height_ <= 0)
        throw invalid_input("environment sampler needs a non-empty map");

    // Pixel weights are luminance times the pixel's exact solid angle, so the
    // sampler is piecewise constant in solid angle (not in (u, v)). A uniform
    // map then has pdf exactly 1/(4*pi) everywhere.
    //
    // The luminance is max-filtered over a 3x3 neighbourhood first: radiance
    // lookups interpolate bilinearly, so a direction just outside a bright
    // pixel still sees part of its energy. Without the dilation such
    // directions pair large radiance with a near-zero pdf, which shows up as
    // fireflies in the BSDF-sampled environment contribution.
    std::vector<double> lum(static_cast<std::size_t>(width_) * height_);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            lum[static_cast<std::size_t>(y) * width_ + x] =
                std::max(0.0, static_cast<double>(dot(img.rgb(x, y), weights.w)));
    std::vector<double> w(lum.size());
    std::vector<double> dcos(height_);
    double total = 0.0;
    for (int y = 0; y < height_; ++y) {
        dcos[y] = std::cos(kPi * y / height_) - std::cos(kPi * (y + 1) / height_);
        for (int x = 0; x < width_; ++x) {
            double peak = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = std::clamp(y + dy, 0, height_ - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = (x + dx + width_) % width_;  // azimuth wraps
                    peak = std::max(
                        peak, lum[static_cast<std::size_t>(yy) * width_ + xx]);
                }
            }
            const double val = peak * dcos[y];
            w[static_cast<std::size_t>(y) * width_ + x] = val;
            total += val;
        }
    }

    if (total <= 0.0) {
        uniform_ = true;
        return;
    }

    row_cdf_.assign(height_ + 1, 0.f);
    cond_cdf_.assign(static_cast<std::size_t>(width_ + 1) * height_, 0.f);
    density_.assign(w.size(), 0.f);
    cos_edges_.assign(height_ + 1, 0.f);
    for (int y = 0; y <= height_; ++y)
        cos_edges_[y] = std::cos(kPi * y / height_);

    std::vector<double> row_sum(height_, 0.0);
    for (int y = 0; y < height_; ++y) {
        double acc = 0.0;
        float* cdf = &cond_cdf_[static_cast<std::size_t>(y) * (width_ + 1)];
        for (int x = 0; x < width_; ++x)
            acc += w[static_cast<std::size_t>(y) * width_ + x];
        row_sum[y] = acc;
        double run = 0.0;
        cdf[0] = 0.f;
        for (int x = 0; x < width_; ++x) {
            run += w[static_cast<std::size_t>(y) * width_ + x];
            cdf[x + 1] = acc > 0.0 ? static_cast<float>(run / acc) : 0.f;
        }
        if (acc > 0.0) cdf[width_] = 1.f;
    }
    double run = 0.0;
    for (int y = 0; y < height_; ++y) {
        run += row_sum[y];
        row_cdf_[y + 1] = static_cast<float>(run / total);
    }
    row_cdf_[height_] = 1.f;

    // Per-pixel pdf over solid angle: P(pixel) / solid_angle(pixel).
    for (int y = 0; y < height_; ++y) {
        const double omega = kTwoPi / width_ * dcos[y];
        for (int x = 0; x < width_; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width_ + x;
            density_[i] =
                omega > 0.0 ? static_cast<float>(w[i] / total / omega) : 0.f;
        }
    }
}

Vec3 EnvSampler::sample(float u1, float u2, float& pdf_out) const {
    if (uniform_) {
        const float z = 1.f - 2.f * u1;
        const float r = std::sqrt(std::max(0.f, 1.f - z * z));
        const float phi = kTwoPi * u2;
        pdf_out = kInv4Pi;
        return {r * std::cos(phi), z, r * std::sin(phi)};
    }
    float ty, tx;
    const int y = sample_cdf(row_cdf_.data(), height_, u1, ty);
    const int x = sample_cdf(
        &cond_cdf_[static_cast<std::size_t>(y) * (width_ + 1)], width_, u2, tx);
    // Uniform over the pixel's solid angle: cos(phi) linear within the row.
    const float c = cos_edges_[y] + ty * (cos_edges_[y + 1] - cos_edges_[y]);
    const float v = std::acos(std::clamp(c, -1.f, 1.f)) / kPi;
    const float u = (x + tx) / width_;
    pdf_out = density_[static_cast<std::size_t>(y) * width_ + x];
    return dir_from_equirect(u, v);
}

float EnvSampler::pdf(const Vec3& d) const {
    if (uniform_) return kInv4Pi;
    float u, v;
    equirect_from_dir(d, u, v);
    const int x = std::clamp(static_cast<int>(u * width_), 0, width_ - 1);
    const int y = std::clamp(static_cast<int>(v * height_), 0, height_ - 1);
    return density_[static_cast<std::size_t>(y) * width_ + x];
}

}  // namespace relight
