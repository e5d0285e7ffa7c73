#include "relight/metrics.hpp"

#include <cmath>
#include <vector>

namespace relight {

double psnr(const SrgbImage& a, const SrgbImage& b) {
    if (!a.same_shape(b)) throw invalid_input("psnr inputs must match in shape");
    if (a.empty()) throw invalid_input("psnr inputs must be non-empty");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

// Rec.-weighted luma of the display-referred samples.
std::vector<double> luma_plane(const SrgbImage& img) {
    std::vector<double> out(img.pixel_count());
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Vec3 c = img.rgb(x, y);
            out[static_cast<std::size_t>(y) * img.width + x] =
                0.21267 * c.x + 0.71516 * c.y + 0.07217 * c.z;
        }
    return out;
}

}  // namespace

double ssim(const SrgbImage& a, const SrgbImage& b) {
    if (!a.same_shape(b)) throw invalid_input("ssim inputs must match in shape");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    if (a.width < kWin || a.height < kWin)
        throw invalid_input("ssim needs min dimension >= 11");

    double kernel[kWin];
    double ksum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - kWin / 2;
        kernel[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        ksum += kernel[i];
    }
    for (double& k : kernel) k /= ksum;

    const std::vector<double> la = luma_plane(a);
    const std::vector<double> lb = luma_plane(b);
    const int w = a.width, h = a.height;

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    double total = 0.0;
    std::size_t count = 0;
    for (int cy = kWin / 2; cy < h - kWin / 2; ++cy) {
        for (int cx = kWin / 2; cx < w - kWin / 2; ++cx) {
            double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
            for (int j = 0; j < kWin; ++j) {
                for (int i = 0; i < kWin; ++i) {
                    const double wgt = kernel[i] * kernel[j];
                    const double va =
                        la[static_cast<std::size_t>(cy + j - kWin / 2) * w + cx +
                           i - kWin / 2];
                    const double vb =
                        lb[static_cast<std::size_t>(cy + j - kWin / 2) * w + cx +
                           i - kWin / 2];
                    mu_a += wgt * va;
                    mu_b += wgt * vb;
                    aa += wgt * va * va;
                    bb += wgt * vb * vb;
                    ab += wgt * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double num = (2 * mu_a * mu_b + c1) * (2 * cov + c2);
            const double den =
                (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double vqa_ratio(double pos, double neg) {
    if (pos < 0.0 || neg < 0.0)
        throw invalid_input("vqa scores must be nonnegative");
    if (pos + neg <= 0.0)
        throw invalid_input("vqa ratio undefined for pos + neg = 0");
    return pos / (pos + neg);
}

}  // namespace relight
