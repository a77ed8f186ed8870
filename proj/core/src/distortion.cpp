#include "perceptlab/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "perceptlab/errors.hpp"
#include "perceptlab/rng.hpp"

namespace perceptlab {

namespace {

const std::array<std::string, kNumClasses> kWords = {
    "blur", "noise", "brightness", "compression",
    "contrast", "colorfulness", "jitter", "clean"};
const std::array<std::string, kNumClasses> kNames = {
    "Blur", "Noise", "Brightness", "Compression",
    "Contrast", "Colorfulness", "Jitter", "Clean"};

// Calibration table, severity 1..5. Magnitudes grow with severity; the
// saturation row ends in over-saturation (gain > 1) by design.
constexpr double kBlurSigma[5] = {0.5, 1.0, 1.5, 2.0, 3.0};
constexpr double kNoiseSigma[5] = {5.0 / 255, 10.0 / 255, 20.0 / 255, 35.0 / 255, 50.0 / 255};
constexpr double kBrightDelta[5] = {20.0 / 255, 35.0 / 255, 50.0 / 255, 65.0 / 255, 80.0 / 255};
constexpr double kQuantStep[5] = {8.0 / 255, 16.0 / 255, 32.0 / 255, 64.0 / 255, 96.0 / 255};
constexpr double kContrastGamma[5] = {0.7, 0.6, 0.5, 0.4, 0.3};
constexpr double kSaturationGain[5] = {0.6, 0.45, 0.3, 0.15, 1.8};
constexpr int kJitterMax[5] = {1, 2, 3, 5, 8};

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

std::vector<double> blur_unit(const std::vector<double>& u, int w, int h, double sigma) {
    std::vector<double> kern = gaussian_kernel(sigma);
    int radius = (static_cast<int>(kern.size()) - 1) / 2;
    std::vector<double> tmp(u.size()), out(u.size());
    // Horizontal pass, edge-clamped.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int xx = std::clamp(x + k, 0, w - 1);
                    acc += kern[k + radius] * u[(static_cast<std::size_t>(y) * w + xx) * 3 + c];
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
            }
        }
    }
    // Vertical pass.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) {
                    int yy = std::clamp(y + k, 0, h - 1);
                    acc += kern[k + radius] * tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
                }
                out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
            }
        }
    }
    return out;
}

// Orthonormal 8x8 DCT-II basis: B[u][x] = c_u cos((2x+1)u pi / 16).
struct DctBasis {
    double b[8][8];
    DctBasis() {
        for (int u = 0; u < 8; ++u) {
            double cu = (u == 0) ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x) {
                b[u][x] = cu * std::cos((2.0 * x + 1.0) * u * M_PI / 16.0);
            }
        }
    }
};

void block_quantize_channel(std::vector<double>& u, int w, int h, int channel, double step) {
    static const DctBasis dct;
    double blk[8][8], coef[8][8], tmp[8][8];
    for (int by = 0; by < h; by += 8) {
        for (int bx = 0; bx < w; bx += 8) {
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    blk[y][x] = u[(static_cast<std::size_t>(by + y) * w + bx + x) * 3 + channel];
            // coef = B * blk * B^T
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += dct.b[i][k] * blk[k][j];
                    tmp[i][j] = acc;
                }
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += tmp[i][k] * dct.b[j][k];
                    coef[i][j] = step * std::floor(acc / step + 0.5);
                }
            // blk = B^T * coef * B
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += dct.b[k][i] * coef[k][j];
                    tmp[i][j] = acc;
                }
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 8; ++k) acc += tmp[i][k] * dct.b[k][j];
                    u[(static_cast<std::size_t>(by + i) * w + bx + j) * 3 + channel] = acc;
                }
        }
    }
}

}  // namespace

const std::string& class_word(DistortionClass c) { return kWords[static_cast<int>(c)]; }
const std::string& class_name(DistortionClass c) { return kNames[static_cast<int>(c)]; }

DistortionClass class_from_word(const std::string& word) {
    for (int i = 0; i < kNumClasses; ++i) {
        if (kWords[i] == word) return static_cast<DistortionClass>(i);
    }
    throw DataError("unknown distortion class word '" + word + "'");
}

SeverityParams severity_params(DistortionClass cls, int severity) {
    if (cls == DistortionClass::Clean)
        throw DataError("severity_params: Clean is the identity class and has no parameters");
    if (severity < 1 || severity > 5)
        throw DataError("severity_params: severity must be in 1..5, got " +
                        std::to_string(severity));
    int i = severity - 1;
    SeverityParams p;
    p.blur_sigma = kBlurSigma[i];
    p.noise_sigma = kNoiseSigma[i];
    p.brightness_delta = kBrightDelta[i];
    p.quant_step = kQuantStep[i];
    p.contrast_gamma = kContrastGamma[i];
    p.saturation_gain = kSaturationGain[i];
    p.jitter_max = kJitterMax[i];
    return p;
}

void validate_spec(const DistortionSpec& spec) {
    if (spec.cls == DistortionClass::Clean) {
        if (spec.severity != 0)
            throw DataError("Clean uses severity 0 by convention, got " +
                            std::to_string(spec.severity));
        return;
    }
    if (spec.severity < 1 || spec.severity > 5)
        throw DataError("severity must be in 1..5 for class " + class_word(spec.cls) +
                        ", got " + std::to_string(spec.severity));
}

RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec) {
    validate_image(img);
    validate_spec(spec);
    if (spec.cls == DistortionClass::Clean) return img;

    const SeverityParams p = severity_params(spec.cls, spec.severity);
    const int w = img.width, h = img.height;
    std::vector<double> u = to_unit(img);

    switch (spec.cls) {
        case DistortionClass::Blur:
            u = blur_unit(u, w, h, p.blur_sigma);
            break;
        case DistortionClass::Noise: {
            for (std::size_t i = 0; i < u.size(); ++i)
                u[i] += p.noise_sigma * counter_gaussian(spec.seed, Stream::noise, i);
            break;
        }
        case DistortionClass::Brightness: {
            double sign = counter_uniform(spec.seed, Stream::brightness_sign, 0) < 0.5 ? -1.0 : 1.0;
            double delta = sign * p.brightness_delta;
            for (double& v : u) v += delta;
            break;
        }
        case DistortionClass::Compression:
            for (int c = 0; c < 3; ++c) block_quantize_channel(u, w, h, c, p.quant_step);
            break;
        case DistortionClass::Contrast: {
            double mean[3] = {0, 0, 0};
            for (std::size_t i = 0; i < u.size(); i += 3)
                for (int c = 0; c < 3; ++c) mean[c] += u[i + c];
            for (int c = 0; c < 3; ++c) mean[c] /= static_cast<double>(u.size() / 3);
            for (std::size_t i = 0; i < u.size(); i += 3)
                for (int c = 0; c < 3; ++c)
                    u[i + c] = mean[c] + p.contrast_gamma * (u[i + c] - mean[c]);
            break;
        }
        case DistortionClass::Colorfulness: {
            for (std::size_t i = 0; i < u.size(); i += 3) {
                double y = 0.299 * u[i] + 0.587 * u[i + 1] + 0.114 * u[i + 2];
                for (int c = 0; c < 3; ++c) u[i + c] = y + p.saturation_gain * (u[i + c] - y);
            }
            break;
        }
        case DistortionClass::Jitter: {
            std::vector<double> out(u.size());
            for (int y = 0; y < h; ++y) {
                int off = static_cast<int>(
                    counter_int(spec.seed, Stream::jitter, static_cast<std::uint64_t>(y),
                                -p.jitter_max, p.jitter_max));
                for (int x = 0; x < w; ++x) {
                    int src = ((x - off) % w + w) % w;  // wrap-around
                    for (int c = 0; c < 3; ++c)
                        out[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
                            u[(static_cast<std::size_t>(y) * w + src) * 3 + c];
                }
            }
            u = std::move(out);
            break;
        }
        case DistortionClass::Clean:
            break;  // handled above
    }

    return from_unit(u, w, h);
}

}  // namespace perceptlab
