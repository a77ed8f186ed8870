#include "perceptlab/basegen.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "perceptlab/errors.hpp"
#include "perceptlab/rng.hpp"

namespace perceptlab {

namespace {

constexpr double kTargetLumaMean = 0.5;
constexpr double kTargetLumaStd = 0.16;
constexpr double kTargetChromaRms = 0.07;
constexpr double kTextureAmp = 0.02;

const std::array<std::string, kNumGenerators> kGenNames = {
    "gradient", "checker", "gaussian-blobs", "color-field", "band-limited-noise"};

// Orthonormal basis of the luma-null plane (BT.601 weights), so chroma
// offsets leave luma untouched.
struct ChromaBasis {
    double c1[3], c2[3];
    ChromaBasis() {
        double a[3] = {1.0, -0.299 / 0.587, 0.0};
        double b[3] = {0.0, -0.114 / 0.587, 1.0};
        double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        for (int i = 0; i < 3; ++i) c1[i] = a[i] / na;
        double dot = b[0] * c1[0] + b[1] * c1[1] + b[2] * c1[2];
        for (int i = 0; i < 3; ++i) b[i] -= dot * c1[i];
        double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
        for (int i = 0; i < 3; ++i) c2[i] = b[i] / nb;
    }
};

std::vector<double> macro_luma(const BaseImageSpec& spec) {
    const int s = spec.size;
    const std::uint64_t seed = spec.seed;
    std::vector<double> m(static_cast<std::size_t>(s) * s, 0.0);

    switch (spec.generator) {
        case BaseGenerator::Gradient: {
            // Left-to-right ramp; strictly brighter toward +x.
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x)
                    m[static_cast<std::size_t>(y) * s + x] = static_cast<double>(x) / (s - 1);
            break;
        }
        case BaseGenerator::Checker: {
            const int cells[3] = {4, 8, 16};
            int cell = cells[counter_int(seed, Stream::base_macro, 0, 0, 2)];
            int px = static_cast<int>(counter_int(seed, Stream::base_macro, 1, 0, cell - 1));
            int py = static_cast<int>(counter_int(seed, Stream::base_macro, 2, 0, cell - 1));
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x)
                    m[static_cast<std::size_t>(y) * s + x] =
                        static_cast<double>((((x + px) / cell) + ((y + py) / cell)) % 2);
            break;
        }
        case BaseGenerator::GaussianBlobs: {
            int n = static_cast<int>(counter_int(seed, Stream::base_macro, 0, 4, 6));
            for (int i = 0; i < n; ++i) {
                double cx = counter_uniform(seed, Stream::base_macro, 10 + 4 * i) * s;
                double cy = counter_uniform(seed, Stream::base_macro, 11 + 4 * i) * s;
                double sig = s / 12.0 + counter_uniform(seed, Stream::base_macro, 12 + 4 * i) *
                                            (s / 5.0 - s / 12.0);
                double amp = (counter_uniform(seed, Stream::base_macro, 13 + 4 * i) < 0.5 ? -1 : 1) *
                             (0.5 + 0.5 * counter_uniform(seed, Stream::base_macro, 50 + i));
                for (int y = 0; y < s; ++y)
                    for (int x = 0; x < s; ++x) {
                        double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                        m[static_cast<std::size_t>(y) * s + x] +=
                            amp * std::exp(-d2 / (2.0 * sig * sig));
                    }
            }
            break;
        }
        case BaseGenerator::ColorField: {
            double f1 = 1.0 + counter_int(seed, Stream::base_macro, 0, 0, 2);
            double f2 = 1.0 + counter_int(seed, Stream::base_macro, 1, 0, 2);
            double p1 = counter_uniform(seed, Stream::base_macro, 2) * 2.0 * M_PI;
            double p2 = counter_uniform(seed, Stream::base_macro, 3) * 2.0 * M_PI;
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x)
                    m[static_cast<std::size_t>(y) * s + x] =
                        0.5 * std::sin(2.0 * M_PI * f1 * x / s + p1) +
                        0.5 * std::sin(2.0 * M_PI * f2 * (x + y) / (2.0 * s) + p2);
            break;
        }
        case BaseGenerator::BandLimitedNoise: {
            // White noise smoothed by a small separable Gaussian.
            std::vector<double> white(m.size());
            for (std::size_t i = 0; i < white.size(); ++i)
                white[i] = counter_gaussian(seed, Stream::base_macro, i);
            const double sigma = 1.5;
            const int radius = 5;
            double kern[2 * radius + 1];
            double sum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                kern[k + radius] = std::exp(-(static_cast<double>(k) * k) / (2 * sigma * sigma));
                sum += kern[k + radius];
            }
            for (double& v : kern) v /= sum;
            std::vector<double> tmp(m.size());
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    double acc = 0.0;
                    for (int k = -radius; k <= radius; ++k)
                        acc += kern[k + radius] * white[static_cast<std::size_t>(y) * s +
                                                        (((x + k) % s + s) % s)];
                    tmp[static_cast<std::size_t>(y) * s + x] = acc;
                }
            for (int y = 0; y < s; ++y)
                for (int x = 0; x < s; ++x) {
                    double acc = 0.0;
                    for (int k = -radius; k <= radius; ++k)
                        acc += kern[k + radius] *
                               tmp[static_cast<std::size_t>((((y + k) % s + s) % s)) * s + x];
                    m[static_cast<std::size_t>(y) * s + x] = acc;
                }
            break;
        }
    }
    return m;
}

}  // namespace

const std::string& generator_name(BaseGenerator g) { return kGenNames[static_cast<int>(g)]; }

BaseGenerator generator_from_name(const std::string& name) {
    for (int i = 0; i < kNumGenerators; ++i)
        if (kGenNames[i] == name) return static_cast<BaseGenerator>(i);
    throw DataError("unknown base generator '" + name + "'");
}

RgbImage generate_base_image(const BaseImageSpec& spec) {
    if (spec.size < 16 || spec.size % 8 != 0)
        throw DataError("base image size must be >= 16 and divisible by 8, got " +
                        std::to_string(spec.size));
    static const ChromaBasis chroma;
    const int s = spec.size;
    const std::size_t n = static_cast<std::size_t>(s) * s;

    // Macro luma, normalized to mean 0.5 / std 0.16.
    std::vector<double> m = macro_luma(spec);
    double mean = 0.0;
    for (double v : m) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : m) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    double scale = kTargetLumaStd / std::sqrt(std::max(var, 1e-12));
    for (double& v : m) v = kTargetLumaMean + (v - mean) * scale;

    // Smooth chroma field: hue angle fixed per image, amplitude varies slowly.
    double hue = counter_uniform(spec.seed, Stream::base_chroma, 0) * 2.0 * M_PI;
    double hue2 = hue + M_PI / 2.0;
    double fphase = counter_uniform(spec.seed, Stream::base_chroma, 1) * 2.0 * M_PI;
    std::vector<double> ca(n), cb(n);
    double rms = 0.0;
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            double t = 2.0 * M_PI * (x + 2.0 * y) / (3.0 * s) + fphase;
            double a = std::cos(hue) + 0.5 * std::sin(t);
            double b = std::sin(hue2) + 0.5 * std::cos(t);
            ca[static_cast<std::size_t>(y) * s + x] = a;
            cb[static_cast<std::size_t>(y) * s + x] = b;
            rms += a * a + b * b;
        }
    rms = std::sqrt(rms / static_cast<double>(n));
    double cgain = kTargetChromaRms / std::max(rms, 1e-12);

    // Compose: luma + chroma + per-pixel texture floor.
    std::vector<double> u(n * 3);
    for (std::size_t p = 0; p < n; ++p) {
        double a = ca[p] * cgain, b = cb[p] * cgain;
        for (int c = 0; c < 3; ++c) {
            double tex = kTextureAmp * (2.0 * counter_uniform(spec.seed, Stream::base_texture,
                                                              p * 3 + c) -
                                        1.0);
            u[p * 3 + c] = m[p] + a * chroma.c1[c] + b * chroma.c2[c] + tex;
        }
    }
    return from_unit(u, s, s);
}

}  // namespace perceptlab
