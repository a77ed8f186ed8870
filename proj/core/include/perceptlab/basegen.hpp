#pragma once

#include <cstdint>
#include <string>

#include "perceptlab/image.hpp"

namespace perceptlab {

enum class BaseGenerator : int {
    Gradient = 0,
    Checker = 1,
    GaussianBlobs = 2,
    ColorField = 3,
    BandLimitedNoise = 4,
};

inline constexpr int kNumGenerators = 5;

const std::string& generator_name(BaseGenerator g);
BaseGenerator generator_from_name(const std::string& name);

struct BaseImageSpec {
    BaseGenerator generator = BaseGenerator::Gradient;
    std::uint64_t seed = 0;
    int size = 64;  // square, >= 16, divisible by 8
};

// Deterministic in spec. Every generator is normalized to the same global
// statistics (luma mean 0.5, luma std 0.16, fixed chroma energy) and carries
// a small per-pixel texture floor, so each distortion class leaves a
// measurable signature at every severity.
RgbImage generate_base_image(const BaseImageSpec& spec);

}  // namespace perceptlab
