#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "perceptlab/image.hpp"

namespace perceptlab {

// The seven degradations plus the identity class. Order is the canonical
// report order everywhere (confusion matrices, option lists).
enum class DistortionClass : int {
    Blur = 0,
    Noise = 1,
    Brightness = 2,
    Compression = 3,
    Contrast = 4,
    Colorfulness = 5,
    Jitter = 6,
    Clean = 7,
};

inline constexpr int kNumClasses = 8;

inline constexpr std::array<DistortionClass, kNumClasses> all_classes() {
    return {DistortionClass::Blur,       DistortionClass::Noise,
            DistortionClass::Brightness, DistortionClass::Compression,
            DistortionClass::Contrast,   DistortionClass::Colorfulness,
            DistortionClass::Jitter,     DistortionClass::Clean};
}

// Lowercase class word as used in conversations ("blur", ..., "clean").
const std::string& class_word(DistortionClass c);
// Capitalized form for option lists and CSV headers ("Blur", ...).
const std::string& class_name(DistortionClass c);
// Inverse of class_word; throws DataError on unknown word.
DistortionClass class_from_word(const std::string& word);

struct DistortionSpec {
    DistortionClass cls = DistortionClass::Clean;
    int severity = 0;  // 1..5, 0 for Clean
    std::uint64_t seed = 0;
};

// One row of the severity table; only the field matching the class is used.
struct SeverityParams {
    double blur_sigma = 0.0;        // px
    double noise_sigma = 0.0;       // unit-interval intensity
    double brightness_delta = 0.0;  // unsigned magnitude; sign drawn from seed
    double quant_step = 0.0;        // step for unit-interval DCT coefficients
    double contrast_gamma = 1.0;    // gain about the per-image mean
    double saturation_gain = 1.0;   // chroma gain, luma preserved
    int jitter_max = 0;             // px
};

// Fixed calibration table; pure and total for severity in 1..5 and any
// non-Clean class. Clean has no parameters and is rejected.
SeverityParams severity_params(DistortionClass cls, int severity);

void validate_spec(const DistortionSpec& spec);

// Applies exactly one primitive per class; Clean returns a bit-identical
// copy. Deterministic in (pixels, spec).
RgbImage apply_distortion(const RgbImage& img, const DistortionSpec& spec);

}  // namespace perceptlab
