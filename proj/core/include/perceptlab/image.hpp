#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perceptlab {

// Fixed-size 8-bit RGB raster. Distortion and vision code converts to
// unit-interval doubles, works there, and re-quantizes on write.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, 3 bytes per pixel

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Enforces: data length = w*h*3, w,h >= 16 and divisible by 8.
void validate_image(const RgbImage& img);

RgbImage make_image(int width, int height);

// Unit-interval conversions (interleaved RGB doubles).
std::vector<double> to_unit(const RgbImage& img);
RgbImage from_unit(const std::vector<double>& unit, int width, int height);

double quantize_unit(double v);  // clamp to [0,1], round to the 1/255 grid

// BT.601 luma plane in [0,1].
std::vector<double> luma_plane(const RgbImage& img);

double luma_mean(const RgbImage& img);
double luma_variance(const RgbImage& img);

// Mean absolute 4-neighbor Laplacian response over the luma plane.
// Neighbors wrap toroidally, so a period-1 checkerboard of amplitude a
// scores exactly 8a and an isolated unit impulse contributes 8/(w*h).
double laplacian_energy(const RgbImage& img);

// PNG I/O, 8-bit RGB. Other color types are converted on read.
void write_png(const RgbImage& img, const std::string& path);
RgbImage read_png(const std::string& path);

}  // namespace perceptlab
