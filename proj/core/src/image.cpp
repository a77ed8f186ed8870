#include "perceptlab/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>

#include "perceptlab/errors.hpp"

namespace perceptlab {

void validate_image(const RgbImage& img) {
    if (img.width < 16 || img.height < 16)
        throw DataError("image dimensions must be at least 16x16, got " +
                        std::to_string(img.width) + "x" + std::to_string(img.height));
    if (img.width % 8 != 0 || img.height % 8 != 0)
        throw DataError("image dimensions must be divisible by 8, got " +
                        std::to_string(img.width) + "x" + std::to_string(img.height));
    if (img.data.size() != img.pixel_count() * 3)
        throw DataError("image buffer size does not match dimensions");
}

RgbImage make_image(int width, int height) {
    RgbImage img;
    img.width = width;
    img.height = height;
    img.data.assign(static_cast<std::size_t>(width) * height * 3, 0);
    validate_image(img);
    return img;
}

std::vector<double> to_unit(const RgbImage& img) {
    std::vector<double> out(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) out[i] = img.data[i] / 255.0;
    return out;
}

double quantize_unit(double v) {
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return std::floor(v * 255.0 + 0.5) / 255.0;
}

RgbImage from_unit(const std::vector<double>& unit, int width, int height) {
    RgbImage img = make_image(width, height);
    if (unit.size() != img.data.size()) throw DataError("unit buffer size mismatch");
    for (std::size_t i = 0; i < unit.size(); ++i) {
        double v = unit[i];
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        img.data[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
    }
    return img;
}

std::vector<double> luma_plane(const RgbImage& img) {
    std::vector<double> y(img.pixel_count());
    for (std::size_t p = 0; p < y.size(); ++p) {
        y[p] = (0.299 * img.data[3 * p] + 0.587 * img.data[3 * p + 1] +
                0.114 * img.data[3 * p + 2]) /
               255.0;
    }
    return y;
}

double luma_mean(const RgbImage& img) {
    std::vector<double> y = luma_plane(img);
    double s = 0.0;
    for (double v : y) s += v;
    return s / static_cast<double>(y.size());
}

double luma_variance(const RgbImage& img) {
    std::vector<double> y = luma_plane(img);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    return var / static_cast<double>(y.size());
}

double laplacian_energy(const RgbImage& img) {
    validate_image(img);
    std::vector<double> y = luma_plane(img);
    const int w = img.width, h = img.height;
    double acc = 0.0;
    for (int r = 0; r < h; ++r) {
        int up = (r + h - 1) % h, dn = (r + 1) % h;
        for (int c = 0; c < w; ++c) {
            int lf = (c + w - 1) % w, rt = (c + 1) % w;
            double v = 4.0 * y[static_cast<std::size_t>(r) * w + c] -
                       y[static_cast<std::size_t>(up) * w + c] -
                       y[static_cast<std::size_t>(dn) * w + c] -
                       y[static_cast<std::size_t>(r) * w + lf] -
                       y[static_cast<std::size_t>(r) * w + rt];
            acc += std::fabs(v);
        }
    }
    return acc / static_cast<double>(img.pixel_count());
}

void write_png(const RgbImage& img, const std::string& path) {
    validate_image(img);
    png_image spec;
    std::memset(&spec, 0, sizeof(spec));
    spec.version = PNG_IMAGE_VERSION;
    spec.width = static_cast<png_uint_32>(img.width);
    spec.height = static_cast<png_uint_32>(img.height);
    spec.format = PNG_FORMAT_RGB;
    if (png_image_write_to_file(&spec, path.c_str(), 0, img.data.data(), 0, nullptr) == 0) {
        throw IoError("failed to write PNG '" + path + "': " + spec.message);
    }
}

RgbImage read_png(const std::string& path) {
    png_image spec;
    std::memset(&spec, 0, sizeof(spec));
    spec.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&spec, path.c_str()) == 0) {
        throw IoError("failed to read PNG '" + path + "': " + spec.message);
    }
    spec.format = PNG_FORMAT_RGB;
    RgbImage img;
    img.width = static_cast<int>(spec.width);
    img.height = static_cast<int>(spec.height);
    img.data.assign(PNG_IMAGE_SIZE(spec), 0);
    if (png_image_finish_read(&spec, nullptr, img.data.data(), 0, nullptr) == 0) {
        throw IoError("failed to decode PNG '" + path + "': " + spec.message);
    }
    validate_image(img);
    return img;
}

}  // namespace perceptlab
