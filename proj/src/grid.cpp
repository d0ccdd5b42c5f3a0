#include "boundarykit/grid.hpp"

#include <cmath>
#include <string>

#include "boundarykit/errors.hpp"

namespace bk {

void require_positive_dims(int height, int width, const char* what) {
    if (height < 1 || width < 1) {
        throw ValidationError(std::string(what) + ": dimensions must be positive, got " +
                              std::to_string(height) + "x" + std::to_string(width));
    }
}

namespace {

// Validates before anything is allocated.
std::size_t checked_area(int height, int width, const char* what) {
    require_positive_dims(height, width, what);
    return std::size_t(height) * std::size_t(width);
}

std::size_t checked_volume(int channels, int height, int width, const char* what) {
    if (channels < 1)
        throw ValidationError(std::string(what) + ": channels must be positive");
    return std::size_t(channels) * checked_area(height, width, what);
}

} // namespace

void require_same_dims(int h1, int w1, int h2, int w2, const char* what) {
    if (h1 != h2 || w1 != w2) {
        throw ValidationError(std::string(what) + ": dimension mismatch, " +
                              std::to_string(h1) + "x" + std::to_string(w1) + " vs " +
                              std::to_string(h2) + "x" + std::to_string(w2));
    }
}

LabelMap::LabelMap(int height_, int width_, int num_classes_, int ignore_index_,
                   std::uint8_t fill)
    : height(height_), width(width_), num_classes(num_classes_),
      ignore_index(ignore_index_), data(checked_area(height_, width_, "LabelMap"), fill) {
    validate();
}

void LabelMap::validate() const {
    require_positive_dims(height, width, "LabelMap");
    if (num_classes < 1 || num_classes > 256)
        throw ValidationError("LabelMap: num_classes must be in [1,256], got " +
                              std::to_string(num_classes));
    if (ignore_index < 0 || ignore_index > 255)
        throw ValidationError("LabelMap: ignore_index must fit in one byte");
    if (data.size() != pixel_count())
        throw ValidationError("LabelMap: data length does not match height*width");
    for (std::size_t i = 0; i < data.size(); ++i) {
        int v = data[i];
        if (v >= num_classes && v != ignore_index)
            throw ValidationError("LabelMap: value " + std::to_string(v) + " at pixel " +
                                  std::to_string(i) + " is neither a class index nor ignore");
    }
}

FeatureMap::FeatureMap(int channels_, int height_, int width_, float fill)
    : channels(channels_), height(height_), width(width_),
      data(checked_volume(channels_, height_, width_, "FeatureMap"), fill) {}

void FeatureMap::validate() const {
    require_positive_dims(height, width, "FeatureMap");
    if (channels < 1)
        throw ValidationError("FeatureMap: channels must be positive");
    if (data.size() != value_count())
        throw ValidationError("FeatureMap: data length does not match channels*height*width");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i]))
            throw ValidationError("FeatureMap: non-finite value at index " + std::to_string(i));
}

DisplacementField::DisplacementField(int height_, int width_, float fill_dx, float fill_dy)
    : height(height_), width(width_),
      dx(checked_area(height_, width_, "DisplacementField"), fill_dx),
      dy(dx.size(), fill_dy) {}

void DisplacementField::validate() const {
    require_positive_dims(height, width, "DisplacementField");
    if (dx.size() != pixel_count() || dy.size() != pixel_count())
        throw ValidationError("DisplacementField: dx/dy length does not match height*width");
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (!std::isfinite(dx[i]) || !std::isfinite(dy[i]))
            throw ValidationError("DisplacementField: non-finite offset at index " +
                                  std::to_string(i));
}

BinaryMask::BinaryMask(int height_, int width_, bool fill)
    : height(height_), width(width_),
      bits(checked_area(height_, width_, "BinaryMask"), fill ? 1 : 0) {}

std::size_t BinaryMask::count_true() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += (b != 0);
    return n;
}

void BinaryMask::validate() const {
    require_positive_dims(height, width, "BinaryMask");
    if (bits.size() != pixel_count())
        throw ValidationError("BinaryMask: bits length does not match height*width");
}

RgbImage::RgbImage(int height_, int width_, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : height(height_), width(width_),
      data(checked_area(height_, width_, "RgbImage") * 3) {
    for (std::size_t i = 0; i < data.size(); i += 3) {
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
}

void RgbImage::validate() const {
    require_positive_dims(height, width, "RgbImage");
    if (data.size() != pixel_count() * 3)
        throw ValidationError("RgbImage: data length does not match 3*height*width");
}

} // namespace bk
