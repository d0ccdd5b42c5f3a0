#pragma once

#include <cstdint>
#include <vector>

namespace bk {

/// H x W map of class indices. Every value is either < num_classes or equal
/// to ignore_index (reserved for unlabeled pixels).
struct LabelMap {
    int height = 0;
    int width = 0;
    int num_classes = 0;
    int ignore_index = 255;
    std::vector<std::uint8_t> data; // row-major

    LabelMap() = default;
    LabelMap(int height, int width, int num_classes, int ignore_index = 255,
             std::uint8_t fill = 0);

    std::uint8_t& at(int y, int x) { return data[std::size_t(y) * width + x]; }
    std::uint8_t at(int y, int x) const { return data[std::size_t(y) * width + x]; }
    bool is_ignore(int y, int x) const { return at(y, x) == ignore_index; }
    std::size_t pixel_count() const { return std::size_t(height) * width; }

    /// Throws ValidationError if dimensions or stored values break the invariants.
    void validate() const;
};

/// C x H x W grid of real values, channel-major. All values finite.
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data; // [c][y][x]

    FeatureMap() = default;
    FeatureMap(int channels, int height, int width, float fill = 0.0f);

    std::size_t index(int c, int y, int x) const {
        return (std::size_t(c) * height + y) * width + x;
    }
    float& at(int c, int y, int x) { return data[index(c, y, x)]; }
    float at(int c, int y, int x) const { return data[index(c, y, x)]; }
    std::size_t value_count() const { return std::size_t(channels) * height * width; }

    void validate() const;
};

/// Per-pixel 2D offsets in pixels: +x rightward, +y downward.
struct DisplacementField {
    int height = 0;
    int width = 0;
    std::vector<float> dx; // row-major
    std::vector<float> dy;

    DisplacementField() = default;
    DisplacementField(int height, int width, float fill_dx = 0.0f, float fill_dy = 0.0f);

    std::size_t index(int y, int x) const { return std::size_t(y) * width + x; }
    std::size_t pixel_count() const { return std::size_t(height) * width; }

    void validate() const;
};

/// H x W boolean grid stored as 0/1 bytes.
struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits; // row-major, 0 or 1

    BinaryMask() = default;
    BinaryMask(int height, int width, bool fill = false);

    bool get(int y, int x) const { return bits[std::size_t(y) * width + x] != 0; }
    void set(int y, int x, bool v) { bits[std::size_t(y) * width + x] = v ? 1 : 0; }
    std::size_t pixel_count() const { return std::size_t(height) * width; }
    std::size_t count_true() const;

    void validate() const;
};

/// H x W image of 8-bit RGB triples, interleaved.
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data; // r,g,b per pixel

    RgbImage() = default;
    RgbImage(int height, int width, std::uint8_t r = 0, std::uint8_t g = 0,
             std::uint8_t b = 0);

    std::size_t index(int y, int x) const { return (std::size_t(y) * width + x) * 3; }
    std::size_t pixel_count() const { return std::size_t(height) * width; }

    void validate() const;
};

// Shared dimension checks; all throw ValidationError with the given context.
void require_positive_dims(int height, int width, const char* what);
void require_same_dims(int h1, int w1, int h2, int w2, const char* what);

} // namespace bk
