#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace semsplat {

// Row-major, channel-fastest image buffer: data[(y*width + x)*channels + c].
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double* pixel(int y, int x) {
        return data.data() + (static_cast<size_t>(y) * width + x) * channels;
    }
    const double* pixel(int y, int x) const {
        return data.data() + (static_cast<size_t>(y) * width + x) * channels;
    }

    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    bool empty() const { return data.empty(); }
    bool same_shape(const Image& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// Per-pixel class ids. 255 marks ignored pixels.
struct LabelImage {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    static constexpr uint8_t kIgnore = 255;

    LabelImage() = default;
    LabelImage(int h, int w, uint8_t fill = 0)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
};

// Boolean pixel mask stored flat, same indexing as Image.
struct PixelMask {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> data;

    PixelMask() = default;
    PixelMask(int h, int w, bool fill = false)
        : height(h), width(w), data(static_cast<size_t>(h) * w, fill ? 1 : 0) {}

    bool at(int y, int x) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int y, int x, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count() const {
        size_t n = 0;
        for (uint8_t b : data) n += b != 0;
        return n;
    }
};

}  // namespace semsplat
