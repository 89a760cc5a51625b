#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace muxillum {

/// Single-channel image of real-valued gray levels, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::size_t size() const noexcept { return pixels.size(); }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool same_shape(const Image& o) const noexcept { return width == o.width && height == o.height; }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Raw contents of a binary PGM (P5) file.
struct PgmData {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::vector<std::uint16_t> samples;
};

PgmData read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmData& data);

/// Reads a PGM and returns its samples as gray levels (no rescaling).
Image read_pgm_image(const std::filesystem::path& path);

/// Writes an 8-bit PGM; values are rounded and clipped to [0, 255].
void write_pgm8(const std::filesystem::path& path, const Image& image);

}  // namespace muxillum
