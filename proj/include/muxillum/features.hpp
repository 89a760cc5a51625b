#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "muxillum/image.hpp"

namespace muxillum {

struct HogParams {
    int cell = 12;   // pixels per cell side
    int block = 10;  // cells per block side
    int bins = 9;    // unsigned orientation bins over [0, pi)
};

inline constexpr int kDefaultFeatureSide = 120;

/// Shape of a (possibly concatenated) descriptor.
struct FeatureLayout {
    int images = 1;
    int cells_x = 0;
    int cells_y = 0;
    int block = 0;
    int bins = 0;

    int blocks_x() const noexcept { return cells_x - block + 1; }
    int blocks_y() const noexcept { return cells_y - block + 1; }
    std::size_t per_image_length() const noexcept {
        return static_cast<std::size_t>(blocks_x()) * blocks_y() * block * block * bins;
    }
    std::size_t length() const noexcept { return per_image_length() * images; }

    friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

struct FeatureVector {
    std::vector<double> values;
    FeatureLayout layout;
};

/// Area-average resampling to side x side.
Image downscale(const Image& image, int side);

/// Layout produced by hog() for an image of the given size.
FeatureLayout hog_layout(int width, int height, const HogParams& params);

/// Grid HOG: centered-difference gradients (edge-replicated), unsigned
/// orientation bins centred at k*pi/bins with linear interpolation between
/// neighbouring bins, magnitude-weighted cell histograms, overlapping
/// block x block cell blocks at a one-cell stride, each block L2-normalized
/// as v / sqrt(|v|^2 + eps^2) with eps = 1e-6.
FeatureVector hog(const Image& image, const HogParams& params = {});

/// Order-preserving concatenation of per-image descriptors.
FeatureVector concat_sequence(std::span<const FeatureVector> per_image);

}  // namespace muxillum
