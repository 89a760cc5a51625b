#include "muxillum/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muxillum/error.hpp"

namespace muxillum {

namespace {

// atan2 folded to [0, pi), polynomial approximation (abs error < 1e-5 rad).
double unsigned_orientation(double gx, double gy) {
    if (gy < 0.0 || (gy == 0.0 && gx < 0.0)) {
        gx = -gx;
        gy = -gy;
    }
    const double ax = std::abs(gx);
    const bool swap = gy > ax;
    const double t = swap ? ax / gy : gy / ax;
    const double t2 = t * t;
    double a = t * (0.99997726 + t2 * (-0.33262347 + t2 * (0.19354346 + t2 * (-0.11643287 + t2 * (0.05265332 + t2 * -0.01172120)))));
    if (swap) a = 0.5 * std::numbers::pi - a;
    return gx < 0.0 ? std::numbers::pi - a : a;
}

// Source-pixel coverage of one output pixel along one axis.
struct Span1d {
    int first = 0;
    std::vector<double> weights;
};

std::vector<Span1d> area_weights(int src, int dst) {
    std::vector<Span1d> out(dst);
    const double ratio = static_cast<double>(src) / dst;
    for (int o = 0; o < dst; ++o) {
        const double lo = o * ratio;
        const double hi = (o + 1) * ratio;
        const int first = static_cast<int>(std::floor(lo));
        const int last = std::min(src - 1, static_cast<int>(std::ceil(hi)) - 1);
        out[o].first = first;
        for (int s = first; s <= last; ++s) {
            const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
            out[o].weights.push_back(std::max(0.0, overlap) / ratio);
        }
    }
    return out;
}

}  // namespace

Image downscale(const Image& image, int side) {
    if (side < 1) throw ParameterError("downscale side must be positive");
    if (image.width < side || image.height < side) {
        throw ParameterError("cannot downscale " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                             " to " + std::to_string(side));
    }
    if (image.width == side && image.height == side) return image;
    const auto wx = area_weights(image.width, side);
    const auto wy = area_weights(image.height, side);
    // horizontal pass then vertical pass
    Image tmp(side, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < side; ++x) {
            double acc = 0.0;
            for (std::size_t k = 0; k < wx[x].weights.size(); ++k) acc += wx[x].weights[k] * image.at(wx[x].first + static_cast<int>(k), y);
            tmp.at(x, y) = acc;
        }
    }
    Image out(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            double acc = 0.0;
            for (std::size_t k = 0; k < wy[y].weights.size(); ++k) acc += wy[y].weights[k] * tmp.at(x, wy[y].first + static_cast<int>(k));
            out.at(x, y) = acc;
        }
    }
    return out;
}

FeatureLayout hog_layout(int width, int height, const HogParams& params) {
    if (params.cell < 1 || params.block < 1 || params.bins < 1) throw ParameterError("HOG parameters must be positive");
    const int cx = width / params.cell;
    const int cy = height / params.cell;
    if (cx < params.block || cy < params.block) {
        throw ParameterError("image " + std::to_string(width) + "x" + std::to_string(height) +
                             " too small for one HOG block");
    }
    return FeatureLayout{1, cx, cy, params.block, params.bins};
}

FeatureVector hog(const Image& image, const HogParams& params) {
    const FeatureLayout layout = hog_layout(image.width, image.height, params);
    const int w = image.width;
    const int h = image.height;
    const int bins = params.bins;
    const double bin_width = std::numbers::pi / bins;

    std::vector<double> cells(static_cast<std::size_t>(layout.cells_x) * layout.cells_y * bins, 0.0);
    const int used_w = layout.cells_x * params.cell;
    const int used_h = layout.cells_y * params.cell;
    for (int y = 0; y < used_h; ++y) {
        const int ym = std::max(y - 1, 0);
        const int yp = std::min(y + 1, h - 1);
        const int cyi = y / params.cell;
        for (int x = 0; x < used_w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const double gx = image.at(xp, y) - image.at(xm, y);
            const double gy = image.at(x, yp) - image.at(x, ym);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            const double angle = unsigned_orientation(gx, gy);
            // bins are centred at k * bin_width; split between the two nearest
            double pos = angle / bin_width;
            if (pos >= bins) pos -= bins;
            const int b0 = static_cast<int>(pos) % bins;
            const int b1 = (b0 + 1) % bins;
            const double frac = pos - std::floor(pos);
            double* hist = &cells[(static_cast<std::size_t>(cyi) * layout.cells_x + x / params.cell) * bins];
            hist[b0] += mag * (1.0 - frac);
            hist[b1] += mag * frac;
        }
    }

    constexpr double eps = 1e-6;
    FeatureVector out;
    out.layout = layout;
    out.values.reserve(layout.per_image_length());
    for (int by = 0; by < layout.blocks_y(); ++by) {
        for (int bx = 0; bx < layout.blocks_x(); ++bx) {
            const std::size_t start = out.values.size();
            for (int cy = by; cy < by + params.block; ++cy) {
                for (int cx = bx; cx < bx + params.block; ++cx) {
                    const double* hist = &cells[(static_cast<std::size_t>(cy) * layout.cells_x + cx) * bins];
                    out.values.insert(out.values.end(), hist, hist + bins);
                }
            }
            double norm2 = 0.0;
            for (std::size_t i = start; i < out.values.size(); ++i) norm2 += out.values[i] * out.values[i];
            const double inv = 1.0 / std::sqrt(norm2 + eps * eps);
            for (std::size_t i = start; i < out.values.size(); ++i) out.values[i] *= inv;
        }
    }
    return out;
}

FeatureVector concat_sequence(std::span<const FeatureVector> per_image) {
    if (per_image.empty()) throw ParameterError("cannot concatenate an empty feature sequence");
    FeatureLayout base = per_image.front().layout;
    const int images_each = base.images;
    FeatureVector out;
    out.layout = base;
    out.layout.images = 0;
    for (const auto& f : per_image) {
        FeatureLayout probe = f.layout;
        probe.images = images_each;
        if (!(probe == base) || f.values.size() != f.layout.length()) {
            throw ParameterError("feature layouts differ; cannot concatenate");
        }
        out.values.insert(out.values.end(), f.values.begin(), f.values.end());
        out.layout.images += f.layout.images;
    }
    return out;
}

}  // namespace muxillum
