#pragma once

#include <Eigen/Dense>

#include "muxillum/camera.hpp"
#include "muxillum/core_model.hpp"
#include "muxillum/illumination.hpp"
#include "muxillum/image.hpp"
#include "muxillum/noise.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

inline constexpr double kDefaultGrayMax = 255.0;

/// Length-N drive vector, each entry in [0,1].
struct IlluminationState {
    Eigen::VectorXd weights;
};

void validate(const IlluminationState& w);

struct RenderedImage {
    Image pixels;
    CameraSettings settings;
    IlluminationState state;
    Seed seed = 0;
};

/// Intensity factor taking capture-setting gray levels to `target` settings:
/// (E/E_capture) * 10^((G - G_capture)/10).
double render_scale(const CameraSettings& capture, const CameraSettings& target);

/// Noise-free image L*w expressed at `settings`; unclipped, real-valued.
Image render_clean(const RelightableModel& model, const IlluminationState& w, const CameraSettings& settings);

/// render_clean -> generalize(noise, settings) -> predict_variance -> synthesize.
RenderedImage render_noisy(const RelightableModel& model, const IlluminationState& w, const CameraSettings& settings,
                           const NoiseModel& noise, Seed seed, double gray_max = kDefaultGrayMax);

struct GainBounds {
    double min_db = 0.0;
    double max_db = 24.0;
};

inline constexpr double kDefaultTargetFraction = 0.9;

/// Single gain for a whole acquisition sequence: the brightest clean pixel
/// over every model and every column of W lands on target_fraction*gray_max
/// at (gain, exposure). Clamped to `bounds`.
double select_gain(const Dataset& dataset, const IlluminationMatrix& W, double exposure_ms, double target_fraction,
                   GainBounds bounds, double gray_max = kDefaultGrayMax);

}  // namespace muxillum
