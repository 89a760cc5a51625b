#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "muxillum/camera.hpp"
#include "muxillum/image.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

/// Affine noise model sigma^2 = sigma_p2 * I + sigma_r2, valid at the
/// reference camera settings it was calibrated (or generalized) for.
struct NoiseModel {
    double sigma_p2 = 0.0;  // photon-noise variance per gray level
    double sigma_r2 = 0.0;  // read-noise variance, gray levels^2
    CameraSettings reference{0.0, 1.0};

    friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

void validate(const NoiseModel& m);

struct NoiseObservation {
    double mean = 0.0;
    double variance = 0.0;
};

/// Result of an affine fit; `intercept_clamped` is set when the raw
/// least-squares intercept was negative and has been clamped to zero.
struct AffineFit {
    NoiseModel model;
    bool intercept_clamped = false;
    double raw_intercept = 0.0;
};

inline constexpr double kDefaultSaturationFraction = 0.92;

/// Per-pixel sample mean and unbiased variance over a stack of >= 2 images.
/// Pixels whose mean exceeds saturation_cutoff are dropped.
std::vector<NoiseObservation> characterize_stack(std::span<const Image> images, double saturation_cutoff);

/// Least-squares line variance = slope * mean + intercept.
AffineFit fit_affine(std::span<const NoiseObservation> observations, const CameraSettings& settings);

/// Linear amplitude ratio of two gains given in dB.
double gain_ratio(double gain_db, double reference_db);

/// Rescales the model to new reference settings:
///   sigma_p2' = (G/G0)^2 (E/E0) sigma_p2,  sigma_r2' = (G/G0)^2 sigma_r2.
NoiseModel generalize(const NoiseModel& model, const CameraSettings& settings);

/// Per-pixel variance sigma_p2 * I + sigma_r2 at the model's own reference.
Image predict_variance(const NoiseModel& model, const Image& mean_image);

/// Draws each pixel from Normal(mean, variance), clips to [0, gray_max] and
/// rounds to an integer gray level. Pixel k uses counter k of the stream
/// `seed`, so output is independent of evaluation order.
Image synthesize(const Image& mean_image, const Image& variance_image, Seed seed, double gray_max);

/// key=value text: sigma_p2, sigma_r2, gain0_db, exposure0_ms.
void save_noise_model(const NoiseModel& model, const std::filesystem::path& path);
NoiseModel load_noise_model(const std::filesystem::path& path);

/// CSV with header `mean,variance`.
void save_observations_csv(std::span<const NoiseObservation> observations, const std::filesystem::path& path);

}  // namespace muxillum
