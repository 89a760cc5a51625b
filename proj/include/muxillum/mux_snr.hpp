#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "muxillum/illumination.hpp"
#include "muxillum/image.hpp"
#include "muxillum/noise.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

// Measurement model used throughout: acquisition j records
// y_j = sum_i W(i,j) x_i + noise_j, so the design matrix is W^T and the
// normal matrix of the weighted problem is W * Sigma_W^-1 * W^T (N x N).

/// Diagonal of Sigma_W: expected variance of each of the M acquisitions.
struct MuxNoiseEstimate {
    Eigen::VectorXd diagonal;
};

inline constexpr double kDefaultConditionThreshold = 1e6;

/// sigma_p2 * r_bar * (column sum of W) + sigma_r2, per acquisition.
MuxNoiseEstimate sigma_w(const IlluminationMatrix& W, double r_bar, const NoiseModel& noise);

/// 2-norm condition number of the normal matrix (infinity if singular).
double normal_matrix_condition(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma);

/// (1/N) trace of the inverse normal matrix. Throws ConditioningError when
/// M < N or the condition number exceeds cond_threshold.
double predicted_mse(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma,
                     double cond_threshold = kDefaultConditionThreshold);

/// Per-pixel weighted least squares recovery of the N single-illuminant
/// images from M coded images.
std::vector<Image> demultiplex(std::span<const Image> coded, const IlluminationMatrix& W,
                               const MuxNoiseEstimate& sigma, double cond_threshold = kDefaultConditionThreshold);

struct SnrOptimizerOptions {
    int iterations = 100000;
    Seed seed = 1;
    double cond_threshold = kDefaultConditionThreshold;
    bool binary = false;
    double jitter_std = 0.1;
    /// Upper bound on entries re-drawn by one discrete move; 0 means N*M/2.
    int max_entries_per_move = 0;
    /// Independent chains sharing the iteration budget; the best one wins.
    int restarts = 4;
};

struct SnrOptimizerResult {
    IlluminationMatrix matrix;
    double mse = 0.0;
    double identity_mse = 0.0;
    int accepted = 0;
    int rejected_conditioning = 0;
    /// Best MSE so far after each iteration, chains run back to back.
    std::vector<double> mse_trace;
};

/// Stochastic hill climbing from the identity: each iteration perturbs a copy
/// of the incumbent (with probability 1/2 a uniformly drawn number of
/// entries is flipped/re-drawn, otherwise one column gets Gaussian jitter), clamps to [0,1], rejects
/// ill-conditioned candidates and keeps the candidate only if its predicted
/// MSE is strictly lower. For M > N the start repeats identity columns.
/// The budget is split over options.restarts chains seeded from options.seed.
SnrOptimizerResult optimize_snr(int n, int m, const NoiseModel& noise, double r_bar, const SnrOptimizerOptions& options);

}  // namespace muxillum
