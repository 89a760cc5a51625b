#include "muxillum/mux_snr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "muxillum/error.hpp"

namespace muxillum {

namespace {

Eigen::MatrixXd normal_matrix(const Eigen::MatrixXd& w, const Eigen::VectorXd& sigma_diag) {
    return w * sigma_diag.cwiseInverse().asDiagonal() * w.transpose();
}

double condition_of(const Eigen::MatrixXd& normal) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

void check_sigma(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma) {
    if (sigma.diagonal.size() != W.num_acquisitions()) throw ParameterError("Sigma_W length does not match M");
    if (!(sigma.diagonal.array() > 0.0).all()) {
        throw ConditioningError("Sigma_W has a non-positive entry", std::numeric_limits<double>::infinity());
    }
}

// Inverse of a well-conditioned normal matrix, or ConditioningError.
Eigen::MatrixXd checked_inverse(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma, double cond_threshold) {
    if (W.num_acquisitions() < W.num_illuminants()) {
        throw ConditioningError("fewer acquisitions than illuminants", std::numeric_limits<double>::infinity());
    }
    check_sigma(W, sigma);
    const Eigen::MatrixXd normal = normal_matrix(W.weights(), sigma.diagonal);
    const double cond = condition_of(normal);
    if (!(cond <= cond_threshold)) {
        throw ConditioningError("normal matrix condition number " + std::to_string(cond) + " exceeds threshold",
                                cond);
    }
    return normal.ldlt().solve(Eigen::MatrixXd::Identity(normal.rows(), normal.cols()));
}

}  // namespace

MuxNoiseEstimate sigma_w(const IlluminationMatrix& W, double r_bar, const NoiseModel& noise) {
    if (!(r_bar >= 0.0)) throw ParameterError("average reflectance must be non-negative");
    validate(noise);
    const Eigen::VectorXd colsum = W.weights().colwise().sum().transpose();
    return MuxNoiseEstimate{(noise.sigma_p2 * r_bar * colsum.array() + noise.sigma_r2).matrix()};
}

double normal_matrix_condition(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma) {
    check_sigma(W, sigma);
    return condition_of(normal_matrix(W.weights(), sigma.diagonal));
}

double predicted_mse(const IlluminationMatrix& W, const MuxNoiseEstimate& sigma, double cond_threshold) {
    return checked_inverse(W, sigma, cond_threshold).trace() / W.num_illuminants();
}

std::vector<Image> demultiplex(std::span<const Image> coded, const IlluminationMatrix& W,
                               const MuxNoiseEstimate& sigma, double cond_threshold) {
    if (static_cast<int>(coded.size()) != W.num_acquisitions()) {
        throw ParameterError("demultiplex needs one image per matrix column");
    }
    for (const auto& img : coded) {
        if (!img.same_shape(coded.front())) throw ParameterError("coded images differ in size");
    }
    const Eigen::MatrixXd inv = checked_inverse(W, sigma, cond_threshold);
    // estimator rows: x = inv * W * Sigma^-1 * y
    const Eigen::MatrixXd estimator = inv * W.weights() * sigma.diagonal.cwiseInverse().asDiagonal();

    const Eigen::Index npix = static_cast<Eigen::Index>(coded.front().size());
    Eigen::MatrixXd y(npix, W.num_acquisitions());
    for (int j = 0; j < W.num_acquisitions(); ++j) {
        y.col(j) = Eigen::Map<const Eigen::VectorXd>(coded[j].pixels.data(), npix);
    }
    const Eigen::MatrixXd x = y * estimator.transpose();
    std::vector<Image> out;
    out.reserve(W.num_illuminants());
    for (int i = 0; i < W.num_illuminants(); ++i) {
        Image img(coded.front().width, coded.front().height);
        Eigen::Map<Eigen::VectorXd>(img.pixels.data(), npix) = x.col(i);
        out.push_back(std::move(img));
    }
    return out;
}

namespace {

struct Chain {
    IlluminationMatrix matrix;
    double mse;
    int accepted = 0;
    int rejected = 0;
};

Chain run_chain(const IlluminationMatrix& start, double start_mse, int iterations, Seed seed, int n, int m,
                const SnrOptimizerOptions& options, const std::function<double(const IlluminationMatrix&)>& evaluate,
                double& global_best, std::vector<double>& trace) {
    Chain chain{start, start_mse};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_row(0, n - 1);
    std::uniform_int_distribution<int> pick_col(0, m - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, options.jitter_std);
    const int max_entries = options.max_entries_per_move > 0 ? options.max_entries_per_move : std::max(1, n * m / 2);

    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXd cand = chain.matrix.weights();
        const int col = pick_col(rng);
        if (unit(rng) < 0.5) {
            // re-draw (or flip) K uniformly chosen entries, K uniform in [1, max_entries]
            const int k = std::uniform_int_distribution<int>(1, max_entries)(rng);
            for (int e = 0; e < k; ++e) {
                const int row = pick_row(rng);
                const int c = e == 0 ? col : pick_col(rng);
                cand(row, c) = options.binary ? 1.0 - cand(row, c) : unit(rng);
            }
        } else if (options.binary) {
            // binary analogue of a column-local move: flip two entries of one column
            const int r1 = pick_row(rng);
            const int r2 = pick_row(rng);
            cand(r1, col) = 1.0 - cand(r1, col);
            if (r2 != r1) cand(r2, col) = 1.0 - cand(r2, col);
        } else {
            for (int r = 0; r < n; ++r) cand(r, col) = std::clamp(cand(r, col) + jitter(rng), 0.0, 1.0);
        }
        IlluminationMatrix candidate(std::move(cand), options.binary);
        try {
            const double mse = evaluate(candidate);
            if (mse < chain.mse) {
                chain.mse = mse;
                chain.matrix = std::move(candidate);
                ++chain.accepted;
            }
        } catch (const ConditioningError&) {
            ++chain.rejected;
        }
        global_best = std::min(global_best, chain.mse);
        trace.push_back(global_best);
    }
    return chain;
}

}  // namespace

SnrOptimizerResult optimize_snr(int n, int m, const NoiseModel& noise, double r_bar,
                                const SnrOptimizerOptions& options) {
    if (n < 1 || m < n) throw ParameterError("SNR optimization needs 1 <= N <= M");
    if (options.iterations < 1) throw ParameterError("SNR optimization needs at least one iteration");
    if (options.restarts < 1 || options.restarts > options.iterations) {
        throw ParameterError("restarts must lie in [1, iterations]");
    }
    validate(noise);

    Eigen::MatrixXd start = Eigen::MatrixXd::Zero(n, m);
    for (int j = 0; j < m; ++j) start(j % n, j) = 1.0;
    const IlluminationMatrix identity(start, options.binary);
    const std::function<double(const IlluminationMatrix&)> evaluate = [&](const IlluminationMatrix& w) {
        return predicted_mse(w, sigma_w(w, r_bar, noise), options.cond_threshold);
    };
    const double identity_mse = evaluate(identity);

    SnrOptimizerResult result{identity, identity_mse, identity_mse, 0, 0, {}};
    result.mse_trace.reserve(options.iterations);
    double global_best = identity_mse;
    for (int r = 0; r < options.restarts; ++r) {
        const int budget = options.iterations / options.restarts + (r < options.iterations % options.restarts ? 1 : 0);
        const Seed seed = options.restarts == 1 ? options.seed : derive_seed(options.seed, {static_cast<std::uint64_t>(r)});
        Chain c = run_chain(identity, identity_mse, budget, seed, n, m, options, evaluate, global_best, result.mse_trace);
        result.accepted += c.accepted;
        result.rejected_conditioning += c.rejected;
        if (c.mse < result.mse) {
            result.mse = c.mse;
            result.matrix = std::move(c.matrix);
        }
    }
    return result;
}

}  // namespace muxillum
