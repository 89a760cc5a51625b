#pragma once

#include <optional>
#include <string>
#include <vector>

#include "muxillum/classifier.hpp"
#include "muxillum/core_model.hpp"
#include "muxillum/features.hpp"
#include "muxillum/illumination.hpp"
#include "muxillum/noise.hpp"
#include "muxillum/relight.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

/// How a sequence is acquired and turned into features: fixed exposure,
/// gain either fixed or chosen per matrix by select_gain, then downscale
/// and HOG.
struct AcquisitionSettings {
    double exposure_ms = 22.5;
    std::optional<double> fixed_gain_db;
    double target_fraction = kDefaultTargetFraction;
    GainBounds gain_bounds;
    double gray_max = kDefaultGrayMax;
    int feature_side = kDefaultFeatureSide;
    HogParams hog;
};

struct EvaluationOptions {
    int repeats = 400;
    double train_fraction = 0.75;
    SvmParams svm;
    Seed base_seed = 1;
    SeedDomain domain = SeedDomain::Training;
};

struct AccuracyResult {
    double mean_accuracy = 0.0;
    std::vector<double> per_class_accuracy;  // indexed like Dataset::classes
    std::vector<int> per_class_test_count;   // test samples per class per repeat
    std::vector<double> per_repeat;
    double gain_db = 0.0;
};

/// Gain used for W under these settings.
double acquisition_gain(const Dataset& dataset, const IlluminationMatrix& W, const AcquisitionSettings& acq);

/// Renders every model under every column of W with noise, extracts and
/// concatenates per-column features. Image (model k, column j) uses stream
/// derive_seed(base_seed, {domain, repeat, k, j}).
std::vector<LabeledSample> render_samples(const Dataset& dataset, const IlluminationMatrix& W,
                                          const NoiseModel& noise, const AcquisitionSettings& acq, double gain_db,
                                          Seed base_seed, SeedDomain domain, int repeat);

/// Per class: shuffle, then put round(train_fraction * n_c) (at least one,
/// at most n_c - 1) samples in the training set. Classes with fewer than two
/// samples raise ParameterError.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
Split stratified_split(const std::vector<int>& labels, int num_classes, double train_fraction, Seed seed);

/// Mean held-out accuracy over `repeats` independent re-render / split /
/// train / test passes. Deterministic given options.base_seed and
/// independent of the worker count.
AccuracyResult repeated_split_accuracy(const Dataset& dataset, const IlluminationMatrix& W, const NoiseModel& noise,
                                       const AcquisitionSettings& acq, const EvaluationOptions& options);

/// Classifier trained on one full rendering of the dataset (deployment
/// stream), for storing alongside a selected matrix.
ClassifierModel train_deployment_classifier(const Dataset& dataset, const IlluminationMatrix& W,
                                            const NoiseModel& noise, const AcquisitionSettings& acq,
                                            const SvmParams& svm, Seed base_seed);

}  // namespace muxillum
