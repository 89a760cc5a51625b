#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "muxillum/features.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

struct LabeledSample {
    FeatureVector features;
    int label = 0;  // index into the dataset's class list
    int pose_id = 0;
};

struct SvmParams {
    double c_reg = 1.0;
    double tolerance = 1e-3;  // stop when max - min projected gradient falls below this
    int max_iterations = 1000;
};

/// Linear soft-margin separator for one class pair; positive decision
/// values vote for class_a.
struct Hyperplane {
    int class_a = 0;
    int class_b = 0;
    std::vector<double> weights;
    double bias = 0.0;
};

/// One-vs-one linear SVM over standardized features.
struct ClassifierModel {
    std::vector<std::string> class_names;
    std::vector<int> class_ids;  // labels seen in training, ascending
    FeatureLayout layout;
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<Hyperplane> planes;
    SvmParams params;
    Seed seed = 0;
};

/// Trains one dual coordinate-ascent hinge-loss SVM per class pair (bias
/// folded in as a constant feature). Needs at least two distinct labels.
ClassifierModel train(std::span<const LabeledSample> samples, const SvmParams& params, Seed seed,
                      std::vector<std::string> class_names = {});

struct Decision {
    int label = 0;
    std::vector<int> votes;           // indexed like ClassifierModel::class_ids
    std::vector<double> margin_sums;  // summed signed margins in each class's favour
};

/// Majority vote; ties go to the larger margin sum, then the lowest class id.
Decision decide(const ClassifierModel& model, const FeatureVector& features);
int predict(const ClassifierModel& model, const FeatureVector& features);

/// Versioned little-endian binary container with the layout embedded.
void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace muxillum
