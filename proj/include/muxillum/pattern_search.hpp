#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "muxillum/classifier.hpp"
#include "muxillum/core_model.hpp"
#include "muxillum/evaluation.hpp"
#include "muxillum/illumination.hpp"
#include "muxillum/noise.hpp"

namespace muxillum {

struct GreedyOptions {
    int max_columns = 8;
    double min_improvement = 0.0;
    EvaluationOptions evaluation;
    bool train_prefix_classifiers = true;
};

/// Record of a greedy run. Entry k (zero-based) describes the prefix made of
/// the first k+1 columns.
struct GreedyTrace {
    std::optional<IlluminationMatrix> matrix;
    std::vector<double> accuracies;
    std::vector<bool> improved;
    std::vector<double> gains_db;
    std::vector<AccuracyResult> details;
    std::vector<ClassifierModel> classifiers;
    /// Mean accuracy of every candidate, per column, indexed by mask - 1.
    std::vector<std::vector<double>> candidate_accuracies;
    std::size_t candidate_evaluations = 0;
};

/// Binary column for bitmask `mask` (bit i lights illuminant i).
Eigen::VectorXd column_from_mask(std::uint32_t mask, int n);

/// True when candidate `a` beats `b` at equal accuracy: fewer lit
/// illuminants, then the lexicographically smaller vector.
bool tie_break_prefers(std::uint32_t a, std::uint32_t b, int n);

/// Grows W one binary column at a time. Every non-zero candidate is scored
/// with repeated_split_accuracy on the incumbent prefix plus the candidate,
/// all candidates of a column sharing the same seeds; the best candidate is
/// kept even when it does not improve accuracy, and the improvement flag
/// records whether it beat the previous prefix by more than min_improvement.
GreedyTrace greedy_select(const Dataset& dataset, const NoiseModel& noise, const AcquisitionSettings& acq,
                          const GreedyOptions& options);

/// Largest prefix whose column improved accuracy (at least 1).
int effective_prefix(const GreedyTrace& trace);

/// Accuracy of every prefix 1..M of W, each scored with the same options.
std::vector<AccuracyResult> evaluate_matrix(const Dataset& dataset, const IlluminationMatrix& W,
                                            const NoiseModel& noise, const AcquisitionSettings& acq,
                                            const EvaluationOptions& options);

}  // namespace muxillum
