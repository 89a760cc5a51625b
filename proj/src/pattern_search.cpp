#include "muxillum/pattern_search.hpp"

#include <bit>

#include "muxillum/error.hpp"
#include "muxillum/parallel.hpp"

namespace muxillum {

namespace {

std::uint32_t lexicographic_key(std::uint32_t mask, int n) {
    // illuminant 0 is the most significant position of the vector
    std::uint32_t key = 0;
    for (int i = 0; i < n; ++i) key = (key << 1) | ((mask >> i) & 1u);
    return key;
}

std::string describe(std::uint32_t mask, int n) {
    std::string s = "[";
    for (int i = 0; i < n; ++i) s += ((mask >> i) & 1u) ? '1' : '0';
    return s + "]";
}

}  // namespace

Eigen::VectorXd column_from_mask(std::uint32_t mask, int n) {
    Eigen::VectorXd col(n);
    for (int i = 0; i < n; ++i) col[i] = ((mask >> i) & 1u) ? 1.0 : 0.0;
    return col;
}

bool tie_break_prefers(std::uint32_t a, std::uint32_t b, int n) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return lexicographic_key(a, n) < lexicographic_key(b, n);
}

GreedyTrace greedy_select(const Dataset& dataset, const NoiseModel& noise, const AcquisitionSettings& acq,
                          const GreedyOptions& options) {
    if (dataset.models.empty()) throw ParameterError("greedy selection needs a non-empty dataset");
    if (options.max_columns < 1) throw ParameterError("greedy selection needs max_columns >= 1");
    const int n = dataset.models.front().num_illuminants();
    if (n > 20) throw ParameterError("exhaustive greedy search limited to N <= 20");
    const std::uint32_t num_candidates = (1u << n) - 1u;

    GreedyTrace trace;
    double previous = 0.0;
    for (int k = 0; k < options.max_columns; ++k) {
        std::vector<double> scores(num_candidates, 0.0);
        std::vector<AccuracyResult> details(num_candidates);
        parallel_for(num_candidates, [&](std::size_t c) {
            const std::uint32_t mask = static_cast<std::uint32_t>(c) + 1u;
            const Eigen::VectorXd col = column_from_mask(mask, n);
            const IlluminationMatrix W =
                trace.matrix ? trace.matrix->with_column(col) : IlluminationMatrix(col, true);
            try {
                details[c] = repeated_split_accuracy(dataset, W, noise, acq, options.evaluation);
            } catch (const NumericalError& e) {
                throw NumericalError("column " + std::to_string(k + 1) + ", candidate " + describe(mask, n) + ": " +
                                     e.what());
            } catch (const ParameterError& e) {
                throw ParameterError("column " + std::to_string(k + 1) + ", candidate " + describe(mask, n) + ": " +
                                     e.what());
            } catch (const std::exception& e) {
                throw Error("column " + std::to_string(k + 1) + ", candidate " + describe(mask, n) + ": " + e.what());
            }
            scores[c] = details[c].mean_accuracy;
        });
        trace.candidate_evaluations += num_candidates;

        std::uint32_t best = 1;
        for (std::uint32_t mask = 2; mask <= num_candidates; ++mask) {
            const double s = scores[mask - 1];
            const double b = scores[best - 1];
            if (s > b || (s == b && tie_break_prefers(mask, best, n))) best = mask;
        }
        const Eigen::VectorXd col = column_from_mask(best, n);
        trace.matrix = trace.matrix ? trace.matrix->with_column(col) : IlluminationMatrix(col, true);
        const double acc = scores[best - 1];
        trace.accuracies.push_back(acc);
        trace.improved.push_back(acc > previous + options.min_improvement);
        trace.gains_db.push_back(details[best - 1].gain_db);
        trace.details.push_back(details[best - 1]);
        trace.candidate_accuracies.push_back(std::move(scores));
        if (options.train_prefix_classifiers) {
            trace.classifiers.push_back(train_deployment_classifier(dataset, *trace.matrix, noise, acq,
                                                                    options.evaluation.svm,
                                                                    options.evaluation.base_seed));
        }
        previous = acc;
    }
    return trace;
}

int effective_prefix(const GreedyTrace& trace) {
    int last = 1;
    for (std::size_t k = 0; k < trace.improved.size(); ++k) {
        if (trace.improved[k]) last = static_cast<int>(k) + 1;
    }
    return last;
}

std::vector<AccuracyResult> evaluate_matrix(const Dataset& dataset, const IlluminationMatrix& W,
                                            const NoiseModel& noise, const AcquisitionSettings& acq,
                                            const EvaluationOptions& options) {
    std::vector<AccuracyResult> out;
    for (int m = 1; m <= W.num_acquisitions(); ++m) {
        out.push_back(repeated_split_accuracy(dataset, W.prefix(m), noise, acq, options));
    }
    return out;
}

}  // namespace muxillum
