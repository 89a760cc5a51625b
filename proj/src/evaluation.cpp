#include "muxillum/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "muxillum/error.hpp"
#include "muxillum/parallel.hpp"

namespace muxillum {

namespace {

constexpr std::uint64_t kSplitTag = 0x73706c6974ULL;
constexpr std::uint64_t kSvmTag = 0x73766dULL;

void check_inputs(const Dataset& dataset, const IlluminationMatrix& W) {
    if (dataset.models.empty()) throw ParameterError("evaluation needs a non-empty dataset");
    validate(dataset);
    if (dataset.models.front().num_illuminants() != W.num_illuminants()) {
        throw ParameterError("matrix has N=" + std::to_string(W.num_illuminants()) + " but dataset models have N=" +
                             std::to_string(dataset.models.front().num_illuminants()));
    }
}

}  // namespace

double acquisition_gain(const Dataset& dataset, const IlluminationMatrix& W, const AcquisitionSettings& acq) {
    if (acq.fixed_gain_db) return *acq.fixed_gain_db;
    return select_gain(dataset, W, acq.exposure_ms, acq.target_fraction, acq.gain_bounds, acq.gray_max);
}

std::vector<LabeledSample> render_samples(const Dataset& dataset, const IlluminationMatrix& W,
                                          const NoiseModel& noise, const AcquisitionSettings& acq, double gain_db,
                                          Seed base_seed, SeedDomain domain, int repeat) {
    check_inputs(dataset, W);
    const CameraSettings settings{gain_db, acq.exposure_ms};
    std::vector<LabeledSample> out;
    out.reserve(dataset.models.size());
    std::vector<FeatureVector> per_column(W.num_acquisitions());
    for (std::size_t k = 0; k < dataset.models.size(); ++k) {
        const auto& model = dataset.models[k];
        for (int j = 0; j < W.num_acquisitions(); ++j) {
            const Seed s = derive_seed(base_seed, {static_cast<std::uint64_t>(domain), static_cast<std::uint64_t>(repeat),
                                                   static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j)});
            const RenderedImage img =
                render_noisy(model, IlluminationState{W.weights().col(j)}, settings, noise, s, acq.gray_max);
            per_column[j] = hog(downscale(img.pixels, acq.feature_side), acq.hog);
        }
        out.push_back(LabeledSample{concat_sequence(per_column), dataset.class_index(model), model.pose_id()});
    }
    return out;
}

Split stratified_split(const std::vector<int>& labels, int num_classes, double train_fraction, Seed seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ParameterError("train fraction must lie in (0,1)");
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) throw ParameterError("label out of range");
        by_class[labels[i]].push_back(i);
    }
    Split split;
    std::mt19937_64 rng(seed);
    for (int c = 0; c < num_classes; ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2) {
            throw ParameterError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                                 " samples; stratified splitting needs at least 2");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n = static_cast<long>(idx.size());
        const long n_train = std::clamp(std::lround(train_fraction * static_cast<double>(n)), 1L, n - 1);
        split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
        split.test.insert(split.test.end(), idx.begin() + n_train, idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

AccuracyResult repeated_split_accuracy(const Dataset& dataset, const IlluminationMatrix& W, const NoiseModel& noise,
                                       const AcquisitionSettings& acq, const EvaluationOptions& options) {
    check_inputs(dataset, W);
    if (options.repeats < 1) throw ParameterError("repeats must be at least 1");
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw ParameterError("train fraction must lie in (0,1)");
    }
    const int num_classes = static_cast<int>(dataset.classes.size());
    std::vector<int> labels;
    for (const auto& m : dataset.models) labels.push_back(dataset.class_index(m));
    // fail fast on classes too small to stratify
    stratified_split(labels, num_classes, options.train_fraction, 0);

    const double gain = acquisition_gain(dataset, W, acq);
    struct RepeatTally {
        std::vector<int> correct;
        std::vector<int> total;
    };
    std::vector<RepeatTally> tallies(options.repeats);
    parallel_for(static_cast<std::size_t>(options.repeats), [&](std::size_t r) {
        const auto samples = render_samples(dataset, W, noise, acq, gain, options.base_seed, options.domain,
                                            static_cast<int>(r));
        const std::uint64_t dom = static_cast<std::uint64_t>(options.domain);
        const Split split = stratified_split(labels, num_classes, options.train_fraction,
                                             derive_seed(options.base_seed, {dom, r, kSplitTag}));
        std::vector<LabeledSample> train_set;
        train_set.reserve(split.train.size());
        for (std::size_t i : split.train) train_set.push_back(samples[i]);
        const ClassifierModel model =
            train(train_set, options.svm, derive_seed(options.base_seed, {dom, r, kSvmTag}), dataset.classes);
        RepeatTally t{std::vector<int>(num_classes, 0), std::vector<int>(num_classes, 0)};
        for (std::size_t i : split.test) {
            ++t.total[labels[i]];
            if (predict(model, samples[i].features) == labels[i]) ++t.correct[labels[i]];
        }
        tallies[r] = std::move(t);
    });

    AccuracyResult result;
    result.gain_db = gain;
    result.per_class_accuracy.assign(num_classes, 0.0);
    result.per_class_test_count = tallies.front().total;
    std::vector<double> class_correct(num_classes, 0.0);
    std::vector<double> class_total(num_classes, 0.0);
    for (const auto& t : tallies) {
        const int correct = std::accumulate(t.correct.begin(), t.correct.end(), 0);
        const int total = std::accumulate(t.total.begin(), t.total.end(), 0);
        result.per_repeat.push_back(static_cast<double>(correct) / total);
        for (int c = 0; c < num_classes; ++c) {
            class_correct[c] += t.correct[c];
            class_total[c] += t.total[c];
        }
    }
    result.mean_accuracy =
        std::accumulate(result.per_repeat.begin(), result.per_repeat.end(), 0.0) / options.repeats;
    for (int c = 0; c < num_classes; ++c) result.per_class_accuracy[c] = class_correct[c] / class_total[c];
    return result;
}

ClassifierModel train_deployment_classifier(const Dataset& dataset, const IlluminationMatrix& W,
                                            const NoiseModel& noise, const AcquisitionSettings& acq,
                                            const SvmParams& svm, Seed base_seed) {
    const double gain = acquisition_gain(dataset, W, acq);
    const auto samples = render_samples(dataset, W, noise, acq, gain, base_seed, SeedDomain::Deployment, 0);
    return train(samples, svm, derive_seed(base_seed, {static_cast<std::uint64_t>(SeedDomain::Deployment), kSvmTag}),
                 dataset.classes);
}

}  // namespace muxillum
