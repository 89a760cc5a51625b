#include "muxillum/noise.hpp"

#include <algorithm>
#include <cmath>

#include "muxillum/error.hpp"
#include "muxillum/text_io.hpp"

namespace muxillum {

void validate(const NoiseModel& m) {
    if (!(m.sigma_p2 >= 0.0) || !(m.sigma_r2 >= 0.0) || !std::isfinite(m.sigma_p2) || !std::isfinite(m.sigma_r2)) {
        throw ParameterError("noise variances must be finite and non-negative");
    }
    validate(m.reference);
}

std::vector<NoiseObservation> characterize_stack(std::span<const Image> images, double saturation_cutoff) {
    if (images.size() < 2) throw ParameterError("noise characterization needs at least two images");
    const Image& first = images.front();
    for (const auto& img : images) {
        if (!img.same_shape(first)) throw ParameterError("noise characterization images differ in size");
    }
    const double n = static_cast<double>(images.size());
    std::vector<NoiseObservation> out;
    out.reserve(first.size());
    for (std::size_t p = 0; p < first.size(); ++p) {
        double mean = 0.0;
        for (const auto& img : images) mean += img.pixels[p];
        mean /= n;
        if (mean > saturation_cutoff) continue;
        double ss = 0.0;
        for (const auto& img : images) {
            const double d = img.pixels[p] - mean;
            ss += d * d;
        }
        out.push_back({mean, ss / (n - 1.0)});
    }
    return out;
}

AffineFit fit_affine(std::span<const NoiseObservation> observations, const CameraSettings& settings) {
    validate(settings);
    if (observations.size() < 2) throw DegenerateFitError("affine noise fit needs at least two observations");
    double mx = 0.0;
    double my = 0.0;
    for (const auto& o : observations) {
        mx += o.mean;
        my += o.variance;
    }
    const double n = static_cast<double>(observations.size());
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& o : observations) {
        sxx += (o.mean - mx) * (o.mean - mx);
        sxy += (o.mean - mx) * (o.variance - my);
    }
    if (!(sxx > 1e-12 * std::max(1.0, mx * mx) * n)) {
        throw DegenerateFitError("affine noise fit needs at least two distinct mean levels");
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    AffineFit fit;
    fit.raw_intercept = intercept;
    fit.intercept_clamped = intercept < 0.0;
    fit.model = NoiseModel{std::max(0.0, slope), std::max(0.0, intercept), settings};
    return fit;
}

double gain_ratio(double gain_db, double reference_db) { return std::pow(10.0, (gain_db - reference_db) / 20.0); }

NoiseModel generalize(const NoiseModel& model, const CameraSettings& settings) {
    validate(model);
    validate(settings);
    const double g = gain_ratio(settings.gain_db, model.reference.gain_db);
    const double g2 = g * g;
    const double e = settings.exposure_ms / model.reference.exposure_ms;
    return NoiseModel{g2 * e * model.sigma_p2, g2 * model.sigma_r2, settings};
}

Image predict_variance(const NoiseModel& model, const Image& mean_image) {
    Image out(mean_image.width, mean_image.height);
    for (std::size_t p = 0; p < mean_image.size(); ++p) {
        const double m = mean_image.pixels[p];
        if (!(m >= 0.0)) throw ParameterError("mean intensity must be non-negative");
        out.pixels[p] = model.sigma_p2 * m + model.sigma_r2;
    }
    return out;
}

Image synthesize(const Image& mean_image, const Image& variance_image, Seed seed, double gray_max) {
    if (!mean_image.same_shape(variance_image)) throw ParameterError("mean and variance images differ in shape");
    if (!(gray_max > 0.0)) throw ParameterError("gray_max must be positive");
    Image out(mean_image.width, mean_image.height);
    for (std::size_t p = 0; p < mean_image.size(); ++p) {
        const double var = variance_image.pixels[p];
        if (!(var >= 0.0)) throw ParameterError("variance must be non-negative");
        double v = mean_image.pixels[p];
        if (var > 0.0) v += std::sqrt(var) * normal_at(seed, p);
        out.pixels[p] = std::round(std::clamp(v, 0.0, gray_max));
    }
    return out;
}

void save_noise_model(const NoiseModel& model, const std::filesystem::path& path) {
    validate(model);
    write_key_values(path, {{"sigma_p2", format_double(model.sigma_p2)},
                            {"sigma_r2", format_double(model.sigma_r2)},
                            {"gain0_db", format_double(model.reference.gain_db)},
                            {"exposure0_ms", format_double(model.reference.exposure_ms)}});
}

NoiseModel load_noise_model(const std::filesystem::path& path) {
    const KeyValues kv = read_key_values(path);
    const std::string f = path.string();
    NoiseModel m{require_double(kv, "sigma_p2", f), require_double(kv, "sigma_r2", f),
                 CameraSettings{require_double(kv, "gain0_db", f), require_double(kv, "exposure0_ms", f)}};
    try {
        validate(m);
    } catch (const ParameterError& e) {
        throw FormatError(f, e.what());
    }
    return m;
}

void save_observations_csv(std::span<const NoiseObservation> observations, const std::filesystem::path& path) {
    std::string text = "mean,variance\n";
    for (const auto& o : observations) text += format_double(o.mean) + "," + format_double(o.variance) + "\n";
    write_text_file(path, text);
}

}  // namespace muxillum
