#include "muxillum/relight.hpp"

#include <algorithm>
#include <cmath>

#include "muxillum/error.hpp"
#include "muxillum/text_io.hpp"

namespace muxillum {

// ---------------------------------------------------------------------------
// IlluminationMatrix

IlluminationMatrix::IlluminationMatrix(Eigen::MatrixXd weights, bool binary)
    : weights_(std::move(weights)), binary_(binary) {
    if (weights_.rows() < 1 || weights_.cols() < 1) throw ParameterError("illumination matrix must be non-empty");
    if (!weights_.allFinite() || (weights_.array() < 0.0).any() || (weights_.array() > 1.0).any()) {
        throw ParameterError("illumination weights must lie in [0,1]");
    }
    if (binary_ && ((weights_.array() != 0.0) && (weights_.array() != 1.0)).any()) {
        throw ParameterError("binary illumination matrix holds non-binary entries");
    }
}

IlluminationMatrix IlluminationMatrix::identity(int n) {
    return IlluminationMatrix(Eigen::MatrixXd::Identity(n, n), true);
}

IlluminationMatrix IlluminationMatrix::all_on(int n) { return IlluminationMatrix(Eigen::MatrixXd::Ones(n, 1), true); }

IlluminationMatrix IlluminationMatrix::prefix(int m) const {
    if (m < 1 || m > num_acquisitions()) throw ParameterError("matrix prefix length out of range");
    return IlluminationMatrix(weights_.leftCols(m), binary_);
}

IlluminationMatrix IlluminationMatrix::with_column(const Eigen::VectorXd& column) const {
    if (column.size() != weights_.rows()) throw ParameterError("appended column has wrong length");
    Eigen::MatrixXd w(weights_.rows(), weights_.cols() + 1);
    w << weights_, column;
    const bool col_binary = ((column.array() == 0.0) || (column.array() == 1.0)).all();
    return IlluminationMatrix(std::move(w), binary_ && col_binary);
}

bool operator==(const IlluminationMatrix& a, const IlluminationMatrix& b) {
    return a.binary_ == b.binary_ && a.weights_.rows() == b.weights_.rows() &&
           a.weights_.cols() == b.weights_.cols() && a.weights_ == b.weights_;
}

std::string matrix_to_csv(const IlluminationMatrix& w) {
    std::string out = "# N=" + std::to_string(w.num_illuminants()) + " M=" + std::to_string(w.num_acquisitions()) +
                      " binary=" + (w.binary() ? "1" : "0") + "\n";
    for (int i = 0; i < w.num_illuminants(); ++i) {
        for (int j = 0; j < w.num_acquisitions(); ++j) {
            if (j) out += ",";
            out += format_fixed(w.weights()(i, j), 6);
        }
        out += "\n";
    }
    return out;
}

IlluminationMatrix matrix_from_csv(const std::string& text, const std::string& source) {
    const auto lines = split(text, '\n');
    if (lines.empty()) throw FormatError(source, "empty matrix file");
    int n = -1;
    int m = -1;
    int binary = -1;
    if (std::sscanf(lines[0].c_str(), "# N=%d M=%d binary=%d", &n, &m, &binary) != 3 || n < 1 || m < 1 ||
        (binary != 0 && binary != 1)) {
        throw FormatError(source, "bad matrix header '" + lines[0] + "'");
    }
    Eigen::MatrixXd w(n, m);
    int row = 0;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::string t = trim(lines[li]);
        if (t.empty() || t.front() == '#') continue;
        if (row >= n) throw FormatError(source, "more rows than N");
        const auto cells = split(t, ',');
        if (static_cast<int>(cells.size()) != m) throw FormatError(source, "row " + std::to_string(row) + " has wrong width");
        for (int j = 0; j < m; ++j) {
            try {
                w(row, j) = std::stod(cells[j]);
            } catch (const std::exception&) {
                throw FormatError(source, "bad number '" + cells[j] + "'");
            }
        }
        ++row;
    }
    if (row != n) throw FormatError(source, "expected " + std::to_string(n) + " rows, found " + std::to_string(row));
    try {
        return IlluminationMatrix(std::move(w), binary == 1);
    } catch (const ParameterError& e) {
        throw FormatError(source, e.what());
    }
}

void save_matrix_csv(const IlluminationMatrix& w, const std::filesystem::path& path) {
    write_text_file(path, matrix_to_csv(w));
}

IlluminationMatrix load_matrix_csv(const std::filesystem::path& path) {
    return matrix_from_csv(read_text_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Rendering

void validate(const IlluminationState& w) {
    if (w.weights.size() < 1) throw ParameterError("illumination state is empty");
    if (!w.weights.allFinite() || (w.weights.array() < 0.0).any() || (w.weights.array() > 1.0).any()) {
        throw ParameterError("illumination weights must lie in [0,1]");
    }
}

double render_scale(const CameraSettings& capture, const CameraSettings& target) {
    validate(capture);
    validate(target);
    return (target.exposure_ms / capture.exposure_ms) * std::pow(10.0, (target.gain_db - capture.gain_db) / 10.0);
}

Image render_clean(const RelightableModel& model, const IlluminationState& w, const CameraSettings& settings) {
    validate(w);
    if (w.weights.size() != model.num_illuminants()) {
        throw ParameterError("illumination state length " + std::to_string(w.weights.size()) +
                             " does not match model N=" + std::to_string(model.num_illuminants()));
    }
    const double scale = render_scale(model.capture(), settings);
    Image out(model.width(), model.height());
    Eigen::Map<Eigen::VectorXd>(out.pixels.data(), model.num_pixels()) = scale * (model.intensities() * w.weights);
    return out;
}

RenderedImage render_noisy(const RelightableModel& model, const IlluminationState& w, const CameraSettings& settings,
                           const NoiseModel& noise, Seed seed, double gray_max) {
    // fused form of synthesize(clean, predict_variance(generalize(noise), clean))
    Image img = render_clean(model, w, settings);
    const NoiseModel at_setting = generalize(noise, settings);
    if (!(gray_max > 0.0)) throw ParameterError("gray_max must be positive");
    for (std::size_t p = 0; p < img.size(); ++p) {
        const double mean = img.pixels[p];
        const double var = at_setting.sigma_p2 * mean + at_setting.sigma_r2;
        double v = mean;
        if (var > 0.0) v += std::sqrt(var) * normal_at(seed, p);
        img.pixels[p] = std::round(std::clamp(v, 0.0, gray_max));
    }
    return RenderedImage{std::move(img), settings, w, seed};
}

double select_gain(const Dataset& dataset, const IlluminationMatrix& W, double exposure_ms, double target_fraction,
                   GainBounds bounds, double gray_max) {
    if (dataset.models.empty()) throw ParameterError("gain selection needs a non-empty dataset");
    if (!(target_fraction > 0.0 && target_fraction <= 1.0)) throw ParameterError("target fraction must lie in (0,1]");
    if (!(exposure_ms > 0.0)) throw ParameterError("exposure must be positive");
    if (bounds.min_db > bounds.max_db) throw ParameterError("gain bounds are inverted");
    // brightest pixel expressed at 0 dB and the requested exposure
    double brightest = 0.0;
    for (const auto& m : dataset.models) {
        if (m.num_illuminants() != W.num_illuminants()) throw ParameterError("matrix N does not match dataset N");
        const double peak = (m.intensities() * W.weights()).maxCoeff();
        const double at_zero_db = peak * render_scale(m.capture(), CameraSettings{0.0, exposure_ms});
        brightest = std::max(brightest, at_zero_db);
    }
    if (!(brightest > 0.0)) throw NumericalError("gain selection: every rendered pixel is dark");
    const double gain = 10.0 * std::log10(target_fraction * gray_max / brightest);
    return std::clamp(gain, bounds.min_db, bounds.max_db);
}

}  // namespace muxillum
