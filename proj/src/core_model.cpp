#include "muxillum/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "muxillum/error.hpp"
#include "muxillum/parallel.hpp"
#include "muxillum/text_io.hpp"

namespace muxillum {

void validate(const CameraSettings& s) {
    if (!std::isfinite(s.gain_db) || !std::isfinite(s.exposure_ms) || s.exposure_ms <= 0.0) {
        throw ParameterError("camera settings need finite gain and positive exposure");
    }
}

RelightableModel::RelightableModel(int width, int height, Eigen::MatrixXd intensities, std::string class_label,
                                   int pose_id, CameraSettings capture)
    : width_(width),
      height_(height),
      intensities_(std::move(intensities)),
      class_label_(std::move(class_label)),
      pose_id_(pose_id),
      capture_(capture) {
    if (width_ <= 0 || height_ <= 0) throw ParameterError("model dimensions must be positive");
    if (intensities_.cols() < 1) throw ParameterError("model needs at least one illuminant");
    if (intensities_.rows() != static_cast<Eigen::Index>(width_) * height_) {
        throw ParameterError("model pixel count does not match width*height");
    }
    if (!intensities_.allFinite() || (intensities_.array() < 0.0).any()) {
        throw ParameterError("model intensities must be finite and non-negative");
    }
    validate(capture_);
}

bool operator==(const RelightableModel& a, const RelightableModel& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.class_label_ == b.class_label_ &&
           a.pose_id_ == b.pose_id_ && a.capture_ == b.capture_ &&
           a.intensities_.rows() == b.intensities_.rows() && a.intensities_.cols() == b.intensities_.cols() &&
           a.intensities_ == b.intensities_;
}

Image RelightableModel::illuminant_image(int illuminant) const {
    if (illuminant < 0 || illuminant >= num_illuminants()) throw ParameterError("illuminant index out of range");
    Image img(width_, height_);
    Eigen::Map<Eigen::VectorXd>(img.pixels.data(), num_pixels()) = intensities_.col(illuminant);
    return img;
}

void validate(const SceneFamilySpec& spec) {
    if (spec.num_classes < 1) throw ParameterError("scene family needs at least one class");
    if (spec.poses_per_class < 1) throw ParameterError("scene family needs at least one pose per class");
    if (spec.num_illuminants < 1) throw ParameterError("scene family needs at least one illuminant");
    if (spec.image_side < 16) throw ParameterError("scene family image side must be at least 16");
    if (!(spec.similarity >= 0.0 && spec.similarity <= 1.0)) throw ParameterError("similarity must lie in [0,1]");
    std::set<int> seen;
    for (int d : spec.discriminant_illuminants) {
        if (d < 0 || d >= spec.num_illuminants) throw ParameterError("discriminant illuminant index out of range");
        if (!seen.insert(d).second) throw ParameterError("duplicate discriminant illuminant");
    }
    validate(spec.capture);
}

int Dataset::class_index(const RelightableModel& model) const {
    const auto it = std::find(classes.begin(), classes.end(), model.class_label());
    if (it == classes.end()) throw ParameterError("model label '" + model.class_label() + "' not in dataset classes");
    return static_cast<int>(it - classes.begin());
}

void validate(const Dataset& dataset) {
    if (dataset.models.empty()) return;
    const auto& first = dataset.models.front();
    for (const auto& m : dataset.models) {
        dataset.class_index(m);
        if (m.width() != first.width() || m.height() != first.height() ||
            m.num_illuminants() != first.num_illuminants()) {
            throw ConsistencyError("dataset models disagree on width, height or illuminant count");
        }
    }
}

std::string class_label_for(int class_index) { return "class_" + std::to_string(class_index); }

// ---------------------------------------------------------------------------
// Model directories

namespace {

constexpr const char* kManifest = "manifest.txt";
constexpr const char* kModelFormat = "muxillum-model/1";

std::string illuminant_file_name(int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "illum_%03d.pgm", i);
    return buf;
}

double storage_scale(double peak) {
    double scale = 256.0;
    while (scale > 1.0 / 1024.0 && peak * scale > 65535.0) scale *= 0.5;
    if (peak * scale > 65535.0) throw ParameterError("model intensities too large for 16-bit storage");
    return scale;
}

}  // namespace

void save_model(const RelightableModel& model, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const double scale = storage_scale(model.intensities().maxCoeff());
    for (int i = 0; i < model.num_illuminants(); ++i) {
        PgmData pgm{model.width(), model.height(), 65535, std::vector<std::uint16_t>(model.num_pixels())};
        const auto col = model.intensities().col(i);
        for (Eigen::Index p = 0; p < model.num_pixels(); ++p) {
            pgm.samples[p] = static_cast<std::uint16_t>(std::lround(col[p] * scale));
        }
        write_pgm(dir / illuminant_file_name(i), pgm);
    }
    write_key_values(dir / kManifest, {
                                          {"format", kModelFormat},
                                          {"class", model.class_label()},
                                          {"pose", std::to_string(model.pose_id())},
                                          {"illuminants", std::to_string(model.num_illuminants())},
                                          {"width", std::to_string(model.width())},
                                          {"height", std::to_string(model.height())},
                                          {"gain_db", format_double(model.capture().gain_db)},
                                          {"exposure_ms", format_double(model.capture().exposure_ms)},
                                          {"scale", format_double(scale)},
                                      });
}

RelightableModel load_model(const std::filesystem::path& dir) {
    const auto manifest_path = dir / kManifest;
    if (!std::filesystem::exists(manifest_path)) throw LoadError(manifest_path.string(), "manifest missing");
    const KeyValues kv = read_key_values(manifest_path);
    const std::string mf = manifest_path.string();
    const long long n = require_int(kv, "illuminants", mf);
    const long long width = require_int(kv, "width", mf);
    const long long height = require_int(kv, "height", mf);
    const double scale = require_double(kv, "scale", mf);
    if (n < 1 || width < 1 || height < 1 || !(scale > 0.0)) throw LoadError(mf, "non-positive size or scale");

    int image_count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("illum_", 0) == 0 && entry.path().extension() == ".pgm") ++image_count;
    }
    if (image_count != n) {
        throw ConsistencyError(mf + ": manifest declares " + std::to_string(n) + " illuminants but directory holds " +
                               std::to_string(image_count) + " images");
    }

    Eigen::MatrixXd L(width * height, n);
    for (int i = 0; i < n; ++i) {
        const auto path = dir / illuminant_file_name(i);
        if (!std::filesystem::exists(path)) throw LoadError(path.string(), "illuminant image missing");
        const PgmData pgm = read_pgm(path);
        if (pgm.width != width || pgm.height != height) {
            throw LoadError(path.string(), "image is " + std::to_string(pgm.width) + "x" +
                                               std::to_string(pgm.height) + ", manifest says " +
                                               std::to_string(width) + "x" + std::to_string(height));
        }
        for (std::size_t p = 0; p < pgm.samples.size(); ++p) {
            L(static_cast<Eigen::Index>(p), i) = pgm.samples[p] / scale;
        }
    }
    CameraSettings capture{require_double(kv, "gain_db", mf), require_double(kv, "exposure_ms", mf)};
    return RelightableModel(static_cast<int>(width), static_cast<int>(height), std::move(L),
                            require_string(kv, "class", mf), static_cast<int>(require_int(kv, "pose", mf)), capture);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    validate(dataset);
    std::error_code ec;
    std::filesystem::create_directories(dir / "models", ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::string index;
    for (std::size_t i = 0; i < dataset.models.size(); ++i) {
        const auto& m = dataset.models[i];
        char name[128];
        std::snprintf(name, sizeof name, "%04zu_pose%03d", i, m.pose_id());
        const std::filesystem::path rel = std::filesystem::path("models") / (m.class_label() + "_" + name);
        save_model(m, dir / rel);
        index += m.class_label() + "\t" + rel.generic_string() + "\n";
    }
    write_text_file(dir / "dataset.tsv", index);
}

Dataset load_dataset(const std::filesystem::path& index_file) {
    const std::string text = read_text_file(index_file);
    const auto base = index_file.parent_path();
    Dataset ds;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FormatError(index_file.string(), "line " + std::to_string(lineno) + " lacks label<TAB>path");
        }
        const std::string label = line.substr(0, tab);
        const std::filesystem::path rel = trim(line.substr(tab + 1));
        RelightableModel m = load_model(rel.is_absolute() ? rel : base / rel);
        if (m.class_label() != label) {
            throw ConsistencyError(index_file.string() + ": line " + std::to_string(lineno) + " labels '" + label +
                                   "' but manifest says '" + m.class_label() + "'");
        }
        if (std::find(ds.classes.begin(), ds.classes.end(), label) == ds.classes.end()) ds.classes.push_back(label);
        ds.models.push_back(std::move(m));
    }
    validate(ds);
    return ds;
}

// ---------------------------------------------------------------------------
// Synthetic scene families

namespace {

constexpr double kSemiMajor = 0.34;   // fraction of image side
constexpr double kSemiMinor = 0.28;
constexpr double kPlateau = 0.6;      // normalized elliptic radius of the flat top
constexpr double kTextureExtent = 0.85;
constexpr double kMaxSlope = 70.0 * std::numbers::pi / 180.0;
constexpr double kIrradiance = 220.0;
constexpr double kAmbient = 0.1;
constexpr double kObjectAlbedo = 0.85;
constexpr double kFloorAlbedo = 0.05;
constexpr double kContrastStep = 0.22;  // reflectance contrast between adjacent classes
constexpr double kMaxContrast = 0.9;
constexpr double kRingPeriod = 6.0;     // pixels at side 120
constexpr double kSimilarityOffset = 4.0;
// Zero-sum clutter on the compensating illuminants: hides the compensation
// ring in any single non-discriminant image, cancels in the all-on sum.
constexpr double kClutter = 0.25;
constexpr int kClutterWaves = 4;
constexpr double kCompensationLimit = 0.95 - 2.0 * kClutter;

struct Lighting {
    std::vector<Eigen::Vector3d> directions;
    std::vector<double> plateau_base;  // flat-top intensity per illuminant
};

Lighting lighting_for(int n) {
    Lighting l;
    for (int i = 0; i < n; ++i) {
        const double az = 2.0 * std::numbers::pi * i / n;
        const double el = (i % 2 == 0 ? 60.0 : 35.0) * std::numbers::pi / 180.0;
        l.directions.emplace_back(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
        l.plateau_base.push_back(kIrradiance * kObjectAlbedo * (kAmbient + std::sin(el)));
    }
    return l;
}

// Contrast step between adjacent classes, reduced when the non-discriminant
// illuminants cannot absorb the texture on the plateau.
double contrast_step(const SceneFamilySpec& spec, const Lighting& light) {
    if (spec.discriminant_illuminants.empty() || spec.num_classes < 2) return 0.0;
    const std::set<int> disc(spec.discriminant_illuminants.begin(), spec.discriminant_illuminants.end());
    double sum_disc = 0.0;
    double sum_other = 0.0;
    for (int i = 0; i < spec.num_illuminants; ++i) (disc.count(i) ? sum_disc : sum_other) += light.plateau_base[i];
    double cap = kMaxContrast;
    if (sum_other > 0.0) cap = std::min(cap, 0.9 * sum_other / sum_disc);
    return std::min(kContrastStep, cap / (spec.num_classes - 1));
}

// Clutter only makes sense when there is something to hide.
bool contrast_any(const SceneFamilySpec& spec) {
    return !spec.discriminant_illuminants.empty() && spec.num_classes > 1;
}

double ellipse_radius(double u, double v, double a, double b) {
    return std::sqrt((u / a) * (u / a) + (v / b) * (v / b));
}

RelightableModel render_model(const SceneFamilySpec& spec, const Lighting& light, double step, int class_index,
                              int pose_id, const ScenePose& pose) {
    const int side = spec.image_side;
    const int n = spec.num_illuminants;
    const double a = kSemiMajor * side;
    const double b = kSemiMinor * side;
    const double period = kRingPeriod * side / 120.0;
    const double ca = std::cos(pose.angle_rad);
    const double sa = std::sin(pose.angle_rad);
    const double cx = 0.5 * side + pose.shift_x;
    const double cy = 0.5 * side + pose.shift_y;

    std::vector<char> is_disc(n, 0);
    for (int d : spec.discriminant_illuminants) is_disc[d] = 1;
    const double contrast = step * class_index;
    const double offset = spec.num_classes > 1
                              ? (1.0 - spec.similarity) * kSimilarityOffset * class_index / (spec.num_classes - 1) / n
                              : 0.0;

    // plane waves near the ring period, drawn per sample and illuminant
    struct Wave {
        double kx, ky, phase;
    };
    std::vector<std::vector<Wave>> waves(n);
    for (int i = 0; i < n; ++i) {
        if (is_disc[i]) continue;
        const Seed ws = derive_seed(spec.base_seed, {0x636c7574ULL, static_cast<std::uint64_t>(class_index),
                                                     static_cast<std::uint64_t>(pose_id), static_cast<std::uint64_t>(i)});
        for (int k = 0; k < kClutterWaves; ++k) {
            const double dir = 2.0 * std::numbers::pi * uniform_at(ws, 3 * k);
            const double len = 2.0 * std::numbers::pi / (period * (0.7 + 0.6 * uniform_at(ws, 3 * k + 1)));
            waves[i].push_back({len * std::cos(dir), len * std::sin(dir), 2.0 * std::numbers::pi * uniform_at(ws, 3 * k + 2)});
        }
    }
    const bool clutter = contrast_any(spec) && n > 2;

    Eigen::MatrixXd L(static_cast<Eigen::Index>(side) * side, n);
    std::vector<double> shade(n);
    std::vector<double> field(n, 0.0);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double dx = x + 0.5 - cx;
            const double dy = y + 0.5 - cy;
            const double u = ca * dx + sa * dy;
            const double v = -sa * dx + ca * dy;
            const double rho = ellipse_radius(u, v, a, b);
            const Eigen::Index p = static_cast<Eigen::Index>(y) * side + x;

            if (rho > 1.0) {
                for (int i = 0; i < n; ++i) {
                    L(p, i) = std::round(kIrradiance * kFloorAlbedo * (kAmbient + light.directions[i].z()) * 256.0) / 256.0;
                }
                continue;
            }

            Eigen::Vector3d normal(0.0, 0.0, 1.0);
            if (rho > kPlateau) {
                const double tilt = (rho - kPlateau) / (1.0 - kPlateau) * kMaxSlope;
                Eigen::Vector2d g(u / (a * a), v / (b * b));
                g.normalize();
                const Eigen::Vector2d gw(ca * g.x() - sa * g.y(), sa * g.x() + ca * g.y());
                normal = Eigen::Vector3d(std::sin(tilt) * gw.x(), std::sin(tilt) * gw.y(), std::cos(tilt));
            }
            double texture = 0.0;
            if (rho <= kTextureExtent && contrast > 0.0) {
                const double r = std::sqrt(u * u + v * v);
                texture = contrast * std::clamp(1.5 * std::sin(2.0 * std::numbers::pi * r / period), -1.0, 1.0);
            }
            double added = 0.0;
            double other = 0.0;
            for (int i = 0; i < n; ++i) {
                shade[i] = kIrradiance * kObjectAlbedo * (kAmbient + std::max(0.0, normal.dot(light.directions[i])));
                if (is_disc[i]) {
                    added += shade[i] * texture;
                } else {
                    other += shade[i];
                }
            }
            if (texture != 0.0 && std::abs(added) > kCompensationLimit * other) {
                // keep every compensating illuminant non-negative so the all-on sum stays exact
                const double limit = other > 0.0 ? kCompensationLimit * other / std::abs(added) : 1.0;
                texture *= limit;
                added *= limit;
            }
            double weighted = 0.0;
            if (clutter && rho <= kTextureExtent) {
                for (int i = 0; i < n; ++i) {
                    if (is_disc[i]) continue;
                    double f = 0.0;
                    for (const auto& w : waves[i]) f += std::cos(w.kx * x + w.ky * y + w.phase);
                    field[i] = f / kClutterWaves;
                    weighted += shade[i] * field[i];
                }
            }
            const double mean_field = other > 0.0 ? weighted / other : 0.0;
            for (int i = 0; i < n; ++i) {
                double value = shade[i] + offset;
                if (clutter && !is_disc[i] && rho <= kTextureExtent) {
                    value += kClutter * shade[i] * (field[i] - mean_field);
                }
                if (texture != 0.0) {
                    // visible under discriminant illuminants, cancelled in the all-on sum
                    value += is_disc[i] ? shade[i] * texture : (other > 0.0 ? -added * shade[i] / other : 0.0);
                }
                // 1/256 grid keeps models exactly representable on disk
                L(p, i) = std::round(std::max(0.0, value) * 256.0) / 256.0;
            }
        }
    }
    return RelightableModel(side, side, std::move(L), class_label_for(class_index), pose_id, spec.capture);
}

}  // namespace

ScenePose scene_pose(const SceneFamilySpec& spec, int class_index, int pose_id) {
    const Seed s = derive_seed(spec.base_seed, {0x706f7365ULL, static_cast<std::uint64_t>(class_index),
                                                static_cast<std::uint64_t>(pose_id)});
    const int step = static_cast<int>(uniform_at(s, 0) * 20.0) % 20;
    const double max_shift = spec.image_side / 15.0;
    return {step * 18.0 * std::numbers::pi / 180.0, (2.0 * uniform_at(s, 1) - 1.0) * max_shift,
            (2.0 * uniform_at(s, 2) - 1.0) * max_shift};
}

RelightableModel render_scene(const SceneFamilySpec& spec, int class_index, int pose_id, const ScenePose& pose) {
    validate(spec);
    if (class_index < 0 || class_index >= spec.num_classes) throw ParameterError("class index out of range");
    const Lighting light = lighting_for(spec.num_illuminants);
    return render_model(spec, light, contrast_step(spec, light), class_index, pose_id, pose);
}

Dataset generate_scene_family(const SceneFamilySpec& spec) {
    validate(spec);
    const Lighting light = lighting_for(spec.num_illuminants);
    const double step = contrast_step(spec, light);
    Dataset ds;
    for (int c = 0; c < spec.num_classes; ++c) ds.classes.push_back(class_label_for(c));

    const std::size_t total = static_cast<std::size_t>(spec.num_classes) * spec.poses_per_class;
    std::vector<std::optional<RelightableModel>> slots(total);
    parallel_for(total, [&](std::size_t k) {
        const int c = static_cast<int>(k / spec.poses_per_class);
        const int p = static_cast<int>(k % spec.poses_per_class);
        slots[k].emplace(render_model(spec, light, step, c, p, scene_pose(spec, c, p)));
    });
    ds.models.reserve(total);
    for (auto& s : slots) ds.models.push_back(std::move(*s));
    return ds;
}

RelightableModel class_prototype(const SceneFamilySpec& spec, int class_index) {
    return render_scene(spec, class_index, 0, ScenePose{});
}

Image discriminant_region_mask(const SceneFamilySpec& spec, const ScenePose& pose) {
    validate(spec);
    const int side = spec.image_side;
    const double a = kSemiMajor * side;
    const double b = kSemiMinor * side;
    const double ca = std::cos(pose.angle_rad);
    const double sa = std::sin(pose.angle_rad);
    Image mask(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const double dx = x + 0.5 - (0.5 * side + pose.shift_x);
            const double dy = y + 0.5 - (0.5 * side + pose.shift_y);
            const double u = ca * dx + sa * dy;
            const double v = -sa * dx + ca * dy;
            mask.at(x, y) = ellipse_radius(u, v, a, b) <= kPlateau ? 1.0 : 0.0;
        }
    }
    return mask;
}

double average_reflectance(const Dataset& dataset) {
    if (dataset.models.empty()) throw ParameterError("average reflectance of an empty dataset");
    double total = 0.0;
    double count = 0.0;
    for (const auto& m : dataset.models) {
        total += m.intensities().sum();
        count += static_cast<double>(m.intensities().size());
    }
    return total / count;
}

}  // namespace muxillum
