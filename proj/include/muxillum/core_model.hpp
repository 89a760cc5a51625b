#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "muxillum/camera.hpp"
#include "muxillum/image.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

/// Per-illuminant mean-intensity stack of one sample in one pose.
///
/// Column i of `intensities()` is the image under illuminant i alone,
/// row-major flattened, in linear gray levels at the capture settings.
/// Immutable after construction; the constructor enforces the invariants
/// (N >= 1, N_pix = width * height, entries finite and non-negative).
class RelightableModel {
public:
    RelightableModel(int width, int height, Eigen::MatrixXd intensities, std::string class_label, int pose_id,
                     CameraSettings capture);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int num_illuminants() const noexcept { return static_cast<int>(intensities_.cols()); }
    Eigen::Index num_pixels() const noexcept { return intensities_.rows(); }
    const Eigen::MatrixXd& intensities() const noexcept { return intensities_; }
    const std::string& class_label() const noexcept { return class_label_; }
    int pose_id() const noexcept { return pose_id_; }
    const CameraSettings& capture() const noexcept { return capture_; }

    Image illuminant_image(int illuminant) const;

    friend bool operator==(const RelightableModel& a, const RelightableModel& b);

private:
    int width_;
    int height_;
    Eigen::MatrixXd intensities_;
    std::string class_label_;
    int pose_id_;
    CameraSettings capture_;
};

/// Parameters of a procedural family of visually similar classes.
/// Illuminant indices in `discriminant_illuminants` are zero-based.
struct SceneFamilySpec {
    int num_classes = 5;
    int poses_per_class = 20;
    int num_illuminants = 8;
    int image_side = 120;
    Seed base_seed = 1;
    double similarity = 0.9;
    std::vector<int> discriminant_illuminants = {2};
    CameraSettings capture{15.0, 30.0};
};

void validate(const SceneFamilySpec& spec);

struct Dataset {
    std::vector<RelightableModel> models;
    std::vector<std::string> classes;

    /// Index of the model's label in `classes`; throws ParameterError if absent.
    int class_index(const RelightableModel& model) const;
};

/// Checks the Dataset invariants (labels known, shared width/height/N).
void validate(const Dataset& dataset);

// Model directory layout: manifest.txt plus illum_000.pgm .. illum_{N-1}.pgm,
// 16-bit PGMs holding round(value * scale) where `scale` (stored in the
// manifest) is 256 unless the model's peak forces a smaller power of two.
RelightableModel load_model(const std::filesystem::path& dir);
void save_model(const RelightableModel& model, const std::filesystem::path& dir);

/// Writes <dir>/dataset.tsv (label<TAB>relative path) and one model
/// directory per entry.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
/// Reads an index file; model paths are resolved relative to the index.
Dataset load_dataset(const std::filesystem::path& index_file);

/// In-plane rigid placement of a synthetic sample.
struct ScenePose {
    double angle_rad = 0.0;
    double shift_x = 0.0;  // pixels
    double shift_y = 0.0;
};

/// Pose of (class, pose_id): rotation a multiple of 18 degrees plus a
/// translation within +-side/15 pixels, derived from the family seed.
ScenePose scene_pose(const SceneFamilySpec& spec, int class_index, int pose_id);

/// One synthetic sample of `class_index` placed at `pose`.
RelightableModel render_scene(const SceneFamilySpec& spec, int class_index, int pose_id, const ScenePose& pose);

/// Deterministic synthetic family: num_classes * poses_per_class models,
/// class-major order. Classes share one shape (a shaded elliptical dome with
/// a flat top on a dark floor) and differ by a ring-shaped reflectance
/// texture whose contrast grows with the class index. The texture shows under
/// the discriminant illuminants and is subtracted from the others in
/// proportion to their shading, so it cancels in the all-on sum. A small
/// similarity-controlled offset adds the only all-on difference.
Dataset generate_scene_family(const SceneFamilySpec& spec);

/// Class prototype at the identity pose (no rotation or translation).
RelightableModel class_prototype(const SceneFamilySpec& spec, int class_index);

/// Mask (1 inside, 0 outside) of the flat top at `pose`, the region where
/// class separation under a discriminant illuminant is guaranteed.
Image discriminant_region_mask(const SceneFamilySpec& spec, const ScenePose& pose = {});

/// Mean over all models, pixels and illuminants of the stored intensities.
double average_reflectance(const Dataset& dataset);

/// Default class labels: class_0, class_1, ...
std::string class_label_for(int class_index);

}  // namespace muxillum
