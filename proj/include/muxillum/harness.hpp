#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "muxillum/camera.hpp"
#include "muxillum/classifier.hpp"
#include "muxillum/core_model.hpp"
#include "muxillum/features.hpp"
#include "muxillum/illumination.hpp"
#include "muxillum/noise.hpp"
#include "muxillum/rng.hpp"

namespace muxillum {

inline constexpr const char* kSchemaVersion = "muxillum-schema/1";

enum class Method { Greedy, Snr, NaiveAllOn };

std::string method_name(Method m);
Method parse_method(const std::string& text);

struct NamedSetting {
    std::string name;
    CameraSettings camera;
};

/// "name:gain_db:exposure_ms"
NamedSetting parse_setting(const std::string& text);

struct ExperimentConfig {
    std::filesystem::path dataset;       // dataset.tsv
    std::filesystem::path eval_dataset;  // empty: evaluate on `dataset`
    std::filesystem::path noise_model;
    std::filesystem::path output_dir;
    std::vector<NamedSetting> settings;
    std::vector<Method> methods{Method::Greedy};

    int max_columns = 8;
    int repeats = 400;
    double train_fraction = 0.75;
    double min_improvement = 0.0;
    Seed base_seed = 1;
    Seed eval_seed = 2;

    int iterations = 100000;
    int restarts = 4;
    bool snr_binary = false;
    std::optional<double> r_bar;  // default: dataset average reflectance

    bool auto_gain = true;  // false: use each setting's gain as is
    double target_fraction = 0.9;
    int feature_side = kDefaultFeatureSide;
    HogParams hog;
    SvmParams svm;
};

/// Checks ranges, seeds and that every referenced input path exists.
void validate(const ExperimentConfig& config);

/// One-line key=value echo of everything that determines results. The output
/// directory and worker count are left out on purpose.
std::string config_echo(const ExperimentConfig& config);

/// Artifact directory of one (method, setting) run.
std::filesystem::path run_dir(const ExperimentConfig& config, Method m, const std::string& setting);

// --- generate ---------------------------------------------------------------

/// Writes dataset.tsv, one model directory per model and family.txt.
Dataset cmd_generate(const SceneFamilySpec& spec, const std::filesystem::path& out_dir);

struct StackConfig {
    NoiseModel noise{0.7, 66.0, {15.0, 30.0}};
    std::vector<double> levels{20, 40, 60, 80, 100, 120, 140, 160, 180, 200};
    int frames = 120;
    int side = 128;
    Seed seed = 1;
    double gray_max = 255.0;
};

/// Flat-field calibration stacks drawn from `noise`: out_dir/level_XXX/frame_YYY.pgm.
void cmd_generate_stacks(const StackConfig& config, const std::filesystem::path& out_dir);

// --- calibrate --------------------------------------------------------------

struct CalibrateConfig {
    std::filesystem::path stack_dir;  // one sub-directory of PGM frames per intensity level
    CameraSettings settings{15.0, 30.0};
    double saturation_cutoff = kDefaultSaturationFraction * 255.0;
    std::filesystem::path output;        // noise model file
    std::filesystem::path observations;  // optional mean,variance CSV
};

/// Fits the affine model over every level below the cutoff. Fewer than two
/// usable levels raise DegenerateFitError.
AffineFit cmd_calibrate(const CalibrateConfig& config);

// --- optimize ---------------------------------------------------------------

struct OptimizeOutcome {
    Method method;
    std::string setting;
    IlluminationMatrix matrix;
    std::size_t candidate_evaluations = 0;
    double selection_ms = 0.0;
};

/// Runs every configured method at every setting and writes, per run:
/// matrix.csv, a trace CSV, classifier_<k>.bin per prefix and timing.txt.
std::vector<OptimizeOutcome> cmd_optimize(const ExperimentConfig& config, std::ostream& log);

// --- evaluate ---------------------------------------------------------------

struct CurvePoint {
    Method method;
    std::string setting;
    int image_count = 0;
    double accuracy = 0.0;
};

/// Peak row per (method, setting), Table-1 style.
struct TableRow {
    Method method;
    std::string setting;
    int image_count = 0;
    std::vector<double> per_class;
    std::vector<int> per_class_count;
    double overall = 0.0;
    double train_ms = 0.0;
    double infer_ms = 0.0;
};

struct EvalReport {
    std::vector<std::string> classes;
    std::vector<CurvePoint> curve;
    std::vector<TableRow> table;
    std::string config;
};

/// Scores every prefix of each stored matrix on freshly rendered imagery
/// from the evaluation seed domain and writes accuracy_vs_count.csv,
/// per_class_table.csv, accuracy_vs_count.svg and timing.csv into output_dir.
EvalReport cmd_evaluate(const ExperimentConfig& config, std::ostream& log);

/// First image count (1-based) whose accuracy is within `tolerance` of the
/// curve's maximum.
int plateau_count(const std::vector<double>& accuracies, double tolerance);

std::string accuracy_csv(const EvalReport& report);
std::string table_csv(const EvalReport& report);
std::string timing_csv(const EvalReport& report);

/// Line plot of an accuracy_vs_count.csv text; depends on nothing else.
std::string svg_from_accuracy_csv(const std::string& csv_text);

// --- demux / render ---------------------------------------------------------

/// Estimates per-illuminant images from coded PGM frames (one per column of
/// W, in order) and writes illum_<i>.pgm (16-bit, clipped to [0, 65535]).
void cmd_demux(const std::vector<std::filesystem::path>& coded, const std::filesystem::path& matrix,
               const std::filesystem::path& noise_model, double r_bar, const std::filesystem::path& out_dir);

struct RenderConfig {
    std::filesystem::path model_dir;
    std::filesystem::path matrix;
    CameraSettings settings{15.0, 30.0};
    std::filesystem::path noise_model;  // empty: noise-free
    Seed seed = 1;
    std::filesystem::path out_dir;
};

/// Writes frame_<j>.pgm (8-bit) for each column of the matrix.
void cmd_render(const RenderConfig& config);

}  // namespace muxillum
