#include "muxillum/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "muxillum/error.hpp"
#include "muxillum/evaluation.hpp"
#include "muxillum/image.hpp"
#include "muxillum/mux_snr.hpp"
#include "muxillum/parallel.hpp"
#include "muxillum/pattern_search.hpp"
#include "muxillum/relight.hpp"
#include "muxillum/text_io.hpp"

namespace muxillum {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string seed_text(Seed s) { return std::to_string(s); }

std::string comment_line(const std::string& echo) { return std::string("# ") + kSchemaVersion + " " + echo + "\n"; }

AcquisitionSettings acquisition_for(const ExperimentConfig& c, const NamedSetting& s) {
    AcquisitionSettings acq;
    acq.exposure_ms = s.camera.exposure_ms;
    if (!c.auto_gain) acq.fixed_gain_db = s.camera.gain_db;
    acq.target_fraction = c.target_fraction;
    acq.feature_side = c.feature_side;
    acq.hog = c.hog;
    return acq;
}

EvaluationOptions evaluation_for(const ExperimentConfig& c, Seed seed, SeedDomain domain) {
    EvaluationOptions o;
    o.repeats = c.repeats;
    o.train_fraction = c.train_fraction;
    o.svm = c.svm;
    o.base_seed = seed;
    o.domain = domain;
    return o;
}

void require_path(const fs::path& p, const char* what) {
    if (p.empty()) throw ParameterError(std::string(what) + " path is not set");
    if (!fs::exists(p)) throw ParameterError(std::string(what) + " '" + p.string() + "' does not exist");
}

std::string classifier_file(int prefix) { return "classifier_" + std::to_string(prefix) + ".bin"; }

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Greedy: return "greedy";
        case Method::Snr: return "snr";
        case Method::NaiveAllOn: return "naive-all-on";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    const std::string t = trim(text);
    if (t == "greedy") return Method::Greedy;
    if (t == "snr") return Method::Snr;
    if (t == "naive-all-on" || t == "naive") return Method::NaiveAllOn;
    throw ParameterError("unknown method '" + text + "' (greedy, snr, naive-all-on)");
}

NamedSetting parse_setting(const std::string& text) {
    const auto parts = split(trim(text), ':');
    if (parts.size() != 3 || trim(parts[0]).empty()) {
        throw ParameterError("camera setting '" + text + "' is not name:gain_db:exposure_ms");
    }
    NamedSetting s;
    s.name = trim(parts[0]);
    for (char ch : s.name) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
            throw ParameterError("setting name '" + s.name + "' may only use letters, digits, '_' and '-'");
        }
    }
    try {
        s.camera.gain_db = std::stod(parts[1]);
        s.camera.exposure_ms = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw ParameterError("camera setting '" + text + "' has a non-numeric field");
    }
    validate(s.camera);
    return s;
}

void validate(const ExperimentConfig& c) {
    require_path(c.dataset, "dataset");
    if (!c.eval_dataset.empty()) require_path(c.eval_dataset, "evaluation dataset");
    require_path(c.noise_model, "noise model");
    if (c.output_dir.empty()) throw ParameterError("output directory is not set");
    if (c.settings.empty()) throw ParameterError("at least one camera setting is required");
    std::set<std::string> names;
    for (const auto& s : c.settings) {
        validate(s.camera);
        if (!names.insert(s.name).second) throw ParameterError("duplicate setting name '" + s.name + "'");
    }
    if (c.methods.empty()) throw ParameterError("at least one method is required");
    if (c.max_columns < 1) throw ParameterError("max_columns must be >= 1");
    if (c.repeats < 1) throw ParameterError("repeats must be >= 1");
    if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ParameterError("train_fraction must lie in (0,1)");
    if (c.iterations < 1) throw ParameterError("iterations must be >= 1");
    if (c.restarts < 1 || c.restarts > c.iterations) throw ParameterError("restarts must lie in [1, iterations]");
    if (c.r_bar && !(*c.r_bar >= 0.0)) throw ParameterError("r_bar must be >= 0");
    if (!(c.target_fraction > 0.0 && c.target_fraction <= 1.0)) throw ParameterError("target_fraction must lie in (0,1]");
    if (c.feature_side < 1) throw ParameterError("feature_side must be >= 1");
    hog_layout(c.feature_side, c.feature_side, c.hog);
    if (!(c.svm.c_reg > 0.0)) throw ParameterError("svm C must be > 0");
}

std::string config_echo(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "dataset=" << c.dataset.generic_string() << " eval_dataset=" << c.eval_dataset.generic_string()
      << " noise_model=" << c.noise_model.generic_string() << " settings=";
    for (std::size_t i = 0; i < c.settings.size(); ++i) {
        o << (i ? "," : "") << c.settings[i].name << ':' << format_double(c.settings[i].camera.gain_db) << ':'
          << format_double(c.settings[i].camera.exposure_ms);
    }
    o << " methods=";
    for (std::size_t i = 0; i < c.methods.size(); ++i) o << (i ? "," : "") << method_name(c.methods[i]);
    o << " max_columns=" << c.max_columns << " repeats=" << c.repeats
      << " train_fraction=" << format_double(c.train_fraction) << " min_improvement=" << format_double(c.min_improvement)
      << " base_seed=" << seed_text(c.base_seed) << " eval_seed=" << seed_text(c.eval_seed)
      << " iterations=" << c.iterations << " restarts=" << c.restarts << " snr_binary=" << (c.snr_binary ? 1 : 0)
      << " r_bar=" << (c.r_bar ? format_double(*c.r_bar) : std::string("auto"))
      << " auto_gain=" << (c.auto_gain ? 1 : 0) << " target_fraction=" << format_double(c.target_fraction)
      << " feature_side=" << c.feature_side << " hog=" << c.hog.cell << '/' << c.hog.block << '/' << c.hog.bins
      << " svm_c=" << format_double(c.svm.c_reg) << " svm_tol=" << format_double(c.svm.tolerance)
      << " svm_max_iter=" << c.svm.max_iterations;
    return o.str();
}

fs::path run_dir(const ExperimentConfig& config, Method m, const std::string& setting) {
    return config.output_dir / method_name(m) / setting;
}

// ---------------------------------------------------------------------------
// generate

Dataset cmd_generate(const SceneFamilySpec& spec, const fs::path& out_dir) {
    Dataset ds = generate_scene_family(spec);
    save_dataset(ds, out_dir);
    std::string disc;
    for (std::size_t i = 0; i < spec.discriminant_illuminants.size(); ++i) {
        disc += (i ? "," : "") + std::to_string(spec.discriminant_illuminants[i] + 1);
    }
    write_key_values(out_dir / "family.txt",
                     {{"schema", kSchemaVersion},
                      {"classes", std::to_string(spec.num_classes)},
                      {"poses_per_class", std::to_string(spec.poses_per_class)},
                      {"illuminants", std::to_string(spec.num_illuminants)},
                      {"image_side", std::to_string(spec.image_side)},
                      {"seed", seed_text(spec.base_seed)},
                      {"similarity", format_double(spec.similarity)},
                      {"discriminant", disc},
                      {"capture_gain_db", format_double(spec.capture.gain_db)},
                      {"capture_exposure_ms", format_double(spec.capture.exposure_ms)}});
    return ds;
}

void cmd_generate_stacks(const StackConfig& config, const fs::path& out_dir) {
    validate(config.noise);
    if (config.levels.empty()) throw ParameterError("no intensity levels given");
    if (config.frames < 2) throw ParameterError("a stack needs at least two frames");
    if (config.side < 1) throw ParameterError("stack side must be >= 1");
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        const double level = config.levels[li];
        if (!(level >= 0.0 && level <= config.gray_max)) throw ParameterError("level outside [0, gray_max]");
        char name[32];
        std::snprintf(name, sizeof name, "level_%03zu", li);
        const fs::path dir = out_dir / name;
        fs::create_directories(dir);
        const Image mean(config.side, config.side, level);
        const Image var = predict_variance(config.noise, mean);
        std::vector<Image> frames(config.frames);
        parallel_for(frames.size(), [&](std::size_t f) {
            frames[f] = synthesize(mean, var, derive_seed(config.seed, {li, f}), config.gray_max);
        });
        for (std::size_t f = 0; f < frames.size(); ++f) {
            char fname[32];
            std::snprintf(fname, sizeof fname, "frame_%03zu.pgm", f);
            write_pgm8(dir / fname, frames[f]);
        }
    }
    write_key_values(out_dir / "stacks.txt",
                     {{"schema", kSchemaVersion},
                      {"sigma_p2", format_double(config.noise.sigma_p2)},
                      {"sigma_r2", format_double(config.noise.sigma_r2)},
                      {"gain0_db", format_double(config.noise.reference.gain_db)},
                      {"exposure0_ms", format_double(config.noise.reference.exposure_ms)},
                      {"frames", std::to_string(config.frames)},
                      {"seed", seed_text(config.seed)}});
}

// ---------------------------------------------------------------------------
// calibrate

AffineFit cmd_calibrate(const CalibrateConfig& config) {
    if (!fs::is_directory(config.stack_dir)) {
        throw IoError("stack directory '" + config.stack_dir.string() + "' does not exist");
    }
    std::vector<fs::path> levels;
    for (const auto& e : fs::directory_iterator(config.stack_dir)) {
        if (e.is_directory()) levels.push_back(e.path());
    }
    std::sort(levels.begin(), levels.end());

    std::vector<NoiseObservation> all;
    int usable = 0;
    for (const auto& dir : levels) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) continue;
        std::vector<Image> frames;
        frames.reserve(files.size());
        for (const auto& f : files) frames.push_back(read_pgm_image(f));
        const auto obs = characterize_stack(frames, config.saturation_cutoff);
        if (!obs.empty()) ++usable;
        all.insert(all.end(), obs.begin(), obs.end());
    }
    // per-pixel scatter within one level would otherwise pass as a fit
    if (usable < 2) {
        throw DegenerateFitError("calibration needs at least two unsaturated intensity levels, found " +
                                 std::to_string(usable));
    }
    AffineFit fit = fit_affine(all, config.settings);
    if (!config.output.empty()) save_noise_model(fit.model, config.output);
    if (!config.observations.empty()) save_observations_csv(all, config.observations);
    return fit;
}

// ---------------------------------------------------------------------------
// optimize

namespace {

std::string greedy_accuracies_csv(const GreedyTrace& t, const std::string& echo) {
    std::string s = comment_line(echo) + "prefix,accuracy,improved,gain_db\n";
    for (std::size_t k = 0; k < t.accuracies.size(); ++k) {
        s += std::to_string(k + 1) + ',' + format_double(t.accuracies[k]) + ',' + (t.improved[k] ? "1" : "0") + ',' +
             format_double(t.gains_db[k]) + '\n';
    }
    return s;
}

std::string greedy_candidates_csv(const GreedyTrace& t, int n, const std::string& echo) {
    std::string s = comment_line(echo) + "column,mask,pattern,accuracy\n";
    for (std::size_t j = 0; j < t.candidate_accuracies.size(); ++j) {
        for (std::size_t c = 0; c < t.candidate_accuracies[j].size(); ++c) {
            const auto mask = static_cast<std::uint32_t>(c + 1);
            std::string pattern;
            for (int i = 0; i < n; ++i) pattern += (mask >> i) & 1u ? '1' : '0';
            s += std::to_string(j + 1) + ',' + std::to_string(mask) + ',' + pattern + ',' +
                 format_double(t.candidate_accuracies[j][c]) + '\n';
        }
    }
    return s;
}

std::string snr_trace_csv(const SnrOptimizerResult& r, const std::string& echo) {
    std::string s = comment_line(echo) + "iteration,mse\n";
    s += "0," + format_double(r.identity_mse) + '\n';
    const std::size_t n = r.mse_trace.size();
    for (std::size_t i = 0; i < n; ++i) {
        // sampled, plus every change and the final value
        const bool changed = i == 0 || r.mse_trace[i] != r.mse_trace[i - 1];
        if (changed || (i + 1) % 1000 == 0 || i + 1 == n) s += std::to_string(i + 1) + ',' + format_double(r.mse_trace[i]) + '\n';
    }
    return s;
}

std::string matrix_with_echo(const IlluminationMatrix& w, const std::string& echo) {
    std::string csv = matrix_to_csv(w);
    const auto nl = csv.find('\n');
    return csv.substr(0, nl + 1) + comment_line(echo) + csv.substr(nl + 1);
}

}  // namespace

std::vector<OptimizeOutcome> cmd_optimize(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    const Dataset dataset = load_dataset(config.dataset);
    const NoiseModel noise = load_noise_model(config.noise_model);
    const std::string echo = config_echo(config);
    const int n = dataset.models.front().num_illuminants();

    std::vector<OptimizeOutcome> out;
    for (Method method : config.methods) {
        for (const auto& setting : config.settings) {
            const std::string ctx = method_name(method) + "/" + setting.name;
            const fs::path dir = run_dir(config, method, setting.name);
            fs::create_directories(dir);
            const AcquisitionSettings acq = acquisition_for(config, setting);
            log << "[optimize] " << ctx << " ...\n" << std::flush;

            OptimizeOutcome o{method, setting.name, IlluminationMatrix::all_on(n), 0, 0.0};
            std::vector<std::pair<std::string, std::string>> timing;
            try {
                const auto t0 = Clock::now();
                if (method == Method::Greedy) {
                    GreedyOptions g;
                    g.max_columns = config.max_columns;
                    g.min_improvement = config.min_improvement;
                    g.evaluation = evaluation_for(config, config.base_seed, SeedDomain::Training);
                    const GreedyTrace trace = greedy_select(dataset, noise, acq, g);
                    o.selection_ms = ms_since(t0);
                    o.matrix = *trace.matrix;
                    o.candidate_evaluations = trace.candidate_evaluations;
                    write_text_file(dir / "accuracies.csv", greedy_accuracies_csv(trace, echo));
                    write_text_file(dir / "candidates.csv", greedy_candidates_csv(trace, n, echo));
                    for (std::size_t k = 0; k < trace.classifiers.size(); ++k) {
                        save_classifier(trace.classifiers[k], dir / classifier_file(static_cast<int>(k + 1)));
                    }
                } else {
                    if (method == Method::Snr) {
                        const double scale = render_scale(dataset.models.front().capture(), setting.camera);
                        const double r_bar = config.r_bar ? *config.r_bar : average_reflectance(dataset) * scale;
                        SnrOptimizerOptions so;
                        so.iterations = config.iterations;
                        so.restarts = config.restarts;
                        so.seed = derive_seed(config.base_seed, {0x736e72ULL});
                        so.binary = config.snr_binary;
                        const NoiseModel at_setting = generalize(noise, setting.camera);
                        const int m = std::max(n, config.max_columns);
                        const SnrOptimizerResult r = optimize_snr(n, m, at_setting, r_bar, so);
                        o.matrix = r.matrix;
                        o.candidate_evaluations = static_cast<std::size_t>(config.iterations);
                        write_text_file(dir / "snr_trace.csv", snr_trace_csv(r, echo));
                        log << "[optimize] " << ctx << " predicted MSE " << r.mse << " (identity " << r.identity_mse
                            << ", r_bar " << r_bar << ")\n";
                    }
                    o.selection_ms = ms_since(t0);
                    for (int k = 1; k <= o.matrix.num_acquisitions(); ++k) {
                        const auto tf = Clock::now();
                        const ClassifierModel cls =
                            train_deployment_classifier(dataset, o.matrix.prefix(k), noise, acq, config.svm, config.base_seed);
                        timing.emplace_back("fit_ms_" + std::to_string(k), format_fixed(ms_since(tf), 3));
                        save_classifier(cls, dir / classifier_file(k));
                    }
                }
            } catch (const ConditioningError& e) {
                throw ConditioningError(ctx + ": " + e.what(), e.condition());
            } catch (const NumericalError& e) {
                throw NumericalError(ctx + ": " + e.what());
            } catch (const ParameterError& e) {
                throw ParameterError(ctx + ": " + e.what());
            }
            write_text_file(dir / "matrix.csv", matrix_with_echo(o.matrix, echo));
            timing.insert(timing.begin(), {"selection_ms", format_fixed(o.selection_ms, 3)});
            timing.insert(timing.begin(), {"candidate_evaluations", std::to_string(o.candidate_evaluations)});
            write_key_values(dir / "timing.txt", timing);
            log << "[optimize] " << ctx << ": " << o.candidate_evaluations << " candidate evaluations, "
                << format_fixed(o.selection_ms, 1) << " ms\n";
            out.push_back(std::move(o));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// evaluate

int plateau_count(const std::vector<double>& acc, double tolerance) {
    if (acc.empty()) throw ParameterError("plateau of an empty curve");
    const double best = *std::max_element(acc.begin(), acc.end());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (acc[i] >= best - tolerance) return static_cast<int>(i + 1);
    }
    return static_cast<int>(acc.size());
}

std::string accuracy_csv(const EvalReport& r) {
    std::string s = comment_line(r.config) + "method,setting,image_count,accuracy\n";
    for (const auto& p : r.curve) {
        s += method_name(p.method) + ',' + p.setting + ',' + std::to_string(p.image_count) + ',' +
             format_double(p.accuracy) + '\n';
    }
    return s;
}

std::string table_csv(const EvalReport& r) {
    std::string s = comment_line(r.config) + "approach,setting,image_count";
    for (const auto& c : r.classes) s += ',' + c;
    s += ",overall\n";
    for (const auto& row : r.table) {
        s += method_name(row.method) + ',' + row.setting + ',' + std::to_string(row.image_count);
        for (double a : row.per_class) s += ',' + format_fixed(100.0 * a, 2);
        s += ',' + format_fixed(100.0 * row.overall, 2) + '\n';
    }
    return s;
}

std::string timing_csv(const EvalReport& r) {
    std::string s = comment_line(r.config) + "approach,setting,image_count,train_ms,infer_ms\n";
    for (const auto& row : r.table) {
        s += method_name(row.method) + ',' + row.setting + ',' + std::to_string(row.image_count) + ',' +
             format_fixed(row.train_ms, 3) + ',' + format_fixed(row.infer_ms, 3) + '\n';
    }
    return s;
}

std::string svg_from_accuracy_csv(const std::string& csv_text) {
    // series keyed "method/setting", in first-appearance order
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<int, double>>> series;
    bool header_seen = false;
    int max_count = 1;
    for (const auto& raw : split(csv_text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "method,setting,image_count,accuracy") throw FormatError("accuracy csv", "unexpected header");
            header_seen = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 4) throw FormatError("accuracy csv", "row '" + line + "' has wrong width");
        const std::string key = cells[0] + "/" + cells[1];
        if (!series.count(key)) order.push_back(key);
        const int count = std::stoi(cells[2]);
        max_count = std::max(max_count, count);
        series[key].emplace_back(count, std::stod(cells[3]));
    }
    if (!header_seen) throw FormatError("accuracy csv", "missing header");

    constexpr double W = 640, H = 420, L = 60, R = 170, T = 30, B = 50;
    const double pw = W - L - R;
    const double ph = H - T - B;
    auto px = [&](double c) { return L + (max_count == 1 ? 0.5 : (c - 1.0) / (max_count - 1.0)) * pw; };
    auto py = [&](double a) { return T + (1.0 - a) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<g stroke=\"#999\" stroke-width=\"1\">\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph << "\"/>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\"/>\n</g>\n";
    o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int t = 0; t <= 10; t += 2) {
        o << "<text x=\"" << L - 8 << "\" y=\"" << format_fixed(py(t / 10.0) + 4, 1) << "\" text-anchor=\"end\">"
          << format_fixed(t / 10.0, 1) << "</text>\n";
    }
    for (int c = 1; c <= max_count; ++c) {
        o << "<text x=\"" << format_fixed(px(c), 1) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">" << c
          << "</text>\n";
    }
    o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">image count</text>\n";
    o << "<text x=\"14\" y=\"" << T + ph / 2 << "\" transform=\"rotate(-90 14 " << T + ph / 2
      << ")\" text-anchor=\"middle\">accuracy</text>\n</g>\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& pts = series[order[i]];
        const char* color = colors[i % std::size(colors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < pts.size(); ++k) {
            o << (k ? " " : "") << format_fixed(px(pts[k].first), 2) << ',' << format_fixed(py(pts[k].second), 2);
        }
        o << "\"/>\n";
        for (const auto& p : pts) {
            o << "<circle cx=\"" << format_fixed(px(p.first), 2) << "\" cy=\"" << format_fixed(py(p.second), 2)
              << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = T + 14 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << L + pw + 14 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 34 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << L + pw + 40 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << order[i] << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

EvalReport cmd_evaluate(const ExperimentConfig& config, std::ostream& log) {
    validate(config);
    const Dataset train_set = load_dataset(config.dataset);
    const Dataset eval_set = config.eval_dataset.empty() ? train_set : load_dataset(config.eval_dataset);
    if (eval_set.classes != train_set.classes) {
        throw ConsistencyError("evaluation dataset classes differ from the training dataset");
    }
    const NoiseModel noise = load_noise_model(config.noise_model);
    const EvaluationOptions eval = evaluation_for(config, config.eval_seed, SeedDomain::Evaluation);
    if (eval.domain == SeedDomain::Training || eval.domain == SeedDomain::Deployment) {
        throw ConsistencyError("evaluation must not draw from training or deployment streams");
    }

    EvalReport report;
    report.classes = eval_set.classes;
    report.config = config_echo(config);
    for (Method method : config.methods) {
        for (const auto& setting : config.settings) {
            const std::string ctx = method_name(method) + "/" + setting.name;
            const fs::path dir = run_dir(config, method, setting.name);
            const fs::path matrix_path = dir / "matrix.csv";
            if (!fs::exists(matrix_path)) throw IoError(ctx + ": missing " + matrix_path.string() + "; run optimize first");
            const IlluminationMatrix w = load_matrix_csv(matrix_path);
            if (w.num_illuminants() != eval_set.models.front().num_illuminants()) {
                throw ConsistencyError(ctx + ": matrix has " + std::to_string(w.num_illuminants()) +
                                       " illuminants, dataset has " +
                                       std::to_string(eval_set.models.front().num_illuminants()));
            }
            const AcquisitionSettings acq = acquisition_for(config, setting);
            log << "[evaluate] " << ctx << " (" << w.num_acquisitions() << " prefixes) ...\n" << std::flush;

            const std::vector<AccuracyResult> results = evaluate_matrix(eval_set, w, noise, acq, eval);
            std::size_t peak = 0;
            for (std::size_t k = 0; k < results.size(); ++k) {
                report.curve.push_back({method, setting.name, static_cast<int>(k + 1), results[k].mean_accuracy});
                if (results[k].mean_accuracy > results[peak].mean_accuracy) peak = k;
            }
            const AccuracyResult& best = results[peak];
            TableRow row{method, setting.name, static_cast<int>(peak + 1), best.per_class_accuracy,
                         best.per_class_test_count, best.mean_accuracy, 0.0, 0.0};

            // train: pattern selection + classifier fit at the peak prefix
            double selection_ms = 0.0;
            double fit_ms = 0.0;
            const fs::path timing_path = dir / "timing.txt";
            if (fs::exists(timing_path)) {
                const KeyValues kv = read_key_values(timing_path);
                if (kv.count("selection_ms")) selection_ms = require_double(kv, "selection_ms", timing_path.string());
                const std::string key = "fit_ms_" + std::to_string(row.image_count);
                if (kv.count(key)) fit_ms = require_double(kv, key, timing_path.string());
            }
            row.train_ms = selection_ms + fit_ms;

            // infer: feature extraction + prediction per sample, rendering excluded
            const fs::path cls_path = dir / classifier_file(row.image_count);
            if (fs::exists(cls_path)) {
                const ClassifierModel cls = load_classifier(cls_path);
                const IlluminationMatrix wp = w.prefix(row.image_count);
                FeatureLayout expect = hog_layout(acq.feature_side, acq.feature_side, acq.hog);
                expect.images = row.image_count;
                if (cls.layout.images != expect.images || cls.layout.cells_x != expect.cells_x ||
                    cls.layout.cells_y != expect.cells_y || cls.layout.block != expect.block ||
                    cls.layout.bins != expect.bins) {
                    throw FormatError(cls_path.string(), "classifier layout does not match the configured features");
                }
                const double gain = acquisition_gain(train_set, wp, acq);
                const CameraSettings cam{gain, acq.exposure_ms};
                double infer_total = 0.0;
                for (std::size_t k = 0; k < eval_set.models.size(); ++k) {
                    std::vector<Image> frames;
                    for (int j = 0; j < wp.num_acquisitions(); ++j) {
                        const Seed s = derive_seed(config.eval_seed, {static_cast<std::uint64_t>(SeedDomain::Evaluation),
                                                                      0x696e6665ULL, k, static_cast<std::uint64_t>(j)});
                        frames.push_back(render_noisy(eval_set.models[k], IlluminationState{wp.weights().col(j)}, cam,
                                                      noise, s, acq.gray_max)
                                             .pixels);
                    }
                    const auto t0 = Clock::now();
                    std::vector<FeatureVector> per;
                    for (const auto& f : frames) per.push_back(hog(downscale(f, acq.feature_side), acq.hog));
                    (void)predict(cls, concat_sequence(per));
                    infer_total += ms_since(t0);
                }
                row.infer_ms = infer_total / static_cast<double>(eval_set.models.size());
            }
            report.table.push_back(std::move(row));
            log << "[evaluate] " << ctx << ": peak " << format_fixed(best.mean_accuracy, 4) << " at "
                << peak + 1 << " images\n";
        }
    }

    fs::create_directories(config.output_dir);
    const std::string acc = accuracy_csv(report);
    write_text_file(config.output_dir / "accuracy_vs_count.csv", acc);
    write_text_file(config.output_dir / "per_class_table.csv", table_csv(report));
    write_text_file(config.output_dir / "timing.csv", timing_csv(report));
    write_text_file(config.output_dir / "accuracy_vs_count.svg", svg_from_accuracy_csv(acc));
    return report;
}

// ---------------------------------------------------------------------------
// demux / render

void cmd_demux(const std::vector<fs::path>& coded, const fs::path& matrix, const fs::path& noise_model, double r_bar,
               const fs::path& out_dir) {
    const IlluminationMatrix w = load_matrix_csv(matrix);
    const NoiseModel noise = load_noise_model(noise_model);
    if (static_cast<int>(coded.size()) != w.num_acquisitions()) {
        throw ParameterError("matrix has " + std::to_string(w.num_acquisitions()) + " columns but " +
                             std::to_string(coded.size()) + " coded images were given");
    }
    std::vector<Image> frames;
    for (const auto& p : coded) frames.push_back(read_pgm_image(p));
    const auto est = demultiplex(frames, w, sigma_w(w, r_bar, noise));
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < est.size(); ++i) {
        PgmData d{est[i].width, est[i].height, 65535, {}};
        d.samples.reserve(est[i].size());
        for (double v : est[i].pixels) d.samples.push_back(static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, 65535.0)));
        write_pgm(out_dir / ("illum_" + std::to_string(i + 1) + ".pgm"), d);
    }
}

void cmd_render(const RenderConfig& config) {
    const RelightableModel model = load_model(config.model_dir);
    const IlluminationMatrix w = load_matrix_csv(config.matrix);
    if (w.num_illuminants() != model.num_illuminants()) {
        throw ConsistencyError("matrix has " + std::to_string(w.num_illuminants()) + " illuminants, model has " +
                               std::to_string(model.num_illuminants()));
    }
    validate(config.settings);
    std::optional<NoiseModel> noise;
    if (!config.noise_model.empty()) noise = load_noise_model(config.noise_model);
    fs::create_directories(config.out_dir);
    for (int j = 0; j < w.num_acquisitions(); ++j) {
        const IlluminationState state{w.weights().col(j)};
        const Image img = noise ? render_noisy(model, state, config.settings, *noise,
                                               derive_seed(config.seed, {static_cast<std::uint64_t>(j)}))
                                      .pixels
                                : render_clean(model, state, config.settings);
        write_pgm8(config.out_dir / ("frame_" + std::to_string(j + 1) + ".pgm"), img);
    }
}

}  // namespace muxillum
