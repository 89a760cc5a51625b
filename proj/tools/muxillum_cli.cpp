// muxillum command-line front end.
//
//   muxillum generate  --out DIR [--classes C --poses P ...]
//   muxillum generate  --kind stacks --out DIR [--sigma-p2 ... --levels ...]
//   muxillum calibrate --stacks DIR --out noise.txt
//   muxillum optimize  --config exp.ini
//   muxillum evaluate  --config exp.ini
//   muxillum demux     --matrix W.csv --noise noise.txt --coded a.pgm b.pgm ... --out DIR
//   muxillum render    --model DIR --matrix W.csv --out DIR
//
// Every subcommand accepts --config FILE (INI/TOML, keys are the long option
// names) and flags override the file. Exit codes: 0 ok, 2 bad configuration,
// 3 numerical/conditioning failure, 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "muxillum/error.hpp"
#include "muxillum/harness.hpp"
#include "muxillum/text_io.hpp"

using namespace muxillum;

namespace {

struct ExperimentArgs {
    std::string dataset, eval_dataset, noise, out;
    std::vector<std::string> settings{"sigma3:17.5:22.5"};
    std::vector<std::string> methods{"greedy"};
    std::string r_bar;
    bool fixed_gain = false;
    ExperimentConfig cfg;
};

void add_experiment_options(CLI::App* sub, ExperimentArgs& a) {
    sub->add_option("--dataset", a.dataset, "training dataset index (dataset.tsv)")->required();
    sub->add_option("--eval-dataset", a.eval_dataset, "evaluation dataset index (default: --dataset)");
    sub->add_option("--noise", a.noise, "noise model file")->required();
    sub->add_option("--out", a.out, "output directory")->required();
    sub->add_option("--setting", a.settings, "camera setting name:gain_db:exposure_ms (repeatable)")
        ->capture_default_str();
    sub->add_option("--method", a.methods, "greedy | snr | naive-all-on (repeatable)")->capture_default_str();
    sub->add_option("--max-columns", a.cfg.max_columns, "M_max")->capture_default_str();
    sub->add_option("--repeats", a.cfg.repeats, "re-render/split repeats per evaluation")->capture_default_str();
    sub->add_option("--train-fraction", a.cfg.train_fraction)->capture_default_str();
    sub->add_option("--min-improvement", a.cfg.min_improvement)->capture_default_str();
    sub->add_option("--seed", a.cfg.base_seed, "training-domain base seed")->capture_default_str();
    sub->add_option("--eval-seed", a.cfg.eval_seed, "evaluation-domain base seed")->capture_default_str();
    sub->add_option("--iterations", a.cfg.iterations, "SNR optimizer iterations")->capture_default_str();
    sub->add_option("--restarts", a.cfg.restarts, "SNR optimizer chains")->capture_default_str();
    sub->add_flag("--snr-binary", a.cfg.snr_binary, "restrict the SNR optimizer to 0/1 entries");
    sub->add_option("--r-bar", a.r_bar, "average reflectance for the SNR model (default: from dataset)");
    sub->add_flag("--fixed-gain", a.fixed_gain, "use each setting's gain instead of auto gain");
    sub->add_option("--target-fraction", a.cfg.target_fraction)->capture_default_str();
    sub->add_option("--feature-side", a.cfg.feature_side)->capture_default_str();
    sub->add_option("--hog-cell", a.cfg.hog.cell)->capture_default_str();
    sub->add_option("--hog-block", a.cfg.hog.block)->capture_default_str();
    sub->add_option("--hog-bins", a.cfg.hog.bins)->capture_default_str();
    sub->add_option("--svm-c", a.cfg.svm.c_reg)->capture_default_str();
    sub->add_option("--svm-tol", a.cfg.svm.tolerance)->capture_default_str();
    sub->add_option("--svm-max-iter", a.cfg.svm.max_iterations)->capture_default_str();
}

ExperimentConfig finish(ExperimentArgs& a) {
    ExperimentConfig c = a.cfg;
    c.dataset = a.dataset;
    c.eval_dataset = a.eval_dataset;
    c.noise_model = a.noise;
    c.output_dir = a.out;
    c.settings.clear();
    for (const auto& s : a.settings) c.settings.push_back(parse_setting(s));
    c.methods.clear();
    for (const auto& m : a.methods) c.methods.push_back(parse_method(m));
    if (!a.r_bar.empty()) {
        try {
            c.r_bar = std::stod(a.r_bar);
        } catch (const std::exception&) {
            throw ParameterError("--r-bar is not a number");
        }
    }
    c.auto_gain = !a.fixed_gain;
    return c;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
}

// Expands `<sub> --config FILE` into explicit flags placed before the
// remaining arguments; flags given on the command line win. Keys may sit at
// top level or in a section named after the subcommand.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
    if (args.size() < 2) return args;
    CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[1]);
    } catch (const CLI::OptionNotFound&) {
        return args;
    }
    std::string file;
    std::vector<std::string> rest;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            file = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            file = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (file.empty()) return args;

    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(file);
    } catch (const CLI::FileError&) {
        throw ParameterError("cannot read config file '" + file + "'");
    }
    std::vector<std::string> out{args[0], args[1]};
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub->get_name())) continue;
        std::string key = item.name;
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || key == "config") {
            throw ParameterError(file + ": unknown key '" + item.name + "' for " + sub->get_name());
        }
        if (given_on_command_line(rest, flag)) continue;
        if (opt->get_type_size() == 0) {
            const std::string v = item.inputs.empty() ? "true" : item.inputs.front();
            if (v == "true" || v == "1" || v == "on" || v == "yes") out.push_back(flag);
            continue;
        }
        out.push_back(flag);
        for (const auto& v : item.inputs) out.push_back(v);
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"muxillum: illumination pattern selection for classification"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic scene family or calibration stacks");
    gen->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    std::string gen_kind = "family";
    std::string gen_out;
    SceneFamilySpec spec;
    std::vector<int> disc{3};
    StackConfig stacks;
    gen->add_option("--kind", gen_kind, "family | stacks")->check(CLI::IsMember({"family", "stacks"}))->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--classes", spec.num_classes)->capture_default_str();
    gen->add_option("--poses", spec.poses_per_class)->capture_default_str();
    gen->add_option("--illuminants", spec.num_illuminants)->capture_default_str();
    gen->add_option("--side", spec.image_side)->capture_default_str();
    gen->add_option("--seed", spec.base_seed)->capture_default_str();
    gen->add_option("--similarity", spec.similarity)->capture_default_str();
    gen->add_option("--discriminant", disc, "1-based discriminant illuminants")->capture_default_str();
    gen->add_option("--capture-gain", spec.capture.gain_db)->capture_default_str();
    gen->add_option("--capture-exposure", spec.capture.exposure_ms)->capture_default_str();
    gen->add_option("--sigma-p2", stacks.noise.sigma_p2)->capture_default_str();
    gen->add_option("--sigma-r2", stacks.noise.sigma_r2)->capture_default_str();
    gen->add_option("--levels", stacks.levels)->capture_default_str();
    gen->add_option("--frames", stacks.frames)->capture_default_str();
    gen->add_option("--stack-side", stacks.side)->capture_default_str();

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit the affine noise model to image stacks");
    cal->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    CalibrateConfig calc;
    std::string cal_stacks, cal_out, cal_obs;
    cal->add_option("--stacks", cal_stacks, "directory with one sub-directory of frames per level")->required();
    cal->add_option("--out", cal_out, "noise model file to write")->required();
    cal->add_option("--observations", cal_obs, "optional mean,variance CSV");
    cal->add_option("--gain", calc.settings.gain_db)->capture_default_str();
    cal->add_option("--exposure", calc.settings.exposure_ms)->capture_default_str();
    cal->add_option("--cutoff", calc.saturation_cutoff, "saturation cutoff in gray levels")->capture_default_str();

    // optimize / evaluate
    auto* opt = app.add_subcommand("optimize", "select illumination patterns");
    opt->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    ExperimentArgs opt_args;
    add_experiment_options(opt, opt_args);
    auto* eva = app.add_subcommand("evaluate", "score stored patterns on fresh renders");
    eva->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    ExperimentArgs eva_args;
    add_experiment_options(eva, eva_args);

    // demux
    auto* dmx = app.add_subcommand("demux", "estimate single-illuminant images from coded frames");
    dmx->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    std::vector<std::string> coded;
    std::string dmx_matrix, dmx_noise, dmx_out;
    double dmx_rbar = 0.0;
    dmx->add_option("--coded", coded, "coded PGM frames, one per matrix column")->required();
    dmx->add_option("--matrix", dmx_matrix)->required();
    dmx->add_option("--noise", dmx_noise)->required();
    dmx->add_option("--r-bar", dmx_rbar)->capture_default_str();
    dmx->add_option("--out", dmx_out)->required();

    // render
    auto* ren = app.add_subcommand("render", "render a model under each column of a matrix");
    ren->add_option("--config", "INI/TOML file of long-option keys; flags override it");
    RenderConfig renc;
    std::string ren_model, ren_matrix, ren_noise, ren_out;
    ren->add_option("--model", ren_model)->required();
    ren->add_option("--matrix", ren_matrix)->required();
    ren->add_option("--noise", ren_noise, "noise model (omit for noise-free)");
    ren->add_option("--gain", renc.settings.gain_db)->capture_default_str();
    ren->add_option("--exposure", renc.settings.exposure_ms)->capture_default_str();
    ren->add_option("--seed", renc.seed)->capture_default_str();
    ren->add_option("--out", ren_out)->required();

    try {
        std::vector<std::string> args(argv, argv + argc);
        try {
            args = expand_config(app, std::move(args));
        } catch (const ParameterError& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 2;
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            if (gen_kind == "stacks") {
                stacks.noise.reference = spec.capture;
                stacks.seed = spec.base_seed;
                cmd_generate_stacks(stacks, gen_out);
                std::cout << "wrote " << stacks.levels.size() << " stacks of " << stacks.frames << " frames to "
                          << gen_out << "\n";
            } else {
                spec.discriminant_illuminants.clear();
                for (int d : disc) spec.discriminant_illuminants.push_back(d - 1);
                const Dataset ds = cmd_generate(spec, gen_out);
                std::cout << "wrote " << ds.models.size() << " models to " << gen_out << "\n";
            }
        } else if (*cal) {
            calc.stack_dir = cal_stacks;
            calc.output = cal_out;
            calc.observations = cal_obs;
            const AffineFit fit = cmd_calibrate(calc);
            std::cout << "sigma_p2=" << format_double(fit.model.sigma_p2) << " sigma_r2="
                      << format_double(fit.model.sigma_r2) << (fit.intercept_clamped ? " (intercept clamped)" : "")
                      << "\n";
        } else if (*opt) {
            const auto outcomes = cmd_optimize(finish(opt_args), std::cerr);
            for (const auto& o : outcomes) {
                std::cout << method_name(o.method) << '/' << o.setting << ": M=" << o.matrix.num_acquisitions()
                          << " candidate_evaluations=" << o.candidate_evaluations
                          << " wall_ms=" << format_fixed(o.selection_ms, 1) << "\n";
            }
        } else if (*eva) {
            const EvalReport r = cmd_evaluate(finish(eva_args), std::cerr);
            std::cout << table_csv(r);
        } else if (*dmx) {
            std::vector<std::filesystem::path> paths(coded.begin(), coded.end());
            cmd_demux(paths, dmx_matrix, dmx_noise, dmx_rbar, dmx_out);
        } else if (*ren) {
            renc.model_dir = ren_model;
            renc.matrix = ren_matrix;
            renc.noise_model = ren_noise;
            renc.out_dir = ren_out;
            cmd_render(renc);
        }
    } catch (const ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
