#include "muxillum/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "muxillum/error.hpp"

namespace muxillum {

namespace {

std::vector<double> standardize(const FeatureVector& f, const ClassifierModel& model) {
    if (!(f.layout == model.layout) || f.values.size() != model.mean.size()) {
        throw ParameterError("feature layout does not match the classifier");
    }
    std::vector<double> out(f.values.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = (f.values[d] - model.mean[d]) / model.scale[d];
    return out;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

Hyperplane solve_pair(const std::vector<double>& x, std::size_t dim, const std::vector<std::size_t>& rows,
                      const std::vector<double>& y, const SvmParams& params, Seed seed, int a, int b) {
    const std::size_t n = rows.size();
    std::vector<double> w(dim, 0.0);
    double wb = 0.0;  // bias weight; the bias feature is the constant 1
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = &x[rows[i] * dim];
        qd[i] = dot(xi, xi, dim) + 1.0;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        std::shuffle(order.begin(), order.end(), rng);
        double pg_max = -1e300;
        double pg_min = 1e300;
        for (std::size_t k : order) {
            const double* xi = &x[rows[k] * dim];
            const double g = y[k] * (dot(w.data(), xi, dim) + wb) - 1.0;
            double pg = g;
            if (alpha[k] == 0.0) {
                pg = std::min(g, 0.0);
            } else if (alpha[k] == params.c_reg) {
                pg = std::max(g, 0.0);
            }
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (std::abs(pg) > 1e-12) {
                const double old = alpha[k];
                alpha[k] = std::clamp(old - g / qd[k], 0.0, params.c_reg);
                const double delta = (alpha[k] - old) * y[k];
                if (delta != 0.0) {
                    for (std::size_t d = 0; d < dim; ++d) w[d] += delta * xi[d];
                    wb += delta;
                }
            }
        }
        if (pg_max - pg_min <= params.tolerance) break;
    }
    return Hyperplane{a, b, std::move(w), wb};
}

// --- binary container helpers (little-endian) ---

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_i32(std::ostream& out, int v) { put_u32(out, static_cast<std::uint32_t>(v)); }

struct Reader {
    std::istream& in;
    std::string file;

    void raw(unsigned char* dst, std::size_t n) {
        in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(file, "truncated classifier container");
    }
    std::uint32_t u32() {
        unsigned char b[4];
        raw(b, 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    std::uint64_t u64() {
        unsigned char b[8];
        raw(b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    int i32() { return static_cast<int>(u32()); }
    std::vector<double> doubles(std::size_t n) {
        std::vector<double> v(n);
        for (auto& d : v) d = f64();
        return v;
    }
};

constexpr char kMagic[8] = {'M', 'X', 'C', 'L', 'S', 'V', 'M', '\0'};
constexpr std::uint32_t kContainerVersion = 1;

}  // namespace

ClassifierModel train(std::span<const LabeledSample> samples, const SvmParams& params, Seed seed,
                      std::vector<std::string> class_names) {
    if (samples.empty()) throw ParameterError("cannot train on zero samples");
    if (!(params.c_reg > 0.0) || !(params.tolerance > 0.0) || params.max_iterations < 1) {
        throw ParameterError("invalid SVM parameters");
    }
    std::set<int> labels;
    for (const auto& s : samples) labels.insert(s.label);
    if (labels.size() < 2) throw ParameterError("training needs at least two classes");

    ClassifierModel model;
    model.class_names = std::move(class_names);
    model.class_ids.assign(labels.begin(), labels.end());
    model.layout = samples.front().features.layout;
    model.params = params;
    model.seed = seed;
    const std::size_t dim = samples.front().features.values.size();
    if (dim != model.layout.length()) throw ParameterError("feature vector length disagrees with its layout");
    for (const auto& s : samples) {
        if (!(s.features.layout == model.layout) || s.features.values.size() != dim) {
            throw ParameterError("training samples have mixed feature layouts");
        }
    }

    const double n = static_cast<double>(samples.size());
    model.mean.assign(dim, 0.0);
    model.scale.assign(dim, 0.0);
    for (const auto& s : samples) {
        for (std::size_t d = 0; d < dim; ++d) model.mean[d] += s.features.values[d];
    }
    for (auto& m : model.mean) m /= n;
    for (const auto& s : samples) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double c = s.features.values[d] - model.mean[d];
            model.scale[d] += c * c;
        }
    }
    for (auto& sc : model.scale) {
        sc = std::sqrt(sc / n);
        if (!(sc > 1e-12)) sc = 1.0;
    }

    std::vector<double> x(samples.size() * dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto z = standardize(samples[i].features, model);
        std::copy(z.begin(), z.end(), x.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }

    for (std::size_t ia = 0; ia < model.class_ids.size(); ++ia) {
        for (std::size_t ib = ia + 1; ib < model.class_ids.size(); ++ib) {
            const int a = model.class_ids[ia];
            const int b = model.class_ids[ib];
            std::vector<std::size_t> rows;
            std::vector<double> y;
            for (std::size_t i = 0; i < samples.size(); ++i) {
                if (samples[i].label == a || samples[i].label == b) {
                    rows.push_back(i);
                    y.push_back(samples[i].label == a ? 1.0 : -1.0);
                }
            }
            const Seed pair_seed = derive_seed(seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)});
            model.planes.push_back(solve_pair(x, dim, rows, y, params, pair_seed, a, b));
        }
    }
    return model;
}

Decision decide(const ClassifierModel& model, const FeatureVector& features) {
    const std::vector<double> z = standardize(features, model);
    const std::size_t c = model.class_ids.size();
    Decision d;
    d.votes.assign(c, 0);
    d.margin_sums.assign(c, 0.0);
    auto slot = [&](int label) {
        return static_cast<std::size_t>(std::find(model.class_ids.begin(), model.class_ids.end(), label) -
                                        model.class_ids.begin());
    };
    for (const auto& p : model.planes) {
        const double f = dot(p.weights.data(), z.data(), z.size()) + p.bias;
        const std::size_t sa = slot(p.class_a);
        const std::size_t sb = slot(p.class_b);
        if (f > 0.0) {
            ++d.votes[sa];
        } else {
            ++d.votes[sb];
        }
        d.margin_sums[sa] += f;
        d.margin_sums[sb] -= f;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < c; ++k) {
        if (d.votes[k] > d.votes[best] || (d.votes[k] == d.votes[best] && d.margin_sums[k] > d.margin_sums[best])) {
            best = k;
        }
    }
    d.label = model.class_ids[best];
    return d;
}

int predict(const ClassifierModel& model, const FeatureVector& features) { return decide(model, features).label; }

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kContainerVersion);
    put_i32(out, model.layout.images);
    put_i32(out, model.layout.cells_x);
    put_i32(out, model.layout.cells_y);
    put_i32(out, model.layout.block);
    put_i32(out, model.layout.bins);
    put_u32(out, static_cast<std::uint32_t>(model.class_names.size()));
    for (const auto& name : model.class_names) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    put_u32(out, static_cast<std::uint32_t>(model.class_ids.size()));
    for (int id : model.class_ids) put_i32(out, id);
    put_u64(out, model.mean.size());
    for (double v : model.mean) put_f64(out, v);
    for (double v : model.scale) put_f64(out, v);
    put_f64(out, model.params.c_reg);
    put_f64(out, model.params.tolerance);
    put_i32(out, model.params.max_iterations);
    put_u64(out, model.seed);
    put_u32(out, static_cast<std::uint32_t>(model.planes.size()));
    for (const auto& p : model.planes) {
        put_i32(out, p.class_a);
        put_i32(out, p.class_b);
        for (double v : p.weights) put_f64(out, v);
        put_f64(out, p.bias);
    }
    if (!out) throw IoError("short write to " + path.string());
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Reader r{in, path.string()};
    unsigned char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0) throw FormatError(r.file, "not a classifier container");
    const std::uint32_t version = r.u32();
    if (version != kContainerVersion) {
        throw FormatError(r.file, "unsupported classifier container version " + std::to_string(version));
    }
    ClassifierModel m;
    m.layout.images = r.i32();
    m.layout.cells_x = r.i32();
    m.layout.cells_y = r.i32();
    m.layout.block = r.i32();
    m.layout.bins = r.i32();
    const std::uint32_t names = r.u32();
    for (std::uint32_t i = 0; i < names; ++i) {
        const std::uint32_t len = r.u32();
        std::string s(len, '\0');
        r.raw(reinterpret_cast<unsigned char*>(s.data()), len);
        m.class_names.push_back(std::move(s));
    }
    const std::uint32_t ids = r.u32();
    for (std::uint32_t i = 0; i < ids; ++i) m.class_ids.push_back(r.i32());
    const std::uint64_t dim = r.u64();
    if (dim != m.layout.length()) throw FormatError(r.file, "embedded layout disagrees with weight dimension");
    m.mean = r.doubles(dim);
    m.scale = r.doubles(dim);
    m.params.c_reg = r.f64();
    m.params.tolerance = r.f64();
    m.params.max_iterations = r.i32();
    m.seed = r.u64();
    const std::uint32_t planes = r.u32();
    if (planes != ids * (ids - 1) / 2) throw FormatError(r.file, "hyperplane count does not match class count");
    for (std::uint32_t i = 0; i < planes; ++i) {
        Hyperplane p;
        p.class_a = r.i32();
        p.class_b = r.i32();
        p.weights = r.doubles(dim);
        p.bias = r.f64();
        m.planes.push_back(std::move(p));
    }
    return m;
}

}  // namespace muxillum
