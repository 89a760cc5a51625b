#include "doctest.h"
#include "muxillum/error.hpp"
#include "muxillum/relight.hpp"
#include "../oracles.hpp"

using namespace muxillum;

namespace {

const CameraSettings kCapture{15.0, 30.0};

RelightableModel ramp_model(int side = 8, int n = 3) {
    Eigen::MatrixXd L(side * side, n);
    for (int p = 0; p < side * side; ++p) {
        for (int i = 0; i < n; ++i) L(p, i) = 3.0 * p + 17.0 * i + 1.0;
    }
    return RelightableModel(side, side, L, "r", 0, kCapture);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) out(k++) = x;
    return out;
}

}  // namespace

TEST_CASE("render_clean one-hot, zero and superposition") {
    const auto m = ramp_model();
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e(i) = 1.0;
        CHECK(render_clean(m, {e}, kCapture) == m.illuminant_image(i));
    }
    for (double p : render_clean(m, {Eigen::VectorXd::Zero(3)}, kCapture).pixels) CHECK(p == 0.0);
    const Image sum = render_clean(m, {vec({1, 1, 0})}, kCapture);
    CHECK(oracle::mean_abs_diff(sum, oracle::combine(m, vec({1, 1, 0}))) < 1e-12);
}

TEST_CASE("render_clean is linear in w") {
    const auto m = ramp_model();
    const Eigen::VectorXd w1 = vec({0.2, 0.5, 0.1});
    const Eigen::VectorXd w2 = vec({0.6, 0.1, 0.9});
    const Image a = render_clean(m, {w1}, {6.0, 84.0});
    const Image b = render_clean(m, {w2}, {6.0, 84.0});
    const Image c = render_clean(m, {0.5 * w1 + 0.25 * w2}, {6.0, 84.0});
    for (std::size_t p = 0; p < c.size(); ++p) CHECK(c.pixels[p] == doctest::Approx(0.5 * a.pixels[p] + 0.25 * b.pixels[p]));
}

TEST_CASE("render scale follows exposure and squared amplitude gain") {
    CHECK(render_scale(kCapture, kCapture) == 1.0);
    CHECK(render_scale(kCapture, {15.0, 60.0}) == doctest::Approx(2.0));
    CHECK(render_scale(kCapture, {25.0, 30.0}) == doctest::Approx(10.0));
    const auto m = ramp_model();
    const Image a = render_clean(m, {vec({1, 0, 0})}, {25.0, 15.0});
    CHECK(a.pixels[5] == doctest::Approx(5.0 * m.intensities()(5, 0)));
}

TEST_CASE("render dimension and range errors") {
    const auto m = ramp_model();
    CHECK_THROWS_AS(render_clean(m, {vec({1, 0})}, kCapture), ParameterError);
    CHECK_THROWS_AS(render_clean(m, {vec({1, 0, 1.5})}, kCapture), ParameterError);
    CHECK_THROWS_AS(render_clean(m, {vec({-0.1, 0, 1})}, kCapture), ParameterError);
}

TEST_CASE("render_noisy without noise rounds the clean image") {
    const auto m = ramp_model();
    const Eigen::VectorXd w = vec({0.3, 0.7, 0.2});
    const auto r = render_noisy(m, {w}, kCapture, NoiseModel{0.0, 0.0, kCapture}, 3);
    const Image clean = render_clean(m, {w}, kCapture);
    for (std::size_t p = 0; p < clean.size(); ++p) {
        CHECK(r.pixels.pixels[p] == std::round(std::clamp(clean.pixels[p], 0.0, 255.0)));
    }
    CHECK(r.seed == 3);
}

TEST_CASE("render_noisy is pure and seeds differ") {
    const RelightableModel flat(64, 64, Eigen::MatrixXd::Constant(64 * 64, 1, 100.0), "f", 0, kCapture);
    const NoiseModel n{0.7, 66.0, kCapture};
    const auto a = render_noisy(flat, {vec({1})}, kCapture, n, 1);
    const auto b = render_noisy(flat, {vec({1})}, kCapture, n, 1);
    const auto c = render_noisy(flat, {vec({1})}, kCapture, n, 2);
    CHECK(a.pixels == b.pixels);
    CHECK_FALSE(a.pixels == c.pixels);
    double ma = 0.0;
    double mc = 0.0;
    for (std::size_t p = 0; p < a.pixels.size(); ++p) {
        ma += a.pixels.pixels[p];
        mc += c.pixels.pixels[p];
    }
    const double se = std::sqrt(136.0 / a.pixels.size());
    CHECK(std::abs(ma / a.pixels.size() - 100.0) < 4 * se);
    CHECK(std::abs(mc / c.pixels.size() - 100.0) < 4 * se);
}

TEST_CASE("render_noisy stack matches the generalized variance") {
    const CameraSettings s3{17.5, 22.5};
    const NoiseModel eq7{0.7, 66.0, kCapture};
    const NoiseModel target = generalize(eq7, s3);
    const double scale = render_scale(kCapture, s3);
    const RelightableModel flat(32, 32, Eigen::MatrixXd::Constant(32 * 32, 1, 100.0 / scale), "f", 0, kCapture);
    std::vector<Image> stack;
    for (int f = 0; f < 120; ++f) stack.push_back(render_noisy(flat, {vec({1})}, s3, eq7, 500 + f).pixels);
    double var = 0.0;
    for (const auto& o : characterize_stack(stack, 255.0)) var += o.variance;
    var /= 32 * 32;
    const double want = target.sigma_p2 * 100.0 + target.sigma_r2 + 1.0 / 12.0;
    CHECK(std::abs(var / want - 1.0) <= 0.05);
}

TEST_CASE("select_gain") {
    Dataset ds;
    ds.classes = {"r"};
    ds.models.push_back(ramp_model());
    const double peak = ds.models[0].intensities().maxCoeff();  // illuminant 2
    const IlluminationMatrix id = IlluminationMatrix::identity(3);

    // exposure chosen so the brightest pixel sits exactly on target at the capture gain
    const double exposure = kCapture.exposure_ms * 0.9 * 255.0 / peak;
    CHECK(select_gain(ds, id, exposure, 0.9, {0.0, 24.0}) == doctest::Approx(kCapture.gain_db));

    // doubling exposure halves the needed intensity factor: 10 log10(2) dB lower
    const double g1 = select_gain(ds, id, 10.0, 0.9, {-40.0, 40.0});
    const double g2 = select_gain(ds, id, 20.0, 0.9, {-40.0, 40.0});
    CHECK(g1 - g2 == doctest::Approx(10.0 * std::log10(2.0)));

    // brute-force scan agrees
    double best = 0.0;
    for (double g = -40.0; g <= 40.0; g += 1e-3) {
        const double top = peak * render_scale(kCapture, {g, 10.0});
        if (top <= 0.9 * 255.0) best = g;
    }
    CHECK(g1 == doctest::Approx(best).epsilon(1e-4));

    // bounds clamp
    CHECK(select_gain(ds, id, 10.0, 0.9, {0.0, 1.0}) <= 1.0);
}

TEST_CASE("select_gain uses the brightest column") {
    Dataset ds;
    ds.classes = {"r"};
    ds.models.push_back(ramp_model());
    Eigen::MatrixXd two(3, 2);
    two << 1, 0, 0, 0, 0, 1;
    Eigen::MatrixXd only(3, 1);
    only << 0, 0, 1;
    CHECK(select_gain(ds, IlluminationMatrix(two, true), 10.0, 0.9, {-40, 40}) ==
          select_gain(ds, IlluminationMatrix(only, true), 10.0, 0.9, {-40, 40}));

    // brighter scenes never need more gain
    Dataset bright = ds;
    bright.models[0] = RelightableModel(8, 8, ds.models[0].intensities() * 2.0, "r", 0, kCapture);
    CHECK(select_gain(bright, IlluminationMatrix(two, true), 10.0, 0.9, {-40, 40}) <=
          select_gain(ds, IlluminationMatrix(two, true), 10.0, 0.9, {-40, 40}));
}

TEST_CASE("select_gain on a dark dataset") {
    Dataset ds;
    ds.classes = {"d"};
    ds.models.push_back(RelightableModel(2, 2, Eigen::MatrixXd::Zero(4, 2), "d", 0, kCapture));
    CHECK_THROWS_AS(select_gain(ds, IlluminationMatrix::identity(2), 10.0, 0.9, {}), NumericalError);
}
