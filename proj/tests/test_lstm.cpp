#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "greenmesh/errors.hpp"
#include "greenmesh/lstm.hpp"
#include "greenmesh/rng.hpp"

using namespace greenmesh;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Scalar re-implementation of the recurrence, element by element: gate rows
// stacked [input, forget, output, candidate].
double forward_oracle(const LstmWeights& w, const std::vector<double>& window) {
    const int H = w.hidden;
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (double x : window) {
        std::vector<double> z(4 * H, 0.0);
        for (int r = 0; r < 4 * H; ++r) {
            z[r] = w.wx(r) * x + w.b(r);
            for (int j = 0; j < H; ++j) z[r] += w.wh(r, j) * h[j];
        }
        std::vector<double> hn(H), cn(H);
        for (int j = 0; j < H; ++j) {
            const double gi = sigmoid(z[j]);
            const double gf = sigmoid(z[H + j]);
            const double go = sigmoid(z[2 * H + j]);
            const double gg = std::tanh(z[3 * H + j]);
            cn[j] = gf * c[j] + gi * gg;
            hn[j] = go * std::tanh(cn[j]);
        }
        h = hn;
        c = cn;
    }
    double y = w.by;
    for (int j = 0; j < H; ++j) y += w.wy(j) * h[j];
    return y;
}

std::vector<std::pair<std::vector<double>, double>> toy_batch(Rng& rng, int n,
                                                              int window) {
    std::vector<std::pair<std::vector<double>, double>> batch;
    for (int i = 0; i < n; ++i) {
        std::vector<double> w(window);
        for (double& v : w) v = rng.uniform01();
        batch.emplace_back(std::move(w), rng.uniform01());
    }
    return batch;
}

double batch_mse(const LstmWeights& w,
                 const std::vector<std::pair<std::vector<double>, double>>& batch) {
    double sum = 0.0;
    for (const auto& [win, target] : batch) {
        const double r = lstm_forward(w, win) - target;
        sum += r * r;
    }
    return sum / batch.size();
}

TimeSeries sine_series(int n, double noise, Rng& rng) {
    TimeSeries ts;
    ts.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v = 0.5 + 0.4 * std::sin(2.0 * M_PI * i / 48.0) + noise * rng.gauss();
        ts.values[i] = std::min(1.0, std::max(0.0, v));
    }
    return ts;
}

} // namespace

TEST_CASE("forward pass matches a scalar recurrence oracle") {
    Rng rng(5);
    const LstmWeights w = LstmWeights::init(3, rng);
    Rng data(6);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> window(8);
        for (double& v : window) v = data.uniform01();
        CHECK(lstm_forward(w, window) ==
              doctest::Approx(forward_oracle(w, window)).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(11);
    LstmWeights w = LstmWeights::init(3, rng);
    Rng data(12);
    const auto batch = toy_batch(data, 3, 6);
    const LstmGradients g = bptt_gradients(w, batch);
    const double eps = 1e-5;
    double worst = 0.0;
    auto probe = [&](double* p, double analytic) {
        const double keep = *p;
        *p = keep + eps;
        const double up = batch_mse(w, batch);
        *p = keep - eps;
        const double dn = batch_mse(w, batch);
        *p = keep;
        const double numeric = (up - dn) / (2.0 * eps);
        const double rel = std::abs(numeric - analytic) /
                           std::max(1e-8, std::max(std::abs(numeric), std::abs(analytic)));
        worst = std::max(worst, rel);
    };
    for (int r = 0; r < w.wx.size(); ++r) probe(&w.wx(r), g.wx(r));
    for (int r = 0; r < w.wh.rows(); ++r)
        for (int c = 0; c < w.wh.cols(); ++c) probe(&w.wh(r, c), g.wh(r, c));
    for (int r = 0; r < w.b.size(); ++r) probe(&w.b(r), g.b(r));
    for (int r = 0; r < w.wy.size(); ++r) probe(&w.wy(r), g.wy(r));
    probe(&w.by, g.by);
    CHECK(worst < 1e-4);
    CHECK(g.mse == doctest::Approx(batch_mse(w, batch)).epsilon(1e-12));
}

TEST_CASE("training is deterministic per seed") {
    Rng rng(3);
    const TimeSeries ts = sine_series(240, 0.01, rng);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.window_len = 12;
    const TrainResult a = train(ts, cfg);
    const TrainResult b = train(ts, cfg);
    CHECK(a.test_rmse == b.test_rmse);
    CHECK(a.epoch_loss == b.epoch_loss);
    CHECK((a.weights.wx - b.weights.wx).norm() == 0.0);
    CHECK((a.weights.wh - b.weights.wh).norm() == 0.0);
}

TEST_CASE("training loss trends downward") {
    Rng rng(8);
    const TimeSeries ts = sine_series(360, 0.0, rng);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.window_len = 12;
    cfg.learning_rate = 0.05;
    const TrainResult res = train(ts, cfg);
    REQUIRE(res.epoch_loss.size() == 10);
    CHECK(res.epoch_loss.back() < res.epoch_loss.front());
    // Strict monotonicity is not guaranteed by SGD; allow small upticks only.
    for (std::size_t e = 1; e < res.epoch_loss.size(); ++e)
        CHECK(res.epoch_loss[e] < res.epoch_loss[e - 1] * 1.05 + 1e-9);
}

TEST_CASE("trained forecaster beats persistence on a noiseless sinusoid") {
    Rng rng(2);
    const TimeSeries ts = sine_series(14 * 48, 0.0, rng);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.window_len = 24;
    cfg.learning_rate = 0.1;
    const TrainResult res = train(ts, cfg);
    const double naive = persistence_rmse(ts, cfg);
    CHECK(res.test_rmse < naive);
}

TEST_CASE("training rejects unnormalized or too-short input") {
    TimeSeries bad;
    bad.values.assign(300, 2.5);
    CHECK_THROWS_AS(train(bad, TrainConfig{}), ValidationError);
    TimeSeries tiny;
    tiny.values.assign(10, 0.5);
    TrainConfig cfg;
    cfg.window_len = 48;
    CHECK_THROWS_AS(train(tiny, cfg), ConfigError);
}

TEST_CASE("multi-step forecasts stay in the unit interval") {
    Rng rng(14);
    const LstmWeights w = LstmWeights::init(4, rng, 2.0); // deliberately wild
    std::vector<double> hist(16, 0.9);
    const ForecastResult fc = predict_horizon(w, hist, 5);
    REQUIRE(fc.predictions.size() == 5);
    for (double p : fc.predictions) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("one-step horizon equals the plain forward pass when in range") {
    Rng rng(15);
    const LstmWeights w = LstmWeights::init(5, rng);
    Rng data(16);
    std::vector<double> hist(12);
    for (double& v : hist) v = data.uniform01();
    const double direct = lstm_forward(w, hist);
    const ForecastResult fc = predict_horizon(w, hist, 1);
    const double clamped = std::min(1.0, std::max(0.0, direct));
    CHECK(fc.predictions[0] == doctest::Approx(clamped).epsilon(1e-15));
}

TEST_CASE("weights round trip through the text format exactly") {
    Rng rng(21);
    const LstmWeights w = LstmWeights::init(6, rng);
    std::ostringstream out;
    save_weights(out, w);
    std::istringstream in(out.str());
    const LstmWeights back = load_weights(in);
    CHECK(back.hidden == w.hidden);
    CHECK((back.wx - w.wx).norm() == 0.0);
    CHECK((back.wh - w.wh).norm() == 0.0);
    CHECK((back.b - w.b).norm() == 0.0);
    CHECK((back.wy - w.wy).norm() == 0.0);
    CHECK(back.by == w.by);
}

TEST_CASE("weight loading rejects malformed input") {
    std::istringstream junk("not a weights file\n");
    CHECK_THROWS_AS(load_weights(junk), ParseError);
    std::istringstream truncated("hidden 4\nwx 1 2\n");
    CHECK_THROWS_AS(load_weights(truncated), ParseError);
}

TEST_CASE("rmse is the root mean squared difference") {
    CHECK(rmse({1.0, 2.0}, {1.0, 4.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(rmse({0.5}, {0.5}) == 0.0);
}
