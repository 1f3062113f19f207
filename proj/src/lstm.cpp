#include "greenmesh/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"

namespace greenmesh {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

} // namespace

LstmWeights LstmWeights::init(int hidden, Rng& rng, double scale) {
    if (hidden < 1) throw ValidationError("lstm: hidden size must be >= 1");
    LstmWeights w;
    w.hidden = hidden;
    w.wx.resize(4 * hidden);
    w.wh.resize(4 * hidden, hidden);
    w.b.resize(4 * hidden);
    w.wy.resize(hidden);
    for (int i = 0; i < 4 * hidden; ++i) w.wx(i) = rng.uniform(-scale, scale);
    for (int i = 0; i < 4 * hidden; ++i)
        for (int j = 0; j < hidden; ++j) w.wh(i, j) = rng.uniform(-scale, scale);
    for (int i = 0; i < 4 * hidden; ++i) w.b(i) = rng.uniform(-scale, scale);
    for (int j = 0; j < hidden; ++j) w.wy(j) = rng.uniform(-scale, scale);
    w.by = rng.uniform(-scale, scale);
    return w;
}

void LstmWeights::validate() const {
    const int h = hidden;
    if (h < 1) throw ValidationError("lstm: hidden size must be >= 1");
    if (wx.size() != 4 * h || wh.rows() != 4 * h || wh.cols() != h ||
        b.size() != 4 * h || wy.size() != h)
        throw ValidationError("lstm: inconsistent weight dimensions");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!wx.allFinite() || !wh.allFinite() || !b.allFinite() || !wy.allFinite() ||
        !finite(by))
        throw ValidationError("lstm: non-finite parameter");
}

double lstm_forward(const LstmWeights& w, const std::vector<double>& window,
                    LstmCache* cache) {
    if (window.empty()) throw ValidationError("lstm_forward: empty window");
    const int H = w.hidden;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd z(4 * H);
    if (cache) {
        cache->gi.clear(); cache->gf.clear(); cache->go.clear(); cache->gg.clear();
        cache->c.clear(); cache->h.clear();
        cache->x = window;
    }
    for (double x : window) {
        z.noalias() = w.wh * h;
        z += w.wx * x + w.b;
        Eigen::VectorXd gi(H), gf(H), go(H), gg(H);
        for (int j = 0; j < H; ++j) {
            gi(j) = sigmoid(z(j));
            gf(j) = sigmoid(z(H + j));
            go(j) = sigmoid(z(2 * H + j));
            gg(j) = std::tanh(z(3 * H + j));
        }
        c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
        for (int j = 0; j < H; ++j) h(j) = go(j) * std::tanh(c(j));
        if (cache) {
            cache->gi.push_back(gi);
            cache->gf.push_back(gf);
            cache->go.push_back(go);
            cache->gg.push_back(gg);
            cache->c.push_back(c);
            cache->h.push_back(h);
        }
    }
    return w.wy.dot(h) + w.by;
}

LstmGradients bptt_gradients(const LstmWeights& w,
                             const std::vector<std::pair<std::vector<double>, double>>& batch) {
    if (batch.empty()) throw ValidationError("bptt_gradients: empty batch");
    const int H = w.hidden;
    LstmGradients g;
    g.wx = Eigen::VectorXd::Zero(4 * H);
    g.wh = Eigen::MatrixXd::Zero(4 * H, H);
    g.b = Eigen::VectorXd::Zero(4 * H);
    g.wy = Eigen::VectorXd::Zero(H);
    g.by = 0.0;
    const double bsz = static_cast<double>(batch.size());

    LstmCache cache;
    for (const auto& [window, target] : batch) {
        const double y = lstm_forward(w, window, &cache);
        const double resid = y - target;
        g.mse += resid * resid / bsz;
        const double dy = 2.0 * resid / bsz;
        const int T = static_cast<int>(window.size());

        g.wy += dy * cache.h[T - 1];
        g.by += dy;

        Eigen::VectorXd dh = dy * w.wy;
        Eigen::VectorXd dc = Eigen::VectorXd::Zero(H);
        Eigen::VectorXd dz(4 * H);
        for (int t = T - 1; t >= 0; --t) {
            const auto& gi = cache.gi[t];
            const auto& gf = cache.gf[t];
            const auto& go = cache.go[t];
            const auto& gg = cache.gg[t];
            const auto& c = cache.c[t];
            for (int j = 0; j < H; ++j) {
                const double tc = std::tanh(c(j));
                dc(j) += dh(j) * go(j) * (1.0 - tc * tc);
                const double dzo = dh(j) * tc * go(j) * (1.0 - go(j));
                const double dzi = dc(j) * gg(j) * gi(j) * (1.0 - gi(j));
                const double dzg = dc(j) * gi(j) * (1.0 - gg(j) * gg(j));
                const double cprev = t > 0 ? cache.c[t - 1](j) : 0.0;
                const double dzf = dc(j) * cprev * gf(j) * (1.0 - gf(j));
                dz(j) = dzi;
                dz(H + j) = dzf;
                dz(2 * H + j) = dzo;
                dz(3 * H + j) = dzg;
                dc(j) *= gf(j);
            }
            g.wx += dz * cache.x[t];
            g.b += dz;
            if (t > 0) {
                g.wh.noalias() += dz * cache.h[t - 1].transpose();
                dh.noalias() = w.wh.transpose() * dz;
            }
            // h_0 entering the first step is the zero vector, so its
            // recurrent contribution vanishes.
        }
    }
    return g;
}

namespace {

struct SampleView {
    // Sliding windows over ts.values: window k = [k, k+W), target k+W.
    const std::vector<double>* values;
    int window_len;
    int count; // number of (window, target) pairs

    std::vector<double> window(int k) const {
        return std::vector<double>(values->begin() + k, values->begin() + k + window_len);
    }
    double target(int k) const { return (*values)[k + window_len]; }
};

SampleView make_samples(const TimeSeries& ts, const TrainConfig& cfg) {
    if (cfg.window_len < 1 || cfg.batch_size < 1 || cfg.epochs < 1)
        throw ValidationError("train config: epochs, batch_size, window_len must be >= 1");
    if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0)
        throw ValidationError("train config: train_fraction must be in (0,1)");
    const int n = static_cast<int>(ts.values.size());
    const int count = n - cfg.window_len;
    if (count < 2)
        throw ConfigError("series too short: need length > window_len + 1");
    return {&ts.values, cfg.window_len, count};
}

void check_normalized(const TimeSeries& ts) {
    for (double v : ts.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("train: series must be normalized to [0,1]");
}

} // namespace

TrainResult train(const TimeSeries& ts, const TrainConfig& cfg) {
    check_normalized(ts);
    const SampleView samples = make_samples(ts, cfg);
    int n_train = static_cast<int>(cfg.train_fraction * samples.count);
    n_train = std::max(1, std::min(n_train, samples.count - 1));

    Rng rng(cfg.seed);
    TrainResult res;
    res.weights = LstmWeights::init(40, rng);
    // Hidden size is fixed by the architecture default; window/epochs/batch
    // come from cfg.
    res.epoch_loss.reserve(cfg.epochs);

    std::vector<std::pair<std::vector<double>, double>> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        int batches = 0;
        for (int start = 0; start < n_train; start += cfg.batch_size) {
            const int end = std::min(start + cfg.batch_size, n_train);
            batch.clear();
            for (int k = start; k < end; ++k)
                batch.emplace_back(samples.window(k), samples.target(k));
            LstmGradients g = bptt_gradients(res.weights, batch);
            res.weights.wx -= cfg.learning_rate * g.wx;
            res.weights.wh -= cfg.learning_rate * g.wh;
            res.weights.b -= cfg.learning_rate * g.b;
            res.weights.wy -= cfg.learning_rate * g.wy;
            res.weights.by -= cfg.learning_rate * g.by;
            loss_sum += g.mse;
            ++batches;
        }
        res.epoch_loss.push_back(loss_sum / batches);
    }

    double se = 0.0;
    for (int k = n_train; k < samples.count; ++k) {
        const double y = lstm_forward(res.weights, samples.window(k));
        const double r = y - samples.target(k);
        se += r * r;
    }
    res.test_rmse = std::sqrt(se / (samples.count - n_train));
    return res;
}

ForecastResult predict_horizon(const LstmWeights& w,
                               const std::vector<double>& history, int t_steps) {
    if (t_steps < 1) throw ValidationError("predict_horizon: t_steps must be >= 1");
    if (history.empty()) throw ValidationError("predict_horizon: empty history");
    ForecastResult res;
    res.predictions.reserve(t_steps);
    std::vector<double> win = history;
    for (int p = 0; p < t_steps; ++p) {
        const double y = clamp01(lstm_forward(w, win));
        res.predictions.push_back(y);
        win.erase(win.begin());
        win.push_back(y);
    }
    return res;
}

double rmse(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size())
        throw ValidationError("rmse: length mismatch");
    if (pred.empty()) throw ValidationError("rmse: empty input");
    double se = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - truth[i];
        se += r * r;
    }
    return std::sqrt(se / pred.size());
}

double persistence_rmse(const TimeSeries& ts, const TrainConfig& cfg) {
    const SampleView samples = make_samples(ts, cfg);
    int n_train = static_cast<int>(cfg.train_fraction * samples.count);
    n_train = std::max(1, std::min(n_train, samples.count - 1));
    double se = 0.0;
    for (int k = n_train; k < samples.count; ++k) {
        const double y = ts.values[k + cfg.window_len - 1]; // carry last value
        const double r = y - samples.target(k);
        se += r * r;
    }
    return std::sqrt(se / (samples.count - n_train));
}

std::vector<double> multistep_rmse(const LstmWeights& w, const TimeSeries& ts,
                                   int t_steps, const TrainConfig& cfg) {
    const SampleView samples = make_samples(ts, cfg);
    int n_train = static_cast<int>(cfg.train_fraction * samples.count);
    n_train = std::max(1, std::min(n_train, samples.count - 1));
    std::vector<double> se(t_steps, 0.0);
    int anchors = 0;
    for (int k = n_train; k + t_steps - 1 < samples.count; ++k) {
        const ForecastResult f = predict_horizon(w, samples.window(k), t_steps);
        for (int p = 0; p < t_steps; ++p) {
            const double r = f.predictions[p] - ts.values[k + cfg.window_len + p];
            se[p] += r * r;
        }
        ++anchors;
    }
    if (anchors == 0) throw ConfigError("series too short for the requested horizon");
    std::vector<double> out(t_steps);
    for (int p = 0; p < t_steps; ++p) out[p] = std::sqrt(se[p] / anchors);
    return out;
}

namespace {

void put_tensor(std::ostream& out, const char* name,
                const double* data, long n) {
    out << name;
    char buf[32];
    for (long i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", data[i]);
        out << buf;
    }
    out << '\n';
}

std::vector<double> take_values(std::istringstream& line, const std::string& name,
                                long expect) {
    std::vector<double> vals;
    vals.reserve(expect);
    double v;
    while (line >> v) vals.push_back(v);
    if (static_cast<long>(vals.size()) != expect)
        throw ParseError("weights: tensor '" + name + "' has " +
                         std::to_string(vals.size()) + " values, expected " +
                         std::to_string(expect));
    return vals;
}

} // namespace

void save_weights(std::ostream& out, const LstmWeights& w) {
    w.validate();
    out << "hidden " << w.hidden << '\n';
    put_tensor(out, "wx", w.wx.data(), w.wx.size());
    // Row-major on disk regardless of in-memory layout.
    std::vector<double> whr;
    whr.reserve(static_cast<std::size_t>(w.wh.size()));
    for (long i = 0; i < w.wh.rows(); ++i)
        for (long j = 0; j < w.wh.cols(); ++j) whr.push_back(w.wh(i, j));
    put_tensor(out, "wh", whr.data(), static_cast<long>(whr.size()));
    put_tensor(out, "b", w.b.data(), w.b.size());
    put_tensor(out, "wy", w.wy.data(), w.wy.size());
    put_tensor(out, "by", &w.by, 1);
}

LstmWeights load_weights(std::istream& in) {
    LstmWeights w;
    std::string line, name;
    bool have_hidden = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        row >> name;
        if (name == "hidden") {
            if (!(row >> w.hidden)) throw ParseError("weights: bad hidden line");
            have_hidden = true;
            continue;
        }
        if (!have_hidden) throw ParseError("weights: 'hidden' must come first");
        const int h = w.hidden;
        if (name == "wx") {
            auto v = take_values(row, name, 4 * h);
            w.wx = Eigen::Map<Eigen::VectorXd>(v.data(), 4 * h);
        } else if (name == "wh") {
            auto v = take_values(row, name, 4L * h * h);
            w.wh.resize(4 * h, h);
            for (int i = 0; i < 4 * h; ++i)
                for (int j = 0; j < h; ++j) w.wh(i, j) = v[static_cast<std::size_t>(i) * h + j];
        } else if (name == "b") {
            auto v = take_values(row, name, 4 * h);
            w.b = Eigen::Map<Eigen::VectorXd>(v.data(), 4 * h);
        } else if (name == "wy") {
            auto v = take_values(row, name, h);
            w.wy = Eigen::Map<Eigen::VectorXd>(v.data(), h);
        } else if (name == "by") {
            auto v = take_values(row, name, 1);
            w.by = v[0];
        } else {
            throw ParseError("weights: unknown tensor '" + name + "'");
        }
    }
    w.validate();
    return w;
}

} // namespace greenmesh
