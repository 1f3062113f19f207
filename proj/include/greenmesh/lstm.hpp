#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "greenmesh/timeseries.hpp"

namespace greenmesh {

class Rng;

// Single-layer LSTM with scalar input and a scalar affine readout from the
// final hidden state. Gate blocks are stacked rows in order
// [input, forget, output, candidate], each hidden-sized.
struct LstmWeights {
    int hidden = 40;
    Eigen::VectorXd wx; // 4H, input weights (input size 1)
    Eigen::MatrixXd wh; // 4H x H, recurrent weights
    Eigen::VectorXd b;  // 4H, gate biases
    Eigen::VectorXd wy; // H, readout weights
    double by = 0.0;

    static LstmWeights init(int hidden, Rng& rng, double scale = 0.1);
    void validate() const;
};

struct LstmCache {
    // Per-step activations, each hidden-sized; inputs as given.
    std::vector<Eigen::VectorXd> gi, gf, go, gg, c, h;
    std::vector<double> x;
};

struct LstmGradients {
    Eigen::VectorXd wx;
    Eigen::MatrixXd wh;
    Eigen::VectorXd b;
    Eigen::VectorXd wy;
    double by = 0.0;
    double mse = 0.0; // batch loss at the evaluated point
};

struct TrainConfig {
    int epochs = 80;
    int batch_size = 4;
    double train_fraction = 0.7;
    int window_len = 48;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
};

struct ForecastResult {
    std::vector<double> predictions;
    std::vector<double> per_step_rmse; // empty when no truth was supplied
};

struct TrainResult {
    LstmWeights weights;
    double test_rmse = 0.0;
    std::vector<double> epoch_loss; // mean training MSE per epoch
};

// One forward pass over the window; returns the next-sample prediction.
// Pass a cache to keep activations for backpropagation.
double lstm_forward(const LstmWeights& w, const std::vector<double>& window,
                    LstmCache* cache = nullptr);

// Exact gradients of mean squared error over the batch, by backpropagation
// through time.
LstmGradients bptt_gradients(const LstmWeights& w,
                             const std::vector<std::pair<std::vector<double>, double>>& batch);

// Mini-batch gradient descent on sliding windows with a chronological
// train/test split; reports held-out one-step RMSE.
TrainResult train(const TimeSeries& ts, const TrainConfig& cfg);

// Recursive multi-step forecast; every step clamped to [0,1].
ForecastResult predict_horizon(const LstmWeights& w,
                               const std::vector<double>& history, int t_steps);

double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

// One-step RMSE of the predict-previous-value forecaster on the same test
// samples train() evaluates; the standard naive comparator.
double persistence_rmse(const TimeSeries& ts, const TrainConfig& cfg);

// Mean RMSE per forecast step over a series' test section: slide the window,
// predict t_steps ahead recursively, compare each step against truth.
std::vector<double> multistep_rmse(const LstmWeights& w, const TimeSeries& ts,
                                   int t_steps, const TrainConfig& cfg);

// Flat text format, one named tensor per line, full precision round-trip.
void save_weights(std::ostream& out, const LstmWeights& w);
LstmWeights load_weights(std::istream& in);

} // namespace greenmesh
