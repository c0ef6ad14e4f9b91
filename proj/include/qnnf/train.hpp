#ifndef QNNF_TRAIN_HPP
#define QNNF_TRAIN_HPP

#include "qnnf/circuit.hpp"
#include "qnnf/data.hpp"
#include "qnnf/errors.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qnnf::train {

enum class GradMethod { FiniteDiff, ParamShift };

struct TrainConfig {
    double learning_rate = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int epochs = 0;  // 0 picks the per-model default
    int batch_size = 32;
    std::uint64_t seed = 0;
    int cutoff = fock::kDefaultCutoff;
    std::vector<double> lr_thresholds{0.002, 0.0016};
    double lr_factor = 0.5;
    GradMethod grad_method = GradMethod::FiniteDiff;
    double fd_step = 1e-4;
    std::optional<int> early_stop_patience;
    double init_range = 0.05;  // parameters start uniform in [-init_range, init_range]

    void validate() const;
    std::string digest() const;  // short fingerprint stored in weights files
};

// cv1 20, cv2 50, cv3 100; 50 otherwise.
int default_epochs(const model::CircuitSpec& spec);

// Mean squared error over equal-length prediction/label lists.
double square_loss(std::span<const double> predictions, std::span<const double> labels);

// Batch MSE of the circuit on a dataset (compensated summation, so the
// result does not depend on how a parallel caller would chunk it).
double batch_loss(const model::CircuitSpec& spec, std::span<const double> params,
                  const data::WindowedDataset& batch);

// d(batch MSE)/d(params). FiniteDiff: central differences on the loss.
// ParamShift: exact +-pi/2 shifts of the circuit output pushed through the
// squared-loss chain rule; only valid when every trainable parameter drives
// exactly one single-qubit rotation.
std::vector<double> gradient(const model::CircuitSpec& spec, std::span<const double> params,
                             const data::WindowedDataset& batch, GradMethod method,
                             double fd_step = 1e-4);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::int64_t step_count = 0;
    double current_lr = 0.005;

    static AdamState init(std::size_t n_params, double lr);
};

// One bias-corrected Adam update; returns the new parameters.
// Throws TrainingError naming the offending slot on non-finite gradients.
std::vector<double> adam_step(AdamState& state, std::span<const double> params,
                              std::span<const double> grads, const TrainConfig& config,
                              std::span<const std::string> slot_names = {});

// Progressive reduction: each threshold fires once, when the epoch cost first
// drops below it; the learning rate is multiplied by lr_factor per firing.
class LrScheduler {
public:
    LrScheduler(std::vector<double> thresholds, double factor);
    double step(double epoch_cost, double current_lr);
    std::size_t consumed() const { return next_; }

private:
    std::vector<double> thresholds_;
    double factor_;
    std::size_t next_ = 0;
};

struct TrainHistory {
    std::vector<double> epoch_cost;  // full-training-set cost after each epoch
    std::vector<double> epoch_lr;    // learning rate in effect after the epoch
    std::vector<double> final_params;
    bool stopped_early = false;
};

struct TrainingError : Error {
    TrainHistory history;
    TrainingError(const std::string& msg, TrainHistory h = {})
        : Error(msg), history(std::move(h)) {}
};

// Seeded uniform init, per-epoch reshuffled mini-batches, Adam updates,
// progressive learning-rate reduction, optional early stopping. Fully
// deterministic given (seed, config, dataset).
std::pair<model::ParamVector, TrainHistory> train(const model::CircuitSpec& spec,
                                                  const data::WindowedDataset& dataset,
                                                  const TrainConfig& config);

// CSV rows (epoch, cost, lr) for cost-vs-epoch plots.
std::string history_csv(const TrainHistory& history);

}  // namespace qnnf::train

#endif
