#include "qnnf/train.hpp"

#include "qnnf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace qnnf::train {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

double evaluate_sample(const model::CircuitSpec& spec, std::span<const double> params,
                       const std::vector<double>& features) {
    return model::evaluate(spec, params, features);
}

data::WindowedDataset gather(const data::WindowedDataset& ds,
                             std::span<const std::size_t> indices) {
    data::WindowedDataset out;
    out.feature_names = ds.feature_names;
    out.target_name = ds.target_name;
    out.inputs.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.inputs.push_back(ds.inputs[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    require(learning_rate > 0.0, "learning rate must be positive");
    require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0,
            "Adam betas must lie in (0,1)");
    require(epsilon > 0.0, "Adam epsilon must be positive");
    require(epochs >= 0, "epochs must be >= 0");
    require(batch_size >= 1, "batch size must be >= 1");
    require(cutoff >= 2, "cutoff must be >= 2");
    require(fd_step > 0.0, "finite-difference step must be positive");
    require(lr_factor > 0.0 && lr_factor <= 1.0, "lr factor must lie in (0,1]");
    require(init_range >= 0.0, "init range must be >= 0");
    for (std::size_t i = 1; i < lr_thresholds.size(); ++i)
        require(lr_thresholds[i] < lr_thresholds[i - 1],
                "lr thresholds must be strictly descending");
    if (early_stop_patience) require(*early_stop_patience >= 1, "patience must be >= 1");
}

std::string TrainConfig::digest() const {
    std::ostringstream text;
    text.precision(17);
    text << learning_rate << "|" << beta1 << "|" << beta2 << "|" << epsilon << "|" << epochs
         << "|" << batch_size << "|" << seed << "|" << cutoff << "|" << lr_factor << "|"
         << fd_step << "|" << static_cast<int>(grad_method) << "|" << init_range << "|"
         << (early_stop_patience ? *early_stop_patience : -1);
    for (double t : lr_thresholds) text << "|" << t;
    // FNV-1a over the canonical text form
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int default_epochs(const model::CircuitSpec& spec) {
    if (spec.name == "cv1") return 20;
    if (spec.name == "cv2") return 50;
    if (spec.name == "cv3") return 100;
    return 50;
}

double square_loss(std::span<const double> predictions, std::span<const double> labels) {
    require(predictions.size() == labels.size(), "prediction/label length mismatch");
    require(!predictions.empty(), "empty prediction list");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double d = predictions[i] - labels[i];
        double term = d * d - comp;
        double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum / static_cast<double>(predictions.size());
}

double batch_loss(const model::CircuitSpec& spec, std::span<const double> params,
                  const data::WindowedDataset& batch) {
    require(batch.size() > 0, "empty batch");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double d = evaluate_sample(spec, params, batch.inputs[i]) - batch.labels[i];
        double term = d * d - comp;
        double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum / static_cast<double>(batch.size());
}

namespace {

std::vector<double> finite_diff_gradient(const model::CircuitSpec& spec,
                                         std::span<const double> params,
                                         const data::WindowedDataset& batch, double h) {
    std::vector<double> theta(params.begin(), params.end());
    std::vector<double> grad(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        double keep = theta[k];
        theta[k] = keep + h;
        double up = batch_loss(spec, theta, batch);
        theta[k] = keep - h;
        double down = batch_loss(spec, theta, batch);
        theta[k] = keep;
        grad[k] = (up - down) / (2.0 * h);
    }
    return grad;
}

// Each trainable slot must drive exactly one single-qubit rotation with unit
// scale for the +-pi/2 shift to be exact.
void check_param_shift_applicable(const model::CircuitSpec& spec) {
    require(spec.backend == model::Backend::DV,
            "parameter-shift gradients need a rotation-only circuit; use finite differences");
    std::vector<int> uses(spec.slot_names.size(), 0);
    for (const model::GateDesc& g : spec.gates) {
        for (const model::ParamBinding& b : g.params) {
            if (b.kind != model::ParamBinding::Kind::Trainable) continue;
            bool rotation = g.op == model::GateOp::RX || g.op == model::GateOp::RY ||
                            g.op == model::GateOp::RZ;
            require(rotation && b.scale == 1.0,
                    "parameter-shift gradients need plain single-qubit rotations");
            ++uses[b.index];
        }
    }
    for (int u : uses) require(u == 1, "parameter-shift assumes one gate per slot");
}

std::vector<double> param_shift_gradient(const model::CircuitSpec& spec,
                                         std::span<const double> params,
                                         const data::WindowedDataset& batch) {
    check_param_shift_applicable(spec);
    std::vector<double> theta(params.begin(), params.end());
    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> base(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        base[i] = evaluate_sample(spec, theta, batch.inputs[i]);
    const double shift = M_PI / 2.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        double keep = theta[k];
        double acc = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            theta[k] = keep + shift;
            double up = evaluate_sample(spec, theta, batch.inputs[i]);
            theta[k] = keep - shift;
            double down = evaluate_sample(spec, theta, batch.inputs[i]);
            double dfdk = 0.5 * (up - down);
            acc += 2.0 * (base[i] - batch.labels[i]) * dfdk;
        }
        theta[k] = keep;
        grad[k] = acc / static_cast<double>(batch.size());
    }
    return grad;
}

}  // namespace

std::vector<double> gradient(const model::CircuitSpec& spec, std::span<const double> params,
                             const data::WindowedDataset& batch, GradMethod method,
                             double fd_step) {
    require(batch.size() > 0, "empty batch");
    require(static_cast<int>(params.size()) == spec.trainable_count(),
            "parameter count does not match the circuit");
    if (method == GradMethod::ParamShift) return param_shift_gradient(spec, params, batch);
    return finite_diff_gradient(spec, params, batch, fd_step);
}

AdamState AdamState::init(std::size_t n_params, double lr) {
    AdamState s;
    s.first_moment.assign(n_params, 0.0);
    s.second_moment.assign(n_params, 0.0);
    s.step_count = 0;
    s.current_lr = lr;
    return s;
}

std::vector<double> adam_step(AdamState& state, std::span<const double> params,
                              std::span<const double> grads, const TrainConfig& config,
                              std::span<const std::string> slot_names) {
    require(params.size() == grads.size(), "parameter/gradient length mismatch");
    require(params.size() == state.first_moment.size(), "Adam state length mismatch");
    for (std::size_t k = 0; k < grads.size(); ++k) {
        if (!std::isfinite(grads[k])) {
            std::string slot = k < slot_names.size() ? slot_names[k]
                                                     : ("#" + std::to_string(k));
            throw TrainingError("non-finite gradient for slot " + slot);
        }
    }
    state.step_count += 1;
    double b1t = 1.0 - std::pow(config.beta1, static_cast<double>(state.step_count));
    double b2t = 1.0 - std::pow(config.beta2, static_cast<double>(state.step_count));
    std::vector<double> out(params.begin(), params.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        double g = grads[k];
        state.first_moment[k] = config.beta1 * state.first_moment[k] + (1.0 - config.beta1) * g;
        state.second_moment[k] =
            config.beta2 * state.second_moment[k] + (1.0 - config.beta2) * g * g;
        double mhat = state.first_moment[k] / b1t;
        double vhat = state.second_moment[k] / b2t;
        out[k] -= state.current_lr * mhat / (std::sqrt(vhat) + config.epsilon);
    }
    return out;
}

LrScheduler::LrScheduler(std::vector<double> thresholds, double factor)
    : thresholds_(std::move(thresholds)), factor_(factor) {}

double LrScheduler::step(double epoch_cost, double current_lr) {
    while (next_ < thresholds_.size() && epoch_cost < thresholds_[next_]) {
        current_lr *= factor_;
        ++next_;
    }
    return current_lr;
}

std::pair<model::ParamVector, TrainHistory> train(const model::CircuitSpec& spec,
                                                  const data::WindowedDataset& dataset,
                                                  const TrainConfig& config) {
    config.validate();
    spec.validate();
    require(dataset.size() > 0, "training dataset is empty");
    require(static_cast<int>(dataset.inputs.front().size()) == spec.n_features,
            "dataset feature count does not match the circuit");

    int epochs = config.epochs > 0 ? config.epochs : default_epochs(spec);

    Pcg32 rng(config.seed);
    std::vector<double> params(spec.slot_names.size());
    for (double& p : params) p = rng.uniform(-config.init_range, config.init_range);

    AdamState adam = AdamState::init(params.size(), config.learning_rate);
    LrScheduler scheduler(config.lr_thresholds, config.lr_factor);
    TrainHistory history;

    double initial_cost = batch_loss(spec, params, dataset);
    double best_cost = initial_cost;
    int diverging_epochs = 0;
    int stalled_epochs = 0;

    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order.data(), order.size());
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t count = std::min(static_cast<std::size_t>(config.batch_size),
                                         order.size() - start);
            data::WindowedDataset batch =
                gather(dataset, std::span<const std::size_t>(order.data() + start, count));
            std::vector<double> grads =
                gradient(spec, params, batch, config.grad_method, config.fd_step);
            params = adam_step(adam, params, grads, config, spec.slot_names);
        }

        double cost = batch_loss(spec, params, dataset);
        adam.current_lr = scheduler.step(cost, adam.current_lr);
        history.epoch_cost.push_back(cost);
        history.epoch_lr.push_back(adam.current_lr);

        if (cost > 10.0 * initial_cost) {
            if (++diverging_epochs >= 3) {
                history.final_params = params;
                throw TrainingError("training diverged: cost exceeded 10x the initial cost "
                                    "for 3 epochs",
                                    history);
            }
        } else {
            diverging_epochs = 0;
        }

        if (config.early_stop_patience) {
            if (cost < best_cost - 1e-6) {
                best_cost = cost;
                stalled_epochs = 0;
            } else if (++stalled_epochs >= *config.early_stop_patience) {
                history.stopped_early = true;
                break;
            }
        }
        best_cost = std::min(best_cost, cost);
    }

    history.final_params = params;
    model::ParamVector out;
    out.slot_names = spec.slot_names;
    out.values = params;
    return {std::move(out), std::move(history)};
}

std::string history_csv(const TrainHistory& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,cost,lr\n";
    for (std::size_t e = 0; e < history.epoch_cost.size(); ++e)
        out << e << "," << history.epoch_cost[e] << "," << history.epoch_lr[e] << "\n";
    return out.str();
}

}  // namespace qnnf::train
