#ifndef QNNF_CIRCUIT_HPP
#define QNNF_CIRCUIT_HPP

#include "qnnf/fock.hpp"
#include "qnnf/qubit.hpp"

#include <span>
#include <string>
#include <vector>

namespace qnnf::model {

enum class Backend { CV, DV };
enum class DvEncoding { Angle, Amplitude };

enum class GateOp {
    // CV
    Displacement,
    Rotation,
    Squeezing,
    Beamsplitter,
    Kerr,
    CrossKerr,
    CubicPhase,
    // DV
    H,
    RX,
    RY,
    RZ,
    CNOT,
};

const char* gate_op_name(GateOp op);

// One scalar parameter of a gate, resolved at evaluation time as
// scale * (fixed value | params[index] | features[index]).
struct ParamBinding {
    enum class Kind { Fixed, Trainable, Input };
    Kind kind = Kind::Fixed;
    double value = 0.0;
    int index = -1;
    double scale = 1.0;

    static ParamBinding fixed(double v) { return {Kind::Fixed, v, -1, 1.0}; }
    static ParamBinding trainable(int slot, double scale = 1.0) {
        return {Kind::Trainable, 0.0, slot, scale};
    }
    static ParamBinding input(int feature, double scale = 1.0) {
        return {Kind::Input, 0.0, feature, scale};
    }
};

// Parameter layout per op:
//   Displacement {magnitude, phase} (alpha = magnitude * e^{i phase})
//   Beamsplitter {theta, phi} | Rotation/Squeezing/Kerr/CrossKerr/CubicPhase {value}
//   RX/RY/RZ {angle} | H/CNOT {}
struct GateDesc {
    GateOp op;
    std::vector<int> wires;
    std::vector<ParamBinding> params;
};

struct CircuitSpec {
    Backend backend = Backend::CV;
    int wires = 1;
    int cutoff = fock::kDefaultCutoff;            // CV only
    int n_features = 1;
    DvEncoding encoding = DvEncoding::Angle;      // DV only
    std::vector<GateDesc> gates;
    std::vector<std::string> slot_names;          // declaration order = ParamVector order
    int measure_wire = 0;
    std::string name;

    int trainable_count() const { return static_cast<int>(slot_names.size()); }
    void validate() const;  // throws ConfigError on an inconsistent spec
};

struct ParamVector {
    std::vector<std::string> slot_names;
    std::vector<double> values;
};

enum class ModelKind { CV1, CV2, CV3, DV2, DV4 };

ModelKind model_kind_from_name(const std::string& name);
const char* model_kind_name(ModelKind kind);

// Trainable-slot counts: CV1 8, CV2 6, CV3 4, DV2 4, DV4 8.
int declared_param_count(ModelKind kind);

// Canonical two-wire / one-wire CV models. CV3 requires n_features == 1;
// CV1/CV2 accept 1 or 2. A single feature is duplicated onto the ancilla wire
// by default (two indistinguishable inputs into the beamsplitter);
// vacuum_ancilla leaves the second wire empty instead.
CircuitSpec build_cv_model(ModelKind kind, int n_features,
                           int cutoff = fock::kDefaultCutoff, bool vacuum_ancilla = false);

// Multi-feature extension of the two-wire model: feature 0 on wire 0, feature
// k on wire k, one beamsplitter from wire 0 to every other wire. All
// beamsplitters share the same two trainable angles unless
// shared_beamsplitters is false.
CircuitSpec extend_cv_model(int n_features, int cutoff = fock::kDefaultCutoff,
                            bool shared_beamsplitters = true);

// Generic m-mode layer: interferometer, per-mode squeezers, second
// interferometer, per-mode displacements (magnitude and phase), per-mode Kerr
// gates; 8m-2 trainables. For m = 1 each interferometer is a single rotation.
CircuitSpec build_generic_cv_layer(int modes, int cutoff = fock::kDefaultCutoff);

CircuitSpec build_dv_model(ModelKind kind, DvEncoding encoding, int n_features = 1);

// Builder dispatch by model name, used when loading weights files.
CircuitSpec build_model(const std::string& name, int n_features,
                        int cutoff = fock::kDefaultCutoff,
                        DvEncoding encoding = DvEncoding::Angle);

struct EvalResult {
    double value = 0.0;
    int truncation_warnings = 0;
    double worst_drift = 0.0;
};

// Forward pass. CV: vacuum -> gates -> <x> on the measure wire. DV: encoding
// -> gates -> (1 - <Z_0>)/2, so the output lands in [0,1]. Deterministic:
// identical inputs give bit-identical outputs.
EvalResult evaluate_detailed(const CircuitSpec& spec, std::span<const double> params,
                             std::span<const double> features);
double evaluate(const CircuitSpec& spec, std::span<const double> params,
                std::span<const double> features);

// Fixed-width text diagram: one row per wire, gates in execution order,
// trainable parameters labeled by slot name.
std::string draw(const CircuitSpec& spec);

}  // namespace qnnf::model

#endif
