#include "qnnf/circuit.hpp"

#include "qnnf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace qnnf::model {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

bool is_cv_op(GateOp op) {
    switch (op) {
        case GateOp::Displacement:
        case GateOp::Rotation:
        case GateOp::Squeezing:
        case GateOp::Beamsplitter:
        case GateOp::Kerr:
        case GateOp::CrossKerr:
        case GateOp::CubicPhase:
            return true;
        default:
            return false;
    }
}

int op_wire_count(GateOp op) {
    switch (op) {
        case GateOp::Beamsplitter:
        case GateOp::CrossKerr:
        case GateOp::CNOT:
            return 2;
        default:
            return 1;
    }
}

std::size_t op_param_count(GateOp op) {
    switch (op) {
        case GateOp::Displacement:
        case GateOp::Beamsplitter:
            return 2;
        case GateOp::H:
        case GateOp::CNOT:
            return 0;
        default:
            return 1;
    }
}

}  // namespace

const char* gate_op_name(GateOp op) {
    switch (op) {
        case GateOp::Displacement: return "D";
        case GateOp::Rotation: return "R";
        case GateOp::Squeezing: return "S";
        case GateOp::Beamsplitter: return "BS";
        case GateOp::Kerr: return "K";
        case GateOp::CrossKerr: return "CK";
        case GateOp::CubicPhase: return "V";
        case GateOp::H: return "H";
        case GateOp::RX: return "RX";
        case GateOp::RY: return "RY";
        case GateOp::RZ: return "RZ";
        case GateOp::CNOT: return "CNOT";
    }
    return "?";
}

void CircuitSpec::validate() const {
    require(wires >= 1, "circuit needs at least one wire");
    require(n_features >= 1, "circuit needs at least one feature");
    require(measure_wire >= 0 && measure_wire < wires, "measure wire out of range");
    if (backend == Backend::CV) require(cutoff >= 2, "cutoff must be >= 2");
    std::set<std::string> seen(slot_names.begin(), slot_names.end());
    require(seen.size() == slot_names.size(), "trainable slot names must be unique");
    for (const GateDesc& g : this->gates) {
        require(is_cv_op(g.op) == (backend == Backend::CV), "gate does not match backend");
        require(static_cast<int>(g.wires.size()) == op_wire_count(g.op),
                "wrong wire count for gate");
        require(g.params.size() == op_param_count(g.op), "wrong parameter count for gate");
        for (int w : g.wires) require(w >= 0 && w < wires, "gate wire out of range");
        if (g.wires.size() == 2) require(g.wires[0] != g.wires[1], "gate wires must differ");
        for (const ParamBinding& b : g.params) {
            if (b.kind == ParamBinding::Kind::Trainable)
                require(b.index >= 0 && b.index < trainable_count(),
                        "trainable slot index out of range");
            if (b.kind == ParamBinding::Kind::Input)
                require(b.index >= 0 && b.index < n_features,
                        "input feature index out of range");
        }
    }
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "cv1") return ModelKind::CV1;
    if (name == "cv2") return ModelKind::CV2;
    if (name == "cv3") return ModelKind::CV3;
    if (name == "dv2") return ModelKind::DV2;
    if (name == "dv4") return ModelKind::DV4;
    throw ConfigError("unknown model kind: " + name);
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::CV1: return "cv1";
        case ModelKind::CV2: return "cv2";
        case ModelKind::CV3: return "cv3";
        case ModelKind::DV2: return "dv2";
        case ModelKind::DV4: return "dv4";
    }
    return "?";
}

int declared_param_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::CV1: return 8;
        case ModelKind::CV2: return 6;
        case ModelKind::CV3: return 4;
        case ModelKind::DV2: return 4;
        case ModelKind::DV4: return 8;
    }
    return 0;
}

namespace {

using PB = ParamBinding;

// Shared wire-0 tail of the two-wire models: fixed quarter rotation, squeeze,
// trainable rotation, bias displacement, cubic-phase nonlinearity.
void emit_cv2_tail(CircuitSpec& spec, int base_slot) {
    spec.gates.push_back({GateOp::Rotation, {0}, {PB::fixed(M_PI / 2)}});
    spec.gates.push_back({GateOp::Squeezing, {0}, {PB::trainable(base_slot)}});
    spec.gates.push_back({GateOp::Rotation, {0}, {PB::trainable(base_slot + 1)}});
    spec.gates.push_back({GateOp::Displacement, {0},
                          {PB::trainable(base_slot + 2), PB::fixed(0.0)}});
    spec.gates.push_back({GateOp::CubicPhase, {0}, {PB::trainable(base_slot + 3)}});
}

}  // namespace

CircuitSpec build_cv_model(ModelKind kind, int n_features, int cutoff, bool vacuum_ancilla) {
    CircuitSpec spec;
    spec.backend = Backend::CV;
    spec.cutoff = cutoff;
    spec.n_features = n_features;
    spec.name = model_kind_name(kind);
    spec.measure_wire = 0;

    switch (kind) {
        case ModelKind::CV3: {
            require(n_features == 1, "cv3 is a single-wire, single-feature model");
            spec.wires = 1;
            spec.slot_names = {"squeeze_r", "rot_theta", "bias_b", "cubic_gamma"};
            spec.gates.push_back({GateOp::Displacement, {0}, {PB::input(0), PB::fixed(0.0)}});
            spec.gates.push_back({GateOp::Squeezing, {0}, {PB::trainable(0)}});
            spec.gates.push_back({GateOp::Rotation, {0}, {PB::trainable(1)}});
            spec.gates.push_back({GateOp::Displacement, {0},
                                  {PB::trainable(2), PB::fixed(0.0)}});
            spec.gates.push_back({GateOp::CubicPhase, {0}, {PB::trainable(3)}});
            break;
        }
        case ModelKind::CV2: {
            require(n_features == 1 || n_features == 2,
                    "cv2 takes 1 or 2 features; use the extended model beyond that");
            spec.wires = 2;
            spec.slot_names = {"bs_theta", "bs_phi", "squeeze_r", "rot_theta",
                               "bias_b", "cubic_gamma"};
            spec.gates.push_back({GateOp::Displacement, {0}, {PB::input(0), PB::fixed(0.0)}});
            if (n_features == 2) {
                spec.gates.push_back({GateOp::Displacement, {1},
                                      {PB::input(1), PB::fixed(0.0)}});
            } else if (!vacuum_ancilla) {
                // duplicated input: two indistinguishable amplitudes into the splitter
                spec.gates.push_back({GateOp::Displacement, {1},
                                      {PB::input(0), PB::fixed(0.0)}});
            }
            spec.gates.push_back({GateOp::Beamsplitter, {0, 1},
                                  {PB::trainable(0), PB::trainable(1)}});
            emit_cv2_tail(spec, 2);
            break;
        }
        case ModelKind::CV1: {
            require(n_features == 1 || n_features == 2, "cv1 takes 1 or 2 features");
            spec.wires = 2;
            spec.slot_names = {"bs_theta", "bs_phi", "squeeze_r1", "rot_theta1",
                               "squeeze_r2", "cross_kerr_kappa", "bias_b", "cubic_gamma"};
            spec.gates.push_back({GateOp::Displacement, {0}, {PB::input(0), PB::fixed(0.0)}});
            if (n_features == 2) {
                spec.gates.push_back({GateOp::Displacement, {1},
                                      {PB::input(1), PB::fixed(0.0)}});
            } else {
                // fixed unit displacement at a quarter-cycle phase on the second wire
                spec.gates.push_back({GateOp::Displacement, {1},
                                      {PB::fixed(1.0), PB::fixed(M_PI / 2)}});
            }
            spec.gates.push_back({GateOp::Beamsplitter, {0, 1},
                                  {PB::trainable(0), PB::trainable(1)}});
            spec.gates.push_back({GateOp::Rotation, {0}, {PB::fixed(M_PI / 2)}});
            spec.gates.push_back({GateOp::Squeezing, {0}, {PB::trainable(2)}});
            spec.gates.push_back({GateOp::Rotation, {0}, {PB::trainable(3)}});
            // second squeezer runs in the opposite direction
            spec.gates.push_back({GateOp::Squeezing, {0}, {PB::trainable(4, -1.0)}});
            spec.gates.push_back({GateOp::CrossKerr, {0, 1}, {PB::trainable(5)}});
            spec.gates.push_back({GateOp::Displacement, {0},
                                  {PB::trainable(6), PB::fixed(0.0)}});
            spec.gates.push_back({GateOp::CubicPhase, {0}, {PB::trainable(7)}});
            break;
        }
        default:
            throw ConfigError("build_cv_model only builds cv1/cv2/cv3");
    }
    spec.validate();
    return spec;
}

CircuitSpec extend_cv_model(int n_features, int cutoff, bool shared_beamsplitters) {
    require(n_features >= 3, "the extended model starts at 3 features; use cv2 below that");
    CircuitSpec spec;
    spec.backend = Backend::CV;
    spec.cutoff = cutoff;
    spec.n_features = n_features;
    spec.wires = n_features;
    spec.name = "cv2";
    spec.measure_wire = 0;

    if (shared_beamsplitters) {
        spec.slot_names = {"bs_theta", "bs_phi", "squeeze_r", "rot_theta",
                           "bias_b", "cubic_gamma"};
    } else {
        for (int k = 1; k < n_features; ++k) {
            spec.slot_names.push_back("bs" + std::to_string(k) + "_theta");
            spec.slot_names.push_back("bs" + std::to_string(k) + "_phi");
        }
        spec.slot_names.insert(spec.slot_names.end(),
                               {"squeeze_r", "rot_theta", "bias_b", "cubic_gamma"});
    }

    for (int k = 0; k < n_features; ++k)
        spec.gates.push_back({GateOp::Displacement, {k}, {PB::input(k), PB::fixed(0.0)}});
    for (int k = 1; k < n_features; ++k) {
        int slot = shared_beamsplitters ? 0 : 2 * (k - 1);
        spec.gates.push_back({GateOp::Beamsplitter, {0, k},
                              {PB::trainable(slot), PB::trainable(slot + 1)}});
    }
    emit_cv2_tail(spec, spec.trainable_count() - 4);
    spec.validate();
    return spec;
}

namespace {

// Minimal chain interferometer: m-1 beamsplitters plus one rotation, 2m-1
// trainables; a bare rotation for m = 1.
void emit_interferometer(CircuitSpec& spec, int modes, const std::string& prefix) {
    int base = spec.trainable_count();
    if (modes == 1) {
        spec.slot_names.push_back(prefix + "_rot");
        spec.gates.push_back({GateOp::Rotation, {0}, {PB::trainable(base)}});
        return;
    }
    for (int k = 0; k + 1 < modes; ++k) {
        spec.slot_names.push_back(prefix + "_bs" + std::to_string(k) + "_theta");
        spec.slot_names.push_back(prefix + "_bs" + std::to_string(k) + "_phi");
        spec.gates.push_back({GateOp::Beamsplitter, {k, k + 1},
                              {PB::trainable(base + 2 * k), PB::trainable(base + 2 * k + 1)}});
    }
    spec.slot_names.push_back(prefix + "_rot");
    spec.gates.push_back({GateOp::Rotation, {0},
                          {PB::trainable(spec.trainable_count() - 1)}});
}

}  // namespace

CircuitSpec build_generic_cv_layer(int modes, int cutoff) {
    require(modes >= 1, "layer needs at least one mode");
    CircuitSpec spec;
    spec.backend = Backend::CV;
    spec.cutoff = cutoff;
    spec.n_features = modes;
    spec.wires = modes;
    spec.name = "cvgen" + std::to_string(modes);
    spec.measure_wire = 0;

    for (int k = 0; k < modes; ++k)
        spec.gates.push_back({GateOp::Displacement, {k}, {PB::input(k), PB::fixed(0.0)}});

    emit_interferometer(spec, modes, "i1");
    for (int k = 0; k < modes; ++k) {
        spec.slot_names.push_back("squeeze_r" + std::to_string(k));
        spec.gates.push_back({GateOp::Squeezing, {k},
                              {PB::trainable(spec.trainable_count() - 1)}});
    }
    emit_interferometer(spec, modes, "i2");
    for (int k = 0; k < modes; ++k) {
        int base = spec.trainable_count();
        spec.slot_names.push_back("disp_mag" + std::to_string(k));
        spec.slot_names.push_back("disp_phase" + std::to_string(k));
        spec.gates.push_back({GateOp::Displacement, {k},
                              {PB::trainable(base), PB::trainable(base + 1)}});
    }
    for (int k = 0; k < modes; ++k) {
        spec.slot_names.push_back("kerr_kappa" + std::to_string(k));
        spec.gates.push_back({GateOp::Kerr, {k}, {PB::trainable(spec.trainable_count() - 1)}});
    }
    spec.validate();
    return spec;
}

namespace {

// Two-wire DV block: H on both wires, entangling CNOT, sandwiched rotation on
// the first wire (fixed quarter RY, trainable RZ and RY), bias RX plus RZ on
// the second wire, closing CNOT.
void emit_dv_block(CircuitSpec& spec, int a, int b, const std::string& suffix) {
    int base = spec.trainable_count();
    spec.slot_names.push_back("rz_a" + suffix);
    spec.slot_names.push_back("ry_b" + suffix);
    spec.slot_names.push_back("rx_c" + suffix);
    spec.slot_names.push_back("rz_d" + suffix);
    spec.gates.push_back({GateOp::H, {a}, {}});
    spec.gates.push_back({GateOp::H, {b}, {}});
    spec.gates.push_back({GateOp::CNOT, {a, b}, {}});
    spec.gates.push_back({GateOp::RY, {a}, {PB::fixed(M_PI / 2)}});
    spec.gates.push_back({GateOp::RZ, {a}, {PB::trainable(base)}});
    spec.gates.push_back({GateOp::RY, {a}, {PB::trainable(base + 1)}});
    spec.gates.push_back({GateOp::RX, {b}, {PB::trainable(base + 2)}});
    spec.gates.push_back({GateOp::RZ, {b}, {PB::trainable(base + 3)}});
    spec.gates.push_back({GateOp::CNOT, {a, b}, {}});
}

}  // namespace

CircuitSpec build_dv_model(ModelKind kind, DvEncoding encoding, int n_features) {
    require(kind == ModelKind::DV2 || kind == ModelKind::DV4,
            "build_dv_model only builds dv2/dv4");
    CircuitSpec spec;
    spec.backend = Backend::DV;
    spec.encoding = encoding;
    spec.wires = (kind == ModelKind::DV2) ? 2 : 4;
    spec.n_features = n_features;
    spec.name = model_kind_name(kind);
    spec.measure_wire = 0;

    if (encoding == DvEncoding::Angle) {
        require(n_features <= spec.wires, "more features than wires for angle encoding");
        for (int i = 0; i < n_features; ++i)
            spec.gates.push_back({GateOp::RY, {i}, {PB::input(i, M_PI)}});
    } else {
        require(n_features <= (1 << spec.wires),
                "more features than amplitudes for amplitude encoding");
    }

    if (kind == ModelKind::DV2) {
        emit_dv_block(spec, 0, 1, "");
    } else {
        emit_dv_block(spec, 0, 1, "0");
        emit_dv_block(spec, 2, 3, "1");
        spec.gates.push_back({GateOp::CNOT, {1, 2}, {}});
        spec.gates.push_back({GateOp::CNOT, {3, 0}, {}});
    }
    spec.validate();
    return spec;
}

CircuitSpec build_model(const std::string& name, int n_features, int cutoff,
                        DvEncoding encoding) {
    if (name.rfind("cvgen", 0) == 0) {
        int m = std::atoi(name.c_str() + 5);
        require(m >= 1, "bad generic layer name: " + name);
        return build_generic_cv_layer(m, cutoff);
    }
    ModelKind kind = model_kind_from_name(name);
    switch (kind) {
        case ModelKind::CV2:
            if (n_features >= 3) return extend_cv_model(n_features, cutoff);
            [[fallthrough]];
        case ModelKind::CV1:
        case ModelKind::CV3:
            return build_cv_model(kind, n_features, cutoff);
        case ModelKind::DV2:
        case ModelKind::DV4:
            return build_dv_model(kind, encoding, n_features);
    }
    throw ConfigError("unknown model kind: " + name);
}

namespace {

double resolve(const ParamBinding& b, std::span<const double> params,
               std::span<const double> features) {
    switch (b.kind) {
        case ParamBinding::Kind::Fixed: return b.scale * b.value;
        case ParamBinding::Kind::Trainable: return b.scale * params[b.index];
        case ParamBinding::Kind::Input: return b.scale * features[b.index];
    }
    return 0.0;
}

fock::CvGate to_cv_gate(GateOp op) {
    switch (op) {
        case GateOp::Displacement: return fock::CvGate::Displacement;
        case GateOp::Rotation: return fock::CvGate::Rotation;
        case GateOp::Squeezing: return fock::CvGate::Squeezing;
        case GateOp::Beamsplitter: return fock::CvGate::Beamsplitter;
        case GateOp::Kerr: return fock::CvGate::Kerr;
        case GateOp::CrossKerr: return fock::CvGate::CrossKerr;
        case GateOp::CubicPhase: return fock::CvGate::CubicPhase;
        default: throw ConfigError("not a CV gate");
    }
}

EvalResult evaluate_cv(const CircuitSpec& spec, std::span<const double> params,
                       std::span<const double> features) {
    fock::FockState state = fock::vacuum_state(spec.wires, spec.cutoff);
    for (const GateDesc& g : spec.gates) {
        double v0 = g.params.empty() ? 0.0 : resolve(g.params[0], params, features);
        std::array<double, 2> gp{v0, 0.0};
        std::size_t np = g.params.size();
        if (g.op == GateOp::Displacement) {
            double phase = resolve(g.params[1], params, features);
            std::complex<double> alpha = v0 * std::exp(std::complex<double>(0, phase));
            gp = {alpha.real(), alpha.imag()};
        } else if (np == 2) {
            gp[1] = resolve(g.params[1], params, features);
        }
        auto mat = fock::cached_gate(to_cv_gate(g.op),
                                     std::span<const double>(gp.data(), np), spec.cutoff);
        state = fock::apply_gate(state, *mat, g.wires);
    }
    return {fock::quadrature_expectation(state, spec.measure_wire),
            state.truncation_warnings, state.worst_drift};
}

EvalResult evaluate_dv(const CircuitSpec& spec, std::span<const double> params,
                       std::span<const double> features) {
    qubit::QubitState state =
        (spec.encoding == DvEncoding::Amplitude)
            ? qubit::amplitude_encode(features, spec.wires)
            : qubit::zero_state(spec.wires);
    for (const GateDesc& g : spec.gates) {
        qubit::QubitGate qg{};
        switch (g.op) {
            case GateOp::H: qg = qubit::QubitGate::h(g.wires[0]); break;
            case GateOp::RX:
                qg = qubit::QubitGate::rx(resolve(g.params[0], params, features), g.wires[0]);
                break;
            case GateOp::RY:
                qg = qubit::QubitGate::ry(resolve(g.params[0], params, features), g.wires[0]);
                break;
            case GateOp::RZ:
                qg = qubit::QubitGate::rz(resolve(g.params[0], params, features), g.wires[0]);
                break;
            case GateOp::CNOT:
                qg = qubit::QubitGate::cnot(g.wires[0], g.wires[1]);
                break;
            default:
                throw ConfigError("not a DV gate");
        }
        state = qubit::apply_qubit_gate(state, qg);
    }
    return {0.5 * (1.0 - qubit::z_expectation(state, spec.measure_wire)), 0, 0.0};
}

}  // namespace

EvalResult evaluate_detailed(const CircuitSpec& spec, std::span<const double> params,
                             std::span<const double> features) {
    require(static_cast<int>(params.size()) == spec.trainable_count(),
            "parameter count does not match the circuit");
    require(static_cast<int>(features.size()) == spec.n_features,
            "feature count does not match the circuit");
    for (double p : params) require(std::isfinite(p), "non-finite parameter");
    for (double f : features) require(std::isfinite(f), "non-finite feature");
    return spec.backend == Backend::CV ? evaluate_cv(spec, params, features)
                                       : evaluate_dv(spec, params, features);
}

double evaluate(const CircuitSpec& spec, std::span<const double> params,
                std::span<const double> features) {
    return evaluate_detailed(spec, params, features).value;
}

namespace {

std::string binding_label(const CircuitSpec& spec, const ParamBinding& b) {
    std::string s;
    if (b.scale == -1.0) s += "-";
    switch (b.kind) {
        case ParamBinding::Kind::Fixed: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4g", b.value);
            return s + buf;
        }
        case ParamBinding::Kind::Trainable:
            return s + spec.slot_names[b.index];
        case ParamBinding::Kind::Input: {
            if (b.scale != 1.0 && b.scale != -1.0) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.4g*", b.scale);
                s += buf;
            }
            return s + "x" + std::to_string(b.index);
        }
    }
    return s;
}

}  // namespace

std::string draw(const CircuitSpec& spec) {
    std::vector<std::vector<std::string>> cells(spec.wires);

    auto pad_to_column = [&](std::size_t col) {
        for (auto& row : cells)
            while (row.size() <= col) row.emplace_back();
    };

    std::size_t col = 0;
    if (spec.backend == Backend::DV && spec.encoding == DvEncoding::Amplitude) {
        pad_to_column(col);
        for (int w = 0; w < spec.wires; ++w) cells[w][col] = "AmpEnc(x)";
        ++col;
    }
    for (const GateDesc& g : spec.gates) {
        pad_to_column(col);
        std::string label(gate_op_name(g.op));
        std::size_t shown = g.params.size();
        // a displacement with fixed zero phase is just a real displacement
        if (g.op == GateOp::Displacement && shown == 2 &&
            g.params[1].kind == ParamBinding::Kind::Fixed && g.params[1].value == 0.0)
            shown = 1;
        if (shown > 0) {
            label += "(";
            for (std::size_t i = 0; i < shown; ++i) {
                if (i) label += ",";
                label += binding_label(spec, g.params[i]);
            }
            label += ")";
        }
        if (g.op == GateOp::CNOT) {
            cells[g.wires[0]][col] = "CNOT";
            cells[g.wires[1]][col] = "(+)";
        } else {
            cells[g.wires[0]][col] = label;
            if (g.wires.size() == 2) cells[g.wires[1]][col] = gate_op_name(g.op);
        }
        ++col;
    }

    std::vector<std::size_t> widths(col, 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < col; ++c) widths[c] = std::max(widths[c], row[c].size());

    std::ostringstream out;
    for (int w = 0; w < spec.wires; ++w) {
        out << w << ": -";
        for (std::size_t c = 0; c < col; ++c) {
            std::string cell = cells[w][c];
            out << cell << std::string(widths[c] - cell.size(), '-') << "-";
        }
        if (w == spec.measure_wire)
            out << (spec.backend == Backend::CV ? "[<x>]" : "[<Z>]");
        out << "\n";
    }
    return out.str();
}

}  // namespace qnnf::model
