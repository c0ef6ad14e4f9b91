#include "qnnf/qubit.hpp"

#include "qnnf/errors.hpp"

#include <cmath>

namespace qnnf::qubit {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

// 2x2 matrix for a single-qubit gate, row-major {u00, u01, u10, u11}.
std::array<Complex, 4> single_qubit_matrix(const QubitGate& g) {
    double half = 0.5 * g.angle;
    double c = std::cos(half), s = std::sin(half);
    switch (g.kind) {
        case DvGate::H: {
            double r = 1.0 / std::sqrt(2.0);
            return {Complex(r), Complex(r), Complex(r), Complex(-r)};
        }
        case DvGate::RX:
            return {Complex(c), -kI * s, -kI * s, Complex(c)};
        case DvGate::RY:
            return {Complex(c), Complex(-s), Complex(s), Complex(c)};
        case DvGate::RZ:
            return {std::exp(-kI * half), Complex(0), Complex(0), std::exp(kI * half)};
        case DvGate::CNOT:
            break;
    }
    throw ConfigError("not a single-qubit gate");
}

}  // namespace

const char* dv_gate_name(DvGate kind) {
    switch (kind) {
        case DvGate::H: return "H";
        case DvGate::RX: return "RX";
        case DvGate::RY: return "RY";
        case DvGate::RZ: return "RZ";
        case DvGate::CNOT: return "CNOT";
    }
    return "?";
}

QubitState zero_state(int n_qubits) {
    require(n_qubits >= 1 && n_qubits <= 20, "qubit count out of range");
    QubitState s;
    s.amplitudes = Vec::Zero(std::int64_t(1) << n_qubits);
    s.amplitudes(0) = 1.0;
    s.n_qubits = n_qubits;
    return s;
}

QubitState apply_qubit_gate(const QubitState& state, const QubitGate& gate) {
    int n = state.n_qubits;
    for (int k = 0; k < gate.n_wires; ++k)
        require(gate.wires[k] >= 0 && gate.wires[k] < n, "wire index out of range");

    QubitState out = state;
    std::int64_t dim = state.amplitudes.size();

    if (gate.kind == DvGate::CNOT) {
        require(gate.wires[0] != gate.wires[1], "control equals target");
        std::int64_t cbit = std::int64_t(1) << (n - 1 - gate.wires[0]);
        std::int64_t tbit = std::int64_t(1) << (n - 1 - gate.wires[1]);
        for (std::int64_t i = 0; i < dim; ++i) {
            if ((i & cbit) && !(i & tbit)) {
                std::swap(out.amplitudes(i), out.amplitudes(i | tbit));
            }
        }
        return out;
    }

    auto u = single_qubit_matrix(gate);
    std::int64_t bit = std::int64_t(1) << (n - 1 - gate.wires[0]);
    for (std::int64_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        Complex a = out.amplitudes(i);
        Complex b = out.amplitudes(i | bit);
        out.amplitudes(i) = u[0] * a + u[1] * b;
        out.amplitudes(i | bit) = u[2] * a + u[3] * b;
    }
    return out;
}

std::vector<QubitGate> angle_encode(std::span<const double> features, int n_qubits) {
    require(static_cast<int>(features.size()) <= n_qubits,
            "more features than qubits for angle encoding");
    std::vector<QubitGate> gates;
    gates.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (!(features[i] >= 0.0 && features[i] <= 1.0))
            throw DataError("angle encoding expects features in [0,1]; normalize first");
        gates.push_back(QubitGate::ry(M_PI * features[i], static_cast<int>(i)));
    }
    return gates;
}

QubitState amplitude_encode(std::span<const double> features, int n_qubits) {
    std::int64_t dim = std::int64_t(1) << n_qubits;
    require(static_cast<std::int64_t>(features.size()) <= dim,
            "more features than amplitudes for amplitude encoding");
    double sq = 0.0;
    for (double f : features) sq += f * f;
    if (sq == 0.0) throw DataError("amplitude encoding of an all-zero vector");
    QubitState s = zero_state(n_qubits);
    s.amplitudes.setZero();
    double inv = 1.0 / std::sqrt(sq);
    for (std::size_t i = 0; i < features.size(); ++i) s.amplitudes(i) = features[i] * inv;
    return s;
}

double z_expectation(const QubitState& state, int wire) {
    require(wire >= 0 && wire < state.n_qubits, "wire index out of range");
    std::int64_t bit = std::int64_t(1) << (state.n_qubits - 1 - wire);
    double acc = 0.0;
    for (std::int64_t i = 0; i < state.amplitudes.size(); ++i) {
        double p = std::norm(state.amplitudes(i));
        acc += (i & bit) ? -p : p;
    }
    return acc;
}

}  // namespace qnnf::qubit
