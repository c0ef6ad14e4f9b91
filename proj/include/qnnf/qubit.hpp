#ifndef QNNF_QUBIT_HPP
#define QNNF_QUBIT_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <vector>

namespace qnnf::qubit {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;

// Dense statevector over n qubits, big-endian wire order: wire 0 is the most
// significant bit of the basis index. All gates are exactly unitary, so the
// norm is preserved to machine precision.
struct QubitState {
    Vec amplitudes;
    int n_qubits = 0;
};

enum class DvGate { H, RX, RY, RZ, CNOT };

const char* dv_gate_name(DvGate kind);

// Half-angle convention: R_axis(theta) = exp(-i theta axis / 2).
struct QubitGate {
    DvGate kind;
    double angle = 0.0;               // rotations only
    std::array<int, 2> wires{0, 0};   // CNOT: {control, target}
    int n_wires = 1;

    static QubitGate h(int wire) { return {DvGate::H, 0.0, {wire, 0}, 1}; }
    static QubitGate rx(double angle, int wire) { return {DvGate::RX, angle, {wire, 0}, 1}; }
    static QubitGate ry(double angle, int wire) { return {DvGate::RY, angle, {wire, 0}, 1}; }
    static QubitGate rz(double angle, int wire) { return {DvGate::RZ, angle, {wire, 0}, 1}; }
    static QubitGate cnot(int control, int target) {
        return {DvGate::CNOT, 0.0, {control, target}, 2};
    }
};

QubitState zero_state(int n_qubits);

QubitState apply_qubit_gate(const QubitState& state, const QubitGate& gate);

// RY(pi * x_i) on wire i per feature; x in [0,1] maps injectively onto [0,pi].
// Wires beyond the feature count get no encoding gate.
std::vector<QubitGate> angle_encode(std::span<const double> features, int n_qubits);

// Features L2-normalized and zero-padded to 2^n as amplitudes.
QubitState amplitude_encode(std::span<const double> features, int n_qubits);

// <Z_wire> = sum |amp|^2 * (+1 if the wire bit is 0 else -1).
double z_expectation(const QubitState& state, int wire);

}  // namespace qnnf::qubit

#endif
