#ifndef QNNF_FOCK_HPP
#define QNNF_FOCK_HPP

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace qnnf::fock {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Conventions used throughout:
//   hbar = 2:  x = a + a†,  p = -i(a - a†), so a coherent state |alpha> has <x> = 2 Re(alpha).
//   R(phi)   = exp(i phi n)                         (diagonal, entry n: e^{i phi n})
//   D(alpha) = exp(alpha a† - conj(alpha) a)
//   S(r)     = exp(r/2 (a² - a†²))                  (x quadrature scaled by e^{-r})
//   BS(th,f) = exp(th (e^{if} a†b - e^{-if} a b†))  (50:50 at th = pi/4)
//   K(k)     = exp(i k n²),  CK(k) = exp(i k n1 n2)
//   V(g)     = exp(i g/3 x³)
//
// Displacement, squeezing and beamsplitter are generated at padded dimension
// D + pad and truncated back to D, so their entries are those of the exact
// infinite-dimensional operator (the oracle tests check this). The cubic
// phase is the exception: the exact x³ exponential sends a large fraction of
// every column far above any practical cutoff, so V is built as the
// exponential of the cutoff-truncated generator instead. That keeps V exactly
// unitary at the working dimension, which is also how the Fock simulators
// this model family is trained on behave.

inline constexpr int kDefaultCutoff = 12;

// Padding for generated gates. Squeezing converges slowest: at cutoff 12 the
// low-photon block is good to ~1e-8 for r <= 0.7 only once pad >= 24. With
// pad >= cutoff - 1 the beamsplitter is exact on every retained entry (all
// photon-number blocks that survive truncation are complete).
inline constexpr int kDefaultPad = 28;

// Squared-norm drift above this raises a truncation warning on the state.
inline constexpr double kNormDriftWarn = 1e-3;

enum class CvGate {
    Displacement,
    Rotation,
    Squeezing,
    Beamsplitter,
    Kerr,
    CrossKerr,
    CubicPhase,
};

const char* cv_gate_name(CvGate kind);

// Amplitudes over the truncated m-mode Fock basis, row-major over mode
// occupation numbers (wire 0 is the slowest-varying index). Gates never
// renormalize; drift beyond kNormDriftWarn increments truncation_warnings
// so encodings too large for the cutoff are visible instead of masked.
struct FockState {
    Vec amplitudes;
    int modes = 0;
    int cutoff = 0;
    int truncation_warnings = 0;
    double worst_drift = 0.0;

    double squared_norm() const { return amplitudes.squaredNorm(); }
};

struct CvGateMatrix {
    Mat entries;  // D x D (arity 1) or D² x D² (arity 2, row-major over the two wires)
    int arity = 1;
    int cutoff = 0;
    CvGate kind = CvGate::Displacement;
};

// Ladder operators at dimension dim: a[n-1,n] = sqrt(n).
Mat annihilation_matrix(int dim);
Mat creation_matrix(int dim);

FockState vacuum_state(int modes, int cutoff);

// Typed constructors. All return the truncated unitary at `cutoff`.
CvGateMatrix displacement_matrix(Complex alpha, int cutoff, int pad = kDefaultPad);
CvGateMatrix rotation_matrix(double phi, int cutoff);
CvGateMatrix squeezing_matrix(double r, int cutoff, int pad = kDefaultPad);
CvGateMatrix beamsplitter_matrix(double theta, double phi, int cutoff, int pad = kDefaultPad);
CvGateMatrix kerr_matrix(double kappa, int cutoff);
CvGateMatrix cross_kerr_matrix(double kappa, int cutoff);
CvGateMatrix cubic_phase_matrix(double gamma, int cutoff, int pad = 0);

// Generic dispatch with kind-specific parameter layout:
//   Displacement {re, im} | Rotation {phi} | Squeezing {r} | Beamsplitter {theta, phi}
//   Kerr {kappa} | CrossKerr {kappa} | CubicPhase {gamma}
// pad < 0 selects the per-kind default. Throws ConfigError on a wrong
// parameter count or non-finite parameter.
CvGateMatrix gate_matrix(CvGate kind, std::span<const double> params, int cutoff,
                         int pad = -1);

// Process-wide cache keyed by (kind, params quantized at 1e-12, cutoff, pad).
// Training re-evaluates identical circuits per sample, so hits dominate.
std::shared_ptr<const CvGateMatrix> cached_gate(CvGate kind, std::span<const double> params,
                                                int cutoff, int pad = -1);
void clear_gate_cache();
std::size_t gate_cache_size();

// Contracts the gate into the state on the given wires; other modes untouched.
FockState apply_gate(const FockState& state, const CvGateMatrix& gate,
                     std::span<const int> wires);

// <x_wire> with x = a + a†. The exact expectation is real; the complex
// overload exists so tests can check the imaginary residue.
Complex quadrature_expectation_raw(const FockState& state, int wire);
double quadrature_expectation(const FockState& state, int wire);

}  // namespace qnnf::fock

#endif
