#include "qnnf/fock.hpp"

#include "qnnf/errors.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>
#include <unordered_map>

namespace qnnf::fock {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

void require_cutoff(int cutoff) {
    require(cutoff >= 2, "cutoff must be >= 2");
}

void require_finite(std::span<const double> params) {
    for (double p : params) require(std::isfinite(p), "gate parameter must be finite");
}

// exp(i H) for Hermitian H via eigendecomposition. All CV generators here are
// anti-Hermitian, so this is exact up to the eigensolver and needs no Padé
// scaling heuristics.
Mat exp_i_hermitian(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Eigen::VectorXcd phases =
        (kI * es.eigenvalues().array().cast<Complex>()).exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Builds a one-mode gate exp(generator) at padded dimension and truncates.
// `hermitian_of_generator` must return H with generator = i H.
template <typename F>
Mat padded_one_mode(int cutoff, int pad, F&& hermitian_of_generator) {
    int dp = cutoff + pad;
    Mat h = hermitian_of_generator(dp);
    return exp_i_hermitian(h).topLeftCorner(cutoff, cutoff);
}

}  // namespace

const char* cv_gate_name(CvGate kind) {
    switch (kind) {
        case CvGate::Displacement: return "D";
        case CvGate::Rotation: return "R";
        case CvGate::Squeezing: return "S";
        case CvGate::Beamsplitter: return "BS";
        case CvGate::Kerr: return "K";
        case CvGate::CrossKerr: return "CK";
        case CvGate::CubicPhase: return "V";
    }
    return "?";
}

Mat annihilation_matrix(int dim) {
    require_cutoff(dim);
    Mat a = Mat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat creation_matrix(int dim) { return annihilation_matrix(dim).adjoint(); }

FockState vacuum_state(int modes, int cutoff) {
    require(modes >= 1, "modes must be >= 1");
    require_cutoff(cutoff);
    std::int64_t dim = 1;
    for (int q = 0; q < modes; ++q) dim *= cutoff;
    FockState s;
    s.amplitudes = Vec::Zero(dim);
    s.amplitudes(0) = 1.0;
    s.modes = modes;
    s.cutoff = cutoff;
    return s;
}

CvGateMatrix displacement_matrix(Complex alpha, int cutoff, int pad) {
    require_cutoff(cutoff);
    Mat u = padded_one_mode(cutoff, pad, [&](int dp) {
        Mat a = annihilation_matrix(dp);
        // D(alpha) = exp(alpha a† - conj(alpha) a) = exp(i H)
        Mat h = -kI * (alpha * a.adjoint() - std::conj(alpha) * a);
        return h;
    });
    return {std::move(u), 1, cutoff, CvGate::Displacement};
}

CvGateMatrix rotation_matrix(double phi, int cutoff) {
    require_cutoff(cutoff);
    Mat u = Mat::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) u(n, n) = std::exp(kI * (phi * n));
    return {std::move(u), 1, cutoff, CvGate::Rotation};
}

CvGateMatrix squeezing_matrix(double r, int cutoff, int pad) {
    require_cutoff(cutoff);
    Mat u = padded_one_mode(cutoff, pad, [&](int dp) {
        Mat a = annihilation_matrix(dp);
        Mat a2 = a * a;
        Mat h = -kI * (0.5 * r * (a2 - a2.adjoint()));
        return h;
    });
    return {std::move(u), 1, cutoff, CvGate::Squeezing};
}

// Default pad = 0: the exact cubic-phase operator throws mass far above any
// cutoff (its columns never keep unit norm in a truncated basis), so the gate
// is the exponential of the truncated generator, exactly unitary at the
// working dimension.
CvGateMatrix cubic_phase_matrix(double gamma, int cutoff, int pad) {
    require_cutoff(cutoff);
    Mat u = padded_one_mode(cutoff, pad, [&](int dp) {
        Mat a = annihilation_matrix(dp);
        Mat x = a + a.adjoint();
        Mat h = (gamma / 3.0) * (x * x * x);
        return h;
    });
    return {std::move(u), 1, cutoff, CvGate::CubicPhase};
}

CvGateMatrix kerr_matrix(double kappa, int cutoff) {
    require_cutoff(cutoff);
    Mat u = Mat::Zero(cutoff, cutoff);
    for (int n = 0; n < cutoff; ++n) u(n, n) = std::exp(kI * (kappa * n * n));
    return {std::move(u), 1, cutoff, CvGate::Kerr};
}

CvGateMatrix cross_kerr_matrix(double kappa, int cutoff) {
    require_cutoff(cutoff);
    int dim = cutoff * cutoff;
    Mat u = Mat::Zero(dim, dim);
    for (int n1 = 0; n1 < cutoff; ++n1)
        for (int n2 = 0; n2 < cutoff; ++n2)
            u(n1 * cutoff + n2, n1 * cutoff + n2) = std::exp(kI * (kappa * n1 * n2));
    return {std::move(u), 2, cutoff, CvGate::CrossKerr};
}

// The beamsplitter generator commutes with the total photon number, so it is
// exactly block-diagonal over N = n1 + n2 even after truncation. Each block is
// a small tridiagonal Hermitian problem; exponentiating per block is identical
// to exponentiating the full (cutoff+pad)²-dimensional generator and orders of
// magnitude cheaper (the dense route is cross-checked in the tests).
CvGateMatrix beamsplitter_matrix(double theta, double phi, int cutoff, int pad) {
    require_cutoff(cutoff);
    int dp = cutoff + pad;
    int dim = cutoff * cutoff;
    Mat u = Mat::Zero(dim, dim);
    Complex coupling = theta * std::exp(kI * phi);
    for (int total = 0; total <= 2 * (dp - 1); ++total) {
        int lo = std::max(0, total - (dp - 1));
        int hi = std::min(dp - 1, total);
        int size = hi - lo + 1;
        // Block basis |n1, total - n1>, n1 = lo..hi. a†b couples n1 -> n1+1 with
        // amplitude sqrt((n1+1)(total-n1)); generator = i * H with H Hermitian.
        Mat h = Mat::Zero(size, size);
        for (int k = 0; k + 1 < size; ++k) {
            int n1 = lo + k;
            double amp = std::sqrt(static_cast<double>((n1 + 1) * (total - n1)));
            h(k + 1, k) = -kI * coupling * amp;
            h(k, k + 1) = std::conj(h(k + 1, k));
        }
        Mat block = exp_i_hermitian(h);
        for (int rk = 0; rk < size; ++rk) {
            int r1 = lo + rk, r2 = total - r1;
            if (r1 >= cutoff || r2 >= cutoff) continue;
            for (int ck = 0; ck < size; ++ck) {
                int c1 = lo + ck, c2 = total - c1;
                if (c1 >= cutoff || c2 >= cutoff) continue;
                u(r1 * cutoff + r2, c1 * cutoff + c2) = block(rk, ck);
            }
        }
    }
    return {std::move(u), 2, cutoff, CvGate::Beamsplitter};
}

CvGateMatrix gate_matrix(CvGate kind, std::span<const double> params, int cutoff, int pad) {
    require_finite(params);
    auto want = [&](std::size_t n) {
        if (params.size() != n)
            throw ConfigError(std::string("wrong parameter count for gate ") +
                              cv_gate_name(kind));
    };
    int p = (pad >= 0) ? pad : kDefaultPad;
    switch (kind) {
        case CvGate::Displacement:
            want(2);
            return displacement_matrix(Complex(params[0], params[1]), cutoff, p);
        case CvGate::Rotation:
            want(1);
            return rotation_matrix(params[0], cutoff);
        case CvGate::Squeezing:
            want(1);
            return squeezing_matrix(params[0], cutoff, p);
        case CvGate::Beamsplitter:
            want(2);
            return beamsplitter_matrix(params[0], params[1], cutoff, p);
        case CvGate::Kerr:
            want(1);
            return kerr_matrix(params[0], cutoff);
        case CvGate::CrossKerr:
            want(1);
            return cross_kerr_matrix(params[0], cutoff);
        case CvGate::CubicPhase:
            want(1);
            return cubic_phase_matrix(params[0], cutoff, pad >= 0 ? pad : 0);
    }
    throw ConfigError("unknown gate kind");
}

namespace {

struct GateKey {
    CvGate kind;
    int cutoff;
    int pad;
    std::int64_t p0, p1;

    bool operator==(const GateKey& o) const = default;
};

struct GateKeyHash {
    std::size_t operator()(const GateKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        mix(static_cast<std::uint64_t>(k.kind));
        mix(static_cast<std::uint64_t>(k.cutoff));
        mix(static_cast<std::uint64_t>(k.pad));
        mix(static_cast<std::uint64_t>(k.p0));
        mix(static_cast<std::uint64_t>(k.p1));
        return static_cast<std::size_t>(h);
    }
};

std::int64_t quantize(double p) { return std::llround(p * 1e12); }

std::mutex g_cache_mutex;
std::unordered_map<GateKey, std::shared_ptr<const CvGateMatrix>, GateKeyHash> g_cache;

}  // namespace

std::shared_ptr<const CvGateMatrix> cached_gate(CvGate kind, std::span<const double> params,
                                                int cutoff, int pad) {
    require_finite(params);
    if (pad < 0) pad = (kind == CvGate::CubicPhase) ? 0 : kDefaultPad;
    GateKey key{kind, cutoff, pad, params.size() > 0 ? quantize(params[0]) : 0,
                params.size() > 1 ? quantize(params[1]) : 0};
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    auto built = std::make_shared<const CvGateMatrix>(gate_matrix(kind, params, cutoff, pad));
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto [it, inserted] = g_cache.emplace(key, std::move(built));
    return it->second;
}

void clear_gate_cache() {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_cache.clear();
}

std::size_t gate_cache_size() {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    return g_cache.size();
}

FockState apply_gate(const FockState& state, const CvGateMatrix& gate,
                     std::span<const int> wires) {
    int m = state.modes;
    int d = state.cutoff;
    require(gate.cutoff == d, "gate cutoff does not match state cutoff");
    require(static_cast<int>(wires.size()) == gate.arity,
            "wire count does not match gate arity");
    for (int w : wires) require(w >= 0 && w < m, "wire index out of range");
    if (gate.arity == 2) require(wires[0] != wires[1], "wires must be distinct");

    auto stride = [&](int wire) {
        std::int64_t s = 1;
        for (int q = wire + 1; q < m; ++q) s *= d;
        return s;
    };

    FockState out = state;
    const Vec& src = state.amplitudes;
    Vec& dst = out.amplitudes;
    std::int64_t dim = src.size();

    if (gate.arity == 1) {
        std::int64_t s = stride(wires[0]);
        Vec x(d), y(d);
        for (std::int64_t base = 0; base < dim; ++base) {
            if ((base / s) % d != 0) continue;
            for (int n = 0; n < d; ++n) x(n) = src(base + n * s);
            y.noalias() = gate.entries * x;
            for (int n = 0; n < d; ++n) dst(base + n * s) = y(n);
        }
    } else {
        std::int64_t s0 = stride(wires[0]);
        std::int64_t s1 = stride(wires[1]);
        Vec x(d * d), y(d * d);
        for (std::int64_t base = 0; base < dim; ++base) {
            if ((base / s0) % d != 0 || (base / s1) % d != 0) continue;
            for (int n0 = 0; n0 < d; ++n0)
                for (int n1 = 0; n1 < d; ++n1)
                    x(n0 * d + n1) = src(base + n0 * s0 + n1 * s1);
            y.noalias() = gate.entries * x;
            for (int n0 = 0; n0 < d; ++n0)
                for (int n1 = 0; n1 < d; ++n1)
                    dst(base + n0 * s0 + n1 * s1) = y(n0 * d + n1);
        }
    }

    double drift = std::abs(out.squared_norm() - 1.0);
    if (drift > kNormDriftWarn) {
        ++out.truncation_warnings;
        out.worst_drift = std::max(out.worst_drift, drift);
    }
    return out;
}

Complex quadrature_expectation_raw(const FockState& state, int wire) {
    require(wire >= 0 && wire < state.modes, "wire index out of range");
    int d = state.cutoff;
    std::int64_t s = 1;
    for (int q = wire + 1; q < state.modes; ++q) s *= d;
    const Vec& amp = state.amplitudes;
    Complex acc = 0.0;
    for (std::int64_t i = 0; i < amp.size(); ++i) {
        int n = static_cast<int>((i / s) % d);
        Complex v = 0.0;
        if (n + 1 < d) v += std::sqrt(n + 1.0) * amp(i + s);  // a
        if (n > 0) v += std::sqrt(static_cast<double>(n)) * amp(i - s);  // a†
        acc += std::conj(amp(i)) * v;
    }
    return acc;
}

double quadrature_expectation(const FockState& state, int wire) {
    return quadrature_expectation_raw(state, wire).real();
}

}  // namespace qnnf::fock
