#include <doctest.h>

#include <qnnf/errors.hpp>
#include <qnnf/fock.hpp>
#include <qnnf/rng.hpp>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"

using namespace qnnf;
using namespace qnnf::fock;
using oracles::Cx;

TEST_CASE("vacuum state") {
    FockState v = vacuum_state(1, 4);
    CHECK(v.amplitudes.size() == 4);
    CHECK(v.amplitudes(0) == Complex(1.0, 0.0));
    CHECK(v.amplitudes.tail(3).cwiseAbs().maxCoeff() == 0.0);

    FockState v2 = vacuum_state(2, 3);
    CHECK(v2.amplitudes.size() == 9);
    CHECK(v2.amplitudes(0) == Complex(1.0, 0.0));
    CHECK(v2.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(vacuum_state(0, 4), ConfigError);
    CHECK_THROWS_AS(vacuum_state(1, 1), ConfigError);
}

TEST_CASE("ladder operators and commutator") {
    const int D = 8;
    Mat a = annihilation_matrix(D);
    for (int n = 1; n < D; ++n) CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(n)));
    Mat comm = a * creation_matrix(D) - creation_matrix(D) * a;
    // identity away from the truncation boundary
    for (int i = 0; i < D - 1; ++i)
        for (int j = 0; j < D - 1; ++j)
            CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("displacement matrix matches the Laguerre closed form") {
    const int D = 12;
    SUBCASE("alpha = 0 is the identity") {
        CvGateMatrix g = displacement_matrix(0.0, 4);
        CHECK((g.entries - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("entrywise vs oracle on the low block") {
        for (Cx alpha : {Cx(0.3, 0.0), Cx(0.5, -0.2), Cx(-0.8, 0.4)}) {
            CvGateMatrix g = displacement_matrix(alpha, D);
            for (int m = 0; m <= 6; ++m)
                for (int n = 0; n <= 6; ++n)
                    CHECK(std::abs(g.entries(m, n) - oracles::displacement_entry(m, n, alpha)) <
                          1e-8);
        }
    }
    SUBCASE("vacuum-to-vacuum amplitude at alpha = 0.3") {
        CvGateMatrix g = displacement_matrix(0.3, D);
        CHECK(g.entries(0, 0).real() == doctest::Approx(std::exp(-0.045)).epsilon(1e-9));
        CHECK(std::abs(g.entries(0, 0).imag()) < 1e-12);
    }
}

TEST_CASE("squeezing matrix matches the normal-ordered closed form") {
    const int D = 12;
    SUBCASE("squeezed vacuum at r = 0.5") {
        CvGateMatrix g = squeezing_matrix(0.5, D);
        CHECK(g.entries(0, 0).real() ==
              doctest::Approx(1.0 / std::sqrt(std::cosh(0.5))).epsilon(1e-9));
    }
    SUBCASE("entrywise vs oracle on the low block") {
        for (double r : {0.3, 0.5, -0.7}) {
            CvGateMatrix g = squeezing_matrix(r, D);
            for (int m = 0; m <= 6; ++m)
                for (int n = 0; n <= 6; ++n)
                    CHECK(std::abs(g.entries(m, n) - oracles::squeezing_entry(m, n, r)) < 1e-8);
        }
    }
}

TEST_CASE("rotation and Kerr family are diagonal and exactly unitary") {
    CvGateMatrix r = rotation_matrix(M_PI, 3);
    CHECK(std::abs(r.entries(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(r.entries(1, 1) - Complex(-1, 0)) < 1e-15);
    CHECK(std::abs(r.entries(2, 2) - Complex(1, 0)) < 2e-15);

    CvGateMatrix k = kerr_matrix(0.1, 6);
    CHECK(std::abs(k.entries(3, 3) - std::exp(Complex(0, 0.9))) < 1e-14);
    CvGateMatrix k0 = kerr_matrix(0.0, 5);
    CHECK((k0.entries - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);

    CvGateMatrix ck = cross_kerr_matrix(0.2, 3);
    CHECK(ck.arity == 2);
    CHECK(std::abs(ck.entries(2 * 3 + 2, 2 * 3 + 2) - std::exp(Complex(0, 0.8))) < 1e-14);

    for (const CvGateMatrix* g : {&r, &k, &ck}) {
        for (int i = 0; i < g->entries.rows(); ++i) {
            for (int j = 0; j < g->entries.cols(); ++j) {
                if (i == j)
                    CHECK(std::abs(std::abs(g->entries(i, i)) - 1.0) < 1e-12);
                else
                    CHECK(g->entries(i, j) == Complex(0, 0));
            }
        }
    }
}

TEST_CASE("beamsplitter") {
    SUBCASE("theta = 0 is the identity on D^2") {
        CvGateMatrix g = beamsplitter_matrix(0.0, 0.0, 3);
        CHECK((g.entries - Mat::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("block exponentiation agrees with a dense matrix exponential") {
        const int D = 6, pad = 4, Dp = D + pad;
        Mat a = annihilation_matrix(Dp);
        Mat ad = creation_matrix(Dp);
        double theta = 0.6, phi = 0.35;
        Mat gen = theta * (std::exp(Complex(0, phi)) * kroneckerProduct(ad, a).eval() -
                           std::exp(Complex(0, -phi)) * kroneckerProduct(a, ad).eval());
        Mat dense = gen.exp();
        CvGateMatrix g = beamsplitter_matrix(theta, phi, D, pad);
        for (int r1 = 0; r1 < D; ++r1)
            for (int r2 = 0; r2 < D; ++r2)
                for (int c1 = 0; c1 < D; ++c1)
                    for (int c2 = 0; c2 < D; ++c2)
                        CHECK(std::abs(g.entries(r1 * D + r2, c1 * D + c2) -
                                       dense(r1 * Dp + r2, c1 * Dp + c2)) < 1e-12);
    }
    SUBCASE("two-photon interference null at the 50:50 point") {
        for (int D : {3, 6, 12}) {
            CvGateMatrix g = beamsplitter_matrix(M_PI / 4, 0.0, D);
            int idx11 = 1 * D + 1;
            CHECK(std::abs(g.entries(idx11, idx11)) < 1e-10);
        }
    }
}

TEST_CASE("gate_matrix dispatch validates parameters") {
    double p2[] = {0.1, 0.2};
    double p1[] = {0.1};
    CHECK(gate_matrix(CvGate::Beamsplitter, p2, 4).arity == 2);
    CHECK(gate_matrix(CvGate::Rotation, p1, 4).arity == 1);
    CHECK_THROWS_AS(gate_matrix(CvGate::Rotation, p2, 4), ConfigError);
    CHECK_THROWS_AS(gate_matrix(CvGate::Beamsplitter, p1, 4), ConfigError);
    double bad[] = {std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(gate_matrix(CvGate::Kerr, bad, 4), ConfigError);
}

// Unitarity after truncation is parameter- and column-dependent: a truncated
// column can only keep unit norm when the exact operator leaves it below the
// cutoff. The bounds here are the ones the exact operators actually obey at
// cutoff 12 (checked against large-dimension dense exponentials offline).
TEST_CASE("unitarity at cutoff 12") {
    const int D = 12;
    auto max_dev = [](const Mat& u) {
        Mat prod = u.adjoint() * u;
        return (prod - Mat::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff();
    };
    SUBCASE("diagonal kinds and the working-dim cubic phase are exactly unitary") {
        CHECK(max_dev(rotation_matrix(0.8, D).entries) < 1e-12);
        CHECK(max_dev(kerr_matrix(1.0, D).entries) < 1e-12);
        CHECK(max_dev(cross_kerr_matrix(1.0, D).entries) < 1e-12);
        CHECK(max_dev(cubic_phase_matrix(0.9, D).entries) < 1e-10);
    }
    SUBCASE("beamsplitter is exact on every photon-number block inside the cutoff") {
        Mat u = beamsplitter_matrix(0.9, 0.4, D).entries;
        Mat prod = u.adjoint() * u;
        for (int i = 0; i < D * D; ++i) {
            if (i / D + i % D > D - 1) continue;
            for (int j = 0; j < D * D; ++j) {
                if (j / D + j % D > D - 1) continue;
                CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
    SUBCASE("displacement keeps the low block unitary at model-scale amplitudes") {
        Mat u = displacement_matrix(Cx(0.2, 0.15), D).entries;
        Mat prod = u.adjoint() * u;
        for (int i = 0; i <= 6; ++i)
            for (int j = 0; j <= 6; ++j)
                CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);
    }
    SUBCASE("squeezed vacuum column keeps unit norm") {
        CHECK(squeezing_matrix(0.3, D).entries.col(0).norm() ==
              doctest::Approx(1.0).epsilon(1e-6));
        CHECK(squeezing_matrix(0.3, D).entries.col(1).norm() ==
              doctest::Approx(1.0).epsilon(2e-6));
    }
}

TEST_CASE("column norms within the cutoff") {
    const int D = 12;
    CvGateMatrix d = displacement_matrix(0.25, D);
    for (int n = 0; n <= D / 2; ++n)
        CHECK(d.entries.col(n).norm() == doctest::Approx(1.0).epsilon(1e-6));
    CvGateMatrix v = cubic_phase_matrix(0.5, D);
    for (int n = 0; n < D; ++n)
        CHECK(v.entries.col(n).norm() == doctest::Approx(1.0).epsilon(1e-10));
    CvGateMatrix bs = beamsplitter_matrix(0.8, 0.2, D);
    for (int n1 = 0; n1 < D; ++n1)
        for (int n2 = 0; n2 < D; ++n2)
            if (n1 + n2 <= D / 2)
                CHECK(bs.entries.col(n1 * D + n2).norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("apply_gate") {
    SUBCASE("identity leaves the state unchanged") {
        FockState v = vacuum_state(2, 4);
        FockState w = apply_gate(v, rotation_matrix(0.0, 4), std::vector<int>{1});
        CHECK((w.amplitudes - v.amplitudes).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("coherent amplitudes from displacing the vacuum") {
        const int D = 12;
        FockState s = apply_gate(vacuum_state(1, D), displacement_matrix(0.5, D),
                                 std::vector<int>{0});
        CHECK(std::abs(s.amplitudes(0) - std::exp(Complex(-0.125, 0))) < 1e-9);
        for (int n = 0; n < 8; ++n)
            CHECK(std::abs(s.amplitudes(n) - oracles::coherent_amplitude(n, 0.5)) < 1e-9);
        CHECK(s.truncation_warnings == 0);
    }
    SUBCASE("two-photon coalescence |1,1> -> (|2,0> - |0,2>)/sqrt(2)") {
        const int D = 4;
        FockState s = vacuum_state(2, D);
        s.amplitudes.setZero();
        s.amplitudes(1 * D + 1) = 1.0;
        FockState out = apply_gate(s, beamsplitter_matrix(M_PI / 4, 0.0, D),
                                   std::vector<int>{0, 1});
        CHECK(std::abs(out.amplitudes(1 * D + 1)) < 1e-10);
        CHECK(std::abs(out.amplitudes(2 * D + 0)) == doctest::Approx(1 / std::sqrt(2)).epsilon(1e-9));
        CHECK(std::abs(out.amplitudes(0 * D + 2)) == doctest::Approx(1 / std::sqrt(2)).epsilon(1e-9));
        CHECK(out.squared_norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("gate on a middle wire of a 3-mode state") {
        const int D = 5;
        FockState s = apply_gate(vacuum_state(3, D), displacement_matrix(0.4, D),
                                 std::vector<int>{1});
        // mode 1 carries the coherent amplitudes; modes 0 and 2 stay in vacuum
        for (int n = 0; n < D; ++n) {
            int idx = n * D;  // (0, n, 0)
            CHECK(std::abs(s.amplitudes(idx) - oracles::coherent_amplitude(n, 0.4)) < 1e-9);
        }
        CHECK(std::abs(s.amplitudes(1)) == 0.0);            // (0,0,1)
        CHECK(std::abs(s.amplitudes(D * D)) < 1e-12);       // (1,0,0)
    }
    SUBCASE("wire validation") {
        FockState v = vacuum_state(2, 4);
        CHECK_THROWS_AS(apply_gate(v, rotation_matrix(0.1, 4), std::vector<int>{2}),
                        ConfigError);
        CHECK_THROWS_AS(apply_gate(v, beamsplitter_matrix(0.1, 0.0, 4), std::vector<int>{0}),
                        ConfigError);
        CHECK_THROWS_AS(apply_gate(v, beamsplitter_matrix(0.1, 0.0, 4), std::vector<int>{1, 1}),
                        ConfigError);
        CHECK_THROWS_AS(apply_gate(v, rotation_matrix(0.1, 3), std::vector<int>{0}),
                        ConfigError);
    }
    SUBCASE("norm drift from an encoding too large for the cutoff is surfaced") {
        const int D = 6;
        FockState s = apply_gate(vacuum_state(1, D), displacement_matrix(3.0, D, 2),
                                 std::vector<int>{0});
        CHECK(s.truncation_warnings >= 1);
        CHECK(s.worst_drift > kNormDriftWarn);
    }
}

TEST_CASE("gate composed with its negated-parameter inverse is the identity") {
    const int D = 12;
    Pcg32 rng(7);
    FockState base = apply_gate(vacuum_state(2, D), displacement_matrix(Cx(0.3, 0.1), D),
                                std::vector<int>{0});
    auto roundtrip = [&](const CvGateMatrix& g, const CvGateMatrix& ginv,
                         std::vector<int> wires) {
        FockState mid = apply_gate(base, g, wires);
        FockState back = apply_gate(mid, ginv, wires);
        CHECK((back.amplitudes - base.amplitudes).cwiseAbs().maxCoeff() < 1e-8);
    };
    // Exactly-invertible kinds (diagonals, complete-block beamsplitter, the
    // working-dim cubic phase) meet 1e-8 at any magnitude <= 1. Displacement
    // and squeezing carry the exact operator's above-cutoff flux, so their
    // roundtrips only reach 1e-8 while that flux is negligible.
    for (int trial = 0; trial < 3; ++trial) {
        double p = rng.uniform(-1.0, 1.0);
        double q = rng.uniform(-1.0, 1.0);
        roundtrip(rotation_matrix(p, D), rotation_matrix(-p, D), {0});
        roundtrip(kerr_matrix(p, D), kerr_matrix(-p, D), {0});
        roundtrip(cubic_phase_matrix(p, D), cubic_phase_matrix(-p, D), {0});
        roundtrip(beamsplitter_matrix(p, q, D), beamsplitter_matrix(-p, q, D), {0, 1});
        roundtrip(cross_kerr_matrix(p, D), cross_kerr_matrix(-p, D), {0, 1});
        Cx alpha(0.2 * p, 0.1 * q);
        roundtrip(displacement_matrix(alpha, D), displacement_matrix(-alpha, D), {0});
        roundtrip(squeezing_matrix(0.05 * p, D), squeezing_matrix(-0.05 * p, D), {1});
    }
    SUBCASE("squeeze roundtrip error at model scale is bounded by the flux") {
        FockState mid = apply_gate(base, squeezing_matrix(0.5, D), std::vector<int>{0});
        FockState back = apply_gate(mid, squeezing_matrix(-0.5, D), std::vector<int>{0});
        CHECK((back.amplitudes - base.amplitudes).cwiseAbs().maxCoeff() < 5e-3);
    }
}

TEST_CASE("quadrature expectation") {
    const int D = 12;
    SUBCASE("vacuum gives zero") {
        CHECK(quadrature_expectation(vacuum_state(2, D), 0) == 0.0);
        CHECK(quadrature_expectation(vacuum_state(2, D), 1) == 0.0);
    }
    SUBCASE("coherent state gives 2 Re(alpha)") {
        for (double x : {0.1, 0.25, 0.5, 0.9}) {
            FockState s = apply_gate(vacuum_state(1, D), displacement_matrix(x, D),
                                     std::vector<int>{0});
            CHECK(quadrature_expectation(s, 0) == doctest::Approx(2.0 * x).epsilon(1e-6));
        }
    }
    SUBCASE("a quarter rotation moves x into p") {
        FockState s = apply_gate(vacuum_state(1, D), displacement_matrix(0.5, D),
                                 std::vector<int>{0});
        s = apply_gate(s, rotation_matrix(M_PI / 2, D), std::vector<int>{0});
        CHECK(std::abs(quadrature_expectation(s, 0)) < 1e-6);
    }
    SUBCASE("raw expectation is real") {
        Pcg32 rng(3);
        FockState s = vacuum_state(2, 8);
        s = apply_gate(s, displacement_matrix(Cx(0.4, 0.3), 8), std::vector<int>{0});
        s = apply_gate(s, beamsplitter_matrix(0.7, 0.2, 8), std::vector<int>{0, 1});
        s = apply_gate(s, kerr_matrix(0.5, 8), std::vector<int>{1});
        CHECK(std::abs(quadrature_expectation_raw(s, 0).imag()) < 1e-10);
        CHECK(std::abs(quadrature_expectation_raw(s, 1).imag()) < 1e-10);
    }
    SUBCASE("wire out of range") {
        CHECK_THROWS_AS(quadrature_expectation(vacuum_state(1, 4), 1), ConfigError);
    }
}

TEST_CASE("gate cache reuses matrices keyed by rounded parameters") {
    clear_gate_cache();
    double p[] = {0.25};
    auto g1 = cached_gate(CvGate::Squeezing, p, 12);
    auto g2 = cached_gate(CvGate::Squeezing, p, 12);
    CHECK(g1.get() == g2.get());
    double p3[] = {0.25 + 1e-15};  // below quantization, same key
    CHECK(cached_gate(CvGate::Squeezing, p3, 12).get() == g1.get());
    double p4[] = {0.26};
    CHECK(cached_gate(CvGate::Squeezing, p4, 12).get() != g1.get());
    CHECK(cached_gate(CvGate::Squeezing, p, 10).get() != g1.get());
    CHECK(gate_cache_size() >= 3);
}
