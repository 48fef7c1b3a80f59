#include <doctest.h>

#include <numbers>
#include <random>

#include "msindex/maslov.hpp"
#include "msindex/selftest.hpp"

using namespace msi;
using std::numbers::pi;

namespace {

RMat rot(double t) {
    RMat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return R;
}

RMat diag2(double a, double b) {
    RMat D = RMat::Zero(2, 2);
    D(0, 0) = a;
    D(1, 1) = b;
    return D;
}

}  // namespace

TEST_CASE("standard J") {
    RMat J1 = standard_J(1);
    RMat expect(2, 2);
    expect << 0, -1, 1, 0;
    CHECK(J1 == expect);
    const RMat J3 = standard_J(3);
    CHECK((J3 * J3 + RMat::Identity(6, 6)).norm() == 0.0);
    const RMat J2 = standard_J(2);
    CHECK((J2.transpose() + J2).norm() == 0.0);
}

TEST_CASE("is_symplectic") {
    CHECK(is_symplectic(CMat::Identity(4, 4)));
    CHECK(is_symplectic(diag2(2, 0.5).cast<cplx>()));
    CHECK_FALSE(is_symplectic(diag2(2, 2).cast<cplx>()));
    CHECK_THROWS_AS(is_symplectic(CMat::Identity(3, 3)), DimensionError);
}

TEST_CASE("diamond product") {
    CHECK(diamond(RMat(RMat::Identity(2, 2)), RMat(RMat::Identity(2, 2))) == RMat::Identity(4, 4));
    // D(2) diamond D(2) = diag(2, 2, 1/2, 1/2)
    const RMat M = diamond(diag2(2, 0.5), diag2(2, 0.5));
    RMat expect = RMat::Zero(4, 4);
    expect.diagonal() << 2, 2, 0.5, 0.5;
    CHECK((M - expect).norm() == 0.0);
    CHECK_THROWS_AS(diamond(RMat(RMat::Identity(3, 3)), RMat(RMat::Identity(2, 2))), DimensionError);

    std::mt19937_64 rng(11);
    for (int c = 0; c < 20; ++c) {
        const RMat S1 = gen::symplectic(rng, 1 + c % 2, false, 0.6);
        const RMat S2 = gen::symplectic(rng, 1 + c % 3, c % 2 == 0, 0.6);
        const RMat S3 = gen::symplectic(rng, 1, true, 0.6);
        const CMat D = diamond(S1, S2).cast<cplx>();
        CHECK(symplectic_defect(D) < 1e-10 * std::max(1.0, D.squaredNorm()));
        // associativity: both bracketings agree exactly
        CHECK((diamond(diamond(S1, S2), S3) - diamond(S1, diamond(S2, S3))).norm() == 0.0);
    }
}

TEST_CASE("graph frame") {
    const CMat F = graph_frame(CMat::Identity(2, 2));
    CHECK(F.rows() == 4);
    CHECK(F.cols() == 2);
    // the diagonal: top and bottom halves equal
    CHECK((F.topRows(2) - F.bottomRows(2)).norm() == 0.0);
    const SymplecticSpace gs = SymplecticSpace::graph(1);
    CHECK(gs.isotropy_residual(graph_frame(standard_J(1).cast<cplx>())) < 1e-14);
    CHECK_THROWS_AS(graph_frame(diag2(2, 2).cast<cplx>()), NotSymplecticError);

    std::mt19937_64 rng(3);
    for (int c = 0; c < 20; ++c) {
        const int n = 1 + c % 3;
        const CMat M = gen::symplectic(rng, n, false, 0.5).cast<cplx>();
        const CMat Z = graph_frame(M);
        const CMat X = Z.topRows(2 * n), Y = Z.bottomRows(2 * n);
        // isotropy for (-J) + J: X^* J X = Y^* J Y
        const CMat Jc = standard_J(n).cast<cplx>();
        CHECK((X.adjoint() * Jc * X - Y.adjoint() * Jc * Y).norm() <= 1e-10 * std::max(1.0, norm2(M)));
    }
}

TEST_CASE("hermitian signature") {
    CHECK(hermitian_signature(CMat::Zero(3, 3)) == Signature{0, 3, 0});
    CHECK(hermitian_signature(diag2(1, -1).cast<cplx>()) == Signature{1, 0, 1});
    CMat X(2, 2);
    X << 0, 1, 1, 0;
    CHECK(hermitian_signature(X) == Signature{1, 0, 1});
    CMat bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(hermitian_signature(bad), NotHermitianError);
}

TEST_CASE("krein types against the dense oracle") {
    const KreinType id = krein_type(CMat::Identity(2, 2), 1.0);
    CHECK(id.p == 1);
    CHECK(id.q == 1);
    const KreinType id3 = krein_type(CMat::Identity(6, 6), 1.0);
    CHECK(id3.p == 3);
    CHECK(id3.q == 3);
    CHECK_THROWS_AS(krein_type(diag2(2, 0.5).cast<cplx>(), 1.0), SpectralError);

    const cplx w = std::polar(1.0, pi / 3);
    const KreinType r = krein_type(rot(pi / 3).cast<cplx>(), w);
    CHECK(r.p == 1);
    CHECK(r.q == 0);
    const KreinType rr = krein_type(diamond(rot(pi / 3), rot(pi / 3)).cast<cplx>(), w);
    CHECK(rr.p == 2);
    CHECK(rr.q == 0);
    CHECK(rr.algebraic_multiplicity == 2);
    // stable under a small perturbation of the angle
    const double th = pi / 3 + 1e-3;
    const KreinType rp = krein_type(diamond(rot(th), rot(th)).cast<cplx>(), std::polar(1.0, th));
    CHECK(rp.p == 2);
    CHECK(rp.q == 0);

    // Jordan blocks at i for [[A, 0], [A, A]], A a quarter turn
    RMat P = RMat::Zero(4, 4);
    P.topLeftCorner(2, 2) = rot(pi / 2);
    P.bottomLeftCorner(2, 2) = rot(pi / 2);
    P.bottomRightCorner(2, 2) = rot(pi / 2);
    const KreinType jb = krein_type(P.cast<cplx>(), cplx(0, 1));
    CHECK(jb.p == 1);
    CHECK(jb.q == 1);

    // [[I, 0], [G, I]] with G = diag(1, -1)
    RMat L = RMat::Identity(4, 4);
    L(2, 0) = 1;
    L(3, 1) = -1;
    const KreinType lo = krein_type(L.cast<cplx>(), 1.0);
    CHECK(lo.p == 2);
    CHECK(lo.q == 2);
}

TEST_CASE("d_omega") {
    CHECK(std::abs(d_omega(CMat::Identity(2, 2), 1.0)) < 1e-15);
    CHECK(d_omega(diag2(2, 0.5).cast<cplx>(), 1.0).real() == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(d_omega(rot(pi / 2).cast<cplx>(), 1.0).real() == doctest::Approx(2.0).epsilon(1e-14));
    const cplx v = d_omega(rot(pi / 3).cast<cplx>(), cplx(0, 1));
    CHECK(v.real() == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::abs(v.imag()) < 1e-13);
    const cplx u = d_omega(diamond(rot(pi / 3), diag2(2, 0.5)).cast<cplx>(), -1.0);
    CHECK(u.real() == doctest::Approx(-13.5).epsilon(1e-13));
    CHECK(std::abs(u.imag()) < 1e-13);
}

TEST_CASE("d_omega vanishes exactly on the spectrum") {
    std::mt19937_64 rng(5);
    for (int c = 0; c < 20; ++c) {
        const CMat M = gen::symplectic(rng, 1 + c % 2, true, 0.8).cast<cplx>();
        for (const auto& e : eigen_clusters(M, 1e-8)) {
            if (std::abs(std::abs(e.center) - 1.0) > 1e-8) continue;
            CHECK(std::abs(d_omega(M, e.center / std::abs(e.center))) < 1e-8 * std::max(1.0, norm2(M)));
        }
        const cplx off = std::polar(1.0, 0.123 + c);
        bool far = true;
        for (const auto& e : eigen_clusters(M, 1e-8)) far = far && std::abs(e.center - off) > 1e-3;
        if (far) CHECK(std::abs(d_omega(M, off)) > 1e-12);
    }
}

TEST_CASE("symplectic matrices have unit determinant") {
    std::mt19937_64 rng(17);
    for (int c = 0; c < 30; ++c) {
        const RMat M = gen::symplectic(rng, 1 + c % 3, c % 2 == 0, 0.7);
        CHECK(std::abs(M.determinant() - 1.0) < 1e-9);
    }
}

TEST_CASE("nullity") {
    CHECK(nullity(CMat::Identity(3, 3), 1.0) == 3);
    CHECK(nullity(CMat::Identity(3, 3), -1.0) == 0);
    CHECK(nullity(rot(2 * pi / 3).cast<cplx>(), std::polar(1.0, 2 * pi / 3)) == 1);
}

TEST_CASE("matrix exponential and the polar path") {
    const RMat E = expm(RMat(standard_J(1) * (pi / 2)));
    CHECK((E - rot(pi / 2)).norm() < 1e-14);
    RMat P = RMat::Zero(2, 2);
    P << 1.25, 0.75, 0.75, 1.25;
    const PolarPath path(rot(0.4).cast<cplx>() * P.cast<cplx>());
    CHECK((path(0.0) - CMat::Identity(2, 2)).norm() < 1e-13);
    CHECK((path(1.0) - path.endpoint()).norm() < 1e-12);
    for (double t : {0.1, 0.37, 0.8}) CHECK(symplectic_defect(path(t)) < 1e-12);
}

TEST_CASE("darboux basis") {
    std::mt19937_64 rng(2);
    const RMat S = gen::symplectic(rng, 2, false, 0.3);
    // an orthogonal conjugate of J is again a complex structure
    Eigen::HouseholderQR<RMat> qr(S);
    const RMat Q = qr.householderQ();
    const RMat F = Q * standard_J(2) * Q.transpose();
    const RMat D = darboux_basis(F);
    CHECK((D.transpose() * D - RMat::Identity(4, 4)).norm() < 1e-12);
    CHECK((D.transpose() * F * D - standard_J(2)).norm() < 1e-12);
}
