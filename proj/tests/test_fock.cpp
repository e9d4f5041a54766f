#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "pf/fock.hpp"
#include "pf/rng.hpp"

using namespace pf;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

ModeSpace ms1() { return ModeSpace::uniform(VectorXd::Ones(1)); }

Eigen::MatrixXcd random_unitary_weighted(const ModeSpace& ms, Rng& rng) {
    const int M = ms.mode_count();
    Eigen::MatrixXcd A(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) A(i, j) = rng.cgaussian();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    // conjugate back so U is unitary for the weighted inner product
    const Eigen::VectorXd sq = ms.weight().cwiseSqrt();
    Eigen::MatrixXcd U(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) U(i, j) = Q(i, j) * sq[j] / sq[i];
    return U;
}

}  // namespace

TEST_CASE("mode space validation") {
    VectorXd om(2);
    om << 1.0, 0.0;
    CHECK_THROWS_AS(ModeSpace::uniform(om), std::invalid_argument);
    // frequency floor rescues degenerate entries
    ModeSpace floored(om, VectorXd::Ones(2), 0.1);
    CHECK(floored.omega()[1] == doctest::Approx(0.1));
    VectorXd w(2);
    w << 1.0, -1.0;
    CHECK_THROWS_AS(ModeSpace(VectorXd::Ones(2), w), std::invalid_argument);
}

TEST_CASE("weighted inner product is conjugate symmetric and positive") {
    Rng rng(11);
    VectorXd w(3);
    w << 0.5, 1.0, 2.0;
    ModeSpace ms(VectorXd::Ones(3), w);
    const VectorXcd f = rng.cvector(3);
    const VectorXcd h = rng.cvector(3);
    CHECK(std::abs(ms.inner(f, h) - std::conj(ms.inner(h, f))) < 1e-14);
    CHECK(std::real(ms.inner(f, f)) > 0.0);
}

TEST_CASE("basis dimension and index bijection") {
    FockBasis b(3, 5);
    CHECK(b.dim() == FockBasis::dimension_for(3, 5));  // binomial(8,3) = 56
    CHECK(b.dim() == 56);
    for (int i = 0; i < b.dim(); ++i) CHECK(b.index_of(b.state(i)) == i);
    CHECK(b.total_quanta(0) == 0);
}

TEST_CASE("exponential vector: vacuum, norm, cross overlap") {
    // h = 0 gives the vacuum
    {
        FockBasis b(2, 4);
        auto ms = ModeSpace::uniform(VectorXd::Ones(2));
        VectorXcd v = exponential_vector(VectorXcd::Zero(2), ms, b);
        CHECK(v[0] == cplx(1.0));
        CHECK(v.tail(v.size() - 1).norm() == 0.0);
    }
    // M=1, h=(1), N=30: <eps(h),eps(h)> = e
    {
        FockBasis b(1, 30);
        auto ms = ms1();
        VectorXcd h(1);
        h << 1.0;
        VectorXcd v = exponential_vector(h, ms, b);
        CHECK(std::abs(v.squaredNorm() - std::exp(1.0)) < 1e-10);
    }
    // M=2, g=(0.3, 0.1i), h=(0.2, -0.4): overlap = exp(0.06 + 0.04i)
    {
        FockBasis b(2, 25);
        auto ms = ModeSpace::uniform(VectorXd::Ones(2));
        VectorXcd g(2), h(2);
        g << 0.3, cplx(0.0, 0.1);
        h << 0.2, -0.4;
        const cplx z = ms.inner(g, h);
        CHECK(std::abs(z - cplx(0.06, 0.04)) < 1e-15);
        const cplx overlap = exponential_vector(g, ms, b).dot(exponential_vector(h, ms, b));
        CHECK(std::abs(overlap - std::exp(z)) <= exp_tail_bound(std::abs(z), 25) + 1e-15);
        CHECK(std::abs(overlap - std::exp(z)) < 1e-12);
    }
}

TEST_CASE("overlap error stays within the documented tail bound") {
    Rng rng(5);
    VectorXd w(2);
    w << 0.7, 1.4;
    ModeSpace ms(VectorXd::Ones(2), w);
    FockBasis b(2, 8);
    for (int t = 0; t < 25; ++t) {
        const VectorXcd g = rng.cvector(2, 0.6);
        const VectorXcd h = rng.cvector(2, 0.6);
        const cplx z = ms.inner(g, h);
        const cplx overlap = exponential_vector(g, ms, b).dot(exponential_vector(h, ms, b));
        // analytic truncation tail plus a roundoff allowance for the summation
        CHECK(std::abs(overlap - std::exp(z)) <=
              exp_tail_bound(std::abs(z), 8) * (1 + 1e-12) + 1e-13);
    }
}

TEST_CASE("field operator: zero input, hermiticity, linearity") {
    auto ms = ModeSpace::uniform(VectorXd::Ones(2));
    FockBasis b(2, 6);
    CHECK(field_operator(VectorXcd::Zero(2), ms, b).mat.nonZeros() == 0);

    Rng rng(7);
    const VectorXcd f1 = rng.cvector(2);
    const VectorXcd f2 = rng.cvector(2);
    FockOperator p1 = field_operator(f1, ms, b);
    CHECK(p1.hermiticity_defect() < 1e-13);

    const double lam = 0.37;
    const MatrixXcd lhs = field_operator(f1 + lam * f2, ms, b).dense();
    const MatrixXcd rhs = p1.dense() + lam * field_operator(f2, ms, b).dense();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("field operator matrix elements on exponential vectors") {
    // vacuum expectation of a linear field vanishes
    {
        auto ms = ms1();
        FockBasis b(1, 10);
        VectorXcd f(1);
        f << cplx(0.4, -0.2);
        const VectorXcd vac = exponential_vector(VectorXcd::Zero(1), ms, b);
        const cplx me = vac.dot(field_operator(f, ms, b).mat * vac);
        CHECK(std::abs(me) < 1e-15);
    }
    // <eps(g), phi(f) eps(h)> = (<f,h> + <g,f>) e^{<g,h>}
    {
        Rng rng(23);
        VectorXd w(2);
        w << 1.0, 1.0;
        ModeSpace ms(VectorXd::Ones(2), w);
        FockBasis b(2, 20);
        for (int t = 0; t < 10; ++t) {
            const VectorXcd f = rng.cvector(2, 0.15);
            const VectorXcd g = rng.cvector(2, 0.15);
            const VectorXcd h = rng.cvector(2, 0.15);
            const VectorXcd eg = exponential_vector(g, ms, b);
            const VectorXcd eh = exponential_vector(h, ms, b);
            const cplx me = eg.dot(field_operator(f, ms, b).mat * eh);
            const cplx expect = (ms.inner(f, h) + ms.inner(g, f)) * std::exp(ms.inner(g, h));
            CHECK(std::abs(me - expect) < 1e-9);
        }
    }
}

TEST_CASE("field commutator [phi(f),phi(g)] = 2i Im<f,g> on the interior") {
    Rng rng(31);
    VectorXd w(2);
    w << 0.8, 1.3;
    ModeSpace ms(VectorXd::Ones(2), w);
    FockBasis b(2, 8);
    const VectorXcd f = rng.cvector(2);
    const VectorXcd g = rng.cvector(2);
    const MatrixXcd comm = field_operator(f, ms, b).dense() * field_operator(g, ms, b).dense() -
                           field_operator(g, ms, b).dense() * field_operator(f, ms, b).dense();
    const cplx expected = cplx(0.0, 2.0) * std::imag(ms.inner(f, g));
    const auto interior = b.indices_with_quanta_at_most(b.max_quanta() - 2);
    const MatrixXcd blk = restrict_dense(comm, interior);
    const MatrixXcd ref =
        expected * MatrixXcd::Identity(interior.size(), interior.size());
    CHECK((blk - ref).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + std::abs(expected)));
}

TEST_CASE("second quantization diagonal") {
    FockBasis b(2, 4);
    VectorXd om(2);
    om << 1.0, 3.0;
    FockOperator dg = second_quantization(om, b);
    // vacuum eigenvalue 0
    CHECK(std::abs(dg.dense()(0, 0)) == 0.0);
    // state (2,1): 2*1 + 1*3 = 5
    const int i = b.index_of({2, 1});
    REQUIRE(i >= 0);
    CHECK(dg.dense()(i, i) == cplx(5.0));
    // dGamma(alpha w + m) = alpha dGamma(w) + m dGamma(1), exactly
    const double alpha = 2.5, m = 0.75;
    const MatrixXcd lhs = second_quantization((alpha * om.array() + m).matrix(), b).dense();
    const MatrixXcd rhs = alpha * dg.dense() +
                          m * second_quantization(VectorXd::Ones(2), b).dense();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
    // dGamma(1) is the number operator
    FockOperator num = second_quantization(VectorXd::Ones(2), b);
    for (int j = 0; j < b.dim(); ++j)
        CHECK(std::real(num.dense()(j, j)) == doctest::Approx(b.total_quanta(j)));
}

TEST_CASE("occupation lift acts on exponential vectors exactly") {
    Rng rng(41);
    VectorXd w(2);
    w << 0.6, 1.7;
    ModeSpace ms(VectorXd::Ones(2), w);
    FockBasis b(2, 7);
    const Eigen::MatrixXcd U = random_unitary_weighted(ms, rng);
    // scaled representative
    const Eigen::VectorXd sq = ms.weight().cwiseSqrt();
    Eigen::MatrixXcd Us(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Us(i, j) = sq[i] * U(i, j) / sq[j];
    FockOperator gam = occupation_lift(Us, b);
    const VectorXcd h = rng.cvector(2, 0.5);
    const VectorXcd lhs = gam.mat * exponential_vector(h, ms, b);
    const VectorXcd rhs = exponential_vector(U * h, ms, b);
    CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("weyl operator: identity, displacement of the vacuum, rejection") {
    VectorXd w(2);
    w << 1.0, 2.0;
    ModeSpace ms(VectorXd::Ones(2), w);
    FockBasis b(2, 20);

    // W(0, id) = identity
    FockOperator wid = weyl_operator(VectorXcd::Zero(2), Eigen::MatrixXcd::Identity(2, 2), ms, b);
    CHECK((wid.dense() - MatrixXcd::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() < 1e-12);

    // W(f,id) vacuum = exp(-|f|^2/2) eps(f)
    Rng rng(3);
    VectorXcd f = rng.cvector(2, 0.2);
    f *= 0.5 / std::max(0.5, ms.norm(f));
    FockOperator W = weyl_operator(f, Eigen::MatrixXcd::Identity(2, 2), ms, b);
    VectorXcd vac = VectorXcd::Zero(b.dim());
    vac[0] = 1.0;
    const VectorXcd lhs = W.mat * vac;
    const VectorXcd rhs =
        std::exp(-0.5 * ms.norm(f) * ms.norm(f)) * exponential_vector(f, ms, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 1.5;
    CHECK_THROWS_AS(weyl_operator(VectorXcd::Zero(2), bad, ms, b), std::invalid_argument);
}

TEST_CASE("weyl relation with phase on the interior subspace") {
    Rng rng(17);
    VectorXd w(2);
    w << 1.0, 1.5;
    ModeSpace ms(VectorXd::Ones(2), w);
    FockBasis b(2, 16);
    const auto interior = b.indices_with_quanta_at_most(b.max_quanta() / 2);
    for (int t = 0; t < 3; ++t) {
        const VectorXcd f1 = rng.cvector(2, 0.10);
        const VectorXcd f2 = rng.cvector(2, 0.10);
        const Eigen::MatrixXcd U1 = random_unitary_weighted(ms, rng);
        const Eigen::MatrixXcd U2 = random_unitary_weighted(ms, rng);
        const MatrixXcd prod =
            weyl_operator(f1, U1, ms, b).dense() * weyl_operator(f2, U2, ms, b).dense();
        const cplx phase = std::exp(cplx(0.0, -1.0) * std::imag(ms.inner(f1, U1 * f2)));
        const MatrixXcd rhs = phase * weyl_operator(f1 + U1 * f2, U1 * U2, ms, b).dense();
        const MatrixXcd diff = restrict_dense(prod - rhs, interior);
        CHECK(diff.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("commutator defect C_eps") {
    // f = 0: zero operator
    {
        auto ms = ms1();
        FockBasis b(1, 6);
        auto r = commutator_defect_C(VectorXcd::Zero(1), 0.5, ms, b);
        CHECK(r.norm == 0.0);
    }
    // constant omega, M=1: dense SVD obeys the claimed bound
    {
        VectorXd om(1);
        om << 1.7;
        ModeSpace ms(om, VectorXd::Ones(1));
        FockBasis b(1, 14);
        VectorXcd f(1);
        f << cplx(0.8, -0.3);
        for (double eps : {0.1, 1.0, 10.0}) {
            auto r = commutator_defect_C(f, eps, ms, b);
            CHECK(r.norm <= r.bound * (1 + 1e-12));
        }
    }
    // random sweep at M=3, N=8
    {
        Rng rng(91);
        for (int t = 0; t < 50; ++t) {
            VectorXd om = rng.rvector(3, 0.2, 3.0);
            VectorXd w = rng.rvector(3, 0.5, 2.0);
            ModeSpace ms(om, w);
            FockBasis b(3, 8);
            const VectorXcd f = rng.cvector(3);
            const double eps = std::exp(rng.uniform(-2.0, 2.0));
            auto r = commutator_defect_C(f, eps, ms, b);
            CHECK(r.norm <= r.bound * (1 + 1e-12));
        }
    }
}

TEST_CASE("commutator defect T and the dGamma commutation relation") {
    {
        VectorXd om(1);
        om << 1.0;
        ModeSpace ms(om, VectorXd::Ones(1));
        FockBasis b(1, 14);
        VectorXcd f(1);
        f << 1.0;
        auto r = commutator_defect_T(f, ms, b);
        CHECK(r.bound == doctest::Approx(2.0));
        CHECK(r.norm <= 2.0 * (1 + 1e-12));
    }
    // <phi(f) u, dG v> - <dG u, phi(f) v> = <u, i phi(i w f) v> on the interior
    {
        Rng rng(57);
        VectorXd om = rng.rvector(2, 0.3, 2.0);
        VectorXd w = rng.rvector(2, 0.5, 2.0);
        ModeSpace ms(om, w);
        FockBasis b(2, 9);
        const VectorXcd f = rng.cvector(2);
        const MatrixXcd phi = field_operator(f, ms, b).dense();
        const MatrixXcd dg = second_quantization(om, b).dense();
        const VectorXcd iwf =
            (cplx(0.0, 1.0) * om.cast<cplx>().cwiseProduct(f));
        const MatrixXcd rhs = cplx(0.0, 1.0) * field_operator(iwf, ms, b).dense();
        const auto interior = b.indices_with_quanta_at_most(b.max_quanta() - 2);
        for (int t = 0; t < 20; ++t) {
            VectorXcd u = VectorXcd::Zero(b.dim()), v = VectorXcd::Zero(b.dim());
            for (int i : interior) {
                u[i] = rng.cgaussian();
                v[i] = rng.cgaussian();
            }
            const cplx lhs = (phi * u).dot(dg * v) - (dg * u).dot(phi * v);
            const cplx ref = u.dot(rhs * v);
            CHECK(std::abs(lhs - ref) < 1e-11 * (1.0 + std::abs(ref)));
        }
    }
}

TEST_CASE("randomized field bound certification") {
    Rng rng(201);
    VectorXd om = rng.rvector(3, 1.0, 3.0);  // omega >= 1
    ModeSpace ms(om, VectorXd::Ones(3));
    FockBasis b(3, 10);

    // vacuum: |phi(f) vac| = |f|, ratio <= 1/2 when omega >= 1
    {
        const VectorXcd f = rng.cvector(3);
        VectorXcd vac = VectorXcd::Zero(b.dim());
        vac[0] = 1.0;
        const double lhs = (field_operator(f, ms, b).mat * vac).norm();
        CHECK(lhs == doctest::Approx(ms.norm(f)).epsilon(1e-12));
        const double ratio = lhs / (2.0 * ms.norm_invroot_or_one(f) * 1.0);
        CHECK(ratio <= 0.5 + 1e-12);
    }

    auto rep = verify_field_bounds(ms, b, 500, 4242);
    CHECK(rep.relative_bound <= 1.0 + 1e-12);
    CHECK(rep.quadratic_form <= 1.0 + 1e-12);
    auto rep2 = verify_field_bounds(ms, b, 200, 777);
    CHECK(rep2.double_field <= 1.0 + 1e-12);
    CHECK_THROWS_AS(verify_field_bounds(ms, b, 0, 1), std::invalid_argument);
}
