#include <doctest.h>

#include <random>

#include "oamqnd/bogoliubov.hpp"
#include "oamqnd/protocol.hpp"

using namespace oamqnd;

namespace {

const cplx I{0.0, 1.0};

CouplingMatrix single_pair_qnd(double nu) {
    // one light and one atomic mode, coupling -i nu / 2
    CMat c(1, 1);
    c(0, 0) = -0.5 * I * nu;
    return make_coupling(CouplingKind::diagonal, c);
}

LinearOpMap single_subsystem_chain(double nu1, double nu2, double t1, double t2) {
    return compose(qnd_map(single_pair_qnd(nu2)),
                   compose(rotation_map(t1, t2, 1), qnd_map(single_pair_qnd(nu1))));
}

LinearOpMap random_map(std::mt19937& rng) {
    std::uniform_real_distribution<double> nu(0.0, 3.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_int_distribution<int> coin(0, 1);
    LinearOpMap m = LinearOpMap::identity(4);
    for (int step = 0; step < 4; ++step) {
        if (coin(rng) == 0) {
            m = compose(qnd_map(uniform_coupling(coin(rng), 2, nu(rng))), m);
        } else {
            m = compose(rotation_map(angle(rng), angle(rng), 2), m);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("qnd_map basics") {
    const auto id = qnd_map(uniform_coupling(0, 2, 0.0));
    CHECK((id.e_part - CMat::identity(4)).max_abs() == 0.0);
    CHECK(id.f_part.max_abs() == 0.0);

    const auto m = qnd_map(uniform_coupling(0, 2, 1.0));
    const auto defect = symplectic_defect(m);
    CHECK(defect.unit < 1e-15);
    CHECK(defect.symmetry < 1e-15);
}

TEST_CASE("quadrature view of the diagonal-regime QND pass") {
    // X_m gains P_m with the coupling weight; Y and P are conserved
    const auto m = qnd_map(uniform_coupling(0, 2, 1.0));
    const auto report = quadrature_io(m, 0);
    REQUIRE(report.pair_couplings.size() == 2);
    CHECK(report.pair_couplings[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.pair_couplings[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.max_pattern_residual < 1e-12);

    const auto zero = quadrature_io(qnd_map(uniform_coupling(0, 2, 0.0)), 0);
    for (double c : zero.pair_couplings) CHECK(c == 0.0);
}

TEST_CASE("quadrature view of the parity-changing QND pass") {
    SystemConfig cfg;
    cfg.regime = 1;
    cfg.max_oam = 4;
    const auto h = build_h_matrix(cfg, {0.3, 0.7, 1.1});
    const auto report = quadrature_io(qnd_map(h), 1);
    REQUIRE(report.pair_couplings.size() == 3);
    CHECK(report.pair_couplings[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(report.pair_couplings[1] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(report.pair_couplings[2] == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(report.max_pattern_residual < 1e-12);

    // a rotation is not a QND pass
    CHECK_THROWS_AS(quadrature_io(rotation_map(0.3, 0.0, 2), 0), ConsistencyError);
}

TEST_CASE("rotation_map phases") {
    const auto id = rotation_map(0.0, 0.0, 2);
    CHECK((id.e_part - CMat::identity(4)).max_abs() == 0.0);

    const auto quarter = rotation_map(kPi / 2.0, kPi / 2.0, 2);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(quarter.e_part(i, i) + I) < 1e-15);

    const auto half = rotation_map(kPi, 0.0, 2);
    CHECK(std::abs(half.e_part(0, 0) + 1.0) < 1e-15);  // light negated
    CHECK(std::abs(half.e_part(2, 2) - 1.0) < 1e-15);  // atomic unchanged
}

TEST_CASE("compose: identity, phase addition, and the hand-expanded chain") {
    std::mt19937 rng(7);
    const auto m = random_map(rng);
    const auto with_id = compose(LinearOpMap::identity(4), m);
    CHECK((with_id.e_part - m.e_part).max_abs() < 1e-15);
    CHECK((with_id.f_part - m.f_part).max_abs() < 1e-15);

    const auto r = compose(rotation_map(0.4, 1.1, 2), rotation_map(0.3, 0.2, 2));
    const auto sum = rotation_map(0.7, 1.3, 2);
    CHECK((r.e_part - sum.e_part).max_abs() < 1e-14);

    // full three-step chain against the independently expanded matrices at
    // theta1 = theta2 = pi/2
    const double nu1 = 0.8, nu2 = 2.6;
    const double p = nu1 * nu2, sigma = 0.5 * (nu1 + nu2), delta = 0.5 * (nu2 - nu1);
    const auto chain = single_subsystem_chain(nu1, nu2, kPi / 2.0, kPi / 2.0);
    CMat e_expect(2, 2), f_expect(2, 2);
    e_expect(0, 0) = e_expect(1, 1) = -I * (1.0 - 0.5 * p);
    e_expect(0, 1) = e_expect(1, 0) = -sigma;
    f_expect(0, 0) = f_expect(1, 1) = -0.5 * I * p;
    f_expect(0, 1) = f_expect(1, 0) = -delta;
    CHECK((chain.e_part - e_expect).max_abs() < 1e-13);
    CHECK((chain.f_part - f_expect).max_abs() < 1e-13);
}

TEST_CASE("invert: identity, rotations, and round trips") {
    const auto id = invert(LinearOpMap::identity(4));
    CHECK((id.e_part - CMat::identity(4)).max_abs() == 0.0);

    const auto rot_inv = invert(rotation_map(0.4, 1.2, 2));
    const auto rot_neg = rotation_map(-0.4, -1.2, 2);
    CHECK((rot_inv.e_part - rot_neg.e_part).max_abs() < 1e-15);

    std::mt19937 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const auto m = random_map(rng);
        const auto round = compose(m, invert(m));
        CHECK((round.e_part - CMat::identity(4)).max_abs() < 1e-10);
        CHECK(round.f_part.max_abs() < 1e-10);
    }
}

TEST_CASE("symplectic closure over random composites") {
    std::mt19937 rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const auto m = random_map(rng);
        const auto d = symplectic_defect(m);
        CHECK(d.unit < 1e-10);
        CHECK(d.symmetry < 1e-10);
    }
}

TEST_CASE("invert rejects non-symplectic input") {
    LinearOpMap broken = LinearOpMap::identity(2);
    broken.f_part(0, 1) = cplx{0.5, 0.0};
    CHECK_THROWS_AS(invert(broken), ConsistencyError);
}

TEST_CASE("closed-form single-subsystem inverse matches generic inversion") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> nu(0.05, 4.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int rep = 0; rep < 40; ++rep) {
        const double nu1 = nu(rng), nu2 = nu(rng), t1 = angle(rng), t2 = angle(rng);
        const auto inv = invert(single_subsystem_chain(nu1, nu2, t1, t2));
        const auto [g, l] = gtilde_ltilde(nu1, nu2, t1, t2);
        CHECK((inv.e_part - g).max_abs() < 1e-10);
        CHECK((inv.f_part - l).max_abs() < 1e-10);
    }
}

TEST_CASE("substitute rewrites forms through a map") {
    // identity: unchanged
    OperatorLinearForm f;
    f.creation = {cplx{0.3, 0.1}, cplx{0.0, 0.0}};
    f.annihilation = {cplx{0.0, 0.0}, cplx{0.2, 0.0}};
    const auto same = substitute(f, LinearOpMap::identity(2));
    CHECK(std::abs(same.creation[0] - f.creation[0]) < 1e-15);
    CHECK(std::abs(same.annihilation[1] - f.annihilation[1]) < 1e-15);

    // pure creation form through a quarter rotation: coefficients pick up -i
    OperatorLinearForm g = OperatorLinearForm::creation_only({cplx{1.0, 0.0}, cplx{0.0, 0.0}});
    const auto rotated = substitute(g, rotation_map(kPi / 2.0, kPi / 2.0, 1));
    CHECK(std::abs(rotated.creation[0] + I) < 1e-15);
    CHECK(std::abs(rotated.creation[1]) == 0.0);

    // light creation operator through an inverted single QND pass gains
    // atomic terms with weights +i nu/2 (creation) and -i nu/2 (annihilation)
    const double nu = 1.7;
    const auto inv = invert(qnd_map(single_pair_qnd(nu)));
    const auto sub = substitute(g, inv);
    CHECK(std::abs(sub.creation[0] - 1.0) < 1e-12);
    CHECK(std::abs(sub.creation[1] - 0.5 * I * nu) < 1e-12);
    CHECK(std::abs(sub.annihilation[1] + 0.5 * I * nu) < 1e-12);
    CHECK(std::abs(sub.annihilation[0]) < 1e-12);
}
