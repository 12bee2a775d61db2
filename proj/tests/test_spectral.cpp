#include <doctest.h>

#include <random>

#include "oamqnd/spectral.hpp"

using namespace oamqnd;

namespace {

CMat m_from_constants(int max_oam, const std::vector<double>& chis) {
    SystemConfig cfg;
    cfg.regime = 1;
    cfg.max_oam = max_oam;
    return build_m_matrix(build_h_matrix(cfg, chis));
}

CMat m_from_geometry(int max_oam, double zs) {
    SystemConfig cfg;
    cfg.regime = 1;
    cfg.max_oam = max_oam;
    cfg.geometry.zs_over_zr = zs;
    return build_m_matrix(build_h_matrix(cfg, effective_constants(cfg)));
}

// Frobenius residual of M - sum_n (1 + i mu_n) v_n v_n^T.
double reconstruction_residual(const CMat& m, const EigenSystem& es) {
    CMat rec(m.rows, m.cols);
    for (int n = 0; n < es.size(); ++n) {
        const cplx lambda{1.0, es.mu[static_cast<size_t>(n)]};
        const RVec& v = es.vectors[static_cast<size_t>(n)];
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                rec(i, j) += lambda * v[static_cast<size_t>(i)] * v[static_cast<size_t>(j)];
    }
    return (m - rec).frobenius();
}

}  // namespace

TEST_CASE("eigendecompose: zero coupling gives unit eigenvalues") {
    const auto es = eigendecompose(m_from_constants(4, {0.0, 0.0, 0.0}));
    REQUIRE(es.size() == 8);
    for (double mu : es.mu) CHECK(mu == 0.0);
    CHECK(reconstruction_residual(m_from_constants(4, {0.0, 0.0, 0.0}), es) < 1e-12);
}

TEST_CASE("eigendecompose: K=2 with unit constant") {
    const CMat m = m_from_constants(2, {1.0});
    const auto es = eigendecompose(m);
    REQUIRE(es.size() == 4);
    // spectrum {1 + i/2 (x2), 1 - i/2 (x2)}, dense 4x4 oracle value
    CHECK(es.mu[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(es.mu[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(es.mu[2] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(es.mu[3] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(reconstruction_residual(m, es) < 1e-12);
}

TEST_CASE("eigendecompose: reconstruction and orthonormality for random couplings") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(0.2, 2.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> chis;
        for (int i = 0; i < 7; ++i) chis.push_back(dist(rng));
        const CMat m = m_from_constants(8, chis);
        const auto es = eigendecompose(m);
        CHECK(reconstruction_residual(m, es) < 1e-9);
        for (int a = 0; a < es.size(); ++a)
            for (int b = 0; b < es.size(); ++b) {
                const double g = dot(es.vectors[static_cast<size_t>(a)],
                                     es.vectors[static_cast<size_t>(b)]);
                CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
    }
}

TEST_CASE("eigenvalues agree with an unstructured full-matrix eigensolve") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(0.2, 2.0);
    std::vector<double> chis;
    for (int i = 0; i < 7; ++i) chis.push_back(dist(rng));
    const CMat m = m_from_constants(8, chis);

    RMat w(16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) w(i, j) = m(i, j).imag();
    auto dense = jacobi_eigensym(w).values;  // ascending

    auto structured = eigendecompose(m).mu;
    std::sort(structured.begin(), structured.end());
    REQUIRE(dense.size() == structured.size());
    for (size_t i = 0; i < dense.size(); ++i)
        CHECK(structured[i] == doctest::Approx(dense[i]).epsilon(1e-12));
}

TEST_CASE("group_tetrads counts and orders the spectrum") {
    const auto es4 = eigendecompose(m_from_geometry(4, 1.0));
    CHECK(group_tetrads(es4).size() == 2);

    const auto es0 = eigendecompose(m_from_constants(4, {0.0, 0.0, 0.0}));
    const auto t0 = group_tetrads(es0);
    CHECK(t0.size() == 2);
    for (const auto& t : t0) CHECK(t.mu == 0.0);

    const auto es2 = eigendecompose(m_from_constants(2, {1.0}));
    const auto t2 = group_tetrads(es2);
    REQUIRE(t2.size() == 1);
    CHECK(t2[0].mu == doctest::Approx(0.5).epsilon(1e-12));

    const auto es8 = eigendecompose(m_from_geometry(8, 1.0));
    const auto t8 = group_tetrads(es8);
    REQUIRE(t8.size() == 4);
    for (size_t i = 1; i < t8.size(); ++i) CHECK(t8[i].mu <= t8[i - 1].mu + 1e-12);
}

TEST_CASE("parity_classify identifies the two interaction components") {
    // K=2: light 0 is even light, atomic 1 is odd atom
    RVec v{0.6, 0.0, 0.0, 0.8};
    const auto r = parity_classify(v, 2);
    CHECK(r.cls == ParityClass::even_light_odd_atom);
    CHECK(r.residual < 1e-15);

    RVec w{0.6, 0.8, 0.0, 0.0};  // light 0 and light 1 simultaneously
    CHECK_THROWS_AS(parity_classify(w, 2), ConsistencyError);

    const auto es = eigendecompose(m_from_geometry(8, 0.7));
    for (const auto& vec : es.vectors) CHECK_NOTHROW(parity_classify(vec, 8));
}

TEST_CASE("pair_structure_check validates both eigenvector pair properties") {
    const auto es2 = eigendecompose(m_from_constants(2, {1.0}));
    const auto r2 = pair_structure_check(es2);
    CHECK(r2.checked_tetrads == 1);
    CHECK(r2.max_equal_pair_residual < 1e-9);
    CHECK(r2.max_conjugate_pair_residual < 1e-9);

    const auto es0 = eigendecompose(m_from_constants(2, {0.0}));
    const auto r0 = pair_structure_check(es0);
    CHECK(r0.checked_tetrads == 0);
    CHECK(r0.skipped_degenerate == 1);

    const auto es8 = eigendecompose(m_from_geometry(8, 1.0));
    const auto r8 = pair_structure_check(es8);
    CHECK(r8.checked_tetrads == 4);
    CHECK(r8.max_equal_pair_residual < 1e-9);
    CHECK(r8.max_conjugate_pair_residual < 1e-9);
}

TEST_CASE("build_encoding_k0 uses one physical mode per logical state") {
    const auto enc = build_encoding_k0(4);
    REQUIRE(enc.subsystems.size() == 2);
    // subsystem 1: light/atomic OAM 0 and 1
    CHECK(enc.subsystems[0].q1_zero[0] == 1.0);
    CHECK(enc.subsystems[0].q1_one[1] == 1.0);
    CHECK(enc.subsystems[0].q2_zero[4] == 1.0);
    CHECK(enc.subsystems[0].q2_one[5] == 1.0);
    // subsystem 2: OAM 2 and 3
    CHECK(enc.subsystems[1].q1_zero[2] == 1.0);
    CHECK(enc.subsystems[1].q1_one[3] == 1.0);
    CHECK(enc.subsystems[1].q2_zero[6] == 1.0);
    CHECK(enc.subsystems[1].q2_one[7] == 1.0);

    CHECK(build_encoding_k0(2).subsystems.size() == 1);
}

TEST_CASE("build_encoding_k1: K=2 unit constant reduces to single modes") {
    const auto es = eigendecompose(m_from_constants(2, {1.0}));
    const auto enc = build_encoding_k1(es);
    REQUIRE(enc.subsystems.size() == 1);
    const auto& s = enc.subsystems[0];
    // |0>_1 = light 1, |1>_1 = light 0, |0>_2 = atomic 1, |1>_2 = atomic 0
    CHECK(std::abs(s.q1_zero[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.q1_one[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.q2_zero[3]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(s.q2_one[2]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("build_encoding_k1: combinations are one-sided and read off eigenvectors") {
    const auto m = m_from_geometry(8, 1.0);
    const auto es = eigendecompose(m);
    const auto enc = build_encoding_k1(es);
    REQUIRE(enc.subsystems.size() == 4);

    const int k_dim = 8;
    for (size_t j = 0; j < enc.subsystems.size(); ++j) {
        const auto& s = enc.subsystems[j];
        // light states have no atomic support and vice versa
        for (int i = 0; i < k_dim; ++i) {
            CHECK(std::abs(s.q1_zero[k_dim + i]) < 1e-9);
            CHECK(std::abs(s.q1_one[k_dim + i]) < 1e-9);
            CHECK(std::abs(s.q2_zero[i]) < 1e-9);
            CHECK(std::abs(s.q2_one[i]) < 1e-9);
        }
        // detection amplitudes: the even-light state carries sqrt(2) times the
        // light block of the tetrad's leading eigenvector, up to overall sign
        const auto tetrads = group_tetrads(es);
        const RVec& lead = es.vectors[static_cast<size_t>(tetrads[j].base_index)];
        double direct = 0.0, flipped = 0.0;
        for (int i = 0; i < k_dim; ++i) {
            direct = std::max(direct,
                              std::abs(s.q1_one[static_cast<size_t>(i)] -
                                       std::sqrt(2.0) * lead[static_cast<size_t>(i)]));
            flipped = std::max(flipped,
                               std::abs(s.q1_one[static_cast<size_t>(i)] +
                                        std::sqrt(2.0) * lead[static_cast<size_t>(i)]));
        }
        CHECK(std::min(direct, flipped) < 1e-10);
    }

    // Gram matrix of all 4*(K/2) encoding vectors is the identity
    const CMat basis = enc.basis_matrix();
    const CMat gram = basis * basis.transpose();
    CHECK((gram - CMat::identity(16)).max_abs() < 1e-9);
}

TEST_CASE("block_diagonalize reproduces the tetrad block pattern") {
    // zero coupling: all blocks are the identity
    const CMat m0 = m_from_constants(4, {0.0, 0.0, 0.0});
    const auto blocks0 = block_diagonalize(m0, eigendecompose(m0));
    REQUIRE(blocks0.size() == 2);
    for (const auto& b : blocks0) CHECK((b - CMat::identity(4)).max_abs() < 1e-12);

    // K=2, unit constant: one block with off-diagonal i/2
    const CMat m2 = m_from_constants(2, {1.0});
    const auto blocks2 = block_diagonalize(m2, eigendecompose(m2));
    REQUIRE(blocks2.size() == 1);
    CHECK(std::abs(blocks2[0](0, 1) - cplx{0.0, 0.5}) < 1e-12);
    CHECK(std::abs(blocks2[0](2, 3) - cplx{0.0, 0.5}) < 1e-12);
    CHECK(std::abs(blocks2[0](0, 2)) < 1e-12);

    // K=8 geometry run: four blocks within tolerance (throws otherwise)
    const CMat m8 = m_from_geometry(8, 1.0);
    CHECK(block_diagonalize(m8, eigendecompose(m8)).size() == 4);
}

TEST_CASE("eigendecompose rejects malformed transfer matrices") {
    CMat bad = CMat::identity(4);
    bad(0, 0) = cplx{2.0, 0.0};
    CHECK_THROWS_AS(eigendecompose(bad), ConsistencyError);

    CMat same_parity = CMat::identity(4);
    same_parity(0, 2) = cplx{0.0, 0.5};  // light 0 to atomic 0: same parity
    same_parity(2, 0) = cplx{0.0, 0.5};
    CHECK_THROWS_AS(eigendecompose(same_parity), ConsistencyError);
}
