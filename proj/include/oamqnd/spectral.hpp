#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "oamqnd/coupling.hpp"
#include "oamqnd/matrix.hpp"

namespace oamqnd {

// Eigensystem of the k=1 transfer matrix M = I + i W. Eigenvalues are
// lambda_n = 1 + i mu_n with real mu_n and real orthonormal eigenvectors, so
// M = sum_n lambda_n v_n v_n^T (transpose, not adjoint).
//
// Ordering: tetrad-blocked, tetrads by descending |mu|. Within a tetrad the
// four indices carry (+mu, +mu, -mu, -mu); the first of each sign pair lives
// in the even-light/odd-atom parity class, the second in odd-light/even-atom.
struct EigenSystem {
    int max_oam = 0;                // K; vectors have length 2K
    std::vector<double> mu;         // signed Im(lambda_n)
    std::vector<RVec> vectors;

    int size() const { return static_cast<int>(mu.size()); }
};

enum class ParityClass { even_light_odd_atom, odd_light_even_atom };

struct ParityReport {
    ParityClass cls;
    double residual;  // L2 mass outside the declared pattern
};

inline ParityReport parity_classify(const RVec& v, int max_oam, double tol = 1e-9) {
    double m_le = 0.0, m_lo = 0.0, m_ae = 0.0, m_ao = 0.0;
    for (int m = 0; m < max_oam; ++m) {
        const double l2 = v[m] * v[m];
        const double a2 = v[max_oam + m] * v[max_oam + m];
        if (m % 2 == 0) {
            m_le += l2;
            m_ae += a2;
        } else {
            m_lo += l2;
            m_ao += a2;
        }
    }
    const double resid_a = std::sqrt(m_lo + m_ae);  // class A keeps light-even + atomic-odd
    const double resid_b = std::sqrt(m_le + m_ao);
    const ParityReport report = resid_a <= resid_b
                                    ? ParityReport{ParityClass::even_light_odd_atom, resid_a}
                                    : ParityReport{ParityClass::odd_light_even_atom, resid_b};
    if (report.residual > tol)
        throw ConsistencyError("parity_classify: mixed parity support (residual " +
                               std::to_string(report.residual) + ")");
    return report;
}

namespace detail {

// One positive-mu eigenpair of the reduced bipartite block, split into its
// even-mode and odd-mode slot components (both of norm 1/sqrt(2) for mu > 0).
struct HalfPair {
    double mu;
    RVec even_part;  // over modes 0..K-1, support on even modes
    RVec odd_part;   // support on odd modes
};

// The k=1 coupling graph splits into two isomorphic components
// (light-even <-> atomic-odd and atomic-even <-> light-odd). Both are carried
// by the same reduced K x K block [[0, X],[X^T, 0]] over (even | odd) mode
// slots, so one symmetric eigensolve serves both; +-mu partners are formed
// analytically by negating the odd slots, which makes the tetrad structure
// exact by construction.
inline std::vector<HalfPair> reduced_pairs(const CMat& m, int max_oam) {
    const int k_dim = max_oam;
    std::vector<int> even_modes, odd_modes;
    for (int i = 0; i < k_dim; ++i) (i % 2 == 0 ? even_modes : odd_modes).push_back(i);
    const int ne = static_cast<int>(even_modes.size());
    const int no = static_cast<int>(odd_modes.size());

    RMat sub(ne + no);
    for (int a = 0; a < ne; ++a)
        for (int b = 0; b < no; ++b) {
            const double w = m(even_modes[a], k_dim + odd_modes[b]).imag();
            sub(a, ne + b) = w;
            sub(ne + b, a) = w;
        }

    SymmetricEigen eig = jacobi_eigensym(sub);

    const double zero_tol = 1e-12;
    std::vector<HalfPair> pairs;
    std::vector<RVec> zero_vecs;
    for (int r = 0; r < sub.n; ++r) {
        if (eig.values[r] > zero_tol) {
            HalfPair hp;
            hp.mu = eig.values[r];
            hp.even_part.assign(k_dim, 0.0);
            hp.odd_part.assign(k_dim, 0.0);
            for (int a = 0; a < ne; ++a) hp.even_part[even_modes[a]] = eig.vectors[r][a];
            for (int b = 0; b < no; ++b) hp.odd_part[odd_modes[b]] = eig.vectors[r][ne + b];
            pairs.push_back(std::move(hp));
        } else if (eig.values[r] >= -zero_tol) {
            zero_vecs.push_back(eig.vectors[r]);
        }
    }

    // Zero modes decompose into pure even-slot and pure odd-slot null vectors;
    // pair them by ascending leading mode so the zero-coupling limit reproduces
    // the single-mode encodings of the diagonal regime.
    if (!zero_vecs.empty()) {
        auto siphon = [&](int lo, int hi) {
            std::vector<RVec> basis;
            for (const auto& z : zero_vecs) {
                RVec part(z.begin() + lo, z.begin() + hi);
                for (const auto& b : basis) {
                    const double c = dot(part, b);
                    for (size_t i = 0; i < part.size(); ++i) part[i] -= c * b[i];
                }
                const double n = norm2(part);
                if (n > 1e-9) {
                    for (auto& x : part) x /= n;
                    basis.push_back(part);
                }
            }
            return basis;
        };
        std::vector<RVec> even_null = siphon(0, ne);
        std::vector<RVec> odd_null = siphon(ne, ne + no);
        if (even_null.size() != odd_null.size())
            throw ConsistencyError("eigendecompose: zero modes do not pair across parity slots");
        auto leading = [](const RVec& v) {
            for (size_t i = 0; i < v.size(); ++i)
                if (std::abs(v[i]) > 1e-9) return static_cast<int>(i);
            return static_cast<int>(v.size());
        };
        auto by_leading = [&](const RVec& x, const RVec& y) { return leading(x) < leading(y); };
        std::sort(even_null.begin(), even_null.end(), by_leading);
        std::sort(odd_null.begin(), odd_null.end(), by_leading);
        for (size_t r = 0; r < even_null.size(); ++r) {
            HalfPair hp;
            hp.mu = 0.0;
            hp.even_part.assign(k_dim, 0.0);
            hp.odd_part.assign(k_dim, 0.0);
            for (int a = 0; a < ne; ++a) hp.even_part[even_modes[a]] = even_null[r][a] / std::sqrt(2.0);
            for (int b = 0; b < no; ++b) hp.odd_part[odd_modes[b]] = odd_null[r][b] / std::sqrt(2.0);
            pairs.push_back(std::move(hp));
        }
    }

    if (static_cast<int>(pairs.size()) != k_dim / 2)
        throw ConsistencyError("eigendecompose: spectrum is not tetradic");

    auto leading_mode = [&](const HalfPair& hp) {
        for (int i = 0; i < k_dim; ++i)
            if (std::abs(hp.even_part[i]) > 1e-9 || std::abs(hp.odd_part[i]) > 1e-9) return i;
        return k_dim;
    };
    std::stable_sort(pairs.begin(), pairs.end(), [&](const HalfPair& x, const HalfPair& y) {
        if (std::abs(x.mu - y.mu) > 1e-14) return x.mu > y.mu;
        return leading_mode(x) < leading_mode(y);
    });
    return pairs;
}

}  // namespace detail

// Diagonalize M = I + i W for the k=1 regime. Requires the structural form
// produced by build_m_matrix (real part identity, purely imaginary symmetric
// coupling with even-odd bipartite support).
inline EigenSystem eigendecompose(const CMat& m) {
    const int two_k = m.rows;
    if (m.cols != two_k || two_k % 2 != 0) throw ConfigError("eigendecompose: expects 2K x 2K");
    const int k_dim = two_k / 2;
    for (int i = 0; i < two_k; ++i)
        for (int j = 0; j < two_k; ++j) {
            const double re = m(i, j).real() - (i == j ? 1.0 : 0.0);
            if (std::abs(re) > 1e-10) throw ConsistencyError("eigendecompose: Re(M) != I");
            if (std::abs(m(i, j).imag() - m(j, i).imag()) > 1e-10)
                throw ConsistencyError("eigendecompose: Im(M) not symmetric");
        }
    for (int i = 0; i < k_dim; ++i)
        for (int j = 0; j < k_dim; ++j) {
            if (std::abs(m(i, j).imag()) > 1e-12 || std::abs(m(k_dim + i, k_dim + j).imag()) > 1e-12)
                throw ConsistencyError("eigendecompose: coupling must connect light to atomic modes");
            if ((i + j) % 2 == 0 && std::abs(m(i, k_dim + j)) > 1e-12 && i != j)
                throw ConsistencyError("eigendecompose: coupling must be even-odd bipartite");
            if (i == j && std::abs(m(i, k_dim + j)) > 1e-12)
                throw ConsistencyError("eigendecompose: coupling must be even-odd bipartite");
        }

    const auto pairs = detail::reduced_pairs(m, k_dim);

    EigenSystem es;
    es.max_oam = k_dim;
    auto embed = [&](const RVec& light_part, const RVec& atomic_part) {
        RVec v(2 * k_dim, 0.0);
        for (int i = 0; i < k_dim; ++i) {
            v[i] = light_part[i];
            v[k_dim + i] = atomic_part[i];
        }
        const double n = norm2(v);
        for (auto& x : v) x /= n;
        canonical_sign(v);
        return v;
    };
    for (const auto& hp : pairs) {
        RVec neg_odd = hp.odd_part;
        for (auto& x : neg_odd) x = -x;
        // +mu: even-light/odd-atom component, then odd-light/even-atom;
        // -mu partners are the odd-slot-negated vectors of the same pair.
        es.mu.insert(es.mu.end(), {hp.mu, hp.mu, -hp.mu, -hp.mu});
        es.vectors.push_back(embed(hp.even_part, hp.odd_part));
        es.vectors.push_back(embed(hp.odd_part, hp.even_part));
        es.vectors.push_back(embed(hp.even_part, neg_odd));
        es.vectors.push_back(embed(neg_odd, hp.even_part));
    }
    return es;
}

struct Tetrad {
    double mu = 0.0;      // Im(lambda) of the leading pair, >= 0
    int base_index = 0;   // index of the first of the four eigenvectors
};

inline std::vector<Tetrad> group_tetrads(const EigenSystem& es, double tol = 1e-9) {
    if (es.size() != 2 * es.max_oam || es.max_oam % 2 != 0)
        throw ConsistencyError("group_tetrads: not a k=1 eigensystem");
    std::vector<Tetrad> tetrads;
    for (int n = 0; n < es.size(); n += 4) {
        const double mu = es.mu[n];
        if (mu < -tol || std::abs(es.mu[n + 1] - mu) > tol || std::abs(es.mu[n + 2] + mu) > tol ||
            std::abs(es.mu[n + 3] + mu) > tol)
            throw ConsistencyError("group_tetrads: eigenvalue pattern is not tetradic");
        tetrads.push_back({mu, n});
    }
    for (size_t t = 1; t < tetrads.size(); ++t)
        if (tetrads[t].mu > tetrads[t - 1].mu + tol)
            throw ConsistencyError("group_tetrads: tetrads not sorted by descending mu");
    return tetrads;
}

struct PairStructureReport {
    double max_equal_pair_residual = 0.0;      // equal eigenvalues swap light/atomic blocks
    double max_conjugate_pair_residual = 0.0;  // conjugate eigenvalues share light blocks
    int checked_tetrads = 0;
    int skipped_degenerate = 0;
};

inline PairStructureReport pair_structure_check(const EigenSystem& es, double tol = 1e-9) {
    PairStructureReport report;
    const int k_dim = es.max_oam;
    auto block_residual = [&](const RVec& x, int x_off, const RVec& y, int y_off, double sign) {
        double r = 0.0;
        for (int i = 0; i < k_dim; ++i) {
            const double d = x[x_off + i] - sign * y[y_off + i];
            r += d * d;
        }
        return r;
    };
    for (const Tetrad& t : group_tetrads(es, tol)) {
        if (t.mu <= 1e-12) {
            ++report.skipped_degenerate;
            continue;
        }
        ++report.checked_tetrads;
        const RVec& v1 = es.vectors[t.base_index];
        const RVec& v2 = es.vectors[t.base_index + 1];
        const RVec& v3 = es.vectors[t.base_index + 2];
        const RVec& v4 = es.vectors[t.base_index + 3];
        double equal_best = 2.0, conj_best = 2.0;
        for (double s : {1.0, -1.0}) {
            equal_best = std::min(
                equal_best, std::sqrt(block_residual(v1, 0, v2, k_dim, s) +
                                      block_residual(v1, k_dim, v2, 0, s)));
            conj_best = std::min(
                conj_best, std::sqrt(block_residual(v1, 0, v3, 0, s) +
                                     block_residual(v1, k_dim, v3, k_dim, -s)));
            conj_best = std::min(
                conj_best, std::sqrt(block_residual(v2, 0, v4, 0, s) +
                                     block_residual(v2, k_dim, v4, k_dim, -s)));
        }
        report.max_equal_pair_residual = std::max(report.max_equal_pair_residual, equal_best);
        report.max_conjugate_pair_residual = std::max(report.max_conjugate_pair_residual, conj_best);
    }
    if (report.max_equal_pair_residual > tol || report.max_conjugate_pair_residual > tol)
        throw ConsistencyError("pair_structure_check: eigenvector pair structure violated");
    return report;
}

// Logical basis of one two-qubit subsystem as coefficient vectors over the
// 2K physical modes (first K light, last K atomic).
struct QubitEncoding {
    struct Subsystem {
        RVec q1_zero, q1_one, q2_zero, q2_one;  // |0>_1, |1>_1, |0>_2, |1>_2
    };
    int regime = 0;
    int max_oam = 0;
    std::vector<Subsystem> subsystems;

    // Orthogonal change of basis: row 4j+r is subsystem j's r-th logical vector.
    CMat basis_matrix() const {
        const int n = 2 * max_oam;
        CMat b(n, n);
        for (int j = 0; j < static_cast<int>(subsystems.size()); ++j) {
            const auto& s = subsystems[j];
            const RVec* rows[4] = {&s.q1_zero, &s.q1_one, &s.q2_zero, &s.q2_one};
            for (int r = 0; r < 4; ++r)
                for (int i = 0; i < n; ++i) b(4 * j + r, i) = (*rows[r])[i];
        }
        return b;
    }
};

inline QubitEncoding build_encoding_k0(int max_oam) {
    if (max_oam < 2 || max_oam % 2 != 0)
        throw ConfigError("build_encoding_k0: max_oam must be even and >= 2");
    QubitEncoding enc;
    enc.regime = 0;
    enc.max_oam = max_oam;
    const int n = 2 * max_oam;
    for (int j = 0; j < max_oam / 2; ++j) {
        QubitEncoding::Subsystem s;
        s.q1_zero.assign(n, 0.0);
        s.q1_one.assign(n, 0.0);
        s.q2_zero.assign(n, 0.0);
        s.q2_one.assign(n, 0.0);
        s.q1_zero[2 * j] = 1.0;               // light OAM 2j
        s.q1_one[2 * j + 1] = 1.0;            // light OAM 2j+1
        s.q2_zero[max_oam + 2 * j] = 1.0;     // atomic OAM 2j
        s.q2_one[max_oam + 2 * j + 1] = 1.0;  // atomic OAM 2j+1
        enc.subsystems.push_back(std::move(s));
    }
    return enc;
}

// k=1 encoding from the tetrad eigenvectors. The four combinations
// (v1 +- v3)/sqrt(2), (v2 +- v4)/sqrt(2) each collapse onto a single side
// (pure light or pure atomic) with definite OAM parity; logical states are
// assigned by that classification:
//   |0>_1 = light-odd, |1>_1 = light-even, |0>_2 = atomic-odd, |1>_2 = atomic-even.
inline QubitEncoding build_encoding_k1(const EigenSystem& es, double tol = 1e-9) {
    QubitEncoding enc;
    enc.regime = 1;
    enc.max_oam = es.max_oam;
    const int k_dim = es.max_oam;
    for (const Tetrad& t : group_tetrads(es)) {
        const RVec* v[4] = {&es.vectors[t.base_index], &es.vectors[t.base_index + 1],
                            &es.vectors[t.base_index + 2], &es.vectors[t.base_index + 3]};
        RVec combo[4];
        for (int c = 0; c < 4; ++c) combo[c].assign(2 * k_dim, 0.0);
        for (int i = 0; i < 2 * k_dim; ++i) {
            combo[0][i] = ((*v[0])[i] + (*v[2])[i]) / std::sqrt(2.0);
            combo[1][i] = ((*v[0])[i] - (*v[2])[i]) / std::sqrt(2.0);
            combo[2][i] = ((*v[1])[i] + (*v[3])[i]) / std::sqrt(2.0);
            combo[3][i] = ((*v[1])[i] - (*v[3])[i]) / std::sqrt(2.0);
        }
        QubitEncoding::Subsystem s;
        int assigned = 0;
        for (int c = 0; c < 4; ++c) {
            double m_le = 0.0, m_lo = 0.0, m_ae = 0.0, m_ao = 0.0;
            for (int i = 0; i < k_dim; ++i) {
                (i % 2 == 0 ? m_le : m_lo) += combo[c][i] * combo[c][i];
                (i % 2 == 0 ? m_ae : m_ao) += combo[c][k_dim + i] * combo[c][k_dim + i];
            }
            const double masses[4] = {m_lo, m_le, m_ao, m_ae};  // order |0>1,|1>1,|0>2,|1>2
            int best = 0;
            for (int x = 1; x < 4; ++x)
                if (masses[x] > masses[best]) best = x;
            double outside = 0.0;
            for (int x = 0; x < 4; ++x)
                if (x != best) outside += masses[x];
            if (std::sqrt(outside) > tol)
                throw ConsistencyError("build_encoding_k1: combination is not a pure single-side state");
            canonical_sign(combo[c]);
            RVec* slots[4] = {&s.q1_zero, &s.q1_one, &s.q2_zero, &s.q2_one};
            if (!slots[best]->empty())
                throw ConsistencyError("build_encoding_k1: duplicate parity class in tetrad");
            *slots[best] = combo[c];
            ++assigned;
        }
        if (assigned != 4 || s.q1_zero.empty() || s.q1_one.empty() || s.q2_zero.empty() ||
            s.q2_one.empty())
            throw ConsistencyError("build_encoding_k1: tetrad does not span all four classes");
        enc.subsystems.push_back(std::move(s));
    }
    return enc;
}

// Transform M into the tetrad combination basis; the result is block-diagonal
// with 4x4 blocks [[1, i mu], [i mu, 1]] (x) I_2 per tetrad.
inline std::vector<CMat> block_diagonalize(const CMat& m, const EigenSystem& es, double tol = 1e-9) {
    const int n = es.size();
    CMat basis(n, n);
    int row = 0;
    for (const Tetrad& t : group_tetrads(es)) {
        const RVec* v[4] = {&es.vectors[t.base_index], &es.vectors[t.base_index + 1],
                            &es.vectors[t.base_index + 2], &es.vectors[t.base_index + 3]};
        for (int i = 0; i < n; ++i) {
            basis(row + 0, i) = ((*v[0])[i] + (*v[2])[i]) / std::sqrt(2.0);
            basis(row + 1, i) = ((*v[0])[i] - (*v[2])[i]) / std::sqrt(2.0);
            basis(row + 2, i) = ((*v[1])[i] + (*v[3])[i]) / std::sqrt(2.0);
            basis(row + 3, i) = ((*v[1])[i] - (*v[3])[i]) / std::sqrt(2.0);
        }
        row += 4;
    }
    const CMat transformed = basis * m * basis.transpose();
    std::vector<CMat> blocks;
    double off_residual = 0.0;
    for (int b = 0; b < n / 4; ++b) {
        CMat block(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) block(i, j) = transformed(4 * b + i, 4 * b + j);
        blocks.push_back(block);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i / 4 != j / 4) off_residual = std::max(off_residual, std::abs(transformed(i, j)));
    if (off_residual > tol)
        throw ConsistencyError("block_diagonalize: off-block residual above tolerance");
    const auto tetrads = group_tetrads(es);
    for (size_t b = 0; b < blocks.size(); ++b) {
        const double mu = tetrads[b].mu;
        double pattern_residual = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                cplx want{i == j ? 1.0 : 0.0, 0.0};
                if ((i / 2 == j / 2) && i != j) want = cplx{0.0, mu};
                pattern_residual = std::max(pattern_residual, std::abs(blocks[b](i, j) - want));
            }
        if (pattern_residual > tol)
            throw ConsistencyError("block_diagonalize: block pattern mismatch");
    }
    return blocks;
}

}  // namespace oamqnd
