#pragma once

#include <vector>

#include "oamqnd/coupling.hpp"
#include "oamqnd/matrix.hpp"

namespace oamqnd {

// Linear map on mode operators over 2K modes (first K light, last K atomic):
//   out-creation  = E . in-creation + F . in-annihilation
//   out-annihilation = conj(E) . in-annihilation + conj(F) . in-creation
// Commutator preservation reads E E+ - F F+ = I and E F^T symmetric.
struct LinearOpMap {
    int n_modes = 0;
    CMat e_part, f_part;

    static LinearOpMap identity(int n) {
        return {n, CMat::identity(n), CMat::zeros(n, n)};
    }
};

struct SymplecticDefect {
    double unit = 0.0;      // max-abs of E E+ - F F+ - I
    double symmetry = 0.0;  // max-abs of E F^T - (E F^T)^T
};

inline SymplecticDefect symplectic_defect(const LinearOpMap& m) {
    const CMat unit = m.e_part * m.e_part.adjoint() - m.f_part * m.f_part.adjoint() -
                      CMat::identity(m.n_modes);
    const CMat sym = m.e_part * m.f_part.transpose();
    return {unit.max_abs(), (sym - sym.transpose()).max_abs()};
}

// One QND pass: E = [[I, C],[C, I]], F = [[0, C*],[C*, 0]] with C the coupling
// block (diagonal for k=0, even-odd bipartite for k=1).
inline LinearOpMap qnd_map(const CouplingMatrix& coupling) {
    const int k_dim = coupling.max_oam;
    LinearOpMap m;
    m.n_modes = 2 * k_dim;
    m.e_part = CMat::identity(2 * k_dim);
    m.f_part = CMat::zeros(2 * k_dim, 2 * k_dim);
    for (int i = 0; i < k_dim; ++i)
        for (int j = 0; j < k_dim; ++j) {
            const cplx c = coupling.entries(i, j);
            m.e_part(i, k_dim + j) = c;
            m.e_part(k_dim + i, j) = c;
            m.f_part(i, k_dim + j) = std::conj(c);
            m.f_part(k_dim + i, j) = std::conj(c);
        }
    return m;
}

// Phase rotation: light creation operators pick up e^{-i theta1}, atomic ones
// e^{-i theta2}.
inline LinearOpMap rotation_map(double theta1, double theta2, int max_oam) {
    LinearOpMap m = LinearOpMap::identity(2 * max_oam);
    const cplx r1 = std::exp(cplx{0.0, -theta1});
    const cplx r2 = std::exp(cplx{0.0, -theta2});
    for (int i = 0; i < max_oam; ++i) {
        m.e_part(i, i) = r1;
        m.e_part(max_oam + i, max_oam + i) = r2;
    }
    return m;
}

// Apply `first`, then `second`.
inline LinearOpMap compose(const LinearOpMap& second, const LinearOpMap& first) {
    if (second.n_modes != first.n_modes) throw ConfigError("compose: dimension mismatch");
    LinearOpMap m;
    m.n_modes = first.n_modes;
    m.e_part = second.e_part * first.e_part + second.f_part * first.f_part.conjugate();
    m.f_part = second.e_part * first.f_part + second.f_part * first.e_part.conjugate();
    return m;
}

// Express in-operators through out-operators. For a commutator-preserving map
// the inverse is E_inv = E+, F_inv = -F^T.
inline LinearOpMap invert(const LinearOpMap& m, double guard_tol = 1e-8) {
    const SymplecticDefect d = symplectic_defect(m);
    if (d.unit > guard_tol || d.symmetry > guard_tol)
        throw ConsistencyError("invert: input map violates commutator-preservation invariants");
    LinearOpMap inv;
    inv.n_modes = m.n_modes;
    inv.e_part = m.e_part.adjoint();
    inv.f_part = cplx{-1.0, 0.0} * m.f_part.transpose();
    return inv;
}

// A linear combination of mode operators: sum_i g_i a_i+ + l_i a_i.
struct OperatorLinearForm {
    CVec creation, annihilation;

    static OperatorLinearForm creation_only(CVec g) {
        OperatorLinearForm f;
        f.annihilation.assign(g.size(), cplx{0.0, 0.0});
        f.creation = std::move(g);
        return f;
    }
};

// Rewrite an in-operator form through out-operators, given the inverse map:
//   g' = E_inv^T g + F_inv+ l,  l' = F_inv^T g + E_inv+ l.
inline OperatorLinearForm substitute(const OperatorLinearForm& form, const LinearOpMap& inverse_map) {
    const int n = inverse_map.n_modes;
    if (static_cast<int>(form.creation.size()) != n ||
        static_cast<int>(form.annihilation.size()) != n)
        throw ConfigError("substitute: dimension mismatch");
    OperatorLinearForm out;
    out.creation = matvec(inverse_map.e_part.transpose(), form.creation);
    const CVec lc = matvec(inverse_map.f_part.adjoint(), form.annihilation);
    out.annihilation = matvec(inverse_map.f_part.transpose(), form.creation);
    const CVec la = matvec(inverse_map.e_part.adjoint(), form.annihilation);
    for (int i = 0; i < n; ++i) {
        out.creation[static_cast<size_t>(i)] += lc[static_cast<size_t>(i)];
        out.annihilation[static_cast<size_t>(i)] += la[static_cast<size_t>(i)];
    }
    return out;
}

struct QuadratureIOReport {
    // chi extracted from the X-row couplings, in selection-rule pair order.
    std::vector<double> pair_couplings;
    double max_pattern_residual = 0.0;
};

// Check that a single QND map acts on quadratures as
//   X_m += chi(l,m) P_l,  Q_l += chi(l,m) Y_m  for the pairs |l-m| = k,
// with Y and P conserved (creation operator = X + iY convention).
inline QuadratureIOReport quadrature_io(const LinearOpMap& m, int regime, double tol = 1e-10) {
    const int n = m.n_modes;
    const int k_dim = n / 2;
    // Real quadrature transfer matrix over (X_0..X_{K-1}, Y_..., Q_..., P_...):
    // X_m^out = Re row of (out+_m + out_m)/2 expanded over in-quadratures.
    // With a+ = X + iY: coefficient of X_j in out+_i is E_ij + (F*)_ij for the
    // "+" part; assembling all four sectors below.
    auto quad_index = [&](int sector, int mode) { return sector * k_dim + mode; };  // X,Y,Q,P
    std::vector<RVec> t(static_cast<size_t>(2 * n), RVec(static_cast<size_t>(2 * n), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx e = m.e_part(i, j);
            const cplx f = m.f_part(i, j);
            // out+_i = sum_j e a+_j + f a_j ; a+_j = U_j + iV_j, a_j = U_j - iV_j
            // where (U, V) = (X, Y) for light j, (Q, P) for atomic j.
            const cplx coeff_u = e + f;
            const cplx coeff_v = cplx{0.0, 1.0} * (e - f);
            // out+_i = U'_i + iV'_i: U'_i row takes Re, V'_i row takes Im.
            const int ui = (i < k_dim) ? quad_index(0, i) : quad_index(2, i - k_dim);
            const int vi = (i < k_dim) ? quad_index(1, i) : quad_index(3, i - k_dim);
            const int uj = (j < k_dim) ? quad_index(0, j) : quad_index(2, j - k_dim);
            const int vj = (j < k_dim) ? quad_index(1, j) : quad_index(3, j - k_dim);
            t[ui][uj] += coeff_u.real();
            t[ui][vj] += coeff_v.real();
            t[vi][uj] += coeff_u.imag();
            t[vi][vj] += coeff_v.imag();
        }
    }
    const auto pairs = allowed_pairs(regime, k_dim);
    QuadratureIOReport report;
    std::vector<RVec> expected(static_cast<size_t>(2 * n), RVec(static_cast<size_t>(2 * n), 0.0));
    for (int q = 0; q < 2 * n; ++q) expected[q][q] = 1.0;
    report.pair_couplings.reserve(pairs.size());
    for (const auto& [l, mm] : pairs) {
        const double chi = t[quad_index(0, mm)][quad_index(3, l)];
        report.pair_couplings.push_back(chi);
        expected[quad_index(0, mm)][quad_index(3, l)] = chi;  // X_m += chi P_l
        expected[quad_index(2, l)][quad_index(1, mm)] = chi;  // Q_l += chi Y_m
        if (l != mm) {
            expected[quad_index(0, l)][quad_index(3, mm)] = chi;  // X_l += chi P_m
            expected[quad_index(2, mm)][quad_index(1, l)] = chi;  // Q_m += chi Y_l
        }
    }
    for (int q = 0; q < 2 * n; ++q)
        for (int r = 0; r < 2 * n; ++r)
            report.max_pattern_residual =
                std::max(report.max_pattern_residual, std::abs(t[q][r] - expected[q][r]));
    if (report.max_pattern_residual > tol)
        throw ConsistencyError("quadrature_io: map does not match the QND quadrature pattern");
    return report;
}

}  // namespace oamqnd
