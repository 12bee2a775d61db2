#pragma once

#include <utility>
#include <vector>

#include "oamqnd/bogoliubov.hpp"
#include "oamqnd/coupling.hpp"
#include "oamqnd/fock.hpp"
#include "oamqnd/spectral.hpp"

namespace oamqnd {

struct ProtocolParams {
    int regime = 0;
    int max_oam = 2;
    double nu1 = 0.0;  // constant of the first QND pass (uniform across pairs)
    double nu2 = 0.0;  // constant of the second QND pass
    double theta1 = kPi / 2.0;
    double theta2 = kPi / 2.0;

    void validate() const {
        if (regime != 0 && regime != 1) throw ConfigError("params: regime must be 0 or 1");
        if (max_oam < 2 || max_oam % 2 != 0)
            throw ConfigError("params: max_oam must be even and >= 2");
        if (max_oam > 32) throw ConfigError("params: max_oam is capped at 32 (dense map storage)");
        if (nu1 < 0.0 || nu2 < 0.0) throw ConfigError("params: QND constants must be >= 0");
    }
};

struct QubitAmplitudes {
    cplx c0{1.0, 0.0}, c1{0.0, 0.0};  // qubit 1
    cplx t0{1.0, 0.0}, t1{0.0, 0.0};  // qubit 2

    void validate(double tol = 1e-12) const {
        if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > tol ||
            std::abs(std::norm(t0) + std::norm(t1) - 1.0) > tol)
            throw ConfigError("qubit amplitudes must be normalized");
    }
};

// Closed-form component ratios of the protocol output at theta1 = theta2 = pi/2,
// normalized by the swap coefficient. a3 is the coefficient of the unit-weight
// bunched-pair bundle, a4 the vacuum amplitude per unit same-mode input weight;
// a4 carries the full contraction weight of both mode pairs (twice the naive
// single-channel estimate).
struct AlphaRatios {
    double a1 = 1.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
};

inline AlphaRatios alpha_closed_form(double nu1, double nu2) {
    const double s = nu1 + nu2;
    if (s <= 0.0) throw ConfigError("alpha_closed_form: nu1 + nu2 must be > 0");
    AlphaRatios a;
    a.a1 = 1.0;
    a.a2 = (2.0 - nu1 * nu2) * (2.0 - nu1 * nu2) / (s * s);
    a.a3 = (2.0 - nu1 * nu2) / s;
    a.a4 = 2.0 * (nu1 - nu2 + nu1 * nu2 * nu2) / (s * s);
    return a;
}

struct PickedConstants {
    double nu1 = 0.0;
    bool below_recommended = false;  // nu2 < 10: the large-constant regime is not met
};

inline PickedConstants pick_constants(double nu2) {
    if (nu2 <= 0.0) throw ConfigError("pick_constants: nu2 must be > 0");
    return {2.0 / nu2, nu2 < 10.0};
}

// Closed-form single-subsystem inverse of QND(nu1) -> rotation -> QND(nu2),
// expressing in-operators through out-operators: in+ = G (out+) + L (out).
inline std::pair<CMat, CMat> gtilde_ltilde(double nu1, double nu2, double theta1, double theta2) {
    const cplx i{0.0, 1.0};
    const cplx e1 = std::exp(i * theta1);
    const cplx e2 = std::exp(i * theta2);
    const double p = nu1 * nu2;
    CMat g(2, 2), l(2, 2);
    g(0, 0) = 0.5 * i * (-2.0 * i * e1 - p * std::sin(theta2));
    g(0, 1) = 0.5 * i * (nu2 * e1 + nu1 * e2);
    g(1, 0) = 0.5 * i * (nu2 * e2 + nu1 * e1);
    g(1, 1) = 0.5 * i * (-2.0 * i * e2 - p * std::sin(theta1));
    l(0, 0) = 0.5 * i * (p * std::sin(theta2));
    l(0, 1) = 0.5 * i * (-(nu1 * std::conj(e2) + nu2 * e1));
    l(1, 0) = 0.5 * i * (-(nu1 * std::conj(e1) + nu2 * e2));
    l(1, 1) = 0.5 * i * (p * std::sin(theta1));
    return {g, l};
}

// Uniform-constant coupling for one QND pass.
inline CouplingMatrix uniform_coupling(int regime, int max_oam, double nu) {
    SystemConfig cfg;
    cfg.regime = regime;
    cfg.max_oam = max_oam;
    std::vector<double> constants(static_cast<size_t>(cfg.pair_count()), nu);
    return regime == 0 ? build_s_matrix(cfg, constants) : build_h_matrix(cfg, constants);
}

// k=1 coupling with prescribed per-tetrad constants nu_j = 2 mu_j, synthesized
// in the eigenframe of an existing eigensystem. Support is even-odd bipartite
// but generally not two-diagonal; this realizes an independent choice of
// integral interaction time per two-qubit subsystem.
inline CouplingMatrix tetrad_coupling(const EigenSystem& es, const std::vector<double>& tetrad_nus) {
    const auto tetrads = group_tetrads(es);
    if (tetrad_nus.size() != tetrads.size())
        throw ConfigError("tetrad_coupling: need one constant per tetrad");
    const int k_dim = es.max_oam;
    CMat entries(k_dim, k_dim);
    for (size_t t = 0; t < tetrads.size(); ++t) {
        const double mu = tetrad_nus[t] / 2.0;
        const int base = tetrads[t].base_index;
        const double signs[4] = {mu, mu, -mu, -mu};
        for (int r = 0; r < 4; ++r) {
            const RVec& v = es.vectors[static_cast<size_t>(base + r)];
            for (int a = 0; a < k_dim; ++a)
                for (int b = 0; b < k_dim; ++b)
                    entries(a, b) += cplx{0.0, -1.0} * signs[r] * v[static_cast<size_t>(a)] *
                                     v[static_cast<size_t>(k_dim + b)];
        }
    }
    return make_coupling(CouplingKind::offdiagonal, std::move(entries));
}

// Physical-basis input state per the chosen encoding: the product over
// subsystems of (c0 |0>_1 + c1 |1>_1)(t0 |0>_2 + t1 |1>_2) applied to vacuum.
inline FockState prepare_input(const std::vector<QubitAmplitudes>& amps,
                               const QubitEncoding& encoding) {
    const int n = 2 * encoding.max_oam;
    if (amps.size() != encoding.subsystems.size())
        throw ConfigError("prepare_input: one amplitude record per subsystem required");
    std::vector<OperatorLinearForm> forms;
    for (size_t j = 0; j < amps.size(); ++j) {
        amps[j].validate();
        const auto& enc = encoding.subsystems[j];
        CVec g1(static_cast<size_t>(n)), g2(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            g1[static_cast<size_t>(i)] = amps[j].c0 * enc.q1_zero[static_cast<size_t>(i)] +
                                         amps[j].c1 * enc.q1_one[static_cast<size_t>(i)];
            g2[static_cast<size_t>(i)] = amps[j].t0 * enc.q2_zero[static_cast<size_t>(i)] +
                                         amps[j].t1 * enc.q2_one[static_cast<size_t>(i)];
        }
        forms.push_back(OperatorLinearForm::creation_only(std::move(g1)));
        forms.push_back(OperatorLinearForm::creation_only(std::move(g2)));
    }
    FockState state = evaluate_on_vacuum(forms, n);
    if (std::abs(state.norm_squared() - 1.0) > 1e-12)
        throw ConsistencyError("prepare_input: state norm deviates from 1");
    return state;
}

struct SubsystemResult {
    double fidelity = 0.0;  // probability of finding the subsystem in its target state
    StateDecomposition alpha;
    double two_qubit_weight = 0.0;
    double cross_leakage = 0.0;
};

struct ProtocolResult {
    int regime = 0;
    int max_oam = 0;
    double theta1 = 0.0, theta2 = 0.0;
    bool swap_times_xx = false;  // k=1: target is (X x X) SWAP
    double pre_normalization_norm = 0.0;
    std::vector<SubsystemResult> per_subsystem;
    FockState output;  // normalized, in the encoded logical basis
};

namespace detail {

// 4-mode logical product state with light amplitudes (x0, x1), atomic (y0, y1).
inline FockState logical_product(cplx x0, cplx x1, cplx y0, cplx y1) {
    FockState s;
    s.n_modes = 4;
    const cplx xs[2] = {x0, x1};
    const cplx ys[2] = {y0, y1};
    for (int l = 0; l < 2; ++l)
        for (int a = 0; a < 2; ++a) {
            OccKey k(4, 0);
            k[static_cast<size_t>(l)] = 1;
            k[static_cast<size_t>(2 + a)] = 1;
            s.accumulate(k, xs[l] * ys[a]);
        }
    return s;
}

inline FockState swap_target_state(const QubitAmplitudes& q, bool with_xx) {
    // SWAP exchanges the qubit contents; the parity-changing regime adds a
    // bit flip on each qubit.
    return with_xx ? logical_product(q.t1, q.t0, q.c1, q.c0)
                   : logical_product(q.t0, q.t1, q.c0, q.c1);
}

}  // namespace detail

// Run QND(C1) -> rotation(theta1, theta2) -> QND(C2) on the input product
// state, exactly, and report per-subsystem results. The Heisenberg chain is
// inverted and substituted into the input creation operators, which are then
// evaluated against the out-vacuum; the state is produced directly in the
// encoded logical basis (4 modes per subsystem).
inline ProtocolResult run_protocol(const CouplingMatrix& c1, const CouplingMatrix& c2,
                                   double theta1, double theta2,
                                   const std::vector<QubitAmplitudes>& amps,
                                   const QubitEncoding& encoding) {
    const int k_dim = encoding.max_oam;
    const int n = 2 * k_dim;
    if (c1.max_oam != k_dim || c2.max_oam != k_dim)
        throw ConfigError("run_protocol: coupling / encoding dimension mismatch");
    if (amps.size() != encoding.subsystems.size())
        throw ConfigError("run_protocol: one amplitude record per subsystem required");

    const LinearOpMap chain =
        compose(qnd_map(c2), compose(rotation_map(theta1, theta2, k_dim), qnd_map(c1)));
    const LinearOpMap inv = invert(chain);
    const CMat basis = encoding.basis_matrix();

    std::vector<OperatorLinearForm> forms;
    for (size_t j = 0; j < amps.size(); ++j) {
        amps[j].validate();
        const auto& enc = encoding.subsystems[j];
        for (int q = 0; q < 2; ++q) {
            CVec g(static_cast<size_t>(n));
            const RVec& zero = q == 0 ? enc.q1_zero : enc.q2_zero;
            const RVec& one = q == 0 ? enc.q1_one : enc.q2_one;
            const cplx a0 = q == 0 ? amps[j].c0 : amps[j].t0;
            const cplx a1 = q == 0 ? amps[j].c1 : amps[j].t1;
            for (int i = 0; i < n; ++i)
                g[static_cast<size_t>(i)] =
                    a0 * zero[static_cast<size_t>(i)] + a1 * one[static_cast<size_t>(i)];
            OperatorLinearForm f = substitute(OperatorLinearForm::creation_only(std::move(g)), inv);
            // rotate to the encoded logical coordinates (real orthogonal basis,
            // vacuum invariant)
            OperatorLinearForm fe;
            fe.creation = matvec(basis, f.creation);
            fe.annihilation = matvec(basis, f.annihilation);
            forms.push_back(std::move(fe));
        }
    }

    ProtocolResult result;
    result.regime = encoding.regime;
    result.max_oam = k_dim;
    result.theta1 = theta1;
    result.theta2 = theta2;
    result.swap_times_xx = encoding.regime == 1;

    FockState out = evaluate_on_vacuum(forms, n);
    result.pre_normalization_norm = std::sqrt(out.norm_squared());
    out.normalize();

    const int n_sub = static_cast<int>(amps.size());
    std::vector<FockState> targets;
    for (int j = 0; j < n_sub; ++j)
        targets.push_back(
            detail::swap_target_state(amps[static_cast<size_t>(j)], result.swap_times_xx));
    for (int j = 0; j < n_sub; ++j) {
        SubsystemResult sr;
        const FockState& target_j = targets[static_cast<size_t>(j)];
        // marginal fidelity: probability of subsystem j sitting in its target
        sr.fidelity = partial_inner(out, target_j, 4 * j).norm_squared();
        sr.two_qubit_weight = weight_where(out, [&](const OccKey& key) {
            const int light = key[static_cast<size_t>(4 * j)] + key[static_cast<size_t>(4 * j + 1)];
            const int atomic =
                key[static_cast<size_t>(4 * j + 2)] + key[static_cast<size_t>(4 * j + 3)];
            return light == 1 && atomic == 1;
        });
        sr.cross_leakage = weight_where(out, [&](const OccKey& key) {
            int count = 0;
            for (int r = 0; r < 4; ++r) count += key[static_cast<size_t>(4 * j + r)];
            return count != 0 && count != 2;
        });

        // conditional state of subsystem j given every other subsystem in its
        // own target: proportional to the per-subsystem output for factorized
        // evolutions.
        FockState cond;
        cond.n_modes = 4;
        for (const auto& [key, amp] : out.amps) {
            cplx weight = amp;
            bool keep = true;
            for (int jj = 0; jj < n_sub && keep; ++jj) {
                if (jj == j) continue;
                const FockState& tgt = targets[static_cast<size_t>(jj)];
                OccKey sub(key.begin() + 4 * jj, key.begin() + 4 * jj + 4);
                const auto it = tgt.amps.find(sub);
                if (it == tgt.amps.end()) {
                    keep = false;
                } else {
                    weight *= std::conj(it->second);
                }
            }
            if (!keep) continue;
            OccKey sub(key.begin() + 4 * j, key.begin() + 4 * j + 4);
            cond.accumulate(sub, weight);
        }
        if (cond.norm_squared() > 0.0) {
            cond.normalize();
            const QubitAmplitudes& q = amps[static_cast<size_t>(j)];
            const FockState input_j = detail::logical_product(q.c0, q.c1, q.t0, q.t1);
            sr.alpha = decompose(cond, input_j, target_j, result.swap_times_xx);
        }
        result.per_subsystem.push_back(std::move(sr));
    }
    result.output = std::move(out);
    return result;
}

// Uniform-constant protocol run; the common entry point for both regimes.
inline ProtocolResult run_swap(const ProtocolParams& params,
                               const std::vector<QubitAmplitudes>& amps,
                               const QubitEncoding& encoding) {
    params.validate();
    if (encoding.regime != params.regime || encoding.max_oam != params.max_oam)
        throw ConfigError("run_swap: encoding does not match params");
    const CouplingMatrix c1 = uniform_coupling(params.regime, params.max_oam, params.nu1);
    const CouplingMatrix c2 = uniform_coupling(params.regime, params.max_oam, params.nu2);
    return run_protocol(c1, c2, params.theta1, params.theta2, amps, encoding);
}

// Parallel operation over all K/2 subsystems. For k=0 the shared constants
// already act identically on every subsystem; requires a full set of inputs.
inline ProtocolResult run_parallel(const ProtocolParams& params,
                                   const std::vector<QubitAmplitudes>& amps,
                                   const QubitEncoding& encoding) {
    if (static_cast<int>(amps.size()) != params.max_oam / 2)
        throw ConfigError("run_parallel: need max_oam/2 subsystem inputs");
    if (params.regime != 0)
        throw ConfigError("run_parallel: use run_parallel_k1 for the parity-changing regime");
    return run_swap(params, amps, encoding);
}

// Parallel k=1 operation with per-tetrad constants (nu1[j], nu2[j]); the two
// QND couplings are synthesized in the eigenframe of `es`.
inline ProtocolResult run_parallel_k1(const EigenSystem& es,
                                      const std::vector<double>& tetrad_nu1,
                                      const std::vector<double>& tetrad_nu2, double theta1,
                                      double theta2, const std::vector<QubitAmplitudes>& amps) {
    const QubitEncoding encoding = build_encoding_k1(es);
    const CouplingMatrix c1 = tetrad_coupling(es, tetrad_nu1);
    const CouplingMatrix c2 = tetrad_coupling(es, tetrad_nu2);
    return run_protocol(c1, c2, theta1, theta2, amps, encoding);
}

// Two-qubit evolution block of a single QND pass over the logical basis
// (|0>_1, |0>_2, |1>_1, |1>_2); generally not unitary.
inline CMat two_qubit_matrix(int regime, double nu) {
    CMat u = CMat::identity(4);
    const cplx v{0.0, 0.5 * nu};
    if (regime == 0) {
        u(0, 1) = v;
        u(1, 0) = v;
        u(2, 3) = v;
        u(3, 2) = v;
    } else if (regime == 1) {
        u(0, 3) = v;
        u(3, 0) = v;
        u(1, 2) = v;
        u(2, 1) = v;
    } else {
        throw ConfigError("two_qubit_matrix: regime must be 0 or 1");
    }
    return u;
}

enum class SweepVariable { nu2, eta, zs_over_zr };

struct SweepRow {
    double value = 0.0;
    int subsystem = 0;
    double fidelity = 0.0;
    double a2_over_a1 = 0.0;
    double a3_over_a1 = 0.0;
    double a4_over_a1 = 0.0;
};

struct SweepContext {
    int regime = 0;
    int max_oam = 2;
    BeamGeometry geometry;
    double eta = 1.0;
    double theta1 = kPi / 2.0;
    double theta2 = kPi / 2.0;
    std::vector<QubitAmplitudes> amps;
};

namespace detail {

inline void append_rows(std::vector<SweepRow>& rows, double value, const ProtocolResult& r) {
    for (size_t j = 0; j < r.per_subsystem.size(); ++j) {
        const auto& sr = r.per_subsystem[j];
        SweepRow row;
        row.value = value;
        row.subsystem = static_cast<int>(j);
        row.fidelity = sr.fidelity;
        const double a1 = std::abs(sr.alpha.a1);
        row.a2_over_a1 = a1 > 0.0 ? std::abs(sr.alpha.a2) / a1 : 0.0;
        row.a3_over_a1 = a1 > 0.0 ? std::abs(sr.alpha.a3) / a1 : 0.0;
        row.a4_over_a1 = a1 > 0.0 ? std::abs(sr.alpha.a4) / a1 : 0.0;
        rows.push_back(row);
    }
}

}  // namespace detail

// Deterministic grid sweep; rows are grid-major, subsystem-minor.
inline std::vector<SweepRow> sweep(const SweepContext& ctx, SweepVariable variable,
                                   const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep: empty grid");
    std::vector<SweepRow> rows;
    for (const double value : values) {
        ProtocolParams params;
        params.regime = ctx.regime;
        params.max_oam = ctx.max_oam;
        params.theta1 = ctx.theta1;
        params.theta2 = ctx.theta2;
        BeamGeometry geom = ctx.geometry;
        switch (variable) {
            case SweepVariable::nu2: {
                params.nu2 = value;
                params.nu1 = pick_constants(value).nu1;
                break;
            }
            case SweepVariable::eta:
            case SweepVariable::zs_over_zr: {
                if (variable == SweepVariable::zs_over_zr)
                    geom.zs_over_zr = value;
                SystemConfig cfg;
                cfg.regime = ctx.regime;
                cfg.max_oam = ctx.max_oam;
                cfg.eta = variable == SweepVariable::eta ? value : ctx.eta;
                cfg.geometry = geom;
                const auto constants = effective_constants(cfg);
                const CouplingMatrix c =
                    ctx.regime == 0 ? build_s_matrix(cfg, constants) : build_h_matrix(cfg, constants);
                const QubitEncoding enc = ctx.regime == 0
                                              ? build_encoding_k0(ctx.max_oam)
                                              : build_encoding_k1(eigendecompose(build_m_matrix(c)));
                detail::append_rows(rows, value,
                                    run_protocol(c, c, ctx.theta1, ctx.theta2, ctx.amps, enc));
                continue;
            }
        }
        const QubitEncoding enc =
            ctx.regime == 0
                ? build_encoding_k0(ctx.max_oam)
                : build_encoding_k1(eigendecompose(
                      build_m_matrix(uniform_coupling(1, ctx.max_oam, params.nu1))));
        detail::append_rows(rows, value, run_swap(params, ctx.amps, enc));
    }
    return rows;
}

}  // namespace oamqnd
