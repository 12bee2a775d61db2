#pragma once

#include <optional>
#include <vector>

#include "oamqnd/lgmodes.hpp"
#include "oamqnd/matrix.hpp"

namespace oamqnd {

// One interaction regime: driving OAM k, truncation K, and the effective
// strength knob eta that absorbs every non-geometric prefactor (coupling g,
// atom number, detuning, integral interaction time).
struct SystemConfig {
    int regime = 0;    // driving-field OAM, 0 or 1
    int max_oam = 2;   // K; modes carry OAM 0 .. K-1
    double eta = 1.0;
    BeamGeometry geometry;
    std::optional<std::vector<double>> bypass_constants;  // direct nu list, overrides geometry

    int pair_count() const { return regime == 0 ? max_oam : max_oam - 1; }

    void validate() const {
        if (regime != 0 && regime != 1) throw ConfigError("config: regime must be 0 or 1");
        if (max_oam < 2 || max_oam % 2 != 0)
            throw ConfigError("config: max_oam must be even and >= 2");
        if (max_oam > 32) throw ConfigError("config: max_oam is capped at 32 (dense map storage)");
        if (!(eta >= 0.0)) throw ConfigError("config: eta must be >= 0");
        geometry.validate();
        if (bypass_constants && static_cast<int>(bypass_constants->size()) != pair_count())
            throw ConfigError("config: bypass constants must have one entry per coupled pair");
    }
};

enum class CouplingKind {
    diagonal,     // k=0: light m <-> atomic m
    offdiagonal,  // k=1: light m <-> atomic m+-1 (or any even-odd bipartite coupling)
};

// The matrix S or H of the creation-sector input-output relation. Entries are
// -i chi_tilde / 2 on the coupled pairs; diagonal kind is purely imaginary
// diagonal, off-diagonal kind is complex symmetric with zero diagonal and
// even-odd bipartite support.
struct CouplingMatrix {
    CouplingKind kind = CouplingKind::diagonal;
    int max_oam = 0;
    CMat entries;
};

// chi_tilde per coupled pair: eta * chi_hat, or the bypass list verbatim.
// Pair order follows allowed_pairs(k, K).
inline std::vector<double> effective_constants(const SystemConfig& config,
                                               const OverlapTable& table) {
    config.validate();
    if (config.bypass_constants) return *config.bypass_constants;
    if (table.driving_oam != config.regime || table.max_oam != config.max_oam)
        throw ConfigError("effective_constants: overlap table does not match config");
    std::vector<double> out;
    for (const auto& [l, m] : allowed_pairs(config.regime, config.max_oam))
        out.push_back(config.eta * table.at(l, m));
    return out;
}

inline std::vector<double> effective_constants(const SystemConfig& config) {
    config.validate();
    if (config.bypass_constants) return *config.bypass_constants;
    return effective_constants(config, overlap_table(config.regime, config.max_oam, config.geometry));
}

inline CouplingMatrix build_s_matrix(const SystemConfig& config,
                                     const std::vector<double>& constants) {
    if (config.regime != 0) throw ConfigError("build_s_matrix: requires regime k=0");
    if (static_cast<int>(constants.size()) != config.max_oam)
        throw ConfigError("build_s_matrix: need one constant per mode");
    CouplingMatrix s;
    s.kind = CouplingKind::diagonal;
    s.max_oam = config.max_oam;
    s.entries = CMat(config.max_oam, config.max_oam);
    for (int m = 0; m < config.max_oam; ++m)
        s.entries(m, m) = cplx{0.0, -0.5} * constants[static_cast<size_t>(m)];
    return s;
}

inline CouplingMatrix build_h_matrix(const SystemConfig& config,
                                     const std::vector<double>& constants) {
    if (config.regime != 1) throw ConfigError("build_h_matrix: requires regime k=1");
    if (static_cast<int>(constants.size()) != config.max_oam - 1)
        throw ConfigError("build_h_matrix: need one constant per adjacent pair");
    CouplingMatrix h;
    h.kind = CouplingKind::offdiagonal;
    h.max_oam = config.max_oam;
    h.entries = CMat(config.max_oam, config.max_oam);
    for (int m = 0; m + 1 < config.max_oam; ++m) {
        const cplx v = cplx{0.0, -0.5} * constants[static_cast<size_t>(m)];
        h.entries(m, m + 1) = v;
        h.entries(m + 1, m) = v;
    }
    return h;
}

// Wrap an explicit coupling block (used by the spectrally synthesized k=1
// couplings); validates the structural invariants of the kind.
inline CouplingMatrix make_coupling(CouplingKind kind, CMat entries) {
    CouplingMatrix c;
    c.kind = kind;
    c.max_oam = entries.rows;
    if (entries.rows != entries.cols) throw ConsistencyError("coupling: square matrix required");
    const int n = entries.rows;
    for (int i = 0; i < n; ++i) {
        if (std::abs(entries(i, i)) > 1e-12 && kind == CouplingKind::offdiagonal)
            throw ConsistencyError("coupling: off-diagonal kind must have zero diagonal");
        for (int j = 0; j < n; ++j) {
            if (std::abs(entries(i, j) - entries(j, i)) > 1e-12)
                throw ConsistencyError("coupling: matrix must be complex symmetric");
            if (std::abs(entries(i, j).real()) > 1e-12)
                throw ConsistencyError("coupling: entries must be purely imaginary");
            if (kind == CouplingKind::offdiagonal && (i + j) % 2 == 0 &&
                std::abs(entries(i, j)) > 1e-12)
                throw ConsistencyError("coupling: off-diagonal kind must be even-odd bipartite");
        }
    }
    c.entries = std::move(entries);
    return c;
}

// The full creation-sector transfer matrix M = [[I, H*], [H*, I]].
inline CMat build_m_matrix(const CouplingMatrix& h) {
    if (h.kind != CouplingKind::offdiagonal)
        throw ConfigError("build_m_matrix: requires an off-diagonal coupling");
    const int k_dim = h.max_oam;
    CMat m = CMat::identity(2 * k_dim);
    for (int i = 0; i < k_dim; ++i)
        for (int j = 0; j < k_dim; ++j) {
            const cplx v = std::conj(h.entries(i, j));
            m(i, k_dim + j) = v;
            m(k_dim + i, j) = v;
        }
    return m;
}

}  // namespace oamqnd
