#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "oamqnd/bogoliubov.hpp"
#include "oamqnd/matrix.hpp"

namespace oamqnd {

using OccKey = std::vector<std::uint8_t>;

// Exact sparse state over a fixed set of bosonic modes: occupation vector ->
// complex amplitude. Keys are dense integer tuples; map ordering makes every
// iteration deterministic.
struct FockState {
    int n_modes = 0;
    std::map<OccKey, cplx> amps;

    static FockState vacuum(int n) {
        FockState s;
        s.n_modes = n;
        s.amps[OccKey(static_cast<size_t>(n), 0)] = cplx{1.0, 0.0};
        return s;
    }

    void accumulate(const OccKey& key, cplx amp) {
        auto it = amps.find(key);
        if (it == amps.end()) {
            if (std::abs(amp) > 1e-15) amps.emplace(key, amp);
        } else {
            it->second += amp;
            if (std::abs(it->second) <= 1e-15) amps.erase(it);
        }
    }

    double norm_squared() const {
        double n = 0.0;
        for (const auto& [k, v] : amps) n += std::norm(v);
        return n;
    }

    void scale(cplx s) {
        for (auto& [k, v] : amps) v *= s;
    }

    void normalize() {
        const double n = std::sqrt(norm_squared());
        if (n <= 0.0) throw NumericError("FockState::normalize: zero norm");
        scale(cplx{1.0 / n, 0.0});
    }
};

// Apply sum_i g_i a_i+ + l_i a_i. Creation scales by sqrt(n+1), annihilation
// by sqrt(n); annihilation on an empty mode vanishes.
inline FockState apply_form(const OperatorLinearForm& form, const FockState& state) {
    if (static_cast<int>(form.creation.size()) != state.n_modes)
        throw ConfigError("apply_form: dimension mismatch");
    FockState out;
    out.n_modes = state.n_modes;
    for (const auto& [key, amp] : state.amps) {
        for (int i = 0; i < state.n_modes; ++i) {
            const cplx g = form.creation[static_cast<size_t>(i)];
            if (g != cplx{0.0, 0.0}) {
                OccKey up = key;
                ++up[static_cast<size_t>(i)];
                out.accumulate(up, amp * g * std::sqrt(static_cast<double>(up[static_cast<size_t>(i)])));
            }
            const cplx l = form.annihilation[static_cast<size_t>(i)];
            if (l != cplx{0.0, 0.0} && key[static_cast<size_t>(i)] > 0) {
                OccKey down = key;
                --down[static_cast<size_t>(i)];
                out.accumulate(down, amp * l * std::sqrt(static_cast<double>(key[static_cast<size_t>(i)])));
            }
        }
    }
    return out;
}

// Apply an operator product to the vacuum; forms[0] is the leftmost factor,
// so it acts last. Exact: total excitation never exceeds forms.size().
inline FockState evaluate_on_vacuum(const std::vector<OperatorLinearForm>& forms, int n_modes) {
    FockState s = FockState::vacuum(n_modes);
    for (auto it = forms.rbegin(); it != forms.rend(); ++it) s = apply_form(*it, s);
    return s;
}

inline cplx inner(const FockState& a, const FockState& b) {
    if (a.n_modes != b.n_modes) throw ConfigError("inner: mode count mismatch");
    const auto& small = a.amps.size() <= b.amps.size() ? a : b;
    const auto& large = a.amps.size() <= b.amps.size() ? b : a;
    cplx s{0.0, 0.0};
    for (const auto& [k, v] : small.amps) {
        const auto it = large.amps.find(k);
        if (it == large.amps.end()) continue;
        s += (&small == &a) ? std::conj(v) * it->second : std::conj(it->second) * v;
    }
    return s;
}

inline double fidelity(const FockState& state, const FockState& target) {
    const double ns = state.norm_squared();
    const double nt = target.norm_squared();
    if (ns <= 0.0) throw ConfigError("fidelity: zero-norm state");
    if (nt <= 0.0) throw ConfigError("fidelity: zero-norm target");
    return std::norm(inner(target, state)) / (ns * nt);
}

// <sub_state| applied to modes [start, start+len) of `state`; the result
// lives on the remaining modes in their original order.
inline FockState partial_inner(const FockState& state, const FockState& sub_state, int start) {
    const int len = sub_state.n_modes;
    if (start < 0 || start + len > state.n_modes) throw ConfigError("partial_inner: bad mode range");
    FockState out;
    out.n_modes = state.n_modes - len;
    for (const auto& [key, amp] : state.amps) {
        OccKey sub(key.begin() + start, key.begin() + start + len);
        const auto it = sub_state.amps.find(sub);
        if (it == sub_state.amps.end()) continue;
        OccKey rest;
        rest.reserve(static_cast<size_t>(out.n_modes));
        rest.insert(rest.end(), key.begin(), key.begin() + start);
        rest.insert(rest.end(), key.begin() + start + len, key.end());
        out.accumulate(rest, std::conj(it->second) * amp);
    }
    return out;
}

template <typename Pred>
inline double weight_where(const FockState& state, Pred&& pred) {
    double w = 0.0;
    for (const auto& [key, amp] : state.amps)
        if (pred(key)) w += std::norm(amp);
    return w;
}

// Decomposition of a single-subsystem output state over the logical 4-mode
// layout [q1_zero, q1_one, q2_zero, q2_one] (modes 0,1 carry the light qubit,
// modes 2,3 the atomic one). a1 and a2 are the expansion coefficients over the
// (generally non-orthogonal) pair {swap target, input}; the Gram-Schmidt
// split of the same span is kept in span_weight for the norm identity.
struct StateDecomposition {
    cplx a1{};   // expansion coefficient on the normalized swap target
    cplx a2{};   // expansion coefficient on the normalized input
    cplx a3{};   // coefficient of the canonical bunched-pair bundle
    cplx a4{};   // vacuum amplitude
    double span_weight = 0.0;      // squared projection onto span{target, input}
    double nq_weight = 0.0;        // L2 weight with bunched / non-two-qubit patterns
    double two_qubit_weight = 0.0; // L2 weight with exactly 1 light + 1 atomic excitation
    double remainder_norm = 0.0;   // two-qubit residual outside span{target, input}
    bool degenerate_input = false; // swap target parallel to input; a2 merged into a1
};

namespace detail {

inline bool is_two_qubit_key(const OccKey& key) {
    return key[0] + key[1] == 1 && key[2] + key[3] == 1;
}
inline bool is_vacuum_key(const OccKey& key) {
    return key[0] == 0 && key[1] == 0 && key[2] == 0 && key[3] == 0;
}

// The bunched-pair state reached from the input by the beam-splitter channel:
// for input amplitudes psi(m, l) over light m and atomic l, the bundle is
// sum_{m,l} psi(m,l) (a+_m a+_{P(l)} + b+_{P(m)} b+_l) |vac> with unit
// coefficient, where P is the light-atomic partner wiring of the coupling
// (straight for the diagonal regime, crossed for the parity-changing one).
inline FockState bunched_bundle(const FockState& input, bool crossed_wiring) {
    FockState bundle;
    bundle.n_modes = 4;
    const auto partner = [crossed_wiring](int i) { return crossed_wiring ? 1 - i : i; };
    for (const auto& [key, amp] : input.amps) {
        if (!is_two_qubit_key(key)) continue;
        const int m = key[0] == 1 ? 0 : 1;
        const int l = key[2] == 1 ? 0 : 1;
        const int pairs[2][2] = {{m, partner(l)}, {partner(m), l}};
        for (int side : {0, 1}) {
            const int base = 2 * side;
            OccKey k(4, 0);
            ++k[static_cast<size_t>(base + pairs[side][0])];
            const double boson =
                std::sqrt(static_cast<double>(k[static_cast<size_t>(base + pairs[side][1])] + 1));
            ++k[static_cast<size_t>(base + pairs[side][1])];
            bundle.accumulate(k, amp * boson);
        }
    }
    return bundle;
}

}  // namespace detail

inline StateDecomposition decompose(const FockState& state, const FockState& input_state,
                                    const FockState& swap_target,
                                    bool crossed_wiring = false) {
    if (state.n_modes != 4 || input_state.n_modes != 4 || swap_target.n_modes != 4)
        throw ConfigError("decompose: expects 4-mode subsystem states");
    StateDecomposition d;

    FockState target = swap_target;
    if (target.norm_squared() <= 0.0) throw ConfigError("decompose: zero-norm target");
    target.normalize();

    FockState input = input_state;
    if (input.norm_squared() <= 0.0) throw ConfigError("decompose: zero-norm input");
    input.normalize();

    const cplx b1 = inner(target, state);
    const cplx b2 = inner(input, state);
    const cplx overlap = inner(target, input);
    const double perp_sq = std::max(0.0, 1.0 - std::norm(overlap));
    if (perp_sq < 1e-18) {
        d.degenerate_input = true;
        d.a1 = b1;
        d.a2 = cplx{0.0, 0.0};
        d.span_weight = std::norm(b1);
    } else {
        // normal equations over the non-orthogonal pair {target, input}
        d.a1 = (b1 - overlap * b2) / perp_sq;
        d.a2 = (b2 - std::conj(overlap) * b1) / perp_sq;
        const cplx perp_amp = (b2 - std::conj(overlap) * b1) / std::sqrt(perp_sq);
        d.span_weight = std::norm(b1) + std::norm(perp_amp);
    }

    const OccKey vac_key(4, 0);
    const auto vac_it = state.amps.find(vac_key);
    d.a4 = vac_it == state.amps.end() ? cplx{0.0, 0.0} : vac_it->second;

    d.two_qubit_weight = weight_where(state, detail::is_two_qubit_key);
    d.nq_weight = std::sqrt(weight_where(state, [](const OccKey& k) {
        return !detail::is_two_qubit_key(k) && !detail::is_vacuum_key(k);
    }));

    const FockState bundle = detail::bunched_bundle(input_state, crossed_wiring);
    const double bn = bundle.norm_squared();
    d.a3 = bn > 0.0 ? inner(bundle, state) / bn : cplx{0.0, 0.0};

    const double total = state.norm_squared();
    const double accounted = d.span_weight + d.nq_weight * d.nq_weight + std::norm(d.a4);
    d.remainder_norm = std::sqrt(std::max(0.0, total - accounted));
    return d;
}

}  // namespace oamqnd
