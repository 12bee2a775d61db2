#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oamqnd/errors.hpp"
#include "oamqnd/quadrature.hpp"

namespace oamqnd {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Waist geometry of the quantum and driving beams. The driving beam's waist
// sits a distance z_S along the axis; at the cell its width follows
// Gaussian-beam divergence with the quantum beam's Rayleigh length, so
// w_d = w_s * sqrt(1 + (z_S/z_R)^2). zs_over_zr = 0 collapses both waists.
struct BeamGeometry {
    double quantum_waist = 1.0;
    double zs_over_zr = 0.0;

    double driving_waist() const {
        return quantum_waist * std::sqrt(1.0 + zs_over_zr * zs_over_zr);
    }
    void validate() const {
        if (!(quantum_waist > 0.0)) throw ConfigError("geometry: quantum waist must be > 0");
        if (!(zs_over_zr >= 0.0)) throw ConfigError("geometry: zs_over_zr must be >= 0");
    }
};

enum class FieldRole { quantum, driving };

// Cross-sectional area of an OAM ring mode, S_l = pi w^2 (|l|+1)/4.
inline double mode_area(int l, double w) {
    if (!(w > 0.0)) throw ConfigError("mode_area: waist must be > 0");
    return kPi * w * w * (std::abs(l) + 1) / 4.0;
}

namespace detail {
inline double ln_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }
}  // namespace detail

// Modulus of the transverse mode profile at azimuth 0 (the e^{il phi} phase
// is always handled analytically). Normalization matches the profile whose
// squared L2 norm is the mode area S_l.
inline double radial_profile(FieldRole role, int l, const BeamGeometry& geom, double rho) {
    geom.validate();
    if (rho < 0.0) throw ConfigError("radial_profile: rho must be >= 0");
    const double w = (role == FieldRole::quantum) ? geom.quantum_waist : geom.driving_waist();
    const int al = std::abs(l);
    const double pref = std::sqrt((al + 1) / 2.0 * std::exp(-detail::ln_factorial(al)));
    const double x = rho * std::sqrt(2.0) / w;
    return pref * std::pow(x, al) * std::exp(-rho * rho / (w * w));
}

// Unit-L2-normalized quantum mode modulus: integral of |u_l|^2 2 pi rho drho = 1.
inline double quantum_mode_radial(int l, double w, double rho) {
    const int al = std::abs(l);
    const double pref = std::sqrt(2.0 / (kPi * w * w) * std::exp(-detail::ln_factorial(al)));
    const double x = rho * std::sqrt(2.0) / w;
    return pref * std::pow(x, al) * std::exp(-rho * rho / (w * w));
}

// Sup-normalized driving mode modulus: max over rho equals 1, so the overlap
// integrals approach exactly 1 in the plane-wave limit.
inline double driving_mode_radial(int k, double w_d, double rho) {
    const double x = rho * std::sqrt(2.0) / w_d;
    if (k == 0) return std::exp(-0.5 * x * x);
    const double peak = std::pow(static_cast<double>(k), 0.5 * k) * std::exp(-0.5 * k);
    return std::pow(x, k) * std::exp(-0.5 * x * x) / peak;
}

// Dimensionless overlap coefficient
//   chi_hat(k; l, m) = int_0^inf 2 pi rho d_k(rho) u_l(rho) u_m(rho) drho,
// symmetric in l <-> m and contained in [0, 1]. The azimuthal integral is the
// selection-rule Kronecker delta and never appears numerically.
inline double overlap_chi(int k, int l, int m, const BeamGeometry& geom,
                          double abs_tol = 1e-12) {
    if (k < 0 || l < 0 || m < 0) throw ConfigError("overlap_chi: indices must be >= 0");
    geom.validate();
    const int lo = std::min(l, m), hi = std::max(l, m);  // shared path: exact l<->m symmetry
    const double ws = geom.quantum_waist;
    const double wd = geom.driving_waist();
    const double r_max = 8.0 * std::max(ws * std::sqrt(static_cast<double>(hi + 1)),
                                        wd * std::sqrt(static_cast<double>(k + 1)));
    const auto integrand = [&](double rho) {
        return 2.0 * kPi * rho * driving_mode_radial(k, wd, rho) *
               quantum_mode_radial(lo, ws, rho) * quantum_mode_radial(hi, ws, rho);
    };
    return adaptive_integrate(integrand, 0.0, r_max, abs_tol);
}

// Self-check helper: L2 normalization of the quantum mode.
inline double quantum_mode_norm2(int l, double w) {
    const double r_max = 8.0 * w * std::sqrt(static_cast<double>(l + 1));
    return adaptive_integrate(
        [&](double rho) {
            const double u = quantum_mode_radial(l, w, rho);
            return 2.0 * kPi * rho * u * u;
        },
        0.0, r_max, 1e-13);
}

// Selection-rule pairs (l, m) with |l - m| = k inside [0, K-1], l <= m.
inline std::vector<std::pair<int, int>> allowed_pairs(int k, int max_oam) {
    if (k != 0 && k != 1) throw ConfigError("allowed_pairs: driving OAM must be 0 or 1");
    std::vector<std::pair<int, int>> pairs;
    for (int m = 0; m + k < max_oam; ++m) pairs.emplace_back(m, m + k);
    return pairs;
}

struct OverlapTable {
    int driving_oam = 0;
    int max_oam = 0;
    std::map<std::pair<int, int>, double> entries;  // key (l, m) with l <= m

    double at(int l, int m) const {
        const auto key = std::minmax(l, m);
        const auto it = entries.find({key.first, key.second});
        if (it == entries.end()) throw ConfigError("overlap table: pair not allowed by selection rule");
        return it->second;
    }
};

inline OverlapTable overlap_table(int k, int max_oam, const BeamGeometry& geom) {
    if (max_oam < 2 || max_oam % 2 != 0) throw ConfigError("overlap_table: max_oam must be even and >= 2");
    OverlapTable table;
    table.driving_oam = k;
    table.max_oam = max_oam;
    for (const auto& [l, m] : allowed_pairs(k, max_oam))
        table.entries[{l, m}] = overlap_chi(k, l, m, geom);
    return table;
}

}  // namespace oamqnd
