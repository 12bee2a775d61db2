// Command-line front end: overlap-integral tables, transfer-matrix spectra,
// protocol runs and parameter sweeps, with deterministic CSV/JSON output.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oamqnd/protocol.hpp"

using nlohmann::json;
using namespace oamqnd;

namespace {

std::string fmt_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
}

double round12(double x) { return std::strtod(fmt_g12(x).c_str(), nullptr); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

struct Grid {
    std::vector<double> values;
};

// "A" -> single point, "A:B:STEPS" -> inclusive linear grid.
Grid parse_grid(const std::string& text, const std::string& flag) {
    Grid g;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        try {
            g.values.push_back(std::stod(text));
        } catch (...) {
            throw ConfigError(flag + ": cannot parse '" + text + "'");
        }
        return g;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError(flag + ": expected A or A:B:STEPS");
    double a = 0.0, b = 0.0;
    long steps = 0;
    try {
        a = std::stod(text.substr(0, c1));
        b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        steps = std::stol(text.substr(c2 + 1));
    } catch (...) {
        throw ConfigError(flag + ": cannot parse '" + text + "'");
    }
    if (!(a < b)) throw ConfigError(flag + ": range start must be < end");
    if (steps < 2) throw ConfigError(flag + ": steps must be >= 2");
    for (long i = 0; i < steps; ++i)
        g.values.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1));
    return g;
}

// ---------------------------------------------------------------------------
// Run configuration (JSON document)

struct RunConfig {
    BeamGeometry geometry;
    int regime = 0;
    int max_oam = 2;
    bool use_eta = false;
    double eta = 0.0;
    double nu1 = 0.0, nu2 = 0.0;
    double theta1 = kPi / 2.0, theta2 = kPi / 2.0;
    std::vector<QubitAmplitudes> subsystems;
    std::string out_format;  // "csv" | "json" | ""
    std::string out_path;
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key: " + path + it.key());
    }
}

double get_number(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError("missing key: " + path + key);
    if (!obj[key].is_number()) throw ConfigError(path + key + " must be a number");
    return obj[key].get<double>();
}

cplx get_complex(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError("missing key: " + path + key);
    const json& v = obj[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path + key + " must be [re, im]");
    return {v[0].get<double>(), v[1].get<double>()};
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, "", {"geometry", "regime", "truncation", "strength", "constants", "protocol",
                         "input", "output"});
    RunConfig cfg;

    if (doc.contains("geometry")) {
        check_keys(doc["geometry"], "geometry.", {"waist", "zs_over_zr"});
        if (doc["geometry"].contains("waist"))
            cfg.geometry.quantum_waist = get_number(doc["geometry"], "geometry.", "waist");
        if (doc["geometry"].contains("zs_over_zr"))
            cfg.geometry.zs_over_zr = get_number(doc["geometry"], "geometry.", "zs_over_zr");
        cfg.geometry.validate();
    }

    if (!doc.contains("regime")) throw ConfigError("missing key: regime");
    check_keys(doc["regime"], "regime.", {"driving_oam"});
    const double k = get_number(doc["regime"], "regime.", "driving_oam");
    if (k != 0.0 && k != 1.0) throw ConfigError("regime.driving_oam must be 0 or 1");
    cfg.regime = static_cast<int>(k);

    if (!doc.contains("truncation")) throw ConfigError("missing key: truncation");
    check_keys(doc["truncation"], "truncation.", {"max_oam"});
    const double kmax = get_number(doc["truncation"], "truncation.", "max_oam");
    if (kmax != static_cast<int>(kmax) || static_cast<int>(kmax) < 2 ||
        static_cast<int>(kmax) % 2 != 0)
        throw ConfigError("truncation.max_oam must be an even integer >= 2");
    cfg.max_oam = static_cast<int>(kmax);

    const bool has_eta = doc.contains("strength");
    const bool has_nu = doc.contains("constants");
    if (has_eta == has_nu)
        throw ConfigError("exactly one of 'strength' or 'constants' must be given");
    if (has_eta) {
        check_keys(doc["strength"], "strength.", {"eta"});
        cfg.eta = get_number(doc["strength"], "strength.", "eta");
        if (cfg.eta < 0.0) throw ConfigError("strength.eta must be >= 0");
        cfg.use_eta = true;
    } else {
        check_keys(doc["constants"], "constants.", {"nu1", "nu2"});
        cfg.nu1 = get_number(doc["constants"], "constants.", "nu1");
        cfg.nu2 = get_number(doc["constants"], "constants.", "nu2");
        if (cfg.nu1 < 0.0 || cfg.nu2 < 0.0) throw ConfigError("constants must be >= 0");
    }

    if (doc.contains("protocol")) {
        check_keys(doc["protocol"], "protocol.", {"theta1_deg", "theta2_deg"});
        if (doc["protocol"].contains("theta1_deg"))
            cfg.theta1 = get_number(doc["protocol"], "protocol.", "theta1_deg") * kPi / 180.0;
        if (doc["protocol"].contains("theta2_deg"))
            cfg.theta2 = get_number(doc["protocol"], "protocol.", "theta2_deg") * kPi / 180.0;
    }

    if (!doc.contains("input")) throw ConfigError("missing key: input");
    check_keys(doc["input"], "input.", {"subsystems"});
    if (!doc["input"].contains("subsystems") || !doc["input"]["subsystems"].is_array())
        throw ConfigError("input.subsystems must be an array");
    int index = 0;
    for (const json& sub : doc["input"]["subsystems"]) {
        const std::string sp = "input.subsystems[" + std::to_string(index) + "].";
        check_keys(sub, sp, {"c0", "c1", "t0", "t1"});
        QubitAmplitudes q;
        q.c0 = get_complex(sub, sp, "c0");
        q.c1 = get_complex(sub, sp, "c1");
        q.t0 = get_complex(sub, sp, "t0");
        q.t1 = get_complex(sub, sp, "t1");
        try {
            q.validate(1e-9);
        } catch (const ConfigError&) {
            throw ConfigError(sp + "c0/c1/t0/t1: qubit amplitudes must be normalized");
        }
        cfg.subsystems.push_back(q);
        ++index;
    }
    if (static_cast<int>(cfg.subsystems.size()) != cfg.max_oam / 2)
        throw ConfigError("input.subsystems must have max_oam/2 entries");

    if (doc.contains("output")) {
        check_keys(doc["output"], "output.", {"format", "path"});
        if (doc["output"].contains("format")) {
            cfg.out_format = doc["output"]["format"].get<std::string>();
            if (cfg.out_format != "csv" && cfg.out_format != "json")
                throw ConfigError("output.format must be csv or json");
        }
        if (doc["output"].contains("path")) cfg.out_path = doc["output"]["path"].get<std::string>();
    }
    return cfg;
}

// Coupling matrices and encoding for one protocol run described by a config.
struct RunSetup {
    CouplingMatrix c1, c2;
    QubitEncoding encoding;
    std::vector<double> constants1, constants2;
    bool used_eta = false;
    double eta = 0.0, nu1 = 0.0, nu2 = 0.0;
};

RunSetup build_setup(const RunConfig& cfg) {
    RunSetup setup;
    setup.used_eta = cfg.use_eta;
    setup.eta = cfg.eta;
    setup.nu1 = cfg.nu1;
    setup.nu2 = cfg.nu2;
    SystemConfig sys;
    sys.regime = cfg.regime;
    sys.max_oam = cfg.max_oam;
    sys.geometry = cfg.geometry;
    if (cfg.use_eta) {
        sys.eta = cfg.eta;
        setup.constants1 = effective_constants(sys);
        setup.constants2 = setup.constants1;
    } else {
        setup.constants1.assign(static_cast<size_t>(sys.pair_count()), cfg.nu1);
        setup.constants2.assign(static_cast<size_t>(sys.pair_count()), cfg.nu2);
    }
    if (cfg.regime == 0) {
        setup.c1 = build_s_matrix(sys, setup.constants1);
        setup.c2 = build_s_matrix(sys, setup.constants2);
        setup.encoding = build_encoding_k0(cfg.max_oam);
    } else {
        setup.c1 = build_h_matrix(sys, setup.constants1);
        setup.c2 = build_h_matrix(sys, setup.constants2);
        // both passes share the geometry, so either one fixes the eigenframe
        setup.encoding = build_encoding_k1(eigendecompose(build_m_matrix(setup.c1)));
    }
    return setup;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_overlaps(int regime, int max_oam, const Grid& grid, double waist,
                 const std::string& out_path) {
    std::ostringstream csv;
    csv << "zs_over_zr,k,l,m,chi\n";
    for (const double zs : grid.values) {
        BeamGeometry geom;
        geom.quantum_waist = waist;
        geom.zs_over_zr = zs;
        for (const auto& [l, m] : allowed_pairs(regime, max_oam)) {
            const double chi = overlap_chi(regime, l, m, geom);
            csv << fmt_g12(zs) << ',' << regime << ',' << l << ',' << m << ',' << fmt_g12(chi)
                << '\n';
        }
    }
    write_file(out_path, csv.str());
    return 0;
}

int cmd_spectrum(int max_oam, const std::optional<Grid>& grid,
                 const std::optional<std::vector<double>>& chi_bypass, double waist, double eta,
                 const std::string& out_path) {
    SystemConfig sys;
    sys.regime = 1;
    sys.max_oam = max_oam;
    std::ostringstream csv;
    const auto emit_tetrads = [&](const std::vector<double>& constants, const std::string& prefix) {
        const CouplingMatrix h = build_h_matrix(sys, constants);
        const EigenSystem es = eigendecompose(build_m_matrix(h));
        int index = 1;
        for (const Tetrad& t : group_tetrads(es)) {
            csv << prefix << index << ',' << fmt_g12(t.mu) << '\n';
            ++index;
        }
    };
    if (chi_bypass) {
        if (static_cast<int>(chi_bypass->size()) != max_oam - 1)
            throw ConfigError("--chi needs max_oam-1 constants");
        csv << "tetrad_index,im_lambda\n";
        emit_tetrads(*chi_bypass, "");
    } else {
        if (!grid) throw ConfigError("spectrum: either --zs or --chi is required");
        csv << "zs_over_zr,tetrad_index,im_lambda\n";
        for (const double zs : grid->values) {
            sys.geometry.quantum_waist = waist;
            sys.geometry.zs_over_zr = zs;
            sys.eta = eta;
            emit_tetrads(effective_constants(sys), fmt_g12(zs) + ",");
        }
    }
    write_file(out_path, csv.str());
    return 0;
}

json subsystem_json(const SubsystemResult& sr) {
    json alpha;
    alpha["a1"] = round12(std::abs(sr.alpha.a1));
    alpha["a2"] = round12(std::abs(sr.alpha.a2));
    alpha["a3"] = round12(std::abs(sr.alpha.a3));
    alpha["a4"] = round12(std::abs(sr.alpha.a4));
    json out;
    out["fidelity"] = round12(sr.fidelity);
    out["alpha"] = alpha;
    out["two_qubit_weight"] = round12(sr.two_qubit_weight);
    out["cross_leakage"] = round12(sr.cross_leakage);
    return out;
}

int cmd_swap(const std::string& config_path, std::string out_path) {
    const RunConfig cfg = parse_config(config_path);
    if (out_path.empty()) out_path = cfg.out_path;
    if (out_path.empty()) throw ConfigError("swap: output path required (--out or output.path)");
    if (!cfg.out_format.empty() && cfg.out_format != "json")
        throw ConfigError("swap: output.format must be json");

    const RunSetup setup = build_setup(cfg);
    const ProtocolResult result =
        run_protocol(setup.c1, setup.c2, cfg.theta1, cfg.theta2, cfg.subsystems, setup.encoding);

    json params;
    params["regime"] = cfg.regime;
    params["max_oam"] = cfg.max_oam;
    params["theta1_rad"] = round12(cfg.theta1);
    params["theta2_rad"] = round12(cfg.theta2);
    if (setup.used_eta) {
        params["eta"] = round12(setup.eta);
    } else {
        params["nu1"] = round12(setup.nu1);
        params["nu2"] = round12(setup.nu2);
    }
    json con1 = json::array(), con2 = json::array();
    for (double c : setup.constants1) con1.push_back(round12(c));
    for (double c : setup.constants2) con2.push_back(round12(c));
    params["constants_step1"] = con1;
    params["constants_step2"] = con2;
    params["swap_times_xx"] = result.swap_times_xx;

    json doc;
    doc["params"] = params;
    json per = json::array();
    for (const auto& sr : result.per_subsystem) per.push_back(subsystem_json(sr));
    doc["per_subsystem"] = per;
    doc["pre_normalization_norm"] = round12(result.pre_normalization_norm);
    write_file(out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& sweep_spec, std::string out_path) {
    const auto eq = sweep_spec.find('=');
    if (eq == std::string::npos) throw ConfigError("--sweep expects VAR=A:B:STEPS");
    const std::string var = sweep_spec.substr(0, eq);
    const Grid grid = parse_grid(sweep_spec.substr(eq + 1), "--sweep");
    SweepVariable variable;
    if (var == "nu2")
        variable = SweepVariable::nu2;
    else if (var == "eta")
        variable = SweepVariable::eta;
    else if (var == "zs_over_zr")
        variable = SweepVariable::zs_over_zr;
    else
        throw ConfigError("--sweep variable must be one of nu2, eta, zs_over_zr");

    const RunConfig cfg = parse_config(config_path);
    if (out_path.empty()) out_path = cfg.out_path;
    if (out_path.empty()) throw ConfigError("sweep: output path required (--out or output.path)");
    if (!cfg.out_format.empty() && cfg.out_format != "csv")
        throw ConfigError("sweep: output.format must be csv");

    SweepContext ctx;
    ctx.regime = cfg.regime;
    ctx.max_oam = cfg.max_oam;
    ctx.geometry = cfg.geometry;
    ctx.eta = cfg.use_eta ? cfg.eta : 1.0;
    ctx.theta1 = cfg.theta1;
    ctx.theta2 = cfg.theta2;
    ctx.amps = cfg.subsystems;

    std::ostringstream csv;
    csv << "sweep_value,subsystem,fidelity,a2_over_a1,a3_over_a1,a4_over_a1\n";
    for (const SweepRow& row : sweep(ctx, variable, grid.values)) {
        csv << fmt_g12(row.value) << ',' << row.subsystem << ',' << fmt_g12(row.fidelity) << ','
            << fmt_g12(row.a2_over_a1) << ',' << fmt_g12(row.a3_over_a1) << ','
            << fmt_g12(row.a4_over_a1) << '\n';
    }
    write_file(out_path, csv.str());
    return 0;
}

std::vector<double> parse_chi_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("--chi: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--chi: empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QND interaction of OAM light with an atomic ensemble: overlap integrals,"
                 " transfer-matrix spectra, and the QND-rotation-QND swap protocol"};
    app.require_subcommand(1);

    // overlaps
    auto* overlaps = app.add_subcommand("overlaps", "overlap integrals on a zs grid (CSV)");
    int ov_regime = 0, ov_max_oam = 6;
    double ov_waist = 1.0;
    std::string ov_zs = "0:50:51", ov_out = "overlaps.csv";
    overlaps->add_option("--regime", ov_regime, "driving-field OAM (0 or 1)");
    overlaps->add_option("--max-oam", ov_max_oam, "mode truncation K");
    overlaps->add_option("--zs", ov_zs, "zs_over_zr grid: A or A:B:STEPS");
    overlaps->add_option("--waist", ov_waist, "quantum beam waist");
    overlaps->add_option("--out", ov_out, "output CSV path");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Im(lambda) tetrad spectrum (CSV, k=1)");
    int sp_max_oam = 14;
    double sp_waist = 1.0, sp_eta = 1.0;
    std::string sp_zs, sp_chi, sp_out = "spectrum.csv";
    spectrum->add_option("--max-oam", sp_max_oam, "mode truncation K");
    spectrum->add_option("--zs", sp_zs, "zs_over_zr grid: A or A:B:STEPS");
    spectrum->add_option("--chi", sp_chi, "bypass constants chi(m,m+1), comma separated");
    spectrum->add_option("--waist", sp_waist, "quantum beam waist");
    spectrum->add_option("--eta", sp_eta, "strength multiplier for geometry constants");
    spectrum->add_option("--out", sp_out, "output CSV path");

    // swap
    auto* swap_cmd = app.add_subcommand("swap", "run the QND-rotation-QND protocol (JSON)");
    std::string sw_config, sw_out;
    swap_cmd->add_option("--config", sw_config, "run configuration (JSON)")->required();
    swap_cmd->add_option("--out", sw_out, "output JSON path (overrides config)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep nu2 / eta / zs_over_zr (CSV)");
    std::string swp_config, swp_spec, swp_out;
    double swp_nu2 = 0.0;
    sweep_cmd->add_option("--config", swp_config, "run configuration (JSON)")->required();
    sweep_cmd->add_option("--sweep", swp_spec, "VAR=A:B:STEPS with VAR in {nu2, eta, zs_over_zr}");
    sweep_cmd->add_option("--nu2", swp_nu2, "single-point nu2 sweep (shorthand)");
    sweep_cmd->add_option("--out", swp_out, "output CSV path (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (overlaps->parsed()) {
            if (ov_regime != 0 && ov_regime != 1) throw ConfigError("--regime must be 0 or 1");
            if (ov_max_oam < 2) throw ConfigError("--max-oam must be >= 2");
            return cmd_overlaps(ov_regime, ov_max_oam, parse_grid(ov_zs, "--zs"), ov_waist, ov_out);
        }
        if (spectrum->parsed()) {
            if (sp_max_oam < 2 || sp_max_oam % 2 != 0)
                throw ConfigError("--max-oam must be even and >= 2");
            std::optional<Grid> grid;
            if (!sp_zs.empty()) grid = parse_grid(sp_zs, "--zs");
            std::optional<std::vector<double>> chi;
            if (!sp_chi.empty()) chi = parse_chi_list(sp_chi);
            return cmd_spectrum(sp_max_oam, grid, chi, sp_waist, sp_eta, sp_out);
        }
        if (swap_cmd->parsed()) return cmd_swap(sw_config, sw_out);
        if (sweep_cmd->parsed()) {
            if (swp_spec.empty() && swp_nu2 > 0.0)
                swp_spec = "nu2=" + fmt_g12(swp_nu2);
            if (swp_spec.empty()) throw ConfigError("sweep: --sweep VAR=A:B:STEPS required");
            return cmd_sweep(swp_config, swp_spec, swp_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const ConsistencyError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
