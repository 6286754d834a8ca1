#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "roadmodal/error.hpp"
#include "roadmodal/excitation.hpp"
#include "roadmodal/modal_core.hpp"
#include "roadmodal/oracle.hpp"
#include "roadmodal/road_surface.hpp"
#include "roadmodal/svg_plot.hpp"
#include "roadmodal/tvimm.hpp"
#include "roadmodal/vehicle_model.hpp"

namespace roadmodal {

/// One requested output entry; dof indices are 1-based as in the labels.
struct OutputRequest {
    int i = 1;
    int j = 1;
    CoordinateSet coords = CoordinateSet::cg;
    bool psd = true;
    bool correlation = true;
};

struct ScenarioTolerances {
    double psd_pointwise = 1e-6;
    double psd_relative_rms = 1e-6;
    double corr_relative_rms = 1e-2;
    double corr_pointwise = 1e-2;
    double corr_central_fraction = 0.8;
};

/**
 * Everything a run needs. Defaults describe the reference passenger car on
 * a class C road at 20 m/s with the coherence decay mu = 3.8, a 0-30 Hz
 * grid of 4096 samples and a +-10 s lag grid with step tau1 / 16.
 */
struct Scenario {
    VehicleParams vehicle = VehicleParams::reference_car();
    RoadModel road;
    double speed = 20.0;
    double omega_max = 2.0 * std::numbers::pi * 30.0;
    std::size_t samples = 4096;
    double lag_span = 10.0;
    int lag_divisor = 16;
    std::vector<OutputRequest> outputs;
    ScenarioTolerances tolerances;
    std::string output_dir = "roadmodal_out";

    /// Lag step of the correlation grid.
    double lag_step() const { return vehicle.wheelbase() / speed / static_cast<double>(lag_divisor); }
};

inline std::vector<OutputRequest> default_outputs()
{
    return {
        {1, 4, CoordinateSet::cg, true, true},
        {2, 3, CoordinateSet::corner, true, true},
        {4, 6, CoordinateSet::cg, true, true},
        {4, 7, CoordinateSet::cg, true, true},
    };
}

inline Scenario default_scenario()
{
    Scenario s;
    s.outputs = default_outputs();
    return s;
}

/// Every invariant the scenario breaks, empty when valid.
inline std::vector<std::string> scenario_violations(const Scenario& s)
{
    std::vector<std::string> v;
    for (const auto& e : s.vehicle.geometry_violations())
        v.push_back("vehicle: " + e);
    for (const auto& e : s.vehicle.violations())
        v.push_back("vehicle: " + e);
    RoadModel road = s.road;
    road.V = s.speed;
    for (const auto& e : road.violations())
        v.push_back(e);
    if (!(s.omega_max > 0.0) || !std::isfinite(s.omega_max))
        v.emplace_back("grid.omega_max must be strictly positive");
    if (s.samples < 2 || (s.samples & (s.samples - 1)) != 0)
        v.emplace_back("grid.samples must be a power of two, at least 2");
    if (!(s.lag_span > 0.0) || !std::isfinite(s.lag_span))
        v.emplace_back("lags.span must be strictly positive");
    if (s.lag_divisor < 10)
        v.emplace_back("lags.step_divisor must be at least 10");
    if (s.outputs.empty())
        v.emplace_back("outputs must request at least one pair");
    for (std::size_t k = 0; k < s.outputs.size(); ++k) {
        const auto& o = s.outputs[k];
        if (o.i < 1 || o.i > 7 || o.j < 1 || o.j > 7)
            v.push_back("outputs[" + std::to_string(k) + "].pair indices must lie in 1..7");
        if (!o.psd && !o.correlation)
            v.push_back("outputs[" + std::to_string(k) + "] requests no domain");
    }
    const auto& t = s.tolerances;
    for (auto [value, name] : {std::pair{t.psd_pointwise, "psd_pointwise"}, std::pair{t.psd_relative_rms, "psd_relative_rms"},
                               std::pair{t.corr_relative_rms, "corr_relative_rms"}, std::pair{t.corr_pointwise, "corr_pointwise"}})
        if (!(value >= 0.0) || !std::isfinite(value))
            v.push_back(std::string("tolerances.") + name + " must be a finite non-negative number");
    if (!(t.corr_central_fraction > 0.0 && t.corr_central_fraction <= 1.0))
        v.emplace_back("tolerances.corr_central_fraction must lie in (0, 1]");
    return v;
}

namespace detail {

using json = nlohmann::json;

class SchemaReader {
public:
    explicit SchemaReader(std::vector<std::string>& errs) : errs_(errs) {}

    void keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed)
    {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
                errs_.push_back(where + it.key() + " is not a recognised field");
    }

    void number(const json& obj, const std::string& where, const char* key, double& dst)
    {
        if (!obj.contains(key))
            return;
        if (!obj[key].is_number())
            errs_.push_back(where + key + " must be a number");
        else
            dst = obj[key].get<double>();
    }

    template <class Int>
    void integer(const json& obj, const std::string& where, const char* key, Int& dst)
    {
        if (!obj.contains(key))
            return;
        if (!obj[key].is_number_integer() || obj[key].get<long long>() < 0)
            errs_.push_back(where + key + " must be a non-negative integer");
        else
            dst = static_cast<Int>(obj[key].get<long long>());
    }

    bool object(const json& obj, const char* key)
    {
        if (!obj.contains(key))
            return false;
        if (!obj[key].is_object()) {
            errs_.push_back(std::string(key) + " must be an object");
            return false;
        }
        return true;
    }

    void fail(std::string msg) { errs_.push_back(std::move(msg)); }

private:
    std::vector<std::string>& errs_;
};

inline void read_vehicle(SchemaReader& r, const json& j, VehicleParams& p)
{
    const std::string w = "vehicle.";
    r.keys(j, w, {"W1", "L1f", "L1r", "ms", "jsx", "jsy", "kf", "kr", "cf", "cr", "mu1", "mu2", "mu3", "mu4", "kft", "krt", "cft", "crt"});
    r.number(j, w, "W1", p.W1);
    r.number(j, w, "L1f", p.L1f);
    r.number(j, w, "L1r", p.L1r);
    r.number(j, w, "ms", p.ms);
    r.number(j, w, "jsx", p.jsx);
    r.number(j, w, "jsy", p.jsy);
    r.number(j, w, "kf", p.kf);
    r.number(j, w, "kr", p.kr);
    r.number(j, w, "cf", p.cf);
    r.number(j, w, "cr", p.cr);
    r.number(j, w, "mu1", p.mu1);
    r.number(j, w, "mu2", p.mu2);
    r.number(j, w, "mu3", p.mu3);
    r.number(j, w, "mu4", p.mu4);
    r.number(j, w, "kft", p.kft);
    r.number(j, w, "krt", p.krt);
    r.number(j, w, "cft", p.cft);
    r.number(j, w, "crt", p.crt);
}

inline void read_road(SchemaReader& r, const json& j, RoadModel& m, double speed)
{
    const std::string w = "road.";
    r.keys(j, w, {"model", "class", "level", "S0", "nu0", "e", "nu_a", "nu_b", "band_speed_min", "band_speed_max", "mu"});
    std::string model = "iso8608";
    if (j.contains("model")) {
        if (!j["model"].is_string())
            r.fail("road.model must be \"iso8608\" or \"white\"");
        else
            model = j["model"].get<std::string>();
    }
    if (model == "white") {
        double level = 0.0;
        r.number(j, w, "level", level);
        if (!j.contains("level"))
            r.fail("road.level is required for the white model");
        m = RoadModel::white_noise(level, speed);
        r.number(j, w, "mu", m.mu);
        return;
    }
    if (model != "iso8608") {
        r.fail("road.model must be \"iso8608\" or \"white\"");
        return;
    }
    if (j.contains("class")) {
        const auto& c = j["class"];
        if (!c.is_string() || c.get<std::string>().size() != 1 || c.get<std::string>()[0] < 'A' || c.get<std::string>()[0] > 'H')
            r.fail("road.class must be one letter A..H");
        else
            m = RoadModel::iso_class(c.get<std::string>()[0], speed);
    }
    r.number(j, w, "S0", m.S0);
    r.number(j, w, "nu0", m.nu0);
    r.number(j, w, "e", m.e);
    r.number(j, w, "nu_a", m.nu_a);
    r.number(j, w, "nu_b", m.nu_b);
    r.number(j, w, "band_speed_min", m.band_speed_min);
    r.number(j, w, "band_speed_max", m.band_speed_max);
    r.number(j, w, "mu", m.mu);
}

inline void read_outputs(SchemaReader& r, const json& j, std::vector<OutputRequest>& out)
{
    if (!j.is_array()) {
        r.fail("outputs must be an array");
        return;
    }
    out.clear();
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string w = "outputs[" + std::to_string(k) + "].";
        const auto& e = j[k];
        if (!e.is_object()) {
            r.fail(w.substr(0, w.size() - 1) + " must be an object");
            continue;
        }
        r.keys(e, w, {"pair", "coords", "domain"});
        OutputRequest o;
        if (!e.contains("pair") || !e["pair"].is_array() || e["pair"].size() != 2 || !e["pair"][0].is_number_integer() ||
            !e["pair"][1].is_number_integer()) {
            r.fail(w + "pair must be two integers");
        } else {
            o.i = e["pair"][0].get<int>();
            o.j = e["pair"][1].get<int>();
        }
        if (e.contains("coords")) {
            const auto& c = e["coords"];
            if (c.is_string() && (c == "cg" || c == "corner"))
                o.coords = parse_coordinate_set(c.get<std::string>());
            else
                r.fail(w + "coords must be \"cg\" or \"corner\"");
        }
        if (e.contains("domain")) {
            const auto& d = e["domain"];
            if (d == "psd")
                o.correlation = false;
            else if (d == "correlation")
                o.psd = false;
            else if (d != "both")
                r.fail(w + "domain must be \"psd\", \"correlation\" or \"both\"");
        }
        out.push_back(o);
    }
}

} // namespace detail

/// Builds a validated scenario from parsed JSON; missing fields keep their defaults.
inline Scenario scenario_from_json(const nlohmann::json& j)
{
    using detail::json;
    std::vector<std::string> errs;
    detail::SchemaReader r(errs);
    Scenario s = default_scenario();
    if (!j.is_object() && !j.is_null())
        throw ValidationError({"scenario root must be an object"});
    const json root = j.is_null() ? json::object() : j;
    r.keys(root, "", {"vehicle", "road", "speed", "grid", "lags", "outputs", "tolerances", "output_dir"});

    r.number(root, "", "speed", s.speed);
    s.road.V = s.speed;
    if (r.object(root, "vehicle"))
        detail::read_vehicle(r, root["vehicle"], s.vehicle);
    if (r.object(root, "road"))
        detail::read_road(r, root["road"], s.road, s.speed);
    s.road.V = s.speed;
    if (r.object(root, "grid")) {
        r.keys(root["grid"], "grid.", {"omega_max", "samples"});
        r.number(root["grid"], "grid.", "omega_max", s.omega_max);
        r.integer(root["grid"], "grid.", "samples", s.samples);
    }
    if (r.object(root, "lags")) {
        r.keys(root["lags"], "lags.", {"span", "step_divisor"});
        r.number(root["lags"], "lags.", "span", s.lag_span);
        r.integer(root["lags"], "lags.", "step_divisor", s.lag_divisor);
    }
    if (root.contains("outputs"))
        detail::read_outputs(r, root["outputs"], s.outputs);
    if (r.object(root, "tolerances")) {
        const json& t = root["tolerances"];
        r.keys(t, "tolerances.", {"psd_pointwise", "psd_relative_rms", "corr_relative_rms", "corr_pointwise", "corr_central_fraction"});
        r.number(t, "tolerances.", "psd_pointwise", s.tolerances.psd_pointwise);
        r.number(t, "tolerances.", "psd_relative_rms", s.tolerances.psd_relative_rms);
        r.number(t, "tolerances.", "corr_relative_rms", s.tolerances.corr_relative_rms);
        r.number(t, "tolerances.", "corr_pointwise", s.tolerances.corr_pointwise);
        r.number(t, "tolerances.", "corr_central_fraction", s.tolerances.corr_central_fraction);
    }
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string())
            errs.emplace_back("output_dir must be a string");
        else
            s.output_dir = root["output_dir"].get<std::string>();
    }

    for (auto& e : scenario_violations(s))
        errs.push_back(std::move(e));
    if (!errs.empty())
        throw ValidationError(errs);
    return s;
}

/// Reads a scenario file. An empty file yields the default scenario.
inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot read scenario file " + path.string());
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return scenario_from_json(nullptr);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError({"scenario " + path.string() + " is not valid JSON: " + e.what()});
    }
    return scenario_from_json(j);
}

/// JSON form of a scenario, readable by scenario_from_json.
inline nlohmann::json scenario_to_json(const Scenario& s)
{
    nlohmann::json j;
    const auto& p = s.vehicle;
    j["vehicle"] = {{"W1", p.W1},   {"L1f", p.L1f}, {"L1r", p.L1r}, {"ms", p.ms},   {"jsx", p.jsx}, {"jsy", p.jsy},
                    {"kf", p.kf},   {"kr", p.kr},   {"cf", p.cf},   {"cr", p.cr},   {"mu1", p.mu1}, {"mu2", p.mu2},
                    {"mu3", p.mu3}, {"mu4", p.mu4}, {"kft", p.kft}, {"krt", p.krt}, {"cft", p.cft}, {"crt", p.crt}};
    if (s.road.white())
        j["road"] = {{"model", "white"}, {"level", s.road.flat_level()}, {"mu", s.road.mu}};
    else
        j["road"] = {{"model", "iso8608"},
                     {"S0", s.road.S0},
                     {"nu0", s.road.nu0},
                     {"e", s.road.e},
                     {"nu_a", s.road.nu_a},
                     {"nu_b", s.road.nu_b},
                     {"band_speed_min", s.road.band_speed_min},
                     {"band_speed_max", s.road.band_speed_max},
                     {"mu", s.road.mu}};
    j["speed"] = s.speed;
    j["grid"] = {{"omega_max", s.omega_max}, {"samples", s.samples}};
    j["lags"] = {{"span", s.lag_span}, {"step_divisor", s.lag_divisor}};
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : s.outputs)
        j["outputs"].push_back({{"pair", {o.i, o.j}},
                                {"coords", std::string(to_string(o.coords))},
                                {"domain", o.psd && o.correlation ? "both" : (o.psd ? "psd" : "correlation")}});
    j["tolerances"] = {{"psd_pointwise", s.tolerances.psd_pointwise},
                       {"psd_relative_rms", s.tolerances.psd_relative_rms},
                       {"corr_relative_rms", s.tolerances.corr_relative_rms},
                       {"corr_pointwise", s.tolerances.corr_pointwise},
                       {"corr_central_fraction", s.tolerances.corr_central_fraction}};
    j["output_dir"] = s.output_dir;
    return j;
}

namespace detail {

inline std::string num(double v, const char* f = "%.9e")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v == 0.0 ? 0.0 : v); // fold -0
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f)
        throw Error("failed writing " + path.string());
}

inline std::string pair_name(const OutputRequest& o)
{
    const auto& labels = dof_labels(o.coords);
    return std::string(labels[static_cast<std::size_t>(o.i - 1)]) + "_" + std::string(labels[static_cast<std::size_t>(o.j - 1)]);
}

} // namespace detail

/// Modal table CSV: mode_index,label,frequency_hz,damping_percent,pole_real,pole_imag.
inline std::string modal_table_csv(const ModalDecomposition& md, const VehicleParams& geom)
{
    std::string out = "mode_index,label,frequency_hz,damping_percent,pole_real,pole_imag\n";
    int index = 1;
    for (Eigen::Index n = 0; n < md.dofs(); ++n) {
        if (md.real_pole[static_cast<std::size_t>(n)])
            continue;
        cd pole = md.poles(n);
        if (pole.imag() < 0.0)
            pole = std::conj(pole);
        const auto mp = poles_to_modal(pole);
        const std::string label = md.dofs() == 7 ? classify_mode(md.psi.col(n), CoordinateSet::cg, geom) : "Mixed";
        out += std::to_string(index++) + "," + label + "," + detail::num(mp.frequency_hz, "%.6f") + "," +
               detail::num(100.0 * mp.damping_ratio, "%.4f") + "," + detail::num(pole.real()) + "," + detail::num(pole.imag()) + "\n";
    }
    return out;
}

/// PSD CSV for one entry: omega_rad_s,freq_hz,re,im,abs,phase_rad.
inline std::string psd_csv(const SpectralMatrixFunction& S, int i, int j)
{
    std::string out = "omega_rad_s,freq_hz,re,im,abs,phase_rad\n";
    for (std::size_t k = 0; k < S.omega.size(); ++k) {
        const cd z = S.values[k](i, j);
        out += detail::num(S.omega[k]) + "," + detail::num(S.omega[k] / (2.0 * std::numbers::pi)) + "," + detail::num(z.real()) + "," +
               detail::num(z.imag()) + "," + detail::num(std::abs(z)) + "," + detail::num(z == 0.0 ? 0.0 : std::arg(z)) + "\n";
    }
    return out;
}

/// Correlation CSV for one entry: tau_s,value.
inline std::string corr_csv(const MatrixLagFunction& R, int i, int j)
{
    std::string out = "tau_s,value\n";
    for (std::size_t k = 0; k < R.grid.size(); ++k)
        out += detail::num(R.grid.tau(k)) + "," + detail::num(R.values[k](i, j)) + "\n";
    return out;
}

struct RunOptions {
    bool plots = true;
};

struct RunResult {
    bool pass = false;
    std::vector<ComparisonReport> reports;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
    std::string report_text;
};

/**
 * Runs both routes for every requested pair and writes, under
 * s.output_dir: modal_table.csv, psd_<coords>_<a>_<b>.csv and
 * corr_<coords>_<a>_<b>.csv from the modal route, optional SVG overlays of
 * both routes, and report.txt. A plot that cannot be written becomes a
 * warning. pass is true iff every comparison meets its tolerances.
 */
inline RunResult run_scenario(const Scenario& s, const RunOptions& opt = {})
{
    if (auto v = scenario_violations(s); !v.empty())
        throw ValidationError(v);
    namespace fs = std::filesystem;
    const fs::path dir(s.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

    RoadModel road = s.road;
    road.V = s.speed;
    const VehicleParams& p = s.vehicle;
    const SystemMatrices sys_cg = build_system_matrices(p, CoordinateSet::cg);
    const ModalDecomposition md = modal_decompose(to_state_space(sys_cg));
    const TvimmCoefficients coeffs = compute_coefficients(md, p);
    const StaticGain gain = static_gain(p);
    const DelayStructure ds = delay_structure(p, road.V);
    const Eigen::MatrixXd T = transformation_matrix(p);

    RunResult res;
    std::vector<std::string> lines;
    auto kv = [&](const std::string& k, const std::string& v) { lines.push_back(k + " = " + v); };
    auto write = [&](const std::string& name, const std::string& text) {
        detail::write_text(dir / name, text);
        res.files.push_back(dir / name);
    };

    write("modal_table.csv", modal_table_csv(md, p));

    const double band_lo = road.white() ? 0.0 : road.omega_a();
    const double band_hi = road.white() ? s.omega_max : std::min(road.omega_b(), s.omega_max);
    auto wants = [&](CoordinateSet c, bool psd) {
        std::vector<std::pair<int, int>> out;
        for (const auto& o : s.outputs)
            if (o.coords == c && (psd ? o.psd : o.correlation))
                out.emplace_back(o.i - 1, o.j - 1);
        return out;
    };

    kv("scenario.speed_m_s", detail::num(s.speed, "%.6g"));
    kv("scenario.axle_delay_s", detail::num(ds.tau1, "%.9g"));
    kv("scenario.grid_samples", std::to_string(s.samples));
    kv("scenario.grid_omega_max_rad_s", detail::num(s.omega_max, "%.9g"));
    kv("scenario.lag_step_s", detail::num(s.lag_step(), "%.9g"));
    kv("scenario.lag_span_s", detail::num(s.lag_span, "%.9g"));
    kv("modal.count", std::to_string(modal_table(md, p).size()));

    bool all_pass = true;
    auto log_report = [&](const std::string& prefix, const ComparisonReport& rep, const std::vector<std::pair<int, int>>& pairs,
                          CoordinateSet c) {
        const auto& labels = dof_labels(c);
        kv(prefix + ".band_lo", detail::num(rep.band_lo, "%.9g"));
        kv(prefix + ".band_hi", detail::num(rep.band_hi, "%.9g"));
        kv(prefix + ".samples", std::to_string(rep.samples));
        kv(prefix + ".max_pointwise", detail::num(rep.max_pointwise, "%.6e"));
        kv(prefix + ".tolerance_pointwise", detail::num(rep.tolerances.pointwise, "%.6e"));
        kv(prefix + ".tolerance_relative_rms", detail::num(rep.tolerances.relative_rms, "%.6e"));
        for (std::size_t q = 0; q < pairs.size(); ++q)
            kv(prefix + "." + std::string(labels[static_cast<std::size_t>(pairs[q].first)]) + "_" +
                   std::string(labels[static_cast<std::size_t>(pairs[q].second)]) + ".relative_rms",
               detail::num(rep.pairs[q].relative_rms, "%.6e"));
        kv(prefix + ".pass", rep.pass ? "true" : "false");
        all_pass = all_pass && rep.pass;
        res.reports.push_back(rep);
    };

    auto plot = [&](const std::string& name, auto&& body) {
        if (!opt.plots)
            return;
        try {
            body(dir / name);
            res.files.push_back(dir / name);
        } catch (const std::exception& e) {
            res.warnings.push_back("plot " + name + " skipped: " + e.what());
        }
    };

    // Spectral domain.
    const bool any_psd = !wants(CoordinateSet::cg, true).empty() || !wants(CoordinateSet::corner, true).empty();
    SpectralMatrixFunction S_tv_cg;
    if (any_psd) {
        const auto grid = frequency_grid(s.omega_max, s.samples);
        S_tv_cg = output_psd_tvimm(grid, md, coeffs, road, ds);
        for (CoordinateSet c : {CoordinateSet::cg, CoordinateSet::corner}) {
            const auto pairs = wants(c, true);
            if (pairs.empty())
                continue;
            const auto tv = c == CoordinateSet::cg ? S_tv_cg : map_coordinates(S_tv_cg, T);
            const auto orc = output_psd_oracle(grid, build_system_matrices(p, c), road, gain, ds);
            auto rep = compare(tv, orc, {s.tolerances.psd_relative_rms, s.tolerances.psd_pointwise}, band_lo, band_hi, pairs);
            rep.quantity = "psd." + std::string(to_string(c));
            log_report(rep.quantity, rep, pairs, c);
            for (const auto& o : s.outputs) {
                if (o.coords != c || !o.psd)
                    continue;
                const std::string stem = "psd_" + std::string(to_string(c)) + "_" + detail::pair_name(o);
                write(stem + ".csv", psd_csv(tv, o.i - 1, o.j - 1));
                plot(stem + ".svg", [&](const fs::path& path) {
                    svg::Series ma{"modal route", {}, {}, "#1f77b4", false}, mb{"input-output formula", {}, {}, "#d62728", true};
                    svg::Series pa = ma, pb = mb;
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        const double f = grid[k] / (2.0 * std::numbers::pi);
                        const cd za = tv.values[k](o.i - 1, o.j - 1), zb = orc.values[k](o.i - 1, o.j - 1);
                        if (za == 0.0 && zb == 0.0)
                            continue;
                        ma.x.push_back(f), ma.y.push_back(std::abs(za));
                        mb.x.push_back(f), mb.y.push_back(std::abs(zb));
                        pa.x.push_back(f), pa.y.push_back(std::arg(za));
                        pb.x.push_back(f), pb.y.push_back(std::arg(zb));
                    }
                    svg::write_plot(path, "S " + detail::pair_name(o) + " (" + std::string(to_string(c)) + ")", "frequency (Hz)",
                                    {{"magnitude", true, {ma, mb}}, {"phase (rad)", false, {pa, pb}}});
                });
            }
        }
        try {
            kv("diagnostic.phase_wrap_spacing_hz.zu1_zu3", detail::num(phase_wrap_spacing_hz(S_tv_cg, 3, 5, band_lo, band_hi), "%.6f"));
        } catch (const DomainError&) {
            kv("diagnostic.phase_wrap_spacing_hz.zu1_zu3", "n/a");
        }
    }

    // Lag domain.
    const bool any_corr = !wants(CoordinateSet::cg, false).empty() || !wants(CoordinateSet::corner, false).empty();
    if (any_corr) {
        const LagGrid lags = LagGrid::covering(s.lag_step(), s.lag_span);
        const auto R_tv_cg = output_corr_tvimm(lags, md, coeffs, road, ds);
        for (CoordinateSet c : {CoordinateSet::cg, CoordinateSet::corner}) {
            const auto pairs = wants(c, false);
            if (pairs.empty())
                continue;
            const auto tv = c == CoordinateSet::cg ? R_tv_cg : map_coordinates(R_tv_cg, T);
            const auto orc = output_corr_oracle(lags, build_system_matrices(p, c), road, gain, ds);
            auto rep = compare(tv, orc, {s.tolerances.corr_relative_rms, s.tolerances.corr_pointwise}, s.tolerances.corr_central_fraction,
                               pairs);
            rep.quantity = "corr." + std::string(to_string(c));
            log_report(rep.quantity, rep, pairs, c);
            for (const auto& o : s.outputs) {
                if (o.coords != c || !o.correlation)
                    continue;
                const std::string stem = "corr_" + std::string(to_string(c)) + "_" + detail::pair_name(o);
                write(stem + ".csv", corr_csv(tv, o.i - 1, o.j - 1));
                plot(stem + ".svg", [&](const fs::path& path) {
                    svg::Series a{"modal route", {}, {}, "#1f77b4", false}, b{"input-output formula", {}, {}, "#d62728", true};
                    for (std::size_t k = 0; k < lags.size(); ++k) {
                        a.x.push_back(lags.tau(k)), a.y.push_back(tv.values[k](o.i - 1, o.j - 1));
                        b.x.push_back(lags.tau(k)), b.y.push_back(orc.values[k](o.i - 1, o.j - 1));
                    }
                    svg::write_plot(path, "R " + detail::pair_name(o) + " (" + std::string(to_string(c)) + ")", "lag (s)",
                                    {{"correlation", false, {a, b}}});
                });
            }
        }
        std::vector<double> omega;
        const double dw = (band_hi - band_lo) / 512.0;
        for (int k = 0; k <= 512; ++k)
            omega.push_back(band_lo + dw * k);
        const auto half = half_spectrum_check(omega, OutputSpectra{{}, R_tv_cg}, md, coeffs, road, ds, {{3, 5}});
        kv("diagnostic.half_spectrum_discrepancy.zu1_zu3", detail::num(half.max_discrepancy(), "%.6e"));
    }

    kv("overall.pass", all_pass ? "true" : "false");
    std::string text = "# roadmodal comparison report\n"
                       "# convention: R_xy(tau) = E[x(t) y(t + tau)], S_xy(w) = int R_xy(tau) exp(-i w tau) dtau\n"
                       "# spectra are two-sided in angular frequency (rad/s); dof indices follow the listed labels\n"
                       "# routes: modal reference-vector synthesis vs input-output formula with the receptance matrix\n";
    for (const auto& l : lines)
        text += l + "\n";
    write("report.txt", text);
    res.report_text = std::move(text);
    res.pass = all_pass;
    return res;
}

} // namespace roadmodal
