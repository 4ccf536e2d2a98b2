#include "nldecay/scenario.hpp"

#include "nldecay/decay.hpp"
#include "nldecay/initial_data.hpp"
#include "nldecay/integrator.hpp"
#include "nldecay/nonlinearity.hpp"
#include "nldecay/scole_model.hpp"
#include "nldecay/spectral.hpp"
#include "nldecay/wave_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nldecay {

// ---- SHA-256 ----------------------------------------------------------------

namespace {

constexpr uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

void sha256_block(uint32_t* h, const unsigned char* p) {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
        w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) |
               (uint32_t(p[4 * i + 2]) << 8) | uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
        const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
        const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const uint32_t ch = (e & f) ^ (~e & g);
        const uint32_t t1 = hh + s1 + ch + kSha256K[i] + w[i];
        const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const uint32_t t2 = s0 + maj;
        hh = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    const uint64_t bit_len = uint64_t(bytes.size()) * 8;
    std::string padded = bytes;
    padded.push_back(char(0x80));
    while (padded.size() % 64 != 56) padded.push_back('\0');
    for (int i = 7; i >= 0; --i) padded.push_back(char((bit_len >> (8 * i)) & 0xff));
    for (size_t off = 0; off < padded.size(); off += 64)
        sha256_block(h, reinterpret_cast<const unsigned char*>(padded.data() + off));
    char out[65];
    for (int i = 0; i < 8; ++i) snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
}

// ---- Config -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: malformed line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config: empty key in '" + line + "'");
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' has non-numeric value '" +
                                 it->second + "'");
    }
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        size_t pos = 0;
        const int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: key '" + key + "' has non-integer value '" +
                                 it->second + "'");
    }
}

std::string Config::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw std::runtime_error("config: missing required key '" + key + "'");
    return it->second;
}

// ---- presets ----------------------------------------------------------------

namespace {

struct PresetDef {
    const char* name;
    const char* description;
    const char* text;
};

const PresetDef kPresets[] = {
    {"wave-beta1-linear",
     "weakly damped wave, b_n = n^-1, identity damping: decay rate t^(-1/(2 beta)) "
     "with beta = 1, two-sided on the fit window",
     "[model]\nkind = wave\nbeta = 1.0\nmodes = 128\n"
     "[phi]\nname = identity\n"
     "[schedule]\nt_end = 2000\ndt = 0.01\nsample_stride = 100\n"
     "[analysis]\nset = decay\nwindow_lo = 100\nwindow_hi = 2000\npredicted = 0.5\n"},
    {"wave-beta1-tanh",
     "weakly damped wave, beta = 1, radial tanh damping (kappa = 1, gamma = 3): "
     "near-linear damping reproduces the linear rate t^(-1/2)",
     "[model]\nkind = wave\nbeta = 1.0\nmodes = 128\n"
     "[phi]\nname = tanh\n"
     "[schedule]\nt_end = 2000\ndt = 0.01\nsample_stride = 100\n"
     "[analysis]\nset = decay\nwindow_lo = 100\nwindow_hi = 2000\npredicted = 0.5\n"},
    {"wave-beta1-cubic-control",
     "negative control: radial psi(r) = r^3 violates the small-signal sector bound, "
     "decay must fall strictly below the t^(-1/2) band",
     "[model]\nkind = wave\nbeta = 1.0\nmodes = 128\n"
     "[phi]\nname = power:3\n"
     "[schedule]\nt_end = 2000\ndt = 0.01\nsample_stride = 100\n"
     "[analysis]\nset = decay\nwindow_lo = 100\nwindow_hi = 2000\npredicted = 0.5\n"
     "theta_max = 0.35\n"},
    {"wave-beta0.75-linear",
     "rate scaling in beta: b_n = n^-0.75 gives decay exponent 1/(2 beta) = 2/3; "
     "fit window ends before the slowest retained mode saturates (t ~ N^(2 beta)/2)",
     "[model]\nkind = wave\nbeta = 0.75\nmodes = 128\n"
     "[phi]\nname = identity\n"
     "[schedule]\nt_end = 700\ndt = 0.01\nsample_stride = 100\n"
     "[analysis]\nset = decay\nwindow_lo = 60\nwindow_hi = 700\npredicted = 0.6666666666666666\n"},
    {"wave-beta1.5-linear",
     "rate scaling in beta: b_n = n^-1.5 gives decay exponent 1/(2 beta) = 1/3",
     "[model]\nkind = wave\nbeta = 1.5\nmodes = 128\n"
     "[phi]\nname = identity\n"
     "[schedule]\nt_end = 2000\ndt = 0.01\nsample_stride = 100\n"
     "[analysis]\nset = decay\nwindow_lo = 100\nwindow_hi = 2000\npredicted = 0.3333333333333333\n"},
    {"scole-linear",
     "beam with tip mass, identity damping through the tip velocities: decay rate "
     "t^(-1/2) on smooth data, envelope within the 1 + s^2 resolvent bound "
     "(measured growth is linear in s: tip coupling of mode k scales like "
     "1/omega_k), multiplier inequalities with zeta = 2x; dt keeps "
     "omega_max * dt below pi so no pair aliases across a full rotation",
     "[model]\nkind = scole\nelements = 64\nm = 1\nj = 1\nei = 1\nrho = 1\n"
     "[phi]\nname = identity\n"
     "[schedule]\nt_end = 800\ndt = 1.2e-5\nsample_stride = 25000\n"
     "[analysis]\nset = decay,resolvent,invariants\nwindow_lo = 40\nwindow_hi = 800\n"
     "predicted = 0.5\n"
     "[resolvent]\nkappa = 1\nslope_expected = 1.0\nslope_band = 0.4\n"
     "quadratic_bound = 1\n"
     "[invariants]\nt_end = 5\ndt = 1.2e-5\n"},
    {"scole-tanh",
     "beam with tip mass, radial tanh damping: near-linear damping reproduces the "
     "linear rate t^(-1/2)",
     "[model]\nkind = scole\nelements = 64\nm = 1\nj = 1\nei = 1\nrho = 1\n"
     "[phi]\nname = tanh\n"
     "[schedule]\nt_end = 800\ndt = 1.2e-5\nsample_stride = 25000\n"
     "[analysis]\nset = decay\nwindow_lo = 40\nwindow_hi = 800\npredicted = 0.5\n"},
    {"wave-observability",
     "observability constant c_tau of the weighted Gramian pencil for the wave "
     "model, beta = 1, tau = 3 > 2 pi / gap (Ingham regime)",
     "[model]\nkind = wave\nbeta = 1.0\nmodes = 64\n"
     "[phi]\nname = identity\n"
     "[analysis]\nset = observability\n"
     "[observability]\ntau = 3\nbeta = 1\n"},
    {"wave-resolvent-sweep",
     "resolvent envelope of A - B B* for the wave model, beta = 1: local maxima "
     "grow like |s|^(2 beta) = s^2",
     "[model]\nkind = wave\nbeta = 1.0\nmodes = 256\n"
     "[phi]\nname = identity\n"
     "[analysis]\nset = resolvent\n"
     "[resolvent]\nkappa = 1\nslope_expected = 2.0\nslope_band = 0.3\n"},
    {"wave-beta2-resolvent",
     "resolvent envelope for beta = 2: local maxima grow like |s|^(2 beta) = s^4",
     "[model]\nkind = wave\nbeta = 2.0\nmodes = 256\n"
     "[phi]\nname = identity\n"
     "[analysis]\nset = resolvent\n"
     "[resolvent]\nkappa = 1\nslope_expected = 4.0\nslope_band = 0.5\n"},
};

void format_float(std::ostream& out, double v) {
    char buf[40];
    snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---- SVG plotting (self-contained, no dependency) ---------------------------

struct SvgSeries {
    std::vector<double> x, y;  // already in log10
};

std::string log_log_svg(const std::string& title, const SvgSeries& data,
                        double guide_slope, const std::string& x_label,
                        const std::string& y_label) {
    const double w = 800, h = 520, l = 70, r = 770, top = 40, bot = 480;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (size_t i = 0; i < data.x.size(); ++i) {
        xmin = std::min(xmin, data.x[i]);
        xmax = std::max(xmax, data.x[i]);
        ymin = std::min(ymin, data.y[i]);
        ymax = std::max(ymax, data.y[i]);
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    auto px = [&](double x) { return l + (r - l) * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return bot - (bot - top) * (y - ymin) / (ymax - ymin); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";
    out << "<line x1=\"" << l << "\" y1=\"" << bot << "\" x2=\"" << r << "\" y2=\""
        << bot << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << l << "\" y1=\"" << top << "\" x2=\"" << l << "\" y2=\""
        << bot << "\" stroke=\"black\"/>\n";
    out << "<text x=\"420\" y=\"510\" text-anchor=\"middle\" font-size=\"13\">"
        << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"260\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 18 260)\">"
        << y_label << "</text>\n";

    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    char buf[64];
    for (size_t i = 0; i < data.x.size(); ++i) {
        snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(data.x[i]), py(data.y[i]));
        out << buf;
    }
    out << "\"/>\n";

    if (guide_slope != 0.0 && data.x.size() >= 2) {
        // guide line with the predicted slope through the series midpoint
        const double xm = 0.5 * (xmin + xmax);
        size_t mid = 0;
        for (size_t i = 0; i < data.x.size(); ++i)
            if (std::abs(data.x[i] - xm) < std::abs(data.x[mid] - xm)) mid = i;
        const double y0 = data.y[mid] + guide_slope * (xmin - data.x[mid]);
        const double y1 = data.y[mid] + guide_slope * (xmax - data.x[mid]);
        snprintf(buf, sizeof(buf), "%.2f", px(xmin));
        out << "<line x1=\"" << buf;
        snprintf(buf, sizeof(buf), "%.2f", py(y0));
        out << "\" y1=\"" << buf;
        snprintf(buf, sizeof(buf), "%.2f", px(xmax));
        out << "\" x2=\"" << buf;
        snprintf(buf, sizeof(buf), "%.2f", py(y1));
        out << "\" y2=\"" << buf
            << "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\" stroke-width=\"1.2\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace

std::vector<PresetInfo> list_presets() {
    std::vector<PresetInfo> out;
    for (const auto& p : kPresets) out.push_back({p.name, p.description});
    return out;
}

Config preset_config(const std::string& name) {
    for (const auto& p : kPresets)
        if (name == p.name) return Config::parse(p.text);
    throw std::runtime_error("unknown preset '" + name + "'");
}

// ---- scenario runner ---------------------------------------------------------

namespace {

struct ArtifactWriter {
    std::string dir;
    std::vector<ManifestEntry> manifest;

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir + "/" + name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
        out << content;
        manifest.push_back({name, sha256_hex(content)});
    }
};

}  // namespace

ScenarioResult run_scenario(const Config& config, const std::string& out_dir,
                            unsigned long long seed, bool svg) {
    const std::string kind = config.require("model.kind");
    DampedSystem system;
    double wave_beta = 0.0;
    if (kind == "wave") {
        WaveModelConfig wc;
        wc.beta = config.get_double("model.beta", 1.0);
        wc.modes = config.get_int("model.modes", 128);
        wave_beta = wc.beta;
        system = build_wave_modal(wc);
    } else if (kind == "scole") {
        ScoleConfig sc;
        const double ei = config.get_double("model.ei", 1.0);
        const double rho = config.get_double("model.rho", 1.0);
        sc.EI = [ei](double) { return ei; };
        sc.rho = [rho](double) { return rho; };
        sc.m = config.get_double("model.m", 1.0);
        sc.J = config.get_double("model.j", 1.0);
        sc.elements = config.get_int("model.elements", 64);
        system = build_scole_fem(sc);
    } else {
        throw std::runtime_error("config: model.kind must be wave or scole, got '" +
                                 kind + "'");
    }

    const Nonlinearity phi = Nonlinearity::from_name(config.get_string("phi.name", "identity"));

    const std::vector<std::string> analyses =
        split_list(config.get_string("analysis.set", ""));
    if (analyses.empty())
        throw std::runtime_error("config: analysis.set must select at least one analysis");
    for (const auto& a : analyses)
        if (a != "decay" && a != "resolvent" && a != "observability" && a != "invariants")
            throw std::runtime_error("config: unknown analysis '" + a + "' in analysis.set");

    std::filesystem::create_directories(out_dir);
    ArtifactWriter artifacts{out_dir, {}};
    ScenarioResult result;

    const double predicted =
        config.get_double("analysis.predicted",
                          kind == "wave" ? 1.0 / (2.0 * wave_beta) : 0.5);

    for (const auto& analysis : analyses) {
        if (analysis == "decay") {
            Schedule sched;
            sched.t_end = config.get_double("schedule.t_end", 2000.0);
            sched.dt = config.get_double("schedule.dt", 1e-2);
            sched.sample_stride = config.get_int("schedule.sample_stride", 100);
            sched.substep_tol = config.get_double("schedule.substep_tol", 1e-12);

            const Eigen::VectorXd x0 = smooth_state(system, seed);
            const Trajectory traj = integrate(system, phi, x0, sched);

            const double w_lo = config.get_double("analysis.window_lo", 0.05 * sched.t_end);
            const double w_hi = config.get_double("analysis.window_hi", sched.t_end);
            DecayReport report = fit_decay_exponent(traj, w_lo, w_hi);
            report.predicted = predicted;
            const auto [sup_scaled, tail_scaled] = sharpness_check(traj, predicted, w_lo, w_hi);
            report.sup_scaled = sup_scaled;
            report.tail_scaled = tail_scaled;

            std::ostringstream tcsv;
            write_trajectory_csv(traj, tcsv);
            artifacts.write("trajectory.csv", tcsv.str());
            std::ostringstream dcsv;
            write_decay_csv(report, dcsv);
            artifacts.write("decay_report.csv", dcsv.str());

            if (svg) {
                SvgSeries series;
                for (size_t i = 0; i < traj.times.size(); ++i) {
                    if (traj.times[i] <= 0 || traj.norms[i] <= 0) continue;
                    series.x.push_back(std::log10(traj.times[i]));
                    series.y.push_back(std::log10(traj.norms[i]));
                }
                artifacts.write("decay.svg",
                                log_log_svg("state norm decay (log-log)", series,
                                            -predicted, "log10 t", "log10 |x|"));
            }

            if (config.has("analysis.theta_max")) {
                const double cap = config.get_double("analysis.theta_max", 0.35);
                if (report.theta_hat > cap)
                    result.failures.push_back("decay: theta_hat above negative-control cap");
            } else {
                const double band = config.get_double("analysis.theta_band", 0.15);
                if (std::abs(report.theta_hat - predicted) > band)
                    result.failures.push_back("decay: theta_hat outside predicted band");
                const double sharp_min = config.get_double("analysis.sharpness_min", 0.1);
                if (report.tail_scaled < sharp_min * report.sup_scaled)
                    result.failures.push_back("decay: scaled norm not bounded away from 0 "
                                              "(rate looks pessimistic)");
            }
        } else if (analysis == "resolvent") {
            const double kappa = config.get_double("resolvent.kappa", 1.0);
            const double s_min = config.get_double("resolvent.s_min", 1.0);
            const double s_max = config.get_double("resolvent.s_max", 1e9);
            ResolventCurve curve = resolvent_growth_fit(system, kappa, s_min, s_max);

            std::ostringstream rcsv;
            write_resolvent_csv(curve, rcsv);
            artifacts.write("resolvent.csv", rcsv.str());
            std::ostringstream fcsv;
            fcsv << "key,value\nenvelope_slope,";
            format_float(fcsv, curve.envelope_slope);
            fcsv << "\nenvelope_stderr,";
            format_float(fcsv, curve.envelope_stderr);
            fcsv << "\nkappa,";
            format_float(fcsv, curve.kappa);
            fcsv << "\npeaks," << curve.peak_s.size() << '\n';
            artifacts.write("resolvent_fit.csv", fcsv.str());

            if (svg) {
                SvgSeries series;
                for (size_t i = 0; i < curve.s_values.size(); ++i) {
                    if (curve.s_values[i] <= 0) continue;
                    series.x.push_back(std::log10(curve.s_values[i]));
                    series.y.push_back(std::log10(curve.norms[i]));
                }
                artifacts.write("resolvent.svg",
                                log_log_svg("resolvent norm along the imaginary axis",
                                            series, curve.envelope_slope, "log10 s",
                                            "log10 |(is-A_k)^-1|"));
            }

            if (config.has("resolvent.slope_expected")) {
                const double expected = config.get_double("resolvent.slope_expected", 2.0);
                const double band = config.get_double("resolvent.slope_band", 0.5);
                if (std::abs(curve.envelope_slope - expected) > band)
                    result.failures.push_back("resolvent: envelope slope outside band");
            }
            if (config.get_int("resolvent.quadratic_bound", 0) && !curve.peak_s.empty()) {
                // upper-bound certificate |(is-A_k)^-1| <= C (1 + s^2), with C
                // anchored at the lowest envelope maximum
                const double c0 =
                    10.0 * curve.peak_norms[0] / (1.0 + curve.peak_s[0] * curve.peak_s[0]);
                for (size_t i = 0; i < curve.peak_s.size(); ++i)
                    if (curve.peak_norms[i] >
                        c0 * (1.0 + curve.peak_s[i] * curve.peak_s[i])) {
                        result.failures.push_back(
                            "resolvent: envelope exceeds the quadratic growth bound");
                        break;
                    }
            }
        } else if (analysis == "observability") {
            const double tau = config.get_double("observability.tau", 3.0);
            const double beta = config.get_double("observability.beta",
                                                  kind == "wave" ? wave_beta : 1.0);
            const ObservabilityReport report = observability_constant(system, tau, beta);
            std::ostringstream ocsv;
            write_observability_csv(report, ocsv);
            artifacts.write("observability.csv", ocsv.str());
            if (!(report.c_tau > 0))
                result.failures.push_back("observability: c_tau not strictly positive");
            if (!report.ingham_regime)
                result.failures.push_back("observability: tau below the Ingham threshold");
        } else {  // invariants
            Schedule sched;
            sched.t_end = config.get_double("invariants.t_end", 20.0);
            sched.dt = config.get_double("invariants.dt", 1e-3);
            sched.sample_stride = config.get_int("invariants.sample_stride", 10);
            sched.substep_tol = config.get_double("schedule.substep_tol", 1e-12);

            const Eigen::VectorXd x0 = random_state(system, seed);
            const Trajectory traj = integrate(system, phi, x0, sched);
            const std::vector<double> residual = energy_balance_residual(traj);
            double max_resid = 0.0;
            for (double r : residual) max_resid = std::max(max_resid, std::abs(r));
            double norm_increase = 0.0;
            for (size_t i = 1; i < traj.norms.size(); ++i)
                norm_increase = std::max(norm_increase, traj.norms[i] - traj.norms[i - 1]);
            const double xdot_increase = derivative_monotonicity_check(traj);
            const Eigen::VectorXd x0b = random_state(system, seed + 1);
            const double contraction_drift =
                contraction_check(system, phi, x0, x0b, sched);
            const double skewness =
                (system.generator + system.generator.transpose()).norm() /
                system.generator.norm();

            std::ostringstream icsv;
            icsv << "key,value\nenergy_residual_max,";
            format_float(icsv, max_resid);
            icsv << "\nnorm_max_increase,";
            format_float(icsv, norm_increase);
            icsv << "\nxdot_max_increase,";
            format_float(icsv, xdot_increase);
            icsv << "\ncontraction_drift,";
            format_float(icsv, contraction_drift);
            icsv << "\nskewness_residual,";
            format_float(icsv, skewness);
            if (kind == "scole") {
                ScoleConfig sc;
                const double ei = config.get_double("model.ei", 1.0);
                const double rho = config.get_double("model.rho", 1.0);
                sc.EI = [ei](double) { return ei; };
                sc.rho = [rho](double) { return rho; };
                MultiplierConfig mc;
                const double slope = config.get_double("multiplier.zeta_slope", 2.0);
                mc.zeta = [slope](double x) { return slope * x; };
                mc.a = config.get_double("multiplier.a", 0.5);
                mc.b = config.get_double("multiplier.b", 0.5);
                const MultiplierReport mr = check_multiplier_condition(sc, mc);
                icsv << "\nmultiplier_density_max,";
                format_float(icsv, mr.max_density_expr);
                icsv << "\nmultiplier_rigidity_max,";
                format_float(icsv, mr.max_rigidity_expr);
                icsv << "\nmultiplier_pass," << (mr.pass ? 1 : 0);
                if (!mr.pass)
                    result.failures.push_back("invariants: multiplier condition failed");
            }
            icsv << '\n';
            artifacts.write("invariants.csv", icsv.str());

            const double e0 = traj.norms.front() * traj.norms.front();
            if (max_resid > config.get_double("invariants.residual_max", 1e-6) * e0)
                result.failures.push_back("invariants: energy-balance residual too large");
            if (norm_increase > 1e-10 * traj.norms.front())
                result.failures.push_back("invariants: norm not monotone");
            if (!traj.xdot_norms.empty() &&
                xdot_increase > 1e-9 * std::max(traj.xdot_norms.front(), 1e-30))
                result.failures.push_back("invariants: |x'| not monotone");
            if (contraction_drift > 1e-9 * (x0b - x0).norm())
                result.failures.push_back("invariants: pair contraction violated");
            if (skewness > 1e-10)
                result.failures.push_back("invariants: generator skewness residual too large");
        }
    }

    // manifest last; sorted for stable bytes
    std::sort(artifacts.manifest.begin(), artifacts.manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.file < b.file; });
    std::ostringstream mcsv;
    mcsv << "file,sha256\n";
    for (const auto& e : artifacts.manifest) mcsv << e.file << ',' << e.sha256 << '\n';
    {
        std::ofstream out(out_dir + "/manifest.csv", std::ios::binary);
        out << mcsv.str();
    }
    result.manifest = artifacts.manifest;
    result.exit_code = result.failures.empty() ? 0 : 2;
    return result;
}

}  // namespace nldecay
