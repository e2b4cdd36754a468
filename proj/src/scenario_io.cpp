#include "irslos/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "irslos/csv.hpp"

namespace irslos {

namespace {

struct Entry {
    std::string value;
    std::string origin;
    int line;
};

using EntryMap = std::map<std::string, Entry>;

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "wave.wavelength_m",       "wave.frequency_hz",       "wave.absorption_per_m",
        "tx.n_antennas",           "tx.spacing_m",            "tx.distance_m",
        "tx.azimuth_rad",          "tx.elevation_rad",        "tx.orient_azimuth_rad",
        "tx.orient_elevation_rad", "rx.n_antennas",           "rx.spacing_m",
        "rx.distance_m",           "rx.azimuth_rad",          "rx.elevation_rad",
        "rx.orient_azimuth_rad",   "rx.orient_elevation_rad", "irs.q_x",
        "irs.q_y",                 "irs.spacing_x_m",         "irs.spacing_y_m",
        "irs.re_len_x_m",          "irs.re_len_y_m",          "reflection.tau",
        "reflection.polarization_rad", "power.per_antenna_w", "power.noise_w",
        "focusing.mode",           "focusing.betas_rad",
    };
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string where(const Entry& e) { return e.origin + ":" + std::to_string(e.line) + ": "; }

void read_entries(const std::string& text, const std::string& origin, EntryMap& out, bool allow_override) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::set<std::string> seen;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(line) + ": expected `key = value`");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const Entry e{value, origin, line};
        if (key.empty()) throw ParseError(where(e) + "empty key");
        if (value.empty()) throw ParseError(where(e) + "empty value for `" + key + "`");
        if (key.rfind("metadata.", 0) != 0 && !known_keys().count(key))
            throw ParseError(where(e) + "unknown key `" + key + "`");
        if (seen.count(key)) throw ParseError(where(e) + "duplicate key `" + key + "`");
        seen.insert(key);
        if (!allow_override && out.count(key)) throw ParseError(where(e) + "duplicate key `" + key + "`");
        out[key] = e;
    }
}

class Builder {
public:
    Builder(const EntryMap& m, std::string origin) : m_(m), origin_(std::move(origin)) {}

    bool has(const std::string& k) const { return m_.count(k) > 0; }

    const Entry& entry(const std::string& k) const {
        auto it = m_.find(k);
        if (it == m_.end()) throw ParseError(origin_ + ": missing required key `" + k + "`");
        return it->second;
    }

    double num(const std::string& k) const {
        const Entry& e = entry(k);
        try {
            return parse_value(e.value);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(where(e) + ex.what());
        }
    }

    double num(const std::string& k, double fallback) const { return has(k) ? num(k) : fallback; }

    int integer(const std::string& k) const {
        const Entry& e = entry(k);
        char* end = nullptr;
        const long v = std::strtol(e.value.c_str(), &end, 10);
        if (end == e.value.c_str() || *end != '\0') throw ParseError(where(e) + "`" + k + "` must be an integer");
        return static_cast<int>(v);
    }

    std::string text(const std::string& k, const std::string& fallback) const {
        return has(k) ? entry(k).value : fallback;
    }

    [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
        if (has(k)) throw ParseError(where(entry(k)) + msg);
        throw ParseError(origin_ + ": " + msg);
    }

    void check(bool ok, const std::string& k, const std::string& msg) const {
        if (!ok) fail(k, msg);
    }

private:
    const EntryMap& m_;
    std::string origin_;
};

ArrayPose read_pose(const Builder& b, const std::string& side, double default_spacing) {
    const std::string tag = side == "tx" ? "N_t" : "N_r";
    ArrayPose a;
    a.n_antennas = b.integer(side + ".n_antennas");
    b.check(a.n_antennas >= 1, side + ".n_antennas", tag + " must be >= 1");
    b.check(a.n_antennas % 2 == 1, side + ".n_antennas", tag + " must be odd");
    a.spacing = default_spacing > 0 && !b.has(side + ".spacing_m") ? default_spacing : b.num(side + ".spacing_m");
    a.distance = b.num(side + ".distance_m");
    a.azimuth = b.num(side + ".azimuth_rad");
    a.elevation = b.num(side + ".elevation_rad");
    a.orient_azimuth = b.num(side + ".orient_azimuth_rad", 0.0);
    a.orient_elevation = b.num(side + ".orient_elevation_rad", kPi / 2);
    b.check(a.spacing > 0, side + ".spacing_m", side + " spacing must be > 0");
    b.check(a.distance > 0, side + ".distance_m", side + " distance must be > 0");
    b.check(a.azimuth >= 0 && a.azimuth < kTwoPi, side + ".azimuth_rad", side + " azimuth must lie in [0, 2pi)");
    b.check(a.elevation >= 0 && a.elevation <= kPi / 2, side + ".elevation_rad",
            side + " elevation must lie in [0, pi/2]");
    b.check(a.orient_azimuth >= 0 && a.orient_azimuth < kTwoPi, side + ".orient_azimuth_rad",
            side + " orientation azimuth must lie in [0, 2pi)");
    b.check(a.orient_elevation >= 0 && a.orient_elevation <= kPi, side + ".orient_elevation_rad",
            side + " orientation elevation must lie in [0, pi]");
    return a;
}

Scenario build(const EntryMap& m, const std::string& origin) {
    const Builder b(m, origin);
    Scenario s;

    const bool has_wl = b.has("wave.wavelength_m"), has_f = b.has("wave.frequency_hz");
    if (has_wl == has_f) b.fail("wave.frequency_hz", "exactly one of wave.wavelength_m, wave.frequency_hz is required");
    s.wave.wavelength = has_wl ? b.num("wave.wavelength_m") : kSpeedOfLight / b.num("wave.frequency_hz");
    b.check(s.wave.wavelength > 0 && std::isfinite(s.wave.wavelength), has_wl ? "wave.wavelength_m" : "wave.frequency_hz",
            "wavelength must be > 0");
    s.wave.absorption = b.num("wave.absorption_per_m", 0.0);
    b.check(s.wave.absorption >= 0, "wave.absorption_per_m", "absorption coefficient must be >= 0");

    s.tx = read_pose(b, "tx", 0.0);
    s.rx = read_pose(b, "rx", s.tx.spacing);
    if (!b.has("rx.spacing_m")) s.metadata["assumption.rx_spacing"] = "defaulted to tx.spacing_m";

    s.irs.q_x = b.integer("irs.q_x");
    s.irs.q_y = b.integer("irs.q_y");
    b.check(s.irs.q_x >= 1 && s.irs.q_x % 2 == 1, "irs.q_x", "Q_x must be odd");
    b.check(s.irs.q_y >= 1 && s.irs.q_y % 2 == 1, "irs.q_y", "Q_y must be odd");
    s.irs.spacing_x = b.num("irs.spacing_x_m");
    s.irs.spacing_y = b.num("irs.spacing_y_m");
    s.irs.re_len_x = b.num("irs.re_len_x_m", s.irs.spacing_x);
    s.irs.re_len_y = b.num("irs.re_len_y_m", s.irs.spacing_y);
    b.check(s.irs.spacing_x > 0, "irs.spacing_x_m", "RE spacing must be > 0");
    b.check(s.irs.spacing_y > 0, "irs.spacing_y_m", "RE spacing must be > 0");
    b.check(s.irs.re_len_x >= 0 && s.irs.re_len_x <= s.irs.spacing_x, "irs.re_len_x_m",
            "RE length must lie in [0, spacing]");
    b.check(s.irs.re_len_y >= 0 && s.irs.re_len_y <= s.irs.spacing_y, "irs.re_len_y_m",
            "RE length must lie in [0, spacing]");

    s.reflection.tau = b.num("reflection.tau", 1.0);
    s.reflection.polarization = b.num("reflection.polarization_rad", kPi / 3);
    b.check(s.reflection.tau > 0 && s.reflection.tau <= 1, "reflection.tau", "tau must lie in (0, 1]");

    s.power.per_antenna_power = b.num("power.per_antenna_w", 1.0);
    s.power.noise_power = b.num("power.noise_w", 1.0);
    b.check(s.power.per_antenna_power > 0, "power.per_antenna_w", "power must be > 0");
    b.check(s.power.noise_power > 0, "power.noise_w", "noise power must be > 0");

    const std::string mode = b.text("focusing.mode", "reflective");
    if (mode == "reflective") {
        s.focusing = FocusingMode::reflective;
    } else if (mode == "zero") {
        s.focusing = FocusingMode::zero;
    } else if (mode == "explicit") {
        s.focusing = FocusingMode::explicit_betas;
        const Entry& e = b.entry("focusing.betas_rad");
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                s.betas.push_back(parse_value(trim(item)));
            } catch (const std::invalid_argument& ex) {
                throw ParseError(where(e) + ex.what());
            }
        }
        b.check(static_cast<int>(s.betas.size()) == s.irs.count(), "focusing.betas_rad",
                "focusing.betas_rad needs Q_x*Q_y values");
    } else {
        b.fail("focusing.mode", "focusing.mode must be reflective, zero or explicit");
    }
    if (mode != "explicit" && b.has("focusing.betas_rad"))
        b.fail("focusing.betas_rad", "focusing.betas_rad requires focusing.mode = explicit");

    for (const auto& [k, e] : m)
        if (k.rfind("metadata.", 0) == 0) s.metadata[k.substr(9)] = e.value;
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

double parse_value(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty numeric value");
    std::size_t i = 0;
    double sign = 1.0;
    if (t[i] == '-' || t[i] == '+') {
        if (t[i] == '-') sign = -1.0;
        ++i;
    }
    auto term = [&]() -> double {
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (t.compare(i, 2, "pi") == 0) {
            i += 2;
            return kPi;
        }
        const char* start = t.c_str() + i;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        if (end == start) throw std::invalid_argument("cannot parse number `" + t + "`");
        i += static_cast<std::size_t>(end - start);
        return v;
    };
    double v = term();
    while (true) {
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (i >= t.size()) break;
        const char op = t[i++];
        if (op == '*') {
            v *= term();
        } else if (op == '/') {
            v /= term();
        } else {
            throw std::invalid_argument("cannot parse number `" + t + "`");
        }
    }
    v *= sign;
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value `" + t + "`");
    return v;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    EntryMap m;
    read_entries(text, origin, m, false);
    return build(m, origin);
}

Scenario parse_scenario(const std::string& path) { return parse_scenario_text(read_file(path), path); }

Scenario parse_scenario_text_with_overlay(const std::string& base, const std::string& overlay) {
    EntryMap m;
    read_entries(base, "<base>", m, false);
    read_entries(overlay, "<overlay>", m, true);
    return build(m, "<base+overlay>");
}

Scenario parse_scenario_with_overlay(const std::string& base_path, const std::string& overlay_path) {
    EntryMap m;
    read_entries(read_file(base_path), base_path, m, false);
    read_entries(read_file(overlay_path), overlay_path, m, true);
    return build(m, base_path);
}

namespace {

void put(std::ostringstream& os, const std::string& k, double v) { os << k << " = " << fmt_double(v) << "\n"; }

void put_pose(std::ostringstream& os, const std::string& side, const ArrayPose& a) {
    os << side << ".n_antennas = " << a.n_antennas << "\n";
    put(os, side + ".spacing_m", a.spacing);
    put(os, side + ".distance_m", a.distance);
    put(os, side + ".azimuth_rad", a.azimuth);
    put(os, side + ".elevation_rad", a.elevation);
    put(os, side + ".orient_azimuth_rad", a.orient_azimuth);
    put(os, side + ".orient_elevation_rad", a.orient_elevation);
}

void put_focusing(std::ostringstream& os, const Scenario& s) {
    switch (s.focusing) {
        case FocusingMode::reflective:
            os << "focusing.mode = reflective\n";
            break;
        case FocusingMode::zero:
            os << "focusing.mode = zero\n";
            break;
        case FocusingMode::explicit_betas: {
            os << "focusing.mode = explicit\nfocusing.betas_rad = ";
            for (std::size_t i = 0; i < s.betas.size(); ++i) os << (i ? ", " : "") << fmt_double(s.betas[i]);
            os << "\n";
            break;
        }
    }
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream os;
    put(os, "wave.wavelength_m", s.wave.wavelength);
    put(os, "wave.absorption_per_m", s.wave.absorption);
    put_pose(os, "tx", s.tx);
    put_pose(os, "rx", s.rx);
    os << "irs.q_x = " << s.irs.q_x << "\nirs.q_y = " << s.irs.q_y << "\n";
    put(os, "irs.spacing_x_m", s.irs.spacing_x);
    put(os, "irs.spacing_y_m", s.irs.spacing_y);
    put(os, "irs.re_len_x_m", s.irs.re_len_x);
    put(os, "irs.re_len_y_m", s.irs.re_len_y);
    put(os, "reflection.tau", s.reflection.tau);
    put(os, "reflection.polarization_rad", s.reflection.polarization);
    put(os, "power.per_antenna_w", s.power.per_antenna_power);
    put(os, "power.noise_w", s.power.noise_power);
    put_focusing(os, s);
    return os.str();
}

std::string scenario_hash(const Scenario& s) { return fnv1a_hex(serialize_scenario(s)); }

std::string orientation_overlay(const Scenario& s) {
    std::ostringstream os;
    put(os, "tx.orient_azimuth_rad", s.tx.orient_azimuth);
    put(os, "tx.orient_elevation_rad", s.tx.orient_elevation);
    put(os, "rx.orient_azimuth_rad", s.rx.orient_azimuth);
    put(os, "rx.orient_elevation_rad", s.rx.orient_elevation);
    put_focusing(os, s);
    return os.str();
}

}  // namespace irslos
