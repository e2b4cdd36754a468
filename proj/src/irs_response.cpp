#include "irslos/irs_response.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace irslos {

WaveConfig WaveConfig::from_frequency(double f_hz, double absorption) {
    if (!(f_hz > 0)) throw std::invalid_argument("frequency must be > 0");
    WaveConfig w{kSpeedOfLight / f_hz, absorption};
    w.validate();
    return w;
}

void WaveConfig::validate() const {
    if (!(std::isfinite(wavelength) && wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
    if (!(absorption >= 0)) throw std::invalid_argument("absorption coefficient must be >= 0");
}

void ReflectionConfig::validate() const {
    if (!(tau > 0 && tau <= 1)) throw std::invalid_argument("tau must lie in (0, 1]");
    if (!std::isfinite(polarization)) throw std::invalid_argument("polarization must be finite");
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double far_field_boundary_re(const IrsLayout& layout, const WaveConfig& wave) {
    return 2.0 * (layout.re_len_x * layout.re_len_x + layout.re_len_y * layout.re_len_y) / wave.wavelength;
}

double far_field_boundary_irs(const IrsLayout& layout, const WaveConfig& wave) {
    const double lx = layout.total_len_x(), ly = layout.total_len_y();
    return 2.0 * (lx * lx + ly * ly) / wave.wavelength;
}

double tilde_g(const IncidentDirection& inc, const ReflectDirection& refl) {
    const double cs = std::cos(inc.polarization), ss = std::sin(inc.polarization);
    const double a_z = std::cos(inc.elevation);
    const double a_xy = cs * std::sin(inc.elevation) * std::cos(inc.azimuth) +
                        ss * std::sin(inc.elevation) * std::sin(inc.azimuth);
    const double denom = std::hypot(a_xy, a_z);
    const double c = denom > 0 ? a_z / denom : 0.0;
    const double cr = std::cos(refl.elevation);
    const double v1 = cs * cr * std::sin(refl.azimuth) - ss * cr * std::cos(refl.azimuth);
    const double v2 = ss * std::sin(refl.azimuth) + cs * std::cos(refl.azimuth);
    return c * std::hypot(v1, v2);
}

double a_x(const IncidentDirection& inc, const ReflectDirection& refl) {
    return std::sin(inc.elevation) * std::cos(inc.azimuth) + std::sin(refl.elevation) * std::cos(refl.azimuth);
}

double a_y(const IncidentDirection& inc, const ReflectDirection& refl) {
    return std::sin(inc.elevation) * std::sin(inc.azimuth) + std::sin(refl.elevation) * std::sin(refl.azimuth);
}

double re_response_amplitude(const IncidentDirection& inc, const ReflectDirection& refl,
                             const ReflectionConfig& cfg, const IrsLayout& layout, const WaveConfig& wave,
                             const IncidentDirection& programmed_inc, const ReflectDirection& programmed_refl) {
    const double lam = wave.wavelength;
    const double peak = std::sqrt(4.0 * kPi) * cfg.tau * layout.re_len_x * layout.re_len_y / lam;
    const double sx = sinc(kPi * layout.re_len_x * (a_x(inc, refl) - a_x(programmed_inc, programmed_refl)) / lam);
    const double sy = sinc(kPi * layout.re_len_y * (a_y(inc, refl) - a_y(programmed_inc, programmed_refl)) / lam);
    return peak * tilde_g(inc, refl) * sx * sy;
}

double path_loss(double distance, double wavelength, double absorption) {
    const double f = wavelength / (4.0 * kPi * distance);
    return f * f * std::exp(-absorption * distance);
}

double eta0(double tau, double len_x, double len_y, double d_t, double d_r, double tilde_g0, double absorption) {
    if (!(d_t > 0 && d_r > 0)) throw std::invalid_argument("link distances must be > 0");
    return tau * len_x * len_y / (4.0 * kPi * d_t * d_r) * tilde_g0 * std::exp(-0.5 * absorption * (d_t + d_r));
}

namespace {

IncidentDirection toward(const Vec3& from, const Vec3& to, double pol) {
    const Direction d = direction_of(to - from);
    return {d.elevation, d.azimuth, pol};
}

ReflectDirection toward_r(const Vec3& from, const Vec3& to) {
    const Direction d = direction_of(to - from);
    return {d.elevation, d.azimuth};
}

}  // namespace

double tilde_g_at(const ArrayPose& tx, const ArrayPose& rx, const IrsLayout& layout, const ReflectionConfig& cfg,
                  int k, int l) {
    const Vec3 m = re_position(layout, {k, layout.q_x}, {l, layout.q_y});
    return tilde_g(toward(m, antenna_position(tx, {0, tx.n_antennas}), cfg.polarization),
                   toward_r(m, antenna_position(rx, {0, rx.n_antennas})));
}

double response_spread(const ArrayPose& tx, const ArrayPose& rx, const IrsLayout& layout, const WaveConfig& wave,
                       const ReflectionConfig& cfg) {
    std::vector<Vec3> tp, rq;
    for (int p = -half_span(tx.n_antennas); p <= half_span(tx.n_antennas); ++p)
        tp.push_back(antenna_position(tx, {p, tx.n_antennas}));
    for (int q = -half_span(rx.n_antennas); q <= half_span(rx.n_antennas); ++q)
        rq.push_back(antenna_position(rx, {q, rx.n_antennas}));
    const Vec3 t0 = tp[tp.size() / 2], r0 = rq[rq.size() / 2];

    const IncidentDirection inc0 = toward(Vec3::Zero(), t0, cfg.polarization);
    const ReflectDirection refl0 = toward_r(Vec3::Zero(), r0);
    const double g0 = re_response_amplitude(inc0, refl0, cfg, layout, wave, inc0, refl0);

    double worst = 0.0;
    for (int k = -half_span(layout.q_x); k <= half_span(layout.q_x); ++k) {
        for (int l = -half_span(layout.q_y); l <= half_span(layout.q_y); ++l) {
            const Vec3 m = re_position(layout, {k, layout.q_x}, {l, layout.q_y});
            const IncidentDirection prog_inc = toward(m, t0, cfg.polarization);
            const ReflectDirection prog_refl = toward_r(m, r0);
            for (const Vec3& t : tp) {
                const IncidentDirection inc = toward(m, t, cfg.polarization);
                for (const Vec3& r : rq) {
                    const double g =
                        re_response_amplitude(inc, toward_r(m, r), cfg, layout, wave, prog_inc, prog_refl);
                    worst = std::max(worst, std::abs(g - g0) / g0);
                }
            }
        }
    }
    return worst;
}

}  // namespace irslos
