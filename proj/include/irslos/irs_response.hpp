#pragma once

#include "irslos/geometry.hpp"

namespace irslos {

inline constexpr double kSpeedOfLight = 299792458.0;

struct WaveConfig {
    double wavelength = 0.005;  // m
    double absorption = 0.0;    // 1/m

    static WaveConfig from_frequency(double f_hz, double absorption = 0.0);
    double frequency() const { return kSpeedOfLight / wavelength; }
    void validate() const;
};

struct ReflectionConfig {
    double tau = 1.0;
    double polarization = kPi / 3;
    void validate() const;
};

struct IncidentDirection {
    double elevation;
    double azimuth;
    double polarization;
};

struct ReflectDirection {
    double elevation;
    double azimuth;
};

double sinc(double x);

double far_field_boundary_re(const IrsLayout& layout, const WaveConfig& wave);
double far_field_boundary_irs(const IrsLayout& layout, const WaveConfig& wave);

double tilde_g(const IncidentDirection& inc, const ReflectDirection& refl);

// Direction-cosine sums entering the sinc factors.
double a_x(const IncidentDirection& inc, const ReflectDirection& refl);
double a_y(const IncidentDirection& inc, const ReflectDirection& refl);

double re_response_amplitude(const IncidentDirection& inc, const ReflectDirection& refl,
                             const ReflectionConfig& cfg, const IrsLayout& layout, const WaveConfig& wave,
                             const IncidentDirection& programmed_inc, const ReflectDirection& programmed_refl);

double eta0(double tau, double len_x, double len_y, double d_t, double d_r, double tilde_g0, double absorption);

// Free-space path loss (lambda / 4 pi D)^2 e^{-kappa D}.
double path_loss(double distance, double wavelength, double absorption);

// Worst relative deviation of |g| from |g0| over every antenna pair and RE, with each RE
// programmed for the centre antennas. Directions point from the RE towards each array.
double response_spread(const ArrayPose& tx, const ArrayPose& rx, const IrsLayout& layout, const WaveConfig& wave,
                       const ReflectionConfig& cfg);

// tilde_g evaluated for the centre antennas at RE (k, l).
double tilde_g_at(const ArrayPose& tx, const ArrayPose& rx, const IrsLayout& layout, const ReflectionConfig& cfg,
                  int k, int l);

}  // namespace irslos
