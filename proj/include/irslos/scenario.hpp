#pragma once

#include <map>
#include <string>
#include <vector>

#include "irslos/geometry.hpp"
#include "irslos/irs_response.hpp"

namespace irslos {

struct PowerConfig {
    double per_antenna_power = 1.0;  // W
    double noise_power = 1.0;        // W
    double snr() const { return per_antenna_power / noise_power; }
    void validate() const;
};

enum class FocusingMode { reflective, zero, explicit_betas };

struct Scenario {
    WaveConfig wave;
    ArrayPose tx;
    ArrayPose rx;
    IrsLayout irs;
    ReflectionConfig reflection;
    PowerConfig power;
    FocusingMode focusing = FocusingMode::reflective;
    std::vector<double> betas;  // explicit_betas only, RE row order
    std::map<std::string, std::string> metadata;

    void validate() const;
    Scenario with_orientations(double gamma_t, double psi_t, double gamma_r, double psi_r) const;
    Scenario with_distances(double d_t, double d_r) const;
};

}  // namespace irslos
