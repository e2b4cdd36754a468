#include "irslos/scenario.hpp"

#include <stdexcept>

namespace irslos {

void PowerConfig::validate() const {
    if (!(per_antenna_power > 0)) throw std::invalid_argument("per-antenna power must be > 0");
    if (!(noise_power > 0)) throw std::invalid_argument("noise power must be > 0");
}

void Scenario::validate() const {
    wave.validate();
    tx.validate();
    rx.validate();
    irs.validate();
    reflection.validate();
    power.validate();
    if (focusing == FocusingMode::explicit_betas && static_cast<int>(betas.size()) != irs.count())
        throw std::invalid_argument("explicit focusing needs Q_x*Q_y phases");
}

Scenario Scenario::with_orientations(double gamma_t, double psi_t, double gamma_r, double psi_r) const {
    Scenario s = *this;
    s.tx = tx.with_orientation(gamma_t, psi_t);
    s.rx = rx.with_orientation(gamma_r, psi_r);
    return s;
}

Scenario Scenario::with_distances(double d_t, double d_r) const {
    Scenario s = *this;
    s.tx = tx.with_distance(d_t);
    s.rx = rx.with_distance(d_r);
    return s;
}

}  // namespace irslos
