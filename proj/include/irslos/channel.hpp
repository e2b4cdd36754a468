#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "irslos/scenario.hpp"

namespace irslos {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Row of RE (k, l) in H_t (column of H_r), 0-based.
inline int re_row(const IrsLayout& irs, int k, int l) {
    return (k + half_span(irs.q_x)) * irs.q_y + (l + half_span(irs.q_y));
}

// Phase 2 pi d_approx / lambda, quadratic and axial terms summed before the 2 pi D / lambda term.
double link_phase(const ArrayPose& pose, const IrsLayout& irs, double wavelength, int p, int k, int l);

CMatrix tx_irs_channel(const ArrayPose& tx, const IrsLayout& irs, const WaveConfig& wave);
CMatrix irs_rx_channel(const ArrayPose& rx, const IrsLayout& irs, const WaveConfig& wave);
CMatrix tx_irs_channel(const Scenario& s);
CMatrix irs_rx_channel(const Scenario& s);

// Single-threaded reference builders, kept for testing and benchmarking the parallel ones.
namespace serial {
CMatrix tx_irs_channel(const ArrayPose& tx, const IrsLayout& irs, const WaveConfig& wave);
CMatrix irs_rx_channel(const ArrayPose& rx, const IrsLayout& irs, const WaveConfig& wave);
}  // namespace serial

struct FocusingState {
    Eigen::VectorXd betas;
};

FocusingState reflective_focusing(const Scenario& s);
// Coherent combining for the (t_p, r_q) link.
FocusingState focusing_for(const Scenario& s, int p, int q);
FocusingState zero_focusing(const Scenario& s);
// The focusing declared by the scenario.
FocusingState scenario_focusing(const Scenario& s);

CVector theta_of(const FocusingState& f);

double tilde_g0(const Scenario& s);
double scenario_eta0(const Scenario& s);

struct ChannelSet {
    CMatrix h_t;
    CMatrix h_r;
    CVector theta;
    double eta0 = 0.0;
    CMatrix h;
};

CMatrix cascade(const CMatrix& h_t, const CVector& theta, const CMatrix& h_r, double eta0);
ChannelSet assemble(const Scenario& s, const FocusingState& focusing);

// A, gamma-bar per IRS axis for one side.
struct AxisGeometry {
    double a_x, a_y;
    double gbar_x, gbar_y;
};
// Throws std::domain_error when an A term vanishes.
AxisGeometry axis_geometry(const ArrayPose& pose);

struct CouplingConstants {
    double c_tx, c_ty, c_rx, c_ry;
    double a_tx, a_ty, a_rx, a_ry;
    double gbar_tx, gbar_ty, gbar_rx, gbar_ry;
};

CouplingConstants coupling_constants(const Scenario& s);

// sin(pi u) / sin(pi u / Q), summed explicitly at removable singularities.
double dirichlet(double u, int q);

CMatrix closed_form_channel(const Scenario& s);

bool unit_modulus(const CMatrix& m, double tol);

void write_matrix_csv(std::ostream& os, const CMatrix& m, const std::string& scenario_hash);

}  // namespace irslos
