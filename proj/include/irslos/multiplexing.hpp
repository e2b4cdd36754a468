#pragma once

#include <string>
#include <utility>
#include <vector>

#include "irslos/channel.hpp"

namespace irslos {

enum class Axis { x, y };

struct RayleighResult {
    double d_rx_axis = 0.0;  // x-axis Rayleigh distance
    double d_ry_axis = 0.0;  // y-axis Rayleigh distance
    double d_r = 0.0;        // max of the two, 0 unless both flags hold
    bool qx_ge_n = false;
    bool qy_ge_n = false;
};

RayleighResult rayleigh_distances(const ArrayPose& pose, const IrsLayout& irs, const WaveConfig& wave);

struct OrientationSetting {
    double psi = 0.0;
    double gamma = 0.0;
    std::string branch;
};

// Throws std::out_of_range when D exceeds the axis Rayleigh distance or Q_axis < N.
OrientationSetting single_hop_orientation(const ArrayPose& pose, const IrsLayout& irs, const WaveConfig& wave,
                                          Axis axis);

struct CurvePoint {
    double d_t;
    double d_r;
};

struct FmrBound {
    double d_t_star_x = 0.0, d_t_star_y = 0.0;
    double d_r_star_x = 0.0, d_r_star_y = 0.0;
    double gamma_star_x = 0.0, gamma_star_y = 0.0;
    double d_t_rayleigh_x = 0.0, d_t_rayleigh_y = 0.0;
    double d_r_rayleigh_x = 0.0, d_r_rayleigh_y = 0.0;
    std::vector<CurvePoint> boundary_x, boundary_y;
    CurvePoint corner_t_x{}, corner_r_x{}, corner_t_y{}, corner_r_y{};
    AxisGeometry tx{}, rx{};
};

// Throws std::invalid_argument naming the failing inequality when N_t + N_r - 2 >= 2 Q.
FmrBound fmr_inner_bound(const Scenario& s, int samples = 200);

// Upper edge of the region over D_t in (D*_t, D^R_t]; the larger of the two sign branches.
double fmr_boundary(const FmrBound& b, double d_t, Axis axis);
bool in_fmr_region(const FmrBound& b, double d_t, double d_r, Axis axis);

struct FmrOrientation {
    OrientationSetting tx;
    OrientationSetting rx;
};

// Throws std::out_of_range when (d_t, d_r) is outside the selected region.
FmrOrientation fmr_orientations(const FmrBound& b, double d_t, double d_r, Axis axis);

// Scenario moved to (d_t, d_r) with the given orientations applied.
Scenario apply_orientation(const Scenario& s, const FmrOrientation& o, double d_t, double d_r);

enum class GramMode { columns, rows };

struct GramReport {
    double max_offdiag = 0.0;
    std::vector<double> diag_values;
    double target_gain = 0.0;
    bool pass = false;
};

GramReport check_orthogonality(const CMatrix& m, GramMode mode, double target_gain, double tol_off = 1e-6,
                               double tol_diag = 1e-8);

}  // namespace irslos
