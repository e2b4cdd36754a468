#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "irslos/channel.hpp"

namespace irslos {

double mutual_information(const CMatrix& h, const PowerConfig& power);
// log2 det(rho H^H H + I) through an LU determinant; test oracle for the singular-value form.
double mutual_information_det(const CMatrix& h, const PowerConfig& power);

double mi_upper_bound(const CMatrix& h_t, const CMatrix& h_r, double eta0, const PowerConfig& power);

enum class SnrRegime { high, low };

struct SingularAllocation {
    std::vector<double> mu_t_sq;
    std::vector<double> mu_r_sq;
};

// Throws std::invalid_argument when N_t < N_r.
SingularAllocation relaxed_optimum(SnrRegime regime, int n_t, int n_r, int q_x, int q_y);

// Objective of the relaxed problem, sum_i ln(1 + g mu_r_i mu_t_i), g = rho eta0^2.
double relaxed_objective(const SingularAllocation& a, double gain);

struct MmAuxiliaries {
    CMatrix phi;     // N_t x N_r
    CMatrix sigma;   // N_t x N_t
    CMatrix lambda;  // QxQy x QxQy
    CVector alpha;   // QxQy
    bool regularized = false;
};

MmAuxiliaries mm_auxiliaries(const CMatrix& h_t, const CMatrix& h_r, const CVector& theta, double eta0,
                             const PowerConfig& power);

double qcqp_objective(const CMatrix& lambda, const CVector& alpha, const CVector& theta);
// Exact below dimension 64; above, power iteration plus its residual norm, which never undershoots.
double largest_eigenvalue(const CMatrix& hermitian);

CVector mm_step(const CMatrix& lambda, const CVector& alpha, const CVector& theta, double lambda_max);

enum class Block { theta, orientation };

struct TraceEntry {
    int round;
    Block block;
    double mi_bits;
};

struct OptTrace {
    double initial_mi_bits = 0.0;
    std::vector<TraceEntry> entries;
    std::string stop_reason;
    int regularizations = 0;
};

struct ThetaStop {
    double eps = 1e-6;     // bits
    double eps_mm = 1e-8;  // surrogate objective
    int max_outer = 200;
    int max_inner = 500;
};

struct ThetaResult {
    CVector theta;
    OptTrace trace;
};

ThetaResult optimize_theta(const Scenario& s, const CVector& theta_init, const ThetaStop& stop = {});

// m = [gamma_t, psi_t, gamma_r, psi_r].
using Orientation = std::array<double, 4>;

Orientation orientation_of(const Scenario& s);
Scenario with_orientation(const Scenario& s, const Orientation& m);
// Same array geometry expressed inside the optimiser box: gamma in [-pi/2, pi/2], psi in [0, pi].
Orientation to_box(const Orientation& m);
Orientation project_box(const Orientation& m);

// MI of eta0 H_r diag(theta) H_t at orientation m, in bits.
double mi_at(const Scenario& s, const CVector& theta, const Orientation& m);

// Gradient of -MI (bits) with respect to m.
Orientation mi_gradient(const Scenario& s, const CVector& theta, const Orientation& m);
Orientation finite_difference_gradient(const Scenario& s, const CVector& theta, const Orientation& m, double step);

struct OrientationStop {
    double eps = 1e-6;  // bits
    int max_iters = 200;
    double shrink = 0.5;
    int max_backtracks = 40;
    double initial_step = 1.0;
};

struct OrientationResult {
    Orientation m;
    OptTrace trace;
};

OrientationResult optimize_orientation(const Scenario& s, const CVector& theta, const Orientation& m_init,
                                       const OrientationStop& stop = {});

struct AlternatingStop {
    double eps = 1e-6;  // bits
    int max_rounds = 50;
    ThetaStop theta;
    OrientationStop orientation;
};

struct AlternatingResult {
    CVector theta;
    Orientation m;
    double mi_bits;
    OptTrace trace;
};

AlternatingResult alternating_optimize(const Scenario& s, const CVector& theta_init, const Orientation& m_init,
                                       const AlternatingStop& stop = {});

// Uniform phases and box-uniform orientations from a seeded mt19937_64.
struct RandomInit {
    CVector theta;
    Orientation m;
};
RandomInit random_init(const Scenario& s, std::uint64_t seed);

}  // namespace irslos
