#include "irslos/multiplexing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace irslos {

namespace {

constexpr double kSlack = 1e-12;

double mod_pi(double a) {
    double r = std::fmod(a, kPi);
    if (r < 0) r += kPi;
    if (r >= kPi) r = 0.0;
    return r;
}

// Quantities of one region with "a" the fully multiplexed IRS axis and "b" the other one.
struct View {
    double a_ta, a_tb, g_ta, g_tb;
    double a_ra, a_rb, g_ra, g_rb;
    double dr_ta, dr_ra;
    double d_t_star, d_r_star, gamma_star;
};

View view_of(const FmrBound& b, Axis axis) {
    const AxisGeometry& t = b.tx;
    const AxisGeometry& r = b.rx;
    if (axis == Axis::x)
        return {t.a_x, t.a_y, t.gbar_x, t.gbar_y, r.a_x, r.a_y, r.gbar_x, r.gbar_y, b.d_t_rayleigh_x,
                b.d_r_rayleigh_x, b.d_t_star_x, b.d_r_star_x, b.gamma_star_x};
    return {t.a_y, t.a_x, t.gbar_y, t.gbar_x, r.a_y, r.a_x, r.gbar_y, r.gbar_x, b.d_t_rayleigh_y,
            b.d_r_rayleigh_y, b.d_t_star_y, b.d_r_star_y, b.gamma_star_y};
}

// Solves u cos(g - g1) = v cos(g - g2) for g in [0, pi); `fallback` when the equation is void.
double solve_ratio(double u, double g1, double v, double g2, double fallback) {
    const double num = u * std::cos(g1) - v * std::cos(g2);
    const double den = v * std::sin(g2) - u * std::sin(g1);
    if (std::abs(num) < 1e-14 && std::abs(den) < 1e-14) return mod_pi(fallback);
    return mod_pi(std::atan2(num, den));
}

// Rx azimuth keeping C_tb / C_ta = C_rb / C_ra for a given Tx azimuth.
double gamma_r_for(const View& v, double gamma_t) {
    const double u = v.a_ta * v.a_rb * std::cos(gamma_t - v.g_ta);
    const double w = v.a_tb * v.a_ra * std::cos(gamma_t - v.g_tb);
    return solve_ratio(u, v.g_rb, w, v.g_ra, v.g_ra);
}

// Tx azimuth for which the Rx can sit on its own axis direction.
double gamma_star_of(const View& v) {
    const double c = std::cos(v.g_ra - v.g_rb);
    return solve_ratio(v.a_tb * v.a_ra, v.g_tb, c * v.a_ta * v.a_rb, v.g_ta, v.g_ta);
}

struct Branch {
    double gamma_t, gamma_r, bound;
    int sign;
};

Branch best_branch(const View& v, double d_t) {
    const double off = std::acos(std::min(1.0, d_t / v.dr_ta));
    Branch best{0, 0, -1, 0};
    for (int s : {+1, -1}) {
        const double gt = v.g_ta + s * off;
        const double gr = gamma_r_for(v, gt);
        const double bnd = v.dr_ra * std::abs(std::cos(gr - v.g_ra));
        if (bnd > best.bound + 1e-15) best = {gt, gr, bnd, s};
    }
    return best;
}

void fill_axis(FmrBound& b, Axis axis, int samples) {
    View v = view_of(b, axis);
    const double gs = gamma_star_of(v);
    const double dts = v.dr_ta * std::abs(std::cos(gs - v.g_ta));
    const double drs = v.dr_ra * std::abs(std::cos(gamma_r_for(v, v.g_ta) - v.g_ra));
    if (axis == Axis::x) {
        b.gamma_star_x = gs, b.d_t_star_x = dts, b.d_r_star_x = drs;
        b.corner_t_x = {v.dr_ta, drs};
        b.corner_r_x = {dts, v.dr_ra};
    } else {
        b.gamma_star_y = gs, b.d_t_star_y = dts, b.d_r_star_y = drs;
        b.corner_t_y = {v.dr_ta, drs};
        b.corner_r_y = {dts, v.dr_ra};
    }
    v = view_of(b, axis);
    std::vector<CurvePoint> curve(std::max(0, samples));
    for (int i = 0; i < samples; ++i) {
        const double dt = samples == 1 ? v.dr_ta : dts + (v.dr_ta - dts) * i / (samples - 1);
        curve[i] = {dt, best_branch(v, dt).bound};
    }
    (axis == Axis::x ? b.boundary_x : b.boundary_y) = std::move(curve);
}

}  // namespace

RayleighResult rayleigh_distances(const ArrayPose& pose, const IrsLayout& irs, const WaveConfig& wave) {
    const AxisGeometry g = axis_geometry(pose);
    RayleighResult r;
    r.d_rx_axis = pose.spacing * irs.spacing_x * irs.q_x * g.a_x / wave.wavelength;
    r.d_ry_axis = pose.spacing * irs.spacing_y * irs.q_y * g.a_y / wave.wavelength;
    r.qx_ge_n = irs.q_x >= pose.n_antennas;
    r.qy_ge_n = irs.q_y >= pose.n_antennas;
    if (r.qx_ge_n && r.qy_ge_n) r.d_r = std::max(r.d_rx_axis, r.d_ry_axis);
    return r;
}

OrientationSetting single_hop_orientation(const ArrayPose& pose, const IrsLayout& irs, const WaveConfig& wave,
                                          Axis axis) {
    const RayleighResult r = rayleigh_distances(pose, irs, wave);
    const AxisGeometry g = axis_geometry(pose);
    const bool x = axis == Axis::x;
    if (!(x ? r.qx_ge_n : r.qy_ge_n)) throw std::out_of_range("IRS axis has fewer REs than antennas");
    const double dr = x ? r.d_rx_axis : r.d_ry_axis;
    if (pose.distance > dr * (1 + kSlack)) throw std::out_of_range("distance exceeds the axis Rayleigh distance");
    OrientationSetting o;
    o.psi = std::asin(std::min(1.0, pose.distance / dr));
    o.gamma = x ? g.gbar_x : g.gbar_y;
    o.branch = x ? "single-hop-x" : "single-hop-y";
    return o;
}

FmrBound fmr_inner_bound(const Scenario& s, int samples) {
    const int span = s.tx.n_antennas + s.rx.n_antennas - 2;
    if (!(span < 2 * s.irs.q_x)) throw std::invalid_argument("precondition N_t + N_r - 2 < 2 Q_x violated");
    if (!(span < 2 * s.irs.q_y)) throw std::invalid_argument("precondition N_t + N_r - 2 < 2 Q_y violated");
    FmrBound b;
    b.tx = axis_geometry(s.tx);
    b.rx = axis_geometry(s.rx);
    const RayleighResult rt = rayleigh_distances(s.tx, s.irs, s.wave);
    const RayleighResult rr = rayleigh_distances(s.rx, s.irs, s.wave);
    b.d_t_rayleigh_x = rt.d_rx_axis, b.d_t_rayleigh_y = rt.d_ry_axis;
    b.d_r_rayleigh_x = rr.d_rx_axis, b.d_r_rayleigh_y = rr.d_ry_axis;
    fill_axis(b, Axis::x, samples);
    fill_axis(b, Axis::y, samples);
    return b;
}

double fmr_boundary(const FmrBound& b, double d_t, Axis axis) {
    const View v = view_of(b, axis);
    if (d_t <= v.d_t_star) return v.dr_ra;
    if (d_t > v.dr_ta * (1 + kSlack)) return 0.0;
    return best_branch(v, d_t).bound;
}

bool in_fmr_region(const FmrBound& b, double d_t, double d_r, Axis axis) {
    const View v = view_of(b, axis);
    if (!(d_t > 0 && d_r > 0)) return false;
    if (d_t > v.dr_ta * (1 + kSlack)) return false;
    if (d_t <= v.d_t_star * (1 + kSlack)) return d_r <= v.dr_ra * (1 + kSlack);
    return d_r <= best_branch(v, d_t).bound * (1 + kSlack);
}

FmrOrientation fmr_orientations(const FmrBound& b, double d_t, double d_r, Axis axis) {
    if (!in_fmr_region(b, d_t, d_r, axis)) throw std::out_of_range("point lies outside the selected FMR region");
    const View v = view_of(b, axis);
    const std::string tag = axis == Axis::x ? "x" : "y";
    FmrOrientation o;
    if (d_t <= v.d_t_star * (1 + kSlack)) {
        o.tx = {std::asin(std::min(1.0, d_t / v.d_t_star)), v.gamma_star, "D1-" + tag};
        o.rx = {std::asin(std::min(1.0, d_r / v.dr_ra)), mod_pi(v.g_ra), "D1-" + tag};
        return o;
    }
    const Branch br = best_branch(v, d_t);
    const std::string name = std::string("D2") + (br.sign > 0 ? "+" : "-") + tag;
    o.tx = {kPi / 2, mod_pi(br.gamma_t), name};
    o.rx = {std::asin(std::min(1.0, d_r / br.bound)), br.gamma_r, name};
    return o;
}

Scenario apply_orientation(const Scenario& s, const FmrOrientation& o, double d_t, double d_r) {
    Scenario out = s.with_distances(d_t, d_r);
    return out.with_orientations(o.tx.gamma, o.tx.psi, o.rx.gamma, o.rx.psi);
}

GramReport check_orthogonality(const CMatrix& m, GramMode mode, double target_gain, double tol_off,
                               double tol_diag) {
    const CMatrix g = mode == GramMode::columns ? CMatrix(m.adjoint() * m) : CMatrix(m * m.adjoint());
    GramReport r;
    r.target_gain = target_gain;
    bool ok = true;
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            if (i == j) continue;
            r.max_offdiag = std::max(r.max_offdiag, std::abs(g(i, j)));
        }
        r.diag_values.push_back(g(i, i).real());
        if (std::abs(g(i, i).real() - target_gain) > tol_diag * target_gain) ok = false;
    }
    r.pass = ok && r.max_offdiag <= tol_off * target_gain;
    return r;
}

}  // namespace irslos
