#include "irslos/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "irslos/csv.hpp"

namespace irslos {

namespace {

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt2(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

ArrayPose pose(int n, double d, double dist, double omega, double phi, double gamma = 0.0, double psi = kPi / 2) {
    return ArrayPose::make(n, d, dist, omega, phi, gamma, psi);
}

// Noise power giving rho eta0^2 (QxQy)^2 = target.
void set_snr(Scenario& s, double target) {
    const double e0 = scenario_eta0(s);
    const double qq = s.irs.count();
    s.power.per_antenna_power = 1.0;
    s.power.noise_power = e0 * e0 * qq * qq / target;
}

double spread(const Eigen::VectorXd& ev) { return ev.maxCoeff() / ev.minCoeff(); }

Eigen::VectorXd gram_eigenvalues(const CMatrix& h_t, int qq) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h_t.adjoint() * h_t / static_cast<double>(qq),
                                              Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

Scenario fig2_scenario() {
    Scenario s;
    s.wave.wavelength = 0.005;
    s.tx = pose(5, 0.1, 10.0, 7 * kPi / 6, kPi / 6);
    s.rx = pose(5, 0.1, 10.0, kPi / 3, 3 * kPi / 7);
    s.irs = IrsLayout::make(15, 15, 0.1, 0.1, 0.1, 0.1);
    return s;
}

Scenario fig5_scenario() {
    Scenario s = fig2_scenario();
    s.metadata["assumption.rx_spacing"] = "defaulted to tx.spacing_m";
    return s;
}

Scenario fig6_scenario(double omega_t, double omega_r) {
    Scenario s = fig5_scenario();
    s.tx.azimuth = omega_t;
    s.rx.azimuth = omega_r;
    s.validate();
    return s;
}

Scenario fig4_scenario(double frequency_hz, double d) {
    Scenario s;
    s.wave = WaveConfig::from_frequency(frequency_hz);
    s.tx = pose(5, 0.01, d, 3 * kPi / 2, kPi / 4, 0.0, kPi / 2);
    s.rx = pose(5, 0.01, d, kPi / 2, kPi / 6, 0.0, kPi / 2);
    s.irs = IrsLayout::make(15, 15, 0.02, 0.02, 0.02, 0.02);
    s.metadata["assumption.antenna_spacing"] = "0.01 m";
    return s;
}

Scenario small_scenario() {
    Scenario s;
    s.wave.wavelength = 0.005;
    s.tx = pose(3, 0.1, 10.0, 7 * kPi / 6, kPi / 6, 0.3, 1.2);
    s.rx = pose(3, 0.1, 10.0, kPi / 3, 3 * kPi / 7, 2.0, 1.9);
    s.irs = IrsLayout::make(7, 7, 0.1, 0.1, 0.1, 0.1);
    set_snr(s, 100.0);
    return s;
}

Scenario random_scenario(std::uint64_t seed, int max_n, int max_q, int min_n) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto odd = [&](int max, int min = 1) {
        return 2 * std::uniform_int_distribution<int>((min - 1) / 2, (max - 1) / 2)(rng) + 1;
    };
    Scenario s;
    s.wave.wavelength = uni(0.002, 0.01);
    s.wave.absorption = uni(0.0, 0.01);
    const int n_t = odd(max_n, min_n);
    const int n_r = odd(max_n, min_n);
    s.tx = pose(n_t, uni(0.01, 0.1), uni(3.0, 40.0), uni(0.0, kTwoPi), uni(0.0, 1.4), uni(0.0, kTwoPi),
                uni(0.0, kPi));
    s.rx = pose(n_r, uni(0.01, 0.1), uni(3.0, 40.0), uni(0.0, kTwoPi), uni(0.0, 1.4), uni(0.0, kTwoPi),
                uni(0.0, kPi));
    const double sx = uni(0.02, 0.1), sy = uni(0.02, 0.1);
    const int qx = odd(max_q, min_n), qy = odd(max_q, min_n);
    s.irs = IrsLayout::make(qx, qy, sx, sy, sx * uni(0.5, 1.0), sy * uni(0.5, 1.0));
    s.reflection.tau = uni(0.5, 1.0);
    set_snr(s, std::pow(10.0, uni(-1.0, 2.0)));
    return s;
}

double max_relative_error(const CMatrix& a, const CMatrix& b, double floor) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / std::max(std::abs(b(i, j)), floor));
    return worst;
}

double cascade_error_floor(const ChannelSet& c, const IrsLayout& irs) { return 1e-3 * c.eta0 * irs.count(); }

CheckResult check_rayleigh_golden(double lambda_scale) {
    Scenario s = fig2_scenario();
    s.wave.wavelength *= lambda_scale;
    const RayleighResult r = rayleigh_distances(s.tx, s.irs, s.wave);
    const double ex = std::abs(r.d_rx_axis - 27.0416), ey = std::abs(r.d_ry_axis - 29.0474);
    CheckResult c{"rayleigh_golden", ex <= 1e-3 && ey <= 1e-3, std::max(ex, ey), ""};
    c.detail = fmt2("D_tx=%.6f D_ty=%.6f", r.d_rx_axis, r.d_ry_axis);
    return c;
}

CheckResult check_far_field_boundaries() {
    // 2 cm REs on a 0.4 m IRS.
    const IrsLayout irs = IrsLayout::make(19, 19, 0.38 / 18, 0.38 / 18, 0.02, 0.02);
    const double freqs[] = {75e9, 140e9, 338e9};
    const double b_re[] = {0.4, 0.75, 1.8};
    const double b_irs[] = {160.0, 298.7, 721.0};
    double worst = 0.0;
    std::ostringstream d;
    for (int i = 0; i < 3; ++i) {
        const WaveConfig w = WaveConfig::from_frequency(freqs[i]);
        const double re = far_field_boundary_re(irs, w), tot = far_field_boundary_irs(irs, w);
        worst = std::max({worst, std::abs(re - b_re[i]) / b_re[i], std::abs(tot - b_irs[i]) / b_irs[i]});
        d << fmt2("(%.4g, %.5g) ", re, tot);
    }
    return {"far_field_boundaries", worst <= 0.01, worst, d.str()};
}

CheckResult check_closed_form(int n_random, std::uint64_t seed) {
    double worst = 0.0;
    for (int i = -1; i < n_random; ++i) {
        const Scenario s = i < 0 ? fig2_scenario() : random_scenario(seed + static_cast<std::uint64_t>(i));
        const ChannelSet c = assemble(s, reflective_focusing(s));
        worst = std::max(worst, max_relative_error(closed_form_channel(s), c.h, cascade_error_floor(c, s.irs)));
    }
    return {"closed_form", worst < 1e-8, worst, std::to_string(n_random + 1) + " scenarios"};
}

CheckResult check_fmr_soundness(int grid, const GramTolerances& tol) {
    const Scenario s = fig5_scenario();
    const FmrBound b = fmr_inner_bound(s);
    const double t_max = 1.25 * std::max(b.d_t_rayleigh_x, b.d_t_rayleigh_y);
    const double r_max = 1.25 * std::max(b.d_r_rayleigh_x, b.d_r_rayleigh_y);
    int in_region = 0, failures = 0;
    double worst_off = 0.0;
    for (int i = 1; i <= grid; ++i) {
        for (int j = 1; j <= grid; ++j) {
            const double dt = t_max * i / grid, dr = r_max * j / grid;
            for (Axis a : {Axis::x, Axis::y}) {
                if (!in_fmr_region(b, dt, dr, a)) continue;
                ++in_region;
                const Scenario at = apply_orientation(s, fmr_orientations(b, dt, dr, a), dt, dr);
                const ChannelSet c = assemble(at, reflective_focusing(at));
                const double gain = std::pow(c.eta0 * at.irs.count(), 2);
                const GramReport g = check_orthogonality(c.h, GramMode::columns, gain, tol.off, tol.diag);
                worst_off = std::max(worst_off, g.max_offdiag / gain);
                failures += g.pass ? 0 : 1;
            }
        }
    }
    // Out-of-region probe: orientations valid at D_t / 1.05 applied at D_t, past both Rayleigh distances.
    const double dt_probe = 1.05 * std::max(b.d_t_rayleigh_x, b.d_t_rayleigh_y);
    const double dr_probe = 0.5 * b.d_r_rayleigh_x;
    const Scenario probe =
        apply_orientation(s, fmr_orientations(b, b.d_t_rayleigh_x, dr_probe, Axis::x), dt_probe, dr_probe);
    const ChannelSet pc = assemble(probe, reflective_focusing(probe));
    const double pgain = std::pow(pc.eta0 * probe.irs.count(), 2);
    const bool probe_fails =
        !check_orthogonality(pc.h, GramMode::columns, pgain, tol.off, tol.diag).pass &&
        !in_fmr_region(b, dt_probe, dr_probe, Axis::x) && !in_fmr_region(b, dt_probe, dr_probe, Axis::y);
    CheckResult c{"fmr_soundness", failures == 0 && in_region > 0 && probe_fails, worst_off, ""};
    c.detail = std::to_string(in_region) + " in-region checks, " + std::to_string(failures) +
               " failures, probe " + (probe_fails ? "fails" : "passes");
    return c;
}

CheckResult check_axis_aligned_rectangle() {
    const double axis[] = {0.0, kPi / 2, kPi, 3 * kPi / 2};
    double worst = 0.0;
    for (double wt : axis) {
        for (double wr : axis) {
            const FmrBound b = fmr_inner_bound(fig6_scenario(wt, wr));
            worst = std::max({worst, std::abs(b.d_t_star_x - b.d_t_rayleigh_x) / b.d_t_rayleigh_x,
                              std::abs(b.d_t_star_y - b.d_t_rayleigh_y) / b.d_t_rayleigh_y,
                              std::abs(b.d_r_star_x - b.d_r_rayleigh_x) / b.d_r_rayleigh_x,
                              std::abs(b.d_r_star_y - b.d_r_rayleigh_y) / b.d_r_rayleigh_y});
        }
    }
    return {"axis_aligned_rectangle", worst <= 1e-9, worst, "16 azimuth pairs"};
}

CheckResult check_single_hop(int n_distances) {
    const Scenario s = fig2_scenario();
    const AxisGeometry g = axis_geometry(s.tx);
    double worst = 0.0, collapse = 1e300;
    for (Axis axis : {Axis::x, Axis::y}) {
        const RayleighResult r = rayleigh_distances(s.tx, s.irs, s.wave);
        const double dr = axis == Axis::x ? r.d_rx_axis : r.d_ry_axis;
        for (int i = 1; i <= n_distances; ++i) {
            const ArrayPose p = s.tx.with_distance(dr * i / n_distances);
            const OrientationSetting o = single_hop_orientation(p, s.irs, s.wave, axis);
            const CMatrix h = tx_irs_channel(p.with_orientation(o.gamma, o.psi), s.irs, s.wave);
            worst = std::max(worst, spread(gram_eigenvalues(h, s.irs.count())) - 1.0);
        }
        const double gb = axis == Axis::x ? g.gbar_x : g.gbar_y;
        const ArrayPose far = s.tx.with_distance(2 * dr).with_orientation(gb, kPi / 2);
        collapse = std::min(collapse, spread(gram_eigenvalues(tx_irs_channel(far, s.irs, s.wave), s.irs.count())));
    }
    CheckResult c{"single_hop_equal_gain", worst < 1e-6 && collapse > 10.0, worst, ""};
    c.detail = fmt2("spread-1 = %.3g, spread at 2 D^R = %.4g", worst, collapse);
    return c;
}

CheckResult check_gradient(int cases, std::uint64_t seed) {
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
        const Scenario s = random_scenario(seed + 1000 + static_cast<std::uint64_t>(i), 5, 9, 3);
        const RandomInit ri = random_init(s, seed + static_cast<std::uint64_t>(i));
        const Orientation g = mi_gradient(s, ri.theta, ri.m);
        const Orientation fd = finite_difference_gradient(s, ri.theta, ri.m, 1e-6);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < 4; ++k) {
            num = std::max(num, std::abs(g[k] - fd[k]));
            den = std::max(den, std::abs(fd[k]));
        }
        worst = std::max(worst, num / den);
    }
    return {"gradient", worst < 1e-5, worst, std::to_string(cases) + " cases, step 1e-6"};
}

CheckResult check_optimizer(int seeds, std::uint64_t seed) {
    const Scenario s = small_scenario();
    int trace_violations = 0, order_violations = 0;
    double worst_gap_violation = 0.0;
    std::ostringstream d;
    for (int k = 0; k < seeds; ++k) {
        const RandomInit ri = random_init(s, seed + static_cast<std::uint64_t>(k));
        const Scenario start = with_orientation(s, ri.m);
        const CVector theta0 = theta_of(reflective_focusing(start));
        const double focusing_mi = mi_at(s, theta0, ri.m);
        const AlternatingResult a = alternating_optimize(s, theta0, ri.m);
        double prev = a.trace.initial_mi_bits;
        for (const TraceEntry& e : a.trace.entries) {
            if (e.mi_bits < prev - 1e-9) ++trace_violations;
            prev = e.mi_bits;
        }
        const Scenario c = with_orientation(s, a.m);
        const double bound = mi_upper_bound(tx_irs_channel(c), irs_rx_channel(c), scenario_eta0(c), c.power);
        if (a.mi_bits < focusing_mi - 1e-9 || a.mi_bits > bound + 1e-9) ++order_violations;
        worst_gap_violation = std::max({worst_gap_violation, focusing_mi - a.mi_bits, a.mi_bits - bound});
        d << fmt2("%.4f<=%.4f", focusing_mi, a.mi_bits) << fmt("<=%.4f ", bound);
    }
    return {"optimizer_monotone", trace_violations == 0 && order_violations == 0, worst_gap_violation, d.str()};
}

CheckResult check_relaxed_optimum(int grid) {
    const int n_t = 3, n_r = 2, q = 3;
    const double t_total = n_t * q * q, r_total = n_r * q * q;
    double worst = 0.0;
    bool ok = true;
    for (auto [regime, gain] : {std::pair{SnrRegime::high, 1e6}, std::pair{SnrRegime::low, 1e-6}}) {
        const double best = relaxed_objective(relaxed_optimum(regime, n_t, n_r, q, q), gain);
        double grid_best = 0.0;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid; ++j) {
                const double a = static_cast<double>(i) / grid, b = static_cast<double>(j) / grid;
                SingularAllocation x;
                x.mu_t_sq = {a * t_total, (1 - a) * t_total, 0.0};
                x.mu_r_sq = {b * r_total, (1 - b) * r_total};
                grid_best = std::max(grid_best, relaxed_objective(x, gain));
            }
        }
        const double shortfall = (grid_best - best) / grid_best;
        worst = std::max(worst, shortfall);
        ok = ok && shortfall <= 1e-12;
    }
    return {"relaxed_optimum", ok, worst, std::to_string(grid + 1) + "^2 grid, N_r = 2"};
}

CheckResult check_response_spread() {
    double crossing = 0.0;
    for (int i = 0; i <= 70; ++i) {
        const double d = 1.0 + 0.1 * i;
        const Scenario s = fig4_scenario(140e9, d);
        if (response_spread(s.tx, s.rx, s.irs, s.wave, s.reflection) < 0.1) {
            crossing = d;
            break;
        }
    }
    return {"response_spread_140ghz", std::abs(crossing - 2.5) <= 0.2, crossing, fmt("crossing at %.1f m", crossing)};
}

std::vector<std::string> golden_check_names() {
    return {"rayleigh_golden", "far_field_boundaries", "closed_form",     "fmr_soundness",
            "axis_aligned_rectangle",      "single_hop_equal_gain", "gradient",       "optimizer_monotone",
            "relaxed_optimum", "response_spread_140ghz"};
}

std::vector<CheckResult> run_golden_suite(const VerifyOptions& opt, std::ostream& warnings) {
    std::vector<std::string> names = opt.filtered ? opt.checks : golden_check_names();
    if (opt.filtered && names.empty()) warnings << "warning: empty check list, no checks run\n";
    const std::vector<std::string> known = golden_check_names();
    std::vector<CheckResult> out;
    for (const std::string& n : names) {
        if (std::find(known.begin(), known.end(), n) == known.end()) {
            out.push_back({n, false, 0.0, "unknown check"});
            continue;
        }
        if (n == "rayleigh_golden") out.push_back(check_rayleigh_golden(opt.lambda_scale));
        if (n == "far_field_boundaries") out.push_back(check_far_field_boundaries());
        if (n == "closed_form") out.push_back(check_closed_form(50, opt.seed));
        if (n == "fmr_soundness") out.push_back(check_fmr_soundness(20, opt.tol));
        if (n == "axis_aligned_rectangle") out.push_back(check_axis_aligned_rectangle());
        if (n == "single_hop_equal_gain") out.push_back(check_single_hop(10));
        if (n == "gradient") out.push_back(check_gradient(20, opt.seed));
        if (n == "optimizer_monotone") out.push_back(check_optimizer(2, opt.seed));
        if (n == "relaxed_optimum") out.push_back(check_relaxed_optimum(49));
        if (n == "response_spread_140ghz") out.push_back(check_response_spread());
    }
    return out;
}

std::vector<CheckResult> run_scenario_checks(const Scenario& s, const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const ChannelSet c = assemble(s, reflective_focusing(s));
    const double e = max_relative_error(closed_form_channel(s), c.h, cascade_error_floor(c, s.irs));
    out.push_back({"closed_form", e < 1e-8, e, ""});

    const double qq = s.irs.count();
    const double et = std::abs(c.h_t.squaredNorm() - s.tx.n_antennas * qq) / (s.tx.n_antennas * qq);
    const double er = std::abs(c.h_r.squaredNorm() - s.rx.n_antennas * qq) / (s.rx.n_antennas * qq);
    out.push_back({"frobenius_energy", std::max(et, er) < 1e-12, std::max(et, er), ""});

    const ChannelSet d = assemble(s, scenario_focusing(s));
    const double mi = mutual_information(d.h, s.power);
    const double bound = mi_upper_bound(d.h_t, d.h_r, d.eta0, s.power);
    out.push_back({"bound_dominance", mi <= bound + 1e-9, bound - mi, fmt2("MI %.6g <= %.6g", mi, bound)});

    const Orientation m = orientation_of(s);
    const Orientation g = mi_gradient(s, d.theta, m);
    const Orientation fd = finite_difference_gradient(s, d.theta, m, 1e-6);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 4; ++k) {
        num = std::max(num, std::abs(g[k] - fd[k]));
        den = std::max(den, std::abs(fd[k]));
    }
    const double rel = den > 0 ? num / den : num;
    out.push_back({"gradient", rel < 1e-5, rel, ""});

    try {
        const FmrBound b = fmr_inner_bound(s);
        const double dt = s.tx.distance, dr = s.rx.distance;
        FmrOrientation o;
        bool in = false;
        for (Axis a : {Axis::x, Axis::y}) {
            if (!in && in_fmr_region(b, dt, dr, a)) {
                o = fmr_orientations(b, dt, dr, a);
                in = true;
            }
        }
        if (in) {
            const Scenario at = apply_orientation(s, o, dt, dr);
            const ChannelSet f = assemble(at, reflective_focusing(at));
            const double gain = std::pow(f.eta0 * qq, 2);
            const GramReport r = check_orthogonality(f.h, GramMode::columns, gain, opt.tol.off, opt.tol.diag);
            out.push_back({"fmr_gram", r.pass, r.max_offdiag / gain, o.tx.branch});
        }
    } catch (const std::exception&) {
        // Region undefined for this geometry; nothing to check.
    }
    return out;
}

void write_verify_report(const std::vector<CheckResult>& results, std::ostream& os) {
    os << "check,pass,metric,detail\n";
    for (const CheckResult& r : results) os << r.name << ',' << r.pass << ',' << fmt_double(r.metric) << ",\"" << r.detail << "\"\n";
}

}  // namespace irslos
