#include "irslos/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "irslos/csv.hpp"
#include "irslos/scenario_io.hpp"

namespace irslos {

std::vector<double> Range::values() const {
    std::vector<double> v;
    if (count <= 0) return v;
    if (count == 1) return {start};
    v.reserve(count);
    for (int i = 0; i < count; ++i) v.push_back(i == count - 1 ? stop : start + (stop - start) * i / (count - 1));
    return v;
}

void Range::validate(const std::string& what) const {
    if (count < 0) throw std::invalid_argument(what + ": count must be >= 0");
    if (count >= 2 && !(start < stop)) throw std::invalid_argument(what + ": start must be < stop");
    if (count >= 1 && !(start > 0)) throw std::invalid_argument(what + ": distances must be > 0");
}

void write_csv_preamble(std::ostream& os, const Scenario& s) {
    os << "# scenario_hash=" << scenario_hash(s) << "\n";
    for (const auto& [k, v] : s.metadata) os << "# " << k << "=" << v << "\n";
}

namespace {

void row(std::ostream& os, const std::string& name, double v) { os << name << ',' << fmt_double(v) << '\n'; }

Eigen::VectorXd normalized_eigenvalues(const CMatrix& h_t, int qq) {
    const CMatrix g = h_t.adjoint() * h_t / static_cast<double>(qq);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<double>());
    return ev;
}

double target_gain(const ChannelSet& c, const IrsLayout& irs) {
    const double g = c.eta0 * irs.count();
    return g * g;
}

// Orientation used at (d_t, d_r) for a Gram check; empty branch when the point is in neither region.
bool region_orientation(const FmrBound& b, double d_t, double d_r, FmrOrientation& o) {
    for (Axis a : {Axis::x, Axis::y}) {
        if (in_fmr_region(b, d_t, d_r, a)) {
            o = fmr_orientations(b, d_t, d_r, a);
            return true;
        }
    }
    return false;
}

}  // namespace

void cmd_rayleigh(const Scenario& s, std::ostream& os) {
    const RayleighResult t = rayleigh_distances(s.tx, s.irs, s.wave);
    const RayleighResult r = rayleigh_distances(s.rx, s.irs, s.wave);
    const AxisGeometry gt = axis_geometry(s.tx), gr = axis_geometry(s.rx);
    write_csv_preamble(os, s);
    os << "quantity,value\n";
    row(os, "d_t_rayleigh_x_m", t.d_rx_axis);
    row(os, "d_t_rayleigh_y_m", t.d_ry_axis);
    row(os, "d_t_rayleigh_m", t.d_r);
    row(os, "d_r_rayleigh_x_m", r.d_rx_axis);
    row(os, "d_r_rayleigh_y_m", r.d_ry_axis);
    row(os, "d_r_rayleigh_m", r.d_r);
    os << "tx_qx_ge_n," << t.qx_ge_n << "\ntx_qy_ge_n," << t.qy_ge_n << "\n";
    os << "rx_qx_ge_n," << r.qx_ge_n << "\nrx_qy_ge_n," << r.qy_ge_n << "\n";
    row(os, "a_tx", gt.a_x);
    row(os, "a_ty", gt.a_y);
    row(os, "a_rx", gr.a_x);
    row(os, "a_ry", gr.a_y);
    row(os, "gbar_tx_rad", gt.gbar_x);
    row(os, "gbar_ty_rad", gt.gbar_y);
    row(os, "gbar_rx_rad", gr.gbar_x);
    row(os, "gbar_ry_rad", gr.gbar_y);
    row(os, "b_re_m", far_field_boundary_re(s.irs, s.wave));
    row(os, "b_irs_m", far_field_boundary_irs(s.irs, s.wave));
    row(os, "eta0", scenario_eta0(s));
}

void cmd_channel(const Scenario& s, ChannelKind kind, std::ostream& os) {
    CMatrix m;
    switch (kind) {
        case ChannelKind::h:
            m = assemble(s, scenario_focusing(s)).h;
            break;
        case ChannelKind::h_t:
            m = tx_irs_channel(s);
            break;
        case ChannelKind::h_r:
            m = irs_rx_channel(s);
            break;
        case ChannelKind::closed:
            m = closed_form_channel(s);
            break;
    }
    for (const auto& [k, v] : s.metadata) os << "# " << k << "=" << v << "\n";
    write_matrix_csv(os, m, scenario_hash(s));
}

void cmd_eigensweep(const Scenario& s, const Range& d_t, SweepOrientation mode, std::ostream& os) {
    d_t.validate("eigensweep range");
    const std::vector<double> ds = d_t.values();
    const int n = s.tx.n_antennas;
    std::vector<Eigen::VectorXd> rows(ds.size());
    const AxisGeometry g = axis_geometry(s.tx);
    const RayleighResult r0 = rayleigh_distances(s.tx, s.irs, s.wave);
    if ((mode == SweepOrientation::single_hop_x && !r0.qx_ge_n) ||
        (mode == SweepOrientation::single_hop_y && !r0.qy_ge_n))
        throw std::out_of_range("IRS axis has fewer REs than antennas");

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(ds.size()); ++i) {
        ArrayPose pose = s.tx.with_distance(ds[i]);
        switch (mode) {
            case SweepOrientation::fixed:
                break;
            case SweepOrientation::single_hop_x:
            case SweepOrientation::single_hop_y: {
                const Axis axis = mode == SweepOrientation::single_hop_x ? Axis::x : Axis::y;
                const RayleighResult r = rayleigh_distances(pose, s.irs, s.wave);
                const double dr = axis == Axis::x ? r.d_rx_axis : r.d_ry_axis;
                const double gb = axis == Axis::x ? g.gbar_x : g.gbar_y;
                if (ds[i] <= dr) {
                    const OrientationSetting o = single_hop_orientation(pose, s.irs, s.wave, axis);
                    pose = pose.with_orientation(o.gamma, o.psi);
                } else {
                    pose = pose.with_orientation(gb, kPi / 2);
                }
                break;
            }
            case SweepOrientation::axis_x:
                pose = pose.with_orientation(g.gbar_x, kPi / 2);
                break;
            case SweepOrientation::axis_y:
                pose = pose.with_orientation(g.gbar_y, kPi / 2);
                break;
        }
        rows[i] = normalized_eigenvalues(tx_irs_channel(pose, s.irs, s.wave), s.irs.count());
    }

    write_csv_preamble(os, s);
    os << "d_t";
    for (int j = 1; j <= n; ++j) os << ",eig_" << j;
    os << "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        os << fmt_double(ds[i]);
        for (Eigen::Index j = 0; j < rows[i].size(); ++j) os << ',' << fmt_double(rows[i](j));
        os << "\n";
    }
}

void cmd_fmr_map(const Scenario& s, const Range& d_t, const Range& d_r, bool verify, const GramTolerances& tol,
                 std::ostream& os) {
    d_t.validate("fmr-map d_t range");
    d_r.validate("fmr-map d_r range");
    const std::vector<double> ts = d_t.values(), rs = d_r.values();
    const FmrBound b = fmr_inner_bound(s);
    const int total = static_cast<int>(ts.size() * rs.size());
    std::vector<int> in_x(total), in_y(total), pass(total, -1);

#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        const double dt = ts[idx / rs.size()], dr = rs[idx % rs.size()];
        in_x[idx] = in_fmr_region(b, dt, dr, Axis::x);
        in_y[idx] = in_fmr_region(b, dt, dr, Axis::y);
        if (!verify) continue;
        FmrOrientation o;
        if (!region_orientation(b, dt, dr, o)) continue;
        const Scenario at = apply_orientation(s, o, dt, dr);
        const ChannelSet c = assemble(at, reflective_focusing(at));
        pass[idx] = check_orthogonality(c.h, GramMode::columns, target_gain(c, at.irs), tol.off, tol.diag).pass;
    }

    write_csv_preamble(os, s);
    os << "d_t,d_r,in_region_x,in_region_y,gram_pass\n";
    for (int idx = 0; idx < total; ++idx)
        os << fmt_double(ts[idx / rs.size()]) << ',' << fmt_double(rs[idx % rs.size()]) << ',' << in_x[idx] << ','
           << in_y[idx] << ',' << pass[idx] << "\n";
}

void cmd_fmr_orient(const Scenario& s, double d_t, double d_r, Axis axis, const GramTolerances& tol,
                    std::ostream& os) {
    const FmrBound b = fmr_inner_bound(s);
    const FmrOrientation o = fmr_orientations(b, d_t, d_r, axis);
    const Scenario at = apply_orientation(s, o, d_t, d_r);
    const ChannelSet c = assemble(at, reflective_focusing(at));
    const GramReport g = check_orthogonality(c.h, GramMode::columns, target_gain(c, at.irs), tol.off, tol.diag);
    write_csv_preamble(os, s);
    os << "side,distance_m,psi_rad,gamma_rad,branch,gram_pass,max_offdiag_rel\n";
    const double rel = g.max_offdiag / g.target_gain;
    os << "tx," << fmt_double(d_t) << ',' << fmt_double(o.tx.psi) << ',' << fmt_double(o.tx.gamma) << ','
       << o.tx.branch << ',' << g.pass << ',' << fmt_double(rel) << "\n";
    os << "rx," << fmt_double(d_r) << ',' << fmt_double(o.rx.psi) << ',' << fmt_double(o.rx.gamma) << ','
       << o.rx.branch << ',' << g.pass << ',' << fmt_double(rel) << "\n";
}

Scenario converged_scenario(const Scenario& s, const CVector& theta, const Orientation& m) {
    Scenario c = with_orientation(s, m);
    c.focusing = FocusingMode::explicit_betas;
    c.betas.resize(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) c.betas[i] = std::arg(theta(i));
    return parse_scenario_text_with_overlay(serialize_scenario(s), orientation_overlay(c));
}

namespace {

double declared_mi(const Scenario& s) { return mutual_information(assemble(s, scenario_focusing(s)).h, s.power); }

double bound_of(const Scenario& s) {
    return mi_upper_bound(tx_irs_channel(s), irs_rx_channel(s), scenario_eta0(s), s.power);
}

const char* block_name(Block b) { return b == Block::theta ? "theta" : "orientation"; }

}  // namespace

OptimizeReport run_optimize(const Scenario& s, int runs, std::uint64_t seed, const AlternatingStop& stop) {
    if (runs < 0) throw std::invalid_argument("optimize: runs must be >= 0");
    OptimizeReport rep;
    const double focusing_mi = mutual_information(assemble(s, reflective_focusing(s)).h, s.power);
    if (runs == 0) {
        OptimizeRun r;
        r.seed = seed;
        r.init = "declared";
        r.mi_bits = declared_mi(s);
        r.upper_bound_bits = bound_of(s);
        r.focusing_mi_bits = focusing_mi;
        r.stop_reason = "not_run";
        r.trace.initial_mi_bits = r.mi_bits;
        r.overlay = orientation_overlay(s);
        rep.runs.push_back(r);
        return rep;
    }
    rep.runs.resize(runs);

#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < runs; ++k) {
        OptimizeRun& r = rep.runs[k];
        r.run = k;
        r.seed = seed + static_cast<std::uint64_t>(k);
        CVector theta0;
        Orientation m0;
        if (k == 0) {
            r.init = "declared";
            theta0 = theta_of(scenario_focusing(s));
            m0 = orientation_of(s);
        } else {
            r.init = "random";
            const RandomInit ri = random_init(s, r.seed);
            theta0 = ri.theta;
            m0 = ri.m;
        }
        const AlternatingResult a = alternating_optimize(s, theta0, m0, stop);
        const Scenario c = converged_scenario(s, a.theta, a.m);
        r.mi_bits = declared_mi(c);
        r.upper_bound_bits = bound_of(c);
        r.focusing_mi_bits = focusing_mi;
        r.stop_reason = a.trace.stop_reason;
        r.trace = a.trace;
        r.overlay = orientation_overlay(c);
    }
    for (int k = 1; k < runs; ++k)
        if (rep.runs[k].mi_bits > rep.runs[rep.best].mi_bits) rep.best = k;
    return rep;
}

void write_optimize_summary(const Scenario& s, const OptimizeReport& r, std::ostream& os) {
    write_csv_preamble(os, s);
    os << "run,seed,init,mi_bits,upper_bound_bits,gap_bits,focusing_mi_bits,stop_reason,best\n";
    for (std::size_t k = 0; k < r.runs.size(); ++k) {
        const OptimizeRun& x = r.runs[k];
        os << x.run << ',' << x.seed << ',' << x.init << ',' << fmt_double(x.mi_bits) << ','
           << fmt_double(x.upper_bound_bits) << ',' << fmt_double(x.upper_bound_bits - x.mi_bits) << ','
           << fmt_double(x.focusing_mi_bits) << ',' << x.stop_reason << ','
           << (static_cast<int>(k) == r.best) << "\n";
    }
}

void write_trace_csv(const Scenario& s, const OptimizeRun& run, std::ostream& os) {
    write_csv_preamble(os, s);
    os << "round,block,mi_bits\n";
    os << "0,init," << fmt_double(run.trace.initial_mi_bits) << "\n";
    for (const TraceEntry& e : run.trace.entries)
        os << e.round << ',' << block_name(e.block) << ',' << fmt_double(e.mi_bits) << "\n";
}

std::string gnuplot_hints(const std::string& command, const std::string& csv_path) {
    std::ostringstream g;
    g << "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";
    const std::string f = "'" + csv_path + "'";
    if (command == "eigensweep") {
        g << "set xlabel 'D_t (m)'\nset ylabel 'eigenvalue'\n"
          << "plot for [i=2:*] " << f << " using 1:i with lines\n";
    } else if (command == "fmr-map") {
        g << "set xlabel 'D_t (m)'\nset ylabel 'D_r (m)'\n"
          << "plot " << f << " using 1:($3==1?$2:1/0) with points pt 5 title 'region x', \\\n"
          << "     " << f << " using 1:($4==1?$2:1/0) with points pt 7 title 'region y'\n";
    } else if (command == "optimize") {
        g << "set xlabel 'step'\nset ylabel 'MI (bits/s/Hz)'\n"
          << "plot " << f << " using 0:3 with linespoints title 'MI'\n";
    } else if (command == "channel") {
        g << "set xlabel 'col'\nset ylabel 'row'\nset view map\n"
          << "splot " << f << " using 2:1:(sqrt($3**2+$4**2)) with image title '|h|'\n";
    } else {
        g << "# no plot for `" << command << "`; the CSV is a table\n";
    }
    return g.str();
}

}  // namespace irslos
