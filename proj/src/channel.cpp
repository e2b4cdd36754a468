#include "irslos/channel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "irslos/csv.hpp"

namespace irslos {

namespace {

struct PoseTrig {
    double sp, cp, sw, cw, sps, cps, sg, cg, d, D;

    explicit PoseTrig(const ArrayPose& a)
        : sp(std::sin(a.elevation)), cp(std::cos(a.elevation)), sw(std::sin(a.azimuth)), cw(std::cos(a.azimuth)),
          sps(std::sin(a.orient_elevation)), cps(std::cos(a.orient_elevation)), sg(std::sin(a.orient_azimuth)),
          cg(std::cos(a.orient_azimuth)), d(a.spacing), D(a.distance) {}

    // Orientation-dependent part of the phase; the 2 pi D / lambda carrier is applied separately.
    double local_phase(int p, double x, double y, double lam) const {
        const double r = p * d;
        const double u1 = r * sps * cg - x * sw + y * cw;
        const double u2 = r * sps * sg - x * cp * cw - y * cp * sw;
        const double axial = r * cps - x * sp * cw - y * sp * sw;
        return kPi * (u1 * u1 + u2 * u2) / (lam * D) + kTwoPi * axial / lam;
    }

    double phase(int p, double x, double y, double lam) const { return local_phase(p, x, y, lam) + kTwoPi * D / lam; }
};

cd unit(double zeta) { return {std::cos(zeta), -std::sin(zeta)}; }

// Multiplying by a shared carrier keeps the rounding of the large phase out of the per-entry variation.

template <bool Parallel>
CMatrix build_tx(const ArrayPose& tx, const IrsLayout& irs, const WaveConfig& wave) {
    const PoseTrig t(tx);
    const int rows = irs.count(), cols = tx.n_antennas;
    const int hx = half_span(irs.q_x), hy = half_span(irs.q_y), hp = half_span(tx.n_antennas);
    const double lam = wave.wavelength;
    const cd carrier = unit(kTwoPi * t.D / lam);
    CMatrix h(rows, cols);
    const long total = static_cast<long>(rows) * cols;
#pragma omp parallel for schedule(static) if (Parallel)
    for (long idx = 0; idx < total; ++idx) {
        const int row = static_cast<int>(idx / cols), col = static_cast<int>(idx % cols);
        const int k = row / irs.q_y - hx, l = row % irs.q_y - hy;
        h(row, col) = carrier * unit(t.local_phase(col - hp, k * irs.spacing_x, l * irs.spacing_y, lam));
    }
    return h;
}

template <bool Parallel>
CMatrix build_rx(const ArrayPose& rx, const IrsLayout& irs, const WaveConfig& wave) {
    const PoseTrig t(rx);
    const int rows = rx.n_antennas, cols = irs.count();
    const int hx = half_span(irs.q_x), hy = half_span(irs.q_y), hq = half_span(rx.n_antennas);
    const double lam = wave.wavelength;
    const cd carrier = unit(kTwoPi * t.D / lam);
    CMatrix h(rows, cols);
    const long total = static_cast<long>(rows) * cols;
#pragma omp parallel for schedule(static) if (Parallel)
    for (long idx = 0; idx < total; ++idx) {
        const int col = static_cast<int>(idx / rows), row = static_cast<int>(idx % rows);
        const int k = col / irs.q_y - hx, l = col % irs.q_y - hy;
        h(row, col) = carrier * unit(t.local_phase(row - hq, k * irs.spacing_x, l * irs.spacing_y, lam));
    }
    return h;
}

}  // namespace

double link_phase(const ArrayPose& pose, const IrsLayout& irs, double wavelength, int p, int k, int l) {
    return PoseTrig(pose).phase(p, k * irs.spacing_x, l * irs.spacing_y, wavelength);
}

CMatrix tx_irs_channel(const ArrayPose& tx, const IrsLayout& irs, const WaveConfig& wave) {
    return build_tx<true>(tx, irs, wave);
}

CMatrix irs_rx_channel(const ArrayPose& rx, const IrsLayout& irs, const WaveConfig& wave) {
    return build_rx<true>(rx, irs, wave);
}

CMatrix tx_irs_channel(const Scenario& s) { return tx_irs_channel(s.tx, s.irs, s.wave); }
CMatrix irs_rx_channel(const Scenario& s) { return irs_rx_channel(s.rx, s.irs, s.wave); }

namespace serial {
CMatrix tx_irs_channel(const ArrayPose& tx, const IrsLayout& irs, const WaveConfig& wave) {
    return build_tx<false>(tx, irs, wave);
}
CMatrix irs_rx_channel(const ArrayPose& rx, const IrsLayout& irs, const WaveConfig& wave) {
    return build_rx<false>(rx, irs, wave);
}
}  // namespace serial

FocusingState focusing_for(const Scenario& s, int p, int q) {
    const IrsLayout& irs = s.irs;
    FocusingState f;
    f.betas.resize(irs.count());
    const double lam = s.wave.wavelength;
    for (int k = -half_span(irs.q_x); k <= half_span(irs.q_x); ++k)
        for (int l = -half_span(irs.q_y); l <= half_span(irs.q_y); ++l)
            f.betas(re_row(irs, k, l)) = link_phase(s.tx, irs, lam, p, k, l) + link_phase(s.rx, irs, lam, q, k, l);
    return f;
}

FocusingState reflective_focusing(const Scenario& s) { return focusing_for(s, 0, 0); }

FocusingState zero_focusing(const Scenario& s) {
    return {Eigen::VectorXd::Zero(s.irs.count())};
}

FocusingState scenario_focusing(const Scenario& s) {
    switch (s.focusing) {
        case FocusingMode::reflective:
            return reflective_focusing(s);
        case FocusingMode::zero:
            return zero_focusing(s);
        case FocusingMode::explicit_betas: {
            if (static_cast<int>(s.betas.size()) != s.irs.count())
                throw std::invalid_argument("explicit focusing needs Q_x*Q_y phases");
            FocusingState f;
            f.betas = Eigen::Map<const Eigen::VectorXd>(s.betas.data(), s.irs.count());
            return f;
        }
    }
    throw std::logic_error("unknown focusing mode");
}

CVector theta_of(const FocusingState& f) {
    CVector t(f.betas.size());
    for (Eigen::Index i = 0; i < f.betas.size(); ++i) t(i) = std::polar(1.0, f.betas(i));
    return t;
}

double tilde_g0(const Scenario& s) {
    return tilde_g({s.tx.elevation, s.tx.azimuth, s.reflection.polarization}, {s.rx.elevation, s.rx.azimuth});
}

double scenario_eta0(const Scenario& s) {
    return eta0(s.reflection.tau, s.irs.re_len_x, s.irs.re_len_y, s.tx.distance, s.rx.distance, tilde_g0(s),
                s.wave.absorption);
}

CMatrix cascade(const CMatrix& h_t, const CVector& theta, const CMatrix& h_r, double eta0) {
    if (h_t.rows() != theta.size() || h_r.cols() != theta.size())
        throw std::invalid_argument("channel dimension mismatch");
    return eta0 * (h_r * theta.asDiagonal() * h_t);
}

ChannelSet assemble(const Scenario& s, const FocusingState& focusing) {
    ChannelSet c;
    c.h_t = tx_irs_channel(s);
    c.h_r = irs_rx_channel(s);
    c.theta = theta_of(focusing);
    c.eta0 = scenario_eta0(s);
    c.h = cascade(c.h_t, c.theta, c.h_r, c.eta0);
    return c;
}

AxisGeometry axis_geometry(const ArrayPose& pose) {
    const double sw = std::sin(pose.azimuth), cw = std::cos(pose.azimuth), cp = std::cos(pose.elevation);
    AxisGeometry g;
    g.a_x = std::sqrt(sw * sw + cp * cp * cw * cw);
    g.a_y = std::sqrt(cw * cw + cp * cp * sw * sw);
    if (g.a_x < 1e-15 || g.a_y < 1e-15) throw std::domain_error("degenerate geometry: an A term vanishes");
    g.gbar_x = std::atan2(cp * cw / g.a_x, sw / g.a_x);
    g.gbar_y = std::atan2(cp * sw / g.a_y, -cw / g.a_y);
    if (g.gbar_x < 0) g.gbar_x += kTwoPi;
    if (g.gbar_y < 0) g.gbar_y += kTwoPi;
    return g;
}

CouplingConstants coupling_constants(const Scenario& s) {
    const AxisGeometry t = axis_geometry(s.tx), r = axis_geometry(s.rx);
    const double lam = s.wave.wavelength;
    const IrsLayout& irs = s.irs;
    auto c = [&](const ArrayPose& a, double spacing, int q, double amp, double gbar) {
        return a.spacing * spacing * q * amp * std::sin(a.orient_elevation) * std::cos(a.orient_azimuth - gbar) /
               (lam * a.distance);
    };
    CouplingConstants cc;
    cc.a_tx = t.a_x, cc.a_ty = t.a_y, cc.a_rx = r.a_x, cc.a_ry = r.a_y;
    cc.gbar_tx = t.gbar_x, cc.gbar_ty = t.gbar_y, cc.gbar_rx = r.gbar_x, cc.gbar_ry = r.gbar_y;
    cc.c_tx = c(s.tx, irs.spacing_x, irs.q_x, t.a_x, t.gbar_x);
    cc.c_ty = c(s.tx, irs.spacing_y, irs.q_y, t.a_y, t.gbar_y);
    cc.c_rx = c(s.rx, irs.spacing_x, irs.q_x, r.a_x, r.gbar_x);
    cc.c_ry = c(s.rx, irs.spacing_y, irs.q_y, r.a_y, r.gbar_y);
    return cc;
}

double dirichlet(double u, int q) {
    const double den = std::sin(kPi * u / q);
    if (std::abs(den) < 1e-9) {
        double sum = 0.0;
        for (int k = -half_span(q); k <= half_span(q); ++k) sum += std::cos(kTwoPi * u * k / q);
        return sum;
    }
    return std::sin(kPi * u) / den;
}

CMatrix closed_form_channel(const Scenario& s) {
    const CouplingConstants cc = coupling_constants(s);
    const double lam = s.wave.wavelength;
    const int nt = s.tx.n_antennas, nr = s.rx.n_antennas;
    const double st = s.tx.spacing * std::sin(s.tx.orient_elevation);
    const double sr = s.rx.spacing * std::sin(s.rx.orient_elevation);
    const double ct = s.tx.spacing * std::cos(s.tx.orient_elevation);
    const double cr = s.rx.spacing * std::cos(s.rx.orient_elevation);
    const double e0 = scenario_eta0(s);
    CMatrix h(nr, nt);
    for (int qi = 0; qi < nr; ++qi) {
        const int q = qi - half_span(nr);
        for (int pi = 0; pi < nt; ++pi) {
            const int p = pi - half_span(nt);
            const double ph = kTwoPi / lam *
                              (st * st * p * p / (2.0 * s.tx.distance) + sr * sr * q * q / (2.0 * s.rx.distance) +
                               p * ct + q * cr);
            const double qq = dirichlet(cc.c_tx * p + cc.c_rx * q, s.irs.q_x) *
                              dirichlet(cc.c_ty * p + cc.c_ry * q, s.irs.q_y);
            h(qi, pi) = e0 * qq * unit(ph);
        }
    }
    return h;
}

bool unit_modulus(const CMatrix& m, double tol) {
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (std::abs(std::abs(m.data()[i]) - 1.0) > tol) return false;
    return true;
}

void write_matrix_csv(std::ostream& os, const CMatrix& m, const std::string& scenario_hash) {
    os << "# scenario_hash=" << scenario_hash << "\n";
    os << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << r << ',' << c << ',' << fmt_double(m(r, c).real()) << ',' << fmt_double(m(r, c).imag()) << '\n';
}

}  // namespace irslos
