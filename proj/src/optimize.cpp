#include "irslos/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace irslos {

namespace {

const double kLn2 = std::log(2.0);

Eigen::VectorXd singular_values(const CMatrix& m) {
    if (m.size() == 0) return {};
    return Eigen::JacobiSVD<CMatrix>(m).singularValues();
}

double wrap_pi(double a) {
    double r = std::remainder(a, kTwoPi);  // (-pi, pi]
    return r;
}

}  // namespace

double mutual_information(const CMatrix& h, const PowerConfig& power) {
    const double rho = power.snr();
    const Eigen::VectorXd s = singular_values(h);
    double nats = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) nats += std::log1p(rho * s(i) * s(i));
    return nats / kLn2;
}

double mutual_information_det(const CMatrix& h, const PowerConfig& power) {
    const CMatrix a = power.snr() * (h.adjoint() * h) + CMatrix::Identity(h.cols(), h.cols());
    return std::log(std::abs(a.partialPivLu().determinant())) / kLn2;
}

double mi_upper_bound(const CMatrix& h_t, const CMatrix& h_r, double eta0, const PowerConfig& power) {
    const Eigen::VectorXd st = singular_values(h_t), sr = singular_values(h_r);
    const Eigen::Index n = std::min({st.size(), sr.size(), h_r.rows()});
    const double g = power.snr() * eta0 * eta0;
    double nats = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) nats += std::log1p(g * sr(i) * sr(i) * st(i) * st(i));
    return nats / kLn2;
}

SingularAllocation relaxed_optimum(SnrRegime regime, int n_t, int n_r, int q_x, int q_y) {
    if (n_t < n_r) throw std::invalid_argument("relaxed optimum requires N_t >= N_r");
    const double q = static_cast<double>(q_x) * q_y;
    SingularAllocation a;
    a.mu_t_sq.assign(n_t, 0.0);
    a.mu_r_sq.assign(n_r, 0.0);
    if (regime == SnrRegime::high) {
        for (int i = 0; i < n_r; ++i) {
            a.mu_t_sq[i] = static_cast<double>(n_t) / n_r * q;
            a.mu_r_sq[i] = q;
        }
    } else {
        a.mu_t_sq[0] = n_t * q;
        a.mu_r_sq[0] = n_r * q;
    }
    return a;
}

double relaxed_objective(const SingularAllocation& a, double gain) {
    const std::size_t n = std::min(a.mu_t_sq.size(), a.mu_r_sq.size());
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += std::log1p(gain * a.mu_r_sq[i] * a.mu_t_sq[i]);
    return v;
}

MmAuxiliaries mm_auxiliaries(const CMatrix& h_t, const CMatrix& h_r, const CVector& theta, double eta0,
                             const PowerConfig& power) {
    const double P = power.per_antenna_power, s2 = power.noise_power;
    const CMatrix g = h_r * theta.asDiagonal() * h_t;
    const Eigen::Index nt = h_t.cols(), nr = h_r.rows();
    const CMatrix cxy = P * eta0 * g.adjoint();
    const CMatrix cyy = P * eta0 * eta0 * (g * g.adjoint()) + s2 * CMatrix::Identity(nr, nr);

    MmAuxiliaries aux;
    aux.phi = cyy.ldlt().solve(cxy.adjoint()).adjoint();
    CMatrix sigma = P * CMatrix::Identity(nt, nt) - aux.phi * cxy.adjoint();
    sigma = 0.5 * (sigma + sigma.adjoint()).eval();

    const double floor = 1e-12 * sigma.trace().real() / static_cast<double>(nt);
    const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(sigma, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lmin < floor) {
        sigma.diagonal().array() += floor + std::max(0.0, -lmin);
        aux.regularized = true;
    }
    aux.sigma = sigma;

    const Eigen::LLT<CMatrix> sig(sigma);
    const CMatrix sinv_phi_hr = sig.solve(aux.phi * h_r);                 // N_t x QQ
    const CMatrix m = (aux.phi * h_r).adjoint() * sinv_phi_hr;            // QQ x QQ
    const CMatrix outer = h_t.conjugate() * h_t.transpose();              // sum_j conj(h_j) h_j^T
    aux.lambda = P * eta0 * eta0 * m.cwiseProduct(outer);
    aux.lambda = 0.5 * (aux.lambda + aux.lambda.adjoint()).eval();

    const CMatrix b = sinv_phi_hr.adjoint();                              // H_r^H Phi^H Sigma^-1
    aux.alpha = -P * eta0 * b.cwiseProduct(h_t.conjugate()).rowwise().sum();
    return aux;
}

double qcqp_objective(const CMatrix& lambda, const CVector& alpha, const CVector& theta) {
    return theta.dot(lambda * theta).real() + 2.0 * alpha.dot(theta).real();
}

double largest_eigenvalue(const CMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n == 0) return 0.0;
    if (n < 64) return Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(n - 1);
    CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
    double mu = 0.0;
    for (int it = 0; it < 20000; ++it) {
        const CVector w = a * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = v.dot(w).real();
        v = w / nw;
        if (it > 0 && std::abs(next - mu) <= 1e-10 * std::abs(next)) {
            const double resid = (a * v - next * v).norm();
            return next + resid;
        }
        mu = next;
    }
    return Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(n - 1);
}

CVector mm_step(const CMatrix& lambda, const CVector& alpha, const CVector& theta, double lambda_max) {
    const CVector q = lambda_max * theta - lambda * theta - alpha;
    CVector out(theta.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double r = std::abs(q(i));
        out(i) = r > 0 ? q(i) / r : theta(i);
    }
    return out;
}

ThetaResult optimize_theta(const Scenario& s, const CVector& theta_init, const ThetaStop& stop) {
    const CMatrix h_t = tx_irs_channel(s), h_r = irs_rx_channel(s);
    const double e0 = scenario_eta0(s);
    ThetaResult res;
    res.theta = theta_init;
    double mi = mutual_information(cascade(h_t, res.theta, h_r, e0), s.power);
    res.trace.initial_mi_bits = mi;
    res.trace.stop_reason = "max_iters";
    for (int outer = 1; outer <= stop.max_outer; ++outer) {
        const MmAuxiliaries aux = mm_auxiliaries(h_t, h_r, res.theta, e0, s.power);
        res.trace.regularizations += aux.regularized ? 1 : 0;
        const double lmax = largest_eigenvalue(aux.lambda);
        CVector th = res.theta;
        double obj = qcqp_objective(aux.lambda, aux.alpha, th);
        for (int inner = 0; inner < stop.max_inner; ++inner) {
            const CVector next = mm_step(aux.lambda, aux.alpha, th, lmax);
            const double obj_next = qcqp_objective(aux.lambda, aux.alpha, next);
            if (obj_next > obj) break;
            const double gain = obj - obj_next;
            th = next;
            obj = obj_next;
            if (gain < stop.eps_mm) break;
        }
        const double mi_next = mutual_information(cascade(h_t, th, h_r, e0), s.power);
        if (mi_next < mi) {
            res.trace.stop_reason = "threshold";
            break;
        }
        res.theta = th;
        res.trace.entries.push_back({outer, Block::theta, mi_next});
        const double gain = mi_next - mi;
        mi = mi_next;
        if (gain < stop.eps) {
            res.trace.stop_reason = "threshold";
            break;
        }
    }
    return res;
}

Orientation orientation_of(const Scenario& s) {
    return {s.tx.orient_azimuth, s.tx.orient_elevation, s.rx.orient_azimuth, s.rx.orient_elevation};
}

Scenario with_orientation(const Scenario& s, const Orientation& m) {
    return s.with_orientations(m[0], m[1], m[2], m[3]);
}

Orientation to_box(const Orientation& m) {
    Orientation out = m;
    for (int side = 0; side < 2; ++side) {
        double g = wrap_pi(m[2 * side]);
        double psi = m[2 * side + 1];
        if (g > kPi / 2) {
            g -= kPi;
            psi = kPi - psi;
        } else if (g < -kPi / 2) {
            g += kPi;
            psi = kPi - psi;
        }
        out[2 * side] = g;
        out[2 * side + 1] = psi;
    }
    return out;
}

Orientation project_box(const Orientation& m) {
    Orientation out = m;
    for (int side = 0; side < 2; ++side) {
        out[2 * side] = std::clamp(m[2 * side], -kPi / 2, kPi / 2);
        out[2 * side + 1] = std::clamp(m[2 * side + 1], 0.0, kPi);
    }
    return out;
}

double mi_at(const Scenario& s, const CVector& theta, const Orientation& m) {
    const Scenario o = with_orientation(s, m);
    return mutual_information(cascade(tx_irs_channel(o), theta, irs_rx_channel(o), scenario_eta0(o)), o.power);
}

namespace {

// d zeta / d gamma and d zeta / d psi of every entry of one hop.
struct PhaseDerivs {
    Eigen::MatrixXd d_gamma;
    Eigen::MatrixXd d_psi;
};

PhaseDerivs phase_derivs(const ArrayPose& a, const IrsLayout& irs, double lam, bool tx_side) {
    const int n = a.n_antennas, qq = irs.count();
    PhaseDerivs d;
    const int rows = tx_side ? qq : n, cols = tx_side ? n : qq;
    d.d_gamma.resize(rows, cols);
    d.d_psi.resize(rows, cols);
    const double sg = std::sin(a.orient_azimuth), cg = std::cos(a.orient_azimuth);
    const double sps = std::sin(a.orient_elevation), cps = std::cos(a.orient_elevation);
    for (int k = -half_span(irs.q_x); k <= half_span(irs.q_x); ++k) {
        for (int l = -half_span(irs.q_y); l <= half_span(irs.q_y); ++l) {
            const int re = re_row(irs, k, l);
            for (int p = -half_span(n); p <= half_span(n); ++p) {
                const LinkComponents c = link_components(a, irs, p, k, l);
                const double r = p * a.spacing;
                const double scale = kTwoPi / (lam * c.D);
                const double dg = scale * (c.u1 * (-r * sps * sg) + c.u2 * (r * sps * cg));
                const double dp = scale * (c.u1 * (r * cps * cg) + c.u2 * (r * cps * sg)) - kTwoPi * r * sps / lam;
                const int i = tx_side ? re : p + half_span(n);
                const int j = tx_side ? p + half_span(n) : re;
                d.d_gamma(i, j) = dg;
                d.d_psi(i, j) = dp;
            }
        }
    }
    return d;
}

// sum_ij w(j, i) * (-i h(i, j) dz(i, j)), i.e. tr(W dH) with dH = -j H .* dz.
cd trace_product(const CMatrix& w, const CMatrix& h, const Eigen::MatrixXd& dz) {
    cd acc = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) acc += w(j, i) * h(i, j) * dz(i, j);
    return cd(0.0, -1.0) * acc;
}

}  // namespace

Orientation mi_gradient(const Scenario& s, const CVector& theta, const Orientation& m) {
    const Scenario o = with_orientation(s, m);
    const CMatrix h_t = tx_irs_channel(o), h_r = irs_rx_channel(o);
    const double e0 = scenario_eta0(o);
    const double rho = o.power.snr() * e0 * e0;
    const CMatrix g = h_r * theta.asDiagonal() * h_t;
    const Eigen::Index nt = h_t.cols();
    const CMatrix delta = rho * (g.adjoint() * g) + CMatrix::Identity(nt, nt);
    const CMatrix dinv_gh = delta.ldlt().solve(g.adjoint());  // N_t x N_r
    const CMatrix w_t = dinv_gh * h_r * theta.asDiagonal();   // N_t x QQ
    const CMatrix w_r = theta.asDiagonal() * h_t * dinv_gh;   // QQ x N_r

    const PhaseDerivs dt = phase_derivs(o.tx, o.irs, o.wave.wavelength, true);
    const PhaseDerivs dr = phase_derivs(o.rx, o.irs, o.wave.wavelength, false);
    const double f = -2.0 * rho / kLn2;
    return {f * trace_product(w_t, h_t, dt.d_gamma).real(), f * trace_product(w_t, h_t, dt.d_psi).real(),
            f * trace_product(w_r, h_r, dr.d_gamma).real(), f * trace_product(w_r, h_r, dr.d_psi).real()};
}

Orientation finite_difference_gradient(const Scenario& s, const CVector& theta, const Orientation& m, double step) {
    if (!(step > 0)) throw std::invalid_argument("finite-difference step must be > 0");
    Orientation g{};
    for (int i = 0; i < 4; ++i) {
        Orientation hi = m, lo = m;
        hi[i] += step;
        lo[i] -= step;
        g[i] = (-mi_at(s, theta, hi) + mi_at(s, theta, lo)) / (2.0 * step);
    }
    return g;
}

OrientationResult optimize_orientation(const Scenario& s, const CVector& theta, const Orientation& m_init,
                                       const OrientationStop& stop) {
    OrientationResult res;
    res.m = project_box(to_box(m_init));
    double f = -mi_at(s, theta, res.m);
    res.trace.initial_mi_bits = -f;
    res.trace.stop_reason = "max_iters";
    for (int it = 1; it <= stop.max_iters; ++it) {
        const Orientation g = mi_gradient(s, theta, res.m);
        double gn = 0.0;
        for (double v : g) gn += v * v;
        if (std::sqrt(gn) < 1e-10) {
            res.trace.entries.push_back({it, Block::orientation, -f});
            res.trace.stop_reason = "stationary";
            break;
        }
        double t = stop.initial_step;
        bool accepted = false;
        Orientation cand{};
        double fc = f;
        for (int b = 0; b <= stop.max_backtracks; ++b) {
            for (int i = 0; i < 4; ++i) cand[i] = res.m[i] - t * g[i];
            cand = project_box(cand);
            fc = -mi_at(s, theta, cand);
            if (fc <= f) {
                accepted = true;
                break;
            }
            t *= stop.shrink;
        }
        if (!accepted) {
            res.trace.entries.push_back({it, Block::orientation, -f});
            res.trace.stop_reason = "no_descent";
            break;
        }
        const double gain = f - fc;
        res.m = cand;
        f = fc;
        res.trace.entries.push_back({it, Block::orientation, -f});
        if (gain < stop.eps) {
            res.trace.stop_reason = "threshold";
            break;
        }
    }
    return res;
}

AlternatingResult alternating_optimize(const Scenario& s, const CVector& theta_init, const Orientation& m_init,
                                       const AlternatingStop& stop) {
    AlternatingResult res;
    res.theta = theta_init;
    res.m = m_init;
    res.mi_bits = mi_at(s, theta_init, m_init);
    res.trace.initial_mi_bits = res.mi_bits;
    res.trace.stop_reason = "max_iters";
    if (stop.max_rounds <= 0) return res;
    res.m = project_box(to_box(m_init));
    res.mi_bits = mi_at(s, res.theta, res.m);
    res.trace.initial_mi_bits = res.mi_bits;
    for (int round = 1; round <= stop.max_rounds; ++round) {
        const double before = res.mi_bits;
        const ThetaResult tr = optimize_theta(with_orientation(s, res.m), res.theta, stop.theta);
        res.theta = tr.theta;
        res.trace.regularizations += tr.trace.regularizations;
        res.mi_bits = mi_at(s, res.theta, res.m);
        res.trace.entries.push_back({round, Block::theta, res.mi_bits});
        const OrientationResult orr = optimize_orientation(s, res.theta, res.m, stop.orientation);
        res.m = orr.m;
        res.mi_bits = mi_at(s, res.theta, res.m);
        res.trace.entries.push_back({round, Block::orientation, res.mi_bits});
        if (res.mi_bits - before < stop.eps) {
            res.trace.stop_reason = "threshold";
            break;
        }
    }
    return res;
}

RandomInit random_init(const Scenario& s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi), gam(-kPi / 2, kPi / 2), psi(0.0, kPi);
    RandomInit r;
    r.theta.resize(s.irs.count());
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) r.theta(i) = std::polar(1.0, phase(rng));
    r.m = {gam(rng), psi(rng), gam(rng), psi(rng)};
    return r;
}

}  // namespace irslos
