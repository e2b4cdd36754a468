#include "irslos/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace irslos {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

double wrap_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

bool in_set(int v, int n) { return v >= -half_span(n) && v <= half_span(n); }

}  // namespace

ArrayPose ArrayPose::make(int n, double spacing, double distance, double azimuth, double elevation,
                          double orient_azimuth, double orient_elevation) {
    ArrayPose a{n, spacing, distance, azimuth, elevation, orient_azimuth, orient_elevation};
    a.validate();
    return a;
}

void ArrayPose::validate() const {
    require(n_antennas >= 1 && n_antennas % 2 == 1, "antenna count must be odd and >= 1");
    require(std::isfinite(spacing) && spacing > 0, "antenna spacing must be > 0");
    require(std::isfinite(distance) && distance > 0, "distance must be > 0");
    require(azimuth >= 0 && azimuth < kTwoPi, "azimuth must lie in [0, 2pi)");
    require(elevation >= 0 && elevation <= kPi / 2, "elevation must lie in [0, pi/2]");
    require(orient_azimuth >= 0 && orient_azimuth < kTwoPi, "orientation azimuth must lie in [0, 2pi)");
    require(orient_elevation >= 0 && orient_elevation <= kPi, "orientation elevation must lie in [0, pi]");
}

ArrayPose ArrayPose::with_orientation(double gamma, double psi) const {
    ArrayPose a = *this;
    a.orient_azimuth = wrap_2pi(gamma);
    a.orient_elevation = psi;
    require(psi >= 0 && psi <= kPi, "orientation elevation must lie in [0, pi]");
    return a;
}

ArrayPose ArrayPose::with_distance(double d) const {
    ArrayPose a = *this;
    a.distance = d;
    require(std::isfinite(d) && d > 0, "distance must be > 0");
    return a;
}

IrsLayout IrsLayout::make(int qx, int qy, double sx, double sy, double lx, double ly) {
    IrsLayout l{qx, qy, sx, sy, lx, ly};
    l.validate();
    return l;
}

void IrsLayout::validate() const {
    require(q_x >= 1 && q_x % 2 == 1, "Q_x must be odd and >= 1");
    require(q_y >= 1 && q_y % 2 == 1, "Q_y must be odd and >= 1");
    require(spacing_x > 0 && spacing_y > 0, "RE spacing must be > 0");
    require(re_len_x >= 0 && re_len_y >= 0, "RE length must be >= 0");
    require(re_len_x <= spacing_x && re_len_y <= spacing_y, "RE length must not exceed RE spacing");
}

CenteredIndex::CenteredIndex(int value, int n) : value_(value), half_((n - 1) / 2) {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("index set size must be odd");
    if (value > half_ || value < -half_) throw std::out_of_range("centred index out of range");
}

Frame local_frame(const ArrayPose& pose) {
    const double sp = std::sin(pose.elevation), cp = std::cos(pose.elevation);
    const double sw = std::sin(pose.azimuth), cw = std::cos(pose.azimuth);
    Frame f;
    f.n_z = Vec3(sp * cw, sp * sw, cp);
    f.n_y = Vec3(cp * cw, cp * sw, -sp);
    f.n_x = f.n_y.cross(f.n_z);
    return f;
}

Vec3 antenna_position(const ArrayPose& pose, CenteredIndex p) {
    if (!in_set(p, pose.n_antennas)) throw std::out_of_range("antenna index out of range");
    const Frame f = local_frame(pose);
    const double r = p.value() * pose.spacing;
    const double s = std::sin(pose.orient_elevation);
    return r * s * std::cos(pose.orient_azimuth) * f.n_x + r * s * std::sin(pose.orient_azimuth) * f.n_y +
           (pose.distance + r * std::cos(pose.orient_elevation)) * f.n_z;
}

Vec3 re_position(const IrsLayout& layout, CenteredIndex k, CenteredIndex l) {
    if (!in_set(k, layout.q_x) || !in_set(l, layout.q_y)) throw std::out_of_range("RE index out of range");
    return Vec3(k.value() * layout.spacing_x, l.value() * layout.spacing_y, 0.0);
}

LinkComponents link_components(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l) {
    const double sp = std::sin(pose.elevation), cp = std::cos(pose.elevation);
    const double sw = std::sin(pose.azimuth), cw = std::cos(pose.azimuth);
    const double sps = std::sin(pose.orient_elevation), cps = std::cos(pose.orient_elevation);
    const double r = p * pose.spacing;
    const double x = k * layout.spacing_x, y = l * layout.spacing_y;
    LinkComponents c;
    c.u1 = r * sps * std::cos(pose.orient_azimuth) - x * sw + y * cw;
    c.u2 = r * sps * std::sin(pose.orient_azimuth) - x * cp * cw - y * cp * sw;
    c.axial = r * cps - x * sp * cw - y * sp * sw;
    c.D = pose.distance;
    return c;
}

double link_distance_exact_raw(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l) {
    const LinkComponents c = link_components(pose, layout, p, k, l);
    return std::hypot(c.u1, c.u2, c.D + c.axial);
}

double link_distance_approx_raw(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l) {
    const LinkComponents c = link_components(pose, layout, p, k, l);
    return (c.u1 * c.u1 + c.u2 * c.u2) / (2.0 * c.D) + c.axial + c.D;
}

double link_distance_exact(const ArrayPose& pose, const IrsLayout& layout, CenteredIndex p, CenteredIndex k,
                           CenteredIndex l) {
    if (!in_set(p, pose.n_antennas) || !in_set(k, layout.q_x) || !in_set(l, layout.q_y))
        throw std::out_of_range("index out of range");
    return link_distance_exact_raw(pose, layout, p, k, l);
}

double link_distance_approx(const ArrayPose& pose, const IrsLayout& layout, CenteredIndex p, CenteredIndex k,
                            CenteredIndex l) {
    if (!in_set(p, pose.n_antennas) || !in_set(k, layout.q_x) || !in_set(l, layout.q_y))
        throw std::out_of_range("index out of range");
    return link_distance_approx_raw(pose, layout, p, k, l);
}

Direction direction_of(const Vec3& v) {
    const double rho = std::hypot(v.x(), v.y());
    return {std::atan2(rho, v.z()), std::atan2(v.y(), v.x())};
}

}  // namespace irslos
