#pragma once

#include <Eigen/Dense>

namespace irslos {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Position and orientation of a ULA relative to the IRS centre.
struct ArrayPose {
    int n_antennas = 1;
    double spacing = 0.0;           // m
    double distance = 1.0;          // m, origin to array centre
    double azimuth = 0.0;           // omega, [0, 2pi)
    double elevation = 0.0;         // phi, [0, pi/2]
    double orient_azimuth = 0.0;    // gamma, [0, 2pi)
    double orient_elevation = kPi / 2;  // psi, [0, pi]

    // Throws std::invalid_argument on any violated invariant.
    static ArrayPose make(int n, double spacing, double distance, double azimuth, double elevation,
                          double orient_azimuth, double orient_elevation);
    void validate() const;

    // Copy with a new orientation; gamma is wrapped into [0, 2pi).
    ArrayPose with_orientation(double gamma, double psi) const;
    ArrayPose with_distance(double d) const;
};

struct IrsLayout {
    int q_x = 1;
    int q_y = 1;
    double spacing_x = 0.0;
    double spacing_y = 0.0;
    double re_len_x = 0.0;
    double re_len_y = 0.0;

    static IrsLayout make(int qx, int qy, double sx, double sy, double lx, double ly);
    void validate() const;

    double total_len_x() const { return (q_x - 1) * spacing_x + re_len_x; }
    double total_len_y() const { return (q_y - 1) * spacing_y + re_len_y; }
    int count() const { return q_x * q_y; }
};

// Index in {-(N-1)/2, ..., (N-1)/2} for odd N.
class CenteredIndex {
public:
    CenteredIndex(int value, int n);
    static CenteredIndex from_offset(int offset, int n) { return {offset - (n - 1) / 2, n}; }
    int value() const { return value_; }
    int offset() const { return value_ + half_; }
    operator int() const { return value_; }

private:
    int value_;
    int half_;
};

inline int half_span(int n) { return (n - 1) / 2; }

struct Frame {
    Vec3 n_x, n_y, n_z;
};

Frame local_frame(const ArrayPose& pose);

Vec3 antenna_position(const ArrayPose& pose, CenteredIndex p);
Vec3 re_position(const IrsLayout& layout, CenteredIndex k, CenteredIndex l);

// Components (u1, u2, u3) of the antenna-to-RE vector in the array's local frame,
// with u3 split into D + axial so the large term can be added last.
struct LinkComponents {
    double u1;
    double u2;
    double axial;   // u3 - D
    double D;
};

LinkComponents link_components(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l);

double link_distance_exact(const ArrayPose& pose, const IrsLayout& layout, CenteredIndex p,
                           CenteredIndex k, CenteredIndex l);
double link_distance_approx(const ArrayPose& pose, const IrsLayout& layout, CenteredIndex p,
                            CenteredIndex k, CenteredIndex l);

// Unchecked integer-index variants used in inner loops.
double link_distance_approx_raw(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l);
double link_distance_exact_raw(const ArrayPose& pose, const IrsLayout& layout, int p, int k, int l);

// Elevation (from +z) and azimuth of a vector.
struct Direction {
    double elevation;
    double azimuth;
};
Direction direction_of(const Vec3& v);

}  // namespace irslos
