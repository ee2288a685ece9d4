#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace diskuq {

using Vec2 = Eigen::Vector2d;

/// One influx-boundary point of the unit disk in fan-beam coordinates:
/// boundary angle phi in [0,2pi) and direction angle varphi in [-pi/2,pi/2]
/// measured from the inward normal. The chord gamma(t) = entry + t*dir exits
/// the disk at t = exit_time = 2 cos(varphi).
struct BeamSample {
    double boundary_angle = 0.0;
    double direction_angle = 0.0;
    Vec2 entry_point = Vec2::Zero();
    Vec2 direction = Vec2::Zero();
    double exit_time = 0.0;
};

/// Stateless descriptor of the influx-boundary probability measure
/// d(lambda) = dphi dvarphi / (2 pi^2).
struct BeamMeasure {
    static constexpr double density = 1.0 / (2.0 * 3.14159265358979323846 *
                                             3.14159265358979323846);
};

BeamSample make_beam(double boundary_angle, double direction_angle);

/// Point gamma(t) on the chord; t must lie in [0, exit_time].
Vec2 point_along(const BeamSample& beam, double t);

/// i.i.d. draws from lambda. Beams with exit_time below min_exit_time are
/// resampled (measure-zero near-tangent set, avoids zero-length chords).
std::vector<BeamSample> sample_beams(std::size_t n, std::uint64_t seed,
                                     double min_exit_time = 1e-9);

/// Full chord through an interior phase point (x,v): time to the boundary
/// backwards and forwards, and the influx parametrization of the chord.
struct Chord {
    double backward_time = 0.0;  // tau(x,-v)
    double forward_time = 0.0;   // tau(x,v)
    BeamSample footpoint;        // influx beam whose chord passes through (x,v)
};

Chord chord_through(const Vec2& x, const Vec2& v);

void write_beams_csv(std::ostream& os, const std::vector<BeamSample>& beams);
std::vector<BeamSample> read_beams_csv(std::istream& is);

}  // namespace diskuq
