#include "diskuq/geometry.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "diskuq/rng.hpp"

namespace diskuq {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}
}  // namespace

BeamSample make_beam(double boundary_angle, double direction_angle) {
    if (!(direction_angle >= -kPi / 2 && direction_angle <= kPi / 2)) {
        throw std::invalid_argument("make_beam: direction_angle outside [-pi/2, pi/2]");
    }
    BeamSample b;
    b.boundary_angle = wrap_angle(boundary_angle);
    b.direction_angle = direction_angle;
    b.entry_point = Vec2(std::cos(b.boundary_angle), std::sin(b.boundary_angle));
    // direction = cos(varphi) * (-x) + sin(varphi) * (-x)^perp, (a,b)^perp = (-b,a).
    const Vec2 inward = -b.entry_point;
    const Vec2 perp(-inward.y(), inward.x());
    b.direction = std::cos(direction_angle) * inward + std::sin(direction_angle) * perp;
    b.exit_time = 2.0 * std::cos(direction_angle);  // = -2 x.v
    return b;
}

Vec2 point_along(const BeamSample& beam, double t) {
    if (t < -1e-14 || t > beam.exit_time + 1e-14) {
        throw std::out_of_range("point_along: t outside [0, exit_time]");
    }
    return beam.entry_point + t * beam.direction;
}

std::vector<BeamSample> sample_beams(std::size_t n, std::uint64_t seed,
                                     double min_exit_time) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> u_phi(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> u_varphi(-kPi / 2, kPi / 2);
    std::vector<BeamSample> out;
    out.reserve(n);
    while (out.size() < n) {
        const double phi = u_phi(rng);
        const double varphi = u_varphi(rng);
        if (2.0 * std::cos(varphi) < min_exit_time) continue;
        out.push_back(make_beam(phi, varphi));
    }
    return out;
}

Chord chord_through(const Vec2& x, const Vec2& v) {
    const double r2 = x.squaredNorm();
    if (r2 >= 1.0) throw std::invalid_argument("chord_through: |x| >= 1");
    const double xv = x.dot(v);
    const double disc = std::sqrt(xv * xv + 1.0 - r2);
    Chord c;
    c.forward_time = -xv + disc;   // tau(x, v)
    c.backward_time = xv + disc;   // tau(x, -v)
    const Vec2 entry = x - c.backward_time * v;
    const double phi = std::atan2(entry.y(), entry.x());
    const Vec2 inward = -entry;
    const Vec2 perp(-inward.y(), inward.x());
    const double varphi = std::atan2(v.dot(perp), v.dot(inward));
    c.footpoint = make_beam(phi, varphi);
    return c;
}

void write_beams_csv(std::ostream& os, const std::vector<BeamSample>& beams) {
    os << "boundary_angle,direction_angle\n";
    os.precision(17);
    for (const auto& b : beams) {
        os << b.boundary_angle << "," << b.direction_angle << "\n";
    }
}

std::vector<BeamSample> read_beams_csv(std::istream& is) {
    std::vector<BeamSample> beams;
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double phi, varphi;
        char comma;
        ss >> phi >> comma >> varphi;
        beams.push_back(make_beam(phi, varphi));
    }
    return beams;
}

}  // namespace diskuq
