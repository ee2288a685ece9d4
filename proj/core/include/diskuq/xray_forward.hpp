#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diskuq/field.hpp"
#include "diskuq/geometry.hpp"
#include "diskuq/lie.hpp"

namespace diskuq {

/// Transport ODE integration options. The default exponential-midpoint
/// scheme is order 2 and exactly group-valued; cf4 selects the
/// fourth-order commutator-free scheme (two exponentials per step).
struct OdeOptions {
    double h_max = 0.01;
    bool cf4 = false;

    int steps_for(double exit_time) const;
};

/// Scattering datum C_Phi(beam) = U(0), where U' + Phi(gamma(t)) U = 0 with
/// U(tau) = Id along the chord.
MatXc scattering_datum(const MatrixField& field, const BeamSample& beam, int n_steps,
                       bool cf4 = false);
MatXc scattering_datum(const MatrixField& field, const BeamSample& beam,
                       const OdeOptions& opts = {});

std::vector<MatXc> forward_map(const MatrixField& field,
                               const std::vector<BeamSample>& beams,
                               const OdeOptions& opts = {});

struct ScatteringDataset {
    std::vector<BeamSample> beams;
    std::vector<MatXc> measurements;
    double noise_sigma = 0.0;
    std::string truth_tag;
};

/// Y_i = C_Phi(X_i) + sigma * E_i with X_i ~ lambda and E_i having i.i.d.
/// standard normal real and imaginary entry parts.
ScatteringDataset generate_dataset(const MatrixField& field, std::size_t n,
                                   double sigma, std::uint64_t seed,
                                   const OdeOptions& opts = {});

/// Influx-normalized integrating factor u(t) along the chord:
/// u' + Phi(gamma(t)) u = 0, u(0) = Id. Returns n_steps+1 values at the
/// uniform grid t_j = j * tau / n_steps; u(tau) = C_Phi^{-1}.
std::vector<MatXc> integrating_factor(const MatrixField& field, const BeamSample& beam,
                                      int n_steps, bool cf4 = false);

/// Attenuated X-ray transform I_{Theta(Phi,Psi)}(h)(beam)
///   = int_0^tau u_Phi^{-1}(t) h(gamma(t)) u_Psi(t) dt,
/// trapezoid quadrature aligned with the ODE grid.
MatXc attenuated_xray(const MatrixField& phi, const MatrixField& psi,
                      const MatrixField& h, const BeamSample& beam, int n_steps,
                      bool cf4 = false);

void write_dataset_json(std::ostream& os, const ScatteringDataset& ds);
ScatteringDataset read_dataset_json(std::istream& is);

/// Flat per-entry CSV export: one row per beam with fan-beam angles followed
/// by row-major (re, im) measurement entries.
void write_dataset_csv(std::ostream& os, const ScatteringDataset& ds);

}  // namespace diskuq
