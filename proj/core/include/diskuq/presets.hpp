#pragma once

#include "diskuq/field.hpp"

namespace diskuq {

/// Smooth compactly supported bump
///   amp * exp(1 - 1 / (1 - |x-center|^2 / radius^2))   for |x-center| < radius,
///   0 otherwise;
/// C^infinity with value amp at the center.
ScalarFieldPtr bump_field(const Vec2& center, double radius, double amp);

/// Named preset scalar components 'a'..'f': fixed bump combinations, all
/// supported inside |x| <= 0.85. Exact formulas are documented in README.md.
ScalarFieldPtr preset_scalar(char name);

/// Preset su(2)-valued truth field Phi = a B1 + b B2 + c B3 in the basis
/// B_a = i sigma_a / sqrt(2).
MatrixField preset_phi();
/// Test fields: Psi1 = Phi, Psi2 = d B1 + e B2 + f B3, Psi3 = e B1 + f B2 + d B3.
MatrixField preset_psi(int j);

}  // namespace diskuq
