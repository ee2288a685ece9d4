#include "diskuq/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace diskuq {

ScalarFieldPtr bump_field(const Vec2& center, double radius, double amp) {
    return make_analytic([center, radius, amp](const Vec2& x) {
        const double s = (x - center).squaredNorm() / (radius * radius);
        if (s >= 1.0) return 0.0;
        return amp * std::exp(1.0 - 1.0 / (1.0 - s));
    });
}

namespace {
ScalarFieldPtr sum2(ScalarFieldPtr f, ScalarFieldPtr g) {
    return make_analytic(
        [f, g](const Vec2& x) { return f->eval(x) + g->eval(x); });
}
}  // namespace

ScalarFieldPtr preset_scalar(char name) {
    switch (name) {
        case 'a':
            return sum2(bump_field(Vec2(0.2, 0.1), 0.5, 1.0),
                        bump_field(Vec2(-0.3, -0.2), 0.4, -0.8));
        case 'b':
            return bump_field(Vec2(-0.25, 0.3), 0.45, 0.9);
        case 'c':
            return sum2(bump_field(Vec2(0.1, -0.35), 0.45, -0.7),
                        bump_field(Vec2(-0.1, 0.4), 0.3, 0.5));
        case 'd':
            return bump_field(Vec2(0.3, -0.1), 0.4, 0.8);
        case 'e':
            return bump_field(Vec2(-0.2, -0.3), 0.45, -0.9);
        case 'f':
            return bump_field(Vec2(0.0, 0.25), 0.45, 0.6);
        default:
            throw std::invalid_argument("preset_scalar: unknown preset name");
    }
}

MatrixField preset_phi() {
    return su2_field(preset_scalar('a'), preset_scalar('b'), preset_scalar('c'), 0.85);
}

MatrixField preset_psi(int j) {
    switch (j) {
        case 1:
            return preset_phi();
        case 2:
            return su2_field(preset_scalar('d'), preset_scalar('e'), preset_scalar('f'),
                             0.85);
        case 3:
            return su2_field(preset_scalar('e'), preset_scalar('f'), preset_scalar('d'),
                             0.85);
        default:
            throw std::invalid_argument("preset_psi: j must be 1, 2 or 3");
    }
}

}  // namespace diskuq
