#include "jumptime/state.hpp"

namespace jumptime {

namespace {

/// One-axis DFT along `axis` of a (n1*n2) x 2 block, sign = +1 momentum -> position.
Amplitudes dft_axis(MomentumGrid const& grid, Amplitudes const& in, int axis, int sign) {
    int const n = grid.points[axis];
    if (n == 1)
        return in;
    std::vector<cplx> twiddle(n);
    for (int m = 0; m < n; ++m)
        twiddle[m] = std::polar(1.0 / std::sqrt(double(n)), sign * two_pi * m / n);

    Amplitudes out = Amplitudes::Zero(in.rows(), 2);
    int const n1 = grid.points[0];
    int const n2 = grid.points[1];
    for (int other = 0; other < (axis == 0 ? n2 : n1); ++other) {
        for (int j = 0; j < n; ++j) {
            cplx a{0, 0}, b{0, 0};
            for (int k = 0; k < n; ++k) {
                int const src = axis == 0 ? k + n1 * other : other + n1 * k;
                cplx const t = twiddle[(j * k) % n];
                a += t * in(src, 0);
                b += t * in(src, 1);
            }
            int const dst = axis == 0 ? j + n1 * other : other + n1 * j;
            out(dst, 0) = a;
            out(dst, 1) = b;
        }
    }
    return out;
}

} // namespace

void PureState::normalize() {
    double const n = norm();
    if (n <= 0)
        throw Error("cannot normalize a zero state");
    amp /= n;
}

PureState PureState::localized(MomentumGrid const& grid, std::array<int, 2> cell, Vec2 intracell) {
    if (intracell.norm() <= 0)
        throw ValidationError("intracell state must be nonzero");
    intracell.normalize();
    PureState state{grid, Amplitudes(grid.size(), 2)};
    double const scale = 1.0 / std::sqrt(double(grid.size()));
    for (int i = 0; i < grid.size(); ++i) {
        auto const k = grid.at(i);
        cplx const phase = std::polar(scale, -(k[0] * cell[0] + k[1] * cell[1]));
        state.amp(i, 0) = phase * intracell(0);
        state.amp(i, 1) = phase * intracell(1);
    }
    return state;
}

Amplitudes PureState::to_position() const {
    return dft_axis(grid, dft_axis(grid, amp, 0, +1), 1, +1);
}

PureState PureState::from_position(MomentumGrid const& grid, Amplitudes const& position) {
    return {grid, dft_axis(grid, dft_axis(grid, position, 0, -1), 1, -1)};
}

Eigen::VectorXcd PureState::to_dense() const {
    Amplitudes const pos = to_position();
    Eigen::VectorXcd v(2 * pos.rows());
    for (int j = 0; j < pos.rows(); ++j) {
        v(2 * j) = pos(j, 0);
        v(2 * j + 1) = pos(j, 1);
    }
    return v;
}

int centered_offset(int cell, int center, int n) {
    int d = (cell - center) % n;
    if (d < 0)
        d += n;
    if (2 * d > n)
        d -= n;
    return d;
}

} // namespace jumptime
