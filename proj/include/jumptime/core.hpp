#pragma once
#include <Eigen/Dense>

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jumptime {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Intracell basis index. A is the upper component, sigma_z = |A><A| - |B><B|.
enum class Sublattice { A = 0, B = 1 };

inline Sublattice other(Sublattice s) { return s == Sublattice::A ? Sublattice::B : Sublattice::A; }
inline int index(Sublattice s) { return static_cast<int>(s); }
inline char const* name(Sublattice s) { return s == Sublattice::A ? "A" : "B"; }

/// Dimensionless crystal momentum k_i = p_i a_i / hbar, one entry per axis.
/// In 1D the second entry is ignored.
using Momentum = std::array<double, 2>;

/// |s><t| in the intracell basis.
inline Mat2 ket_bra(Sublattice s, Sublattice t) {
    Mat2 m = Mat2::Zero();
    m(index(s), index(t)) = 1.0;
    return m;
}

namespace pauli {
inline Mat2 x() { Mat2 m; m << 0, 1, 1, 0; return m; }
inline Mat2 y() { Mat2 m; m << 0, -I, I, 0; return m; }
inline Mat2 z() { Mat2 m; m << 1, 0, 0, -1; return m; }
} // namespace pauli

/// Base of all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: non-Hermitian hopping set, lattice too small, bad parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation at or too close to a dark contact (h_perp below tolerance).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A trajectory whose survival norm never falls below the drawn threshold.
class DarkTrapped : public Error {
public:
    using Error::Error;
};

/// Non-convergent jumptime integral: a non-decaying mode feeds a jump channel.
class DarkDivergence : public Error {
public:
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Degenerate steady-state manifold with no initial state to select from it.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

/// Two routes to the same quantity disagree beyond tolerance.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace jumptime
