#include "jumptime/bloch_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jumptime {

namespace {

constexpr double hermiticity_tolerance = 1e-12;

BlochVector decompose(Mat2 const& m) {
    BlochVector h;
    h.h0 = 0.5 * (m(0, 0) + m(1, 1)).real();
    h.hz = 0.5 * (m(0, 0) - m(1, 1)).real();
    h.hx = 0.5 * (m(0, 1) + m(1, 0)).real();
    h.hy = (0.5 * (m(1, 0) - m(0, 1)) / I).real();
    return h;
}

Translation negate(Translation r) { return {-r[0], -r[1]}; }

double phase_of(Translation const& r, Momentum const& k, int dim) {
    return dim == 1 ? k[0] * r[0] : k[0] * r[0] + k[1] * r[1];
}

int wrap(int j, int n) {
    int m = j % n;
    return m < 0 ? m + n : m;
}

/// Golden-section minimisation of f on [lo, hi].
template<class F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, int iterations = 80) {
    double const ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - ratio * (hi - lo);
    double d = lo + ratio * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc < fd) {
            hi = d; d = c; fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

} // namespace

ModelSpec::ModelSpec(int dimension, std::vector<Hopping> hoppings, std::string name)
    : dim(dimension), label(std::move(name)) {
    if (dim != 1 && dim != 2)
        throw ValidationError("model dimension must be 1 or 2, got " + std::to_string(dim));

    std::map<Translation, Mat2> merged;
    for (auto const& hop : hoppings) {
        if (dim == 1 && hop.r[1] != 0)
            throw ValidationError("1D model has a hopping with nonzero second translation component");
        if (!hop.matrix.allFinite())
            throw ValidationError("hopping matrix contains non-finite entries");
        auto [it, inserted] = merged.try_emplace(hop.r, hop.matrix);
        if (!inserted)
            it->second += hop.matrix;
    }

    double scale = 0;
    for (auto const& [r, m] : merged)
        scale = std::max(scale, m.cwiseAbs().maxCoeff());
    double const tol = hermiticity_tolerance * std::max(scale, 1.0);

    for (auto const& [r, m] : merged) {
        auto const it = merged.find(negate(r));
        Mat2 partner = it == merged.end() ? Mat2::Zero() : it->second;
        if ((partner - m.adjoint()).cwiseAbs().maxCoeff() > tol)
            throw ValidationError("hopping set is not Hermitian: H_{-r} != H_r^dagger for r = (" +
                                  std::to_string(r[0]) + ", " + std::to_string(r[1]) + ")");
    }

    for (auto const& [r, m] : merged)
        if (m.cwiseAbs().maxCoeff() > 0)
            terms.push_back({r, m});
}

void ModelSpec::set_primitive_vectors(Eigen::Vector2d const& a1, Eigen::Vector2d const& a2) {
    primitive = {a1, a2};
}

int ModelSpec::hopping_range(int axis) const {
    int range = 0;
    for (auto const& hop : terms)
        range = std::max(range, std::abs(hop.r[axis]));
    return range;
}

double ModelSpec::energy_scale() const {
    double scale = 0;
    for (auto const& hop : terms) {
        Eigen::JacobiSVD<Mat2> svd(hop.matrix);
        scale = std::max(scale, svd.singularValues()(0));
    }
    return scale;
}

ModelSpec ModelSpec::plus(std::vector<Hopping> const& extra) const {
    auto all = terms;
    all.insert(all.end(), extra.begin(), extra.end());
    ModelSpec out(dim, std::move(all), label);
    out.primitive = primitive;
    return out;
}

Mat2 BlochVector::matrix() const {
    return h0 * Mat2::Identity() + hx * pauli::x() + hy * pauli::y() + hz * pauli::z();
}

MomentumGrid MomentumGrid::line(int n) {
    if (n < 1)
        throw ValidationError("momentum grid needs at least one point");
    return {1, {n, 1}};
}

MomentumGrid MomentumGrid::square(int n1, int n2) {
    if (n1 < 1 || n2 < 1)
        throw ValidationError("momentum grid needs at least one point per axis");
    return {2, {n1, n2}};
}

MomentumGrid MomentumGrid::for_model(ModelSpec const& model, int n_per_axis) {
    return model.dimension() == 1 ? line(n_per_axis) : square(n_per_axis, n_per_axis);
}

Momentum MomentumGrid::at(int flat) const {
    auto const [m1, m2] = unflatten(flat);
    return {two_pi * m1 / points[0], dimension == 2 ? two_pi * m2 / points[1] : 0.0};
}

int MomentumGrid::flatten(int m1, int m2) const {
    return wrap(m1, points[0]) + points[0] * wrap(m2, points[1]);
}

int MomentumGrid::negated(int flat) const {
    auto const [m1, m2] = unflatten(flat);
    return flatten(-m1, -m2);
}

namespace models {

ModelSpec ssh(double v, double w) {
    // <A|h|B> = v + w e^{ik}: intracell v, intercell bond from A(j) to B(j+1).
    auto const ab = ket_bra(Sublattice::A, Sublattice::B);
    return ModelSpec(1,
                     {{{0, 0}, v * (ab + ab.adjoint())}, {{1, 0}, w * ab}, {{-1, 0}, w * ab.adjoint()}},
                     "ssh");
}

ModelSpec torus2d(double u, double v, double w) {
    auto const ba = ket_bra(Sublattice::B, Sublattice::A);
    Mat2 const along2 = w * (pauli::z() - I * pauli::y());
    return ModelSpec(2,
                     {{{0, 0}, u * pauli::x()},
                      {{1, 0}, v * ba},
                      {{-1, 0}, v * ba.adjoint()},
                      {{0, 1}, along2},
                      {{0, -1}, along2.adjoint()}},
                     "torus2d");
}

ModelSpec directional_chain(double J) {
    Mat2 const hop = J * Mat2::Identity();
    return ModelSpec(1, {{{1, 0}, hop}, {{-1, 0}, hop}}, "directional_chain");
}

} // namespace models

Mat2 bloch_matrix(ModelSpec const& model, Momentum const& k) {
    Mat2 m = Mat2::Zero();
    for (auto const& hop : model.hoppings())
        m += std::polar(1.0, phase_of(hop.r, k, model.dimension())) * hop.matrix;
    return m;
}

BlochVector bloch_vector(ModelSpec const& model, Momentum const& k) {
    return decompose(bloch_matrix(model, k));
}

BlochVector bloch_derivative(ModelSpec const& model, Momentum const& k, int axis) {
    Mat2 m = Mat2::Zero();
    for (auto const& hop : model.hoppings()) {
        if (hop.r[axis] == 0)
            continue;
        m += (I * double(hop.r[axis])) * std::polar(1.0, phase_of(hop.r, k, model.dimension())) *
             hop.matrix;
    }
    return decompose(m);
}

double dark_tolerance(ModelSpec const& model) {
    double const scale = model.energy_scale();
    return 1e-9 * (scale > 0 ? scale : 1.0);
}

PerpMinimum h_perp_min(ModelSpec const& model, MomentumGrid const& grid,
                       std::optional<double> tolerance) {
    if (grid.size() < 1)
        throw ValidationError("empty momentum grid");

    PerpMinimum best{std::numeric_limits<double>::infinity(), {0, 0}, false};
    for (int i = 0; i < grid.size(); ++i) {
        auto const k = grid.at(i);
        double const value = bloch_vector(model, k).h_perp();
        if (value < best.value)
            best = {value, k, false};
    }

    // Refine along each axis in turn, within one grid spacing of the argmin.
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int axis = 0; axis < grid.dimension; ++axis) {
            double const h = grid.spacing(axis);
            auto k = best.argmin;
            auto f = [&](double x) {
                auto q = k;
                q[axis] = x;
                return bloch_vector(model, q).h_perp();
            };
            auto const [x, value] = golden_section(f, k[axis] - h, k[axis] + h);
            if (value < best.value) {
                best.value = value;
                best.argmin[axis] = x;
            }
        }
    }
    for (int axis = 0; axis < 2; ++axis)
        best.argmin[axis] = std::fmod(std::fmod(best.argmin[axis], two_pi) + two_pi, two_pi);

    best.dark_contact = best.value <= tolerance.value_or(dark_tolerance(model));
    return best;
}

Eigen::MatrixXcd real_space_hamiltonian(ModelSpec const& model, std::array<int, 2> cells) {
    if (model.dimension() == 1)
        cells[1] = 1;
    for (int axis = 0; axis < model.dimension(); ++axis) {
        if (cells[axis] < std::max(1, 2 * model.hopping_range(axis)))
            throw ValidationError("lattice of " + std::to_string(cells[axis]) +
                                  " cells is too small for hopping range " +
                                  std::to_string(model.hopping_range(axis)));
    }

    int const n_cells = cells[0] * cells[1];
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n_cells, 2 * n_cells);
    for (int j2 = 0; j2 < cells[1]; ++j2) {
        for (int j1 = 0; j1 < cells[0]; ++j1) {
            int const from = j1 + cells[0] * j2;
            for (auto const& hop : model.hoppings()) {
                int const to = wrap(j1 + hop.r[0], cells[0]) + cells[0] * wrap(j2 + hop.r[1], cells[1]);
                h.block<2, 2>(2 * from, 2 * to) += hop.matrix;
            }
        }
    }
    return h;
}

SymmetryReport symmetry_check(ModelSpec const& model, MomentumGrid const& grid,
                              std::optional<double> tolerance) {
    double const tol = tolerance.value_or(1e-10 * std::max(model.energy_scale(), 1e-300));

    double max_hz = 0, x_odd = 0, y_even = 0, z_odd = 0, z_even = 0;
    for (int i = 0; i < grid.size(); ++i) {
        auto const h = bloch_vector(model, grid.at(i));
        auto const hm = bloch_vector(model, grid.at(grid.negated(i)));
        max_hz = std::max(max_hz, std::abs(h.hz));
        x_odd = std::max(x_odd, std::abs(h.hx - hm.hx));
        y_even = std::max(y_even, std::abs(h.hy + hm.hy));
        z_odd = std::max(z_odd, std::abs(h.hz - hm.hz));
        z_even = std::max(z_even, std::abs(h.hz + hm.hz));
    }

    SymmetryReport report;
    report.chiral = max_hz <= tol;
    report.pt = report.chiral;
    report.trs = x_odd <= tol && y_even <= tol && z_odd <= tol;
    report.inversion = x_odd <= tol && y_even <= tol && z_even <= tol;
    report.residual_forced_zero = report.chiral || report.trs;
    return report;
}

ModelSpec transform_primitive_vectors(ModelSpec const& model, int m) {
    if (model.dimension() != 2)
        throw ValidationError("primitive-vector transformation needs a 2D model");

    std::vector<Hopping> hoppings;
    for (auto const& hop : model.hoppings())
        hoppings.push_back({{hop.r[0] - m * hop.r[1], hop.r[1]}, hop.matrix});

    ModelSpec out(2, std::move(hoppings), model.name());
    auto const& [a1, a2] = model.primitive_vectors();
    out.set_primitive_vectors(a1, a2 + m * a1);
    return out;
}

} // namespace jumptime
