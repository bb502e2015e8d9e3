#include "jumptime/topology.hpp"

#include <cmath>

namespace jumptime {

namespace {

int default_start(int dimension) { return dimension == 1 ? 512 : 128; }
int default_cap(int dimension) { return dimension == 1 ? 1 << 14 : 512; }

MomentumGrid grid_for(int dimension, int n) {
    return dimension == 1 ? MomentumGrid::line(n) : MomentumGrid::square(n, n);
}

BlochVector bright_vector(ModelSpec const& model, Momentum const& k) {
    auto const h = bloch_vector(model, k);
    if (h.h_perp() <= dark_tolerance(model))
        throw DomainError("dark contact at k = (" + std::to_string(k[0]) + ", " + std::to_string(k[1]) + ")");
    return h;
}

Momentum shifted(Momentum k, int axis, double by) {
    k[axis] += by;
    return k;
}

bool collective_family(JumptimeKernel const& kernel) {
    return kernel.kind() == PropagatorKind::CC || kernel.kind() == PropagatorKind::CC2D;
}

} // namespace

Quadrature converge(std::function<double(int)> const& integral, int dimension, QuadratureOptions const& options) {
    int n = options.start_points > 0 ? options.start_points : default_start(dimension);
    int const cap = std::max(n, options.max_points > 0 ? options.max_points : default_cap(dimension));

    Quadrature q;
    q.value = integral(n);
    q.points = n;
    q.history.push_back({n, q.value});
    while (n < cap) {
        n *= 2;
        double const next = integral(n);
        q.history.push_back({n, next});
        double const change = std::abs(next - q.value);
        q.value = next;
        q.points = n;
        if (change < options.tolerance) {
            q.converged = true;
            break;
        }
    }
    return q;
}

WindingResult winding_number(ModelSpec const& model, int axis, QuadratureOptions const& options) {
    int const dim = model.dimension();
    if (axis < 0 || axis >= dim)
        throw ValidationError("winding axis out of range");

    WindingResult result;
    std::vector<double> slices;
    auto integral = [&](int n) {
        auto const grid = grid_for(dim, n);
        int const other = dim == 2 ? 1 - axis : 0;
        int const n_slices = dim == 2 ? n : 1;
        slices.assign(n_slices, 0.0);
        for (int i = 0; i < grid.size(); ++i) {
            auto const k = grid.at(i);
            auto const h = bright_vector(model, k);
            auto const dh = bloch_derivative(model, k, axis);
            double const f = (dh.hx * h.hy - h.hx * dh.hy) / h.h_perp_sq();
            int const slice = dim == 2 ? grid.unflatten(i)[other] : 0;
            slices[slice] += f / n;
        }
        double mean = 0;
        for (double s : slices)
            mean += s;
        return mean / n_slices;
    };
    result.quadrature = converge(integral, dim, options);
    result.value = result.quadrature.value;
    result.rounded = std::lround(result.value);
    result.residue = std::abs(result.value - double(result.rounded));
    auto const [lo, hi] = std::minmax_element(slices.begin(), slices.end());
    result.slice_spread = *hi - *lo;
    return result;
}

static cplx richardson_connection(KernelFunction const& kernel, Momentum const& p, int axis, double delta) {
    auto central = [&](double d) {
        return (kernel(shifted(p, axis, d), p) - kernel(shifted(p, axis, -d), p)) / (2.0 * d);
    };
    return I * (4.0 * central(delta / 2) - central(delta)) / 3.0;
}

ConnectionValue jumptime_connection(JumptimeKernel const& kernel, Momentum const& p, int axis) {
    cplx const j = I * kernel.derivative(p, axis);

    ConnectionValue out{j.real(), j.imag(), std::nullopt};
    if (collective_family(kernel)) {
        auto const& model = kernel.model();
        auto const h = bright_vector(model, p);
        auto const dh = bloch_derivative(model, p, axis);
        double const tiny = 1e-12 * std::max(1.0, model.energy_scale());
        // the winding integrand is the local connection only where h_z and its slope vanish
        if (std::abs(h.hz) <= tiny && std::abs(dh.hz) <= tiny) {
            double const closed = (dh.hx * h.hy - h.hx * dh.hy) / h.h_perp_sq();
            if (std::abs(closed - out.value) > 1e-8 * std::max(1.0, std::abs(closed)))
                throw ConsistencyError("jumptime connection disagrees with its closed form at k = " +
                                       std::to_string(p[axis]) + ": " + std::to_string(out.value) + " vs " +
                                       std::to_string(closed));
            out.closed_form = closed;
        }
    }
    return out;
}

PhaseResult jumptime_phase(JumptimeKernel const& kernel, int axis, QuadratureOptions const& options) {
    int const dim = kernel.model().dimension();
    if (axis < 0 || axis >= dim)
        throw ValidationError("phase axis out of range");

    if (kernel.closed_form()) {
        // refined search, so contacts between grid points surface as domain errors
        auto const& model = kernel.model();
        int const start = options.start_points > 0 ? options.start_points : default_start(dim);
        auto const perp = h_perp_min(model, grid_for(dim, start));
        if (perp.dark_contact)
            throw DomainError("dark contact at k = (" + std::to_string(perp.argmin[0]) + ", " +
                              std::to_string(perp.argmin[1]) + ")");
    }

    PhaseResult result;
    result.kind = kernel.kind();
    result.label = kernel.closed_form() ? "closed_form" : "empirical";

    std::vector<double> table;
    auto integral = [&](int n) {
        auto const grid = grid_for(dim, n);
        table.assign(grid.size(), 0.0);
        double total = 0;
        for (int i = 0; i < grid.size(); ++i) {
            table[i] = jumptime_connection(kernel, grid.at(i), axis).value;
            total += table[i];
        }
        return total / grid.size();
    };
    result.quadrature = converge(integral, dim, options);
    result.value = result.quadrature.value;

    // explicit G-weighted double sum over p and q on the final grid
    auto const& comps = kernel.dissipator().components();
    bool const has_kick =
        std::any_of(comps.begin(), comps.end(), [](auto const& c) { return c.kind == ChannelKind::Kick; });
    if (has_kick && comps.size() == 1) {
        auto const grid = grid_for(dim, result.quadrature.points);
        auto const w = comps[0].kick.weights(grid);
        double total = 0;
        for (int p = 0; p < grid.size(); ++p) {
            auto const [m1, m2] = grid.unflatten(p);
            for (int q = 0; q < grid.size(); ++q) {
                if (w[q] == 0)
                    continue;
                auto const [q1, q2] = grid.unflatten(q);
                total += w[q] * table[grid.flatten(m1 - q1, m2 - q2)];
            }
        }
        result.kick_double_sum = total / grid.size();
    }
    return result;
}

Quadrature kernel_phase(KernelFunction const& kernel, int dimension, int axis, QuadratureOptions const& options) {
    if (axis < 0 || axis >= dimension)
        throw ValidationError("phase axis out of range");
    auto integral = [&](int n) {
        auto const grid = grid_for(dimension, n);
        double const delta = grid.spacing(axis) / 32.0;
        double total = 0;
        for (int i = 0; i < grid.size(); ++i)
            total += richardson_connection(kernel, grid.at(i), axis, delta).real();
        return total / grid.size();
    };
    return converge(integral, dimension, options);
}

ResidualTerms residual_terms(ModelSpec const& model, int axis, double gamma, QuadratureOptions const& options) {
    int const dim = model.dimension();
    if (axis < 0 || axis >= dim)
        throw ValidationError("residual axis out of range");
    if (!(gamma > 0))
        throw ValidationError("residual terms need gamma > 0");

    auto terms = [&](int n) {
        auto const grid = grid_for(dim, n);
        double r1 = 0, r2 = 0;
        for (int i = 0; i < grid.size(); ++i) {
            auto const k = grid.at(i);
            auto const h = bright_vector(model, k);
            double const dz = bloch_derivative(model, k, axis).hz;
            r1 += -2.0 / gamma * dz * std::log(h.h_perp_sq() / (gamma * gamma));
            r2 += dz * (16.0 * h.hz * h.hz + gamma * gamma) / (4.0 * gamma * h.h_perp_sq());
        }
        return std::pair{r1 / grid.size(), r2 / grid.size()};
    };

    // doubling on both terms; the history records R1 + R2
    int n = options.start_points > 0 ? options.start_points : default_start(dim);
    int const cap = std::max(n, options.max_points > 0 ? options.max_points : default_cap(dim));
    ResidualTerms out;
    std::tie(out.r1, out.r2) = terms(n);
    out.quadrature.history.push_back({n, out.r1 + out.r2});
    while (n < cap) {
        n *= 2;
        auto const [r1, r2] = terms(n);
        out.quadrature.history.push_back({n, r1 + r2});
        double const change = std::max(std::abs(r1 - out.r1), std::abs(r2 - out.r2));
        out.r1 = r1;
        out.r2 = r2;
        if (change < options.tolerance) {
            out.quadrature.converged = true;
            break;
        }
    }
    out.quadrature.points = n;
    out.quadrature.value = out.r1 + out.r2;
    return out;
}

CurvatureResult curvature_chern(JumptimeKernel const& kernel, int points) {
    if (kernel.model().dimension() != 2)
        throw ValidationError("curvature needs a two-dimensional model");
    if (points < 4)
        throw ValidationError("curvature grid too small");
    auto const grid = MomentumGrid::square(points, points);
    double const outer = grid.spacing(0) / 8.0;

    auto connection = [&](Momentum const& k, int axis) { return jumptime_connection(kernel, k, axis).value; };
    auto derivative = [&](Momentum const& k, int along, int component) {
        auto central = [&](double d) {
            return (connection(shifted(k, along, d), component) - connection(shifted(k, along, -d), component)) /
                   (2.0 * d);
        };
        return (4.0 * central(outer / 2) - central(outer)) / 3.0;
    };

    CurvatureResult out;
    out.points = points;
    out.omega = Eigen::MatrixXd::Zero(points, points);
    double total = 0;
    for (int i = 0; i < grid.size(); ++i) {
        auto const k = grid.at(i);
        auto const [m1, m2] = grid.unflatten(i);
        double const omega = derivative(k, 0, 1) - derivative(k, 1, 0);
        out.omega(m1, m2) = omega;
        total += omega;
    }
    // C = oint oint dp1 dp2 / (2 pi)^2 Omega with dp = 2 pi / n
    out.chern = total / grid.size();
    return out;
}

TopologyReport topology_report(ModelSpec const& model, DissipatorSpec const& dissipator,
                               QuadratureOptions const& options, bool with_curvature) {
    TopologyReport report;
    report.model = model.name();
    report.dissipator = dissipator.label();
    report.dimension = model.dimension();
    report.symmetry = symmetry_check(model, grid_for(model.dimension(), model.dimension() == 1 ? 256 : 32));

    JumptimeKernel const kernel(model, dissipator);
    double const gamma = dissipator.total_rate();
    for (int axis = 0; axis < model.dimension(); ++axis) {
        AxisReport a;
        a.winding = winding_number(model, axis, options);
        a.phase = jumptime_phase(kernel, axis, options);
        if (collective_family(kernel)) {
            a.residuals = residual_terms(model, axis, gamma, options);
            a.identity_defect = std::abs(a.phase.value - a.winding.value - a.residuals->r1 - a.residuals->r2);
        }
        report.axes.push_back(std::move(a));
    }
    if (with_curvature && model.dimension() == 2)
        report.curvature = curvature_chern(kernel);
    return report;
}

PhaseTransform transform_phases(std::array<double, 2> phases, ModelSpec const& model,
                                DissipatorSpec const& dissipator, int m, double tolerance,
                                QuadratureOptions const& options) {
    if (model.dimension() != 2)
        throw ValidationError("primitive-vector transformation needs a two-dimensional model");

    PhaseTransform out;
    out.law = {phases[0] - m * phases[1], phases[1]};

    auto const transformed = transform_primitive_vectors(model, m);
    JumptimeKernel const kernel(transformed, dissipator);
    for (int axis = 0; axis < 2; ++axis)
        out.recomputed[axis] = jumptime_phase(kernel, axis, options).value;

    auto const& a = model.primitive_vectors();
    auto const& b = transformed.primitive_vectors();
    out.displacement_before = phases[0] * a[0] + phases[1] * a[1];
    out.displacement_after = out.recomputed[0] * b[0] + out.recomputed[1] * b[1];

    out.max_deviation = std::max({std::abs(out.law[0] - out.recomputed[0]), std::abs(out.law[1] - out.recomputed[1]),
                                  (out.displacement_before - out.displacement_after).cwiseAbs().maxCoeff()});
    if (out.max_deviation > tolerance)
        throw ConsistencyError("transformed phases deviate from the transformation law by " +
                               std::to_string(out.max_deviation));
    return out;
}

} // namespace jumptime
