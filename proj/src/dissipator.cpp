#include "jumptime/dissipator.hpp"

#include <cmath>
#include <numeric>

namespace jumptime {

namespace {

/// Grid momentum wrapped to (-pi, pi].
double wrapped(int m, int n) {
    int const d = centered_offset(m, 0, n);
    return two_pi * d / n;
}

std::vector<double> axis_weights(KickDistribution const& g, int n) {
    std::vector<double> w(n, 0.0);
    switch (g.shape) {
    case KickShape::Delta:
        w[0] = 1.0;
        break;
    case KickShape::Uniform:
        std::fill(w.begin(), w.end(), 1.0 / n);
        break;
    case KickShape::Gaussian: {
        if (!(g.sigma > 0))
            throw ValidationError("Gaussian kick width must be positive");
        for (int m = 0; m < n; ++m) {
            double const q = wrapped(m, n);
            w[m] = std::exp(-0.5 * g.sigma * g.sigma * q * q);
        }
        double const total = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w)
            x /= total;
        break;
    }
    case KickShape::Table:
        break;
    }
    return w;
}

} // namespace

std::vector<double> KickDistribution::weights(MomentumGrid const& grid) const {
    if (shape == KickShape::Table) {
        if (int(table.size()) != grid.size())
            throw ValidationError("kick table has " + std::to_string(table.size()) +
                                  " entries, grid has " + std::to_string(grid.size()));
        double total = 0;
        for (double x : table) {
            if (!(x >= 0))
                throw ValidationError("kick table entries must be nonnegative");
            total += x;
        }
        if (!(total > 0))
            throw ValidationError("kick table has zero mass");
        std::vector<double> w(table);
        for (auto& x : w)
            x /= total;
        return w;
    }

    auto const w1 = axis_weights(*this, grid.points[0]);
    if (grid.dimension == 1)
        return w1;
    auto const w2 = axis_weights(*this, grid.points[1]);
    std::vector<double> w(grid.size());
    for (int m2 = 0; m2 < grid.points[1]; ++m2)
        for (int m1 = 0; m1 < grid.points[0]; ++m1)
            w[grid.flatten(m1, m2)] = w1[m1] * w2[m2];
    return w;
}

std::string KickDistribution::label() const {
    switch (shape) {
    case KickShape::Delta: return "delta";
    case KickShape::Uniform: return "uniform";
    case KickShape::Gaussian: return "gaussian";
    case KickShape::Table: return "table";
    }
    return "?";
}

Mat2 DissipatorComponent::intracell() const {
    switch (kind) {
    case ChannelKind::Collective: return ket_bra(target, other(target));
    case ChannelKind::SublatticeProjector: return ket_bra(target, target);
    case ChannelKind::Kick: return ket_bra(Sublattice::A, Sublattice::B);
    case ChannelKind::DirectionalHop: return Mat2::Identity();
    }
    return Mat2::Zero();
}

cplx DissipatorComponent::momentum_phase(Momentum const& k) const {
    return kind == ChannelKind::DirectionalHop ? std::polar(1.0, -k[axis]) : cplx{1.0, 0.0};
}

std::string DissipatorComponent::label() const {
    switch (kind) {
    case ChannelKind::Collective: return std::string("collective_") + name(target);
    case ChannelKind::SublatticeProjector: return std::string("sublattice_") + name(target);
    case ChannelKind::Kick: return "kick_" + kick.label();
    case ChannelKind::DirectionalHop: return "directional_hop";
    }
    return "?";
}

DissipatorSpec DissipatorSpec::collective(Sublattice target, double rate) {
    DissipatorSpec d;
    d.parts.push_back({ChannelKind::Collective, target, {}, 0, rate});
    return mixture({d});
}

DissipatorSpec DissipatorSpec::sublattice(Sublattice target, double rate) {
    DissipatorSpec d;
    d.parts.push_back({ChannelKind::SublatticeProjector, target, {}, 0, rate});
    return mixture({d});
}

DissipatorSpec DissipatorSpec::kick(KickDistribution g, double rate) {
    DissipatorSpec d;
    d.parts.push_back({ChannelKind::Kick, Sublattice::A, std::move(g), 0, rate});
    return mixture({d});
}

DissipatorSpec DissipatorSpec::directional_hop(double rate, int axis) {
    if (axis < 0 || axis > 1)
        throw ValidationError("directional hop axis must be 0 or 1");
    DissipatorSpec d;
    d.parts.push_back({ChannelKind::DirectionalHop, Sublattice::A, {}, axis, rate});
    return mixture({d});
}

DissipatorSpec DissipatorSpec::mixture(std::vector<DissipatorSpec> const& parts) {
    DissipatorSpec out;
    for (auto const& p : parts) {
        for (auto const& c : p.parts) {
            if (!(c.rate > 0) || !std::isfinite(c.rate))
                throw ValidationError("dissipator rates must be positive and finite");
            out.parts.push_back(c);
        }
    }
    return out;
}

double DissipatorSpec::total_rate() const {
    double total = 0;
    for (auto const& c : parts)
        total += c.rate;
    return total;
}

DissipatorSpec DissipatorSpec::scaled(double factor) const {
    DissipatorSpec out = *this;
    for (auto& c : out.parts)
        c.rate *= factor;
    return mixture({out});
}

std::string DissipatorSpec::label() const {
    std::string s;
    for (auto const& c : parts) {
        if (!s.empty())
            s += "+";
        s += c.label();
    }
    return s;
}

Mat2 decay_operator(DissipatorSpec const& dissipator) {
    Mat2 d = Mat2::Zero();
    for (auto const& c : dissipator.components())
        d += c.rate * c.decay();
    return d;
}

EffectiveHamiltonianBlocks effective_hamiltonian(ModelSpec const& model, DissipatorSpec const& dissipator,
                                                 MomentumGrid const& grid) {
    Mat2 const damping = (0.5 * I) * decay_operator(dissipator);
    EffectiveHamiltonianBlocks out{grid, {}};
    out.blocks.reserve(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        out.blocks.push_back(bloch_matrix(model, grid.at(i)) - damping);
    return out;
}

DarkSetReport dark_set_report(ModelSpec const& model, DissipatorSpec const& dissipator,
                              MomentumGrid const& grid, std::optional<double> tolerance) {
    double const tol = tolerance.value_or(dark_tolerance(model));
    auto const& comps = dissipator.components();

    DarkSetReport report;
    report.persistent_within_sublattice =
        !comps.empty() && std::all_of(comps.begin(), comps.end(), [](auto const& c) {
            return c.kind == ChannelKind::SublatticeProjector;
        });

    Eigen::MatrixXcd stacked(2 * comps.size(), 2);
    for (std::size_t i = 0; i < comps.size(); ++i)
        stacked.block<2, 2>(2 * i, 0) = comps[i].intracell();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
    auto const& sv = svd.singularValues();
    int null_dim = 0;
    for (int i = 0; i < 2; ++i)
        if (i >= sv.size() || sv(i) < 1e-12)
            ++null_dim;

    if (null_dim == 0)
        return report;

    if (null_dim == 2) {
        for (int i = 0; i < grid.size(); ++i)
            report.contacts.push_back(grid.at(i));
    } else {
        Vec2 const v = svd.matrixV().col(1);
        Mat2 const off = Mat2::Identity() - v * v.adjoint();
        auto distance = [&](Momentum const& k) { return (off * bloch_matrix(model, k) * v).norm(); };
        for (int i = 0; i < grid.size(); ++i)
            if (distance(grid.at(i)) <= tol)
                report.contacts.push_back(grid.at(i));

        // Off-grid contacts for the sublattice-basis null vectors (h_perp = 0 there).
        bool const basis_vector = std::abs(std::abs(v(0)) - 1.0) < 1e-12 || std::abs(std::abs(v(1)) - 1.0) < 1e-12;
        if (basis_vector && report.contacts.empty()) {
            auto const refined = h_perp_min(model, grid, tol);
            if (refined.dark_contact)
                report.contacts.push_back(refined.argmin);
        }
    }

    report.dark_free = report.contacts.empty();
    report.trace_terminating = !report.persistent_within_sublattice && int(report.contacts.size()) == grid.size();
    return report;
}

std::vector<ChannelRate> jump_channels(DissipatorSpec const& dissipator, PureState const& state) {
    std::vector<ChannelRate> rates;
    double total = 0;
    auto const& comps = dissipator.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        Mat2 const d = comps[c].decay();
        double r = 0;
        for (int i = 0; i < state.amp.rows(); ++i) {
            Vec2 const psi = state.amp.row(i).transpose();
            r += (psi.adjoint() * d * psi)(0, 0).real();
        }
        r = std::max(0.0, comps[c].rate * r);
        rates.push_back({int(c), r});
        total += r;
    }
    if (!(total > 0))
        throw DarkTrapped("all jump rates vanish: the state is dark");
    return rates;
}

PureState apply_jump(DissipatorSpec const& dissipator, int component, int kick, PureState const& state) {
    auto const& c = dissipator.components().at(component);
    Mat2 const m = c.intracell();
    PureState out{state.grid, Amplitudes::Zero(state.amp.rows(), 2)};
    auto const& grid = state.grid;

    if (c.kind == ChannelKind::Kick) {
        auto const [q1, q2] = grid.unflatten(kick);
        for (int i = 0; i < grid.size(); ++i) {
            auto const [m1, m2] = grid.unflatten(i);
            int const to = grid.flatten(m1 + q1, m2 + q2);
            out.amp.row(to) = (m * state.amp.row(i).transpose()).transpose();
        }
    } else {
        for (int i = 0; i < grid.size(); ++i)
            out.amp.row(i) = (c.momentum_phase(grid.at(i)) * (m * state.amp.row(i).transpose())).transpose();
    }

    double const n = out.norm();
    if (!(n > 0))
        throw Error("jump produced a zero state (channel had vanishing rate)");
    out.amp /= n;
    return out;
}

} // namespace jumptime
