#include "nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include <fmt/format.h>

#include "errors.hpp"
#include "ratefit.hpp"

namespace glf {

namespace {

constexpr double kReliableQ = 1e-200;

// Crank-Nicolson solver for one component; refactored only when dt changes.
struct CnBlock {
    const DiscreteOperator* op;
    std::vector<double> damping;       // sponge rate per node, may be empty
    double dt = -1.0;
    std::optional<ShiftedSolver> solver{};

    void prepare(double step) {
        if (step == dt && solver) return;
        dt = step;
        std::vector<cplx> extra;
        if (!damping.empty()) {
            extra.resize(damping.size());
            for (std::size_t i = 0; i < extra.size(); ++i) extra[i] = 0.5 * step * damping[i];
        }
        solver.emplace(*op, 1.0, -0.5 * step, extra);
    }

    // Increment form of u <- (I - dt/2 (L - D))^{-1} [(I + dt/2 (L - D)) u + dt N]; solving for the small
    // update keeps roundoff relative to the change rather than to u. Dirichlet values stay fixed.
    void advance(std::vector<cplx>& u, const std::vector<cplx>& nl) {
        const auto lu = op->apply(u);
        const std::size_t n = u.size();
        std::vector<cplx> du(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = damping.empty() ? 0.0 : damping[i];
            du[i] = dt * (lu[i] - d * u[i] + nl[i]);
        }
        solver->solve_in_place(du);
        for (std::size_t i = 0; i < n; ++i) u[i] += du[i];
    }
};

std::vector<double> sponge(const Grid& g, double fraction, double strength) {
    std::vector<double> d(g.n, 0.0);
    if (strength <= 0.0 || fraction <= 0.0) return d;
    const std::size_t width = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * g.n));
    const std::size_t start = g.n - width;
    for (std::size_t i = start; i < g.n; ++i) {
        const double u = static_cast<double>(i - start) / static_cast<double>(width);
        d[i] = strength * u * u;
    }
    return d;
}

std::vector<double> checkpoint_times(double dt, double T, double ratio, const std::vector<double>& extra) {
    std::set<double> marks{T};
    for (double tc = dt; tc < T; tc *= ratio) marks.insert(tc);
    for (double te : extra) {
        require(te > 0.0 && te <= T, ErrorCode::InvalidArgument, "extra time outside (0, T]");
        marks.insert(te);
    }
    std::vector<double> out;
    for (double t : marks)
        if (out.empty() || t - out.back() > 1e-9 * T) out.push_back(t);
    return out;
}

// Variable-step AB2 extrapolation of the explicit term.
std::vector<cplx> extrapolate(const std::vector<cplx>& now, const std::vector<cplx>& prev, double dt, double dt_prev) {
    if (prev.empty() || dt_prev <= 0.0) return now;
    const double r = dt / dt_prev;
    std::vector<cplx> out(now.size());
    for (std::size_t i = 0; i < now.size(); ++i) out[i] = (1.0 + 0.5 * r) * now[i] - 0.5 * r * prev[i];
    return out;
}

std::vector<cplx> to_cplx(const std::vector<double>& v) { return {v.begin(), v.end()}; }

struct FrontCache {
    std::vector<double> q, dq, w, dm, W;

    explicit FrontCache(const FrontProfile& f) {
        const Grid& g = f.grid;
        q = f.q;
        dq = f.qprime;
        w = weight_values(WeightSpec::omega(), g);
        const auto lw = log_weight_values(WeightSpec::omega(), g);
        dm.resize(g.n);
        W.resize(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            dm[i] = lw[i].dm;
            W[i] = w[i] * q[i];
        }
    }
};

struct NormWeights {
    std::vector<double> unit, m01, m10;
    explicit NormWeights(const Grid& g)
        : unit(g.n, 1.0), m01(weight_values(WeightSpec::alg(0.0, -1.0), g)),
          m10(weight_values(WeightSpec::alg(-1.0, 0.0), g)) {}
};

std::vector<double> raw_norms(const StatePair& s, const NormWeights& nw) {
    const Grid& g = s.p.grid;
    const auto px = differentiate(std::span<const cplx>(s.psi.values), g.h(), 1);
    const auto pxx = differentiate(std::span<const cplx>(s.psi.values), g.h(), 2);
    return {weighted_norm(s.p.values, g, nw.m01, NormKind::W1inf),
            weighted_norm(s.p.values, g, nw.unit, NormKind::W11),
            weighted_norm(s.psi.values, g, nw.unit, NormKind::Linf),
            weighted_norm(s.psi.values, g, nw.m10, NormKind::Linf),
            weighted_norm(px, g, nw.unit, NormKind::L1),
            weighted_norm(px, g, nw.unit, NormKind::Linf),
            weighted_norm(pxx, g, nw.unit, NormKind::Linf)};
}

double phase_norm(const StatePair& s, const FrontCache& fc, const NormWeights& nw) {
    const Grid& g = s.p.grid;
    std::vector<cplx> phi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) phi[i] = fc.q[i] > kReliableQ ? s.psi[i] / fc.W[i] : cplx{};
    return weighted_norm(phi, g, nw.m01, NormKind::W1inf);
}

double guard_value(const StatePair& s, const FrontCache& fc) {
    double worst = 0.0;
    for (std::size_t i = 0; i < fc.q.size(); ++i)
        if (fc.q[i] > kReliableQ) worst = std::max(worst, std::abs(s.p[i].real() / fc.W[i]));
    return worst;
}

std::pair<std::vector<double>, std::vector<double>> nonlinearity(const StatePair& s, const FrontCache& fc) {
    const Grid& g = s.p.grid;
    const std::size_t n = g.n;
    std::vector<double> p(n), phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = s.p[i].real();
        phi[i] = fc.q[i] > kReliableQ ? s.psi[i].real() / fc.W[i] : 0.0;
    }
    const auto px = differentiate(std::span<const double>(p), g.h(), 1);
    const auto phix = differentiate(std::span<const double>(phi), g.h(), 1);
    std::vector<double> np(n), npsi(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (fc.q[i] <= kReliableQ) continue;
        const double w = fc.w[i], q = fc.q[i];
        const double rho = p[i] / fc.W[i];
        const double f2 = phix[i] * phix[i];
        np[i] = -3.0 * (q / w) * p[i] * p[i] - p[i] * p[i] * p[i] / (w * w) - (fc.W[i] + p[i]) * f2;
        const double inv = 1.0 / (1.0 + rho);
        npsi[i] = 2.0 * phix[i] * (w * fc.dq[i] * (inv - 1.0) + (px[i] - fc.dm[i] * p[i]) * inv);
    }
    return {np, npsi};
}

}  // namespace

const std::vector<std::string>& theta_labels() {
    static const std::vector<std::string> labels{"p_W1inf_m01", "p_W11",     "psi_Linf",  "psi_Linf_m10",
                                                 "psix_L1",     "psix_Linf", "psixx_Linf"};
    return labels;
}

double theta_factor(std::size_t component, double s) {
    switch (component) {
        case 0: return std::pow(1.0 + s, 1.5);
        case 1:
        case 2: return std::sqrt(1.0 + s);
        case 3:
        case 5: return 1.0 + s;
        case 4: return std::sqrt(s);
        case 6: return (s > 0.0 && s <= 1.0) ? std::sqrt(s) : 0.0;
    }
    fail(ErrorCode::InvalidArgument, "Theta has seven components");
}

std::vector<double> theta_raw_norms(const StatePair& s) { return raw_norms(s, NormWeights(s.p.grid)); }

std::pair<std::vector<double>, std::vector<double>> coupled_nonlinearity(const StatePair& s, const FrontProfile& front) {
    require_same_grid(s.p.grid, front.grid);
    return nonlinearity(s, FrontCache(front));
}

const NormSeries& CoupledTrajectory::series(const std::string& label) const {
    for (const auto& s : norms)
        if (s.request.label == label) return s;
    fail(ErrorCode::MissingNorm, fmt::format("trajectory has no norm '{}'", label));
}

CoupledTrajectory evolve_coupled(const StatePair& s0, const FrontProfile& front, double T, const NonlinearOptions& opt) {
    const Grid& g = front.grid;
    require_same_grid(s0.p.grid, g);
    require_same_grid(s0.psi.grid, g);
    require(opt.dt > 0.0 && T >= opt.dt, ErrorCode::InvalidArgument, "need dt > 0 and T >= dt");
    const FrontCache fc(front);
    const NormWeights nw(g);

    const auto op_p = assemble_operator(OperatorKind::Lp, front, g, default_closure(OperatorKind::Lp));
    const auto op_psi = assemble_operator(OperatorKind::Lpsi, front, g, default_closure(OperatorKind::Lpsi));
    const auto damp = sponge(g, opt.sponge_fraction, opt.sponge_strength);
    CnBlock bp{&op_p, damp};
    CnBlock bs{&op_psi, damp};

    StatePair s = s0;
    s.p[0] = 0.0;
    s.p[g.n - 1] = 0.0;
    s.psi[g.n - 1] = 0.0;
    const double g0 = guard_value(s, fc);
    if (g0 > opt.guard)
        fail(ErrorCode::GuardViolation, fmt::format("initial data violate the Taylor guard ({:.3e} > {})", g0, opt.guard));

    CoupledTrajectory tr;
    tr.guard_max = g0;
    for (const auto& l : theta_labels()) tr.norms.push_back({{l, {}, NormKind::Linf, 0}, {}});
    tr.norms.push_back({{"amplitude", WeightSpec::alg(0.0, -1.0), NormKind::W1inf, 0}, {}});
    tr.norms.push_back({{"phase", WeightSpec::alg(0.0, -1.0), NormKind::W1inf, 0}, {}});

    auto raw = raw_norms(s, nw);
    double theta = 0.0;
    double floor = 0.0;
    for (double v : raw) floor = std::max(floor, v);
    floor *= 1e-10;
    auto record = [&](double t) {
        tr.times.push_back(t);
        for (std::size_t k = 0; k < raw.size(); ++k) tr.norms[k].values.push_back(raw[k]);
        tr.norms[7].values.push_back(raw[0]);
        tr.norms[8].values.push_back(phase_norm(s, fc, nw));
        tr.theta.push_back(theta);
        if (opt.store_states) tr.states.push_back(s);
    };
    record(0.0);

    const auto marks = checkpoint_times(opt.dt, T, opt.checkpoint_ratio, opt.extra_times);
    std::size_t next = 0;
    double t = 0.0, dt = opt.dt, dt_prev = 0.0;
    int calm = 0;
    std::vector<cplx> np_prev, ns_prev;
    while (next < marks.size()) {
        const double target = marks[next];
        double step = std::min(dt, target - t);
        const bool lands = step >= target - t - 1e-12 * T;
        const auto [np_d, ns_d] = nonlinearity(s, fc);
        const auto np_now = to_cplx(np_d), ns_now = to_cplx(ns_d);
        while (true) {
            StatePair trial = s;
            bp.prepare(step);
            bs.prepare(step);
            bp.advance(trial.p.values, extrapolate(np_now, np_prev, step, dt_prev));
            bs.advance(trial.psi.values, extrapolate(ns_now, ns_prev, step, dt_prev));
            auto trial_raw = raw_norms(trial, nw);
            bool jump = false;
            for (std::size_t k = 0; k < raw.size(); ++k) {
                const double ref = std::max(raw[k], floor);
                if (std::abs(trial_raw[k] - raw[k]) > opt.max_jump * ref && ref > 0.0) jump = true;
            }
            if (jump && step > opt.dt_min) {
                step *= 0.5;
                dt = step;
                calm = 0;
                ++tr.rejected;
                continue;
            }
            const double gv = guard_value(trial, fc);
            tr.guard_max = std::max(tr.guard_max, gv);
            if (gv > opt.guard)
                fail(ErrorCode::GuardViolation,
                     fmt::format("Taylor guard violated at t = {:.6g} ({:.3e} > {})", t + step, gv, opt.guard));
            s = std::move(trial);
            raw = std::move(trial_raw);
            break;
        }
        const bool landed = lands && step >= target - t - 1e-12 * T;
        t = landed ? target : t + step;
        np_prev = np_now;
        ns_prev = ns_now;
        dt_prev = step;
        if (dt < opt.dt && ++calm >= 4) {
            dt = std::min(opt.dt, 2.0 * dt);
            calm = 0;
        }
        ++tr.steps;
        double sum = 0.0;
        for (std::size_t k = 0; k < raw.size(); ++k) sum += theta_factor(k, t) * raw[k];
        theta = std::max(theta, sum);
        if (landed) {
            record(t);
            ++next;
        }
    }
    return tr;
}

CartesianTrajectory evolve_cartesian(const Field& A0, double T, const NonlinearOptions& opt) {
    const Grid& g = A0.grid;
    require(opt.dt > 0.0 && T >= opt.dt, ErrorCode::InvalidArgument, "need dt > 0 and T >= dt");
    const auto op = assemble_from_coefficients(OperatorKind::LpsiMinus, g, std::vector<double>(g.n, 2.0),
                                               std::vector<double>(g.n, 1.0),
                                               {BoundarySide::neumann(), BoundarySide::dirichlet()});
    CnBlock blk{&op, {}};
    CartesianTrajectory tr;
    std::vector<cplx> a = A0.values;
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.states.emplace_back(g, a);
    };
    record(0.0);
    auto nl = [&](const std::vector<cplx>& u) {
        std::vector<cplx> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = -u[i] * std::norm(u[i]);
        return out;
    };
    const auto marks = checkpoint_times(opt.dt, T, opt.checkpoint_ratio, opt.extra_times);
    std::size_t next = 0;
    double t = 0.0, dt_prev = 0.0;
    std::vector<cplx> prev;
    while (next < marks.size()) {
        const double target = marks[next];
        const double step = std::min(opt.dt, target - t);
        const auto now = nl(a);
        blk.prepare(step);
        blk.advance(a, extrapolate(now, prev, step, dt_prev));
        prev = now;
        dt_prev = step;
        if (step >= target - t - 1e-12 * T) {
            t = target;
            record(t);
            ++next;
        } else {
            t += step;
        }
    }
    return tr;
}

Converted convert_coordinates(Conversion dir, const StatePair& pair, const Field& cartesian, const FrontProfile& front) {
    const Grid& g = front.grid;
    const FrontCache fc(front);
    Converted out;
    if (dir == Conversion::PairToCartesian) {
        require_same_grid(pair.p.grid, g);
        require_same_grid(pair.psi.grid, g);
        out.cartesian = Field(g);
        for (std::size_t i = 0; i < g.n; ++i) {
            const double r = pair.p[i].real() / fc.w[i];
            if (fc.q[i] <= kReliableQ) {
                ++out.unreliable;
                out.cartesian[i] = fc.q[i] + r;
                continue;
            }
            const double phi = pair.psi[i].real() / fc.W[i];
            out.cartesian[i] = std::polar(fc.q[i] + r, phi);
        }
        return out;
    }
    require_same_grid(cartesian.grid, g);
    out.pair = {Field(g), Field(g)};
    double phase = 0.0, last = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const cplx A = cartesian[i];
        const double mod = std::abs(A);
        const bool reliable = fc.q[i] > kReliableQ;
        if (reliable && mod < 1e-8 * fc.q[i])
            fail(ErrorCode::PolarSingularity, fmt::format("|A| = {:.3e} at x = {:.6g} is too close to zero", mod, g.x(i)));
        const double arg = std::arg(A);
        if (i == 0) {
            phase = arg;
        } else {
            double d = arg - last;
            d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
            phase += d;
        }
        last = arg;
        out.pair.p[i] = fc.w[i] * (mod - fc.q[i]);
        out.pair.psi[i] = reliable ? fc.W[i] * phase : 0.0;
        if (!reliable) ++out.unreliable;
    }
    return out;
}

ThetaSeries compute_theta(const std::vector<double>& times, const std::vector<NormSeries>& norms) {
    const auto& labels = theta_labels();
    std::vector<const std::vector<double>*> cols;
    for (const auto& l : labels) {
        const std::vector<double>* found = nullptr;
        for (const auto& s : norms)
            if (s.request.label == l) found = &s.values;
        if (!found) fail(ErrorCode::MissingNorm, fmt::format("Theta needs the norm '{}'", l));
        require(found->size() == times.size(), ErrorCode::InvalidArgument, "norm series length differs from times");
        cols.push_back(found);
    }
    ThetaSeries out;
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> comp(labels.size());
        double sum = 0.0;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            comp[k] = theta_factor(k, times[i]) * (*cols[k])[i];
            sum += comp[k];
        }
        if (times[i] > 0.0) sup = std::max(sup, sum);
        out.times.push_back(times[i]);
        out.theta.push_back(sup);
        out.components.push_back(std::move(comp));
    }
    return out;
}

double initial_smallness(const StatePair& s0) {
    const auto& p = s0.p;
    const auto& psi = s0.psi;
    return weighted_norm(p, WeightSpec::alg(0.0, 1.0), NormKind::L1) + weighted_norm(p, WeightSpec::unit(), NormKind::W1inf) +
           weighted_norm(p, WeightSpec::unit(), NormKind::W11) +
           weighted_norm(psi, WeightSpec::alg(0.0, 1.0), NormKind::L1) +
           weighted_norm(psi, WeightSpec::unit(), NormKind::W1inf);
}

StatePair theorem1_initial_data(double epsilon, const FrontProfile& front) {
    require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
    const Grid& g = front.grid;
    const FrontCache fc(front);
    StatePair s{Field(g), Field(g)};
    for (std::size_t i = 0; i < g.n; ++i) {
        const double b = std::exp(-g.x(i) * g.x(i));
        s.p[i] = fc.w[i] * b;
        s.psi[i] = fc.W[i] * b;
    }
    const double scale = epsilon / initial_smallness(s);
    for (std::size_t i = 0; i < g.n; ++i) {
        s.p[i] *= scale;
        s.psi[i] *= scale;
    }
    return s;
}

Theorem1Result theorem1_experiment(const Theorem1Setup& setup) {
    const Grid g = extend_left(setup.x_min, setup.x_max, setup.n, setup.left_extension);
    const auto front = solve_critical_front(g.x_min, g.x_max, g.n, setup.front_tol);
    const auto s0 = theorem1_initial_data(setup.epsilon, front);
    NonlinearOptions opt = setup.options;
    opt.extra_times.push_back(0.5 * setup.T);
    Theorem1Result res;
    res.trajectory = evolve_coupled(s0, front, setup.T, opt);
    const auto& tr = res.trajectory;

    auto report = [&](const std::string& name, const std::string& label, double target, double tol) {
        DecayReport r;
        r.quantity = name;
        r.target = target;
        r.tolerance = tol;
        r.window = setup.window;
        r.times = tr.times;
        r.values = tr.series(label).values;
        std::size_t inside = 0;
        for (double t : r.times) inside += (t >= r.window.lo && t <= r.window.hi) ? 1 : 0;
        if (inside < 5) fail(ErrorCode::FitWindowTooShort, "fewer than 5 checkpoints inside the fit window");
        const auto fit = fit_power_law(r.times, r.values, r.window);
        r.exponent = fit.exponent;
        r.stderr_ = fit.stderr_;
        r.pass = std::abs(r.exponent - target) <= tol;
        return r;
    };
    res.amplitude = report("theorem1_amplitude", "amplitude", -1.5, 0.2);
    res.phase = report("theorem1_phase", "phase", -0.5, 0.1);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (std::abs(tr.times[i] - 0.5 * setup.T) < 1e-9 * setup.T) res.theta_half = tr.theta[i];
    res.theta_T = tr.theta.back();
    res.saturation = res.theta_half > 0.0 ? res.theta_T / res.theta_half : std::numeric_limits<double>::infinity();
    res.guard_max = tr.guard_max;
    res.guard_ok = tr.guard_max <= opt.guard;
    return res;
}

namespace {

double rel_linf(std::span<const cplx> a, std::span<const cplx> b) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(b[i]));
    }
    return m > 0.0 ? d / m : d;
}

}  // namespace

namespace {

struct CrossRun {
    std::vector<double> times;
    std::vector<StatePair> coupled;
    std::vector<StatePair> cartesian;  // converted back to (p, psi)
};

CrossRun cross_run(const CrossModelSetup& setup, std::size_t n, std::size_t stride) {
    const auto front = solve_critical_front(setup.x_min, setup.x_max, n, setup.front_tol);
    const auto s0 = theorem1_initial_data(setup.epsilon, front);
    NonlinearOptions opt;
    opt.dt = setup.dt;
    opt.sponge_strength = 0.0;
    opt.store_states = true;
    opt.checkpoint_ratio = 1.5;
    opt.max_jump = 1e300;
    const auto coupled = evolve_coupled(s0, front, setup.T, opt);
    const auto A0 = convert_coordinates(Conversion::PairToCartesian, s0, {}, front).cartesian;
    const auto cart = evolve_cartesian(A0, setup.T, opt);
    require(cart.times.size() == coupled.times.size(), ErrorCode::InvalidArgument, "checkpoint mismatch");

    const Grid coarse{setup.x_min, setup.x_max, (n - 1) / stride + 1};
    auto restrict_field = [&](const Field& f) {
        Field out(coarse);
        for (std::size_t i = 0; i < coarse.n; ++i) out[i] = f[i * stride];
        return out;
    };
    CrossRun run;
    run.times = coupled.times;
    for (std::size_t k = 0; k < coupled.times.size(); ++k) {
        const auto conv = convert_coordinates(Conversion::CartesianToPair, {}, cart.states[k], front);
        run.coupled.push_back({restrict_field(coupled.states[k].p), restrict_field(coupled.states[k].psi)});
        run.cartesian.push_back({restrict_field(conv.pair.p), restrict_field(conv.pair.psi)});
    }
    return run;
}

// Richardson step for an error expansion in even powers of h: (r fine - coarse) / (r - 1), r = 4^order.
void richardson(std::vector<StatePair>& coarse, const std::vector<StatePair>& fine, int order) {
    const double r = std::pow(4.0, order);
    for (std::size_t k = 0; k < coarse.size(); ++k)
        for (std::size_t i = 0; i < coarse[k].p.size(); ++i) {
            coarse[k].p[i] = (r * fine[k].p[i] - coarse[k].p[i]) / (r - 1.0);
            coarse[k].psi[i] = (r * fine[k].psi[i] - coarse[k].psi[i]) / (r - 1.0);
        }
}

}  // namespace

CrossModelResult cross_model_check(const CrossModelSetup& setup, std::uint64_t seed) {
    require(setup.n >= 3, ErrorCode::InvalidArgument, "cross-model grid too small");
    require(setup.levels >= 1 && setup.levels <= 4, ErrorCode::InvalidArgument, "levels must be in [1, 4]");
    // tableau[j] holds level j, extrapolated in place column by column
    std::vector<CrossRun> tableau;
    std::size_t stride = 1;
    for (int j = 0; j < setup.levels; ++j, stride *= 2) tableau.push_back(cross_run(setup, (setup.n - 1) * stride + 1, stride));
    for (int order = 1; order < setup.levels; ++order)
        for (int j = 0; j + order < setup.levels; ++j) {
            richardson(tableau[j].coupled, tableau[j + 1].coupled, order);
            richardson(tableau[j].cartesian, tableau[j + 1].cartesian, order);
        }
    const CrossRun& run = tableau.front();

    CrossModelResult res;
    for (std::size_t k = 1; k < run.times.size(); ++k) {
        res.times.push_back(run.times[k]);
        res.p_rel.push_back(rel_linf(run.cartesian[k].p.values, run.coupled[k].p.values));
        res.psi_rel.push_back(rel_linf(run.cartesian[k].psi.values, run.coupled[k].psi.values));
        res.max_rel = std::max({res.max_rel, res.p_rel.back(), res.psi_rel.back()});
    }

    const auto front = solve_critical_front(setup.x_min, setup.x_max, setup.n, setup.front_tol);
    const auto A0 =
        convert_coordinates(Conversion::PairToCartesian, theorem1_initial_data(setup.epsilon, front), {}, front).cartesian;
    // gauge orbit and real subspace on a short horizon
    NonlinearOptions short_opt;
    short_opt.dt = setup.dt;
    short_opt.checkpoint_ratio = 4.0;
    const double t_short = std::min(5.0, setup.T);
    const auto base = evolve_cartesian(A0, t_short, short_opt).states.back();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (int k = 0; k < 5; ++k) {
        const cplx rot = std::polar(1.0, angle(rng));
        const auto rotated = evolve_cartesian(rot * A0, t_short, short_opt).states.back();
        res.gauge_error = std::max(res.gauge_error, rel_linf(rotated.values, (rot * base).values));
    }
    Field real0(front.grid);
    for (std::size_t i = 0; i < real0.size(); ++i) real0[i] = std::abs(A0[i]);
    const auto real_run = evolve_cartesian(real0, t_short, short_opt);
    for (const auto& st : real_run.states)
        for (const auto& v : st.values) res.real_imag_max = std::max(res.real_imag_max, std::abs(v.imag()));
    return res;
}

}  // namespace glf
