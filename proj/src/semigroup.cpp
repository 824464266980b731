#include "semigroup.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "errors.hpp"
#include "parallel.hpp"
#include "ratefit.hpp"

namespace glf {

namespace {

constexpr double kCut = 36.0;  // rays end where e^{Re lambda t} drops by e^{-36}

struct GLTable {
    gsl_integration_glfixed_table* t;
    explicit GLTable(std::size_t n) : t(gsl_integration_glfixed_table_alloc(n)) {
        if (!t) fail(ErrorCode::InvalidArgument, "Gauss-Legendre table allocation failed");
    }
    ~GLTable() { gsl_integration_glfixed_table_free(t); }
    GLTable(const GLTable&) = delete;
    GLTable& operator=(const GLTable&) = delete;

    template <class Fn>
    void each(double a, double b, Fn&& fn) const {
        for (std::size_t i = 0; i < t->n; ++i) {
            double x = 0.0, w = 0.0;
            gsl_integration_glfixed_point(a, b, i, &x, &w, t);
            fn(x, w);
        }
    }
};

}  // namespace

void ContourSpec::validate() const {
    require(n_nodes >= 64, ErrorCode::InvalidArgument, "contour needs at least 64 nodes");
    require(arc_radius_scale > 0.0, ErrorCode::InvalidArgument, "arc radius scale must be positive");
    require(ray_angle > std::numbers::pi / 2 && ray_angle < std::numbers::pi, ErrorCode::InvalidArgument,
            "arc rays must point into the left half-plane");
    require(c > 0.0 && c < 0.25, ErrorCode::InvalidArgument,
            fmt::format("parabola coefficient {} must lie in (0, 1/4) to stay right of the left dispersion curve", c));
    require(delta > 0.0, ErrorCode::InvalidArgument, "parabola range must be positive");
    require(parabola_shift_scale >= 0.0, ErrorCode::InvalidArgument, "parabola shift must be non-negative");
    require(left_ray_angle > std::numbers::pi / 2 && left_ray_angle < std::numbers::pi, ErrorCode::InvalidArgument,
            "parabola rays must point into the left half-plane");
    // ray Re = -c d^2 - s (Im - d) stays right of Re = -Im^2 / 4
    const double s = -1.0 / std::tan(left_ray_angle);
    const double smax = delta / 2.0 + delta * std::sqrt(0.25 - c);
    require(s < smax, ErrorCode::InvalidArgument,
            fmt::format("parabola rays at angle {} cross the left dispersion curve", left_ray_angle));
}

std::vector<ContourNode> contour_nodes(const ContourSpec& spec, double t) {
    spec.validate();
    require(t > 0.0, ErrorCode::InvalidArgument, "contour time must be positive");
    const std::size_t n_mid = spec.n_nodes / 4;
    const std::size_t n_ray = (spec.n_nodes - n_mid) / 2;
    GLTable mid(n_mid), ray(n_ray);
    std::vector<ContourNode> out;
    out.reserve(n_mid + 2 * n_ray);
    const cplx I(0.0, 1.0);

    if (spec.kind == ContourKind::RightArcRays) {
        const double r0 = spec.arc_radius_scale / t;
        const double th = spec.ray_angle;
        const double R = r0 + kCut / (std::abs(std::cos(th)) * t);
        const cplx up = std::polar(1.0, th), down = std::polar(1.0, -th);
        ray.each(r0, R, [&](double r, double w) { out.push_back({r * down, -down * w}); });
        mid.each(-th, th, [&](double phi, double w) {
            const cplx lam = std::polar(r0, phi);
            out.push_back({lam, I * lam * w});
        });
        ray.each(r0, R, [&](double r, double w) { out.push_back({r * up, up * w}); });
        return out;
    }

    const double c = spec.c, d = spec.delta, al = spec.left_ray_angle;
    const double sigma = spec.parabola_shift_scale / t;
    const cplx p_up(sigma - c * d * d, d);
    const cplx up = std::polar(1.0, al), down = std::polar(1.0, -al);
    const double S = (kCut + sigma * t) / (std::abs(std::cos(al)) * t);
    ray.each(0.0, S, [&](double s, double w) { out.push_back({std::conj(p_up) + s * down, -down * w}); });
    // a = -+delta u^2 resolves the square-root branch point at lambda = 0
    GLTable half(std::max<std::size_t>(n_mid / 2, 1));
    auto parabola = [&](double sign) {
        half.each(0.0, 1.0, [&](double u, double w) {
            const double a = sign * d * u * u;
            out.push_back({cplx(sigma - c * a * a, a), (I - 2.0 * c * a) * (2.0 * d * u * w)});
        });
    };
    const std::size_t lower_end = out.size();
    parabola(-1.0);
    std::reverse(out.begin() + static_cast<std::ptrdiff_t>(lower_end), out.end());
    parabola(1.0);
    ray.each(0.0, S, [&](double s, double w) { out.push_back({p_up + s * up, up * w}); });
    return out;
}

namespace {

std::vector<cplx> integrate(const ResolventContext& ctx, const std::vector<ContourNode>& nodes, double t,
                            const Field& f, Component comp, unsigned jobs) {
    const std::size_t n = f.size();
    std::vector<std::vector<cplx>> parts(nodes.size());
    parallel_for(nodes.size(), jobs, [&](std::size_t k) {
        const auto& nd = nodes[k];
        const cplx fac = std::exp(nd.lambda * t) * nd.weight;
        if (std::abs(fac) == 0.0) return;
        const auto d = farfield_core_solve(ctx, std::sqrt(nd.lambda), f);
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx val = comp == Component::Left    ? d.left_part[i]
                             : comp == Component::Right ? d.right_part[i]
                                                        : d.solution[i];
            v[i] = fac * val;
        }
        parts[k] = std::move(v);
    });
    std::vector<cplx> sum(n, cplx{});
    for (const auto& p : parts)
        if (!p.empty())
            for (std::size_t i = 0; i < n; ++i) sum[i] += p[i];
    const cplx pref = -1.0 / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
    for (auto& v : sum) v *= pref;
    return sum;
}

std::vector<cplx> contour_once(const ResolventContext& ctx, const ContourSpec& spec, double t, const Field& f,
                               ContourSplit split, unsigned jobs) {
    if (split == ContourSplit::WholeResolvent) {
        require(ctx.kind == ResolventKind::Lp || spec.kind == ContourKind::LeftParabolaRays,
                ErrorCode::InvalidArgument, "the arc contour crosses the left dispersion curve of L_psi");
        return integrate(ctx, contour_nodes(spec, t), t, f, Component::Whole, jobs);
    }
    ContourSpec left = spec, right = spec;
    left.kind = ContourKind::LeftParabolaRays;
    right.kind = ContourKind::RightArcRays;
    auto u = integrate(ctx, contour_nodes(left, t), t, f, Component::Left, jobs);
    const auto r = integrate(ctx, contour_nodes(right, t), t, f, Component::Right, jobs);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += r[i];
    return u;
}

}  // namespace

ContourResult contour_apply(const ResolventContext& ctx, const ContourSpec& spec, double t, const Field& f,
                            ContourSplit split, unsigned jobs) {
    require_same_grid(f.grid, ctx.op.grid);
    ContourSpec fine = spec;
    fine.n_nodes = 2 * spec.n_nodes;
    auto u = contour_once(ctx, spec, t, f, split, jobs);
    const auto u2 = contour_once(ctx, fine, t, f, split, jobs);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        diff = std::max(diff, std::abs(u[i] - u2[i]));
        scale = std::max(scale, std::abs(u2[i]));
    }
    const double change = scale > 0.0 ? diff / scale : diff;
    if (change > 1e-3)
        fail(ErrorCode::QuadratureDivergence, fmt::format("node doubling changed the result by {:.3e}", change));
    return {Field(f.grid, std::move(u)), change};
}

const NormSeries& Trajectory::series(const std::string& label) const {
    for (const auto& s : norms)
        if (s.request.label == label) return s;
    fail(ErrorCode::MissingNorm, fmt::format("trajectory has no norm '{}'", label));
}

double evaluate_norm(const Field& u, const NormRequest& r) {
    if (r.derivative == 0) return weighted_norm(u, r.weight, r.kind);
    return weighted_norm(differentiate(u, r.derivative), r.weight, r.kind);
}

Trajectory evolve_linear(const DiscreteOperator& op, const Field& u0, double dt, double T,
                         const std::vector<NormRequest>& record, const EvolveOptions& opt) {
    require(dt > 0.0 && T >= dt, ErrorCode::InvalidArgument, "need dt > 0 and T >= dt");
    require_same_grid(u0.grid, op.grid);
    require(opt.checkpoint_ratio > 1.0, ErrorCode::InvalidArgument, "checkpoint ratio must exceed 1");
    const long n_steps = std::lround(T / dt);
    std::set<long> marks{n_steps};
    for (double tc = opt.first_checkpoint > 0.0 ? opt.first_checkpoint : dt; tc < T; tc *= opt.checkpoint_ratio)
        marks.insert(std::max(1L, std::lround(tc / dt)));
    for (double te : opt.extra_times) {
        require(te > 0.0 && te <= T + 0.5 * dt, ErrorCode::InvalidArgument, "extra time outside (0, T]");
        marks.insert(std::max(1L, std::lround(te / dt)));
    }

    Trajectory tr;
    for (const auto& r : record) tr.norms.push_back({r, {}});
    auto snapshot = [&](double t, const Field& u) {
        tr.times.push_back(t);
        for (auto& s : tr.norms) s.values.push_back(evaluate_norm(u, s.request));
        if (opt.store_fields) tr.fields.push_back(u);
    };

    Field u = u0;
    if (op.dirichlet_left()) u[0] = 0.0;
    if (op.dirichlet_right()) u[u.size() - 1] = 0.0;
    snapshot(0.0, u);
    ShiftedSolver implicit(op, 1.0, -0.5 * dt);
    std::vector<cplx> rhs(u.size());
    for (long k = 1; k <= n_steps; ++k) {
        const auto lu = op.apply(u.values);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = u[i] + 0.5 * dt * lu[i];
        implicit.solve_in_place(rhs);
        std::copy(rhs.begin(), rhs.end(), u.values.begin());
        if (marks.count(k)) snapshot(static_cast<double>(k) * dt, u);
    }
    return tr;
}

const char* decay_quantity_name(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::PW1infWeighted: return "p_W1inf_weighted";
        case DecayQuantity::PL1: return "p_L1";
        case DecayQuantity::PsiLinf: return "psi_Linf";
        case DecayQuantity::PsiLinfM10: return "psi_Linf_m10";
        case DecayQuantity::PsixL1: return "psix_L1";
        case DecayQuantity::PsixLinf: return "psix_Linf";
    }
    return "?";
}

std::vector<DecayQuantity> all_decay_quantities() {
    return {DecayQuantity::PW1infWeighted, DecayQuantity::PL1,    DecayQuantity::PsiLinf,
            DecayQuantity::PsiLinfM10,     DecayQuantity::PsixL1, DecayQuantity::PsixLinf};
}

DecayQuantity decay_quantity_from_name(const std::string& name) {
    for (auto q : all_decay_quantities())
        if (name == decay_quantity_name(q)) return q;
    fail(ErrorCode::InvalidArgument, fmt::format("unknown decay experiment '{}'", name));
}

double decay_target(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::PW1infWeighted: return -1.5;
        case DecayQuantity::PsiLinfM10:
        case DecayQuantity::PsixLinf: return -1.0;
        default: return -0.5;
    }
}

double decay_tolerance(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::PW1infWeighted:
        case DecayQuantity::PsiLinfM10:
        case DecayQuantity::PsixLinf: return 0.15;
        default: return 0.1;
    }
}

NormRequest decay_norm(DecayQuantity q) {
    const std::string label = decay_quantity_name(q);
    switch (q) {
        case DecayQuantity::PW1infWeighted: return {label, WeightSpec::alg(0.0, -1.0), NormKind::W1inf, 0};
        case DecayQuantity::PL1: return {label, WeightSpec::unit(), NormKind::L1, 0};
        case DecayQuantity::PsiLinf: return {label, WeightSpec::unit(), NormKind::Linf, 0};
        case DecayQuantity::PsiLinfM10: return {label, WeightSpec::alg(-1.0, 0.0), NormKind::Linf, 0};
        case DecayQuantity::PsixL1: return {label, WeightSpec::unit(), NormKind::L1, 1};
        case DecayQuantity::PsixLinf: return {label, WeightSpec::unit(), NormKind::Linf, 1};
    }
    return {};
}

bool decay_uses_p(DecayQuantity q) { return q == DecayQuantity::PW1infWeighted || q == DecayQuantity::PL1; }

DecayReport make_decay_report(DecayQuantity q, const std::vector<double>& times, const std::vector<double>& values,
                              Interval window) {
    DecayReport rep;
    rep.quantity = decay_quantity_name(q);
    rep.target = decay_target(q);
    rep.tolerance = decay_tolerance(q);
    rep.window = window;
    rep.times = times;
    rep.values = values;
    std::size_t inside = 0;
    for (double t : times) inside += (t >= window.lo && t <= window.hi) ? 1 : 0;
    if (inside < 5)
        fail(ErrorCode::FitWindowTooShort,
             fmt::format("{} checkpoints inside [{}, {}], need 5", inside, window.lo, window.hi));
    const auto fit = fit_power_law(times, values, window);
    rep.exponent = fit.exponent;
    rep.stderr_ = fit.stderr_;
    rep.pass = std::abs(fit.exponent - rep.target) <= rep.tolerance;
    return rep;
}

std::vector<DecayReport> linear_decay_suite(const std::vector<DecayQuantity>& qs, const DecaySetup& setup) {
    const Grid g = extend_left(setup.x_min, setup.x_max, setup.n, setup.left_extension);
    const auto front = solve_critical_front(g.x_min, g.x_max, g.n, setup.front_tol);
    const Field u0 = Field::sample(front.grid, [](double x) { return cplx(std::exp(-x * x)); });
    std::vector<NormRequest> p_req, psi_req;
    for (auto q : qs) (decay_uses_p(q) ? p_req : psi_req).push_back(decay_norm(q));

    std::vector<Trajectory> tr(2);
    parallel_for(2, setup.jobs, [&](std::size_t k) {
        const auto& req = k == 0 ? p_req : psi_req;
        if (req.empty()) return;
        const auto kind = k == 0 ? OperatorKind::Lp : OperatorKind::Lpsi;
        const auto op = assemble_operator(kind, front, front.grid, default_closure(kind));
        tr[k] = evolve_linear(op, u0, setup.dt, setup.T, req);
    });

    std::vector<DecayReport> out;
    for (auto q : qs) {
        const auto& t = tr[decay_uses_p(q) ? 0 : 1];
        out.push_back(make_decay_report(q, t.times, t.series(decay_quantity_name(q)).values, setup.window));
    }
    return out;
}

DecayReport linear_decay_experiment(DecayQuantity q, const DecaySetup& setup) {
    return linear_decay_suite({q}, setup).front();
}

namespace {

struct SmallTimeRun {
    std::vector<double> times;
    std::vector<double> sup;
    std::vector<double> w1;
};

SmallTimeRun small_time_run(const DiscreteOperator& op, const Field& f, double dt) {
    EvolveOptions opt;
    opt.first_checkpoint = 0.01;
    opt.checkpoint_ratio = 1.25;
    const std::vector<NormRequest> req{{"sup", WeightSpec::unit(), NormKind::Linf, 0},
                                       {"w1", WeightSpec::unit(), NormKind::W1inf, 0}};
    auto tr = evolve_linear(op, f, dt, 0.5, req, opt);
    return {tr.times, tr.series("sup").values, tr.series("w1").values};
}

double w1_constant(OperatorKind kind, const FrontProfile& front, double dt) {
    const auto op = assemble_operator(kind, front, front.grid, default_closure(kind));
    const Field smooth = Field::sample(front.grid, [](double x) { return cplx(std::exp(-x * x / 4.0)); });
    const auto run = small_time_run(op, smooth, dt);
    double c = 0.0;
    for (double v : run.w1) c = std::max(c, v / run.w1.front());
    return c;
}

}  // namespace

SmallTimeReport small_time_suite(OperatorKind kind, const FrontProfile& front, double dt) {
    const Grid& g = front.grid;
    const auto op = assemble_operator(kind, front, g, default_closure(kind));
    const double width = 4.0 * g.h();
    const Field narrow = Field::sample(g, [width](double x) { return cplx(std::exp(-x * x / (width * width))); });
    const double l1 = weighted_norm(narrow, WeightSpec::unit(), NormKind::L1);

    SmallTimeReport rep;
    const auto run = small_time_run(op, narrow, dt);
    std::vector<double> ts, vs;
    for (std::size_t i = 1; i < run.times.size(); ++i) {
        const double t = run.times[i];
        rep.sup_constant = std::max(rep.sup_constant, std::sqrt(t) * run.sup[i] / l1);
        ts.push_back(t);
        vs.push_back(run.sup[i]);
    }
    rep.sup_slope = fit_power_law(ts, vs, {0.01 * (1 - 1e-9), 0.5 * (1 + 1e-9)}).exponent;

    rep.w1_constant = w1_constant(kind, front, dt);
    const auto fine = solve_critical_front(g.x_min, g.x_max, 2 * g.n - 1, 1e-8);
    rep.w1_constant_refined = w1_constant(kind, fine, dt);

    const auto zero = evolve_linear(op, Field(g), dt, 0.5, {{"sup", WeightSpec::unit(), NormKind::Linf, 0}});
    for (double v : zero.series("sup").values) rep.zero_max = std::max(rep.zero_max, v);

    rep.pass = rep.sup_slope >= -0.6 && rep.w1_constant <= 3.0 && rep.w1_constant_refined <= 3.0 &&
               std::abs(rep.w1_constant_refined - rep.w1_constant) <= 0.1 * rep.w1_constant && rep.zero_max == 0.0;
    return rep;
}

}  // namespace glf
