#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "errors.hpp"
#include "front.hpp"
#include "nonlinear.hpp"
#include "operators.hpp"
#include "parallel.hpp"
#include "ratefit.hpp"
#include "report.hpp"
#include "resolvent.hpp"
#include "semigroup.hpp"

namespace glf {

double CriterionResult::value(const std::string& key) const {
    for (const auto& m : measured)
        if (m.key == key) return m.value;
    fail(ErrorCode::InvalidArgument, fmt::format("criterion {} has no measurement '{}'", id, key));
}

bool ExperimentReport::all_pass() const {
    return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Ctx {
    const ExperimentConfig& cfg;
    std::string dir;
    std::vector<std::string> files;
    std::mutex mu;

    std::string path(const std::string& name) {
        std::lock_guard lock(mu);
        files.push_back(name);
        return (std::filesystem::path(dir) / name).string();
    }
    bool csv() const { return cfg.output.csv; }
    bool svg() const { return cfg.output.svg; }
};

CriterionResult make(int id, const char* title, double limit) {
    CriterionResult c;
    c.id = id;
    c.title = title;
    c.runtime_limit = limit;
    return c;
}

void finish(CriterionResult& c, bool numeric_pass, Clock::time_point t0) {
    c.seconds = since(t0);
    c.measured.push_back({"seconds", c.seconds});
    c.pass = numeric_pass && c.seconds <= c.runtime_limit;
}

std::vector<double> geometric(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1));
    return v;
}

double rel_linf(std::span<const cplx> a, std::span<const cplx> b) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(b[i]));
    }
    return m > 0.0 ? d / m : d;
}

// ---------------------------------------------------------------- front

std::vector<CriterionResult> run_front(Ctx& ctx) {
    const auto& fc = ctx.cfg.front;
    auto c = make(1, "front residual and wake rate", 10.0);
    const auto t0 = Clock::now();
    const auto f = solve_critical_front(fc.x_min, fc.x_max, fc.n, fc.tol);
    const auto a = fit_front_asymptotics(f, default_edge_window(f.grid), default_wake_window(f.grid));
    const double target = std::sqrt(2.0) - 1.0;
    c.measured = {{"front_residual", f.residual}, {"wake_rate", a.wake_rate},     {"wake_target", target},
                  {"wake_error", std::abs(a.wake_rate - target)}, {"edge_rate", a.edge_rate}, {"edge_a", a.a},
                  {"edge_b", a.b},              {"newton_iterations", static_cast<double>(f.iterations)}};
    finish(c, f.residual <= 1e-8 && std::abs(a.wake_rate - target) <= 1e-2, t0);

    if (ctx.csv()) {
        CsvWriter w(ctx.path("front.csv"), {"x", "q", "qprime"});
        for (std::size_t i = 0; i < f.grid.n; ++i) w.row({f.grid.x(i), f.q[i], f.qprime[i]});
    }
    if (ctx.svg()) {
        PlotSeries q{"q", f.grid.nodes(), f.q}, one{"1 - q", f.grid.nodes(), {}};
        for (double v : f.q) one.y.push_back(1.0 - v);
        write_svg(ctx.path("front.svg"), {"critical front", "x", "value", false, true, {q, one}});
    }
    return {c};
}

// ---------------------------------------------------------------- spectrum

std::vector<CriterionResult> run_spectrum(Ctx& ctx) {
    const auto& sc = ctx.cfg.spectrum;
    auto c2 = make(2, "no unstable eigenvalues of weighted L_p, L_psi", 120.0);
    auto t0 = Clock::now();
    const auto f = solve_critical_front(sc.x_min, sc.x_max, sc.n, sc.front_tol);
    struct Spec {
        const char* name;
        OperatorKind kind;
        std::vector<cplx> ev;
    };
    std::vector<Spec> specs{{"Lp", OperatorKind::Lp, {}}, {"Lpsi", OperatorKind::Lpsi, {}}};
    parallel_for(specs.size(), ctx.cfg.run.jobs, [&](std::size_t k) {
        const auto op = assemble_operator(specs[k].kind, f, f.grid, BoundaryClosure::dirichlet());
        specs[k].ev = eigenvalues(op);
        std::sort(specs[k].ev.begin(), specs[k].ev.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
        });
    });
    bool ok2 = true;
    for (const auto& s : specs) {
        double max_re = -std::numeric_limits<double>::infinity();
        std::size_t above = 0;
        for (cplx l : s.ev) {
            max_re = std::max(max_re, l.real());
            above += l.real() > sc.halfplane_cut ? 1 : 0;
        }
        c2.measured.push_back({fmt::format("{}_max_re", s.name), max_re});
        c2.measured.push_back({fmt::format("{}_count_above_cut", s.name), static_cast<double>(above)});
        ok2 = ok2 && above == 0;
    }
    finish(c2, ok2, t0);

    auto c3 = make(3, "dispersion curves and Fredholm index", 1.0);
    t0 = Clock::now();
    struct Curve {
        const char* name;
        DispersionCurve curve;
        std::vector<OperatorKind> limits;
    };
    const std::vector<Curve> curves{
        {"sigma_plus", DispersionCurve::SigmaPlus, {OperatorKind::LpPlus, OperatorKind::LpsiPlus}},
        {"sigma_p_minus", DispersionCurve::SigmaPMinus, {OperatorKind::LpMinus}},
        {"sigma_psi_minus", DispersionCurve::SigmaPsiMinus, {OperatorKind::LpsiMinus}}};
    const Grid small(-1.0, 1.0, 5);
    double dev = 0.0;
    std::vector<double> ks(sc.k_samples);
    for (std::size_t i = 0; i < ks.size(); ++i)
        ks[i] = -sc.k_max + 2.0 * sc.k_max * static_cast<double>(i) / static_cast<double>(ks.size() - 1);
    std::vector<std::vector<cplx>> curve_vals(curves.size());
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        for (double k : ks) curve_vals[ci].push_back(dispersion(curves[ci].curve, k));
        for (auto lk : curves[ci].limits) {
            const auto op = assemble_limit_operator(lk, small, BoundaryClosure::dirichlet());
            const double a = op.adv[2], b = op.pot[2];
            for (std::size_t i = 0; i < ks.size(); ++i) {
                const cplx symbol(-ks[i] * ks[i] + b, a * ks[i]);
                dev = std::max(dev, std::abs(curve_vals[ci][i] - symbol) / (1.0 + ks[i] * ks[i]));
            }
        }
    }
    const int index = fredholm_index(OperatorKind::Lpsi, sc.fredholm_eta);
    c3.measured = {{"max_symbol_deviation", dev},
                   {"fredholm_index_Lpsi", static_cast<double>(index)},
                   {"fredholm_eta", sc.fredholm_eta}};
    finish(c3, dev <= 1e-14 && index == -2, t0);

    if (ctx.csv()) {
        CsvWriter w(ctx.path("eigenvalues.csv"), {"operator", "re", "im"});
        for (const auto& s : specs)
            for (cplx l : s.ev) w.row({std::string(s.name), l.real(), l.imag()});
        CsvWriter d(ctx.path("dispersion.csv"), {"curve", "k", "re", "im"});
        for (std::size_t ci = 0; ci < curves.size(); ++ci)
            for (std::size_t i = 0; i < ks.size(); ++i)
                d.row({std::string(curves[ci].name), ks[i], curve_vals[ci][i].real(), curve_vals[ci][i].imag()});
    }
    if (ctx.svg()) {
        PlotSpec p{"weighted spectra and dispersion curves", "Re lambda", "Im lambda", false, false, {}};
        for (const auto& s : specs) {
            PlotSeries ser{fmt::format("{} eigenvalues", s.name), {}, {}, true};
            for (cplx l : s.ev)
                if (l.real() > -6.0 && std::abs(l.imag()) < 12.0) {
                    ser.x.push_back(l.real());
                    ser.y.push_back(l.imag());
                }
            p.series.push_back(ser);
        }
        for (std::size_t ci = 0; ci < curves.size(); ++ci) {
            PlotSeries ser{curves[ci].name, {}, {}};
            for (cplx l : curve_vals[ci])
                if (l.real() > -6.0 && std::abs(l.imag()) < 12.0) {
                    ser.x.push_back(l.real());
                    ser.y.push_back(l.imag());
                }
            p.series.push_back(ser);
        }
        write_svg(ctx.path("spectrum.svg"), p);
    }
    return {c2, c3};
}

// ---------------------------------------------------------------- resolvent

Field random_data(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> center(-20.0, 20.0), width(0.5, 3.0), amp(-1.0, 1.0);
    std::uniform_int_distribution<int> count(1, 3);
    const int m = count(rng);
    std::vector<std::tuple<double, double, cplx>> bumps;
    for (int k = 0; k < m; ++k) {
        const double c = center(rng), w = width(rng);
        const double re = amp(rng), im = amp(rng);
        bumps.emplace_back(c, w, cplx(re, im));
    }
    return Field::sample(g, [&](double x) {
        cplx s{};
        for (const auto& [c, w, a] : bumps) s += a * std::exp(-(x - c) * (x - c) / (w * w));
        return s;
    });
}

std::vector<CriterionResult> run_resolvent(Ctx& ctx) {
    const auto& rc = ctx.cfg.resolvent;
    auto c4 = make(4, "resolvent probe slopes", 300.0);
    auto t0 = Clock::now();
    const auto fr = solve_critical_front(rc.x_min, rc.x_max, rc.n, rc.front_tol);
    const auto rp = ResolventContext::make(ResolventKind::Lp, fr);
    const auto rpsi = ResolventContext::make(ResolventKind::Lpsi, fr);
    const Field bump = Field::sample(fr.grid, [](double x) { return cplx(std::exp(-x * x)); });
    struct Probe {
        const char* name;
        const ResolventContext* ctx;
        ProbeMode mode;
        Component comp;
        NormKind norm;
        WeightSpec weight;
        double target;
        std::vector<ProbePoint> pts;
        double slope = 0.0;
    };
    std::vector<Probe> probes{
        {"Lp_L1", &rp, ProbeMode::Raw, Component::Whole, NormKind::L1, WeightSpec::unit(), -1.0, {}},
        {"Lp_W1inf_lipschitz", &rp, ProbeMode::DifferenceFromLimit, Component::Whole, NormKind::W1inf,
         WeightSpec::alg(0.0, -1.0), 1.0, {}},
        {"Lpsi_left_Linf", &rpsi, ProbeMode::Raw, Component::Left, NormKind::Linf, WeightSpec::unit(), 0.0, {}}};
    const auto samples = geometric(rc.gamma_range.lo, rc.gamma_range.hi, rc.gamma_samples);
    bool ok4 = true;
    for (auto& p : probes) {
        ProbeSpec spec;
        spec.ray = {RayKind::RightCone, 0.0};
        spec.samples = samples;
        spec.norm = p.norm;
        spec.component = p.comp;
        spec.mode = p.mode;
        spec.weight = p.weight;
        spec.gamma_ref = rc.gamma_ref;
        spec.jobs = ctx.cfg.run.jobs;
        p.pts = resolvent_norm_probe(*p.ctx, bump, spec);
        std::vector<double> t, v;
        for (const auto& q : p.pts) {
            t.push_back(q.abs_gamma);
            v.push_back(q.value);
        }
        p.slope = fit_power_law(t, v, {rc.gamma_range.lo * (1 - 1e-12), rc.gamma_range.hi * (1 + 1e-12)}).exponent;
        c4.measured.push_back({fmt::format("{}_slope", p.name), p.slope});
        ok4 = ok4 && std::abs(p.slope - p.target) <= 0.1;
    }
    finish(c4, ok4, t0);

    auto c5 = make(5, "far-field/core reassembly residual", 120.0);
    t0 = Clock::now();
    std::mt19937_64 rng(ctx.cfg.run.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    struct Case {
        const char* op;
        cplx gamma;
        double residual;
    };
    std::vector<Case> cases;
    double worst = 0.0;
    for (std::size_t k = 0; k < rc.reassembly_cases; ++k) {
        cplx g{};
        if (k > 0) {
            const double r = rc.delta * std::sqrt(u01(rng));
            const double th = std::numbers::pi * (u01(rng) - 0.5);
            g = std::polar(r, th);
        }
        const Field f = random_data(fr.grid, rng);
        const bool psi = k % 2 == 0;
        const auto d = farfield_core_solve(psi ? rpsi : rp, g, f);
        cases.push_back({psi ? "Lpsi" : "Lp", g, d.residual});
        worst = std::max(worst, d.residual);
    }
    c5.measured = {{"max_residual", worst},
                   {"cases", static_cast<double>(cases.size())},
                   {"includes_gamma_zero", !cases.empty() && cases.front().gamma == cplx{} ? 1.0 : 0.0}};
    finish(c5, worst <= 1e-6, t0);

    if (ctx.csv()) {
        CsvWriter w(ctx.path("probe.csv"), {"probe", "abs_gamma", "gamma_re", "gamma_im", "value"});
        for (const auto& p : probes)
            for (const auto& q : p.pts) w.row({std::string(p.name), q.abs_gamma, q.gamma.real(), q.gamma.imag(), q.value});
        CsvWriter r(ctx.path("reassembly.csv"), {"case", "operator", "gamma_re", "gamma_im", "residual"});
        for (std::size_t k = 0; k < cases.size(); ++k)
            r.row({static_cast<long long>(k), std::string(cases[k].op), cases[k].gamma.real(), cases[k].gamma.imag(),
                   cases[k].residual});
    }
    if (ctx.svg()) {
        PlotSpec p{"resolvent norm probes", "|gamma|", "norm", true, true, {}};
        for (const auto& pr : probes) {
            PlotSeries s{pr.name, {}, {}, true};
            for (const auto& q : pr.pts) {
                s.x.push_back(q.abs_gamma);
                s.y.push_back(q.value);
            }
            p.series.push_back(s);
        }
        write_svg(ctx.path("probe.svg"), p);
    }
    return {c4, c5};
}

// ---------------------------------------------------------------- linear decay

std::vector<CriterionResult> run_linear_decay(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& sg = cfg.semigroup;
    auto c6 = make(6, "contour quadrature vs time stepping", 300.0);
    auto t0 = Clock::now();
    const auto fr = solve_critical_front(sg.x_min, sg.x_max, sg.n, sg.front_tol);
    const Field g0 = Field::sample(fr.grid, [](double x) { return cplx(std::exp(-x * x)); });
    struct Row {
        std::string op;
        double t, discrepancy, doubling;
    };
    std::vector<Row> rows;
    double worst = 0.0, worst_doubling = 0.0;
    for (auto rk : {ResolventKind::Lp, ResolventKind::Lpsi}) {
        const bool is_p = rk == ResolventKind::Lp;
        const auto kind = is_p ? OperatorKind::Lp : OperatorKind::Lpsi;
        const auto rctx = ResolventContext::make(rk, fr);
        const auto op = assemble_operator(kind, fr, fr.grid, default_closure(kind));
        EvolveOptions opt;
        opt.extra_times = sg.times;
        opt.store_fields = true;
        const double T = *std::max_element(sg.times.begin(), sg.times.end());
        const auto tr = evolve_linear(op, g0, sg.dt, T, {}, opt);
        ContourSpec spec = cfg.contour;
        if (!is_p) spec.kind = ContourKind::LeftParabolaRays;
        for (double t : sg.times) {
            const auto it = std::find_if(tr.times.begin(), tr.times.end(), [&](double s) { return std::abs(s - t) < 1e-9 * T; });
            require(it != tr.times.end(), ErrorCode::InvalidArgument, fmt::format("time {} is not a checkpoint", t));
            const auto& stepped = tr.fields[static_cast<std::size_t>(it - tr.times.begin())];
            const auto r = contour_apply(rctx, spec, t, g0, ContourSplit::WholeResolvent, cfg.run.jobs);
            const double d = rel_linf(r.u.values, stepped.values);
            rows.push_back({is_p ? "Lp" : "Lpsi", t, d, r.doubling_change});
            worst = std::max(worst, d);
            worst_doubling = std::max(worst_doubling, r.doubling_change);
            c6.measured.push_back({fmt::format("{}_t{}_discrepancy", is_p ? "Lp" : "Lpsi", t), d});
        }
    }
    c6.measured.push_back({"max_discrepancy", worst});
    c6.measured.push_back({"max_doubling_change", worst_doubling});
    finish(c6, worst <= 1e-3 && worst_doubling <= 1e-4, t0);

    auto c7 = make(7, "linear decay exponents", 900.0);
    t0 = Clock::now();
    std::vector<DecayQuantity> qs;
    for (const auto& n : cfg.decay_quantities) qs.push_back(decay_quantity_from_name(n));
    DecaySetup ds = cfg.decay;
    ds.jobs = cfg.run.jobs;
    const auto reps = linear_decay_suite(qs, ds);
    bool ok7 = !reps.empty();
    for (const auto& r : reps) {
        c7.measured.push_back({r.quantity + "_exponent", r.exponent});
        ok7 = ok7 && r.pass;
    }
    finish(c7, ok7 && reps.size() == all_decay_quantities().size(), t0);

    if (ctx.csv()) {
        CsvWriter w(ctx.path("contour.csv"), {"operator", "t", "discrepancy", "doubling_change"});
        for (const auto& r : rows) w.row({r.op, r.t, r.discrepancy, r.doubling});
        CsvWriter d(ctx.path("decay.csv"), {"quantity", "t", "value"});
        for (const auto& r : reps)
            for (std::size_t i = 0; i < r.times.size(); ++i) d.row({r.quantity, r.times[i], r.values[i]});
        CsvWriter fit(ctx.path("decay_fits.csv"),
                      {"quantity", "exponent", "stderr", "target", "tolerance", "window_lo", "window_hi", "pass"});
        for (const auto& r : reps)
            fit.row({r.quantity, r.exponent, r.stderr_, r.target, r.tolerance, r.window.lo, r.window.hi,
                     static_cast<long long>(r.pass)});
    }
    if (ctx.svg()) {
        PlotSpec p{"linear decay", "t", "norm", true, true, {}};
        for (const auto& r : reps) {
            PlotSeries s{r.quantity, {}, {}};
            for (std::size_t i = 0; i < r.times.size(); ++i)
                if (r.times[i] > 0.0) {
                    s.x.push_back(r.times[i]);
                    s.y.push_back(r.values[i]);
                }
            p.series.push_back(s);
        }
        write_svg(ctx.path("decay.svg"), p);
    }
    return {c6, c7};
}

// ---------------------------------------------------------------- nonlinear

std::vector<CriterionResult> run_nonlinear(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    auto c8 = make(8, "nonlinear stability at small epsilon", 1800.0);
    auto t0 = Clock::now();
    const auto res = theorem1_experiment(cfg.nonlinear);
    c8.measured = {{"amplitude_exponent", res.amplitude.exponent},
                   {"phase_exponent", res.phase.exponent},
                   {"guard_max", res.guard_max},
                   {"theta_T", res.theta_T},
                   {"theta_half_T", res.theta_half},
                   {"saturation", res.saturation},
                   {"steps", static_cast<double>(res.trajectory.steps)},
                   {"rejected_steps", static_cast<double>(res.trajectory.rejected)}};
    finish(c8,
           std::abs(res.amplitude.exponent + 1.5) <= 0.2 && std::abs(res.phase.exponent + 0.5) <= 0.1 && res.guard_ok &&
               res.saturation <= 1.05,
           t0);

    auto c9 = make(9, "coupled vs Cartesian evolution", 600.0);
    t0 = Clock::now();
    const auto cm = cross_model_check(cfg.crossmodel, cfg.run.seed);
    c9.measured = {{"max_relative_discrepancy", cm.max_rel},
                   {"gauge_error", cm.gauge_error},
                   {"real_subspace_imag_max", cm.real_imag_max}};
    finish(c9, cm.max_rel <= 1e-4 && cm.gauge_error <= 1e-12 && cm.real_imag_max <= 1e-12, t0);

    const auto& tr = res.trajectory;
    if (ctx.csv()) {
        std::vector<std::string> header{"t", "theta", "amplitude", "phase"};
        for (const auto& l : theta_labels()) header.push_back(l);
        CsvWriter w(ctx.path("theorem1.csv"), header);
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            std::vector<CsvWriter::Cell> row{tr.times[i], tr.theta[i], tr.series("amplitude").values[i],
                                             tr.series("phase").values[i]};
            for (const auto& l : theta_labels()) row.push_back(tr.series(l).values[i]);
            w.row(row);
        }
        CsvWriter c(ctx.path("crossmodel.csv"), {"t", "p_rel", "psi_rel"});
        for (std::size_t i = 0; i < cm.times.size(); ++i) c.row({cm.times[i], cm.p_rel[i], cm.psi_rel[i]});
    }
    if (ctx.svg()) {
        PlotSpec p{"nonlinear decay", "t", "norm", true, true, {}};
        for (const char* l : {"amplitude", "phase"}) {
            PlotSeries s{l, {}, {}};
            for (std::size_t i = 1; i < tr.times.size(); ++i) {
                s.x.push_back(tr.times[i]);
                s.y.push_back(tr.series(l).values[i]);
            }
            p.series.push_back(s);
        }
        PlotSeries th{"Theta", {}, {}};
        for (std::size_t i = 1; i < tr.times.size(); ++i) {
            th.x.push_back(tr.times[i]);
            th.y.push_back(tr.theta[i]);
        }
        p.series.push_back(th);
        write_svg(ctx.path("theorem1.svg"), p);
        PlotSpec q{"coupled vs Cartesian", "t", "relative discrepancy", true, true,
                   {{"p", cm.times, cm.p_rel, true}, {"psi", cm.times, cm.psi_rel, true}}};
        write_svg(ctx.path("crossmodel.svg"), q);
    }
    return {c8, c9};
}

// ---------------------------------------------------------------- properties

struct PropertyTally {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double max_error = 0.0;

    void record(double err, double tol) {
        ++cases;
        max_error = std::max(max_error, err);
        if (!(err <= tol)) ++failures;
    }
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentReport run_named(const ExperimentConfig& cfg, const std::string& name, const std::string& out_dir, bool nested);

std::vector<CriterionResult> run_properties(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    auto c = make(10, "randomized property suites", 120.0);
    const auto t0 = Clock::now();
    const std::size_t N = cfg.properties.cases;
    std::mt19937_64 rng(cfg.run.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * u01(rng); };
    std::vector<PropertyTally> tallies;

    {
        PropertyTally t{"vieta_nu_pm"};
        for (std::size_t k = 0; k < N; ++k) {
            const cplx lambda(uni(-10, 10), uni(-10, 10));
            for (double c0 : {0.0, -2.0}) {
                const auto r = nu_pm(lambda, c0);
                const double scale = 1.0 + std::abs(lambda);
                t.record(std::max(std::abs(r.nu_plus + r.nu_minus + 2.0), std::abs(r.nu_plus * r.nu_minus - (c0 - lambda))) /
                             scale,
                         1e-12);
            }
        }
        tallies.push_back(t);
    }
    {
        // G_odd is the odd image construction of the free kernel e^{-g|z|}/(2g) on x, y >= 0
        PropertyTally odd{"G_odd_oddness"}, sym{"G_odd_symmetry"};
        for (std::size_t k = 0; k < N; ++k) {
            const cplx g = std::polar(std::pow(10.0, uni(-3, 0.7)), uni(-1.1, 1.1));
            const double x = k % 10 == 0 ? 0.0 : uni(0, 30), y = uni(0, 30);
            const cplx gxy = kernel_G_odd(g, x, y);
            const cplx direct = std::exp(-g * std::abs(x - y)) / (2.0 * g);
            const cplx image = std::exp(-g * (x + y)) / (2.0 * g);
            const double scale = std::max({std::abs(direct), std::abs(image), 1e-300});
            odd.record(std::abs(gxy - (direct - image)) / scale, 1e-12);
            sym.record(std::abs(kernel_G_odd(g, y, x) - gxy) / scale, 1e-12);
        }
        tallies.push_back(odd);
        tallies.push_back(sym);
    }
    {
        PropertyTally t{"G_minus_piecewise_rates"};
        for (std::size_t k = 0; k < N; ++k) {
            const double c0 = k % 2 ? -2.0 : 0.0;
            const cplx lambda(uni(0.01, 5.0) + c0 * 0.0, uni(-5, 5));
            const auto r = nu_pm(lambda, c0);
            const double d = uni(0.01, 1.0);
            const double x = uni(0.0, 10.0);
            const double xl = -uni(0.0, 10.0) - d;
            const cplx right = kernel_G_minus(lambda, x + d, c0) / kernel_G_minus(lambda, x, c0);
            const cplx left = kernel_G_minus(lambda, xl + d, c0) / kernel_G_minus(lambda, xl, c0);
            const double e1 = std::abs(right - std::exp(r.nu_minus * d)) / std::abs(std::exp(r.nu_minus * d));
            const double e2 = std::abs(left - std::exp(r.nu_plus * d)) / std::abs(std::exp(r.nu_plus * d));
            t.record(std::max(e1, e2), 1e-10);
        }
        tallies.push_back(t);
    }
    {
        PropertyTally t{"weight_exact_outside_unit_interval"};
        for (std::size_t k = 0; k < N; ++k) {
            const double side = u01(rng) < 0.5 ? -1.0 : 1.0;
            const double x = side * uni(1.0, 40.0);
            const double lo = uni(-1.5, 1.5), hi = uni(-1.5, 1.5);
            WeightSpec spec;
            double exact = 0.0, dexact = 0.0;
            switch (k % 3) {
                case 0:
                    spec = WeightSpec::omega();
                    exact = x >= 1.0 ? std::exp(x) : 1.0;
                    dexact = x >= 1.0 ? std::exp(x) : 0.0;
                    break;
                case 1: {
                    spec = WeightSpec::exp_general(lo, hi);
                    const double eta = x >= 1.0 ? hi : lo;
                    exact = std::exp(eta * x);
                    dexact = eta * exact;
                    break;
                }
                default: {
                    spec = WeightSpec::alg(lo, hi);
                    const double r = x >= 1.0 ? hi : lo;
                    exact = std::pow(1.0 + x * x, r / 2.0);
                    dexact = r * x * std::pow(1.0 + x * x, r / 2.0 - 1.0);
                    break;
                }
            }
            const auto w = eval_weight(spec, x);
            t.record(std::max(std::abs(w.w - exact) / exact, std::abs(w.dw - dexact) / (std::abs(exact) + std::abs(dexact))),
                     1e-13);
        }
        tallies.push_back(t);
    }
    {
        PropertyTally hom{"norm_homogeneity"}, mono{"norm_monotonicity"};
        const Grid g(-10.0, 10.0, 101);
        const std::vector<WeightSpec> ws{WeightSpec::unit(), WeightSpec::omega(), WeightSpec::alg(0.0, -1.0),
                                         WeightSpec::alg(-1.0, 0.0), WeightSpec::exp_general(0.2, -0.3)};
        for (std::size_t k = 0; k < N; ++k) {
            Field f(g), big(g);
            for (std::size_t i = 0; i < g.n; ++i) {
                f[i] = cplx(uni(-1, 1), uni(-1, 1));
                big[i] = f[i] * (1.0 + uni(0.0, 2.0));
            }
            const cplx a(uni(-5, 5), uni(-5, 5));
            const auto& w = ws[k % ws.size()];
            for (auto nk : {NormKind::L1, NormKind::Linf, NormKind::W11, NormKind::W1inf}) {
                const double n1 = weighted_norm(a * f, w, nk), n0 = weighted_norm(f, w, nk);
                hom.record(std::abs(n1 - std::abs(a) * n0) / std::max(n1, 1e-300), 1e-12);
            }
            for (auto nk : {NormKind::L1, NormKind::Linf}) {
                const double nf = weighted_norm(f, w, nk), nb = weighted_norm(big, w, nk);
                mono.record(nf <= nb * (1.0 + 1e-15) ? 0.0 : (nf - nb) / nb, 0.0);
            }
        }
        tallies.push_back(hom);
        tallies.push_back(mono);
    }
    {
        PropertyTally t{"semigroup_composition"};
        const auto fr = solve_critical_front(-40.0, 40.0, 801, 1e-10);
        const auto op_p = assemble_operator(OperatorKind::Lp, fr, fr.grid, default_closure(OperatorKind::Lp));
        const auto op_s = assemble_operator(OperatorKind::Lpsi, fr, fr.grid, default_closure(OperatorKind::Lpsi));
        const double dt = 0.01;
        std::uniform_int_distribution<int> steps(1, 30);
        for (std::size_t k = 0; k < N; ++k) {
            const auto& op = k % 2 ? op_p : op_s;
            const double c0 = uni(-5, 5);
            Field u0 = Field::sample(fr.grid, [c0](double x) { return cplx(std::exp(-(x - c0) * (x - c0))); });
            u0[0] = 0.0;
            u0[u0.size() - 1] = 0.0;
            const int a = steps(rng), b = steps(rng);
            auto final_field = [&](const Field& f, int m) {
                EvolveOptions opt;
                opt.checkpoint_ratio = 1e9;
                opt.store_fields = true;
                return evolve_linear(op, f, dt, m * dt, {}, opt).fields.back();
            };
            const auto direct = final_field(u0, a + b);
            const auto composed = final_field(final_field(u0, a), b);
            // a run that never moved the data would satisfy composition vacuously
            const bool moved = rel_linf(direct.values, u0.values) > 1e-6;
            t.record(moved ? rel_linf(composed.values, direct.values) : 1.0, 1e-10);
        }
        tallies.push_back(t);
    }
    {
        PropertyTally t{"cli_output_determinism"};
        ExperimentConfig small = cfg;
        small.front = {-40.0, 40.0, 801, 1e-8};
        small.semigroup = {-40.0, 40.0, 801, 1e-8, 0.01, {1.0, 2.0}};
        small.decay.x_min = -40.0;
        small.decay.x_max = 40.0;
        small.decay.n = 801;
        small.decay.dt = 0.05;
        small.decay.T = 20.0;
        small.decay.window = {2.0, 20.0};
        small.decay.left_extension = 0.0;
        small.output.svg = true;
        const auto base = std::filesystem::path(ctx.dir) / "determinism";
        for (const char* exp : {"front", "linear-decay"}) {
            std::vector<std::filesystem::path> dirs{base / fmt::format("{}_a", exp), base / fmt::format("{}_b", exp)};
            std::vector<ExperimentReport> reps;
            for (const auto& d : dirs) reps.push_back(run_named(small, exp, d.string(), true));
            for (const auto& file : reps[0].files) {
                if (file == "summary.txt") continue;
                const bool same = read_file(dirs[0] / file) == read_file(dirs[1] / file);
                t.record(same ? 0.0 : 1.0, 0.0);
            }
        }
        std::filesystem::remove_all(base);
        tallies.push_back(t);
    }

    bool ok = true;
    for (const auto& t : tallies) {
        c.measured.push_back({t.name + "_cases", static_cast<double>(t.cases)});
        c.measured.push_back({t.name + "_failures", static_cast<double>(t.failures)});
        c.measured.push_back({t.name + "_max_error", t.max_error});
        ok = ok && t.failures == 0 && t.cases > 0;
    }
    finish(c, ok, t0);

    if (ctx.csv()) {
        CsvWriter w(ctx.path("properties.csv"), {"property", "cases", "failures", "max_error"});
        for (const auto& t : tallies)
            w.row({t.name, static_cast<long long>(t.cases), static_cast<long long>(t.failures), t.max_error});
    }
    return {c};
}

// ---------------------------------------------------------------- dispatch

using Runner = std::vector<CriterionResult> (*)(Ctx&);

struct Group {
    const char* experiment;
    Runner run;
    std::vector<int> ids;
    std::vector<const char*> titles;
};

const std::vector<Group>& groups() {
    static const std::vector<Group> g{
        {"front", run_front, {1}, {"front residual and wake rate"}},
        {"spectrum", run_spectrum, {2, 3}, {"no unstable eigenvalues of weighted L_p, L_psi", "dispersion curves and Fredholm index"}},
        {"resolvent-probe", run_resolvent, {4, 5}, {"resolvent probe slopes", "far-field/core reassembly residual"}},
        {"linear-decay", run_linear_decay, {6, 7}, {"contour quadrature vs time stepping", "linear decay exponents"}},
        {"nonlinear-theorem1", run_nonlinear, {8, 9}, {"nonlinear stability at small epsilon", "coupled vs Cartesian evolution"}},
        {"properties", run_properties, {10}, {"randomized property suites"}},
    };
    return g;
}

ExperimentReport run_named(const ExperimentConfig& cfg, const std::string& name, const std::string& out_dir, bool nested) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        fail(ErrorCode::ConfigInvalid, fmt::format("run.experiment: unknown experiment '{}'", name));
    ensure_directory(out_dir);
    Ctx ctx{cfg, out_dir, {}, {}};
    ExperimentReport rep;
    rep.experiment = name;
    if (name == "verify-all") {
        const auto& gs = groups();
        std::vector<std::vector<CriterionResult>> results(gs.size());
        parallel_for(gs.size(), cfg.run.jobs, [&](std::size_t k) {
            try {
                results[k] = gs[k].run(ctx);
            } catch (const std::exception& e) {
                for (std::size_t i = 0; i < gs[k].ids.size(); ++i) {
                    auto c = make(gs[k].ids[i], gs[k].titles[i], 0.0);
                    c.note = fmt::format("{}: {}", gs[k].experiment, e.what());
                    results[k].push_back(c);
                }
            }
        });
        for (auto& r : results)
            for (auto& c : r) rep.criteria.push_back(std::move(c));
    } else {
        for (const auto& g : groups())
            if (name == g.experiment) {
                try {
                    rep.criteria = g.run(ctx);
                } catch (const Error& e) {
                    throw Error(e.code(), fmt::format("{}: {}", name, e.what()));
                }
            }
    }
    std::sort(rep.criteria.begin(), rep.criteria.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    if (!nested || true) write_summary(ctx.path("summary.txt"), summary_lines(rep));
    rep.files = ctx.files;
    std::sort(rep.files.begin(), rep.files.end());
    return rep;
}

}  // namespace

std::vector<int> experiment_criteria(const std::string& name) {
    if (name == "verify-all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (const auto& g : groups())
        if (name == g.experiment) return g.ids;
    fail(ErrorCode::ConfigInvalid, fmt::format("run.experiment: unknown experiment '{}'", name));
}

std::vector<std::pair<std::string, std::string>> summary_lines(const ExperimentReport& r) {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("experiment", r.experiment);
    std::string ids;
    for (const auto& c : r.criteria) ids += (ids.empty() ? "" : ",") + std::to_string(c.id);
    out.emplace_back("criteria", ids);
    for (const auto& c : r.criteria) {
        const auto p = fmt::format("criterion_{}", c.id);
        out.emplace_back(p, c.pass ? "PASS" : "FAIL");
        out.emplace_back(p + "_title", c.title);
        out.emplace_back(p + "_runtime_limit_s", fmt::format("{}", c.runtime_limit));
        for (const auto& m : c.measured) out.emplace_back(p + "_" + m.key, fmt::format("{:.6e}", m.value));
        if (!c.note.empty()) out.emplace_back(p + "_error", c.note);
    }
    out.emplace_back("all_pass", r.all_pass() ? "true" : "false");
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& name, const std::string& out_dir) {
    return run_named(cfg, name, out_dir, false);
}

}  // namespace glf
