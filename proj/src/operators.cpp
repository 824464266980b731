#include "operators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lapack.hpp"

namespace glf {

const char* operator_kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::Lp: return "Lp";
        case OperatorKind::Lpsi: return "Lpsi";
        case OperatorKind::LpPlus: return "LpPlus";
        case OperatorKind::LpMinus: return "LpMinus";
        case OperatorKind::LpsiPlus: return "LpsiPlus";
        case OperatorKind::LpsiMinus: return "LpsiMinus";
    }
    return "?";
}

BoundaryClosure default_closure(OperatorKind kind) {
    if (kind == OperatorKind::Lpsi || kind == OperatorKind::LpsiMinus)
        return {BoundarySide::neumann(), BoundarySide::dirichlet()};
    return BoundaryClosure::dirichlet();
}

namespace {

struct Stencil {
    cplx lo, di, up;
};

Stencil interior(double a, double b, double h) {
    return {1.0 / (h * h) - a / (2.0 * h), -2.0 / (h * h) + b, 1.0 / (h * h) + a / (2.0 * h)};
}

void build_matrix(DiscreteOperator& op) {
    const std::size_t n = op.grid.n;
    const double h = op.grid.h();
    op.matrix = BandedMatrix(n, 1, 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Stencil s = interior(op.adv[i], op.pot[i], h);
        op.matrix.set(i, i - 1, s.lo);
        op.matrix.set(i, i, s.di);
        op.matrix.set(i, i + 1, s.up);
    }
    op.corner_top = op.corner_bottom = {};
    const bool periodic = op.bc.is_periodic();
    require(periodic == (op.bc.right.type == ClosureType::Periodic), ErrorCode::InvalidArgument,
            "periodic closure must be used on both sides");

    const Stencil s0 = interior(op.adv[0], op.pot[0], h);
    switch (op.bc.left.type) {
        case ClosureType::Dirichlet: break;
        case ClosureType::Neumann:
            op.matrix.set(0, 0, s0.di);
            op.matrix.set(0, 1, s0.lo + s0.up);
            break;
        case ClosureType::RobinRate:
            op.matrix.set(0, 0, s0.di + s0.lo * std::exp(-op.bc.left.rate * h));
            op.matrix.set(0, 1, s0.up);
            break;
        case ClosureType::Periodic:
            op.matrix.set(0, 0, s0.di);
            op.matrix.set(0, 1, s0.up);
            op.corner_top = s0.lo;
            break;
    }
    const Stencil sn = interior(op.adv[n - 1], op.pot[n - 1], h);
    switch (op.bc.right.type) {
        case ClosureType::Dirichlet: break;
        case ClosureType::Neumann:
            op.matrix.set(n - 1, n - 1, sn.di);
            op.matrix.set(n - 1, n - 2, sn.lo + sn.up);
            break;
        case ClosureType::RobinRate:
            op.matrix.set(n - 1, n - 1, sn.di + sn.up * std::exp(op.bc.right.rate * h));
            op.matrix.set(n - 1, n - 2, sn.lo);
            break;
        case ClosureType::Periodic:
            op.matrix.set(n - 1, n - 1, sn.di);
            op.matrix.set(n - 1, n - 2, sn.lo);
            op.corner_bottom = sn.up;
            break;
    }
}

struct LimitCoefficients {
    double adv, pot;
};

LimitCoefficients limit_coefficients(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::LpPlus:
        case OperatorKind::LpsiPlus: return {0.0, 0.0};
        case OperatorKind::LpMinus: return {2.0, -2.0};
        case OperatorKind::LpsiMinus: return {2.0, 0.0};
        default: break;
    }
    fail(ErrorCode::InvalidArgument, "not a limiting operator");
}

}  // namespace

std::vector<cplx> DiscreteOperator::apply(std::span<const cplx> u) const {
    auto out = matrix.multiply(u);
    if (bc.is_periodic()) {
        out.front() += corner_top * u.back();
        out.back() += corner_bottom * u.front();
    }
    return out;
}

Field DiscreteOperator::apply(const Field& u) const {
    require_same_grid(u.grid, grid);
    return Field(grid, apply(std::span<const cplx>(u.values)));
}

cplx DiscreteOperator::entry(std::size_t i, std::size_t j) const {
    const std::size_t n = grid.n;
    if (bc.is_periodic()) {
        if (i == 0 && j == n - 1) return corner_top;
        if (i == n - 1 && j == 0) return corner_bottom;
    }
    return matrix.get(i, j);
}

DiscreteOperator assemble_from_coefficients(OperatorKind kind, const Grid& grid, std::vector<double> adv,
                                            std::vector<double> pot, const BoundaryClosure& bc) {
    require(adv.size() == grid.n && pot.size() == grid.n, ErrorCode::GridMismatch, "coefficient length mismatch");
    DiscreteOperator op;
    op.kind = kind;
    op.grid = grid;
    op.bc = bc;
    op.adv = std::move(adv);
    op.pot = std::move(pot);
    build_matrix(op);
    return op;
}

DiscreteOperator assemble_limit_operator(OperatorKind kind, const Grid& grid, const BoundaryClosure& bc) {
    const LimitCoefficients c = limit_coefficients(kind);
    return assemble_from_coefficients(kind, grid, std::vector<double>(grid.n, c.adv), std::vector<double>(grid.n, c.pot),
                                      bc);
}

DiscreteOperator assemble_operator(OperatorKind kind, const FrontProfile& front, const Grid& grid,
                                   const BoundaryClosure& bc, const WeightSpec& weight) {
    if (kind != OperatorKind::Lp && kind != OperatorKind::Lpsi) return assemble_limit_operator(kind, grid, bc);
    require(front.grid == grid, ErrorCode::GridMismatch, "front profile lives on a different grid");
    const std::size_t n = grid.n;
    std::vector<double> adv(n), pot(n);
    const double cubic = kind == OperatorKind::Lp ? 3.0 : 1.0;
    auto coeffs = [&](double x, double q) {
        const LogWeight lw = eval_log_weight(weight, x);
        const double a = 2.0 - 2.0 * lw.dm;
        const double b = lw.dm * lw.dm - lw.d2m - 2.0 * lw.dm + 1.0 - cubic * q * q;
        return std::pair{a, b};
    };
    for (std::size_t i = 0; i < n; ++i) std::tie(adv[i], pot[i]) = coeffs(grid.x(i), front.q[i]);
    DiscreteOperator op = assemble_from_coefficients(kind, grid, std::move(adv), std::move(pot), bc);
    const auto [al, bl] = coeffs(grid.x_min, 1.0);
    const auto [ar, br] = coeffs(grid.x_max, 0.0);
    op.left_deviation = std::abs(op.adv.front() - al) + std::abs(op.pot.front() - bl);
    op.right_deviation = std::abs(op.adv.back() - ar) + std::abs(op.pot.back() - br);
    return op;
}

ShiftedSolver::ShiftedSolver(const DiscreteOperator& op, cplx alpha, cplx beta, std::span<const cplx> extra_diag)
    : n_(op.grid.n),
      periodic_(op.bc.is_periodic()),
      dir_left_(op.dirichlet_left()),
      dir_right_(op.dirichlet_right()),
      m_(op.grid.n, 1, 1) {
    require(extra_diag.empty() || extra_diag.size() == n_, ErrorCode::GridMismatch, "diagonal term length mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = (i ? i - 1 : 0); j <= std::min(n_ - 1, i + 1); ++j)
            m_.set(i, j, beta * op.matrix.get(i, j) + (i == j ? alpha : cplx{}));
        if (!extra_diag.empty()) m_.add(i, i, extra_diag[i]);
    }
    if (dir_left_) m_.set_identity_row(0);
    if (dir_right_) m_.set_identity_row(n_ - 1);
    lu_.emplace(m_);
    if (periodic_) {
        c_top_ = beta * op.corner_top;
        c_bottom_ = beta * op.corner_bottom;
        // M = T + e0 c_top e_{n-1}^T + e_{n-1} c_bottom e0^T
        z0_.assign(n_, cplx{});
        z1_.assign(n_, cplx{});
        z0_.front() = 1.0;
        z1_.back() = 1.0;
        lu_->solve_in_place(z0_);
        lu_->solve_in_place(z1_);
        s_[0][0] = 1.0 + c_top_ * z0_.back();
        s_[0][1] = c_top_ * z1_.back();
        s_[1][0] = c_bottom_ * z0_.front();
        s_[1][1] = 1.0 + c_bottom_ * z1_.front();
        const cplx det = s_[0][0] * s_[1][1] - s_[0][1] * s_[1][0];
        require(std::abs(det) > 1e-14, ErrorCode::SingularMatrix, "periodic correction is singular");
    }
}

void ShiftedSolver::solve_in_place(std::span<cplx> rhs) const {
    require(rhs.size() == n_, ErrorCode::GridMismatch, "rhs length mismatch");
    if (dir_left_) rhs.front() = 0.0;
    if (dir_right_) rhs.back() = 0.0;
    lu_->solve_in_place(rhs);
    if (!periodic_) return;
    const cplx v0 = c_top_ * rhs.back();
    const cplx v1 = c_bottom_ * rhs.front();
    const cplx det = s_[0][0] * s_[1][1] - s_[0][1] * s_[1][0];
    const cplx w0 = (s_[1][1] * v0 - s_[0][1] * v1) / det;
    const cplx w1 = (s_[0][0] * v1 - s_[1][0] * v0) / det;
    for (std::size_t i = 0; i < n_; ++i) rhs[i] -= z0_[i] * w0 + z1_[i] * w1;
}

std::vector<cplx> ShiftedSolver::solve(std::span<const cplx> rhs) const {
    std::vector<cplx> out(rhs.begin(), rhs.end());
    solve_in_place(out);
    return out;
}

std::vector<cplx> ShiftedSolver::multiply(std::span<const cplx> u) const {
    auto out = m_.multiply(u);
    if (periodic_) {
        out.front() += c_top_ * u.back();
        out.back() += c_bottom_ * u.front();
    }
    return out;
}

cplx dispersion(DispersionCurve curve, double k) {
    const cplx ik(0.0, k);
    switch (curve) {
        case DispersionCurve::SigmaPlus: return -k * k;
        case DispersionCurve::SigmaPMinus: return -k * k + 2.0 * ik - 2.0;
        case DispersionCurve::SigmaPsiMinus: return -k * k + 2.0 * ik;
    }
    return {};
}

int fredholm_index(OperatorKind kind, double eta, cplx lambda) {
    double c0 = 0.0;
    if (kind == OperatorKind::Lp)
        c0 = -2.0;
    else
        require(kind == OperatorKind::Lpsi, ErrorCode::InvalidArgument, "Fredholm index needs Lp or Lpsi");
    // Left: nu^2 + 2 nu + c0 - lambda; right: nu^2 - lambda.
    const cplx dl = std::sqrt(cplx(1.0 - c0) + lambda);
    const cplx left[2] = {-1.0 + dl - eta, -1.0 - dl - eta};
    const cplx dr = std::sqrt(lambda);
    const cplx right[2] = {dr + eta, -dr + eta};
    auto count = [](const cplx (&roots)[2]) {
        int c = 0;
        for (const cplx& r : roots) {
            if (std::abs(r.real()) < 1e-10)
                fail(ErrorCode::DegenerateRoot, fmt::format("shifted spatial rate {}+{}i on the imaginary axis", r.real(), r.imag()));
            if (r.real() > 0.0) ++c;
        }
        return c;
    };
    return count(left) - count(right);
}

std::vector<cplx> eigenvalues(const DiscreteOperator& op) {
    const std::size_t n = op.grid.n;
    const std::size_t i0 = op.dirichlet_left() ? 1 : 0;
    const std::size_t i1 = op.dirichlet_right() ? n - 1 : n;
    require(i1 > i0 + 1, ErrorCode::InvalidArgument, "operator too small for an eigenvalue scan");
    const std::size_t m = i1 - i0;
    require(m <= 8192, ErrorCode::InvalidArgument, "eigen scan limited to 8192 unknowns");
    bool real = true;
    for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = (i ? i - 1 : 0); j <= std::min(n - 1, i + 1); ++j)
            real = real && op.matrix.get(i, j).imag() == 0.0;
    real = real && op.corner_top.imag() == 0.0 && op.corner_bottom.imag() == 0.0;
    const auto mm = static_cast<lapack_int>(m);
    std::vector<cplx> ev(m);
    if (real) {
        std::vector<double> a(m * m, 0.0), wr(m), wi(m);
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = i0; j < i1; ++j) a[(i - i0) + (j - i0) * m] = op.entry(i, j).real();
        const lapack_int info =
            LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', mm, a.data(), mm, wr.data(), wi.data(), nullptr, 1, nullptr, 1);
        if (info != 0) fail(ErrorCode::EigensolveFailure, fmt::format("dgeev returned {}", info));
        for (std::size_t k = 0; k < m; ++k) ev[k] = {wr[k], wi[k]};
    } else {
        std::vector<cplx> a(m * m, cplx{});
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = i0; j < i1; ++j) a[(i - i0) + (j - i0) * m] = op.entry(i, j);
        const lapack_int info =
            LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', mm, a.data(), mm, ev.data(), nullptr, 1, nullptr, 1);
        if (info != 0) fail(ErrorCode::EigensolveFailure, fmt::format("zgeev returned {}", info));
    }
    std::sort(ev.begin(), ev.end(), [](const cplx& a, const cplx& b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return ev;
}

std::vector<cplx> eigen_scan(const DiscreteOperator& op, double halfplane_cut) {
    auto ev = eigenvalues(op);
    std::vector<cplx> out;
    for (const cplx& e : ev)
        if (e.real() >= halfplane_cut) out.push_back(e);
    return out;
}

}  // namespace glf
