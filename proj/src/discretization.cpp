#include "discretization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lapack.hpp"

namespace glf {

Grid::Grid(double lo, double hi, std::size_t count) : x_min(lo), x_max(hi), n(count) {
    require(count >= 3, ErrorCode::InvalidArgument, "grid needs at least 3 nodes");
    require(hi > lo, ErrorCode::InvalidArgument, "grid needs x_max > x_min");
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

std::size_t Grid::locate(double xv) const {
    double s = std::floor((xv - x_min) / h());
    if (s < 0.0) return 0;
    auto i = static_cast<std::size_t>(s);
    return std::min(i, n - 2);
}

Field::Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.n, ErrorCode::GridMismatch, "field length differs from grid size");
}

Field Field::sample(const Grid& g, const std::function<cplx(double)>& f) {
    Field out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.values[i] = f(g.x(i));
    return out;
}

Field Field::from_real(const Grid& g, std::span<const double> v) {
    require(v.size() == g.n, ErrorCode::GridMismatch, "field length differs from grid size");
    Field out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.values[i] = v[i];
    return out;
}

std::vector<double> Field::real() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
    return out;
}

std::vector<double> Field::imag() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].imag();
    return out;
}

double Field::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

Grid extend_left(double x_min, double x_max, std::size_t n, double extension) {
    const Grid g(x_min, x_max, n);
    require(extension >= 0.0, ErrorCode::InvalidArgument, "left extension must be non-negative");
    const auto extra = static_cast<std::size_t>(std::ceil(extension / g.h() - 1e-9));
    return Grid(x_min - static_cast<double>(extra) * g.h(), x_max, n + extra);
}

void require_same_grid(const Grid& a, const Grid& b) {
    require(a == b, ErrorCode::GridMismatch, "fields live on different grids");
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid);
    Field out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid);
    Field out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
    return out;
}

Field operator*(cplx s, const Field& a) {
    Field out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = s * a.values[i];
    return out;
}

Field operator*(const Field& a, const Field& b) {
    require_same_grid(a.grid, b.grid);
    Field out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

namespace {

template <typename T>
std::vector<T> diff_impl(std::span<const T> f, double h, int order) {
    require(order == 1 || order == 2, ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
    const std::size_t n = f.size();
    require(n >= 3, ErrorCode::InvalidArgument, "differentiation needs at least 3 nodes");
    std::vector<T> d(n);
    if (order == 1) {
        const double c = 1.0 / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * c;
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * c;
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * c;
        return d;
    }
    const double c = 1.0 / (h * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * c;
    if (n >= 4) {
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * c;
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * c;
    } else {
        d[0] = d[1];
        d[2] = d[1];
    }
    return d;
}

}  // namespace

std::vector<cplx> differentiate(std::span<const cplx> f, double h, int order) {
    return diff_impl<cplx>(f, h, order);
}

std::vector<double> differentiate(std::span<const double> f, double h, int order) {
    return diff_impl<double>(f, h, order);
}

Field differentiate(const Field& f, int order) {
    return Field(f.grid, diff_impl<cplx>(f.values, f.grid.h(), order));
}

std::vector<double> trapezoid_weights(const Grid& g) {
    std::vector<double> w(g.n, g.h());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

BandedMatrix::BandedMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), band_(n * static_cast<std::size_t>(kl + ku + 1), cplx{}) {
    require(kl >= 0 && ku >= 0 && kl <= 2 && ku <= 2, ErrorCode::InvalidArgument,
            "bandwidth must not exceed 2");
    require(n >= 1, ErrorCode::InvalidArgument, "empty matrix");
}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
    const auto d = static_cast<long>(j) - static_cast<long>(i);
    return i < n_ && j < n_ && d >= -kl_ && d <= ku_;
}

cplx BandedMatrix::get(std::size_t i, std::size_t j) const {
    if (!in_band(i, j)) return {};
    const auto w = static_cast<std::size_t>(kl_ + ku_ + 1);
    return band_[i * w + (j + static_cast<std::size_t>(kl_) - i)];
}

void BandedMatrix::set(std::size_t i, std::size_t j, cplx v) {
    require(in_band(i, j), ErrorCode::InvalidArgument, "entry outside band");
    const auto w = static_cast<std::size_t>(kl_ + ku_ + 1);
    band_[i * w + (j + static_cast<std::size_t>(kl_) - i)] = v;
}

void BandedMatrix::add(std::size_t i, std::size_t j, cplx v) { set(i, j, get(i, j) + v); }

void BandedMatrix::set_identity_row(std::size_t i) {
    const auto lo = i >= static_cast<std::size_t>(kl_) ? i - static_cast<std::size_t>(kl_) : 0;
    const auto hi = std::min(n_ - 1, i + static_cast<std::size_t>(ku_));
    for (std::size_t j = lo; j <= hi; ++j) set(i, j, j == i ? cplx{1.0} : cplx{});
}

std::vector<cplx> BandedMatrix::multiply(std::span<const cplx> u) const {
    require(u.size() == n_, ErrorCode::GridMismatch, "vector length differs from matrix size");
    std::vector<cplx> out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto lo = i >= static_cast<std::size_t>(kl_) ? i - static_cast<std::size_t>(kl_) : 0;
        const auto hi = std::min(n_ - 1, i + static_cast<std::size_t>(ku_));
        cplx s{};
        for (std::size_t j = lo; j <= hi; ++j) s += get(i, j) * u[j];
        out[i] = s;
    }
    return out;
}

double BandedMatrix::row_scale(std::size_t i) const {
    double m = 0.0;
    const auto lo = i >= static_cast<std::size_t>(kl_) ? i - static_cast<std::size_t>(kl_) : 0;
    const auto hi = std::min(n_ - 1, i + static_cast<std::size_t>(ku_));
    for (std::size_t j = lo; j <= hi; ++j) m = std::max(m, std::abs(get(i, j)));
    return m;
}

BandedLU::BandedLU(const BandedMatrix& a)
    : n_(a.size()), kl_(a.kl()), ku_(a.ku()), ldab_(2 * a.kl() + a.ku() + 1) {
    const auto ld = static_cast<std::size_t>(ldab_);
    ab_.assign(ld * n_, cplx{});
    for (std::size_t j = 0; j < n_; ++j) {
        const auto lo = j >= static_cast<std::size_t>(ku_) ? j - static_cast<std::size_t>(ku_) : 0;
        const auto hi = std::min(n_ - 1, j + static_cast<std::size_t>(kl_));
        for (std::size_t i = lo; i <= hi; ++i)
            ab_[static_cast<std::size_t>(kl_ + ku_) + i - j + j * ld] = a.get(i, j);
    }
    ipiv_.assign(n_, 0);
    const auto nn = static_cast<lapack_int>(n_);
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, nn, nn, kl_, ku_, ab_.data(), ldab_, ipiv_.data());
    require(info >= 0, ErrorCode::InvalidArgument, "zgbtrf rejected its arguments");
    if (info > 0) fail(ErrorCode::SingularMatrix, "exact zero pivot at row " + std::to_string(info - 1));
    for (std::size_t j = 0; j < n_; ++j) {
        const double piv = std::abs(ab_[static_cast<std::size_t>(kl_ + ku_) + j * ld]);
        const double scale = std::max(a.row_scale(j), 1e-300);
        if (piv < 1e-14 * scale) fail(ErrorCode::SingularMatrix, "pivot below threshold at row " + std::to_string(j));
    }
}

void BandedLU::solve_in_place(std::span<cplx> rhs) const {
    require(rhs.size() == n_, ErrorCode::GridMismatch, "rhs length differs from matrix size");
    const auto nn = static_cast<lapack_int>(n_);
    const lapack_int info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', nn, kl_, ku_, 1, ab_.data(), ldab_,
                                           ipiv_.data(), rhs.data(), nn);
    require(info == 0, ErrorCode::SolveFailure, "zgbtrs failed");
}

std::vector<cplx> BandedLU::solve(std::span<const cplx> rhs) const {
    std::vector<cplx> out(rhs.begin(), rhs.end());
    solve_in_place(out);
    return out;
}

std::vector<cplx> solve_banded(const BandedMatrix& a, std::span<const cplx> rhs) {
    return BandedLU(a).solve(rhs);
}

Field solve_banded(const BandedMatrix& a, const Field& rhs) {
    return Field(rhs.grid, solve_banded(a, std::span<const cplx>(rhs.values)));
}

}  // namespace glf
