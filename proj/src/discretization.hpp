#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"

namespace glf {

using cplx = std::complex<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform grid x_i = x_min + i h, i = 0..n-1.
struct Grid {
    double x_min = -1.0;
    double x_max = 1.0;
    std::size_t n = 3;

    Grid() = default;
    Grid(double lo, double hi, std::size_t count);

    double h() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
    std::vector<double> nodes() const;
    /// Largest i with x(i) <= x, clamped to [0, n-2].
    std::size_t locate(double x) const;

    bool operator==(const Grid&) const = default;
};

struct Field {
    Grid grid;
    std::vector<cplx> values;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(g.n, cplx{}) {}
    Field(const Grid& g, std::vector<cplx> v);

    static Field sample(const Grid& g, const std::function<cplx(double)>& f);
    static Field from_real(const Grid& g, std::span<const double> v);

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }

    std::vector<double> real() const;
    std::vector<double> imag() const;
    double max_abs() const;
};

void require_same_grid(const Grid& a, const Grid& b);
/// Grid over [x_min, x_max] with n nodes, extended to the left by at least `extension` at the same spacing.
Grid extend_left(double x_min, double x_max, std::size_t n, double extension);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& a);
/// Pointwise product.
Field operator*(const Field& a, const Field& b);

/// Second-order central stencils; one-sided second-order rows at the ends.
Field differentiate(const Field& f, int order);
std::vector<cplx> differentiate(std::span<const cplx> f, double h, int order);
std::vector<double> differentiate(std::span<const double> f, double h, int order);

/// Composite trapezoid weights (h/2 at the ends).
std::vector<double> trapezoid_weights(const Grid& g);

/// Square band matrix, kl sub- and ku super-diagonals.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, int kl, int ku);

    std::size_t size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const;
    cplx get(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, cplx v);
    void add(std::size_t i, std::size_t j, cplx v);
    void set_identity_row(std::size_t i);

    std::vector<cplx> multiply(std::span<const cplx> u) const;
    double row_scale(std::size_t i) const;

private:
    std::size_t n_ = 0;
    int kl_ = 0;
    int ku_ = 0;
    std::vector<cplx> band_;
};

/// LU factorization with partial pivoting, reused across right-hand sides.
class BandedLU {
public:
    explicit BandedLU(const BandedMatrix& a);

    std::vector<cplx> solve(std::span<const cplx> rhs) const;
    void solve_in_place(std::span<cplx> rhs) const;
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    int kl_;
    int ku_;
    int ldab_;
    std::vector<cplx> ab_;
    std::vector<int> ipiv_;
};

std::vector<cplx> solve_banded(const BandedMatrix& a, std::span<const cplx> rhs);
Field solve_banded(const BandedMatrix& a, const Field& rhs);

}  // namespace glf
