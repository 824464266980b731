#pragma once

#include <optional>
#include <vector>

#include "discretization.hpp"
#include "front.hpp"
#include "weights.hpp"

namespace glf {

enum class OperatorKind { Lp, Lpsi, LpPlus, LpMinus, LpsiPlus, LpsiMinus };

const char* operator_kind_name(OperatorKind k);

enum class ClosureType { Dirichlet, Neumann, RobinRate, Periodic };

struct BoundarySide {
    ClosureType type = ClosureType::Dirichlet;
    cplx rate{};  // RobinRate: boundary data behaves like e^{rate x}

    static BoundarySide dirichlet() { return {}; }
    static BoundarySide neumann() { return {ClosureType::Neumann, {}}; }
    static BoundarySide robin(cplx nu) { return {ClosureType::RobinRate, nu}; }
    static BoundarySide periodic() { return {ClosureType::Periodic, {}}; }
};

struct BoundaryClosure {
    BoundarySide left;
    BoundarySide right;

    static BoundaryClosure dirichlet() { return {}; }
    static BoundaryClosure periodic() { return {BoundarySide::periodic(), BoundarySide::periodic()}; }
    bool is_periodic() const { return left.type == ClosureType::Periodic; }
};

/// Evolution defaults: Dirichlet for p, Neumann/Dirichlet for psi.
BoundaryClosure default_closure(OperatorKind kind);

/// L = dxx + adv dx + pot, realized with central differences and boundary closure rows.
class DiscreteOperator {
public:
    OperatorKind kind = OperatorKind::LpsiPlus;
    Grid grid;
    BoundaryClosure bc;
    std::vector<double> adv;
    std::vector<double> pot;
    BandedMatrix matrix;  // tridiagonal part
    cplx corner_top{};    // A(0, n-1), periodic only
    cplx corner_bottom{}; // A(n-1, 0), periodic only
    double left_deviation = 0.0;   // coefficient distance to the limiting operator at x_min
    double right_deviation = 0.0;  // same at x_max

    std::size_t size() const { return grid.n; }
    bool dirichlet_left() const { return bc.left.type == ClosureType::Dirichlet; }
    bool dirichlet_right() const { return bc.right.type == ClosureType::Dirichlet; }

    std::vector<cplx> apply(std::span<const cplx> u) const;
    Field apply(const Field& u) const;
    cplx entry(std::size_t i, std::size_t j) const;
};

/// Solver for alpha I + beta L with Dirichlet rows replaced by identity rows.
/// Periodic closures use a rank-2 Woodbury correction around the banded factorization.
class ShiftedSolver {
public:
    ShiftedSolver(const DiscreteOperator& op, cplx alpha, cplx beta, std::span<const cplx> extra_diag = {});

    /// Solves in place; rhs entries at Dirichlet rows are overwritten with zero.
    void solve_in_place(std::span<cplx> rhs) const;
    std::vector<cplx> solve(std::span<const cplx> rhs) const;
    /// Applies alpha I + beta L with the same row conventions.
    std::vector<cplx> multiply(std::span<const cplx> u) const;

private:
    std::size_t n_;
    bool periodic_;
    bool dir_left_;
    bool dir_right_;
    BandedMatrix m_;
    std::optional<BandedLU> lu_;
    cplx c_top_{}, c_bottom_{};
    std::vector<cplx> z0_, z1_;
    cplx s_[2][2]{};
};

/// Coefficients use the front profile on the same grid; weight defaults to omega.
DiscreteOperator assemble_operator(OperatorKind kind, const FrontProfile& front, const Grid& grid,
                                   const BoundaryClosure& bc, const WeightSpec& weight = WeightSpec::omega());
/// Limiting (constant coefficient) operators need no front.
DiscreteOperator assemble_limit_operator(OperatorKind kind, const Grid& grid, const BoundaryClosure& bc);
/// Raw coefficient assembly.
DiscreteOperator assemble_from_coefficients(OperatorKind kind, const Grid& grid, std::vector<double> adv,
                                            std::vector<double> pot, const BoundaryClosure& bc);

enum class DispersionCurve { SigmaPlus, SigmaPMinus, SigmaPsiMinus };

cplx dispersion(DispersionCurve curve, double k);

/// Left minus right count of unstable spatial rates of the limiting operators at lambda,
/// shifted by the weight exponent eta.
int fredholm_index(OperatorKind kind, double eta, cplx lambda = {});

/// Eigenvalues with Re >= cut, sorted by real part descending. Dirichlet nodes are removed.
std::vector<cplx> eigen_scan(const DiscreteOperator& op, double halfplane_cut);
/// All eigenvalues of the (Dirichlet-reduced) matrix.
std::vector<cplx> eigenvalues(const DiscreteOperator& op);

}  // namespace glf
