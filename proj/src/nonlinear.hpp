#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "front.hpp"
#include "semigroup.hpp"

namespace glf {

/// p = omega r, psi = omega q_* phi for A = (q_* + r) e^{i phi}.
struct StatePair {
    Field p;
    Field psi;
};

struct NonlinearOptions {
    double dt = 0.01;
    double sponge_fraction = 0.05;  // right-boundary damping zone, fraction of nodes
    double sponge_strength = 1.0;
    double guard = 0.5;             // bound on ||p / (omega q_*)||_inf
    double max_jump = 0.1;          // step rejected when a Theta norm jumps by more than this
    double dt_min = 1e-6;
    double checkpoint_ratio = 1.2;
    std::vector<double> extra_times;
    bool store_states = false;
};

/// The seven Theta summands, by label.
const std::vector<std::string>& theta_labels();
/// Raw norms behind the Theta summands (before time factors).
std::vector<double> theta_raw_norms(const StatePair& s);
/// Time factor multiplying each raw norm in Theta.
double theta_factor(std::size_t component, double s);

struct ThetaSeries {
    std::vector<double> times;
    std::vector<double> theta;                    // running supremum
    std::vector<std::vector<double>> components;  // weighted summands per time, theta_labels() order
};

struct CoupledTrajectory {
    std::vector<double> times;     // checkpoints, starting at 0
    std::vector<StatePair> states; // only when stored
    std::vector<NormSeries> norms; // theta raw norms plus "amplitude" and "phase", at checkpoints
    std::vector<double> theta;     // running supremum over every accepted step, at checkpoints
    double guard_max = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;

    const NormSeries& series(const std::string& label) const;
};

/// IMEX: Crank-Nicolson for L_p, L_psi (default evolution closures), variable-step AB2 for the
/// nonlinear terms. Throws GuardViolation at the first step where the Taylor guard fails.
CoupledTrajectory evolve_coupled(const StatePair& s0, const FrontProfile& front, double T,
                                 const NonlinearOptions& opt = {});

/// Right-hand nonlinearities (N_p, N_psi) of the weighted system.
std::pair<std::vector<double>, std::vector<double>> coupled_nonlinearity(const StatePair& s, const FrontProfile& front);

struct CartesianTrajectory {
    std::vector<double> times;
    std::vector<Field> states;
};

/// A_t = A_xx + 2A_x + A - A|A|^2 with Neumann left and A fixed at its initial value on the right.
CartesianTrajectory evolve_cartesian(const Field& A0, double T, const NonlinearOptions& opt = {});

enum class Conversion { PairToCartesian, CartesianToPair };

struct Converted {
    StatePair pair;          // CartesianToPair
    Field cartesian;         // PairToCartesian
    std::size_t unreliable = 0;  // nodes where q_* is below the reliable floor
};

/// CartesianToPair unwraps the phase along x from the principal value at x_min.
Converted convert_coordinates(Conversion dir, const StatePair& pair, const Field& cartesian, const FrontProfile& front);

/// Running supremum of the weighted sum. Requires every Theta norm in the trajectory.
ThetaSeries compute_theta(const std::vector<double>& times, const std::vector<NormSeries>& norms);

/// Smallness norm of the initial data: ||p0||_{L1_{0,1}} + ||p0||_{W1inf} + ||p0||_{W11}
/// + ||psi0||_{L1_{0,1}} + ||psi0||_{W1inf}.
double initial_smallness(const StatePair& s0);

/// r0 = phi0 = s e^{-x^2}, with s chosen so that initial_smallness equals epsilon.
StatePair theorem1_initial_data(double epsilon, const FrontProfile& front);

struct Theorem1Setup {
    double epsilon = 0.01;
    double x_min = -300.0;
    double x_max = 300.0;
    std::size_t n = 12001;
    double T = 300.0;
    Interval window{20.0, 300.0};
    double front_tol = 1e-8;
    double left_extension = 0.0;  // extra nodes at spacing h added left of x_min
    NonlinearOptions options;
};

struct Theorem1Result {
    DecayReport amplitude;
    DecayReport phase;
    double theta_T = 0.0;
    double theta_half = 0.0;
    double saturation = 0.0;  // Theta(T) / Theta(T/2)
    double guard_max = 0.0;
    bool guard_ok = false;
    CoupledTrajectory trajectory;
};

Theorem1Result theorem1_experiment(const Theorem1Setup& setup);

struct CrossModelSetup {
    double epsilon = 0.01;
    double x_min = -160.0;
    double x_max = 100.0;
    std::size_t n = 5201;
    double T = 50.0;
    double dt = 0.005;
    double front_tol = 1e-10;
    int levels = 3;  // Richardson levels in h: grids h, h/2, ... extrapolated for both models
};

struct CrossModelResult {
    std::vector<double> times;
    std::vector<double> p_rel;     // relative Linf discrepancy of p
    std::vector<double> psi_rel;   // same for psi
    double max_rel = 0.0;
    double gauge_error = 0.0;      // max relative deviation from e^{i theta0} equivariance
    double real_imag_max = 0.0;    // max |Im A| for real data
};

/// Coupled (p, psi) vs Cartesian evolution from the same small-epsilon initial data, plus gauge and real-subspace checks.
CrossModelResult cross_model_check(const CrossModelSetup& setup, std::uint64_t seed = 1);

}  // namespace glf
