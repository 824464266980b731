#pragma once

#include <string>
#include <vector>

#include "discretization.hpp"
#include "operators.hpp"
#include "resolvent.hpp"
#include "weights.hpp"

namespace glf {

enum class ContourKind { LeftParabolaRays, RightArcRays };

/// Inverse-Laplace contours in the lambda plane, oriented with Im lambda increasing.
/// LeftParabolaRays: lambda = sigma + i a - c a^2 for |a| <= delta, continued by rays at left_ray_angle,
/// with sigma = parabola_shift_scale / t (0 gives the limiting contour through the origin).
/// RightArcRays: arc of radius arc_radius_scale / t through the right half-plane, rays at ray_angle.
struct ContourSpec {
    ContourKind kind = ContourKind::RightArcRays;
    double c = 0.2;
    double delta = 0.5;
    double arc_radius_scale = 1.0;
    double ray_angle = 0.75 * 3.14159265358979323846;
    double left_ray_angle = 0.6 * 3.14159265358979323846;
    double parabola_shift_scale = 1.0;
    std::size_t n_nodes = 256;

    void validate() const;
};

struct ContourNode {
    cplx lambda;
    cplx weight;  // includes d lambda
};

/// Gauss-Legendre nodes on each piece; rays are cut where e^{Re lambda t} < e^{-36}.
std::vector<ContourNode> contour_nodes(const ContourSpec& spec, double t);

enum class ContourSplit { WholeResolvent, LeftRightSplit };

struct ContourResult {
    Field u;
    double doubling_change = 0.0;  // relative Linf change when n_nodes doubles
};

/// e^{L t} f = -1/(2 pi i) int e^{lambda t} (L - lambda)^{-1} f d lambda.
/// LeftRightSplit integrates the left component over the parabola contour and the rest over the arc
/// contour, both built from the same spec; spec.kind is ignored there.
ContourResult contour_apply(const ResolventContext& ctx, const ContourSpec& spec, double t, const Field& f,
                            ContourSplit split, unsigned jobs = 1);

struct NormRequest {
    std::string label;
    WeightSpec weight;
    NormKind kind = NormKind::Linf;
    int derivative = 0;  // norm of the x-derivative of this order
};

struct NormSeries {
    NormRequest request;
    std::vector<double> values;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> fields;  // only when stored
    std::vector<NormSeries> norms;

    const NormSeries& series(const std::string& label) const;
};

struct EvolveOptions {
    double checkpoint_ratio = 1.2;
    double first_checkpoint = 0.0;  // 0 means dt
    std::vector<double> extra_times;
    bool store_fields = false;
};

double evaluate_norm(const Field& u, const NormRequest& r);

/// Crank-Nicolson stepping; norms recorded at t = 0 and at geometric checkpoints.
Trajectory evolve_linear(const DiscreteOperator& op, const Field& u0, double dt, double T,
                         const std::vector<NormRequest>& record, const EvolveOptions& opt = {});

enum class DecayQuantity { PW1infWeighted, PL1, PsiLinf, PsiLinfM10, PsixL1, PsixLinf };

const char* decay_quantity_name(DecayQuantity q);
DecayQuantity decay_quantity_from_name(const std::string& name);
std::vector<DecayQuantity> all_decay_quantities();
double decay_target(DecayQuantity q);
double decay_tolerance(DecayQuantity q);
NormRequest decay_norm(DecayQuantity q);
bool decay_uses_p(DecayQuantity q);

struct DecaySetup {
    double x_min = -200.0;
    double x_max = 200.0;
    std::size_t n = 8192;
    double dt = 0.05;
    double T = 200.0;
    Interval window{20.0, 200.0};
    double front_tol = 1e-8;
    double left_extension = 0.0;  // extra nodes at spacing h added left of x_min
    unsigned jobs = 1;
};

struct DecayReport {
    std::string quantity;
    double exponent = 0.0;
    double stderr_ = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    Interval window;
    bool pass = false;
    std::vector<double> times;
    std::vector<double> values;
};

DecayReport make_decay_report(DecayQuantity q, const std::vector<double>& times, const std::vector<double>& values,
                              Interval window);

/// Evolves e^{-x^2} under the default evolution closures and fits the requested norms.
/// One evolution per operator is shared by all quantities that need it.
std::vector<DecayReport> linear_decay_suite(const std::vector<DecayQuantity>& qs, const DecaySetup& setup);
DecayReport linear_decay_experiment(DecayQuantity q, const DecaySetup& setup);

struct SmallTimeReport {
    double sup_slope = 0.0;     // log-log slope of ||e^{Lt} f_narrow||_inf on t in [0.01, 0.5]
    double sup_constant = 0.0;  // max t^{1/2} ||e^{Lt} f||_inf / ||f||_1 over the bank
    double w1_constant = 0.0;   // max ||e^{Lt} f||_{W1inf} / ||f||_{W1inf} for smooth data
    double w1_constant_refined = 0.0;  // same on the grid refined by 2
    double zero_max = 0.0;      // max |e^{Lt} 0|
    bool pass = false;
};

/// Small-time smoothing bounds for one operator kind built on the front's grid.
SmallTimeReport small_time_suite(OperatorKind kind, const FrontProfile& front, double dt = 1e-3);

}  // namespace glf
