#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egm/cauchy.hpp"
#include "egm/emfield.hpp"

namespace egm {

/// Interaction constant (strictly positive; couples the charge-current
/// gradient to the force-power density).
struct Kappa {
    double value = 1.0;
    explicit Kappa(double k = 1.0) : value(k) {
        if (!(k > 0.0)) throw Error("kappa must be > 0");
    }
};

/// Force-power density F = M - iF = Theta ∘ A'. M is the power density,
/// F the complex force density; FH/FE are its real and imaginary vector
/// parts (the componentwise volume-force split for real media inputs).
struct ForcePower {
    Complex M{};
    Vec3c F{};
    Vec3 FH{}, FE{};

    /// The biquaternion M - iF this was extracted from.
    Biquaternion reassemble() const { return {M, -IMAG_UNIT * F}; }
};

ForcePower force_power(const Biquaternion& theta, const Biquaternion& a_ext);

/// Nodewise Theta ∘ A' as a biquaternion field (M - iF per node).
BiquatField force_power_field(const ChargeCurrent& theta, const FieldStrength& a_ext);

/// Reciprocity defect Theta1∘A2 + Theta2∘A1 per node (third-law residual).
BiquatField action_reaction_residual(const ChargeCurrent& theta1, const FieldStrength& a1,
                                     const ChargeCurrent& theta2, const FieldStrength& a2);

/// Which mutual gradient the second-law residual uses. The detailed
/// derivation uses D-, the N-field summary section prints D+ with the force
/// moved across the equality; both stay runnable behind this switch.
enum class SecondLawOperator { dminus, dplus };

/// dminus: r = kappa D- Theta - Theta∘A'.  dplus: r = kappa D+ Theta + Theta∘A'.
BiquatField second_law_residual(const ChargeCurrent& theta, const FieldStrength& a_ext,
                                double kappa,
                                SecondLawOperator op = SecondLawOperator::dminus);

/// Inertia law residual D- Theta (free charge-current).
BiquatField inertia_residual(const ChargeCurrent& theta);

/// Secondary report: the inertia residual resolved into the four component
/// laws (electric/gravimagnetic charge conservation and current transport),
/// recovered from the biquaternion residual with the media scalings.
/// Max-abs over the interior mask.
struct InertiaComponentReport {
    double charge_electric = 0.0;   // d_t rhoE + div jE
    double current_electric = 0.0;  // d_tau jE - sqrt(eps/mu) rot jH + c grad rhoE
    double charge_gravimag = 0.0;   // d_t rhoH + div jH
    double current_gravimag = 0.0;  // d_tau jH + sqrt(mu/eps) rot jE + c grad rhoH
};

InertiaComponentReport inertia_component_report(const BiquatField& inertia_res,
                                                const MediumConstants& m);

/// Residual of the scalar-strength source law: -i kappa box(a) - M on the
/// doubly-interior mask. `a` and `M` are complex scalar fields.
ScalarField scalar_field_source_residual(const ScalarField& a, const ScalarField& M,
                                         double kappa);

/// Charge-current energy-momentum pieces of 0.5 Theta∘Theta*:
/// W_theta = 0.5 |rho|^2 (charge terms), Q = 0.5 ||J||^2 (current energy),
/// P_J = 0.5 i J x bar(J) (current Poynting analog, real), and the own-rate
/// function U = div P_J - Re(grad rho, bar J).
struct ThetaEnergy {
    RealField W_theta;
    RealField Q;
    Vec3Field P_J;
    RealField U;
};

ThetaEnergy theta_energy(const ChargeCurrent& theta, const MediumConstants& m);

/// First law orientation: `algebra` uses the sign for which the residual
/// vanishes on solutions of kappa D- Theta = Theta∘A' (r = -Re(R_v, bar J)
/// identically); `flipped_force` negates the force coupling, the other sign
/// convention in circulation for this balance. Audits report both.
enum class FirstLawOrientation { algebra, flipped_force };

/// r = kappa (d_tau Q - div P_J + Re(grad rho, bar J)) +- Im((F, bar J)).
RealField first_law_residual(const ChargeCurrent& theta, const BiquatField& force_power,
                             double kappa, const MediumConstants& m,
                             FirstLawOrientation orient = FirstLawOrientation::algebra);

/// Axis-aligned index box for integral balances.
struct Region {
    int it0 = 0, it1 = 0;
    int ix0 = 0, ix1 = 0, iy0 = 0, iy1 = 0, iz0 = 0, iz1 = 0;
};

/// Integral first law over the spacetime cylinder region x [t0, t1]:
/// four fixed-order integrals and the balance defect
/// defect = dQ - flux + grad_term + force_term / kappa.
struct FirstLawBalance {
    double q_difference = 0.0;   // int_D (Q(t1) - Q(t0)) dV
    double flux = 0.0;           // int dt oint_dD (P_J, n) dS
    double grad_term = 0.0;      // int dt int_D Re(grad rho, bar J) dV
    double force_term = 0.0;     // int dt int_D Im(F, bar J) dV
    double defect = 0.0;
};

FirstLawBalance first_law_integral(const ChargeCurrent& theta, const BiquatField& force_power,
                                   double kappa, const MediumConstants& m, const Region& region);

/// Interaction energy-momentum of N charge-currents: the cross terms
/// delta_Xi = sum_{k != l} 0.5 (Theta^k ∘ Theta*^l + Theta^l ∘ Theta*^k),
/// split into the real energy density dW and the 3-vector dP, classified
/// per node and in aggregate.
enum class EnergyClass { release, absorb, conserve, exchange };

std::string to_string(EnergyClass c);

struct InteractionEnergy {
    RealField dW;
    std::vector<Vec3c> dP;  // node-ordered like dW
    std::vector<EnergyClass> node_class;
    EnergyClass aggregate = EnergyClass::conserve;
    double dW_integral = 0.0;
    double tolerance = 0.0;
};

InteractionEnergy interaction_energy(const std::vector<const ChargeCurrent*>& fields);

/// One explicit 4-stage (classical Runge-Kutta) step of
///   kappa D^op Theta^k = -+ Theta^k ∘ sum_{m != k} A^m
/// for every field, on one spatial slice. A-fields are frozen callables or
/// advanced by the Maxwell Cauchy solver, per DynamicsConfig.
struct DynamicsField {
    std::vector<Biquaternion> theta;  // spatial slice, z-fastest ordering
    FieldFn strength;                 // A^k(tau, x); frozen external field
};

struct DynamicsConfig {
    double kappa = 1.0;
    SecondLawOperator op = SecondLawOperator::dminus;
    double cfl_bound = 0.5;
    double divergence_bound = 1e8;
    bool advance_strengths = false;   // re-solve A^k per step via maxwell_cauchy
    SolverConfig solver;              // used when advance_strengths is set
};

struct DynamicsRecord {
    int step = 0;
    double tau = 0.0;
    double residual_second_law = 0.0;
    double residual_summary_free = 0.0;
    double action_reaction = 0.0;  // max over pairs of ||Th_k∘A_l + Th_l∘A_k||
    double deltaW_theta = 0.0;
    std::string classification;
    double energy_Q = 0.0;
    double flux_PJ = 0.0;
};

struct DynamicsResult {
    std::vector<BiquatField> trajectories;  // one per field, on the run grid
    std::vector<DynamicsRecord> records;    // one per completed step
};

/// Advances every field's spatial slice by one dtau step (classical 4-stage
/// Runge-Kutta in tau, spatial quaternion gradients per stage). `spatial`
/// supplies the slice geometry (its nt is ignored) and dtau the step.
/// Strength slices hold sum-ready A^k values at the step start; when a
/// strength callable is null it contributes nothing.
void multi_field_step(std::vector<std::vector<Biquaternion>>& theta_slices,
                      const Grid4& spatial, double tau,
                      const std::vector<FieldFn>& strengths, const DynamicsConfig& cfg);

/// Integrates N >= 2 interacting charge-currents over the grid's tau range,
/// recording the per-step audit quantities. Initial slices are sampled from
/// the initial callables at grid.tau0.
DynamicsResult run_dynamics(const Grid4& grid, const std::vector<SpatialFn>& initial,
                            const std::vector<FieldFn>& strengths, const DynamicsConfig& cfg,
                            const MediumConstants& m);

} // namespace egm
