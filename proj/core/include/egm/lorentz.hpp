#pragma once

#include <cstdint>
#include <vector>

#include "egm/grid.hpp"

namespace egm {

/// Boost/rotation parameters: unit axis e, rapidity half-parameter theta
/// (boost speed v = tanh(2 theta)) and rotation half-angle phi (rotation by
/// 2 phi about e). The half-parameter convention makes bar(L)∘star(L) = 1
/// exact in the algebra.
struct TransformParams {
    Vec3 e{1.0, 0.0, 0.0};
    double theta = 0.0;
    double phi = 0.0;

    double velocity() const { return std::tanh(2.0 * theta); }

    static TransformParams boost(const Vec3& axis, double v);
    static TransformParams rotation(const Vec3& axis, double half_angle);
};

/// Sandwich element L = ch(theta - i phi) + i e sh(theta - i phi), i.e. the
/// product W(phi)∘U(theta) of the rotation and boost factors about the same
/// axis. The phi sign is fixed by the group composition and the rotation
/// oracle (pure phi = pi/2 gives L = e, a rotation by pi about e); the
/// closed form with theta + i phi instead reverses the rotation handedness
/// against the W∘U composition and is rejected by the round-trip tests.
class LorentzElement {
public:
    LorentzElement() = default;
    explicit LorentzElement(const TransformParams& p);

    const TransformParams& params() const { return params_; }
    const Biquaternion& L() const { return L_; }
    const Biquaternion& Lstar() const { return Lstar_; }
    const Biquaternion& Lbar() const { return Lbar_; }
    const Biquaternion& Lbar_star() const { return Lbarstar_; }

private:
    TransformParams params_{};
    Biquaternion L_ = BQ_ONE, Lstar_ = BQ_ONE, Lbar_ = BQ_ONE, Lbarstar_ = BQ_ONE;
};

/// Validates the unit axis (BadUnitVector beyond 1e-10) and caches conjugates.
LorentzElement make_transform(const TransformParams& p);

/// Event map Z' = L∘Z∘L*. Preserves the pseudonorm scalar.
Biquaternion transform_event(const LorentzElement& L, const Biquaternion& Z);

/// Inverse event map Z = bar(L)*∘Z'∘bar(L). The alternative form L*∘Z'∘L
/// fails the round-trip identity (for a pure boost it re-applies the forward
/// map); the round-trip test picks this one.
Biquaternion inverse_event(const LorentzElement& L, const Biquaternion& Zp);

/// Field value rule K' = bar(L)*∘K∘L, inverse K = L∘K'∘bar(L)*.
Biquaternion transform_field_value(const LorentzElement& L, const Biquaternion& K);
Biquaternion inverse_field_value(const LorentzElement& L, const Biquaternion& Kp);

/// Event-type sandwich L∘X∘L* applied to an arbitrary value; the classical
/// relativistic component formulas are cross-checked against this family.
Biquaternion event_sandwich(const LorentzElement& L, const Biquaternion& X);

/// Classical strength formula: A' = (A - e(e,A)) + e (e,A)/sqrt(1-v^2).
Vec3c rel_strength(const Vec3c& A, const TransformParams& p);

/// Classical charge-current formulas:
/// rho' = (rho - v(e,J))/sqrt(1-v^2), J' = (J - e(e,J)) + e ((e,J) - v rho)/sqrt(1-v^2).
void rel_charge_current(const Complex& rho, const Vec3c& J, const TransformParams& p,
                        Complex& rho_out, Vec3c& J_out);

/// Classical force-power formulas:
/// M' = (M + v(e,F))/sqrt(1-v^2), F' = (F - e(e,F)) + e ((e,F) - v M)/sqrt(1-v^2).
void rel_force_power(const Complex& M, const Vec3c& F, const TransformParams& p,
                     Complex& M_out, Vec3c& F_out);

/// Pullback field transform: for every target node Z', evaluate the source
/// field at Z = inverse_event(Z') by tensor-product Lagrange interpolation
/// (order 1 = linear, order 2 = quadratic) and apply the field value rule.
struct FieldTransformResult {
    BiquatField field;
    std::vector<std::uint8_t> covered;  // 1 where the preimage stencil fit the source grid
    double covered_fraction = 0.0;
};

FieldTransformResult transform_field(const LorentzElement& L, const BiquatField& src,
                                     const Grid4& target, int interp_order = 2,
                                     bool require_full_coverage = false);

/// Max/mean norm of D+ A' - Theta' over the covered interior, where primes
/// are transform_field outputs. Small iff D+ A = Theta held in the source
/// frame (the free plane wave aligned with the boost axis is the audited
/// configuration).
struct CovarianceResidual {
    double residual_max = 0.0;
    double residual_mean = 0.0;
    double covered_fraction = 0.0;
    std::size_t masked_nodes = 0;
};

CovarianceResidual covariance_residual(const LorentzElement& L, const BiquatField& A,
                                       const BiquatField& theta, const Grid4& target,
                                       int interp_order = 2);

/// Deterministic consistency audit of the classical strength, charge-current
/// and force-power component formulas against the sandwich family, over
/// `count` random draws. Each entry is a max absolute deviation; the
/// component forms carry sign risk, so matches and characterized mismatches
/// are both reported.
struct ComponentFormulaAudit {
    // charge-current formula vs forward event sandwich (expected ~1e-12)
    double charge_vs_event = 0.0;
    // strength formula vs vector part of the forward event sandwich (~1e-12),
    // plus the scalar part the vector-only formula drops, vs -i v g (e,A)
    double strength_vs_event_vector = 0.0;
    double strength_scalar_term_gap = 0.0;
    // force-power: M' vs scalar of the inverse event sandwich (~1e-12) and
    // F' vs vector of the forward sandwich (~1e-12); the two cross pairings
    // are the characterized deviations
    double power_vs_inverse_event = 0.0;
    double force_vs_event = 0.0;
    double power_vs_event = 0.0;          // characterized sign deviation
    double force_vs_inverse_event = 0.0;  // characterized sign deviation
    // adjoint (field value) sandwich comparison: the scalar part of the
    // adjoint is invariant, so the charge formula deviates; characterized
    double charge_vs_adjoint = 0.0;
    std::uint64_t seed = 0;
    int count = 0;
};

ComponentFormulaAudit component_formula_audit(std::uint64_t seed, int count);

} // namespace egm
