#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sephier/hierarchy.hpp"

namespace sephier {

/// Componentwise residual over the output internal indices (A, B), together
/// with the largest contributing term magnitude per entry. Tolerances act on
/// residual/scale so they stay meaningful under the scale flow.
struct ResidualMatrix {
  Eigen::MatrixXcd residual;  // (A, B)
  Eigen::MatrixXd scale;      // max |contributing term| per entry

  double max_normalized() const;
  void argmax(int& a, int& b) const;
};

/// Leibniz residual of the plain product:
/// H_2(a) - [H_1(alpha) bt_0 + alpha_0 H_1(bt)] with a_{I,J} = alpha_I bt_J.
/// The three hierarchies may be one and the same object.
ResidualMatrix plain_residual(const Hierarchy& hier_a, const Hierarchy& hier_b,
                              const Hierarchy& hier_ab, const Jet& alpha,
                              const Jet& beta_tilde);

/// Four-term right side of the symmetrized separability condition:
/// H_1^A(x,alpha) bt_0^B + alpha_0^A H_1^B(y,bt)
/// + (-1)^f H_1^A(x,beta) at_0^B + (-1)^f beta_0^A H_1^B(y,at).
Eigen::MatrixXcd sym_separability_rhs(const Hierarchy& hierarchy,
                                      const ABQuadruple& ab);

/// Symmetrized separability residual: 2 H_2(a_hat) - rhs, with a_hat built by
/// sym_product_jet.
ResidualMatrix sym_residual(const Hierarchy& hierarchy, const ABQuadruple& ab);

/// Flows on the alpha/beta quantities that leave the constrained pair jet
/// invariant: scale (alpha -> s alpha, bt -> bt/s), shift
/// (alpha -> alpha + s beta, at -> at - s (-1)^f bt), and the shift with
/// alpha and beta interchanged.
enum class FlowKind { Scale, Shift, ShiftSwapped };

ABQuadruple apply_flow(const ABQuadruple& ab, FlowKind kind, cdouble s,
                       Statistics stats);

/// Relative change of sym_product_jet under one flow application (exact
/// algebra says zero; the measured value is pure rounding).
double flow_invariance_error(const Hierarchy& hierarchy, const ABQuadruple& ab,
                             FlowKind kind, cdouble s);

/// The two bracket terms of the flow-field annihilation identity:
/// at_x^A = sum_{C,I} beta_I^C dH_1^A/dalpha_I^C (x, alpha) - H_1^A(x, beta),
/// at_y^B likewise with tilded quantities at y. Sums and H values are kept
/// separate for scale-free normalization.
struct FlowBrackets {
  Eigen::VectorXcd sum_x, h_x;  // bracket at x = sum_x - h_x
  Eigen::VectorXcd sum_y, h_y;
};

FlowBrackets flow_field_brackets(const Hierarchy& hierarchy,
                                 const ABQuadruple& ab);

/// Residual of the annihilation identity:
/// (bracket at x)^A bt_0^B - beta_0^A (bracket at y)^B.
ResidualMatrix flow_field_residual(const Hierarchy& hierarchy,
                                   const ABQuadruple& ab);

/// Constant-k linearity certificate: the normalized bracket
/// [sum beta dH/dalpha - H(beta)]^A / beta_0^A must be one constant over all
/// generic samples and components; any spread flags the operator nonlinear.
struct LinearityCertificate {
  cdouble k_hat{};
  double max_dev = 0.0;
  int samples = 0;
  bool linear_consistent = false;
  int argmax_sample = -1;
  std::vector<double> deviations;  // per (sample, component), flattened
};

LinearityCertificate linearity_certificate(const Hierarchy& hierarchy,
                                           int samples, std::uint64_t seed,
                                           double tolerance);

/// Spec of a single conglomerate particle bundling N particles: dimension
/// N*d, order N*K, m^N internal components.
JetSpec conglomerate_spec(const JetSpec& spec, int N);

/// Arity-N operator evaluated on a one-conglomerate-particle jet
/// (multi-index concatenation, internal indices bundled).
Eigen::VectorXcd eval_conglomerate(const Hierarchy& hierarchy, int N,
                                   const Jet& conglomerate_jet);

/// Arity-2N operator evaluated on a conglomerate pair jet.
Eigen::VectorXcd eval_conglomerate(const Hierarchy& hierarchy, int N,
                                   const PairJet& conglomerate_pair);

/// Separability residual for two conglomerate particles: prefactor
/// N!^2/(2N)! replaces 1/2 and the exchange sign is (-1)^(f N) — absent for
/// even N even in the Fermi case — unless force_fermi_sign keeps (-1)^f.
ResidualMatrix conglomerate_residual(const Hierarchy& hierarchy, int N,
                                     const ABQuadruple& conglomerate_ab,
                                     bool force_fermi_sign = false);

/// Sweep outcome: max normalized residual over seeded samples plus the
/// sample index achieving it (regenerable from the seed for witnesses).
struct ResidualReport {
  std::string check;
  int samples = 0;
  double max_normalized = 0.0;
  int argmax_sample = -1;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<double> per_sample;
};

// Deterministic sample inputs, shared by sweeps and witness replay.
Eigen::VectorXd sample_basepoint(int d, std::uint64_t seed);

struct PlainSample {
  Jet alpha;
  Jet beta_tilde;
};
PlainSample sample_plain_pair(const JetSpec& spec, std::uint64_t suite_seed,
                              int index);

ABQuadruple sample_quadruple(const JetSpec& spec, std::uint64_t suite_seed,
                             int index);

struct FlowSample {
  ABQuadruple ab;
  FlowKind kind;
  cdouble s;
};
FlowSample sample_flow(const JetSpec& spec, std::uint64_t suite_seed, int index);

struct CertificateSample {
  Jet alpha;
  Jet beta;
};
CertificateSample sample_certificate_pair(const JetSpec& spec,
                                          std::uint64_t suite_seed, int index);

ResidualReport plain_sweep(const Hierarchy& hierarchy, int samples,
                           std::uint64_t seed, double tolerance);
ResidualReport sym_sweep(const Hierarchy& hierarchy, int samples,
                         std::uint64_t seed, double tolerance);
/// Relative invariance error of sym_product_jet under sampled flows.
ResidualReport flow_invariance_sweep(const Hierarchy& hierarchy, int samples,
                                     std::uint64_t seed, double tolerance);
ResidualReport flow_field_sweep(const Hierarchy& hierarchy, int samples,
                                std::uint64_t seed, double tolerance);
ResidualReport conglomerate_reduce(const Hierarchy& hierarchy, int N,
                                   int samples, std::uint64_t seed,
                                   double tolerance,
                                   bool force_fermi_sign = false);

}  // namespace sephier
