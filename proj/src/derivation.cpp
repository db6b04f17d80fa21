#include "sephier/derivation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sephier/parallel.hpp"
#include "sephier/rng.hpp"

namespace sephier {

double ResidualMatrix::max_normalized() const {
  double best = 0.0;
  for (int a = 0; a < residual.rows(); ++a)
    for (int b = 0; b < residual.cols(); ++b) {
      const double s = scale(a, b);
      if (s > 0.0) best = std::max(best, std::abs(residual(a, b)) / s);
    }
  return best;
}

void ResidualMatrix::argmax(int& a_out, int& b_out) const {
  double best = -1.0;
  a_out = b_out = 0;
  for (int a = 0; a < residual.rows(); ++a)
    for (int b = 0; b < residual.cols(); ++b) {
      const double s = scale(a, b);
      const double v = s > 0.0 ? std::abs(residual(a, b)) / s : 0.0;
      if (v > best) {
        best = v;
        a_out = a;
        b_out = b;
      }
    }
}

ResidualMatrix plain_residual(const Hierarchy& hier_a, const Hierarchy& hier_b,
                              const Hierarchy& hier_ab, const Jet& alpha,
                              const Jet& beta_tilde) {
  const int m = hier_ab.spec.m;
  const PairJet a = plain_product_jet(alpha, beta_tilde);
  const Eigen::VectorXcd h2 = eval_operator(hier_ab, a);
  const Eigen::VectorXcd h1a = eval_operator(hier_a, alpha);
  const Eigen::VectorXcd h1b = eval_operator(hier_b, beta_tilde);

  ResidualMatrix out;
  out.residual.resize(m, m);
  out.scale.resize(m, m);
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib) {
      const cdouble t0 = h2(ia * m + ib);
      const cdouble t1 = h1a(ia) * beta_tilde.zeroth(ib);
      const cdouble t2 = alpha.zeroth(ia) * h1b(ib);
      out.residual(ia, ib) = t0 - (t1 + t2);
      out.scale(ia, ib) =
          std::max({std::abs(t0), std::abs(t1), std::abs(t2)});
    }
  return out;
}

namespace {

// Shared core of the symmetrized and conglomerate separability residuals:
// (1/prefactor) H_2(a_hat) minus the four-term right side, entrywise over
// the output internal indices, with the largest term magnitude as scale.
template <typename EvalH1, typename EvalH2>
ResidualMatrix separability_core(EvalH1&& eval_h1, EvalH2&& eval_h2,
                                 const ABQuadruple& ab, double prefactor,
                                 double sign) {
  const int m = ab.spec().m;
  const PairJet a_hat = pair_product_jet(ab, prefactor, sign);
  const Eigen::VectorXcd h2 = eval_h2(a_hat);
  const Eigen::VectorXcd h_alpha = eval_h1(ab.alpha);
  const Eigen::VectorXcd h_beta = eval_h1(ab.beta);
  const Eigen::VectorXcd h_alpha_t = eval_h1(ab.alpha_tilde);
  const Eigen::VectorXcd h_beta_t = eval_h1(ab.beta_tilde);
  const double inv_pref = 1.0 / prefactor;

  ResidualMatrix out;
  out.residual.resize(m, m);
  out.scale.resize(m, m);
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib) {
      const cdouble t0 = inv_pref * h2(ia * m + ib);
      const cdouble t1 = h_alpha(ia) * ab.beta_tilde.zeroth(ib);
      const cdouble t2 = ab.alpha.zeroth(ia) * h_beta_t(ib);
      const cdouble t3 = sign * h_beta(ia) * ab.alpha_tilde.zeroth(ib);
      const cdouble t4 = sign * ab.beta.zeroth(ia) * h_alpha_t(ib);
      out.residual(ia, ib) = t0 - (t1 + t2 + t3 + t4);
      out.scale(ia, ib) = std::max({std::abs(t0), std::abs(t1), std::abs(t2),
                                    std::abs(t3), std::abs(t4)});
    }
  return out;
}

}  // namespace

Eigen::MatrixXcd sym_separability_rhs(const Hierarchy& hierarchy,
                                      const ABQuadruple& ab) {
  const int m = hierarchy.spec.m;
  const double sign = hierarchy.stats.sign();
  const Eigen::VectorXcd h_alpha = eval_operator(hierarchy, ab.alpha);
  const Eigen::VectorXcd h_beta = eval_operator(hierarchy, ab.beta);
  const Eigen::VectorXcd h_alpha_t = eval_operator(hierarchy, ab.alpha_tilde);
  const Eigen::VectorXcd h_beta_t = eval_operator(hierarchy, ab.beta_tilde);
  Eigen::MatrixXcd rhs(m, m);
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib)
      rhs(ia, ib) = h_alpha(ia) * ab.beta_tilde.zeroth(ib) +
                    ab.alpha.zeroth(ia) * h_beta_t(ib) +
                    sign * h_beta(ia) * ab.alpha_tilde.zeroth(ib) +
                    sign * ab.beta.zeroth(ia) * h_alpha_t(ib);
  return rhs;
}

ResidualMatrix sym_residual(const Hierarchy& hierarchy, const ABQuadruple& ab) {
  return separability_core(
      [&](const Jet& jet) { return eval_operator(hierarchy, jet); },
      [&](const PairJet& pair) { return eval_operator(hierarchy, pair); }, ab,
      0.5, hierarchy.stats.sign());
}

ABQuadruple apply_flow(const ABQuadruple& ab, FlowKind kind, cdouble s,
                       Statistics stats) {
  ABQuadruple out = ab;
  switch (kind) {
    case FlowKind::Scale:
      if (s == cdouble(0.0, 0.0))
        throw ShapeError("apply_flow: the scale flow requires s != 0");
      out.alpha.values() *= s;
      out.beta_tilde.values() *= (cdouble(1.0, 0.0) / s);
      break;
    case FlowKind::Shift:
      out.alpha.values() += s * ab.beta.values();
      out.alpha_tilde.values() -= s * stats.sign() * ab.beta_tilde.values();
      break;
    case FlowKind::ShiftSwapped:
      out.beta.values() += s * ab.alpha.values();
      out.beta_tilde.values() -= s * stats.sign() * ab.alpha_tilde.values();
      break;
  }
  return out;
}

double flow_invariance_error(const Hierarchy& hierarchy, const ABQuadruple& ab,
                             FlowKind kind, cdouble s) {
  const PairJet before = sym_product_jet(ab, hierarchy.stats);
  const PairJet after =
      sym_product_jet(apply_flow(ab, kind, s, hierarchy.stats), hierarchy.stats);
  const double scale = before.values().cwiseAbs().maxCoeff();
  const double dev = (after.values() - before.values()).cwiseAbs().maxCoeff();
  return scale > 0.0 ? dev / scale : dev;
}

FlowBrackets flow_field_brackets(const Hierarchy& hierarchy,
                                 const ABQuadruple& ab) {
  const JetSpec& spec = hierarchy.spec;
  const int count = spec.index_count();

  FlowBrackets out;
  out.sum_x = Eigen::VectorXcd::Zero(spec.m);
  out.sum_y = Eigen::VectorXcd::Zero(spec.m);
  for (int c = 0; c < spec.m; ++c)
    for (int rank = 0; rank < count; ++rank) {
      out.sum_x += ab.beta.value(c, rank) *
                   wirtinger_grad(hierarchy, ab.alpha, c, rank);
      out.sum_y += ab.beta_tilde.value(c, rank) *
                   wirtinger_grad(hierarchy, ab.alpha_tilde, c, rank);
    }
  out.h_x = eval_operator(hierarchy, ab.beta);
  out.h_y = eval_operator(hierarchy, ab.beta_tilde);
  return out;
}

ResidualMatrix flow_field_residual(const Hierarchy& hierarchy,
                                   const ABQuadruple& ab) {
  const int m = hierarchy.spec.m;
  const FlowBrackets fb = flow_field_brackets(hierarchy, ab);

  ResidualMatrix out;
  out.residual.resize(m, m);
  out.scale.resize(m, m);
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib) {
      const cdouble bt0 = ab.beta_tilde.zeroth(ib);
      const cdouble b0 = ab.beta.zeroth(ia);
      const cdouble bracket_x = fb.sum_x(ia) - fb.h_x(ia);
      const cdouble bracket_y = fb.sum_y(ib) - fb.h_y(ib);
      out.residual(ia, ib) = bracket_x * bt0 - b0 * bracket_y;
      out.scale(ia, ib) =
          std::max({std::abs(fb.sum_x(ia) * bt0), std::abs(fb.h_x(ia) * bt0),
                    std::abs(b0 * fb.sum_y(ib)), std::abs(b0 * fb.h_y(ib))});
    }
  return out;
}

namespace {

cdouble complex_median(std::vector<cdouble> values) {
  auto middle = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  std::vector<double> re, im;
  re.reserve(values.size());
  im.reserve(values.size());
  for (cdouble v : values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return cdouble(middle(re), middle(im));
}

}  // namespace

LinearityCertificate linearity_certificate(const Hierarchy& hierarchy,
                                           int samples, std::uint64_t seed,
                                           double tolerance) {
  const JetSpec& spec = hierarchy.spec;
  if (samples < 2)
    throw ShapeError("linearity_certificate: at least two samples required");

  std::vector<cdouble> normalized(
      static_cast<std::size_t>(samples) * static_cast<std::size_t>(spec.m));
  parallel_for(samples, [&](int i) {
    const CertificateSample sample = sample_certificate_pair(spec, seed, i);
    Eigen::VectorXcd bracket = -eval_operator(hierarchy, sample.beta);
    for (int c = 0; c < spec.m; ++c)
      for (int rank = 0; rank < spec.index_count(); ++rank)
        bracket += sample.beta.value(c, rank) *
                   wirtinger_grad(hierarchy, sample.alpha, c, rank);
    for (int a = 0; a < spec.m; ++a) {
      const cdouble b0 = sample.beta.zeroth(a);
      if (b0 == cdouble(0.0, 0.0))
        throw ShapeError("linearity_certificate: degenerate sample with beta_0 = 0");
      normalized[static_cast<std::size_t>(i) * spec.m + a] = bracket(a) / b0;
    }
  });

  LinearityCertificate cert;
  cert.samples = samples;
  cert.k_hat = complex_median(normalized);
  cert.deviations.resize(normalized.size());
  for (std::size_t k = 0; k < normalized.size(); ++k) {
    cert.deviations[k] = std::abs(normalized[k] - cert.k_hat);
    if (cert.deviations[k] > cert.max_dev) {
      cert.max_dev = cert.deviations[k];
      cert.argmax_sample = static_cast<int>(k) / spec.m;
    }
  }
  cert.linear_consistent = cert.max_dev < tolerance;
  return cert;
}

JetSpec conglomerate_spec(const JetSpec& spec, int N) {
  if (N < 1) throw ShapeError("conglomerate_spec: N must be >= 1");
  int m_pow = 1;
  for (int k = 0; k < N; ++k) m_pow *= spec.m;
  return JetSpec{spec.d * N, spec.K * N, m_pow};
}

namespace {

// Views an arity-N jet variable as one conglomerate particle: internal
// indices bundle into one index, per-slot multi-indices concatenate.
class ConglomerateBinding final : public JetBinding {
 public:
  ConglomerateBinding(const Jet& jet, int N, const JetSpec& base)
      : jet_(jet), n_(N), base_(base) {}

  cdouble jet_value(const JetVarRef& ref, int pos) const override {
    if (static_cast<int>(ref.internals.size()) != n_)
      throw DomainError("jet variable arity does not match the conglomerate view", pos);
    const int a = encode_internal(ref.internals, base_.m);
    MultiIndex concat(n_ * base_.d);
    for (int j = 0; j < n_; ++j)
      concat.segment(j * base_.d, base_.d) = ref.orders[static_cast<std::size_t>(j)];
    const int rank = jet_.indices().index_of(concat);
    if (rank < 0)
      throw DomainError("multi-index outside the conglomerate table", pos);
    return jet_.value(a, rank);
  }

  double coordinate(int particle, int component) const override {
    return jet_.basepoint()(particle * base_.d + component);
  }

 private:
  const Jet& jet_;
  int n_;
  JetSpec base_;
};

class ConglomeratePairBinding final : public JetBinding {
 public:
  ConglomeratePairBinding(const PairJet& pair, int N, const JetSpec& base)
      : pair_(pair), n_(N), base_(base) {}

  cdouble jet_value(const JetVarRef& ref, int pos) const override {
    if (static_cast<int>(ref.internals.size()) != 2 * n_)
      throw DomainError("jet variable arity does not match the conglomerate view", pos);
    std::vector<int> left(ref.internals.begin(), ref.internals.begin() + n_);
    std::vector<int> right(ref.internals.begin() + n_, ref.internals.end());
    const int a = encode_internal(left, base_.m);
    const int b = encode_internal(right, base_.m);
    MultiIndex concat_i(n_ * base_.d), concat_j(n_ * base_.d);
    for (int j = 0; j < n_; ++j) {
      concat_i.segment(j * base_.d, base_.d) = ref.orders[static_cast<std::size_t>(j)];
      concat_j.segment(j * base_.d, base_.d) =
          ref.orders[static_cast<std::size_t>(j + n_)];
    }
    const int ri = pair_.indices().index_of(concat_i);
    const int rj = pair_.indices().index_of(concat_j);
    if (ri < 0 || rj < 0)
      throw DomainError("multi-index outside the conglomerate pair table", pos);
    return pair_.value(a, b, ri, rj);
  }

  double coordinate(int particle, int component) const override {
    if (particle < n_) return pair_.x()(particle * base_.d + component);
    return pair_.y()((particle - n_) * base_.d + component);
  }

 private:
  const PairJet& pair_;
  int n_;
  JetSpec base_;
};

Eigen::VectorXcd eval_bodies_with(const std::vector<ExprPtr>& bodies,
                                  const JetBinding& binding) {
  Eigen::VectorXcd out(static_cast<long>(bodies.size()));
  for (std::size_t c = 0; c < bodies.size(); ++c) {
    try {
      out(static_cast<long>(c)) = eval_expr(*bodies[c], binding);
    } catch (DomainError& err) {
      err.component = static_cast<int>(c);
      throw;
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXcd eval_conglomerate(const Hierarchy& hierarchy, int N,
                                   const Jet& conglomerate_jet) {
  if (!(conglomerate_jet.spec() == conglomerate_spec(hierarchy.spec, N)))
    throw ShapeError("eval_conglomerate: jet does not match the conglomerate spec");
  return eval_bodies_with(hierarchy.arity(N),
                          ConglomerateBinding(conglomerate_jet, N, hierarchy.spec));
}

Eigen::VectorXcd eval_conglomerate(const Hierarchy& hierarchy, int N,
                                   const PairJet& conglomerate_pair) {
  if (!(conglomerate_pair.spec() == conglomerate_spec(hierarchy.spec, N)))
    throw ShapeError("eval_conglomerate: pair does not match the conglomerate spec");
  return eval_bodies_with(
      hierarchy.arity(2 * N),
      ConglomeratePairBinding(conglomerate_pair, N, hierarchy.spec));
}

ResidualMatrix conglomerate_residual(const Hierarchy& hierarchy, int N,
                                     const ABQuadruple& conglomerate_ab,
                                     bool force_fermi_sign) {
  const double prefactor =
      static_cast<double>(factorial(N)) * static_cast<double>(factorial(N)) /
      static_cast<double>(factorial(2 * N));
  // Swapping two conglomerates of N particles is a permutation of parity
  // N^2 = N (mod 2), so the exchange sign is (-1)^(f N) for the restricted
  // family; for even N it is absent even in the Fermi case.
  const double sign = force_fermi_sign
                          ? hierarchy.stats.sign()
                          : ((hierarchy.stats.fermi && (N % 2)) ? -1.0 : 1.0);
  return separability_core(
      [&](const Jet& jet) { return eval_conglomerate(hierarchy, N, jet); },
      [&](const PairJet& pair) { return eval_conglomerate(hierarchy, N, pair); },
      conglomerate_ab, prefactor, sign);
}

Eigen::VectorXd sample_basepoint(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(d);
  for (int k = 0; k < d; ++k) x(k) = uniform_pm1(rng);
  return x;
}

PlainSample sample_plain_pair(const JetSpec& spec, std::uint64_t suite_seed,
                              int index) {
  const std::uint64_t base = mix_seed(suite_seed, static_cast<std::uint64_t>(index));
  const Eigen::VectorXd x = sample_basepoint(spec.d, mix_seed(base, 0));
  const Eigen::VectorXd y = sample_basepoint(spec.d, mix_seed(base, 1));
  return {random_jet(spec, x, mix_seed(base, 2)),
          random_jet(spec, y, mix_seed(base, 3))};
}

ABQuadruple sample_quadruple(const JetSpec& spec, std::uint64_t suite_seed,
                             int index) {
  const std::uint64_t base = mix_seed(suite_seed, static_cast<std::uint64_t>(index));
  const Eigen::VectorXd x = sample_basepoint(spec.d, mix_seed(base, 0));
  const Eigen::VectorXd y = sample_basepoint(spec.d, mix_seed(base, 1));
  return random_quadruple(spec, x, y, mix_seed(base, 2));
}

FlowSample sample_flow(const JetSpec& spec, std::uint64_t suite_seed, int index) {
  const std::uint64_t base = mix_seed(suite_seed, static_cast<std::uint64_t>(index));
  ABQuadruple ab = sample_quadruple(spec, suite_seed, index);
  const FlowKind kind = static_cast<FlowKind>(mix_seed(base, 10) % 3);
  std::mt19937_64 rng(mix_seed(base, 11));
  cdouble s(uniform_pm1(rng), uniform_pm1(rng));
  while (std::abs(s) < 0.1) s = cdouble(uniform_pm1(rng), uniform_pm1(rng));
  return {std::move(ab), kind, s};
}

CertificateSample sample_certificate_pair(const JetSpec& spec,
                                          std::uint64_t suite_seed, int index) {
  const std::uint64_t base = mix_seed(suite_seed, static_cast<std::uint64_t>(index));
  const Eigen::VectorXd x = sample_basepoint(spec.d, mix_seed(base, 0));
  return {random_jet(spec, x, mix_seed(base, 1)),
          random_jet(spec, x, mix_seed(base, 2))};
}

namespace {

template <typename PerSample>
ResidualReport run_sweep(std::string check, int samples, double tolerance,
                         PerSample&& per_sample) {
  ResidualReport report;
  report.check = std::move(check);
  report.samples = samples;
  report.tolerance = tolerance;
  report.per_sample.resize(static_cast<std::size_t>(samples));
  parallel_for(samples, [&](int i) {
    report.per_sample[static_cast<std::size_t>(i)] = per_sample(i);
  });
  for (int i = 0; i < samples; ++i)
    if (report.per_sample[static_cast<std::size_t>(i)] > report.max_normalized) {
      report.max_normalized = report.per_sample[static_cast<std::size_t>(i)];
      report.argmax_sample = i;
    }
  if (report.argmax_sample < 0 && samples > 0) report.argmax_sample = 0;
  report.pass = report.max_normalized < tolerance;
  return report;
}

}  // namespace

ResidualReport plain_sweep(const Hierarchy& hierarchy, int samples,
                           std::uint64_t seed, double tolerance) {
  return run_sweep("plain-derivation", samples, tolerance, [&](int i) {
    const PlainSample sample = sample_plain_pair(hierarchy.spec, seed, i);
    return plain_residual(hierarchy, hierarchy, hierarchy, sample.alpha,
                          sample.beta_tilde)
        .max_normalized();
  });
}

ResidualReport sym_sweep(const Hierarchy& hierarchy, int samples,
                         std::uint64_t seed, double tolerance) {
  return run_sweep("sym-derivation", samples, tolerance, [&](int i) {
    return sym_residual(hierarchy, sample_quadruple(hierarchy.spec, seed, i))
        .max_normalized();
  });
}

ResidualReport flow_invariance_sweep(const Hierarchy& hierarchy, int samples,
                                     std::uint64_t seed, double tolerance) {
  return run_sweep("flow-invariance", samples, tolerance, [&](int i) {
    const FlowSample sample = sample_flow(hierarchy.spec, seed, i);
    return flow_invariance_error(hierarchy, sample.ab, sample.kind, sample.s);
  });
}

ResidualReport flow_field_sweep(const Hierarchy& hierarchy, int samples,
                                std::uint64_t seed, double tolerance) {
  return run_sweep("flow-field", samples, tolerance, [&](int i) {
    return flow_field_residual(hierarchy,
                               sample_quadruple(hierarchy.spec, seed, i))
        .max_normalized();
  });
}

ResidualReport conglomerate_reduce(const Hierarchy& hierarchy, int N,
                                   int samples, std::uint64_t seed,
                                   double tolerance, bool force_fermi_sign) {
  if (!hierarchy.has_arity(N) || !hierarchy.has_arity(2 * N))
    throw ShapeError("conglomerate_reduce: hierarchy must provide arities " +
                     std::to_string(N) + " and " + std::to_string(2 * N));
  const JetSpec congl = conglomerate_spec(hierarchy.spec, N);
  ResidualReport report =
      run_sweep("conglomerate", samples, tolerance, [&](int i) {
        return conglomerate_residual(hierarchy, N,
                                     sample_quadruple(congl, seed, i),
                                     force_fermi_sign)
            .max_normalized();
      });
  return report;
}

}  // namespace sephier
