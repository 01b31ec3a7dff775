#include "hypsym/paradiff.hpp"

#include <cmath>

namespace hypsym {

namespace {

/// S_k as running sums of the blocks: cuts[k] = sum_{i <= k} Delta_i.
std::vector<Eigen::VectorXd> running_sums(const std::vector<RealFunction>& blocks) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(blocks.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(blocks.front().size());
  for (const auto& b : blocks) {
    acc += b.values();
    out.push_back(acc);
  }
  return out;
}

Eigen::VectorXd paraproduct_from_blocks(const std::vector<RealFunction>& ub,
                                        const std::vector<RealFunction>& vb) {
  const auto cuts = running_sums(ub);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ub.front().size());
  for (std::size_t j = 2; j < vb.size(); ++j) out += cuts[j - 2].cwiseProduct(vb[j].values());
  return out;
}

Eigen::VectorXd remainder_from_blocks(const std::vector<RealFunction>& ub,
                                      const std::vector<RealFunction>& vb) {
  const int n = static_cast<int>(ub.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ub.front().size());
  for (int j = 0; j < n; ++j)
    for (int k = std::max(0, j - 1); k <= std::min(n - 1, j + 1); ++k)
      out += ub[j].values().cwiseProduct(vb[k].values());
  return out;
}

double inverse_sum(double a, double b) {
  // 1/c = 1/a + 1/b with infinities handled.
  const double inv = (std::isinf(a) ? 0.0 : 1.0 / a) + (std::isinf(b) ? 0.0 : 1.0 / b);
  return inv == 0.0 ? kInfinity : 1.0 / inv;
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den == 0.0 ? kInfinity : num / den;
}

}  // namespace

RealFunction paraproduct(const RealFunction& u, const RealFunction& v, const DyadicFilterBank& bank) {
  u.check_same_grid(v);
  return RealFunction(u.grid(), paraproduct_from_blocks(all_blocks(u, bank), all_blocks(v, bank)));
}

RealFunction remainder(const RealFunction& u, const RealFunction& v, const DyadicFilterBank& bank) {
  u.check_same_grid(v);
  return RealFunction(u.grid(), remainder_from_blocks(all_blocks(u, bank), all_blocks(v, bank)));
}

BonySplit bony_decomposition(const RealFunction& u, const RealFunction& v,
                             const DyadicFilterBank& bank) {
  u.check_same_grid(v);
  const auto ub = all_blocks(u, bank);
  const auto vb = all_blocks(v, bank);
  BonySplit out{RealFunction(u.grid(), paraproduct_from_blocks(ub, vb)),
                RealFunction(u.grid(), paraproduct_from_blocks(vb, ub)),
                RealFunction(u.grid(), remainder_from_blocks(ub, vb)), 0.0};
  const Eigen::VectorXd defect = out.tuv.values() + out.tvu.values() + out.r.values() -
                                 u.values().cwiseProduct(v.values());
  out.identity_residual = defect.cwiseAbs().maxCoeff();
  return out;
}

double paraproduct_bound_ratio(const RealFunction& u, const RealFunction& v, const BesovSpec& spec,
                               const DyadicFilterBank& bank) {
  const double num = besov_norm(paraproduct(u, v, bank), spec, bank).value;
  BesovSpec lower = spec;
  lower.s -= 1.0;
  const double den = sup_norm(u) * besov_norm(derivative(v), lower, bank).value;
  return safe_ratio(num, den);
}

double remainder_bound_ratio(const RealFunction& u, const RealFunction& v, const BesovSpec& spec_u,
                             const BesovSpec& spec_v, const DyadicFilterBank& bank) {
  BesovSpec target;
  target.s = spec_u.s + spec_v.s;
  target.alpha = spec_u.alpha + spec_v.alpha;
  target.p = inverse_sum(spec_u.p, spec_v.p);
  target.r = inverse_sum(spec_u.r, spec_v.r);
  if (!(target.p >= 1.0) || !(target.r >= 1.0))
    throw DomainError("remainder target exponents must satisfy 1/p, 1/r <= 1");
  if (target.s < 0.0) throw DomainError("remainder estimate needs s + t >= 0");
  if (target.s == 0.0) {
    if (target.alpha < 0.0 || target.r != 1.0)
      throw DomainError("borderline remainder estimate needs alpha + beta >= 0 and r = 1");
    target.r = kInfinity;
  }
  const double num = besov_norm(remainder(u, v, bank), target, bank).value;
  const double den =
      besov_norm(u, spec_u, bank).value * besov_norm(v, spec_v, bank).value;
  return safe_ratio(num, den);
}

CompositionReport composition_check(const std::function<double(double)>& F, const RealFunction& u,
                                    const BesovSpec& spec, const DyadicFilterBank& bank) {
  const bool admissible = spec.s > 0.0 || (spec.s == 0.0 && spec.alpha > 1.0 && std::isinf(spec.r));
  if (!admissible) throw DomainError("composition estimate needs s > 0, or s = 0, alpha > 1, r = inf");
  if (!u.values().allFinite()) throw DomainError("composition needs a bounded function");
  Eigen::VectorXd fu(u.size());
  for (Index i = 0; i < u.size(); ++i) fu[i] = F(u(i));
  if (!fu.allFinite()) throw DomainError("F is not finite on the range of u");
  BesovSpec lower = spec;
  lower.s -= 1.0;
  CompositionReport out;
  out.numerator = besov_norm(derivative(RealFunction(u.grid(), fu)), lower, bank).value;
  out.denominator = besov_norm(derivative(u), lower, bank).value;
  out.ratio = safe_ratio(out.numerator, out.denominator);
  return out;
}

}  // namespace hypsym
