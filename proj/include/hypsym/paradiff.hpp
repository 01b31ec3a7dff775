#pragma once

#include <functional>

#include "hypsym/littlewood_paley.hpp"

namespace hypsym {

/// T_u v = sum_{j >= 2} S_{j-2}u Delta_j v.
RealFunction paraproduct(const RealFunction& u, const RealFunction& v, const DyadicFilterBank& bank);

/// R(u, v) = sum_j sum_{|k-j| <= 1} Delta_j u Delta_k v. With the S_{j-2}
/// cut-off in the paraproduct this is exactly the set of block pairs not
/// covered by T_u v and T_v u, so uv = T_u v + T_v u + R(u, v) holds as an
/// algebraic identity on the samples.
RealFunction remainder(const RealFunction& u, const RealFunction& v, const DyadicFilterBank& bank);

struct BonySplit {
  RealFunction tuv;
  RealFunction tvu;
  RealFunction r;
  /// max |T_u v + T_v u + R - uv|
  double identity_residual = 0.0;
};

BonySplit bony_decomposition(const RealFunction& u, const RealFunction& v,
                             const DyadicFilterBank& bank);

/// ||T_u v||_{B^{s+alpha log}_{p,r}} / (||u||_inf ||d_t v||_{B^{(s-1)+alpha log}_{p,r}}).
double paraproduct_bound_ratio(const RealFunction& u, const RealFunction& v, const BesovSpec& spec,
                               const DyadicFilterBank& bank);

/// ||R(u,v)||_{target} / (||u||_{spec_u} ||v||_{spec_v}) where the target has
/// regularity s+t, log index alpha+beta and 1/p = 1/p1 + 1/p2,
/// 1/r = 1/r1 + 1/r2. For s+t = 0 the target summation index is infinity
/// and alpha+beta >= 0, r = 1 are required; s+t < 0 is a DomainError.
double remainder_bound_ratio(const RealFunction& u, const RealFunction& v, const BesovSpec& spec_u,
                             const BesovSpec& spec_v, const DyadicFilterBank& bank);

struct CompositionReport {
  double numerator = 0.0;    ///< ||d_t(F o u)||_{B^{(s-1)+alpha log}_{p,r}}
  double denominator = 0.0;  ///< ||d_t u||_{B^{(s-1)+alpha log}_{p,r}}
  double ratio = 0.0;        ///< 0 when both vanish
};

/// Measures the left-composition bound for a smooth F. Requires s > 0, or
/// s = 0 with alpha > 1 and r = infinity; u must be finite.
CompositionReport composition_check(const std::function<double(double)>& F, const RealFunction& u,
                                    const BesovSpec& spec, const DyadicFilterBank& bank);

}  // namespace hypsym
