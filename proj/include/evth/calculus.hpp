#pragma once

#include <span>

#include "evth/grid.hpp"
#include "evth/sym3.hpp"

namespace evth {

/// 4th-order centered first derivative of one component along axis 0..2,
/// periodic wraparound. Grouped as (8(f+1 - f-1) - (f+2 - f-2))/(12h) so a
/// constant field differentiates to exactly zero in floating point.
void fd_derivative(const GridSpec& grid, std::span<const double> in, int axis,
                   std::span<double> out);

ScalarField fd_derivative(const ScalarField& f, int axis);

struct MetricPointwise {
  SymTensorField inverse;
  ScalarField det;
};

/// Pointwise inverse and determinant; throws NonPositiveDefiniteError with
/// the offending point if any leading principal minor is <= 0.
MetricPointwise metric_pointwise(const SymTensorField& g);

/// The derived geometry of a slice metric, bundled so the evolution right-
/// hand side and the per-step monitors can share one computation.
struct StateGeometry {
  MetricPointwise mp;
  Rank3Field gamma;
  SymTensorField ric;
};

StateGeometry compute_geometry(const SymTensorField& g);

/// Gamma^c_{ab} = 1/2 g^{cd} (d_a g_db + d_b g_da - d_d g_ab).
Rank3Field christoffel(const SymTensorField& g);
Rank3Field christoffel(const SymTensorField& g, const SymTensorField& ginv);

/// R_ij = d_c Gamma^c_ij - d_i Gamma^c_cj + Gamma^c_cd Gamma^d_ij
///        - Gamma^c_id Gamma^d_cj.
SymTensorField ricci(const SymTensorField& g);
SymTensorField ricci(const SymTensorField& g, const SymTensorField& ginv,
                     const Rank3Field& gamma);

ScalarField scalar_curvature(const SymTensorField& g);
ScalarField scalar_curvature(const SymTensorField& ricci_tensor,
                             const SymTensorField& ginv);

/// Covariant Hessian of a scalar: d_i d_j s - Gamma^c_ij d_c s. Second
/// partials are composed first-derivative stencils.
SymTensorField covariant_hessian(const ScalarField& s, const SymTensorField& g);
SymTensorField covariant_hessian(const ScalarField& s, const Rank3Field& gamma);

/// Covariant derivative of a covariant symmetric 2-tensor:
/// (nabla_a k)_ij = d_a k_ij - Gamma^c_{ai} k_cj - Gamma^c_{aj} k_ic.
Rank3Field covariant_derivative_sym(const SymTensorField& k, const Rank3Field& gamma);

struct NormPair {
  double sup = 0.0;
  double l2 = 0.0;
};

/// Sup and L2 norms with indices contracted against g. `weighted` applies the
/// Riemannian volume element sqrt(det g) h^3 to the L2 sum; otherwise the
/// coordinate measure h^3 is used. Reduction order is fixed (linear sweep).
NormPair norms(const ScalarField& t, const SymTensorField& g, bool weighted = true);
NormPair norms(const Vec3Field& t, const SymTensorField& g, bool weighted = true);
NormPair norms(const SymTensorField& t, const SymTensorField& g, bool weighted = true);

}  // namespace evth
