#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace leolink::detail {

/// Adaptive 31-point Gauss-Kronrod on a finite interval. `rel_tol` is
/// relative to the L1 norm of the integrand over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 15) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth,
                                                                      rel_tol);
}

}  // namespace leolink::detail
