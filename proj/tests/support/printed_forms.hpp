#pragma once

// Coordinate-free reference forms of the first heat invariants and Taylor
// operators, specialized to a concrete dimension. Independent of the
// closed-formula and recurrence code paths.

#include "ssf/jet_algebra.hpp"

namespace ssf::reference {

inline Coefficient q(long num, long den = 1) { return Coefficient(mpq_class(num, den)); }

inline JetPoly grad_dot(const JetPoly& a, const JetPoly& b) {
  JetPoly r(a.dim());
  for (int i = 0; i < a.dim(); ++i) r += a.derivative(i) * b.derivative(i);
  return r;
}

inline JetPoly hessian_trace_square(const JetPoly& a) {
  JetPoly r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      JetPoly h = a.derivative(i).derivative(j);
      r += h * h;
    }
  return r;
}

inline JetPoly printed_g(int n, int d) {
  const JetPoly v = JetPoly::v(d);
  const JetPoly lap = v.laplacian();
  const JetPoly lap2 = lap.laplacian();
  const JetPoly grad2 = grad_dot(v, v);
  switch (n) {
    case 0: return JetPoly(d, q(1));
    case 1: return -v;
    case 2: return v * v * q(1, 2) - lap * q(1, 6);
    case 3: return (v * v * v - v * lap - grad2 * q(1, 2) + lap2 * q(1, 10)) * q(-1, 6);
    case 4:
      return pow(v, 4) * q(1, 24) + grad_dot(v, lap) * q(1, 30) + v * lap2 * q(1, 60) + lap * lap * q(1, 72) -
             lap2.laplacian() * q(1, 840) - v * v * lap * q(1, 12) - v * grad2 * q(1, 12) +
             hessian_trace_square(v) * q(1, 90);
    default: return JetPoly(d);
  }
}

inline DiffOp printed_x(int n, int d) {
  const JetPoly v = JetPoly::v(d);
  const JetPoly lap = v.laplacian();
  DiffOp op(d);
  switch (n) {
    case 0: return DiffOp::identity(d);
    case 1: return DiffOp::multiply(-v);
    case 2:
      for (int i = 0; i < d; ++i) op.add(MultiIndex::unit(i), v.derivative(i) * q(-2));
      op.add(MultiIndex{}, -lap + v * v);
      return op;
    case 3:
      // <Hess v grad, grad> is the operator sum_ij d_i o (v_ij d_j): unlike
      // (grad v) and (Laplacian v), the Hessian factor is not parenthesized,
      // so the outer derivative also acts on it.
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          DiffOp term = compose(DiffOp::partial(d, MultiIndex::unit(i)),
                                compose(DiffOp::multiply(v.derivative(i).derivative(j) * q(-4)),
                                        DiffOp::partial(d, MultiIndex::unit(j))));
          op += term;
        }
      for (int i = 0; i < d; ++i) op.add(MultiIndex::unit(i), v * v.derivative(i) * q(6));
      op.add(MultiIndex{}, -lap.laplacian() + grad_dot(v, v) * q(2) + v * lap * q(3) - v * v * v);
      return op;
    default: return op;
  }
}

}  // namespace ssf::reference
