#pragma once

#include "heun/poly.hpp"

namespace heun {

// The three roots of a monic cubic, order fixed by the caller.
struct CubicRoots {
  std::array<cplx, 3> a;
  bool collinear = false;

  CubicRoots(cplx a1, cplx a2, cplx a3);

  Triangle triangle() const { return Triangle(a[0], a[1], a[2]); }
  cplx centroid() const { return (a[0] + a[1] + a[2]) / 3.0; }
  double diameter() const { return triangle().diameter(); }
  // The index in {0,1,2} distinct from j and k.
  static int other_index(int j, int k);
};

// Chebyshev-Gauss rule; the node count absorbs the 1/sqrt endpoint factors
// of the side integrals.
struct ChebRule {
  int m = 200;
};

// f_jk(b) = int_{a_j}^{a_k} sqrt((b-t)/((t-a_1)(t-a_2)(t-a_3))) dt over the
// straight segment, branch continued node to node and the global sign fixed
// by homotopy from b = a_i where the value is +pi.
cplx f_jk(const CubicRoots& roots, cplx b, int j, int k, ChebRule rule = {});

// Derivative of f_jk in b, same branch convention (differentiation under the
// integral).  Requires b away from all three roots.
cplx f_jk_prime(const CubicRoots& roots, cplx b, int j, int k, ChebRule rule = {});

struct LoopResiduals {
  double r_pi;   // |f_jk(b) + int_b^{a_i} (...) - pi|
  double r_2pi;  // |sum of the three side integrals - 2 pi|
};

// Residuals of the two exact integral identities at an interior point b.
LoopResiduals loop_identities(const CubicRoots& roots, cplx b, ChebRule rule = {});

namespace detail {

// One side integral with cached geometry.  eval_anchored runs the full
// homotopy sign fix; eval_near reuses an anchored value at a nearby b,
// which is what the tracer and the Newton solver lean on.
class SideIntegrator {
 public:
  SideIntegrator(const CubicRoots& roots, int j, int k, int m);

  struct Value {
    cplx f;
    cplx fprime;
    cplx w_mid;  // branch value of the integrand at the middle node
    cplx t_mid;  // the middle node itself
  };

  Value eval_anchored(cplx b) const;
  Value eval_near(cplx b, const Value& ref) const;

  int j() const { return j_; }
  int k() const { return k_; }
  cplx third_root() const { return ai_; }

 private:
  Value raw(cplx b) const;

  cplx aj_, ak_, ai_;
  double guard_ = 0.0;
  std::vector<cplx> nodes_;
  std::vector<double> thetas_;
  cplx half_;
  int j_ = 0, k_ = 0;
};

}  // namespace detail

}  // namespace heun
