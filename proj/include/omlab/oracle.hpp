#pragma once

#include "omlab/balls.hpp"
#include "omlab/fourier_field.hpp"

namespace omlab {

/// mu_0(ball) for the free field on T^1 truncated to cutoff <= 2 (at most four
/// real degrees of freedom), for a plain ball. Norm balls are star-shaped about
/// their center, so the probability is an angular integral of the Gaussian
/// mass along rays from the center up to the exit radius r / |direction|.
double gaussian_ball_prob_lowdim(const TorusSpec& torus, int cutoff, const BallSpec& spec);

/// p! sum_k f_k conj(g_k) (G_N^p)^_k = p! int int f(x) G_N(x - y)^p g(y) dx dy,
/// the covariance of <phi_N^{:p:}, f> and <phi_N^{:p:}, g> under the free field.
double wick_pair_moment(int p, const FourierField& f, const FourierField& g, int cutoff);

/// |binomial expansion - direct <H_p((phi - z)_n, c_n), 1>| divided by
/// sum_m C(p,m) |phi_n^{:m:}|_{L2} |z_n^{p-m}|_{L2} (or 1 if that is zero).
double binomial_direct_check(const FourierField& phi, const FourierField& z, int n, int p);

}  // namespace omlab
