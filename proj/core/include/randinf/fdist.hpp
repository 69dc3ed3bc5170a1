#pragma once

namespace randinf {

/// Reference F distribution with integer degrees of freedom.
struct FReference {
  int df1 = 1;
  int df2 = 1;
};

/// I_x(a, b) by Lentz's continued fraction, switching to 1 - I_{1-x}(b, a)
/// above x = (a+1)/(a+b+2). Throws Error{ConvergenceFailure} when the
/// fraction has not converged in 200 iterations.
double regularized_incomplete_beta(double a, double b, double x);

/// P(F > x). Throws Error{NegativeArgument} for x < 0 and
/// Error{InvalidArgument} for degrees of freedom below 1.
double f_survival(FReference ref, double x);

/// x with P(F <= x) = p. Throws Error{InvalidProbability} unless 0 < p < 1.
double f_quantile(FReference ref, double p);

}  // namespace randinf
