#pragma once

namespace qpp {

/// Regularized incomplete beta I_x(a, b), evaluated with the Lentz continued
/// fraction on whichever tail converges fastest.
double incomplete_beta(double a, double b, double x);

/// Upper tail P(F > f) of the F(df1, df2) distribution; 1 at f = 0, 0 at +inf.
double f_survival(double f, double df1, double df2);

/// P(T <= t) for Student's t with df degrees of freedom.
double student_t_cdf(double t, double df);

/// Inverse of student_t_cdf for p in (0, 1).
double student_t_quantile(double p, double df);

} // namespace qpp
