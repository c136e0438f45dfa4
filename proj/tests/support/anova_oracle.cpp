#include "support/anova_oracle.hpp"

#include <algorithm>

#include <Eigen/Dense>

namespace qpp::testing {

namespace {

double rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  return (y - x * beta).squaredNorm();
}

} // namespace

OracleAnova ols_anova(const FactorialDataset& data, std::span<const TermFactors> terms) {
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = data.observations()[static_cast<std::size_t>(i)].response;

  // reference-coded dummies per factor: one column per non-first sorted level
  std::vector<Eigen::MatrixXd> dummies;
  for (std::size_t f = 0; f < data.factors().size(); ++f) {
    const auto sorted = data.sorted_levels(f);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(sorted.size() - 1));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& name = data.level_names(f)[data.observations()[static_cast<std::size_t>(i)].levels[f]];
      const auto pos = std::find(sorted.begin(), sorted.end(), name) - sorted.begin();
      if (pos > 0) d(i, pos - 1) = 1.0;
    }
    dummies.push_back(std::move(d));
  }

  OracleAnova out;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  double previous = rss(x, y);
  for (const auto& term : terms) {
    Eigen::MatrixXd cols = Eigen::MatrixXd::Ones(n, 1);
    std::string name;
    for (const auto& factor : term) {
      const Eigen::MatrixXd& d = dummies[data.factor_index(factor)];
      Eigen::MatrixXd next(n, cols.cols() * d.cols());
      for (Eigen::Index a = 0; a < cols.cols(); ++a) {
        for (Eigen::Index b = 0; b < d.cols(); ++b) next.col(a * d.cols() + b) = cols.col(a).cwiseProduct(d.col(b));
      }
      cols = std::move(next);
      name += (name.empty() ? "" : ":") + factor;
    }
    Eigen::MatrixXd grown(n, x.cols() + cols.cols());
    grown << x, cols;
    x = std::move(grown);
    const double current = rss(x, y);
    out.terms[name] = OracleRow{static_cast<double>(cols.cols()), previous - current, 0.0};
    previous = current;
  }
  out.residual_ss = previous;
  out.residual_df = static_cast<double>(n - x.cols());
  const double ms_res = out.residual_ss / out.residual_df;
  for (auto& [name, row] : out.terms) row.f = (row.ss / row.df) / ms_res;
  return out;
}

} // namespace qpp::testing
