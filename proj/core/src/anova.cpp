#include "qpp/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "qpp/csv.hpp"
#include "qpp/distributions.hpp"
#include "qpp/error.hpp"

namespace qpp {

namespace {

// Sums of squares below this fraction of sum(y^2) are rounding noise.
constexpr double kSsFloor = 1e-24;

struct CanonicalObservation {
  std::vector<std::uint32_t> ranks; // per dataset factor, rank among sorted level names
  double response;
};

// Mixed-radix index over a subset of factors.
struct Layout {
  std::vector<std::size_t> factors;
  std::vector<std::size_t> radix;
  std::vector<std::size_t> stride;
  std::size_t size = 1;

  Layout(std::vector<std::size_t> fs, const std::vector<std::size_t>& level_counts) : factors(std::move(fs)) {
    for (std::size_t f : factors) {
      radix.push_back(level_counts[f]);
      stride.push_back(size);
      size *= level_counts[f];
    }
  }

  std::size_t index(const std::vector<std::uint32_t>& ranks) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) idx += ranks[factors[i]] * stride[i];
    return idx;
  }

  void decode(std::size_t idx, std::vector<std::uint32_t>& ranks) const {
    for (std::size_t i = 0; i < factors.size(); ++i) {
      ranks[factors[i]] = static_cast<std::uint32_t>((idx / stride[i]) % radix[i]);
    }
  }
};

struct Marginal {
  Layout layout;
  std::vector<double> mean;
  std::vector<double> count;
};

std::string term_name(const std::vector<std::string>& names, const std::vector<std::size_t>& factors) {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i > 0) out += ':';
    out += names[factors[i]];
  }
  return out;
}

std::vector<std::vector<std::size_t>> resolve_terms(const FactorialDataset& data, std::span<const TermFactors> terms) {
  if (terms.empty()) throw std::invalid_argument("fit_factorial: no terms requested");
  std::vector<std::vector<std::size_t>> out;
  std::set<std::vector<std::size_t>> seen;
  for (const auto& term : terms) {
    if (term.empty()) throw std::invalid_argument("fit_factorial: empty term");
    std::vector<std::size_t> idx;
    for (const auto& name : term) idx.push_back(data.factor_index(name));
    std::vector<std::size_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("fit_factorial: factor repeated within a term");
    }
    if (!seen.insert(sorted).second) throw std::invalid_argument("fit_factorial: duplicate term");
    out.push_back(std::move(idx));
  }
  return out;
}

std::vector<CanonicalObservation> canonicalize(const FactorialDataset& data) {
  const std::size_t nf = data.factors().size();
  std::vector<std::vector<std::uint32_t>> rank_of(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& names = data.level_names(f);
    std::vector<std::uint32_t> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
    rank_of[f].resize(names.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank_of[f][order[r]] = r;
  }
  std::vector<CanonicalObservation> obs;
  obs.reserve(data.size());
  for (const auto& o : data.observations()) {
    CanonicalObservation c{std::vector<std::uint32_t>(nf), o.response};
    for (std::size_t f = 0; f < nf; ++f) c.ranks[f] = rank_of[f][o.levels[f]];
    obs.push_back(std::move(c));
  }
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
    return a.ranks != b.ranks ? a.ranks < b.ranks : a.response < b.response;
  });
  return obs;
}

std::vector<std::size_t> level_counts(const FactorialDataset& data) {
  std::vector<std::size_t> counts;
  for (std::size_t f = 0; f < data.factors().size(); ++f) counts.push_back(data.level_names(f).size());
  return counts;
}

std::vector<std::size_t> involved_factors(const std::vector<std::vector<std::size_t>>& terms) {
  std::set<std::size_t> all;
  for (const auto& t : terms) all.insert(t.begin(), t.end());
  return {all.begin(), all.end()};
}

std::vector<double> cell_counts(const Layout& layout, const std::vector<CanonicalObservation>& obs) {
  std::vector<double> counts(layout.size, 0.0);
  for (const auto& o : obs) counts[layout.index(o.ranks)] += 1.0;
  return counts;
}

std::optional<double> omega_or_empty(double df, double f, double n, OmegaVariant variant) {
  try {
    return omega_squared(df, f, n, variant);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  } catch (const UndefinedResult&) {
    return std::nullopt;
  }
}

} // namespace

FactorialDataset::FactorialDataset(std::vector<std::string> factors)
    : factors_(std::move(factors)), level_names_(factors_.size()), level_ids_(factors_.size()) {
  if (factors_.empty()) throw std::invalid_argument("FactorialDataset needs at least one factor");
  std::set<std::string> unique(factors_.begin(), factors_.end());
  if (unique.size() != factors_.size()) throw std::invalid_argument("FactorialDataset: duplicate factor name");
}

void FactorialDataset::add(std::span<const std::string> levels, double response) {
  if (levels.size() != factors_.size()) {
    throw std::invalid_argument(
        fmt::format("observation has {} levels for {} factors", levels.size(), factors_.size()));
  }
  if (!std::isfinite(response)) throw InputError("non-finite response in factorial dataset");
  Observation obs;
  obs.response = response;
  obs.levels.reserve(levels.size());
  for (std::size_t f = 0; f < levels.size(); ++f) {
    auto& ids = level_ids_[f];
    auto it = ids.find(levels[f]);
    if (it == ids.end()) {
      it = ids.emplace(levels[f], static_cast<std::uint32_t>(level_names_[f].size())).first;
      level_names_[f].push_back(levels[f]);
    }
    obs.levels.push_back(it->second);
  }
  observations_.push_back(std::move(obs));
}

std::size_t FactorialDataset::factor_index(std::string_view name) const {
  const auto it = std::find(factors_.begin(), factors_.end(), name);
  if (it == factors_.end()) throw std::invalid_argument(fmt::format("unknown factor '{}'", name));
  return static_cast<std::size_t>(it - factors_.begin());
}

std::vector<std::string> FactorialDataset::sorted_levels(std::size_t f) const {
  auto names = level_names_.at(f);
  std::sort(names.begin(), names.end());
  return names;
}

const AnovaRow& AnovaTable::term(std::string_view name) const {
  for (const auto& row : terms) {
    if (row.term == name) return row;
  }
  throw std::out_of_range(fmt::format("no ANOVA term '{}'", name));
}

void AnovaTable::write_csv(std::ostream& out) const {
  out << "term,df,ss,ms,f,p,omega2\n";
  for (const auto& r : terms) {
    out << csv::join({r.term, csv::format_double(r.df), csv::format_double(r.ss), csv::format_double(r.ms),
                      csv::format_double(r.f), csv::format_double(r.p), csv::format_optional(r.omega2)})
        << '\n';
  }
  out << csv::join({"Residual", csv::format_double(residual.df), csv::format_double(residual.ss),
                    csv::format_double(residual.ms), "", "", ""})
      << '\n';
  out << csv::join({"Total", csv::format_double(total_df), csv::format_double(total_ss), "", "", "", ""}) << '\n';
}

std::string AnovaTable::to_text() const {
  std::size_t width = 8;
  for (const auto& r : terms) width = std::max(width, r.term.size());
  std::string out = fmt::format("{:<{}}  {:>7}  {:>14}  {:>14}  {:>12}  {:>11}  {:>9}  {}\n", "term", width, "df",
                                "SS", "MS", "F", "p", "omega2", "SOA");
  for (const auto& r : terms) {
    const std::string omega = r.omega2 ? fmt::format("{:.4f}", *r.omega2) : std::string("undef");
    const std::string soa = r.omega2 && *r.omega2 >= 0.0 && *r.omega2 <= 1.0 ? std::string(to_string(soa_class(*r.omega2)))
                                                                             : std::string("-");
    out += fmt::format("{:<{}}  {:>7}  {:>14.6g}  {:>14.6g}  {:>12.6g}  {:>11.4g}  {:>9}  {}\n", r.term, width, r.df,
                       r.ss, r.ms, r.f, r.p, omega, soa);
  }
  out += fmt::format("{:<{}}  {:>7}  {:>14.6g}  {:>14.6g}\n", "Residual", width, residual.df, residual.ss,
                     residual.ms);
  out += fmt::format("{:<{}}  {:>7}  {:>14.6g}\n", "Total", width, total_df, total_ss);
  out += fmt::format("N = {}, grand mean = {:.6g}, design = {}, omega2 = {}\n", observations, grand_mean,
                     balanced ? "balanced" : "proportional", omega_variant == OmegaVariant::standard ? "standard" : "direct");
  return out;
}

AnovaTable fit_factorial(const FactorialDataset& data, std::span<const TermFactors> terms, OmegaVariant variant) {
  const auto resolved = resolve_terms(data, terms);
  const std::size_t n_obs = data.size();
  if (n_obs == 0) throw InputError("fit_factorial: empty dataset");
  const double n = static_cast<double>(n_obs);
  const auto obs = canonicalize(data);
  const auto levels = level_counts(data);
  const auto involved = involved_factors(resolved);

  // design check over the full crossing of the involved factors
  const Layout full(involved, levels);
  const auto counts = cell_counts(full, obs);
  std::vector<std::vector<double>> marginal_counts;
  for (std::size_t f : involved) {
    const auto c = cell_counts(Layout({f}, levels), obs);
    marginal_counts.push_back(c);
  }
  bool balanced = true;
  std::vector<std::uint32_t> ranks(data.factors().size(), 0);
  for (std::size_t cell = 0; cell < full.size; ++cell) {
    full.decode(cell, ranks);
    if (counts[cell] == 0.0) {
      std::string where;
      for (std::size_t i = 0; i < involved.size(); ++i) {
        where += fmt::format("{}{}={}", i ? ", " : "", data.factors()[involved[i]],
                             data.sorted_levels(involved[i])[ranks[involved[i]]]);
      }
      throw InputError(fmt::format("unbalanced design: empty cell ({})", where));
    }
    double expected = n;
    for (std::size_t i = 0; i < involved.size(); ++i) expected *= marginal_counts[i][ranks[involved[i]]] / n;
    if (std::abs(counts[cell] - expected) > 1e-9 * expected) {
      throw InputError("unbalanced design: cell counts are neither equal nor proportional");
    }
    if (counts[cell] != counts[0]) balanced = false;
  }

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& o : obs) {
    sum += o.response;
    sum_sq += o.response * o.response;
  }
  const double grand_mean = sum / n;
  const double floor = kSsFloor * sum_sq;
  double total_ss = 0.0;
  for (const auto& o : obs) total_ss += (o.response - grand_mean) * (o.response - grand_mean);
  if (total_ss < floor) total_ss = 0.0;

  std::map<std::vector<std::size_t>, Marginal> marginals;
  const auto marginal_for = [&](const std::vector<std::size_t>& factors) -> const Marginal& {
    auto it = marginals.find(factors);
    if (it != marginals.end()) return it->second;
    Marginal m{Layout(factors, levels), {}, {}};
    m.mean.assign(m.layout.size, 0.0);
    m.count.assign(m.layout.size, 0.0);
    for (const auto& o : obs) {
      const std::size_t idx = m.layout.index(o.ranks);
      m.mean[idx] += o.response;
      m.count[idx] += 1.0;
    }
    for (std::size_t i = 0; i < m.mean.size(); ++i) m.mean[i] /= m.count[i];
    return marginals.emplace(factors, std::move(m)).first->second;
  };

  AnovaTable table;
  table.observations = n_obs;
  table.grand_mean = grand_mean;
  table.total_ss = total_ss;
  table.total_df = n - 1.0;
  table.balanced = balanced;
  table.omega_variant = variant;

  // effect of term S at a level combination: inclusion-exclusion over the
  // marginal means of every subset of S
  std::vector<std::vector<double>> effects;
  std::vector<Layout> term_layouts;
  double df_terms = 0.0;
  for (const auto& term : resolved) {
    std::vector<std::size_t> sorted = term;
    std::sort(sorted.begin(), sorted.end());
    const Marginal& own = marginal_for(sorted);
    std::vector<double> effect(own.layout.size, 0.0);
    std::vector<std::uint32_t> r(data.factors().size(), 0);
    const std::size_t m = sorted.size();
    for (std::size_t combo = 0; combo < own.layout.size; ++combo) {
      own.layout.decode(combo, r);
      double e = 0.0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < m; ++i) {
          if (mask & (std::size_t{1} << i)) subset.push_back(sorted[i]);
        }
        const double sign = ((m - subset.size()) % 2 == 0) ? 1.0 : -1.0;
        const double mean_u = subset.empty() ? grand_mean : [&] {
          const Marginal& mu = marginal_for(subset);
          return mu.mean[mu.layout.index(r)];
        }();
        e += sign * mean_u;
      }
      effect[combo] = e;
    }
    double ss = 0.0;
    for (std::size_t combo = 0; combo < own.layout.size; ++combo) ss += own.count[combo] * effect[combo] * effect[combo];
    if (ss < floor) ss = 0.0;

    AnovaRow row;
    row.factors.reserve(term.size());
    for (std::size_t f : term) row.factors.push_back(data.factors()[f]);
    row.term = term_name(data.factors(), term);
    row.df = 1.0;
    for (std::size_t f : term) row.df *= static_cast<double>(levels[f] - 1);
    row.ss = ss;
    df_terms += row.df;
    table.terms.push_back(std::move(row));
    effects.push_back(std::move(effect));
    term_layouts.push_back(own.layout);
  }

  const double df_res = n - 1.0 - df_terms;
  if (df_res <= 0.0) {
    throw InputError(fmt::format("saturated model: residual degrees of freedom {} <= 0", df_res));
  }
  double ss_res = 0.0;
  for (const auto& o : obs) {
    double fitted = grand_mean;
    for (std::size_t t = 0; t < effects.size(); ++t) fitted += effects[t][term_layouts[t].index(o.ranks)];
    ss_res += (o.response - fitted) * (o.response - fitted);
  }
  if (ss_res < floor) ss_res = 0.0;
  table.residual.term = "Residual";
  table.residual.df = df_res;
  table.residual.ss = ss_res;
  table.residual.ms = ss_res / df_res;
  table.residual.f = std::numeric_limits<double>::quiet_NaN();
  table.residual.p = std::numeric_limits<double>::quiet_NaN();

  for (auto& row : table.terms) {
    row.ms = row.df > 0.0 ? row.ss / row.df : 0.0;
    if (row.df == 0.0 || row.ss == 0.0) {
      row.f = 0.0;
      row.p = 1.0;
    } else if (table.residual.ms == 0.0) {
      row.f = std::numeric_limits<double>::infinity();
      row.p = 0.0;
    } else {
      row.f = row.ms / table.residual.ms;
      row.p = f_survival(row.f, row.df, df_res);
    }
    row.omega2 = omega_or_empty(row.df, row.f, n, variant);
  }
  return table;
}

FactorialDataset drop_incomplete_levels(const FactorialDataset& data, std::string_view factor,
                                        std::span<const TermFactors> terms) {
  const auto resolved = resolve_terms(data, terms);
  auto involved = involved_factors(resolved);
  const std::size_t target_factor = data.factor_index(factor);
  if (std::find(involved.begin(), involved.end(), target_factor) == involved.end()) {
    involved.push_back(target_factor);
    std::sort(involved.begin(), involved.end());
  }
  const auto obs = canonicalize(data);
  const auto levels = level_counts(data);
  const Layout full(involved, levels);
  const auto counts = cell_counts(full, obs);

  std::map<double, std::size_t> frequency;
  for (double c : counts) {
    if (c > 0.0) ++frequency[c];
  }
  double target = 0.0;
  std::size_t best = 0;
  for (const auto& [c, freq] : frequency) {
    if (freq >= best) {
      best = freq;
      target = c;
    }
  }
  std::set<std::uint32_t> bad_ranks;
  std::vector<std::uint32_t> ranks(data.factors().size(), 0);
  for (std::size_t cell = 0; cell < full.size; ++cell) {
    if (counts[cell] != target) {
      full.decode(cell, ranks);
      bad_ranks.insert(ranks[target_factor]);
    }
  }
  const auto sorted = data.sorted_levels(target_factor);
  std::set<std::string, std::less<>> bad;
  for (auto r : bad_ranks) bad.insert(sorted[r]);

  FactorialDataset out(data.factors());
  std::vector<std::string> names(data.factors().size());
  for (const auto& o : data.observations()) {
    for (std::size_t f = 0; f < names.size(); ++f) names[f] = data.level_names(f)[o.levels[f]];
    if (bad.contains(names[target_factor])) continue;
    out.add(names, o.response);
  }
  return out;
}

double omega_squared(double df_term, double f, double n, OmegaVariant variant) {
  if (!(n > df_term + 1.0)) throw std::invalid_argument("omega_squared: requires N > df + 1");
  if (!(f >= 0.0)) throw std::invalid_argument("omega_squared: requires F >= 0");
  if (variant == OmegaVariant::direct) {
    if (f <= 1.0) throw UndefinedResult("omega_squared (direct variant): undefined for F <= 1");
    if (std::isinf(f)) return 1.0 / n;
    return (df_term * f) / (df_term * (f - 1.0) * n);
  }
  if (std::isinf(f)) return 1.0;
  const double effect = df_term * (f - 1.0);
  const double value = effect / (effect + n);
  return std::clamp(value, 0.0, 1.0);
}

Soa soa_class(double omega2) {
  if (omega2 < 0.06) return Soa::small;
  if (omega2 < 0.14) return Soa::medium;
  return Soa::large;
}

std::string_view to_string(Soa soa) {
  switch (soa) {
  case Soa::small: return "small";
  case Soa::medium: return "medium";
  case Soa::large: return "large";
  }
  return "?";
}

std::vector<MarginalMean> marginal_means_ci(const FactorialDataset& data, const AnovaTable& fit,
                                            std::span<const std::string> factors, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");
  if (factors.empty()) throw std::invalid_argument("marginal_means_ci: no factors given");
  std::vector<std::size_t> idx;
  for (const auto& name : factors) idx.push_back(data.factor_index(name));

  std::map<std::vector<std::string>, std::pair<double, std::size_t>> groups;
  const auto obs = canonicalize(data);
  std::vector<std::vector<std::string>> sorted_names;
  for (std::size_t f = 0; f < data.factors().size(); ++f) sorted_names.push_back(data.sorted_levels(f));
  for (const auto& o : obs) {
    std::vector<std::string> key;
    for (std::size_t f : idx) key.push_back(sorted_names[f][o.ranks[f]]);
    auto& g = groups[key];
    g.first += o.response;
    g.second += 1;
  }

  const double t = fit.residual.ms > 0.0 ? student_t_quantile((1.0 + confidence) / 2.0, fit.residual.df) : 0.0;
  std::vector<MarginalMean> out;
  for (const auto& [key, g] : groups) {
    MarginalMean m;
    m.levels = key;
    m.n = g.second;
    m.mean = g.first / static_cast<double>(g.second);
    const double half = t * std::sqrt(fit.residual.ms / static_cast<double>(g.second));
    m.lo = m.mean - half;
    m.hi = m.mean + half;
    out.push_back(std::move(m));
  }
  return out;
}

} // namespace qpp
