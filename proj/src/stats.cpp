#include "voicemark/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "voicemark/simd/kernels.hpp"

namespace voicemark::stats {
namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample (n - 1)
  std::size_t n = 0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = x.size();
  if (x.empty()) return m;
  m.mean = simd::sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return m;
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = ss / static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  TTestResult out;
  if (a.size() < 2 || b.size() < 2) {
    out.degenerate = true;
    return out;
  }
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double sa = ma.var / static_cast<double>(ma.n);
  const double sb = mb.var / static_cast<double>(mb.n);
  const double se2 = sa + sb;
  if (!(se2 > 0.0)) {
    out.degenerate = true;
    return out;
  }
  out.t = (ma.mean - mb.mean) / std::sqrt(se2);
  out.df = se2 * se2 / (sa * sa / static_cast<double>(ma.n - 1) + sb * sb / static_cast<double>(mb.n - 1));
  out.p = student_t_two_sided_p(out.t, out.df);
  return out;
}

std::vector<double> bh_fdr(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bh_fdr: p-value outside [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return p[i] < p[j]; });
  std::vector<double> adjusted(m, 1.0);
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const double pk = p[order[k]];
    // p * m / k can round below p when k == m.
    const double candidate = std::max(pk, pk * static_cast<double>(m) / static_cast<double>(k + 1));
    running = std::min(running, candidate);
    adjusted[order[k]] = std::min(1.0, running);
  }
  return adjusted;
}

std::vector<GroupComparison> compare_groups(const FeatureMatrix& X, std::span<const int> labels,
                                            const CompareOptions& options) {
  if (labels.size() != X.rows()) throw std::invalid_argument("compare_groups: label count differs from row count");
  const bool has_a = std::find(labels.begin(), labels.end(), 0) != labels.end();
  const bool has_b = std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (!has_a || !has_b) throw std::invalid_argument("compare_groups: labels contain a single class");

  std::vector<GroupComparison> rows;
  std::vector<double> p_raw;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    std::vector<double> ga, gb, all;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const double v = X.at(r, c);
      if (is_missing(v)) continue;
      all.push_back(v);
      (labels[r] == 1 ? gb : ga).push_back(v);
    }
    if (options.standardize && all.size() >= 2) {
      const auto m = moments(all);
      const double sd = std::sqrt(m.var);
      if (sd > 0.0) {
        for (auto* group : {&ga, &gb}) {
          for (auto& v : *group) v = (v - m.mean) / sd;
        }
      }
    }
    GroupComparison row;
    row.feature = X.columns[c];
    row.n_a = ga.size();
    row.n_b = gb.size();
    row.mean_a = ga.empty() ? 0.0 : moments(ga).mean;
    row.mean_b = gb.empty() ? 0.0 : moments(gb).mean;
    const auto test = welch_t_test(ga, gb);
    row.t_stat = test.t;
    row.df = test.df;
    row.p_raw = test.p;
    row.degenerate = test.degenerate;
    p_raw.push_back(test.p);
    rows.push_back(std::move(row));
  }
  const auto adjusted = bh_fdr(p_raw);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].p_adj = adjusted[i];
    rows[i].significant = !rows[i].degenerate && adjusted[i] < options.alpha;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.p_raw != y.p_raw) return x.p_raw < y.p_raw;
    return x.feature < y.feature;
  });
  return rows;
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& X) {
  const std::size_t n = X.cols();
  CorrelationMatrix out;
  out.names = X.columns;
  out.r.assign(n * n, 0.0);
  out.degenerate.assign(n, false);

  std::vector<std::vector<double>> centered(n);
  std::vector<double> norms(n, 0.0);
  std::vector<bool> complete(n, true);
  for (std::size_t c = 0; c < n; ++c) {
    auto col = X.column(c);
    complete[c] = std::none_of(col.begin(), col.end(), is_missing);
    if (complete[c]) {
      const double mean = col.empty() ? 0.0 : simd::sum(col) / static_cast<double>(col.size());
      for (auto& v : col) v -= mean;
      norms[c] = std::sqrt(simd::sum_squares(col));
    }
    centered[c] = std::move(col);
  }

  auto pairwise = [&](std::size_t i, std::size_t j, bool& constant) {
    std::vector<double> a, b;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const double x = X.at(r, i);
      const double y = X.at(r, j);
      if (is_missing(x) || is_missing(y)) continue;
      a.push_back(x);
      b.push_back(y);
    }
    constant = true;
    if (a.size() < 2) return 0.0;
    const auto ma = moments(a);
    const auto mb = moments(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      sab += (a[k] - ma.mean) * (b[k] - mb.mean);
      saa += (a[k] - ma.mean) * (a[k] - ma.mean);
      sbb += (b[k] - mb.mean) * (b[k] - mb.mean);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    constant = false;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  };

  for (std::size_t c = 0; c < n; ++c) {
    if (complete[c]) {
      out.degenerate[c] = !(norms[c] > 0.0);
    } else {
      bool constant = false;
      pairwise(c, c, constant);
      out.degenerate[c] = constant;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.r[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = 0.0;
      if (!out.degenerate[i] && !out.degenerate[j]) {
        if (complete[i] && complete[j]) {
          r = std::clamp(simd::dot(centered[i], centered[j]) / (norms[i] * norms[j]), -1.0, 1.0);
        } else {
          bool constant = false;
          r = pairwise(i, j, constant);
        }
      }
      out.r[i * n + j] = r;
      out.r[j * n + i] = r;
    }
  }
  return out;
}

}  // namespace voicemark::stats
