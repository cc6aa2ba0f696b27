#include "revaudit/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "revaudit/csv.hpp"
#include "revaudit/error.hpp"
#include "revaudit/kernels.hpp"

namespace revaudit {

std::string_view to_string(ScoreChannel channel) { return channel == ScoreChannel::observed ? "observed" : "latent"; }

ScoreChannel parse_channel(std::string_view text) {
  if (text == "observed") return ScoreChannel::observed;
  if (text == "latent") return ScoreChannel::latent;
  throw Error(ErrorKind::usage, "unknown score channel '" + std::string(text) + "' (expected observed|latent)");
}

namespace {

double latent_of(const AnalysisPair& p, const SubmissionId& s) {
  if (!p.latent_score)
    throw Error(ErrorKind::validation, "latent channel requested but pair (" + s.str() + ", " + p.reviewer.str() +
                                           ") has no latent score");
  return *p.latent_score;
}

}  // namespace

std::vector<AnalysisRow> build_rows(const AnalysisDataset& analysis, ScoreChannel channel,
                                    std::vector<std::string>* warnings) {
  const std::size_t q = analysis.covariate_names.size();
  std::vector<AnalysisRow> rows;
  rows.reserve(analysis.groups.size());
  for (const auto& g : analysis.groups) {
    if (g.cited.empty() || g.uncited.empty())
      throw Error(ErrorKind::validation, "submission " + g.id.str() + " lacks a cited or an uncited pair");
    AnalysisRow row;
    row.submission_id = g.id;
    row.n_cited = static_cast<int>(g.cited.size());
    row.n_uncited = static_cast<int>(g.uncited.size());
    const double nc = row.n_cited, nu = row.n_uncited;
    // Cross-multiplied form: integer sums stay exact, so a constant added to
    // every score of the submission cancels bit for bit.
    if (channel == ScoreChannel::observed) {
      long long sc = 0, su = 0;
      for (const auto& p : g.cited) sc += p.score;
      for (const auto& p : g.uncited) su += p.score;
      row.score_delta = static_cast<double>(row.n_uncited * sc - row.n_cited * su) / (nc * nu);
    } else {
      double sc = 0, su = 0;
      for (const auto& p : g.cited) sc += latent_of(p, g.id);
      for (const auto& p : g.uncited) su += latent_of(p, g.id);
      row.score_delta = sc / nc - su / nu;
    }
    row.covariate_deltas.assign(q, 0.0);
    for (std::size_t j = 0; j < q; ++j) {
      double sc = 0, su = 0;
      for (const auto& p : g.cited) sc += p.covariates.at(j);
      for (const auto& p : g.uncited) su += p.covariates.at(j);
      row.covariate_deltas[j] = (nu * sc - nc * su) / (nc * nu);
    }
    row.weight = nc * nu / (nc + nu);
    rows.push_back(std::move(row));
  }
  if (warnings && !rows.empty()) {
    for (std::size_t j = 0; j < q; ++j) {
      const double first = rows.front().covariate_deltas[j];
      const bool constant = std::all_of(rows.begin(), rows.end(),
                                        [&](const AnalysisRow& r) { return r.covariate_deltas[j] == first; });
      if (constant)
        warnings->push_back("rank deficiency: covariate delta " + analysis.covariate_names[j] +
                            " is constant across all rows");
    }
  }
  return rows;
}

std::vector<std::string> drop_constant_covariates(std::vector<AnalysisRow>& rows, std::vector<std::string>& names) {
  std::vector<std::string> removed;
  if (rows.empty()) return removed;
  for (std::size_t j = names.size(); j-- > 0;) {
    const double first = rows.front().covariate_deltas[j];
    const bool constant =
        std::all_of(rows.begin(), rows.end(), [&](const AnalysisRow& r) { return r.covariate_deltas[j] == first; });
    if (!constant) continue;
    removed.insert(removed.begin(), names[j]);
    names.erase(names.begin() + static_cast<std::ptrdiff_t>(j));
    for (auto& r : rows) r.covariate_deltas.erase(r.covariate_deltas.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return removed;
}

FitResult fit_wls(const std::vector<AnalysisRow>& rows, const std::vector<std::string>& covariate_names) {
  const std::size_t n = rows.size();
  const std::size_t p = covariate_names.size() + 1;
  if (n <= p)
    throw Error(ErrorKind::sample_size, "weighted regression needs more rows than parameters: " + std::to_string(n) +
                                            " rows, " + std::to_string(p) + " parameters");
  std::vector<std::string> names{"alpha_star"};
  names.insert(names.end(), covariate_names.begin(), covariate_names.end());

  std::vector<double> x(n * p), w(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    if (r.covariate_deltas.size() != p - 1)
      throw Error(ErrorKind::validation, "row " + r.submission_id.str() + " has " +
                                             std::to_string(r.covariate_deltas.size()) + " covariate deltas, expected " +
                                             std::to_string(p - 1));
    if (!(r.weight > 0.0)) throw Error(ErrorKind::validation, "row " + r.submission_id.str() + " has non-positive weight");
    x[i] = 1.0;
    for (std::size_t j = 1; j < p; ++j) x[j * n + i] = r.covariate_deltas[j - 1];
    w[i] = r.weight;
    y[i] = r.score_delta;
  }

  std::vector<double> gram(p * p), xty(p);
  kernels::active().weighted_gram(x.data(), w.data(), y.data(), n, p, gram.data(), xty.data());

  // Cholesky, lower triangle in place; a pivot that vanishes relative to the
  // column's own norm marks that column as dependent on earlier ones.
  std::vector<double> l(p * p, 0.0);
  std::vector<std::string> dependent;
  for (std::size_t j = 0; j < p; ++j) {
    double d = gram[j * p + j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j * p + k] * l[j * p + k];
    if (!(d > 1e-10 * gram[j * p + j])) {
      dependent.push_back(names[j]);
      continue;
    }
    l[j * p + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = gram[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
      l[i * p + j] = s / l[j * p + j];
    }
  }
  if (!dependent.empty()) {
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw Error(ErrorKind::rank_deficient, "rank-deficient design: collinear column(s) " + list);
  }

  auto solve = [&](std::vector<double> b) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * p + k] * b[k];
      b[i] /= l[i * p + i];
    }
    for (std::size_t i = p; i-- > 0;) {
      for (std::size_t k = i + 1; k < p; ++k) b[i] -= l[k * p + i] * b[k];
      b[i] /= l[i * p + i];
    }
    return b;
  };
  const std::vector<double> beta = solve(xty);

  FitResult fit;
  fit.n_rows = n;
  fit.df = n - p;
  fit.fitted.resize(n);
  fit.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < p; ++j) f += x[j * n + i] * beta[j];
    fit.fitted[i] = f;
    fit.residuals[i] = y[i] - f;
    rss += w[i] * fit.residuals[i] * fit.residuals[i];
  }
  const double sigma2 = rss / static_cast<double>(fit.df);
  fit.sigma0_hat = std::sqrt(sigma2);

  const boost::math::students_t tdist(static_cast<double>(fit.df));
  const double tq = boost::math::quantile(boost::math::complement(tdist, 0.025));
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> e(p, 0.0);
    e[j] = 1.0;
    const double vjj = solve(std::move(e))[j];
    Coefficient c;
    c.name = names[j];
    c.estimate = beta[j];
    c.std_error = std::sqrt(sigma2 * vjj);
    if (c.std_error > 0.0) {
      c.t_stat = c.estimate / c.std_error;
      c.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(tdist, std::fabs(c.t_stat))));
    } else {
      c.t_stat = c.estimate == 0.0 ? 0.0 : std::copysign(INFINITY, c.estimate);
      c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
    }
    c.ci95 = {c.estimate - tq * c.std_error, c.estimate + tq * c.std_error};
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

std::vector<QqPoint> normal_qq(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const std::size_t n = sample.size();
  const double a = n <= 10 ? 3.0 / 8.0 : 0.5;
  const boost::math::normal_distribution<double> z;
  std::vector<QqPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pp = (static_cast<double>(i + 1) - a) / (static_cast<double>(n) + 1.0 - 2.0 * a);
    out[i] = {boost::math::quantile(z, pp), sample[i]};
  }
  return out;
}

DiagnosticsBundle diagnostics(const FitResult& fit, const std::vector<AnalysisRow>& rows) {
  if (fit.fitted.size() != rows.size() || fit.residuals.size() != rows.size())
    throw Error(ErrorKind::validation, "fit and rows differ in length");
  DiagnosticsBundle out;
  std::vector<double> standardized;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double wr = std::sqrt(rows[i].weight) * fit.residuals[i];
    out.residuals.push_back({rows[i].submission_id, fit.fitted[i], wr});
    standardized.push_back(fit.sigma0_hat > 0.0 ? wr / fit.sigma0_hat : 0.0);
  }
  out.qq = normal_qq(std::move(standardized));
  return out;
}

NaiveGap naive_gap(const AnalysisDataset& analysis, ScoreChannel channel) {
  std::vector<double> c, u;
  for (const auto& g : analysis.groups) {
    for (const auto& p : g.cited) c.push_back(channel == ScoreChannel::observed ? p.score : latent_of(p, g.id));
    for (const auto& p : g.uncited) u.push_back(channel == ScoreChannel::observed ? p.score : latent_of(p, g.id));
  }
  if (c.size() < 2 || u.size() < 2) throw Error(ErrorKind::sample_size, "naive gap needs two pairs per stratum");
  auto moments = [](const std::vector<double>& v) {
    double m = 0;
    for (double s : v) m += s;
    m /= static_cast<double>(v.size());
    double ss = 0;
    for (double s : v) ss += (s - m) * (s - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [mc, vc] = moments(c);
  const auto [mu, vu] = moments(u);
  return {mc - mu, std::sqrt(vc / static_cast<double>(c.size()) + vu / static_cast<double>(u.size()))};
}

void save_fit(const std::filesystem::path& path, const FitResult& fit, ScoreChannel channel,
              const std::vector<std::string>& warnings) {
  nlohmann::ordered_json j;
  j["channel"] = std::string(to_string(channel));
  j["n_rows"] = fit.n_rows;
  j["df"] = fit.df;
  j["sigma0_hat"] = fit.sigma0_hat;
  j["coefficients"] = nlohmann::ordered_json::array();
  for (const auto& c : fit.coefficients) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["estimate"] = c.estimate;
    e["std_error"] = c.std_error;
    e["t_stat"] = std::isfinite(c.t_stat) ? nlohmann::ordered_json(c.t_stat) : nlohmann::ordered_json(nullptr);
    e["p_value"] = c.p_value;
    e["ci95"] = {c.ci95.lo, c.ci95.hi};
    j["coefficients"].push_back(std::move(e));
  }
  j["warnings"] = warnings;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

FitResult load_fit(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_artifact, "missing artifact: " + path.string());
  FitResult fit;
  try {
    nlohmann::json j;
    in >> j;
    fit.n_rows = j.at("n_rows").get<std::size_t>();
    fit.df = j.at("df").get<std::size_t>();
    fit.sigma0_hat = j.at("sigma0_hat").get<double>();
    for (const auto& e : j.at("coefficients")) {
      Coefficient c;
      c.name = e.at("name").get<std::string>();
      c.estimate = e.at("estimate").get<double>();
      c.std_error = e.at("std_error").get<double>();
      c.t_stat = e.at("t_stat").is_null() ? std::copysign(INFINITY, c.estimate) : e.at("t_stat").get<double>();
      c.p_value = e.at("p_value").get<double>();
      c.ci95 = {e.at("ci95").at(0).get<double>(), e.at("ci95").at(1).get<double>()};
      fit.coefficients.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  if (fit.coefficients.empty()) throw Error(ErrorKind::parse, path.string() + ": no coefficients");
  return fit;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void save_diagnostics(const std::filesystem::path& directory, const DiagnosticsBundle& bundle) {
  std::filesystem::create_directories(directory);
  csv::Table r;
  r.header = {"submission_id", "fitted", "weighted_residual"};
  for (const auto& p : bundle.residuals) r.rows.push_back({p.submission_id.str(), num(p.fitted), num(p.weighted_residual)});
  csv::write(directory / "residuals.csv", r);
  csv::Table q;
  q.header = {"theoretical", "sample"};
  for (const auto& p : bundle.qq) q.rows.push_back({num(p.theoretical), num(p.sample)});
  csv::write(directory / "qq.csv", q);
}

}  // namespace revaudit
