#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "revaudit/filter.hpp"

namespace revaudit {

// Which score enters the model: the recorded integer score, or the
// pre-discretization latent score carried by generated data.
enum class ScoreChannel { observed, latent };

std::string_view to_string(ScoreChannel channel);
ScoreChannel parse_channel(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double width() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AnalysisRow {
  SubmissionId submission_id;
  double score_delta = 0.0;              // cited mean - uncited mean
  std::vector<double> covariate_deltas;  // same order as the covariate names
  int n_cited = 0;
  int n_uncited = 0;
  double weight = 0.0;  // 1 / (1/n_cited + 1/n_uncited)

  friend bool operator==(const AnalysisRow&, const AnalysisRow&) = default;
};

// One row per submission. Covariates constant across all rows are reported
// through `warnings`.
std::vector<AnalysisRow> build_rows(const AnalysisDataset& analysis, ScoreChannel channel = ScoreChannel::observed,
                                    std::vector<std::string>* warnings = nullptr);

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  Interval ci95;

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

struct FitResult {
  // coefficients[0] is alpha_star, the constant of the differenced model.
  std::vector<Coefficient> coefficients;
  double sigma0_hat = 0.0;
  std::size_t n_rows = 0;
  std::size_t df = 0;
  std::vector<double> fitted;
  std::vector<double> residuals;  // raw, y - fitted

  const Coefficient& alpha_star() const { return coefficients.front(); }

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

// score_delta ~ alpha_star + sum_j alpha_j * covariate_delta_j, weighted.
// Errors: sample_size when n_rows <= p; rank_deficient naming the columns
// that are linear combinations of earlier ones.
FitResult fit_wls(const std::vector<AnalysisRow>& rows, const std::vector<std::string>& covariate_names);
inline FitResult fit_wls(const std::vector<AnalysisRow>& rows, VenuePolicy model) {
  return fit_wls(rows, covariate_names(model));
}

// Removes covariates whose delta is identical on every row; returns the
// removed names.
std::vector<std::string> drop_constant_covariates(std::vector<AnalysisRow>& rows, std::vector<std::string>& names);

struct QqPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

struct ResidualPoint {
  SubmissionId submission_id;
  double fitted = 0.0;
  double weighted_residual = 0.0;  // sqrt(w) * (y - fitted)
};

struct DiagnosticsBundle {
  std::vector<ResidualPoint> residuals;
  std::vector<QqPoint> qq;  // standardized weighted residuals
};

// Sorted sample against normal quantiles at plotting positions
// (i - a) / (n + 1 - 2a), a = 3/8 for n <= 10 and 1/2 otherwise.
std::vector<QqPoint> normal_qq(std::vector<double> sample);

DiagnosticsBundle diagnostics(const FitResult& fit, const std::vector<AnalysisRow>& rows);

// Cited-minus-uncited difference of pooled mean scores, ignoring the
// submission structure, with its Welch standard error.
struct NaiveGap {
  double gap = 0.0;
  double std_error = 0.0;
};
NaiveGap naive_gap(const AnalysisDataset& analysis, ScoreChannel channel = ScoreChannel::observed);

void save_fit(const std::filesystem::path& path, const FitResult& fit, ScoreChannel channel,
              const std::vector<std::string>& warnings);
FitResult load_fit(const std::filesystem::path& path);
// residuals.csv: submission_id, fitted, weighted_residual; qq.csv: theoretical, sample
void save_diagnostics(const std::filesystem::path& directory, const DiagnosticsBundle& bundle);

}  // namespace revaudit
