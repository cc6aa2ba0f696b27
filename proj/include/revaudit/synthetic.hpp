#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "revaudit/citation_parser.hpp"
#include "revaudit/dataset.hpp"
#include "revaudit/relation.hpp"

namespace revaudit {

struct MissingnessRates {
  double preference = 0.0;  // EC-like
  double confidence = 0.0;  // ICML-like
  double overlap = 0.0;
  double bid = 0.0;
};

struct GeneratorConfig {
  VenueConfig venue = VenueConfig::ec_like_defaults();
  std::size_t n_submissions = 300;
  int reviewers_per_paper = 3;
  std::size_t n_reviewers = 0;  // 0: n_submissions * reviewers_per_paper / 4, at least reviewers_per_paper + 1

  double alpha0 = 3.0;
  double alpha_quality = 0.8;
  std::vector<double> coefficients;  // per covariate_names(policy); empty: defaults
  double alpha_star = 0.0;
  double sigma0 = 1.0;

  double quality_mean = 0.0;
  double quality_sd = 1.0;

  double citation_prevalence = 0.15;   // per assigned pair
  double confounder_correlation = 0.0;  // Gaussian-copula correlation of citation and latent expertise
  MissingnessRates missingness;
  double exclusion_rate = 0.0;  // submissions with an adjudicated missing-citation flag

  bool render_references = true;
  std::size_t filler_references = 4;  // per submission
  std::size_t key_collisions = 0;     // reviewer pairs sharing one LASTNAME_F key

  std::uint64_t seed = 1;

  static GeneratorConfig ec_like();
  static GeneratorConfig icml_like();
  // Throws Error(validation) on out-of-range fields.
  void validate() const;
  std::vector<double> effective_coefficients() const;
  std::size_t effective_reviewers() const;
};

struct GroundTruth {
  double alpha_star = 0.0;
  std::vector<double> coefficients;
  double sigma0 = 0.0;
  std::map<SubmissionId, double> quality;
  std::map<PairKey, bool> cited;
  std::uint64_t seed = 0;
};

struct GeneratedConference {
  ReviewDataset dataset;       // covariates derived
  CitationRelation relation;   // ground-truth indicators, nothing ambiguous
  GroundTruth truth;
};

// Scores follow score = alpha0 + alpha_quality * quality + sum_j alpha_j x_j
// + alpha_star * cited + sigma0 * noise; the latent value is kept on each
// record and the observed score is the rounded value clamped to the venue
// scale. Deterministic in config.seed.
GeneratedConference generate(const GeneratorConfig& config);

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GeneratorConfig load_generator_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reference rendering

enum class ReferenceFormat { apa, ieee, acm, chicago, semicolon, harvard };
inline constexpr ReferenceFormat kAllFormats[] = {ReferenceFormat::apa,     ReferenceFormat::ieee,
                                                  ReferenceFormat::acm,     ReferenceFormat::chicago,
                                                  ReferenceFormat::semicolon, ReferenceFormat::harvard};

std::string_view to_string(ReferenceFormat format);

struct PersonName {
  std::string last_name;
  std::string first_name;
};

// Author list rendered in `format`; `et_al` appends "et al." after the
// listed authors.
std::string render_reference(const std::vector<PersonName>& authors, bool et_al, ReferenceFormat format,
                             const std::string& title, const std::string& venue, int year);

struct CorpusConfig {
  std::size_t n_entries = 1000;
  std::size_t pool_size = 200;
  std::size_t key_collisions = 0;
  double et_al_rate = 0.15;
  std::uint64_t seed = 1;
};

struct CorpusEntry {
  std::string text;
  ReferenceFormat format = ReferenceFormat::apa;
  std::vector<AuthorName> authors;  // what a faithful parse must return
  std::vector<ReviewerId> pool_authors;
};

struct ReferenceCorpus {
  std::vector<Reviewer> pool;
  std::vector<CorpusEntry> entries;
  std::vector<std::string> collided_keys;
};

ReferenceCorpus reference_corpus(const CorpusConfig& config);

}  // namespace revaudit
