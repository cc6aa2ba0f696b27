#include "revaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "revaudit/error.hpp"
#include "revaudit/names.hpp"
#include "revaudit/rng.hpp"

namespace revaudit {

GeneratorConfig GeneratorConfig::ec_like() {
  GeneratorConfig c;
  c.missingness.preference = 0.18;
  return c;
}

GeneratorConfig GeneratorConfig::icml_like() {
  GeneratorConfig c;
  c.venue = VenueConfig::icml_like_defaults();
  c.alpha0 = 3.5;
  c.alpha_quality = 0.4;
  c.citation_prevalence = 0.2;
  c.missingness.confidence = 0.01;
  c.missingness.overlap = 0.13;
  c.missingness.bid = 0.05;
  return c;
}

void GeneratorConfig::validate() const {
  venue.validate();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::validation, "generator config: " + what); };
  if (n_submissions == 0) fail("n_submissions must be positive");
  if (reviewers_per_paper < 2) fail("reviewers_per_paper must be at least 2");
  if (!(sigma0 > 0.0)) fail("sigma0 must be positive");
  if (!(quality_sd >= 0.0)) fail("quality_sd must be non-negative");
  auto unit = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0, 1]");
  };
  unit(citation_prevalence, "citation_prevalence");
  unit(missingness.preference, "missingness.preference");
  unit(missingness.confidence, "missingness.confidence");
  unit(missingness.overlap, "missingness.overlap");
  unit(missingness.bid, "missingness.bid");
  unit(exclusion_rate, "exclusion_rate");
  if (!(confounder_correlation >= -1.0 && confounder_correlation <= 1.0))
    fail("confounder_correlation must lie in [-1, 1]");
  if (!coefficients.empty() && coefficients.size() != covariate_names(venue.venue_policy).size())
    fail("coefficients must have one entry per covariate");
  if (effective_reviewers() < static_cast<std::size_t>(reviewers_per_paper))
    throw Error(ErrorKind::infeasible, "generator config: fewer reviewers than reviewers_per_paper");
  if (2 * key_collisions > effective_reviewers()) fail("key_collisions exceeds half the reviewer pool");
}

std::vector<double> GeneratorConfig::effective_coefficients() const {
  if (!coefficients.empty()) return coefficients;
  if (venue.venue_policy == VenuePolicy::ec_like) return {0.15, -0.004, -0.1, -0.2};
  return {0.15, 0.1, 0.5, 0.1, -0.2};
}

std::size_t GeneratorConfig::effective_reviewers() const {
  if (n_reviewers != 0) return n_reviewers;
  const std::size_t k = static_cast<std::size_t>(reviewers_per_paper);
  return std::max(k + 1, (n_submissions * k + 3) / 4);
}

// ---------------------------------------------------------------------------
// Names

namespace {

constexpr const char* kOnsets[] = {"b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "br", "ch", "st", "tr", "sh"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ei"};
constexpr const char* kCodas[] = {"", "", "n", "r", "s", "l", "k", "m", "tt"};
constexpr const char* kAccented[] = {"á", "é", "ö", "ü", "ñ", "è", "ó", "ç"};
constexpr const char* kParticles[] = {"van ", "de ", "Di ", "O'", "von ", "Mac"};
constexpr const char* kGiven[] = {"John", "Alice", "Kim", "Maria", "Wei", "Rahul", "Sofia", "Ahmed", "Yuki", "Elena",
                                  "Tomás", "Élodie", "Zoë", "Jean-Pierre", "Åsa", "Ömer", "Priya", "Lucas", "Hana",
                                  "Omar", "Ingrid", "Diego", "Mei", "Noah", "Chloé", "Kwame", "Ivan", "Laura", "Femi",
                                  "Bruno", "Nadia", "Pedro", "Greta", "Arjun", "Lena", "Victor", "Yara", "Emil"};
constexpr const char* kTitleWords[] = {"learning", "graphs", "robust", "estimation", "under", "sparse", "markets",
                                       "mechanisms", "optimal", "bandits", "networks", "inference", "fair", "allocation",
                                       "stochastic", "games", "deep", "models", "online", "auctions", "causal",
                                       "effects", "kernel", "methods", "private", "queries", "matching", "theory"};
constexpr const char* kVenues[] = {"Proceedings of the Conference on Learning", "Journal of Economic Theory",
                                   "Transactions on Algorithms", "Workshop on Markets", "Annals of Statistics"};

template <typename T, std::size_t N>
const T& pick(rng::Xoshiro256& g, const T (&arr)[N]) {
  return arr[g.below(N)];
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string syllables(rng::Xoshiro256& g, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += std::string(pick(g, kOnsets)) + pick(g, kVowels);
  return s + pick(g, kCodas);
}

std::string make_last_name(rng::Xoshiro256& g) {
  const double u = g.uniform();
  std::string base = capitalize(syllables(g, 2 + static_cast<int>(g.below(2))));
  if (u < 0.70) return base;
  if (u < 0.80) {
    // Replace one ASCII letter after the first with an accented one.
    const std::size_t at = 1 + g.below(base.size() - 1);
    return base.substr(0, at) + pick(g, kAccented) + base.substr(at + 1);
  }
  if (u < 0.90) return std::string(pick(g, kParticles)) + base;
  return base + "-" + capitalize(syllables(g, 2));
}

PersonName make_person(rng::Xoshiro256& g) { return {make_last_name(g), pick(g, kGiven)}; }

std::string key_of(const PersonName& p) { return build_key(Reviewer{ReviewerId("x"), p.last_name, p.first_name, 0, true}).key; }

// Pool of distinct keys, except that members 2c and 2c+1 (c < collisions)
// share one key.
std::vector<PersonName> make_pool(rng::Xoshiro256& g, std::size_t size, std::size_t collisions,
                                  std::set<std::string>& keys) {
  std::vector<PersonName> pool;
  while (pool.size() < size) {
    const std::size_t i = pool.size();
    if (i % 2 == 1 && i / 2 < collisions) {
      PersonName twin = pool.back();
      // Same initial, possibly a different given name.
      for (int tries = 0; tries < 50; ++tries) {
        const std::string alt = pick(g, kGiven);
        if (names::first_initial(alt) == names::first_initial(twin.first_name)) {
          twin.first_name = alt;
          break;
        }
      }
      pool.push_back(twin);
      continue;
    }
    PersonName p = make_person(g);
    if (keys.insert(key_of(p)).second) pool.push_back(std::move(p));
  }
  return pool;
}

PersonName make_filler(rng::Xoshiro256& g, const std::set<std::string>& pool_keys) {
  while (true) {
    PersonName p = make_person(g);
    if (!pool_keys.count(key_of(p))) return p;
  }
}

std::string make_title(rng::Xoshiro256& g) {
  const std::size_t n = 3 + g.below(4);
  std::string t;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) t += ' ';
    t += pick(g, kTitleWords);
  }
  return capitalize(t);
}

// "Jean-Pierre" -> "J.-P.", "Élodie" -> "É."
std::string initials(const std::string& given) {
  std::string out;
  bool start = true;
  for (std::size_t i = 0; i < given.size();) {
    const unsigned char c = static_cast<unsigned char>(given[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    if (given[i] == '-' || given[i] == ' ') {
      out += given[i] == '-' ? "-" : " ";
      start = true;
    } else if (start) {
      out += given.substr(i, len) + ".";
      start = false;
    }
    i += len;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep, const std::string& last_sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += i + 1 == parts.size() ? last_sep : sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::string_view to_string(ReferenceFormat format) {
  switch (format) {
    case ReferenceFormat::apa: return "apa";
    case ReferenceFormat::ieee: return "ieee";
    case ReferenceFormat::acm: return "acm";
    case ReferenceFormat::chicago: return "chicago";
    case ReferenceFormat::semicolon: return "semicolon";
    case ReferenceFormat::harvard: return "harvard";
  }
  return "apa";
}

std::string render_reference(const std::vector<PersonName>& authors, bool et_al, ReferenceFormat format,
                             const std::string& title, const std::string& venue, int year) {
  std::vector<std::string> parts;
  const std::string y = std::to_string(year);
  switch (format) {
    case ReferenceFormat::apa: {
      for (const auto& a : authors) parts.push_back(a.last_name + ", " + initials(a.first_name));
      std::string list = et_al ? join(parts, ", ", ", ") + (parts.empty() ? "et al." : ", et al.")
                               : join(parts, ", ", parts.size() == 2 ? ", & " : ", & ");
      return list + " (" + y + "). " + title + ". " + venue + ".";
    }
    case ReferenceFormat::ieee: {
      for (const auto& a : authors) parts.push_back(initials(a.first_name) + " " + a.last_name);
      std::string list = et_al ? join(parts, ", ", ", ") + (parts.empty() ? "et al." : ", et al.")
                               : join(parts, ", ", parts.size() == 2 ? " and " : ", and ") + ".";
      return list + " \"" + title + ",\" in " + venue + ", " + y + ".";
    }
    case ReferenceFormat::acm: {
      for (const auto& a : authors) parts.push_back(a.first_name + " " + a.last_name);
      std::string list = et_al ? join(parts, ", ", ", ") + (parts.empty() ? "et al." : " et al.")
                               : join(parts, ", ", parts.size() == 2 ? " and " : ", and ") + ".";
      return list + " " + y + ". " + title + ". In " + venue + ".";
    }
    case ReferenceFormat::chicago: {
      for (std::size_t i = 0; i < authors.size(); ++i)
        parts.push_back(i == 0 ? authors[i].last_name + ", " + authors[i].first_name
                               : authors[i].first_name + " " + authors[i].last_name);
      std::string list = et_al ? join(parts, ", ", ", ") + (parts.empty() ? "et al." : ", et al.")
                               : join(parts, ", ", ", and ") + ".";
      return list + " " + title + ". " + venue + ", " + y + ".";
    }
    case ReferenceFormat::semicolon: {
      for (const auto& a : authors) parts.push_back(a.last_name + ", " + initials(a.first_name));
      std::string list = et_al ? join(parts, "; ", "; ") + (parts.empty() ? "et al." : "; et al.") : join(parts, "; ", "; ");
      return list + " " + title + ". " + venue + ". " + y + ";12:1-10.";
    }
    case ReferenceFormat::harvard: {
      for (const auto& a : authors) parts.push_back(a.last_name + ", " + initials(a.first_name));
      std::string list = et_al ? join(parts, ", ", ", ") + (parts.empty() ? "et al." : " et al.")
                               : join(parts, ", ", " and ");
      return list + " (" + y + ") " + title + ". " + venue + ".";
    }
  }
  return {};
}

ReferenceCorpus reference_corpus(const CorpusConfig& config) {
  if (2 * config.key_collisions > config.pool_size)
    throw Error(ErrorKind::validation, "corpus: key_collisions exceeds half the pool");
  rng::Xoshiro256 g(rng::derive(config.seed, rng::streams::corpus, 0));
  std::set<std::string> keys;
  const auto people = make_pool(g, config.pool_size, config.key_collisions, keys);

  ReferenceCorpus out;
  const int width = static_cast<int>(std::to_string(config.pool_size).size());
  for (std::size_t i = 0; i < people.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "R%0*zu", width, i + 1);
    out.pool.push_back({ReviewerId(id), people[i].last_name, people[i].first_name, static_cast<int>(g.below(2)), true});
  }
  for (std::size_t c = 0; c < config.key_collisions; ++c) out.collided_keys.push_back(key_of(people[2 * c]));

  for (std::size_t e = 0; e < config.n_entries; ++e) {
    CorpusEntry entry;
    entry.format = kAllFormats[g.below(std::size(kAllFormats))];
    const std::size_t n_authors = 1 + g.below(5);
    std::vector<PersonName> authors;
    for (std::size_t a = 0; a < n_authors; ++a) {
      if (!people.empty() && g.uniform() < 0.5) {
        const std::size_t who = g.below(people.size());
        authors.push_back(people[who]);
        entry.pool_authors.push_back(out.pool[who].id);
      } else {
        authors.push_back(make_filler(g, keys));
      }
    }
    const bool et_al = g.uniform() < config.et_al_rate;
    for (const auto& a : authors) entry.authors.push_back({a.last_name, names::first_initial(a.first_name)});
    entry.text = render_reference(authors, et_al, entry.format, make_title(g), pick(g, kVenues),
                                  1990 + static_cast<int>(g.below(34)));
    out.entries.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conference generation

namespace {

struct PairDraw {
  ReviewerId reviewer;
  double expertise = 0.0;
  bool cited = false;
  int sr_expertise = 1;
  std::optional<int> confidence;
  std::optional<double> overlap;
  std::optional<int> bid;
  std::optional<int> preference;
  double noise = 0.0;
  bool flagged = false;
};

int bucket(double v, const double (&cuts)[3], const IntRange& scale) {
  int level = 0;
  for (double c : cuts)
    if (v > c) ++level;
  return std::clamp(scale.lo + level, scale.lo, scale.hi);
}

}  // namespace

GeneratedConference generate(const GeneratorConfig& config) {
  config.validate();
  const VenueConfig& venue = config.venue;
  const bool ec = venue.venue_policy == VenuePolicy::ec_like;
  const std::vector<double> alpha = config.effective_coefficients();
  const std::size_t n_rev = config.effective_reviewers();
  const std::size_t k = static_cast<std::size_t>(config.reviewers_per_paper);
  const double rho = config.confounder_correlation;
  const double threshold = boost::math::quantile(
      boost::math::complement(boost::math::normal_distribution<double>(), std::clamp(config.citation_prevalence, 1e-12, 1.0 - 1e-12)));
  const double prevalence_floor = config.citation_prevalence <= 0.0 ? INFINITY : config.citation_prevalence >= 1.0 ? -INFINITY : threshold;

  rng::Xoshiro256 g0(rng::derive(config.seed, rng::streams::generator, 0));
  std::set<std::string> pool_keys;
  const auto people = make_pool(g0, n_rev, config.key_collisions, pool_keys);
  std::vector<Reviewer> reviewers;
  const int rw = static_cast<int>(std::to_string(n_rev).size());
  for (std::size_t i = 0; i < n_rev; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "R%0*zu", rw, i + 1);
    reviewers.push_back({ReviewerId(id), people[i].last_name, people[i].first_name, g0.uniform() < 0.5 ? 1 : 0, true});
  }
  std::vector<std::size_t> order(n_rev);
  for (std::size_t i = 0; i < n_rev; ++i) order[i] = i;
  for (std::size_t i = n_rev; i > 1; --i) std::swap(order[i - 1], order[g0.below(i)]);

  const int sw = static_cast<int>(std::to_string(config.n_submissions).size());
  std::vector<Submission> submissions;
  std::vector<std::vector<PairDraw>> draws(config.n_submissions);
  GroundTruth truth;
  truth.alpha_star = config.alpha_star;
  truth.coefficients = alpha;
  truth.sigma0 = config.sigma0;
  truth.seed = config.seed;

  static constexpr double kExpertiseCuts[3] = {-0.8, 0.0, 0.8};
  static constexpr double kConfidenceCuts[3] = {-0.9, 0.0, 0.9};
  for (std::size_t s = 0; s < config.n_submissions; ++s) {
    char id[32];
    std::snprintf(id, sizeof id, "S%0*zu", sw, s + 1);
    submissions.push_back({SubmissionId(id), {}, false});
    // Fixed draw order per submission, independent of the coefficients.
    rng::Xoshiro256 g(rng::derive(config.seed, rng::streams::generator, s + 1));
    std::normal_distribution<double> z;
    truth.quality[submissions.back().id] = config.quality_mean + config.quality_sd * z(g);
    for (std::size_t j = 0; j < k; ++j) {
      PairDraw d;
      d.reviewer = reviewers[order[(s * k + j) % n_rev]].id;
      d.expertise = z(g);
      const double eta = z(g);
      d.cited = rho * d.expertise + std::sqrt(1.0 - rho * rho) * eta > prevalence_floor;
      d.sr_expertise = bucket(d.expertise, kExpertiseCuts, venue.expertise_scale);
      d.confidence = bucket(d.expertise + 0.5 * z(g), kConfidenceCuts, venue.expertise_scale);
      d.overlap = std::clamp(std::round((0.5 + 0.15 * d.expertise + 0.1 * z(g)) * 100.0) / 100.0, 0.0, 1.0);
      const double b = 0.3 * d.expertise + z(g);
      d.bid = b < -0.5 ? 3 : b < 0.6 ? 4 : 5;
      d.preference = std::clamp(static_cast<int>(std::lround(50.0 + 25.0 * (0.5 * d.expertise + 0.87 * z(g)))), 1, 100);
      const double u_pref = g.uniform(), u_conf = g.uniform(), u_over = g.uniform(), u_bid = g.uniform();
      d.noise = z(g);
      if (ec) {
        d.confidence.reset();
        d.overlap.reset();
        d.bid.reset();
        if (u_pref < config.missingness.preference) d.preference.reset();
      } else {
        d.preference.reset();
        if (u_conf < config.missingness.confidence) d.confidence.reset();
        if (u_over < config.missingness.overlap) d.overlap.reset();
        if (u_bid < config.missingness.bid) d.bid.reset();
      }
      draws[s].push_back(std::move(d));
    }
    const double u_excl = g.uniform();
    if (u_excl < config.exclusion_rate) {
      for (auto& d : draws[s])
        if (d.cited) {
          d.flagged = true;
          break;
        }
    }
  }

  auto records = [&](const std::vector<double>* latent) {
    std::vector<ReviewRecord> out;
    std::size_t i = 0;
    for (std::size_t s = 0; s < draws.size(); ++s) {
      for (const auto& d : draws[s]) {
        ReviewRecord r;
        r.submission_id = submissions[s].id;
        r.reviewer_id = d.reviewer;
        r.sr_expertise = d.sr_expertise;
        r.sr_confidence = d.confidence;
        r.text_overlap = d.overlap;
        r.bid = d.bid;
        r.preference_value = d.preference;
        r.missing_citation_flag = d.flagged;
        r.exclusion_adjudicated = d.flagged;
        if (latent) {
          const double v = (*latent)[i];
          r.latent_score = v;
          r.score = std::clamp(static_cast<int>(std::lround(v)), venue.score_min, venue.score_max);
        } else {
          r.score = venue.score_min;
        }
        out.push_back(std::move(r));
        ++i;
      }
    }
    return out;
  };

  // Covariates such as preference percentiles depend on the whole
  // assignment, so they are derived before the scores are drawn.
  const ReviewDataset shape = derive_covariates(ReviewDataset(venue, reviewers, submissions, records(nullptr)));
  std::vector<double> latent;
  latent.reserve(shape.reviews().size());
  {
    std::size_t i = 0;
    for (std::size_t s = 0; s < draws.size(); ++s) {
      const double q = truth.quality[submissions[s].id];
      for (const auto& d : draws[s]) {
        const auto& x = shape.covariates(i).values;
        double v = config.alpha0 + config.alpha_quality * q + config.alpha_star * (d.cited ? 1.0 : 0.0);
        for (std::size_t j = 0; j < alpha.size(); ++j) v += alpha[j] * x[j];
        latent.push_back(v + config.sigma0 * d.noise);
        truth.cited[{submissions[s].id, d.reviewer}] = d.cited;
        ++i;
      }
    }
  }

  if (config.render_references) {
    for (std::size_t s = 0; s < draws.size(); ++s) {
      rng::Xoshiro256 g(rng::derive(config.seed, rng::streams::corpus, s + 1));
      auto& entries = submissions[s].reference_entries;
      auto render = [&](std::vector<PersonName> authors) {
        const ReferenceFormat f = kAllFormats[g.below(std::size(kAllFormats))];
        entries.push_back(render_reference(authors, false, f, make_title(g), pick(g, kVenues),
                                           1990 + static_cast<int>(g.below(34))));
      };
      for (const auto& d : draws[s]) {
        if (!d.cited) continue;
        std::vector<PersonName> authors;
        const std::size_t extra = g.below(4);
        for (std::size_t a = 0; a < extra; ++a) authors.push_back(make_filler(g, pool_keys));
        const std::size_t at = g.below(extra + 1);
        const auto idx = static_cast<std::size_t>(std::find_if(reviewers.begin(), reviewers.end(), [&](const Reviewer& r) {
                                                    return r.id == d.reviewer;
                                                  }) - reviewers.begin());
        authors.insert(authors.begin() + static_cast<std::ptrdiff_t>(at), people[idx]);
        render(std::move(authors));
      }
      for (std::size_t f = 0; f < config.filler_references; ++f) {
        std::vector<PersonName> authors;
        const std::size_t n = 1 + g.below(4);
        for (std::size_t a = 0; a < n; ++a) authors.push_back(make_filler(g, pool_keys));
        render(std::move(authors));
      }
      for (std::size_t i = entries.size(); i > 1; --i) std::swap(entries[i - 1], entries[g.below(i)]);
    }
  }

  GeneratedConference out;
  out.dataset = derive_covariates(ReviewDataset(venue, std::move(reviewers), std::move(submissions), records(&latent)));
  for (const auto& [pair, cited] : truth.cited) out.relation.set_parsed(pair, cited);
  out.truth = std::move(truth);
  return out;
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  nlohmann::ordered_json j;
  j["alpha_star"] = truth.alpha_star;
  j["coefficients"] = truth.coefficients;
  j["sigma0"] = truth.sigma0;
  j["seed"] = truth.seed;
  nlohmann::ordered_json q = nlohmann::ordered_json::object();
  for (const auto& [id, v] : truth.quality) q[id.str()] = v;
  j["quality"] = std::move(q);
  nlohmann::ordered_json cited = nlohmann::ordered_json::array();
  for (const auto& [pair, c] : truth.cited)
    cited.push_back({{"submission_id", pair.submission.str()}, {"reviewer_id", pair.reviewer.str()}, {"cited", c}});
  j["cited"] = std::move(cited);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

GeneratorConfig load_generator_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::missing_artifact, "missing input: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  GeneratorConfig c;
  try {
    if (j.contains("policy"))
      c = parse_policy(j["policy"].get<std::string>()) == VenuePolicy::icml_like ? GeneratorConfig::icml_like()
                                                                                 : GeneratorConfig::ec_like();
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("n_submissions", c.n_submissions);
    get("reviewers_per_paper", c.reviewers_per_paper);
    get("n_reviewers", c.n_reviewers);
    get("alpha0", c.alpha0);
    get("alpha_quality", c.alpha_quality);
    get("coefficients", c.coefficients);
    get("alpha_star", c.alpha_star);
    get("sigma0", c.sigma0);
    get("quality_mean", c.quality_mean);
    get("quality_sd", c.quality_sd);
    get("citation_prevalence", c.citation_prevalence);
    get("confounder_correlation", c.confounder_correlation);
    get("exclusion_rate", c.exclusion_rate);
    get("render_references", c.render_references);
    get("filler_references", c.filler_references);
    get("key_collisions", c.key_collisions);
    get("seed", c.seed);
    if (j.contains("missingness")) {
      const auto& m = j["missingness"];
      if (m.contains("preference")) c.missingness.preference = m["preference"].get<double>();
      if (m.contains("confidence")) c.missingness.confidence = m["confidence"].get<double>();
      if (m.contains("overlap")) c.missingness.overlap = m["overlap"].get<double>();
      if (m.contains("bid")) c.missingness.bid = m["bid"].get<double>();
    }
    if (j.contains("score_range")) {
      c.venue.score_min = j["score_range"].at(0).get<int>();
      c.venue.score_max = j["score_range"].at(1).get<int>();
    }
    if (j.contains("label")) c.venue.label = j["label"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

}  // namespace revaudit
