// Acceptance gate: one numbered pass/fail line per criterion, exit 0 only if
// every criterion passes. Run via ctest or directly from the build tree.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "gazetteer.hpp"
#include "matcher.hpp"
#include "naive_oracle.hpp"
#include "pipeline.hpp"
#include "sentiment.hpp"
#include "test_util.hpp"
#include "text.hpp"
#include "trend.hpp"

using namespace edumine;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int num, const std::string& what, bool ok, const std::string& detail) {
  std::printf("%2d. %-28s %s%s%s\n", num, what.c_str(), ok ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  if (!ok) ++failures;
}

std::string data_file(const std::string& name) {
  return (fs::path(EDUMINE_DATA_DIR) / name).string();
}

// ---- 1. trie matcher agrees with the naive reference scanner ----
void criterion_matcher() {
  std::mt19937_64 rng(11);
  const std::vector<std::string> vocab = {
      "ab", "cd", "ef", "gh", "ij", "kl", "mn", "op", "qr", "st",
      "uv", "wx", "yz", "foo", "bar", "baz", "qux", "zap", "one", "two"};
  std::size_t mismatches = 0, trials = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int round = 0; round < 1200; ++round) {
    const std::size_t n_terms = 1 + rng() % 50;
    std::vector<std::string> raw;
    for (std::size_t i = 0; i < n_terms; ++i) {
      std::string term;
      const std::size_t len = 1 + rng() % 4;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) term += ' ';
        term += vocab[rng() % vocab.size()];
      }
      raw.push_back(term);
    }
    Lexicon lex = lexicon_from_terms(raw, "fuzz");
    MatcherIndex index(lex);

    std::string text;
    while (text.size() < 240) {
      if (!text.empty()) text += ' ';
      text += vocab[rng() % vocab.size()];
    }
    const auto tokens = token_surfaces(tokenize(normalize_text(text)));
    const auto got = index.find_matches(tokens);
    const auto want = testutil::naive_find_matches(lex.terms, tokens);
    ++trials;
    if (got.size() != want.size()) {
      ++mismatches;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      if (got[i].term != want[i].term || got[i].token_start != want[i].token_start ||
          got[i].token_end != want[i].token_end)
        ++mismatches;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << trials << " randomized pairs, " << mismatches << " mismatches, "
    << std::fixed << secs << "s";
  report(1, "matcher-oracle equivalence", mismatches == 0 && trials >= 1000 && secs < 30.0,
         d.str());
}

// ---- 2. gazetteer resolution matches the oracle's expected file ----
void criterion_gazetteer() {
  const auto stop = load_stoplist(data_file("place_stoplist.txt"));
  GazetteerLoadStats stats;
  auto entries = load_geonames(testutil::fixture("gazetteer.tsv").string(),
                               default_country_allowlist(), stop, 3, false, &stats);
  std::set<std::string> countries;
  for (const auto& e : entries) countries.insert(e.country);
  const bool corpus_ok = entries.size() >= 500 && countries.size() >= 10;
  GazetteerIndex index(std::move(entries));

  std::ifstream texts(testutil::fixture("geotexts.txt"));
  std::ifstream expected(testutil::fixture("geotexts_expected.txt"));
  std::string text, want;
  std::size_t total = 0, agree = 0;
  while (std::getline(texts, text) && std::getline(expected, want)) {
    const auto tag = resolve_location(token_surfaces(tokenize(normalize_text(text))), index);
    std::ostringstream got;
    got << (tag.country ? *tag.country : "-") << ' ' << (tag.ambiguous ? 1 : 0);
    ++total;
    agree += got.str() == want;
  }
  std::ostringstream d;
  d << agree << "/" << total << " texts agree (" << index.entry_count() << " entries, "
    << countries.size() << " countries)";
  report(2, "gazetteer resolution", corpus_ok && total == 100 && agree == total, d.str());
}

EmbeddingSequence random_seq(std::mt19937_64& rng, std::size_t T, std::size_t d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  EmbeddingSequence seq;
  seq.rows = T;
  seq.dim = d;
  for (std::size_t i = 0; i < T * d; ++i) seq.values.push_back(u(rng));
  return seq;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(d);
  for (auto& x : v) x = u(rng);
  return v;
}

// ---- 3. attention pooling properties ----
void criterion_pooling() {
  std::mt19937_64 rng(23);
  bool ok = true;
  std::string why;

  for (int i = 0; i < 1000 && ok; ++i) {
    const std::size_t T = 1 + rng() % 8, d = 1 + rng() % 6;
    const auto seq = random_seq(rng, T, d);
    AttentionParams att{random_vec(rng, d, 1.5)};
    const auto res = attention_pool(seq, att);

    double sum = 0.0;
    for (double w : res.weights) {
      sum += w;
      if (w < 0.0) ok = false, why = "negative weight";
    }
    if (std::abs(sum - 1.0) > 1e-9) ok = false, why = "weights do not sum to 1";

    // convex hull: each pooled coordinate within the per-dimension range
    for (std::size_t j = 0; j < d && ok; ++j) {
      double lo = seq.at(0, j), hi = seq.at(0, j);
      for (std::size_t t = 1; t < T; ++t) {
        lo = std::min(lo, seq.at(t, j));
        hi = std::max(hi, seq.at(t, j));
      }
      if (res.pooled[j] < lo - 1e-12 || res.pooled[j] > hi + 1e-12)
        ok = false, why = "pooled left the convex hull";
    }

    // shift invariance: add a constant-1 coordinate scored by c, which shifts
    // every alpha by c and must leave the weights untouched
    const double c = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    EmbeddingSequence wide;
    wide.rows = T;
    wide.dim = d + 1;
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < d; ++j) wide.values.push_back(seq.at(t, j));
      wide.values.push_back(1.0);
    }
    AttentionParams shifted{att.w_att};
    shifted.w_att.push_back(c);
    const auto res2 = attention_pool(wide, shifted);
    for (std::size_t t = 0; t < T && ok; ++t)
      if (std::abs(res.weights[t] - res2.weights[t]) > 1e-9)
        ok = false, why = "weights changed under alpha shift";
  }

  // T=1 identity, exact
  {
    const auto seq = random_seq(rng, 1, 5);
    const auto res = attention_pool(seq, AttentionParams{random_vec(rng, 5, 1.0)});
    for (std::size_t j = 0; j < 5; ++j)
      if (res.pooled[j] != seq.at(0, j)) ok = false, why = "T=1 not identity";
  }
  // w_att = 0 gives the arithmetic mean; T=4 so 1/T is a power of two and
  // scaling commutes with rounding, making the comparison exact
  {
    const auto seq = random_seq(rng, 4, 5);
    const auto res = attention_pool(seq, AttentionParams{std::vector<double>(5, 0.0)});
    for (std::size_t j = 0; j < 5; ++j) {
      double mean = 0.0;
      for (std::size_t t = 0; t < 4; ++t) mean += 0.25 * seq.at(t, j);
      if (res.pooled[j] != mean) ok = false, why = "w_att=0 mean not exact";
    }
  }
  report(3, "attention pooling", ok, ok ? "1000 random instances + edge cases" : why);
}

// ---- 4. analytic vs central-difference gradients ----
void criterion_gradients() {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 2 + rng() % 6;
    std::vector<std::pair<EmbeddingSequence, int>> dataset;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t k = 0; k < n; ++k)
      dataset.emplace_back(random_seq(rng, 1 + rng() % 6, d), static_cast<int>(rng() % 2));
    AttentionParams att{random_vec(rng, d, 1.0)};
    HeadParams head{random_vec(rng, d, 1.0),
                    std::uniform_real_distribution<double>(-0.5, 0.5)(rng)};
    worst = std::max(worst, gradient_check(dataset, att, head, 1e-5));
  }
  std::ostringstream d;
  d << "100 pairs, max relative error " << std::scientific << worst;
  report(4, "gradient check", worst <= 1e-4, d.str());
}

// ---- 5. training on a linearly separable set ----
void criterion_training() {
  std::mt19937_64 rng(47);
  const std::size_t d = 8;
  std::vector<double> u(d);  // separating direction
  for (auto& x : u) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  double norm = 0.0;
  for (double x : u) norm += x * x;
  norm = std::sqrt(norm);
  for (auto& x : u) x /= norm;

  std::vector<std::pair<EmbeddingSequence, int>> dataset;
  std::uniform_real_distribution<double> noise(-0.3, 0.3);
  for (int i = 0; i < 200; ++i) {
    const int label = i % 2;
    const double side = label ? 1.0 : -1.0;
    EmbeddingSequence seq;
    seq.rows = 1 + rng() % 5;
    seq.dim = d;
    for (std::size_t t = 0; t < seq.rows; ++t) {
      const double mag = 1.0 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      for (std::size_t j = 0; j < d; ++j) seq.values.push_back(side * mag * u[j] + noise(rng));
    }
    dataset.emplace_back(std::move(seq), label);
  }

  const TrainHyper hyper{0.5, 500, 42};
  const TrainResult res = train_head(dataset, d, hyper);
  std::size_t correct = 0;
  for (const auto& [seq, label] : dataset) {
    const auto pool = attention_pool(seq, res.attention);
    const int pred = head_score(pool.pooled, res.head) > 0.5 ? 1 : 0;
    correct += pred == label;
  }
  const double acc = static_cast<double>(correct) / dataset.size();

  const TrainResult rerun = train_head(dataset, d, hyper);
  const bool deterministic = rerun.loss_trace == res.loss_trace &&
                             rerun.head.w == res.head.w && rerun.head.b == res.head.b &&
                             rerun.attention.w_att == res.attention.w_att;
  std::ostringstream det;
  det << "accuracy " << acc << " after " << hyper.epochs << " epochs, rerun "
      << (deterministic ? "identical" : "DIVERGED");
  report(5, "desk-scale training", acc >= 0.95 && deterministic, det.str());
}

// ---- 6. ensemble majority vote ----
void criterion_ensemble() {
  std::mt19937_64 rng(59);
  bool ok = true;
  std::string why;
  for (int i = 0; i < 1000 && ok; ++i) {
    const std::size_t d = 2 + rng() % 6;
    const auto seq = random_seq(rng, 1 + rng() % 6, d);
    SentimentModel model;
    model.dim = d;
    model.attention.w_att = random_vec(rng, d, 1.0);
    for (auto& h : model.heads)
      h = HeadParams{random_vec(rng, d, 1.5),
                     std::uniform_real_distribution<double>(-1.0, 1.0)(rng)};

    const auto res = classify(seq, model);
    const auto pool = attention_pool(seq, model.attention);
    int ones = 0;
    for (const auto& h : model.heads) ones += head_score(pool.pooled, h) > 0.5 ? 1 : 0;
    if (res.label != (ones >= 2 ? 1 : 0)) ok = false, why = "vote mismatch";

    // two heads agreeing pins the label regardless of the third
    if (res.votes[0] == res.votes[1]) {
      SentimentModel perturbed = model;
      perturbed.heads[2] = HeadParams{random_vec(rng, d, 3.0),
                                      std::uniform_real_distribution<double>(-2.0, 2.0)(rng)};
      if (classify(seq, perturbed).label != res.votes[0])
        ok = false, why = "third-head perturbation flipped an agreed label";
    }
  }
  report(6, "ensemble majority vote", ok, ok ? "1000 random models" : why);
}

// ---- 7. pearson reference values ----
void criterion_pearson() {
  std::mt19937_64 rng(67);
  bool ok = true;
  std::string why;

  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) x.push_back(std::uniform_real_distribution<double>(-5, 5)(rng));
  for (double v : x) y.push_back(v);
  if (std::abs(*pearson(x, y) - 1.0) > 1e-12) ok = false, why = "y=x not 1";
  for (auto& v : y) v = -v;
  if (std::abs(*pearson(x, y) + 1.0) > 1e-12) ok = false, why = "y=-x not -1";

  const double want = 3.0 * std::sqrt(3.0) / (2.0 * std::sqrt(7.0));  // 0.981981...
  const auto r = pearson({1, 2, 3}, {1, 2, 4});
  if (!r || std::abs(*r - want) > 1e-6) ok = false, why = "(1,2,3)/(1,2,4) value";

  for (int i = 0; i < 200 && ok; ++i) {
    std::vector<double> a, b;
    for (int k = 0; k < 12; ++k) {
      a.push_back(std::uniform_real_distribution<double>(-10, 10)(rng));
      b.push_back(std::uniform_real_distribution<double>(-10, 10)(rng));
    }
    const auto base = pearson(a, b);
    const double scale = std::uniform_real_distribution<double>(0.1, 4.0)(rng);
    const double off = std::uniform_real_distribution<double>(-8.0, 8.0)(rng);
    std::vector<double> a2;
    for (double v : a) a2.push_back(scale * v + off);
    if (std::abs(*pearson(a2, b) - *base) > 1e-9) ok = false, why = "affine invariance";
  }

  if (pearson({1, 1, 1}, {1, 2, 3})) ok = false, why = "zero variance not undefined";
  report(7, "pearson correlation", ok, ok ? "reference values + affine invariance" : why);
}

PipelineConfig fixture_config(const std::string& out_dir, int threads) {
  PipelineConfig cfg;
  cfg.input = testutil::fixture("corpus_200.ndjson").string();
  cfg.edu_lexicon = data_file("education_dictionary.txt");
  cfg.gazetteer = testutil::fixture("gazetteer.tsv").string();
  cfg.stoplist = data_file("place_stoplist.txt");
  cfg.model = testutil::fixture("model_d8.txt").string();
  cfg.test_embedder_d = 8;
  cfg.test_embedder_seed = 7;
  cfg.cases = testutil::fixture("cases.csv").string();
  cfg.out_dir = out_dir;
  cfg.threads = threads;
  return cfg;
}

struct Conservation {
  bool ok = false;
  std::string detail;
};

// ---- 8. end-to-end golden run (also gathers criterion 10 inputs) ----
Conservation criterion_golden() {
  testutil::TempDir dir1("accept1"), dir8("accept8");
  const auto t0 = std::chrono::steady_clock::now();
  auto arts1 = stage_run(fixture_config(dir1.path().string(), 1));
  auto arts8 = stage_run(fixture_config(dir8.path().string(), 8));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = secs < 10.0;
  std::string why = ok ? "" : "too slow";
  if (arts1.size() != arts8.size()) ok = false, why = "stage count differs";
  for (std::size_t i = 0; ok && i < arts1.size(); ++i)
    if (arts1[i].digest != arts8[i].digest) ok = false, why = "threads 1 vs 8 digest differs";

  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(testutil::fixture("golden"))) {
    const std::string name = e.path().filename().string();
    if (name == "stage_counts.txt") continue;
    ++compared;
    if (testutil::slurp(e.path()) != testutil::slurp(dir1.path() / name)) {
      ok = false;
      why = name + " differs from golden";
    }
  }
  std::ostringstream d;
  d << compared << " report files byte-identical, threads invariant, " << std::fixed << secs
    << "s";
  report(8, "end-to-end golden run", ok && compared >= 12, ok ? d.str() : why);

  // conservation needs the outputs; check before TempDir cleanup
  std::ifstream sum(dir1.path() / "summary.txt");
  std::int64_t topical = -1, unlocated = -1;
  std::string line;
  while (std::getline(sum, line)) {
    if (line.rfind("topical_in_window=", 0) == 0) topical = std::stoll(line.substr(18));
    if (line.rfind("unlocated=", 0) == 0) unlocated = std::stoll(line.substr(10));
  }
  std::int64_t located_total = 0;
  bool weekly_ok = true;
  for (const auto& e : fs::directory_iterator(dir1.path())) {
    const std::string name = e.path().filename().string();
    if (name.rfind("country_", 0) != 0) continue;
    std::ifstream csv(e.path());
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
      std::int64_t f[7] = {0};
      std::sscanf(line.c_str(), "%ld,%*[^,],%ld,%ld,%ld,%ld,%ld", &f[0], &f[1], &f[2], &f[3],
                  &f[4], &f[5]);
      located_total += f[2];
      if (f[3] + f[4] != f[2]) weekly_ok = false;
    }
  }
  // records located outside the ten report countries also count as located
  std::int64_t other_located = 0;
  {
    std::ifstream labeled(dir1.path() / "labeled.ndjson");
    const auto reported = fixture_config("", 1).effective_report_countries();
    WindowConfig window;
    while (std::getline(labeled, line)) {
      auto res = parse_record(line);
      if (!res.ok() || !res.record->country) continue;
      const auto day = epoch_day(res.record->created_at);
      if (day < window.start_day() || day > window.end_day()) continue;
      if (std::find(reported.begin(), reported.end(), *res.record->country) == reported.end())
        ++other_located;
    }
  }
  Conservation cons;
  cons.ok = weekly_ok && topical >= 0 && located_total + other_located + unlocated == topical;
  std::ostringstream cd;
  cd << located_total + other_located << " located + " << unlocated << " unlocated = " << topical
     << " topical; weekly positive+negative=total";
  cons.detail = cd.str();
  return cons;
}

// ---- 9. throughput, reported not gated ----
void criterion_throughput() {
  std::mt19937_64 rng(73);
  const auto stop = load_stoplist(data_file("place_stoplist.txt"));
  auto entries = load_geonames(testutil::fixture("gazetteer.tsv").string(),
                               default_country_allowlist(), stop, 3, false, nullptr);
  GazetteerIndex gaz(std::move(entries));
  const MatcherIndex covid(default_covid_lexicon());
  const MatcherIndex edu(load_lexicon(data_file("education_dictionary.txt"), "education"));

  const std::vector<std::string> fillers = {"the", "still", "about", "closed", "week",
                                            "people", "covid", "schools", "london", "exam"};
  std::vector<std::string> texts;
  for (int i = 0; i < 20000; ++i) {
    std::string t;
    while (t.size() < 280) {
      if (!t.empty()) t += ' ';
      t += fillers[rng() % fillers.size()];
    }
    texts.push_back(std::move(t));
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t sink = 0;
  for (const auto& t : texts) {
    const auto tokens = token_surfaces(tokenize(normalize_text(t)));
    sink += is_topical(tokens, covid, edu).topical;
    sink += resolve_location(tokens, gaz).evidence.size();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = static_cast<double>(texts.size()) / secs;
  std::ostringstream d;
  d << std::fixed << rate << " records/s filter+geotag (target 50000, reported not gated, sink="
    << sink << ")";
  report(9, "throughput (soft)", true, d.str());
}

}  // namespace

int main() {
  try {
    criterion_matcher();
    criterion_gazetteer();
    criterion_pooling();
    criterion_gradients();
    criterion_training();
    criterion_ensemble();
    criterion_pearson();
    const Conservation cons = criterion_golden();
    criterion_throughput();
    report(10, "conservation", cons.ok, cons.detail);
  } catch (const std::exception& e) {
    std::cerr << "acceptance aborted: " << e.what() << "\n";
    return 2;
  }
  if (failures) {
    std::printf("acceptance: %d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("acceptance: all criteria passed\n");
  return 0;
}
