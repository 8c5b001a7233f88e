#include "sentiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edumine {

namespace {

void check_finite(const EmbeddingSequence& seq) {
  for (double v : seq.values)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite embedding value");
}

void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw std::runtime_error(std::string("dimension mismatch in ") + what + ": " +
                             std::to_string(a) + " vs " + std::to_string(b));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^-|z|) formulation keeps BCE finite for saturated scores
double bce(double z, int y) { return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))); }

std::uint64_t splitmix_next(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t z) { return static_cast<double>(z >> 11) * 0x1.0p-53; }

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

PoolResult attention_pool(const EmbeddingSequence& seq, const AttentionParams& attention) {
  if (seq.rows == 0) throw std::runtime_error("empty sequence");
  check_dims(seq.dim, attention.w_att.size(), "attention_pool");
  check_finite(seq);

  const std::size_t T = seq.rows, d = seq.dim;
  std::vector<double> alpha(T, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j) alpha[t] += attention.w_att[j] * seq.at(t, j);

  double amax = alpha[0];
  for (double a : alpha) amax = std::max(amax, a);
  PoolResult res;
  res.weights.resize(T);
  double denom = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    res.weights[t] = std::exp(alpha[t] - amax);
    denom += res.weights[t];
  }
  for (std::size_t t = 0; t < T; ++t) res.weights[t] /= denom;

  res.pooled.assign(d, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j) res.pooled[j] += res.weights[t] * seq.at(t, j);
  return res;
}

double head_score(const std::vector<double>& pooled, const HeadParams& head) {
  check_dims(pooled.size(), head.w.size(), "head_score");
  double z = head.b;
  for (std::size_t j = 0; j < pooled.size(); ++j) z += head.w[j] * pooled[j];
  return sigmoid(z);
}

ClassifyResult classify(const EmbeddingSequence& seq, const SentimentModel& model) {
  check_dims(seq.dim, model.dim, "classify");
  const PoolResult pool = attention_pool(seq, model.attention);
  ClassifyResult r;
  int ones = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    r.scores[k] = head_score(pool.pooled, model.heads[k]);
    r.votes[k] = r.scores[k] > 0.5 ? 1 : 0;
    ones += r.votes[k];
  }
  r.label = ones >= 2 ? 1 : 0;
  return r;
}

double loss_and_gradients(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                          const AttentionParams& attention, const HeadParams& head,
                          Gradients* grads) {
  if (dataset.empty()) throw std::runtime_error("empty dataset");
  const std::size_t d = attention.w_att.size();
  check_dims(d, head.w.size(), "loss_and_gradients");

  if (grads) {
    grads->d_w_att.assign(d, 0.0);
    grads->d_w.assign(d, 0.0);
    grads->d_b = 0.0;
  }
  double total = 0.0;
  for (const auto& [seq, label] : dataset) {
    check_dims(seq.dim, d, "loss_and_gradients sample");
    const PoolResult pool = attention_pool(seq, attention);
    double z = head.b;
    for (std::size_t j = 0; j < d; ++j) z += head.w[j] * pool.pooled[j];
    total += bce(z, label);
    if (!grads) continue;

    const double delta = sigmoid(z) - label;  // dL/dz
    grads->d_b += delta;
    for (std::size_t j = 0; j < d; ++j) grads->d_w[j] += delta * pool.pooled[j];

    // dL/dalpha_t = delta * e_t * (w.h_t - w.H), then dalpha_t/dw_att = h_t
    double wH = 0.0;
    for (std::size_t j = 0; j < d; ++j) wH += head.w[j] * pool.pooled[j];
    for (std::size_t t = 0; t < seq.rows; ++t) {
      double wh = 0.0;
      for (std::size_t j = 0; j < d; ++j) wh += head.w[j] * seq.at(t, j);
      const double c = delta * pool.weights[t] * (wh - wH);
      for (std::size_t j = 0; j < d; ++j) grads->d_w_att[j] += c * seq.at(t, j);
    }
  }
  const double n = static_cast<double>(dataset.size());
  if (grads) {
    for (auto& g : grads->d_w_att) g /= n;
    for (auto& g : grads->d_w) g /= n;
    grads->d_b /= n;
  }
  return total / n;
}

TrainResult train_head(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                       std::size_t dim, const TrainHyper& hyper) {
  if (dataset.empty()) throw std::runtime_error("empty dataset");
  for (const auto& [seq, label] : dataset) {
    check_dims(seq.dim, dim, "train_head sample");
    if (label != 0 && label != 1) throw std::runtime_error("label outside {0,1}");
  }

  TrainResult res;
  std::uint64_t state = hyper.seed;
  auto init = [&] { return unit_interval(splitmix_next(state)) * 0.2 - 0.1; };
  res.attention.w_att.resize(dim);
  res.head.w.resize(dim);
  for (auto& v : res.attention.w_att) v = init();
  for (auto& v : res.head.w) v = init();
  res.head.b = init();

  Gradients g;
  res.loss_trace.push_back(loss_and_gradients(dataset, res.attention, res.head, nullptr));
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double loss = loss_and_gradients(dataset, res.attention, res.head, &g);
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
    for (std::size_t j = 0; j < dim; ++j) {
      res.attention.w_att[j] -= hyper.learning_rate * g.d_w_att[j];
      res.head.w[j] -= hyper.learning_rate * g.d_w[j];
    }
    res.head.b -= hyper.learning_rate * g.d_b;
    res.loss_trace.push_back(loss_and_gradients(dataset, res.attention, res.head, nullptr));
  }
  return res;
}

double gradient_check(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                      const AttentionParams& attention, const HeadParams& head, double step) {
  if (step <= 0) throw std::runtime_error("step must be positive");
  Gradients g;
  loss_and_gradients(dataset, attention, head, &g);

  AttentionParams att = attention;
  HeadParams hd = head;
  auto numeric = [&](double* param) {
    const double saved = *param;
    *param = saved + step;
    const double up = loss_and_gradients(dataset, att, hd, nullptr);
    *param = saved - step;
    const double down = loss_and_gradients(dataset, att, hd, nullptr);
    *param = saved;
    return (up - down) / (2.0 * step);
  };
  auto rel_err = [](double analytic, double approx) {
    const double denom = std::max(std::abs(analytic), std::abs(approx));
    const double diff = std::abs(analytic - approx);
    return denom < 1e-8 ? diff : diff / denom;
  };

  double max_err = 0.0;
  for (std::size_t j = 0; j < att.w_att.size(); ++j)
    max_err = std::max(max_err, rel_err(g.d_w_att[j], numeric(&att.w_att[j])));
  for (std::size_t j = 0; j < hd.w.size(); ++j)
    max_err = std::max(max_err, rel_err(g.d_w[j], numeric(&hd.w[j])));
  max_err = std::max(max_err, rel_err(g.d_b, numeric(&hd.b)));
  return max_err;
}

EmbeddingSequence embed_for_tests(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::uint64_t seed) {
  if (dim == 0) throw std::runtime_error("dimension must be >= 1");
  if (tokens.empty()) throw std::runtime_error("empty sequence");
  EmbeddingSequence seq;
  seq.rows = tokens.size();
  seq.dim = dim;
  seq.values.reserve(tokens.size() * dim);
  for (const auto& tok : tokens) {
    std::uint64_t state = fnv1a64(tok) ^ (seed * 0x9E3779B97F4A7C15ull);
    for (std::size_t j = 0; j < dim; ++j)
      seq.values.push_back(unit_interval(splitmix_next(state)) * 2.0 - 1.0);
  }
  return seq;
}

std::map<std::string, EmbeddingSequence> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("d=", 0) != 0)
    throw std::runtime_error("embedding file missing d= header");
  const long dim = std::stol(line.substr(2));
  if (dim < 1) throw std::runtime_error("embedding dimension must be >= 1");

  std::map<std::string, EmbeddingSequence> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string id;
    long rows = 0;
    {
      std::istringstream hdr(line);
      std::string id_part, t_part;
      if (!(hdr >> id_part >> t_part) || id_part.rfind("id=", 0) != 0 || t_part.rfind("T=", 0) != 0)
        throw std::runtime_error("malformed embedding record header: " + line);
      id = id_part.substr(3);
      rows = std::stol(t_part.substr(2));
    }
    if (rows < 1) throw std::runtime_error("record '" + id + "': T must be >= 1");
    if (out.count(id)) throw std::runtime_error("duplicate embedding id '" + id + "'");
    EmbeddingSequence seq;
    seq.rows = static_cast<std::size_t>(rows);
    seq.dim = static_cast<std::size_t>(dim);
    seq.values.reserve(seq.rows * seq.dim);
    for (long t = 0; t < rows; ++t) {
      if (!std::getline(in, line))
        throw std::runtime_error("record '" + id + "': truncated embedding rows");
      std::istringstream row(line);
      double v;
      long got = 0;
      while (row >> v) {
        seq.values.push_back(v);
        ++got;
      }
      if (got != dim)
        throw std::runtime_error("record '" + id + "': expected " + std::to_string(dim) +
                                 " values per row, got " + std::to_string(got));
    }
    out.emplace(std::move(id), std::move(seq));
  }
  return out;
}

SentimentModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("d=", 0) != 0)
    throw std::runtime_error("model file missing d= header");
  const long dim = std::stol(line.substr(2));
  if (dim < 1) throw std::runtime_error("model dimension must be >= 1");

  SentimentModel model;
  model.dim = static_cast<std::size_t>(dim);
  auto read_vec = [&](std::istringstream& s, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v)
      if (!(s >> x)) throw std::runtime_error("model file: truncated parameter row");
    return v;
  };

  int heads_seen = 0;
  bool att_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::string tag;
    s >> tag;
    if (tag == "w_att") {
      model.attention.w_att = read_vec(s, model.dim);
      att_seen = true;
    } else if (tag == "head") {
      if (heads_seen >= 3) throw std::runtime_error("model file: more than three heads");
      model.heads[heads_seen].w = read_vec(s, model.dim);
      if (!(s >> model.heads[heads_seen].b))
        throw std::runtime_error("model file: head missing bias");
      ++heads_seen;
    } else {
      throw std::runtime_error("model file: unknown section '" + tag + "'");
    }
  }
  if (!att_seen || heads_seen != 3)
    throw std::runtime_error("model file must contain w_att and exactly three heads");
  return model;
}

void save_model(const SentimentModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.precision(17);
  out << "d=" << model.dim << "\n";
  out << "w_att";
  for (double v : model.attention.w_att) out << ' ' << v;
  out << "\n";
  for (const auto& h : model.heads) {
    out << "head";
    for (double v : h.w) out << ' ' << v;
    out << ' ' << h.b << "\n";
  }
}

}  // namespace edumine
