#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace edumine {

// T x d row-major token embedding matrix, T >= 1.
struct EmbeddingSequence {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  double at(std::size_t t, std::size_t j) const { return values[t * dim + j]; }
};

struct AttentionParams {
  std::vector<double> w_att;
};

struct HeadParams {
  std::vector<double> w;
  double b = 0.0;
};

struct SentimentModel {
  AttentionParams attention;
  std::array<HeadParams, 3> heads;
  std::size_t dim = 0;
};

struct PoolResult {
  std::vector<double> pooled;   // H
  std::vector<double> weights;  // softmax weights e_t, sum to 1
};

// H = sum_t e_t h_t with e = softmax(w_att . h_t), max-subtracted for
// stability. Throws on dimension mismatch or non-finite input.
PoolResult attention_pool(const EmbeddingSequence& seq, const AttentionParams& attention);

// sigma(w . H + b)
double head_score(const std::vector<double>& pooled, const HeadParams& head);

// A head votes 1 iff its score is strictly above 0.5; label is the majority
// of the three votes.
struct ClassifyResult {
  int label = 0;
  std::array<int, 3> votes{};
  std::array<double, 3> scores{};
};
ClassifyResult classify(const EmbeddingSequence& seq, const SentimentModel& model);

struct TrainHyper {
  double learning_rate = 0.1;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
};

struct TrainResult {
  AttentionParams attention;
  HeadParams head;
  std::vector<double> loss_trace;  // mean BCE per epoch, trace[0] is pre-step loss
};

// Full-batch gradient descent on mean binary cross-entropy of
// head_score(attention_pool(x)) against {0,1} labels. Deterministic for a
// fixed seed; seed drives the uniform [-0.1, 0.1] initialization only.
// Throws on an empty dataset or a non-finite loss.
TrainResult train_head(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                       std::size_t dim, const TrainHyper& hyper);

struct Gradients {
  std::vector<double> d_w_att;
  std::vector<double> d_w;
  double d_b = 0.0;
};

// Mean BCE over the dataset plus analytic gradients, shared by training and
// the finite-difference check.
double loss_and_gradients(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                          const AttentionParams& attention, const HeadParams& head,
                          Gradients* grads);

// Max relative error between analytic and central-difference gradients over
// every parameter entry; absolute error where |denominator| < 1e-8.
double gradient_check(const std::vector<std::pair<EmbeddingSequence, int>>& dataset,
                      const AttentionParams& attention, const HeadParams& head, double step);

// Deterministic per-token pseudo-embedding in [-1, 1]^d; stands in for an
// offline transformer encoder.
EmbeddingSequence embed_for_tests(const std::vector<std::string>& tokens, std::size_t dim,
                                  std::uint64_t seed);

// Embedding file: header "d=<int>", then per record "id=<id> T=<int>"
// followed by T rows of d numbers.
std::map<std::string, EmbeddingSequence> load_embeddings(const std::string& path);

SentimentModel load_model(const std::string& path);
void save_model(const SentimentModel& model, const std::string& path);

}  // namespace edumine
