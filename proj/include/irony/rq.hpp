// Rhetorical-question gate for the interrogative-to-declarative strategy:
// hand-crafted question features (optionally plus mean word embeddings) into
// a regularized logistic model trained by full-batch gradient descent.
#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "irony/corpus.hpp"
#include "irony/errors.hpp"
#include "irony/lexicons.hpp"
#include "irony/text.hpp"

namespace irony {

enum class RqLabel { Rq, InfoSeeking };

struct RqConfig {
  std::set<std::string> modal_verbs = {"can",   "could", "may",  "might", "must",
                                       "shall", "should", "will", "would"};
  std::set<std::string> interrogatives = {"who",  "what",  "when", "where", "why",
                                          "which", "whose", "whom", "how"};
  std::set<std::string> pronouns = {
      "i",    "you",   "he",    "she",   "it",     "we",     "they",
      "me",   "him",   "her",   "us",    "them",   "my",     "your",
      "his",  "its",   "our",   "their", "mine",   "yours",  "hers",
      "ours", "theirs"};
  double learning_rate = 0.5;
  int max_epochs = 5000;
  double lambda = 1e-4;
  double tolerance = 1e-6;
  uint32_t seed = 42;
};

struct RqFeatureVector {
  double modal_count = 0;
  double pronoun_count = 0;
  double interrogative_count = 0;
  double negation_count = 0;
  double question_position = 0;  // first '?' token, normalized to (0, 1]
  double token_count = 0;
  std::vector<double> embedding;  // empty when no lookup configured

  std::vector<double> dense() const {
    std::vector<double> out = {modal_count,    pronoun_count, interrogative_count,
                               negation_count, question_position, token_count};
    out.insert(out.end(), embedding.begin(), embedding.end());
    return out;
  }

  static std::vector<std::string> feature_names(size_t embedding_dim) {
    std::vector<std::string> names = {"modal_count",    "pronoun_count",
                                      "interrogative_count", "negation_count",
                                      "question_position",   "token_count"};
    for (size_t d = 0; d < embedding_dim; ++d)
      names.push_back("emb_" + std::to_string(d));
    return names;
  }
};

struct EmbeddingLookup {
  std::unordered_map<std::string, std::vector<double>> vectors;
  size_t dim = 0;
};

inline EmbeddingLookup load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open embeddings file: " + path);
  EmbeddingLookup lookup;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::vector<double> vec;
    double v;
    while (row >> v) vec.push_back(v);
    if (vec.empty())
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": no vector components");
    if (lookup.dim == 0) lookup.dim = vec.size();
    if (vec.size() != lookup.dim)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": dimension mismatch");
    lookup.vectors[lower_ascii(word)] = std::move(vec);
  }
  return lookup;
}

inline RqFeatureVector extract_rq_features(const Utterance& message,
                                           const LexiconBundle& lexicons,
                                           const EmbeddingLookup* embeddings,
                                           const RqConfig& config = {}) {
  if (message.text.find('?') == std::string::npos)
    throw input_error("message '" + message.id +
                      "' contains no '?', outside the RQ model domain");
  std::vector<std::string> tokens = tokenize(message.text);
  RqFeatureVector features;
  features.token_count = static_cast<double>(tokens.size());
  int first_question = -1;
  std::vector<double> emb_sum;
  size_t emb_found = 0;
  if (embeddings) emb_sum.assign(embeddings->dim, 0.0);
  for (size_t idx = 0; idx < tokens.size(); ++idx) {
    std::string lower = lower_ascii(tokens[idx]);
    if (config.modal_verbs.count(lower)) features.modal_count += 1;
    if (config.pronouns.count(lower)) features.pronoun_count += 1;
    if (config.interrogatives.count(lower)) features.interrogative_count += 1;
    if (is_negation_marker(lower, lexicons)) features.negation_count += 1;
    if (first_question < 0 && lower.find('?') != std::string::npos)
      first_question = static_cast<int>(idx);
    if (embeddings) {
      auto it = embeddings->vectors.find(lower);
      if (it != embeddings->vectors.end()) {
        ++emb_found;
        for (size_t d = 0; d < emb_sum.size(); ++d) emb_sum[d] += it->second[d];
      }
    }
  }
  features.question_position =
      (first_question + 1) / static_cast<double>(tokens.size());
  if (embeddings) {
    features.embedding = std::move(emb_sum);
    if (emb_found > 0)
      for (double& v : features.embedding) v /= static_cast<double>(emb_found);
  }
  return features;
}

struct RqModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> scale_mean;
  std::vector<double> scale_std;
  size_t embedding_dim = 0;
  uint32_t seed = 0;
  double final_loss = 0.0;
  int epochs_run = 0;
  double lambda = 0.0;

  double margin(const std::vector<double>& x) const {
    double z = bias;
    for (size_t k = 0; k < weights.size(); ++k)
      z += weights[k] * (x[k] - scale_mean[k]) / scale_std[k];
    return z;
  }

  void save_json(const std::string& path) const {
    nlohmann::ordered_json j;
    j["feature_names"] = feature_names;
    j["weights"] = weights;
    j["bias"] = bias;
    j["scale_mean"] = scale_mean;
    j["scale_std"] = scale_std;
    j["embedding_dim"] = embedding_dim;
    j["seed"] = seed;
    j["meta"] = {{"final_loss", final_loss},
                 {"epochs_run", epochs_run},
                 {"lambda", lambda}};
    std::ofstream out(path);
    if (!out) throw input_error("cannot write RQ model: " + path);
    out << j.dump(2) << "\n";
  }

  static RqModel load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open RQ model: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw input_error(path + ": bad model JSON: " + e.what());
    }
    RqModel model;
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.scale_mean = j.at("scale_mean").get<std::vector<double>>();
    model.scale_std = j.at("scale_std").get<std::vector<double>>();
    model.embedding_dim = j.at("embedding_dim").get<size_t>();
    model.seed = j.at("seed").get<uint32_t>();
    if (j.contains("meta")) {
      model.final_loss = j["meta"].value("final_loss", 0.0);
      model.epochs_run = j["meta"].value("epochs_run", 0);
      model.lambda = j["meta"].value("lambda", 0.0);
    }
    return model;
  }
};

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-a)) without overflow
inline double softplus_neg(double a) {
  if (a > 30.0) return std::exp(-a);
  if (a < -30.0) return -a;
  return std::log1p(std::exp(-a));
}

}  // namespace detail

// L2-regularized logistic loss over standardized features; exposed separately
// so the gradient can be checked against finite differences.
inline double rq_loss_and_gradient(const std::vector<std::vector<double>>& x,
                                   const std::vector<int>& y,  // +1 RQ, -1 INFO
                                   const std::vector<double>& w, double b,
                                   double lambda, std::vector<double>& grad_w,
                                   double& grad_b) {
  const size_t n = x.size();
  const size_t dim = w.size();
  grad_w.assign(dim, 0.0);
  grad_b = 0.0;
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double z = b;
    for (size_t k = 0; k < dim; ++k) z += w[k] * x[i][k];
    double a = y[i] * z;
    loss += detail::softplus_neg(a);
    double coeff = -y[i] * detail::sigmoid(-a);
    for (size_t k = 0; k < dim; ++k) grad_w[k] += coeff * x[i][k];
    grad_b += coeff;
  }
  loss /= static_cast<double>(n);
  grad_b /= static_cast<double>(n);
  for (size_t k = 0; k < dim; ++k) {
    grad_w[k] /= static_cast<double>(n);
    grad_w[k] += lambda * w[k];
    loss += 0.5 * lambda * w[k] * w[k];
  }
  return loss;
}

inline RqModel train_rq_classifier(
    const std::vector<std::pair<Utterance, RqLabel>>& labeled,
    const LexiconBundle& lexicons, const EmbeddingLookup* embeddings,
    const RqConfig& config = {}) {
  if (labeled.empty()) throw input_error("train_rq_classifier: no training data");
  bool has_rq = false, has_info = false;
  for (const auto& [msg, label] : labeled)
    (label == RqLabel::Rq ? has_rq : has_info) = true;
  if (!has_rq || !has_info)
    throw input_error("train_rq_classifier: both classes must be present");

  std::vector<std::vector<double>> raw;
  std::vector<int> y;
  raw.reserve(labeled.size());
  for (const auto& [msg, label] : labeled) {
    raw.push_back(extract_rq_features(msg, lexicons, embeddings, config).dense());
    y.push_back(label == RqLabel::Rq ? +1 : -1);
  }
  const size_t dim = raw[0].size();

  RqModel model;
  model.embedding_dim = embeddings ? embeddings->dim : 0;
  model.feature_names = RqFeatureVector::feature_names(model.embedding_dim);
  model.seed = config.seed;
  model.lambda = config.lambda;
  model.scale_mean.assign(dim, 0.0);
  model.scale_std.assign(dim, 0.0);
  for (const auto& row : raw)
    for (size_t k = 0; k < dim; ++k) model.scale_mean[k] += row[k];
  for (size_t k = 0; k < dim; ++k)
    model.scale_mean[k] /= static_cast<double>(raw.size());
  for (const auto& row : raw)
    for (size_t k = 0; k < dim; ++k) {
      double d = row[k] - model.scale_mean[k];
      model.scale_std[k] += d * d;
    }
  for (size_t k = 0; k < dim; ++k) {
    model.scale_std[k] = std::sqrt(model.scale_std[k] / raw.size());
    if (model.scale_std[k] == 0.0) model.scale_std[k] = 1.0;  // constant feature
  }

  std::vector<std::vector<double>> x(raw.size(), std::vector<double>(dim));
  for (size_t i = 0; i < raw.size(); ++i)
    for (size_t k = 0; k < dim; ++k)
      x[i][k] = (raw[i][k] - model.scale_mean[k]) / model.scale_std[k];

  model.weights.assign(dim, 0.0);
  model.bias = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
  double prev_loss = std::numeric_limits<double>::infinity();
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    double loss = rq_loss_and_gradient(x, y, model.weights, model.bias,
                                       config.lambda, grad_w, grad_b);
    for (size_t k = 0; k < dim; ++k)
      model.weights[k] -= config.learning_rate * grad_w[k];
    model.bias -= config.learning_rate * grad_b;
    model.epochs_run = epoch + 1;
    model.final_loss = loss;
    if (std::abs(prev_loss - loss) < config.tolerance) break;
    prev_loss = loss;
  }
  return model;
}

// Calibrated score: sigmoid of the standardized margin. RQ iff score >= 0.5.
inline std::pair<RqLabel, double> predict_rq(const RqModel& model,
                                             const Utterance& message,
                                             const LexiconBundle& lexicons,
                                             const EmbeddingLookup* embeddings,
                                             const RqConfig& config = {}) {
  RqFeatureVector features =
      extract_rq_features(message, lexicons, embeddings, config);
  std::vector<double> x = features.dense();
  if (x.size() != model.weights.size())
    throw input_error("RQ model feature dimension mismatch");
  double score = detail::sigmoid(model.margin(x));
  return {score >= 0.5 ? RqLabel::Rq : RqLabel::InfoSeeking, score};
}

// Training data TSV: 'RQ<TAB>text' or 'INFO<TAB>text'.
inline std::vector<std::pair<Utterance, RqLabel>> load_rq_training(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open RQ training data: " + path);
  std::vector<std::pair<Utterance, RqLabel>> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 2)
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": expected 'label<TAB>text'");
    RqLabel label;
    if (cols[0] == "RQ")
      label = RqLabel::Rq;
    else if (cols[0] == "INFO")
      label = RqLabel::InfoSeeking;
    else
      throw input_error(path + " line " + std::to_string(line_no) +
                        ": label must be RQ or INFO");
    Utterance msg{"rq" + std::to_string(line_no), trim(cols[1]),
                  Role::SpeakerIronic};
    out.emplace_back(std::move(msg), label);
  }
  return out;
}

}  // namespace irony
