// SPDX-License-Identifier: Apache-2.0
//
// csisense - Wi-Fi channel state information sensing toolkit
// Copyright (C) 2026 The csisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "csisense/features.hpp"

namespace csisense {

// Per-dimension z-scoring; zero-variance dimensions keep std = 1.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static FeatureScaler fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

struct SvmOptions {
  double reg_c = 1.0;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;  // relative duality gap
  int max_epochs = 1000;
};

// Binary L2-regularized hinge-loss SVM on already-scaled rows, labels in {-1, +1}.
// The bias is learned as the weight of an appended constant feature.
struct BinarySvmSolution {
  Eigen::VectorXd weights;
  double bias = 0.0;
  int epochs = 0;
  double duality_gap = 0.0;
};

BinarySvmSolution solve_binary_svm(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double reg_c,
                                   std::uint64_t seed, double tolerance = 1e-4, int max_epochs = 1000);

// One-vs-rest multiclass linear SVM. Classes are sorted label names.
struct LinearSvm {
  Eigen::MatrixXd weights;  // classes x dims, in scaled feature space
  Eigen::VectorXd biases;
  double reg_c = 1.0;
  std::vector<std::string> class_names;
  FeatureScaler scaler;

  Index dims() const { return weights.cols(); }
  Eigen::VectorXd decision_values(const Eigen::VectorXd& x) const;
};

LinearSvm train_svm(const Eigen::MatrixXd& x, const std::vector<std::string>& labels, const SvmOptions& opts = {});

// Softmax over the decision values.
Eigen::VectorXd predict_proba(const LinearSvm& svm, const Eigen::VectorXd& x);
std::string predict(const LinearSvm& svm, const Eigen::VectorXd& x);

// Index of the largest entry, lowest index on ties.
Index argmax_first(const Eigen::VectorXd& v);

enum class FusionMode { Early, Late };

// Per-pair raw observation of one trace: a Gabor vector and/or dense SIFT rows.
struct PairObservation {
  Eigen::VectorXd gabor;
  Eigen::MatrixXd sift;
};

struct Sample {
  std::string action;
  std::string person;
  std::string room;
  std::string location;
  std::vector<PairObservation> pairs;
};

enum class LabelField { Action, Person, Room, Location };

const std::string& label_of(const Sample& s, LabelField field);
std::string to_string(LabelField field);
LabelField label_field_from_string(const std::string& name);

struct FusionOptions {
  FusionMode mode = FusionMode::Late;
  FeatureKind kind = FeatureKind::Gabor96;
  SvmOptions svm;
  Index codebook_size = 48;
};

struct FusionModel {
  FusionMode mode = FusionMode::Late;
  FeatureKind kind = FeatureKind::Gabor96;
  std::vector<LinearSvm> svms;         // 1 for Early, one per pair for Late
  std::vector<Codebook> codebooks;     // one per pair when kind is BowSift48
  std::vector<std::string> class_names;
  std::string pipeline_config;         // serialized settings snapshot

  Index pair_count() const { return pair_count_; }
  void set_pair_count(Index p) { pair_count_ = p; }

  // Per-pair feature vectors for a sample, quantized with the model's codebooks.
  std::vector<FeatureVector> featurize(const Sample& s) const;

private:
  Index pair_count_ = 0;
};

FusionModel train_fusion(const std::vector<Sample>& samples, const std::vector<std::size_t>& train, LabelField target,
                         const FusionOptions& opts);

struct FusedPrediction {
  std::string label;
  Eigen::VectorXd probabilities;  // over model.class_names
};

// Early: predict on the concatenation. Late: mean of per-pair probability vectors.
FusedPrediction fuse_predict(const FusionModel& model, const std::vector<FeatureVector>& feats);

struct KFold {
  int k = 10;
};
struct LeaveGroupOut {
  LabelField group = LabelField::Room;
};
// Location classifier routes each test sample to a per-location action model.
struct TwoStage {
  int k = 10;
};
// For every held-out group, train on 1..G-1 of the remaining groups.
struct TrainSubsetScaling {
  LabelField group = LabelField::Room;
};
using Protocol = std::variant<KFold, LeaveGroupOut, TwoStage, TrainSubsetScaling>;

std::string describe(const Protocol& p);

struct FoldResult {
  std::string name;
  double accuracy = 0.0;
  Index test_count = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<std::string> class_names;
  Eigen::MatrixXi confusion;  // rows true, columns predicted
  std::vector<FoldResult> per_fold;
  std::string protocol;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> extras;

  // Throws std::logic_error when accuracy and confusion disagree.
  void check_consistency() const;
};

// Stratified fold index for each sample, deterministic in the seed.
std::vector<int> stratified_folds(const std::vector<std::string>& labels, int k, std::uint64_t seed);

EvalReport cross_validate(const std::vector<Sample>& samples, const Protocol& protocol, LabelField target,
                          const FusionOptions& opts, std::uint64_t seed);

struct TwoStageModel {
  std::optional<FusionModel> location_model;  // empty when training saw one location
  std::string only_location;
  std::map<std::string, FusionModel> action_models;
  std::map<std::string, std::string> constant_actions;  // locations whose training data had one action
};

TwoStageModel train_two_stage(const std::vector<Sample>& samples, const std::vector<std::size_t>& train,
                              const FusionOptions& opts);

struct TwoStagePrediction {
  std::string location;
  std::string action;
};

TwoStagePrediction two_stage_classify(const TwoStageModel& model, const Sample& s);
// Bypasses the location stage.
std::string classify_given_location(const TwoStageModel& model, const Sample& s, const std::string& location);

} // namespace csisense
