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

#include "csisense/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "csisense/error.hpp"

namespace csisense {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

} // namespace

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& x) {
  FeatureScaler s;
  s.mean = x.colwise().mean().transpose();
  s.std.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().mean();
    const double sd = std::sqrt(var);
    s.std(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd FeatureScaler::apply(const Eigen::MatrixXd& x) const {
  return ((x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array()).matrix();
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& x) const {
  return ((x - mean).array() / std.array()).matrix();
}

BinarySvmSolution solve_binary_svm(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double reg_c,
                                   std::uint64_t seed, double tolerance, int max_epochs) {
  const Index n = z.rows(), d = z.cols();
  if (y.size() != n) throw std::invalid_argument("label count does not match rows");
  if (!(reg_c > 0.0)) throw std::invalid_argument("reg_c must be positive");

  Eigen::VectorXd qii = z.rowwise().squaredNorm().array() + 1.0;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);

  BinarySvmSolution sol;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index i : order) {
      const double g = y(i) * (z.row(i).dot(w) + b) - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha(i) >= reg_c) {
        pg = std::max(g, 0.0);
      }
      if (std::abs(pg) > 1e-12) {
        const double old = alpha(i);
        alpha(i) = std::clamp(old - g / qii(i), 0.0, reg_c);
        const double delta = (alpha(i) - old) * y(i);
        w.noalias() += delta * z.row(i).transpose();
        b += delta;
      }
    }
    const double wnorm2 = w.squaredNorm() + b * b;
    const Eigen::ArrayXd margins = 1.0 - y.array() * ((z * w).array() + b);
    const double primal = 0.5 * wnorm2 + reg_c * margins.max(0.0).sum();
    const double dual = alpha.sum() - 0.5 * wnorm2;
    sol.epochs = epoch + 1;
    sol.duality_gap = primal - dual;
    if (sol.duality_gap <= tolerance * std::max(std::abs(primal), 1e-12)) break;
  }
  if (!w.allFinite() || !std::isfinite(b)) throw NumericError("svm solver diverged");
  sol.weights = std::move(w);
  sol.bias = b;
  return sol;
}

Eigen::VectorXd LinearSvm::decision_values(const Eigen::VectorXd& x) const {
  if (x.size() != dims()) {
    throw std::invalid_argument("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                                std::to_string(dims()));
  }
  return weights * scaler.apply(x) + biases;
}

LinearSvm train_svm(const Eigen::MatrixXd& x, const std::vector<std::string>& labels, const SvmOptions& opts) {
  if (x.rows() != static_cast<Index>(labels.size())) throw std::invalid_argument("feature rows and labels differ");
  if (x.cols() < 1) throw std::invalid_argument("features need at least one dimension");
  if (!x.allFinite()) throw NumericError("non-finite feature values");
  LinearSvm svm;
  svm.class_names = sorted_unique(labels);
  if (svm.class_names.size() < 2) throw std::invalid_argument("training needs at least two classes");
  svm.reg_c = opts.reg_c;
  svm.scaler = FeatureScaler::fit(x);
  const Eigen::MatrixXd z = svm.scaler.apply(x);

  const auto C = static_cast<Index>(svm.class_names.size());
  svm.weights.resize(C, x.cols());
  svm.biases.resize(C);
  for (Index c = 0; c < C; ++c) {
    Eigen::VectorXd y(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      y(i) = labels[static_cast<std::size_t>(i)] == svm.class_names[static_cast<std::size_t>(c)] ? 1.0 : -1.0;
    }
    const auto sol = solve_binary_svm(z, y, opts.reg_c, mix_seed(opts.seed, static_cast<std::uint64_t>(c)),
                                      opts.tolerance, opts.max_epochs);
    svm.weights.row(c) = sol.weights.transpose();
    svm.biases(c) = sol.bias;
  }
  return svm;
}

Index argmax_first(const Eigen::VectorXd& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

Eigen::VectorXd predict_proba(const LinearSvm& svm, const Eigen::VectorXd& x) {
  const Eigen::VectorXd dv = svm.decision_values(x);
  const Eigen::ArrayXd e = (dv.array() - dv.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

std::string predict(const LinearSvm& svm, const Eigen::VectorXd& x) {
  return svm.class_names[static_cast<std::size_t>(argmax_first(svm.decision_values(x)))];
}

const std::string& label_of(const Sample& s, LabelField field) {
  switch (field) {
    case LabelField::Action: return s.action;
    case LabelField::Person: return s.person;
    case LabelField::Room: return s.room;
    case LabelField::Location: return s.location;
  }
  throw std::invalid_argument("unknown label field");
}

std::string to_string(LabelField field) {
  switch (field) {
    case LabelField::Action: return "action";
    case LabelField::Person: return "person";
    case LabelField::Room: return "room";
    case LabelField::Location: return "location";
  }
  return "?";
}

LabelField label_field_from_string(const std::string& name) {
  if (name == "action") return LabelField::Action;
  if (name == "person") return LabelField::Person;
  if (name == "room") return LabelField::Room;
  if (name == "location") return LabelField::Location;
  throw std::invalid_argument("unknown label field '" + name + "'");
}

std::vector<FeatureVector> FusionModel::featurize(const Sample& s) const {
  if (static_cast<Index>(s.pairs.size()) != pair_count_) {
    throw std::invalid_argument("sample has " + std::to_string(s.pairs.size()) + " pairs, model expects " +
                                std::to_string(pair_count_));
  }
  std::vector<FeatureVector> out;
  for (Index p = 0; p < pair_count_; ++p) {
    const auto& obs = s.pairs[static_cast<std::size_t>(p)];
    if (kind == FeatureKind::Gabor96) {
      if (obs.gabor.size() == 0) throw std::invalid_argument("missing gabor feature for pair " + std::to_string(p));
      out.push_back({obs.gabor, FeatureKind::Gabor96, p, false});
    } else {
      out.push_back(bow_quantize(obs.sift, codebooks.at(static_cast<std::size_t>(p)), p));
    }
  }
  return out;
}

namespace {

Eigen::VectorXd concatenate(const std::vector<FeatureVector>& feats) {
  Index total = 0;
  for (const auto& f : feats) total += f.values.size();
  Eigen::VectorXd out(total);
  Index off = 0;
  for (const auto& f : feats) {
    out.segment(off, f.values.size()) = f.values;
    off += f.values.size();
  }
  return out;
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw std::invalid_argument("inconsistent feature lengths");
    m.row(static_cast<Index>(i)) = rows[i].transpose();
  }
  return m;
}

} // namespace

FusionModel train_fusion(const std::vector<Sample>& samples, const std::vector<std::size_t>& train, LabelField target,
                         const FusionOptions& opts) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const auto P = static_cast<Index>(samples.at(train.front()).pairs.size());
  if (P < 1) throw std::invalid_argument("samples carry no pair observations");

  FusionModel model;
  model.mode = opts.mode;
  model.kind = opts.kind;
  model.set_pair_count(P);

  if (opts.kind == FeatureKind::BowSift48) {
    for (Index p = 0; p < P; ++p) {
      Index rows = 0;
      for (auto i : train) rows += samples.at(i).pairs.at(static_cast<std::size_t>(p)).sift.rows();
      Eigen::MatrixXd all(rows, kSiftDims);
      Index off = 0;
      for (auto i : train) {
        const auto& d = samples[i].pairs[static_cast<std::size_t>(p)].sift;
        all.middleRows(off, d.rows()) = d;
        off += d.rows();
      }
      model.codebooks.push_back(
          train_codebook(all, opts.codebook_size, mix_seed(opts.svm.seed, 1000 + static_cast<std::uint64_t>(p))));
    }
  }

  std::vector<std::string> labels;
  std::vector<std::vector<FeatureVector>> feats;
  for (auto i : train) {
    labels.push_back(label_of(samples.at(i), target));
    feats.push_back(model.featurize(samples[i]));
  }

  if (opts.mode == FusionMode::Early) {
    std::vector<Eigen::VectorXd> rows;
    for (const auto& f : feats) rows.push_back(concatenate(f));
    model.svms.push_back(train_svm(stack_rows(rows), labels, opts.svm));
  } else {
    for (Index p = 0; p < P; ++p) {
      std::vector<Eigen::VectorXd> rows;
      for (const auto& f : feats) rows.push_back(f[static_cast<std::size_t>(p)].values);
      model.svms.push_back(train_svm(stack_rows(rows), labels, opts.svm));
    }
  }
  model.class_names = model.svms.front().class_names;
  return model;
}

FusedPrediction fuse_predict(const FusionModel& model, const std::vector<FeatureVector>& feats) {
  if (static_cast<Index>(feats.size()) != model.pair_count()) {
    throw std::invalid_argument("missing pair feature: got " + std::to_string(feats.size()) + ", expected " +
                                std::to_string(model.pair_count()));
  }
  FusedPrediction out;
  if (model.mode == FusionMode::Early) {
    out.probabilities = predict_proba(model.svms.front(), concatenate(feats));
  } else {
    out.probabilities = Eigen::VectorXd::Zero(static_cast<Index>(model.class_names.size()));
    for (std::size_t p = 0; p < feats.size(); ++p) out.probabilities += predict_proba(model.svms.at(p), feats[p].values);
    out.probabilities /= static_cast<double>(feats.size());
  }
  out.label = model.class_names[static_cast<std::size_t>(argmax_first(out.probabilities))];
  return out;
}

std::string describe(const Protocol& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KFold>) return "kfold:" + std::to_string(v.k);
        if constexpr (std::is_same_v<T, LeaveGroupOut>) return "leave-group-out:" + to_string(v.group);
        if constexpr (std::is_same_v<T, TwoStage>) return "two-stage:" + std::to_string(v.k);
        if constexpr (std::is_same_v<T, TrainSubsetScaling>) return "train-subset-scaling:" + to_string(v.group);
      },
      p);
}

void EvalReport::check_consistency() const {
  const int total = confusion.sum();
  if (total == 0) throw std::logic_error("empty confusion matrix");
  const double acc = static_cast<double>(confusion.trace()) / total;
  if (std::abs(acc - accuracy) > 1e-12) throw std::logic_error("accuracy disagrees with confusion trace");
}

std::vector<int> stratified_folds(const std::vector<std::string>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (static_cast<int>(labels.size()) < k) throw std::invalid_argument("dataset smaller than fold count");
  std::vector<int> fold(labels.size(), 0);
  std::mt19937_64 rng(seed);
  std::size_t offset = 0;
  for (const auto& cls : sorted_unique(labels)) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t j = 0; j < idx.size(); ++j) fold[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    offset += idx.size();
  }
  return fold;
}

namespace {

struct Split {
  std::string name;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

class ConfusionAccumulator {
public:
  explicit ConfusionAccumulator(std::vector<std::string> classes) : classes_(std::move(classes)) {
    const auto n = static_cast<Index>(classes_.size());
    confusion_ = Eigen::MatrixXi::Zero(n, n);
  }

  void add(const std::string& truth, const std::string& predicted) {
    confusion_(index(truth), index(predicted)) += 1;
  }

  EvalReport finish(std::string protocol, std::uint64_t seed) const {
    EvalReport r;
    r.class_names = classes_;
    r.confusion = confusion_;
    r.accuracy = static_cast<double>(confusion_.trace()) / std::max(confusion_.sum(), 1);
    r.protocol = std::move(protocol);
    r.seed = seed;
    return r;
  }

private:
  Index index(const std::string& label) const {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
    if (it == classes_.end() || *it != label) throw std::logic_error("label outside the class list: " + label);
    return static_cast<Index>(it - classes_.begin());
  }

  std::vector<std::string> classes_;
  Eigen::MatrixXi confusion_;
};

std::vector<std::string> labels_for(const std::vector<Sample>& samples, LabelField f) {
  std::vector<std::string> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(label_of(s, f));
  return out;
}

void require_classes_trained(const std::vector<Sample>& samples, const std::vector<Split>& splits, LabelField target) {
  std::set<std::string> seen;
  for (const auto& sp : splits) {
    for (auto i : sp.train) seen.insert(label_of(samples[i], target));
  }
  for (const auto& s : samples) {
    if (!seen.count(label_of(s, target))) {
      throw std::invalid_argument("class '" + label_of(s, target) + "' is absent from every training fold");
    }
  }
}

std::vector<Split> kfold_splits(const std::vector<Sample>& samples, LabelField target, int k, std::uint64_t seed) {
  const auto folds = stratified_folds(labels_for(samples, target), k, seed);
  std::vector<Split> splits(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) splits[static_cast<std::size_t>(f)].name = "fold" + std::to_string(f);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      (folds[i] == f ? splits[static_cast<std::size_t>(f)].test : splits[static_cast<std::size_t>(f)].train).push_back(i);
    }
  }
  return splits;
}

std::vector<std::string> group_names(const std::vector<Sample>& samples, LabelField group) {
  auto g = sorted_unique(labels_for(samples, group));
  if (g.size() < 2) throw std::invalid_argument("leave-group-out needs at least two groups");
  return g;
}

// Train on `train_groups`, test on `test_group`.
Split group_split(const std::vector<Sample>& samples, LabelField group, const std::string& test_group,
                  const std::vector<std::string>& train_groups) {
  Split sp;
  sp.name = test_group;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& g = label_of(samples[i], group);
    if (g == test_group) {
      sp.test.push_back(i);
    } else if (std::find(train_groups.begin(), train_groups.end(), g) != train_groups.end()) {
      sp.train.push_back(i);
    }
  }
  return sp;
}

double run_split(const std::vector<Sample>& samples, const Split& sp, LabelField target, const FusionOptions& opts,
                 ConfusionAccumulator& acc) {
  const FusionModel model = train_fusion(samples, sp.train, target, opts);
  Index correct = 0;
  for (auto i : sp.test) {
    const auto pred = fuse_predict(model, model.featurize(samples[i]));
    const auto& truth = label_of(samples[i], target);
    acc.add(truth, pred.label);
    correct += pred.label == truth ? 1 : 0;
  }
  return sp.test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(sp.test.size());
}

} // namespace

EvalReport cross_validate(const std::vector<Sample>& samples, const Protocol& protocol, LabelField target,
                          const FusionOptions& options, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("empty dataset");
  FusionOptions opts = options;
  opts.svm.seed = seed;
  ConfusionAccumulator acc(sorted_unique(labels_for(samples, target)));
  std::vector<FoldResult> folds;
  std::vector<std::pair<std::string, double>> extras;

  if (const auto* kf = std::get_if<KFold>(&protocol)) {
    const auto splits = kfold_splits(samples, target, kf->k, seed);
    require_classes_trained(samples, splits, target);
    for (const auto& sp : splits) {
      folds.push_back({sp.name, run_split(samples, sp, target, opts, acc), static_cast<Index>(sp.test.size())});
    }
  } else if (const auto* lgo = std::get_if<LeaveGroupOut>(&protocol)) {
    const auto groups = group_names(samples, lgo->group);
    std::vector<Split> splits;
    for (const auto& g : groups) {
      std::vector<std::string> others;
      for (const auto& o : groups) {
        if (o != g) others.push_back(o);
      }
      splits.push_back(group_split(samples, lgo->group, g, others));
    }
    require_classes_trained(samples, splits, target);
    for (const auto& sp : splits) {
      folds.push_back({sp.name, run_split(samples, sp, target, opts, acc), static_cast<Index>(sp.test.size())});
    }
  } else if (const auto* ts = std::get_if<TwoStage>(&protocol)) {
    if (target != LabelField::Action) throw std::invalid_argument("two-stage protocol predicts actions");
    const auto splits = kfold_splits(samples, target, ts->k, seed);
    require_classes_trained(samples, splits, target);
    Index loc_correct = 0, total = 0;
    for (const auto& sp : splits) {
      const auto model = train_two_stage(samples, sp.train, opts);
      Index correct = 0;
      for (auto i : sp.test) {
        const auto pred = two_stage_classify(model, samples[i]);
        acc.add(samples[i].action, pred.action);
        correct += pred.action == samples[i].action ? 1 : 0;
        loc_correct += pred.location == samples[i].location ? 1 : 0;
        ++total;
      }
      folds.push_back({sp.name, sp.test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(sp.test.size()),
                       static_cast<Index>(sp.test.size())});
    }
    extras.emplace_back("location_accuracy", static_cast<double>(loc_correct) / static_cast<double>(total));
  } else if (const auto* sc = std::get_if<TrainSubsetScaling>(&protocol)) {
    const auto groups = group_names(samples, sc->group);
    const std::size_t G = groups.size();
    std::vector<double> sums(G, 0.0);
    std::vector<Split> full_splits;
    for (std::size_t gi = 0; gi < G; ++gi) {
      std::vector<std::string> others;
      for (std::size_t j = 1; j < G; ++j) others.push_back(groups[(gi + j) % G]);
      full_splits.push_back(group_split(samples, sc->group, groups[gi], others));
    }
    require_classes_trained(samples, full_splits, target);
    for (std::size_t gi = 0; gi < G; ++gi) {
      std::vector<std::string> others;
      for (std::size_t j = 1; j < G; ++j) others.push_back(groups[(gi + j) % G]);
      for (std::size_t m = 1; m < G; ++m) {
        const std::vector<std::string> used(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(m));
        auto sp = group_split(samples, sc->group, groups[gi], used);
        sp.name = groups[gi] + "/train" + std::to_string(m);
        // Only the full-training run feeds the confusion matrix.
        ConfusionAccumulator scratch(sorted_unique(labels_for(samples, target)));
        const double a = run_split(samples, sp, target, opts, m + 1 == G ? acc : scratch);
        sums[m] += a;
        folds.push_back({sp.name, a, static_cast<Index>(sp.test.size())});
      }
    }
    for (std::size_t m = 1; m < G; ++m) {
      extras.emplace_back("mean_accuracy_train" + std::to_string(m), sums[m] / static_cast<double>(G));
    }
  }

  EvalReport report = acc.finish(describe(protocol), seed);
  report.per_fold = std::move(folds);
  report.extras = std::move(extras);
  return report;
}

TwoStageModel train_two_stage(const std::vector<Sample>& samples, const std::vector<std::size_t>& train,
                              const FusionOptions& opts) {
  TwoStageModel model;
  std::vector<std::string> locs;
  for (auto i : train) locs.push_back(samples.at(i).location);
  locs = sorted_unique(locs);
  if (locs.empty()) throw std::invalid_argument("empty training set");
  if (locs.size() > 1) {
    model.location_model = train_fusion(samples, train, LabelField::Location, opts);
  } else {
    model.only_location = locs.front();
  }
  for (const auto& loc : locs) {
    std::vector<std::size_t> idx;
    std::vector<std::string> actions;
    for (auto i : train) {
      if (samples[i].location == loc) {
        idx.push_back(i);
        actions.push_back(samples[i].action);
      }
    }
    actions = sorted_unique(actions);
    if (actions.size() == 1) {
      model.constant_actions[loc] = actions.front();
    } else {
      model.action_models.emplace(loc, train_fusion(samples, idx, LabelField::Action, opts));
    }
  }
  return model;
}

std::string classify_given_location(const TwoStageModel& model, const Sample& s, const std::string& location) {
  if (auto it = model.constant_actions.find(location); it != model.constant_actions.end()) return it->second;
  auto it = model.action_models.find(location);
  if (it == model.action_models.end()) {
    throw std::out_of_range("predicted location '" + location + "' lacks an action model");
  }
  return fuse_predict(it->second, it->second.featurize(s)).label;
}

TwoStagePrediction two_stage_classify(const TwoStageModel& model, const Sample& s) {
  TwoStagePrediction out;
  if (model.location_model) {
    out.location = fuse_predict(*model.location_model, model.location_model->featurize(s)).label;
  } else {
    out.location = model.only_location;
  }
  out.action = classify_given_location(model, s, out.location);
  return out;
}

} // namespace csisense
