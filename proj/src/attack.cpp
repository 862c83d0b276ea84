#include "tabaudit/attack.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "tabaudit/error.hpp"
#include "tabaudit/metrics.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

AttackClassifier train_attack_classifier(const ProfileTable& train,
                                         const GbdtHyperparams& hyper,
                                         std::uint64_t seed) {
  if (train.labels.size() != train.values.rows()) {
    throw Error("attack classifier: profiles are not labeled");
  }
  bool saw[2] = {false, false};
  for (int label : train.labels) {
    if (label != 0 && label != 1) {
      throw Error("attack classifier: labels must be 0 or 1");
    }
    saw[label] = true;
  }
  if (!saw[0] || !saw[1]) {
    throw Error("attack classifier: both member and non-member profiles are "
                "required");
  }
  GbdtHyperparams hp = hyper;
  hp.loss = Loss::LogisticBinary;
  AttackClassifier classifier;
  classifier.model =
      fit_classification(train.values, train.labels, 2, hp, seed);
  classifier.features = train.features;
  classifier.layout = train.layout;
  return classifier;
}

std::vector<double> classify_profiles(const AttackClassifier& classifier,
                                      const ProfileTable& profiles) {
  if (!(profiles.layout == classifier.layout)) {
    throw Error("attack classifier: profile layout does not match the "
                "classifier's layout");
  }
  std::vector<double> scores(profiles.values.rows());
  for (std::size_t r = 0; r < profiles.values.rows(); ++r) {
    scores[r] = classifier.model.predict_proba(profiles.values.row(r))[1];
  }
  return scores;
}

std::vector<MembershipScore> score_membership(
    const AttackClassifier& classifier,
    const std::vector<AttributePredictor>& target_predictors,
    const Dataset& challenge, std::span<const std::string> record_ids,
    const ErrorRatioParams& ratio) {
  if (!record_ids.empty() && record_ids.size() != challenge.row_count()) {
    throw Error("score_membership: record id count does not match the "
                "challenge rows");
  }
  if (challenge.row_count() == 0) {
    return {};
  }
  ProfileTable profiles =
      extract_profile_table(target_predictors, classifier.layout,
                            classifier.features, challenge, "c", -1, ratio);
  const std::vector<double> scores = classify_profiles(classifier, profiles);
  std::vector<MembershipScore> out(scores.size());
  for (std::size_t r = 0; r < scores.size(); ++r) {
    out[r].record_id =
        record_ids.empty() ? profiles.ids[r] : record_ids[r];
    out[r].score = scores[r];
  }
  return out;
}

std::size_t pick_best_row(const std::vector<AblationRow>& rows) {
  if (rows.empty()) {
    throw Error("select_best_config: empty candidate list");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const AblationRow& a = rows[i];
    const AblationRow& b = rows[best];
    if (a.tpr_at_fpr != b.tpr_at_fpr) {
      if (a.tpr_at_fpr > b.tpr_at_fpr) {
        best = i;
      }
    } else if (a.auc_roc != b.auc_roc) {
      if (a.auc_roc > b.auc_roc) {
        best = i;
      }
    } else if (a.feature_set < b.feature_set) {
      best = i;
    }
  }
  return best;
}

SelectionResult select_best_config(
    const std::vector<AblationCandidate>& candidates,
    const ProfileTable& train_full, const ProfileTable& validation_full,
    double fpr_cap, std::uint64_t seed) {
  if (candidates.empty()) {
    throw Error("select_best_config: empty candidate list");
  }
  SelectionResult result;
  result.report.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const AblationCandidate& cand = candidates[i];
    const ProfileTable train = project_profiles(train_full, cand.features);
    const ProfileTable valid =
        project_profiles(validation_full, cand.features);
    const AttackClassifier classifier = train_attack_classifier(
        train, cand.hyper, derive_seed(seed, "candidate", i));
    const std::vector<double> scores = classify_profiles(classifier, valid);
    AblationRow row;
    row.classifier_name = cand.classifier_name;
    row.feature_set = cand.features.name();
    row.tpr_at_fpr = tpr_at_fpr(scores, valid.labels, fpr_cap);
    row.auc_roc = auc(scores, valid.labels);
    result.report.push_back(std::move(row));
  }
  result.best_index = pick_best_row(result.report);
  return result;
}

void write_ablation_csv(const std::string& path,
                        const SelectionResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write ablation file '" + path + "'");
  }
  out << "classifier,feature_set,tpr_at_10fpr,auc_roc\n";
  char buf[64];
  for (const AblationRow& row : result.report) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", row.tpr_at_fpr,
                  row.auc_roc);
    out << row.classifier_name << ',' << row.feature_set << buf;
  }
}

void write_scores_csv(const std::string& path,
                      std::span<const MembershipScore> scores) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write scores file '" + path + "'");
  }
  out << "record_id,score\n";
  char buf[32];
  for (const MembershipScore& s : scores) {
    std::snprintf(buf, sizeof(buf), ",%.6f\n", s.score);
    out << s.record_id << buf;
  }
}

}  // namespace tabaudit
