#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabaudit/profile.hpp"

namespace tabaudit {

struct MembershipScore {
  std::string record_id;
  double score = 0.0;  // in [0, 1]
};

// Binary GBDT over error profiles plus the layout it was trained with.
struct AttackClassifier {
  GbdtModel model;
  FeatureSet features;
  ProfileLayout layout;
};

// Logistic-loss GBDT on labeled profiles; both labels must be present.
AttackClassifier train_attack_classifier(const ProfileTable& train,
                                         const GbdtHyperparams& hyper,
                                         std::uint64_t seed);

// Member probability per profile row, in row order.
std::vector<double> classify_profiles(const AttackClassifier& classifier,
                                      const ProfileTable& profiles);

// Scores each challenge record with predictors trained on the target's
// synthetic data. One score per record, input order preserved.
std::vector<MembershipScore> score_membership(
    const AttackClassifier& classifier,
    const std::vector<AttributePredictor>& target_predictors,
    const Dataset& challenge, std::span<const std::string> record_ids,
    const ErrorRatioParams& ratio = {});

struct AblationCandidate {
  std::string classifier_name;  // hyperparameter preset label
  FeatureSet features;
  GbdtHyperparams hyper;
};

struct AblationRow {
  std::string classifier_name;
  std::string feature_set;
  double tpr_at_fpr = 0.0;
  double auc_roc = 0.0;
};

struct SelectionResult {
  std::size_t best_index = 0;
  std::vector<AblationRow> report;   // one row per candidate, input order
};

// Ranking rule shared with tests: highest tpr, ties by auc, then by
// lexicographically smallest feature-set name, then input order.
std::size_t pick_best_row(const std::vector<AblationRow>& rows);

// Trains every candidate on the training profiles and evaluates it on the
// validation profiles (which must come from disjoint shadow instances).
SelectionResult select_best_config(
    const std::vector<AblationCandidate>& candidates,
    const ProfileTable& train_full, const ProfileTable& validation_full,
    double fpr_cap, std::uint64_t seed);

// CSV: classifier,feature_set,tpr_at_10fpr,auc_roc
void write_ablation_csv(const std::string& path,
                        const SelectionResult& result);

void write_scores_csv(const std::string& path,
                      std::span<const MembershipScore> scores);

}  // namespace tabaudit
