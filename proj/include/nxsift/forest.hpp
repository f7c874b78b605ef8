#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nxsift/features.hpp"

namespace nxsift {

enum class Label : uint8_t { benign = 0, agd = 1 };

struct LabeledSample {
    FeatureVector features;
    Label label = Label::benign;
    std::string family;  // optional tag
};

// Axis-aligned threshold split; feature < 0 marks a leaf carrying the
// training class counts.
struct TreeNode {
    int16_t feature = -1;
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    uint32_t n_benign = 0;
    uint32_t n_agd = 0;
};

class DecisionTree {
public:
    double predict_prob(const double* x) const;  // P(agd) at the reached leaf
    std::vector<TreeNode>& nodes() { return nodes_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

struct ForestParams {
    int n_trees = 100;
    uint64_t seed = 0;
    bool bootstrap = true;
    int n_threads = 0;  // 0 = hardware concurrency
};

struct Prediction {
    Label label = Label::benign;
    double score = 0.0;  // mean P(agd) across trees
};

// Bagged ensemble of Gini decision trees grown to purity (unlimited
// depth, minimum two samples to split, sqrt(p) feature candidates per
// node). Fully deterministic for a given (samples order, seed); trees
// train on independent seed-derived streams so threading cannot change
// the result.
class TreeEnsemble {
public:
    static TreeEnsemble train(const std::vector<LabeledSample>& samples, ForestParams params);

    Prediction predict(const FeatureVector& fv) const;
    Prediction predict_values(const std::vector<double>& values) const;

    int n_trees() const { return static_cast<int>(trees_.size()); }
    int n_features() const { return n_features_; }
    const ForestParams& params() const { return params_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::vector<DecisionTree>& trees() { return trees_; }
    void set_meta(ForestParams params, int n_features) {
        params_ = params;
        n_features_ = n_features;
    }

private:
    std::vector<DecisionTree> trees_;
    ForestParams params_;
    int n_features_ = kFeatureCount;
};

struct EvalReport {
    double precision_agd = 0, recall_agd = 0, f1_agd = 0;
    double precision_benign = 0, recall_benign = 0, f1_benign = 0;
    double f1_stddev = 0;  // of per-repeat agd F1
    long tp = 0, fp = 0, tn = 0, fn = 0;  // pooled, agd positive
};

// Stratified k-fold cross-validation repeated with fresh shuffles.
EvalReport cross_validate(const std::vector<LabeledSample>& samples, int folds, int repeats,
                          int n_trees, uint64_t seed);

double f1_score(double precision, double recall);

}  // namespace nxsift
