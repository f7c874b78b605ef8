#include "nxsift/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "nxsift/rng.hpp"

namespace nxsift {

double DecisionTree::predict_prob(const double* x) const {
    int32_t i = 0;
    while (nodes_[static_cast<size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes_[static_cast<size_t>(i)];
        i = x[n.feature] < n.threshold ? n.left : n.right;
    }
    const TreeNode& leaf = nodes_[static_cast<size_t>(i)];
    const double total = static_cast<double>(leaf.n_benign) + static_cast<double>(leaf.n_agd);
    return total == 0.0 ? 0.0 : static_cast<double>(leaf.n_agd) / total;
}

namespace {

// column-major copy of the training matrix
struct Dataset {
    std::vector<std::vector<double>> cols;
    std::vector<uint8_t> labels;
    size_t n() const { return labels.size(); }
    int p() const { return static_cast<int>(cols.size()); }
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double child_impurity = 0.0;
};

double gini(double n_benign, double n_agd) {
    const double total = n_benign + n_agd;
    if (total == 0.0) return 0.0;
    const double pb = n_benign / total, pa = n_agd / total;
    return 1.0 - pb * pb - pa * pa;
}

// Best midpoint threshold on one feature over idx[begin..end), or
// nullopt-equivalent (feature = -1) when the feature is constant there.
SplitChoice best_split_on_feature(const Dataset& data, int feature,
                                  const std::vector<uint32_t>& idx, size_t begin, size_t end,
                                  std::vector<std::pair<double, uint8_t>>& scratch) {
    const auto& col = data.cols[static_cast<size_t>(feature)];
    scratch.clear();
    for (size_t i = begin; i < end; ++i)
        scratch.emplace_back(col[idx[i]], data.labels[idx[i]]);
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    const size_t n = scratch.size();
    double total_agd = 0;
    for (const auto& [v, y] : scratch) total_agd += y;
    const double total = static_cast<double>(n);

    SplitChoice best;
    double best_impurity = std::numeric_limits<double>::infinity();
    double left_n = 0, left_agd = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        left_n += 1;
        left_agd += scratch[i].second;
        if (scratch[i].first == scratch[i + 1].first) continue;
        const double right_n = total - left_n;
        const double right_agd = total_agd - left_agd;
        const double weighted = (left_n / total) * gini(left_n - left_agd, left_agd) +
                                (right_n / total) * gini(right_n - right_agd, right_agd);
        if (weighted < best_impurity) {
            best_impurity = weighted;
            best.feature = feature;
            best.threshold = scratch[i].first + (scratch[i + 1].first - scratch[i].first) / 2.0;
            best.child_impurity = weighted;
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, Rng rng) : data_(data), rng_(rng) {}

    DecisionTree build(std::vector<uint32_t> idx) {
        DecisionTree tree;
        build_node(tree, idx, 0, idx.size());
        return tree;
    }

private:
    int32_t build_node(DecisionTree& tree, std::vector<uint32_t>& idx, size_t begin, size_t end) {
        const int32_t node_id = static_cast<int32_t>(tree.nodes().size());
        tree.nodes().emplace_back();

        uint32_t n_agd = 0;
        for (size_t i = begin; i < end; ++i) n_agd += data_.labels[idx[i]];
        const uint32_t n_total = static_cast<uint32_t>(end - begin);
        tree.nodes()[static_cast<size_t>(node_id)].n_benign = n_total - n_agd;
        tree.nodes()[static_cast<size_t>(node_id)].n_agd = n_agd;

        if (n_total < 2 || n_agd == 0 || n_agd == n_total) return node_id;  // leaf

        // sqrt(p) candidate features per node, drawn in shuffled order;
        // constant features do not count against the budget
        std::vector<int> order(static_cast<size_t>(data_.p()));
        for (int f = 0; f < data_.p(); ++f) order[static_cast<size_t>(f)] = f;
        {
            std::vector<int> tmp = order;
            rng_.shuffle(tmp);
            order = std::move(tmp);
        }
        const int budget =
            std::max(1, static_cast<int>(std::sqrt(static_cast<double>(data_.p()))));

        const double parent =
            gini(static_cast<double>(n_total - n_agd), static_cast<double>(n_agd));
        SplitChoice best;
        double best_impurity = std::numeric_limits<double>::infinity();
        int usable_seen = 0;
        for (int f : order) {
            SplitChoice c = best_split_on_feature(data_, f, idx, begin, end, scratch_);
            if (c.feature < 0) continue;  // constant on this node
            ++usable_seen;
            if (c.child_impurity < best_impurity) {
                best_impurity = c.child_impurity;
                best = c;
            }
            if (usable_seen >= budget) break;
        }
        if (best.feature < 0 || best_impurity >= parent - 1e-12) return node_id;  // leaf

        const auto& col = data_.cols[static_cast<size_t>(best.feature)];
        auto* base = idx.data();
        uint32_t* mid = std::partition(base + begin, base + end, [&](uint32_t s) {
            return col[s] < best.threshold;
        });
        const size_t mid_pos = static_cast<size_t>(mid - base);
        if (mid_pos == begin || mid_pos == end) return node_id;  // numeric edge, keep leaf

        tree.nodes()[static_cast<size_t>(node_id)].feature =
            static_cast<int16_t>(best.feature);
        tree.nodes()[static_cast<size_t>(node_id)].threshold = best.threshold;
        const int32_t left = build_node(tree, idx, begin, mid_pos);
        tree.nodes()[static_cast<size_t>(node_id)].left = left;
        const int32_t right = build_node(tree, idx, mid_pos, end);
        tree.nodes()[static_cast<size_t>(node_id)].right = right;
        return node_id;
    }

    const Dataset& data_;
    Rng rng_;
    std::vector<std::pair<double, uint8_t>> scratch_;
};

Dataset to_dataset(const std::vector<LabeledSample>& samples) {
    Dataset data;
    data.cols.assign(kFeatureCount, {});
    for (auto& col : data.cols) col.reserve(samples.size());
    data.labels.reserve(samples.size());
    for (const auto& s : samples) {
        const auto vals = s.features.values();
        for (int f = 0; f < kFeatureCount; ++f) data.cols[static_cast<size_t>(f)].push_back(vals[static_cast<size_t>(f)]);
        data.labels.push_back(s.label == Label::agd ? 1 : 0);
    }
    return data;
}

}  // namespace

TreeEnsemble TreeEnsemble::train(const std::vector<LabeledSample>& samples,
                                 ForestParams params) {
    if (samples.size() < 2) throw std::invalid_argument("train: need at least two samples");
    if (params.n_trees < 1) throw std::invalid_argument("train: n_trees must be >= 1");
    bool has_benign = false, has_agd = false;
    for (const auto& s : samples) (s.label == Label::agd ? has_agd : has_benign) = true;
    if (!has_benign || !has_agd)
        throw std::invalid_argument("train: both classes must be present");

    const Dataset data = to_dataset(samples);
    TreeEnsemble model;
    model.params_ = params;
    model.n_features_ = kFeatureCount;
    model.trees_.resize(static_cast<size_t>(params.n_trees));

    const size_t n = data.n();
    auto fit_tree = [&](int tree_idx) {
        Rng rng = Rng::stream(params.seed, static_cast<uint64_t>(tree_idx));
        std::vector<uint32_t> idx(n);
        if (params.bootstrap) {
            for (size_t i = 0; i < n; ++i)
                idx[i] = static_cast<uint32_t>(rng.next_below(n));
        } else {
            for (size_t i = 0; i < n; ++i) idx[i] = static_cast<uint32_t>(i);
        }
        TreeBuilder builder(data, rng);
        model.trees_[static_cast<size_t>(tree_idx)] = builder.build(std::move(idx));
    };

    int hw = params.n_threads > 0 ? params.n_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const int workers = std::min(hw, params.n_trees);
    if (workers == 1) {
        for (int i = 0; i < params.n_trees; ++i) fit_tree(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= params.n_trees) return;
                    fit_tree(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return model;
}

Prediction TreeEnsemble::predict(const FeatureVector& fv) const {
    const auto vals = fv.values();
    return predict_values(std::vector<double>(vals.begin(), vals.end()));
}

Prediction TreeEnsemble::predict_values(const std::vector<double>& values) const {
    if (static_cast<int>(values.size()) != n_features_)
        throw std::invalid_argument("predict: feature arity mismatch");
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_prob(values.data());
    Prediction out;
    out.score = trees_.empty() ? 0.0 : sum / static_cast<double>(trees_.size());
    out.label = out.score >= 0.5 ? Label::agd : Label::benign;
    return out;
}

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

EvalReport cross_validate(const std::vector<LabeledSample>& samples, int folds, int repeats,
                          int n_trees, uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (repeats < 1) throw std::invalid_argument("cross_validate: repeats must be >= 1");
    std::vector<uint32_t> benign_idx, agd_idx;
    for (size_t i = 0; i < samples.size(); ++i) {
        (samples[i].label == Label::agd ? agd_idx : benign_idx)
            .push_back(static_cast<uint32_t>(i));
    }
    if (benign_idx.size() < static_cast<size_t>(folds) ||
        agd_idx.size() < static_cast<size_t>(folds))
        throw std::invalid_argument("cross_validate: too few samples per fold");

    EvalReport report;
    std::vector<double> repeat_f1;
    for (int rep = 0; rep < repeats; ++rep) {
        Rng rng = Rng::stream(seed, 0x5cf00000ULL + static_cast<uint64_t>(rep));
        std::vector<uint32_t> b = benign_idx, a = agd_idx;
        rng.shuffle(b);
        rng.shuffle(a);
        std::vector<int> fold_of(samples.size(), 0);
        for (size_t i = 0; i < b.size(); ++i) fold_of[b[i]] = static_cast<int>(i % static_cast<size_t>(folds));
        for (size_t i = 0; i < a.size(); ++i) fold_of[a[i]] = static_cast<int>(i % static_cast<size_t>(folds));

        long tp = 0, fp = 0, tn = 0, fn = 0;
        for (int fold = 0; fold < folds; ++fold) {
            std::vector<LabeledSample> train_set;
            std::vector<uint32_t> test_idx;
            train_set.reserve(samples.size());
            for (size_t i = 0; i < samples.size(); ++i) {
                if (fold_of[i] == fold) test_idx.push_back(static_cast<uint32_t>(i));
                else train_set.push_back(samples[i]);
            }
            ForestParams params;
            params.n_trees = n_trees;
            params.seed = seed ^ (0x9e3779b97f4a7c15ULL *
                                  (static_cast<uint64_t>(rep) * static_cast<uint64_t>(folds) +
                                   static_cast<uint64_t>(fold) + 1));
            TreeEnsemble model = TreeEnsemble::train(train_set, params);
            for (uint32_t i : test_idx) {
                const Prediction pred = model.predict(samples[i].features);
                const bool truth_agd = samples[i].label == Label::agd;
                const bool pred_agd = pred.label == Label::agd;
                if (truth_agd && pred_agd) ++tp;
                else if (!truth_agd && pred_agd) ++fp;
                else if (!truth_agd && !pred_agd) ++tn;
                else ++fn;
            }
        }
        report.tp += tp;
        report.fp += fp;
        report.tn += tn;
        report.fn += fn;
        const double prec = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double rec = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        repeat_f1.push_back(f1_score(prec, rec));
    }

    const double tp = static_cast<double>(report.tp), fp = static_cast<double>(report.fp);
    const double tn = static_cast<double>(report.tn), fn = static_cast<double>(report.fn);
    report.precision_agd = tp + fp == 0 ? 0.0 : tp / (tp + fp);
    report.recall_agd = tp + fn == 0 ? 0.0 : tp / (tp + fn);
    report.f1_agd = f1_score(report.precision_agd, report.recall_agd);
    report.precision_benign = tn + fn == 0 ? 0.0 : tn / (tn + fn);
    report.recall_benign = tn + fp == 0 ? 0.0 : tn / (tn + fp);
    report.f1_benign = f1_score(report.precision_benign, report.recall_benign);

    double mean = 0.0;
    for (double f : repeat_f1) mean += f;
    mean /= static_cast<double>(repeat_f1.size());
    double var = 0.0;
    for (double f : repeat_f1) var += (f - mean) * (f - mean);
    report.f1_stddev = repeat_f1.size() < 2
                           ? 0.0
                           : std::sqrt(var / static_cast<double>(repeat_f1.size() - 1));
    return report;
}

}  // namespace nxsift
