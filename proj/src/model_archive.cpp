#include "nxsift/model_archive.hpp"

#include <fstream>

#include "json.hpp"

namespace nxsift {

using nlohmann::json;

void save_model(const ModelArchive& model, const std::string& path) {
    json doc;
    doc["version"] = kArchiveVersion;
    doc["feature_order_hash"] = feature_order_hash();
    json feature_names = json::array();
    for (const char* n : FeatureVector::names()) feature_names.push_back(n);
    doc["feature_names"] = feature_names;

    for (int n = 3; n <= 5; ++n)
        doc["grams"][std::to_string(n)] = model.grams.sorted_grams(n);

    json rows = json::array();
    for (const auto& row : model.markov.log_prob()) {
        json r = json::array();
        for (double v : row) r.push_back(v);
        rows.push_back(std::move(r));
    }
    doc["markov"]["log_prob"] = std::move(rows);
    doc["markov"]["threshold"] = model.markov.threshold();

    doc["forest"]["n_trees"] = model.forest.n_trees();
    doc["forest"]["n_features"] = model.forest.n_features();
    doc["forest"]["seed"] = model.forest.params().seed;
    doc["forest"]["bootstrap"] = model.forest.params().bootstrap;
    json trees = json::array();
    for (const auto& tree : model.forest.trees()) {
        json nodes = json::array();
        for (const auto& n : tree.nodes()) {
            nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right,
                                         n.n_benign, n.n_agd}));
        }
        trees.push_back(std::move(nodes));
    }
    doc["forest"]["trees"] = std::move(trees);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model: " + path);
    out << doc.dump() << "\n";
}

ModelArchive load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    json doc;
    in >> doc;

    if (!doc.contains("version") || doc["version"].get<int>() != kArchiveVersion)
        throw ModelMismatchError("model archive version mismatch");
    if (doc["feature_order_hash"].get<uint64_t>() != feature_order_hash())
        throw ModelMismatchError("model was built against a different feature layout");

    ModelArchive model;
    for (int n = 3; n <= 5; ++n) {
        for (const auto& g : doc["grams"][std::to_string(n)])
            model.grams.insert_gram(n, g.get<std::string>());
    }

    std::array<std::array<double, MarkovGibberishModel::kSymbols>,
               MarkovGibberishModel::kSymbols>
        log_prob;
    const auto& rows = doc["markov"]["log_prob"];
    for (int r = 0; r < MarkovGibberishModel::kSymbols; ++r)
        for (int c = 0; c < MarkovGibberishModel::kSymbols; ++c)
            log_prob[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    model.markov.set(log_prob, doc["markov"]["threshold"].get<double>());

    ForestParams params;
    params.n_trees = doc["forest"]["n_trees"].get<int>();
    params.seed = doc["forest"]["seed"].get<uint64_t>();
    params.bootstrap = doc["forest"]["bootstrap"].get<bool>();
    model.forest.set_meta(params, doc["forest"]["n_features"].get<int>());
    for (const auto& tree_doc : doc["forest"]["trees"]) {
        DecisionTree tree;
        for (const auto& n : tree_doc) {
            TreeNode node;
            node.feature = static_cast<int16_t>(n[0].get<int>());
            node.threshold = n[1].get<double>();
            node.left = n[2].get<int32_t>();
            node.right = n[3].get<int32_t>();
            node.n_benign = n[4].get<uint32_t>();
            node.n_agd = n[5].get<uint32_t>();
            tree.nodes().push_back(node);
        }
        model.forest.trees().push_back(std::move(tree));
    }
    return model;
}

uint64_t file_fnv1a(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace nxsift
