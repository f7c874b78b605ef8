#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "nxsift/segmenter.hpp"

namespace nxsift {

// Intermediate strings a feature vector is computed from.
struct SequenceBundle {
    std::string dom;      // SLD as observed
    std::string dom_d;    // digits removed
    std::string dom_ws;   // split words joined by single spaces
    std::string dom_wds;  // split words of the digit-stripped SLD
    std::string dom_w2;   // concatenated words longer than 2
    std::string dom_w3;   // concatenated words longer than 3
    std::vector<std::string> grams3, grams4, grams5;  // distinct n-grams of dom
};

SequenceBundle derive_sequences(std::string_view sld, const Segmentation& seg_ws,
                                const Segmentation& seg_wds);

constexpr int kFeatureCount = 21;

struct FeatureVector {
    double l_hex = 0;      // 1 iff every character is in [0-9a-f]
    double l_len = 0;
    double l_dig = 0;
    double l_con_max = 0;  // longest consecutive-consonant run ('y' is a consonant)
    double l_w2 = 0;
    double l_w3 = 0;
    double r_con_vow = 0;  // consonants / max(1, vowels)
    double r_dom_3g = 0;
    double r_dom_4g = 0;
    double r_dom_5g = 0;
    double m2_dom_ws = 0;
    double m2_dom_wds = 0;
    double r_ws_len = 0;
    double r_wds_len = 0;
    double r_w2_len = 0;
    double r_w3_len = 0;
    double e_dom = 0;
    double e_dom_ws = 0;
    double e_dom_wds = 0;
    double e_dom_w2 = 0;
    double e_dom_w3 = 0;

    std::array<double, kFeatureCount> values() const;
    static const std::array<const char*, kFeatureCount>& names();
};

// FNV-1a over the comma-joined feature names; persisted with models so
// a stale archive cannot be applied to a different extractor layout.
uint64_t feature_order_hash();

// Membership sets of character n-grams (n in 3..5) harvested from a
// benign SLD corpus.
class BenignGramSet {
public:
    void add_sld(std::string_view sld);
    bool contains(int n, std::string_view gram) const;
    size_t size(int n) const;

    // sorted, for deterministic serialization
    std::vector<std::string> sorted_grams(int n) const;
    void insert_gram(int n, std::string_view gram);

private:
    static uint64_t pack(std::string_view gram);
    std::unordered_set<uint64_t> grams_[3];  // index n-3
};

BenignGramSet build_benign_grams(const std::vector<std::string>& corpus);

// Character bigram model over [a-z ] with Laplace smoothing; scores are
// average transition log-probabilities, higher meaning more English-like.
class MarkovGibberishModel {
public:
    static constexpr int kSymbols = 27;  // 'a'..'z' plus space

    double score(std::string_view text) const;  // 0 when fewer than 2 usable chars
    bool is_gibberish(std::string_view text) const { return score(text) < threshold_; }
    double threshold() const { return threshold_; }

    const std::array<std::array<double, kSymbols>, kSymbols>& log_prob() const {
        return log_prob_;
    }

    void set(std::array<std::array<double, kSymbols>, kSymbols> log_prob, double threshold) {
        log_prob_ = log_prob;
        threshold_ = threshold;
    }

private:
    std::array<std::array<double, kSymbols>, kSymbols> log_prob_{};
    double threshold_ = 0.0;
};

MarkovGibberishModel train_markov(const std::vector<std::string>& text_lines);

FeatureVector extract(std::string_view sld, const BenignGramSet& grams,
                      const MarkovGibberishModel& markov, const UnigramLexicon& lexicon);

// Same, reusing already-computed segmentations.
FeatureVector extract_with_segmentations(std::string_view sld, const Segmentation& seg_ws,
                                         const Segmentation& seg_wds,
                                         const BenignGramSet& grams,
                                         const MarkovGibberishModel& markov);

double shannon_entropy(std::string_view s);  // bits over character frequencies

}  // namespace nxsift
