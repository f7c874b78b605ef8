#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nxsift/domain.hpp"
#include "nxsift/features.hpp"
#include "nxsift/forest.hpp"
#include "nxsift/segmenter.hpp"

namespace nxsift {

struct EngineConfig {
    int word_strike_threshold = 3;    // t, sensible range 3..7
    int pattern_strike_threshold = 5;  // T'
    int64_t epoch_seconds = 86400;    // T
    int min_word_len = 3;             // counted words are strictly longer
    int window_size = 5;
    int long_domain_len = 10;         // M
    bool classifier_enabled = true;
    double classifier_score_threshold = 0.5;
    int classifier_consecutive = 1;   // positives in a row before alerting
    int escalation_min_filters = 1;   // any-of by default; 2/3 for k-of-3
    bool suffix_fallback_last_label = true;

    void validate() const;
    static EngineConfig from_file(const std::string& path);
};

enum class FilterKind { word, pattern, classifier };
const char* to_string(FilterKind f);

struct Alert {
    std::string host_id;
    FilterKind filter = FilterKind::word;
    std::vector<std::string> evidence;
    int64_t timestamp = 0;
    uint64_t domains_seen = 0;
};

struct HostState {
    struct Counter {
        int count = 0;
        int64_t last_seen = 0;
    };
    struct WindowEntry {
        std::string sld, tld;
        int64_t timestamp = 0;
        int word_count = 0;
        int short_word_count = 0;  // words shorter than 4 characters
    };

    std::unordered_map<std::string, Counter> word_buckets;
    Counter pattern_counter;
    std::deque<WindowEntry> window;
    std::map<FilterKind, int64_t> alerts_raised;  // filter -> alert time
    uint64_t domains_seen = 0;
    int consecutive_positive = 0;
};

struct EngineModels {
    const UnigramLexicon* lexicon = nullptr;
    const BenignGramSet* grams = nullptr;
    const MarkovGibberishModel* markov = nullptr;
    const TreeEnsemble* forest = nullptr;
};

// Evaluates the five structural criteria over a full window; returns
// the ids (1..5) of every satisfied one.
//   1: every SLD longer than M characters
//   2: identical word count across the window
//   3: every word count above 2
//   4: every entry with more than 2 short words
//   5: one shared SLD, all TLDs distinct
std::vector<int> check_pattern(const std::deque<HostState::WindowEntry>& window,
                               size_t window_size, int long_domain_len);

// Per-host three-filter evaluation with event-time epoch expiry. Hosts
// are fully isolated; the engine contract is shard-by-host with
// observe() serialized in timestamp order within a host.
class DetectionEngine {
public:
    DetectionEngine(EngineConfig config, EngineModels models);

    std::vector<Alert> observe(const DomainRecord& rec);

    // drops state entries older than now - epoch; idempotent
    static void prune(HostState& state, int64_t now, int64_t epoch_seconds);

    void load_whitelist(const std::string& path);
    void add_whitelisted(std::string sld) { whitelist_.insert(std::move(sld)); }

    const HostState* host(const std::string& host_id) const;
    size_t host_count() const { return hosts_.size(); }
    const EngineConfig& config() const { return config_; }

    // distinct filters that alerted for a host in the current epoch
    int filters_alerted(const std::string& host_id) const;

private:
    struct SldInfo {
        std::vector<std::string> counted_words;  // longer than min_word_len
        int word_count = 0;
        int short_word_count = 0;
        double classifier_score = -1.0;  // < 0 until computed
    };
    const SldInfo& sld_info(const std::string& sld);

    EngineConfig config_;
    EngineModels models_;
    std::unordered_map<std::string, HostState> hosts_;
    std::unordered_map<std::string, SldInfo> sld_cache_;
    std::unordered_set<std::string> whitelist_;
};

}  // namespace nxsift
