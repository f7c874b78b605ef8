#include "nxsift/engine.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nxsift {

void EngineConfig::validate() const {
    if (word_strike_threshold < 2)
        throw std::invalid_argument("config: word_strike_threshold must be >= 2");
    if (pattern_strike_threshold < 1)
        throw std::invalid_argument("config: pattern_strike_threshold must be >= 1");
    if (window_size < 2) throw std::invalid_argument("config: window_size must be >= 2");
    if (epoch_seconds <= 0) throw std::invalid_argument("config: epoch_seconds must be > 0");
    if (min_word_len < 0) throw std::invalid_argument("config: min_word_len must be >= 0");
    if (classifier_consecutive < 1)
        throw std::invalid_argument("config: classifier_consecutive must be >= 1");
}

EngineConfig EngineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    EngineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        trim(key);
        trim(value);
        auto as_bool = [&](const std::string& v) { return v == "1" || v == "true" || v == "yes"; };
        if (key == "word_strike_threshold") cfg.word_strike_threshold = std::stoi(value);
        else if (key == "pattern_strike_threshold") cfg.pattern_strike_threshold = std::stoi(value);
        else if (key == "epoch_seconds") cfg.epoch_seconds = std::stoll(value);
        else if (key == "min_word_len") cfg.min_word_len = std::stoi(value);
        else if (key == "window_size") cfg.window_size = std::stoi(value);
        else if (key == "long_domain_len") cfg.long_domain_len = std::stoi(value);
        else if (key == "classifier_enabled") cfg.classifier_enabled = as_bool(value);
        else if (key == "classifier_score_threshold") cfg.classifier_score_threshold = std::stod(value);
        else if (key == "classifier_consecutive") cfg.classifier_consecutive = std::stoi(value);
        else if (key == "escalation_min_filters") cfg.escalation_min_filters = std::stoi(value);
        else if (key == "suffix_fallback_last_label") cfg.suffix_fallback_last_label = as_bool(value);
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

const char* to_string(FilterKind f) {
    switch (f) {
        case FilterKind::word: return "word";
        case FilterKind::pattern: return "pattern";
        case FilterKind::classifier: return "classifier";
    }
    return "unknown";
}

std::vector<int> check_pattern(const std::deque<HostState::WindowEntry>& window,
                               size_t window_size, int long_domain_len) {
    if (window.size() != window_size)
        throw std::invalid_argument("check_pattern: window not full");
    std::vector<int> satisfied;

    bool all_long = true, same_count = true, all_above_two = true, all_short_heavy = true;
    bool same_sld = true;
    const int first_count = window.front().word_count;
    const std::string& first_sld = window.front().sld;
    std::unordered_set<std::string> tlds;
    for (const auto& e : window) {
        if (static_cast<int>(e.sld.size()) <= long_domain_len) all_long = false;
        if (e.word_count != first_count) same_count = false;
        if (e.word_count <= 2) all_above_two = false;
        if (e.short_word_count <= 2) all_short_heavy = false;
        if (e.sld != first_sld) same_sld = false;
        tlds.insert(e.tld);
    }
    if (all_long) satisfied.push_back(1);
    if (same_count) satisfied.push_back(2);
    if (all_above_two) satisfied.push_back(3);
    if (all_short_heavy) satisfied.push_back(4);
    if (same_sld && tlds.size() == window.size()) satisfied.push_back(5);
    return satisfied;
}

DetectionEngine::DetectionEngine(EngineConfig config, EngineModels models)
    : config_(config), models_(models) {
    config_.validate();
    if (!models_.lexicon) throw std::invalid_argument("engine: lexicon is required");
    if (config_.classifier_enabled &&
        (!models_.grams || !models_.markov || !models_.forest))
        throw std::invalid_argument("engine: classifier enabled but models missing");
}

void DetectionEngine::load_whitelist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open whitelist: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) whitelist_.insert(line);
    }
}

const DetectionEngine::SldInfo& DetectionEngine::sld_info(const std::string& sld) {
    auto it = sld_cache_.find(sld);
    if (it != sld_cache_.end()) return it->second;

    SldInfo info;
    const Segmentation seg = segment(sld, *models_.lexicon);
    info.word_count = static_cast<int>(seg.words.size());
    for (const auto& w : seg.words) {
        if (static_cast<int>(w.size()) > config_.min_word_len) info.counted_words.push_back(w);
        if (w.size() < 4) ++info.short_word_count;
    }
    if (config_.classifier_enabled) {
        std::string dom_d;
        for (char c : sld)
            if (c < '0' || c > '9') dom_d.push_back(c);
        const Segmentation seg_wds =
            dom_d.empty() ? Segmentation{} : segment(dom_d, *models_.lexicon);
        const FeatureVector fv =
            extract_with_segmentations(sld, seg, seg_wds, *models_.grams, *models_.markov);
        info.classifier_score = models_.forest->predict(fv).score;
    }
    return sld_cache_.emplace(sld, std::move(info)).first->second;
}

std::vector<Alert> DetectionEngine::observe(const DomainRecord& rec) {
    std::vector<Alert> alerts;
    if (whitelist_.count(rec.sld)) return alerts;

    HostState& state = hosts_[rec.host_id];
    ++state.domains_seen;
    prune(state, rec.timestamp, config_.epoch_seconds);

    const SldInfo& info = sld_info(rec.sld);

    auto raise = [&](FilterKind filter, std::vector<std::string> evidence) {
        // one alert per (host, filter) per epoch
        if (state.alerts_raised.count(filter)) return;
        state.alerts_raised[filter] = rec.timestamp;
        Alert a;
        a.host_id = rec.host_id;
        a.filter = filter;
        a.evidence = std::move(evidence);
        a.timestamp = rec.timestamp;
        a.domains_seen = state.domains_seen;
        alerts.push_back(std::move(a));
    };

    // classification filter
    if (config_.classifier_enabled) {
        if (info.classifier_score >= config_.classifier_score_threshold) {
            if (++state.consecutive_positive >= config_.classifier_consecutive) {
                std::ostringstream ev;
                ev << "score=" << info.classifier_score;
                raise(FilterKind::classifier, {ev.str(), rec.sld});
            }
        } else {
            state.consecutive_positive = 0;
        }
    }

    // word filter
    std::vector<std::string> tripped;
    for (const auto& w : info.counted_words) {
        HostState::Counter& bucket = state.word_buckets[w];
        ++bucket.count;
        bucket.last_seen = rec.timestamp;
        if (bucket.count == config_.word_strike_threshold) tripped.push_back(w);
    }
    if (!tripped.empty()) raise(FilterKind::word, std::move(tripped));

    // pattern filter
    state.window.push_back({rec.sld, rec.tld, rec.timestamp, info.word_count,
                            info.short_word_count});
    while (state.window.size() > static_cast<size_t>(config_.window_size))
        state.window.pop_front();
    if (state.window.size() == static_cast<size_t>(config_.window_size)) {
        const std::vector<int> criteria = check_pattern(
            state.window, static_cast<size_t>(config_.window_size), config_.long_domain_len);
        if (!criteria.empty()) {
            ++state.pattern_counter.count;
            state.pattern_counter.last_seen = rec.timestamp;
            if (state.pattern_counter.count == config_.pattern_strike_threshold) {
                std::vector<std::string> evidence;
                for (int c : criteria) evidence.push_back("C" + std::to_string(c));
                raise(FilterKind::pattern, std::move(evidence));
            }
        }
    }
    return alerts;
}

void DetectionEngine::prune(HostState& state, int64_t now, int64_t epoch_seconds) {
    const int64_t cutoff = now - epoch_seconds;
    for (auto it = state.word_buckets.begin(); it != state.word_buckets.end();) {
        if (it->second.last_seen < cutoff) it = state.word_buckets.erase(it);
        else ++it;
    }
    if (state.pattern_counter.count > 0 && state.pattern_counter.last_seen < cutoff)
        state.pattern_counter = {};
    while (!state.window.empty() && state.window.front().timestamp < cutoff)
        state.window.pop_front();
    for (auto it = state.alerts_raised.begin(); it != state.alerts_raised.end();) {
        if (it->second < cutoff) it = state.alerts_raised.erase(it);
        else ++it;
    }
}

const HostState* DetectionEngine::host(const std::string& host_id) const {
    auto it = hosts_.find(host_id);
    return it == hosts_.end() ? nullptr : &it->second;
}

int DetectionEngine::filters_alerted(const std::string& host_id) const {
    const HostState* state = host(host_id);
    return state ? static_cast<int>(state->alerts_raised.size()) : 0;
}

}  // namespace nxsift
