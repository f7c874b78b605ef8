#include "nxsift/bench.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "nxsift/rng.hpp"

namespace nxsift {

double mean_of(const std::vector<int>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (int x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double quantile_of(std::vector<int> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return static_cast<double>(v[lo]) * (1.0 - frac) + static_cast<double>(v[hi]) * frac;
}

ShuffleBenchResult shuffle_bench(const std::vector<std::string>& qnames,
                                 const std::string& family, const SuffixList& suffixes,
                                 const UnigramLexicon& lexicon, EngineConfig base_config,
                                 int word_threshold, int repeats, uint64_t seed) {
    if (qnames.empty()) throw std::invalid_argument("shuffle_bench: empty corpus");

    std::vector<DomainRecord> records;
    records.reserve(qnames.size());
    for (const auto& q : qnames) {
        DomainRecord rec;
        const ParseStatus st = make_record("bench", 0, q, suffixes, true, rec);
        if (st != ParseStatus::ok)
            throw std::runtime_error("shuffle_bench: unparsable qname " + q);
        records.push_back(std::move(rec));
    }

    base_config.word_strike_threshold = word_threshold;
    base_config.classifier_enabled = false;
    // the replay must never expire mid-shuffle
    base_config.epoch_seconds = static_cast<int64_t>(qnames.size()) + 10;

    ShuffleBenchResult result;
    result.family = family;
    result.word_threshold = word_threshold;
    result.first_word_alert.reserve(static_cast<size_t>(repeats));
    result.first_pattern_alert.reserve(static_cast<size_t>(repeats));

    EngineModels models;
    models.lexicon = &lexicon;
    DetectionEngine engine(base_config, models);  // shared so the SLD cache persists

    std::vector<uint32_t> order(records.size());
    const int censored = static_cast<int>(records.size()) + 1;
    for (int rep = 0; rep < repeats; ++rep) {
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<uint32_t>(i);
        Rng rng = Rng::stream(seed, (static_cast<uint64_t>(word_threshold) << 32) |
                                        static_cast<uint64_t>(rep));
        rng.shuffle(order);

        const std::string host = "h" + std::to_string(rep);
        int first_word = censored, first_pattern = censored;
        for (size_t pos = 0; pos < order.size(); ++pos) {
            DomainRecord rec = records[order[pos]];
            rec.host_id = host;
            rec.timestamp = static_cast<int64_t>(pos);
            for (const Alert& a : engine.observe(rec)) {
                if (a.filter == FilterKind::word && first_word == censored)
                    first_word = static_cast<int>(pos) + 1;
                if (a.filter == FilterKind::pattern && first_pattern == censored)
                    first_pattern = static_cast<int>(pos) + 1;
            }
            if (first_word != censored && first_pattern != censored) break;
        }
        result.first_word_alert.push_back(first_word);
        result.first_pattern_alert.push_back(first_pattern);
    }
    return result;
}

void write_bench_distribution_csv(const std::vector<ShuffleBenchResult>& results,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write bench csv: " + path);
    out << "family,word_threshold,shuffle,first_word_alert,first_pattern_alert\n";
    for (const auto& r : results) {
        for (size_t i = 0; i < r.first_word_alert.size(); ++i) {
            out << r.family << "," << r.word_threshold << "," << i << ","
                << r.first_word_alert[i] << "," << r.first_pattern_alert[i] << "\n";
        }
    }
}

void write_bench_summary_csv(const std::vector<ShuffleBenchResult>& results,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write bench csv: " + path);
    out << "family,word_threshold,mean_word,median_word,p90_word,"
           "mean_pattern,median_pattern,p90_pattern\n";
    for (const auto& r : results) {
        out << r.family << "," << r.word_threshold << "," << mean_of(r.first_word_alert)
            << "," << quantile_of(r.first_word_alert, 0.5) << ","
            << quantile_of(r.first_word_alert, 0.9) << "," << mean_of(r.first_pattern_alert)
            << "," << quantile_of(r.first_pattern_alert, 0.5) << ","
            << quantile_of(r.first_pattern_alert, 0.9) << "\n";
    }
}

}  // namespace nxsift
