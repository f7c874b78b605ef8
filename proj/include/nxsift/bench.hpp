#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nxsift/engine.hpp"

namespace nxsift {

// Records-to-first-alert distributions over seeded shuffles of one
// labeled corpus, replayed through the engine as a single host.
struct ShuffleBenchResult {
    std::string family;
    int word_threshold = 0;
    // censored at corpus size + 1 when a filter never fired
    std::vector<int> first_word_alert;
    std::vector<int> first_pattern_alert;
};

double mean_of(const std::vector<int>& v);
double quantile_of(std::vector<int> v, double q);

// One (family corpus, t) cell: `repeats` shuffles, each fed through a
// fresh engine until both the word and pattern filters fired (or the
// corpus ran out). The classifier filter is disabled here; this
// benchmark isolates the two training-free filters.
ShuffleBenchResult shuffle_bench(const std::vector<std::string>& qnames,
                                 const std::string& family, const SuffixList& suffixes,
                                 const UnigramLexicon& lexicon, EngineConfig base_config,
                                 int word_threshold, int repeats, uint64_t seed);

void write_bench_distribution_csv(const std::vector<ShuffleBenchResult>& results,
                                  const std::string& path);
void write_bench_summary_csv(const std::vector<ShuffleBenchResult>& results,
                             const std::string& path);

}  // namespace nxsift
