#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nxsift/segmenter.hpp"

namespace nxsift {

enum class TemplateKind {
    two_word,             // one draw from each of two lists, concatenated
    alternating_until_len,  // alternate two lists until total length exceeds min_len
    document_until_len,   // draw from one list until length exceeds min_len;
                          // retried when max_len > 0 is overshot
    two_dict_optional_sep,  // two lists joined by a drawn separator
    fixed_prefix_counter,   // constant stem + decimal counter across the tld list
    permutation,            // adjacent-transposition permutations of a fixed stem
};

const char* to_string(TemplateKind k);
TemplateKind template_kind_from_string(const std::string& s);

struct DgaTemplate {
    TemplateKind kind = TemplateKind::two_word;
    std::vector<std::vector<std::string>> dictionaries;
    int min_len = 0;
    int max_len = 0;  // 0 = unbounded
    std::vector<std::string> separators;  // may include ""
    std::vector<std::string> tlds;
    std::string stem;
    uint64_t seed = 0;
    std::string family;
};

struct GeneratedRecord {
    std::string qname;
    std::string family;
    uint64_t seed = 0;
    std::vector<std::string> truth_words;  // generation-time ground truth
};

struct GeneratedCorpus {
    std::vector<GeneratedRecord> records;
    bool unique = false;
};

// Deterministic template expansion; all draws come from xoshiro256**
// seeded with template.seed. With unique set, duplicate qnames are
// skipped (throws once no fresh name can be found).
GeneratedCorpus generate(const DgaTemplate& tmpl, size_t count, bool unique = false);

// Uniform sample without replacement from a benign SLD list; IDN and
// malformed entries are skipped before sampling. Drawn records get a
// TLD from a fixed weighted set.
GeneratedCorpus sample_benign(const std::vector<std::string>& slds, size_t count,
                              uint64_t seed);

// Wordlist harvested the way document-fed DGAs do it: count tokens
// drawn Zipf-weighted (by lexicon rank) from words whose length lies in
// [min_len, max_len], so frequent words carry natural multiplicity.
std::vector<std::string> zipf_token_list(const UnigramLexicon& lexicon, size_t count,
                                         int min_len, int max_len, double exponent,
                                         uint64_t seed);

// Distinct-word list: the first count lexicon words in rank order with
// length in [min_len, max_len], taking every stride-th candidate
// starting at offset (used to keep two dictionaries disjoint).
std::vector<std::string> ranked_word_list(const UnigramLexicon& lexicon, size_t count,
                                          int min_len, int max_len, size_t offset = 0,
                                          size_t stride = 1);

// Desk-scale stand-ins for the studied families, derived from the
// bundled lexicon so the repository is self-contained.
DgaTemplate family_template(const std::string& family, const UnigramLexicon& lexicon,
                            uint64_t seed);
const std::vector<std::string>& wordlist_families();  // the six wordlist-based ones
const std::vector<std::string>& all_families();

// 74-entry TLD stand-in list used by the nymaim2-style template.
const std::vector<std::string>& nymaim2_tlds();

// corpus CSV: qname,label,family,seed,ground_truth_words ('|'-joined)
void write_corpus_csv(const GeneratedCorpus& corpus, const std::string& label,
                      const std::string& path);
GeneratedCorpus read_corpus_csv(const std::string& path, std::string* label_out = nullptr);

}  // namespace nxsift
