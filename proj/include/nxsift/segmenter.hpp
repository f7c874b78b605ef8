#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nxsift {

// Frequency-ordered unigram word list. cost(w) = ln((rank + 1) * ln N)
// with rank the 0-based position in the list, so splits gravitate
// toward common words.
class UnigramLexicon {
public:
    static UnigramLexicon from_file(const std::string& path);
    static UnigramLexicon from_words(std::vector<std::string> words);

    // +infinity when the word is unknown
    double cost(std::string_view word) const;
    bool contains(std::string_view word) const { return costs_.count(word) > 0; }

    // Penalty for a character that belongs to no word: worst word cost
    // plus ln N, so gibberish stays segmentable without being rewarded.
    double oov_char_cost() const { return oov_char_cost_; }

    size_t size() const { return words_.size(); }
    int max_word_len() const { return max_word_len_; }
    const std::vector<std::string>& words() const { return words_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string_view, double> costs_;  // views into words_
    double oov_char_cost_ = 0.0;
    int max_word_len_ = 1;
};

struct Segmentation {
    std::vector<std::string> words;
    double total_cost = 0.0;
};

// Minimum-cost split of an SLD into lexicon words via dynamic
// programming. Hyphens and digit runs are hard boundaries and are not
// emitted; characters matching no word come out as single-character
// words at the OOV penalty. Ties break toward fewer words, then the
// lexicographically earliest split positions.
Segmentation segment(std::string_view sld, const UnigramLexicon& lexicon);

// Words strictly longer than min_len, order preserved.
std::vector<std::string> words_longer_than(const Segmentation& seg, int min_len);

}  // namespace nxsift
