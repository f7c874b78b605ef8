#include "nxsift/segmenter.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace nxsift {

UnigramLexicon UnigramLexicon::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.push_back(line);
    }
    return from_words(std::move(words));
}

UnigramLexicon UnigramLexicon::from_words(std::vector<std::string> words) {
    if (words.size() < 2) throw std::invalid_argument("lexicon needs at least two words");
    UnigramLexicon lex;
    lex.words_ = std::move(words);
    const double log_n = std::log(static_cast<double>(lex.words_.size()));
    lex.costs_.reserve(lex.words_.size());
    for (size_t rank = 0; rank < lex.words_.size(); ++rank) {
        const std::string& w = lex.words_[rank];
        if (w.size() > static_cast<size_t>(lex.max_word_len_))
            lex.max_word_len_ = static_cast<int>(w.size());
        // first occurrence wins if the file carries duplicates
        lex.costs_.emplace(std::string_view(w), std::log((rank + 1.0) * log_n));
    }
    const double worst = std::log(static_cast<double>(lex.words_.size()) * log_n);
    lex.oov_char_cost_ = worst + std::log(static_cast<double>(lex.words_.size()));
    return lex;
}

double UnigramLexicon::cost(std::string_view word) const {
    auto it = costs_.find(word);
    return it == costs_.end() ? std::numeric_limits<double>::infinity() : it->second;
}

namespace {

struct Cell {
    double cost = std::numeric_limits<double>::infinity();
    int n_words = 0;
    std::vector<uint8_t> bounds;  // end positions of each word
    bool reached = false;
};

// (cost, word count, split positions) lexicographic order
bool better(double cost, int n_words, const std::vector<uint8_t>& bounds, const Cell& cur) {
    if (!cur.reached) return true;
    if (cost != cur.cost) return cost < cur.cost;
    if (n_words != cur.n_words) return n_words < cur.n_words;
    return bounds < cur.bounds;
}

void segment_field(std::string_view field, const UnigramLexicon& lexicon, Segmentation& out) {
    const size_t m = field.size();
    std::vector<Cell> best(m + 1);
    best[0].reached = true;
    best[0].cost = 0.0;
    const size_t max_len = static_cast<size_t>(lexicon.max_word_len());

    std::vector<uint8_t> bounds;
    for (size_t i = 1; i <= m; ++i) {
        const size_t j_min = i > max_len ? i - max_len : 0;
        for (size_t j = j_min; j < i; ++j) {
            if (!best[j].reached) continue;
            double word_cost = lexicon.cost(field.substr(j, i - j));
            if (!std::isfinite(word_cost)) {
                if (i - j != 1) continue;
                word_cost = lexicon.oov_char_cost();
            }
            const double cost = best[j].cost + word_cost;
            const int n_words = best[j].n_words + 1;
            bounds = best[j].bounds;
            bounds.push_back(static_cast<uint8_t>(i));
            if (better(cost, n_words, bounds, best[i])) {
                best[i].cost = cost;
                best[i].n_words = n_words;
                best[i].bounds = std::move(bounds);
                best[i].reached = true;
            }
            bounds.clear();
        }
    }

    size_t start = 0;
    for (uint8_t end : best[m].bounds) {
        out.words.emplace_back(field.substr(start, end - start));
        start = end;
    }
    out.total_cost += best[m].cost;
}

}  // namespace

Segmentation segment(std::string_view sld, const UnigramLexicon& lexicon) {
    if (sld.empty()) throw std::invalid_argument("segment: empty input");
    Segmentation out;
    size_t start = 0;
    for (size_t i = 0; i <= sld.size(); ++i) {
        const bool is_letter = i < sld.size() && sld[i] >= 'a' && sld[i] <= 'z';
        if (!is_letter) {
            if (i > start) segment_field(sld.substr(start, i - start), lexicon, out);
            start = i + 1;
        }
    }
    return out;
}

std::vector<std::string> words_longer_than(const Segmentation& seg, int min_len) {
    if (min_len < 0) throw std::invalid_argument("words_longer_than: negative min_len");
    std::vector<std::string> out;
    for (const auto& w : seg.words) {
        if (static_cast<int>(w.size()) > min_len) out.push_back(w);
    }
    return out;
}

}  // namespace nxsift
