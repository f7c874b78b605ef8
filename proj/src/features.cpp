#include "nxsift/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nxsift/rng.hpp"

namespace nxsift {

namespace {

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}
bool is_letter(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string join_words(const std::vector<std::string>& words, char sep) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty() && sep != '\0') out.push_back(sep);
        out += w;
    }
    return out;
}

std::string concat_longer_than(const std::vector<std::string>& words, size_t min_len) {
    std::string out;
    for (const auto& w : words)
        if (w.size() > min_len) out += w;
    return out;
}

std::vector<std::string> distinct_grams(std::string_view s, size_t n) {
    std::vector<std::string> out;
    if (s.size() < n) return out;
    for (size_t i = 0; i + n <= s.size(); ++i) {
        std::string g(s.substr(i, n));
        if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

SequenceBundle derive_sequences(std::string_view sld, const Segmentation& seg_ws,
                                const Segmentation& seg_wds) {
    SequenceBundle b;
    b.dom = std::string(sld);
    for (char c : sld)
        if (!is_digit(c)) b.dom_d.push_back(c);
    b.dom_ws = join_words(seg_ws.words, ' ');
    b.dom_wds = join_words(seg_wds.words, ' ');
    b.dom_w2 = concat_longer_than(seg_ws.words, 2);
    b.dom_w3 = concat_longer_than(seg_ws.words, 3);
    b.grams3 = distinct_grams(sld, 3);
    b.grams4 = distinct_grams(sld, 4);
    b.grams5 = distinct_grams(sld, 5);
    return b;
}

std::array<double, kFeatureCount> FeatureVector::values() const {
    return {l_hex,     l_len,      l_dig,    l_con_max, l_w2,     l_w3,     r_con_vow,
            r_dom_3g,  r_dom_4g,   r_dom_5g, m2_dom_ws, m2_dom_wds, r_ws_len, r_wds_len,
            r_w2_len,  r_w3_len,   e_dom,    e_dom_ws,  e_dom_wds, e_dom_w2, e_dom_w3};
}

const std::array<const char*, kFeatureCount>& FeatureVector::names() {
    static const std::array<const char*, kFeatureCount> n = {
        "l_hex",     "l_len",     "l_dig",    "l_con_max", "l_w2",      "l_w3",
        "r_con_vow", "r_dom_3g",  "r_dom_4g", "r_dom_5g",  "m2_dom_ws", "m2_dom_wds",
        "r_ws_len",  "r_wds_len", "r_w2_len", "r_w3_len",  "e_dom",     "e_dom_ws",
        "e_dom_wds", "e_dom_w2",  "e_dom_w3"};
    return n;
}

uint64_t feature_order_hash() {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](char c) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    };
    bool first = true;
    for (const char* name : FeatureVector::names()) {
        if (!first) mix(',');
        first = false;
        for (const char* p = name; *p; ++p) mix(*p);
    }
    return h;
}

uint64_t BenignGramSet::pack(std::string_view gram) {
    // 6 bits per symbol over [a-z0-9-]
    uint64_t v = 0;
    for (char c : gram) {
        uint64_t sym;
        if (c >= 'a' && c <= 'z') sym = static_cast<uint64_t>(c - 'a');
        else if (c >= '0' && c <= '9') sym = 26 + static_cast<uint64_t>(c - '0');
        else sym = 36;
        v = (v << 6) | sym;
    }
    return v;
}

void BenignGramSet::add_sld(std::string_view sld) {
    for (int n = 3; n <= 5; ++n) {
        if (sld.size() < static_cast<size_t>(n)) continue;
        auto& set = grams_[n - 3];
        for (size_t i = 0; i + n <= sld.size(); ++i) set.insert(pack(sld.substr(i, n)));
    }
}

bool BenignGramSet::contains(int n, std::string_view gram) const {
    return grams_[n - 3].count(pack(gram)) > 0;
}

size_t BenignGramSet::size(int n) const { return grams_[n - 3].size(); }

void BenignGramSet::insert_gram(int n, std::string_view gram) {
    grams_[n - 3].insert(pack(gram));
}

std::vector<std::string> BenignGramSet::sorted_grams(int n) const {
    std::vector<std::string> out;
    out.reserve(grams_[n - 3].size());
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789-";
    for (uint64_t packed : grams_[n - 3]) {
        std::string g(static_cast<size_t>(n), ' ');
        for (int i = n - 1; i >= 0; --i) {
            g[static_cast<size_t>(i)] = alphabet[packed & 0x3f];
            packed >>= 6;
        }
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end());
    return out;
}

BenignGramSet build_benign_grams(const std::vector<std::string>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("build_benign_grams: empty corpus");
    BenignGramSet set;
    for (const auto& sld : corpus) set.add_sld(sld);
    return set;
}

namespace {

int markov_symbol(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c >= 'A' && c <= 'Z') return c - 'A';
    return 26;  // everything else folds to space
}

// lowercase, non-letters to space, runs collapsed, trimmed
std::vector<int> normalize_symbols(std::string_view text) {
    std::vector<int> syms;
    syms.reserve(text.size());
    for (char c : text) {
        int s = markov_symbol(c);
        if (s == 26 && (syms.empty() || syms.back() == 26)) continue;
        syms.push_back(s);
    }
    while (!syms.empty() && syms.back() == 26) syms.pop_back();
    return syms;
}

}  // namespace

double MarkovGibberishModel::score(std::string_view text) const {
    std::vector<int> syms = normalize_symbols(text);
    if (syms.size() < 2) return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i + 1 < syms.size(); ++i)
        sum += log_prob_[static_cast<size_t>(syms[i])][static_cast<size_t>(syms[i + 1])];
    return sum / static_cast<double>(syms.size() - 1);
}

MarkovGibberishModel train_markov(const std::vector<std::string>& text_lines) {
    if (text_lines.empty()) throw std::invalid_argument("train_markov: empty corpus");

    // every tenth line is held out for threshold calibration
    std::array<std::array<double, MarkovGibberishModel::kSymbols>,
               MarkovGibberishModel::kSymbols>
        counts;
    for (auto& row : counts) row.fill(1.0);  // Laplace
    std::vector<const std::string*> held_out;
    for (size_t li = 0; li < text_lines.size(); ++li) {
        if (text_lines.size() >= 20 && li % 10 == 9) {
            held_out.push_back(&text_lines[li]);
            continue;
        }
        std::vector<int> syms = normalize_symbols(text_lines[li]);
        for (size_t i = 0; i + 1 < syms.size(); ++i)
            counts[static_cast<size_t>(syms[i])][static_cast<size_t>(syms[i + 1])] += 1.0;
    }
    std::array<std::array<double, MarkovGibberishModel::kSymbols>,
               MarkovGibberishModel::kSymbols>
        log_prob;
    for (int r = 0; r < MarkovGibberishModel::kSymbols; ++r) {
        double total = 0.0;
        for (double c : counts[static_cast<size_t>(r)]) total += c;
        for (int c = 0; c < MarkovGibberishModel::kSymbols; ++c)
            log_prob[static_cast<size_t>(r)][static_cast<size_t>(c)] =
                std::log(counts[static_cast<size_t>(r)][static_cast<size_t>(c)] / total);
    }

    MarkovGibberishModel model;
    model.set(log_prob, 0.0);

    // threshold: midpoint between held-out English and uniform random strings
    double english_mean = 0.0;
    int english_n = 0;
    if (held_out.empty()) held_out.push_back(&text_lines[0]);
    for (const std::string* line : held_out) {
        double s = model.score(*line);
        if (s != 0.0) {
            english_mean += s;
            ++english_n;
        }
    }
    english_mean /= std::max(english_n, 1);

    Rng rng(0x6d61726b6f766eULL);  // fixed so training is deterministic
    double random_mean = 0.0;
    const int random_n = 500;
    for (int i = 0; i < random_n; ++i) {
        std::string s;
        const int len = static_cast<int>(rng.next_int(6, 20));
        for (int j = 0; j < len; ++j)
            s.push_back(static_cast<char>('a' + rng.next_below(26)));
        random_mean += model.score(s);
    }
    random_mean /= random_n;

    model.set(log_prob, (english_mean + random_mean) / 2.0);
    return model;
}

double shannon_entropy(std::string_view s) {
    if (s.empty()) return 0.0;
    std::array<int, 256> freq{};
    for (char c : s) ++freq[static_cast<unsigned char>(c)];
    double h = 0.0;
    const double n = static_cast<double>(s.size());
    for (int f : freq) {
        if (f == 0) continue;
        const double p = f / n;
        h -= p * std::log2(p);
    }
    return h;
}

FeatureVector extract(std::string_view sld, const BenignGramSet& grams,
                      const MarkovGibberishModel& markov, const UnigramLexicon& lexicon) {
    Segmentation seg_ws = segment(sld, lexicon);
    std::string dom_d;
    for (char c : sld)
        if (!is_digit(c)) dom_d.push_back(c);
    Segmentation seg_wds = dom_d.empty() ? Segmentation{} : segment(dom_d, lexicon);
    return extract_with_segmentations(sld, seg_ws, seg_wds, grams, markov);
}

FeatureVector extract_with_segmentations(std::string_view sld, const Segmentation& seg_ws,
                                         const Segmentation& seg_wds,
                                         const BenignGramSet& grams,
                                         const MarkovGibberishModel& markov) {
    SequenceBundle seq = derive_sequences(sld, seg_ws, seg_wds);
    FeatureVector f;

    f.l_len = static_cast<double>(seq.dom.size());
    bool all_hex = !seq.dom.empty();
    int digits = 0, consonants = 0, vowels = 0, run = 0, max_run = 0;
    for (char c : seq.dom) {
        if (is_digit(c)) ++digits;
        const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
        if (!hex) all_hex = false;
        if (is_letter(c) && !is_vowel(c)) {
            ++consonants;
            ++run;
            if (run > max_run) max_run = run;
        } else {
            run = 0;
            if (is_letter(c)) ++vowels;
        }
    }
    f.l_hex = all_hex ? 1.0 : 0.0;
    f.l_dig = digits;
    f.l_con_max = max_run;
    f.r_con_vow = static_cast<double>(consonants) / std::max(vowels, 1);

    int w2 = 0, w3 = 0;
    for (const auto& w : seg_ws.words) {
        if (w.size() > 2) ++w2;
        if (w.size() > 3) ++w3;
    }
    f.l_w2 = w2;
    f.l_w3 = w3;

    auto gram_ratio = [&grams](const std::vector<std::string>& gs, int n) {
        if (gs.empty()) return 0.0;
        int hit = 0;
        for (const auto& g : gs)
            if (grams.contains(n, g)) ++hit;
        return static_cast<double>(hit) / static_cast<double>(gs.size());
    };
    f.r_dom_3g = gram_ratio(seq.grams3, 3);
    f.r_dom_4g = gram_ratio(seq.grams4, 4);
    f.r_dom_5g = gram_ratio(seq.grams5, 5);

    f.m2_dom_ws = markov.score(seq.dom_ws);
    f.m2_dom_wds = markov.score(seq.dom_wds);

    auto letters_len = [](const std::string& s) {
        size_t n = 0;
        for (char c : s)
            if (c != ' ') ++n;
        return static_cast<double>(n);
    };
    if (f.l_len > 0) {
        f.r_ws_len = letters_len(seq.dom_ws) / f.l_len;
        f.r_wds_len = letters_len(seq.dom_wds) / f.l_len;
        f.r_w2_len = static_cast<double>(seq.dom_w2.size()) / f.l_len;
        f.r_w3_len = static_cast<double>(seq.dom_w3.size()) / f.l_len;
    }

    f.e_dom = shannon_entropy(seq.dom);
    f.e_dom_ws = shannon_entropy(seq.dom_ws);
    f.e_dom_wds = shannon_entropy(seq.dom_wds);
    f.e_dom_w2 = shannon_entropy(seq.dom_w2);
    f.e_dom_w3 = shannon_entropy(seq.dom_w3);
    return f;
}

}  // namespace nxsift
