#include "nxsift/dga_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "nxsift/rng.hpp"

namespace nxsift {

const char* to_string(TemplateKind k) {
    switch (k) {
        case TemplateKind::two_word: return "two_word";
        case TemplateKind::alternating_until_len: return "alternating_until_len";
        case TemplateKind::document_until_len: return "document_until_len";
        case TemplateKind::two_dict_optional_sep: return "two_dict_optional_sep";
        case TemplateKind::fixed_prefix_counter: return "fixed_prefix_counter";
        case TemplateKind::permutation: return "permutation";
    }
    return "unknown";
}

TemplateKind template_kind_from_string(const std::string& s) {
    if (s == "two_word") return TemplateKind::two_word;
    if (s == "alternating_until_len") return TemplateKind::alternating_until_len;
    if (s == "document_until_len") return TemplateKind::document_until_len;
    if (s == "two_dict_optional_sep") return TemplateKind::two_dict_optional_sep;
    if (s == "fixed_prefix_counter") return TemplateKind::fixed_prefix_counter;
    if (s == "permutation") return TemplateKind::permutation;
    throw std::invalid_argument("unknown template kind: " + s);
}

namespace {

const std::string& draw(const std::vector<std::string>& list, Rng& rng) {
    return list[rng.next_below(list.size())];
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void validate_template(const DgaTemplate& tmpl) {
    switch (tmpl.kind) {
        case TemplateKind::two_word:
        case TemplateKind::two_dict_optional_sep:
            require(tmpl.dictionaries.size() == 2, "template needs two dictionaries");
            require(!tmpl.dictionaries[0].empty() && !tmpl.dictionaries[1].empty(),
                    "template dictionaries must be non-empty");
            break;
        case TemplateKind::alternating_until_len:
            require(tmpl.dictionaries.size() == 2, "template needs two dictionaries");
            require(!tmpl.dictionaries[0].empty() && !tmpl.dictionaries[1].empty(),
                    "template dictionaries must be non-empty");
            require(tmpl.min_len > 0, "alternating template needs a length bound");
            break;
        case TemplateKind::document_until_len: {
            require(tmpl.dictionaries.size() == 1, "template needs one dictionary");
            require(!tmpl.dictionaries[0].empty(), "template dictionary must be non-empty");
            require(tmpl.min_len > 0, "document template needs a length bound");
            if (tmpl.max_len > 0) {
                size_t shortest = SIZE_MAX;
                for (const auto& w : tmpl.dictionaries[0]) shortest = std::min(shortest, w.size());
                // one word past min_len must be able to stay under max_len
                require(static_cast<int>(shortest) <= tmpl.max_len &&
                            tmpl.min_len < tmpl.max_len,
                        "length bounds unreachable with the given words");
            }
            break;
        }
        case TemplateKind::fixed_prefix_counter:
            require(!tmpl.stem.empty(), "counter template needs a stem");
            break;
        case TemplateKind::permutation:
            require(tmpl.stem.size() >= 2, "permutation template needs a stem");
            break;
    }
    require(!tmpl.tlds.empty(), "template needs at least one tld");
}

struct Generated {
    std::string sld;
    std::vector<std::string> words;
};

Generated gen_two_word(const DgaTemplate& tmpl, Rng& rng) {
    Generated g;
    g.words.push_back(draw(tmpl.dictionaries[0], rng));
    g.words.push_back(draw(tmpl.dictionaries[1], rng));
    g.sld = g.words[0] + g.words[1];
    return g;
}

Generated gen_alternating(const DgaTemplate& tmpl, Rng& rng, size_t start_list) {
    Generated g;
    size_t list = start_list;
    while (static_cast<int>(g.sld.size()) <= tmpl.min_len) {
        const std::string& w = draw(tmpl.dictionaries[list], rng);
        g.words.push_back(w);
        g.sld += w;
        list = 1 - list;
    }
    return g;
}

Generated gen_document(const DgaTemplate& tmpl, Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Generated g;
        while (static_cast<int>(g.sld.size()) <= tmpl.min_len) {
            const std::string& w = draw(tmpl.dictionaries[0], rng);
            g.words.push_back(w);
            g.sld += w;
        }
        if (tmpl.max_len <= 0 || static_cast<int>(g.sld.size()) <= tmpl.max_len) return g;
    }
    throw std::invalid_argument("length bounds unreachable with the given words");
}

Generated gen_two_dict_sep(const DgaTemplate& tmpl, Rng& rng) {
    Generated g;
    g.words.push_back(draw(tmpl.dictionaries[0], rng));
    g.words.push_back(draw(tmpl.dictionaries[1], rng));
    const std::string sep =
        tmpl.separators.empty() ? std::string() : draw(tmpl.separators, rng);
    g.sld = g.words[0] + sep + g.words[1];
    return g;
}

// distinct strings reachable by composing up to three adjacent swaps,
// enumerated in a fixed order starting from the stem itself
std::vector<std::string> permutation_pool(const std::string& stem, size_t want) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& s) {
        if (seen.insert(s).second) out.push_back(s);
        return out.size() >= want;
    };
    std::vector<std::string> frontier{stem};
    if (push(stem)) return out;
    for (int depth = 0; depth < 3 && out.size() < want; ++depth) {
        std::vector<std::string> next;
        for (const auto& base : frontier) {
            for (size_t i = 0; i + 1 < base.size(); ++i) {
                std::string s = base;
                std::swap(s[i], s[i + 1]);
                if (seen.count(s)) continue;
                next.push_back(s);
                if (push(s)) return out;
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

GeneratedCorpus generate(const DgaTemplate& tmpl, size_t count, bool unique) {
    require(count >= 1, "generate: count must be >= 1");
    validate_template(tmpl);
    Rng rng(tmpl.seed);
    GeneratedCorpus corpus;
    corpus.unique = unique;
    corpus.records.reserve(count);
    std::unordered_set<std::string> seen;

    // matsnu-style templates fix the starting list per seed
    const size_t start_list =
        tmpl.kind == TemplateKind::alternating_until_len ? rng.next_below(2) : 0;

    if (tmpl.kind == TemplateKind::permutation) {
        const std::vector<std::string> pool = permutation_pool(tmpl.stem, count);
        if (pool.size() < count)
            throw std::invalid_argument("permutation template exhausted before count");
        for (size_t i = 0; i < count; ++i) {
            GeneratedRecord rec;
            rec.qname = pool[i] + "." + tmpl.tlds[i % tmpl.tlds.size()];
            rec.family = tmpl.family;
            rec.seed = tmpl.seed;
            corpus.records.push_back(std::move(rec));
        }
        return corpus;
    }
    if (tmpl.kind == TemplateKind::fixed_prefix_counter) {
        for (size_t i = 0; i < count; ++i) {
            GeneratedRecord rec;
            rec.qname = tmpl.stem + std::to_string(i / tmpl.tlds.size()) + "." +
                        tmpl.tlds[i % tmpl.tlds.size()];
            rec.family = tmpl.family;
            rec.seed = tmpl.seed;
            rec.truth_words.push_back(tmpl.stem);
            corpus.records.push_back(std::move(rec));
        }
        return corpus;
    }

    const size_t max_attempts = count * 200 + 1000;
    size_t attempts = 0;
    while (corpus.records.size() < count) {
        if (++attempts > max_attempts)
            throw std::invalid_argument("generate: could not reach count with unique names");
        Generated g;
        switch (tmpl.kind) {
            case TemplateKind::two_word: g = gen_two_word(tmpl, rng); break;
            case TemplateKind::alternating_until_len:
                g = gen_alternating(tmpl, rng, start_list);
                break;
            case TemplateKind::document_until_len: g = gen_document(tmpl, rng); break;
            case TemplateKind::two_dict_optional_sep: g = gen_two_dict_sep(tmpl, rng); break;
            default: break;
        }
        GeneratedRecord rec;
        rec.qname = g.sld + "." + draw(tmpl.tlds, rng);
        if (unique && !seen.insert(rec.qname).second) continue;
        rec.family = tmpl.family;
        rec.seed = tmpl.seed;
        rec.truth_words = std::move(g.words);
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

GeneratedCorpus sample_benign(const std::vector<std::string>& slds, size_t count,
                              uint64_t seed) {
    std::vector<std::string> pool;
    pool.reserve(slds.size());
    for (const auto& s : slds) {
        if (s.empty() || s.substr(0, 4) == "xn--") continue;
        bool ok = true;
        for (char c : s)
            if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) ok = false;
        if (ok) pool.push_back(s);
    }
    if (count > pool.size())
        throw std::invalid_argument("sample_benign: count exceeds population");

    Rng rng(seed);
    for (size_t i = 0; i < count; ++i) {
        const size_t j = i + rng.next_below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }

    static const std::vector<std::string> tlds = {"com", "com", "com", "com", "com",
                                                  "com", "com", "net", "org", "io",
                                                  "co",  "de",  "ru",  "uk"};
    GeneratedCorpus corpus;
    corpus.unique = true;
    corpus.records.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        GeneratedRecord rec;
        rec.qname = pool[i] + "." + draw(tlds, rng);
        rec.family = "benign";
        rec.seed = seed;
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

std::vector<std::string> zipf_token_list(const UnigramLexicon& lexicon, size_t count,
                                         int min_len, int max_len, double exponent,
                                         uint64_t seed) {
    std::vector<const std::string*> population;
    for (const auto& w : lexicon.words()) {
        const int len = static_cast<int>(w.size());
        if (len >= min_len && len <= max_len) population.push_back(&w);
    }
    if (population.empty()) throw std::invalid_argument("zipf_token_list: empty population");

    std::vector<double> cdf(population.size());
    double acc = 0.0;
    for (size_t i = 0; i < population.size(); ++i) {
        acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
        cdf[i] = acc;
    }
    for (double& v : cdf) v /= acc;

    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const double u = rng.next_double();
        const size_t idx = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        out.push_back(*population[std::min(idx, population.size() - 1)]);
    }
    return out;
}

std::vector<std::string> ranked_word_list(const UnigramLexicon& lexicon, size_t count,
                                          int min_len, int max_len, size_t offset,
                                          size_t stride) {
    std::vector<std::string> out;
    out.reserve(count);
    size_t seen = 0;
    for (const auto& w : lexicon.words()) {
        const int len = static_cast<int>(w.size());
        if (len < min_len || len > max_len) continue;
        if (seen >= offset && (seen - offset) % stride == 0) {
            out.push_back(w);
            if (out.size() == count) return out;
        }
        ++seen;
    }
    throw std::invalid_argument("ranked_word_list: lexicon has too few matching words");
}

const std::vector<std::string>& wordlist_families() {
    static const std::vector<std::string> families = {"suppobox", "pizd",  "matsnu",
                                                      "rovnix",   "gozi", "nymaim2"};
    return families;
}

const std::vector<std::string>& all_families() {
    static const std::vector<std::string> families = {
        "suppobox", "pizd", "matsnu", "rovnix", "gozi", "nymaim2", "beebone",
        "volatilecedar"};
    return families;
}

const std::vector<std::string>& nymaim2_tlds() {
    // 74-entry stand-in; the family's real list is not public
    static const std::vector<std::string> tlds = {
        "net", "com", "org", "ki",  "ad", "biz", "info", "ac", "ae", "af", "ag",
        "al",  "am",  "ao",  "ar",  "at", "au",  "az",   "ba", "bd", "be", "bg",
        "bh",  "bo",  "br",  "bs",  "by", "bz",  "ca",   "ch", "ci", "cl", "cn",
        "cr",  "cu",  "cz",  "de",  "dk", "do",  "dz",   "ec", "ee", "eg", "es",
        "fi",  "fm",  "fr",  "ge",  "gh", "gr",  "gt",   "hk", "hn", "hr", "hu",
        "id",  "ie",  "il",  "in",  "iq", "ir",  "is",   "it", "jm", "jo", "jp",
        "ke",  "kg",  "kh",  "kr",  "kw", "kz",  "la",   "lb"};
    return tlds;
}

DgaTemplate family_template(const std::string& family, const UnigramLexicon& lexicon,
                            uint64_t seed) {
    DgaTemplate t;
    t.family = family;
    t.seed = seed;
    if (family == "suppobox" || family == "pizd") {
        // 384-entry wordlist with document-style multiplicity; suppobox
        // and pizd differ only in which tokens the harvest drew
        const uint64_t harvest = family == "suppobox" ? 0xb0b0ULL : 0xb1b1ULL;
        t.kind = TemplateKind::two_word;
        auto list = zipf_token_list(lexicon, 384, 6, 10, 1.05, harvest);
        t.dictionaries = {list, list};
        t.tlds = {"net"};
    } else if (family == "matsnu") {
        t.kind = TemplateKind::alternating_until_len;
        t.dictionaries = {ranked_word_list(lexicon, 878, 4, 9, 0, 2),
                          ranked_word_list(lexicon, 1008, 4, 9, 1, 2)};
        t.min_len = 24;
        t.tlds = {"com"};
    } else if (family == "rovnix") {
        t.kind = TemplateKind::document_until_len;
        t.dictionaries = {zipf_token_list(lexicon, 600, 3, 9, 1.0, 0x40111ULL)};
        t.min_len = 20;
        t.tlds = {"com"};
    } else if (family == "gozi") {
        t.kind = TemplateKind::document_until_len;
        t.dictionaries = {zipf_token_list(lexicon, 800, 3, 10, 1.0, 0x6021ULL)};
        t.min_len = 11;  // total in [12, 23]
        t.max_len = 23;
        t.tlds = {"com"};
    } else if (family == "nymaim2") {
        t.kind = TemplateKind::two_dict_optional_sep;
        t.dictionaries = {ranked_word_list(lexicon, 2450, 6, 12, 0, 1),
                          ranked_word_list(lexicon, 4387, 6, 12, 2450, 1)};
        t.separators = {"", "-"};
        t.tlds = nymaim2_tlds();
    } else if (family == "beebone") {
        t.kind = TemplateKind::fixed_prefix_counter;
        t.stem = "backdates";
        t.tlds = {"com", "org", "net", "biz", "info"};
    } else if (family == "volatilecedar") {
        t.kind = TemplateKind::permutation;
        t.stem = "dotnetexplorer";
        t.tlds = {"info"};
    } else {
        throw std::invalid_argument("unknown family: " + family);
    }
    return t;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

void write_corpus_csv(const GeneratedCorpus& corpus, const std::string& label,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus: " + path);
    out << "qname,label,family,seed,ground_truth_words\n";
    for (const auto& rec : corpus.records) {
        std::string words;
        for (size_t i = 0; i < rec.truth_words.size(); ++i) {
            if (i) words += "|";
            words += rec.truth_words[i];
        }
        out << csv_escape(rec.qname) << "," << label << "," << csv_escape(rec.family) << ","
            << rec.seed << "," << csv_escape(words) << "\n";
    }
}

GeneratedCorpus read_corpus_csv(const std::string& path, std::string* label_out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path);
    GeneratedCorpus corpus;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() < 5) throw std::runtime_error("malformed corpus row: " + line);
        GeneratedRecord rec;
        rec.qname = fields[0];
        if (label_out) *label_out = fields[1];
        rec.family = fields[2];
        rec.seed = std::stoull(fields[3]);
        if (!fields[4].empty())
            for (auto& w : split(fields[4], '|')) rec.truth_words.push_back(w);
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

}  // namespace nxsift
