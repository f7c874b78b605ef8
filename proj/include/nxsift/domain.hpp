#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace nxsift {

enum class ParseStatus {
    ok,
    empty_input,
    empty_label,     // nothing left of the matched suffix
    idn_rejected,    // punycode label (xn--) left of the suffix
    invalid_char,    // outside [a-z0-9-.] after lowercasing
    unknown_suffix,  // no suffix matched and fallback disabled
};

const char* to_string(ParseStatus s);

// One observed NXDomain query, reduced to its registered-domain form.
struct DomainRecord {
    std::string host_id;
    int64_t timestamp = 0;  // seconds since epoch
    std::string qname;      // always sld + "." + tld
    std::string sld;
    std::string tld;
};

struct ParsedName {
    ParseStatus status = ParseStatus::empty_input;
    std::string sld;
    std::string tld;
    bool ok() const { return status == ParseStatus::ok; }
};

// Known public suffixes with longest-match-wins semantics
// ("co.uk" beats "uk" when both are present).
class SuffixList {
public:
    static SuffixList from_file(const std::string& path);
    static SuffixList from_lines(const std::vector<std::string>& lines);

    void add(std::string suffix);
    bool contains(std::string_view suffix) const;
    size_t size() const { return suffixes_.size(); }
    int max_labels() const { return max_labels_; }

private:
    std::unordered_set<std::string> suffixes_;
    int max_labels_ = 0;
};

// Splits a raw query name into (sld, tld). Lowercases, strips one
// trailing dot, matches the longest known suffix and keeps the label
// immediately to its left; deeper labels are discarded. When no suffix
// matches and fallback_last_label is set, the final label is used as
// the tld.
ParsedName parse_qname(std::string_view raw, const SuffixList& suffixes,
                       bool fallback_last_label = false);

// parse_qname plus record assembly; status is ok() on rec validity.
ParseStatus make_record(std::string host_id, int64_t timestamp, std::string_view raw,
                        const SuffixList& suffixes, bool fallback_last_label,
                        DomainRecord& out);

}  // namespace nxsift
