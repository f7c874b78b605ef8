#include "nxsift/domain.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace nxsift {

const char* to_string(ParseStatus s) {
    switch (s) {
        case ParseStatus::ok: return "ok";
        case ParseStatus::empty_input: return "empty_input";
        case ParseStatus::empty_label: return "empty_label";
        case ParseStatus::idn_rejected: return "idn_rejected";
        case ParseStatus::invalid_char: return "invalid_char";
        case ParseStatus::unknown_suffix: return "unknown_suffix";
    }
    return "unknown";
}

SuffixList SuffixList::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open suffix list: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

SuffixList SuffixList::from_lines(const std::vector<std::string>& lines) {
    SuffixList list;
    for (const auto& raw : lines) {
        std::string s = raw;
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.pop_back();
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        if (s.empty()) continue;
        for (char& c : s) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
        list.add(std::move(s));
    }
    return list;
}

void SuffixList::add(std::string suffix) {
    int labels = 1;
    for (char c : suffix)
        if (c == '.') ++labels;
    if (labels > max_labels_) max_labels_ = labels;
    suffixes_.insert(std::move(suffix));
}

bool SuffixList::contains(std::string_view suffix) const {
    return suffixes_.count(std::string(suffix)) > 0;
}

namespace {

bool valid_sld_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

}  // namespace

ParsedName parse_qname(std::string_view raw, const SuffixList& suffixes,
                       bool fallback_last_label) {
    ParsedName result;
    std::string name;
    name.reserve(raw.size());
    for (char c : raw) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (static_cast<unsigned char>(c) > 0x7f) {
            result.status = ParseStatus::invalid_char;
            return result;
        }
        name.push_back(c);
    }
    if (!name.empty() && name.back() == '.') name.pop_back();
    if (name.empty()) {
        result.status = ParseStatus::empty_input;
        return result;
    }

    // split into labels, rejecting empty labels and bad characters
    std::vector<std::string_view> labels;
    size_t start = 0;
    std::string_view view = name;
    for (size_t i = 0; i <= view.size(); ++i) {
        if (i == view.size() || view[i] == '.') {
            if (i == start) {
                result.status = ParseStatus::empty_label;
                return result;
            }
            labels.push_back(view.substr(start, i - start));
            start = i + 1;
        } else if (!valid_sld_char(view[i])) {
            result.status = ParseStatus::invalid_char;
            return result;
        }
    }

    // longest matching suffix that still leaves at least one label
    size_t suffix_labels = 0;
    for (size_t k = labels.size() - 1; k >= 1; --k) {
        if (static_cast<int>(k) > suffixes.max_labels()) continue;
        size_t pos = 0;
        for (size_t i = labels.size() - k; i > 0; --i) pos += labels[i - 1].size() + 1;
        std::string_view candidate = view.substr(pos);
        if (suffixes.contains(candidate)) {
            suffix_labels = k;
            break;
        }
    }
    if (labels.size() == 1) {
        // a bare label can only be a suffix itself or unknown
        result.status = suffixes.contains(labels[0]) ? ParseStatus::empty_label
                                                     : ParseStatus::unknown_suffix;
        return result;
    }
    if (suffix_labels == 0) {
        if (!fallback_last_label) {
            result.status = ParseStatus::unknown_suffix;
            return result;
        }
        suffix_labels = 1;
    }

    std::string_view sld = labels[labels.size() - suffix_labels - 1];
    if (sld.substr(0, 4) == "xn--") {
        result.status = ParseStatus::idn_rejected;
        return result;
    }

    size_t tld_pos = 0;
    for (size_t i = 0; i < labels.size() - suffix_labels; ++i) tld_pos += labels[i].size() + 1;
    result.status = ParseStatus::ok;
    result.sld = std::string(sld);
    result.tld = std::string(view.substr(tld_pos));
    return result;
}

ParseStatus make_record(std::string host_id, int64_t timestamp, std::string_view raw,
                        const SuffixList& suffixes, bool fallback_last_label,
                        DomainRecord& out) {
    ParsedName parsed = parse_qname(raw, suffixes, fallback_last_label);
    if (!parsed.ok()) return parsed.status;
    out.host_id = std::move(host_id);
    out.timestamp = timestamp;
    out.sld = std::move(parsed.sld);
    out.tld = std::move(parsed.tld);
    out.qname = out.sld + "." + out.tld;
    return ParseStatus::ok;
}

}  // namespace nxsift
