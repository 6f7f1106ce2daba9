#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "culi/errors.hpp"
#include "culi/utf8.hpp"

namespace culi {

struct RawLine {
    std::string text;
    std::size_t source_index = 0;
};

// A normalized line: scalar values only, no whitespace, no standalone-'x'
// placeholders. The unit of classification.
struct CuneiformLine {
    std::u32string signs;

    std::size_t length() const { return signs.size(); }
    bool empty() const { return signs.empty(); }
    bool operator==(const CuneiformLine&) const = default;
};

using Label = std::string;

struct CorpusEntry {
    CuneiformLine line;
    Label label;
    bool operator==(const CorpusEntry&) const = default;
};

struct LabeledCorpus {
    std::vector<CorpusEntry> entries;
    std::vector<Label> label_set;  // distinct labels, order of first appearance

    void push(CuneiformLine line, Label label) {
        if (std::find(label_set.begin(), label_set.end(), label) == label_set.end())
            label_set.push_back(label);
        entries.push_back({std::move(line), std::move(label)});
    }
    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

struct SplitSpec {
    std::vector<std::size_t> train, dev, test;
};

// Whitespace removal plus elision of standalone 'x' tokens (an 'x' embedded
// in a longer run of signs is kept).
inline CuneiformLine normalize_line(const RawLine& raw) {
    std::u32string decoded;
    std::size_t bad = 0;
    if (!utf8::decode(raw.text, decoded, bad)) throw MalformedUtf8(0, bad);

    CuneiformLine out;
    std::size_t i = 0;
    const std::size_t n = decoded.size();
    while (i < n) {
        if (utf8::is_space(decoded[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && !utf8::is_space(decoded[j])) ++j;
        const bool standalone_x = (j - i == 1 && decoded[i] == U'x');
        if (!standalone_x) out.signs.append(decoded, i, j - i);
        i = j;
    }
    return out;
}

namespace detail {

inline void read_lines(std::istream& in, std::vector<std::string>& lines) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
}

}  // namespace detail

// Record format: <text> TAB <label>, one per line, empty lines skipped.
inline LabeledCorpus load_labeled(std::istream& in) {
    std::vector<std::string> lines;
    detail::read_lines(in, lines);

    LabeledCorpus corpus;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& rec = lines[ln];
        if (rec.empty()) continue;
        const auto tab = rec.find('\t');
        if (tab == std::string::npos) throw MissingLabel(ln + 1);
        std::string text = rec.substr(0, tab);
        std::string label = rec.substr(tab + 1);
        if (label.empty() ||
            label.find_first_of(" \t\v\f") != std::string::npos)
            throw MissingLabel(ln + 1);
        CuneiformLine norm;
        try {
            norm = normalize_line({std::move(text), ln});
        } catch (const MalformedUtf8& e) {
            throw MalformedUtf8(ln + 1, e.byte_offset);
        }
        corpus.push(std::move(norm), std::move(label));
    }
    return corpus;
}

inline LabeledCorpus load_labeled(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return load_labeled(in);
}

inline std::string serialize(const LabeledCorpus& corpus) {
    std::string out;
    for (const auto& e : corpus.entries) {
        out += utf8::encode(e.line.signs);
        out += '\t';
        out += e.label;
        out += '\n';
    }
    return out;
}

// Keeps the first occurrence of each exact (signs, label) pair. The same
// line under a different label is not a duplicate.
inline LabeledCorpus dedup(const LabeledCorpus& corpus) {
    std::unordered_set<std::string> seen;
    LabeledCorpus out;
    for (const auto& e : corpus.entries) {
        std::string key = utf8::encode(e.line.signs);
        key += '\t';
        key += e.label;
        if (seen.insert(std::move(key)).second) out.push(e.line, e.label);
    }
    return out;
}

inline LabeledCorpus filter_min_length(const LabeledCorpus& corpus,
                                       std::size_t min_signs = 3) {
    LabeledCorpus out;
    for (const auto& e : corpus.entries)
        if (e.line.length() >= min_signs) out.push(e.line, e.label);
    return out;
}

namespace detail {

inline std::unordered_map<Label, std::vector<std::size_t>> indices_by_label(
    const LabeledCorpus& corpus) {
    std::unordered_map<Label, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < corpus.entries.size(); ++i)
        by_label[corpus.entries[i].label].push_back(i);
    return by_label;
}

inline void sort_split(SplitSpec& s) {
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.dev.begin(), s.dev.end());
    std::sort(s.test.begin(), s.test.end());
}

// first ceil(b/2) -> train, next ceil((b - ceil(b/2))/2) -> dev, rest -> test
inline void halve_block(const std::vector<std::size_t>& idx, std::size_t begin,
                        std::size_t b, SplitSpec& out) {
    const std::size_t tr = (b + 1) / 2;
    const std::size_t rem = b - tr;
    const std::size_t dv = (rem + 1) / 2;
    for (std::size_t k = 0; k < b; ++k) {
        const std::size_t i = idx[begin + k];
        if (k < tr)
            out.train.push_back(i);
        else if (k < tr + dv)
            out.dev.push_back(i);
        else
            out.test.push_back(i);
    }
}

}  // namespace detail

// Per label: first half -> train; the remainder halved into dev and test.
inline SplitSpec split_out_of_domain(const LabeledCorpus& corpus) {
    auto by_label = detail::indices_by_label(corpus);
    SplitSpec out;
    for (const Label& label : corpus.label_set) {
        const auto& idx = by_label.at(label);
        if (idx.size() < 4) throw LabelTooSmall(label);
        detail::halve_block(idx, 0, idx.size(), out);
    }
    detail::sort_split(out);
    return out;
}

// Per label: consecutive blocks of 20 lines; 10 train / 5 dev / 5 test within
// each full block, the final partial block halved like the out-of-domain rule.
inline SplitSpec split_in_domain(const LabeledCorpus& corpus) {
    auto by_label = detail::indices_by_label(corpus);
    SplitSpec out;
    for (const Label& label : corpus.label_set) {
        const auto& idx = by_label.at(label);
        if (idx.size() < 4) throw LabelTooSmall(label);
        for (std::size_t b0 = 0; b0 < idx.size(); b0 += 20) {
            const std::size_t b = std::min<std::size_t>(20, idx.size() - b0);
            if (b == 20) {
                for (std::size_t k = 0; k < 20; ++k) {
                    const std::size_t i = idx[b0 + k];
                    if (k < 10)
                        out.train.push_back(i);
                    else if (k < 15)
                        out.dev.push_back(i);
                    else
                        out.test.push_back(i);
                }
            } else {
                detail::halve_block(idx, b0, b, out);
            }
        }
    }
    detail::sort_split(out);
    return out;
}

inline LabeledCorpus subset(const LabeledCorpus& corpus,
                            const std::vector<std::size_t>& indices) {
    LabeledCorpus out;
    for (std::size_t i : indices)
        out.push(corpus.entries[i].line, corpus.entries[i].label);
    return out;
}

inline LabeledCorpus concat(const LabeledCorpus& a, const LabeledCorpus& b) {
    LabeledCorpus out;
    for (const auto& e : a.entries) out.push(e.line, e.label);
    for (const auto& e : b.entries) out.push(e.line, e.label);
    return out;
}

// PRNG: mt19937_64 seeded with `seed`; per label (in first-appearance order)
// a partial Fisher-Yates shuffle with modulo reduction picks per_label
// indices, emitted in ascending original order. Identifier recorded in
// reports: "mt19937_64/fisher-yates-mod".
inline constexpr const char* kSamplerId = "mt19937_64/fisher-yates-mod";

inline LabeledCorpus balance_sample(const LabeledCorpus& corpus,
                                    std::size_t per_label, std::uint64_t seed) {
    auto by_label = detail::indices_by_label(corpus);
    std::mt19937_64 rng(seed);
    LabeledCorpus out;
    for (const Label& label : corpus.label_set) {
        auto idx = by_label.at(label);
        if (idx.size() < per_label)
            throw InsufficientLines(label, idx.size(), per_label);
        for (std::size_t i = 0; i < per_label; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(
                                          rng() % (idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(per_label);
        std::sort(idx.begin(), idx.end());
        for (std::size_t i : idx)
            out.push(corpus.entries[i].line, corpus.entries[i].label);
    }
    return out;
}

}  // namespace culi
