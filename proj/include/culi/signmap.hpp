#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "culi/corpus.hpp"
#include "culi/errors.hpp"
#include "culi/utf8.hpp"

namespace culi {

inline bool is_cuneiform(char32_t cp) {
    return (cp >= 0x12000 && cp <= 0x123FF) ||  // base signs
           (cp >= 0x12400 && cp <= 0x1247F) ||  // punctuation and numerals
           (cp >= 0x12480 && cp <= 0x1254F);    // Early Dynastic extension
}

// ASCII-only case fold; index numerals and diacritics stay untouched, so
// logographic and syllabic spellings of a reading share one key.
inline std::string fold_reading(std::string_view reading) {
    std::string out(reading);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

struct SignList {
    std::unordered_map<std::string, std::u32string> entries;  // folded key
    std::vector<std::string> source_lines;  // verbatim, for re-serialization

    std::size_t size() const { return entries.size(); }

    const std::u32string* lookup(std::string_view reading) const {
        auto it = entries.find(fold_reading(reading));
        return it == entries.end() ? nullptr : &it->second;
    }
};

// Records are <reading> TAB <sign(s)>; '#'-prefixed lines are comments.
inline SignList load_sign_list(std::istream& in) {
    SignList list;
    detail::read_lines(in, list.source_lines);
    for (std::size_t ln = 0; ln < list.source_lines.size(); ++ln) {
        const std::string& rec = list.source_lines[ln];
        if (rec.empty() || rec[0] == '#') continue;
        const auto tab = rec.find('\t');
        if (tab == std::string::npos)
            throw Error("sign list line " + std::to_string(ln + 1) +
                        ": missing TAB");
        const std::string reading = rec.substr(0, tab);
        std::u32string signs;
        std::size_t bad = 0;
        if (!utf8::decode(rec.substr(tab + 1), signs, bad))
            throw MalformedUtf8(ln + 1, bad);
        if (signs.empty())
            throw Error("sign list line " + std::to_string(ln + 1) +
                        ": empty sign sequence");
        for (char32_t cp : signs)
            if (!is_cuneiform(cp)) throw NonCuneiformCodepoint(reading, ln + 1);
        if (!list.entries.emplace(fold_reading(reading), std::move(signs)).second)
            throw DuplicateReading(reading, ln + 1);
    }
    return list;
}

inline SignList load_sign_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return load_sign_list(in);
}

inline std::string serialize(const SignList& list) {
    std::string out;
    for (const auto& line : list.source_lines) {
        out += line;
        out += '\n';
    }
    return out;
}

// Removes every maximal (...) group, innermost first, and trims the result.
inline std::string strip_annotations(std::string_view token) {
    std::string s(token);
    for (;;) {
        const auto close = s.find(')');
        if (close == std::string::npos) {
            if (s.find('(') != std::string::npos)
                throw UnbalancedParenthesis(std::string(token));
            break;
        }
        const auto open = s.rfind('(', close);
        if (open == std::string::npos)
            throw UnbalancedParenthesis(std::string(token));
        s.erase(open, close - open + 1);
    }
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

struct TransliterationLine {
    std::vector<std::string> tokens;
};

namespace detail {

// ATF damage notation stripped from token ends: '#' '?' '!' and half brackets.
inline bool is_damage_mark(char32_t cp) {
    return cp == U'#' || cp == U'?' || cp == U'!' || cp == 0x2308 ||
           cp == 0x2309 || cp == 0x2E22 || cp == 0x2E23;
}

inline bool is_reading_separator(char32_t cp) {
    return cp == U'-' || cp == U'.' || cp == U'{' || cp == U'}';
}

}  // namespace detail

// Words split on whitespace, readings split on '-' '.' and determinative
// braces; parenthetical annotations and damage marks removed. Annotations
// are stripped per word so a separator inside parentheses cannot cut a
// group in half.
inline TransliterationLine tokenize_atf(std::string_view line) {
    std::u32string decoded;
    std::size_t bad = 0;
    if (!utf8::decode(line, decoded, bad)) throw MalformedUtf8(0, bad);

    TransliterationLine out;
    std::u32string piece;
    auto flush_piece = [&] {
        while (!piece.empty() && detail::is_damage_mark(piece.front()))
            piece.erase(piece.begin());
        while (!piece.empty() && detail::is_damage_mark(piece.back()))
            piece.pop_back();
        if (!piece.empty()) out.tokens.push_back(utf8::encode(piece));
        piece.clear();
    };
    auto flush_word = [&](std::u32string_view word) {
        std::u32string stripped;
        if (!utf8::decode(strip_annotations(utf8::encode(word)), stripped, bad))
            throw MalformedUtf8(0, bad);
        for (char32_t cp : stripped) {
            if (detail::is_reading_separator(cp))
                flush_piece();
            else
                piece.push_back(cp);
        }
        flush_piece();
    };
    std::size_t i = 0;
    while (i < decoded.size()) {
        if (utf8::is_space(decoded[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < decoded.size() && !utf8::is_space(decoded[j])) ++j;
        flush_word(std::u32string_view(decoded).substr(i, j - i));
        i = j;
    }
    return out;
}

enum class ConvertMode { strict, lenient };

struct ConvertResult {
    CuneiformLine line;
    std::size_t dropped = 0;  // lenient mode: unknown readings skipped
};

inline ConvertResult to_cuneiform(const TransliterationLine& line,
                                  const SignList& signs, ConvertMode mode) {
    ConvertResult out;
    for (std::size_t pos = 0; pos < line.tokens.size(); ++pos) {
        const std::string& token = line.tokens[pos];
        if (fold_reading(token) == "x") continue;  // broken sign placeholder
        if (const std::u32string* seq = signs.lookup(token)) {
            out.line.signs += *seq;
        } else if (mode == ConvertMode::strict) {
            throw UnknownReading(token, pos);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

}  // namespace culi
