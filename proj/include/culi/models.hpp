#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "culi/corpus.hpp"
#include "culi/errors.hpp"
#include "culi/utf8.hpp"

namespace culi {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kMaxOrder = 15;

struct NGramRange {
    int low = 1;
    int high = 3;
    bool include_whole_line = false;

    bool contains(int n) const { return n >= low && n <= high; }
    bool within(const NGramRange& outer) const {
        return low >= outer.low && high <= outer.high &&
               (!include_whole_line || outer.include_whole_line);
    }
    bool operator==(const NGramRange&) const = default;
};

// Contiguous windows of length n, in left-to-right order, no padding.
inline std::vector<std::u32string> extract_ngrams(const CuneiformLine& line, int n) {
    std::vector<std::u32string> out;
    if (n < 1 || line.length() < static_cast<std::size_t>(n)) return out;
    out.reserve(line.length() - n + 1);
    for (std::size_t i = 0; i + n <= line.length(); ++i)
        out.push_back(line.signs.substr(i, n));
    return out;
}

using CountTable = std::unordered_map<std::u32string, std::uint64_t>;

struct LanguageModel {
    Label language;
    std::vector<CountTable> tables;       // index = order - range.low
    std::vector<std::uint64_t> totals;    // per-order occurrence totals
    CountTable line_table;                // whole-line counts (optional)
    std::uint64_t line_total = 0;

    bool operator==(const LanguageModel&) const = default;
};

struct ModelSet {
    NGramRange range;
    std::vector<LanguageModel> models;  // label order = first appearance

    const LanguageModel* find(const Label& label) const {
        for (const auto& m : models)
            if (m.language == label) return &m;
        return nullptr;
    }
    bool operator==(const ModelSet&) const = default;
};

inline ModelSet train(const LabeledCorpus& corpus, NGramRange range,
                      std::uint64_t min_count = 1) {
    if (corpus.empty()) throw EmptyCorpus();
    ModelSet set;
    set.range = range;
    const std::size_t n_orders = static_cast<std::size_t>(range.high - range.low + 1);
    for (const Label& label : corpus.label_set) {
        LanguageModel m;
        m.language = label;
        m.tables.resize(n_orders);
        m.totals.assign(n_orders, 0);
        set.models.push_back(std::move(m));
    }
    std::unordered_map<Label, std::size_t> index;
    for (std::size_t i = 0; i < set.models.size(); ++i)
        index[set.models[i].language] = i;

    for (const auto& e : corpus.entries) {
        LanguageModel& m = set.models[index[e.label]];
        for (int n = range.low; n <= range.high; ++n) {
            const std::size_t slot = static_cast<std::size_t>(n - range.low);
            if (e.line.length() < static_cast<std::size_t>(n)) continue;
            for (std::size_t i = 0; i + n <= e.line.length(); ++i)
                ++m.tables[slot][e.line.signs.substr(i, n)];
            m.totals[slot] += e.line.length() - n + 1;
        }
        if (range.include_whole_line) {
            ++m.line_table[e.line.signs];
            ++m.line_total;
        }
    }

    if (min_count > 1) {
        for (auto& m : set.models) {
            for (std::size_t slot = 0; slot < m.tables.size(); ++slot) {
                std::uint64_t kept = 0;
                for (auto it = m.tables[slot].begin(); it != m.tables[slot].end();) {
                    if (it->second < min_count) {
                        it = m.tables[slot].erase(it);
                    } else {
                        kept += it->second;
                        ++it;
                    }
                }
                m.totals[slot] = kept;
            }
        }
    }
    return set;
}

// c(C_g, f) / l_{C_g^F} at f's own order; 0 when absent.
inline double relative_frequency(const ModelSet& set, const LanguageModel& model,
                                 const std::u32string& gram) {
    const int order = static_cast<int>(gram.size());
    if (!set.range.contains(order)) throw OrderOutOfRange(order);
    const auto& table = model.tables[static_cast<std::size_t>(order - set.range.low)];
    const auto it = table.find(gram);
    if (it == table.end()) return 0.0;
    const std::uint64_t total = model.totals[static_cast<std::size_t>(order - set.range.low)];
    return static_cast<double>(it->second) / static_cast<double>(total);
}

inline nlohmann::json models_to_json(const ModelSet& set) {
    nlohmann::json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["range"] = {{"low", set.range.low},
                    {"high", set.range.high},
                    {"include_whole_line", set.range.include_whole_line}};
    nlohmann::json order = nlohmann::json::array();
    for (const auto& m : set.models) order.push_back(m.language);
    doc["label_order"] = std::move(order);
    nlohmann::json models = nlohmann::json::object();
    for (const auto& m : set.models) {
        nlohmann::json jm;
        nlohmann::json totals = nlohmann::json::object();
        nlohmann::json tables = nlohmann::json::object();
        for (int n = set.range.low; n <= set.range.high; ++n) {
            const std::size_t slot = static_cast<std::size_t>(n - set.range.low);
            totals[std::to_string(n)] = m.totals[slot];
            nlohmann::json table = nlohmann::json::object();
            for (const auto& [gram, count] : m.tables[slot])
                table[utf8::encode(gram)] = count;
            tables[std::to_string(n)] = std::move(table);
        }
        jm["totals"] = std::move(totals);
        jm["tables"] = std::move(tables);
        if (set.range.include_whole_line) {
            nlohmann::json lines = nlohmann::json::object();
            for (const auto& [line, count] : m.line_table)
                lines[utf8::encode(line)] = count;
            jm["lines"] = std::move(lines);
        }
        models[m.language] = std::move(jm);
    }
    doc["models"] = std::move(models);
    return doc;
}

inline ModelSet models_from_json(const nlohmann::json& doc) {
    const int version = doc.at("format_version").get<int>();
    if (version > kModelFormatVersion) throw FormatVersionMismatch(version);

    ModelSet set;
    set.range.low = doc.at("range").at("low").get<int>();
    set.range.high = doc.at("range").at("high").get<int>();
    set.range.include_whole_line = doc.at("range").at("include_whole_line").get<bool>();
    if (set.range.low < 1 || set.range.low > set.range.high ||
        set.range.high > kMaxOrder)
        throw Error("model file declares an invalid n-gram range");

    const std::size_t n_orders = static_cast<std::size_t>(set.range.high - set.range.low + 1);
    const auto& jmodels = doc.at("models");
    for (const auto& jlabel : doc.at("label_order")) {
        const std::string label = jlabel.get<std::string>();
        const auto& jm = jmodels.at(label);
        LanguageModel m;
        m.language = label;
        m.tables.resize(n_orders);
        m.totals.assign(n_orders, 0);
        for (int n = set.range.low; n <= set.range.high; ++n) {
            const std::size_t slot = static_cast<std::size_t>(n - set.range.low);
            const std::string key = std::to_string(n);
            m.totals[slot] = jm.at("totals").at(key).get<std::uint64_t>();
            std::uint64_t sum = 0;
            for (const auto& [gram_utf8, count] : jm.at("tables").at(key).items()) {
                std::u32string gram;
                std::size_t bad = 0;
                if (!utf8::decode(gram_utf8, gram, bad) ||
                    gram.size() != static_cast<std::size_t>(n))
                    throw CorruptTable(n, label);
                const auto c = count.get<std::uint64_t>();
                if (c < 1) throw CorruptTable(n, label);
                m.tables[slot][std::move(gram)] = c;
                sum += c;
            }
            if (sum != m.totals[slot]) throw CorruptTable(n, label);
        }
        if (set.range.include_whole_line) {
            for (const auto& [line_utf8, count] : jm.at("lines").items()) {
                std::u32string line;
                std::size_t bad = 0;
                if (!utf8::decode(line_utf8, line, bad)) throw CorruptTable(0, label);
                const auto c = count.get<std::uint64_t>();
                if (c < 1) throw CorruptTable(0, label);
                m.line_table[std::move(line)] = c;
                m.line_total += c;
            }
        }
        set.models.push_back(std::move(m));
    }
    return set;
}

inline void save_models(const ModelSet& set, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp);
        out << models_to_json(set).dump() << '\n';
    }
    std::filesystem::rename(tmp, path);
}

inline ModelSet load_models(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("cannot parse model file " + path.string() + ": " + e.what());
    }
    return models_from_json(doc);
}

}  // namespace culi
