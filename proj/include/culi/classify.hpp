#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "culi/corpus.hpp"
#include "culi/errors.hpp"
#include "culi/models.hpp"

namespace culi {

enum class Method { simple, sum, product, heli, ensemble };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::simple: return "simple";
        case Method::sum: return "sum";
        case Method::product: return "product";
        case Method::heli: return "heli";
        case Method::ensemble: return "ensemble";
    }
    return "?";
}

// Per-method settings for the voting ensemble; defaults are the tuned
// single-method configurations.
struct EnsembleConfig {
    NGramRange simple_range{1, 10, false};
    NGramRange sum_range{3, 15, false};
    NGramRange product_range{1, 4, false};
    double product_penalty = 2.0;
    bool operator==(const EnsembleConfig&) const = default;
};

struct MethodConfig {
    Method method = Method::product;
    NGramRange range{1, 4, false};
    // product: flat charge per absent feature; heli: penalty multiplier.
    double penalty = 2.0;
    EnsembleConfig ensemble{};
    bool operator==(const MethodConfig&) const = default;
};

enum class Polarity { higher_wins, lower_wins };

struct ScoreVector {
    std::vector<std::pair<Label, double>> scores;  // model order
    Polarity polarity = Polarity::higher_wins;
};

namespace detail {

inline void check_range(const ModelSet& models, const NGramRange& range) {
    if (!range.within(models.range))
        throw RangeMismatch("requested " + std::to_string(range.low) + "-" +
                            std::to_string(range.high) +
                            (range.include_whole_line ? "+lines" : "") +
                            " vs model " + std::to_string(models.range.low) + "-" +
                            std::to_string(models.range.high) +
                            (models.range.include_whole_line ? "+lines" : ""));
}

inline ScoreVector zero_scores(const ModelSet& models, Polarity polarity) {
    ScoreVector sv;
    sv.polarity = polarity;
    sv.scores.reserve(models.models.size());
    for (const auto& m : models.models) sv.scores.emplace_back(m.language, 0.0);
    return sv;
}

}  // namespace detail

// Simple scoring: one point per feature token found in the language's tables.
inline ScoreVector score_simple(const CuneiformLine& line, const ModelSet& models,
                                const NGramRange& range) {
    detail::check_range(models, range);
    ScoreVector sv = detail::zero_scores(models, Polarity::higher_wins);
    for (int n = range.low; n <= range.high; ++n) {
        if (line.length() < static_cast<std::size_t>(n)) continue;
        const std::size_t slot = static_cast<std::size_t>(n - models.range.low);
        for (std::size_t i = 0; i + n <= line.length(); ++i) {
            const std::u32string gram = line.signs.substr(i, n);
            for (std::size_t g = 0; g < models.models.size(); ++g)
                if (models.models[g].tables[slot].contains(gram))
                    sv.scores[g].second += 1.0;
        }
    }
    return sv;
}

// Sum of relative frequencies; absent features contribute 0.
inline ScoreVector score_sum(const CuneiformLine& line, const ModelSet& models,
                             const NGramRange& range) {
    detail::check_range(models, range);
    ScoreVector sv = detail::zero_scores(models, Polarity::higher_wins);
    for (int n = range.low; n <= range.high; ++n) {
        if (line.length() < static_cast<std::size_t>(n)) continue;
        const std::size_t slot = static_cast<std::size_t>(n - models.range.low);
        for (std::size_t i = 0; i + n <= line.length(); ++i) {
            const std::u32string gram = line.signs.substr(i, n);
            for (std::size_t g = 0; g < models.models.size(); ++g) {
                const auto& m = models.models[g];
                const auto it = m.tables[slot].find(gram);
                if (it != m.tables[slot].end())
                    sv.scores[g].second += static_cast<double>(it->second) /
                                           static_cast<double>(m.totals[slot]);
            }
        }
    }
    return sv;
}

// Product of relative frequencies, computed as a sum of negative decimal
// logarithms; each absent feature adds the flat `penalty`. Lower wins.
inline ScoreVector score_product(const CuneiformLine& line, const ModelSet& models,
                                 const NGramRange& range, double penalty) {
    detail::check_range(models, range);
    ScoreVector sv = detail::zero_scores(models, Polarity::lower_wins);
    for (int n = range.low; n <= range.high; ++n) {
        if (line.length() < static_cast<std::size_t>(n)) continue;
        const std::size_t slot = static_cast<std::size_t>(n - models.range.low);
        for (std::size_t i = 0; i + n <= line.length(); ++i) {
            const std::u32string gram = line.signs.substr(i, n);
            for (std::size_t g = 0; g < models.models.size(); ++g) {
                const auto& m = models.models[g];
                const auto it = m.tables[slot].find(gram);
                if (it != m.tables[slot].end())
                    sv.scores[g].second -=
                        std::log10(static_cast<double>(it->second) /
                                   static_cast<double>(m.totals[slot]));
                else
                    sv.scores[g].second += penalty;
            }
        }
    }
    return sv;
}

// The line is treated as a single word. Whole-line lookup first (when
// trained); otherwise each window at the longest feasible order backs off
// until some model knows the gram. Scores are mean negative log relative
// frequencies; a language missing a scoring feature pays the count-one score
// at that order times `penalty_multiplier`. Lower wins.
inline ScoreVector score_heli(const CuneiformLine& line, const ModelSet& models,
                              const NGramRange& range, double penalty_multiplier) {
    detail::check_range(models, range);
    ScoreVector sv = detail::zero_scores(models, Polarity::lower_wins);
    const std::size_t n_models = models.models.size();

    // count-one charge, scaled by the multiplier; a language with no mass at
    // this order pays at least the worst charge among languages that have any
    auto absent_charge = [&](std::size_t g, int order) {
        const std::size_t slot = static_cast<std::size_t>(order - models.range.low);
        const std::uint64_t total = models.models[g].totals[slot];
        if (total > 0)
            return std::log10(static_cast<double>(total)) * penalty_multiplier;
        std::uint64_t max_total = 1;
        for (const auto& m : models.models)
            max_total = std::max(max_total, m.totals[slot]);
        return std::log10(static_cast<double>(max_total)) * penalty_multiplier;
    };

    if (range.include_whole_line) {
        bool anywhere = false;
        for (const auto& m : models.models)
            if (m.line_table.contains(line.signs)) {
                anywhere = true;
                break;
            }
        if (anywhere) {
            for (std::size_t g = 0; g < n_models; ++g) {
                const auto& m = models.models[g];
                const auto it = m.line_table.find(line.signs);
                if (it != m.line_table.end())
                    sv.scores[g].second =
                        -std::log10(static_cast<double>(it->second) /
                                    static_cast<double>(m.line_total));
                else if (m.line_total > 0)
                    sv.scores[g].second =
                        std::log10(static_cast<double>(m.line_total)) *
                        penalty_multiplier;
            }
            return sv;
        }
    }

    const int h = std::min<int>(range.high, static_cast<int>(line.length()));
    if (h < range.low) return sv;  // nothing to score; all ties

    std::size_t n_features = 0;
    for (std::size_t pos = 0; pos + h <= line.length(); ++pos) {
        int found_order = 0;
        for (int k = h; k >= range.low; --k) {
            const std::u32string gram = line.signs.substr(pos, k);
            const std::size_t slot = static_cast<std::size_t>(k - models.range.low);
            bool anywhere = false;
            for (const auto& m : models.models)
                if (m.tables[slot].contains(gram)) {
                    anywhere = true;
                    break;
                }
            if (anywhere) {
                found_order = k;
                for (std::size_t g = 0; g < n_models; ++g) {
                    const auto& m = models.models[g];
                    const auto it = m.tables[slot].find(gram);
                    if (it != m.tables[slot].end())
                        sv.scores[g].second -=
                            std::log10(static_cast<double>(it->second) /
                                       static_cast<double>(m.totals[slot]));
                    else
                        sv.scores[g].second += absent_charge(g, k);
                }
                break;
            }
        }
        if (found_order == 0) {
            for (std::size_t g = 0; g < n_models; ++g)
                sv.scores[g].second += absent_charge(g, range.low);
        }
        ++n_features;
    }
    for (auto& [label, score] : sv.scores) score /= static_cast<double>(n_features);
    return sv;
}

// Argbest under the vector's polarity; ties go to the lexicographically
// smallest label.
inline Label argbest(const ScoreVector& sv) {
    const Label* best_label = nullptr;
    double best = 0;
    for (const auto& [label, score] : sv.scores) {
        bool better;
        if (best_label == nullptr)
            better = true;
        else if (score == best)
            better = label < *best_label;
        else
            better = sv.polarity == Polarity::higher_wins ? score > best
                                                          : score < best;
        if (better) {
            best_label = &label;
            best = score;
        }
    }
    if (best_label == nullptr) throw Error("empty score vector");
    return *best_label;
}

inline Label identify(const CuneiformLine& line, const ModelSet& models,
                      const MethodConfig& config) {
    switch (config.method) {
        case Method::simple:
            return argbest(score_simple(line, models, config.range));
        case Method::sum:
            return argbest(score_sum(line, models, config.range));
        case Method::product:
            return argbest(score_product(line, models, config.range, config.penalty));
        case Method::heli:
            return argbest(score_heli(line, models, config.range, config.penalty));
        case Method::ensemble:
            break;
    }
    throw Error("identify requires a non-ensemble method");
}

// Majority vote of simple / sum / product; a three-way disagreement falls
// back to the product method's prediction.
inline Label ensemble_vote(const CuneiformLine& line, const ModelSet& models,
                           const EnsembleConfig& config) {
    const Label a = argbest(score_simple(line, models, config.simple_range));
    const Label b = argbest(score_sum(line, models, config.sum_range));
    const Label c = argbest(score_product(line, models, config.product_range,
                                          config.product_penalty));
    if (a == b || a == c) return a;
    if (b == c) return b;
    return c;
}

// Dispatch covering all five methods.
inline Label classify_line(const CuneiformLine& line, const ModelSet& models,
                           const MethodConfig& config) {
    if (config.method == Method::ensemble)
        return ensemble_vote(line, models, config.ensemble);
    return identify(line, models, config);
}

}  // namespace culi
