#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "culi/classify.hpp"
#include "culi/corpus.hpp"
#include "culi/errors.hpp"
#include "culi/models.hpp"

namespace culi {

struct ConfusionMatrix {
    std::vector<Label> labels;                     // gold order of appearance
    std::vector<std::vector<std::uint64_t>> cells; // [actual][predicted]

    std::uint64_t at(const Label& actual, const Label& predicted) const {
        return cells[index(actual)][index(predicted)];
    }
    std::size_t index(const Label& label) const {
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw UnknownLabel(label);
        return static_cast<std::size_t>(it - labels.begin());
    }
};

// Universe fixed up front (evaluate passes the model's labels); a prediction
// outside it is an error.
inline ConfusionMatrix confusion(const std::vector<Label>& gold,
                                 const std::vector<Label>& pred,
                                 const std::vector<Label>& universe) {
    if (gold.size() != pred.size()) throw LengthMismatch(gold.size(), pred.size());
    ConfusionMatrix m;
    std::map<Label, std::size_t> index;
    for (const Label& l : universe)
        if (index.emplace(l, m.labels.size()).second) m.labels.push_back(l);
    m.cells.assign(m.labels.size(),
                   std::vector<std::uint64_t>(m.labels.size(), 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto g = index.find(gold[i]);
        if (g == index.end()) throw UnknownLabel(gold[i]);
        const auto p = index.find(pred[i]);
        if (p == index.end()) throw UnknownPredictedLabel(pred[i]);
        ++m.cells[g->second][p->second];
    }
    return m;
}

// Universe inferred from the data: gold labels first, then any predicted
// label not seen in gold, in order of first appearance.
inline ConfusionMatrix confusion(const std::vector<Label>& gold,
                                 const std::vector<Label>& pred) {
    if (gold.size() != pred.size()) throw LengthMismatch(gold.size(), pred.size());
    std::vector<Label> universe;
    auto add = [&](const Label& l) {
        if (std::find(universe.begin(), universe.end(), l) == universe.end())
            universe.push_back(l);
    };
    for (const Label& l : gold) add(l);
    for (const Label& l : pred) add(l);
    return confusion(gold, pred, universe);
}

struct ClassMetrics {
    double precision = 0, recall = 0, f1 = 0;
};

namespace detail {

inline ClassMetrics class_metrics(const ConfusionMatrix& m, std::size_t i) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < m.labels.size(); ++j) {
        row += m.cells[i][j];
        col += m.cells[j][i];
    }
    const double diag = static_cast<double>(m.cells[i][i]);
    ClassMetrics out;
    out.precision = col ? diag / static_cast<double>(col) : 0.0;
    out.recall = row ? diag / static_cast<double>(row) : 0.0;
    out.f1 = (out.precision + out.recall) > 0
                 ? 2 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

}  // namespace detail

// Unweighted mean of per-class F1; 0/0 cases count as 0.
inline double macro_f1(const ConfusionMatrix& m) {
    if (m.labels.empty()) return 0.0;
    double sum = 0;
    for (std::size_t i = 0; i < m.labels.size(); ++i)
        sum += detail::class_metrics(m, i).f1;
    return sum / static_cast<double>(m.labels.size());
}

struct EvalReport {
    ConfusionMatrix matrix;
    std::vector<std::pair<Label, ClassMetrics>> per_class;
    double macro_f1 = 0;
    MethodConfig config;
};

inline std::vector<Label> classify_all(const ModelSet& models,
                                       const LabeledCorpus& data,
                                       const MethodConfig& config,
                                       unsigned threads = 1) {
    std::vector<Label> pred(data.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < data.size(); ++i)
            pred[i] = classify_line(data.entries[i].line, models, config);
        return pred;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (data.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(data.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i)
                pred[i] = classify_line(data.entries[i].line, models, config);
        });
    }
    for (auto& th : pool) th.join();
    return pred;
}

inline EvalReport evaluate(const ModelSet& models, const LabeledCorpus& data,
                           const MethodConfig& config, unsigned threads = 1) {
    if (data.empty()) throw EmptyEvaluationSet();
    for (const Label& label : data.label_set)
        if (models.find(label) == nullptr) throw UnknownLabel(label);

    std::vector<Label> gold;
    gold.reserve(data.size());
    for (const auto& e : data.entries) gold.push_back(e.label);

    std::vector<Label> universe;
    for (const auto& m : models.models) universe.push_back(m.language);

    EvalReport report;
    report.config = config;
    report.matrix = confusion(gold, classify_all(models, data, config, threads),
                              universe);
    for (std::size_t i = 0; i < report.matrix.labels.size(); ++i)
        report.per_class.emplace_back(report.matrix.labels[i],
                                      detail::class_metrics(report.matrix, i));
    report.macro_f1 = macro_f1(report.matrix);
    return report;
}

struct GridSpec {
    std::vector<std::pair<int, int>> orders;   // (low, high) candidates
    std::vector<bool> whole_line{false};
    std::vector<double> penalties{2.0};

    static GridSpec defaults(Method method, int max_order = kMaxOrder) {
        GridSpec g;
        for (int low = 1; low <= max_order; ++low)
            for (int high = low; high <= max_order; ++high)
                g.orders.emplace_back(low, high);
        switch (method) {
            case Method::product:
                g.penalties.clear();
                for (double p = 0.5; p <= 7.0 + 1e-9; p += 0.5)
                    g.penalties.push_back(p);
                break;
            case Method::heli:
                g.penalties.clear();
                for (double p = 1.0; p <= 2.0 + 1e-9; p += 0.1)
                    g.penalties.push_back(p);
                g.whole_line = {false, true};
                break;
            default:
                g.penalties = {2.0};
                break;
        }
        return g;
    }
};

struct GridResult {
    MethodConfig best;
    EvalReport report;
};

// Trains once at the widest grid range and evaluates every cell on dev.
// Ties prefer smaller high order, then smaller low order, then smaller
// penalty (in enumeration order: penalties innermost).
inline GridResult grid_search(const LabeledCorpus& train_data,
                              const LabeledCorpus& dev, Method method,
                              const GridSpec& grid, unsigned threads = 1) {
    if (grid.orders.empty() || grid.penalties.empty())
        throw Error("empty grid");
    NGramRange widest;
    widest.low = kMaxOrder;
    widest.high = 1;
    for (const auto& [low, high] : grid.orders) {
        widest.low = std::min(widest.low, low);
        widest.high = std::max(widest.high, high);
    }
    for (bool wl : grid.whole_line) widest.include_whole_line |= wl;
    const ModelSet models = train(train_data, widest);

    bool have_best = false;
    GridResult best;
    auto better = [&](const MethodConfig& cand, double f1) {
        if (!have_best) return true;
        if (f1 != best.report.macro_f1) return f1 > best.report.macro_f1;
        if (cand.range.high != best.best.range.high)
            return cand.range.high < best.best.range.high;
        if (cand.range.low != best.best.range.low)
            return cand.range.low < best.best.range.low;
        return cand.penalty < best.best.penalty;
    };
    for (const auto& [low, high] : grid.orders) {
        for (bool wl : grid.whole_line) {
            if (wl && method != Method::heli) continue;
            for (double penalty : grid.penalties) {
                MethodConfig config;
                config.method = method;
                config.range = {low, high, wl};
                config.penalty = penalty;
                EvalReport report = evaluate(models, dev, config, threads);
                if (better(config, report.macro_f1)) {
                    have_best = true;
                    best.best = config;
                    best.report = std::move(report);
                }
            }
        }
    }
    return best;
}

// Retrain on train + dev at the chosen configuration's range.
inline ModelSet finalize(const LabeledCorpus& train_data, const LabeledCorpus& dev,
                         const MethodConfig& config) {
    return train(concat(train_data, dev), config.range);
}

inline nlohmann::json report_to_json(const EvalReport& report,
                                     std::uint64_t seed = 0) {
    nlohmann::json doc;
    doc["config"] = {
        {"method", method_name(report.config.method)},
        {"range",
         {{"low", report.config.range.low},
          {"high", report.config.range.high},
          {"include_whole_line", report.config.range.include_whole_line}}},
        {"penalty", report.config.penalty},
        {"seed", seed},
        {"format_version", kModelFormatVersion},
        {"sampler", kSamplerId},
    };
    if (report.config.method == Method::ensemble) {
        const auto& e = report.config.ensemble;
        doc["config"]["ensemble"] = {
            {"simple_range", {e.simple_range.low, e.simple_range.high}},
            {"sum_range", {e.sum_range.low, e.sum_range.high}},
            {"product_range", {e.product_range.low, e.product_range.high}},
            {"product_penalty", e.product_penalty},
        };
    }
    doc["labels"] = report.matrix.labels;
    doc["confusion"] = report.matrix.cells;
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [label, m] : report.per_class)
        per_class[label] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    doc["per_class"] = std::move(per_class);
    doc["macro_f1"] = report.macro_f1;
    return doc;
}

}  // namespace culi
