// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any required criterion fails. Criterion 4 needs the external
// CLI-2019 dataset and reports SKIP when it is not present.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "culi/classify.hpp"
#include "culi/corpus.hpp"
#include "culi/eval.hpp"
#include "culi/models.hpp"
#include "culi/signmap.hpp"
#include "oracle.hpp"

using namespace culi;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": "
              << name << "\n";
    if (!ok) ++failures;
}

void report_skip(int criterion, const std::string& name,
                 const std::string& why) {
    std::cout << "SKIP criterion " << criterion << ": " << name << " (" << why
              << ")\n";
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// --- criterion 1: small-instance oracle equivalence -----------------------

bool criterion1() {
    std::mt19937 rng(101);
    int cases = 0;
    while (cases < 1200) {
        LabeledCorpus corpus;
        oracle::Corpus ref;
        const int n_lines = 2 + rng() % 4;  // <= 5 lines
        for (int i = 0; i < n_lines; ++i) {
            std::u32string signs;
            const int len = 1 + rng() % 6;  // <= 6 signs
            for (int k = 0; k < len; ++k) signs.push_back(U'a' + rng() % 3);
            const Label label = i % 2 ? "B" : "A";
            corpus.push({signs}, label);
            ref.lines[label].push_back(signs);
        }
        if (ref.lines.size() < 2) continue;
        const int low = 1 + rng() % 3;
        const int high = low + rng() % (3 - low + 1);
        const double penalty = 0.5 + (rng() % 8) * 0.5;
        const NGramRange range{low, high, false};
        const auto models = train(corpus, range);

        std::u32string ms;
        const int mlen = 1 + rng() % 6;
        for (int k = 0; k < mlen; ++k) ms.push_back(U'a' + rng() % 3);
        const CuneiformLine line{ms};

        const auto simple_ref = oracle::simple(ref, ms, low, high);
        const auto sum_ref = oracle::sum(ref, ms, low, high);
        const auto prod_ref = oracle::product(ref, ms, low, high, penalty);

        for (const auto& [label, score] : score_simple(line, models, range).scores)
            if (!near(score, simple_ref.at(label), 1e-9)) return false;
        for (const auto& [label, score] : score_sum(line, models, range).scores)
            if (!near(score, sum_ref.at(label), 1e-9)) return false;
        for (const auto& [label, score] :
             score_product(line, models, range, penalty).scores)
            if (!near(score, prod_ref.at(label), 1e-9)) return false;

        MethodConfig config;
        config.range = range;
        config.penalty = penalty;
        config.method = Method::simple;
        if (identify(line, models, config) != oracle::argbest(simple_ref, false))
            return false;
        config.method = Method::sum;
        if (identify(line, models, config) != oracle::argbest(sum_ref, false))
            return false;
        config.method = Method::product;
        if (identify(line, models, config) != oracle::argbest(prod_ref, true))
            return false;
        ++cases;
    }
    return true;
}

// --- criterion 2: HeLI hand checks ----------------------------------------

bool criterion2() {
    LabeledCorpus corpus;
    corpus.push({U"aab"}, "A");
    corpus.push({U"abb"}, "B");
    const auto models = train(corpus, {1, 2, false});
    const double mult = 1.5;
    const double log2 = std::log10(2.0);
    const double log3 = std::log10(3.0);

    // n-gram path: positions "aa" (A only) and "ab" (shared), order 2
    {
        const auto sv = score_heli({U"aab"}, models, {1, 2, false}, mult);
        double a = 0, b = 0;
        for (const auto& [label, score] : sv.scores) (label == "A" ? a : b) = score;
        if (!near(a, log2, 1e-9)) return false;
        if (!near(b, (log2 * mult + log2) / 2.0, 1e-9)) return false;
    }
    // all-absent: one position, every language pays -log10(1/3) * mult
    {
        const auto sv = score_heli({U"cc"}, models, {1, 2, false}, mult);
        for (const auto& [label, score] : sv.scores)
            if (!near(score, log3 * mult, 1e-9)) return false;
    }
    // whole-line hit: rel. freq. 1 -> score 0; the other language pays
    // -log10(1/line_total) * mult
    {
        LabeledCorpus wl;
        for (int i = 0; i < 3; ++i) wl.push({U"aab"}, "A");
        wl.push({U"abb"}, "B");
        wl.push({U"bbb"}, "B");
        const auto wl_models = train(wl, {1, 2, true});
        const auto sv = score_heli({U"aab"}, wl_models, {1, 2, true}, mult);
        double a = 0, b = 0;
        for (const auto& [label, score] : sv.scores) (label == "A" ? a : b) = score;
        if (!near(a, 0.0, 1e-9)) return false;
        if (!near(b, log2 * mult, 1e-9)) return false;
    }
    return true;
}

// --- criterion 3: metric checks on the published confusion matrix ---------

bool criterion3() {
    // per-class test size is 985; the actual class runs along the dimension
    // whose marginals are all 985
    const std::vector<Label> labels{"LTB", "MPB", "NEA", "NEB",
                                    "OLB", "STB", "SUX"};
    const std::uint64_t printed[7][7] = {
        {947, 6, 9, 34, 13, 25, 8},     {3, 858, 51, 94, 84, 69, 55},
        {6, 26, 780, 185, 26, 148, 26}, {4, 19, 81, 535, 30, 160, 30},
        {3, 22, 12, 16, 736, 47, 110},  {17, 35, 30, 113, 43, 491, 101},
        {5, 19, 22, 8, 53, 45, 655}};
    ConfusionMatrix m;
    m.labels = labels;
    m.cells.assign(7, std::vector<std::uint64_t>(7, 0));
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) m.cells[j][i] = printed[i][j];

    for (std::size_t i = 0; i < 7; ++i) {
        std::uint64_t row = 0;
        for (std::size_t j = 0; j < 7; ++j) row += m.cells[i][j];
        if (row != 985) return false;
    }

    const std::size_t ltb = m.index("LTB");
    std::uint64_t row = 0;
    for (std::size_t j = 0; j < 7; ++j) row += m.cells[ltb][j];
    const double recall =
        static_cast<double>(m.cells[ltb][ltb]) / static_cast<double>(row);
    if (!near(recall, 947.0 / 985.0, 1e-9)) return false;
    if (recall <= 0.96) return false;

    const double f1 = macro_f1(m);
    return f1 >= 0.71 && f1 <= 0.73;
}

// --- criterion 4: optional CLI-2019 reproduction --------------------------

std::filesystem::path find_cli2019() {
    if (const char* env = std::getenv("CLI2019_DIR")) return env;
    return std::filesystem::path(CULI_SOURCE_DIR) / "data" / "cli2019";
}

bool load_cli2019(const std::filesystem::path& dir, LabeledCorpus& train_set,
                  LabeledCorpus& dev, LabeledCorpus& test) {
    const auto tr = dir / "train.tsv";
    const auto dv = dir / "dev.tsv";
    const auto te = dir / "test.tsv";
    if (!std::filesystem::exists(tr) || !std::filesystem::exists(dv) ||
        !std::filesystem::exists(te))
        return false;
    train_set = load_labeled(tr);
    dev = load_labeled(dv);
    test = load_labeled(te);
    return true;
}

void criterion4() {
    const auto dir = find_cli2019();
    LabeledCorpus train_set, dev, test;
    try {
        if (!load_cli2019(dir, train_set, dev, test)) {
            report_skip(4, "CLI-2019 reproduction",
                        "dataset not found at " + dir.string());
            return;
        }
    } catch (const Error& e) {
        report(4, std::string("CLI-2019 reproduction (load failed: ") +
                      e.what() + ")",
               false);
        return;
    }

    bool ok = true;
    std::ostringstream detail;
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    {
        MethodConfig config;
        config.method = Method::product;
        config.range = {1, 4, false};
        config.penalty = 2.0;
        const auto dev_models = train(train_set, config.range);
        const double dev_f1 = evaluate(dev_models, dev, config, threads).macro_f1;
        const auto test_models = finalize(train_set, dev, config);
        const double test_f1 =
            evaluate(test_models, test, config, threads).macro_f1;
        detail << "product dev " << dev_f1 << " test " << test_f1;
        ok = ok && near(dev_f1, 0.7263, 0.02) && near(test_f1, 0.7206, 0.02);
    }
    {
        MethodConfig config;
        config.method = Method::heli;
        config.range = {1, 3, true};
        config.penalty = 1.1;
        const auto models = finalize(train_set, dev, config);
        const double f1 = evaluate(models, test, config, threads).macro_f1;
        detail << "; heli test " << f1;
        ok = ok && near(f1, 0.7061, 0.03);
    }
    {
        MethodConfig config;
        config.method = Method::simple;
        config.range = {1, 10, false};
        const auto models = finalize(train_set, dev, config);
        const double f1 = evaluate(models, test, config, threads).macro_f1;
        detail << "; simple test " << f1;
        ok = ok && near(f1, 0.6554, 0.03);
    }
    {
        MethodConfig config;
        config.method = Method::sum;
        config.range = {3, 15, false};
        const auto models = finalize(train_set, dev, config);
        const double f1 = evaluate(models, test, config, threads).macro_f1;
        detail << "; sum test " << f1;
        ok = ok && near(f1, 0.6016, 0.03);
    }
    report(4, "CLI-2019 reproduction (" + detail.str() + ")", ok);
}

// --- criterion 5: pipeline property suites --------------------------------

bool criterion5() {
    std::mt19937 rng(505);
    for (int it = 0; it < 1000; ++it) {
        LabeledCorpus corpus;
        const int n_labels = 1 + rng() % 3;
        for (int l = 0; l < n_labels; ++l) {
            const int n = 4 + rng() % 40;
            for (int i = 0; i < n; ++i) {
                std::u32string signs;
                const int len = 1 + rng() % 6;
                for (int k = 0; k < len; ++k) signs.push_back(U'a' + rng() % 4);
                corpus.push({signs}, std::string(1, char('A' + l)));
            }
        }

        // split proportions and partition, both modes
        for (int mode = 0; mode < 2; ++mode) {
            const SplitSpec spec = mode == 0 ? split_out_of_domain(corpus)
                                             : split_in_domain(corpus);
            std::vector<std::size_t> all;
            all.insert(all.end(), spec.train.begin(), spec.train.end());
            all.insert(all.end(), spec.dev.begin(), spec.dev.end());
            all.insert(all.end(), spec.test.begin(), spec.test.end());
            std::sort(all.begin(), all.end());
            if (all.size() != corpus.size()) return false;
            for (std::size_t i = 0; i < all.size(); ++i)
                if (all[i] != i) return false;
            // per-label 50/25/25 within rounding
            for (const auto& label : corpus.label_set) {
                std::size_t n = 0;
                for (const auto& e : corpus.entries)
                    if (e.label == label) ++n;
                auto count_in = [&](const std::vector<std::size_t>& idx) {
                    std::size_t c = 0;
                    for (std::size_t i : idx)
                        if (corpus.entries[i].label == label) ++c;
                    return c;
                };
                const std::size_t tr = count_in(spec.train);
                const std::size_t dv = count_in(spec.dev);
                const std::size_t te = count_in(spec.test);
                // expected sizes by independent index arithmetic
                std::size_t etr = 0, edv = 0, ete = 0;
                auto halve = [&](std::size_t b) {
                    const std::size_t t = (b + 1) / 2;
                    const std::size_t d = (b - t + 1) / 2;
                    etr += t;
                    edv += d;
                    ete += b - t - d;
                };
                if (mode == 0) {
                    halve(n);
                } else {
                    std::size_t left = n;
                    while (left >= 20) {
                        etr += 10;
                        edv += 5;
                        ete += 5;
                        left -= 20;
                    }
                    if (left > 0) halve(left);
                }
                if (tr != etr || dv != edv || te != ete) return false;
            }
        }

        // dedup / filter idempotence
        const auto d1 = dedup(corpus);
        if (dedup(d1).entries != d1.entries) return false;
        if (d1.size() > corpus.size()) return false;
        const auto f1 = filter_min_length(corpus, 3);
        if (filter_min_length(f1, 3).entries != f1.entries) return false;

        // balance determinism
        std::size_t smallest = corpus.size();
        for (const auto& label : corpus.label_set) {
            std::size_t n = 0;
            for (const auto& e : corpus.entries)
                if (e.label == label) ++n;
            smallest = std::min(smallest, n);
        }
        const std::uint64_t seed = rng();
        const auto s1 = balance_sample(corpus, smallest, seed);
        const auto s2 = balance_sample(corpus, smallest, seed);
        if (s1.entries != s2.entries) return false;

        // model round-trip and per-order normalization
        const auto set = train(corpus, {1, 3, it % 2 == 0});
        if (models_from_json(models_to_json(set)) != set) return false;
        for (const auto& m : set.models) {
            for (std::size_t slot = 0; slot < m.tables.size(); ++slot) {
                if (m.totals[slot] == 0) continue;
                double sum = 0;
                for (const auto& [gram, count] : m.tables[slot])
                    sum += static_cast<double>(count) /
                           static_cast<double>(m.totals[slot]);
                if (!near(sum, 1.0, 1e-12)) return false;
            }
        }
    }
    return true;
}

// --- criterion 6: converter golden files ----------------------------------

bool criterion6() {
    const std::filesystem::path data = CULI_TEST_DATA_DIR;
    const auto signs = load_sign_list(data / "sign_list_50.tsv");
    if (signs.size() != 50) return false;

    std::ifstream in(data / "convert_input.atf", std::ios::binary);
    std::ifstream golden(data / "convert_golden.txt", std::ios::binary);
    if (!in || !golden) return false;
    std::string line, expected;
    while (std::getline(in, line)) {
        if (!std::getline(golden, expected)) return false;
        const auto result =
            to_cuneiform(tokenize_atf(line), signs, ConvertMode::strict);
        if (utf8::encode(result.line.signs) != expected) return false;
    }
    if (std::getline(golden, expected)) return false;

    // parenthesis stripping maps through the base reading
    const auto one = to_cuneiform(tokenize_atf("du₃(KAK)"), signs,
                                  ConvertMode::strict);
    if (one.line.signs != *signs.lookup("du₃")) return false;

    // 'x' elision
    const auto elided =
        to_cuneiform(tokenize_atf("an x an"), signs, ConvertMode::strict);
    if (elided.line.length() != 2) return false;

    // strict mode fails loudly on unknown readings
    try {
        to_cuneiform(tokenize_atf("an zzz"), signs, ConvertMode::strict);
        return false;
    } catch (const UnknownReading& e) {
        if (e.token != "zzz" || e.position != 1) return false;
    }
    return true;
}

// --- criterion 7: determinism ---------------------------------------------

bool criterion7() {
    std::mt19937 rng(707);
    LabeledCorpus corpus;
    for (int i = 0; i < 120; ++i) {
        std::u32string signs;
        for (int k = 0; k < 2 + int(rng() % 6); ++k)
            signs.push_back(U'a' + rng() % 4);
        corpus.push({signs}, i % 3 == 0 ? "A" : (i % 3 == 1 ? "B" : "C"));
    }
    const auto models = train(corpus, {1, 3, false});
    MethodConfig config;
    config.method = Method::product;
    config.range = {1, 3, false};

    std::string first_eval, first_ids;
    for (int run = 0; run < 5; ++run) {
        const auto report = evaluate(models, corpus, config, run == 0 ? 1 : 4);
        const std::string eval_bytes = report_to_json(report).dump();
        std::string ids;
        for (const Label& l : classify_all(models, corpus, config, 1 + run % 4))
            ids += l + "\n";
        if (run == 0) {
            first_eval = eval_bytes;
            first_ids = ids;
        } else if (eval_bytes != first_eval || ids != first_ids) {
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    const auto started = std::chrono::steady_clock::now();
    report(1, "small-instance oracle equivalence", criterion1());
    const auto after1 = std::chrono::steady_clock::now();
    if (after1 - started > std::chrono::minutes(1)) {
        std::cout << "FAIL criterion 1: runtime exceeded 1 minute\n";
        ++failures;
    }
    report(2, "HeLI spot checks", criterion2());
    report(3, "macro F1 on the published confusion matrix", criterion3());
    criterion4();
    report(5, "pipeline property suites (1000 corpora)", criterion5());
    report(6, "converter golden outputs", criterion6());
    report(7, "determinism across runs and thread counts", criterion7());
    return failures == 0 ? 0 : 1;
}
