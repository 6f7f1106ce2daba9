// culi - cuneiform language identification toolkit.
//
// Subcommands: convert, split, train, identify, evaluate, tune.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "culi/classify.hpp"
#include "culi/corpus.hpp"
#include "culi/eval.hpp"
#include "culi/models.hpp"
#include "culi/signmap.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "L-H" or "L-H+lines"
culi::NGramRange parse_range(const std::string& text) {
    culi::NGramRange range;
    std::string body = text;
    const std::string suffix = "+lines";
    if (body.size() > suffix.size() &&
        body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0) {
        range.include_whole_line = true;
        body.resize(body.size() - suffix.size());
    }
    const auto dash = body.find('-');
    try {
        if (dash == std::string::npos) {
            range.low = range.high = std::stoi(body);
        } else {
            range.low = std::stoi(body.substr(0, dash));
            range.high = std::stoi(body.substr(dash + 1));
        }
    } catch (const std::exception&) {
        throw UsageError("invalid range '" + text + "', expected L-H[+lines]");
    }
    if (range.low < 1 || range.low > range.high || range.high > culi::kMaxOrder)
        throw UsageError("invalid range '" + text + "'");
    return range;
}

culi::Method parse_method(const std::string& name) {
    if (name == "simple") return culi::Method::simple;
    if (name == "sum") return culi::Method::sum;
    if (name == "product") return culi::Method::product;
    if (name == "heli") return culi::Method::heli;
    if (name == "ensemble") return culi::Method::ensemble;
    throw UsageError("unknown method '" + name + "'");
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw culi::Error("cannot write " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

void print_report(const culi::EvalReport& report, std::ostream& out) {
    out << "label      precision  recall     f1\n";
    char buf[128];
    for (const auto& [label, m] : report.per_class) {
        std::snprintf(buf, sizeof buf, "%-10s %-10.4f %-10.4f %-10.4f\n",
                      label.c_str(), m.precision, m.recall, m.f1);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "macro F1: %.4f\n", report.macro_f1);
    out << buf;
}

int run_convert(const std::string& signs_path, bool lenient) {
    const culi::SignList signs = culi::load_sign_list(signs_path);
    const auto mode =
        lenient ? culi::ConvertMode::lenient : culi::ConvertMode::strict;
    std::string line;
    std::size_t dropped = 0, line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            const auto result =
                culi::to_cuneiform(culi::tokenize_atf(line), signs, mode);
            dropped += result.dropped;
            std::cout << culi::utf8::encode(result.line.signs) << '\n';
        } catch (const culi::Error& e) {
            std::cerr << "line " << line_no << ": " << e.what() << '\n';
            return 1;
        }
    }
    if (dropped > 0)
        std::cerr << "dropped " << dropped << " unknown reading(s)\n";
    return 0;
}

int run_split(const std::string& in_path, const std::string& mode,
              const std::string& out_stem, std::uint64_t balance,
              bool balance_auto, std::uint64_t seed, bool do_dedup,
              std::optional<std::size_t> min_len) {
    const culi::LabeledCorpus corpus = culi::load_labeled(in_path);
    const culi::SplitSpec spec = mode == "in-domain"
                                     ? culi::split_in_domain(corpus)
                                     : culi::split_out_of_domain(corpus);
    const culi::LabeledCorpus train = culi::subset(corpus, spec.train);

    // dedup / length filter / balancing apply to the dev and test portions;
    // the training half stays as drawn from the file order
    auto prepare = [&](const std::vector<std::size_t>& idx, std::uint64_t salt) {
        culi::LabeledCorpus part = culi::subset(corpus, idx);
        if (do_dedup) part = culi::dedup(part);
        if (min_len) part = culi::filter_min_length(part, *min_len);
        if (balance_auto || balance > 0) {
            std::size_t per_label = balance;
            if (balance_auto) {
                per_label = part.size();
                for (const auto& label : part.label_set) {
                    std::size_t have = 0;
                    for (const auto& e : part.entries)
                        if (e.label == label) ++have;
                    per_label = std::min(per_label, have);
                }
            }
            part = culi::balance_sample(part, per_label, seed + salt);
        }
        return part;
    };
    const culi::LabeledCorpus dev = prepare(spec.dev, 1);
    const culi::LabeledCorpus test = prepare(spec.test, 2);

    write_atomic(out_stem + ".train.tsv", culi::serialize(train));
    write_atomic(out_stem + ".dev.tsv", culi::serialize(dev));
    write_atomic(out_stem + ".test.tsv", culi::serialize(test));
    std::cerr << "train " << train.size() << " / dev " << dev.size()
              << " / test " << test.size() << " lines\n";
    return 0;
}

int run_train(const std::string& in_path, const std::string& range_text,
              const std::string& out_path, std::uint64_t min_count) {
    const culi::NGramRange range = parse_range(range_text);
    const culi::LabeledCorpus corpus = culi::load_labeled(in_path);
    const culi::ModelSet models = culi::train(corpus, range, min_count);
    culi::save_models(models, out_path);
    return 0;
}

culi::MethodConfig make_config(const std::string& method_name,
                               const std::optional<std::string>& range_text,
                               double penalty, const culi::ModelSet& models) {
    culi::MethodConfig config;
    config.method = parse_method(method_name);
    config.range = range_text ? parse_range(*range_text) : models.range;
    config.penalty = penalty;
    if (config.method == culi::Method::ensemble) {
        // sub-ranges clamped to what the model was trained with
        auto clamp = [&](culi::NGramRange r) {
            r.low = std::max(r.low, models.range.low);
            r.high = std::min(r.high, models.range.high);
            if (r.low > r.high) r = {models.range.low, models.range.high, false};
            return r;
        };
        config.ensemble.simple_range = clamp(config.ensemble.simple_range);
        config.ensemble.sum_range = clamp(config.ensemble.sum_range);
        config.ensemble.product_range = clamp(config.ensemble.product_range);
    }
    return config;
}

int run_identify(const std::string& model_path, const std::string& method_name,
                 const std::optional<std::string>& range_text, double penalty) {
    const culi::ModelSet models = culi::load_models(model_path);
    const culi::MethodConfig config =
        make_config(method_name, range_text, penalty, models);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const culi::CuneiformLine norm = culi::normalize_line({line, line_no});
        std::cout << culi::classify_line(norm, models, config) << '\n';
    }
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& test_path,
                 const std::string& method_name,
                 const std::optional<std::string>& range_text, double penalty,
                 const std::optional<std::string>& report_path,
                 unsigned threads) {
    const culi::ModelSet models = culi::load_models(model_path);
    const culi::LabeledCorpus test = culi::load_labeled(test_path);
    const culi::MethodConfig config =
        make_config(method_name, range_text, penalty, models);
    const culi::EvalReport report = culi::evaluate(models, test, config, threads);
    print_report(report, std::cout);
    if (report_path)
        write_atomic(*report_path, culi::report_to_json(report).dump(2) + "\n");
    return 0;
}

int run_tune(const std::string& train_path, const std::string& dev_path,
             const std::string& method_name, int max_order,
             const std::optional<std::string>& report_path, unsigned threads) {
    const culi::Method method = parse_method(method_name);
    const culi::LabeledCorpus train_data = culi::load_labeled(train_path);
    const culi::LabeledCorpus dev = culi::load_labeled(dev_path);

    if (method == culi::Method::ensemble) {
        // tune each voting member independently, then report the ensemble
        culi::EnsembleConfig ens;
        auto tune_member = [&](culi::Method m) {
            return culi::grid_search(train_data, dev, m,
                                     culi::GridSpec::defaults(m, max_order),
                                     threads);
        };
        const auto simple = tune_member(culi::Method::simple);
        const auto sum = tune_member(culi::Method::sum);
        const auto product = tune_member(culi::Method::product);
        ens.simple_range = simple.best.range;
        ens.sum_range = sum.best.range;
        ens.product_range = product.best.range;
        ens.product_penalty = product.best.penalty;

        culi::MethodConfig config;
        config.method = culi::Method::ensemble;
        config.range = {1, max_order, false};
        config.ensemble = ens;
        const culi::ModelSet models =
            culi::train(train_data, {1, max_order, false});
        const culi::EvalReport report =
            culi::evaluate(models, dev, config, threads);
        std::cout << "ensemble of simple " << ens.simple_range.low << "-"
                  << ens.simple_range.high << ", sum " << ens.sum_range.low
                  << "-" << ens.sum_range.high << ", product "
                  << ens.product_range.low << "-" << ens.product_range.high
                  << " penalty " << ens.product_penalty << "\n";
        print_report(report, std::cout);
        if (report_path)
            write_atomic(*report_path,
                         culi::report_to_json(report).dump(2) + "\n");
        return 0;
    }

    const culi::GridResult result = culi::grid_search(
        train_data, dev, method, culi::GridSpec::defaults(method, max_order),
        threads);
    std::cout << "best range " << result.best.range.low << "-"
              << result.best.range.high
              << (result.best.range.include_whole_line ? "+lines" : "");
    if (method == culi::Method::product || method == culi::Method::heli)
        std::cout << " penalty " << result.best.penalty;
    std::cout << "\n";
    print_report(result.report, std::cout);
    if (report_path)
        write_atomic(*report_path,
                     culi::report_to_json(result.report).dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cuneiform language identification toolkit"};
    app.require_subcommand(1);

    // convert
    auto* convert = app.add_subcommand(
        "convert", "transliteration on stdin -> cuneiform on stdout");
    std::string signs_path;
    convert->add_option("--signs", signs_path, "sign list file")->required();
    bool lenient = false;
    bool strict = false;
    convert->add_flag("--lenient", lenient, "drop unknown readings");
    convert->add_flag("--strict", strict, "fail on unknown readings (default)");

    // split
    auto* split = app.add_subcommand("split", "partition a labeled corpus");
    std::string split_in, split_mode, split_out;
    std::uint64_t balance = 0, seed = 0;
    bool balance_auto = false, do_dedup = false;
    std::optional<std::size_t> min_len;
    split->add_option("--in", split_in, "labeled TSV")->required();
    split->add_option("--mode", split_mode)
        ->check(CLI::IsMember({"in-domain", "out-of-domain"}))
        ->required();
    split->add_option("--out", split_out, "output stem")->required();
    split->add_option("--balance", balance,
                      "lines per label in dev/test (0 = smallest class)");
    split->add_flag("--balance-auto", balance_auto,
                    "balance dev/test to the smallest class");
    split->add_option("--seed", seed, "sampling seed")->default_val(0);
    split->add_flag("--dedup", do_dedup, "deduplicate dev/test");
    split->add_option("--min-len", min_len, "minimum signs per dev/test line");

    // train
    auto* train_cmd = app.add_subcommand("train", "train n-gram models");
    std::string train_in, train_range = "1-3", train_out;
    std::uint64_t min_count = 1;
    train_cmd->add_option("--in", train_in, "labeled TSV")->required();
    train_cmd->add_option("--range", train_range, "n-gram range L-H[+lines]");
    train_cmd->add_option("--out", train_out, "model JSON path")->required();
    train_cmd->add_option("--min-count", min_count, "frequency cutoff");

    // identify
    auto* identify = app.add_subcommand(
        "identify", "lines on stdin -> one label per line on stdout");
    std::string id_model, id_method = "product";
    std::optional<std::string> id_range;
    double id_penalty = 2.0;
    identify->add_option("--model", id_model, "model JSON")->required();
    identify->add_option("--method", id_method)
        ->check(CLI::IsMember({"simple", "sum", "product", "heli", "ensemble"}));
    identify->add_option("--range", id_range, "n-gram range (default: model's)");
    identify->add_option("--penalty", id_penalty, "smoothing / penalty value");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score a labeled test set");
    std::string ev_model, ev_test, ev_method = "product";
    std::optional<std::string> ev_range, ev_report;
    double ev_penalty = 2.0;
    unsigned ev_threads = 1;
    evaluate->add_option("--model", ev_model)->required();
    evaluate->add_option("--test", ev_test, "labeled TSV")->required();
    evaluate->add_option("--method", ev_method)
        ->check(CLI::IsMember({"simple", "sum", "product", "heli", "ensemble"}));
    evaluate->add_option("--range", ev_range);
    evaluate->add_option("--penalty", ev_penalty);
    evaluate->add_option("--report", ev_report, "JSON report path");
    evaluate->add_option("--threads", ev_threads);

    // tune
    auto* tune = app.add_subcommand("tune", "grid search on a development set");
    std::string tu_train, tu_dev, tu_method = "product";
    int max_order = culi::kMaxOrder;
    std::optional<std::string> tu_report;
    unsigned tu_threads = 1;
    tune->add_option("--train", tu_train)->required();
    tune->add_option("--dev", tu_dev)->required();
    tune->add_option("--method", tu_method)
        ->check(CLI::IsMember({"simple", "sum", "product", "heli", "ensemble"}));
    tune->add_option("--max-order", max_order)->check(CLI::Range(1, culi::kMaxOrder));
    tune->add_option("--report", tu_report, "JSON report path");
    tune->add_option("--threads", tu_threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (convert->parsed()) {
            if (lenient && strict) {
                std::cerr << "--strict and --lenient are mutually exclusive\n";
                return 2;
            }
            return run_convert(signs_path, lenient);
        }
        if (split->parsed())
            return run_split(split_in, split_mode, split_out, balance,
                             balance_auto || (split->count("--balance") &&
                                              balance == 0),
                             seed, do_dedup, min_len);
        if (train_cmd->parsed())
            return run_train(train_in, train_range, train_out, min_count);
        if (identify->parsed())
            return run_identify(id_model, id_method, id_range, id_penalty);
        if (evaluate->parsed())
            return run_evaluate(ev_model, ev_test, ev_method, ev_range,
                                ev_penalty, ev_report, ev_threads);
        if (tune->parsed())
            return run_tune(tu_train, tu_dev, tu_method, max_order, tu_report,
                            tu_threads);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
