#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace culi {

// Base class for all data errors raised by the library. CLI maps these to
// exit code 1; usage problems are handled before any of these can fire.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- corpus ---

class MissingLabel : public Error {
public:
    std::size_t line_no;
    explicit MissingLabel(std::size_t line)
        : Error("missing label on line " + std::to_string(line)), line_no(line) {}
};

class MalformedUtf8 : public Error {
public:
    std::size_t line_no;
    std::size_t byte_offset;
    MalformedUtf8(std::size_t line, std::size_t offset)
        : Error("malformed UTF-8 on line " + std::to_string(line) + " at byte " +
                std::to_string(offset)),
          line_no(line), byte_offset(offset) {}
};

class LabelTooSmall : public Error {
public:
    std::string label;
    explicit LabelTooSmall(std::string lbl)
        : Error("label '" + lbl + "' has fewer than 4 lines; cannot split"),
          label(std::move(lbl)) {}
};

class InsufficientLines : public Error {
public:
    std::string label;
    std::size_t have;
    std::size_t need;
    InsufficientLines(std::string lbl, std::size_t h, std::size_t n)
        : Error("label '" + lbl + "' has " + std::to_string(h) + " lines, need " +
                std::to_string(n)),
          label(std::move(lbl)), have(h), need(n) {}
};

// --- signmap ---

class DuplicateReading : public Error {
public:
    std::string reading;
    std::size_t line_no;
    DuplicateReading(std::string r, std::size_t line)
        : Error("duplicate reading '" + r + "' on line " + std::to_string(line)),
          reading(std::move(r)), line_no(line) {}
};

class NonCuneiformCodepoint : public Error {
public:
    std::string reading;
    std::size_t line_no;
    NonCuneiformCodepoint(std::string r, std::size_t line)
        : Error("reading '" + r + "' on line " + std::to_string(line) +
                " maps outside the cuneiform blocks"),
          reading(std::move(r)), line_no(line) {}
};

class UnbalancedParenthesis : public Error {
public:
    std::string token;
    explicit UnbalancedParenthesis(std::string t)
        : Error("unbalanced parenthesis in token '" + t + "'"), token(std::move(t)) {}
};

class UnknownReading : public Error {
public:
    std::string token;
    std::size_t position;
    UnknownReading(std::string t, std::size_t pos)
        : Error("unknown reading '" + t + "' at token " + std::to_string(pos)),
          token(std::move(t)), position(pos) {}
};

// --- models ---

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("cannot train on an empty corpus") {}
};

class OrderOutOfRange : public Error {
public:
    int order;
    explicit OrderOutOfRange(int n)
        : Error("n-gram order " + std::to_string(n) + " outside the model range"),
          order(n) {}
};

class FormatVersionMismatch : public Error {
public:
    int found;
    explicit FormatVersionMismatch(int v)
        : Error("model file format version " + std::to_string(v) +
                " is newer than this build supports"),
          found(v) {}
};

class CorruptTable : public Error {
public:
    int order;
    std::string language;
    CorruptTable(int n, std::string lang)
        : Error("corrupt table of order " + std::to_string(n) + " for language '" +
                lang + "'"),
          order(n), language(std::move(lang)) {}
};

// --- classify / eval ---

class RangeMismatch : public Error {
public:
    explicit RangeMismatch(const std::string& detail)
        : Error("requested n-gram range incompatible with model: " + detail) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t gold, std::size_t pred)
        : Error("gold/pred length mismatch: " + std::to_string(gold) + " vs " +
                std::to_string(pred)) {}
};

class UnknownPredictedLabel : public Error {
public:
    std::string label;
    explicit UnknownPredictedLabel(std::string lbl)
        : Error("predicted label '" + lbl + "' not in the gold label set"),
          label(std::move(lbl)) {}
};

class UnknownLabel : public Error {
public:
    std::string label;
    explicit UnknownLabel(std::string lbl)
        : Error("data label '" + lbl + "' not present in the model set"),
          label(std::move(lbl)) {}
};

class EmptyEvaluationSet : public Error {
public:
    EmptyEvaluationSet() : Error("evaluation set is empty") {}
};

}  // namespace culi
