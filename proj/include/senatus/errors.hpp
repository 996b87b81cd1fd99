// errors.hpp - library error types
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace senatus {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Source text could not be parsed. Carries a 1-based location.
class ParseError : public Error {
public:
    ParseError(std::string msg, std::size_t line, std::size_t column)
        : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnsupportedLanguage : public Error {
public:
    explicit UnsupportedLanguage(const std::string& lang)
        : Error("unsupported language: " + lang) {}
};

class EmptySelection : public Error {
public:
    EmptySelection() : Error("feature selection produced an empty set") {}
};

class EmptyFeatureSet : public Error {
public:
    EmptyFeatureSet() : Error("feature set is empty") {}
};

class OversizeInput : public Error {
public:
    OversizeInput(std::size_t size, std::size_t maxlength)
        : Error("feature set of size " + std::to_string(size) +
                " exceeds padding target " + std::to_string(maxlength)) {}
};

class EmptyQuery : public Error {
public:
    EmptyQuery() : Error("query has no features") {}
};

class BothEmpty : public Error {
public:
    BothEmpty() : Error("both feature sets are empty") {}
};

class VersionMismatch : public Error {
public:
    explicit VersionMismatch(const std::string& msg) : Error(msg) {}
};

class CorruptIndex : public Error {
public:
    explicit CorruptIndex(const std::string& msg) : Error(msg) {}
};

class MissingComponent : public Error {
public:
    explicit MissingComponent(const std::string& msg) : Error(msg) {}
};

class EmptyGroundtruth : public Error {
public:
    EmptyGroundtruth() : Error("groundtruth has no usable clusters") {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace senatus
