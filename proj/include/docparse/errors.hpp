#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace docparse {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value fell outside its admissible range (coordinates, grid indices).
class RangeError : public Error {
public:
    using Error::Error;
};

// A data structure violates one of its invariants, or a field is present
// that the document's prompt configuration forbids.
class ContractError : public Error {
public:
    using Error::Error;
};

// Malformed tag while lexing raw model output. Carries the byte offset.
class LexError : public Error {
public:
    LexError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// Token sequence violates the block grammar. Carries the byte offset.
class GrammarError : public Error {
public:
    GrammarError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// Prompt token string is not one token from each prompt family.
class MalformedPromptError : public Error {
public:
    using Error::Error;
};

// Prompt tokens are well-formed but name an excluded combination.
class InvalidCombinationError : public Error {
public:
    using Error::Error;
};

// Table source could not be parsed. Carries the byte offset.
class TableParseError : public Error {
public:
    TableParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (byte " + std::to_string(offset) + ")"), offset(offset) {}
    std::size_t offset;
};

// File or serialized-format problem outside the output grammar itself.
class IoError : public Error {
public:
    using Error::Error;
};

// Non-fatal note produced by lenient parsing.
struct Diagnostic {
    std::size_t offset = 0;
    std::string message;
};

}  // namespace docparse
