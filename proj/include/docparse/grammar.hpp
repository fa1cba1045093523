#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "docparse/doc_model.hpp"
#include "docparse/errors.hpp"

namespace docparse {

// One lexical unit of the tagged output format. Coordinate tags are accepted
// in both surface forms -- grid integers (<x_118>) and normalized decimals
// (<x_0.1152>) -- and normalize to a grid index. Concatenating the surfaces
// of a token list reproduces the input byte for byte.
struct OutputToken {
    enum class Kind { CoordX, CoordY, ClassTag, TextRun };

    Kind kind = Kind::TextRun;
    int coord = 0;            // grid index, for CoordX/CoordY
    std::string payload;      // class name for ClassTag, bytes for TextRun
    std::string surface;      // exact input bytes this token covers
    std::size_t begin = 0;    // byte span in the input
    std::size_t end = 0;

    bool operator==(const OutputToken& o) const {
        return kind == o.kind && coord == o.coord && payload == o.payload;
    }
};

struct ParseOptions {
    // Lenient mode never errors: malformed tags become text, grammar
    // violations flush the partial block as text-only and resync at the
    // next <x_...> tag, and prompt-forbidden fields are dropped. Everything
    // recovered is reported through diagnostics.
    bool lenient = false;
    // Clamp out-of-range coordinates to the grid instead of erroring.
    bool clip = false;
};

// Incremental tokenizer. Chunks may split tags anywhere; bytes that might
// still turn into a tag are withheld until resolved or finish().
class OutputLexer {
public:
    explicit OutputLexer(ParseOptions opts = {});

    // Set on the first strict-mode lexing failure; the lexer is then done.
    struct Failure {
        bool failed = false;
        bool range = false;  // out-of-range coordinate rather than bad syntax
        std::size_t offset = 0;
        std::string message;
    };

    Failure feed(std::string_view chunk, std::vector<OutputToken>& out);
    Failure finish(std::vector<OutputToken>& out);

    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    Failure scan(bool at_end, std::vector<OutputToken>& out);

    ParseOptions opts_;
    std::string carry_;
    std::size_t base_ = 0;  // global byte offset of carry_[0]
    bool done_ = false;
    std::vector<Diagnostic> diagnostics_;
};

// Strict batch tokenizer; throws LexError/RangeError with byte offsets.
std::vector<OutputToken> tokenize(std::string_view raw);

struct TokenizeResult {
    std::vector<OutputToken> tokens;
    std::vector<Diagnostic> diagnostics;
};
TokenizeResult tokenize(std::string_view raw, const ParseOptions& opts);

// Events produced by the streaming parser.
struct StreamEvent {
    enum class Kind { BlockComplete, Error };
    enum class ErrorCategory { Lex, Range, Grammar, Contract };

    Kind kind = Kind::BlockComplete;
    Block block;                                        // BlockComplete
    ErrorCategory category = ErrorCategory::Grammar;    // Error
    std::size_t offset = 0;                             // Error
    std::string message;                                // Error
};

// Incremental parser over the block grammar
//   openX openY text closeX closeY [class]
// Feeding any chunking of an input yields the same block events as a single
// batch parse. In strict mode the first violation emits an Error event and
// the state turns terminal; in lenient mode recovery continues and
// diagnostics accumulate. Box-free prompts take the raw stream as text and
// split it into paragraph blocks at finish().
class StreamParser {
public:
    enum class State {
        ExpectOpenX,
        ExpectOpenY,
        InText,
        ExpectCloseY,
        ExpectClassOrNext,
        Recovering,  // lenient-only resync state
    };

    explicit StreamParser(PromptConfig prompt, ParseOptions opts = {});

    std::vector<StreamEvent> feed(std::string_view chunk);
    std::vector<StreamEvent> finish();

    State state() const { return state_; }
    std::size_t emitted_blocks() const { return emitted_; }
    bool failed() const { return failed_; }
    // Lenient-mode notes, including everything the lexer demoted to text.
    std::vector<Diagnostic> diagnostics() const;

private:
    struct Partial {
        int gx0 = 0, gy0 = 0, gx1 = 0, gy1 = 0;
        std::string text;
    };

    std::size_t end_offset() const { return total_fed_; }
    void consume(const OutputToken& tok, std::vector<StreamEvent>& events);
    void violation(const OutputToken& tok, StreamEvent::ErrorCategory cat,
                   const std::string& msg, std::vector<StreamEvent>& events);
    void emit_pending(std::vector<StreamEvent>& events);
    void flush_recovery(std::vector<StreamEvent>& events);
    void fail(StreamEvent::ErrorCategory cat, std::size_t offset,
              const std::string& msg, std::vector<StreamEvent>& events);

    PromptConfig prompt_;
    ParseOptions opts_;
    OutputLexer lexer_;
    State state_ = State::ExpectOpenX;
    Partial partial_;
    std::optional<SemanticClass> pending_class_;
    std::string recovery_text_;
    std::string plain_text_;  // box-free prompts accumulate raw text here
    std::size_t total_fed_ = 0;
    std::size_t emitted_ = 0;
    bool failed_ = false;
    bool finished_ = false;
    std::vector<Diagnostic> diagnostics_;
};

// Batch parse. The strict form throws LexError/RangeError/GrammarError/
// ContractError with byte offsets; with opts.lenient the options form is
// total and reports recoveries as diagnostics instead.
Document parse_output(std::string_view raw, const PromptConfig& prompt);

struct ParseResult {
    Document doc;
    std::vector<Diagnostic> diagnostics;
};
ParseResult parse_output(std::string_view raw, const PromptConfig& prompt,
                         const ParseOptions& opts);

// Canonical surface form: 4-decimal normalized coordinates and known class
// spellings; box-free documents join block texts with a blank line.
// parse_output(serialize(d), d.prompt) == d for every valid d. Throws
// ContractError if the document violates its invariants.
std::string serialize(const Document& doc);

// Best-effort serialization for documents out of lenient parses: blocks
// missing a required bbox emit their bare text, prompt-forbidden fields are
// dropped. Never throws on field mismatches.
std::string serialize_lenient(const Document& doc);

}  // namespace docparse
