#include "docparse/grammar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace docparse {

namespace {

bool is_value_char(char c) { return (c >= '0' && c <= '9') || c == '.'; }

enum class TagScanStatus { NotATag, Incomplete, Malformed, RangeBad, Token };

struct TagScan {
    TagScanStatus status = TagScanStatus::NotATag;
    OutputToken token;
    std::size_t end = 0;  // local index one past '>'
    std::string message;
    bool clipped = false;
};

// Examines buf[lt..] (buf[lt] == '<'). at_end means no more bytes will come.
TagScan scan_tag(std::string_view buf, std::size_t lt, bool at_end, bool clip) {
    struct Cand {
        std::string_view prefix;
        OutputToken::Kind kind;
    };
    static constexpr Cand kCands[] = {
        {"<x_", OutputToken::Kind::CoordX},
        {"<y_", OutputToken::Kind::CoordY},
        {"<class_", OutputToken::Kind::ClassTag},
    };

    TagScan r;
    bool partial_prefix = false;
    for (const Cand& cand : kCands) {
        const std::size_t avail = buf.size() - lt;
        const std::size_t cmp = std::min(cand.prefix.size(), avail);
        if (buf.compare(lt, cmp, cand.prefix.substr(0, cmp)) != 0) continue;
        if (cmp < cand.prefix.size()) {
            partial_prefix = true;  // might complete with more input
            continue;
        }

        const std::size_t value_start = lt + cand.prefix.size();
        if (cand.kind == OutputToken::Kind::ClassTag) {
            const std::size_t gt = buf.find('>', value_start);
            if (gt == std::string_view::npos) {
                r.status = at_end ? TagScanStatus::Malformed : TagScanStatus::Incomplete;
                r.message = "unterminated class tag";
                return r;
            }
            if (gt == value_start) {
                r.status = TagScanStatus::Malformed;
                r.message = "empty class name";
                return r;
            }
            r.status = TagScanStatus::Token;
            r.token.kind = cand.kind;
            r.token.payload = std::string(buf.substr(value_start, gt - value_start));
            r.end = gt + 1;
            return r;
        }

        // Coordinate tag: digits with at most one dot, then '>'.
        std::size_t v = value_start;
        while (v < buf.size() && is_value_char(buf[v])) ++v;
        if (v == buf.size()) {
            r.status = at_end ? TagScanStatus::Malformed : TagScanStatus::Incomplete;
            r.message = "unterminated coordinate tag";
            return r;
        }
        if (buf[v] != '>') {
            r.status = TagScanStatus::Malformed;
            r.message = std::string("invalid character '") + buf[v] + "' in coordinate tag";
            return r;
        }
        const std::string_view value = buf.substr(value_start, v - value_start);
        const std::size_t dots = std::count(value.begin(), value.end(), '.');
        if (value.empty() || dots > 1 || value.size() == dots) {
            r.status = TagScanStatus::Malformed;
            r.message = "bad coordinate value \"" + std::string(value) + "\"";
            return r;
        }

        const Axis axis = cand.kind == OutputToken::Kind::CoordX ? Axis::X : Axis::Y;
        const int g = grid_size(axis);
        long long grid = 0;
        bool out_of_range = false;
        if (dots == 0) {
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), grid);
            if (ec == std::errc::result_out_of_range || grid > g) {
                out_of_range = true;
                grid = g + 1;
            }
        } else {
            double d = 0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
            if (ec == std::errc::result_out_of_range || d > 1.0) {
                out_of_range = true;
                grid = g + 1;
            } else {
                grid = std::llround(d * g);
            }
        }
        if (out_of_range) {
            if (!clip) {
                r.status = TagScanStatus::RangeBad;
                r.message = "coordinate value \"" + std::string(value) +
                            "\" outside the grid";
                return r;
            }
            grid = g;
            r.clipped = true;
            r.message = "coordinate value \"" + std::string(value) + "\" clipped to grid";
        }
        r.status = TagScanStatus::Token;
        r.token.kind = cand.kind;
        r.token.coord = static_cast<int>(grid);
        r.end = v + 1;
        return r;
    }

    r.status = (partial_prefix && !at_end) ? TagScanStatus::Incomplete
                                           : TagScanStatus::NotATag;
    return r;
}

void append_text_token(std::vector<OutputToken>& out, std::string_view bytes,
                       std::size_t begin) {
    if (bytes.empty()) return;
    OutputToken t;
    t.kind = OutputToken::Kind::TextRun;
    t.payload = std::string(bytes);
    t.surface = t.payload;
    t.begin = begin;
    t.end = begin + bytes.size();
    out.push_back(std::move(t));
}

}  // namespace

OutputLexer::OutputLexer(ParseOptions opts) : opts_(opts) {}

OutputLexer::Failure OutputLexer::feed(std::string_view chunk,
                                       std::vector<OutputToken>& out) {
    if (done_) return {};
    carry_.append(chunk);
    return scan(false, out);
}

OutputLexer::Failure OutputLexer::finish(std::vector<OutputToken>& out) {
    if (done_) return {};
    Failure f = scan(true, out);
    done_ = true;
    return f;
}

OutputLexer::Failure OutputLexer::scan(bool at_end, std::vector<OutputToken>& out) {
    const std::string_view buf(carry_);
    std::size_t pos = 0;
    std::size_t text_start = 0;
    std::size_t keep_from = buf.size();

    while (pos < buf.size()) {
        const std::size_t lt = buf.find('<', pos);
        if (lt == std::string_view::npos) break;

        TagScan scan = scan_tag(buf, lt, at_end, opts_.clip);
        if (scan.status == TagScanStatus::NotATag) {
            pos = lt + 1;
            continue;
        }
        if (scan.status == TagScanStatus::Incomplete) {
            keep_from = lt;
            break;
        }
        if (scan.status == TagScanStatus::Malformed ||
            scan.status == TagScanStatus::RangeBad) {
            if (!opts_.lenient) {
                done_ = true;
                return {true, scan.status == TagScanStatus::RangeBad,
                        base_ + lt, scan.message};
            }
            diagnostics_.push_back({base_ + lt, scan.message + "; kept as text"});
            pos = lt + 1;  // the '<' stays in the surrounding text
            continue;
        }
        // Token.
        append_text_token(out, buf.substr(text_start, lt - text_start),
                          base_ + text_start);
        if (scan.clipped) diagnostics_.push_back({base_ + lt, scan.message});
        scan.token.begin = base_ + lt;
        scan.token.end = base_ + scan.end;
        scan.token.surface = std::string(buf.substr(lt, scan.end - lt));
        out.push_back(std::move(scan.token));
        pos = scan.end;
        text_start = pos;
    }

    const std::size_t text_end = std::min(keep_from, buf.size());
    if (text_end > text_start)
        append_text_token(out, buf.substr(text_start, text_end - text_start),
                          base_ + text_start);
    carry_.erase(0, text_end);
    base_ += text_end;
    return {};
}

std::vector<OutputToken> tokenize(std::string_view raw) {
    TokenizeResult r = tokenize(raw, ParseOptions{});
    return std::move(r.tokens);
}

TokenizeResult tokenize(std::string_view raw, const ParseOptions& opts) {
    OutputLexer lexer(opts);
    TokenizeResult result;
    OutputLexer::Failure f = lexer.feed(raw, result.tokens);
    if (!f.failed) f = lexer.finish(result.tokens);
    if (f.failed) {
        if (f.range) throw RangeError(f.message + " (byte " + std::to_string(f.offset) + ")");
        throw LexError(f.message, f.offset);
    }
    // Coalesce adjacent text runs so TextRun tokens are maximal.
    std::vector<OutputToken> merged;
    for (OutputToken& t : result.tokens) {
        if (t.kind == OutputToken::Kind::TextRun && !merged.empty() &&
            merged.back().kind == OutputToken::Kind::TextRun) {
            merged.back().payload += t.payload;
            merged.back().surface += t.surface;
            merged.back().end = t.end;
        } else {
            merged.push_back(std::move(t));
        }
    }
    result.tokens = std::move(merged);
    result.diagnostics = lexer.diagnostics();
    return result;
}

StreamParser::StreamParser(PromptConfig prompt, ParseOptions opts)
    : prompt_(prompt), opts_(opts), lexer_(opts) {
    if (!prompt_.valid()) throw ContractError("invalid prompt configuration");
}

std::vector<Diagnostic> StreamParser::diagnostics() const {
    std::vector<Diagnostic> all = lexer_.diagnostics();
    all.insert(all.end(), diagnostics_.begin(), diagnostics_.end());
    std::stable_sort(all.begin(), all.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return a.offset < b.offset;
                     });
    return all;
}

std::vector<StreamEvent> StreamParser::feed(std::string_view chunk) {
    std::vector<StreamEvent> events;
    if (finished_ || failed_) return events;
    total_fed_ += chunk.size();
    if (!prompt_.boxes) {
        // Box-free output is plain text; blocks materialize at finish().
        plain_text_.append(chunk);
        return events;
    }
    std::vector<OutputToken> tokens;
    OutputLexer::Failure f = lexer_.feed(chunk, tokens);
    for (const OutputToken& t : tokens) {
        if (failed_) break;
        consume(t, events);
    }
    if (f.failed && !failed_)
        fail(f.range ? StreamEvent::ErrorCategory::Range
                     : StreamEvent::ErrorCategory::Lex,
             f.offset, f.message, events);
    return events;
}

std::vector<StreamEvent> StreamParser::finish() {
    std::vector<StreamEvent> events;
    if (finished_ || failed_) return events;
    finished_ = true;

    if (!prompt_.boxes) {
        // Paragraphs are separated by blank lines.
        const std::string_view text(plain_text_);
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t sep = text.find("\n\n", pos);
            if (sep == std::string_view::npos) sep = text.size();
            std::string_view seg = text.substr(pos, sep - pos);
            while (!seg.empty() && seg.front() == '\n') seg.remove_prefix(1);
            while (!seg.empty() && seg.back() == '\n') seg.remove_suffix(1);
            if (!seg.empty()) {
                Block b;
                b.text = std::string(seg);
                events.push_back({StreamEvent::Kind::BlockComplete, std::move(b),
                                  StreamEvent::ErrorCategory::Grammar, 0, {}});
                ++emitted_;
            }
            if (sep >= text.size()) break;
            pos = sep + 2;
        }
        return events;
    }

    std::vector<OutputToken> tokens;
    OutputLexer::Failure f = lexer_.finish(tokens);
    for (const OutputToken& t : tokens) {
        if (failed_) break;
        consume(t, events);
    }
    if (failed_) return events;
    if (f.failed) {
        fail(f.range ? StreamEvent::ErrorCategory::Range
                     : StreamEvent::ErrorCategory::Lex,
             f.offset, f.message, events);
        return events;
    }

    switch (state_) {
        case State::ExpectOpenX:
            break;
        case State::ExpectClassOrNext:
            emit_pending(events);
            break;
        case State::Recovering:
            flush_recovery(events);
            break;
        case State::ExpectOpenY:
        case State::InText:
        case State::ExpectCloseY:
            if (!opts_.lenient) {
                fail(StreamEvent::ErrorCategory::Grammar, end_offset(),
                     "unexpected end of input inside a block", events);
            } else {
                diagnostics_.push_back(
                    {end_offset(), "input ended inside a block; flushed as text"});
                recovery_text_ = std::move(partial_.text);
                flush_recovery(events);
            }
            break;
    }
    return events;
}

void StreamParser::fail(StreamEvent::ErrorCategory cat, std::size_t offset,
                        const std::string& msg, std::vector<StreamEvent>& events) {
    failed_ = true;
    StreamEvent e;
    e.kind = StreamEvent::Kind::Error;
    e.category = cat;
    e.offset = offset;
    e.message = msg;
    events.push_back(std::move(e));
}

void StreamParser::violation(const OutputToken& tok, StreamEvent::ErrorCategory cat,
                             const std::string& msg,
                             std::vector<StreamEvent>& events) {
    if (!opts_.lenient) {
        fail(cat, tok.begin, msg, events);
        return;
    }
    diagnostics_.push_back({tok.begin, msg + "; recovering"});
    recovery_text_ = std::move(partial_.text);
    partial_ = Partial{};
    state_ = State::Recovering;
    consume(tok, events);  // reprocess under recovery rules
}

void StreamParser::emit_pending(std::vector<StreamEvent>& events) {
    Block b;
    b.bbox = BBox{partial_.gx0, partial_.gy0, partial_.gx1, partial_.gy1};
    if (prompt_.text_mode != TextMode::NoText) b.text = std::move(partial_.text);
    b.cls = std::move(pending_class_);
    pending_class_.reset();
    partial_ = Partial{};
    StreamEvent e;
    e.kind = StreamEvent::Kind::BlockComplete;
    e.block = std::move(b);
    events.push_back(std::move(e));
    ++emitted_;
}

void StreamParser::flush_recovery(std::vector<StreamEvent>& events) {
    if (!recovery_text_.empty() && prompt_.text_mode != TextMode::NoText) {
        Block b;
        b.text = std::move(recovery_text_);
        StreamEvent e;
        e.kind = StreamEvent::Kind::BlockComplete;
        e.block = std::move(b);
        events.push_back(std::move(e));
        ++emitted_;
    }
    recovery_text_.clear();
}

void StreamParser::consume(const OutputToken& tok, std::vector<StreamEvent>& events) {
    using K = OutputToken::Kind;
    switch (state_) {
        case State::ExpectOpenX:
            if (tok.kind == K::CoordX) {
                partial_ = Partial{};
                partial_.gx0 = tok.coord;
                state_ = State::ExpectOpenY;
            } else {
                violation(tok, StreamEvent::ErrorCategory::Grammar,
                          "expected <x_...> to open a block", events);
            }
            break;

        case State::ExpectOpenY:
            if (tok.kind == K::CoordY) {
                partial_.gy0 = tok.coord;
                state_ = State::InText;
            } else {
                violation(tok, StreamEvent::ErrorCategory::Grammar,
                          "expected <y_...> after the opening <x_...>", events);
            }
            break;

        case State::InText:
            if (tok.kind == K::TextRun) {
                if (prompt_.text_mode == TextMode::NoText) {
                    if (!opts_.lenient) {
                        fail(StreamEvent::ErrorCategory::Contract, tok.begin,
                             "text content under <output_no_text>", events);
                    } else {
                        diagnostics_.push_back(
                            {tok.begin, "text content under <output_no_text>; dropped"});
                    }
                } else {
                    partial_.text += tok.payload;
                }
            } else if (tok.kind == K::CoordX) {
                partial_.gx1 = tok.coord;
                state_ = State::ExpectCloseY;
            } else {
                violation(tok, StreamEvent::ErrorCategory::Grammar,
                          "expected block text or the closing <x_...>", events);
            }
            break;

        case State::ExpectCloseY:
            if (tok.kind == K::CoordY) {
                if (partial_.gx0 > partial_.gx1 || partial_.gy0 > tok.coord) {
                    violation(tok, StreamEvent::ErrorCategory::Contract,
                              "bbox corners out of order", events);
                } else {
                    partial_.gy1 = tok.coord;
                    state_ = State::ExpectClassOrNext;
                }
            } else {
                violation(tok, StreamEvent::ErrorCategory::Grammar,
                          "expected the closing <y_...>", events);
            }
            break;

        case State::ExpectClassOrNext:
            if (tok.kind == K::ClassTag) {
                if (!prompt_.classes) {
                    if (!opts_.lenient) {
                        fail(StreamEvent::ErrorCategory::Contract, tok.begin,
                             "class tag under <no_classes>", events);
                    } else {
                        diagnostics_.push_back(
                            {tok.begin, "class tag under <no_classes>; dropped"});
                        emit_pending(events);
                        state_ = State::ExpectOpenX;
                    }
                } else {
                    pending_class_ = SemanticClass::from_name(tok.payload);
                    emit_pending(events);
                    state_ = State::ExpectOpenX;
                }
            } else if (tok.kind == K::CoordX) {
                emit_pending(events);
                partial_ = Partial{};
                partial_.gx0 = tok.coord;
                state_ = State::ExpectOpenY;
            } else {
                emit_pending(events);
                violation(tok, StreamEvent::ErrorCategory::Grammar,
                          "unexpected content between blocks", events);
            }
            break;

        case State::Recovering:
            if (tok.kind == K::TextRun) {
                if (prompt_.text_mode != TextMode::NoText)
                    recovery_text_ += tok.payload;
            } else if (tok.kind == K::CoordX) {
                flush_recovery(events);
                partial_ = Partial{};
                partial_.gx0 = tok.coord;
                state_ = State::ExpectOpenY;
            }
            // Stray <y_...>/<class_...> tags are dropped while resyncing.
            break;
    }
}

Document parse_output(std::string_view raw, const PromptConfig& prompt) {
    return parse_output(raw, prompt, ParseOptions{}).doc;
}

ParseResult parse_output(std::string_view raw, const PromptConfig& prompt,
                         const ParseOptions& opts) {
    StreamParser parser(prompt, opts);
    std::vector<StreamEvent> events = parser.feed(raw);
    std::vector<StreamEvent> tail = parser.finish();
    events.insert(events.end(), std::make_move_iterator(tail.begin()),
                  std::make_move_iterator(tail.end()));

    ParseResult result;
    result.doc.prompt = prompt;
    for (StreamEvent& e : events) {
        if (e.kind == StreamEvent::Kind::BlockComplete) {
            result.doc.blocks.push_back(std::move(e.block));
        } else {
            switch (e.category) {
                case StreamEvent::ErrorCategory::Lex:
                    throw LexError(e.message, e.offset);
                case StreamEvent::ErrorCategory::Range:
                    throw RangeError(e.message + " (byte " + std::to_string(e.offset) + ")");
                case StreamEvent::ErrorCategory::Contract:
                    throw ContractError(e.message + " (byte " + std::to_string(e.offset) + ")");
                case StreamEvent::ErrorCategory::Grammar:
                    throw GrammarError(e.message, e.offset);
            }
        }
    }
    result.diagnostics = parser.diagnostics();
    return result;
}

std::string serialize(const Document& doc) {
    std::vector<std::string> problems = check_document(doc);
    if (!problems.empty())
        throw ContractError("cannot serialize invalid document: " + problems.front());

    std::string out;
    if (!doc.prompt.boxes) {
        for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
            if (i > 0) out += "\n\n";
            out += *doc.blocks[i].text;
        }
        return out;
    }
    for (const Block& b : doc.blocks) {
        const BBox& box = *b.bbox;
        out += "<x_" + format_coord(box.gx0, Axis::X) + ">";
        out += "<y_" + format_coord(box.gy0, Axis::Y) + ">";
        if (doc.prompt.text_mode != TextMode::NoText) out += *b.text;
        out += "<x_" + format_coord(box.gx1, Axis::X) + ">";
        out += "<y_" + format_coord(box.gy1, Axis::Y) + ">";
        if (b.cls) out += b.cls->token();
    }
    return out;
}

std::string serialize_lenient(const Document& doc) {
    std::string out;
    if (!doc.prompt.boxes) {
        bool first = true;
        for (const Block& b : doc.blocks) {
            if (!b.text) continue;
            if (!first) out += "\n\n";
            out += *b.text;
            first = false;
        }
        return out;
    }
    for (const Block& b : doc.blocks) {
        const bool emit_text = doc.prompt.text_mode != TextMode::NoText && b.text;
        if (!b.bbox) {
            if (emit_text) out += *b.text;  // recovered junk stays bare text
            continue;
        }
        out += "<x_" + format_coord(b.bbox->gx0, Axis::X) + ">";
        out += "<y_" + format_coord(b.bbox->gy0, Axis::Y) + ">";
        if (emit_text) out += *b.text;
        out += "<x_" + format_coord(b.bbox->gx1, Axis::X) + ">";
        out += "<y_" + format_coord(b.bbox->gy1, Axis::Y) + ">";
        if (b.cls && doc.prompt.classes) out += b.cls->token();
    }
    return out;
}

}  // namespace docparse
