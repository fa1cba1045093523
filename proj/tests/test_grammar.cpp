#include "doctest.h"

#include "docparse/grammar.hpp"
#include "support.hpp"

using namespace docparse;

namespace {

const std::string kExample =
    "<x_0.1152><y_0.2586># NVIDIA Nemotron-Parse 1.1<x_0.8799><y_0.2797><class_Title>";

Block example_block() {
    Block b;
    b.text = "# NVIDIA Nemotron-Parse 1.1";
    b.bbox = BBox::from_grid(118, 331, 901, 358);
    b.cls = SemanticClass(SemanticClass::Label::Title);
    return b;
}

std::vector<Block> blocks_of(const std::vector<StreamEvent>& events) {
    std::vector<Block> out;
    for (const StreamEvent& e : events)
        if (e.kind == StreamEvent::Kind::BlockComplete) out.push_back(e.block);
    return out;
}

}  // namespace

TEST_SUITE("grammar") {

TEST_CASE("tokenize the worked example") {
    const std::vector<OutputToken> toks = tokenize(kExample);
    REQUIRE(toks.size() == 6);
    CHECK(toks[0].kind == OutputToken::Kind::CoordX);
    CHECK(toks[0].coord == 118);
    CHECK(toks[1].kind == OutputToken::Kind::CoordY);
    CHECK(toks[1].coord == 331);
    CHECK(toks[2].kind == OutputToken::Kind::TextRun);
    CHECK(toks[2].payload == "# NVIDIA Nemotron-Parse 1.1");
    CHECK(toks[3].kind == OutputToken::Kind::CoordX);
    CHECK(toks[3].coord == 901);
    CHECK(toks[4].kind == OutputToken::Kind::CoordY);
    CHECK(toks[4].coord == 358);
    CHECK(toks[5].kind == OutputToken::Kind::ClassTag);
    CHECK(toks[5].payload == "Title");
}

TEST_CASE("tokenize trivial inputs") {
    CHECK(tokenize("").empty());
    const std::vector<OutputToken> toks = tokenize("plain text only");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].kind == OutputToken::Kind::TextRun);
    CHECK(toks[0].payload == "plain text only");
}

TEST_CASE("grid-integer and decimal surfaces normalize identically") {
    const std::vector<OutputToken> a = tokenize("<x_0.1152>");
    const std::vector<OutputToken> b = tokenize("<x_118>");
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].coord == b[0].coord);
    CHECK(tokenize("<y_1.0>")[0].coord == 1280);
    CHECK(tokenize("<y_1280>")[0].coord == 1280);
    CHECK(tokenize("<x_0>")[0].coord == 0);
}

TEST_CASE("malformed tags raise lex errors with byte offsets") {
    CHECK_THROWS_AS(tokenize("<x_abc>"), LexError);
    try {
        tokenize("ab<x_abc>");
        FAIL("expected LexError");
    } catch (const LexError& e) {
        CHECK(e.offset == 2);
    }
    CHECK_THROWS_AS(tokenize("<x_>"), LexError);
    CHECK_THROWS_AS(tokenize("<x_1.2.3>"), LexError);
    CHECK_THROWS_AS(tokenize("<x_.>"), LexError);
    CHECK_THROWS_AS(tokenize("<class_>"), LexError);
    CHECK_THROWS_AS(tokenize("<x_12"), LexError);   // unterminated at end
    CHECK_THROWS_AS(tokenize("<class_ab"), LexError);
    CHECK(tokenize("<xq> <zz>").size() == 1);       // lookalikes stay text
}

TEST_CASE("out-of-range coordinates: error, clip, or lenient demotion") {
    CHECK_THROWS_AS(tokenize("<x_1025>"), RangeError);
    CHECK_THROWS_AS(tokenize("<y_1281>"), RangeError);
    CHECK_THROWS_AS(tokenize("<x_1.5>"), RangeError);

    ParseOptions clip;
    clip.clip = true;
    TokenizeResult clipped = tokenize("<x_2000>", clip);
    REQUIRE(clipped.tokens.size() == 1);
    CHECK(clipped.tokens[0].coord == 1024);
    CHECK(clipped.diagnostics.size() == 1);

    ParseOptions lenient;
    lenient.lenient = true;
    TokenizeResult demoted = tokenize("<x_1.5>", lenient);
    REQUIRE(demoted.tokens.size() == 1);
    CHECK(demoted.tokens[0].kind == OutputToken::Kind::TextRun);
    CHECK(demoted.tokens[0].payload == "<x_1.5>");
    CHECK_FALSE(demoted.diagnostics.empty());
}

TEST_CASE("tokenizer is lossless: surfaces concatenate back to the input") {
    testsupport::Rng rng(23);
    static const std::string pool = "<>x_y.0123456789clas ssdf\nqwe";
    ParseOptions lenient;
    lenient.lenient = true;
    for (int iter = 0; iter < 300; ++iter) {
        std::string input;
        const int len = testsupport::rand_int(rng, 0, 60);
        for (int i = 0; i < len; ++i)
            input += pool[testsupport::rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
        const TokenizeResult r = tokenize(input, lenient);
        std::string rebuilt;
        for (const OutputToken& t : r.tokens) rebuilt += t.surface;
        CHECK(rebuilt == input);
        for (std::size_t i = 1; i < r.tokens.size(); ++i) {
            const bool adjacent_text =
                r.tokens[i].kind == OutputToken::Kind::TextRun &&
                r.tokens[i - 1].kind == OutputToken::Kind::TextRun;
            CHECK_FALSE(adjacent_text);
        }
    }
}

TEST_CASE("parse the worked example under the maximal-information prompt") {
    const Document doc = parse_output(kExample, maximal_information_prompt());
    REQUIRE(doc.blocks.size() == 1);
    CHECK(doc.blocks[0] == example_block());
}

TEST_CASE("serializing the example block reproduces the input byte for byte") {
    Document doc;
    doc.prompt = maximal_information_prompt();
    doc.blocks.push_back(example_block());
    CHECK(serialize(doc) == kExample);
}

TEST_CASE("empty input under a box-free prompt gives an empty document") {
    const Document doc = parse_output("", PromptConfig{TextMode::Plain, false, false});
    CHECK(doc.blocks.empty());
}

TEST_CASE("two concatenated blocks parse in emission order") {
    Document doc;
    doc.prompt = maximal_information_prompt();
    Block a = example_block();
    Block b;
    b.text = "second block";
    b.bbox = BBox::from_grid(0, 640, 512, 1280);
    b.cls = SemanticClass(SemanticClass::Label::Text);
    doc.blocks = {a, b};
    const Document back = parse_output(serialize(doc), doc.prompt);
    REQUIRE(back.blocks.size() == 2);
    CHECK(back == doc);
}

TEST_CASE("unknown classes round-trip through the open escape hatch") {
    Document doc;
    doc.prompt = maximal_information_prompt();
    Block b;
    b.text = "int main() {}";
    b.bbox = BBox::from_grid(10, 20, 30, 40);
    b.cls = SemanticClass::from_name("Code");
    doc.blocks.push_back(b);
    const std::string raw = serialize(doc);
    CHECK(raw.find("<class_Code>") != std::string::npos);
    CHECK(parse_output(raw, doc.prompt) == doc);
}

TEST_CASE("round-trip holds for random documents over all eight prompts") {
    testsupport::Rng rng(101);
    for (const PromptConfig& prompt : valid_prompt_combinations()) {
        CAPTURE(prompt.to_tokens());
        for (int i = 0; i < 40; ++i) {
            const Document doc = testsupport::random_document(rng, prompt);
            const Document back = parse_output(serialize(doc), prompt);
            CHECK(back == doc);
        }
    }
}

TEST_CASE("streaming one byte at a time matches the batch parse") {
    StreamParser p(maximal_information_prompt());
    std::vector<StreamEvent> events;
    for (char c : kExample) {
        auto ev = p.feed(std::string_view(&c, 1));
        events.insert(events.end(), ev.begin(), ev.end());
    }
    auto tail = p.finish();
    events.insert(events.end(), tail.begin(), tail.end());
    const std::vector<Block> blocks = blocks_of(events);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0] == example_block());
    CHECK(p.emitted_blocks() == 1);
    CHECK_FALSE(p.failed());
}

TEST_CASE("feeding an empty chunk changes nothing") {
    StreamParser p(maximal_information_prompt());
    CHECK(p.feed("").empty());
    CHECK(p.state() == StreamParser::State::ExpectOpenX);
    CHECK(p.emitted_blocks() == 0);
}

TEST_CASE("a second open-x where open-y is expected is a grammar error") {
    StreamParser p(maximal_information_prompt());
    auto events = p.feed("<x_0.1><x_0.2>");
    auto tail = p.finish();
    events.insert(events.end(), tail.begin(), tail.end());
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == StreamEvent::Kind::Error);
    CHECK(events[0].offset == 7);  // byte offset of the second tag
    CHECK(p.failed());

    CHECK_THROWS_AS(parse_output("<x_0.1><x_0.2>", maximal_information_prompt()),
                    GrammarError);
}

TEST_CASE("chunking invariance over random documents and partitions") {
    testsupport::Rng rng(333);
    const std::vector<PromptConfig> prompts = valid_prompt_combinations();
    for (int iter = 0; iter < 60; ++iter) {
        const PromptConfig prompt = prompts[testsupport::rand_int(
            rng, 0, static_cast<int>(prompts.size()) - 1)];
        const Document doc = testsupport::random_document(rng, prompt);
        const std::string raw = serialize(doc);

        StreamParser p(prompt);
        std::vector<StreamEvent> events;
        for (const std::string& chunk : testsupport::chunk_randomly(rng, raw)) {
            auto ev = p.feed(chunk);
            events.insert(events.end(), ev.begin(), ev.end());
        }
        auto tail = p.finish();
        events.insert(events.end(), tail.begin(), tail.end());
        CHECK(blocks_of(events) == doc.blocks);
    }
}

TEST_CASE("lenient streaming over junk matches lenient batch parsing") {
    testsupport::Rng rng(444);
    static const std::string pool = "<>x_y.0123456789clas #\nqwe";
    ParseOptions opts;
    opts.lenient = true;
    for (int iter = 0; iter < 150; ++iter) {
        std::string input;
        const int len = testsupport::rand_int(rng, 0, 60);
        for (int i = 0; i < len; ++i)
            input += pool[testsupport::rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];

        const ParseResult batch = parse_output(input, maximal_information_prompt(), opts);

        StreamParser p(maximal_information_prompt(), opts);
        std::vector<StreamEvent> events;
        for (const std::string& chunk : testsupport::chunk_randomly(rng, input)) {
            auto ev = p.feed(chunk);
            events.insert(events.end(), ev.begin(), ev.end());
        }
        auto tail = p.finish();
        events.insert(events.end(), tail.begin(), tail.end());
        CAPTURE(input);
        CHECK(blocks_of(events) == batch.doc.blocks);
    }
}

TEST_CASE("lenient parsing is total on fuzzed input") {
    testsupport::Rng rng(555);
    static const std::string pool = "<>x_y.0123456789clas #\n\xc3\xa9 qwe";
    ParseOptions opts;
    opts.lenient = true;
    const std::vector<PromptConfig> prompts = valid_prompt_combinations();
    for (int iter = 0; iter < 400; ++iter) {
        std::string input;
        const int len = testsupport::rand_int(rng, 0, 80);
        for (int i = 0; i < len; ++i)
            input += pool[testsupport::rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
        const PromptConfig prompt = prompts[testsupport::rand_int(
            rng, 0, static_cast<int>(prompts.size()) - 1)];
        CHECK_NOTHROW(parse_output(input, prompt, opts));
    }
}

TEST_CASE("lenient recovery flushes junk as a text-only block and resyncs") {
    ParseOptions opts;
    opts.lenient = true;
    const std::string raw = "junk" + kExample;
    const ParseResult r = parse_output(raw, maximal_information_prompt(), opts);
    REQUIRE(r.doc.blocks.size() == 2);
    CHECK(r.doc.blocks[0].text == "junk");
    CHECK_FALSE(r.doc.blocks[0].bbox.has_value());
    CHECK(r.doc.blocks[1] == example_block());
    CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("class tag under no_classes: contract error or lenient drop") {
    const PromptConfig prompt{TextMode::Markdown, true, false};
    const std::string raw = "<x_0.1><y_0.1>t<x_0.2><y_0.2><class_Title>";
    CHECK_THROWS_AS(parse_output(raw, prompt), ContractError);

    ParseOptions opts;
    opts.lenient = true;
    const ParseResult r = parse_output(raw, prompt, opts);
    REQUIRE(r.doc.blocks.size() == 1);
    CHECK_FALSE(r.doc.blocks[0].cls.has_value());
    CHECK_FALSE(r.diagnostics.empty());
    CHECK(check_document(r.doc).empty());
}

TEST_CASE("text under no_text: contract error or lenient drop") {
    const PromptConfig prompt{TextMode::NoText, true, true};
    const std::string raw = "<x_0.1><y_0.1>stray<x_0.2><y_0.2><class_Text>";
    CHECK_THROWS_AS(parse_output(raw, prompt), ContractError);

    ParseOptions opts;
    opts.lenient = true;
    const ParseResult r = parse_output(raw, prompt, opts);
    REQUIRE(r.doc.blocks.size() == 1);
    CHECK_FALSE(r.doc.blocks[0].text.has_value());
    CHECK(r.doc.blocks[0].bbox.has_value());
    CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("inverted boxes are rejected in strict mode") {
    const std::string raw = "<x_0.5><y_0.5>t<x_0.3><y_0.6>";
    CHECK_THROWS_AS(parse_output(raw, maximal_information_prompt()), ContractError);
}

TEST_CASE("input ending inside a block: error or lenient text flush") {
    const std::string raw = "<x_0.1><y_0.1>partial text";
    CHECK_THROWS_AS(parse_output(raw, maximal_information_prompt()), GrammarError);

    ParseOptions opts;
    opts.lenient = true;
    const ParseResult r = parse_output(raw, maximal_information_prompt(), opts);
    REQUIRE(r.doc.blocks.size() == 1);
    CHECK(r.doc.blocks[0].text == "partial text");
}

TEST_CASE("box-free output splits into paragraph blocks on blank lines") {
    const PromptConfig prompt{TextMode::Markdown, false, false};
    const Document doc = parse_output("para one\n\npara two\n\n\npara three", prompt);
    REQUIRE(doc.blocks.size() == 3);
    CHECK(doc.blocks[0].text == "para one");
    CHECK(doc.blocks[1].text == "para two");
    CHECK(doc.blocks[2].text == "para three");

    // Tag-looking sequences are plain text when no boxes were requested.
    const Document tagged = parse_output("a <x_0.5> b", prompt);
    REQUIRE(tagged.blocks.size() == 1);
    CHECK(tagged.blocks[0].text == "a <x_0.5> b");
}

TEST_CASE("class tag is optional per block even when classes are on") {
    const std::string raw = "<x_0.1><y_0.1>first<x_0.2><y_0.2><x_0.3><y_0.3>second<x_0.4><y_0.4><class_Text>";
    const Document doc = parse_output(raw, maximal_information_prompt());
    REQUIRE(doc.blocks.size() == 2);
    CHECK_FALSE(doc.blocks[0].cls.has_value());
    CHECK(doc.blocks[1].cls.has_value());
    CHECK(parse_output(serialize(doc), doc.prompt) == doc);
}

}  // TEST_SUITE
