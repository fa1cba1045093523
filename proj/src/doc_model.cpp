#include "docparse/doc_model.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace docparse {

int quantize(double value, Axis axis) {
    if (!(value >= 0.0 && value <= 1.0))
        throw RangeError("coordinate " + std::to_string(value) + " outside [0,1]");
    const int g = grid_size(axis);
    // llround rounds ties away from zero.
    return static_cast<int>(std::llround(value * g));
}

double dequantize(int index, Axis axis) {
    const int g = grid_size(axis);
    if (index < 0 || index > g)
        throw RangeError("grid index " + std::to_string(index) + " outside [0," +
                         std::to_string(g) + "]");
    return static_cast<double>(index) / g;
}

std::string format_coord(int index, Axis axis) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", dequantize(index, axis));
    return buf;
}

namespace {

struct KnownClass {
    SemanticClass::Label label;
    const char* name;
};

constexpr std::array<KnownClass, 11> kKnownClasses{{
    {SemanticClass::Label::Title, "Title"},
    {SemanticClass::Label::SectionHeader, "Section-Header"},
    {SemanticClass::Label::Text, "Text"},
    {SemanticClass::Label::ListItem, "List-Item"},
    {SemanticClass::Label::Formula, "Formula"},
    {SemanticClass::Label::PageHeader, "Page-Header"},
    {SemanticClass::Label::PageFooter, "Page-Footer"},
    {SemanticClass::Label::Footnote, "Footnote"},
    {SemanticClass::Label::Table, "Table"},
    {SemanticClass::Label::Picture, "Picture"},
    {SemanticClass::Label::Caption, "Caption"},
}};

}  // namespace

SemanticClass::SemanticClass(Label label) : label_(label) {
    for (const auto& k : kKnownClasses) {
        if (k.label == label) {
            name_ = k.name;
            return;
        }
    }
    throw ContractError("SemanticClass(Other) requires a name; use from_name");
}

SemanticClass SemanticClass::from_name(std::string_view name) {
    for (const auto& k : kKnownClasses)
        if (name == k.name) return SemanticClass(k.label);
    if (name.empty()) throw ContractError("semantic class name is empty");
    if (name.find('>') != std::string_view::npos)
        throw ContractError("semantic class name contains '>'");
    return SemanticClass(Label::Other, std::string(name));
}

BBox BBox::from_normalized(double x0, double y0, double x1, double y1) {
    return from_grid(quantize(x0, Axis::X), quantize(y0, Axis::Y),
                     quantize(x1, Axis::X), quantize(y1, Axis::Y));
}

BBox BBox::from_grid(int gx0, int gy0, int gx1, int gy1) {
    if (gx0 < 0 || gx0 > kGridX || gx1 < 0 || gx1 > kGridX || gy0 < 0 ||
        gy0 > kGridY || gy1 < 0 || gy1 > kGridY)
        throw RangeError("bbox grid index out of range");
    if (gx0 > gx1 || gy0 > gy1)
        throw ContractError("bbox corners out of order (x0>x1 or y0>y1)");
    return BBox{gx0, gy0, gx1, gy1};
}

std::string_view text_mode_name(TextMode mode) {
    switch (mode) {
        case TextMode::Markdown: return "markdown";
        case TextMode::Plain: return "plain";
        case TextMode::NoText: return "no_text";
    }
    throw ContractError("unknown text mode");
}

TextMode text_mode_from_name(std::string_view name) {
    if (name == "markdown") return TextMode::Markdown;
    if (name == "plain") return TextMode::Plain;
    if (name == "no_text") return TextMode::NoText;
    throw IoError("unknown text mode \"" + std::string(name) + "\"");
}

namespace {

constexpr const char* kTextTokens[] = {"<output_markdown>", "<output_plain>",
                                       "<output_no_text>"};
constexpr const char* kBoxTokens[] = {"<predict_bbox>", "<no_bbox>"};
constexpr const char* kClassTokens[] = {"<predict_classes>", "<no_classes>"};

}  // namespace

std::string PromptConfig::to_tokens() const {
    std::string out = kTextTokens[static_cast<int>(text_mode)];
    out += boxes ? kBoxTokens[0] : kBoxTokens[1];
    out += classes ? kClassTokens[0] : kClassTokens[1];
    return out;
}

PromptConfig maximal_information_prompt() {
    return PromptConfig{TextMode::Markdown, true, true};
}

std::vector<PromptConfig> valid_prompt_combinations() {
    std::vector<PromptConfig> out;
    for (TextMode mode : {TextMode::Markdown, TextMode::Plain, TextMode::NoText})
        for (bool boxes : {false, true})
            for (bool classes : {false, true}) {
                PromptConfig cfg{mode, boxes, classes};
                if (cfg.valid()) out.push_back(cfg);
            }
    return out;
}

PromptConfig prompt_from_tokens(std::string_view tokens) {
    std::optional<TextMode> mode;
    std::optional<bool> boxes;
    std::optional<bool> classes;

    std::size_t pos = 0;
    while (pos < tokens.size()) {
        if (tokens[pos] != '<')
            throw MalformedPromptError("unexpected text between prompt tokens");
        std::size_t close = tokens.find('>', pos);
        if (close == std::string_view::npos)
            throw MalformedPromptError("unterminated prompt token");
        std::string_view tok = tokens.substr(pos, close - pos + 1);
        pos = close + 1;

        auto set_once = [&](auto& slot, auto value) {
            if (slot.has_value())
                throw MalformedPromptError("duplicate prompt token " + std::string(tok));
            slot = value;
        };
        if (tok == kTextTokens[0]) set_once(mode, TextMode::Markdown);
        else if (tok == kTextTokens[1]) set_once(mode, TextMode::Plain);
        else if (tok == kTextTokens[2]) set_once(mode, TextMode::NoText);
        else if (tok == kBoxTokens[0]) set_once(boxes, true);
        else if (tok == kBoxTokens[1]) set_once(boxes, false);
        else if (tok == kClassTokens[0]) set_once(classes, true);
        else if (tok == kClassTokens[1]) set_once(classes, false);
        else throw MalformedPromptError("unknown prompt token " + std::string(tok));
    }
    if (!mode || !boxes || !classes)
        throw MalformedPromptError("prompt must name one token from each family");

    PromptConfig cfg{*mode, *boxes, *classes};
    if (!cfg.valid())
        throw InvalidCombinationError("prompt combination " + cfg.to_tokens() +
                                      " is excluded");
    return cfg;
}

std::vector<std::string> check_document(const Document& doc) {
    std::vector<std::string> out;
    if (!doc.prompt.valid()) out.push_back("prompt configuration is invalid");
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        const Block& b = doc.blocks[i];
        const std::string at = "block " + std::to_string(i) + ": ";
        if (!b.text && !b.bbox) out.push_back(at + "has neither text nor bbox");
        if (b.cls && !b.bbox) out.push_back(at + "class without bbox");
        if (!doc.prompt.boxes && b.bbox)
            out.push_back(at + "bbox forbidden by prompt");
        if (doc.prompt.boxes && !b.bbox)
            out.push_back(at + "bbox required by prompt but missing");
        if (!doc.prompt.classes && b.cls)
            out.push_back(at + "class forbidden by prompt");
        if (doc.prompt.text_mode == TextMode::NoText && b.text)
            out.push_back(at + "text forbidden by prompt");
        if (doc.prompt.text_mode != TextMode::NoText && !b.text)
            out.push_back(at + "text required by prompt but missing");
    }
    return out;
}

}  // namespace docparse
