#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docparse/errors.hpp"

namespace docparse {

// Coordinate grid: x values live on a 1024-step grid, y values on a
// 1280-step grid, both normalized to [0,1].
inline constexpr int kGridX = 1024;
inline constexpr int kGridY = 1280;

enum class Axis { X, Y };

constexpr int grid_size(Axis axis) { return axis == Axis::X ? kGridX : kGridY; }

// round(value * G), ties away from zero. value must lie in [0,1].
int quantize(double value, Axis axis);

// index / G. index must lie in [0,G]. quantize(dequantize(k)) == k for all k.
double dequantize(int index, Axis axis);

// Canonical 4-decimal surface form of a grid coordinate, e.g. "0.1152".
std::string format_coord(int index, Axis axis);

// Layout role of a block. The eleven known labels use their hyphenated
// token spellings; anything else round-trips through Other.
class SemanticClass {
public:
    enum class Label {
        Title,
        SectionHeader,
        Text,
        ListItem,
        Formula,
        PageHeader,
        PageFooter,
        Footnote,
        Table,
        Picture,
        Caption,
        Other,
    };

    SemanticClass(Label label);  // label must not be Other; use from_name
    // Maps a known spelling to its label, anything else to Other(name).
    static SemanticClass from_name(std::string_view name);

    Label label() const { return label_; }
    const std::string& name() const { return name_; }
    std::string token() const { return "<class_" + name_ + ">"; }

    bool operator==(const SemanticClass& o) const { return name_ == o.name_; }
    auto operator<=>(const SemanticClass& o) const { return name_ <=> o.name_; }

private:
    SemanticClass(Label label, std::string name)
        : label_(label), name_(std::move(name)) {}
    Label label_;
    std::string name_;
};

// Axis-aligned box on the quantization grid. Stored as grid indices so every
// coordinate is exactly representable; degenerate (zero-area) boxes are fine.
struct BBox {
    int gx0 = 0, gy0 = 0, gx1 = 0, gy1 = 0;

    // Quantizes normalized coordinates. Requires x0 <= x1 and y0 <= y1 after
    // quantization.
    static BBox from_normalized(double x0, double y0, double x1, double y1);
    static BBox from_grid(int gx0, int gy0, int gx1, int gy1);

    double x0() const { return dequantize(gx0, Axis::X); }
    double y0() const { return dequantize(gy0, Axis::Y); }
    double x1() const { return dequantize(gx1, Axis::X); }
    double y1() const { return dequantize(gy1, Axis::Y); }

    bool operator==(const BBox&) const = default;
};

enum class TextMode { Markdown, Plain, NoText };

std::string_view text_mode_name(TextMode mode);           // "markdown" etc.
TextMode text_mode_from_name(std::string_view name);      // throws IoError

// The three-axis prompt interface: text formatting x boxes x classes.
struct PromptConfig {
    TextMode text_mode = TextMode::Markdown;
    bool boxes = true;
    bool classes = true;

    // classes requires boxes, and the all-off no-output case is excluded.
    bool valid() const {
        if (classes && !boxes) return false;
        if (text_mode == TextMode::NoText && !boxes && !classes) return false;
        return true;
    }

    std::string to_tokens() const;

    bool operator==(const PromptConfig&) const = default;
};

// The prompt requesting markdown text, boxes, and classes at once.
PromptConfig maximal_information_prompt();

// All eight prompt configurations that satisfy the constraints, in a fixed
// deterministic order.
std::vector<PromptConfig> valid_prompt_combinations();

// Parses a concatenation of exactly one token from each prompt family.
// Throws MalformedPromptError (missing/duplicate/unknown token) or
// InvalidCombinationError (well-formed but excluded combination).
PromptConfig prompt_from_tokens(std::string_view tokens);

// One semantic block of a page. Which fields are populated is governed by
// the document's prompt; a block's ordinal index is its list position.
struct Block {
    std::optional<std::string> text;
    std::optional<BBox> bbox;
    std::optional<SemanticClass> cls;

    bool operator==(const Block&) const = default;
};

struct PageSize {
    double width = 0;
    double height = 0;
    bool operator==(const PageSize&) const = default;
};

struct Document {
    std::vector<Block> blocks;
    PromptConfig prompt;
    std::optional<PageSize> page;

    bool operator==(const Document&) const = default;
};

// Invariant check. Empty result means the document is well-formed:
//  - no block carries a field its prompt forbids
//  - prompt.boxes implies a bbox on every block, and text mode other than
//    no_text implies a text field on every block (class stays optional)
//  - every block has at least one of text/bbox, and class implies bbox
std::vector<std::string> check_document(const Document& doc);

inline bool is_valid(const Document& doc) { return check_document(doc).empty(); }

}  // namespace docparse
