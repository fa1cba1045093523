#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "docparse/errors.hpp"

namespace docparse {

struct TableCell {
    int row = 0;
    int col = 0;
    int row_span = 1;
    int col_span = 1;
    std::string content;
    bool header = false;

    bool operator==(const TableCell&) const = default;
};

// Logical grid shared by the LaTeX/HTML/Markdown converters. Cell
// rectangles tile the n_rows x n_cols grid exactly: no overlap, no gap.
// Zero-row/zero-column tables are legal (empty environments parse to them).
struct TableModel {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<TableCell> cells;  // sorted by (row, col) anchor

    // Throws ContractError if the cells do not tile the grid.
    void validate() const;

    bool operator==(const TableModel&) const = default;
};

// Grid, spans, and content agree; header flags compared only when asked
// (LaTeX cannot express them).
bool same_table(const TableModel& a, const TableModel& b, bool compare_header);

struct TableParseResult {
    TableModel table;
    std::vector<Diagnostic> diagnostics;
};

// Parses the first tabular-like environment (tabular, tabular*, longtable,
// array). Handles & and \\ at brace depth zero, \hline/\cline/booktabs
// rules, \multicolumn and \multirow; everything else inside a cell stays
// opaque content. Under-full rows are padded with empty cells. Throws
// TableParseError on unbalanced braces or a missing environment.
TableModel parse_latex_table(std::string_view src);
TableParseResult parse_latex_table_ex(std::string_view src);

// Parses the first <table> element; tag soup (unclosed td/tr) is fine, the
// grid is completed with empty filler cells, rowspan/colspan map to spans,
// and <th> marks header cells. Nested tables stay opaque cell content.
TableModel parse_html_table(std::string_view src);
TableParseResult parse_html_table_ex(std::string_view src);

// Structure-lossless emitters: parse_X(emit_X(t)) reproduces grid, spans,
// and content (plus header flags for HTML).
std::string emit_html(const TableModel& t);
std::string emit_latex(const TableModel& t);

// GitHub pipe table; spans cannot be expressed, so covered cells repeat the
// anchor's content and the first row becomes the header row. Lossy.
std::string emit_markdown(const TableModel& t);

}  // namespace docparse
