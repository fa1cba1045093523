#include "doctest.h"

#include "docparse/metrics.hpp"
#include "docparse/tables.hpp"
#include "support.hpp"

using namespace docparse;

namespace {

const TableCell* cell_at(const TableModel& t, int row, int col) {
    for (const TableCell& c : t.cells)
        if (c.row == row && c.col == col) return &c;
    return nullptr;
}

}  // namespace

TEST_SUITE("tables") {

TEST_CASE("plain 2x2 tabular") {
    const TableModel t = parse_latex_table("\\begin{tabular}{cc} a & b \\\\ c & d \\end{tabular}");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    REQUIRE(t.cells.size() == 4);
    CHECK(cell_at(t, 0, 0)->content == "a");
    CHECK(cell_at(t, 0, 1)->content == "b");
    CHECK(cell_at(t, 1, 0)->content == "c");
    CHECK(cell_at(t, 1, 1)->content == "d");
    for (const TableCell& c : t.cells) {
        CHECK(c.row_span == 1);
        CHECK(c.col_span == 1);
    }
}

TEST_CASE("multicolumn spans the top row") {
    const TableModel t = parse_latex_table(
        "\\begin{tabular}{cc} \\multicolumn{2}{c}{h} \\\\ a & b \\end{tabular}");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    const TableCell* top = cell_at(t, 0, 0);
    REQUIRE(top != nullptr);
    CHECK(top->col_span == 2);
    CHECK(top->content == "h");
    CHECK(cell_at(t, 1, 0)->content == "a");
    CHECK(cell_at(t, 1, 1)->content == "b");
}

TEST_CASE("empty tabular body is a zero-row table") {
    const TableModel t = parse_latex_table("\\begin{tabular}{c}\\end{tabular}");
    CHECK(t.n_rows == 0);
    CHECK(t.n_cols == 1);
    CHECK(t.cells.empty());
}

TEST_CASE("multirow spans down and placeholders are consumed") {
    const TableModel t = parse_latex_table(
        "\\begin{tabular}{cc} \\multirow{2}{*}{a} & b \\\\ & c \\end{tabular}");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    const TableCell* left = cell_at(t, 0, 0);
    REQUIRE(left != nullptr);
    CHECK(left->row_span == 2);
    CHECK(left->content == "a");
    CHECK(cell_at(t, 0, 1)->content == "b");
    CHECK(cell_at(t, 1, 1)->content == "c");
    CHECK(cell_at(t, 1, 0) == nullptr);  // covered, no anchor
}

TEST_CASE("rules are consumed and dropped") {
    const TableModel t = parse_latex_table(
        "\\begin{tabular}{|c|c|}\\hline a & b \\\\ \\cline{1-2} c & d \\\\ \\hline\\end{tabular}");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    CHECK(cell_at(t, 0, 0)->content == "a");
    CHECK(cell_at(t, 1, 1)->content == "d");
}

TEST_CASE("under-full rows are padded with empty cells") {
    const TableModel t =
        parse_latex_table("\\begin{tabular}{ccc} a & b & c \\\\ d \\end{tabular}");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 3);
    CHECK(cell_at(t, 1, 0)->content == "d");
    CHECK(cell_at(t, 1, 1)->content == "");
    CHECK(cell_at(t, 1, 2)->content == "");
}

TEST_CASE("latex parse errors carry offsets") {
    CHECK_THROWS_AS(parse_latex_table("no table here"), TableParseError);
    CHECK_THROWS_AS(parse_latex_table("\\begin{tabular}{c} a { b \\end{tabular}"),
                    TableParseError);
    CHECK_THROWS_AS(parse_latex_table("\\begin{tabular}{c} a } b \\end{tabular}"),
                    TableParseError);
    CHECK_THROWS_AS(parse_latex_table("\\begin{tabular}{c} a & b"), TableParseError);
}

TEST_CASE("preamble forms: rules, repeats, padded columns") {
    CHECK(parse_latex_table("\\begin{tabular}{|l|c|r|}\\end{tabular}").n_cols == 3);
    CHECK(parse_latex_table("\\begin{tabular}{*{3}{c}l}\\end{tabular}").n_cols == 4);
    CHECK(parse_latex_table("\\begin{tabular}{p{2cm}@{\\,}m{1cm}}\\end{tabular}").n_cols == 2);
    const TableParseResult r =
        parse_latex_table_ex("\\begin{tabular}{cQ}\\end{tabular}");
    CHECK(r.table.n_cols == 2);
    CHECK_FALSE(r.diagnostics.empty());  // unknown specifier noted
}

TEST_CASE("escaped ampersands stay inside cells") {
    const TableModel t =
        parse_latex_table("\\begin{tabular}{cc} a \\& b & c \\end{tabular}");
    CHECK(t.n_cols == 2);
    CHECK(cell_at(t, 0, 0)->content == "a & b");
    CHECK(cell_at(t, 0, 1)->content == "c");
}

TEST_CASE("minimal html table") {
    const TableModel t = parse_html_table("<table><tr><td>a</td><td>b</td></tr></table>");
    CHECK(t.n_rows == 1);
    CHECK(t.n_cols == 2);
    CHECK(cell_at(t, 0, 0)->content == "a");
    CHECK(cell_at(t, 0, 1)->content == "b");
}

TEST_CASE("html rowspan produces a 2x2 grid with a tall left cell") {
    const TableModel t = parse_html_table(
        "<table><tr><td rowspan=\"2\">a</td><td>b</td></tr><tr><td>c</td></tr></table>");
    CHECK(t.n_rows == 2);
    CHECK(t.n_cols == 2);
    const TableCell* left = cell_at(t, 0, 0);
    REQUIRE(left != nullptr);
    CHECK(left->row_span == 2);
    CHECK(cell_at(t, 1, 1)->content == "c");
}

TEST_CASE("empty html table") {
    const TableModel t = parse_html_table("<table></table>");
    CHECK(t.n_rows == 0);
    CHECK(t.n_cols == 0);
    CHECK(t.cells.empty());
}

TEST_CASE("html without a table element fails") {
    CHECK_THROWS_AS(parse_html_table("<div>nope</div>"), TableParseError);
}

TEST_CASE("tag soup, headers, entities, nested tables") {
    // unclosed td/tr
    const TableModel soup =
        parse_html_table("<table><tr><td>a<td>b<tr><td>c</table>");
    CHECK(soup.n_rows == 2);
    CHECK(soup.n_cols == 2);
    CHECK(cell_at(soup, 0, 1)->content == "b");
    CHECK(cell_at(soup, 1, 1)->content == "");  // filler

    const TableModel th = parse_html_table(
        "<table><thead><tr><th>H</th></tr></thead><tbody><tr><td>v</td></tr></tbody></table>");
    CHECK(th.n_rows == 2);
    CHECK(cell_at(th, 0, 0)->header);
    CHECK_FALSE(cell_at(th, 1, 0)->header);

    const TableModel ent = parse_html_table("<table><tr><td>a &amp; b &lt;c&gt;</td></tr></table>");
    CHECK(cell_at(ent, 0, 0)->content == "a & b <c>");

    const TableModel nested = parse_html_table(
        "<table><tr><td><table><tr><td>inner</td></tr></table></td><td>x</td></tr></table>");
    CHECK(nested.n_rows == 1);
    CHECK(nested.n_cols == 2);
    CHECK(cell_at(nested, 0, 0)->content ==
          "<table><tr><td>inner</td></tr></table>");
    CHECK(cell_at(nested, 0, 1)->content == "x");
}

TEST_CASE("emit_html produces the canonical flat form") {
    TableModel t;
    t.n_rows = 2;
    t.n_cols = 2;
    t.cells = {
        {0, 0, 1, 1, "a", false},
        {0, 1, 1, 1, "b", false},
        {1, 0, 1, 1, "c", false},
        {1, 1, 1, 1, "d", false},
    };
    CHECK(emit_html(t) ==
          "<table><tr><td>a</td><td>b</td></tr><tr><td>c</td><td>d</td></tr></table>");

    TableModel spanned;
    spanned.n_rows = 1;
    spanned.n_cols = 2;
    spanned.cells = {{0, 0, 1, 2, "wide", false}};
    CHECK(emit_html(spanned).find("colspan=\"2\"") != std::string::npos);

    TableModel empty;
    CHECK(emit_html(empty) == "<table></table>");
    CHECK(emit_markdown(empty) == "");
}

TEST_CASE("emit_markdown flattens spans by duplication, first row is header") {
    TableModel t;
    t.n_rows = 2;
    t.n_cols = 2;
    t.cells = {
        {0, 0, 1, 2, "h", false},
        {1, 0, 1, 1, "a|x", false},
        {1, 1, 1, 1, "b", false},
    };
    CHECK(emit_markdown(t) ==
          "| h | h |\n| --- | --- |\n| a\\|x | b |\n");
}

TEST_CASE("structure round-trips through latex and html") {
    testsupport::Rng rng(71);
    for (int iter = 0; iter < 120; ++iter) {
        const TableModel t = testsupport::random_table(rng, 8, 3, /*with_headers=*/true);

        const TableModel from_latex = parse_latex_table(emit_latex(t));
        CHECK(same_table(t, from_latex, /*compare_header=*/false));

        const TableModel from_html = parse_html_table(emit_html(t));
        CHECK(same_table(t, from_html, /*compare_header=*/true));
    }
}

TEST_CASE("latex to html cross-conversion preserves structure exactly") {
    testsupport::Rng rng(73);
    for (int iter = 0; iter < 40; ++iter) {
        const TableModel original = testsupport::random_table(rng);
        const TableModel latex_side = parse_latex_table(emit_latex(original));
        const TableModel html_side = parse_html_table(emit_html(latex_side));
        CHECK(teds(latex_side, html_side, /*structure_only=*/true) == 1.0);
        CHECK(same_table(latex_side, html_side, /*compare_header=*/false));
    }
}

TEST_CASE("validate rejects overlap, gaps, and bad spans") {
    TableModel overlap;
    overlap.n_rows = 1;
    overlap.n_cols = 2;
    overlap.cells = {{0, 0, 1, 2, "a", false}, {0, 1, 1, 1, "b", false}};
    CHECK_THROWS_AS(overlap.validate(), ContractError);

    TableModel gap;
    gap.n_rows = 1;
    gap.n_cols = 2;
    gap.cells = {{0, 0, 1, 1, "a", false}};
    CHECK_THROWS_AS(gap.validate(), ContractError);

    TableModel bad_span;
    bad_span.n_rows = 1;
    bad_span.n_cols = 1;
    bad_span.cells = {{0, 0, 0, 1, "a", false}};
    CHECK_THROWS_AS(bad_span.validate(), ContractError);

    TableModel out_of_grid;
    out_of_grid.n_rows = 1;
    out_of_grid.n_cols = 1;
    out_of_grid.cells = {{0, 0, 2, 1, "a", false}};
    CHECK_THROWS_AS(out_of_grid.validate(), ContractError);
}

TEST_CASE("single-column tables with empty trailing cells round-trip") {
    TableModel t;
    t.n_rows = 2;
    t.n_cols = 1;
    t.cells = {{0, 0, 1, 1, "a", false}, {1, 0, 1, 1, "", false}};
    CHECK(same_table(t, parse_latex_table(emit_latex(t)), false));

    TableModel single;
    single.n_rows = 1;
    single.n_cols = 1;
    single.cells = {{0, 0, 1, 1, "", false}};
    CHECK(same_table(single, parse_latex_table(emit_latex(single)), false));
}

}  // TEST_SUITE
