#include "docparse/tables.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace docparse {

namespace {

bool space_char(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && space_char(s.front())) s.remove_prefix(1);
    while (!s.empty() && space_char(s.back())) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// ------------------------------------------------------------------
// Grid assembly shared by both parsers.
// ------------------------------------------------------------------

struct PendingCell {
    int col_span = 1;
    int row_span = 1;
    std::string content;
    bool header = false;
};

// Lays out source rows into a tiled grid. LaTeX rows carry empty
// placeholder cells under multirow spans; HTML rows simply omit covered
// positions. `consume_placeholders` selects between the two conventions.
TableModel assemble_grid(const std::vector<std::vector<PendingCell>>& rows,
                         int min_cols, bool consume_placeholders,
                         std::vector<Diagnostic>& diags) {
    const int n_rows = static_cast<int>(rows.size());
    std::vector<std::vector<char>> occ(n_rows);
    auto occupied = [&](int r, int c) {
        return r < n_rows && c < static_cast<int>(occ[r].size()) && occ[r][c];
    };
    auto mark = [&](int r, int c) {
        if (static_cast<int>(occ[r].size()) <= c) occ[r].resize(c + 1, 0);
        occ[r][c] = 1;
    };

    TableModel t;
    t.n_rows = n_rows;
    int max_col = min_cols;
    for (int r = 0; r < n_rows; ++r) {
        int col = 0;
        for (const PendingCell& cell : rows[r]) {
            if (consume_placeholders && cell.row_span == 1 && cell.col_span == 1 &&
                trim(cell.content).empty() && occupied(r, col)) {
                ++col;  // placeholder under a span from an earlier row
                continue;
            }
            while (occupied(r, col)) ++col;
            int rs = std::min(cell.row_span, n_rows - r);
            if (rs < cell.row_span)
                diags.push_back({0, "row span clipped to the bottom of the table"});
            TableCell out;
            out.row = r;
            out.col = col;
            out.row_span = rs;
            out.col_span = cell.col_span;
            out.content = std::string(trim(cell.content));
            out.header = cell.header;
            for (int rr = r; rr < r + rs; ++rr)
                for (int cc = col; cc < col + cell.col_span; ++cc) mark(rr, cc);
            max_col = std::max(max_col, col + cell.col_span);
            t.cells.push_back(std::move(out));
            col += cell.col_span;
        }
    }
    t.n_cols = n_rows == 0 ? min_cols : max_col;

    // Complete the grid with empty filler cells.
    for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < t.n_cols; ++c)
            if (!occupied(r, c)) {
                TableCell filler;
                filler.row = r;
                filler.col = c;
                t.cells.push_back(filler);
                mark(r, c);
            }

    std::sort(t.cells.begin(), t.cells.end(), [](const TableCell& a, const TableCell& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    t.validate();
    return t;
}

// ------------------------------------------------------------------
// LaTeX
// ------------------------------------------------------------------

constexpr std::array<std::string_view, 4> kTableEnvs = {"tabular", "tabular*",
                                                        "longtable", "array"};

bool is_table_env(std::string_view name) {
    return std::find(kTableEnvs.begin(), kTableEnvs.end(), name) != kTableEnvs.end();
}

// Reads a {...} group starting at src[i] == '{'; returns the inner text and
// leaves i one past the closing brace. Escaped braces do not count.
std::string_view read_group(std::string_view src, std::size_t& i) {
    if (i >= src.size() || src[i] != '{')
        throw TableParseError("expected '{'", i);
    const std::size_t start = i + 1;
    int depth = 1;
    std::size_t j = start;
    while (j < src.size()) {
        const char c = src[j];
        if (c == '\\' && j + 1 < src.size()) {
            j += 2;
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}' && --depth == 0) {
            i = j + 1;
            return src.substr(start, j - start);
        }
        ++j;
    }
    throw TableParseError("unbalanced '{'", i);
}

void skip_ws(std::string_view src, std::size_t& i) {
    while (i < src.size() && space_char(src[i])) ++i;
}

void skip_optional_bracket(std::string_view src, std::size_t& i) {
    skip_ws(src, i);
    if (i < src.size() && src[i] == '[') {
        const std::size_t close = src.find(']', i);
        if (close != std::string_view::npos) i = close + 1;
    }
}

// Number of columns declared by a tabular preamble.
int preamble_columns(std::string_view spec, std::vector<Diagnostic>& diags) {
    int count = 0;
    std::size_t i = 0;
    while (i < spec.size()) {
        const char c = spec[i];
        if (c == '|' || space_char(c)) {
            ++i;
        } else if (c == '@' || c == '!' || c == '>' || c == '<') {
            ++i;
            skip_ws(spec, i);
            if (i < spec.size() && spec[i] == '{') read_group(spec, i);
        } else if (c == '*') {
            ++i;
            skip_ws(spec, i);
            std::string_view reps = read_group(spec, i);
            skip_ws(spec, i);
            std::string_view sub = read_group(spec, i);
            int n = 0;
            std::from_chars(reps.data(), reps.data() + reps.size(), n);
            count += std::max(0, n) * preamble_columns(sub, diags);
        } else if (c == 'l' || c == 'c' || c == 'r' || c == 'X') {
            ++count;
            ++i;
        } else if (c == 'p' || c == 'm' || c == 'b') {
            ++count;
            ++i;
            skip_ws(spec, i);
            if (i < spec.size() && spec[i] == '{') read_group(spec, i);
        } else {
            diags.push_back({i, std::string("unknown column specifier '") + c +
                                    "'; counted as one column"});
            ++count;
            ++i;
        }
    }
    return count;
}

struct LatexEnvSpan {
    std::string name;
    std::size_t body_begin = 0;
    std::size_t body_end = 0;
    int preamble_cols = 0;
};

LatexEnvSpan find_latex_env(std::string_view src, std::vector<Diagnostic>& diags) {
    std::size_t pos = 0;
    std::string name;
    std::size_t after_name = 0;
    while (true) {
        pos = src.find("\\begin{", pos);
        if (pos == std::string_view::npos)
            throw TableParseError("no tabular environment found", 0);
        std::size_t i = pos + 6;  // at '{'
        std::string_view candidate = read_group(src, i);
        if (is_table_env(candidate)) {
            name = std::string(candidate);
            after_name = i;
            break;
        }
        pos = i;
    }

    std::size_t i = after_name;
    if (name == "tabular*") {
        skip_ws(src, i);
        read_group(src, i);  // width argument
    }
    skip_optional_bracket(src, i);
    skip_ws(src, i);
    LatexEnvSpan env;
    env.name = name;
    env.preamble_cols = preamble_columns(read_group(src, i), diags);
    env.body_begin = i;

    // Match \end{name}, skipping nested table environments.
    int depth = 0;
    while (i < src.size()) {
        if (src[i] == '\\' && src.compare(i, 7, "\\begin{") == 0) {
            std::size_t j = i + 6;
            std::string_view inner = read_group(src, j);
            if (is_table_env(inner)) ++depth;
            i = j;
        } else if (src[i] == '\\' && src.compare(i, 5, "\\end{") == 0) {
            const std::size_t tag_at = i;
            std::size_t j = i + 4;
            std::string_view inner = read_group(src, j);
            if (is_table_env(inner)) {
                if (depth == 0) {
                    if (inner != env.name)
                        throw TableParseError("mismatched \\end{" + std::string(inner) + "}",
                                              tag_at);
                    env.body_end = tag_at;
                    return env;
                }
                --depth;
            }
            i = j;
        } else {
            ++i;
        }
    }
    throw TableParseError("missing \\end{" + env.name + "}", src.size());
}

bool rule_command(std::string_view cmd) {
    return cmd == "hline" || cmd == "cline" || cmd == "toprule" ||
           cmd == "midrule" || cmd == "bottomrule";
}

// Splits the environment body into rows and raw cells: \\ breaks rows and
// & breaks cells at brace depth zero; rules are dropped.
std::vector<std::vector<std::string>> split_latex_body(std::string_view body,
                                                       std::size_t body_offset) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    int depth = 0;
    std::size_t i = 0;

    auto end_cell = [&]() {
        row.push_back(std::move(cell));
        cell.clear();
    };
    auto end_row = [&]() {
        end_cell();
        rows.push_back(std::move(row));
        row.clear();
    };

    while (i < body.size()) {
        const char c = body[i];
        if (c == '\\') {
            if (i + 1 >= body.size()) {
                cell += c;
                ++i;
                continue;
            }
            const char nc = body[i + 1];
            if (nc == '\\' && depth == 0) {
                end_row();
                i += 2;
                if (i < body.size() && body[i] == '*') ++i;  // \\* no-break form
                std::size_t j = i;
                skip_ws(body, j);
                if (j < body.size() && body[j] == '[') {
                    const std::size_t close = body.find(']', j);
                    if (close != std::string_view::npos) i = close + 1;
                }
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(nc))) {
                std::size_t j = i + 1;
                while (j < body.size() &&
                       std::isalpha(static_cast<unsigned char>(body[j])))
                    ++j;
                std::string_view cmd = body.substr(i + 1, j - i - 1);
                if (depth == 0 && rule_command(cmd)) {
                    i = j;
                    skip_optional_bracket(body, i);
                    skip_ws(body, i);
                    if (i < body.size() && body[i] == '{') read_group(body, i);
                    continue;
                }
                cell.append(body.substr(i, j - i));
                i = j;
                continue;
            }
            cell.append(body.substr(i, 2));  // escaped symbol stays verbatim
            i += 2;
            continue;
        }
        if (c == '{') {
            ++depth;
            cell += c;
            ++i;
            continue;
        }
        if (c == '}') {
            if (--depth < 0)
                throw TableParseError("unbalanced '}'", body_offset + i);
            cell += c;
            ++i;
            continue;
        }
        if (c == '&' && depth == 0) {
            end_cell();
            ++i;
            continue;
        }
        cell += c;
        ++i;
    }
    if (depth != 0) throw TableParseError("unbalanced '{'", body_offset + body.size());
    end_row();

    // A trailing \\ leaves a single empty cell behind; drop that row.
    if (!rows.empty() && rows.back().size() == 1 && trim(rows.back()[0]).empty())
        rows.pop_back();
    return rows;
}

std::string unescape_amp(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '&') {
            out += '&';
            ++i;
        } else {
            out += s[i];
        }
    }
    return out;
}

int parse_span_count(std::string_view text, std::vector<Diagnostic>& diags) {
    int n = 0;
    std::string_view t = trim(text);
    std::from_chars(t.data(), t.data() + t.size(), n);
    if (n < 1) {
        diags.push_back({0, "span count \"" + std::string(text) + "\" treated as 1"});
        n = 1;
    }
    return n;
}

bool starts_with_command(std::string_view s, std::string_view cmd) {
    if (s.rfind(cmd, 0) != 0) return false;
    return s.size() == cmd.size() ||
           !std::isalpha(static_cast<unsigned char>(s[cmd.size()]));
}

PendingCell parse_latex_cell(std::string_view raw, std::vector<Diagnostic>& diags) {
    PendingCell cell;
    std::string owned(trim(raw));
    bool progressed = true;
    while (progressed) {
        progressed = false;
        std::string_view s(owned);
        if (starts_with_command(s, "\\multicolumn")) {
            std::size_t i = 12;  // past \multicolumn
            skip_ws(s, i);
            std::string_view count = read_group(s, i);
            skip_ws(s, i);
            read_group(s, i);  // alignment, dropped
            skip_ws(s, i);
            std::string_view content = read_group(s, i);
            cell.col_span *= parse_span_count(count, diags);
            owned = std::string(trim(content));
            progressed = true;
        } else if (starts_with_command(s, "\\multirow")) {
            std::size_t i = 9;  // past \multirow
            skip_optional_bracket(s, i);
            skip_ws(s, i);
            std::string_view count = read_group(s, i);
            skip_optional_bracket(s, i);
            skip_ws(s, i);
            read_group(s, i);  // width, dropped
            skip_optional_bracket(s, i);
            skip_ws(s, i);
            std::string_view content = read_group(s, i);
            cell.row_span *= parse_span_count(count, diags);
            owned = std::string(trim(content));
            progressed = true;
        }
    }
    cell.content = unescape_amp(owned);
    return cell;
}

// ------------------------------------------------------------------
// HTML
// ------------------------------------------------------------------

struct HtmlTag {
    std::string name;     // lowercased
    bool closing = false;
    std::size_t end = 0;  // one past '>'
    std::string raw;      // exact bytes of the tag
    std::vector<std::pair<std::string, std::string>> attrs;  // names lowercased

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }
};

// Parses a tag at src[pos] == '<'. Returns false when this '<' does not
// open a tag (kept as text).
bool parse_html_tag(std::string_view src, std::size_t pos, HtmlTag& tag) {
    std::size_t i = pos + 1;
    if (i >= src.size()) return false;
    bool closing = false;
    if (src[i] == '/') {
        closing = true;
        ++i;
    }
    if (i >= src.size() || !std::isalpha(static_cast<unsigned char>(src[i]))) return false;
    const std::size_t name_start = i;
    while (i < src.size() && std::isalnum(static_cast<unsigned char>(src[i]))) ++i;
    tag.name = to_lower(src.substr(name_start, i - name_start));
    tag.closing = closing;
    tag.attrs.clear();

    while (i < src.size() && src[i] != '>') {
        if (space_char(src[i]) || src[i] == '/') {
            ++i;
            continue;
        }
        const std::size_t attr_start = i;
        while (i < src.size() && src[i] != '=' && src[i] != '>' &&
               !space_char(src[i]) && src[i] != '/')
            ++i;
        std::string key = to_lower(src.substr(attr_start, i - attr_start));
        std::string value;
        std::size_t j = i;
        while (j < src.size() && space_char(src[j])) ++j;
        if (j < src.size() && src[j] == '=') {
            ++j;
            while (j < src.size() && space_char(src[j])) ++j;
            if (j < src.size() && (src[j] == '"' || src[j] == '\'')) {
                const char quote = src[j];
                const std::size_t vstart = ++j;
                while (j < src.size() && src[j] != quote) ++j;
                value = std::string(src.substr(vstart, j - vstart));
                if (j < src.size()) ++j;
            } else {
                const std::size_t vstart = j;
                while (j < src.size() && !space_char(src[j]) && src[j] != '>') ++j;
                value = std::string(src.substr(vstart, j - vstart));
            }
            i = j;
        }
        if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    if (i >= src.size()) return false;  // unterminated tag: treat as text
    tag.end = i + 1;
    tag.raw = std::string(src.substr(pos, tag.end - pos));
    return true;
}

std::string decode_entities(std::string_view s) {
    static constexpr std::pair<std::string_view, char> kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''},
    };
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        bool matched = false;
        if (s[i] == '&') {
            for (const auto& [ent, ch] : kEntities) {
                if (s.compare(i, ent.size(), ent) == 0) {
                    out += ch;
                    i += ent.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            out += s[i];
            ++i;
        }
    }
    return out;
}

std::string encode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

int span_attr(const HtmlTag& tag, std::string_view key,
              std::vector<Diagnostic>& diags) {
    const std::string* v = tag.attr(key);
    if (!v) return 1;
    int n = 0;
    std::string_view t = trim(*v);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
    if (ec != std::errc{} || n < 1) {
        diags.push_back({0, std::string(key) + "=\"" + *v + "\" treated as 1"});
        return 1;
    }
    return n;
}

}  // namespace

// ------------------------------------------------------------------
// Public API
// ------------------------------------------------------------------

void TableModel::validate() const {
    if (n_rows < 0 || n_cols < 0)
        throw ContractError("table dimensions must be non-negative");
    std::vector<int> occ(static_cast<std::size_t>(n_rows) * n_cols, -1);
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const TableCell& c = cells[idx];
        if (c.row_span < 1 || c.col_span < 1)
            throw ContractError("cell spans must be at least 1");
        if (c.row < 0 || c.col < 0 || c.row + c.row_span > n_rows ||
            c.col + c.col_span > n_cols)
            throw ContractError("cell rectangle exceeds the grid");
        for (int r = c.row; r < c.row + c.row_span; ++r)
            for (int cc = c.col; cc < c.col + c.col_span; ++cc) {
                int& slot = occ[static_cast<std::size_t>(r) * n_cols + cc];
                if (slot != -1) throw ContractError("overlapping cells in table");
                slot = static_cast<int>(idx);
            }
    }
    for (int slot : occ)
        if (slot == -1) throw ContractError("table grid has uncovered positions");
}

bool same_table(const TableModel& a, const TableModel& b, bool compare_header) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols ||
        a.cells.size() != b.cells.size())
        return false;
    auto sorted = [](const TableModel& t) {
        std::vector<TableCell> cs = t.cells;
        std::sort(cs.begin(), cs.end(), [](const TableCell& x, const TableCell& y) {
            return x.row != y.row ? x.row < y.row : x.col < y.col;
        });
        return cs;
    };
    const std::vector<TableCell> ca = sorted(a);
    const std::vector<TableCell> cb = sorted(b);
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const TableCell& x = ca[i];
        const TableCell& y = cb[i];
        if (x.row != y.row || x.col != y.col || x.row_span != y.row_span ||
            x.col_span != y.col_span || x.content != y.content)
            return false;
        if (compare_header && x.header != y.header) return false;
    }
    return true;
}

TableParseResult parse_latex_table_ex(std::string_view src) {
    TableParseResult result;
    LatexEnvSpan env = find_latex_env(src, result.diagnostics);
    const std::string_view body = src.substr(env.body_begin, env.body_end - env.body_begin);
    std::vector<std::vector<std::string>> raw_rows =
        split_latex_body(body, env.body_begin);

    std::vector<std::vector<PendingCell>> rows;
    rows.reserve(raw_rows.size());
    for (const auto& raw_row : raw_rows) {
        std::vector<PendingCell> row;
        row.reserve(raw_row.size());
        for (const std::string& raw_cell : raw_row)
            row.push_back(parse_latex_cell(raw_cell, result.diagnostics));
        rows.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        int width = 0;
        for (const PendingCell& c : rows[r]) width += c.col_span;
        if (env.preamble_cols > 0 && width > env.preamble_cols)
            result.diagnostics.push_back(
                {0, "row " + std::to_string(r) + " wider than the declared preamble"});
    }
    result.table = assemble_grid(rows, env.preamble_cols, /*consume_placeholders=*/true,
                                 result.diagnostics);
    return result;
}

TableModel parse_latex_table(std::string_view src) {
    return parse_latex_table_ex(src).table;
}

TableParseResult parse_html_table_ex(std::string_view src) {
    TableParseResult result;

    // Locate the first <table ...> tag, case-insensitively.
    std::size_t table_at = std::string_view::npos;
    HtmlTag opening;
    for (std::size_t i = 0; i + 6 <= src.size(); ++i) {
        if (src[i] != '<') continue;
        HtmlTag tag;
        if (parse_html_tag(src, i, tag) && !tag.closing && tag.name == "table") {
            table_at = i;
            opening = tag;
            break;
        }
    }
    if (table_at == std::string_view::npos)
        throw TableParseError("no <table> element found", 0);

    std::vector<std::vector<PendingCell>> rows;
    bool row_open = false;
    bool cell_open = false;
    bool in_caption = false;
    int nested = 0;
    PendingCell cell;
    std::string content;

    auto close_cell = [&]() {
        if (!cell_open) return;
        cell.content = decode_entities(content);
        content.clear();
        if (rows.empty()) rows.emplace_back();
        rows.back().push_back(cell);
        cell = PendingCell{};
        cell_open = false;
    };
    auto open_row = [&]() {
        close_cell();
        rows.emplace_back();
        row_open = true;
    };

    std::size_t i = opening.end;
    while (i < src.size()) {
        const std::size_t lt = src.find('<', i);
        const std::size_t text_end = lt == std::string_view::npos ? src.size() : lt;
        if (text_end > i && cell_open && !in_caption)
            content.append(src.substr(i, text_end - i));
        if (lt == std::string_view::npos) break;

        if (src.compare(lt, 4, "<!--") == 0) {
            const std::size_t close = src.find("-->", lt);
            i = close == std::string_view::npos ? src.size() : close + 3;
            continue;
        }
        HtmlTag tag;
        if (!parse_html_tag(src, lt, tag)) {
            if (cell_open && !in_caption) content += '<';
            i = lt + 1;
            continue;
        }
        i = tag.end;

        if (nested > 0) {
            if (cell_open && !in_caption) content += tag.raw;
            if (tag.name == "table") nested += tag.closing ? -1 : 1;
            continue;
        }
        if (tag.name == "table") {
            if (tag.closing) break;  // end of our table
            if (cell_open && !in_caption) content += tag.raw;
            ++nested;
            continue;
        }
        if (in_caption) {
            if (tag.name == "caption" && tag.closing) in_caption = false;
            continue;
        }
        if (tag.name == "tr") {
            if (tag.closing) {
                close_cell();
                row_open = false;
            } else {
                open_row();
            }
        } else if (tag.name == "td" || tag.name == "th") {
            if (tag.closing) {
                close_cell();
            } else {
                close_cell();
                if (!row_open) open_row();
                cell.row_span = span_attr(tag, "rowspan", result.diagnostics);
                cell.col_span = span_attr(tag, "colspan", result.diagnostics);
                cell.header = tag.name == "th";
                cell_open = true;
            }
        } else if (tag.name == "thead" || tag.name == "tbody" || tag.name == "tfoot") {
            // transparent grouping
        } else if (tag.name == "caption") {
            if (!tag.closing) in_caption = true;
        } else if (cell_open) {
            content += tag.raw;  // opaque inline markup
        }
    }
    close_cell();

    result.table = assemble_grid(rows, 0, /*consume_placeholders=*/false,
                                 result.diagnostics);
    return result;
}

TableModel parse_html_table(std::string_view src) {
    return parse_html_table_ex(src).table;
}

std::string emit_html(const TableModel& t) {
    t.validate();
    std::vector<const TableCell*> anchor(static_cast<std::size_t>(t.n_rows) * t.n_cols,
                                         nullptr);
    for (const TableCell& c : t.cells)
        anchor[static_cast<std::size_t>(c.row) * t.n_cols + c.col] = &c;

    std::string out = "<table>";
    for (int r = 0; r < t.n_rows; ++r) {
        out += "<tr>";
        for (int c = 0; c < t.n_cols; ++c) {
            const TableCell* cell = anchor[static_cast<std::size_t>(r) * t.n_cols + c];
            if (!cell || cell->row != r || cell->col != c) continue;
            const char* tag = cell->header ? "th" : "td";
            out += "<";
            out += tag;
            if (cell->row_span > 1)
                out += " rowspan=\"" + std::to_string(cell->row_span) + "\"";
            if (cell->col_span > 1)
                out += " colspan=\"" + std::to_string(cell->col_span) + "\"";
            out += ">";
            out += encode_entities(cell->content);
            out += "</";
            out += tag;
            out += ">";
        }
        out += "</tr>";
    }
    out += "</table>";
    return out;
}

namespace {

std::string escape_latex_amp(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "\\&";
        else out += c;
    }
    return out;
}

}  // namespace

std::string emit_latex(const TableModel& t) {
    t.validate();
    std::vector<const TableCell*> cover(static_cast<std::size_t>(t.n_rows) * t.n_cols,
                                        nullptr);
    for (const TableCell& c : t.cells)
        for (int r = c.row; r < c.row + c.row_span; ++r)
            for (int cc = c.col; cc < c.col + c.col_span; ++cc)
                cover[static_cast<std::size_t>(r) * t.n_cols + cc] = &c;

    std::string out = "\\begin{tabular}{" + std::string(t.n_cols, 'c') + "}\n";
    for (int r = 0; r < t.n_rows; ++r) {
        std::string line;
        bool first = true;
        int c = 0;
        while (c < t.n_cols) {
            if (!first) line += " & ";
            first = false;
            const TableCell* cell = cover[static_cast<std::size_t>(r) * t.n_cols + c];
            if (cell && cell->row == r && cell->col == c) {
                std::string inner = escape_latex_amp(cell->content);
                if (cell->row_span > 1)
                    inner = "\\multirow{" + std::to_string(cell->row_span) + "}{*}{" +
                            inner + "}";
                if (cell->col_span > 1)
                    inner = "\\multicolumn{" + std::to_string(cell->col_span) + "}{c}{" +
                            inner + "}";
                line += inner;
                c += cell->col_span;
            } else {
                c += 1;  // placeholder under a span from an earlier row
            }
        }
        out += line + " \\\\\n";
    }
    out += "\\end{tabular}";
    return out;
}

std::string emit_markdown(const TableModel& t) {
    t.validate();
    if (t.n_rows == 0 || t.n_cols == 0) return "";

    std::vector<std::string> grid(static_cast<std::size_t>(t.n_rows) * t.n_cols);
    for (const TableCell& c : t.cells) {
        std::string text;
        for (char ch : c.content) {
            if (ch == '|') text += "\\|";
            else if (ch == '\n') text += "<br>";
            else text += ch;
        }
        for (int r = c.row; r < c.row + c.row_span; ++r)
            for (int cc = c.col; cc < c.col + c.col_span; ++cc)
                grid[static_cast<std::size_t>(r) * t.n_cols + cc] = text;
    }

    std::string out;
    for (int r = 0; r < t.n_rows; ++r) {
        out += "|";
        for (int c = 0; c < t.n_cols; ++c)
            out += " " + grid[static_cast<std::size_t>(r) * t.n_cols + c] + " |";
        out += "\n";
        if (r == 0) {
            out += "|";
            for (int c = 0; c < t.n_cols; ++c) out += " --- |";
            out += "\n";
        }
    }
    return out;
}

}  // namespace docparse
