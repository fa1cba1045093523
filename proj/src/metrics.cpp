#include "docparse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "docparse/errors.hpp"

namespace docparse {

NormOptions NormOptions::maskout_profile() {
    NormOptions opts;
    opts.exclude_classes.insert(SemanticClass(SemanticClass::Label::PageHeader));
    opts.exclude_classes.insert(SemanticClass(SemanticClass::Label::PageFooter));
    return opts;
}

NormOptions NormOptions::raw_profile() {
    NormOptions opts;
    opts.lowercase = false;
    opts.strip_markup = false;
    opts.exclude_classes.clear();
    return opts;
}

namespace {

std::string nfkc(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || norm == nullptr) return std::string(s);
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString r = norm->normalize(u, status);
    if (U_FAILURE(status)) return std::string(s);
    std::string out;
    r.toUTF8String(out);
    return out;
}

std::string unicode_lower(std::string_view s) {
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    u.toLower(icu::Locale::getRoot());
    std::string out;
    u.toUTF8String(out);
    return out;
}

bool ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Drops Markdown heading/emphasis markers, TeX control sequences and math
// delimiters, and script/brace characters, keeping the wrapped text.
std::string strip_markup(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool line_start = true;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (line_start && c == '#') {
            while (i < s.size() && s[i] == '#') ++i;
            line_start = false;
            continue;
        }
        if (c == '\\') {
            if (i + 1 < s.size() && ascii_alpha(s[i + 1])) {
                i += 1;
                while (i < s.size() && ascii_alpha(s[i])) ++i;
                out += ' ';  // control sequence removed, keep a word break
            } else if (i + 1 < s.size() &&
                       (s[i + 1] == '(' || s[i + 1] == ')' || s[i + 1] == '[' ||
                        s[i + 1] == ']')) {
                i += 2;  // math delimiter
            } else if (i + 1 < s.size()) {
                out += s[i + 1];  // escaped symbol keeps its character
                i += 2;
            } else {
                ++i;
            }
            line_start = false;
            continue;
        }
        switch (c) {
            case '*':
            case '`':
            case '$':
            case '^':
            case '_':
            case '{':
            case '}':
                break;  // markers dropped
            case '~':
                out += ' ';
                break;
            default:
                out += c;
        }
        if (c == '\n') line_start = true;
        else if (c != ' ') line_start = false;
        ++i;
    }
    return out;
}

bool ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
            cp = (c & 0x1F) << 6 | (s[i + 1] & 0x3F);
            len = 2;
        } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
            cp = (c & 0x0F) << 12 | (s[i + 1] & 0x3F) << 6 | (s[i + 2] & 0x3F);
            len = 3;
        } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
            cp = (c & 0x07) << 18 | (s[i + 1] & 0x3F) << 12 | (s[i + 2] & 0x3F) << 6 |
                 (s[i + 3] & 0x3F);
            len = 4;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace

std::string normalize_text(std::string_view text, const NormOptions& opts) {
    std::string s = nfkc(text);
    if (opts.strip_markup) s = strip_markup(s);
    if (opts.lowercase) s = unicode_lower(s);
    if (opts.collapse_whitespace) {
        std::string collapsed;
        collapsed.reserve(s.size());
        bool in_ws = true;  // trims leading whitespace
        for (char c : s) {
            if (ws(c)) {
                if (!in_ws) collapsed += ' ';
                in_ws = true;
            } else {
                collapsed += c;
                in_ws = false;
            }
        }
        while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
        s = std::move(collapsed);
    }
    return s;
}

std::vector<std::string> normalize(std::string_view text, const NormOptions& opts) {
    const std::string s = normalize_text(text, opts);
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && ws(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !ws(s[i])) ++i;
        if (i > start) tokens.push_back(s.substr(start, i - start));
    }
    return tokens;
}

std::vector<std::string> normalize_document(const Document& doc,
                                            const NormOptions& opts) {
    std::string joined;
    for (const Block& b : doc.blocks) {
        if (!b.text) continue;
        if (b.cls && opts.exclude_classes.count(*b.cls)) continue;
        if (!joined.empty()) joined += '\n';
        joined += *b.text;
    }
    return normalize(joined, opts);
}

double wer(const std::vector<std::string>& ref_tokens,
           const std::vector<std::string>& hyp_tokens) {
    const std::size_t edits = levenshtein(ref_tokens, hyp_tokens);
    return static_cast<double>(edits) /
           static_cast<double>(std::max<std::size_t>(1, ref_tokens.size()));
}

double word_f1(const std::vector<std::string>& ref_tokens,
               const std::vector<std::string>& hyp_tokens) {
    if (ref_tokens.empty() && hyp_tokens.empty()) return 1.0;
    std::unordered_map<std::string, std::size_t> ref_counts;
    for (const std::string& t : ref_tokens) ++ref_counts[t];
    std::size_t match = 0;
    for (const std::string& t : hyp_tokens) {
        auto it = ref_counts.find(t);
        if (it != ref_counts.end() && it->second > 0) {
            --it->second;
            ++match;
        }
    }
    if (match == 0) return 0.0;
    const double precision = static_cast<double>(match) / hyp_tokens.size();
    const double recall = static_cast<double>(match) / ref_tokens.size();
    return 2.0 * precision * recall / (precision + recall);
}

double norm_edit_distance(std::string_view ref, std::string_view hyp) {
    const std::vector<char32_t> a = decode_utf8(ref);
    const std::vector<char32_t> b = decode_utf8(hyp);
    const std::size_t denom = std::max<std::size_t>(1, std::max(a.size(), b.size()));
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(denom);
}

double bleu(const std::vector<std::string>& ref_tokens,
            const std::vector<std::string>& hyp_tokens, int max_n) {
    if (hyp_tokens.empty()) return 0.0;
    if (max_n < 1) throw ContractError("bleu requires max_n >= 1");

    auto ngram_key = [](const std::vector<std::string>& toks, std::size_t at, int n) {
        std::string key;
        for (int k = 0; k < n; ++k) {
            key += toks[at + k];
            key += '\x1f';
        }
        return key;
    };

    double log_sum = 0;
    for (int n = 1; n <= max_n; ++n) {
        std::unordered_map<std::string, std::size_t> ref_counts;
        if (ref_tokens.size() >= static_cast<std::size_t>(n))
            for (std::size_t i = 0; i + n <= ref_tokens.size(); ++i)
                ++ref_counts[ngram_key(ref_tokens, i, n)];

        std::size_t total = 0, match = 0;
        if (hyp_tokens.size() >= static_cast<std::size_t>(n)) {
            std::unordered_map<std::string, std::size_t> hyp_counts;
            for (std::size_t i = 0; i + n <= hyp_tokens.size(); ++i) {
                ++hyp_counts[ngram_key(hyp_tokens, i, n)];
                ++total;
            }
            for (const auto& [gram, count] : hyp_counts) {
                auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) match += std::min(count, it->second);
            }
        }
        const double p = match > 0
                             ? static_cast<double>(match) / static_cast<double>(total)
                             : (static_cast<double>(match) + 1.0) /
                                   (static_cast<double>(total) + 1.0);
        log_sum += std::log(p);
    }

    double brevity = 1.0;
    if (hyp_tokens.size() < ref_tokens.size())
        brevity = std::exp(1.0 - static_cast<double>(ref_tokens.size()) /
                                     static_cast<double>(hyp_tokens.size()));
    return brevity * std::exp(log_sum / max_n);
}

// ------------------------------------------------------------------
// Zhang-Shasha ordered tree edit distance
// ------------------------------------------------------------------

double TedsCosts::rename(const TedNode& a, const TedNode& b) const {
    if (a.label != b.label) return 1.0;
    if (structure_only) return 0.0;
    return norm_edit_distance(a.content, b.content);
}

namespace {

struct FlatTree {
    std::vector<const TedNode*> post;  // postorder
    std::vector<int> lml;              // leftmost leaf descendant, postorder index
    std::vector<int> keyroots;         // ascending
};

int flatten_into(const TedNode& node, FlatTree& t) {
    int first_leaf = -1;
    for (const TedNode& child : node.children) {
        const int child_lml = flatten_into(child, t);
        if (first_leaf == -1) first_leaf = child_lml;
    }
    const int index = static_cast<int>(t.post.size());
    if (first_leaf == -1) first_leaf = index;
    t.post.push_back(&node);
    t.lml.push_back(first_leaf);
    return first_leaf;
}

FlatTree flatten(const TedNode& root) {
    FlatTree t;
    flatten_into(root, t);
    std::vector<char> seen(t.post.size(), 0);
    for (int i = static_cast<int>(t.post.size()) - 1; i >= 0; --i) {
        if (!seen[t.lml[i]]) {
            seen[t.lml[i]] = 1;
            t.keyroots.push_back(i);
        }
    }
    std::sort(t.keyroots.begin(), t.keyroots.end());
    return t;
}

}  // namespace

double tree_edit_distance(const TedNode* t1, const TedNode* t2,
                          const TedsCosts& costs) {
    auto count_nodes = [](const TedNode& n) {
        FlatTree f;
        flatten_into(n, f);
        return f.post.size();
    };
    if (t1 == nullptr && t2 == nullptr) return 0.0;
    if (t1 == nullptr) return costs.insert_cost * static_cast<double>(count_nodes(*t2));
    if (t2 == nullptr) return costs.delete_cost * static_cast<double>(count_nodes(*t1));

    const FlatTree a = flatten(*t1);
    const FlatTree b = flatten(*t2);
    const int n1 = static_cast<int>(a.post.size());
    const int n2 = static_cast<int>(b.post.size());

    std::vector<std::vector<double>> td(n1, std::vector<double>(n2, 0.0));
    std::vector<std::vector<double>> fd(n1 + 1, std::vector<double>(n2 + 1, 0.0));

    for (int ki : a.keyroots) {
        for (int kj : b.keyroots) {
            const int li = a.lml[ki];
            const int lj = b.lml[kj];
            const int m = ki - li + 1;
            const int n = kj - lj + 1;

            fd[0][0] = 0.0;
            for (int di = 1; di <= m; ++di) fd[di][0] = fd[di - 1][0] + costs.delete_cost;
            for (int dj = 1; dj <= n; ++dj) fd[0][dj] = fd[0][dj - 1] + costs.insert_cost;

            for (int di = 1; di <= m; ++di) {
                const int node_i = li + di - 1;
                for (int dj = 1; dj <= n; ++dj) {
                    const int node_j = lj + dj - 1;
                    if (a.lml[node_i] == li && b.lml[node_j] == lj) {
                        const double ren =
                            costs.rename(*a.post[node_i], *b.post[node_j]);
                        fd[di][dj] = std::min({fd[di - 1][dj] + costs.delete_cost,
                                               fd[di][dj - 1] + costs.insert_cost,
                                               fd[di - 1][dj - 1] + ren});
                        td[node_i][node_j] = fd[di][dj];
                    } else {
                        const int fi = a.lml[node_i] - li;
                        const int fj = b.lml[node_j] - lj;
                        fd[di][dj] = std::min({fd[di - 1][dj] + costs.delete_cost,
                                               fd[di][dj - 1] + costs.insert_cost,
                                               fd[fi][fj] + td[node_i][node_j]});
                    }
                }
            }
        }
    }
    return td[n1 - 1][n2 - 1];
}

TedNode table_tree(const TableModel& t) {
    TedNode root;
    root.label = "table";
    root.children.resize(t.n_rows);
    for (int r = 0; r < t.n_rows; ++r) root.children[r].label = "tr";
    for (const TableCell& c : t.cells) {
        TedNode leaf;
        leaf.label = std::string(c.header ? "th" : "td") + ":" +
                     std::to_string(c.row_span) + "x" + std::to_string(c.col_span);
        leaf.content = c.content;
        root.children[c.row].children.push_back(std::move(leaf));
    }
    return root;
}

double teds(const TableModel& ref, const TableModel& hyp, bool structure_only) {
    const TedNode a = table_tree(ref);
    const TedNode b = table_tree(hyp);
    auto size_of = [](const TedNode& n) {
        FlatTree f;
        flatten_into(n, f);
        return f.post.size();
    };
    TedsCosts costs;
    costs.structure_only = structure_only;
    const double distance = tree_edit_distance(&a, &b, costs);
    const double denom =
        static_cast<double>(std::max<std::size_t>(1, std::max(size_of(a), size_of(b))));
    return std::max(0.0, 1.0 - distance / denom);
}

// ------------------------------------------------------------------
// Document / corpus scoring
// ------------------------------------------------------------------

namespace {

std::vector<std::string> table_sources(const Document& doc) {
    std::vector<std::string> out;
    for (const Block& b : doc.blocks)
        if (b.cls && b.cls->label() == SemanticClass::Label::Table && b.text)
            out.push_back(*b.text);
    return out;
}

std::optional<TableModel> try_parse_table(const std::string& src) {
    try {
        return parse_latex_table(src);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

DocScores score_document(const Document& ref, const Document& hyp,
                         const NormOptions& opts) {
    DocScores s;
    const std::vector<std::string> ref_tokens = normalize_document(ref, opts);
    const std::vector<std::string> hyp_tokens = normalize_document(hyp, opts);
    s.wer = wer(ref_tokens, hyp_tokens);
    s.f1 = word_f1(ref_tokens, hyp_tokens);
    s.edit_dist = norm_edit_distance(join_tokens(ref_tokens), join_tokens(hyp_tokens));
    s.bleu = bleu(ref_tokens, hyp_tokens);

    const std::vector<std::string> ref_tables = table_sources(ref);
    const std::vector<std::string> hyp_tables = table_sources(hyp);
    const std::size_t pairs = std::max(ref_tables.size(), hyp_tables.size());
    if (pairs > 0) {
        double teds_sum = 0, steds_sum = 0;
        for (std::size_t i = 0; i < pairs; ++i) {
            if (i >= ref_tables.size() || i >= hyp_tables.size()) continue;  // scores 0
            const std::optional<TableModel> r = try_parse_table(ref_tables[i]);
            const std::optional<TableModel> h = try_parse_table(hyp_tables[i]);
            if (!r || !h) continue;  // unparseable pair scores 0
            teds_sum += teds(*r, *h, /*structure_only=*/false);
            steds_sum += teds(*r, *h, /*structure_only=*/true);
        }
        s.teds = teds_sum / static_cast<double>(pairs);
        s.s_teds = steds_sum / static_cast<double>(pairs);
    }
    return s;
}

CorpusReport score_corpus(const std::vector<Document>& refs,
                          const std::vector<Document>& hyps,
                          const NormOptions& opts) {
    if (refs.size() != hyps.size())
        throw ContractError("reference and hypothesis corpora differ in size");
    CorpusReport report;
    report.documents.reserve(refs.size());
    double wer_sum = 0, f1_sum = 0, edit_sum = 0, bleu_sum = 0;
    double teds_sum = 0, steds_sum = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        DocScores s = score_document(refs[i], hyps[i], opts);
        wer_sum += s.wer;
        f1_sum += s.f1;
        edit_sum += s.edit_dist;
        bleu_sum += s.bleu;
        if (s.teds) {
            teds_sum += *s.teds;
            steds_sum += *s.s_teds;
            ++report.documents_with_tables;
        }
        report.documents.push_back(std::move(s));
    }
    const double n = static_cast<double>(refs.size());
    if (!refs.empty()) {
        report.aggregate.wer = wer_sum / n;
        report.aggregate.f1 = f1_sum / n;
        report.aggregate.edit_dist = edit_sum / n;
        report.aggregate.bleu = bleu_sum / n;
    }
    if (report.documents_with_tables > 0) {
        report.aggregate.teds = teds_sum / report.documents_with_tables;
        report.aggregate.s_teds = steds_sum / report.documents_with_tables;
    }
    return report;
}

}  // namespace docparse
