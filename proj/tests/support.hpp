#pragma once

// Test-only helpers: deterministic generators plus oracles that stay
// independent of the library implementations they check.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "docparse/doc_model.hpp"
#include "docparse/metrics.hpp"
#include "docparse/tables.hpp"

namespace testsupport {

using Rng = std::mt19937;

inline int rand_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double rand_unit(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// ------------------------------------------------------------------
// Oracles
// ------------------------------------------------------------------

// Plain memoized recursion, deliberately not the two-row DP used in the
// library.
template <typename Seq>
std::size_t lev_oracle_rec(const Seq& a, const Seq& b, std::size_t i, std::size_t j,
                           std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best = lev_oracle_rec(a, b, i + 1, j + 1, memo) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, lev_oracle_rec(a, b, i + 1, j, memo) + 1);
    best = std::min(best, lev_oracle_rec(a, b, i, j + 1, memo) + 1);
    memo[key] = best;
    return best;
}

template <typename Seq>
std::size_t lev_oracle(const Seq& a, const Seq& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    return lev_oracle_rec(a, b, 0, 0, memo);
}

// Exhaustive search over valid edit mappings (one-to-one, postorder- and
// ancestor-preserving). Exact for small trees.
struct FlatOracleTree {
    std::vector<const docparse::TedNode*> post;
    std::vector<std::vector<char>> anc;  // anc[i][j]: i is a proper ancestor of j
};

inline std::size_t count_nodes(const docparse::TedNode& n) {
    std::size_t total = 1;
    for (const docparse::TedNode& c : n.children) total += count_nodes(c);
    return total;
}

// Postorder visit returning the indices of the visited subtree.
inline std::vector<int> oracle_visit(const docparse::TedNode& n, FlatOracleTree& t) {
    std::vector<int> subtree;
    for (const docparse::TedNode& c : n.children) {
        std::vector<int> cs = oracle_visit(c, t);
        subtree.insert(subtree.end(), cs.begin(), cs.end());
    }
    const int me = static_cast<int>(t.post.size());
    t.post.push_back(&n);
    for (int d : subtree) t.anc[me][d] = 1;
    subtree.push_back(me);
    return subtree;
}

inline FlatOracleTree build_oracle_tree(const docparse::TedNode& root) {
    FlatOracleTree t;
    const std::size_t count = count_nodes(root);
    t.anc.assign(count, std::vector<char>(count, 0));
    oracle_visit(root, t);
    return t;
}

inline double ted_oracle(const docparse::TedNode& a, const docparse::TedNode& b,
                         const docparse::TedsCosts& costs) {
    const FlatOracleTree ta = build_oracle_tree(a);
    const FlatOracleTree tb = build_oracle_tree(b);
    const int n1 = static_cast<int>(ta.post.size());
    const int n2 = static_cast<int>(tb.post.size());

    double best = costs.delete_cost * n1 + costs.insert_cost * n2;
    std::vector<std::pair<int, int>> mapping;

    const std::function<void(int, int, double)> rec = [&](int i, int next_j,
                                                          double cost) {
        if (cost >= best) return;
        if (i == n1) {
            const double total =
                cost + costs.insert_cost * (n2 - static_cast<int>(mapping.size()));
            best = std::min(best, total);
            return;
        }
        // match node i with any admissible j
        for (int j = next_j; j < n2; ++j) {
            bool ok = true;
            for (const auto& [pi, pj] : mapping) {
                if (ta.anc[i][pi] != tb.anc[j][pj]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            mapping.emplace_back(i, j);
            rec(i + 1, j + 1, cost + costs.rename(*ta.post[i], *tb.post[j]));
            mapping.pop_back();
        }
        // delete node i
        rec(i + 1, next_j, cost + costs.delete_cost);
    };
    rec(0, 0, 0.0);
    return best;
}

// Reference BLEU written independently: map-of-vector n-gram counts and a
// straight product instead of the log-sum path.
inline double bleu_reference(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp, int max_n = 4) {
    if (hyp.empty()) return 0.0;
    long double product = 1.0L;
    for (int n = 1; n <= max_n; ++n) {
        std::map<std::vector<std::string>, int> ref_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i)
            ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
        int total = 0, match = 0;
        std::map<std::vector<std::string>, int> hyp_counts;
        for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
            ++hyp_counts[std::vector<std::string>(hyp.begin() + i, hyp.begin() + i + n)];
            ++total;
        }
        for (const auto& [gram, cnt] : hyp_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) match += std::min(cnt, it->second);
        }
        long double p;
        if (match > 0) p = static_cast<long double>(match) / total;
        else p = 1.0L / (total + 1);
        product *= p;
    }
    long double score = std::pow(product, 1.0L / max_n);
    if (hyp.size() < ref.size())
        score *= std::exp(1.0L - static_cast<long double>(ref.size()) / hyp.size());
    return static_cast<double>(score);
}

// ------------------------------------------------------------------
// Generators
// ------------------------------------------------------------------

inline std::string random_word(Rng& rng, int min_len = 1, int max_len = 8,
                               bool spans_safe = true) {
    static const std::string inner = "abcdefghijklmnopqrstuvwxyz0123456789& ->";
    static const std::string edge = "abcdefghijklmnopqrstuvwxyz0123456789";
    const int len = rand_int(rng, min_len, max_len);
    std::string out;
    for (int i = 0; i < len; ++i) {
        const std::string& pool =
            (spans_safe && (i == 0 || i == len - 1)) ? edge : inner;
        out += pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    }
    return out;
}

inline docparse::TableModel random_table(Rng& rng, int max_dim = 8, int max_span = 3,
                                         bool with_headers = false) {
    const int rows = rand_int(rng, 1, max_dim);
    const int cols = rand_int(rng, 1, max_dim);
    std::vector<char> occ(static_cast<std::size_t>(rows) * cols, 0);
    auto at = [&](int r, int c) -> char& { return occ[static_cast<std::size_t>(r) * cols + c]; };

    docparse::TableModel t;
    t.n_rows = rows;
    t.n_cols = cols;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (at(r, c)) continue;
            int cs = std::min(rand_int(rng, 1, max_span), cols - c);
            while (cs > 1) {
                bool free_run = true;
                for (int cc = c; cc < c + cs; ++cc)
                    if (at(r, cc)) free_run = false;
                if (free_run) break;
                --cs;
            }
            int rs = std::min(rand_int(rng, 1, max_span), rows - r);
            while (rs > 1) {
                bool free_rect = true;
                for (int rr = r; rr < r + rs && free_rect; ++rr)
                    for (int cc = c; cc < c + cs; ++cc)
                        if (at(rr, cc)) free_rect = false;
                if (free_rect) break;
                --rs;
            }
            docparse::TableCell cell;
            cell.row = r;
            cell.col = c;
            cell.row_span = rs;
            cell.col_span = cs;
            cell.content = rand_int(rng, 0, 9) == 0 ? "" : random_word(rng);
            cell.header = with_headers && r == 0 && rand_int(rng, 0, 1) == 1;
            for (int rr = r; rr < r + rs; ++rr)
                for (int cc = c; cc < c + cs; ++cc) at(rr, cc) = 1;
            t.cells.push_back(std::move(cell));
        }
    }
    t.validate();
    return t;
}

inline docparse::BBox random_bbox(Rng& rng) {
    const int gx0 = rand_int(rng, 0, docparse::kGridX);
    const int gy0 = rand_int(rng, 0, docparse::kGridY);
    return docparse::BBox::from_grid(gx0, gy0, rand_int(rng, gx0, docparse::kGridX),
                                     rand_int(rng, gy0, docparse::kGridY));
}

// Text safe for tagged-grammar round-trips: anything but '<'.
inline std::string random_block_text(Rng& rng, bool allow_empty) {
    static const std::string pool =
        "abcdefghijklmnopqrstuvwxyz ABCDEFGHIJ 0123456789 .,;:!?()-#*\n";
    const int len = rand_int(rng, allow_empty ? 0 : 1, 30);
    std::string out;
    for (int i = 0; i < len; ++i)
        out += pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    return out;
}

// Paragraph text for box-free documents: non-empty, single-line.
inline std::string random_paragraph(Rng& rng) {
    static const std::string pool =
        "abcdefghijklmnopqrstuvwxyz 0123456789 .,:()";
    const int len = rand_int(rng, 1, 30);
    std::string out;
    for (int i = 0; i < len; ++i)
        out += pool[rand_int(rng, 0, static_cast<int>(pool.size()) - 1)];
    return out;
}

inline docparse::SemanticClass random_class(Rng& rng) {
    using L = docparse::SemanticClass::Label;
    static const L known[] = {L::Title, L::SectionHeader, L::Text, L::ListItem,
                              L::Formula, L::PageHeader, L::PageFooter, L::Footnote,
                              L::Table, L::Picture, L::Caption};
    if (rand_int(rng, 0, 7) == 0) {
        std::string name;
        const int len = rand_int(rng, 1, 6);
        for (int i = 0; i < len; ++i)
            name += static_cast<char>('A' + rand_int(rng, 0, 25));
        return docparse::SemanticClass::from_name(name);
    }
    return docparse::SemanticClass(known[rand_int(rng, 0, 10)]);
}

inline docparse::Document random_document(Rng& rng, docparse::PromptConfig prompt,
                                          int max_blocks = 8) {
    docparse::Document doc;
    doc.prompt = prompt;
    const int n = rand_int(rng, 0, max_blocks);
    for (int i = 0; i < n; ++i) {
        docparse::Block b;
        if (prompt.boxes) b.bbox = random_bbox(rng);
        if (prompt.text_mode != docparse::TextMode::NoText)
            b.text = prompt.boxes ? random_block_text(rng, /*allow_empty=*/true)
                                  : random_paragraph(rng);
        if (prompt.classes && rand_int(rng, 0, 9) < 7) b.cls = random_class(rng);
        doc.blocks.push_back(std::move(b));
    }
    return doc;
}

inline std::vector<std::string> chunk_randomly(Rng& rng, std::string_view s) {
    std::vector<std::string> chunks;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const int cap = static_cast<int>(std::min<std::size_t>(12, s.size() - pos));
        const std::size_t len = static_cast<std::size_t>(rand_int(rng, 1, cap));
        chunks.emplace_back(s.substr(pos, len));
        pos += len;
    }
    return chunks;
}

inline docparse::TedNode random_tree(Rng& rng, int max_nodes, int n_labels = 3,
                                     bool with_content = false) {
    const int n = rand_int(rng, 1, max_nodes);
    std::vector<int> parent(n, -1);
    for (int i = 1; i < n; ++i) parent[i] = rand_int(rng, 0, i - 1);

    std::vector<docparse::TedNode> nodes(n);
    for (int i = 0; i < n; ++i) {
        nodes[i].label = std::string(1, static_cast<char>('A' + rand_int(rng, 0, n_labels - 1)));
        if (with_content && rand_int(rng, 0, 1)) nodes[i].content = random_word(rng, 1, 4);
    }
    // attach children in index order (children were created after parents)
    for (int i = n - 1; i >= 1; --i)
        nodes[parent[i]].children.insert(nodes[parent[i]].children.begin(),
                                         std::move(nodes[i]));
    return std::move(nodes[0]);
}

}  // namespace testsupport
