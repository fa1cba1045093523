#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "docparse/doc_model.hpp"
#include "docparse/tables.hpp"

namespace docparse {

// Text normalization applied before scoring. The default profile lowercases,
// collapses whitespace, strips Markdown/TeX markup, and excludes Table and
// Formula blocks from document-level text; the mask-out profile additionally
// excludes Page-Header and Page-Footer blocks.
struct NormOptions {
    bool lowercase = true;
    bool collapse_whitespace = true;
    bool strip_markup = true;
    std::set<SemanticClass> exclude_classes = {
        SemanticClass(SemanticClass::Label::Table),
        SemanticClass(SemanticClass::Label::Formula),
    };

    static NormOptions plain_profile() { return NormOptions{}; }
    static NormOptions maskout_profile();
    // Scores everything verbatim (no exclusions, markup kept).
    static NormOptions raw_profile();
};

// NFKC, markup stripping, case folding, whitespace handling -- as a string.
std::string normalize_text(std::string_view text, const NormOptions& opts);

// The same pipeline, whitespace-split into word tokens.
std::vector<std::string> normalize(std::string_view text, const NormOptions& opts);

// Concatenates the text of every non-excluded block, then normalizes.
std::vector<std::string> normalize_document(const Document& doc,
                                            const NormOptions& opts);

// Word-level Levenshtein distance over the reference length (>= 0; the
// empty-reference denominator is clamped to 1).
double wer(const std::vector<std::string>& ref_tokens,
           const std::vector<std::string>& hyp_tokens);

// Multiset token precision/recall F1 in [0,1]; 1 when both sides are empty.
double word_f1(const std::vector<std::string>& ref_tokens,
               const std::vector<std::string>& hyp_tokens);

// Codepoint-level Levenshtein / max(1, max length), in [0,1].
double norm_edit_distance(std::string_view ref, std::string_view hyp);

// Sentence BLEU: geometric mean of modified n-gram precisions (add-one
// smoothing only where a precision would be zero) times the brevity penalty
// min(1, e^(1 - |ref|/|hyp|)). Empty hypothesis scores 0 by definition.
double bleu(const std::vector<std::string>& ref_tokens,
            const std::vector<std::string>& hyp_tokens, int max_n = 4);

// Rooted ordered labeled tree for edit-distance scoring.
struct TedNode {
    std::string label;
    std::string content;
    std::vector<TedNode> children;
};

struct TedsCosts {
    double insert_cost = 1.0;
    double delete_cost = 1.0;
    // Rename: 1 when labels differ; otherwise the normalized character
    // edit distance of the contents (0 under structure_only).
    bool structure_only = false;

    double rename(const TedNode& a, const TedNode& b) const;
};

// Exact ordered-tree edit distance (Zhang-Shasha dynamic program).
// nullptr stands for the empty tree.
double tree_edit_distance(const TedNode* t1, const TedNode* t2,
                          const TedsCosts& costs = {});
inline double tree_edit_distance(const TedNode& t1, const TedNode& t2,
                                 const TedsCosts& costs = {}) {
    return tree_edit_distance(&t1, &t2, costs);
}

// Table as a tree: root -> row nodes -> cell leaves; cell labels carry the
// td/th tag and both spans, cell contents ride on the leaves.
TedNode table_tree(const TableModel& t);

// Tree-edit-distance similarity: 1 - TED / max(1, max(|ref|, |hyp|)),
// clamped at 0. structure_only ignores cell contents (S-TEDS).
double teds(const TableModel& ref, const TableModel& hyp, bool structure_only);

// Per-document scores; teds/s_teds are absent when neither side has tables.
struct DocScores {
    double wer = 0;
    double f1 = 1;
    double edit_dist = 0;
    double bleu = 1;
    std::optional<double> teds;
    std::optional<double> s_teds;
};

// Text metrics over non-excluded blocks; table metrics pair the i-th
// Table block of ref with the i-th of hyp (LaTeX content), unpaired or
// unparseable tables scoring 0.
DocScores score_document(const Document& ref, const Document& hyp,
                         const NormOptions& opts);

struct CorpusReport {
    std::vector<DocScores> documents;
    DocScores aggregate;  // per-document mean, in input order
    std::size_t documents_with_tables = 0;
};

CorpusReport score_corpus(const std::vector<Document>& refs,
                          const std::vector<Document>& hyps,
                          const NormOptions& opts);

}  // namespace docparse
