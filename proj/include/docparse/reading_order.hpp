#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "docparse/doc_model.hpp"

namespace docparse {

// The two block-ordering policies of the output format.
//  - CanonicalV11: Page-Headers first, then the body classes (Text,
//    Section-Header, List-Item, Title, Formula) in natural reading order,
//    then the floating classes grouped as Footnote, Page-Footer, Table,
//    Picture, Caption.
//  - NaturalTC: one natural reading order over all blocks, floating
//    elements included.
enum class OrderPolicy { CanonicalV11, NaturalTC };

struct OrderViolation {
    std::size_t earlier_index = 0;
    std::size_t later_index = 0;
    std::string rule;  // "natural-order" or "class-segment"
    std::string detail;
};

// Natural reading order: blocks are clustered into columns (two blocks
// share a column when their x-intervals overlap by at least half of the
// narrower interval; columns are the connected components), columns go
// left to right, and within a column blocks go top to bottom with ties
// broken by x0 and then original index. Returns a permutation: element j
// is the original index of the block at sorted position j.
// Every block needs a bbox (ContractError otherwise).
std::vector<std::size_t> natural_order(const std::vector<Block>& blocks);

// The v1.1 canonical order; every block needs a bbox and a class
// (ContractError otherwise). Unknown classes travel with the body segment.
std::vector<std::size_t> canonical_order_v11(const std::vector<Block>& blocks);

std::vector<std::size_t> order_permutation(const std::vector<Block>& blocks,
                                           OrderPolicy policy);

// Empty iff the document already is in policy order; otherwise one
// violation per adjacent inversion against the policy's ranking.
std::vector<OrderViolation> check_order(const Document& doc, OrderPolicy policy);

// Returns the document re-sorted under the policy.
Document reorder(const Document& doc, OrderPolicy policy);

// Like reorder, but blocks lacking the fields the policy needs keep their
// original positions and only the remaining blocks are re-sorted around
// them. Keeps pipelines over lenient parses total.
Document reorder_lenient(const Document& doc, OrderPolicy policy);

}  // namespace docparse
