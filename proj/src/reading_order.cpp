#include "docparse/reading_order.hpp"

#include <algorithm>
#include <numeric>

#include "docparse/errors.hpp"

namespace docparse {

namespace {

// Overlap >= 50% of the narrower x-interval; zero-width intervals fall back
// to plain intersection.
bool same_column(const BBox& a, const BBox& b) {
    const int lo = std::max(a.gx0, b.gx0);
    const int hi = std::min(a.gx1, b.gx1);
    const int overlap = hi - lo;
    const int narrower = std::min(a.gx1 - a.gx0, b.gx1 - b.gx0);
    if (narrower <= 0) return overlap >= 0;
    return 2 * overlap >= narrower;
}

// Natural order of a subset of blocks, given by original indices.
std::vector<std::size_t> natural_order_of(const std::vector<Block>& blocks,
                                          std::vector<std::size_t> subset) {
    const std::size_t n = subset.size();
    if (n == 0) return subset;

    // Connected components under the shared-column relation.
    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](std::size_t i) {
        while (comp[i] != i) {
            comp[i] = comp[comp[i]];
            i = comp[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (same_column(*blocks[subset[i]].bbox, *blocks[subset[j]].bbox)) {
                const std::size_t a = find(i), b = find(j);
                if (a != b) comp[a] = b;
            }
    std::vector<std::size_t> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = find(i);

    // Column sort key: (min x0, min y0, min original index) of its members.
    struct ColumnKey {
        int x0, y0;
        std::size_t index;
    };
    std::vector<ColumnKey> key(n, ColumnKey{kGridX + 1, kGridY + 1, ~std::size_t{0}});
    for (std::size_t i = 0; i < n; ++i) {
        const BBox& box = *blocks[subset[i]].bbox;
        ColumnKey& k = key[root[i]];
        k.x0 = std::min(k.x0, box.gx0);
        k.y0 = std::min(k.y0, box.gy0);
        k.index = std::min(k.index, subset[i]);
    }

    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
        if (root[a] != root[b]) {
            const ColumnKey& ka = key[root[a]];
            const ColumnKey& kb = key[root[b]];
            if (ka.x0 != kb.x0) return ka.x0 < kb.x0;
            if (ka.y0 != kb.y0) return ka.y0 < kb.y0;
            return ka.index < kb.index;
        }
        const BBox& ba = *blocks[subset[a]].bbox;
        const BBox& bb = *blocks[subset[b]].bbox;
        if (ba.gy0 != bb.gy0) return ba.gy0 < bb.gy0;
        if (ba.gx0 != bb.gx0) return ba.gx0 < bb.gx0;
        return subset[a] < subset[b];
    });

    std::vector<std::size_t> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = subset[pos[j]];
    return out;
}

enum class Segment { Leading = 0, Body = 1, Trailing = 2 };

// Trailing classes keep the listed group order.
int trailing_group(const SemanticClass& cls) {
    switch (cls.label()) {
        case SemanticClass::Label::Footnote: return 0;
        case SemanticClass::Label::PageFooter: return 1;
        case SemanticClass::Label::Table: return 2;
        case SemanticClass::Label::Picture: return 3;
        case SemanticClass::Label::Caption: return 4;
        default: return -1;
    }
}

Segment segment_of(const SemanticClass& cls) {
    if (cls.label() == SemanticClass::Label::PageHeader) return Segment::Leading;
    if (trailing_group(cls) >= 0) return Segment::Trailing;
    return Segment::Body;  // body classes and unknown classes flow naturally
}

void require_bbox(const std::vector<Block>& blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (!blocks[i].bbox)
            throw ContractError("block " + std::to_string(i) + " has no bbox");
}

void require_bbox_and_class(const std::vector<Block>& blocks) {
    require_bbox(blocks);
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (!blocks[i].cls)
            throw ContractError("block " + std::to_string(i) + " has no class");
}

bool policy_fields_present(const Block& b, OrderPolicy policy) {
    if (!b.bbox) return false;
    return policy == OrderPolicy::NaturalTC || b.cls.has_value();
}

}  // namespace

std::vector<std::size_t> natural_order(const std::vector<Block>& blocks) {
    require_bbox(blocks);
    std::vector<std::size_t> all(blocks.size());
    std::iota(all.begin(), all.end(), 0);
    return natural_order_of(blocks, std::move(all));
}

std::vector<std::size_t> canonical_order_v11(const std::vector<Block>& blocks) {
    require_bbox_and_class(blocks);

    std::vector<std::size_t> leading, body;
    std::vector<std::size_t> trailing[5];
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const SemanticClass& cls = *blocks[i].cls;
        switch (segment_of(cls)) {
            case Segment::Leading: leading.push_back(i); break;
            case Segment::Body: body.push_back(i); break;
            case Segment::Trailing: trailing[trailing_group(cls)].push_back(i); break;
        }
    }

    std::vector<std::size_t> out;
    out.reserve(blocks.size());
    for (std::size_t i : natural_order_of(blocks, std::move(leading))) out.push_back(i);
    for (std::size_t i : natural_order_of(blocks, std::move(body))) out.push_back(i);
    for (auto& group : trailing)
        for (std::size_t i : natural_order_of(blocks, std::move(group))) out.push_back(i);
    return out;
}

std::vector<std::size_t> order_permutation(const std::vector<Block>& blocks,
                                           OrderPolicy policy) {
    return policy == OrderPolicy::CanonicalV11 ? canonical_order_v11(blocks)
                                               : natural_order(blocks);
}

std::vector<OrderViolation> check_order(const Document& doc, OrderPolicy policy) {
    const std::vector<std::size_t> perm = order_permutation(doc.blocks, policy);
    std::vector<std::size_t> rank(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j) rank[perm[j]] = j;

    std::vector<OrderViolation> out;
    for (std::size_t i = 0; i + 1 < rank.size(); ++i) {
        if (rank[i] <= rank[i + 1]) continue;
        OrderViolation v;
        v.earlier_index = i;
        v.later_index = i + 1;
        const Block& a = doc.blocks[i];
        const Block& b = doc.blocks[i + 1];
        bool segment_clash = false;
        if (policy == OrderPolicy::CanonicalV11) {
            auto seg_key = [](const Block& blk) {
                const Segment s = segment_of(*blk.cls);
                return s == Segment::Trailing ? 2 + trailing_group(*blk.cls)
                                              : static_cast<int>(s);
            };
            segment_clash = seg_key(a) != seg_key(b);
        }
        v.rule = segment_clash ? "class-segment" : "natural-order";
        v.detail = "block " + std::to_string(i) +
                   (a.cls ? " (" + a.cls->name() + ")" : "") + " should follow block " +
                   std::to_string(i + 1) + (b.cls ? " (" + b.cls->name() + ")" : "");
        out.push_back(std::move(v));
    }
    return out;
}

Document reorder(const Document& doc, OrderPolicy policy) {
    const std::vector<std::size_t> perm = order_permutation(doc.blocks, policy);
    Document out;
    out.prompt = doc.prompt;
    out.page = doc.page;
    out.blocks.reserve(doc.blocks.size());
    for (std::size_t i : perm) out.blocks.push_back(doc.blocks[i]);
    return out;
}

Document reorder_lenient(const Document& doc, OrderPolicy policy) {
    std::vector<std::size_t> movable;
    std::vector<Block> subset;
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        if (policy_fields_present(doc.blocks[i], policy)) {
            movable.push_back(i);
            subset.push_back(doc.blocks[i]);
        }
    }
    const std::vector<std::size_t> perm = order_permutation(subset, policy);

    Document out;
    out.prompt = doc.prompt;
    out.page = doc.page;
    out.blocks = doc.blocks;
    for (std::size_t j = 0; j < perm.size(); ++j)
        out.blocks[movable[j]] = subset[perm[j]];
    return out;
}

}  // namespace docparse
