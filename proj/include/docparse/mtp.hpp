#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docparse/errors.hpp"

namespace docparse {

// Dense row-major matrix; all simulation arithmetic is plain 64-bit.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int rows, int cols) : rows(rows), cols(cols), data(std::size_t(rows) * cols, 0.0) {}

    double& at(int r, int c) { return data[std::size_t(r) * cols + c]; }
    double at(int r, int c) const { return data[std::size_t(r) * cols + c]; }

    static Matrix identity(int n);
};

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);

using HiddenState = std::vector<double>;
using TokenId = int;

// Weights of the multi-token head chain: logits for the k-th extra token
// come from head * (l1 * (h + l2 * e_prev)). One (l1, l2) pair is shared
// across heads; embed holds one row per vocabulary token.
struct MTPWeights {
    int d = 0;  // hidden width
    int V = 0;  // vocabulary size
    int m = 1;  // tokens emitted per decode step
    Matrix l1;     // d x d
    Matrix l2;     // d x d
    Matrix head;   // V x d
    Matrix embed;  // V x d

    void validate() const;  // ContractError on inconsistent dimensions
    std::vector<double> embed_row(TokenId token) const;
};

// head * (l1 * (h + l2 * prev_embed)); purely linear, no activation.
std::vector<double> mtp_logits(const HiddenState& h, const std::vector<double>& prev_embed,
                               const MTPWeights& w);

// Deterministic single-step decoder: equal prefixes give equal states.
class BaseDecoder {
public:
    virtual ~BaseDecoder() = default;
    virtual HiddenState hidden(const std::vector<TokenId>& prefix) const = 0;
};

// Table-backed decoder; prefixes without an entry fall back to default_h.
class LookupDecoder : public BaseDecoder {
public:
    LookupDecoder(int d) : default_h(d, 0.0) {}
    HiddenState hidden(const std::vector<TokenId>& prefix) const override;

    std::map<std::vector<TokenId>, HiddenState> table;
    HiddenState default_h;
};

// Seeded hash decoder: a pseudo-random but fully deterministic state per
// prefix. Handy for simulation runs without enumerating a table.
class HashDecoder : public BaseDecoder {
public:
    HashDecoder(int d, std::uint64_t seed) : d_(d), seed_(seed) {}
    HiddenState hidden(const std::vector<TokenId>& prefix) const override;

private:
    int d_;
    std::uint64_t seed_;
};

// Lowest-index argmax, so ties are deterministic.
TokenId argmax(const std::vector<double>& logits);

// Plain greedy decoding with the base decoder and head alone. Returns the
// full sequence (prompt included); max_len caps the total length; eos, when
// given, is emitted and then decoding stops.
std::vector<TokenId> greedy_decode(const BaseDecoder& base, const MTPWeights& w,
                                   const std::vector<TokenId>& prompt, int max_len,
                                   std::optional<TokenId> eos = std::nullopt);

// Multi-token greedy decoding: each step runs the base once, takes the
// head's argmax, then chains m-1 extra tokens through mtp_logits on the
// previously emitted token's embedding. No verification pass; an eos inside
// a block discards the rest of that block. m == 1 reduces to greedy_decode.
std::vector<TokenId> greedy_decode_multi(const BaseDecoder& base, const MTPWeights& w,
                                         const std::vector<TokenId>& prompt, int m,
                                         int max_len,
                                         std::optional<TokenId> eos = std::nullopt);

// Training-mode view of extra head k (2 <= k <= w.m): mtp_logits at every
// position with the gold token's embedding in place of the predicted one.
std::vector<std::vector<double>> teacher_forced_logits(
    const std::vector<HiddenState>& states, const std::vector<TokenId>& gold_tokens,
    const MTPWeights& w, int k);

// JSON bundle: weights, the base decoder description, and an optional eos id.
struct MtpBundle {
    MTPWeights weights;
    std::unique_ptr<BaseDecoder> base;
    std::optional<TokenId> eos;
};

MtpBundle load_mtp_bundle(std::istream& in);

}  // namespace docparse
