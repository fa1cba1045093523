#include "docparse/mtp.hpp"

#include <istream>

#include "json.hpp"

namespace docparse {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != m.cols)
        throw ContractError("matvec dimension mismatch");
    std::vector<double> out(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        for (int c = 0; c < m.cols; ++c) acc += m.at(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

void MTPWeights::validate() const {
    if (d < 1 || V < 1) throw ContractError("weights need d >= 1 and V >= 1");
    if (m < 1) throw ContractError("tokens per step must be at least 1");
    auto expect = [](const Matrix& mat, int r, int c, const char* name) {
        if (mat.rows != r || mat.cols != c)
            throw ContractError(std::string(name) + " has wrong dimensions");
    };
    // The extra linear layers exist only when more than one token is
    // predicted per step.
    if (m > 1) {
        expect(l1, d, d, "l1");
        expect(l2, d, d, "l2");
    }
    expect(head, V, d, "head");
    expect(embed, V, d, "embed");
}

std::vector<double> MTPWeights::embed_row(TokenId token) const {
    if (token < 0 || token >= V) throw ContractError("token id outside vocabulary");
    std::vector<double> row(d);
    for (int c = 0; c < d; ++c) row[c] = embed.at(token, c);
    return row;
}

std::vector<double> mtp_logits(const HiddenState& h, const std::vector<double>& prev_embed,
                               const MTPWeights& w) {
    if (static_cast<int>(h.size()) != w.d || static_cast<int>(prev_embed.size()) != w.d)
        throw ContractError("hidden state or embedding width mismatch");
    if (w.l1.rows != w.d || w.l1.cols != w.d || w.l2.rows != w.d || w.l2.cols != w.d ||
        w.head.rows != w.V || w.head.cols != w.d)
        throw ContractError("weight dimensions inconsistent");
    std::vector<double> inner = matvec(w.l2, prev_embed);
    for (int i = 0; i < w.d; ++i) inner[i] += h[i];
    return matvec(w.head, matvec(w.l1, inner));
}

HiddenState LookupDecoder::hidden(const std::vector<TokenId>& prefix) const {
    auto it = table.find(prefix);
    return it != table.end() ? it->second : default_h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

HiddenState HashDecoder::hidden(const std::vector<TokenId>& prefix) const {
    std::uint64_t acc = seed_;
    for (TokenId t : prefix) acc = splitmix64(acc ^ (static_cast<std::uint64_t>(t) + 1));
    HiddenState h(d_);
    for (int i = 0; i < d_; ++i) {
        acc = splitmix64(acc);
        // map to [-1, 1)
        h[i] = static_cast<double>(acc >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
    }
    return h;
}

TokenId argmax(const std::vector<double>& logits) {
    if (logits.empty()) throw ContractError("argmax over empty logits");
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return static_cast<TokenId>(best);
}

std::vector<TokenId> greedy_decode(const BaseDecoder& base, const MTPWeights& w,
                                   const std::vector<TokenId>& prompt, int max_len,
                                   std::optional<TokenId> eos) {
    if (max_len < static_cast<int>(prompt.size()))
        throw ContractError("max_len shorter than the prompt");
    std::vector<TokenId> seq = prompt;
    while (static_cast<int>(seq.size()) < max_len) {
        const HiddenState h = base.hidden(seq);
        const TokenId t = argmax(matvec(w.head, h));
        seq.push_back(t);
        if (eos && t == *eos) break;
    }
    return seq;
}

std::vector<TokenId> greedy_decode_multi(const BaseDecoder& base, const MTPWeights& w,
                                         const std::vector<TokenId>& prompt, int m,
                                         int max_len, std::optional<TokenId> eos) {
    if (m < 1 || m > w.m)
        throw ContractError("m must lie in [1, weights.m]");
    if (max_len < static_cast<int>(prompt.size()))
        throw ContractError("max_len shorter than the prompt");

    std::vector<TokenId> seq = prompt;
    while (static_cast<int>(seq.size()) < max_len) {
        const HiddenState h = base.hidden(seq);
        TokenId prev = argmax(matvec(w.head, h));
        seq.push_back(prev);
        if (eos && prev == *eos) return seq;
        for (int k = 2; k <= m && static_cast<int>(seq.size()) < max_len; ++k) {
            const TokenId t = argmax(mtp_logits(h, w.embed_row(prev), w));
            seq.push_back(t);
            if (eos && t == *eos) return seq;  // rest of the block is discarded
            prev = t;
        }
    }
    return seq;
}

std::vector<std::vector<double>> teacher_forced_logits(
    const std::vector<HiddenState>& states, const std::vector<TokenId>& gold_tokens,
    const MTPWeights& w, int k) {
    if (states.size() != gold_tokens.size())
        throw ContractError("states and gold tokens differ in length");
    if (k < 2 || k > w.m)
        throw ContractError("teacher forcing applies to extra heads 2..m");
    std::vector<std::vector<double>> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        out.push_back(mtp_logits(states[i], w.embed_row(gold_tokens[i]), w));
    return out;
}

// ------------------------------------------------------------------
// JSON weight bundles
// ------------------------------------------------------------------

namespace {

Matrix matrix_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array()) throw IoError(name + " must be an array of rows");
    Matrix m;
    m.rows = static_cast<int>(j.size());
    for (const auto& row : j) {
        if (!row.is_array()) throw IoError(name + " rows must be arrays");
        if (m.cols == 0) m.cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != m.cols)
            throw IoError(name + " rows have uneven lengths");
        for (const auto& v : row) m.data.push_back(v.get<double>());
    }
    return m;
}

}  // namespace

MtpBundle load_mtp_bundle(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("weights JSON malformed: ") + e.what());
    }
    if (j.contains("heads"))
        throw IoError(
            "per-head weight lists are not supported; provide the shared l1/l2 pair");

    MtpBundle bundle;
    MTPWeights& w = bundle.weights;
    try {
        w.d = j.at("d").get<int>();
        w.V = j.at("V").get<int>();
        w.m = j.value("m", 1);
        w.head = matrix_from_json(j.at("head"), "head");
        w.embed = matrix_from_json(j.at("embed"), "embed");
        if (j.contains("l1")) w.l1 = matrix_from_json(j.at("l1"), "l1");
        if (j.contains("l2")) w.l2 = matrix_from_json(j.at("l2"), "l2");
        if (j.contains("eos")) bundle.eos = j.at("eos").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("weights JSON malformed: ") + e.what());
    }
    w.validate();

    const nlohmann::json base = j.value("base", nlohmann::json::object());
    const std::string type = base.value("type", "hash");
    if (type == "hash") {
        bundle.base = std::make_unique<HashDecoder>(w.d, base.value("seed", 0ULL));
    } else if (type == "lookup") {
        auto decoder = std::make_unique<LookupDecoder>(w.d);
        if (base.contains("default"))
            decoder->default_h = base.at("default").get<std::vector<double>>();
        if (static_cast<int>(decoder->default_h.size()) != w.d)
            throw IoError("base.default must have width d");
        for (const auto& entry : base.value("entries", nlohmann::json::array())) {
            std::vector<TokenId> prefix = entry.at("prefix").get<std::vector<TokenId>>();
            HiddenState h = entry.at("h").get<HiddenState>();
            if (static_cast<int>(h.size()) != w.d)
                throw IoError("base entry state must have width d");
            decoder->table[std::move(prefix)] = std::move(h);
        }
        bundle.base = std::move(decoder);
    } else {
        throw IoError("unknown base decoder type \"" + type + "\"");
    }
    return bundle;
}

}  // namespace docparse
