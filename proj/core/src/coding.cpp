#include "powertalk/coding.hpp"

#include <stdexcept>

namespace powertalk {

namespace {

// Block length per unit count; rates are 1/length.
constexpr int kMaxUsers = 18;
constexpr int kBlockLength[kMaxUsers + 1] = {0, 1, 2, 2, 3, 3, 4, 4, 4,
                                             5, 5, 6, 6, 6, 7, 7, 8, 8, 8};

// Signed difference rows per block length. Any subset of rows keeps the
// sum map injective, so codebooks take prefixes. Found by exhaustive
// search; the build-time table construction re-verifies injectivity.
const std::vector<std::vector<int8_t>>& difference_rows(int block_len) {
    static const std::vector<std::vector<std::vector<int8_t>>> tables = {
        // n = 1, 1 user
        {{1}},
        // n = 2, 3 users
        {{1, 0}, {1, 1}, {1, -1}},
        // n = 3, 5 users
        {{1, -1, -1}, {1, 0, -1}, {0, 1, -1}, {1, 1, -1}, {1, -1, 1}},
        // n = 4, 8 users
        {{1, -1, -1, -1},
         {1, 0, -1, -1},
         {0, 1, -1, -1},
         {1, 1, -1, -1},
         {1, -1, 0, -1},
         {1, -1, 1, -1},
         {1, -1, -1, 1},
         {1, 1, 1, 1}},
        // n = 5, 10 users
        {{1, -1, -1, -1, -1},
         {1, 0, -1, -1, -1},
         {0, 1, -1, -1, -1},
         {1, 1, -1, -1, -1},
         {1, -1, 0, -1, -1},
         {1, -1, 1, -1, -1},
         {1, -1, -1, 0, -1},
         {0, 1, 1, 0, -1},
         {1, 1, 0, 1, 0},
         {1, 1, -1, -1, 1}},
        // n = 6, 13 users
        {{1, -1, -1, -1, -1, -1},
         {1, 0, -1, -1, -1, -1},
         {0, 1, -1, -1, -1, -1},
         {1, 1, -1, -1, -1, -1},
         {1, -1, 0, -1, -1, -1},
         {1, -1, 1, -1, -1, -1},
         {1, -1, -1, 0, -1, -1},
         {0, 1, 1, 0, -1, -1},
         {1, -1, -1, -1, 0, -1},
         {1, 1, 1, 1, 0, -1},
         {0, 1, -1, -1, 1, -1},
         {1, 1, -1, 1, -1, 1},
         {1, 1, 1, -1, 0, 1}},
        // n = 7, 15 users
        {{1, -1, -1, -1, -1, -1, -1},
         {1, 0, -1, -1, -1, -1, -1},
         {0, 1, -1, -1, -1, -1, -1},
         {1, 1, -1, -1, -1, -1, -1},
         {1, -1, 0, -1, -1, -1, -1},
         {1, -1, 1, -1, -1, -1, -1},
         {1, -1, -1, 0, -1, -1, -1},
         {0, 1, 1, 0, -1, -1, -1},
         {1, -1, -1, -1, 0, -1, -1},
         {0, 1, 1, 1, 0, -1, -1},
         {1, -1, -1, -1, -1, 0, -1},
         {0, 1, 1, -1, 1, 0, -1},
         {1, -1, -1, 0, -1, 1, -1},
         {1, 1, -1, 1, 0, -1, 1},
         {1, 1, 0, -1, -1, 1, 1}},
        // n = 8, 18 users
        {{1, 1, 1, 1, 1, 0, 1, 0},
         {0, 0, 1, 1, 0, 1, 1, 0},
         {1, 1, 0, 1, -1, 0, -1, 0},
         {1, 0, -1, -1, -1, 0, 1, 1},
         {1, 0, 0, 0, 1, -1, -1, -1},
         {1, 0, 0, 0, 0, 1, -1, 1},
         {1, 0, -1, -1, 1, 1, 0, 0},
         {1, 0, 1, 1, -1, 0, -1, 0},
         {1, -1, 0, 1, -1, 1, 1, 1},
         {1, 1, -1, 0, 0, 1, 1, 1},
         {1, 0, 0, 0, 1, -1, 0, 0},
         {0, 1, 1, -1, 1, 0, -1, 0},
         {1, 1, -1, 1, -1, -1, 1, -1},
         {1, 1, -1, -1, 1, 0, 1, 1},
         {1, -1, 0, 1, 1, -1, -1, 1},
         {1, -1, -1, -1, -1, -1, 1, 1},
         {1, 1, 1, -1, -1, -1, 0, 1},
         {1, -1, 1, -1, -1, -1, 1, -1}},
    };
    return tables.at(block_len - 1);
}

uint64_t pack_sums(std::span<const int> sums) {
    uint64_t key = 0;
    for (size_t t = 0; t < sums.size(); ++t) {
        if (sums[t] < 0 || sums[t] > 255) return ~0ull;  // never a valid key
        key |= (uint64_t)(uint8_t)sums[t] << (8 * t);
    }
    return key;
}

template <class Word>
std::unordered_map<uint64_t, uint32_t> build_preimage_table(
    const std::vector<std::array<Word, 2>*>& words, int block_len) {
    std::unordered_map<uint64_t, uint32_t> table;
    const int users = (int)words.size();
    table.reserve(1u << users);
    std::vector<int> sums(block_len);
    for (uint32_t bits = 0; bits < (1u << users); ++bits) {
        std::fill(sums.begin(), sums.end(), 0);
        for (int u = 0; u < users; ++u) {
            const auto& w = (*words[u])[(bits >> u) & 1];
            for (int t = 0; t < block_len; ++t) sums[t] += w[t];
        }
        auto [it, inserted] = table.emplace(pack_sums(sums), bits);
        if (!inserted)
            throw std::logic_error("codebook: sum map is not injective");
    }
    return table;
}

}  // namespace

double stable_rate(Mode mode, int units) {
    if (units < 1) throw std::out_of_range("stable rate: need at least one unit");
    if (mode == Mode::tdma) return 1.0 / units;
    return 1.0 / fd_block_length(units);
}

int fd_block_length(int units) {
    if (units < 1 || units > kMaxUsers)
        throw std::out_of_range("full-duplex coding supports 1 to 18 units");
    return kBlockLength[units];
}

UDCodebook UDCodebook::build(int units) {
    UDCodebook cb;
    cb.units_ = units;
    cb.block_len_ = fd_block_length(units);
    const auto& rows = difference_rows(cb.block_len_);
    cb.words_.resize(units);
    for (int u = 0; u < units; ++u) {
        auto& pair = cb.words_[u];
        pair[0].assign(cb.block_len_, 0);
        pair[1].assign(cb.block_len_, 0);
        for (int t = 0; t < cb.block_len_; ++t) {
            const int d = rows[u][t];
            if (d > 0) pair[1][t] = 1;
            if (d < 0) pair[0][t] = 1;
        }
    }
    std::vector<std::array<std::vector<uint8_t>, 2>*> ptrs;
    for (auto& w : cb.words_) ptrs.push_back(&w);
    cb.preimage_ = build_preimage_table(ptrs, cb.block_len_);
    return cb;
}

const std::vector<uint8_t>& UDCodebook::word(int unit, int bit) const {
    if (unit < 0 || unit >= units_ || bit < 0 || bit > 1)
        throw std::invalid_argument("codebook: bad word index");
    return words_[unit][bit];
}

std::vector<int> UDCodebook::superpose(std::span<const uint8_t> bits) const {
    if ((int)bits.size() != units_)
        throw std::invalid_argument("codebook: one bit per unit required");
    std::vector<int> sums(block_len_, 0);
    for (int u = 0; u < units_; ++u) {
        const auto& w = words_[u][bits[u] ? 1 : 0];
        for (int t = 0; t < block_len_; ++t) sums[t] += w[t];
    }
    return sums;
}

std::optional<std::vector<uint8_t>> UDCodebook::decode_sums(
    std::span<const int> sums) const {
    if ((int)sums.size() != block_len_)
        throw std::invalid_argument("codebook: sum sequence length mismatch");
    const auto it = preimage_.find(pack_sums(sums));
    if (it == preimage_.end()) return std::nullopt;
    std::vector<uint8_t> bits(units_);
    for (int u = 0; u < units_; ++u) bits[u] = (it->second >> u) & 1;
    return bits;
}

SumDecoder::SumDecoder(const UDCodebook& codebook, int exclude_unit) {
    if (exclude_unit < 0 || exclude_unit >= codebook.units())
        throw std::invalid_argument("decoder: excluded unit out of range");
    users_ = codebook.units() - 1;
    block_len_ = codebook.block_length();
    std::vector<std::array<std::vector<uint8_t>, 2>> subwords;
    subwords.reserve(users_);
    for (int u = 0; u < codebook.units(); ++u) {
        if (u == exclude_unit) continue;
        subwords.push_back({codebook.word(u, 0), codebook.word(u, 1)});
    }
    std::vector<std::array<std::vector<uint8_t>, 2>*> ptrs;
    for (auto& w : subwords) ptrs.push_back(&w);
    if (users_ > 0) preimage_ = build_preimage_table(ptrs, block_len_);
}

std::optional<std::vector<uint8_t>> SumDecoder::decode(
    std::span<const int> weights) const {
    if ((int)weights.size() != block_len_)
        throw std::invalid_argument("decoder: weight sequence length mismatch");
    if (users_ == 0) return std::vector<uint8_t>{};
    const auto it = preimage_.find(pack_sums(weights));
    if (it == preimage_.end()) return std::nullopt;
    std::vector<uint8_t> bits(users_);
    for (int u = 0; u < users_; ++u) bits[u] = (it->second >> u) & 1;
    return bits;
}

std::optional<std::vector<uint8_t>> receiver_decode(const UDCodebook& codebook,
                                                    int receiver,
                                                    std::span<const int> weights) {
    return SumDecoder(codebook, receiver).decode(weights);
}

}  // namespace powertalk
