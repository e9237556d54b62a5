#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "powertalk/types.hpp"

namespace powertalk {

/// Information bits per unit per slot when the load is stable. TDMA serves
/// one unit per slot; full duplex uses uniquely decodable adder-channel
/// codebooks whose block lengths step with the number of units.
double stable_rate(Mode mode, int units);

/// Full-duplex codeword length in slots (the reciprocal of the stable
/// rate); throws std::out_of_range beyond the supported 1..18 units.
int fd_block_length(int units);

/// Uniquely decodable codebook for the binary-input adder channel: each
/// unit holds a pair of binary codewords and the per-slot integer sums of
/// the transmitted words identify every unit's bit. Immutable.
class UDCodebook {
public:
    /// Takes the first `units` rows of the signed difference construction
    /// for the matching block length; the positive part of a row is the
    /// codeword for 1, the negative part the codeword for 0.
    static UDCodebook build(int units);

    int units() const { return units_; }
    int block_length() const { return block_len_; }
    const std::vector<uint8_t>& word(int unit, int bit) const;

    /// Per-slot sums of all units' codewords for one bit vector.
    std::vector<int> superpose(std::span<const uint8_t> bits) const;

    /// Unique preimage of a sum sequence; nullopt signals a corrupted
    /// sequence with no preimage (e.g. a load change mid-block).
    std::optional<std::vector<uint8_t>> decode_sums(std::span<const int> sums) const;

private:
    int units_ = 0;
    int block_len_ = 0;
    std::vector<std::array<std::vector<uint8_t>, 2>> words_;
    std::unordered_map<uint64_t, uint32_t> preimage_;  // packed sums -> bit vector
};

/// Decoder for the (K-1)-user view at one receiver: per-slot Hamming-weight
/// estimates of the other units' bits are the sum sequence of the
/// sub-codebook that excludes the receiver.
class SumDecoder {
public:
    SumDecoder(const UDCodebook& codebook, int exclude_unit);

    int block_length() const { return block_len_; }
    /// Other units' bits in unit order (receiver skipped); nullopt when the
    /// weight sequence has no preimage.
    std::optional<std::vector<uint8_t>> decode(std::span<const int> weights) const;

private:
    int users_ = 0;
    int block_len_ = 0;
    std::unordered_map<uint64_t, uint32_t> preimage_;
};

/// One-shot convenience wrapper around SumDecoder.
std::optional<std::vector<uint8_t>> receiver_decode(const UDCodebook& codebook,
                                                    int receiver,
                                                    std::span<const int> weights);

}  // namespace powertalk
