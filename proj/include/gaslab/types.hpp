// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaslab
{
/// 256-bit EVM word. All arithmetic is modulo 2^256.
using Word = boost::multiprecision::uint256_t;

/// Unbounded non-negative balance in Wei.
using Wei = boost::multiprecision::cpp_int;

/// Gas quantities are 64-bit; overflow is a hard error (see checked_add/checked_mul).
using Gas = std::uint64_t;

using Bytes = std::vector<std::uint8_t>;

struct GasOverflow : std::runtime_error
{
    GasOverflow() : std::runtime_error("gas arithmetic overflow") {}
};

inline Gas checked_add(Gas a, Gas b)
{
    Gas r = a + b;
    if (r < a)
        throw GasOverflow{};
    return r;
}

inline Gas checked_mul(Gas a, Gas b)
{
    if (a != 0 && b > std::numeric_limits<Gas>::max() / a)
        throw GasOverflow{};
    return a * b;
}

/// 160-bit account address, canonically rendered as 0x + 40 lowercase hex digits.
struct Address
{
    std::array<std::uint8_t, 20> bytes{};

    friend auto operator<=>(const Address&, const Address&) = default;

    Word to_word() const;
    static Address from_word(const Word& w);
};

struct HexError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Hex helpers. All output is lowercase; parsing accepts either case and
// requires the 0x prefix.
Bytes parse_hex(const std::string& text);
std::string to_hex(const std::uint8_t* data, std::size_t size);
std::string to_hex(const Bytes& data);

Address parse_address(const std::string& text);
std::string to_string(const Address& a);

/// Parses a 0x-prefixed hex quantity of at most 64 digits into a Word.
Word parse_word_hex(const std::string& text);
/// Renders a Word as 0x + exactly 64 hex digits.
std::string to_hex64(const Word& w);

/// Big-endian 32-byte encoding of a Word.
std::array<std::uint8_t, 32> word_to_bytes32(const Word& w);
Word word_from_bytes(const std::uint8_t* data, std::size_t size);

}  // namespace gaslab
