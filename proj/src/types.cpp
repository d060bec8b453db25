// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/types.hpp"

namespace gaslab
{
namespace
{
int hex_digit(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    return -1;
}

constexpr char hex_chars[] = "0123456789abcdef";
}  // namespace

Bytes parse_hex(const std::string& text)
{
    if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        throw HexError{"missing 0x prefix: " + text};
    if (text.size() % 2 != 0)
        throw HexError{"odd-length hex string: " + text};
    Bytes out;
    out.reserve((text.size() - 2) / 2);
    for (std::size_t i = 2; i < text.size(); i += 2)
    {
        const int hi = hex_digit(text[i]);
        const int lo = hex_digit(text[i + 1]);
        if (hi < 0 || lo < 0)
            throw HexError{"invalid hex digit in: " + text};
        out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
    }
    return out;
}

std::string to_hex(const std::uint8_t* data, std::size_t size)
{
    std::string s = "0x";
    s.reserve(2 + 2 * size);
    for (std::size_t i = 0; i < size; ++i)
    {
        s.push_back(hex_chars[data[i] >> 4]);
        s.push_back(hex_chars[data[i] & 0x0f]);
    }
    return s;
}

std::string to_hex(const Bytes& data)
{
    return to_hex(data.data(), data.size());
}

Address parse_address(const std::string& text)
{
    const Bytes b = parse_hex(text);
    if (b.size() != 20)
        throw HexError{"address must be 40 hex digits: " + text};
    Address a;
    std::copy(b.begin(), b.end(), a.bytes.begin());
    return a;
}

std::string to_string(const Address& a)
{
    return to_hex(a.bytes.data(), a.bytes.size());
}

Word Address::to_word() const
{
    return word_from_bytes(bytes.data(), bytes.size());
}

Address Address::from_word(const Word& w)
{
    const auto b = word_to_bytes32(w);
    Address a;
    std::copy(b.begin() + 12, b.end(), a.bytes.begin());
    return a;
}

Word parse_word_hex(const std::string& text)
{
    if (text.size() < 2 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        throw HexError{"missing 0x prefix: " + text};
    if (text.size() == 2 || text.size() > 2 + 64)
        throw HexError{"word hex must have 1..64 digits: " + text};
    Word w = 0;
    for (std::size_t i = 2; i < text.size(); ++i)
    {
        const int d = hex_digit(text[i]);
        if (d < 0)
            throw HexError{"invalid hex digit in: " + text};
        w <<= 4;
        w += d;
    }
    return w;
}

std::string to_hex64(const Word& w)
{
    std::string digits(64, '0');
    Word v = w;
    for (int i = 63; i >= 0 && v != 0; --i)
    {
        digits[static_cast<std::size_t>(i)] =
            hex_chars[static_cast<unsigned>(v & 0x0f)];
        v >>= 4;
    }
    return "0x" + digits;
}

std::array<std::uint8_t, 32> word_to_bytes32(const Word& w)
{
    std::array<std::uint8_t, 32> out{};
    Word v = w;
    for (int i = 31; i >= 0 && v != 0; --i)
    {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

Word word_from_bytes(const std::uint8_t* data, std::size_t size)
{
    Word w = 0;
    for (std::size_t i = 0; i < size; ++i)
    {
        w <<= 8;
        w += data[i];
    }
    return w;
}

}  // namespace gaslab
