// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/keccak.hpp"

#include <cstring>

namespace gaslab
{
namespace
{
constexpr std::uint64_t round_constants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr int rho_offsets[25] = {
    0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
};

inline std::uint64_t rotl(std::uint64_t v, int n)
{
    return n == 0 ? v : (v << n) | (v >> (64 - n));
}

void keccak_f1600(std::uint64_t state[25])
{
    for (int round = 0; round < 24; ++round)
    {
        // theta
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x)
            c[x] = state[x] ^ state[x + 5] ^ state[x + 10] ^ state[x + 15] ^
                   state[x + 20];
        for (int x = 0; x < 5; ++x)
        {
            const std::uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
            for (int y = 0; y < 5; ++y)
                state[x + 5 * y] ^= d;
        }

        // rho + pi
        std::uint64_t b[25];
        for (int x = 0; x < 5; ++x)
            for (int y = 0; y < 5; ++y)
                b[y + 5 * ((2 * x + 3 * y) % 5)] =
                    rotl(state[x + 5 * y], rho_offsets[x + 5 * y]);

        // chi
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x)
                state[x + 5 * y] =
                    b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);

        // iota
        state[0] ^= round_constants[round];
    }
}

constexpr std::size_t rate_bytes = 136;  // 1600/8 - 2*256/8
}  // namespace

std::array<std::uint8_t, 32> keccak256(const std::uint8_t* data, std::size_t size)
{
    std::uint64_t state[25] = {};
    std::uint8_t block[rate_bytes];

    // absorb full blocks
    while (size >= rate_bytes)
    {
        for (std::size_t i = 0; i < rate_bytes / 8; ++i)
        {
            std::uint64_t lane;
            std::memcpy(&lane, data + 8 * i, 8);  // little-endian hosts only
            state[i] ^= lane;
        }
        keccak_f1600(state);
        data += rate_bytes;
        size -= rate_bytes;
    }

    // final block with 0x01 / 0x80 padding
    std::memset(block, 0, rate_bytes);
    if (size > 0)
        std::memcpy(block, data, size);
    block[size] ^= 0x01;
    block[rate_bytes - 1] ^= 0x80;
    for (std::size_t i = 0; i < rate_bytes / 8; ++i)
    {
        std::uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);
        state[i] ^= lane;
    }
    keccak_f1600(state);

    std::array<std::uint8_t, 32> digest;
    std::memcpy(digest.data(), state, 32);
    return digest;
}

std::array<std::uint8_t, 32> keccak256(const Bytes& data)
{
    return keccak256(data.data(), data.size());
}

Word keccak256_word(const std::uint8_t* data, std::size_t size)
{
    const auto d = keccak256(data, size);
    return word_from_bytes(d.data(), d.size());
}

}  // namespace gaslab
