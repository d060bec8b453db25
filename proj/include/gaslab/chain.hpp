// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace gaslab
{
/// Block-level execution context. hash_lookup supplies BLOCKHASH results for
/// at most the 256 blocks preceding `number`; anything else reads as zero.
struct BlockContext
{
    std::uint64_t number = 0;
    std::uint64_t timestamp = 0;
    Address coinbase{};
    Gas gas_limit = 30'000'000;
    Wei base_fee = 0;
    Word prevrandao = 0;
    std::map<std::uint64_t, Word> hash_lookup;
    std::uint64_t parent_number = 0;

    Word block_hash(std::uint64_t block_number) const;
};

struct StorageKey
{
    Address address;
    Word slot;

    friend bool operator==(const StorageKey& a, const StorageKey& b)
    {
        return a.address == b.address && a.slot == b.slot;
    }
    friend bool operator<(const StorageKey& a, const StorageKey& b)
    {
        if (a.address != b.address)
            return a.address < b.address;
        return a.slot < b.slot;
    }
};

/// Transaction access list entry: one address plus its pre-declared slots.
struct AccessListEntry
{
    Address address;
    std::vector<Word> slots;
};

struct Transaction
{
    std::string id;  // harness-assigned identifier; empty outside scenarios
    Address from{};
    Address to{};
    Wei value = 0;
    Bytes data;
    Gas gas_limit = 0;
    Wei gas_price = 0;
    std::vector<AccessListEntry> access_list;
    bool is_create = false;

    /// Returns the transaction with its gas budget replaced, T(g).
    Transaction with_gas_limit(Gas g) const
    {
        Transaction t = *this;
        t.gas_limit = g;
        return t;
    }

    /// First 4 bytes of calldata; all-zero for empty calldata.
    std::array<std::uint8_t, 4> selector() const;
};

}  // namespace gaslab
