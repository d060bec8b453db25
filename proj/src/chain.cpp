// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/chain.hpp"

namespace gaslab
{
Word BlockContext::block_hash(std::uint64_t block_number) const
{
    // Only the 256 blocks preceding `number` are visible.
    if (block_number >= number || number - block_number > 256)
        return 0;
    const auto it = hash_lookup.find(block_number);
    return it == hash_lookup.end() ? Word{0} : it->second;
}

std::array<std::uint8_t, 4> Transaction::selector() const
{
    std::array<std::uint8_t, 4> sel{};
    for (std::size_t i = 0; i < 4 && i < data.size(); ++i)
        sel[i] = data[i];
    return sel;
}

}  // namespace gaslab
