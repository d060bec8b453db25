// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/schedule.hpp"

namespace gaslab
{
GasSchedule GasSchedule::standard()
{
    GasSchedule s;
    for (int op = 0; op < 256; ++op)
        if (const OpInfo* info = opcode_info(static_cast<std::uint8_t>(op)))
            s.opcode_base[static_cast<std::size_t>(op)] = info->base_cost;
    return s;
}

Gas GasSchedule::memory_cost(std::uint64_t size_bytes) const
{
    const std::uint64_t words = (size_bytes + 31) / 32;
    const Gas linear = checked_mul(memory_word_linear, words);
    const Gas quadratic = checked_mul(words, words) / memory_quadratic_divisor;
    return checked_add(linear, quadratic);
}

}  // namespace gaslab
