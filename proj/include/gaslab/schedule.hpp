// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/opcodes.hpp"
#include "gaslab/types.hpp"

#include <array>

namespace gaslab
{
/// Every gas constant the interpreter charges, as configurable integers.
/// The default instance pins the London/Paris-era fee schedule.
struct GasSchedule
{
    /// Static per-opcode base cost, indexed by opcode byte. Dynamic-priced
    /// opcodes (SLOAD, SSTORE, BALANCE) keep their dynamic part in the
    /// named fields below.
    std::array<Gas, 256> opcode_base{};

    Gas tx_base = 21000;
    Gas create_surcharge = 32000;
    Gas data_zero_byte = 4;
    Gas data_nonzero_byte = 16;
    Gas access_list_address = 2400;
    Gas access_list_slot = 1900;

    Gas cold_sload = 2100;
    Gas warm_sload = 100;
    Gas cold_account_access = 2600;
    Gas warm_account_access = 100;

    Gas sstore_set = 20000;
    Gas sstore_reset = 2900;
    Gas sstore_warm_dirty = 100;
    Gas sstore_clear_refund = 4800;
    Gas sstore_stipend = 2300;

    Gas memory_word_linear = 3;
    Gas memory_quadratic_divisor = 512;
    Gas keccak_base = 30;
    Gas keccak_per_word = 6;

    Gas refund_divisor = 5;
    Gas default_block_gas_limit = 30'000'000;

    static GasSchedule standard();

    /// Total memory cost C(a) for `size_bytes` of memory, a = ceil(size/32):
    /// C(a) = memory_word_linear*a + a^2/memory_quadratic_divisor.
    Gas memory_cost(std::uint64_t size_bytes) const;
};

}  // namespace gaslab
