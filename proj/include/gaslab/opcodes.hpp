// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gaslab
{
enum Opcode : std::uint8_t
{
    OP_STOP = 0x00,
    OP_ADD = 0x01,
    OP_MUL = 0x02,
    OP_SUB = 0x03,
    OP_DIV = 0x04,
    OP_LT = 0x10,
    OP_GT = 0x11,
    OP_EQ = 0x14,
    OP_ISZERO = 0x15,
    OP_AND = 0x16,
    OP_OR = 0x17,
    OP_XOR = 0x18,
    OP_NOT = 0x19,
    OP_KECCAK256 = 0x20,
    OP_ADDRESS = 0x30,
    OP_BALANCE = 0x31,
    OP_CALLER = 0x33,
    OP_CALLVALUE = 0x34,
    OP_CALLDATALOAD = 0x35,
    OP_CALLDATASIZE = 0x36,
    OP_BLOCKHASH = 0x40,
    OP_COINBASE = 0x41,
    OP_TIMESTAMP = 0x42,
    OP_NUMBER = 0x43,
    OP_PREVRANDAO = 0x44,
    OP_GASLIMIT = 0x45,
    OP_SELFBALANCE = 0x47,
    OP_BASEFEE = 0x48,
    OP_POP = 0x50,
    OP_MLOAD = 0x51,
    OP_MSTORE = 0x52,
    OP_SLOAD = 0x54,
    OP_SSTORE = 0x55,
    OP_JUMP = 0x56,
    OP_JUMPI = 0x57,
    OP_PC = 0x58,
    OP_GAS = 0x5a,
    OP_JUMPDEST = 0x5b,
    OP_PUSH1 = 0x60,
    OP_PUSH32 = 0x7f,
    OP_DUP1 = 0x80,
    OP_DUP16 = 0x8f,
    OP_SWAP1 = 0x90,
    OP_SWAP16 = 0x9f,
    OP_RETURN = 0xf3,
    OP_REVERT = 0xfd,
    OP_INVALID = 0xfe,
};

/// Static description of one opcode in the supported set.
struct OpInfo
{
    std::string_view name;
    std::uint8_t immediate_size;  ///< trailing immediate bytes (PUSHn only)
    std::uint8_t pops;
    std::uint8_t pushes;
    std::uint64_t base_cost;
};

/// Returns the table entry for `op`, or nullptr if `op` is not supported.
const OpInfo* opcode_info(std::uint8_t op);

/// Reverse lookup by mnemonic (e.g. "PUSH3", "SWAP12"). Empty if unknown.
std::optional<std::uint8_t> opcode_by_name(std::string_view name);

/// Mnemonic for `op`; unknown bytes render as "INVALID(0xNN)".
std::string opcode_name(std::uint8_t op);

}  // namespace gaslab
