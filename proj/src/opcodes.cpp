// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/opcodes.hpp"

#include <array>
#include <map>

namespace gaslab
{
namespace
{
// Dynamic-priced opcodes (SLOAD, SSTORE, BALANCE, KECCAK256 length part,
// memory expansion) carry only their static portion here; the interpreter
// adds the state-dependent part.
struct TableEntry
{
    std::uint8_t op;
    OpInfo info;
};

constexpr TableEntry base_table[] = {
    {OP_STOP, {"STOP", 0, 0, 0, 0}},
    {OP_ADD, {"ADD", 0, 2, 1, 3}},
    {OP_MUL, {"MUL", 0, 2, 1, 5}},
    {OP_SUB, {"SUB", 0, 2, 1, 3}},
    {OP_DIV, {"DIV", 0, 2, 1, 5}},
    {OP_LT, {"LT", 0, 2, 1, 3}},
    {OP_GT, {"GT", 0, 2, 1, 3}},
    {OP_EQ, {"EQ", 0, 2, 1, 3}},
    {OP_ISZERO, {"ISZERO", 0, 1, 1, 3}},
    {OP_AND, {"AND", 0, 2, 1, 3}},
    {OP_OR, {"OR", 0, 2, 1, 3}},
    {OP_XOR, {"XOR", 0, 2, 1, 3}},
    {OP_NOT, {"NOT", 0, 1, 1, 3}},
    {OP_KECCAK256, {"KECCAK256", 0, 2, 1, 30}},
    {OP_ADDRESS, {"ADDRESS", 0, 0, 1, 2}},
    {OP_BALANCE, {"BALANCE", 0, 1, 1, 0}},
    {OP_CALLER, {"CALLER", 0, 0, 1, 2}},
    {OP_CALLVALUE, {"CALLVALUE", 0, 0, 1, 2}},
    {OP_CALLDATALOAD, {"CALLDATALOAD", 0, 1, 1, 3}},
    {OP_CALLDATASIZE, {"CALLDATASIZE", 0, 0, 1, 2}},
    {OP_BLOCKHASH, {"BLOCKHASH", 0, 1, 1, 20}},
    {OP_COINBASE, {"COINBASE", 0, 0, 1, 2}},
    {OP_TIMESTAMP, {"TIMESTAMP", 0, 0, 1, 2}},
    {OP_NUMBER, {"NUMBER", 0, 0, 1, 2}},
    {OP_PREVRANDAO, {"PREVRANDAO", 0, 0, 1, 2}},
    {OP_GASLIMIT, {"GASLIMIT", 0, 0, 1, 2}},
    {OP_SELFBALANCE, {"SELFBALANCE", 0, 0, 1, 5}},
    {OP_BASEFEE, {"BASEFEE", 0, 0, 1, 2}},
    {OP_POP, {"POP", 0, 1, 0, 2}},
    {OP_MLOAD, {"MLOAD", 0, 1, 1, 3}},
    {OP_MSTORE, {"MSTORE", 0, 2, 0, 3}},
    {OP_SLOAD, {"SLOAD", 0, 1, 1, 0}},
    {OP_SSTORE, {"SSTORE", 0, 2, 0, 0}},
    {OP_JUMP, {"JUMP", 0, 1, 0, 8}},
    {OP_JUMPI, {"JUMPI", 0, 2, 0, 10}},
    {OP_PC, {"PC", 0, 0, 1, 2}},
    {OP_GAS, {"GAS", 0, 0, 1, 2}},
    {OP_JUMPDEST, {"JUMPDEST", 0, 0, 0, 1}},
    {OP_RETURN, {"RETURN", 0, 2, 0, 0}},
    {OP_REVERT, {"REVERT", 0, 2, 0, 0}},
    {OP_INVALID, {"INVALID", 0, 0, 0, 0}},
};

struct Tables
{
    std::array<OpInfo, 256> info{};
    std::array<bool, 256> present{};
    std::map<std::string, std::uint8_t, std::less<>> by_name;
    std::array<std::string, 32> push_names;
    std::array<std::string, 16> dup_names;
    std::array<std::string, 16> swap_names;

    Tables()
    {
        for (const auto& e : base_table)
        {
            info[e.op] = e.info;
            present[e.op] = true;
            by_name.emplace(std::string{e.info.name}, e.op);
        }
        for (int n = 1; n <= 32; ++n)
        {
            const auto op = static_cast<std::uint8_t>(OP_PUSH1 + n - 1);
            push_names[n - 1] = "PUSH" + std::to_string(n);
            info[op] = {push_names[n - 1], static_cast<std::uint8_t>(n), 0, 1, 3};
            present[op] = true;
            by_name.emplace(push_names[n - 1], op);
        }
        for (int n = 1; n <= 16; ++n)
        {
            const auto dup = static_cast<std::uint8_t>(OP_DUP1 + n - 1);
            dup_names[n - 1] = "DUP" + std::to_string(n);
            info[dup] = {dup_names[n - 1], 0, static_cast<std::uint8_t>(n),
                static_cast<std::uint8_t>(n + 1), 3};
            present[dup] = true;
            by_name.emplace(dup_names[n - 1], dup);

            const auto swap = static_cast<std::uint8_t>(OP_SWAP1 + n - 1);
            swap_names[n - 1] = "SWAP" + std::to_string(n);
            info[swap] = {swap_names[n - 1], 0, static_cast<std::uint8_t>(n + 1),
                static_cast<std::uint8_t>(n + 1), 3};
            present[swap] = true;
            by_name.emplace(swap_names[n - 1], swap);
        }
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}
}  // namespace

const OpInfo* opcode_info(std::uint8_t op)
{
    const auto& t = tables();
    return t.present[op] ? &t.info[op] : nullptr;
}

std::optional<std::uint8_t> opcode_by_name(std::string_view name)
{
    const auto& t = tables();
    const auto it = t.by_name.find(name);
    if (it == t.by_name.end())
        return std::nullopt;
    return it->second;
}

std::string opcode_name(std::uint8_t op)
{
    if (const OpInfo* info = opcode_info(op))
        return std::string{info->name};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "INVALID(0x%02x)", op);
    return buf;
}

}  // namespace gaslab
