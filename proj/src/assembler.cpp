// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/assembler.hpp"

#include "gaslab/opcodes.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace gaslab
{
namespace
{
struct AsmLine
{
    int number;                // 1-based source line
    std::string label;         // definition on this line, if any
    std::string mnemonic;      // empty for label-only / blank lines
    std::string immediate;     // 0x literal, if any
    std::string label_ref;     // @label reference, if any
};

std::vector<std::string> tokenize(const std::string& line)
{
    std::vector<std::string> tokens;
    std::istringstream in{line};
    std::string tok;
    while (in >> tok)
        tokens.push_back(tok);
    return tokens;
}

std::vector<AsmLine> parse_lines(const std::string& text)
{
    std::vector<AsmLine> lines;
    std::istringstream in{text};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw))
    {
        ++number;
        if (const auto comment = raw.find("//"); comment != std::string::npos)
            raw.resize(comment);
        auto tokens = tokenize(raw);
        if (tokens.empty())
            continue;

        AsmLine line{number, {}, {}, {}, {}};
        std::size_t i = 0;
        if (tokens[0].size() > 1 && tokens[0].back() == ':')
        {
            line.label = tokens[0].substr(0, tokens[0].size() - 1);
            i = 1;
        }
        if (i < tokens.size())
        {
            line.mnemonic = tokens[i++];
            if (line.mnemonic.rfind('@', 0) == 0)
            {
                // bare @label is shorthand for PUSH2 @label
                line.label_ref = line.mnemonic.substr(1);
                line.mnemonic = "PUSH2";
            }
            if (i < tokens.size())
            {
                const std::string& arg = tokens[i];
                if (arg.rfind("0x", 0) == 0 || arg.rfind("0X", 0) == 0)
                    line.immediate = arg;
                else if (arg.rfind('@', 0) == 0)
                    line.label_ref = arg.substr(1);
                else
                    throw AsmError{number, "unexpected operand '" + arg + "'"};
                ++i;
            }
            if (i < tokens.size())
                throw AsmError{number,
                    "ImmediateWidthMismatch: extra operand '" + tokens[i] + "'"};
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

/// Parses "INVALID(0xNN)" back to its byte, as emitted by disassemble.
std::optional<std::uint8_t> parse_invalid_form(const std::string& mnemonic)
{
    unsigned value = 0;
    char tail = 0;
    if (std::sscanf(mnemonic.c_str(), "INVALID(0x%2x%c", &value, &tail) == 2 &&
        tail == ')' && mnemonic.size() == std::string{"INVALID(0x00)"}.size())
        return static_cast<std::uint8_t>(value);
    return std::nullopt;
}

Bytes parse_immediate(const AsmLine& line, unsigned width)
{
    const std::string& lit = line.immediate;
    const std::size_t digits = lit.size() - 2;
    if (digits == 0 || digits > 2 * width)
        throw AsmError{line.number,
            "ImmediateWidthMismatch: '" + lit + "' does not fit " +
                std::to_string(width) + " byte(s)"};
    auto digit = [&](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        throw AsmError{line.number, "invalid hex digit in '" + lit + "'"};
    };
    std::string hex = lit.substr(2);
    if (hex.size() % 2 != 0)
        hex.insert(hex.begin(), '0');
    Bytes out(width, 0);
    std::size_t byte_index = width - hex.size() / 2;
    for (std::size_t p = 0; p < hex.size(); p += 2)
        out[byte_index++] =
            static_cast<std::uint8_t>(digit(hex[p]) * 16 + digit(hex[p + 1]));
    return out;
}

/// Emitted size of one line's instruction in bytes.
std::size_t instruction_size(const AsmLine& line)
{
    if (line.mnemonic.empty())
        return 0;
    if (!line.label_ref.empty())
        return 3;  // label references always assemble to PUSH2
    if (parse_invalid_form(line.mnemonic))
        return 1;
    const auto op = opcode_by_name(line.mnemonic);
    if (!op)
        throw AsmError{line.number, "UnknownMnemonic: '" + line.mnemonic + "'"};
    return 1 + opcode_info(*op)->immediate_size;
}
}  // namespace

Bytes assemble(const std::string& text)
{
    const auto lines = parse_lines(text);

    // pass 1: label offsets
    std::map<std::string, std::size_t> labels;
    std::size_t offset = 0;
    for (const AsmLine& line : lines)
    {
        if (!line.label.empty())
        {
            if (!labels.emplace(line.label, offset).second)
                throw AsmError{line.number, "duplicate label '" + line.label + "'"};
        }
        offset += instruction_size(line);
    }

    // pass 2: emission
    Bytes code;
    code.reserve(offset);
    for (const AsmLine& line : lines)
    {
        if (line.mnemonic.empty())
            continue;

        if (!line.label_ref.empty())
        {
            const auto it = labels.find(line.label_ref);
            if (it == labels.end())
                throw AsmError{line.number,
                    "UndefinedLabel: '@" + line.label_ref + "'"};
            if (line.mnemonic != "PUSH2")
                throw AsmError{line.number,
                    "label references require PUSH2, got '" + line.mnemonic + "'"};
            if (it->second > 0xffff)
                throw AsmError{line.number, "label offset exceeds PUSH2 range"};
            code.push_back(OP_PUSH1 + 1);
            code.push_back(static_cast<std::uint8_t>(it->second >> 8));
            code.push_back(static_cast<std::uint8_t>(it->second & 0xff));
            continue;
        }

        if (const auto raw = parse_invalid_form(line.mnemonic))
        {
            if (!line.immediate.empty())
                throw AsmError{line.number,
                    "ImmediateWidthMismatch: INVALID takes no operand"};
            code.push_back(*raw);
            continue;
        }

        const auto op = opcode_by_name(line.mnemonic);
        if (!op)
            throw AsmError{line.number, "UnknownMnemonic: '" + line.mnemonic + "'"};
        const OpInfo& info = *opcode_info(*op);
        code.push_back(*op);
        if (info.immediate_size > 0)
        {
            if (line.immediate.empty())
                throw AsmError{line.number,
                    "ImmediateWidthMismatch: " + line.mnemonic +
                        " requires an immediate"};
            const Bytes imm = parse_immediate(line, info.immediate_size);
            code.insert(code.end(), imm.begin(), imm.end());
        }
        else if (!line.immediate.empty())
        {
            throw AsmError{line.number,
                "ImmediateWidthMismatch: " + line.mnemonic + " takes no operand"};
        }
    }
    return code;
}

std::string disassemble(const Bytes& code)
{
    std::string out;
    for (std::size_t i = 0; i < code.size();)
    {
        const std::uint8_t op = code[i];
        const OpInfo* info = opcode_info(op);
        if (!out.empty())
            out.push_back('\n');
        if (!info)
        {
            out += opcode_name(op);  // INVALID(0xNN)
            ++i;
            continue;
        }
        out += std::string{info->name};
        if (info->immediate_size > 0)
        {
            out += " 0x";
            for (unsigned k = 0; k < info->immediate_size; ++k)
            {
                const std::size_t idx = i + 1 + k;
                // truncated trailing immediates read as zero
                const std::uint8_t byte = idx < code.size() ? code[idx] : 0;
                char buf[3];
                std::snprintf(buf, sizeof(buf), "%02x", byte);
                out += buf;
            }
        }
        i += 1 + info->immediate_size;
    }
    return out;
}

namespace
{
std::string push4_hex(Gas value)
{
    if (value > 0xffffffffULL)
        throw ParameterInfeasible{"constant exceeds PUSH4 range"};
    char buf[11];
    std::snprintf(buf, sizeof(buf), "0x%08llx",
        static_cast<unsigned long long>(value));
    return buf;
}

std::string jumpdest_padding(Gas count)
{
    std::string out;
    for (Gas i = 0; i < count; ++i)
        out += "JUMPDEST\n";
    return out;
}
}  // namespace

Bytes build_clear_slot()
{
    return assemble(
        "PUSH1 0x00 // value\n"
        "PUSH1 0x00 // slot\n"
        "SSTORE\n"
        "STOP\n");
}

Bytes build_warm_tail(Gas h_target)
{
    // Tail after the second SSTORE costs h = 100 (warm dirty write) + padding.
    constexpr Gas warm_write = 100;
    if (h_target < warm_write || h_target > 2300)
        throw ParameterInfeasible{"warm-tail h_target must be in [100, 2300]"};
    return assemble(
        "PUSH1 0x04 // value\n"
        "PUSH1 0x00 // slot\n"
        "SSTORE     // cold set: 22100\n"
        "PUSH1 0x03\n"
        "PUSH1 0x00\n"
        "SSTORE     // warm dirty write: 100\n" +
        jumpdest_padding(h_target - warm_write) + "STOP\n");
}

Bytes build_gas_gate(Gas c)
{
    // Commits iff the value pushed by GAS strictly exceeds c.
    if (c < 20)
        throw ParameterInfeasible{"gas gate constant must cover the tail cost"};
    return assemble(
        "GAS\n"
        "PUSH4 " + push4_hex(c) + "\n"
        "LT          // 1 iff gas_left > c\n"
        "PUSH2 @ok\n"
        "JUMPI\n"
        "PUSH1 0x00\n"
        "PUSH1 0x00\n"
        "REVERT\n"
        "ok:\n"
        "JUMPDEST\n"
        "STOP\n");
}

Bytes build_discrepancy(Gas c, Gas cheap_cost, Gas costly_cost)
{
    // Cheap path runs when gas_left after GAS is <= c; its post-GAS cost is
    // 19 + cheap_cost, which must stay below c for the cheap branch to be
    // reachable at the minimum budget.
    if (costly_cost < 1 || costly_cost <= cheap_cost)
        throw ParameterInfeasible{"costly branch must out-cost the cheap one"};
    if (c < 20 + cheap_cost)
        throw ParameterInfeasible{"branch constant below cheap-path cost"};
    return assemble(
        "GAS\n"
        "PUSH4 " + push4_hex(c) + "\n"
        "LT\n"
        "PUSH2 @costly\n"
        "JUMPI\n" +
        jumpdest_padding(cheap_cost) +
        "STOP\n"
        "costly:\n"
        "JUMPDEST\n" +
        jumpdest_padding(costly_cost - 1) + "STOP\n");
}

Bytes build_discontinuity(Gas c_low, Gas c_high)
{
    // Reverts iff c_low < gas_after_GAS < c_high. The fall-through path costs
    // 36, so budgets in [36, c_low + 2] and [c_high + 2, inf) commit.
    if (c_low < 34 || c_high <= c_low)
        throw ParameterInfeasible{"discontinuity bounds too tight"};
    return assemble(
        "GAS\n"
        "DUP1\n"
        "PUSH4 " + push4_hex(c_low) + "\n"
        "LT          // c_low < g\n"
        "SWAP1\n"
        "PUSH4 " + push4_hex(c_high) + "\n"
        "GT          // c_high > g\n"
        "AND\n"
        "PUSH2 @reject\n"
        "JUMPI\n"
        "STOP\n"
        "reject:\n"
        "JUMPDEST\n"
        "PUSH1 0x00\n"
        "PUSH1 0x00\n"
        "REVERT\n");
}

Bytes build_deposit_like()
{
    return assemble(
        "PUSH1 0x00\n"
        "SLOAD\n"
        "CALLVALUE\n"
        "ADD\n"
        "PUSH1 0x00\n"
        "SSTORE\n"
        "STOP\n");
}

}  // namespace gaslab
