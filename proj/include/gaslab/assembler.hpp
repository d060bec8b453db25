// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/types.hpp"

#include <string>

namespace gaslab
{
/// Assembly errors carry the 1-based line number of the offending input.
struct AsmError : std::runtime_error
{
    int line;
    AsmError(int line_number, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
        line(line_number)
    {}
};

/// Assembles newline-separated mnemonics into bytecode.
///
/// Grammar per line: optional `label:` definition, then an optional mnemonic
/// with an optional 0x-prefixed immediate (PUSHn takes exactly n bytes) or a
/// `@label` reference (assembled as PUSH2 with the label's byte offset).
/// `//` starts a comment.
Bytes assemble(const std::string& text);

/// Inverse of assemble on complete bytecode. Unknown bytes render as
/// `INVALID(0xNN)`; a truncated trailing PUSH immediate is zero-padded.
std::string disassemble(const Bytes& code);

// -- corpus builders -------------------------------------------------------
//
// Each builder returns a small program with a documented gas-shape property;
// the properties themselves are established by running the interpreter, not
// asserted from constants.

struct ParameterInfeasible : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Writes 0 to slot 0 and stops. Run against a state where slot 0 is nonzero
/// to earn the storage-clear refund, which drives the minimum gas limit
/// above the gas used.
Bytes build_clear_slot();

/// Two SSTOREs to the same slot; the second sees a warm slot, so the code
/// after it is cheap and the stipend rule binds there. The suffix cost h
/// from (and including) the final SSTORE is tuned to `h_target` gas by
/// padding with JUMPDESTs; feasible for h_target in [100, 2300].
Bytes build_warm_tail(Gas h_target);

/// Reverts unless the remaining gas right after the GAS read exceeds `c`.
/// The committing path's cost h after the GAS step plus the constraint give
/// min_gas - gas_cost = c - h + 1.
Bytes build_gas_gate(Gas c);

/// Branches on remaining gas: below `c` runs a cheap suffix, above it a
/// costly one, making gas used at a large budget exceed the minimum gas
/// limit. Suffix costs are approximated with JUMPDEST padding.
Bytes build_discrepancy(Gas c, Gas cheap_cost, Gas costly_cost);

/// Reverts iff the remaining gas after the GAS read lies strictly between
/// c_low and c_high, yielding two non-reverting budget intervals.
Bytes build_discontinuity(Gas c_low, Gas c_high);

/// Wallet-deposit analogue: adds the call value into storage slot 0.
Bytes build_deposit_like();

}  // namespace gaslab
