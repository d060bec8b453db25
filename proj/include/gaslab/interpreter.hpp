// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/chain.hpp"
#include "gaslab/schedule.hpp"
#include "gaslab/state.hpp"
#include "gaslab/types.hpp"

#include <string>
#include <vector>

namespace gaslab
{
enum class HaltReason
{
    Stop,
    Return,
    Revert,
    OutOfGas,
    StackUnderflow,
    StackOverflow,
    InvalidOpcode,
    InvalidJumpDestination,
    StipendViolation,
};

std::string to_string(HaltReason reason);

/// Stop/Return commit (z=1). Revert consumes only the gas spent so far;
/// every other z=0 reason consumes the whole budget.
constexpr bool is_success(HaltReason r)
{
    return r == HaltReason::Stop || r == HaltReason::Return;
}
constexpr bool is_exceptional(HaltReason r)
{
    return !is_success(r) && r != HaltReason::Revert;
}

/// One executed instruction: gas remaining before the charge and the amount
/// actually deducted (on an exceptional halt the final record consumes
/// whatever was left).
struct StepRecord
{
    std::uint32_t pc = 0;
    std::uint8_t opcode = 0;
    Gas gas_before = 0;
    Gas gas_charged = 0;

    std::string mnemonic() const;
};

struct ExecutionOutcome
{
    int z = 0;                ///< 1 committed, 0 reverted
    Gas gas_used = 0;         ///< g_cost - applied refund
    Gas gas_cost = 0;         ///< g_0 + execution cost
    Gas refund_applied = 0;   ///< R = min((T_g - g_cost)/5, A_r)
    Gas remaining_gas = 0;    ///< T_g - gas_used
    Gas intrinsic_cost = 0;   ///< g_0
    HaltReason halt = HaltReason::Stop;
    Bytes output;             ///< RETURN/REVERT payload
    std::vector<StepRecord> trace;
};

enum class ValidityErrorKind
{
    IntrinsicUnderflow,        ///< T_g < g_0: transaction not valid
    InsufficientSenderBalance, ///< sender cannot cover value + T_g * price
};

/// Raised when a transaction cannot be processed at all. Distinct from a
/// reverted outcome: nothing executes and no gas is consumed.
struct ValidityError : std::runtime_error
{
    ValidityErrorKind kind;
    explicit ValidityError(ValidityErrorKind k)
      : std::runtime_error(k == ValidityErrorKind::IntrinsicUnderflow
                ? "gas limit below intrinsic cost"
                : "insufficient sender balance"),
        kind(k)
    {}
};

/// g_0 = g_data + g_create + g_tx + g_access.
Gas intrinsic_gas(const Transaction& tx, const GasSchedule& schedule);

/// Executes `tx` as a single-frame call against `state`, committing on z=1
/// and reverting all effects (except the sender's gas payment) otherwise.
/// Throws ValidityError when the transaction cannot be processed.
ExecutionOutcome execute(WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule, bool collect_trace = true);

/// TraceCall: executes on a fork of `state`, leaving it untouched; returns
/// (status code, gas used).
struct TraceCallResult
{
    int z = 0;
    Gas gas_used = 0;
};
TraceCallResult trace_call(const WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule);

}  // namespace gaslab
