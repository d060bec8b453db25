// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/interpreter.hpp"

#include "gaslab/keccak.hpp"
#include "gaslab/opcodes.hpp"

#include <cassert>
#include <limits>
#include <set>

namespace gaslab
{
namespace
{
constexpr std::size_t max_stack_depth = 1024;
// Memory offsets beyond this are unpayable anyway; treat as out-of-gas
// without materializing the allocation.
constexpr std::uint64_t max_memory_bytes = std::uint64_t{1} << 32;

Word wei_to_word(const Wei& w)
{
    Word out = 0;
    Wei v = w;
    for (int shift = 0; shift < 256 && v != 0; shift += 64)
    {
        out += Word{static_cast<std::uint64_t>(v & 0xffffffffffffffffULL)} << shift;
        v >>= 64;
    }
    return out;
}

std::uint64_t word_to_u64_saturated(const Word& w)
{
    if (w > std::numeric_limits<std::uint64_t>::max())
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(w);
}

/// Byte positions that are valid JUMP destinations: JUMPDEST opcodes not
/// inside PUSH immediates.
std::set<std::uint32_t> valid_jump_destinations(const Bytes& code)
{
    std::set<std::uint32_t> dests;
    for (std::size_t i = 0; i < code.size();)
    {
        const std::uint8_t op = code[i];
        if (op == OP_JUMPDEST)
            dests.insert(static_cast<std::uint32_t>(i));
        if (op >= OP_PUSH1 && op <= OP_PUSH32)
            i += 1 + (op - OP_PUSH1 + 1);
        else
            i += 1;
    }
    return dests;
}

struct Machine
{
    std::vector<Word> stack;
    std::vector<std::uint8_t> memory;  // size kept a multiple of 32
    std::uint32_t pc = 0;
    Gas gas_left = 0;
};

class Interpreter
{
public:
    Interpreter(WorldState& state, const BlockContext& block, const Transaction& tx,
        const GasSchedule& schedule, bool collect_trace)
      : state_(state),
        block_(block),
        tx_(tx),
        schedule_(schedule),
        collect_trace_(collect_trace),
        code_(state.code(tx.to)),
        jump_dests_(valid_jump_destinations(code_))
    {}

    /// Runs the frame to completion; returns the halt reason. The journal is
    /// left for the caller to commit or revert.
    HaltReason run(Gas execution_budget, std::vector<StepRecord>& trace)
    {
        m_.gas_left = execution_budget;
        trace_ = &trace;
        for (;;)
        {
            if (m_.pc >= code_.size())
                return HaltReason::Stop;  // running off the code halts cleanly
            const HaltReason* halted = step();
            if (halted)
                return *halted;
        }
    }

    const Bytes& output() const { return output_; }
    Gas gas_left() const { return m_.gas_left; }

private:
    // Charges `amount`; on failure consumes the remaining budget.
    bool charge(Gas amount)
    {
        if (amount > m_.gas_left)
            return false;
        m_.gas_left -= amount;
        charged_this_step_ += amount;
        return true;
    }

    void record_step(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        if (collect_trace_)
            trace_->push_back({pc, op, gas_before, charged_this_step_});
    }

    /// Consumes everything that is left (exceptional halts burn the budget).
    void consume_all()
    {
        charged_this_step_ += m_.gas_left;
        m_.gas_left = 0;
    }

    std::optional<Gas> memory_expansion_cost(std::uint64_t new_size) const
    {
        if (new_size > max_memory_bytes)
            return std::nullopt;
        if (new_size <= m_.memory.size())
            return Gas{0};
        return schedule_.memory_cost(new_size) -
               schedule_.memory_cost(m_.memory.size());
    }

    void grow_memory(std::uint64_t new_size)
    {
        const std::uint64_t rounded = (new_size + 31) / 32 * 32;
        if (rounded > m_.memory.size())
            m_.memory.resize(rounded, 0);
    }

    Word pop()
    {
        Word w = m_.stack.back();
        m_.stack.pop_back();
        return w;
    }

    void push(Word w) { m_.stack.push_back(std::move(w)); }

    // Executes one instruction. Returns nullptr to continue, or a pointer to
    // the halt reason stored in halt_.
    const HaltReason* step()
    {
        const std::uint32_t pc = m_.pc;
        const std::uint8_t op = code_[pc];
        const Gas gas_before = m_.gas_left;
        charged_this_step_ = 0;

        const OpInfo* info = opcode_info(op);
        if (!info || op == OP_INVALID)
            return exceptional(pc, op, gas_before, HaltReason::InvalidOpcode);
        if (m_.stack.size() < info->pops)
            return exceptional(pc, op, gas_before, HaltReason::StackUnderflow);
        if (m_.stack.size() - info->pops + info->pushes > max_stack_depth)
            return exceptional(pc, op, gas_before, HaltReason::StackOverflow);

        switch (op)
        {
        case OP_SLOAD:
            return do_sload(pc, op, gas_before);
        case OP_SSTORE:
            return do_sstore(pc, op, gas_before);
        case OP_BALANCE:
            return do_balance(pc, op, gas_before);
        case OP_MLOAD:
        case OP_MSTORE:
            return do_memory_op(pc, op, gas_before);
        case OP_KECCAK256:
            return do_keccak(pc, op, gas_before);
        case OP_RETURN:
        case OP_REVERT:
            return do_return(pc, op, gas_before);
        default:
            break;
        }

        if (!charge(schedule_.opcode_base[op]))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);

        const HaltReason* halted = execute_simple(op, pc);
        if (halted)
        {
            if (is_exceptional(*halted))
                consume_all();
            record_step(pc, op, gas_before);
            return halted;
        }
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* exceptional(
        std::uint32_t pc, std::uint8_t op, Gas gas_before, HaltReason reason)
    {
        consume_all();
        record_step(pc, op, gas_before);
        return halt(reason);
    }

    const HaltReason* halt(HaltReason reason)
    {
        halt_ = reason;
        return &halt_;
    }

    const HaltReason* do_sload(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        const Word key = m_.stack.back();
        const bool was_cold = state_.touch_slot(tx_.to, key);
        const Gas cost = was_cold ? schedule_.cold_sload : schedule_.warm_sload;
        if (!charge(cost))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        m_.stack.back() = state_.storage(tx_.to, key);
        m_.pc = pc + 1;
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* do_sstore(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        // Stipend rule: the remaining budget must strictly exceed the stipend
        // or the execution halts exceptionally. The stipend itself is never
        // charged.
        if (m_.gas_left <= schedule_.sstore_stipend)
            return exceptional(pc, op, gas_before, HaltReason::StipendViolation);

        const Word key = pop();
        const Word value = pop();

        Gas cost = state_.touch_slot(tx_.to, key) ? schedule_.cold_sload : 0;
        const Word current = state_.storage(tx_.to, key);
        const Word original = state_.original_storage(tx_.to, key);

        if (value == current)
        {
            cost += schedule_.sstore_warm_dirty;
        }
        else if (current == original)
        {
            cost += original == 0 ? schedule_.sstore_set : schedule_.sstore_reset;
            if (original != 0 && value == 0)
                state_.add_refund(schedule_.sstore_clear_refund);
        }
        else  // dirty slot
        {
            cost += schedule_.sstore_warm_dirty;
            if (original != 0)
            {
                if (current == 0)
                    state_.sub_refund(schedule_.sstore_clear_refund);
                if (value == 0)
                    state_.add_refund(schedule_.sstore_clear_refund);
            }
            if (value == original)
                state_.add_refund((original == 0 ? schedule_.sstore_set
                                                 : schedule_.sstore_reset) -
                                  schedule_.sstore_warm_dirty);
        }

        if (!charge(cost))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        if (value != current)
            state_.set_storage(tx_.to, key, value);
        m_.pc = pc + 1;
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* do_balance(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        const Address addr = Address::from_word(m_.stack.back());
        const bool was_cold = state_.touch_address(addr);
        const Gas cost =
            was_cold ? schedule_.cold_account_access : schedule_.warm_account_access;
        if (!charge(cost))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        m_.stack.back() = wei_to_word(state_.balance(addr));
        m_.pc = pc + 1;
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* do_memory_op(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        const std::uint64_t offset = word_to_u64_saturated(m_.stack.back());
        const auto expansion = memory_expansion_cost(
            offset > max_memory_bytes ? max_memory_bytes + 1 : offset + 32);
        if (!expansion ||
            !charge(checked_add(schedule_.opcode_base[op], *expansion)))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        grow_memory(offset + 32);

        if (op == OP_MLOAD)
        {
            m_.stack.back() = word_from_bytes(m_.memory.data() + offset, 32);
        }
        else
        {
            pop();
            const Word value = pop();
            const auto bytes = word_to_bytes32(value);
            std::copy(bytes.begin(), bytes.end(), m_.memory.begin() + offset);
        }
        m_.pc = pc + 1;
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* do_keccak(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        const std::uint64_t offset = word_to_u64_saturated(m_.stack[m_.stack.size() - 1]);
        const std::uint64_t length = word_to_u64_saturated(m_.stack[m_.stack.size() - 2]);
        if (offset > max_memory_bytes || length > max_memory_bytes)
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        const auto expansion =
            memory_expansion_cost(length == 0 ? 0 : offset + length);
        if (!expansion)
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        const Gas word_cost =
            checked_mul(schedule_.keccak_per_word, (length + 31) / 32);
        const Gas cost = checked_add(
            checked_add(schedule_.keccak_base, word_cost), *expansion);
        if (!charge(cost))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        grow_memory(length == 0 ? 0 : offset + length);

        pop();
        pop();
        push(keccak256_word(m_.memory.data() + offset, length));
        m_.pc = pc + 1;
        record_step(pc, op, gas_before);
        return nullptr;
    }

    const HaltReason* do_return(std::uint32_t pc, std::uint8_t op, Gas gas_before)
    {
        const std::uint64_t offset = word_to_u64_saturated(m_.stack[m_.stack.size() - 1]);
        const std::uint64_t length = word_to_u64_saturated(m_.stack[m_.stack.size() - 2]);
        if (offset > max_memory_bytes || length > max_memory_bytes)
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        const auto expansion =
            memory_expansion_cost(length == 0 ? 0 : offset + length);
        if (!expansion || !charge(*expansion))
            return exceptional(pc, op, gas_before, HaltReason::OutOfGas);
        grow_memory(length == 0 ? 0 : offset + length);

        pop();
        pop();
        output_.assign(m_.memory.begin() + static_cast<std::ptrdiff_t>(offset),
            m_.memory.begin() + static_cast<std::ptrdiff_t>(offset + length));
        record_step(pc, op, gas_before);
        return halt(op == OP_RETURN ? HaltReason::Return : HaltReason::Revert);
    }

    // Opcodes with static cost and no memory/storage interaction. Returns a
    // halt for STOP/JUMP failures, nullptr otherwise.
    const HaltReason* execute_simple(std::uint8_t op, std::uint32_t pc)
    {
        std::uint32_t next_pc = pc + 1;
        switch (op)
        {
        case OP_STOP:
            return halt(HaltReason::Stop);
        case OP_ADD:
        {
            const Word a = pop();
            const Word b = pop();
            push(a + b);
            break;
        }
        case OP_MUL:
        {
            const Word a = pop();
            const Word b = pop();
            push(a * b);
            break;
        }
        case OP_SUB:
        {
            const Word a = pop();
            const Word b = pop();
            push(a - b);
            break;
        }
        case OP_DIV:
        {
            const Word a = pop();
            const Word b = pop();
            push(b == 0 ? Word{0} : a / b);
            break;
        }
        case OP_LT:
        {
            const Word a = pop();
            const Word b = pop();
            push(Word{a < b ? 1 : 0});
            break;
        }
        case OP_GT:
        {
            const Word a = pop();
            const Word b = pop();
            push(Word{a > b ? 1 : 0});
            break;
        }
        case OP_EQ:
        {
            const Word a = pop();
            const Word b = pop();
            push(Word{a == b ? 1 : 0});
            break;
        }
        case OP_ISZERO:
            m_.stack.back() = m_.stack.back() == 0 ? 1 : 0;
            break;
        case OP_AND:
        {
            const Word a = pop();
            const Word b = pop();
            push(a & b);
            break;
        }
        case OP_OR:
        {
            const Word a = pop();
            const Word b = pop();
            push(a | b);
            break;
        }
        case OP_XOR:
        {
            const Word a = pop();
            const Word b = pop();
            push(a ^ b);
            break;
        }
        case OP_NOT:
            m_.stack.back() = ~m_.stack.back();
            break;
        case OP_POP:
            pop();
            break;
        case OP_JUMP:
        {
            const Word dest = pop();
            if (dest >= code_.size() ||
                !jump_dests_.contains(static_cast<std::uint32_t>(dest)))
                return halt(HaltReason::InvalidJumpDestination);
            next_pc = static_cast<std::uint32_t>(dest);
            break;
        }
        case OP_JUMPI:
        {
            const Word dest = pop();
            const Word condition = pop();
            if (condition != 0)
            {
                if (dest >= code_.size() ||
                    !jump_dests_.contains(static_cast<std::uint32_t>(dest)))
                    return halt(HaltReason::InvalidJumpDestination);
                next_pc = static_cast<std::uint32_t>(dest);
            }
            break;
        }
        case OP_JUMPDEST:
            break;
        case OP_PC:
            push(Word{pc});
            break;
        case OP_GAS:
            push(Word{m_.gas_left});  // value after this opcode's own charge
            break;
        case OP_ADDRESS:
            push(tx_.to.to_word());
            break;
        case OP_CALLER:
            push(tx_.from.to_word());
            break;
        case OP_CALLVALUE:
            push(wei_to_word(tx_.value));
            break;
        case OP_CALLDATALOAD:
        {
            const std::uint64_t offset = word_to_u64_saturated(pop());
            std::array<std::uint8_t, 32> buf{};
            for (std::size_t i = 0; i < 32; ++i)
                if (offset + i < tx_.data.size())
                    buf[i] = tx_.data[offset + i];
            push(word_from_bytes(buf.data(), buf.size()));
            break;
        }
        case OP_CALLDATASIZE:
            push(Word{tx_.data.size()});
            break;
        case OP_SELFBALANCE:
            push(wei_to_word(state_.balance(tx_.to)));
            break;
        case OP_BLOCKHASH:
        {
            const Word number = pop();
            push(number > std::numeric_limits<std::uint64_t>::max()
                    ? Word{0}
                    : block_.block_hash(static_cast<std::uint64_t>(number)));
            break;
        }
        case OP_COINBASE:
            push(block_.coinbase.to_word());
            break;
        case OP_TIMESTAMP:
            push(Word{block_.timestamp});
            break;
        case OP_NUMBER:
            push(Word{block_.number});
            break;
        case OP_GASLIMIT:
            push(Word{block_.gas_limit});
            break;
        case OP_BASEFEE:
            push(wei_to_word(block_.base_fee));
            break;
        case OP_PREVRANDAO:
            push(block_.prevrandao);
            break;
        default:
            if (op >= OP_PUSH1 && op <= OP_PUSH32)
            {
                const std::uint32_t n = op - OP_PUSH1 + 1;
                Word value = 0;
                for (std::uint32_t i = 0; i < n; ++i)
                {
                    value <<= 8;
                    const std::size_t idx = static_cast<std::size_t>(pc) + 1 + i;
                    if (idx < code_.size())
                        value += code_[idx];
                }
                push(value);
                next_pc = pc + 1 + n;
            }
            else if (op >= OP_DUP1 && op <= OP_DUP16)
            {
                const std::size_t n = static_cast<std::size_t>(op - OP_DUP1) + 1;
                push(m_.stack[m_.stack.size() - n]);
            }
            else if (op >= OP_SWAP1 && op <= OP_SWAP16)
            {
                const std::size_t n = static_cast<std::size_t>(op - OP_SWAP1) + 1;
                std::swap(m_.stack.back(), m_.stack[m_.stack.size() - 1 - n]);
            }
            else
            {
                assert(false && "unhandled opcode in dispatch");
            }
            break;
        }
        m_.pc = next_pc;
        return nullptr;
    }

    WorldState& state_;
    const BlockContext& block_;
    const Transaction& tx_;
    const GasSchedule& schedule_;
    bool collect_trace_;
    const Bytes& code_;
    std::set<std::uint32_t> jump_dests_;
    Machine m_;
    Bytes output_;
    Gas charged_this_step_ = 0;
    std::vector<StepRecord>* trace_ = nullptr;
    HaltReason halt_ = HaltReason::Stop;
};

}  // namespace

std::string to_string(HaltReason reason)
{
    switch (reason)
    {
    case HaltReason::Stop:
        return "Stop";
    case HaltReason::Return:
        return "Return";
    case HaltReason::Revert:
        return "Revert";
    case HaltReason::OutOfGas:
        return "OutOfGas";
    case HaltReason::StackUnderflow:
        return "StackUnderflow";
    case HaltReason::StackOverflow:
        return "StackOverflow";
    case HaltReason::InvalidOpcode:
        return "InvalidOpcode";
    case HaltReason::InvalidJumpDestination:
        return "InvalidJumpDestination";
    case HaltReason::StipendViolation:
        return "StipendViolation";
    }
    return "?";
}

std::string StepRecord::mnemonic() const
{
    return opcode_name(opcode);
}

Gas intrinsic_gas(const Transaction& tx, const GasSchedule& schedule)
{
    Gas g = schedule.tx_base;
    if (tx.is_create)
        g = checked_add(g, schedule.create_surcharge);
    for (const std::uint8_t byte : tx.data)
        g = checked_add(
            g, byte == 0 ? schedule.data_zero_byte : schedule.data_nonzero_byte);
    for (const AccessListEntry& entry : tx.access_list)
    {
        g = checked_add(g, schedule.access_list_address);
        g = checked_add(
            g, checked_mul(schedule.access_list_slot, entry.slots.size()));
    }
    return g;
}

ExecutionOutcome execute(WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule, bool collect_trace)
{
    const Gas g0 = intrinsic_gas(tx, schedule);
    if (tx.gas_limit < g0)
        throw ValidityError{ValidityErrorKind::IntrinsicUnderflow};

    const Wei max_fee = Wei{tx.gas_limit} * tx.gas_price;
    if (state.balance(tx.from) < tx.value + max_fee)
        throw ValidityError{ValidityErrorKind::InsufficientSenderBalance};

    state.begin_transaction();
    state.touch_address(tx.from);
    state.touch_address(tx.to);
    for (const AccessListEntry& entry : tx.access_list)
    {
        state.touch_address(entry.address);
        for (const Word& slot : entry.slots)
            state.touch_slot(entry.address, slot);
    }

    const CheckpointId cp = state.checkpoint();
    state.sub_balance(tx.from, tx.value);
    state.add_balance(tx.to, tx.value);

    ExecutionOutcome outcome;
    outcome.intrinsic_cost = g0;

    Interpreter interp{state, block, tx, schedule, collect_trace};
    const HaltReason halt = interp.run(tx.gas_limit - g0, outcome.trace);
    outcome.halt = halt;
    outcome.output = interp.output();

    const Gas gas_left = interp.gas_left();

    if (is_success(halt))
    {
        outcome.z = 1;
        outcome.gas_cost = tx.gas_limit - gas_left;
        const Gas headroom = (tx.gas_limit - outcome.gas_cost) / schedule.refund_divisor;
        outcome.refund_applied = std::min(headroom, state.refund_counter());
        outcome.gas_used = outcome.gas_cost - outcome.refund_applied;
        state.commit(cp);
    }
    else if (halt == HaltReason::Revert)
    {
        outcome.z = 0;
        outcome.gas_cost = tx.gas_limit - gas_left;
        outcome.gas_used = outcome.gas_cost;
        state.revert_to(cp);
    }
    else
    {
        outcome.z = 0;
        outcome.gas_cost = tx.gas_limit;
        outcome.gas_used = tx.gas_limit;
        state.revert_to(cp);
    }
    outcome.remaining_gas = tx.gas_limit - outcome.gas_used;

    // The gas payment survives both outcomes ("the issuer is not reimbursed").
    state.sub_balance(tx.from, Wei{outcome.gas_used} * tx.gas_price);
    return outcome;
}

TraceCallResult trace_call(const WorldState& state, const BlockContext& block,
    const Transaction& tx, const GasSchedule& schedule)
{
    WorldState forked = state.fork();
    const ExecutionOutcome outcome =
        execute(forked, block, tx, schedule, /*collect_trace=*/false);
    return {outcome.z, outcome.gas_used};
}

}  // namespace gaslab
