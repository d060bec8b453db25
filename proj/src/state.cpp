// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaslab/state.hpp"

#include <algorithm>

namespace gaslab
{
namespace
{
const Bytes empty_code{};
}

WorldState WorldState::fork() const
{
    WorldState w;
    w.accounts_ = accounts_;
    return w;
}

const AccountState* WorldState::find_account(const Address& a) const
{
    const auto it = accounts_.find(a);
    return it == accounts_.end() ? nullptr : &it->second;
}

AccountState& WorldState::account_for_write(const Address& a)
{
    const auto it = accounts_.find(a);
    if (it != accounts_.end())
        return it->second;
    journal_.push_back(AccountCreated{a});
    return accounts_[a];
}

Wei WorldState::balance(const Address& a) const
{
    const AccountState* acc = find_account(a);
    return acc ? acc->balance : Wei{0};
}

const Bytes& WorldState::code(const Address& a) const
{
    const AccountState* acc = find_account(a);
    return acc ? acc->code : empty_code;
}

Word WorldState::storage(const Address& a, const Word& slot) const
{
    const AccountState* acc = find_account(a);
    if (!acc)
        return 0;
    const auto it = acc->storage.find(slot);
    return it == acc->storage.end() ? Word{0} : it->second;
}

void WorldState::set_balance(const Address& a, Wei value)
{
    AccountState& acc = account_for_write(a);
    journal_.push_back(BalanceChange{a, acc.balance});
    acc.balance = std::move(value);
}

void WorldState::add_balance(const Address& a, const Wei& delta)
{
    set_balance(a, balance(a) + delta);
}

void WorldState::sub_balance(const Address& a, const Wei& delta)
{
    Wei current = balance(a);
    if (current < delta)
        throw std::runtime_error{"balance underflow at " + to_string(a)};
    set_balance(a, current - delta);
}

void WorldState::set_code(const Address& a, Bytes code)
{
    // Code is scenario setup, never mutated mid-transaction; not journaled.
    account_for_write(a).code = std::move(code);
}

void WorldState::set_storage(const Address& a, const Word& slot, const Word& value)
{
    AccountState& acc = account_for_write(a);
    const auto it = acc.storage.find(slot);
    const Word prev = it == acc.storage.end() ? Word{0} : it->second;

    original_storage_.try_emplace(StorageKey{a, slot}, prev);
    journal_.push_back(StorageChange{a, slot, prev});

    if (value == 0)
    {
        if (it != acc.storage.end())
            acc.storage.erase(it);
    }
    else
    {
        acc.storage[slot] = value;
    }
}

Word WorldState::original_storage(const Address& a, const Word& slot) const
{
    const auto it = original_storage_.find(StorageKey{a, slot});
    return it == original_storage_.end() ? storage(a, slot) : it->second;
}

bool WorldState::touch_address(const Address& a)
{
    if (warm_addresses_.contains(a))
        return false;
    warm_addresses_.insert(a);
    journal_.push_back(WarmAddressAdded{a});
    return true;
}

bool WorldState::touch_slot(const Address& a, const Word& slot)
{
    const StorageKey key{a, slot};
    if (warm_slots_.contains(key))
        return false;
    warm_slots_.insert(key);
    journal_.push_back(WarmSlotAdded{a, slot});
    return true;
}

bool WorldState::is_warm_address(const Address& a) const
{
    return warm_addresses_.contains(a);
}

bool WorldState::is_warm_slot(const Address& a, const Word& slot) const
{
    return warm_slots_.contains(StorageKey{a, slot});
}

void WorldState::add_refund(Gas amount)
{
    journal_.push_back(RefundChange{refund_counter_});
    refund_counter_ = checked_add(refund_counter_, amount);
}

void WorldState::sub_refund(Gas amount)
{
    if (amount > refund_counter_)
        throw std::runtime_error{"refund counter underflow"};
    journal_.push_back(RefundChange{refund_counter_});
    refund_counter_ -= amount;
}

CheckpointId WorldState::checkpoint()
{
    const CheckpointId id{next_checkpoint_serial_++};
    open_checkpoints_.push_back({id.serial, journal_.size()});
    return id;
}

void WorldState::revert_to(CheckpointId id)
{
    const auto it = std::find_if(open_checkpoints_.begin(), open_checkpoints_.end(),
        [&](const OpenCheckpoint& c) { return c.serial == id.serial; });
    if (it == open_checkpoints_.end())
        throw StaleCheckpoint{};

    const std::size_t target = it->journal_size;
    while (journal_.size() > target)
    {
        undo(journal_.back());
        journal_.pop_back();
    }
    // The checkpoint and everything nested inside it are consumed.
    open_checkpoints_.erase(it, open_checkpoints_.end());
}

void WorldState::commit(CheckpointId id)
{
    const auto it = std::find_if(open_checkpoints_.begin(), open_checkpoints_.end(),
        [&](const OpenCheckpoint& c) { return c.serial == id.serial; });
    if (it == open_checkpoints_.end())
        throw StaleCheckpoint{};
    open_checkpoints_.erase(it, open_checkpoints_.end());
}

void WorldState::undo(const JournalEntry& entry)
{
    std::visit(
        [this](const auto& e) {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, StorageChange>)
            {
                AccountState& acc = accounts_.at(e.address);
                if (e.prev == 0)
                    acc.storage.erase(e.slot);
                else
                    acc.storage[e.slot] = e.prev;
            }
            else if constexpr (std::is_same_v<E, BalanceChange>)
            {
                accounts_.at(e.address).balance = e.prev;
            }
            else if constexpr (std::is_same_v<E, AccountCreated>)
            {
                accounts_.erase(e.address);
            }
            else if constexpr (std::is_same_v<E, WarmAddressAdded>)
            {
                warm_addresses_.erase(e.address);
            }
            else if constexpr (std::is_same_v<E, WarmSlotAdded>)
            {
                warm_slots_.erase(StorageKey{e.address, e.slot});
            }
            else if constexpr (std::is_same_v<E, RefundChange>)
            {
                refund_counter_ = e.prev;
            }
        },
        entry);
}

void WorldState::begin_transaction()
{
    if (!open_checkpoints_.empty())
        throw std::runtime_error{"begin_transaction with open checkpoints"};
    journal_.clear();
    original_storage_.clear();
    warm_addresses_.clear();
    warm_slots_.clear();
    refund_counter_ = 0;
}

bool WorldState::accounts_equal(const WorldState& other) const
{
    return accounts_ == other.accounts_;
}

}  // namespace gaslab
