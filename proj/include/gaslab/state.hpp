// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/chain.hpp"
#include "gaslab/types.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <variant>
#include <vector>

namespace gaslab
{
/// Balance, code, and storage of one account. Storage never holds an explicit
/// zero: writing zero deletes the entry, reading an absent slot yields zero.
struct AccountState
{
    Wei balance = 0;
    Bytes code;
    std::map<Word, Word> storage;

    friend bool operator==(const AccountState&, const AccountState&) = default;
};

struct CheckpointId
{
    std::uint64_t serial = 0;
};

struct StaleCheckpoint : std::runtime_error
{
    StaleCheckpoint() : std::runtime_error("unknown or stale checkpoint id") {}
};

/// The full blockchain state plus the per-transaction bookkeeping the gas
/// system needs: warm-access sets, the refund counter, the
/// original-storage-value snapshot, and a change journal supporting nested
/// checkpoint/revert.
class WorldState
{
public:
    WorldState() = default;

    // Single-owner: journaled state must not be copied casually. Use fork().
    WorldState(const WorldState&) = delete;
    WorldState& operator=(const WorldState&) = delete;
    WorldState(WorldState&&) = default;
    WorldState& operator=(WorldState&&) = default;

    /// Independent deep copy of the accounts; warm sets, journal, refund
    /// counter, and original-storage snapshot start empty.
    WorldState fork() const;

    // -- accounts ------------------------------------------------------

    const AccountState* find_account(const Address& a) const;
    Wei balance(const Address& a) const;
    const Bytes& code(const Address& a) const;
    Word storage(const Address& a, const Word& slot) const;

    void set_balance(const Address& a, Wei value);
    void add_balance(const Address& a, const Wei& delta);
    /// Throws std::runtime_error if the account cannot cover `delta`.
    void sub_balance(const Address& a, const Wei& delta);
    void set_code(const Address& a, Bytes code);
    void set_storage(const Address& a, const Word& slot, const Word& value);

    /// Storage value at transaction start (before any journaled write).
    Word original_storage(const Address& a, const Word& slot) const;

    // -- warm/cold tracking --------------------------------------------

    /// Marks warm; returns whether the address/slot was cold before the call.
    bool touch_address(const Address& a);
    bool touch_slot(const Address& a, const Word& slot);
    bool is_warm_address(const Address& a) const;
    bool is_warm_slot(const Address& a, const Word& slot) const;

    // -- refund counter --------------------------------------------------

    Gas refund_counter() const { return refund_counter_; }
    void add_refund(Gas amount);
    void sub_refund(Gas amount);

    // -- journal -----------------------------------------------------------

    CheckpointId checkpoint();
    void revert_to(CheckpointId id);
    void commit(CheckpointId id);

    /// Resets all per-transaction bookkeeping (warm sets, refund counter,
    /// original-storage snapshot, journal). Requires no open checkpoints.
    void begin_transaction();

    /// Deep equality of the persistent part (accounts only).
    bool accounts_equal(const WorldState& other) const;
    const std::map<Address, AccountState>& accounts() const { return accounts_; }
    std::map<Address, AccountState>& accounts_mutable() { return accounts_; }

private:
    struct StorageChange
    {
        Address address;
        Word slot;
        Word prev;  // zero encodes "absent"
    };
    struct BalanceChange
    {
        Address address;
        Wei prev;
    };
    struct AccountCreated
    {
        Address address;
    };
    struct WarmAddressAdded
    {
        Address address;
    };
    struct WarmSlotAdded
    {
        Address address;
        Word slot;
    };
    struct RefundChange
    {
        Gas prev;
    };
    using JournalEntry = std::variant<StorageChange, BalanceChange,
        AccountCreated, WarmAddressAdded, WarmSlotAdded, RefundChange>;

    AccountState& account_for_write(const Address& a);
    void undo(const JournalEntry& entry);

    std::map<Address, AccountState> accounts_;
    std::map<StorageKey, Word> original_storage_;
    std::set<Address> warm_addresses_;
    std::set<StorageKey> warm_slots_;
    std::vector<JournalEntry> journal_;
    Gas refund_counter_ = 0;

    struct OpenCheckpoint
    {
        std::uint64_t serial;
        std::size_t journal_size;
    };
    std::vector<OpenCheckpoint> open_checkpoints_;
    std::uint64_t next_checkpoint_serial_ = 1;
};

}  // namespace gaslab
