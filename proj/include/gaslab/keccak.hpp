// gaslab: a desk-scale EVM gas laboratory
// Copyright 2026 The gaslab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaslab/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>

namespace gaslab
{
/// Keccak-256 with the original 0x01 domain padding (the Ethereum variant,
/// not FIPS-202 SHA3-256).
std::array<std::uint8_t, 32> keccak256(const std::uint8_t* data, std::size_t size);
std::array<std::uint8_t, 32> keccak256(const Bytes& data);

/// The digest as a 256-bit word (big-endian interpretation).
Word keccak256_word(const std::uint8_t* data, std::size_t size);

}  // namespace gaslab
