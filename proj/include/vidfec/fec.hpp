#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vidfec/gf256.hpp"

namespace vidfec {

// Systematic Reed-Solomon erasure code over GF(256). Parity rows come from a
// Cauchy matrix (x_i = i for parity row i, y_j = h + j for source column j),
// so every k x k submatrix of [I; C] is invertible and any k of the n shards
// reconstruct the block.
struct RsParams {
  int k = 0;  // source shards
  int h = 0;  // parity shards

  RsParams() = default;
  RsParams(int k_, int h_) : k(k_), h(h_) {
    if (k < 1 || h < 0 || k + h > 255)
      throw std::invalid_argument("RsParams: need k >= 1, h >= 0, k + h <= 255");
  }

  int n() const { return k + h; }
  bool operator==(const RsParams&) const = default;
};

// Fraction of the block that may be erased with recovery still guaranteed.
inline double recovery_rate(const RsParams& p) {
  return static_cast<double>(p.h) / static_cast<double>(p.n());
}

namespace detail {

inline std::uint8_t cauchy_coeff(int parity_row, int source_col, int h) {
  return gf256::inv(static_cast<std::uint8_t>(parity_row ^ (h + source_col)));
}

// Gauss-Jordan inversion of a k x k matrix over GF(256). The matrices passed
// in are nonsingular by construction; a zero pivot indicates a logic error.
inline std::vector<std::uint8_t> invert_matrix(std::vector<std::uint8_t> m, int k) {
  std::vector<std::uint8_t> inv(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i) inv[static_cast<std::size_t>(i) * k + i] = 1;
  for (int col = 0; col < k; ++col) {
    int pivot = -1;
    for (int row = col; row < k; ++row) {
      if (m[static_cast<std::size_t>(row) * k + col] != 0) { pivot = row; break; }
    }
    if (pivot < 0) throw std::logic_error("rs_decode: singular recovery matrix");
    if (pivot != col) {
      for (int j = 0; j < k; ++j) {
        std::swap(m[static_cast<std::size_t>(pivot) * k + j], m[static_cast<std::size_t>(col) * k + j]);
        std::swap(inv[static_cast<std::size_t>(pivot) * k + j], inv[static_cast<std::size_t>(col) * k + j]);
      }
    }
    const std::uint8_t d = gf256::inv(m[static_cast<std::size_t>(col) * k + col]);
    for (int j = 0; j < k; ++j) {
      m[static_cast<std::size_t>(col) * k + j] = gf256::mul(m[static_cast<std::size_t>(col) * k + j], d);
      inv[static_cast<std::size_t>(col) * k + j] = gf256::mul(inv[static_cast<std::size_t>(col) * k + j], d);
    }
    for (int row = 0; row < k; ++row) {
      if (row == col) continue;
      const std::uint8_t f = m[static_cast<std::size_t>(row) * k + col];
      if (f == 0) continue;
      for (int j = 0; j < k; ++j) {
        m[static_cast<std::size_t>(row) * k + j] ^= gf256::mul(f, m[static_cast<std::size_t>(col) * k + j]);
        inv[static_cast<std::size_t>(row) * k + j] ^= gf256::mul(f, inv[static_cast<std::size_t>(col) * k + j]);
      }
    }
  }
  return inv;
}

}  // namespace detail

// Encodes k equal-length source shards into k + h shards (source copies
// first, then parity).
inline std::vector<std::vector<std::uint8_t>> rs_encode(
    const std::vector<std::vector<std::uint8_t>>& source, int h) {
  const int k = static_cast<int>(source.size());
  RsParams params(k, h);  // validates ranges
  const std::size_t len = source.empty() ? 0 : source[0].size();
  for (const auto& s : source) {
    if (s.size() != len) throw std::invalid_argument("rs_encode: shard lengths differ");
  }
  std::vector<std::vector<std::uint8_t>> out(static_cast<std::size_t>(params.n()));
  for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = source[static_cast<std::size_t>(j)];
  for (int i = 0; i < h; ++i) {
    auto& parity = out[static_cast<std::size_t>(k + i)];
    parity.assign(len, 0);
    for (int j = 0; j < k; ++j) {
      gf256::mul_add_row(parity.data(), source[static_cast<std::size_t>(j)].data(), len,
                         detail::cauchy_coeff(i, j, h));
    }
  }
  return out;
}

// One FEC block in flight: n shard slots, erased ones empty.
struct FecBlock {
  RsParams params;
  std::vector<std::optional<std::vector<std::uint8_t>>> shards;

  int present_count() const {
    int c = 0;
    for (const auto& s : shards) c += s.has_value() ? 1 : 0;
    return c;
  }
};

// Reconstructs the k source shards, or nullopt when fewer than k shards are
// present (the block is unrecoverable and the frame counts as lost).
inline std::optional<std::vector<std::vector<std::uint8_t>>> rs_decode(const FecBlock& block) {
  const int k = block.params.k;
  const int n = block.params.n();
  if (static_cast<int>(block.shards.size()) != n)
    throw std::invalid_argument("rs_decode: shard slot count does not match params");
  if (block.present_count() < k) return std::nullopt;

  std::size_t len = 0;
  for (const auto& s : block.shards) {
    if (s.has_value()) { len = s->size(); break; }
  }
  for (const auto& s : block.shards) {
    if (s.has_value() && s->size() != len)
      throw std::invalid_argument("rs_decode: shard lengths differ");
  }

  bool all_source_present = true;
  for (int j = 0; j < k; ++j) {
    if (!block.shards[static_cast<std::size_t>(j)].has_value()) { all_source_present = false; break; }
  }
  std::vector<std::vector<std::uint8_t>> out(static_cast<std::size_t>(k));
  if (all_source_present) {
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] = *block.shards[static_cast<std::size_t>(j)];
    return out;
  }

  // Pick k present shards, preferring source rows (identity rows keep the
  // recovery matrix sparse).
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k && static_cast<int>(rows.size()) < k; ++j) {
    if (block.shards[static_cast<std::size_t>(j)].has_value()) rows.push_back(j);
  }
  for (int i = k; i < n && static_cast<int>(rows.size()) < k; ++i) {
    if (block.shards[static_cast<std::size_t>(i)].has_value()) rows.push_back(i);
  }

  std::vector<std::uint8_t> m(static_cast<std::size_t>(k) * k, 0);
  for (int r = 0; r < k; ++r) {
    const int shard_idx = rows[static_cast<std::size_t>(r)];
    if (shard_idx < k) {
      m[static_cast<std::size_t>(r) * k + shard_idx] = 1;
    } else {
      for (int j = 0; j < k; ++j)
        m[static_cast<std::size_t>(r) * k + j] = detail::cauchy_coeff(shard_idx - k, j, block.params.h);
    }
  }
  const auto inv = detail::invert_matrix(std::move(m), k);
  for (int j = 0; j < k; ++j) {
    auto& shard = out[static_cast<std::size_t>(j)];
    shard.assign(len, 0);
    for (int r = 0; r < k; ++r) {
      gf256::mul_add_row(shard.data(), block.shards[static_cast<std::size_t>(rows[static_cast<std::size_t>(r)])]->data(),
                         len, inv[static_cast<std::size_t>(j) * k + r]);
    }
  }
  return out;
}

// Splits a frame's packets into FEC blocks: full groups of block_source_size
// source packets plus a smaller tail group, each protected independently with
// h = ceil(ratio * k) parity packets. The 1e-9 slack absorbs binary
// representation error (0.38 * 50 evaluates just above 19.0).
inline std::vector<RsParams> build_ffblocks(int packet_count, int block_source_size, double ratio) {
  if (packet_count < 1) throw std::invalid_argument("build_ffblocks: packet_count must be >= 1");
  if (block_source_size < 1 || block_source_size > 128)
    throw std::invalid_argument("build_ffblocks: block_source_size must be in [1, 128]");
  if (ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("build_ffblocks: ratio must be in [0, 1]");
  std::vector<RsParams> blocks;
  int remaining = packet_count;
  while (remaining > 0) {
    const int k = remaining >= block_source_size ? block_source_size : remaining;
    int h = 0;
    if (ratio > 0.0) {
      h = static_cast<int>(std::ceil(ratio * k - 1e-9));
      if (h < 1) h = 1;
    }
    blocks.emplace_back(k, h);
    remaining -= k;
  }
  return blocks;
}

}  // namespace vidfec
