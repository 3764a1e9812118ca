// Copyright 2026 The sqattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Single-bit private-key encryption. The stream scheme XORs each message
// bit with a ChaCha20 keystream bit (libsodium) selected by a per-key
// sequential nonce; the ChaCha20 key is BLAKE2b-256 of the key bits. The
// pad scheme XORs with pad bit number `nonce`.

#ifndef SQATTACK_CRYPTO_H_
#define SQATTACK_CRYPTO_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "sqattack/rng.h"

namespace sqattack::crypto {

using Bit = std::uint8_t;

enum class Scheme { kPseudorandomStream, kOneTimePad };

std::string_view SchemeName(Scheme scheme);
absl::StatusOr<Scheme> ParseScheme(std::string_view name);

struct SchemeKind {
  Scheme scheme = Scheme::kOneTimePad;
  // Security parameter lambda for the stream scheme, budget k for the pad.
  std::size_t parameter = 1;

  static SchemeKind Stream(std::size_t lambda) {
    return {Scheme::kPseudorandomStream, lambda};
  }
  static SchemeKind Pad(std::size_t budget) {
    return {Scheme::kOneTimePad, budget};
  }

  absl::Status Validate() const;
  // Key length in bits: lambda or k.
  std::size_t KeyLength() const { return parameter; }
  // Encryptions a key supports.
  std::uint64_t Budget() const;

  friend bool operator==(const SchemeKind&, const SchemeKind&) = default;
};

class SecretKey {
 public:
  SecretKey() = default;

  const SchemeKind& kind() const { return kind_; }
  std::size_t length() const { return kind_.KeyLength(); }
  std::uint64_t counter() const { return counter_; }
  bool KeyBit(std::size_t t) const {
    return (material_->bits[t / 64] >> (t % 64)) & 1;
  }
  std::span<const std::uint64_t> key_words() const { return material_->bits; }
  bool valid() const { return material_ != nullptr; }

  // Same key bits (the counter is not compared).
  bool SameKeyAs(const SecretKey& other) const;

 private:
  friend class KeyAccess;

  struct Material {
    std::vector<std::uint64_t> bits;
    unsigned char stream_key[32] = {};
  };

  SchemeKind kind_;
  std::shared_ptr<const Material> material_;
  std::uint64_t counter_ = 0;
};

struct Ciphertext {
  Bit payload = 0;
  std::uint64_t nonce = 0;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// A run of ciphertexts under one key with consecutive nonces
// first_nonce, first_nonce + 1, ...; payload bits packed LSB first.
struct CiphertextRun {
  std::uint64_t first_nonce = 0;
  std::size_t count = 0;
  std::vector<std::uint64_t> payload;

  Bit PayloadAt(std::size_t t) const { return (payload[t / 64] >> (t % 64)) & 1; }
  Ciphertext At(std::size_t t) const {
    return {PayloadAt(t), first_nonce + t};
  }
};

absl::StatusOr<SecretKey> KeyGen(const SchemeKind& kind, Rng& rng);
absl::StatusOr<SecretKey> KeyFromWords(const SchemeKind& kind,
                                       std::vector<std::uint64_t> words);

absl::StatusOr<Ciphertext> Encrypt(SecretKey& key, Bit m);
// Encrypts `count` packed message bits under consecutive nonces.
absl::StatusOr<CiphertextRun> EncryptBits(SecretKey& key,
                                          std::span<const std::uint64_t> bits,
                                          std::size_t count);
absl::StatusOr<Bit> Decrypt(const SecretKey& key, const Ciphertext& c);

// Challenge oracles: world 1 encrypts m, world 0 encrypts 0.
absl::StatusOr<Ciphertext> EOracle(int world, std::span<SecretKey> keys,
                                   std::size_t i, Bit m);
absl::StatusOr<CiphertextRun> EOracleBits(int world,
                                          std::span<SecretKey> keys,
                                          std::size_t i,
                                          std::span<const std::uint64_t> bits,
                                          std::size_t count);

// "scheme:keylen:hex" with key bits packed little-endian into bytes.
std::string KeyToString(const SecretKey& key);
absl::StatusOr<SecretKey> KeyFromString(std::string_view text);
// "nonce:hex" with the nonce in hex and a one-digit payload.
std::string CiphertextToString(const Ciphertext& c);
absl::StatusOr<Ciphertext> CiphertextFromString(std::string_view text);

}  // namespace sqattack::crypto

#endif  // SQATTACK_CRYPTO_H_
