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

#include "sqattack/crypto.h"

#include <sodium.h>

#include <charconv>
#include <cstring>
#include <limits>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "sqattack/bit_matrix.h"
#include "sv.h"

namespace sqattack::crypto {

class KeyAccess {
 public:
  static SecretKey Make(const SchemeKind& kind,
                        std::vector<std::uint64_t> words) {
    auto material = std::make_shared<SecretKey::Material>();
    material->bits = std::move(words);
    if (kind.scheme == Scheme::kPseudorandomStream) {
      std::vector<unsigned char> bytes((kind.parameter + 7) / 8);
      for (std::size_t b = 0; b < bytes.size(); ++b) {
        bytes[b] = static_cast<unsigned char>(
            (material->bits[b / 8] >> (8 * (b % 8))) & 0xff);
      }
      crypto_generichash(material->stream_key, sizeof(material->stream_key),
                         bytes.data(), bytes.size(), nullptr, 0);
    }
    SecretKey key;
    key.kind_ = kind;
    key.material_ = std::move(material);
    return key;
  }
  static const unsigned char* StreamKey(const SecretKey& key) {
    return key.material_->stream_key;
  }
  static std::uint64_t& Counter(SecretKey& key) { return key.counter_; }
};

namespace {

void EnsureSodium() {
  static const int once = sodium_init();
  (void)once;
}

constexpr std::size_t kBlockBits = 512;

// Bits [offset, offset + count) of src, packed from bit 0.
std::vector<std::uint64_t> ExtractBits(std::span<const std::uint64_t> src,
                                       std::size_t offset, std::size_t count) {
  std::vector<std::uint64_t> out(WordsFor(count), 0);
  const std::size_t shift = offset % 64;
  const std::size_t first = offset / 64;
  for (std::size_t w = 0; w < out.size(); ++w) {
    const std::size_t i = first + w;
    std::uint64_t v = i < src.size() ? src[i] >> shift : 0;
    if (shift != 0 && i + 1 < src.size()) v |= src[i + 1] << (64 - shift);
    out[w] = v;
  }
  if (count % 64 != 0) out.back() &= (std::uint64_t{1} << (count % 64)) - 1;
  return out;
}

std::vector<std::uint64_t> Keystream(const unsigned char* key,
                                     std::uint64_t start, std::size_t count) {
  const std::uint64_t first_block = start / kBlockBits;
  const std::uint64_t last_block = (start + count - 1) / kBlockBits;
  const std::size_t blocks = last_block - first_block + 1;
  std::vector<unsigned char> bytes(blocks * 64, 0);
  const unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {};
  crypto_stream_chacha20_xor_ic(bytes.data(), bytes.data(), bytes.size(),
                                nonce, first_block, key);
  std::vector<std::uint64_t> words(blocks * 8);
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | bytes[8 * w + b];
    words[w] = v;
  }
  return ExtractBits(words, start - first_block * kBlockBits, count);
}

Bit KeystreamBit(const unsigned char* key, std::uint64_t t) {
  unsigned char block[64] = {};
  const unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {};
  crypto_stream_chacha20_xor_ic(block, block, sizeof(block), nonce,
                                t / kBlockBits, key);
  const std::size_t bit = t % kBlockBits;
  return (block[bit / 8] >> (bit % 8)) & 1;
}

std::vector<std::uint64_t> Pad(const SecretKey& key, std::uint64_t start,
                               std::size_t count) {
  return ExtractBits(key.key_words(), start, count);
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view SchemeName(Scheme scheme) {
  return scheme == Scheme::kOneTimePad ? "otp" : "prf";
}

absl::StatusOr<Scheme> ParseScheme(std::string_view name) {
  if (name == "otp" || name == "pad") return Scheme::kOneTimePad;
  if (name == "prf" || name == "stream") return Scheme::kPseudorandomStream;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown scheme '", Sv(name), "' (expected otp or prf)"));
}

absl::Status SchemeKind::Validate() const {
  if (scheme == Scheme::kPseudorandomStream && parameter < 16) {
    return absl::InvalidArgumentError(
        absl::StrCat("stream security parameter ", parameter, " < 16"));
  }
  if (scheme == Scheme::kOneTimePad && parameter < 1) {
    return absl::InvalidArgumentError("pad budget must be >= 1");
  }
  return absl::OkStatus();
}

std::uint64_t SchemeKind::Budget() const {
  return scheme == Scheme::kOneTimePad
             ? parameter
             : std::numeric_limits<std::uint64_t>::max();
}

bool SecretKey::SameKeyAs(const SecretKey& other) const {
  if (!valid() || !other.valid()) return valid() == other.valid();
  return kind_ == other.kind_ && material_->bits == other.material_->bits;
}

absl::StatusOr<SecretKey> KeyGen(const SchemeKind& kind, Rng& rng) {
  if (absl::Status s = kind.Validate(); !s.ok()) return s;
  EnsureSodium();
  std::vector<std::uint64_t> words(WordsFor(kind.KeyLength()));
  for (auto& w : words) w = rng();
  if (kind.KeyLength() % 64 != 0) {
    words.back() &= (std::uint64_t{1} << (kind.KeyLength() % 64)) - 1;
  }
  return KeyAccess::Make(kind, std::move(words));
}

absl::StatusOr<SecretKey> KeyFromWords(const SchemeKind& kind,
                                       std::vector<std::uint64_t> words) {
  if (absl::Status s = kind.Validate(); !s.ok()) return s;
  if (words.size() != WordsFor(kind.KeyLength())) {
    return absl::InvalidArgumentError("key word count mismatch");
  }
  EnsureSodium();
  if (kind.KeyLength() % 64 != 0) {
    words.back() &= (std::uint64_t{1} << (kind.KeyLength() % 64)) - 1;
  }
  return KeyAccess::Make(kind, std::move(words));
}

absl::StatusOr<CiphertextRun> EncryptBits(SecretKey& key,
                                          std::span<const std::uint64_t> bits,
                                          std::size_t count) {
  if (!key.valid()) return absl::FailedPreconditionError("empty key");
  if (bits.size() < WordsFor(count)) {
    return absl::InvalidArgumentError("message shorter than count");
  }
  std::uint64_t& counter = KeyAccess::Counter(key);
  const std::uint64_t budget = key.kind().Budget();
  if (counter > budget || count > budget - counter) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "pad budget exhausted: ", counter, " used, ", count,
        " requested, budget ", budget));
  }
  CiphertextRun run;
  run.first_nonce = counter;
  run.count = count;
  if (count == 0) return run;
  run.payload = key.kind().scheme == Scheme::kOneTimePad
                    ? Pad(key, counter, count)
                    : Keystream(KeyAccess::StreamKey(key), counter, count);
  for (std::size_t w = 0; w < run.payload.size(); ++w) run.payload[w] ^= bits[w];
  if (count % 64 != 0) {
    run.payload.back() &= (std::uint64_t{1} << (count % 64)) - 1;
  }
  counter += count;
  return run;
}

absl::StatusOr<Ciphertext> Encrypt(SecretKey& key, Bit m) {
  const std::uint64_t word = m & 1;
  absl::StatusOr<CiphertextRun> run = EncryptBits(key, {&word, 1}, 1);
  if (!run.ok()) return run.status();
  return run->At(0);
}

absl::StatusOr<Bit> Decrypt(const SecretKey& key, const Ciphertext& c) {
  if (!key.valid()) return absl::FailedPreconditionError("empty key");
  if (c.payload > 1) {
    return absl::InvalidArgumentError("malformed ciphertext payload");
  }
  if (key.kind().scheme == Scheme::kOneTimePad) {
    if (c.nonce >= key.length()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "ciphertext position ", c.nonce, " beyond pad of ", key.length()));
    }
    return static_cast<Bit>(c.payload ^ key.KeyBit(c.nonce));
  }
  return static_cast<Bit>(c.payload ^
                          KeystreamBit(KeyAccess::StreamKey(key), c.nonce));
}

absl::StatusOr<CiphertextRun> EOracleBits(int world,
                                          std::span<SecretKey> keys,
                                          std::size_t i,
                                          std::span<const std::uint64_t> bits,
                                          std::size_t count) {
  if (i >= keys.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("key index ", i, " out of range for ", keys.size()));
  }
  if (world == 1) return EncryptBits(keys[i], bits, count);
  const std::vector<std::uint64_t> zeros(WordsFor(count), 0);
  return EncryptBits(keys[i], zeros, count);
}

absl::StatusOr<Ciphertext> EOracle(int world, std::span<SecretKey> keys,
                                   std::size_t i, Bit m) {
  const std::uint64_t word = m & 1;
  absl::StatusOr<CiphertextRun> run = EOracleBits(world, keys, i, {&word, 1}, 1);
  if (!run.ok()) return run.status();
  return run->At(0);
}

std::string KeyToString(const SecretKey& key) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = absl::StrCat(Sv(SchemeName(key.kind().scheme)), ":",
                                 key.length(), ":");
  const std::size_t bytes = (key.length() + 7) / 8;
  for (std::size_t b = 0; b < bytes; ++b) {
    const unsigned v = (key.key_words()[b / 8] >> (8 * (b % 8))) & 0xff;
    out.push_back(kHex[v >> 4]);
    out.push_back(kHex[v & 15]);
  }
  return out;
}

absl::StatusOr<SecretKey> KeyFromString(std::string_view text) {
  std::vector<absl::string_view> parts = absl::StrSplit(Sv(text), ':');
  if (parts.size() != 3) return absl::InvalidArgumentError("malformed key");
  absl::StatusOr<Scheme> scheme = ParseScheme(Std(parts[0]));
  if (!scheme.ok()) return scheme.status();
  std::size_t length = 0;
  if (!absl::SimpleAtoi(parts[1], &length) || length == 0) {
    return absl::InvalidArgumentError("malformed key length");
  }
  const std::size_t bytes = (length + 7) / 8;
  if (parts[2].size() != 2 * bytes) {
    return absl::InvalidArgumentError("key hex length mismatch");
  }
  std::vector<std::uint64_t> words(WordsFor(length), 0);
  for (std::size_t b = 0; b < bytes; ++b) {
    const int hi = HexDigit(parts[2][2 * b]);
    const int lo = HexDigit(parts[2][2 * b + 1]);
    if (hi < 0 || lo < 0) return absl::InvalidArgumentError("bad key hex");
    words[b / 8] |= static_cast<std::uint64_t>(hi * 16 + lo) << (8 * (b % 8));
  }
  if (length % 64 != 0 && (words.back() >> (length % 64)) != 0) {
    return absl::InvalidArgumentError("key hex has bits past its length");
  }
  return KeyFromWords({*scheme, length}, std::move(words));
}

std::string CiphertextToString(const Ciphertext& c) {
  return absl::StrCat(absl::Hex(c.nonce), ":", c.payload & 1);
}

absl::StatusOr<Ciphertext> CiphertextFromString(std::string_view text) {
  std::vector<absl::string_view> parts = absl::StrSplit(Sv(text), ':');
  if (parts.size() != 2 || parts[1].size() != 1) {
    return absl::InvalidArgumentError("malformed ciphertext");
  }
  Ciphertext c;
  const auto [ptr, ec] = std::from_chars(
      parts[0].data(), parts[0].data() + parts[0].size(), c.nonce, 16);
  if (parts[0].empty() || ec != std::errc() ||
      ptr != parts[0].data() + parts[0].size()) {
    return absl::InvalidArgumentError("malformed ciphertext nonce");
  }
  const int payload = HexDigit(parts[1][0]);
  if (payload < 0 || payload > 1) {
    return absl::InvalidArgumentError("malformed ciphertext payload");
  }
  c.payload = static_cast<Bit>(payload);
  return c;
}

}  // namespace sqattack::crypto
