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

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "absl/strings/str_cat.h"
#include "sqattack/fpcode.h"

namespace sqattack::fpcode {
namespace {

constexpr char kMagic[4] = {'F', 'P', 'C', '1'};

void PutU64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  out.write(buf, 8);
}

bool GetU64(std::istream& in, std::uint64_t& v) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
  v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | buf[b];
  return true;
}

}  // namespace

absl::Status WriteCode(const CodeMatrix& code, std::ostream& out) {
  out.write(kMagic, 4);
  PutU64(out, code.users());
  PutU64(out, code.length());
  for (double p : code.biases().values()) PutU64(out, std::bit_cast<std::uint64_t>(p));
  for (std::uint64_t w : code.bits().words()) PutU64(out, w);
  if (!out) return absl::DataLossError("failed writing code matrix");
  return absl::OkStatus();
}

absl::StatusOr<CodeMatrix> ReadCode(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    return absl::DataLossError("not an FPC1 code matrix");
  }
  std::uint64_t users = 0, length = 0;
  if (!GetU64(in, users) || !GetU64(in, length) || users == 0 ||
      length == 0) {
    return absl::DataLossError("truncated FPC1 header");
  }
  if (users > (std::uint64_t{1} << 32) || length > (std::uint64_t{1} << 40) ||
      WordsFor(length) > (std::uint64_t{1} << 34) / users) {
    return absl::DataLossError("FPC1 dimensions implausibly large");
  }
  std::vector<double> biases(length);
  for (double& p : biases) {
    std::uint64_t raw;
    if (!GetU64(in, raw)) return absl::DataLossError("truncated bias vector");
    p = std::bit_cast<double>(raw);
  }
  absl::StatusOr<BiasVector> bv = BiasVector::Create(std::move(biases));
  if (!bv.ok()) return absl::DataLossError(bv.status().message());
  BitMatrix bits(users, length);
  for (std::uint64_t& w : bits.mutable_words()) {
    if (!GetU64(in, w)) return absl::DataLossError("truncated bit matrix");
  }
  bits.ClearPadding();
  CodeParams params;
  params.users = users;
  params.length = length;
  return CodeMatrix::Create(params, *std::move(bv), std::move(bits));
}

absl::Status SaveCode(const CodeMatrix& code, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return WriteCode(code, out);
}

absl::StatusOr<CodeMatrix> LoadCode(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadCode(in);
}

}  // namespace sqattack::fpcode
