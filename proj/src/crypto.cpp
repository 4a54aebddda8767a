#include "slar/crypto.hpp"

#include <algorithm>

#include <boost/random/uniform_int_distribution.hpp>
#include <openssl/evp.h>

namespace slar::crypto {

namespace {

constexpr std::array<std::uint64_t, 8> kPrimes = {
    2305843009213693951ULL,   // 2^61 - 1
    18446744073709551557ULL,  // 2^64 - 59
    9223372036854775783ULL,   // 2^63 - 25
    4611686018427387847ULL,   // 2^62 - 57
    1152921504606846883ULL,   // 2^60 - 93
    576460752303423433ULL,    // 2^59 - 55
    288230376151711717ULL,    // 2^58 - 27
    144115188075855859ULL,    // 2^57 - 13
};

void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

BigInt uniform_between(const BigInt& lo, const BigInt& hi, Rng& rng) {
  boost::random::uniform_int_distribution<BigInt> dist(lo, hi);
  return dist(rng);
}

}  // namespace

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("BitString: element is not a bit");
  }
}

BitString BitString::from_text(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected '0' or '1'");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitString(std::move(bits));
}

std::string BitString::to_text() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

BigInt mod_pow(BigInt base, BigInt exponent, const BigInt& modulus) {
  if (modulus < 2) throw std::invalid_argument("mod_pow: modulus must be >= 2");
  if (exponent < 0) throw std::invalid_argument("mod_pow: negative exponent");
  base %= modulus;
  if (base < 0) base += modulus;
  BigInt result = 1;
  while (exponent > 0) {
    if ((exponent & 1) != 0) result = (result * base) % modulus;
    base = (base * base) % modulus;
    exponent >>= 1;
  }
  return result;
}

PublicKey gen_public(const DhParams& params, const PrivateKey& priv) {
  return PublicKey{mod_pow(params.base, priv.r, params.modulus)};
}

Bytes encode(const Concatenation& msg) {
  Bytes key_bytes;
  boost::multiprecision::export_bits(msg.public_key.g, std::back_inserter(key_bytes), 8,
                                     /*msv_first=*/true);
  // export_bits emits a single zero byte for zero; keep the encoding minimal.
  if (msg.public_key.g == 0) key_bytes.clear();

  Bytes out;
  put_u32(out, static_cast<std::uint32_t>(key_bytes.size()));
  out.insert(out.end(), key_bytes.begin(), key_bytes.end());

  const auto& bits = msg.random_string.bits.bits();
  Bytes packed((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) packed[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

Concatenation decode_concatenation(std::span<const std::uint8_t> bytes, std::size_t k) {
  if (bytes.size() < 4) throw std::invalid_argument("decode_concatenation: truncated header");
  const std::uint32_t len = (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
                            (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
  const std::size_t packed_len = (k + 7) / 8;
  if (bytes.size() != 4 + std::size_t{len} + packed_len) {
    throw std::invalid_argument("decode_concatenation: length mismatch");
  }
  Concatenation msg;
  auto key_bytes = bytes.subspan(4, len);
  if (!key_bytes.empty()) {
    boost::multiprecision::import_bits(msg.public_key.g, key_bytes.begin(), key_bytes.end(), 8,
                                       true);
  }
  auto packed = bytes.subspan(4 + len);
  std::vector<std::uint8_t> bits(k);
  for (std::size_t i = 0; i < k; ++i) {
    bits[i] = (packed[i / 8] >> (7 - i % 8)) & 1u;
  }
  msg.random_string.bits = BitString(std::move(bits));
  return msg;
}

Commitment commit(const Concatenation& msg, std::span<const std::uint8_t> nonce) {
  if (nonce.empty()) throw std::invalid_argument("commit: empty nonce");
  const Bytes encoded = encode(msg);
  Bytes input;
  input.reserve(4 + encoded.size() + nonce.size());
  put_u32(input, static_cast<std::uint32_t>(encoded.size()));
  input.insert(input.end(), encoded.begin(), encoded.end());
  input.insert(input.end(), nonce.begin(), nonce.end());

  Commitment c;
  unsigned int out_len = 0;
  if (EVP_Digest(input.data(), input.size(), c.digest.data(), &out_len, EVP_sha256(), nullptr) !=
          1 ||
      out_len != c.digest.size()) {
    throw std::runtime_error("commit: SHA-256 failed");
  }
  return c;
}

Concatenation open_verify(const Commitment& c, const OpenParam& w) {
  if (w.nonce.empty() || commit(w.committed_message, w.nonce) != c) {
    throw CommitmentMismatch();
  }
  return w.committed_message;
}

AuthString auth_string(const RandomString& a, const RandomString& b) {
  const auto& x = a.bits.bits();
  const auto& y = b.bits.bits();
  if (x.size() != y.size()) throw std::invalid_argument("auth_string: length mismatch");
  std::vector<std::uint8_t> out(x.size());
  std::transform(x.begin(), x.end(), y.begin(), out.begin(),
                 [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p ^ q); });
  return AuthString{BitString(std::move(out))};
}

SharedKey shared_key(const DhParams& params, const PublicKey& peer_public,
                     const PrivateKey& own_private) {
  return SharedKey{mod_pow(peer_public.g, own_private.r, params.modulus)};
}

std::span<const std::uint64_t> default_prime_list() { return kPrimes; }

DhParams draw_params(Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, kPrimes.size() - 1);
  DhParams p;
  p.modulus = kPrimes[pick(rng)];
  p.base = uniform_between(2, p.modulus - 2, rng);
  return p;
}

PrivateKey draw_private(const DhParams& params, Rng& rng) {
  return PrivateKey{uniform_between(1, params.modulus - 1, rng)};
}

RandomString draw_random_string(std::size_t k, Rng& rng) {
  std::vector<std::uint8_t> bits(k);
  std::bernoulli_distribution coin(0.5);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return RandomString{BitString(std::move(bits))};
}

Bytes draw_nonce(Rng& rng) {
  Bytes nonce(kNonceBytes);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& b : nonce) b = static_cast<std::uint8_t>(byte(rng));
  return nonce;
}

}  // namespace slar::crypto
