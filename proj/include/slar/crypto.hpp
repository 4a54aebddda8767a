#pragma once

// Diffie-Hellman key agreement with a hash commitment and a short
// authentication string (SAS) compared over an out-of-band channel.

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace slar::crypto {

using BigInt = boost::multiprecision::cpp_int;
using Bytes = std::vector<std::uint8_t>;
using Rng = std::mt19937_64;

inline constexpr std::size_t kDefaultStringBits = 10;
inline constexpr std::size_t kNonceBytes = 16;

class CommitmentMismatch : public std::runtime_error {
 public:
  CommitmentMismatch() : std::runtime_error("commitment does not match opening") {}
};

struct DhParams {
  BigInt modulus;
  BigInt base;
};

struct PrivateKey {
  BigInt r;
};

struct PublicKey {
  BigInt g;
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

/// Fixed-length bit sequence, one element per bit, each 0 or 1.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits);
  /// Parses "1010..." text; anything other than '0'/'1' throws.
  static BitString from_text(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool bit(std::size_t i) const { return bits_.at(i) != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string to_text() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct RandomString {
  BitString bits;
  friend bool operator==(const RandomString&, const RandomString&) = default;
};

struct AuthString {
  BitString bits;
  friend bool operator==(const AuthString&, const AuthString&) = default;
};

/// Public key concatenated with the node's k-bit random string.
struct Concatenation {
  PublicKey public_key;
  RandomString random_string;
  friend bool operator==(const Concatenation&, const Concatenation&) = default;
};

struct Commitment {
  std::array<std::uint8_t, 32> digest{};
  friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct OpenParam {
  Concatenation committed_message;
  Bytes nonce;
};

struct SharedKey {
  BigInt key;
  friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

/// Square-and-multiply modular exponentiation.
BigInt mod_pow(BigInt base, BigInt exponent, const BigInt& modulus);

PublicKey gen_public(const DhParams& params, const PrivateKey& priv);

/// Wire encoding: u32 big-endian byte length, the public key as minimal
/// big-endian bytes, then the k bits packed most-significant-first into
/// ceil(k/8) bytes (trailing pad bits zero).
Bytes encode(const Concatenation& msg);
Concatenation decode_concatenation(std::span<const std::uint8_t> bytes, std::size_t k);

/// SHA-256 over (u32 big-endian length of encode(msg)) || encode(msg) || nonce.
Commitment commit(const Concatenation& msg, std::span<const std::uint8_t> nonce);

/// Returns the committed message, or throws CommitmentMismatch.
Concatenation open_verify(const Commitment& c, const OpenParam& w);

/// Bitwise XOR of the two strings; throws std::invalid_argument on a length
/// mismatch.
AuthString auth_string(const RandomString& a, const RandomString& b);

SharedKey shared_key(const DhParams& params, const PublicKey& peer_public,
                     const PrivateKey& own_private);

// Random material.

/// 64-bit-range primes shared by every node of a scenario.
std::span<const std::uint64_t> default_prime_list();

/// Draws a modulus from default_prime_list() and a base in [2, m-2].
DhParams draw_params(Rng& rng);
PrivateKey draw_private(const DhParams& params, Rng& rng);
RandomString draw_random_string(std::size_t k, Rng& rng);
Bytes draw_nonce(Rng& rng);

}  // namespace slar::crypto
