#pragma once

// Classical ciphers, frequency analysis and bit-level one-time pad.
//
// Letter-wise ciphers act on ASCII A-Z/a-z only; everything else passes
// through unchanged unless a cipher states otherwise.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qcomm::cipher {

using BitSequence = std::vector<std::uint8_t>;

std::string rail_fence_encrypt(std::string_view m, int rails);
std::string rail_fence_decrypt(std::string_view c, int rails);

// Shift is taken mod 26; case preserved.
std::string caesar(std::string_view m, int shift);
std::string rot13(std::string_view m);

// The key index advances only on letters of the message. Non-letters in the
// key are ignored; at least one key letter is required.
std::string vigenere_encrypt(std::string_view m, std::string_view key);
std::string vigenere_decrypt(std::string_view c, std::string_view key);

class PlayfairTable {
 public:
  // 25 distinct letters in row-major order; case-insensitive.
  explicit PlayfairTable(std::string_view letters);
  static PlayfairTable reference();

  char at(int row, int col) const { return grid_[static_cast<std::size_t>(5 * row + col)]; }
  bool contains(char upper) const { return pos_[static_cast<std::size_t>(upper - 'A')] >= 0; }
  int row_of(char upper) const { return pos_[static_cast<std::size_t>(upper - 'A')] / 5; }
  int col_of(char upper) const { return pos_[static_cast<std::size_t>(upper - 'A')] % 5; }
  const std::string& letters() const { return grid_; }

 private:
  std::string grid_;
  std::array<int, 26> pos_{};
};

// Uppercase letters only; J folds to I when the table lacks J. A doubled
// letter inside a digraph gets X inserted (Q when the letter is X); an odd
// tail is padded the same way.
std::string playfair_prepare(std::string_view m, const PlayfairTable& table);

// Rectangle rule: each letter moves to its partner's row within its own
// column. Letters sharing a row or column swap places. Both rules are
// involutions, so decryption applies the same map.
std::string playfair_encrypt(std::string_view m, const PlayfairTable& table);
std::string playfair_decrypt(std::string_view c, const PlayfairTable& table);

// Digraphs separated by single spaces, for display.
std::string digraphs(std::string_view letters);

// Each letter becomes its cyclic predecessor and successor; non-letters are
// dropped.
std::string homophonic_encrypt(std::string_view m);
std::string homophonic_decrypt(std::string_view c);

// 8 bits per character, most significant first. Characters above 127 throw.
BitSequence ascii_to_bits(std::string_view text);
std::string bits_to_ascii(const BitSequence& bits);
std::string bits_to_string(const BitSequence& bits);
BitSequence bits_from_string(std::string_view zeros_and_ones);

using LetterFrequencies = std::array<double, 26>;

LetterFrequencies frequency_analysis(std::string_view m);

// Relative letter frequencies by language code; only "en" is built in.
const LetterFrequencies& language_profile(std::string_view code);

struct CrackResult {
  int shift = 0;                    // encryption shift; caesar(c, -shift) decrypts
  std::array<double, 26> chi_square{};
  bool confident = false;           // best < half the runner-up
};

CrackResult crack_caesar(std::string_view c, const LetterFrequencies& profile);

BitSequence otp_xor(const BitSequence& key, const BitSequence& message);

}  // namespace qcomm::cipher
