#include "qcomm/ciphers.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "qcomm/error.hpp"

namespace qcomm::cipher {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_letter(char c) { return is_upper(c) || is_lower(c); }
char to_upper(char c) { return is_lower(c) ? static_cast<char>(c - 'a' + 'A') : c; }

int mod26(int v) { return ((v % 26) + 26) % 26; }

char shift_letter(char c, int shift) {
  if (is_upper(c)) return static_cast<char>('A' + mod26(c - 'A' + shift));
  if (is_lower(c)) return static_cast<char>('a' + mod26(c - 'a' + shift));
  return c;
}

// Rail of each position in the zigzag with cycle 2R - 2.
std::vector<int> rail_pattern(std::size_t n, int rails) {
  const int cycle = 2 * rails - 2;
  std::vector<int> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int r = static_cast<int>(i % static_cast<std::size_t>(cycle));
    rows[i] = r < rails ? r : cycle - r;
  }
  return rows;
}

void check_rails(std::string_view m, int rails) {
  require(rails >= 2, "rail fence needs at least 2 rails");
  require(!m.empty(), "rail fence message must not be empty");
}

std::vector<int> key_shifts(std::string_view key) {
  std::vector<int> shifts;
  for (char c : key)
    if (is_letter(c)) shifts.push_back(to_upper(c) - 'A');
  require(!shifts.empty(), "Vigenere key must contain at least one letter");
  return shifts;
}

std::string vigenere(std::string_view m, std::string_view key, int sign) {
  const auto shifts = key_shifts(key);
  std::string out(m);
  std::size_t k = 0;
  for (auto& c : out) {
    if (!is_letter(c)) continue;
    c = shift_letter(c, sign * shifts[k++ % shifts.size()]);
  }
  return out;
}

char fold_letter(char c, const PlayfairTable& table) {
  const char u = to_upper(c);
  if (table.contains(u)) return u;
  if (u == 'J' && table.contains('I')) return 'I';
  throw ValidationError(std::string("letter '") + u + "' is absent from the Playfair table");
}

char filler_for(char letter, const PlayfairTable& table) {
  const char f = letter == 'X' ? 'Q' : 'X';
  require(table.contains(f), std::string("Playfair filler '") + f + "' is absent from the table");
  return f;
}

void map_digraphs(std::string& s, const PlayfairTable& t) {
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
    const char a = s[i], b = s[i + 1];
    require(a != b, "Playfair digraph with a repeated letter: " + std::string{a, b});
    const int ra = t.row_of(a), ca = t.col_of(a), rb = t.row_of(b), cb = t.col_of(b);
    if (ra == rb || ca == cb) {
      std::swap(s[i], s[i + 1]);
    } else {
      s[i] = t.at(rb, ca);
      s[i + 1] = t.at(ra, cb);
    }
  }
}

constexpr LetterFrequencies kEnglish = {
    0.08167, 0.01492, 0.02782, 0.04253, 0.12702, 0.02228, 0.02015, 0.06094, 0.06966,
    0.00153, 0.00772, 0.04025, 0.02406, 0.06749, 0.07507, 0.01929, 0.00095, 0.05987,
    0.06327, 0.09056, 0.02758, 0.00978, 0.02360, 0.00150, 0.01974, 0.00074};

}  // namespace

std::string rail_fence_encrypt(std::string_view m, int rails) {
  check_rails(m, rails);
  const auto rows = rail_pattern(m.size(), rails);
  std::string out;
  out.reserve(m.size());
  for (int r = 0; r < rails; ++r)
    for (std::size_t i = 0; i < m.size(); ++i)
      if (rows[i] == r) out.push_back(m[i]);
  return out;
}

std::string rail_fence_decrypt(std::string_view c, int rails) {
  check_rails(c, rails);
  const auto rows = rail_pattern(c.size(), rails);
  std::string out(c.size(), '\0');
  std::size_t k = 0;
  for (int r = 0; r < rails; ++r)
    for (std::size_t i = 0; i < c.size(); ++i)
      if (rows[i] == r) out[i] = c[k++];
  return out;
}

std::string caesar(std::string_view m, int shift) {
  std::string out(m);
  for (auto& c : out) c = shift_letter(c, shift % 26);
  return out;
}

std::string rot13(std::string_view m) { return caesar(m, 13); }

std::string vigenere_encrypt(std::string_view m, std::string_view key) { return vigenere(m, key, 1); }

std::string vigenere_decrypt(std::string_view c, std::string_view key) { return vigenere(c, key, -1); }

PlayfairTable::PlayfairTable(std::string_view letters) {
  pos_.fill(-1);
  for (char c : letters) {
    if (c == ' ' || c == '\n' || c == '\t') continue;
    require(is_letter(c), std::string("Playfair table holds letters only, got '") + c + "'");
    const char u = to_upper(c);
    require(pos_[static_cast<std::size_t>(u - 'A')] < 0,
            std::string("Playfair table repeats letter '") + u + "'");
    pos_[static_cast<std::size_t>(u - 'A')] = static_cast<int>(grid_.size());
    grid_.push_back(u);
  }
  require(grid_.size() == 25, "Playfair table needs 25 letters, got " + std::to_string(grid_.size()));
}

PlayfairTable PlayfairTable::reference() { return PlayfairTable("QRFIO AEVKL ZDBMP WCNUG SXHYT"); }

std::string playfair_prepare(std::string_view m, const PlayfairTable& table) {
  std::string letters;
  for (char c : m)
    if (is_letter(c)) letters.push_back(fold_letter(c, table));
  std::string out;
  for (std::size_t i = 0; i < letters.size();) {
    const char a = letters[i];
    if (i + 1 < letters.size() && letters[i + 1] != a) {
      out += {a, letters[i + 1]};
      i += 2;
    } else {
      out += {a, filler_for(a, table)};
      i += 1;
    }
  }
  return out;
}

std::string playfair_encrypt(std::string_view m, const PlayfairTable& table) {
  std::string s = playfair_prepare(m, table);
  map_digraphs(s, table);
  return s;
}

std::string playfair_decrypt(std::string_view c, const PlayfairTable& table) {
  std::string s;
  for (char ch : c)
    if (is_letter(ch)) s.push_back(fold_letter(ch, table));
  require(s.size() % 2 == 0, "Playfair ciphertext must have an even number of letters");
  map_digraphs(s, table);
  return s;
}

std::string digraphs(std::string_view letters) {
  std::string out;
  for (std::size_t i = 0; i < letters.size(); i += 2) {
    if (i) out.push_back(' ');
    out += letters.substr(i, 2);
  }
  return out;
}

std::string homophonic_encrypt(std::string_view m) {
  std::string out;
  for (char c : m) {
    if (!is_letter(c)) continue;
    out.push_back(shift_letter(c, -1));
    out.push_back(shift_letter(c, 1));
  }
  return out;
}

std::string homophonic_decrypt(std::string_view c) {
  std::string letters;
  for (char ch : c)
    if (is_letter(ch)) letters.push_back(ch);
  require(letters.size() % 2 == 0, "homophonic ciphertext must have an even number of letters");
  std::string out;
  for (std::size_t i = 0; i < letters.size(); i += 2) {
    const char p = letters[i], s = letters[i + 1];
    require(is_upper(p) == is_upper(s) && mod26(to_upper(s) - to_upper(p)) == 2,
            "homophonic pair '" + std::string{p, s} + "' is not an adjacent pair");
    out.push_back(shift_letter(p, 1));
  }
  return out;
}

BitSequence ascii_to_bits(std::string_view text) {
  BitSequence out;
  out.reserve(8 * text.size());
  for (char c : text) {
    const auto v = static_cast<unsigned char>(c);
    require(v < 128, "character outside 7-bit ASCII at offset " + std::to_string(out.size() / 8));
    for (int k = 7; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((v >> k) & 1u));
  }
  return out;
}

std::string bits_to_ascii(const BitSequence& bits) {
  require(bits.size() % 8 == 0, "bit count must be a multiple of 8");
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      require(bits[i + k] <= 1, "bit values must be 0 or 1");
      v = (v << 1) | bits[i + k];
    }
    require(v < 128, "byte above 127 at offset " + std::to_string(i / 8));
    out.push_back(static_cast<char>(v));
  }
  return out;
}

std::string bits_to_string(const BitSequence& bits) {
  std::string out;
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

BitSequence bits_from_string(std::string_view zeros_and_ones) {
  BitSequence out;
  for (char c : zeros_and_ones) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    require(c == '0' || c == '1', std::string("bit strings hold 0 and 1 only, got '") + c + "'");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

LetterFrequencies frequency_analysis(std::string_view m) {
  LetterFrequencies f{};
  double n = 0.0;
  for (char c : m) {
    if (!is_letter(c)) continue;
    f[static_cast<std::size_t>(to_upper(c) - 'A')] += 1.0;
    n += 1.0;
  }
  require(n > 0.0, "text contains no letters");
  for (auto& v : f) v /= n;
  return f;
}

const LetterFrequencies& language_profile(std::string_view code) {
  require(code == "en", "unknown language profile '" + std::string(code) + "' (available: en)");
  return kEnglish;
}

CrackResult crack_caesar(std::string_view c, const LetterFrequencies& profile) {
  std::array<double, 26> counts{};
  double n = 0.0;
  for (char ch : c) {
    if (!is_letter(ch)) continue;
    counts[static_cast<std::size_t>(to_upper(ch) - 'A')] += 1.0;
    n += 1.0;
  }
  require(n > 0.0, "text contains no letters");
  CrackResult r;
  for (int s = 0; s < 26; ++s) {
    double chi = 0.0;
    for (int k = 0; k < 26; ++k) {
      const double expected = n * profile[static_cast<std::size_t>(k)];
      const double observed = counts[static_cast<std::size_t>(mod26(k + s))];
      if (expected > 0.0) chi += (observed - expected) * (observed - expected) / expected;
    }
    r.chi_square[static_cast<std::size_t>(s)] = chi;
  }
  double best = std::numeric_limits<double>::infinity(), second = best;
  for (int s = 0; s < 26; ++s) {
    const double v = r.chi_square[static_cast<std::size_t>(s)];
    if (v < best) {
      second = best;
      best = v;
      r.shift = s;
    } else if (v < second) {
      second = v;
    }
  }
  r.confident = best < 0.5 * second;
  return r;
}

BitSequence otp_xor(const BitSequence& key, const BitSequence& message) {
  require(key.size() == message.size(), "one-time pad key and message lengths differ (" +
                                            std::to_string(key.size()) + " vs " +
                                            std::to_string(message.size()) + ")");
  BitSequence out(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) out[i] = (key[i] ^ message[i]) & 1u;
  return out;
}

}  // namespace qcomm::cipher
