#include "w2e/wallet.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "w2e/crypto.hpp"

namespace w2e {

Result<Wordlist> Wordlist::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error(Err::IoError, "cannot open word list: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();

  auto digest = sha256(content);
  if (to_hex(digest) != kEnglishSha256) {
    return Error(Err::CorruptSnapshot, "word list content hash mismatch: " + path);
  }

  Wordlist wl;
  std::istringstream lines(content);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) wl.words_.push_back(line);
  }
  if (wl.words_.size() != 2048) {
    return Error(Err::CorruptSnapshot, "word list must hold 2048 words");
  }
  return wl;
}

int Wordlist::index_of(std::string_view word) const {
  auto it = std::lower_bound(words_.begin(), words_.end(), word);
  if (it == words_.end() || *it != word) return -1;
  return static_cast<int>(it - words_.begin());
}

std::string Mnemonic::phrase() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string_view mnemonic_issue_name(MnemonicIssue issue) {
  switch (issue) {
    case MnemonicIssue::None: return "None";
    case MnemonicIssue::BadWordCount: return "BadWordCount";
    case MnemonicIssue::UnknownWord: return "UnknownWord";
    case MnemonicIssue::BadChecksum: return "BadChecksum";
  }
  return "Unknown";
}

namespace {

bool valid_entropy_len(std::size_t n) {
  return n == 16 || n == 20 || n == 24 || n == 28 || n == 32;
}

bool valid_word_count(std::size_t n) {
  return n == 12 || n == 15 || n == 18 || n == 21 || n == 24;
}

}  // namespace

Result<Mnemonic> generate_mnemonic(std::span<const std::uint8_t> entropy,
                                   const Wordlist& wordlist) {
  if (!valid_entropy_len(entropy.size())) {
    return Error(Err::InvalidEntropyLength,
                 "entropy must be 16/20/24/28/32 bytes, got " +
                     std::to_string(entropy.size()));
  }
  std::size_t entBits = entropy.size() * 8;
  std::size_t csBits = entBits / 32;
  auto checksum = sha256(entropy);

  // entropy || checksum as a bit stream, taken 11 bits at a time.
  std::vector<std::uint8_t> stream(entropy.begin(), entropy.end());
  stream.push_back(checksum[0]);  // at most 8 checksum bits are ever needed
  std::size_t totalBits = entBits + csBits;

  Mnemonic m;
  for (std::size_t bit = 0; bit < totalBits; bit += 11) {
    std::uint32_t idx = 0;
    for (std::size_t k = 0; k < 11; ++k) {
      std::size_t pos = bit + k;
      std::uint8_t b = (stream[pos / 8] >> (7 - pos % 8)) & 1;
      idx = (idx << 1) | b;
    }
    m.words.push_back(wordlist.word(idx));
  }
  return m;
}

MnemonicCheck validate_mnemonic(std::span<const std::string> words,
                                const Wordlist& wordlist) {
  MnemonicCheck check;
  if (!valid_word_count(words.size())) {
    check.issue = MnemonicIssue::BadWordCount;
    return check;
  }
  std::size_t totalBits = words.size() * 11;
  std::size_t csBits = totalBits / 33;
  std::size_t entBits = totalBits - csBits;

  std::vector<std::uint8_t> stream((totalBits + 7) / 8, 0);
  std::size_t bit = 0;
  for (const auto& w : words) {
    int idx = wordlist.index_of(w);
    if (idx < 0) {
      check.issue = MnemonicIssue::UnknownWord;
      check.offendingWord = w;
      return check;
    }
    for (int k = 10; k >= 0; --k, ++bit) {
      if ((idx >> k) & 1) stream[bit / 8] |= static_cast<std::uint8_t>(0x80 >> (bit % 8));
    }
  }

  std::vector<std::uint8_t> entropy(stream.begin(), stream.begin() + entBits / 8);
  auto digest = sha256(std::span<const std::uint8_t>(entropy));
  for (std::size_t k = 0; k < csBits; ++k) {
    std::size_t pos = entBits + k;
    std::uint8_t got = (stream[pos / 8] >> (7 - pos % 8)) & 1;
    std::uint8_t want = (digest[k / 8] >> (7 - k % 8)) & 1;
    if (got != want) {
      check.issue = MnemonicIssue::BadChecksum;
      return check;
    }
  }
  check.valid = true;
  return check;
}

Result<std::vector<std::uint8_t>> mnemonic_to_entropy(std::span<const std::string> words,
                                                      const Wordlist& wordlist) {
  auto check = validate_mnemonic(words, wordlist);
  if (!check.valid) {
    return Error(Err::InvalidMnemonic, std::string(mnemonic_issue_name(check.issue)));
  }
  std::size_t totalBits = words.size() * 11;
  std::size_t entBits = totalBits - totalBits / 33;
  std::vector<std::uint8_t> entropy(entBits / 8, 0);
  std::size_t bit = 0;
  for (const auto& w : words) {
    int idx = wordlist.index_of(w);
    for (int k = 10; k >= 0; --k, ++bit) {
      if (bit < entBits && ((idx >> k) & 1)) {
        entropy[bit / 8] |= static_cast<std::uint8_t>(0x80 >> (bit % 8));
      }
    }
  }
  return entropy;
}

Result<std::array<std::uint8_t, 64>> mnemonic_to_seed(std::span<const std::string> words,
                                                      const Wordlist& wordlist,
                                                      std::string_view passphrase) {
  auto check = validate_mnemonic(words, wordlist);
  if (!check.valid) {
    return Error(Err::InvalidMnemonic, std::string(mnemonic_issue_name(check.issue)));
  }
  std::string password;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) password.push_back(' ');
    password += words[i];
  }
  std::string salt = "mnemonic";
  salt += passphrase;
  auto key = pbkdf2_hmac_sha512(password, salt, 2048, 64);
  std::array<std::uint8_t, 64> seed{};
  std::copy(key.begin(), key.end(), seed.begin());
  return seed;
}

DerivedAccount derive_account(const std::array<std::uint8_t, 64>& seed, std::uint32_t index) {
  std::array<std::uint8_t, 68> material{};
  std::copy(seed.begin(), seed.end(), material.begin());
  material[64] = static_cast<std::uint8_t>(index >> 24);
  material[65] = static_cast<std::uint8_t>(index >> 16);
  material[66] = static_cast<std::uint8_t>(index >> 8);
  material[67] = static_cast<std::uint8_t>(index);
  auto digest = sha256(std::span<const std::uint8_t>(material));
  DerivedAccount acct;
  acct.seed = seed;
  acct.index = index;
  std::copy_n(digest.begin(), 20, acct.address.bytes.begin());
  return acct;
}

std::vector<std::string> split_phrase(std::string_view phrase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    std::size_t start = i;
    while (i < phrase.size() && phrase[i] != ' ') ++i;
    if (i > start) out.emplace_back(phrase.substr(start, i - start));
  }
  return out;
}

}  // namespace w2e
