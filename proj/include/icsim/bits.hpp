#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace icsim {

// Packed bit string, LSB-first within 64-bit words. Used for protocol messages,
// so lengths are explicit and a message of k bits is exactly k bits, not k bytes.
class BitString {
  public:
    int length() const { return len_; }
    bool empty() const { return len_ == 0; }

    // Appends the low `nbits` bits of `value` (LSB first).
    void append_bits(uint64_t value, int nbits) {
        assert(nbits >= 0 && nbits <= 64);
        if (nbits == 0) return;
        if (nbits < 64) value &= (uint64_t(1) << nbits) - 1;
        int word = len_ >> 6, off = len_ & 63;
        if (word >= static_cast<int>(words_.size())) words_.push_back(0);
        words_[word] |= value << off;
        if (off + nbits > 64) {
            words_.push_back(value >> (64 - off));
        }
        len_ += nbits;
    }

    uint64_t read_bits(int pos, int nbits) const {
        assert(nbits >= 0 && nbits <= 64 && pos >= 0 && pos + nbits <= len_);
        if (nbits == 0) return 0;
        int word = pos >> 6, off = pos & 63;
        uint64_t v = words_[word] >> off;
        if (off + nbits > 64) v |= words_[word + 1] << (64 - off);
        if (nbits < 64) v &= (uint64_t(1) << nbits) - 1;
        return v;
    }

    bool operator==(const BitString& o) const { return len_ == o.len_ && words_ == o.words_; }

    // Hex dump, low byte first; final partial byte zero-padded high.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        int nbytes = (len_ + 7) / 8;
        out.reserve(2 * static_cast<size_t>(nbytes));
        for (int i = 0; i < nbytes; ++i) {
            uint64_t byte = read_bits(8 * i, std::min(8, len_ - 8 * i));
            out.push_back(digits[(byte >> 4) & 0xf]);
            out.push_back(digits[byte & 0xf]);
        }
        return out;
    }

    // Canonical byte serialization (length + payload); usable as an ordered map key.
    std::string key() const {
        std::string out;
        out.reserve(4 + words_.size() * 8);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len_ >> (8 * i)) & 0xff));
        for (int i = 0; i < (len_ + 7) / 8; ++i)
            out.push_back(static_cast<char>(read_bits(8 * i, std::min(8, len_ - 8 * i))));
        return out;
    }

  private:
    std::vector<uint64_t> words_;
    int len_ = 0;
};

// Sequential reader over a BitString.
struct BitCursor {
    const BitString* s;
    int pos = 0;
    explicit BitCursor(const BitString& str) : s(&str) {}
    uint64_t take(int nbits) {
        uint64_t v = s->read_bits(pos, nbits);
        pos += nbits;
        return v;
    }
};

}  // namespace icsim
