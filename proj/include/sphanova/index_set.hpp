#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphanova {

/// A subset u of {1, ..., d+1} identifying which variables a term depends
/// on. Members are kept sorted; comparison is by (size, members), the
/// deterministic ordering used throughout catalogs and reports.
class IndexSet {
  public:
    IndexSet() = default;

    IndexSet(std::initializer_list<int> members, int ambient)
        : IndexSet(std::vector<int>(members), ambient) {}

    IndexSet(std::vector<int> members, int ambient) : members_(std::move(members)), ambient_(ambient) {
        std::sort(members_.begin(), members_.end());
        if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
            throw std::invalid_argument("IndexSet: duplicate member");
        for (int i : members_)
            if (i < 1 || i > ambient_) throw std::invalid_argument("IndexSet: member out of range");
    }

    static IndexSet empty(int ambient) { return IndexSet(std::vector<int>{}, ambient); }

    static IndexSet full(int ambient) {
        std::vector<int> all(static_cast<size_t>(ambient));
        for (int i = 0; i < ambient; ++i) all[static_cast<size_t>(i)] = i + 1;
        return IndexSet(std::move(all), ambient);
    }

    const std::vector<int>& members() const { return members_; }
    int ambient() const { return ambient_; }
    int order() const { return static_cast<int>(members_.size()); }
    bool contains(int i) const { return std::binary_search(members_.begin(), members_.end(), i); }

    IndexSet complement() const {
        std::vector<int> out;
        out.reserve(static_cast<size_t>(ambient_ - order()));
        for (int i = 1; i <= ambient_; ++i)
            if (!contains(i)) out.push_back(i);
        return IndexSet(std::move(out), ambient_);
    }

    bool subset_of(const IndexSet& other) const {
        return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                             members_.end());
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (int i : members_) m |= (1ULL << (i - 1));
        return m;
    }

    static IndexSet from_mask(std::uint64_t mask, int ambient) {
        std::vector<int> members;
        for (int i = 1; i <= ambient; ++i)
            if (mask & (1ULL << (i - 1))) members.push_back(i);
        return IndexSet(std::move(members), ambient);
    }

    /// Every subset of this set (including empty and itself).
    std::vector<IndexSet> subsets() const {
        const int n = order();
        std::vector<IndexSet> out;
        out.reserve(1ULL << n);
        for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
            std::vector<int> members;
            for (int j = 0; j < n; ++j)
                if (bits & (1ULL << j)) members.push_back(members_[static_cast<size_t>(j)]);
            out.emplace_back(std::move(members), ambient_);
        }
        return out;
    }

    /// "{}" or "{1,2}" -- the serialization used in CSV reports.
    std::string to_string() const {
        std::string s = "{";
        for (size_t i = 0; i < members_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(members_[i]);
        }
        return s + "}";
    }

    friend bool operator==(const IndexSet& a, const IndexSet& b) {
        return a.ambient_ == b.ambient_ && a.members_ == b.members_;
    }
    friend bool operator!=(const IndexSet& a, const IndexSet& b) { return !(a == b); }
    friend bool operator<(const IndexSet& a, const IndexSet& b) {
        if (a.order() != b.order()) return a.order() < b.order();
        return a.members_ < b.members_;
    }

  private:
    std::vector<int> members_;
    int ambient_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const IndexSet& u) { return os << u.to_string(); }

/// Parity pattern xi in {0,1}^{d+1}; bit i-1 set means odd in direction i.
class ParityVector {
  public:
    ParityVector() = default;
    ParityVector(std::uint64_t bits, int length) : bits_(bits), length_(length) {
        if (length < 1 || length > 63) throw std::invalid_argument("ParityVector: bad length");
        if (bits >> length) throw std::invalid_argument("ParityVector: bits out of range");
    }

    static ParityVector zero(int length) { return ParityVector(0, length); }

    static ParityVector unit(int i, int length) { return ParityVector(1ULL << (i - 1), length); }

    static ParityVector odd_on(const IndexSet& u) { return ParityVector(u.mask(), u.ambient()); }

    int length() const { return length_; }
    std::uint64_t bits() const { return bits_; }
    bool odd_in(int i) const { return (bits_ >> (i - 1)) & 1ULL; }
    int weight() const { return __builtin_popcountll(bits_); }

    IndexSet support() const { return IndexSet::from_mask(bits_, length_); }

    /// xi belongs to Upsilon_u iff its support lies inside u.
    bool supported_in(const IndexSet& u) const { return (bits_ & ~u.mask()) == 0; }

    /// Bit string "0100...", index 1 first.
    std::string to_string() const {
        std::string s(static_cast<size_t>(length_), '0');
        for (int i = 1; i <= length_; ++i)
            if (odd_in(i)) s[static_cast<size_t>(i - 1)] = '1';
        return s;
    }

    static ParityVector from_string(const std::string& s) {
        ParityVector xi(0, static_cast<int>(s.size()));
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                xi.bits_ |= (1ULL << i);
            else if (s[i] != '0')
                throw std::invalid_argument("ParityVector: bad bit string");
        }
        return xi;
    }

    friend bool operator==(const ParityVector& a, const ParityVector& b) {
        return a.length_ == b.length_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const ParityVector& a, const ParityVector& b) { return !(a == b); }
    friend bool operator<(const ParityVector& a, const ParityVector& b) { return a.bits_ < b.bits_; }

  private:
    std::uint64_t bits_ = 0;
    int length_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const ParityVector& xi) {
    return os << xi.to_string();
}

} // namespace sphanova
