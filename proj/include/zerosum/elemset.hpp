#pragma once

#include <cstdint>
#include <vector>

namespace zerosum {

// Subset of group element indices [0, n), packed 64 per word.
class ElemSet {
public:
    ElemSet() = default;
    explicit ElemSet(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int universe() const { return n_; }
    int nwords() const { return static_cast<int>(w_.size()); }

    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void clear() { for (auto& w : w_) w = 0; }

    int count() const {
        int c = 0;
        for (uint64_t w : w_) c += __builtin_popcountll(w);
        return c;
    }
    bool empty() const {
        for (uint64_t w : w_)
            if (w) return false;
        return true;
    }
    bool any() const { return !empty(); }

    ElemSet& operator|=(const ElemSet& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    ElemSet& operator&=(const ElemSet& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    bool operator==(const ElemSet& o) const = default;

    bool is_subset_of(const ElemSet& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    template <class F>
    void for_each(F&& f) const {
        for (size_t wi = 0; wi < w_.size(); ++wi) {
            uint64_t w = w_[wi];
            while (w) {
                int b = __builtin_ctzll(w);
                f(static_cast<int>(wi * 64 + b));
                w &= w - 1;
            }
        }
    }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        for_each([&](int i) { out.push_back(i); });
        return out;
    }

    uint64_t* data() { return w_.data(); }
    const uint64_t* data() const { return w_.data(); }

private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

}  // namespace zerosum
