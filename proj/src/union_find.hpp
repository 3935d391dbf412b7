#ifndef CBN_UNION_FIND_HPP
#define CBN_UNION_FIND_HPP

#include <numeric>
#include <vector>

namespace cbn {

// Path-halving union-find; `unite` keeps the smaller root so that element 0
// stays the representative of its class.
class UnionFind {
public:
    explicit UnionFind(int n = 0) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    void reset(int n) {
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return true;
    }

    int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
};

}  // namespace cbn

#endif
