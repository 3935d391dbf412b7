// Linear algebra over F2: bit-packed vectors and matrices, sparse column
// reduction, homology with tracked representatives, and Gaussian
// elimination of chain complexes.

#ifndef CBN_F2LINALG_HPP
#define CBN_F2LINALG_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbn {

class LinalgError : public std::runtime_error {
public:
    explicit LinalgError(const std::string& what) : std::runtime_error(what) {}
};

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}
    static BitVector unit(std::size_t n, std::size_t i);

    std::size_t size() const { return n_; }
    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true) {
        if (v) w_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVector& operator^=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    bool operator==(const BitVector& o) const = default;

    bool any() const;
    std::size_t count() const;
    // Lowest set index at or after `from`, or -1.
    long next(std::size_t from = 0) const;
    std::vector<std::size_t> ones() const;
    bool dot(const BitVector& o) const;
    std::string str() const;

    const std::vector<std::uint64_t>& words() const { return w_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

// Dense row-major matrix.
class F2Matrix {
public:
    F2Matrix() = default;
    F2Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), r_(rows, BitVector(cols)) {}
    static F2Matrix identity(std::size_t n);
    static F2Matrix from_columns(std::size_t rows, const std::vector<BitVector>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool get(std::size_t i, std::size_t j) const { return r_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v = true) { r_[i].set(j, v); }
    void flip(std::size_t i, std::size_t j) { r_[i].flip(j); }
    const BitVector& row(std::size_t i) const { return r_[i]; }
    BitVector& row(std::size_t i) { return r_[i]; }
    BitVector column(std::size_t j) const;

    BitVector apply(const BitVector& v) const;  // M v
    F2Matrix operator*(const F2Matrix& o) const;
    F2Matrix& operator+=(const F2Matrix& o);
    F2Matrix transpose() const;
    bool is_zero() const;
    bool operator==(const F2Matrix& o) const = default;

    // Plain-text bitmap, one row per line.
    std::string dump() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BitVector> r_;
};

std::size_t rank(const F2Matrix& m);
std::vector<BitVector> kernel_basis(const F2Matrix& m);

// Incrementally built echelon basis. Each stored vector has a distinct
// pivot (its lowest set bit) and carries a tag recording which inserted
// vectors it combines.
class EchelonBasis {
public:
    EchelonBasis(std::size_t dim, std::size_t tag_dim) : dim_(dim), tag_dim_(tag_dim), pivot_(dim, -1) {}

    // Returns true if v was independent of the basis so far.
    bool insert(BitVector v, BitVector tag);
    // Reduces v in place, accumulating tags; v is left with the residue.
    void reduce(BitVector& v, BitVector& tag) const;
    std::size_t size() const { return vecs_.size(); }
    std::size_t tag_dim() const { return tag_dim_; }

private:
    std::size_t dim_, tag_dim_;
    std::vector<long> pivot_;
    std::vector<BitVector> vecs_, tags_;
};

// Homology at the middle of C_prev --d_in--> C --d_out--> C_next.
class HomologyData {
public:
    std::size_t dimension() const { return reps_.size(); }
    const std::vector<BitVector>& representatives() const { return reps_; }
    std::size_t space_dimension() const { return space_; }
    // Coordinates of the class of a cycle; throws for non-cycles.
    BitVector project(const BitVector& cycle) const;
    bool is_cycle(const BitVector& v) const;

    friend HomologyData homology_at(const F2Matrix& d_out, const F2Matrix& d_in);

private:
    std::size_t space_ = 0;
    F2Matrix d_out_;
    std::vector<BitVector> reps_;
    EchelonBasis basis_{0, 0};  // boundaries (zero tag) and representatives
};

HomologyData homology_at(const F2Matrix& d_out, const F2Matrix& d_in);
F2Matrix induced_map(const F2Matrix& f, const HomologyData& src, const HomologyData& dst);

// Sparse matrix stored by columns; each column is a sorted list of rows.
struct SparseColumns {
    std::size_t rows = 0;
    std::vector<std::vector<std::uint32_t>> cols;

    void add_entry(std::size_t col, std::uint32_t row);  // mod 2 toggle, keeps order
    F2Matrix to_dense() const;
};

// Rank by column reduction with lowest-pivot bookkeeping.
std::size_t sparse_rank(SparseColumns m);

// Cochain complex C_lo -> C_lo+1 -> ... ; d[t] maps degree lo+t to lo+t+1.
struct ChainComplex {
    int lo = 0;
    std::vector<std::size_t> dims;
    std::vector<F2Matrix> d;  // d.size() == dims.size() - 1

    int hi() const { return lo + static_cast<int>(dims.size()) - 1; }
    std::size_t dim(int deg) const;
    // Differential out of `deg`; a zero matrix at the ends.
    F2Matrix diff(int deg) const;
    void check() const;  // d o d = 0, shapes
    std::vector<std::size_t> homology_dims() const;
};

// Per-degree chain maps; f[t] acts in degree lo+t.
struct ComplexMap {
    int lo = 0;
    std::vector<F2Matrix> f;
};

bool is_chain_map(const ComplexMap& f, const ChainComplex& src, const ChainComplex& dst);

struct Elimination {
    ChainComplex reduced;
    ComplexMap forward;   // original -> reduced
    ComplexMap backward;  // reduced -> original
};

// Cancels basis element `col` of degree `deg` against basis element `row` of
// degree deg+1; requires d(deg)[row][col] = 1.
Elimination eliminate_entry(const ChainComplex& c, int deg, std::size_t row, std::size_t col);

}  // namespace cbn

#endif
